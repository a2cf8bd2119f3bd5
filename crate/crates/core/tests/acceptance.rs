//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Built with `harness = false` so the lines print in order.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use graphfield::curve::{generator_closure, AdditionCache, Curve, CurvePoint};
use graphfield::decoder::{decode_g, detect_edges, replay, Mode};
use graphfield::encoder::{encode_d0, stage_bound};
use graphfield::exact::{
    is_b, relation_poly, DifferentialPolynomial, EdgeId, FieldElement, RatFunc, Tower,
};
use graphfield::gadgets::{decode_f, encode_h, transfer_h};
use graphfield::graph::Graph;
use graphfield::presentation::{apply_permutation, ClosureConfig, FactStream};
use graphfield::transfer::{
    audit_transfer, classify_order0, embed_edges, natural_iso_prefix, transfer_d0, TransferError,
};

type Outcome = Result<String, String>;

struct Ctx {
    rng: ChaCha8Rng,
    /// Every labeled graph on at most 5 nodes with its full stream.
    corpus: Vec<(Graph, FactStream)>,
}

fn full(g: &Graph) -> FactStream {
    let cfg = ClosureConfig::default();
    encode_d0(g, stage_bound(g, &cfg), &cfg)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gadget_round_trip(cx: &mut Ctx) -> Outcome {
    let mut graphs = Graph::isomorphism_classes(4);
    let classes = graphs.len();
    ensure(classes == 11, || format!("{classes} classes on 4 nodes"))?;
    for _ in 0..200 {
        let n = cx.rng.gen_range(0..=10);
        graphs.push(Graph::random(n, &mut cx.rng));
    }
    for g in &graphs {
        let d = decode_f(&encode_h(g)).map_err(|e| e.to_string())?;
        ensure(d.is_complete() && d.graph() == *g, || format!("{} decodes to {}", g.to_json(), d.graph().to_json()))?;
    }
    Ok(format!("{classes} classes + 200 random"))
}

fn codec_round_trip(cx: &mut Ctx) -> Outcome {
    for n in 0..=5 {
        for g in Graph::all_labeled(n) {
            let s = full(&g);
            let d = decode_g(&s, Mode::C).map_err(|e| e.to_string())?;
            ensure(d.is_complete() && d.graph() == g, || format!("{} decodes to {}", g.to_json(), d.graph().to_json()))?;
            cx.corpus.push((g, s));
        }
    }
    Ok(format!("{} graphs", cx.corpus.len()))
}

fn equivariance(cx: &mut Ctx) -> Outcome {
    for _ in 0..50 {
        let g = Graph::random(cx.rng.gen_range(1..=4), &mut cx.rng);
        let s = full(&g);
        let mut pi: Vec<u32> = (0..s.introduced().len() as u32).collect();
        pi.shuffle(&mut cx.rng);
        let t = apply_permutation(&s, &pi).map_err(|e| e.to_string())?;
        let d = decode_g(&t, Mode::C).map_err(|e| e.to_string())?;
        ensure(d.is_complete() && d.graph().find_isomorphism(&g).is_some(), || {
            format!("copy of {} decodes to {}", g.to_json(), d.graph().to_json())
        })?;
    }
    Ok("50 copies".into())
}

fn kernel_laws(cx: &mut Ctx) -> Outcome {
    let rng = &mut cx.rng;
    for k in 0..1000 {
        let (x, y, z) = (
            common::random_element(rng, 2),
            common::random_element(rng, 2),
            common::random_element(rng, 2),
        );
        let (name, ok) = match k % 5 {
            0 => ("add assoc", x.add(&y).add(&z) == x.add(&y.add(&z))),
            1 => ("mul assoc", x.mul(&y).mul(&z) == x.mul(&y.mul(&z))),
            2 => ("distrib", x.mul(&y.add(&z)) == x.mul(&y).add(&x.mul(&z))),
            3 => ("neg", x.add(&x.neg()).is_zero()),
            _ => {
                let x = common::random_nonzero(rng, 2);
                ("inv", x.mul(&x.inv().unwrap()).is_one())
            }
        };
        ensure(ok, || format!("{name} fails at {x}, {y}, {z}"))?;
    }
    for _ in 0..500 {
        let x = common::random_element(rng, 2);
        let y = common::random_element(rng, 2);
        ensure(x.add(&y).delta() == x.delta().add(&y.delta()), || format!("additivity at {x}, {y}"))?;
        let leibniz = x.delta().mul(&y).add(&x.mul(&y.delta()));
        ensure(x.mul(&y).delta() == leibniz, || format!("Leibniz at {x}, {y}"))?;
    }
    let mut tower = Tower::new(5);
    for n in 0..5 {
        for m in 0..n {
            tower.register_edge(EdgeId::new(m, n).unwrap()).map_err(|e| e.to_string())?;
        }
    }
    let edges: Vec<EdgeId> = tower.edges().collect();
    for &e in &edges {
        let v = FieldElement::v(e);
        let g = FieldElement::from_ratfunc(RatFunc::from_poly(relation_poly(e)));
        let two = FieldElement::from_int(2);
        // d(v^2 - g) expanded by Leibniz
        let d = two.mul(&v).mul(&v.delta()).sub(&g.delta());
        ensure(d.is_zero() && v.mul(&v).sub(&g).is_zero(), || format!("relation of {e} not preserved"))?;
    }
    Ok(format!("1000 identities, 500 pairs, {} edges", edges.len()))
}

fn curve_laws(cx: &mut Ctx) -> Outcome {
    let e = common::e01();
    let c = Curve::coding(e);
    let mut cache = AdditionCache::default();
    let pts = generator_closure(&c, &Curve::coding_point(e), &mut cache);
    for &i in &pts {
        for &j in &pts {
            for &k in &pts {
                let ij = cache.add(&c, i, j);
                let jk = cache.add(&c, j, k);
                let l = cache.add(&c, ij, k);
                let r = cache.add(&c, i, jk);
                ensure(l == r, || format!("associativity fails at {i} {j} {k}"))?;
            }
        }
    }
    let triples = pts.len().pow(3);

    let mut curves = Vec::new();
    while curves.len() < 10 {
        let l = FieldElement::from_ratio(cx.rng.gen_range(-9..=9), cx.rng.gen_range(1..=5));
        if let Ok(c) = Curve::new(l) {
            curves.push(c);
        }
    }
    for n in 1..=4 {
        for m in 0..n {
            curves.push(Curve::coding(EdgeId::new(m, n).unwrap()));
        }
    }
    for c in &curves {
        let t = c.two_torsion();
        let distinct: std::collections::HashSet<_> = t.iter().collect();
        ensure(t.len() == 4 && distinct.len() == 4, || format!("two-torsion of {}", c.lambda()))?;
        for p in &t {
            ensure(c.on_curve(p) && c.double(p) == CurvePoint::Infinity, || format!("{p} is not 2-torsion"))?;
        }
    }

    let mut checked = 0;
    for n in 1..4 {
        for m in 0..n {
            let e = EdgeId::new(m, n).unwrap();
            let c = Curve::coding(e);
            let psi = c.division_polys(7).map_err(|e| e.to_string())?;
            let u = FieldElement::u(e);
            for (j, p) in psi.iter().enumerate().skip(2) {
                ensure(!p.eval_x(&u).is_zero(), || format!("psi_{j} vanishes at u of {e}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{triples} triples, {} curves, {checked} psi values", curves.len()))
}

fn predicate_agreement(cx: &mut Ctx) -> Outcome {
    let mut streams: Vec<&FactStream> = cx.corpus.iter().map(|(_, s)| s).collect();
    let mut copies = Vec::new();
    for (g, s) in &cx.corpus {
        if g.node_count() <= 4 {
            let mut pi: Vec<u32> = (0..s.introduced().len() as u32).collect();
            pi.shuffle(&mut cx.rng);
            copies.push(apply_permutation(s, &pi).map_err(|e| e.to_string())?);
        }
    }
    streams.extend(copies.iter());
    for s in &streams {
        let c = detect_edges(s, Mode::C).map_err(|e| e.to_string())?;
        let b = detect_edges(s, Mode::B).map_err(|e| e.to_string())?;
        ensure(c == b, || format!("C finds {c:?}, B finds {b:?}"))?;
    }
    let mut dependent = 0;
    for _ in 0..100 {
        let (x, y) = common::oracle_pair(&mut cx.rng);
        let found = common::has_relation(&x, &y, 4);
        ensure(is_b(&x, &y) == found, || format!("is_b({x}, {y}) disagrees with the search"))?;
        dependent += found as usize;
    }
    Ok(format!("{} streams, 100 pairs ({dependent} dependent)", streams.len()))
}

fn transfer_audit(cx: &mut Ctx) -> Outcome {
    let (mut facts, mut outside) = (0, 0);
    for _ in 0..50 {
        let n = cx.rng.gen_range(1..=4);
        let g = Graph::random(n, &mut cx.rng);
        let mut pi: Vec<u32> = (0..n).collect();
        pi.shuffle(&mut cx.rng);
        let gg = g.permuted(&pi).map_err(|e| e.to_string())?;
        let (s, t) = (full(&g), full(&gg));
        let f = transfer_d0(&pi, &s, &t).map_err(|e| e.to_string())?;
        let au = audit_transfer(&f, &s, &t).map_err(|e| e.to_string())?;
        ensure(au.literal > 0, || format!("nothing of {} maps", g.to_json()))?;
        facts += au.literal + au.semantic;
        outside += au.outside;

        let (lrep, rrep) = (replay(&s).map_err(|e| e.to_string())?, replay(&t).map_err(|e| e.to_string())?);
        let h = transfer_h(&pi, &g, &gg).map_err(|e| e.to_string())?;
        for (k, &a) in lrep.a.iter().enumerate() {
            ensure(f.get(a) == rrep.a.get(h[k] as usize).copied(), || format!("a{k} of {} misplaced", g.to_json()))?;
        }
        for &(u, v, e) in &lrep.points {
            ensure(f.get(u).is_some() && f.get(v).is_some(), || format!("point of {e} unmapped"))?;
        }
        let own = natural_iso_prefix(&s).map_err(|e| e.to_string())?;
        for &a in &lrep.a {
            ensure(own.get(a) == Some(a), || format!("natural map moves index {a}"))?;
        }
    }
    Ok(format!("50 isomorphisms, {facts} facts preserved, {outside} outside the map"))
}

fn leaf(rng: &mut ChaCha8Rng, h: &Graph) -> FieldElement {
    let edges: Vec<(u32, u32)> = h.edges().collect();
    match rng.gen_range(0..8) {
        0 | 1 => FieldElement::from_ratio(rng.gen_range(-3..=3), rng.gen_range(1..=2)),
        2..=4 => FieldElement::a(rng.gen_range(0..h.node_count())),
        5 | 6 if !edges.is_empty() => {
            let (m, n) = edges[rng.gen_range(0..edges.len())];
            FieldElement::u(EdgeId::new(m, n).unwrap())
        }
        7 if !edges.is_empty() => {
            let (m, n) = edges[rng.gen_range(0..edges.len())];
            FieldElement::v(EdgeId::new(m, n).unwrap())
        }
        _ => FieldElement::one(),
    }
}

fn verdict(r: Result<graphfield::transfer::Verdict, TransferError>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(TransferError::MalformedPair(_)) => "malformed".into(),
        Err(e) => format!("error {e}"),
    }
}

fn classifier_echo(cx: &mut Ctx) -> Outcome {
    let rng = &mut cx.rng;
    let q = DifferentialPolynomial::constant(FieldElement::one());
    let mut tally = std::collections::BTreeMap::new();
    for _ in 0..10 {
        let f = Graph::random(rng.gen_range(2..=5), rng);
        let nh = rng.gen_range(1..=f.node_count());
        let kept: Vec<(u32, u32)> = f.edges().filter(|&(_, y)| y < nh && rng.gen_bool(0.7)).collect();
        let h = Graph::from_edges(nh, kept).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let deg = rng.gen_range(1..=3);
            let mut cs: Vec<FieldElement> = (0..deg).map(|_| leaf(rng, &h).add(&leaf(rng, &h))).collect();
            cs.push(FieldElement::one());
            let mut p = DifferentialPolynomial::from_coeffs(cs);
            if rng.gen_bool(0.1) {
                // positive order
                p = DifferentialPolynomial::indeterminate(1).add(&p.sub(&DifferentialPolynomial::indeterminate(0).pow(deg)));
            }
            let before = verdict(classify_order0(&p, &q));
            let pe = embed_edges(&h, &f, &p).map_err(|e| e.to_string())?;
            let after = verdict(classify_order0(&pe, &q));
            ensure(before == after, || format!("{before} becomes {after}"))?;
            *tally.entry(before).or_insert(0) += 1;
        }
    }
    let summary: Vec<String> = tally.iter().map(|(k, v)| format!("{k} {v}")).collect();
    Ok(format!("100 pairs: {}", summary.join(", ")))
}

fn cli(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut argv = vec!["graphfield"];
    argv.extend_from_slice(args);
    let code = graphfield::cli::run_with(argv, &mut out, &mut err);
    (code, out, err)
}

/// Runs a subcommand twice; outputs, and the named output files, must match
/// byte for byte.
fn twice(args: &[&str], files: &[&Path]) -> Result<(), String> {
    let snapshot = || -> (i32, Vec<u8>, Vec<u8>, Vec<Vec<u8>>) {
        let (c, o, e) = cli(args);
        let fs = files.iter().map(|p| std::fs::read(p).unwrap_or_default()).collect();
        (c, o, e, fs)
    };
    let first = snapshot();
    let second = snapshot();
    ensure(first == second, || format!("`{}` differs between runs", args.join(" ")))?;
    ensure(first.0 == 0 || args[0] == "roundtrip", || {
        format!("`{}` exits {}: {}", args.join(" "), first.0, String::from_utf8_lossy(&first.2))
    })
}

fn determinism(cx: &mut Ctx) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name);
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let (graph, stream, dec) = (p("g.json"), p("s.jsonl"), p("d.json"));
    let mut runs = 0;
    for (g, own) in &cx.corpus {
        std::fs::write(&graph, g.to_json()).map_err(|e| e.to_string())?;
        twice(&["encode", "--graph", &s(&graph), "--out", &s(&stream)], &[&stream])?;
        let written = std::fs::read_to_string(&stream).map_err(|e| e.to_string())?;
        ensure(written == own.write(), || format!("CLI stream of {} differs from the library", g.to_json()))?;
        twice(&["decode", "--in", &s(&stream), "--out", &s(&dec)], &[&dec])?;
        twice(&["audit", "--in", &s(&stream)], &[])?;
        runs += 3;
        if g.node_count() <= 3 {
            twice(&["roundtrip", "--graph", &s(&graph), "--stages", "300"], &[])?;
            twice(&["decode", "--in", &s(&stream), "--mode", "B"], &[])?;
            runs += 2;
        }
    }

    let (left, right, iso, map) = (p("l.jsonl"), p("r.jsonl"), p("iso.json"), p("map.json"));
    let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let pi = [2, 0, 3, 1];
    std::fs::write(&left, full(&g).write()).map_err(|e| e.to_string())?;
    std::fs::write(&right, full(&g.permuted(&pi).unwrap()).write()).map_err(|e| e.to_string())?;
    std::fs::write(&iso, serde_json::to_string(&pi).unwrap()).map_err(|e| e.to_string())?;
    twice(&["transfer", "--iso", &s(&iso), "--left", &s(&left), "--right", &s(&right), "--out", &s(&map)], &[&map])?;
    twice(&["curve", "--edge", "0,1", "--multiple", "2"], &[])?;
    twice(&["curve", "--lambda", "-3", "--x", "3", "--y", "6", "--torsion", "12"], &[])?;
    let pair = p("pair.json");
    for (pp, qq) in [("Y^2 - a0", "1"), ("Y - u[0,1]", "1"), ("Y' - Y", "Y")] {
        std::fs::write(&pair, serde_json::json!({"p": pp, "q": qq}).to_string()).map_err(|e| e.to_string())?;
        twice(&["classify", "--pair", &s(&pair)], &[])?;
    }
    runs += 6;
    Ok(format!("{runs} subcommand runs"))
}

fn main() {
    let mut cx = Ctx {
        rng: ChaCha8Rng::seed_from_u64(0x5eed),
        corpus: Vec::new(),
    };
    let criteria: [(&str, u64, fn(&mut Ctx) -> Outcome); 9] = [
        ("gadget round trip", 10, gadget_round_trip),
        ("codec round trip", 300, codec_round_trip),
        ("copy equivariance", 120, equivariance),
        ("kernel laws", 120, kernel_laws),
        ("curve laws", 180, curve_laws),
        ("predicate agreement", 180, predicate_agreement),
        ("transfer audit", 180, transfer_audit),
        ("classifier echo", 60, classifier_echo),
        ("determinism", u64::MAX, determinism),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let res = run(&mut cx);
        let took = start.elapsed();
        let res = res.and_then(|d| {
            ensure(took <= Duration::from_secs(limit), || format!("took {took:.1?}, limit {limit} s"))?;
            Ok(d)
        });
        match res {
            Ok(d) => println!("PASS {} {name}: {d} ({:.1} s)", k + 1, took.as_secs_f64()),
            Err(e) => {
                failed += 1;
                println!("FAIL {} {name}: {e} ({:.1} s)", k + 1, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
