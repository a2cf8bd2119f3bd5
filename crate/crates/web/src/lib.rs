//! Browser bindings for the demo page in `www/`.
//!
//! Each exported function takes plain strings and returns a JSON string, so
//! the page needs no generated TypeScript types. The `*_view` functions are
//! the same entry points without `JsValue`, for native tests.

use num_bigint::BigInt;
use num_integer::Integer;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use graphfield::curve::{Curve, CurvePoint};
use graphfield::decoder::{decode_g, detect_edges, find_a, Mode};
use graphfield::encoder::{encode_d0, stage_bound};
use graphfield::exact::parse::parse_element;
use graphfield::gadgets::{decode_f, encode_h, GadgetLayout};
use graphfield::graph::Graph;
use graphfield::presentation::ClosureConfig;

/// Largest graph the codec view accepts.
pub const MAX_CODEC_NODES: u32 = 4;
/// Largest graph the gadget view accepts.
pub const MAX_GADGET_NODES: u32 = 6;

fn graph(text: &str, max: u32) -> Result<Graph, String> {
    let g = Graph::from_json(text)?;
    if g.node_count() > max {
        return Err(format!("at most {max} nodes here"));
    }
    Ok(g)
}

fn pairs(v: impl IntoIterator<Item = (u32, u32)>) -> Value {
    Value::from(v.into_iter().map(|(x, y)| json!([x, y])).collect::<Vec<_>>())
}

/// The coded graph with a role for every node.
pub fn gadget_view(graph_json: &str) -> Result<String, String> {
    let g = graph(graph_json, MAX_GADGET_NODES)?;
    let lay = GadgetLayout::new(&g);
    let mut nodes = Vec::new();
    for x in 0..g.node_count() {
        nodes.push(json!({"id": lay.c(x), "kind": "c", "owner": [x]}));
        for k in 1..=3 {
            nodes.push(json!({"id": lay.t(x, k), "kind": "t", "owner": [x]}));
        }
    }
    for (x, y) in lay.pairs() {
        let edge = g.has_edge(x, y);
        nodes.push(json!({"id": lay.d(x, y), "kind": "d", "owner": [x, y], "edge": edge}));
        for i in 1..=lay.cycle_len(x, y) {
            nodes.push(json!({"id": lay.w(x, y, i), "kind": "w", "owner": [x, y], "edge": edge}));
        }
    }
    let stream = encode_h(&g);
    let decoded = decode_f(&stream).map_err(|e| e.to_string())?;
    Ok(json!({
        "nodes": nodes,
        "edges": pairs(stream),
        "decoded": decoded.graph().to_json(),
        "equal": decoded.graph() == g,
    })
    .to_string())
}

/// Encodes `graph_json` to `stages` facts (the stage bound if negative) and
/// decodes the result.
pub fn codec_view(graph_json: &str, stages: i64) -> Result<String, String> {
    let g = graph(graph_json, MAX_CODEC_NODES)?;
    let cfg = ClosureConfig::default();
    let bound = stage_bound(&g, &cfg);
    let n = usize::try_from(stages).unwrap_or(bound);
    let s = encode_d0(&g, n, &cfg);
    let d = decode_g(&s, Mode::C).map_err(|e| e.to_string())?;
    let coded = encode_h(&g).len();
    let lines: Vec<String> = s.facts().iter().map(|f| f.to_string()).collect();
    let tail_from = lines.len().saturating_sub(8);
    Ok(json!({
        "bound": bound,
        "stages": s.len(),
        "elements": s.introduced().len(),
        "a_found": find_a(&s).len(),
        "coded_nodes": GadgetLayout::new(&g).node_count(),
        "edges_found": detect_edges(&s, Mode::C).map_err(|e| e.to_string())?.len(),
        "coded_edges": coded,
        "decoded": d.graph().to_json(),
        "decided_nodes": d.c_nodes.len(),
        "pending": pairs(d.pending.iter().copied()),
        "equal": d.is_complete() && d.graph() == g,
        "head": &lines[..lines.len().min(8)],
        "tail": &lines[tail_from..],
    })
    .to_string())
}

/// Points `(x, y)` with `x = n/d`, `d <= 6`, `|x| <= bound` on the curve of
/// a rational `lambda`, with `y >= 0`.
pub fn rational_points_view(lambda: &str, bound: i64) -> Result<String, String> {
    let l = parse_element(lambda).map_err(|e| e.to_string())?;
    let (ln, ld) = l.as_rational().ok_or("lambda must be a rational number here")?;
    Curve::new(l).map_err(|e| e.to_string())?;
    let bound = bound.clamp(1, 50);
    let mut out = Vec::new();
    for d in 1..=6i64 {
        for n in -bound * d..=bound * d {
            if n.gcd(&d) != 1 {
                continue;
            }
            let (n, d) = (BigInt::from(n), BigInt::from(d));
            // x(x-1)(x-l) = n (n-d) (n ld - ln d) / (d^3 ld)
            let mut num = &n * (&n - &d) * (&n * &ld - &ln * &d);
            let mut den = &d * &d * &d * &ld;
            if den < BigInt::from(0) {
                num = -num;
                den = -den;
            }
            let g = num.gcd(&den);
            if g > BigInt::from(1) {
                num /= &g;
                den /= &g;
            }
            if num < BigInt::from(0) {
                continue;
            }
            let (rn, rd) = (num.sqrt(), den.sqrt());
            if &rn * &rn == num && &rd * &rd == den {
                let frac = |a: &BigInt, b: &BigInt| {
                    if *b == BigInt::from(1) {
                        a.to_string()
                    } else {
                        format!("{a}/{b}")
                    }
                };
                out.push(json!({"x": frac(&n, &d), "y": frac(&rn, &rd)}));
            }
        }
    }
    Ok(Value::from(out).to_string())
}

/// Curve data for `lambda`, optionally with a point and its multiples.
pub fn curve_view(lambda: &str, x: &str, y: &str, multiples: u32) -> Result<String, String> {
    let l = parse_element(lambda).map_err(|e| format!("lambda: {e}"))?;
    let rational = l.as_rational().is_some();
    let c = Curve::new(l).map_err(|e| e.to_string())?;
    let torsion: Vec<String> = c.two_torsion().iter().map(|p| p.to_string()).collect();
    let mut out = json!({"lambda": c.lambda().to_string(), "two_torsion": torsion});
    if x.trim().is_empty() && y.trim().is_empty() {
        return Ok(out.to_string());
    }
    let px = parse_element(x).map_err(|e| format!("x: {e}"))?;
    let py = parse_element(y).map_err(|e| format!("y: {e}"))?;
    let p = CurvePoint::affine(px, py);
    let on = c.on_curve(&p);
    out["on_curve"] = json!(on);
    if !on {
        return Ok(out.to_string());
    }
    // symbolic multiples grow fast
    let cap = if rational && p.x().is_some_and(|x| x.as_rational().is_some()) { 12 } else { 4 };
    let mut ks = Vec::new();
    let mut q = CurvePoint::Infinity;
    for k in 1..=multiples.min(cap) {
        q = c.add_unchecked(&q, &p);
        ks.push(json!({"k": k, "point": q.to_string()}));
    }
    out["multiples"] = json!(ks);
    let limit = if rational { 12 } else { 7 };
    out["order_limit"] = json!(limit);
    out["order"] = match c.is_torsion_upto(&p, limit) {
        Some(k) => json!(k),
        None => Value::Null,
    };
    Ok(out.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn gadget(graph_json: &str) -> Result<String, JsValue> {
    js(gadget_view(graph_json))
}

#[wasm_bindgen]
pub fn codec(graph_json: &str, stages: i32) -> Result<String, JsValue> {
    js(codec_view(graph_json, stages.into()))
}

#[wasm_bindgen]
pub fn curve(lambda: &str, x: &str, y: &str, multiples: u32) -> Result<String, JsValue> {
    js(curve_view(lambda, x, y, multiples))
}

#[wasm_bindgen]
pub fn rational_points(lambda: &str, bound: i32) -> Result<String, JsValue> {
    js(rational_points_view(lambda, bound.into()))
}
