mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use graphfield::decoder::{decode_g, find_a, Mode};
use graphfield::encoder::{encode_d0, encode_d0_closure, schedule, stage_bound};
use graphfield::exact::FieldElement;
use graphfield::gadgets::{coded_graph, decode_f, encode_h, transfer_h, GadgetLayout};
use graphfield::graph::{compose, Graph};
use graphfield::presentation::{op_key, ClosureConfig, Fact, FactStream, IndexMap, Op, SeedEvent};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn graph(max: u32) -> impl Strategy<Value = Graph> {
    (0..=max, any::<u64>()).prop_map(|(n, seed)| Graph::random(n, &mut rng(seed)))
}

fn perm(n: u32, seed: u64) -> Vec<u32> {
    let mut p: Vec<u32> = (0..n).collect();
    p.shuffle(&mut rng(seed));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_laws(seed: u64) {
        let r = &mut rng(seed);
        let (x, y) = (common::random_element(r, 2), common::random_element(r, 2));
        prop_assert_eq!(x.add(&y), y.add(&x));
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.sub(&y).add(&y), x.clone());
        let z = common::random_nonzero(r, 2);
        prop_assert_eq!(x.div(&z).unwrap().mul(&z), x);
    }

    #[test]
    fn derivation_of_inverse(seed: u64) {
        let x = common::random_nonzero(&mut rng(seed), 2);
        let inv = x.inv().unwrap();
        let expected = x.delta().neg().mul(&inv).mul(&inv);
        prop_assert_eq!(inv.delta(), expected);
    }

    #[test]
    fn markers_are_exactly_the_node_centres(g in graph(6)) {
        let coded = coded_graph(&g);
        let lay = GadgetLayout::new(&g);
        let n = coded.node_count();
        let on_triangle: Vec<bool> = (0..n)
            .map(|x| (0..n).any(|y| (y + 1..n).any(|z| coded.has_edge(x, y) && coded.has_edge(x, z) && coded.has_edge(y, z))))
            .collect();
        let markers: BTreeSet<u32> = (0..n)
            .filter(|&x| !on_triangle[x as usize] && (0..n).any(|y| on_triangle[y as usize] && coded.has_edge(x, y)))
            .collect();
        let centres: BTreeSet<u32> = (0..g.node_count()).map(|x| lay.c(x)).collect();
        prop_assert_eq!(markers, centres);
    }

    #[test]
    fn gadget_transfer_is_functorial(g in graph(5), s1: u64, s2: u64) {
        let n = g.node_count();
        let (p1, p2) = (perm(n, s1), perm(n, s2));
        let g1 = g.permuted(&p1).unwrap();
        let g2 = g1.permuted(&p2).unwrap();
        let h1 = transfer_h(&p1, &g, &g1).unwrap();
        let h2 = transfer_h(&p2, &g1, &g2).unwrap();
        let h12 = transfer_h(&compose(&p2, &p1), &g, &g2).unwrap();
        prop_assert_eq!(h12, compose(&h2, &h1));
        let id: Vec<u32> = (0..n).collect();
        let coded: Vec<u32> = (0..GadgetLayout::new(&g).node_count()).collect();
        prop_assert_eq!(transfer_h(&id, &g, &g).unwrap(), coded);
    }

    #[test]
    fn gadget_prefixes_only_refine(g in graph(5), cut: usize) {
        let stream = encode_h(&g);
        let k = cut % (stream.len() + 1);
        let early = decode_f(&stream[..k]).unwrap();
        let late = decode_f(&stream).unwrap();
        prop_assert!(early.is_refined_by(&late));
    }

    #[test]
    fn json_round_trips(g in graph(6), seed: u64) {
        prop_assert_eq!(Graph::from_json(&g.to_json()).unwrap(), g);
        let mut m = IndexMap::new(9);
        for (i, j) in perm(8, seed).into_iter().enumerate().step_by(2) {
            m.insert(i as u32, j).unwrap();
        }
        let back = IndexMap::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(back.to_json(), m.to_json());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn stream_text_round_trips(g in graph(3), cut: usize) {
        let cfg = ClosureConfig::default();
        let s = encode_d0(&g, cut % (stage_bound(&g, &cfg) + 1), &cfg);
        prop_assert_eq!(FactStream::read(&s.write()).unwrap(), s);
    }

    #[test]
    fn stream_prefixes_only_refine(g in graph(3), cut: usize) {
        let cfg = ClosureConfig::default();
        let s = encode_d0(&g, stage_bound(&g, &cfg), &cfg);
        let early = decode_g(&s.prefix(cut % (s.len() + 1)), Mode::C).unwrap();
        let late = decode_g(&s, Mode::C).unwrap();
        prop_assert!(early.is_refined_by(&late));
    }

    /// Only the seeded generators satisfy `y' = y^3 - y^2` with `y` not 0 or 1.
    #[test]
    fn no_new_a_elements(g in graph(3)) {
        let cfg = ClosureConfig::default();
        let c = encode_d0_closure(&g, stage_bound(&g, &cfg), &cfg);
        let seeded = schedule(&g).iter().filter(|e| matches!(e, SeedEvent::A(_))).count();
        let mut found = 0;
        for x in &c.values {
            if x.is_zero() || x.is_one() {
                continue;
            }
            let rhs = x.mul(x).mul(x).sub(&x.mul(x));
            if x.delta() == rhs {
                let k = (0..seeded as u32).find(|&k| *x == FieldElement::a(k));
                prop_assert!(k.is_some(), "{} is a new solution", x);
                found += 1;
            }
        }
        prop_assert_eq!(found, seeded);
        prop_assert_eq!(find_a(&c.stream).len(), seeded);
    }
}

#[test]
fn fairness_bound_holds() {
    let cfg = ClosureConfig::default();
    for g in [Graph::from_edges(2, [(0, 1)]).unwrap(), Graph::empty(3)] {
        let horizon = 4000;
        let s = encode_d0(&g, horizon, &cfg);
        let facts = s.facts();
        for stage in 0..=20usize {
            let bound = stage + 7 * (stage + 1) * (stage + 5);
            if bound > facts.len() {
                break;
            }
            let known: Vec<u32> = facts[..stage]
                .iter()
                .filter_map(|f| if let Fact::Intro(i) = f { Some(*i) } else { None })
                .collect();
            let table = s.prefix(bound).table();
            for &i in &known {
                for &j in &known {
                    for op in [Op::Add, Op::Mul] {
                        assert!(
                            table.contains_key(&op_key(op, i, Some(j))),
                            "{op:?}({i},{j}) missing by stage {bound}"
                        );
                    }
                }
            }
        }
    }
}
