//! Stream to graph: find the Rosenlicht generators, detect the coded edges
//! from witnessed curve points, and undo the gadget coding.
//!
//! All searches read operation-table witnesses only; nothing is inferred
//! symbolically except in B-mode, which replays the stream in the exact
//! kernel.

mod replay;

use std::collections::{BTreeSet, HashMap};

use crate::exact::is_b;
use crate::gadgets::{decode_f, transfer_f, Decoded, GadgetError};
use crate::presentation::{op_key, ConstName, Fact, FactStream, IndexMap, Op, OpKey};

pub use replay::{audit, replay, AuditError, AuditReport, Replay};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Edge points must carry `C = false` on their first coordinate.
    C,
    /// Edge points must have `trdeg Q(u, s) = 2`, checked by replay.
    B,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "C" | "c" => Ok(Mode::C),
            "B" | "b" => Ok(Mode::B),
            _ => Err(format!("unknown mode `{s}` (expected C or B)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error(transparent)]
    Audit(#[from] AuditError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
    #[error("{0}")]
    Transfer(String),
}

/// Table lookups over a stream.
pub(crate) struct Scan<'a> {
    pub stream: &'a FactStream,
    pub table: HashMap<OpKey, u32>,
    by_result: HashMap<(Op, u32), Vec<(u32, Option<u32>)>>,
    pub flags: HashMap<u32, bool>,
    pub zero: Option<u32>,
    pub one: Option<u32>,
}

impl<'a> Scan<'a> {
    pub fn new(stream: &'a FactStream) -> Self {
        let mut by_result: HashMap<(Op, u32), Vec<(u32, Option<u32>)>> = HashMap::new();
        for f in stream.facts() {
            if let Some((op, a, b, r)) = f.as_op() {
                by_result.entry((op, r)).or_default().push((a, b));
            }
        }
        Scan {
            stream,
            table: stream.table(),
            by_result,
            flags: stream.cflags(),
            zero: stream.constant(ConstName::Zero),
            one: stream.constant(ConstName::One),
        }
    }

    pub fn get(&self, op: Op, a: u32, b: Option<u32>) -> Option<u32> {
        self.table.get(&op_key(op, a, b)).copied()
    }

    fn producers(&self, op: Op, r: u32) -> &[(u32, Option<u32>)] {
        self.by_result.get(&(op, r)).map_or(&[], Vec::as_slice)
    }

    /// Indices witnessed to satisfy `y' = y^3 - y^2`, `y != 0, 1`.
    pub fn find_a(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .stream
            .facts()
            .iter()
            .filter_map(|f| match *f {
                Fact::Delta(i, r) if Some(i) != self.zero && Some(i) != self.one => {
                    let k = self.get(Op::Mul, i, Some(i))?;
                    let l = self.get(Op::Mul, k, Some(i))?;
                    let nk = self.get(Op::Neg, k, None)?;
                    (self.get(Op::Add, l, Some(nk))? == r).then_some(i)
                }
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `u + -x` witnessed as `Add(u, Neg(x))`: all `x` for a given result.
    fn subtrahends(&self, u: u32, diff: u32) -> Vec<u32> {
        self.producers(Op::Add, diff)
            .iter()
            .filter_map(|&(x, y)| {
                let y = y?;
                match (x == u, y == u) {
                    (true, _) => Some(y),
                    (_, true) => Some(x),
                    _ => None,
                }
            })
            .flat_map(|neg| self.producers(Op::Neg, neg).iter().map(|&(x, _)| x))
            .collect()
    }

    /// Witnessed curve points `(u, v)` over `y^2 = x(x-1)(x-s)` with `s` the
    /// witnessed sum of two A-elements: `(u, v, s, (rank, rank))`.
    pub fn curve_points(&self, rank: &HashMap<u32, u32>) -> Vec<EdgePoint> {
        let mut sums: HashMap<u32, (u32, u32)> = HashMap::new();
        for f in self.stream.facts() {
            if let Fact::Add(x, y, s) = *f {
                if let (Some(&m), Some(&n)) = (rank.get(&x), rank.get(&y)) {
                    if m != n {
                        sums.insert(s, (m.min(n), m.max(n)));
                    }
                }
            }
        }
        let minus_one = self.one.and_then(|o| self.get(Op::Neg, o, None));
        let mut out = BTreeSet::new();
        for f in self.stream.facts() {
            let Fact::Mul(v, v2, w) = *f else { continue };
            if v != v2 {
                continue;
            }
            for &(x, y) in self.producers(Op::Mul, w) {
                let Some(y) = y else { continue };
                for (p, f3) in [(x, y), (y, x)] {
                    for &(f1, f2) in self.producers(Op::Mul, p) {
                        let Some(f2) = f2 else { continue };
                        let fs = [f1, f2, f3];
                        for ui in 0..3 {
                            let u = fs[ui];
                            let g = fs[(ui + 1) % 3];
                            let h = fs[(ui + 2) % 3];
                            let Some(t1) = minus_one.and_then(|m| self.get(Op::Add, u, Some(m))) else {
                                continue;
                            };
                            for (one_side, s_side) in [(g, h), (h, g)] {
                                if one_side != t1 {
                                    continue;
                                }
                                for s in self.subtrahends(u, s_side) {
                                    if let Some(&pair) = sums.get(&s) {
                                        out.insert(EdgePoint { u, v, s, pair });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct EdgePoint {
    pub u: u32,
    pub v: u32,
    pub s: u32,
    /// A-ranks of the two summands of `s`, sorted.
    pub pair: (u32, u32),
}

/// A-elements of the prefix, ordered by index.
pub fn find_a(s: &FactStream) -> Vec<u32> {
    Scan::new(s).find_a()
}

pub(crate) fn ranks(a: &[u32]) -> HashMap<u32, u32> {
    a.iter().enumerate().map(|(k, &i)| (i, k as u32)).collect()
}

/// Coded edges `(m, n)` between A-ranks.
pub fn detect_edges(s: &FactStream, mode: Mode) -> Result<BTreeSet<(u32, u32)>, DecodeError> {
    let scan = Scan::new(s);
    let rank = ranks(&scan.find_a());
    let points = scan.curve_points(&rank);
    match mode {
        Mode::C => Ok(points
            .iter()
            .filter(|p| scan.flags.get(&p.u) == Some(&false))
            .map(|p| p.pair)
            .collect()),
        Mode::B => {
            let rep = replay(s)?;
            Ok(points
                .iter()
                .filter(|p| match (rep.value(p.u), rep.value(p.s)) {
                    (Some(u), Some(x)) => !is_b(u, x),
                    _ => false,
                })
                .map(|p| p.pair)
                .collect())
        }
    }
}

/// The graph coded by a prefix, with undecided pairs listed as pending.
pub fn decode_g(s: &FactStream, mode: Mode) -> Result<Decoded, DecodeError> {
    let edges: Vec<(u32, u32)> = detect_edges(s, mode)?.into_iter().collect();
    Ok(decode_f(&edges)?)
}

/// Node bijection between the graphs decoded from `s` and `t` induced by an
/// index map `f` that covers the A-elements of `s`.
pub fn transfer_g(f: &IndexMap, s: &FactStream, t: &FactStream) -> Result<Vec<u32>, DecodeError> {
    check_partial_iso(f, s, t)?;
    let left_a = find_a(s);
    let right_rank = ranks(&find_a(t));
    if left_a.len() != right_rank.len() {
        return Err(DecodeError::Transfer(format!(
            "streams have {} and {} A-elements",
            left_a.len(),
            right_rank.len()
        )));
    }
    let mut h = Vec::with_capacity(left_a.len());
    for &a in &left_a {
        let Some(b) = f.get(a) else {
            return Err(DecodeError::Transfer(format!("A-element {a} is not mapped")));
        };
        let Some(&k) = right_rank.get(&b) else {
            return Err(DecodeError::Transfer(format!(
                "A-element {a} maps to {b}, which is not an A-element"
            )));
        };
        h.push(k);
    }
    let le: Vec<(u32, u32)> = detect_edges(s, Mode::C)?.into_iter().collect();
    let re: Vec<(u32, u32)> = detect_edges(t, Mode::C)?.into_iter().collect();
    Ok(transfer_f(&h, &le, &re)?)
}

/// Every fact of `s` inside the domain of `f` must agree with `t`'s
/// witnessed facts.
pub fn check_partial_iso(f: &IndexMap, s: &FactStream, t: &FactStream) -> Result<(), DecodeError> {
    let table = t.table();
    let flags = t.cflags();
    for (pos, fact) in s.facts().iter().enumerate() {
        let idx = fact.indices();
        if idx.iter().any(|&i| f.get(i).is_none()) {
            continue;
        }
        let image = fact.map_indices(|i| f.get(i).unwrap());
        let clash = match image {
            Fact::Intro(_) => None,
            Fact::Const(name, i) => t.constant(name).filter(|&j| j != i).map(|j| format!("constant is {j}")),
            Fact::CFlag(i, v) => flags
                .get(&i)
                .filter(|&&w| w != v)
                .map(|w| format!("C flag of {i} is {w}")),
            _ => {
                let (op, a, b, r) = image.as_op().unwrap();
                table
                    .get(&op_key(op, a, b))
                    .filter(|&&x| x != r)
                    .map(|x| format!("the right stream has result {x}"))
            }
        };
        if let Some(why) = clash {
            return Err(DecodeError::Transfer(format!(
                "line {}: {fact} maps to {image} but {why}",
                pos + 1
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{encode_d0, stage_bound};
    use crate::graph::Graph;
    use crate::presentation::{apply_permutation, ClosureConfig};

    fn full(g: &Graph) -> FactStream {
        let cfg = ClosureConfig::default();
        encode_d0(g, stage_bound(g, &cfg), &cfg)
    }

    #[test]
    fn empty_prefix() {
        let s = FactStream::default();
        assert!(find_a(&s).is_empty());
        let d = decode_g(&s, Mode::C).unwrap();
        assert!(d.c_nodes.is_empty());
    }

    #[test]
    fn path_round_trip_both_modes() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let s = full(&g);
        let a = find_a(&s);
        assert_eq!(a.len() as u32, crate::gadgets::GadgetLayout::new(&g).node_count());
        for mode in [Mode::C, Mode::B] {
            let d = decode_g(&s, mode).unwrap();
            assert!(d.is_complete());
            assert_eq!(d.graph(), g);
        }
        let h: BTreeSet<(u32, u32)> = crate::gadgets::encode_h(&g)
            .into_iter()
            .map(|(x, y)| (x.min(y), x.max(y)))
            .collect();
        assert_eq!(detect_edges(&s, Mode::C).unwrap(), h);
    }

    #[test]
    fn truncated_prefix_is_partial() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = full(&g);
        let d = decode_g(&s.prefix(s.len() / 3), Mode::C).unwrap();
        assert!(d.is_refined_by(&decode_g(&s, Mode::C).unwrap()));
    }

    #[test]
    fn permuted_copy_transfers_back() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = full(&g);
        let n = s.introduced().len() as u32;
        let pi: Vec<u32> = (0..n).rev().collect();
        let t = apply_permutation(&s, &pi).unwrap();
        let d = decode_g(&t, Mode::C).unwrap();
        assert!(d.graph().find_isomorphism(&g).is_some());

        let mut f = IndexMap::new(s.len());
        for (i, &j) in pi.iter().enumerate() {
            f.insert(i as u32, j).unwrap();
        }
        let node_map = transfer_g(&f, &s, &t).unwrap();
        g.check_isomorphism(&node_map, &d.graph()).unwrap();

        let mut id = IndexMap::new(s.len());
        for i in 0..n {
            id.insert(i, i).unwrap();
        }
        assert_eq!(transfer_g(&id, &s, &s).unwrap(), vec![0, 1]);
        // identity into the reversed copy breaks witnessed facts
        assert!(transfer_g(&id, &s, &t).is_err());
    }
}
