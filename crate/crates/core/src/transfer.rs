//! Isomorphism transfer at field level, the coefficient embedding between
//! coding fields, the order-0 pair classifier, and the natural map from a
//! stream to the re-encoding of its decoded graph.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::decoder::{decode_g, detect_edges, replay, Mode, Replay};
use crate::encoder::encode_d0_closure;
use crate::exact::{factor_bounded, DifferentialPolynomial, ExactError, FieldElement, Symbol, DEFAULT_DEGREE_BOUND};
use crate::gadgets::{natural_iso, transfer_h};
use crate::graph::Graph;
use crate::presentation::{ClosureConfig, Fact, FactStream, IndexMap, Op};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransferError {
    #[error("{0}")]
    NotIsomorphism(String),
    #[error("stream is not auditable: {0}")]
    NotAuditable(String),
    #[error("{0}")]
    Incomplete(String),
    #[error("{0}")]
    NotEmbedding(String),
    #[error("malformed pair: {0}")]
    MalformedPair(String),
    #[error("fact not preserved: {0}")]
    FactNotPreserved(String),
}

fn stream_nodes_map(s: &FactStream) -> Result<(Graph, BTreeMap<u32, u32>), TransferError> {
    let edges: Vec<(u32, u32)> = detect_edges(s, Mode::C)
        .map_err(|e| TransferError::NotAuditable(e.to_string()))?
        .into_iter()
        .collect();
    let d = crate::gadgets::decode_f(&edges).map_err(|e| TransferError::NotAuditable(e.to_string()))?;
    if !d.is_complete() {
        return Err(TransferError::Incomplete(format!(
            "stream does not decode completely ({} pending pairs)",
            d.pending.len()
        )));
    }
    let iso = natural_iso(&edges).map_err(|e| TransferError::NotAuditable(e.to_string()))?;
    Ok((d.graph(), iso))
}

/// Nodes (A-ranks) a value depends on.
fn nodes_of(x: &FieldElement) -> Vec<u32> {
    let mut out = Vec::new();
    for s in x.symbols() {
        match s {
            Symbol::A(n) => out.push(n),
            Symbol::U { edge, .. } => out.extend([edge.lo(), edge.hi()]),
            Symbol::Aux(_) => {}
        }
    }
    for e in x.v_edges() {
        out.extend([e.lo(), e.hi()]);
    }
    out
}

/// Renames the value of every index of `left` by `rho` and looks it up in
/// `right`; indices whose value or image is unavailable stay unmapped.
fn map_by_renaming(
    left: &FactStream,
    lrep: &Replay,
    rho: &BTreeMap<u32, u32>,
    lookup: impl Fn(&FieldElement) -> Option<u32>,
) -> IndexMap {
    let mut out = IndexMap::new(left.len());
    for i in left.introduced() {
        let Some(x) = lrep.value(i) else { continue };
        if nodes_of(x).iter().any(|n| !rho.contains_key(n)) {
            continue;
        }
        let y = x.relabel_nodes(&|n| rho[&n]);
        if let Some(j) = lookup(&y) {
            out.insert(i, j).expect("renaming is injective on values");
        }
    }
    out
}

/// Index map from `s` to `t` induced by a graph isomorphism `g` between the
/// graphs they decode to. Defined on every index whose renamed value has an
/// index in `t`.
pub fn transfer_d0(g: &[u32], s: &FactStream, t: &FactStream) -> Result<IndexMap, TransferError> {
    let (lg, liso) = stream_nodes_map(s)?;
    let (rg, riso) = stream_nodes_map(t)?;
    let h = transfer_h(g, &lg, &rg).map_err(|e| TransferError::NotIsomorphism(e.to_string()))?;
    let rinv: BTreeMap<u32, u32> = riso.iter().map(|(&k, &v)| (v, k)).collect();
    let rho: BTreeMap<u32, u32> = liso
        .iter()
        .filter_map(|(&k, &layout)| Some((k, rinv.get(h.get(layout as usize)?).copied()?)))
        .collect();
    let lrep = replay(s).map_err(|e| TransferError::NotAuditable(e.to_string()))?;
    let rrep = replay(t).map_err(|e| TransferError::NotAuditable(e.to_string()))?;
    Ok(map_by_renaming(s, &lrep, &rho, |y| rrep.index_of(y)))
}

/// How the facts of `s` inside the domain of `f` fare in `t`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TransferAudit {
    /// Image fact occurs in `t` verbatim.
    pub literal: usize,
    /// Image fact is true in the structure `t` presents but not listed.
    pub semantic: usize,
    /// Fact mentions an index outside the domain.
    pub outside: usize,
}

/// Checks that every fact of `s` with all indices mapped by `f` holds in
/// `t`, either as a listed fact or by replaying `t`.
pub fn audit_transfer(f: &IndexMap, s: &FactStream, t: &FactStream) -> Result<TransferAudit, TransferError> {
    let listed: HashSet<Fact> = t.facts().iter().copied().collect();
    let rep = replay(t).map_err(|e| TransferError::NotAuditable(e.to_string()))?;
    let mut out = TransferAudit::default();
    for (pos, fact) in s.facts().iter().enumerate() {
        if fact.indices().iter().any(|&i| f.get(i).is_none()) {
            out.outside += 1;
            continue;
        }
        let image = fact.map_indices(|i| f.get(i).unwrap());
        let swapped = match image {
            Fact::Add(a, b, r) => Some(Fact::Add(b, a, r)),
            Fact::Mul(a, b, r) => Some(Fact::Mul(b, a, r)),
            _ => None,
        };
        if listed.contains(&image) || swapped.is_some_and(|x| listed.contains(&x)) {
            out.literal += 1;
            continue;
        }
        if holds(&rep, &image) == Some(true) {
            out.semantic += 1;
        } else {
            return Err(TransferError::FactNotPreserved(format!(
                "line {}: {fact} maps to {image}, which is false in the right stream",
                pos + 1
            )));
        }
    }
    Ok(out)
}

fn holds(rep: &Replay, fact: &Fact) -> Option<bool> {
    match *fact {
        Fact::Intro(i) => Some(rep.value(i).is_some()),
        Fact::Const(name, i) => {
            let want = match name {
                crate::presentation::ConstName::Zero => FieldElement::zero(),
                crate::presentation::ConstName::One => FieldElement::one(),
            };
            Some(*rep.value(i)? == want)
        }
        Fact::CFlag(i, v) => Some(rep.value(i)?.is_c() == v),
        _ => {
            let (op, a, b, r) = fact.as_op()?;
            let x = rep.value(a)?;
            let got = match op {
                Op::Add => x.add(rep.value(b?)?),
                Op::Mul => x.mul(rep.value(b?)?),
                Op::Neg => x.neg(),
                Op::Delta => x.delta(),
                Op::Inv => x.inv().ok()?,
            };
            Some(got == *rep.value(r)?)
        }
    }
}

/// The coefficient embedding `K_H -> K_F` for coded graphs `H ⊆ F` on the
/// same node numbering. Generators keep their names, so the map is the
/// identity on symbols once the inclusion and the support of `p` are
/// checked.
pub fn embed_edges(h: &Graph, f: &Graph, p: &DifferentialPolynomial) -> Result<DifferentialPolynomial, TransferError> {
    if h.node_count() > f.node_count() {
        return Err(TransferError::NotEmbedding(format!(
            "{} nodes do not fit in {}",
            h.node_count(),
            f.node_count()
        )));
    }
    if let Some((x, y)) = h.edges().find(|&(x, y)| !f.has_edge(x, y)) {
        return Err(TransferError::NotEmbedding(format!("edge ({x},{y}) is missing from the target")));
    }
    for c in p.coefficients() {
        for s in c.symbols() {
            match s {
                Symbol::A(n) if n >= h.node_count() => {
                    return Err(TransferError::NotEmbedding(format!("a{n} is not a generator of the source")));
                }
                Symbol::U { edge, .. } if !h.has_edge(edge.lo(), edge.hi()) => {
                    return Err(TransferError::NotEmbedding(format!("edge {edge} is not in the source")));
                }
                Symbol::Aux(_) => return Err(TransferError::NotEmbedding("auxiliary symbol".into())),
                _ => {}
            }
        }
        if let Some(e) = c.v_edges().into_iter().find(|e| !h.has_edge(e.lo(), e.hi())) {
            return Err(TransferError::NotEmbedding(format!("edge {e} is not in the source")));
        }
    }
    Ok(p.map_coeffs(|c| c.clone()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    AlgebraicOverQA,
    NotAlgebraic,
    OutOfScope,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::AlgebraicOverQA => "AlgebraicOverQA",
            Verdict::NotAlgebraic => "NotAlgebraic",
            Verdict::OutOfScope => "OutOfScope",
        })
    }
}

/// Classifies a pair `(p, q)` with `p` of order 0.
///
/// `p` must be monic, `q` nonzero of smaller order. Positive order, or
/// degree above the factoring bound, is out of scope. Otherwise the pair is
/// algebraic over `Q(A)` when every coefficient of `p` lies in `Q(A)` and
/// `p` is irreducible there; a reducible `p` does not form a pair at all.
pub fn classify_order0(p: &DifferentialPolynomial, q: &DifferentialPolynomial) -> Result<Verdict, TransferError> {
    let bad = |m: &str| Err(TransferError::MalformedPair(m.into()));
    if q.is_zero() {
        return bad("q is zero");
    }
    if q.order() >= p.order() {
        return bad(&format!("order of q ({}) is not below order of p ({})", q.order(), p.order()));
    }
    if !p.is_monic() {
        return bad("p is not monic");
    }
    if p.order() > 0 || p.degree_in(0) > DEFAULT_DEGREE_BOUND {
        return Ok(Verdict::OutOfScope);
    }
    if p.coefficients().any(|c| !c.is_c()) {
        return Ok(Verdict::NotAlgebraic);
    }
    let uni = p.to_unipoly().expect("coefficients lie in Q(A)");
    match factor_bounded(&uni, DEFAULT_DEGREE_BOUND) {
        Ok(fz) if fz.is_irreducible() => Ok(Verdict::AlgebraicOverQA),
        Ok(_) => bad("p is reducible"),
        Err(ExactError::DegreeBound { .. }) => Ok(Verdict::OutOfScope),
        Err(e) => bad(&e.to_string()),
    }
}

/// Index map from `s` into the re-encoding of its decoded graph, with the
/// same number of stages. Each A-element goes to the generator of the same
/// coded node, curve points to the matching points, and composite elements
/// by renaming and lookup.
pub fn natural_iso_prefix(s: &FactStream) -> Result<IndexMap, TransferError> {
    let rep = replay(s).map_err(|e| TransferError::NotAuditable(e.to_string()))?;
    let d = decode_g(s, Mode::C).map_err(|e| TransferError::NotAuditable(e.to_string()))?;
    let edges: Vec<(u32, u32)> = detect_edges(s, Mode::C)
        .map_err(|e| TransferError::NotAuditable(e.to_string()))?
        .into_iter()
        .collect();
    let rho = natural_iso(&edges).map_err(|e| TransferError::NotAuditable(e.to_string()))?;
    let re = encode_d0_closure(&d.graph(), s.len(), &ClosureConfig::default());
    let lookup = re.lookup();
    Ok(map_by_renaming(s, &rep, &rho, |y| lookup.get(y).copied()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{encode_d0, stage_bound};
    use crate::exact::parse::parse_diffpoly;

    fn full(g: &Graph) -> FactStream {
        let cfg = ClosureConfig::default();
        encode_d0(g, stage_bound(g, &cfg), &cfg)
    }

    #[test]
    fn identity_transfer() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = full(&g);
        let f = transfer_d0(&[0, 1], &s, &s).unwrap();
        assert_eq!(f.defined_count(), s.introduced().len());
        assert!(f.pairs().all(|(i, j)| i == j));
        assert!(transfer_d0(&[0, 0], &s, &s).is_err());
    }

    #[test]
    fn swap_transfer_preserves_facts() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let gg = Graph::from_edges(3, [(1, 2)]).unwrap();
        let perm = [2, 1, 0];
        let (s, t) = (full(&g), full(&gg));
        let f = transfer_d0(&perm, &s, &t).unwrap();
        let lrep = replay(&s).unwrap();
        let rrep = replay(&t).unwrap();
        // A-part follows the gadget map
        let h = transfer_h(&perm, &g, &gg).unwrap();
        for (k, &a) in lrep.a.iter().enumerate() {
            assert_eq!(f.get(a), Some(rrep.a[h[k] as usize]));
        }
        let au = audit_transfer(&f, &s, &t).unwrap();
        assert!(au.literal > 0);
    }

    #[test]
    fn natural_iso_fixes_own_generators() {
        assert!(natural_iso_prefix(&FactStream::default()).unwrap().is_empty());
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let s = full(&g);
        let f = natural_iso_prefix(&s).unwrap();
        assert_eq!(f.defined_count(), s.introduced().len());
        assert!(f.pairs().all(|(i, j)| i == j));
    }

    #[test]
    fn classifier_examples() {
        let one = parse_diffpoly("1").unwrap();
        let c = |p: &str| classify_order0(&parse_diffpoly(p).unwrap(), &one);
        assert_eq!(c("Y - a0").unwrap(), Verdict::AlgebraicOverQA);
        assert_eq!(c("Y - u[0,1]").unwrap(), Verdict::NotAlgebraic);
        assert_eq!(c("Y' - Y^3 + Y^2").unwrap(), Verdict::OutOfScope);
        assert_eq!(c("Y^2 - a0").unwrap(), Verdict::AlgebraicOverQA);
        assert_eq!(c("Y^9 - a0").unwrap(), Verdict::OutOfScope);
        assert!(c("2Y - a0").is_err());
        assert!(c("Y^2 - a0^2").is_err());
        let y = parse_diffpoly("Y").unwrap();
        assert!(classify_order0(&y, &y).is_err());
    }

    #[test]
    fn embedding_checks_support() {
        let h = Graph::from_edges(3, [(0, 1)]).unwrap();
        let f = Graph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        let p = parse_diffpoly("v[0,1] Y' - u[0,1]").unwrap();
        assert_eq!(embed_edges(&h, &f, &p).unwrap(), p);
        let q = parse_diffpoly("Y - u[0,2]").unwrap();
        assert!(embed_edges(&h, &f, &q).is_err());
        assert!(embed_edges(&f, &h, &p).is_err());
    }
}
