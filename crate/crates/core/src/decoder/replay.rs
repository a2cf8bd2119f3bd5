//! Semantic replay of a stream in the exact kernel.
//!
//! An index is *defined* when the fact right after its `intro` is a `const`
//! or an operation with that index as result; every other index is a
//! generator. Generators found by the A-search replay as `a_k` (`k` the
//! A-rank); generators forming a witnessed curve point over `a_m + a_n`
//! replay as `u_e`, `v_e` for `e = (m, n)`. Any other generator stays
//! opaque, and facts touching it are counted as unverified.
//!
//! Facts are then checked in stream order; the first disagreement (wrong
//! result, wrong C flag, two indices with one value, inverse of zero) is
//! reported with its line.

use std::collections::HashMap;

use super::{ranks, Scan};
use crate::exact::{EdgeId, FieldElement};
use crate::presentation::{ConstName, Fact, FactStream, Op};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct AuditError {
    pub line: usize,
    pub message: String,
}

#[derive(Clone, Debug, Default)]
pub struct Replay {
    values: HashMap<u32, FieldElement>,
    by_value: HashMap<FieldElement, u32>,
    /// A-elements by rank.
    pub a: Vec<u32>,
    /// `(u, v, edge)` for every generator pair replayed as a curve point.
    pub points: Vec<(u32, u32, EdgeId)>,
    pub checked: usize,
    pub unverified: usize,
}

impl Replay {
    pub fn value(&self, i: u32) -> Option<&FieldElement> {
        self.values.get(&i)
    }

    pub fn index_of(&self, x: &FieldElement) -> Option<u32> {
        self.by_value.get(x).copied()
    }

    pub fn valued_count(&self) -> usize {
        self.values.len()
    }

    fn assign(&mut self, i: u32, x: FieldElement, line: usize) -> Result<(), AuditError> {
        if let Some(&j) = self.by_value.get(&x) {
            if j != i {
                return Err(AuditError {
                    line,
                    message: format!("indices {j} and {i} both denote {x}"),
                });
            }
        }
        self.by_value.insert(x.clone(), i);
        self.values.insert(i, x);
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub facts: usize,
    pub checked: usize,
    pub unverified: usize,
    pub a_elements: usize,
    pub curve_points: usize,
}

pub fn replay(s: &FactStream) -> Result<Replay, AuditError> {
    let facts = s.facts();
    let scan = Scan::new(s);
    let a = scan.find_a();
    let rank = ranks(&a);

    let mut defined = std::collections::HashSet::new();
    for (pos, f) in facts.iter().enumerate() {
        if let Fact::Intro(i) = *f {
            let next = facts.get(pos + 1);
            let def = match next {
                Some(Fact::Const(_, j)) => *j == i,
                Some(g) => g.as_op().is_some_and(|(_, _, _, r)| r == i),
                None => false,
            };
            if def {
                defined.insert(i);
            }
        }
    }

    let mut seeds: HashMap<u32, FieldElement> = HashMap::new();
    for (k, &i) in a.iter().enumerate() {
        if !defined.contains(&i) {
            seeds.insert(i, FieldElement::a(k as u32));
        }
    }
    let mut rep = Replay {
        a: a.clone(),
        ..Replay::default()
    };
    for p in scan.curve_points(&rank) {
        let generator = |i: u32| !defined.contains(&i) && !rank.contains_key(&i);
        if !generator(p.u) || !generator(p.v) || seeds.contains_key(&p.u) || seeds.contains_key(&p.v) {
            continue;
        }
        let e = EdgeId::new(p.pair.0, p.pair.1).expect("distinct ranks");
        seeds.insert(p.u, FieldElement::u(e));
        seeds.insert(p.v, FieldElement::v(e));
        rep.points.push((p.u, p.v, e));
    }

    for (pos, f) in facts.iter().enumerate() {
        let line = pos + 1;
        match *f {
            Fact::Intro(i) => {
                if let Some(x) = seeds.remove(&i) {
                    rep.assign(i, x, line)?;
                }
            }
            Fact::Const(name, i) => {
                let x = match name {
                    ConstName::Zero => FieldElement::zero(),
                    ConstName::One => FieldElement::one(),
                };
                check_or_assign(&mut rep, i, x, line, f)?;
            }
            Fact::CFlag(i, v) => {
                let Some(x) = rep.value(i) else {
                    rep.unverified += 1;
                    continue;
                };
                if x.is_c() != v {
                    return Err(AuditError {
                        line,
                        message: format!("{f}: C({x}) is {}", !v),
                    });
                }
                rep.checked += 1;
            }
            _ => {
                let (op, a, b, r) = f.as_op().unwrap();
                let (Some(x), y) = (rep.value(a), b.map(|b| rep.value(b))) else {
                    rep.unverified += 1;
                    continue;
                };
                let value = match (op, y) {
                    (Op::Add, Some(Some(y))) => x.add(y),
                    (Op::Mul, Some(Some(y))) => x.mul(y),
                    (Op::Neg, None) => x.neg(),
                    (Op::Delta, None) => x.delta(),
                    (Op::Inv, None) => x.inv().map_err(|_| AuditError {
                        line,
                        message: format!("{f}: inverse of zero"),
                    })?,
                    _ => {
                        rep.unverified += 1;
                        continue;
                    }
                };
                check_or_assign(&mut rep, r, value, line, f)?;
            }
        }
    }
    Ok(rep)
}

fn check_or_assign(
    rep: &mut Replay,
    i: u32,
    x: FieldElement,
    line: usize,
    f: &Fact,
) -> Result<(), AuditError> {
    rep.checked += 1;
    match rep.value(i) {
        Some(old) if *old != x => Err(AuditError {
            line,
            message: format!("{f}: expected {x}, index {i} holds {old}"),
        }),
        Some(_) => Ok(()),
        None => rep.assign(i, x, line),
    }
}

/// Replays `s` and summarizes; the error names the first bad line.
pub fn audit(s: &FactStream) -> Result<AuditReport, AuditError> {
    let rep = replay(s)?;
    Ok(AuditReport {
        facts: s.len(),
        checked: rep.checked,
        unverified: rep.unverified,
        a_elements: rep.a.len(),
        curve_points: rep.points.len(),
    })
}
