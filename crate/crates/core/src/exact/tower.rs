use std::collections::BTreeMap;

use super::element::FieldElement;
use super::symbol::{EdgeId, Symbol};
use super::ExactError;

/// Generator registry for a finite stage of the field tower.
///
/// Elements are plain values; a `Tower` records which generators are live
/// so that operations mixing elements of different towers can be refused.
/// For each edge it keeps the highest derivative order of `u_e`
/// introduced so far; the chain `u_e, u_e', ...` is gap-free by
/// construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Tower {
    a_count: u32,
    edges: BTreeMap<EdgeId, u32>,
}

impl Tower {
    pub fn new(a_count: u32) -> Self {
        Tower {
            a_count,
            edges: BTreeMap::new(),
        }
    }

    pub fn a_count(&self) -> u32 {
        self.a_count
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn u_depth(&self, e: EdgeId) -> Option<u32> {
        self.edges.get(&e).copied()
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    /// Introduces `a_{a_count}` and returns it.
    pub fn push_a(&mut self) -> FieldElement {
        self.a_count += 1;
        FieldElement::a(self.a_count - 1)
    }

    /// Registers `e` with its curve relation. Both endpoints must already
    /// have their `a`-generators.
    pub fn register_edge(&mut self, e: EdgeId) -> Result<(), ExactError> {
        if e.hi() >= self.a_count {
            return Err(ExactError::ContextMismatch(format!(
                "edge ({e}) needs a{} but only {} a-generators exist",
                e.hi(),
                self.a_count
            )));
        }
        self.edges.entry(e).or_insert(0);
        Ok(())
    }

    /// Smallest tower containing every generator used by `xs`.
    pub fn spanning<'a>(xs: impl IntoIterator<Item = &'a FieldElement>) -> Tower {
        let mut t = Tower::new(0);
        for x in xs {
            t.admit(x);
        }
        t
    }

    /// Grows the tower so that it contains `x`.
    pub fn admit(&mut self, x: &FieldElement) {
        if let Some(n) = x.max_node() {
            self.a_count = self.a_count.max(n + 1);
        }
        for e in x.v_edges() {
            self.edges.entry(e).or_insert(0);
        }
        for s in x.symbols() {
            if let Symbol::U { edge, order } = s {
                let d = self.edges.entry(edge).or_insert(0);
                *d = (*d).max(order);
            }
        }
    }

    pub fn contains(&self, x: &FieldElement) -> bool {
        self.check(x).is_ok()
    }

    /// Ok iff every generator of `x` is registered here.
    pub fn check(&self, x: &FieldElement) -> Result<(), ExactError> {
        for s in x.symbols() {
            match s {
                Symbol::A(n) if n >= self.a_count => {
                    return Err(ExactError::ContextMismatch(format!("{s} is not in the tower")))
                }
                Symbol::U { edge, order } if self.u_depth(edge).is_none_or(|d| order > d) => {
                    return Err(ExactError::ContextMismatch(format!("{s} is not in the tower")))
                }
                Symbol::Aux(_) => {
                    return Err(ExactError::ContextMismatch(format!(
                        "scratch symbol {s} in a field element"
                    )))
                }
                _ => {}
            }
        }
        for e in x.v_edges() {
            if !self.has_edge(e) {
                return Err(ExactError::ContextMismatch(format!(
                    "v[{e}] is not in the tower"
                )));
            }
        }
        Ok(())
    }

    /// True iff every generator of `self` is a generator of `other`.
    pub fn is_subtower_of(&self, other: &Tower) -> bool {
        self.a_count <= other.a_count
            && self
                .edges
                .iter()
                .all(|(e, d)| other.u_depth(*e).is_some_and(|od| od >= *d))
    }

    fn check2(&self, x: &FieldElement, y: &FieldElement) -> Result<(), ExactError> {
        self.check(x)?;
        self.check(y)
    }

    pub fn add(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, ExactError> {
        self.check2(x, y)?;
        Ok(x.add(y))
    }

    pub fn mul(&self, x: &FieldElement, y: &FieldElement) -> Result<FieldElement, ExactError> {
        self.check2(x, y)?;
        Ok(x.mul(y))
    }

    pub fn neg(&self, x: &FieldElement) -> Result<FieldElement, ExactError> {
        self.check(x)?;
        Ok(x.neg())
    }

    pub fn inv(&self, x: &FieldElement) -> Result<FieldElement, ExactError> {
        self.check(x)?;
        x.inv()
    }

    /// The derivation; may introduce the next `u`-derivative, so it returns
    /// the grown tower alongside the result.
    pub fn delta(&self, x: &FieldElement) -> Result<(FieldElement, Tower), ExactError> {
        self.check(x)?;
        let d = x.delta();
        let mut t = self.clone();
        t.admit(&d);
        Ok((d, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mismatched_elements_are_refused() {
        let mut t = Tower::new(2);
        let e = EdgeId::new(0, 1).unwrap();
        t.register_edge(e).unwrap();
        assert!(t.mul(&FieldElement::v(e), &FieldElement::a(1)).is_ok());
        assert!(t.add(&FieldElement::a(2), &FieldElement::a(0)).is_err());
        let f = EdgeId::new(0, 2).unwrap();
        assert!(t.neg(&FieldElement::u(f)).is_err());
        assert!(t.register_edge(f).is_err());
    }

    #[test]
    fn delta_grows_the_u_chain() {
        let mut t = Tower::new(2);
        let e = EdgeId::new(0, 1).unwrap();
        t.register_edge(e).unwrap();
        let (d, t2) = t.delta(&FieldElement::u(e)).unwrap();
        assert_eq!(d, FieldElement::u_derivative(e, 1));
        assert_eq!(t2.u_depth(e), Some(1));
        assert!(t.is_subtower_of(&t2));
        assert!(!t2.is_subtower_of(&t));
    }
}
