use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use super::poly::IntPoly;
use super::ratfunc::RatFunc;
use super::symbol::{EdgeId, Symbol};
use super::ExactError;

/// Square-free product of `v_e` generators, as a sorted edge set.
pub type VMonomial = SmallVec<[EdgeId; 2]>;

/// An element of the coding field: a finite sum `sum_M c_M * v^M` with
/// `c_M` reduced rational functions in the transcendental symbols and
/// `v^M` a square-free product of `v`-generators.
///
/// `v_e^2` is always rewritten to `u_e (u_e - 1) (u_e - a_m - a_n)` for
/// `e = (m, n)`, and zero coefficients are dropped, so two elements are
/// equal as field elements iff they are equal as values of this type.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FieldElement {
    terms: BTreeMap<VMonomial, RatFunc>,
}

/// `u_e (u_e - 1) (u_e - a_m - a_n)`, the right-hand side of the curve
/// relation for edge `e`.
pub fn relation_poly(e: EdgeId) -> IntPoly {
    let u = IntPoly::var(Symbol::u(e));
    let one = IntPoly::one();
    let lambda = IntPoly::var(Symbol::A(e.lo())).add(&IntPoly::var(Symbol::A(e.hi())));
    u.mul(&u.sub(&one)).mul(&u.sub(&lambda))
}

impl FieldElement {
    pub fn zero() -> Self {
        FieldElement::default()
    }

    pub fn one() -> Self {
        Self::from_ratfunc(RatFunc::one())
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_ratfunc(RatFunc::from_int(k))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_ratfunc(RatFunc::from_ratio(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_ratfunc(c: RatFunc) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(VMonomial::new(), c);
        }
        FieldElement { terms }
    }

    pub fn symbol(s: Symbol) -> Self {
        Self::from_ratfunc(RatFunc::var(s))
    }

    pub fn a(n: u32) -> Self {
        Self::symbol(Symbol::A(n))
    }

    pub fn u(e: EdgeId) -> Self {
        Self::symbol(Symbol::u(e))
    }

    pub fn u_derivative(e: EdgeId, order: u32) -> Self {
        Self::symbol(Symbol::U { edge: e, order })
    }

    pub fn v(e: EdgeId) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(smallvec::smallvec![e], RatFunc::one());
        FieldElement { terms }
    }

    /// `a_m + a_n`, the curve parameter attached to edge `e`.
    pub fn lambda(e: EdgeId) -> Self {
        Self::a(e.lo()).add(&Self::a(e.hi()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&VMonomial, &RatFunc)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_ratfunc().is_some_and(|c| c.is_one())
    }

    /// The coefficient when no `v`-generator occurs.
    pub fn as_ratfunc(&self) -> Option<&RatFunc> {
        match self.terms.len() {
            0 => None,
            1 => self.terms.get(&VMonomial::new()),
            _ => None,
        }
    }

    pub fn to_ratfunc(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return Some(RatFunc::zero());
        }
        self.as_ratfunc().cloned()
    }

    /// Rational value, when the element is a rational number.
    pub fn as_rational(&self) -> Option<(BigInt, BigInt)> {
        if self.is_zero() {
            return Some((BigInt::zero(), BigInt::one()));
        }
        self.as_ratfunc()?.as_rational()
    }

    /// True iff the element lies in `Q(A)`: no `u`-symbol and no `v`-generator.
    pub fn is_c(&self) -> bool {
        self.terms.iter().all(|(m, c)| {
            m.is_empty() && !c.contains_symbol(|s| matches!(s, Symbol::U { .. }))
        })
    }

    /// Edges whose `v`-generator occurs.
    pub fn v_edges(&self) -> Vec<EdgeId> {
        let mut out: Vec<EdgeId> = self.terms.keys().flat_map(|m| m.iter().copied()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Transcendental symbols occurring in coefficients.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self.terms.values().flat_map(|c| c.symbols()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Every edge referenced, through `u`-symbols or `v`-generators.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut out = self.v_edges();
        out.extend(self.symbols().into_iter().filter_map(|s| match s {
            Symbol::U { edge, .. } => Some(edge),
            _ => None,
        }));
        out.sort();
        out.dedup();
        out
    }

    /// Largest node index referenced (through `a`-symbols or edges).
    pub fn max_node(&self) -> Option<u32> {
        let a = self.symbols().into_iter().filter_map(|s| match s {
            Symbol::A(n) => Some(n),
            _ => None,
        });
        let e = self.edges().into_iter().map(|e| e.hi());
        a.chain(e).max()
    }

    pub fn neg(&self) -> FieldElement {
        FieldElement {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect(),
        }
    }

    pub fn add(&self, other: &FieldElement) -> FieldElement {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(&mut terms, m.clone(), c.clone());
        }
        FieldElement { terms }
    }

    pub fn sub(&self, other: &FieldElement) -> FieldElement {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &FieldElement) -> FieldElement {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let (m, common) = multiply_vmonomials(m1, m2);
                let mut c = c1.mul(c2);
                for e in common {
                    c = c.mul_poly(&relation_poly(e));
                }
                accumulate(&mut terms, m, c);
            }
        }
        FieldElement { terms }
    }

    pub fn scale(&self, c: &RatFunc) -> FieldElement {
        if c.is_zero() {
            return Self::zero();
        }
        FieldElement {
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (m.clone(), d.mul(c)))
                .collect(),
        }
    }

    /// Multiplicative inverse by successive conjugation over the `v`-generators.
    pub fn inv(&self) -> Result<FieldElement, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let Some(&e) = self.v_edges().first() else {
            let c = self.as_ratfunc().expect("pure element");
            return Ok(Self::from_ratfunc(c.inv().expect("nonzero")));
        };
        // x = A + B v_e  ->  1/x = (A - B v_e) / (A^2 - B^2 g_e)
        let mut conj = BTreeMap::new();
        for (m, c) in &self.terms {
            if m.contains(&e) {
                accumulate(&mut conj, m.clone(), c.neg());
            } else {
                accumulate(&mut conj, m.clone(), c.clone());
            }
        }
        let conj = FieldElement { terms: conj };
        let norm = self.mul(&conj);
        debug_assert!(!norm.v_edges().contains(&e));
        Ok(conj.mul(&norm.inv()?))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, ExactError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<FieldElement, ExactError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut result = Self::one();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(result)
    }

    /// Extends a derivation given on the transcendental symbols to the
    /// whole field. On `v_e` it is forced by the relation:
    /// `D(v_e) = D(g_e) / (2 v_e)`, which keeps every `v`-monomial fixed:
    /// `D(c v^M) = (D c + c * sum_{e in M} D(g_e) / (2 g_e)) v^M`.
    pub fn derive(&self, images: &impl Fn(Symbol) -> Option<RatFunc>) -> FieldElement {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut d = c.derive(images);
            for &e in m.iter() {
                let g = RatFunc::from_poly(relation_poly(e));
                let dg = g.derive(images);
                if dg.is_zero() {
                    continue;
                }
                let two_g = g.scale_int(2);
                d = d.add(&c.mul(&dg).div(&two_g).expect("g_e is nonzero"));
            }
            accumulate(&mut terms, m.clone(), d);
        }
        FieldElement { terms }
    }

    /// The field derivation: `a_n' = a_n^3 - a_n^2`, `u_e^(i)' = u_e^(i+1)`,
    /// rationals are constants.
    pub fn delta(&self) -> FieldElement {
        self.derive(&|s| match s {
            Symbol::A(n) => {
                let a = RatFunc::var(Symbol::A(n));
                Some(a.pow(3).sub(&a.pow(2)))
            }
            Symbol::U { edge, order } => Some(RatFunc::var(Symbol::U {
                edge,
                order: order + 1,
            })),
            Symbol::Aux(_) => None,
        })
    }

    /// Formal partial derivative with respect to a transcendental symbol.
    /// Unlike [`delta`](Self::delta) this ignores the Rosenlicht rule.
    pub fn partial(&self, s: Symbol) -> FieldElement {
        self.derive(&|t| (t == s).then(RatFunc::one))
    }

    /// Renames nodes: `a_n -> a_{f(n)}`, and edge generators of `(m, n)` to
    /// those of `(f(m), f(n))`. `f` must be injective on the nodes in use.
    pub fn relabel_nodes(&self, f: &impl Fn(u32) -> u32) -> FieldElement {
        let rename = |s: Symbol| match s {
            Symbol::A(n) => Symbol::A(f(n)),
            Symbol::U { edge, order } => Symbol::U {
                edge: edge.map(f).expect("injective relabeling"),
                order,
            },
            other => other,
        };
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut mm: VMonomial = m
                .iter()
                .map(|e| e.map(f).expect("injective relabeling"))
                .collect();
            mm.sort();
            accumulate(&mut terms, mm, c.rename(&rename));
        }
        FieldElement { terms }
    }

    /// Evaluates at rational values for the symbols and the `v`-generators.
    /// The caller is responsible for choosing `v` values consistent with the
    /// curve relations.
    pub fn eval(
        &self,
        symbols: &impl Fn(Symbol) -> Option<(BigInt, BigInt)>,
        vs: &impl Fn(EdgeId) -> Option<(BigInt, BigInt)>,
    ) -> Option<(BigInt, BigInt)> {
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for (m, c) in &self.terms {
            let (mut tn, mut td) = c.eval(symbols)?;
            for &e in m.iter() {
                let (vn, vd) = vs(e)?;
                tn *= vn;
                td *= vd;
            }
            num = num * &td + tn * &den;
            den *= td;
        }
        Some((num, den))
    }
}

fn accumulate(terms: &mut BTreeMap<VMonomial, RatFunc>, m: VMonomial, c: RatFunc) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(slot) => {
            slot.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut slot) => {
            let sum = slot.get().add(&c);
            if sum.is_zero() {
                slot.remove();
            } else {
                *slot.get_mut() = sum;
            }
        }
    }
}

/// Symmetric difference of two sorted edge sets, and the shared edges.
fn multiply_vmonomials(a: &VMonomial, b: &VMonomial) -> (VMonomial, Vec<EdgeId>) {
    let mut out = VMonomial::new();
    let mut common = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                common.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    (out, common)
}

/// Canonical rendering: terms in map order joined by ` + `, each printed as
/// `coeff` or `coeff*v[m,n]v[p,q]...`, where `coeff` is a polynomial or
/// `(num)/(den)`. Zero renders as `0`.
impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{c}")?;
            if !m.is_empty() {
                f.write_str("*")?;
                for e in m {
                    write!(f, "v[{e}]")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e01() -> EdgeId {
        EdgeId::new(0, 1).unwrap()
    }

    #[test]
    fn v_squared_reduces_to_the_cubic() {
        let e = e01();
        let v = FieldElement::v(e);
        let u = FieldElement::u(e);
        let lam = FieldElement::lambda(e);
        let rhs = u.mul(&u.sub(&FieldElement::one())).mul(&u.sub(&lam));
        assert_eq!(v.mul(&v), rhs);
        assert!(v.mul(&v).as_ratfunc().is_some());
    }

    #[test]
    fn additive_inverse_is_literal_zero() {
        let x = FieldElement::a(0).add(&FieldElement::v(e01()));
        assert!(x.add(&x.neg()).is_zero());
    }

    #[test]
    fn inverse_of_v() {
        let e = e01();
        let v = FieldElement::v(e);
        let inv = v.inv().unwrap();
        let g = FieldElement::from_ratfunc(RatFunc::from_poly(relation_poly(e)));
        assert_eq!(inv, v.div(&g).unwrap());
        assert!(inv.mul(&v).is_one());
        assert!(FieldElement::one().inv().unwrap().is_one());
        assert!(matches!(
            FieldElement::zero().inv(),
            Err(ExactError::DivisionByZero)
        ));
    }

    #[test]
    fn delta_of_rosenlicht_generator() {
        let a = FieldElement::a(0);
        let expected = a.pow(3).unwrap().sub(&a.pow(2).unwrap());
        assert_eq!(a.delta(), expected);
        assert!(FieldElement::from_ratio(7, 2).delta().is_zero());
    }

    #[test]
    fn delta_respects_curve_relation() {
        let e = EdgeId::new(1, 3).unwrap();
        let v = FieldElement::v(e);
        let u = FieldElement::u(e);
        let lam = FieldElement::lambda(e);
        let g = u.mul(&u.sub(&FieldElement::one())).mul(&u.sub(&lam));
        // delta(v^2) computed through the product rule vs delta(g)
        let lhs = v.delta().mul(&v).scale(&RatFunc::from_int(2));
        assert_eq!(lhs, g.delta());
        let du = u.delta();
        let dlam = lam.delta();
        let three_u2 = u.mul(&u).scale(&RatFunc::from_int(3));
        let mid = lam
            .add(&FieldElement::one())
            .mul(&u)
            .scale(&RatFunc::from_int(2));
        let numer = three_u2
            .sub(&mid)
            .add(&lam)
            .mul(&du)
            .sub(&u.mul(&u.sub(&FieldElement::one())).mul(&dlam));
        let expected = numer.div(&v.scale(&RatFunc::from_int(2))).unwrap();
        assert_eq!(v.delta(), expected);
    }

    #[test]
    fn c_predicate_is_syntactic() {
        let a = FieldElement::a(0);
        assert!(a.pow(3).unwrap().sub(&a.pow(2).unwrap()).is_c());
        assert!(!FieldElement::u(e01()).is_c());
        assert!(!FieldElement::v(e01()).add(&a).is_c());
        assert!(FieldElement::from_int(3).is_c());
    }

    #[test]
    fn rendering_is_stable() {
        let e = e01();
        let x = FieldElement::a(0)
            .add(&FieldElement::v(e).scale(&RatFunc::from_ratio(BigInt::from(1), BigInt::from(2))));
        assert_eq!(x.to_string(), "a0 + (1)/(2)*v[0,1]");
    }
}
