//! Sparse multivariate polynomials with integer coefficients.
//!
//! Terms are kept sorted in decreasing graded-lexicographic order, where the
//! lexicographic tie-break compares exponents symbol by symbol in increasing
//! [`Symbol`] order (so `a0` is the most significant variable).

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::symbol::Symbol;

/// A power product, stored as `(symbol, exponent)` pairs sorted by symbol
/// with strictly positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[(Symbol, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(s: Symbol, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(smallvec::smallvec![(s, e)])
        }
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, s: Symbol) -> u32 {
        self.0
            .binary_search_by(|(t, _)| t.cmp(&s))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn factors(&self) -> impl Iterator<Item = (Symbol, u32)> + '_ {
        self.0.iter().copied()
    }

    pub fn from_factors(mut factors: Vec<(Symbol, u32)>) -> Self {
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: SmallVec<[(Symbol, u32); 4]> = SmallVec::new();
        for (s, e) in factors {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some((t, f)) if *t == s => *f += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        for &(s, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < s {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == s {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => continue,
                    Ordering::Greater => out.push((s, e - f)),
                }
            } else {
                out.push((s, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1.min(b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    fn without(&self, s: Symbol) -> (Monomial, u32) {
        let mut e = 0;
        let rest = self
            .0
            .iter()
            .filter(|&&(t, f)| {
                if t == s {
                    e = f;
                    false
                } else {
                    true
                }
            })
            .copied()
            .collect();
        (Monomial(rest), e)
    }

    fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(&(s, e)), Some(&(t, f))) => match s.cmp(&t) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if e != f {
                            return e.cmp(&f);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.lex_cmp(other))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Polynomial in [`Symbol`]s over the integers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPoly {
    terms: Vec<(Monomial, BigInt)>,
}

impl IntPoly {
    pub fn zero() -> Self {
        IntPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            IntPoly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn var(s: Symbol) -> Self {
        IntPoly {
            terms: vec![(Monomial::var(s, 1), BigInt::one())],
        }
    }

    pub fn monomial(m: Monomial, c: BigInt) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            IntPoly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_default() += c;
        }
        Self::from_map(acc)
    }

    fn from_map(acc: HashMap<Monomial, BigInt>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        IntPoly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, BigInt)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn constant_value(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, BigInt)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> BigInt {
        self.terms
            .first()
            .map(|t| t.1.clone())
            .unwrap_or_else(BigInt::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.exponent(s))
            .max()
            .unwrap_or(0)
    }

    /// Sorted list of the symbols that occur.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> = self
            .terms
            .iter()
            .flat_map(|(m, _)| m.factors().map(|(s, _)| s))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn contains_symbol(&self, pred: impl Fn(Symbol) -> bool) -> bool {
        self.terms
            .iter()
            .any(|(m, _)| m.factors().any(|(s, _)| pred(s)))
    }

    pub fn max_norm(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(_, c)| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    /// Gcd of the integer coefficients (non-negative; zero for the zero polynomial).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn add(&self, other: &IntPoly) -> IntPoly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &IntPoly) -> IntPoly {
        self.merge(other, true)
    }

    fn merge(&self, other: &IntPoly, negate: bool) -> IntPoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for (m, c) in &b[j..] {
            out.push((m.clone(), if negate { -c } else { c.clone() }));
        }
        IntPoly { terms: out }
    }

    pub fn mul(&self, other: &IntPoly) -> IntPoly {
        if self.is_zero() || other.is_zero() {
            return IntPoly::zero();
        }
        if let Some(c) = self.constant_value() {
            return other.scale(&c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(&c);
        }
        if self.terms.len() == 1 || other.terms.len() == 1 {
            let (single, many) = if self.terms.len() == 1 {
                (&self.terms[0], other)
            } else {
                (&other.terms[0], self)
            };
            // multiplying by a monomial preserves the term order
            return IntPoly {
                terms: many
                    .terms
                    .iter()
                    .map(|(m, c)| (m.mul(&single.0), c * &single.1))
                    .collect(),
            };
        }
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        Self::from_map(acc)
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut result = IntPoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn scale(&self, c: &BigInt) -> IntPoly {
        if c.is_zero() {
            return IntPoly::zero();
        }
        IntPoly {
            terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> IntPoly {
        IntPoly {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.mul(m), c.clone()))
                .collect(),
        }
    }

    /// Exact division of every coefficient by `c`; `None` if some
    /// coefficient is not divisible.
    pub fn div_scalar(&self, c: &BigInt) -> Option<IntPoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, d) in &self.terms {
            let (q, r) = d.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            terms.push((m.clone(), q));
        }
        Some(IntPoly { terms })
    }

    /// `self / d` when the division is exact in `Z[symbols]`.
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        if let Some(c) = d.constant_value() {
            return self.div_scalar(&c);
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                let q = m.div(dm)?;
                let (qc, r) = c.div_rem(dc);
                if !r.is_zero() {
                    return None;
                }
                terms.push((q, qc));
            }
            return Some(IntPoly { terms });
        }
        let (dm, dc) = &d.terms[0];
        // quick rejection on degrees
        for s in d.symbols() {
            if d.degree_in(s) > self.degree_in(s) {
                return None;
            }
        }
        let mut rem: BTreeMap<Monomial, BigInt> = self.terms.iter().cloned().collect();
        let mut quotient: Vec<(Monomial, BigInt)> = Vec::new();
        while let Some((rm, rc)) = rem.pop_last() {
            let qm = rm.div(dm)?;
            let (qc, r) = rc.div_rem(dc);
            if !r.is_zero() {
                return None;
            }
            for (m, c) in &d.terms[1..] {
                let delta = c * &qc;
                match rem.entry(m.mul(&qm)) {
                    Entry::Vacant(slot) => {
                        slot.insert(-delta);
                    }
                    Entry::Occupied(mut slot) => {
                        *slot.get_mut() -= delta;
                        if slot.get().is_zero() {
                            slot.remove();
                        }
                    }
                }
            }
            quotient.push((qm, qc));
        }
        // quotient terms are produced in decreasing order
        Some(IntPoly { terms: quotient })
    }

    /// Primitive part with positive leading coefficient, and the content
    /// removed (signed so that `content * primitive == self`).
    pub fn primitive(&self) -> (BigInt, IntPoly) {
        if self.is_zero() {
            return (BigInt::zero(), IntPoly::zero());
        }
        let mut c = self.content();
        if self.leading_coeff().is_negative() {
            c = -c;
        }
        (c.clone(), self.div_scalar(&c).expect("content divides"))
    }

    /// Sign-normalized copy: leading coefficient positive.
    pub fn normalize_sign(self) -> IntPoly {
        if self.leading_coeff().is_negative() {
            self.neg()
        } else {
            self
        }
    }

    pub fn derivative(&self, s: Symbol) -> IntPoly {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exponent(s);
            if e == 0 {
                return None;
            }
            let (rest, _) = m.without(s);
            Some((rest.mul(&Monomial::var(s, e - 1)), c * BigInt::from(e)))
        });
        IntPoly::from_terms(terms)
    }

    /// Substitutes the integer `value` for `s`.
    pub fn eval_symbol(&self, s: Symbol, value: &BigInt) -> IntPoly {
        let mut powers: Vec<BigInt> = vec![BigInt::one()];
        let mut acc: HashMap<Monomial, BigInt> = HashMap::new();
        for (m, c) in &self.terms {
            let (rest, e) = m.without(s);
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            *acc.entry(rest).or_default() += c * &powers[e as usize];
        }
        Self::from_map(acc)
    }

    /// Coefficients with respect to `s`: `self = sum_i out[i] * s^i`.
    pub fn coeffs_in(&self, s: Symbol) -> Vec<IntPoly> {
        let deg = self.degree_in(s) as usize;
        let mut buckets: Vec<Vec<(Monomial, BigInt)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(s);
            buckets[e as usize].push((rest, c.clone()));
        }
        // removing one variable keeps relative order within a bucket
        // only for lex, not grlex, so re-sort
        buckets
            .into_iter()
            .map(|mut t| {
                t.sort_by(|a, b| b.0.cmp(&a.0));
                IntPoly { terms: t }
            })
            .collect()
    }

    pub fn from_coeffs_in(s: Symbol, coeffs: &[IntPoly]) -> IntPoly {
        let mut terms = Vec::new();
        for (i, c) in coeffs.iter().enumerate() {
            let xm = Monomial::var(s, i as u32);
            for (m, k) in &c.terms {
                terms.push((m.mul(&xm), k.clone()));
            }
        }
        let mut p = IntPoly { terms };
        p.terms.sort_by(|a, b| b.0.cmp(&a.0));
        p
    }

    /// Applies a symbol renaming. The renaming must be injective on the
    /// symbols that occur.
    pub fn rename(&self, f: &impl Fn(Symbol) -> Symbol) -> IntPoly {
        let mut terms: Vec<(Monomial, BigInt)> = self
            .terms
            .iter()
            .map(|(m, c)| {
                (
                    Monomial::from_factors(m.factors().map(|(s, e)| (f(s), e)).collect()),
                    c.clone(),
                )
            })
            .collect();
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        IntPoly { terms }
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

/// Greatest common divisor in `Z[symbols]`, normalized to a positive
/// leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(f: &IntPoly, g: &IntPoly) -> IntPoly {
    if f.is_zero() {
        return g.clone().normalize_sign();
    }
    if g.is_zero() {
        return f.clone().normalize_sign();
    }
    if f == g {
        return f.clone().normalize_sign();
    }
    let (cf, pf) = f.primitive();
    let (cg, pg) = g.primitive();
    let c = cf.gcd(&cg);
    if pf.is_one() || pg.is_one() {
        return IntPoly::constant(c);
    }
    let h = if pf.terms.len() == 1 || pg.terms.len() == 1 {
        monomial_gcd(&pf, &pg)
    } else {
        let fs = pf.symbols();
        let gs = pg.symbols();
        if fs.iter().all(|s| gs.binary_search(s).is_err()) {
            IntPoly::one()
        } else if pf == pg {
            pf
        } else {
            heu_gcd(&pf, &pg).unwrap_or_else(|| prs_gcd(&pf, &pg))
        }
    };
    h.scale(&c).normalize_sign()
}

/// Gcd of primitive polynomials where at least one is a single term.
fn monomial_gcd(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let mut m: Option<Monomial> = None;
    for (t, _) in f.terms.iter().chain(g.terms.iter()) {
        m = Some(match m {
            None => t.clone(),
            Some(acc) => acc.gcd(t),
        });
    }
    IntPoly::monomial(m.unwrap_or_default(), BigInt::one())
}

fn isqrt(n: &BigInt) -> BigInt {
    n.sqrt()
}

/// Heuristic gcd by evaluation at a large integer and balanced
/// ξ-adic reconstruction; `None` when it gives up.
fn heu_gcd(f: &IntPoly, g: &IntPoly) -> Option<IntPoly> {
    let mut syms = f.symbols();
    syms.extend(g.symbols());
    syms.sort();
    let x = *syms.first()?;
    let fnorm = f.max_norm();
    let gnorm = g.max_norm();
    let b: BigInt = BigInt::from(2) * (&fnorm).min(&gnorm) + 29;
    let lf = f.leading_coeff().abs();
    let lg = g.leading_coeff().abs();
    let alt: BigInt = BigInt::from(2) * (&fnorm / &lf).min(&gnorm / &lg) + 4;
    let mut xi: BigInt = b.clone().min(BigInt::from(99) * isqrt(&b)).max(alt);
    for _ in 0..6 {
        let ff = f.eval_symbol(x, &xi);
        let gg = g.eval_symbol(x, &xi);
        if !ff.is_zero() && !gg.is_zero() {
            let h = gcd(&ff, &gg);
            let cand = interpolate(&h, &xi, x).primitive().1;
            if !cand.is_zero() && f.div_exact(&cand).is_some() && g.div_exact(&cand).is_some() {
                return Some(cand);
            }
        }
        xi = &xi * BigInt::from(73794) * isqrt(&isqrt(&xi)) / BigInt::from(27011);
    }
    None
}

/// Balanced base-`xi` expansion of the coefficients of `h` as a polynomial in `x`.
fn interpolate(h: &IntPoly, xi: &BigInt, x: Symbol) -> IntPoly {
    let half: BigInt = xi / 2;
    let mut digits: Vec<IntPoly> = Vec::new();
    let mut rest = h.clone();
    while !rest.is_zero() {
        let mut digit = Vec::new();
        let mut next = Vec::new();
        for (m, c) in &rest.terms {
            let mut r = c.mod_floor(xi);
            if r > half {
                r -= xi;
            }
            let q = (c - &r) / xi;
            if !r.is_zero() {
                digit.push((m.clone(), r));
            }
            if !q.is_zero() {
                next.push((m.clone(), q));
            }
        }
        digits.push(IntPoly { terms: digit });
        rest = IntPoly { terms: next };
    }
    IntPoly::from_coeffs_in(x, &digits)
}

/// Recursive primitive-PRS gcd of primitive polynomials.
fn prs_gcd(f: &IntPoly, g: &IntPoly) -> IntPoly {
    let mut syms = f.symbols();
    syms.extend(g.symbols());
    syms.sort();
    let Some(&x) = syms.first() else {
        return IntPoly::one();
    };
    let fc = f.coeffs_in(x);
    let gc = g.coeffs_in(x);
    let cf = fc.iter().fold(IntPoly::zero(), |acc, c| gcd(&acc, c));
    let cg = gc.iter().fold(IntPoly::zero(), |acc, c| gcd(&acc, c));
    let content = gcd(&cf, &cg);
    if fc.len() == 1 || gc.len() == 1 {
        return content;
    }
    let mut a: Vec<IntPoly> = fc.iter().map(|c| c.div_exact(&cf).unwrap()).collect();
    let mut b: Vec<IntPoly> = gc.iter().map(|c| c.div_exact(&cg).unwrap()).collect();
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        let r = pseudo_rem(&a, &b);
        if r.is_empty() {
            break;
        }
        if r.len() == 1 {
            return content;
        }
        let rc = r.iter().fold(IntPoly::zero(), |acc, c| gcd(&acc, c));
        a = b;
        b = r.iter().map(|c| c.div_exact(&rc).unwrap()).collect();
    }
    let bc = b.iter().fold(IntPoly::zero(), |acc, c| gcd(&acc, c));
    let b: Vec<IntPoly> = b.iter().map(|c| c.div_exact(&bc).unwrap()).collect();
    IntPoly::from_coeffs_in(x, &b).mul(&content).normalize_sign()
}

/// Pseudo-remainder of dense coefficient vectors (lowest degree first),
/// trailing zeros trimmed.
fn pseudo_rem(a: &[IntPoly], b: &[IntPoly]) -> Vec<IntPoly> {
    let mut r: Vec<IntPoly> = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = c.mul(lb);
        }
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = r[i + shift].sub(&bc.mul(&lr));
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: u32) -> IntPoly {
        IntPoly::var(Symbol::A(n))
    }

    fn c(k: i64) -> IntPoly {
        IntPoly::constant(BigInt::from(k))
    }

    #[test]
    fn grlex_order_puts_a0_first() {
        let p = a(1).add(&a(0)).add(&a(1).mul(&a(1))).add(&c(3));
        let rendered = p.to_string();
        assert_eq!(rendered, "a1^2 + a0 + a1 + 3");
    }

    #[test]
    fn exact_division_round_trips() {
        let f = a(0).add(&c(1)).mul(&a(1).sub(&a(0)));
        let g = f.mul(&a(0).sub(&c(2)));
        assert_eq!(g.div_exact(&f).unwrap(), a(0).sub(&c(2)));
        assert!(g.div_exact(&a(2)).is_none());
    }

    #[test]
    fn gcd_finds_shared_factor() {
        let common = a(0).mul(&a(1)).sub(&c(3));
        let f = common.mul(&a(0).add(&c(5)));
        let g = common.mul(&a(1).sub(&a(0))).scale(&BigInt::from(6));
        assert_eq!(gcd(&f, &g), common);
        assert!(gcd(&a(0), &a(1)).is_one());
    }

    #[test]
    fn gcd_handles_integer_content() {
        let f = a(0).scale(&BigInt::from(4));
        let g = a(0).mul(&a(0)).scale(&BigInt::from(6));
        assert_eq!(gcd(&f, &g), a(0).scale(&BigInt::from(2)));
    }

    #[test]
    fn prs_and_heuristic_agree() {
        let common = a(0).pow(2).add(&a(1).mul(&a(2))).sub(&c(7));
        let f = common.mul(&a(0).sub(&a(2))).mul(&a(1).add(&c(1)));
        let g = common.mul(&a(0).add(&a(1)).pow(2));
        let (_, pf) = f.primitive();
        let (_, pg) = g.primitive();
        assert_eq!(prs_gcd(&pf, &pg), common);
        assert_eq!(heu_gcd(&pf, &pg).unwrap(), common);
    }
}
