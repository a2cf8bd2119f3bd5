//! Complete factorization of univariate polynomials over `Q(symbols)`,
//! for bounded degree.
//!
//! Coefficients are cleared to `Z[symbols]` and the content with respect to
//! the main variable is removed (Gauss's lemma). Irreducibility is first
//! tried by specializing the symbols to integers; otherwise a Kronecker
//! substitution reduces to `Z[t]`, which is factored by Zassenhaus
//! (Cantor-Zassenhaus modulo a prime, quadratic Hensel lifting over a
//! factor tree, subset recombination). Candidate factors are pulled back
//! and confirmed by exact division.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{gcd, IntPoly, Monomial};
use super::ratfunc::RatFunc;
use super::symbol::Symbol;
use super::ExactError;

pub const DEFAULT_DEGREE_BOUND: u32 = 8;

/// Largest degree accepted after Kronecker substitution.
const KRONECKER_LIMIT: usize = 600;
/// Largest number of modular factors accepted for subset recombination.
const RECOMBINATION_LIMIT: usize = 18;

const MAIN: Symbol = Symbol::Aux(0);

/// Univariate polynomial over `Q(symbols)`, coefficients low to high, no
/// trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    coeffs: Vec<RatFunc>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<RatFunc>) -> Self {
        while coeffs.last().is_some_and(RatFunc::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: RatFunc) -> Self {
        Self::new(vec![c])
    }

    /// `X - r`.
    pub fn linear(r: RatFunc) -> Self {
        Self::new(vec![r.neg(), RatFunc::one()])
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| RatFunc::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[RatFunc] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial has degree 0 here, check `is_zero` first.
    pub fn degree(&self) -> u32 {
        self.coeffs.len().saturating_sub(1) as u32
    }

    pub fn leading(&self) -> RatFunc {
        self.coeffs.last().cloned().unwrap_or_else(RatFunc::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(RatFunc::is_one)
    }

    pub fn monic(&self) -> UniPoly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(lc) => {
                let inv = lc.inv().expect("nonzero");
                UniPoly::new(self.coeffs.iter().map(|c| c.mul(&inv)).collect())
            }
        }
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = RatFunc::zero();
        UniPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs
                        .get(i)
                        .unwrap_or(&zero)
                        .add(other.coeffs.get(i).unwrap_or(&zero))
                })
                .collect(),
        )
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![RatFunc::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UniPoly::new(out)
    }

    /// Clears denominators: returns a polynomial in `Z[symbols][X]` with
    /// `X = Aux(0)`, equal to `self` times a nonzero element of the base.
    fn to_int_poly(&self) -> IntPoly {
        let mut l = IntPoly::one();
        for c in &self.coeffs {
            if c.den().is_one() {
                continue;
            }
            let g = gcd(&l, c.den());
            l = l.mul(&c.den().div_exact(&g).expect("gcd divides"));
        }
        let coeffs: Vec<IntPoly> = self
            .coeffs
            .iter()
            .map(|c| c.num().mul(&l.div_exact(c.den()).expect("lcm")))
            .collect();
        IntPoly::from_coeffs_in(MAIN, &coeffs)
    }

    fn from_int_poly(p: &IntPoly) -> UniPoly {
        UniPoly::new(
            p.coeffs_in(MAIN)
                .into_iter()
                .map(RatFunc::from_poly)
                .collect(),
        )
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, c.is_one()) {
                (0, _) => write!(f, "{c}")?,
                (_, true) => {}
                _ => write!(f, "{c}*")?,
            }
            match i {
                0 => {}
                1 => f.write_str("X")?,
                _ => write!(f, "X^{i}")?,
            }
        }
        Ok(())
    }
}

/// `p = unit * prod f_i^{m_i}` with each `f_i` monic irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: RatFunc,
    pub factors: Vec<(UniPoly, u32)>,
}

impl Factorization {
    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    pub fn expand(&self) -> UniPoly {
        let mut acc = UniPoly::constant(self.unit.clone());
        for (f, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul(f);
            }
        }
        acc
    }
}

/// Factors `p` into monic irreducibles over `Q(symbols)`.
pub fn factor_bounded(p: &UniPoly, bound: u32) -> Result<Factorization, ExactError> {
    if p.is_zero() {
        return Err(ExactError::Malformed("cannot factor the zero polynomial".into()));
    }
    if p.degree() > bound {
        return Err(ExactError::DegreeBound {
            degree: p.degree(),
            bound,
        });
    }
    let unit = p.leading();
    if p.degree() == 0 {
        return Ok(Factorization {
            unit,
            factors: Vec::new(),
        });
    }
    let f = primitive_in_main(&p.to_int_poly());
    let df = f.derivative(MAIN);
    let sqf = primitive_in_main(&f.div_exact(&gcd(&f, &df)).expect("gcd divides"));
    let irreducibles = factor_squarefree(&sqf)?;

    let mut factors = Vec::new();
    for g in irreducibles {
        let mut rest = f.clone();
        let mut m = 0;
        while let Some(q) = rest.div_exact(&g) {
            rest = q;
            m += 1;
        }
        factors.push((UniPoly::from_int_poly(&g).monic(), m));
    }
    factors.sort_by(|(a, _), (b, _)| {
        a.degree()
            .cmp(&b.degree())
            .then_with(|| a.to_string().cmp(&b.to_string()))
    });
    Ok(Factorization { unit, factors })
}

/// Removes the content with respect to the main variable, sign-normalized.
fn primitive_in_main(f: &IntPoly) -> IntPoly {
    let coeffs = f.coeffs_in(MAIN);
    let mut c = IntPoly::zero();
    for k in &coeffs {
        c = gcd(&c, k);
        if c.is_one() {
            break;
        }
    }
    let pp = if c.is_one() {
        f.clone()
    } else {
        f.div_exact(&c).expect("content divides")
    };
    pp.primitive().1
}

/// Irreducible factors in `Z[symbols][X]` of a square-free, primitive `f`.
fn factor_squarefree(f: &IntPoly) -> Result<Vec<IntPoly>, ExactError> {
    let deg = f.degree_in(MAIN);
    if deg <= 1 {
        return Ok(vec![f.clone()]);
    }
    let others: Vec<Symbol> = f.symbols().into_iter().filter(|&s| s != MAIN).collect();
    if others.is_empty() {
        let uni = to_dense(f, MAIN);
        return Ok(factor_z(&uni)?
            .into_iter()
            .map(|g| from_dense(&g, MAIN))
            .collect());
    }
    if specializes_irreducible(f, &others, deg)? {
        return Ok(vec![f.clone()]);
    }
    let k = Kronecker::new(f);
    if k.max_exponent() > KRONECKER_LIMIT {
        return Err(ExactError::TooLarge);
    }
    let image = k.forward(f);
    let mut pool = Vec::new();
    for (g, m) in factor_z_with_multiplicity(&image)? {
        pool.extend(std::iter::repeat_n(g, m as usize));
    }

    let mut rest = f.clone();
    let mut found = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= pool.len() {
        for subset in combinations(pool.len(), size) {
            let mut prod = vec![BigInt::one()];
            for &i in &subset {
                prod = zmul(&prod, &pool[i]);
            }
            let Some(cand) = k.backward(&prod) else { continue };
            if cand.degree_in(MAIN) == 0 {
                continue;
            }
            let cand = cand.primitive().1;
            if let Some(q) = rest.div_exact(&cand) {
                rest = q;
                found.push(cand);
                for &i in subset.iter().rev() {
                    pool.remove(i);
                }
                continue 'outer;
            }
        }
        size += 1;
    }
    found.push(rest.primitive().1);
    Ok(found)
}

/// If some integer specialization of the symbols keeps the degree and
/// is irreducible over `Z`, then `f` is irreducible.
fn specializes_irreducible(f: &IntPoly, others: &[Symbol], deg: u32) -> Result<bool, ExactError> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..3 {
        let mut g = f.clone();
        for &s in others {
            let v: i64 = rng.gen_range(2..40) * if rng.gen_bool(0.5) { 1 } else { -1 };
            g = g.eval_symbol(s, &BigInt::from(v));
        }
        if g.degree_in(MAIN) != deg {
            continue;
        }
        let uni = to_dense(&g, MAIN);
        if zgcd(&uni, &zderiv(&uni)).len() > 1 {
            continue;
        }
        if factor_z(&uni)?.len() == 1 {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Kronecker substitution `X -> t`, `s_k -> t^{r_k}` with mixed radices
/// exceeding the degree of `f` in every variable, so that every divisor of
/// `f` maps injectively.
struct Kronecker {
    vars: Vec<Symbol>,
    degs: Vec<u32>,
    radix: Vec<usize>,
}

impl Kronecker {
    fn new(f: &IntPoly) -> Self {
        let mut vars = vec![MAIN];
        vars.extend(f.symbols().into_iter().filter(|&s| s != MAIN));
        let degs: Vec<u32> = vars.iter().map(|&s| f.degree_in(s)).collect();
        let mut radix = Vec::with_capacity(vars.len());
        let mut r = 1usize;
        for &d in &degs {
            radix.push(r);
            r = r.saturating_mul(d as usize + 1);
        }
        Kronecker { vars, degs, radix }
    }

    fn max_exponent(&self) -> usize {
        self.degs
            .iter()
            .zip(&self.radix)
            .map(|(&d, &r)| (d as usize).saturating_mul(r))
            .fold(0usize, usize::saturating_add)
    }

    fn forward(&self, f: &IntPoly) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); self.max_exponent() + 1];
        for (m, c) in f.terms() {
            let e: usize = self
                .vars
                .iter()
                .zip(&self.radix)
                .map(|(&s, &r)| m.exponent(s) as usize * r)
                .sum();
            out[e] += c;
        }
        trim(&mut out);
        out
    }

    fn backward(&self, g: &[BigInt]) -> Option<IntPoly> {
        let mut terms = Vec::new();
        for (e, c) in g.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if e > self.max_exponent() {
                return None;
            }
            let mut factors = Vec::new();
            for (k, &s) in self.vars.iter().enumerate() {
                let digit = (e / self.radix[k]) % (self.degs[k] as usize + 1);
                if digit > 0 {
                    factors.push((s, digit as u32));
                }
            }
            terms.push((Monomial::from_factors(factors), c.clone()));
        }
        Some(IntPoly::from_terms(terms))
    }
}

fn to_dense(f: &IntPoly, s: Symbol) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); f.degree_in(s) as usize + 1];
    for (m, c) in f.terms() {
        out[m.exponent(s) as usize] += c;
    }
    trim(&mut out);
    out
}

fn from_dense(g: &[BigInt], s: Symbol) -> IntPoly {
    IntPoly::from_terms(
        g.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (Monomial::var(s, i as u32), c.clone())),
    )
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

// ---- dense integer polynomials, coefficients low to high ----

fn trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

fn zmul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn zderiv(a: &[BigInt]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect();
    trim(&mut out);
    out
}

fn zcontent(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

/// Primitive part with positive leading coefficient.
fn zprimitive(a: &[BigInt]) -> Vec<BigInt> {
    let mut c = zcontent(a);
    if c.is_zero() {
        return Vec::new();
    }
    if a.last().unwrap().is_negative() {
        c = -c;
    }
    a.iter().map(|x| x / &c).collect()
}

/// Exact quotient `a / b` over `Z`, if it exists.
fn zdiv_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    if b.is_empty() {
        return None;
    }
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() < b.len() {
        return None;
    }
    // cheap test on constant terms
    if !b[0].is_zero() && !a[0].is_zero() && !(&a[0] % &b[0]).is_zero() {
        return None;
    }
    let lb = b.last().unwrap();
    let mut rem = a.to_vec();
    let mut q = vec![BigInt::zero(); a.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let top = &rem[i + b.len() - 1];
        let (c, r) = top.div_rem(lb);
        if !r.is_zero() {
            return None;
        }
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] -= &c * bj;
            }
        }
        q[i] = c;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return None;
    }
    Some(q)
}

fn zgcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let g = gcd(&from_dense(a, MAIN), &from_dense(b, MAIN));
    to_dense(&g, MAIN)
}

/// Irreducible factors of `f` over `Z` with multiplicities.
fn factor_z_with_multiplicity(f: &[BigInt]) -> Result<Vec<(Vec<BigInt>, u32)>, ExactError> {
    let f = zprimitive(f);
    let g = zgcd(&f, &zderiv(&f));
    let sqf = zprimitive(&zdiv_exact(&f, &g).expect("gcd divides"));
    let mut out = Vec::new();
    for p in factor_z(&sqf)? {
        let mut rest = f.clone();
        let mut m = 0;
        while let Some(q) = zdiv_exact(&rest, &p) {
            rest = q;
            m += 1;
        }
        out.push((p, m));
    }
    Ok(out)
}

/// Irreducible factors over `Z` of a square-free primitive polynomial.
fn factor_z(f: &[BigInt]) -> Result<Vec<Vec<BigInt>>, ExactError> {
    let f = zprimitive(f);
    let n = f.len().saturating_sub(1);
    if n <= 1 {
        return Ok(vec![f]);
    }
    // pull out powers of t first, they upset the prime choice
    if f[0].is_zero() {
        let k = f.iter().position(|c| !c.is_zero()).unwrap();
        let mut out = vec![vec![BigInt::zero(), BigInt::one()]];
        out.extend(factor_z(&f[k..])?);
        return Ok(out);
    }
    let (p, modular) = choose_prime(&f)?;
    if modular.len() == 1 {
        return Ok(vec![f]);
    }
    if modular.len() > RECOMBINATION_LIMIT {
        return Err(ExactError::TooLarge);
    }
    let lc = f.last().unwrap().clone();
    let bound = factor_coefficient_bound(&f) * lc.abs();
    let pb = BigInt::from(p);
    let mut modulus = pb.clone();
    while modulus <= &bound * 2 {
        modulus = &modulus * &modulus;
    }
    let lifted = hensel_lift_all(&f, &modular, p, &modulus);
    Ok(recombine(f, lifted, &modulus))
}

/// Coefficient bound for any factor of `f` over `Z`: `2^n * |f|_2`.
fn factor_coefficient_bound(f: &[BigInt]) -> BigInt {
    let n = f.len() - 1;
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    (BigInt::one() << n) * (norm2.sqrt() + 1u32)
}

fn recombine(mut f: Vec<BigInt>, mut lifted: Vec<Vec<BigInt>>, m: &BigInt) -> Vec<Vec<BigInt>> {
    let mut found = Vec::new();
    let mut size = 1;
    'outer: while 2 * size <= lifted.len() {
        let lc = f.last().unwrap().clone();
        for subset in combinations(lifted.len(), size) {
            let mut g = vec![lc.clone()];
            for &i in &subset {
                g = zmod(&zmul(&g, &lifted[i]), m);
            }
            let g = zprimitive(&symmetric(&g, m));
            if let Some(q) = zdiv_exact(&f, &g) {
                f = q;
                found.push(g);
                for &i in subset.iter().rev() {
                    lifted.remove(i);
                }
                continue 'outer;
            }
        }
        size += 1;
    }
    found.push(zprimitive(&f));
    found
}

fn zmod(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = a.iter().map(|c| c.mod_floor(m)).collect();
    trim(&mut out);
    out
}

fn symmetric(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    a.iter()
        .map(|c| {
            let r = c.mod_floor(m);
            if r > half {
                r - m
            } else {
                r
            }
        })
        .collect()
}

// ---- polynomials over Z/mZ with BigInt coefficients ----

fn mmul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    zmod(&zmul(a, b), m)
}

fn msub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    let v: Vec<BigInt> = (0..n)
        .map(|i| a.get(i).unwrap_or(&zero) - b.get(i).unwrap_or(&zero))
        .collect();
    zmod(&v, m)
}

fn madd(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let zero = BigInt::zero();
    let v: Vec<BigInt> = (0..n)
        .map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero))
        .collect();
    zmod(&v, m)
}

/// Division by a monic polynomial modulo `m`.
fn mdivrem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    debug_assert!(b.last().is_some_and(One::is_one));
    let mut rem = zmod(a, m);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut q = vec![BigInt::zero(); rem.len() - b.len() + 1];
    for i in (0..q.len()).rev() {
        let c = rem[i + b.len() - 1].mod_floor(m);
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                rem[i + j] = (&rem[i + j] - &c * bj).mod_floor(m);
            }
        }
        q[i] = c;
    }
    rem.truncate(b.len() - 1);
    trim(&mut rem);
    trim(&mut q);
    (q, rem)
}

/// One quadratic Hensel step: from `f = g h`, `s g + t h = 1` modulo `m`
/// to the same relations modulo `m^2`. `h` is monic.
#[allow(clippy::type_complexity)]
fn hensel_step(
    f: &[BigInt],
    g: &[BigInt],
    h: &[BigInt],
    s: &[BigInt],
    t: &[BigInt],
    m: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>, Vec<BigInt>, Vec<BigInt>) {
    let m2 = m * m;
    let e = msub(f, &mmul(g, h, &m2), &m2);
    let (q, r) = mdivrem_monic(&mmul(s, &e, &m2), h, &m2);
    let g1 = madd(g, &madd(&mmul(t, &e, &m2), &mmul(&q, g, &m2), &m2), &m2);
    let h1 = madd(h, &r, &m2);
    let b = msub(
        &madd(&mmul(s, &g1, &m2), &mmul(t, &h1, &m2), &m2),
        &[BigInt::one()],
        &m2,
    );
    let (c, d) = mdivrem_monic(&mmul(s, &b, &m2), &h1, &m2);
    let s1 = msub(s, &d, &m2);
    let t1 = msub(&msub(t, &mmul(t, &b, &m2), &m2), &mmul(&c, &g1, &m2), &m2);
    (g1, h1, s1, t1)
}

/// Lifts the monic modular factorization `f = lc * prod factors (mod p)` to
/// monic factors modulo `target`, splitting the factor list in halves.
fn hensel_lift_all(f: &[BigInt], factors: &[Vec<u64>], p: u64, target: &BigInt) -> Vec<Vec<BigInt>> {
    if factors.len() == 1 {
        let lc = f.last().unwrap().mod_floor(target);
        let inv = lc.modinv(target).expect("lc is a unit");
        return vec![zmod(&f.iter().map(|c| c * &inv).collect::<Vec<_>>(), target)];
    }
    let k = factors.len() / 2;
    let (left, right) = factors.split_at(k);
    let fp = FpPoly::from_z(f, p);
    let lcp = fp.lc();
    let mut g0 = FpPoly::constant(lcp, p);
    for q in left {
        g0 = g0.mul(&FpPoly::new(q.clone(), p));
    }
    let mut h0 = FpPoly::constant(1, p);
    for q in right {
        h0 = h0.mul(&FpPoly::new(q.clone(), p));
    }
    let (gg, s0, t0) = g0.xgcd(&h0);
    debug_assert_eq!(gg.coeffs, vec![1]);
    let (mut g, mut h, mut s, mut t) = (g0.to_z(), h0.to_z(), s0.to_z(), t0.to_z());
    let mut m = BigInt::from(p);
    while &m < target {
        (g, h, s, t) = hensel_step(f, &g, &h, &s, &t, &m);
        m = &m * &m;
    }
    let g = zmod(&g, target);
    let h = zmod(&h, target);
    let mut out = hensel_lift_all(&g, left, p, target);
    out.extend(hensel_lift_all(&h, right, p, target));
    out
}

/// Picks an odd prime not dividing the leading coefficient that keeps `f`
/// square-free, preferring the one with the fewest modular factors.
fn choose_prime(f: &[BigInt]) -> Result<(u64, Vec<Vec<u64>>), ExactError> {
    let lc = f.last().unwrap();
    let mut best: Option<(u64, Vec<Vec<u64>>)> = None;
    let mut tried = 0;
    let mut p = 2u64;
    while tried < 4 {
        p = next_prime(p);
        if p > 1 << 20 {
            break;
        }
        if (lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = FpPoly::from_z(f, p);
        if fp.gcd(&fp.deriv()).degree() > 0 {
            continue;
        }
        tried += 1;
        let facs = fp.monic().factor(p ^ 0x9e37_79b9);
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs.into_iter().map(|q| q.coeffs).collect()));
        }
        if best.as_ref().is_some_and(|(_, b)| b.len() == 1) {
            break;
        }
    }
    best.ok_or(ExactError::TooLarge)
}

fn next_prime(n: u64) -> u64 {
    let mut k = n + 1;
    loop {
        if k >= 3 && k % 2 == 1 && (3..).step_by(2).take_while(|d| d * d <= k).all(|d| k % d != 0) {
            return k;
        }
        k += 1;
    }
}

// ---- polynomials over F_p, p < 2^31 ----

#[derive(Clone, Debug, PartialEq, Eq)]
struct FpPoly {
    coeffs: Vec<u64>,
    p: u64,
}

impl FpPoly {
    fn new(mut coeffs: Vec<u64>, p: u64) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        FpPoly { coeffs, p }
    }

    fn constant(c: u64, p: u64) -> Self {
        Self::new(vec![c % p], p)
    }

    fn from_z(a: &[BigInt], p: u64) -> Self {
        let pb = BigInt::from(p);
        Self::new(
            a.iter()
                .map(|c| c.mod_floor(&pb).to_u64().unwrap())
                .collect(),
            p,
        )
    }

    fn to_z(&self) -> Vec<BigInt> {
        self.coeffs.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    fn lc(&self) -> u64 {
        *self.coeffs.last().unwrap_or(&0)
    }

    fn inv(&self, a: u64) -> u64 {
        pow_mod(a, self.p - 2, self.p)
    }

    fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let i = self.inv(self.lc());
        self.scale(i)
    }

    fn scale(&self, c: u64) -> Self {
        Self::new(self.coeffs.iter().map(|&x| x * c % self.p).collect(), self.p)
    }

    fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            (0..n)
                .map(|i| {
                    (self.coeffs.get(i).unwrap_or(&0) + o.coeffs.get(i).unwrap_or(&0)) % self.p
                })
                .collect(),
            self.p,
        )
    }

    fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(self.p - 1))
    }

    fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::new(Vec::new(), self.p);
        }
        let mut out = vec![0u64; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + a * b) % self.p;
            }
        }
        Self::new(out, self.p)
    }

    fn divrem(&self, d: &Self) -> (Self, Self) {
        let p = self.p;
        let mut rem = self.coeffs.clone();
        if rem.len() < d.coeffs.len() {
            return (Self::new(Vec::new(), p), self.clone());
        }
        let li = self.inv(d.lc());
        let mut q = vec![0u64; rem.len() - d.coeffs.len() + 1];
        for i in (0..q.len()).rev() {
            let c = rem[i + d.coeffs.len() - 1] * li % p;
            if c != 0 {
                for (j, &dj) in d.coeffs.iter().enumerate() {
                    rem[i + j] = (rem[i + j] + p - c * dj % p) % p;
                }
            }
            q[i] = c;
        }
        rem.truncate(d.coeffs.len() - 1);
        (Self::new(q, p), Self::new(rem, p))
    }

    fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    fn deriv(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| (i as u64 % self.p) * c % self.p)
                .collect(),
            self.p,
        )
    }

    fn gcd(&self, o: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s self + t o = g`, `g` monic.
    fn xgcd(&self, o: &Self) -> (Self, Self, Self) {
        let p = self.p;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Self::constant(1, p), Self::new(Vec::new(), p));
        let (mut t0, mut t1) = (Self::new(Vec::new(), p), Self::constant(1, p));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let s2 = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, s2);
            let t2 = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, t2);
        }
        let i = self.inv(r0.lc());
        (r0.scale(i), s0.scale(i), t0.scale(i))
    }

    fn powmod(&self, e: &BigUint, m: &Self) -> Self {
        let mut result = Self::constant(1, self.p);
        let base = self.rem(m);
        for bit in (0..e.bits()).rev() {
            result = result.mul(&result).rem(m);
            if e.bit(bit) {
                result = result.mul(&base).rem(m);
            }
        }
        result
    }

    /// Monic irreducible factors of a monic square-free polynomial.
    fn factor(&self, seed: u64) -> Vec<FpPoly> {
        let p = self.p;
        let x = Self::new(vec![0, 1], p);
        let pe = BigUint::from(p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = self.clone();
        let mut h = x.clone();
        let mut out = Vec::new();
        let mut i = 0;
        while f.degree() >= 2 * (i + 1) {
            i += 1;
            h = h.powmod(&pe, &f);
            let g = h.sub(&x).gcd(&f);
            if g.degree() > 0 {
                out.extend(g.equal_degree(i, &mut rng));
                f = f.divrem(&g).0;
                h = h.rem(&f);
            }
        }
        if f.degree() > 0 {
            out.push(f.monic());
        }
        out.sort_by(|a, b| a.degree().cmp(&b.degree()).then(a.coeffs.cmp(&b.coeffs)));
        out
    }

    /// Splits a product of irreducibles all of degree `d` (Cantor-Zassenhaus).
    fn equal_degree(&self, d: usize, rng: &mut ChaCha8Rng) -> Vec<FpPoly> {
        let n = self.degree();
        if n == d {
            return vec![self.monic()];
        }
        let p = self.p;
        let e = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
        loop {
            let a = Self::new((0..n).map(|_| rng.gen_range(0..p)).collect(), p);
            if a.degree() == 0 {
                continue;
            }
            let b = a.powmod(&e, self).sub(&Self::constant(1, p));
            let g = b.gcd(self);
            if g.degree() > 0 && g.degree() < n {
                let mut out = g.equal_degree(d, rng);
                out.extend(self.divrem(&g).0.equal_degree(d, rng));
                return out;
            }
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(n: u32) -> RatFunc {
        RatFunc::var(Symbol::A(n))
    }

    #[test]
    fn integer_factorizations() {
        let f = factor_bounded(&UniPoly::from_ints(&[-1, 0, 1]), 8).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.factors[0].0.to_string(), "X + -1");
        assert_eq!(f.factors[1].0.to_string(), "X + 1");
        assert!(factor_bounded(&UniPoly::from_ints(&[1, 0, 1]), 8)
            .unwrap()
            .is_irreducible());
        // (x^2 - 2)(x^2 + x + 1)^2
        let p = UniPoly::from_ints(&[-2, 0, 1])
            .mul(&UniPoly::from_ints(&[1, 1, 1]))
            .mul(&UniPoly::from_ints(&[1, 1, 1]));
        let f = factor_bounded(&p, 8).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert_eq!(f.expand(), p);
    }

    #[test]
    fn swinnerton_dyer_like_needs_recombination() {
        // x^4 - 10 x^2 + 1 is irreducible but splits modulo every prime
        let f = factor_bounded(&UniPoly::from_ints(&[1, 0, -10, 0, 1]), 8).unwrap();
        assert!(f.is_irreducible());
    }

    #[test]
    fn legendre_cubic_splits() {
        let lam = a(0).add(&a(1));
        let p = UniPoly::new(vec![
            RatFunc::zero(),
            lam.clone(),
            lam.add(&RatFunc::one()).neg(),
            RatFunc::one(),
        ]);
        let f = factor_bounded(&p, 8).unwrap();
        assert_eq!(f.factors.len(), 3);
        assert_eq!(f.expand(), p);
        let roots: Vec<RatFunc> = f.factors.iter().map(|(g, _)| g.coeffs()[0].neg()).collect();
        assert!(roots.contains(&RatFunc::zero()));
        assert!(roots.contains(&RatFunc::one()));
        assert!(roots.contains(&lam));
    }

    #[test]
    fn symbolic_irreducible_and_rational_coefficients() {
        // X^2 - a0 is irreducible
        let p = UniPoly::new(vec![a(0).neg(), RatFunc::zero(), RatFunc::one()]);
        assert!(factor_bounded(&p, 8).unwrap().is_irreducible());
        // (X - a0/(a1+1)) (X + 1/2) (X - a0 a1)
        let r1 = a(0).div(&a(1).add(&RatFunc::one())).unwrap();
        let r2 = RatFunc::from_ratio(BigInt::from(-1), BigInt::from(2));
        let r3 = a(0).mul(&a(1));
        let p = UniPoly::linear(r1)
            .mul(&UniPoly::linear(r2))
            .mul(&UniPoly::linear(r3));
        let f = factor_bounded(&p.mul(&UniPoly::constant(RatFunc::from_int(3))), 8).unwrap();
        assert_eq!(f.factors.len(), 3);
        assert_eq!(f.unit, RatFunc::from_int(3));
        assert_eq!(f.expand(), p.mul(&UniPoly::constant(RatFunc::from_int(3))));
    }

    #[test]
    fn degree_bound_is_enforced() {
        let p = UniPoly::from_ints(&[1, 0, 0, 0, 0, 0, 0, 0, 0, 1]);
        assert!(matches!(
            factor_bounded(&p, 8),
            Err(ExactError::DegreeBound { degree: 9, bound: 8 })
        ));
    }
}
