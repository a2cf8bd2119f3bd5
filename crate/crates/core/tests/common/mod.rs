#![allow(dead_code)]

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;

use graphfield::exact::{EdgeId, FieldElement, IntPoly, Monomial, VMonomial};

pub fn e01() -> EdgeId {
    EdgeId::new(0, 1).unwrap()
}

/// A small random element over `a0, a1, a2, u_(0,1), u_(0,1)', v_(0,1)`.
pub fn random_element(rng: &mut impl Rng, depth: u32) -> FieldElement {
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..7) {
            0 => FieldElement::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4)),
            1 => FieldElement::a(0),
            2 => FieldElement::a(1),
            3 => FieldElement::a(2),
            4 => FieldElement::u(e01()),
            5 => FieldElement::u_derivative(e01(), 1),
            _ => FieldElement::v(e01()),
        };
    }
    let x = random_element(rng, depth - 1);
    let y = random_element(rng, depth - 1);
    match rng.gen_range(0..5) {
        0 => x.add(&y),
        1 => x.sub(&y),
        2 => x.mul(&y),
        3 => x.div(&y).unwrap_or(x),
        _ => x.neg(),
    }
}

pub fn random_nonzero(rng: &mut impl Rng, depth: u32) -> FieldElement {
    loop {
        let x = random_element(rng, depth);
        if !x.is_zero() {
            return x;
        }
    }
}

/// Coordinates of `x` over `Q` after clearing the common denominator `den`:
/// `x * den = sum c * v^M * m` with `m` a symbol monomial.
fn coordinates(x: &FieldElement, den: &IntPoly) -> HashMap<(VMonomial, Monomial), BigInt> {
    let mut out = HashMap::new();
    for (vm, c) in x.terms() {
        let scaled = c.num().mul(&den.div_exact(c.den()).expect("den is a common multiple"));
        for (m, k) in scaled.terms() {
            out.insert((vm.clone(), m.clone()), k.clone());
        }
    }
    out
}

/// Rank over `Q` of integer row vectors.
fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] / &rows[r][c];
            for j in c..cols {
                let t = &f * &rows[r][j];
                rows[i][j] -= t;
            }
        }
        r += 1;
    }
    r
}

/// Searches for a nonzero `P in Q[X, Y]` of total degree at most `deg`
/// with `P(x, y) = 0`, by linear algebra on the monomials `x^i y^j`.
pub fn has_relation(x: &FieldElement, y: &FieldElement, deg: u32) -> bool {
    let mut xp = vec![FieldElement::one()];
    let mut yp = vec![FieldElement::one()];
    for k in 1..=deg as usize {
        xp.push(xp[k - 1].mul(x));
        yp.push(yp[k - 1].mul(y));
    }
    let mut monos = Vec::new();
    for i in 0..=deg as usize {
        for j in 0..=deg as usize - i {
            monos.push(xp[i].mul(&yp[j]));
        }
    }
    let mut den = IntPoly::one();
    for m in &monos {
        for (_, c) in m.terms() {
            if den.div_exact(c.den()).is_none() {
                den = den.mul(c.den());
            }
        }
    }
    let coords: Vec<_> = monos.iter().map(|m| coordinates(m, &den)).collect();
    let mut keys: Vec<_> = coords.iter().flat_map(|c| c.keys().cloned()).collect();
    keys.sort_by_key(|k| format!("{k:?}"));
    keys.dedup();
    let rows: Vec<Vec<BigRational>> = coords
        .iter()
        .map(|c| {
            keys.iter()
                .map(|k| BigRational::from_integer(c.get(k).cloned().unwrap_or_default()))
                .collect()
        })
        .collect();
    rational_rank(rows) < monos.len()
}

/// A pair `(x, y)`, about half of them algebraically dependent with a
/// relation of total degree at most 3.
pub fn oracle_pair(rng: &mut impl Rng) -> (FieldElement, FieldElement) {
    let x = random_nonzero(rng, 2);
    let c = FieldElement::from_int(rng.gen_range(1..=3));
    let y = match rng.gen_range(0..6) {
        0 => x.mul(&x).add(&c),
        1 => c.div(&x).unwrap(),
        2 => x.mul(&x).add(&c).div(&x.add(&FieldElement::one())).unwrap_or(c),
        3 => FieldElement::from_ratio(rng.gen_range(-4..=4), 3),
        _ => random_nonzero(rng, 2),
    };
    (x, y)
}
