use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::poly::{gcd, IntPoly};
use super::symbol::Symbol;

/// Reduced quotient of integer polynomials.
///
/// Canonical: `gcd(num, den) = 1` in `Z[symbols]` (so the integer contents
/// are coprime too), the leading coefficient of `den` is positive, and zero
/// is `0/1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: IntPoly,
    den: IntPoly,
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc {
            num: IntPoly::zero(),
            den: IntPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(IntPoly::one())
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_poly(IntPoly::constant(BigInt::from(k)))
    }

    pub fn from_ratio(n: BigInt, d: BigInt) -> Self {
        Self::new(IntPoly::constant(n), IntPoly::constant(d))
    }

    pub fn var(s: Symbol) -> Self {
        Self::from_poly(IntPoly::var(s))
    }

    pub fn from_poly(p: IntPoly) -> Self {
        RatFunc {
            num: p,
            den: IntPoly::one(),
        }
    }

    /// Reduces `num / den`. Panics if `den` is zero.
    pub fn new(num: IntPoly, den: IntPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(&g).unwrap(), den.div_exact(&g).unwrap())
        };
        Self::sign_normalized(num, den)
    }

    fn sign_normalized(num: IntPoly, den: IntPoly) -> Self {
        if den.leading_coeff().is_negative() {
            RatFunc {
                num: num.neg(),
                den: den.neg(),
            }
        } else {
            RatFunc { num, den }
        }
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &IntPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    /// The rational value when no symbol occurs.
    pub fn as_rational(&self) -> Option<(BigInt, BigInt)> {
        Some((self.num.constant_value()?, self.den.constant_value()?))
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut s = self.num.symbols();
        s.extend(self.den.symbols());
        s.sort();
        s.dedup();
        s
    }

    pub fn contains_symbol(&self, pred: impl Fn(Symbol) -> bool + Copy) -> bool {
        self.num.contains_symbol(pred) || self.den.contains_symbol(pred)
    }

    /// Larger of the numerator and denominator total degrees.
    pub fn degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            if self.den.is_one() {
                return Self::from_poly(self.num.add(&other.num));
            }
            return Self::new(self.num.add(&other.num), self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        if g.is_one() {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            // coprime reduced denominators: the sum is already reduced
            return Self::sign_normalized(num, self.den.mul(&other.den));
        }
        let d1 = self.den.div_exact(&g).unwrap();
        let d2 = other.den.div_exact(&g).unwrap();
        let num = self.num.mul(&d2).add(&other.num.mul(&d1));
        let den = d1.mul(&other.den);
        // any common factor of num and den divides g
        let h = gcd(&num, &g);
        if h.is_one() {
            Self::sign_normalized(num, den)
        } else {
            Self::sign_normalized(num.div_exact(&h).unwrap(), den.div_exact(&h).unwrap())
        }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(self.num.mul(&other.num));
        }
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let n1 = self.num.div_exact(&g1).unwrap();
        let d2 = other.den.div_exact(&g1).unwrap();
        let n2 = other.num.div_exact(&g2).unwrap();
        let d1 = self.den.div_exact(&g2).unwrap();
        Self::sign_normalized(n1.mul(&n2), d1.mul(&d2))
    }

    pub fn mul_poly(&self, p: &IntPoly) -> RatFunc {
        self.mul(&Self::from_poly(p.clone()))
    }

    /// `None` for zero.
    pub fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        Some(Self::sign_normalized(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Option<RatFunc> {
        Some(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: u32) -> RatFunc {
        RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    pub fn scale_int(&self, k: i64) -> RatFunc {
        self.mul(&Self::from_int(k))
    }

    /// Formal partial derivative with respect to `s`.
    pub fn partial(&self, s: Symbol) -> RatFunc {
        let dn = self.num.derivative(s);
        if self.den.is_one() {
            return Self::from_poly(dn);
        }
        let dd = self.den.derivative(s);
        if dd.is_zero() {
            return Self::new(dn, self.den.clone());
        }
        Self::new(
            dn.mul(&self.den).sub(&self.num.mul(&dd)),
            self.den.mul(&self.den),
        )
    }

    /// Applies `D(p) = sum_s dp/ds * images(s)` to numerator and denominator
    /// and combines them with the quotient rule. `images` gives the value of
    /// the derivation on each symbol (`None` meaning zero).
    pub fn derive(&self, images: &impl Fn(Symbol) -> Option<RatFunc>) -> RatFunc {
        let dnum = derive_poly(&self.num, images);
        if self.den.is_one() {
            return dnum;
        }
        let dden = derive_poly(&self.den, images);
        let den = RatFunc::from_poly(self.den.clone());
        let num = RatFunc::from_poly(self.num.clone());
        dnum.mul(&den)
            .sub(&num.mul(&dden))
            .mul(&den.mul(&den).inv().unwrap())
    }

    pub fn rename(&self, f: &impl Fn(Symbol) -> Symbol) -> RatFunc {
        Self::sign_normalized(self.num.rename(f), self.den.rename(f))
    }

    /// Evaluates at rational values, `None` if the denominator vanishes or a
    /// symbol has no value.
    pub fn eval(
        &self,
        values: &impl Fn(Symbol) -> Option<(BigInt, BigInt)>,
    ) -> Option<(BigInt, BigInt)> {
        let (nn, nd) = eval_poly(&self.num, values)?;
        let (dn, dd) = eval_poly(&self.den, values)?;
        if dn.is_zero() {
            return None;
        }
        Some((nn * dd, nd * dn))
    }
}

fn derive_poly(p: &IntPoly, images: &impl Fn(Symbol) -> Option<RatFunc>) -> RatFunc {
    let mut acc = RatFunc::zero();
    for s in p.symbols() {
        if let Some(img) = images(s) {
            if img.is_zero() {
                continue;
            }
            let dp = p.derivative(s);
            acc = acc.add(&img.mul_poly(&dp));
        }
    }
    acc
}

fn eval_poly(
    p: &IntPoly,
    values: &impl Fn(Symbol) -> Option<(BigInt, BigInt)>,
) -> Option<(BigInt, BigInt)> {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for (m, c) in p.terms() {
        let mut tn = c.clone();
        let mut td = BigInt::one();
        for (s, e) in m.factors() {
            let (vn, vd) = values(s)?;
            tn *= vn.pow(e);
            td *= vd.pow(e);
        }
        num = num * &td + tn * &den;
        den *= td;
    }
    Some((num, den))
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let multi = self.num.len() > 1;
        if self.den.is_one() {
            if multi {
                write!(f, "({})", self.num)
            } else {
                write!(f, "{}", self.num)
            }
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
