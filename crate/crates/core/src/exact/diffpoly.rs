use std::collections::BTreeMap;
use std::fmt;

use super::element::FieldElement;
use super::factor::UniPoly;

/// Exponent vector over `Y, Y', Y'', ...`, no trailing zeros.
pub type DiffMonomial = Vec<u32>;

/// Element of `K{Y} = K[Y, Y', Y'', ...]` with coefficients in the field.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DifferentialPolynomial {
    terms: BTreeMap<DiffMonomial, FieldElement>,
}

impl DifferentialPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: FieldElement) -> Self {
        Self::term(Vec::new(), c)
    }

    /// `Y^(k)`.
    pub fn indeterminate(k: usize) -> Self {
        let mut m = vec![0; k + 1];
        m[k] = 1;
        Self::term(m, FieldElement::one())
    }

    pub fn term(mut m: DiffMonomial, c: FieldElement) -> Self {
        while m.last() == Some(&0) {
            m.pop();
        }
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DifferentialPolynomial { terms }
    }

    /// Polynomial in `Y` alone, coefficients low to high.
    pub fn from_coeffs(cs: Vec<FieldElement>) -> Self {
        let mut out = Self::zero();
        for (i, c) in cs.into_iter().enumerate() {
            let m = if i == 0 { Vec::new() } else { vec![i as u32] };
            out = out.add(&Self::term(m, c));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMonomial, &FieldElement)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The field element when no indeterminate occurs.
    pub fn as_constant(&self) -> Option<FieldElement> {
        match self.terms.len() {
            0 => Some(FieldElement::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Highest derivative order present; `-1` when no indeterminate occurs.
    pub fn order(&self) -> i32 {
        self.terms.keys().map(|m| m.len() as i32 - 1).max().unwrap_or(-1)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.iter().sum()).max().unwrap_or(0)
    }

    /// Degree in `Y^(k)`.
    pub fn degree_in(&self, k: usize) -> u32 {
        self.terms
            .keys()
            .map(|m| m.get(k).copied().unwrap_or(0))
            .max()
            .unwrap_or(0)
    }

    /// Monic in its leading indeterminate: the coefficient of the highest
    /// power of `Y^(order)` is 1. Nonzero constants count as monic only if
    /// equal to 1.
    pub fn is_monic(&self) -> bool {
        let r = self.order();
        if r < 0 {
            return self.as_constant().is_some_and(|c| c.is_one());
        }
        let r = r as usize;
        let d = self.degree_in(r);
        let lead: Vec<(&DiffMonomial, &FieldElement)> = self
            .terms
            .iter()
            .filter(|(m, _)| m.len() == r + 1 && m[r] == d)
            .collect();
        lead.len() == 1 && lead[0].0.iter().take(r).all(|&e| e == 0) && lead[0].1.is_one()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = &FieldElement> {
        self.terms.values()
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            let sum = match terms.get(m) {
                Some(d) => d.add(c),
                None => c.clone(),
            };
            if sum.is_zero() {
                terms.remove(m);
            } else {
                terms.insert(m.clone(), sum);
            }
        }
        DifferentialPolynomial { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let n = m1.len().max(m2.len());
                let m: DiffMonomial = (0..n)
                    .map(|i| m1.get(i).unwrap_or(&0) + m2.get(i).unwrap_or(&0))
                    .collect();
                out = out.add(&Self::term(m, c1.mul(c2)));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut out = Self::constant(FieldElement::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Applies `f` to every coefficient, dropping those that become zero.
    pub fn map_coeffs(&self, f: impl Fn(&FieldElement) -> FieldElement) -> Self {
        DifferentialPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    /// View as a univariate polynomial in `Y` over `Q(symbols)`; `None`
    /// unless the order is at most 0 and no coefficient involves a
    /// `v`-generator.
    pub fn to_unipoly(&self) -> Option<UniPoly> {
        if self.order() > 0 {
            return None;
        }
        let d = self.degree_in(0) as usize;
        let mut cs = vec![super::RatFunc::zero(); d + 1];
        for (m, c) in &self.terms {
            let i = m.first().copied().unwrap_or(0) as usize;
            cs[i] = c.to_ratfunc()?;
        }
        Some(UniPoly::new(cs))
    }
}

fn write_indeterminate(f: &mut fmt::Formatter<'_>, k: usize) -> fmt::Result {
    f.write_str("Y")?;
    for _ in 0..k {
        f.write_str("'")?;
    }
    Ok(())
}

/// Terms in decreasing monomial order (lexicographic on the exponent
/// vector read from the highest derivative down), each as
/// `(coeff)*Y^2*Y'`.
impl fmt::Display for DifferentialPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut keys: Vec<&DiffMonomial> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            b.len()
                .cmp(&a.len())
                .then_with(|| b.iter().rev().cmp(a.iter().rev()))
        });
        for (k, m) in keys.into_iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            let c = &self.terms[m];
            let bare = m.iter().any(|&e| e > 0) && c.is_one();
            if !bare {
                write!(f, "({c})")?;
            }
            let mut first = bare;
            for (i, &e) in m.iter().enumerate().rev() {
                if e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                write_indeterminate(f, i)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_and_monicity() {
        let y = DifferentialPolynomial::indeterminate(0);
        let a0 = DifferentialPolynomial::constant(FieldElement::a(0));
        let p = y.sub(&a0);
        assert_eq!(p.order(), 0);
        assert!(p.is_monic());
        assert_eq!(DifferentialPolynomial::constant(FieldElement::one()).order(), -1);
        let yp = DifferentialPolynomial::indeterminate(1);
        let q = yp.sub(&y.pow(3)).add(&y.pow(2));
        assert_eq!(q.order(), 1);
        assert!(q.is_monic());
        assert!(!y.add(&y).is_monic());
        assert_eq!(p.to_string(), "Y + (-a0)");
    }
}
