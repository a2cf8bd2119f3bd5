//! Text grammar for field elements and differential polynomials.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/")? unary)*        juxtaposition multiplies
//! unary  := "-" unary | power
//! power  := atom ("^" "-"? int)?
//! atom   := int | "a" int | "u[" int "," int (";" int)? "]"
//!         | "v[" int "," int "]" | "Y" "'"* | "(" expr ")"
//! ```
//!
//! The canonical renderings of [`FieldElement`] and
//! [`DifferentialPolynomial`] are accepted by this grammar.

use num_bigint::BigInt;

use super::diffpoly::DifferentialPolynomial;
use super::element::FieldElement;
use super::ratfunc::RatFunc;
use super::symbol::EdgeId;
use super::ExactError;

pub fn parse_element(s: &str) -> Result<FieldElement, ExactError> {
    let p = parse_diffpoly(s)?;
    p.as_constant()
        .ok_or_else(|| ExactError::Malformed(format!("`{s}` mentions Y; expected a field element")))
}

pub fn parse_diffpoly(s: &str) -> Result<DifferentialPolynomial, ExactError> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
    };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

type D = DifferentialPolynomial;

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExactError {
        ExactError::Malformed(format!("column {}: {msg}", self.pos + 1))
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExactError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn int(&mut self) -> Result<BigInt, ExactError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn small(&mut self) -> Result<u32, ExactError> {
        let n = self.int()?;
        u32::try_from(n).map_err(|_| self.error("index too large"))
    }

    fn edge(&mut self) -> Result<EdgeId, ExactError> {
        let m = self.small()?;
        self.expect(b',')?;
        let n = self.small()?;
        EdgeId::new(m, n).ok_or_else(|| self.error("edge endpoints must differ"))
    }

    fn expr(&mut self) -> Result<D, ExactError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<D, ExactError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let d = self.unary()?;
                    let c = d
                        .as_constant()
                        .filter(|c| !c.is_zero())
                        .ok_or_else(|| {
                            ExactError::Malformed(format!(
                                "column {}: divisor must be a nonzero field element",
                                at + 1
                            ))
                        })?;
                    acc = acc.mul(&D::constant(c.inv()?));
                }
                Some(c) if c.is_ascii_digit() || matches!(c, b'a' | b'u' | b'v' | b'Y' | b'(') => {
                    acc = acc.mul(&self.unary()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<D, ExactError> {
        if self.eat(b'-') {
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<D, ExactError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let neg = self.eat(b'-');
        let e = self.small()?;
        if e > 64 {
            return Err(self.error("exponent too large"));
        }
        if !neg {
            return Ok(base.pow(e));
        }
        let c = base
            .as_constant()
            .ok_or_else(|| self.error("negative power of a non-constant"))?;
        Ok(D::constant(c.pow(-(e as i64))?))
    }

    fn atom(&mut self) -> Result<D, ExactError> {
        let Some(c) = self.peek() else {
            return Err(self.error("unexpected end of input"));
        };
        match c {
            b'0'..=b'9' => {
                let n = self.int()?;
                Ok(D::constant(FieldElement::from_ratfunc(RatFunc::from_ratio(
                    n,
                    BigInt::from(1),
                ))))
            }
            b'a' => {
                self.pos += 1;
                Ok(D::constant(FieldElement::a(self.small()?)))
            }
            b'u' => {
                self.pos += 1;
                self.expect(b'[')?;
                let e = self.edge()?;
                let order = if self.eat(b';') { self.small()? } else { 0 };
                self.expect(b']')?;
                Ok(D::constant(FieldElement::u_derivative(e, order)))
            }
            b'v' => {
                self.pos += 1;
                self.expect(b'[')?;
                let e = self.edge()?;
                self.expect(b']')?;
                Ok(D::constant(FieldElement::v(e)))
            }
            b'Y' => {
                self.pos += 1;
                let mut k = 0;
                while self.src.get(self.pos) == Some(&b'\'') {
                    self.pos += 1;
                    k += 1;
                }
                Ok(D::indeterminate(k))
            }
            b'(' => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            _ => Err(self.error(&format!("unexpected `{}`", c as char))),
        }
    }
}
