//! Exact arithmetic in the coding field: rational functions over the
//! transcendental symbols, adjoined square roots `v_e`, the derivation, and
//! the algebraicity predicates.

mod diffpoly;
mod element;
mod factor;
mod jacobian;
pub mod parse;
mod poly;
mod ratfunc;
mod symbol;
mod tower;

pub use diffpoly::DifferentialPolynomial;
pub use element::{relation_poly, FieldElement, VMonomial};
pub use factor::{factor_bounded, Factorization, UniPoly, DEFAULT_DEGREE_BOUND};
pub use jacobian::{is_b, jacobian_trdeg, rank};
pub use poly::{gcd, IntPoly, Monomial};
pub use ratfunc::RatFunc;
pub use symbol::{EdgeId, Symbol};
pub use tower::Tower;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("context mismatch: {0}")]
    ContextMismatch(String),
    #[error("degree {degree} exceeds bound {bound}")]
    DegreeBound { degree: u32, bound: u32 },
    #[error("polynomial is too large to factor")]
    TooLarge,
    #[error("{0}")]
    Malformed(String),
}
