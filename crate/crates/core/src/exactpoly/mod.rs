//! Exact sparse polynomials on the ambient phase space `R^{2(n+1)}` with the
//! canonical Poisson bracket.

mod poly;
mod rational;
mod serial;

pub use poly::{arith, ArithOp, CompiledGradient, CompiledPoly, LinearSubstitution, Monomial, PhasePoly, Var};
pub use rational::{format_rational, frac, int, parse_rational, parse_rational_list, serde_rational_vec, to_f64, Rational};
pub use serial::{poly_from_json, poly_to_json, PolyJson, TermJson, MAX_EXPONENT, MAX_SPHERE_DIM};

/// `sum_i X_i^2`.
pub fn radius_squared(n: usize) -> PhasePoly {
    (0..=n).fold(PhasePoly::zero(n), |acc, i| {
        let x = PhasePoly::x(n, i);
        acc + &x * &x
    })
}

/// `sum_i X_i P_i`.
pub fn radial_momentum(n: usize) -> PhasePoly {
    (0..=n).fold(PhasePoly::zero(n), |acc, i| acc + &PhasePoly::x(n, i) * &PhasePoly::p(n, i))
}
