//! Multivariate polynomials over `Q` or a number field, reduced Gröbner
//! bases, and the ideal operations built on elimination.

mod groebner;
mod ops;
mod parse;
mod poly;

pub use groebner::{set_step_budget, step_budget, PolyIdeal};
pub use ops::{binomial, identity_ideal, lattice_ideal, matrix_ring, point_ideal};
pub use parse::{parse_poly, parse_poly_with};
pub use poly::{MPoly, Mono, MonoOrder, Ring};

#[cfg(test)]
mod tests;
