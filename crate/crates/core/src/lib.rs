//! Exact q-series for `sl_r` invariants of torus knots coloured by
//! `L_r(n Lambda_1)` and for characters of the principal W-algebras
//! `W_r(p, p')`.
//!
//! * [`lattice`]: root data, Weyl group, weight enumeration, coset balls.
//! * [`qseries`]: truncated series with rational exponents and exact coefficients.
//! * [`invariants`]: the plethysm (Rosso–Jones) route and the closed lattice-sum route.
//! * [`wchars`]: shifted characters, limits and the `p < r` conjectural limit.
//! * [`verify`]: executable identity checks producing [`verify::CheckReport`]s.
//! * [`cli`]: the `qinv` command-line front end.

pub mod cli;
pub mod error;
pub mod invariants;
pub mod lattice;
pub mod qseries;
pub mod verify;
pub mod wchars;

pub use error::{Error, Result};
pub use lattice::{Permutation, Reduction, RootSystem, WeightVector};
pub use qseries::{Agreement, QSeries};

/// Exact rational used for weight coordinates and series exponents.
pub type Q = num_rational::Rational64;

/// Arbitrary-precision rational used for series coefficients.
pub type Coeff = num_rational::BigRational;

/// Checks that `p` and `p'` are positive and coprime.
pub fn check_coprime(p: u64, pp: u64) -> Result<()> {
    if p == 0 || pp == 0 {
        return Err(Error::NonPositiveParameter { p, pp });
    }
    if num_integer::gcd(p, pp) != 1 {
        return Err(Error::NotCoprime { p, pp });
    }
    Ok(())
}
