//! Discrete Hardy and Rellich inequalities on `Z^d`.
//!
//! * [`lattice`]: finitely supported lattice functions, difference operators and their forms.
//! * [`constants`]: closed-form torus constants and lattice bound brackets.
//! * [`torus`]: trigonometric polynomials on `(-π, π)^d`, weighted integrals, inequality checks.
//! * [`correspondence`]: the map from lattice functions to torus functions and its identities.
//! * [`estimator`]: variational estimates of the lattice sharp constants on finite boxes.
//! * [`cli`]: the `lattice-hardy` command-line front end.

pub mod cli;
pub mod constants;
pub mod correspondence;
pub mod error;
pub mod estimator;
pub mod index;
pub mod lattice;
pub mod torus;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use index::MultiIndex;
pub use lattice::LatticeFunction;

/// Which of the two lattice inequalities is meant.
///
/// `Hardy` of order `k`: `Σ|D Δ^k u|² >= C Σ|u|²/|n|^{4k+2}`.
/// `Rellich` of order `k`: `Σ|Δ^k u|² >= C Σ|u|²/|n|^{4k}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InequalityKind {
    Hardy,
    Rellich,
}

impl InequalityKind {
    /// Power of `Δ` whose restriction gives the quadratic form: `2k+1` or `2k`.
    pub fn operator_power(self, k: u32) -> u32 {
        match self {
            InequalityKind::Hardy => 2 * k + 1,
            InequalityKind::Rellich => 2 * k,
        }
    }

    /// Exponent `s` of the weight `|n|^{-s}`: `4k+2` or `4k`.
    pub fn weight_exponent(self, k: u32) -> u32 {
        2 * self.operator_power(k)
    }

    pub fn name(self) -> &'static str {
        match self {
            InequalityKind::Hardy => "hardy",
            InequalityKind::Rellich => "rellich",
        }
    }
}
