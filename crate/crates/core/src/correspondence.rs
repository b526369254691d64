//! Torus functions attached to lattice functions.
//!
//! With `û(x) = Σ_n u(n) e^{-i n·x}` the lattice Laplacian becomes multiplication by `4ω`.
//! For `q = 2k+1` (hardy) or `q = 2k` (rellich) the polynomial
//! `ψ(x) = (2π)^{-d/2} Σ_n i^q u(n) |n|^{-2q} e^{-i n·x}`
//! satisfies `Δ^q ψ = (2π)^{-d/2} (-i)^q û`, which gives
//!
//! * `Σ |u(n)|² / |n|^{2q} = ∫ |∇Δ^k ψ|²` (hardy) or `∫ |Δ^k ψ|²` (rellich), and
//! * `Σ |D Δ^k u|² = 4^q ∫ |Δ^q ψ|² ω^q`, respectively `Σ |Δ^k u|² = 4^q ∫ |Δ^q ψ|² ω^q`.
//!
//! Both sides are finite sums, so the identities hold to rounding.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{norm_power, random_lattice_function, LatticeFunction};
use crate::torus::{weighted_form, Deriv, TrigPoly};
use crate::InequalityKind;

/// Inequality kind and order: `Δ^k` with one more difference for hardy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceKind {
    pub kind: InequalityKind,
    pub k: u32,
}

impl CorrespondenceKind {
    pub fn new(kind: InequalityKind, k: u32) -> Self {
        CorrespondenceKind { kind, k }
    }

    fn q(self) -> u32 {
        self.kind.operator_power(self.k)
    }

    /// Derivative of `ψ` whose plain `L²` norm matches the weighted lattice norm.
    fn norm_deriv(self) -> Deriv {
        match self.kind {
            InequalityKind::Hardy => Deriv::GradLaplacian(self.k),
            InequalityKind::Rellich => Deriv::Laplacian(self.k),
        }
    }
}

/// `û` as a trigonometric polynomial: coefficient `u(n)` at frequency `-n`.
pub fn lattice_fourier(u: &LatticeFunction) -> TrigPoly {
    TrigPoly::from_coeffs(
        u.dim(),
        u.entries()
            .into_iter()
            .map(|(n, v)| (n.neg(), Complex64::new(v, 0.0))),
        true,
    )
}

/// The torus function `ψ` of the module docs; requires `u(0) = 0`.
pub fn build_psi(u: &LatticeFunction, kind: CorrespondenceKind) -> Result<TrigPoly> {
    let dim = u.dim();
    if u.get(&crate::MultiIndex::origin(dim)) != 0.0 {
        return Err(Error::Precondition("u(0) must vanish".into()));
    }
    let q = kind.q();
    let phase = Complex64::i().powu(q);
    let norm = (2.0 * std::f64::consts::PI).powf(-(dim as f64) / 2.0);
    let coeffs = u.entries().into_iter().map(|(n, v)| {
        let c = phase * (norm * v / norm_power(n, 2 * q));
        (n.neg(), c)
    });
    // Hermitian symmetry holds when i^q is real, i.e. for even q
    Ok(TrigPoly::from_coeffs(dim, coeffs, q % 2 == 0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity: String,
    pub kind: InequalityKind,
    pub k: u32,
    pub dim: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

fn report(identity: &str, kind: CorrespondenceKind, dim: usize, lhs: f64, rhs: f64) -> IdentityReport {
    let scale = lhs.abs().max(rhs.abs());
    IdentityReport {
        identity: identity.into(),
        kind: kind.kind,
        k: kind.k,
        dim,
        lhs,
        rhs,
        rel_err: if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale },
    }
}

/// `Σ |u(n)|²/|n|^{2q}` against the unweighted torus norm of the matching derivative of `ψ`.
pub fn verify_identity_lhs_rhs(u: &LatticeFunction, kind: CorrespondenceKind) -> Result<IdentityReport> {
    let psi = build_psi(u, kind)?;
    let lhs = u.weighted_norm_sq(2 * kind.q())?;
    let rhs = weighted_form(&psi, kind.norm_deriv(), 0);
    Ok(report("weighted-norm", kind, u.dim(), lhs, rhs))
}

/// The lattice energy against `4^q ∫ |Δ^q ψ|² ω^q`.
pub fn verify_identity_forms(u: &LatticeFunction, kind: CorrespondenceKind) -> Result<IdentityReport> {
    let psi = build_psi(u, kind)?;
    let q = kind.q();
    let lhs = match kind.kind {
        InequalityKind::Hardy => u.dirichlet_form(kind.k),
        InequalityKind::Rellich => u.rellich_form(kind.k),
    };
    let rhs = 4f64.powi(q as i32) * weighted_form(&psi, Deriv::Laplacian(q), q);
    Ok(report("energy", kind, u.dim(), lhs, rhs))
}

/// Both identities for one lattice function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub seed: u64,
    pub weighted_norm: IdentityReport,
    pub energy: IdentityReport,
}

impl CorrespondenceReport {
    pub fn max_rel_err(&self) -> f64 {
        self.weighted_norm.rel_err.max(self.energy.rel_err)
    }
}

/// Checks both identities on `random_lattice_function(dim, radius, seed + i, true)`.
pub fn verify_correspondence_batch(
    dim: usize,
    kind: CorrespondenceKind,
    batch: usize,
    seed: u64,
    radius: u32,
) -> Result<Vec<CorrespondenceReport>> {
    (0..batch)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i as u64);
            let u = random_lattice_function(dim, radius, s, true);
            Ok(CorrespondenceReport {
                seed: s,
                weighted_norm: verify_identity_lhs_rhs(&u, kind)?,
                energy: verify_identity_forms(&u, kind)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::MultiIndex;

    const HARDY0: CorrespondenceKind = CorrespondenceKind { kind: InequalityKind::Hardy, k: 0 };

    #[test]
    fn single_mode() {
        let e1 = MultiIndex::unit(3, 0);
        let u = LatticeFunction::delta(e1.clone());
        let psi = build_psi(&u, HARDY0).unwrap();
        assert_eq!(psi.len(), 1);
        let c = psi.coeff(&e1.neg());
        assert!((c.norm() - (2.0 * std::f64::consts::PI).powf(-1.5)).abs() < 1e-16);
        let r = verify_identity_lhs_rhs(&u, HARDY0).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!((r.rhs - 1.0).abs() < 1e-14);
        let r = verify_identity_forms(&u, HARDY0).unwrap();
        assert_eq!(r.lhs, 6.0);
        assert!((r.rhs - 6.0).abs() < 1e-13);
        // 4·∫|Δψ|² ω = 6 directly
        assert!((4.0 * weighted_form(&psi, Deriv::Laplacian(1), 1) - 6.0).abs() < 1e-13);
    }

    #[test]
    fn rellich_single_mode() {
        let u = LatticeFunction::delta(MultiIndex::from([2, 0, 0]));
        let kind = CorrespondenceKind::new(InequalityKind::Rellich, 1);
        let r = verify_identity_lhs_rhs(&u, kind).unwrap();
        assert_eq!(r.lhs, 1.0 / 16.0);
        assert!(r.rel_err < 1e-14);
    }

    #[test]
    fn zero_and_precondition() {
        let z = LatticeFunction::zero(2);
        assert!(build_psi(&z, HARDY0).unwrap().is_zero());
        let r = verify_identity_forms(&z, HARDY0).unwrap();
        assert_eq!((r.lhs, r.rhs, r.rel_err), (0.0, 0.0, 0.0));
        let bad = LatticeFunction::delta(MultiIndex::origin(2));
        assert!(matches!(build_psi(&bad, HARDY0), Err(Error::Precondition(_))));
    }

    #[test]
    fn support_and_average() {
        let u = random_lattice_function(3, 2, 9, true);
        let psi = build_psi(&u, HARDY0).unwrap();
        assert!(psi.has_zero_average());
        assert_eq!(psi.len(), u.len());
        for (n, _) in u.entries() {
            assert!(psi.coeff(&n.neg()).norm() > 0.0);
        }
    }

    #[test]
    fn laplacian_symbol() {
        for dim in 1..=4 {
            let u = random_lattice_function(dim, 2, 100 + dim as u64, false);
            let lhs = lattice_fourier(&u.laplacian());
            let rhs = lattice_fourier(&u).multiply_by_omega().scaled(Complex64::new(4.0, 0.0));
            let support: std::collections::BTreeSet<MultiIndex> =
                lhs.entries().iter().chain(rhs.entries().iter()).map(|e| e.0.clone()).collect();
            for n in support {
                assert!((lhs.coeff(&n) - rhs.coeff(&n)).norm() < 1e-13, "d={dim} n={n}");
            }
        }
    }

    #[test]
    fn random_batches() {
        for kind in [InequalityKind::Hardy, InequalityKind::Rellich] {
            for k in 0..=2 {
                let ck = CorrespondenceKind::new(kind, k);
                for r in verify_correspondence_batch(3, ck, 5, 1, 2).unwrap() {
                    assert!(r.max_rel_err() < 1e-12, "{r:?}");
                }
            }
        }
    }
}
