use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::index::{cube_points, MultiIndex};

/// Which derivative of `ψ` enters a weighted integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Deriv {
    /// `ψ` itself.
    None,
    /// `∇ψ`, integrated as `Σ_j |∂_j ψ|²`.
    Gradient,
    /// `Δ^m ψ` (continuum Laplacian, symbol `-|n|²`).
    Laplacian(u32),
    /// `∇(Δ^m ψ)`.
    GradLaplacian(u32),
}

impl Deriv {
    fn normalized(self) -> (bool, u32) {
        match self {
            Deriv::None => (false, 0),
            Deriv::Gradient => (true, 0),
            Deriv::Laplacian(m) => (false, m),
            Deriv::GradLaplacian(m) => (true, m),
        }
    }
}

/// Trigonometric polynomial `ψ(x) = Σ_n c_n e^{i n·x}` on `(-π, π)^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    coeffs: HashMap<MultiIndex, Complex64>,
    real_valued: bool,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1, "torus dimension must be positive");
        TrigPoly {
            dim,
            coeffs: HashMap::new(),
            real_valued: true,
        }
    }

    /// Builds a polynomial from coefficients; `real_valued` records whether the
    /// caller guarantees `c_{-n} = conj(c_n)`.
    pub fn from_coeffs(
        dim: usize,
        coeffs: impl IntoIterator<Item = (MultiIndex, Complex64)>,
        real_valued: bool,
    ) -> Self {
        let mut p = Self::zero(dim);
        p.real_valued = real_valued;
        for (n, c) in coeffs {
            assert_eq!(n.dim(), dim, "frequency dimension mismatch");
            *p.coeffs.entry(n).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        p.prune()
    }

    /// The constant function 1.
    pub fn one(dim: usize) -> Self {
        Self::from_coeffs(dim, [(MultiIndex::origin(dim), Complex64::new(1.0, 0.0))], true)
    }

    /// `e^{i n·x}`.
    pub fn mode(n: MultiIndex) -> Self {
        let dim = n.dim();
        Self::from_coeffs(dim, [(n, Complex64::new(1.0, 0.0))], false)
    }

    /// `cos(n·x)`.
    pub fn cosine(n: MultiIndex) -> Self {
        let dim = n.dim();
        let half = Complex64::new(0.5, 0.0);
        Self::from_coeffs(dim, [(n.neg(), half), (n, half)], true)
    }

    fn prune(mut self) -> Self {
        self.coeffs.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_real_valued(&self) -> bool {
        self.real_valued
    }

    pub fn coeff(&self, n: &MultiIndex) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Coefficients in lexicographic frequency order.
    pub fn entries(&self) -> Vec<(&MultiIndex, Complex64)> {
        let mut e: Vec<_> = self.coeffs.iter().map(|(n, &c)| (n, c)).collect();
        e.sort_unstable_by(|a, b| a.0.cmp(b.0));
        e
    }

    /// True when the zero frequency is absent.
    pub fn has_zero_average(&self) -> bool {
        !self.coeffs.contains_key(&MultiIndex::origin(self.dim))
    }

    /// Largest `ℓ∞` norm of a frequency in the support.
    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::linf_norm).max().unwrap_or(0)
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        assert_eq!(x.len(), self.dim);
        self.entries()
            .into_iter()
            .map(|(n, c)| {
                let phase: f64 = n.coords().iter().zip(x).map(|(&k, &xi)| f64::from(k) * xi).sum();
                c * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    fn map_coeffs(&self, f: impl Fn(&MultiIndex, Complex64) -> Complex64, real: bool) -> Self {
        TrigPoly {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(n, &c)| (n.clone(), f(n, c))).collect(),
            real_valued: real,
        }
        .prune()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        self.map_coeffs(|_, c| c * factor, self.real_valued && factor.im == 0.0)
    }

    /// Multiplication by `ω(x) = Σ_j sin²(x_j/2) = d/2 - ½ Σ_j cos x_j`:
    /// the new coefficient at `n` is `(d/2) c_n - ¼ Σ_j (c_{n-e_j} + c_{n+e_j})`.
    pub fn multiply_by_omega(&self) -> Self {
        let half_d = self.dim as f64 / 2.0;
        let mut out: HashMap<MultiIndex, Complex64> = HashMap::new();
        for (n, c) in self.entries() {
            *out.entry(n.clone()).or_default() += c * half_d;
            for axis in 0..self.dim {
                *out.entry(n.shifted(axis, 1)).or_default() -= c * 0.25;
                *out.entry(n.shifted(axis, -1)).or_default() -= c * 0.25;
            }
        }
        TrigPoly {
            dim: self.dim,
            coeffs: out,
            real_valued: self.real_valued,
        }
        .prune()
    }

    pub fn multiply_by_omega_power(&self, p: u32) -> Self {
        (0..p).fold(self.clone(), |acc, _| acc.multiply_by_omega())
    }

    /// `∂_{x_axis} ψ`: multiplier `i n_axis`.
    pub fn partial(&self, axis: usize) -> Self {
        assert!(axis < self.dim);
        self.map_coeffs(
            |n, c| c * Complex64::new(0.0, f64::from(n.coords()[axis])),
            self.real_valued,
        )
    }

    /// `Δ^m ψ`: multiplier `(-|n|²)^m`.
    pub fn laplacian_power(&self, m: u32) -> Self {
        if m == 0 {
            return self.clone();
        }
        self.map_coeffs(
            |n, c| c * (-(n.norm_sq() as f64)).powi(m as i32),
            self.real_valued,
        )
    }

    /// Components of the derivative: one polynomial for `Δ^m`, `d` for gradients.
    pub fn derivative_components(&self, deriv: Deriv) -> Vec<TrigPoly> {
        let (gradient, m) = deriv.normalized();
        let base = self.laplacian_power(m);
        if gradient {
            (0..self.dim).map(|axis| base.partial(axis)).collect()
        } else {
            vec![base]
        }
    }

    /// `(2π)^d Σ_n conj(a_n) b_n`, the `L²(Q_d)` inner product.
    pub fn inner(&self, other: &TrigPoly) -> Complex64 {
        let vol = (2.0 * PI).powi(self.dim as i32);
        let sum: Complex64 = self
            .entries()
            .into_iter()
            .map(|(n, a)| a.conj() * other.coeff(n))
            .sum();
        sum * vol
    }
}

/// `∫_{Q_d} |(deriv ψ)(x)|² ω(x)^p dx`, exact in coefficient space.
///
/// Half of the weight is applied to each factor before the Parseval contraction.
pub fn weighted_form(psi: &TrigPoly, deriv: Deriv, p: u32) -> f64 {
    let low = p / 2;
    psi.derivative_components(deriv)
        .iter()
        .map(|g| {
            let h1 = g.multiply_by_omega_power(low);
            let h2 = if p % 2 == 0 { h1.clone() } else { h1.multiply_by_omega() };
            h1.inner(&h2).re
        })
        .sum()
}

/// Random polynomial with coefficients uniform in `[-1,1] + i[-1,1]` on all
/// frequencies of `ℓ∞` norm at most `radius`, deterministic in `seed`.
pub fn random_trig_poly(
    dim: usize,
    radius: u32,
    seed: u64,
    zero_average: bool,
    real_valued: bool,
) -> TrigPoly {
    assert!(radius >= 1, "support radius must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = cube_points(dim, radius);
    let mut coeffs: HashMap<MultiIndex, Complex64> = points
        .into_iter()
        .map(|n| {
            let c = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            (n, c)
        })
        .collect();
    if real_valued {
        let mut keys: Vec<MultiIndex> = coeffs.keys().cloned().collect();
        keys.sort_unstable();
        for n in keys {
            let neg = n.neg();
            if n == neg {
                coeffs.get_mut(&n).expect("present").im = 0.0;
            } else if n > neg {
                let c = coeffs[&n];
                coeffs.insert(neg, c.conj());
            }
        }
    }
    if zero_average {
        coeffs.remove(&MultiIndex::origin(dim));
    }
    TrigPoly {
        dim,
        coeffs,
        real_valued,
    }
    .prune()
}
