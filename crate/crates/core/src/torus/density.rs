use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use super::fft::fft_cube;
use super::poly::TrigPoly;

/// Dense Fourier coefficients of a trigonometric polynomial `P(x) = Σ_m a_m e^{i m·x}`
/// on the cube `[-radius, radius]^dim`, row-major with the first axis slowest.
///
/// Used for integrands such as `Σ_c |g_c|²` multiplied by smooth trigonometric weights.
#[derive(Clone, Debug)]
pub struct Density {
    dim: usize,
    radius: usize,
    data: Vec<Complex64>,
}

impl Density {
    pub fn zero(dim: usize, radius: usize) -> Self {
        let side = 2 * radius + 1;
        Density {
            dim,
            radius,
            data: vec![Complex64::default(); side.pow(dim as u32)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    fn stride(&self, axis: usize) -> usize {
        self.side().pow((self.dim - 1 - axis) as u32)
    }

    fn index(&self, m: &[i32]) -> Option<usize> {
        let r = self.radius as i64;
        let mut idx = 0usize;
        for &c in m {
            let c = i64::from(c);
            if c.abs() > r {
                return None;
            }
            idx = idx * self.side() + (c + r) as usize;
        }
        Some(idx)
    }

    fn coords(&self, mut idx: usize) -> Vec<i32> {
        let side = self.side();
        let mut out = vec![0i32; self.dim];
        for slot in out.iter_mut().rev() {
            *slot = (idx % side) as i32 - self.radius as i32;
            idx /= side;
        }
        out
    }

    pub fn coeff(&self, m: &[i32]) -> Complex64 {
        self.index(m).map(|i| self.data[i]).unwrap_or_default()
    }

    /// Dense copy of a polynomial's coefficients.
    pub fn from_poly(p: &TrigPoly) -> Self {
        let mut out = Density::zero(p.dim(), p.degree() as usize);
        for (n, c) in p.entries() {
            let i = out.index(n.coords()).expect("inside degree box");
            out.data[i] += c;
        }
        out
    }

    /// Coefficients of `Σ_c |g_c(x)|²`, computed as a cyclic autocorrelation by FFT.
    pub fn sum_of_squares(dim: usize, components: &[TrigPoly]) -> Self {
        let r = components.iter().map(|g| g.degree() as usize).max().unwrap_or(0);
        let side = 4 * r + 1;
        let total = side.pow(dim as u32);
        let mut power = vec![0.0f64; total];
        let mut buf = vec![Complex64::default(); total];
        for g in components {
            assert_eq!(g.dim(), dim);
            if g.is_zero() {
                continue;
            }
            buf.iter_mut().for_each(|v| *v = Complex64::default());
            for (n, c) in g.entries() {
                let mut idx = 0usize;
                for &k in n.coords() {
                    idx = idx * side + (k.rem_euclid(side as i32)) as usize;
                }
                buf[idx] += c;
            }
            fft_cube(&mut buf, dim, side, FftDirection::Forward);
            for (p, v) in power.iter_mut().zip(&buf) {
                *p += v.norm_sqr();
            }
        }
        let mut spec: Vec<Complex64> = power.into_iter().map(|p| Complex64::new(p, 0.0)).collect();
        fft_cube(&mut spec, dim, side, FftDirection::Inverse);
        let scale = 1.0 / total as f64;
        // |G(ξ)|² transformed back gives Σ_n conj(c_n) c_{n+m} at cyclic lag m.
        // Its Fourier coefficient at frequency m of |g|² is Σ_n c_{n+m} conj(c_n).
        let mut out = Density::zero(dim, 2 * r);
        for i in 0..out.data.len() {
            let m = out.coords(i);
            let mut idx = 0usize;
            for &k in &m {
                idx = idx * side + (k.rem_euclid(side as i32)) as usize;
            }
            out.data[i] = spec[idx] * scale;
        }
        out
    }

    /// Same coefficients on a larger cube.
    pub fn grown(&self, radius: usize) -> Self {
        assert!(radius >= self.radius);
        if radius == self.radius {
            return self.clone();
        }
        let mut out = Density::zero(self.dim, radius);
        for (i, v) in self.data.iter().enumerate() {
            if *v != Complex64::default() {
                let j = out.index(&self.coords(i)).expect("inside");
                out.data[j] = *v;
            }
        }
        out
    }

    /// Multiplication by a one-dimensional trigonometric factor along `axis`,
    /// given as taps `(shift, weight)` of an even stencil.
    fn axis_stencil(&self, axis: usize, taps: &[(i32, f64)]) -> Self {
        let reach = taps.iter().map(|t| t.0.unsigned_abs() as usize).max().unwrap_or(0);
        let src = self.grown(self.radius + reach);
        let mut out = Density::zero(self.dim, src.radius);
        let side = src.side() as i64;
        let stride = src.stride(axis) as i64;
        for (i, v) in src.data.iter().enumerate() {
            if *v == Complex64::default() {
                continue;
            }
            let pos = (i as i64 / stride) % side;
            for &(shift, w) in taps {
                let p = pos + i64::from(shift);
                if (0..side).contains(&p) {
                    out.data[(i as i64 + i64::from(shift) * stride) as usize] += v * w;
                }
            }
        }
        out
    }

    /// Times `sin²(x_axis/2) = ½ - ¼(e^{ix} + e^{-ix})`.
    pub fn times_axis_sin2(&self, axis: usize) -> Self {
        self.axis_stencil(axis, &[(0, 0.5), (1, -0.25), (-1, -0.25)])
    }

    /// Times `sin⁴(x_axis/2) = 3/8 - ¼·2cos x/2 + (1/16)·2cos 2x/2`.
    pub fn times_axis_sin4(&self, axis: usize) -> Self {
        self.axis_stencil(
            axis,
            &[(0, 0.375), (1, -0.25), (-1, -0.25), (2, 0.0625), (-2, 0.0625)],
        )
    }

    /// Times `ω(x) = Σ_j sin²(x_j/2)`.
    pub fn times_omega(&self) -> Self {
        let mut acc = Density::zero(self.dim, self.radius + 1);
        for axis in 0..self.dim {
            acc.add_assign(&self.times_axis_sin2(axis), 1.0);
        }
        acc
    }

    /// Times `Σ_j sin⁴(x_j/2)`.
    pub fn times_s4(&self) -> Self {
        let mut acc = Density::zero(self.dim, self.radius + 2);
        for axis in 0..self.dim {
            acc.add_assign(&self.times_axis_sin4(axis), 1.0);
        }
        acc
    }

    /// `self += factor·other`, growing as needed.
    pub fn add_assign(&mut self, other: &Density, factor: f64) {
        assert_eq!(self.dim, other.dim);
        if other.radius > self.radius {
            *self = self.grown(other.radius);
        }
        let o = if other.radius < self.radius {
            other.grown(self.radius)
        } else {
            other.clone()
        };
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += b * factor;
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Density {
            dim: self.dim,
            radius: self.radius,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != Complex64::default())
            .map(|(i, v)| {
                let m = self.coords(i);
                let phase: f64 = m.iter().zip(x).map(|(&k, &t)| f64::from(k) * t).sum();
                v * Complex64::from_polar(1.0, phase)
            })
            .sum()
    }

    /// `∫_{Q_d} P(x) ω(x)^p dx` for `p ≥ 0`, exact: `(2π)^d` times the mean of `P ω^p`.
    pub fn integral_with_omega_power(&self, p: u32) -> f64 {
        let w = (0..p).fold(self.clone(), |acc, _| acc.times_omega());
        let zero = vec![0i32; self.dim];
        w.coeff(&zero).re * (2.0 * PI).powi(self.dim as i32)
    }

    /// Real coefficients summed over sign patterns: entry `|m|` holds `Σ_{±} Re a_{(±m_1, …)}`.
    ///
    /// Valid for integration against even, real kernels of product form.
    pub fn folded_real(&self) -> Folded {
        let r = self.radius;
        let side = r + 1;
        let mut data = vec![0.0f64; side.pow(self.dim as u32)];
        for (i, v) in self.data.iter().enumerate() {
            if v.re == 0.0 {
                continue;
            }
            let mut idx = 0usize;
            for k in self.coords(i) {
                idx = idx * side + k.unsigned_abs() as usize;
            }
            data[idx] += v.re;
        }
        Folded {
            dim: self.dim,
            radius: r,
            data,
        }
    }

    /// Largest coefficient modulus, a scale for tolerances.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Sign-folded real coefficients on `[0, radius]^dim`.
#[derive(Clone, Debug)]
pub struct Folded {
    pub dim: usize,
    pub radius: usize,
    pub data: Vec<f64>,
}

impl Folded {
    /// `Σ_m a_m Π_j f_j(m_j)` for per-axis tables `table[m]`, same table on every axis.
    pub fn contract(&self, table: &[f64]) -> f64 {
        contract_axes(&self.data, self.dim, self.radius + 1, table)
    }
}

/// Contracts a row-major cube of side `side` with the same vector on every axis,
/// last axis first.
pub(crate) fn contract_axes(data: &[f64], dim: usize, side: usize, table: &[f64]) -> f64 {
    let mut cur = data.to_vec();
    for _ in 0..dim {
        cur = cur
            .chunks_exact(side)
            .map(|row| row.iter().zip(table).map(|(a, b)| a * b).sum())
            .collect();
    }
    cur[0]
}
