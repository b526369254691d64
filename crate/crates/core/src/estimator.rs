//! Box estimates of the lattice sharp constants.
//!
//! On the trial space `S = {n : ‖n‖∞ <= R, n ≠ 0}` the sharp constant restricted to `S` is the
//! smallest eigenvalue of the pencil `(A, W)`, with `A` the Dirichlet restriction of `Δ^q`
//! (`q = 2k+1` for hardy, `2k` for rellich) and `W = diag |n|^{-2q}`. Restricting the trial
//! space can only raise the infimum, so every estimate is an upper bound on the true constant.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{discrete_bound_bracket, BoundBracket};
use crate::error::{Error, Result};
use crate::index::MultiIndex;
use crate::lattice::{norm_power, unit_shell_indicator, LatticeFunction};
use crate::InequalityKind;

/// Default cap on `|S|`.
pub const DEFAULT_BASIS_BUDGET: u128 = 5_000_000;

/// Environment variable overriding [`DEFAULT_BASIS_BUDGET`].
pub const BUDGET_ENV: &str = "LATTICE_HARDY_BUDGET";

/// Basis-size cap from the environment, falling back to the default.
pub fn basis_budget() -> Result<u128> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Argument(format!("{BUDGET_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BASIS_BUDGET),
    }
}

/// The truncated trial space: the `ℓ∞` ball of radius `radius` without the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub dim: usize,
    pub radius: u32,
}

impl BoxSpec {
    pub fn new(dim: usize, radius: u32) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("dimension must be positive".into()));
        }
        if radius == 0 {
            return Err(Error::Argument("box radius must be at least 1".into()));
        }
        Ok(BoxSpec { dim, radius })
    }

    /// `(2R+1)^d - 1`.
    pub fn basis_size(&self) -> u128 {
        (2 * u128::from(self.radius) + 1).pow(self.dim as u32) - 1
    }
}

/// Dense row-major cube of radius `radius`, with axis `order[0]` slowest.
#[derive(Clone, Debug)]
struct Cube {
    dim: usize,
    radius: usize,
    /// stride of each axis
    strides: Vec<usize>,
}

impl Cube {
    fn new(dim: usize, radius: usize, order: &[usize]) -> Self {
        let side = 2 * radius + 1;
        let mut strides = vec![0; dim];
        let mut s = 1;
        for &axis in order.iter().rev() {
            strides[axis] = s;
            s *= side;
        }
        Cube { dim, radius, strides }
    }

    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    fn coords(&self, idx: usize) -> Vec<i32> {
        let side = self.side();
        self.strides
            .iter()
            .map(|&s| ((idx / s) % side) as i32 - self.radius as i32)
            .collect()
    }

    fn index(&self, coords: &[i32]) -> usize {
        coords
            .iter()
            .zip(&self.strides)
            .map(|(&c, &s)| (c + self.radius as i32) as usize * s)
            .sum()
    }
}

const CHUNK: usize = 1 << 14;

const START_SEED: u64 = 0x5eed;

/// Dot product with a fixed reduction tree.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let partial: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum())
        .collect();
    partial.iter().sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(ys, xs)| ys.iter_mut().zip(xs).for_each(|(p, q)| *p += a * q));
}

/// Matrix-free `A` for one box, order and kind.
pub struct BoxOperator {
    spec: BoxSpec,
    power: u32,
    inner: Cube,
    padded: Cube,
    /// padded index of each inner index
    embed: Vec<usize>,
    /// padded points at which the stencil is evaluated (all but the outer layer)
    interior: Vec<bool>,
    weights: Vec<f64>,
    origin: usize,
}

impl BoxOperator {
    /// `axis_order` permutes the memory layout; the operator itself is unchanged.
    pub fn new(spec: BoxSpec, k: u32, kind: InequalityKind, axis_order: Option<&[usize]>) -> Result<Self> {
        let dim = spec.dim;
        let identity: Vec<usize> = (0..dim).collect();
        let order = axis_order.unwrap_or(&identity);
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != identity {
            return Err(Error::Argument(format!("{order:?} is not a permutation of 0..{dim}")));
        }
        let power = kind.operator_power(k);
        let r = spec.radius as usize;
        let inner = Cube::new(dim, r, order);
        // Δ^j u is exact on radius R + q - 1; one more zero layer keeps neighbours in bounds
        let pad = r + power.max(1) as usize;
        let padded = Cube::new(dim, pad, order);
        let embed: Vec<usize> = (0..inner.len())
            .map(|i| padded.index(&inner.coords(i)))
            .collect();
        let interior: Vec<bool> = (0..padded.len())
            .map(|i| padded.coords(i).iter().all(|c| c.unsigned_abs() as usize <= pad - 1))
            .collect();
        let s = kind.weight_exponent(k);
        let weights: Vec<f64> = (0..inner.len())
            .map(|i| {
                let n = MultiIndex::new(inner.coords(i));
                if n.is_origin() {
                    0.0
                } else {
                    1.0 / norm_power(&n, s)
                }
            })
            .collect();
        let origin = inner.index(&vec![0; dim]);
        Ok(BoxOperator {
            spec,
            power,
            inner,
            padded,
            embed,
            interior,
            weights,
            origin,
        })
    }

    pub fn len(&self) -> usize {
        self.inner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn laplacian_padded(&self, v: &[f64]) -> Vec<f64> {
        let two_d = 2.0 * self.spec.dim as f64;
        let mut out = vec![0.0; v.len()];
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
            for (o, slot) in chunk.iter_mut().enumerate() {
                let i = c * CHUNK + o;
                if !self.interior[i] {
                    continue;
                }
                let mut acc = two_d * v[i];
                for &s in &self.padded.strides {
                    acc -= v[i - s] + v[i + s];
                }
                *slot = acc;
            }
        });
        out
    }

    /// `A u`: extend by zero, apply `Δ^q`, restrict to `S`. The origin entry is ignored and
    /// returned as zero.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.len());
        let mut p = vec![0.0; self.padded.len()];
        for (i, &j) in self.embed.iter().enumerate() {
            if i != self.origin {
                p[j] = u[i];
            }
        }
        for _ in 0..self.power {
            p = self.laplacian_padded(&p);
        }
        let mut out: Vec<f64> = self.embed.iter().map(|&j| p[j]).collect();
        out[self.origin] = 0.0;
        out
    }

    /// Lattice function with the values of `v` on `S`.
    pub fn to_lattice(&self, v: &[f64]) -> LatticeFunction {
        let entries = (0..self.len())
            .filter(|&i| i != self.origin && v[i] != 0.0)
            .map(|i| (MultiIndex::new(self.inner.coords(i)), v[i]));
        LatticeFunction::from_entries(self.spec.dim, entries).expect("dimensions agree")
    }

    /// Values of `u` on `S` in this operator's layout.
    pub fn from_lattice(&self, u: &LatticeFunction) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                if i == self.origin {
                    0.0
                } else {
                    u.get(&MultiIndex::new(self.inner.coords(i)))
                }
            })
            .collect()
    }

    /// Conjugate gradients for `A x = b`, starting from `x`.
    fn solve(&self, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> Result<usize> {
        let ax = self.apply(x);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        r[self.origin] = 0.0;
        let b_norm = dot(b, b).sqrt();
        if b_norm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(0);
        }
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        for it in 0..max_iter {
            if rr.sqrt() <= rel_tol * b_norm {
                return Ok(it);
            }
            let ap = self.apply(&p);
            let alpha = rr / dot(&p, &ap);
            axpy(x, alpha, &p);
            axpy(&mut r, -alpha, &ap);
            let rr_new = dot(&r, &r);
            let beta = rr_new / rr;
            rr = rr_new;
            p.par_chunks_mut(CHUNK)
                .zip(r.par_chunks(CHUNK))
                .for_each(|(ps, rs)| ps.iter_mut().zip(rs).for_each(|(pv, rv)| *pv = rv + beta * *pv));
        }
        Err(Error::Convergence {
            iterations: max_iter,
            residual: rr.sqrt() / b_norm,
        })
    }
}

/// Solver settings.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateOptions {
    /// Outer tolerance on `‖Av - λWv‖ / ‖Wv‖`.
    pub tol: f64,
    pub inner_tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub budget: u128,
    pub axis_order: Option<Vec<usize>>,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        EstimateOptions {
            tol: 1e-8,
            inner_tol: 1e-10,
            max_outer: 500,
            max_inner: 20_000,
            budget: DEFAULT_BASIS_BUDGET,
            axis_order: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub value: f64,
    #[serde(rename = "box")]
    pub box_spec: BoxSpec,
    pub k: u32,
    pub kind: InequalityKind,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub residual: f64,
    /// Rayleigh quotient of the returned vector, computed from the lattice forms.
    pub quotient_check: f64,
    #[serde(skip)]
    pub vector: Option<LatticeFunction>,
}

/// Smallest eigenvalue of `(A, W)` on the box by inverse iteration with a three-term Rayleigh-Ritz step.
pub fn estimate_sharp_constant(
    k: u32,
    spec: BoxSpec,
    kind: InequalityKind,
    opts: &EstimateOptions,
) -> Result<EstimateResult> {
    if !(opts.tol > 0.0 && opts.inner_tol > 0.0) {
        return Err(Error::Argument("tolerances must be positive".into()));
    }
    let size = spec.basis_size();
    if size > opts.budget {
        return Err(Error::Resource {
            what: format!("box of radius {} in dimension {}", spec.radius, spec.dim),
            required: size,
            budget: opts.budget,
        });
    }
    let op = BoxOperator::new(spec, k, kind, opts.axis_order.as_deref())?;
    let w = op.weights().to_vec();
    let w_norm = |v: &[f64]| -> f64 {
        let wv: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a * b).collect();
        dot(v, &wv).sqrt()
    };
    // all ones plus a fixed perturbation: the constant vector alone can be orthogonal to the
    // ground state (it is for rellich k=1 in one dimension)
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(START_SEED);
    let mut v: Vec<f64> = w
        .iter()
        .map(|&x| {
            let jitter: f64 = rng.gen_range(-0.5..=0.5);
            if x > 0.0 {
                1.0 + jitter
            } else {
                0.0
            }
        })
        .collect();
    let n0 = w_norm(&v);
    v.iter_mut().for_each(|x| *x /= n0);

    let w_dot = |a: &[f64], b: &[f64]| -> f64 {
        let wb: Vec<f64> = b.iter().zip(&w).map(|(x, y)| x * y).collect();
        dot(a, &wb)
    };

    let mut lambda;
    let mut av = op.apply(&v);
    lambda = dot(&v, &av);
    let mut x: Vec<f64> = v.iter().map(|a| a / lambda).collect();
    let mut prev: Option<Vec<f64>> = None;
    let mut inner_total = 0;
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_outer {
        let wv: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a * b).collect();
        inner_total += op.solve(&wv, &mut x, opts.inner_tol, opts.max_inner)?;

        // Rayleigh-Ritz on span{A^{-1}Wv, v, v_prev}; plain inverse iteration stalls on
        // clustered low eigenvalues
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(3);
        for cand in [Some(&x), Some(&v), prev.as_ref()].into_iter().flatten() {
            let mut c = cand.clone();
            for _ in 0..2 {
                for b in &basis {
                    let h = w_dot(b, &c);
                    axpy(&mut c, -h, b);
                }
            }
            let n = w_dot(&c, &c).sqrt();
            if n > 1e-10 * w_dot(cand, cand).sqrt() {
                c.iter_mut().for_each(|a| *a /= n);
                basis.push(c);
            }
        }
        let images: Vec<Vec<f64>> = basis.iter().map(|b| op.apply(b)).collect();
        let m = basis.len();
        let proj = DMatrix::from_fn(m, m, |i, j| 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i])));
        let eig = SymmetricEigen::new(proj);
        let imin = eig.eigenvalues.imin();
        let coef = eig.eigenvectors.column(imin);
        let mut next = vec![0.0; v.len()];
        for (b, c) in basis.iter().zip(coef.iter()) {
            axpy(&mut next, *c, b);
        }
        let nn = w_dot(&next, &next).sqrt();
        next.iter_mut().for_each(|a| *a /= nn);
        prev = Some(std::mem::replace(&mut v, next));

        av = op.apply(&v);
        lambda = dot(&v, &av);
        let wv: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a * b).collect();
        let res: Vec<f64> = av.iter().zip(&wv).map(|(a, b)| a - lambda * b).collect();
        residual = dot(&res, &res).sqrt() / dot(&wv, &wv).sqrt();
        if residual <= opts.tol {
            let u = op.to_lattice(&v);
            let quotient_check = quotient(&u, k, kind)?;
            return Ok(EstimateResult {
                value: lambda,
                box_spec: spec,
                k,
                kind,
                iterations: it,
                inner_iterations: inner_total,
                residual,
                quotient_check,
                vector: Some(u),
            });
        }
        x = v.iter().map(|a| a / lambda).collect();
    }
    Err(Error::Convergence {
        iterations: opts.max_outer,
        residual,
    })
}

/// `Σ|DΔ^k u|² / Σ|u|²/|n|^{4k+2}` or `Σ|Δ^k u|² / Σ|u|²/|n|^{4k}` from the lattice forms.
pub fn quotient(u: &LatticeFunction, k: u32, kind: InequalityKind) -> Result<f64> {
    let num = match kind {
        InequalityKind::Hardy => u.dirichlet_form(k),
        InequalityKind::Rellich => u.rellich_form(k),
    };
    let den = u.weighted_norm_sq(kind.weight_exponent(k))?;
    if den == 0.0 {
        return Err(Error::Argument("quotient of the zero function".into()));
    }
    Ok(num / den)
}

/// One dimension of a sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: usize,
    pub estimate: EstimateResult,
    /// Quotient of the unit-shell test function.
    pub test_quotient: f64,
    /// Absent outside the dimension range where the lower bound is proved.
    pub bracket: Option<BoundBracket>,
    /// `lower <= estimate <= test_quotient <= upper` when a bracket exists.
    pub contained: Option<bool>,
}

/// Estimates for each dimension in `dims`, in order, each with its bracket.
pub fn sweep(
    k: u32,
    kind: InequalityKind,
    dims: &[usize],
    radius: u32,
    opts: &EstimateOptions,
) -> Result<Vec<SweepRow>> {
    for &d in dims {
        let spec = BoxSpec::new(d, radius)?;
        if spec.basis_size() > opts.budget {
            return Err(Error::Resource {
                what: format!("box of radius {radius} in dimension {d}"),
                required: spec.basis_size(),
                budget: opts.budget,
            });
        }
    }
    dims.par_iter()
        .map(|&d| {
            let spec = BoxSpec::new(d, radius)?;
            let estimate = estimate_sharp_constant(k, spec, kind, opts)?;
            let test_quotient = quotient(&unit_shell_indicator(d), k, kind)?;
            let bracket = discrete_bound_bracket(k, d as u32, kind).ok();
            let contained = bracket.map(|b| {
                b.lower <= estimate.value
                    && estimate.value <= test_quotient * (1.0 + 1e-12)
                    && test_quotient <= b.upper * (1.0 + 1e-12)
            });
            Ok(SweepRow {
                d,
                estimate,
                test_quotient,
                bracket,
                contained,
            })
        })
        .collect()
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

pub fn fit_log_slope(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 3 {
        return Err(Error::Argument(format!(
            "a slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(p) = points.iter().find(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::Argument(format!("non-positive point {p:?} in log-log fit")));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Argument("slope fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LogLogFit {
        slope,
        intercept,
        r2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::random_lattice_function;

    fn est(k: u32, d: usize, r: u32, kind: InequalityKind) -> EstimateResult {
        estimate_sharp_constant(k, BoxSpec::new(d, r).unwrap(), kind, &EstimateOptions::default()).unwrap()
    }

    #[test]
    fn one_dimensional_restriction() {
        let op = BoxOperator::new(BoxSpec::new(1, 1).unwrap(), 0, InequalityKind::Hardy, None).unwrap();
        // layout -1, 0, 1
        assert_eq!(op.apply(&[1.0, 0.0, 0.0]), vec![2.0, 0.0, 0.0]);
        assert_eq!(op.apply(&[0.0, 5.0, 1.0]), vec![0.0, 0.0, 2.0]);
        assert_eq!(op.apply(&[0.0, 0.0, 0.0]), vec![0.0; 3]);
    }

    #[test]
    fn form_matches_lattice_forms() {
        for (d, r, k, kind) in [
            (2, 3, 0, InequalityKind::Hardy),
            (3, 2, 1, InequalityKind::Hardy),
            (2, 2, 1, InequalityKind::Rellich),
            (3, 2, 2, InequalityKind::Rellich),
        ] {
            let op = BoxOperator::new(BoxSpec::new(d, r).unwrap(), k, kind, None).unwrap();
            let u = random_lattice_function(d, r, 7, true);
            let v = op.from_lattice(&u);
            let form = dot(&v, &op.apply(&v));
            let direct = match kind {
                InequalityKind::Hardy => u.dirichlet_form(k),
                InequalityKind::Rellich => u.rellich_form(k),
            };
            assert!((form - direct).abs() <= 1e-12 * direct, "{d} {r} {k} {kind:?}");
        }
    }

    #[test]
    fn hand_values() {
        let r = est(0, 1, 1, InequalityKind::Hardy);
        assert!((r.value - 2.0).abs() < 1e-10);
        let r = est(1, 1, 1, InequalityKind::Rellich);
        assert!((r.value - 5.0).abs() < 1e-10);
        assert!((r.quotient_check - r.value).abs() <= 1e-8 * r.value);
    }

    #[test]
    fn bracket_d3() {
        let r = est(0, 3, 3, InequalityKind::Hardy);
        let b = discrete_bound_bracket(0, 3, InequalityKind::Hardy).unwrap();
        assert!(b.contains(r.value), "{}", r.value);
        assert!(r.residual <= 1e-8);
    }

    #[test]
    fn budget_and_arguments() {
        let opts = EstimateOptions {
            budget: 100,
            ..Default::default()
        };
        let err = estimate_sharp_constant(0, BoxSpec::new(3, 3).unwrap(), InequalityKind::Hardy, &opts);
        assert!(matches!(err, Err(Error::Resource { required: 342, .. })));
        assert!(BoxSpec::new(2, 0).is_err());
        assert!(sweep(0, InequalityKind::Hardy, &[], 2, &EstimateOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn slope_fits() {
        let exact: Vec<(f64, f64)> = (1..6).map(|d| (d as f64, d as f64)).collect();
        let f = fit_log_slope(&exact).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-14 && (f.r2 - 1.0).abs() < 1e-14);
        let cubic: Vec<(f64, f64)> = (2..7).map(|d| (d as f64, 7.0 * (d as f64).powi(3))).collect();
        let f = fit_log_slope(&cubic).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.intercept - 7f64.ln()).abs() < 1e-12);
        assert!(fit_log_slope(&exact[..2]).is_err());
        assert!(fit_log_slope(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    }
}
