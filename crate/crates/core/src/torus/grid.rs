use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use super::fft::fft_cube;
use super::poly::TrigPoly;
use crate::error::{Error, Result};

/// Default cap on tensor-grid nodes (`N^d` per grid).
pub const DEFAULT_GRID_BUDGET: u128 = 1 << 24;

/// Tensor-product midpoint grid on `(-π, π)^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_per_axis: usize,
    /// Half-cell offset: nodes `-π + h(m + ½)`, which never hit the origin for even `N`.
    pub shift: bool,
}

impl QuadratureSpec {
    pub fn new(nodes_per_axis: usize, shift: bool) -> Result<Self> {
        if nodes_per_axis < 8 {
            return Err(Error::Argument(format!(
                "grid needs at least 8 nodes per axis, got {nodes_per_axis}"
            )));
        }
        if shift && nodes_per_axis % 2 == 1 {
            return Err(Error::Argument("shifted grid needs an even node count".into()));
        }
        Ok(QuadratureSpec {
            nodes_per_axis,
            shift,
        })
    }

    pub fn shifted(nodes_per_axis: usize) -> Result<Self> {
        Self::new(nodes_per_axis, true)
    }

    fn step(&self) -> f64 {
        2.0 * PI / self.nodes_per_axis as f64
    }

    fn offset(&self) -> f64 {
        if self.shift {
            0.5
        } else {
            0.0
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_per_axis: 64,
            shift: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridEstimate {
    pub value: f64,
    /// Raw rule on the finest grid, before extrapolation.
    pub raw: f64,
    /// Error estimate from comparing grid `N` with grid `N/2`: the plain difference for
    /// smooth integrands, the Richardson estimate of the remaining term otherwise.
    pub diagnostic: f64,
    pub nodes_per_axis: usize,
}

/// Values of each field at all grid nodes, row-major with axis 0 slowest.
fn sample_fields(fields: &[TrigPoly], dim: usize, spec: QuadratureSpec) -> Vec<Vec<Complex64>> {
    let n = spec.nodes_per_axis;
    let h = spec.step();
    let total = n.pow(dim as u32);
    fields
        .iter()
        .map(|f| {
            let mut buf = vec![Complex64::default(); total];
            for (k, c) in f.entries() {
                let mut idx = 0usize;
                let mut phase = 0.0;
                for &kj in k.coords() {
                    idx = idx * n + kj.rem_euclid(n as i32) as usize;
                    phase += f64::from(kj) * (h * spec.offset() - PI);
                }
                buf[idx] += c * Complex64::from_polar(1.0, phase);
            }
            fft_cube(&mut buf, dim, n, FftDirection::Inverse);
            buf
        })
        .collect()
}

/// Raw midpoint rule for `∫ F(x, fields(x)) dx` on one grid.
fn raw_rule<F>(fields: &[TrigPoly], dim: usize, spec: QuadratureSpec, integrand: &F) -> f64
where
    F: Fn(&[f64], &[Complex64]) -> f64 + Sync,
{
    let n = spec.nodes_per_axis;
    let h = spec.step();
    let samples = sample_fields(fields, dim, spec);
    let total = n.pow(dim as u32);
    // fixed chunking keeps the summation order independent of the thread count
    const CHUNK: usize = 4096;
    let partial: Vec<f64> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut x = vec![0.0; dim];
            let mut vals = vec![Complex64::default(); samples.len()];
            let mut acc = 0.0;
            for idx in c * CHUNK..((c + 1) * CHUNK).min(total) {
                let mut rem = idx;
                for slot in x.iter_mut().rev() {
                    *slot = -PI + h * ((rem % n) as f64 + spec.offset());
                    rem /= n;
                }
                for (v, s) in vals.iter_mut().zip(&samples) {
                    *v = s[idx];
                }
                acc += integrand(&x, &vals);
            }
            acc
        })
        .collect();
    partial.iter().sum::<f64>() * h.powi(dim as i32)
}

/// Midpoint rule with grid halving.
///
/// With `singular_order = Some(q)` the integrand behaves like `|x|^{q-d}` at the origin and
/// the error terms `N^{-q}, N^{-q-2}, …` are removed by Richardson extrapolation over `N, N/2, …`.
pub fn grid_integrate<F>(
    fields: &[TrigPoly],
    dim: usize,
    spec: QuadratureSpec,
    singular_order: Option<f64>,
    budget: u128,
    integrand: F,
) -> Result<GridEstimate>
where
    F: Fn(&[f64], &[Complex64]) -> f64 + Sync,
{
    let n = spec.nodes_per_axis;
    let nodes = (n as u128).pow(dim as u32);
    if nodes > budget {
        return Err(Error::Resource {
            what: format!("tensor grid {n}^{dim}"),
            required: nodes,
            budget,
        });
    }
    if singular_order.is_some() && !spec.shift {
        return Err(Error::Argument(
            "singular integrands need the shifted grid".into(),
        ));
    }
    let at = |m: usize| {
        raw_rule(
            fields,
            dim,
            QuadratureSpec {
                nodes_per_axis: m,
                shift: spec.shift,
            },
            &integrand,
        )
    };
    let q_n = at(n);
    let Some(q) = singular_order else {
        let q_half = at(n / 2);
        return Ok(GridEstimate {
            value: q_n,
            raw: q_n,
            diagnostic: (q_n - q_half).abs(),
            nodes_per_axis: n,
        });
    };
    // levels N, N/2, ... on even grids of at least 4 nodes; one level is kept back for the diagnostic
    let mut levels = vec![q_n];
    let mut m = n / 2;
    while m >= 4 && m % 2 == 0 && levels.len() < MAX_RICHARDSON_TERMS + 2 {
        levels.push(at(m));
        m /= 2;
    }
    if levels.len() < 2 {
        return Err(Error::Argument(format!(
            "grid halving from {n} nodes needs a node count divisible by 4"
        )));
    }
    let terms = levels.len().saturating_sub(2).max(1);
    let exponents: Vec<f64> = (0..terms).map(|j| q + 2.0 * j as f64).collect();
    let value = richardson(&levels[..=terms], &exponents);
    // the first term left in place decays like h^{q+2·terms}; scale the N vs N/2 gap accordingly
    let next = 2f64.powf(q + 2.0 * terms as f64) - 1.0;
    let diagnostic = if levels.len() > terms + 1 {
        (value - richardson(&levels[1..=terms + 1], &exponents)).abs() / next
    } else {
        (value - levels[1]).abs()
    };
    Ok(GridEstimate {
        value,
        raw: q_n,
        diagnostic,
        nodes_per_axis: n,
    })
}

/// Most error terms `h^{q}, h^{q+2}, …` removed by extrapolation.
const MAX_RICHARDSON_TERMS: usize = 3;

/// Eliminates `h^{e_i}` error terms from values on grids with step ratio 2, finest first.
fn richardson(values: &[f64], exponents: &[f64]) -> f64 {
    assert_eq!(values.len(), exponents.len() + 1);
    let mut row = values.to_vec();
    for &e in exponents {
        let f = 2f64.powf(e);
        row = row.windows(2).map(|w| (f * w[0] - w[1]) / (f - 1.0)).collect();
    }
    row[0]
}

pub fn omega_at(x: &[f64]) -> f64 {
    x.iter().map(|t| (t / 2.0).sin().powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::MultiIndex;
    use crate::torus::poly::random_trig_poly;

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(4, true).is_err());
        assert!(QuadratureSpec::new(9, true).is_err());
        assert!(QuadratureSpec::new(9, false).is_ok());
    }

    #[test]
    fn sampled_fields_match_evaluation() {
        let psi = random_trig_poly(2, 3, 8, false, false);
        for shift in [false, true] {
            let spec = QuadratureSpec::new(8, shift).unwrap();
            let s = &sample_fields(&[psi.clone()], 2, spec)[0];
            let h = spec.step();
            for (idx, v) in s.iter().enumerate() {
                let x = [
                    -PI + h * ((idx / 8) as f64 + spec.offset()),
                    -PI + h * ((idx % 8) as f64 + spec.offset()),
                ];
                assert!((psi.evaluate(&x) - v).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn parseval_on_grid() {
        let psi = random_trig_poly(3, 2, 5, true, true);
        let exact = psi.inner(&psi).re;
        let est = grid_integrate(&[psi], 3, QuadratureSpec::shifted(8).unwrap(), None, DEFAULT_GRID_BUDGET, |_, v| {
            v[0].norm_sqr()
        })
        .unwrap();
        assert!((est.value - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn richardson_removes_known_powers() {
        let exact = 2.5;
        let f = |h: f64| exact + 0.7 * h + 0.3 * h.powi(3);
        let vals: Vec<f64> = (0..3).map(|j| f(0.025 * 2f64.powi(j))).collect();
        assert!((richardson(&vals, &[1.0, 3.0]) - exact).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let psi = TrigPoly::cosine(MultiIndex::unit(4, 0));
        let err = grid_integrate(&[psi], 4, QuadratureSpec::shifted(64).unwrap(), None, 1 << 20, |_, _| 0.0);
        assert!(matches!(err, Err(Error::Resource { .. })));
    }
}
