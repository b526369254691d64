//! Singular integrals `∫_{Q_d} P(x) ω(x)^{-s} dx` through the heat-kernel representation
//!
//! `ω^{-s} = Γ(s)^{-1} ∫_0^∞ t^{s-1} e^{-tω} dt`, and `e^{-tω}` factorises over axes, so
//! `∫ e^{i m·x} e^{-tω} dx = Π_j b(m_j, t)` with `b(m, t) = 2π e^{-t/2} I_m(t/2)`.
//! The `t` integral is done in `ln t` with Gauss–Legendre panels up to `T`, and the tail
//! beyond `T` from the large-argument expansion of `e^{-z} I_m(z)`.

use std::f64::consts::PI;

use gauss_quad::GaussLegendre;

use super::density::{contract_axes, Density};
use crate::error::{Error, Result};

/// Number of terms of the Bessel asymptotic series used for the tail.
const SERIES_TERMS: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct SingularIntegral {
    pub value: f64,
    /// Difference between two quadrature orders plus the size of the last tail term.
    pub error_estimate: f64,
}

/// `Γ(s)` for positive integers and half-integers, exact enough for our use.
fn gamma_fn(s: f64) -> f64 {
    let twice = (2.0 * s).round();
    assert!((2.0 * s - twice).abs() < 1e-12 && twice >= 1.0, "gamma at {s}");
    let n = twice as i64;
    if n % 2 == 0 {
        (1..n / 2).map(|k| k as f64).product()
    } else {
        // Γ(j + 1/2) = (2j)! √π / (4^j j!)
        let j = (n - 1) / 2;
        (0..j).fold(PI.sqrt(), |acc, i| acc * (i as f64 + 0.5))
    }
}

/// `b(m, t)` for `m = 0..=max_m` by the periodic trapezoid rule.
fn bessel_table(t: f64, max_m: usize) -> Vec<f64> {
    let points = (7.0 * t.sqrt()).ceil() as usize + 2 * max_m + 24;
    let h = 2.0 * PI / points as f64;
    let weights: Vec<f64> = (0..points)
        .map(|l| (-t * (l as f64 * h / 2.0).sin().powi(2)).exp())
        .collect();
    (0..=max_m)
        .map(|m| {
            let s: f64 = weights
                .iter()
                .enumerate()
                .map(|(l, w)| w * (m as f64 * l as f64 * h).cos())
                .sum();
            s * h
        })
        .collect()
}

/// Coefficients `β_k(m)` with `b(m,t) ≈ 2π (π t)^{-1/2} Σ_k β_k(m) t^{-k}`.
fn asymptotic_coeffs(m: usize, terms: usize) -> Vec<f64> {
    let mu = 4.0 * (m as f64).powi(2);
    let mut out = Vec::with_capacity(terms);
    let mut a = 1.0f64;
    for k in 0..terms {
        if k > 0 {
            let l = k as f64;
            a *= (mu - (2.0 * l - 1.0).powi(2)) / (l * 8.0);
        }
        // (-1)^k a_k (2/t)^k
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign * a * 2f64.powi(k as i32));
    }
    out
}

fn poly_mul(a: &[f64], b: &[f64], terms: usize) -> Vec<f64> {
    let mut out = vec![0.0; terms];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if i + j < terms {
                out[i + j] += x * y;
            }
        }
    }
    out
}

/// Contracts folded coefficients with per-axis polynomial tables (in `1/t`).
fn contract_series(data: &[f64], dim: usize, side: usize, tables: &[Vec<f64>]) -> Vec<f64> {
    let terms = tables[0].len();
    let mut cur: Vec<Vec<f64>> = data.iter().map(|&v| {
        let mut p = vec![0.0; terms];
        p[0] = v;
        p
    }).collect();
    for _ in 0..dim {
        cur = cur
            .chunks_exact(side)
            .map(|row| {
                let mut acc = vec![0.0; terms];
                for (p, table) in row.iter().zip(tables) {
                    for (a, b) in acc.iter_mut().zip(poly_mul(p, table, terms)) {
                        *a += b;
                    }
                }
                acc
            })
            .collect();
    }
    cur.swap_remove(0)
}

fn gauss_rule(n: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(n)
        .expect("positive order")
        .as_node_weight_pairs()
        .to_vec()
}

/// `∫_{Q_d} P(x) ω(x)^{-s} dx` for a real-valued density `P` and `s > 0` a multiple of ½.
///
/// Fails with a domain error when the integral diverges at the origin, detected from the
/// asymptotic coefficients that would need to vanish.
pub fn singular_integral(density: &Density, s: f64) -> Result<SingularIntegral> {
    assert!(s > 0.0);
    let dim = density.dim();
    let folded = density.folded_real();
    let side = folded.radius + 1;
    let radius = folded.radius.max(1) as f64;
    let scale = density.max_abs().max(f64::MIN_POSITIVE);

    // tail: Σ_k g_k ∫_T^∞ t^{s-1-d/2-k} dt
    let t_max = (50.0 * radius * radius).max(100.0);
    let tables: Vec<Vec<f64>> = (0..side).map(|m| asymptotic_coeffs(m, SERIES_TERMS)).collect();
    let g = contract_series(&folded.data, dim, side, &tables);
    let half_d = dim as f64 / 2.0;
    let norm = (2.0 * PI).powi(dim as i32) * PI.powf(-half_d);
    let mut tail = 0.0;
    let mut last_term = 0.0;
    for (k, gk) in g.iter().enumerate() {
        let decay = half_d + k as f64 - s;
        if decay <= 1e-12 {
            if gk.abs() > 1e-9 * scale * (1.0 + radius).powi(2 * k as i32) {
                return Err(Error::Domain {
                    what: format!("weight ω^-{s} in dimension {dim}"),
                    requirement: "an integrable singularity at the origin".into(),
                });
            }
            continue;
        }
        let term = norm * gk * t_max.powf(-decay) / decay;
        tail += term;
        last_term = term;
    }

    // main part: ∫_{u_min}^{ln T} e^{s u} G(e^u) du
    let u_min = -40.0 / s - 1.0;
    let u_max = t_max.ln();
    let panels = (u_max - u_min).ceil() as usize;
    let width = (u_max - u_min) / panels as f64;
    let fine = gauss_rule(12);
    let coarse = gauss_rule(8);
    let panel_sum = |rule: &[(f64, f64)]| -> f64 {
        let mut acc = 0.0;
        for p in 0..panels {
            let a = u_min + p as f64 * width;
            for &(x, w) in rule {
                let u = a + (x + 1.0) * width / 2.0;
                let t = u.exp();
                let table = bessel_table(t, folded.radius);
                acc += w * width / 2.0 * (s * u).exp() * contract_axes(&folded.data, dim, side, &table);
            }
        }
        acc
    };
    let main_fine = panel_sum(&fine);
    let main_coarse = panel_sum(&coarse);
    let gamma = gamma_fn(s);
    Ok(SingularIntegral {
        value: (main_fine + tail) / gamma,
        error_estimate: ((main_fine - main_coarse).abs() + last_term.abs()) / gamma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::MultiIndex;
    use crate::torus::poly::TrigPoly;

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_fn(1.0), 1.0);
        assert_eq!(gamma_fn(4.0), 6.0);
        assert!((gamma_fn(0.5) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_fn(2.5) - 0.75 * PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bessel_table_matches_series_at_small_t() {
        // e^{-z} I_0(z) and e^{-z} I_1(z) at z = 0.5
        let b = bessel_table(1.0, 1);
        let i0: f64 = 1.0634833707413236;
        let i1: f64 = 0.25789430539089636;
        assert!((b[0] - 2.0 * PI * (-0.5f64).exp() * i0).abs() < 1e-13);
        assert!((b[1] - 2.0 * PI * (-0.5f64).exp() * i1).abs() < 1e-13);
    }

    #[test]
    fn omega_times_inverse_omega_is_volume() {
        for dim in 3..=6 {
            let one = Density::from_poly(&TrigPoly::one(dim));
            let r = singular_integral(&one.times_omega(), 1.0).unwrap();
            let vol = (2.0 * PI).powi(dim as i32);
            assert!((r.value - vol).abs() < 1e-10 * vol, "d={dim}: {}", r.value / vol);
        }
    }

    #[test]
    fn divergent_weight_is_rejected() {
        let one = Density::from_poly(&TrigPoly::one(2));
        assert!(singular_integral(&one, 1.0).is_err());
        let c = Density::from_poly(&TrigPoly::cosine(MultiIndex::from([1, 0, 0, 0])));
        assert!(singular_integral(&c, 2.0).is_err());
    }
}
