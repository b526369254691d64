//! Closed-form constants of the torus inequalities and the lattice bound brackets.
//!
//! Three different pairs of auxiliary constants appear in the derivations, all
//! traditionally written `C_1`, `C_2`. They are kept apart here:
//!
//! * [`hardy_c1c2`]: `16/(d+2k-2)²` and `(3d+2k-2)/(d(d+2k-2))`, feeding [`weighted_hardy_constant`];
//! * [`hr_c1c2`]: `16/(d-2k)²` and `(3d-2k+4)/(d(d-2k))`, feeding [`weighted_hardy_rellich_constant`];
//! * [`rellich_c1c2`]: the `β`/`γ` dependent pair feeding [`weighted_rellich_constant`].
//!
//! Everything built only from rational operations is evaluated exactly with
//! big rationals and rounded once at the end. The Rellich constant needs a
//! square root and is computed in double precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::InequalityKind;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("finite rational")
}

fn check_non_positive(what: &str, k: i64) -> Result<()> {
    if k > 0 {
        return Err(Error::domain(what, format!("k <= 0 (got k = {k})")));
    }
    Ok(())
}

/// `Σ_{j=0}^{-k} d^j c1(k+j) Π_{i<j} c2(k+i) + d^{-k} Π_{i=0}^{-k} c2(k+i)`, the
/// reciprocal of the weighted constants obtained by iterating a one-step
/// inequality from weight `ω^k` up to `ω^0`.
fn iterated_reciprocal(
    k: i64,
    d: i64,
    c1: impl Fn(i64) -> BigRational,
    c2: impl Fn(i64) -> BigRational,
) -> BigRational {
    let steps = -k;
    let dd = rat(d);
    let mut total = BigRational::zero();
    let mut c2_prod = BigRational::one();
    let mut d_pow = BigRational::one();
    for j in 0..=steps {
        total += &d_pow * c1(k + j) * &c2_prod;
        c2_prod *= c2(k + j);
        d_pow *= &dd;
    }
    // d_pow overshoots by one factor of d after the loop
    total + (d_pow / dd) * c2_prod
}

fn hardy_c1_exact(k: i64, d: i64) -> BigRational {
    let s = d + 2 * k - 2;
    frac(16, s * s)
}

fn hardy_c2_exact(k: i64, d: i64) -> BigRational {
    frac(3 * d + 2 * k - 2, d * (d + 2 * k - 2))
}

fn hr_c1_exact(k: i64, d: i64) -> BigRational {
    let s = d - 2 * k;
    frac(16, s * s)
}

fn hr_c2_exact(k: i64, d: i64) -> BigRational {
    frac(3 * d - 2 * k + 4, d * (d - 2 * k))
}

fn check_hardy_domain(k: i64, d: i64) -> Result<()> {
    check_non_positive("weighted Hardy constant", k)?;
    if d <= -2 * k + 2 {
        return Err(Error::domain(
            format!("weighted Hardy constant H({k}, {d})"),
            "d > -2k+2",
        ));
    }
    Ok(())
}

fn check_hr_domain(k: i64, d: i64) -> Result<()> {
    check_non_positive("weighted Hardy-Rellich constant", k)?;
    if d < -6 * k + 8 {
        return Err(Error::domain(
            format!("weighted Hardy-Rellich constant HR({k}, {d})"),
            "d >= -6k+8",
        ));
    }
    Ok(())
}

/// The pair `(16/(d+2k-2)², (3d+2k-2)/(d(d+2k-2)))` of the one-step weighted Hardy bound.
pub fn hardy_c1c2(k: i64, d: i64) -> Result<(f64, f64)> {
    check_hardy_domain(k, d)?;
    Ok((to_f64(&hardy_c1_exact(k, d)), to_f64(&hardy_c2_exact(k, d))))
}

/// The pair `(16/(d-2k)², (3d-2k+4)/(d(d-2k)))` of the one-step weighted Hardy–Rellich bound.
pub fn hr_c1c2(k: i64, d: i64) -> Result<(f64, f64)> {
    check_hr_domain(k, d)?;
    Ok((to_f64(&hr_c1_exact(k, d)), to_f64(&hr_c2_exact(k, d))))
}

/// `H(k, d)` in exact arithmetic, for `k <= 0` and `d > -2k+2`.
pub fn weighted_hardy_constant_exact(k: i64, d: i64) -> Result<BigRational> {
    check_hardy_domain(k, d)?;
    Ok(hardy_unchecked(k, d))
}

fn hardy_unchecked(k: i64, d: i64) -> BigRational {
    iterated_reciprocal(k, d, |j| hardy_c1_exact(j, d), |j| hardy_c2_exact(j, d)).recip()
}

/// Constant of `H ∫|ψ|² ω^{k-1} <= ∫|∇ψ|² ω^k` on the torus.
pub fn weighted_hardy_constant(k: i64, d: i64) -> Result<f64> {
    weighted_hardy_constant_exact(k, d).map(|r| to_f64(&r))
}

/// `HR(k, d)` in exact arithmetic, for `k <= 0` and `d >= -6k+8`.
pub fn weighted_hardy_rellich_constant_exact(k: i64, d: i64) -> Result<BigRational> {
    check_hr_domain(k, d)?;
    Ok(hardy_rellich_unchecked(k, d))
}

/// The `HR` formula without its validity hypothesis; well defined whenever `d > -2k`.
fn hardy_rellich_unchecked(k: i64, d: i64) -> BigRational {
    iterated_reciprocal(k, d, |j| hr_c1_exact(j, d), |j| hr_c2_exact(j, d)).recip()
}

/// Constant of `HR ∫|∇ψ|² ω^{k-1} <= ∫|Δψ|² ω^k` on the torus.
pub fn weighted_hardy_rellich_constant(k: i64, d: i64) -> Result<f64> {
    weighted_hardy_rellich_constant_exact(k, d).map(|r| to_f64(&r))
}

/// Parameters `(α, β, γ)` of the square expansion behind the weighted Rellich bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RellichParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// `β = (-4 + 8α + √2 √(d² - 4d + 16α² - 16α + 8)) / 8` and `γ = β(d + 4β - 4α)/2`.
///
/// Requires `α <= 0` and `d > -4α + 4`.
pub fn rellich_beta(alpha: f64, d: i64) -> Result<RellichParams> {
    if !(alpha.is_finite() && alpha <= 0.0) {
        return Err(Error::domain("Rellich parameter β", "alpha <= 0"));
    }
    let df = d as f64;
    if df <= -4.0 * alpha + 4.0 {
        return Err(Error::domain(
            format!("Rellich parameter β(α={alpha}, d={d})"),
            "d > -4α+4",
        ));
    }
    let disc = df * df - 4.0 * df + 16.0 * alpha * alpha - 16.0 * alpha + 8.0;
    if disc < 0.0 {
        return Err(Error::Argument(format!(
            "negative discriminant {disc} in β(α={alpha}, d={d})"
        )));
    }
    let beta = (-4.0 + 8.0 * alpha + (2.0 * disc).sqrt()) / 8.0;
    let gamma = beta * (df + 4.0 * beta - 4.0 * alpha) / 2.0;
    Ok(RellichParams { alpha, beta, gamma })
}

/// `C_1(α,d) = 2β(d - 2β + 2α - 1)/d` and `C_2(α,d) = γ(d + 2α - 2)(2β - 2α + 1)/d`.
///
/// `C_2` also has the expanded form `β(d+4β-4α)(d+2α-2)(2β-2α+1)/(2d)`; the two
/// coincide because `2γ = β(d+4β-4α)`, which is checked here.
pub fn rellich_c1c2(alpha: f64, d: i64) -> Result<(f64, f64)> {
    let RellichParams { beta, gamma, .. } = rellich_beta(alpha, d)?;
    let df = d as f64;
    let c1 = 2.0 * beta * (df - 2.0 * beta + 2.0 * alpha - 1.0) / df;
    let tail = (df + 2.0 * alpha - 2.0) * (2.0 * beta - 2.0 * alpha + 1.0);
    let c2 = gamma * tail / df;
    let c2_expanded = beta * (df + 4.0 * beta - 4.0 * alpha) * tail / (2.0 * df);
    debug_assert!((c2 - c2_expanded).abs() <= 1e-12 * c2.abs().max(1.0));
    Ok((c1, c2))
}

/// Constant of `R ∫|ψ|² ω^{k-2} <= ∫|Δψ|² ω^k` on the torus, for `k <= 0`, `d > -2k+4`.
///
/// Uses `α = k/2` together with the `H(k,d)` and `HR(k,d)` formulas. The latter
/// is evaluated as a formula even below its own validity threshold `d >= -6k+8`.
pub fn weighted_rellich_constant(k: i64, d: i64) -> Result<f64> {
    check_non_positive("weighted Rellich constant", k)?;
    if d <= -2 * k + 4 {
        return Err(Error::domain(
            format!("weighted Rellich constant R({k}, {d})"),
            "d > -2k+4",
        ));
    }
    let alpha = k as f64 / 2.0;
    let (c1, c2) = rellich_c1c2(alpha, d)?;
    let h_inv = to_f64(&hardy_unchecked(k, d).recip());
    let hr_inv = to_f64(&hardy_rellich_unchecked(k, d).recip());
    let df = d as f64;
    let a = (d - 2 * k) as f64;
    let b = (d + 2 * k - 4) as f64;
    Ok(a * a * b * b / (256.0 * (1.0 + hr_inv * (df * c1 + df * c2 * h_inv))))
}

/// `C(m,k,d) = Π_{i<m} R(k-2i, d)`, valid for `d > -2k+4m`.
pub fn rellich_chain_constant(m: u32, k: i64, d: i64) -> Result<f64> {
    check_non_positive("higher-order Rellich constant", k)?;
    let m = i64::from(m);
    if d <= -2 * k + 4 * m {
        return Err(Error::domain(
            format!("C(m={m}, k={k}, d={d})"),
            "d > -2k+4m",
        ));
    }
    (0..m).try_fold(1.0, |acc, i| Ok(acc * weighted_rellich_constant(k - 2 * i, d)?))
}

/// `C̃(m,k,d) = H(k,d) Π_{i<m} R(k-2i-1, d)`, valid for `d > -2k+4m+2`.
pub fn hardy_chain_constant(m: u32, k: i64, d: i64) -> Result<f64> {
    check_non_positive("higher-order Hardy constant", k)?;
    let m = i64::from(m);
    if d <= -2 * k + 4 * m + 2 {
        return Err(Error::domain(
            format!("C~(m={m}, k={k}, d={d})"),
            "d > -2k+4m+2",
        ));
    }
    let h = weighted_hardy_constant(k, d)?;
    (0..m).try_fold(h, |acc, i| Ok(acc * weighted_rellich_constant(k - 2 * i - 1, d)?))
}

/// The pair `(C(m,k,d), C̃(m,k,d))`; requires the stricter `d > -2k+4m+2`.
pub fn higher_order_constants(m: u32, k: i64, d: i64) -> Result<(f64, f64)> {
    let tilde = hardy_chain_constant(m, k, d)?;
    Ok((rellich_chain_constant(m, k, d)?, tilde))
}

/// Provable lower bound and test-function upper bound for a lattice sharp constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundBracket {
    pub kind: InequalityKind,
    pub k: u32,
    pub d: u32,
    pub lower: f64,
    pub upper: f64,
}

impl BoundBracket {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Bracket for the sharp constant of
/// `Σ|D Δ^k u|² >= C Σ|u|²/|n|^{4k+2}` (hardy, `d > 4k+2`) or
/// `Σ|Δ^k u|² >= C Σ|u|²/|n|^{4k}` (rellich, `k >= 1`, `d > 4k`).
pub fn discrete_bound_bracket(k: u32, d: u32, kind: InequalityKind) -> Result<BoundBracket> {
    let kk = i64::from(k);
    let dd = i64::from(d);
    let (lower, upper) = match kind {
        InequalityKind::Hardy => {
            if dd <= 4 * kk + 2 {
                return Err(Error::domain(
                    format!("hardy bracket (k={k}, d={d})"),
                    "d > 4k+2",
                ));
            }
            let scale = 4f64.powi(2 * k as i32 + 1);
            (
                scale * hardy_chain_constant(k, 0, dd)?,
                scale * f64::from(d).powi(2 * k as i32 + 1),
            )
        }
        InequalityKind::Rellich => {
            if k == 0 {
                return Err(Error::domain("rellich bracket", "k >= 1"));
            }
            if dd <= 4 * kk {
                return Err(Error::domain(
                    format!("rellich bracket (k={k}, d={d})"),
                    "d > 4k",
                ));
            }
            let scale = 4f64.powi(2 * k as i32);
            (
                scale * rellich_chain_constant(k, 0, dd)?,
                scale * f64::from(d).powi(2 * k as i32),
            )
        }
    };
    if !(lower > 0.0 && lower <= upper) {
        return Err(Error::Argument(format!(
            "inconsistent bracket for {kind:?} k={k} d={d}: lower {lower}, upper {upper}"
        )));
    }
    Ok(BoundBracket {
        kind,
        k,
        d,
        lower,
        upper,
    })
}
