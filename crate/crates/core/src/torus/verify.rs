use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::Density;
use super::grid::{grid_integrate, omega_at, QuadratureSpec, DEFAULT_GRID_BUDGET};
use super::heat::singular_integral;
use super::poly::{random_trig_poly, weighted_form, Deriv, TrigPoly};
use crate::constants::{
    hardy_chain_constant, rellich_chain_constant, weighted_hardy_constant,
    weighted_hardy_rellich_constant, weighted_rellich_constant, RellichParams,
};
use crate::error::{Error, Result};

/// How integrals with a negative power of `ω` are computed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Heat-kernel representation, any dimension.
    HeatKernel,
    /// Shifted midpoint tensor grid with extrapolation.
    Grid(QuadratureSpec),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyConfig {
    pub integrator: Integrator,
    pub grid_budget: u128,
    /// Relative slack for comparisons made entirely in coefficient space.
    pub exact_tol: f64,
    /// Relative slack once a singular integral is involved.
    pub quad_tol: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            integrator: Integrator::HeatKernel,
            grid_budget: DEFAULT_GRID_BUDGET,
            exact_tol: 1e-8,
            quad_tol: 1e-4,
        }
    }
}

impl VerifyConfig {
    pub fn with_grid(spec: QuadratureSpec) -> Self {
        VerifyConfig {
            integrator: Integrator::Grid(spec),
            ..Self::default()
        }
    }
}

/// Extra trigonometric factor multiplying `|derivative|²` inside an integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factor {
    One,
    /// `Σ_i sin⁴(x_i/2)`.
    SumSin4,
    /// `Σ_i sin²(x_i/2) |∂_i ψ|²` in place of `|∇ψ|²` (gradient only).
    AxisSin2,
}

impl Factor {
    /// Order of vanishing at the origin.
    fn order(self) -> f64 {
        match self {
            Factor::One => 0.0,
            Factor::SumSin4 => 4.0,
            Factor::AxisSin2 => 2.0,
        }
    }
}

/// A computed integral with its provenance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
    pub method: String,
}

impl Integral {
    fn exact(value: f64) -> Self {
        Integral {
            value,
            error_estimate: 0.0,
            method: "exact".into(),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.method == "exact"
    }
}

/// `∫_{Q_d} F(x) |deriv ψ(x)|² ω(x)^p dx` with `F` given by `factor`.
pub fn weighted_integral(
    psi: &TrigPoly,
    deriv: Deriv,
    factor: Factor,
    p: i64,
    cfg: &VerifyConfig,
) -> Result<Integral> {
    let dim = psi.dim();
    if factor == Factor::AxisSin2 && deriv != Deriv::Gradient {
        return Err(Error::Argument("per-axis weights apply to gradients only".into()));
    }
    if psi.is_zero() {
        return Ok(Integral::exact(0.0));
    }
    if p >= 0 && factor == Factor::One {
        return Ok(Integral::exact(weighted_form(psi, deriv, p as u32)));
    }
    let comps = psi.derivative_components(deriv);
    let density = || -> Density {
        match factor {
            Factor::One => Density::sum_of_squares(dim, &comps),
            Factor::SumSin4 => Density::sum_of_squares(dim, &comps).times_s4(),
            Factor::AxisSin2 => {
                let mut acc = Density::zero(dim, 0);
                for (axis, c) in comps.iter().enumerate() {
                    let d = Density::sum_of_squares(dim, std::slice::from_ref(c));
                    acc.add_assign(&d.times_axis_sin2(axis), 1.0);
                }
                acc
            }
        }
    };
    if p >= 0 {
        return Ok(Integral::exact(density().integral_with_omega_power(p as u32)));
    }
    let singular_order = dim as f64 + 2.0 * p as f64 + factor.order();
    if singular_order <= 0.0 {
        return Err(Error::domain(
            format!("integral with weight ω^{p} in dimension {dim}"),
            format!("d > {}", -2 * p - factor.order() as i64),
        ));
    }
    match cfg.integrator {
        Integrator::HeatKernel => {
            let r = singular_integral(&density(), -p as f64)?;
            Ok(Integral {
                value: r.value,
                error_estimate: r.error_estimate,
                method: "heat-kernel".into(),
            })
        }
        Integrator::Grid(spec) => {
            let est = grid_integrate(
                &comps,
                dim,
                spec,
                Some(singular_order),
                cfg.grid_budget,
                |x, v| {
                    let w = omega_at(x).powi(p as i32);
                    let body: f64 = match factor {
                        Factor::One => v.iter().map(|z| z.norm_sqr()).sum(),
                        Factor::SumSin4 => {
                            let s4: f64 = x.iter().map(|t| (t / 2.0).sin().powi(4)).sum();
                            s4 * v.iter().map(|z| z.norm_sqr()).sum::<f64>()
                        }
                        Factor::AxisSin2 => x
                            .iter()
                            .zip(v)
                            .map(|(t, z)| (t / 2.0).sin().powi(2) * z.norm_sqr())
                            .sum(),
                    };
                    body * w
                },
            )?;
            Ok(Integral {
                value: est.value,
                error_estimate: est.diagnostic,
                method: format!("grid(N={})", est.nodes_per_axis),
            })
        }
    }
}

/// `∫ |deriv ψ|² ω^p` for any integer `p`; negative powers use the midpoint grid with
/// extrapolation and report the grid-halving diagnostic.
pub fn quadrature_form(
    psi: &TrigPoly,
    deriv: Deriv,
    p: i64,
    spec: QuadratureSpec,
    budget: u128,
) -> Result<Integral> {
    let dim = psi.dim();
    let comps = psi.derivative_components(deriv);
    let singular = (p < 0).then(|| dim as f64 + 2.0 * p as f64);
    if let Some(q) = singular {
        if q <= 0.0 {
            return Err(Error::domain(
                format!("integral with weight ω^{p} in dimension {dim}"),
                format!("d > {}", -2 * p),
            ));
        }
    }
    let est = grid_integrate(&comps, dim, spec, singular, budget, |x, v| {
        v.iter().map(|z| z.norm_sqr()).sum::<f64>() * omega_at(x).powi(p as i32)
    })?;
    Ok(Integral {
        value: est.value,
        error_estimate: est.diagnostic,
        method: format!("grid(N={})", est.nodes_per_axis),
    })
}

/// Which torus inequality is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// `H ∫|ψ|² ω^{k-1} <= ∫|∇ψ|² ω^k`.
    Hardy,
    /// `HR ∫|∇ψ|² ω^{k-1} <= ∫|Δψ|² ω^k`.
    Hr,
    /// `R ∫|ψ|² ω^{k-2} <= ∫|Δψ|² ω^k`.
    Rellich,
    /// The square expansion with free parameters `β, γ`.
    #[value(alias = "lemma34")]
    SquareExpansion,
    /// `Δ^m` or `∇Δ^m` chains.
    Higher,
}

/// The two higher-order families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum HigherOrder {
    /// `C(m,k,d) ∫|ψ|² ω^{k-2m} <= ∫|Δ^m ψ|² ω^k`.
    Laplacian,
    /// `C̃(m,k,d) ∫|ψ|² ω^{k-2m-1} <= ∫|∇Δ^m ψ|² ω^k`.
    GradLaplacian,
}

/// Outcome of `constant · lhs <= rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub theorem: String,
    pub dim: usize,
    pub k: i64,
    pub m: Option<u32>,
    pub constant: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs / lhs`; absent when `lhs = 0`.
    pub ratio: Option<f64>,
    pub holds: bool,
    pub degenerate: bool,
    pub tol: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
    pub method: String,
}

fn require_zero_average(psi: &TrigPoly) -> Result<()> {
    if psi.has_zero_average() {
        Ok(())
    } else {
        Err(Error::Precondition("ψ must have zero average".into()))
    }
}

fn compare(
    theorem: &str,
    psi: &TrigPoly,
    k: i64,
    m: Option<u32>,
    constant: f64,
    lhs: Integral,
    rhs: Integral,
    cfg: &VerifyConfig,
) -> InequalityReport {
    let exact = lhs.is_exact() && rhs.is_exact();
    let tol = if exact { cfg.exact_tol } else { cfg.quad_tol };
    let degenerate = lhs.value == 0.0;
    let method = if exact {
        "exact".to_string()
    } else if lhs.is_exact() {
        rhs.method.clone()
    } else {
        lhs.method.clone()
    };
    InequalityReport {
        theorem: theorem.into(),
        dim: psi.dim(),
        k,
        m,
        constant,
        lhs: lhs.value,
        rhs: rhs.value,
        ratio: (!degenerate).then(|| rhs.value / lhs.value),
        holds: constant * lhs.value <= rhs.value * (1.0 + tol) + f64::MIN_POSITIVE,
        degenerate,
        tol,
        lhs_error: lhs.error_estimate,
        rhs_error: rhs.error_estimate,
        method,
    }
}

/// `H(k,d) ∫|ψ|² ω^{k-1} <= ∫|∇ψ|² ω^k` for zero-average `ψ`.
pub fn verify_weighted_hardy(psi: &TrigPoly, k: i64, cfg: &VerifyConfig) -> Result<InequalityReport> {
    require_zero_average(psi)?;
    let c = weighted_hardy_constant(k, psi.dim() as i64)?;
    let lhs = weighted_integral(psi, Deriv::None, Factor::One, k - 1, cfg)?;
    let rhs = weighted_integral(psi, Deriv::Gradient, Factor::One, k, cfg)?;
    Ok(compare("hardy", psi, k, None, c, lhs, rhs, cfg))
}

/// `HR(k,d) ∫|∇ψ|² ω^{k-1} <= ∫|Δψ|² ω^k` for zero-average `ψ`.
pub fn verify_weighted_hardy_rellich(
    psi: &TrigPoly,
    k: i64,
    cfg: &VerifyConfig,
) -> Result<InequalityReport> {
    require_zero_average(psi)?;
    let c = weighted_hardy_rellich_constant(k, psi.dim() as i64)?;
    let lhs = weighted_integral(psi, Deriv::Gradient, Factor::One, k - 1, cfg)?;
    let rhs = weighted_integral(psi, Deriv::Laplacian(1), Factor::One, k, cfg)?;
    Ok(compare("hr", psi, k, None, c, lhs, rhs, cfg))
}

/// `R(k,d) ∫|ψ|² ω^{k-2} <= ∫|Δψ|² ω^k` for zero-average `ψ`.
pub fn verify_weighted_rellich(
    psi: &TrigPoly,
    k: i64,
    cfg: &VerifyConfig,
) -> Result<InequalityReport> {
    require_zero_average(psi)?;
    let c = weighted_rellich_constant(k, psi.dim() as i64)?;
    let lhs = weighted_integral(psi, Deriv::None, Factor::One, k - 2, cfg)?;
    let rhs = weighted_integral(psi, Deriv::Laplacian(1), Factor::One, k, cfg)?;
    Ok(compare("rellich", psi, k, None, c, lhs, rhs, cfg))
}

/// Higher-order chains; `m = 0` with [`HigherOrder::GradLaplacian`] is the weighted Hardy case.
pub fn verify_higher_order(
    psi: &TrigPoly,
    m: u32,
    k: i64,
    which: HigherOrder,
    cfg: &VerifyConfig,
) -> Result<InequalityReport> {
    require_zero_average(psi)?;
    let d = psi.dim() as i64;
    let (c, lhs_power, deriv) = match which {
        HigherOrder::Laplacian => (
            rellich_chain_constant(m, k, d)?,
            k - 2 * i64::from(m),
            Deriv::Laplacian(m),
        ),
        HigherOrder::GradLaplacian => (
            hardy_chain_constant(m, k, d)?,
            k - 2 * i64::from(m) - 1,
            Deriv::GradLaplacian(m),
        ),
    };
    let lhs = weighted_integral(psi, Deriv::None, Factor::One, lhs_power, cfg)?;
    let rhs = weighted_integral(psi, deriv, Factor::One, k, cfg)?;
    let name = match which {
        HigherOrder::Laplacian => "higher-laplacian",
        HigherOrder::GradLaplacian => "higher-grad-laplacian",
    };
    Ok(compare(name, psi, k, Some(m), c, lhs, rhs, cfg))
}

/// All terms of the square-expansion inequality
/// `∫ω^{2α}|Δψ|² >= A ∫ω^{2α-1}|∇ψ|² + B ∫ω^{2α-2}|ψ|² + E`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SquareExpansionReport {
    pub dim: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub lhs: f64,
    /// `A = 2γ - β(d + 4β - 4α)`.
    pub gradient_coeff: f64,
    pub gradient_integral: f64,
    /// `B = (γ/2)((2β - 2α + 1)(d + 4α - 4) - 2γ)`.
    pub value_coeff: f64,
    pub value_integral: f64,
    /// The three parts of `E`.
    pub error_terms: [f64; 3],
    pub rhs: f64,
    pub holds: bool,
    pub tol: f64,
    pub method: String,
}

/// Evaluates the square expansion for given `(α, β, γ)`.
///
/// Requires `α <= 0` with `2α` an integer, `β² - β(2α-1) >= 0` and `d > -4α+4`.
pub fn verify_square_expansion(
    psi: &TrigPoly,
    params: RellichParams,
    cfg: &VerifyConfig,
) -> Result<SquareExpansionReport> {
    let RellichParams { alpha, beta, gamma } = params;
    let d = psi.dim() as f64;
    let two_alpha = 2.0 * alpha;
    if !(alpha <= 0.0 && (two_alpha - two_alpha.round()).abs() < 1e-12) {
        return Err(Error::domain(
            format!("square expansion with α = {alpha}"),
            "α <= 0 and 2α an integer",
        ));
    }
    if beta * beta - beta * (two_alpha - 1.0) < 0.0 {
        return Err(Error::domain(
            format!("square expansion with β = {beta}, α = {alpha}"),
            "β² - β(2α-1) >= 0",
        ));
    }
    if d <= -4.0 * alpha + 4.0 {
        return Err(Error::domain(
            format!("square expansion in dimension {d} with α = {alpha}"),
            "d > -4α+4",
        ));
    }
    let a2 = two_alpha.round() as i64;
    let c = 2.0 * beta - two_alpha + 1.0;
    let lhs = weighted_integral(psi, Deriv::Laplacian(1), Factor::One, a2, cfg)?;
    let grad = weighted_integral(psi, Deriv::Gradient, Factor::One, a2 - 1, cfg)?;
    let val = weighted_integral(psi, Deriv::None, Factor::One, a2 - 2, cfg)?;
    let grad0 = weighted_integral(psi, Deriv::Gradient, Factor::One, a2, cfg)?;
    let grad_s4 = weighted_integral(psi, Deriv::Gradient, Factor::SumSin4, a2 - 2, cfg)?;
    let grad_axis = weighted_integral(psi, Deriv::Gradient, Factor::AxisSin2, a2 - 1, cfg)?;
    let val1 = weighted_integral(psi, Deriv::None, Factor::One, a2 - 1, cfg)?;
    let val_s4 = weighted_integral(psi, Deriv::None, Factor::SumSin4, a2 - 3, cfg)?;

    let gradient_coeff = 2.0 * gamma - beta * (d + 4.0 * beta - 2.0 * two_alpha);
    let value_coeff = gamma / 2.0 * (c * (d + 2.0 * two_alpha - 4.0) - 2.0 * gamma);
    let e1 = 2.0 * beta * (grad0.value + c * grad_s4.value);
    let e2 = -4.0 * beta * grad_axis.value;
    let e3 = -gamma * c * (val1.value + 2.0 * (alpha - 1.0) * val_s4.value);
    let rhs = gradient_coeff * grad.value + value_coeff * val.value + e1 + e2 + e3;

    let parts = [&lhs, &grad, &val, &grad0, &grad_s4, &grad_axis, &val1, &val_s4];
    let exact = parts.iter().all(|i| i.is_exact());
    let tol = if exact { cfg.exact_tol } else { cfg.quad_tol };
    let scale = lhs.value.abs()
        + (gradient_coeff * grad.value).abs()
        + (value_coeff * val.value).abs()
        + e1.abs()
        + e2.abs()
        + e3.abs();
    let method = parts
        .iter()
        .find(|i| !i.is_exact())
        .map_or_else(|| "exact".to_string(), |i| i.method.clone());
    Ok(SquareExpansionReport {
        dim: psi.dim(),
        alpha,
        beta,
        gamma,
        lhs: lhs.value,
        gradient_coeff,
        gradient_integral: grad.value,
        value_coeff,
        value_integral: val.value,
        error_terms: [e1, e2, e3],
        rhs,
        holds: lhs.value >= rhs - tol * scale,
        tol,
        method,
    })
}

/// A batch request over random zero-average polynomials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BatchSpec {
    pub theorem: Theorem,
    pub dim: usize,
    pub k: i64,
    pub m: u32,
    pub which: HigherOrder,
    /// Weight exponent `α` of the square expansion.
    pub alpha: f64,
    pub batch: usize,
    pub seed: u64,
    pub radius: u32,
    pub real_valued: bool,
}

/// One batch entry, either inequality kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BatchReport {
    Inequality(InequalityReport),
    SquareExpansion(SquareExpansionReport),
}

impl BatchReport {
    pub fn holds(&self) -> bool {
        match self {
            BatchReport::Inequality(r) => r.holds,
            BatchReport::SquareExpansion(r) => r.holds,
        }
    }
}

/// Admissible `(β, γ)` drawn from `seed`: `β ∈ [-3, 3]` outside `(2α-1, 0)`, `γ ∈ [-3, 3]`.
pub fn random_square_params(alpha: f64, seed: u64) -> RellichParams {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_be7a);
    loop {
        let beta: f64 = rng.gen_range(-3.0..=3.0);
        if beta * beta - beta * (2.0 * alpha - 1.0) >= 0.0 {
            let gamma = rng.gen_range(-3.0..=3.0);
            return RellichParams { alpha, beta, gamma };
        }
    }
}

/// Runs one check per polynomial `random_trig_poly(dim, radius, seed + i, true, real_valued)`,
/// in parallel; results are ordered by `i`.
pub fn verify_batch(spec: &BatchSpec, cfg: &VerifyConfig) -> Result<Vec<BatchReport>> {
    (0..spec.batch)
        .into_par_iter()
        .map(|i| {
            let seed = spec.seed.wrapping_add(i as u64);
            let psi = random_trig_poly(spec.dim, spec.radius, seed, true, spec.real_valued);
            Ok(match spec.theorem {
                Theorem::Hardy => BatchReport::Inequality(verify_weighted_hardy(&psi, spec.k, cfg)?),
                Theorem::Hr => {
                    BatchReport::Inequality(verify_weighted_hardy_rellich(&psi, spec.k, cfg)?)
                }
                Theorem::Rellich => {
                    BatchReport::Inequality(verify_weighted_rellich(&psi, spec.k, cfg)?)
                }
                Theorem::Higher => BatchReport::Inequality(verify_higher_order(
                    &psi, spec.m, spec.k, spec.which, cfg,
                )?),
                Theorem::SquareExpansion => {
                    let params = random_square_params(spec.alpha, seed);
                    BatchReport::SquareExpansion(verify_square_expansion(&psi, params, cfg)?)
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::MultiIndex;
    use std::f64::consts::PI;

    fn cos1(dim: usize) -> TrigPoly {
        TrigPoly::cosine(MultiIndex::unit(dim, 0))
    }

    #[test]
    fn hardy_on_cosine_d3() {
        let r = verify_weighted_hardy(&cos1(3), 0, &VerifyConfig::default()).unwrap();
        let vol = (2.0 * PI).powi(3);
        assert!((r.rhs - vol / 2.0).abs() < 1e-12 * vol);
        assert!((r.rhs - 124.025).abs() < 1e-3);
        assert!(r.holds);
        assert!(r.ratio.unwrap() >= 3.0 / 55.0);
        assert_eq!(r.method, "heat-kernel");
    }

    #[test]
    fn zero_polynomial_is_degenerate() {
        let cfg = VerifyConfig::default();
        let z = TrigPoly::zero(5);
        let r = verify_weighted_rellich(&z, 0, &cfg).unwrap();
        assert!(r.holds && r.degenerate && r.ratio.is_none());
        let r = verify_weighted_hardy_rellich(&TrigPoly::zero(8), 0, &cfg).unwrap();
        assert!(r.holds && r.degenerate);
        assert!(verify_weighted_hardy(&TrigPoly::zero(3), 0, &cfg).unwrap().holds);
    }

    #[test]
    fn nonzero_average_is_rejected() {
        let psi = TrigPoly::one(3);
        assert!(matches!(
            verify_weighted_hardy(&psi, 0, &VerifyConfig::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn heat_kernel_and_grid_agree() {
        let psi = random_trig_poly(3, 2, 17, true, true);
        let heat = weighted_integral(&psi, Deriv::None, Factor::One, -1, &VerifyConfig::default()).unwrap();
        let cfg = VerifyConfig::with_grid(QuadratureSpec::shifted(64).unwrap());
        let grid = weighted_integral(&psi, Deriv::None, Factor::One, -1, &cfg).unwrap();
        assert!((heat.value - grid.value).abs() < 1e-5 * heat.value, "{heat:?} {grid:?}");
    }

    #[test]
    fn square_expansion_reduces_to_hardy_rellich_step() {
        // γ = 0, β = -(d-4α)/8 at α = 0, d = 8 (the smallest admissible dimension)
        let d = 8.0;
        let cfg = VerifyConfig::default();
        let p = RellichParams {
            alpha: 0.0,
            beta: -d / 8.0,
            gamma: 0.0,
        };
        let psi = random_trig_poly(8, 1, 40, true, true);
        let sq = verify_square_expansion(&psi, p, &cfg).unwrap();
        let hr = verify_weighted_hardy_rellich(&psi, 0, &cfg).unwrap();
        assert!(sq.holds);
        assert_eq!(sq.gradient_coeff, d * d / 16.0);
        assert_eq!(sq.value_coeff, 0.0);
        assert_eq!(sq.error_terms[2], 0.0);
        // same weighted integrals through both code paths
        assert!((sq.gradient_integral - hr.lhs).abs() <= 1e-10 * hr.lhs);
        assert!((sq.lhs - hr.rhs).abs() <= 1e-12 * hr.rhs);
        // E >= -(3d+4)/16 ∫|∇ψ|², the bound that turns the expansion into the HR step
        let grad0 = weighted_form(&psi, Deriv::Gradient, 0);
        let e: f64 = sq.error_terms.iter().sum();
        assert!(e >= -(3.0 * d + 4.0) / 16.0 * grad0 * (1.0 + 1e-8), "{e} vs {grad0}");
        assert!(sq.lhs >= d * d / 16.0 * sq.gradient_integral - (3.0 * d + 4.0) / 16.0 * grad0);
    }

    #[test]
    fn square_expansion_trivial_parameters() {
        let psi = random_trig_poly(5, 1, 3, true, true);
        let p = RellichParams {
            alpha: 0.0,
            beta: 0.0,
            gamma: 0.0,
        };
        let r = verify_square_expansion(&psi, p, &VerifyConfig::default()).unwrap();
        assert_eq!(r.rhs, 0.0);
        assert!(r.holds && r.lhs > 0.0);
    }

    #[test]
    fn square_expansion_domain() {
        let psi = random_trig_poly(5, 1, 3, true, true);
        let cfg = VerifyConfig::default();
        let bad_beta = RellichParams { alpha: 0.0, beta: -0.5, gamma: 0.0 };
        assert!(matches!(verify_square_expansion(&psi, bad_beta, &cfg), Err(Error::Domain { .. })));
        let low_dim = random_trig_poly(4, 1, 3, true, true);
        let ok = RellichParams { alpha: 0.0, beta: 1.0, gamma: 0.0 };
        assert!(matches!(verify_square_expansion(&low_dim, ok, &cfg), Err(Error::Domain { .. })));
    }
}
