//! The `lattice-hardy` command line.
//!
//! Exit codes: 0 on success, 1 on usage or domain errors, 2 when any check comes out false.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::constants::{
    discrete_bound_bracket, hardy_chain_constant, rellich_chain_constant, weighted_hardy_constant,
    weighted_hardy_rellich_constant, weighted_rellich_constant,
};
use crate::correspondence::{
    verify_correspondence_batch, verify_identity_forms, verify_identity_lhs_rhs,
    CorrespondenceKind, CorrespondenceReport,
};
use crate::error::{Error, Result};
use crate::estimator::{
    basis_budget, estimate_sharp_constant, fit_log_slope, quotient, sweep, BoxSpec,
    EstimateOptions, EstimateResult, LogLogFit, SweepRow,
};
use crate::lattice::{unit_shell_indicator, LatticeFunction};
use crate::torus::{
    verify_batch, BatchReport, BatchSpec, HigherOrder, Integrator, QuadratureSpec, Theorem,
    VerifyConfig,
};
use crate::InequalityKind;

/// Relative error above which a correspondence identity counts as failed.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "lattice-hardy", version, about = "Discrete Hardy and Rellich constants on Z^d")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads; 1 gives serial, bit-stable runs.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write results here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tables of the torus constants.
    Constants(ConstantsArgs),
    /// Box estimate of one lattice sharp constant.
    Estimate(EstimateArgs),
    /// Box estimates over a range of dimensions, with brackets and an optional slope fit.
    Sweep(SweepArgs),
    /// Randomized checks of the torus inequalities.
    VerifyTorus(VerifyTorusArgs),
    /// Checks of the lattice-to-torus identities.
    VerifyCorrespondence(VerifyCorrespondenceArgs),
    /// Proved lower and test-function upper bounds for the lattice constants.
    Bounds(BoundsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Table {
    Hardy,
    Hr,
    Rellich,
    /// `C(m,k,d)`.
    RellichChain,
    /// `C̃(m,k,d)`.
    HardyChain,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ConstantsArgs {
    #[arg(long, value_enum)]
    pub table: Table,
    /// Dimensions: `a..b` (inclusive) or a comma list.
    #[arg(long, value_parser = parse_dims)]
    pub dims: Dims,
    /// Weight exponent, non-positive.
    #[arg(long, default_value_t = 0)]
    pub k: i64,
    /// Chain length for the chain tables.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub dim: usize,
    /// Order `k` of the lattice inequality.
    #[arg(long, default_value_t = 0)]
    pub order: u32,
    #[arg(long)]
    pub radius: u32,
    #[arg(long, value_enum)]
    pub kind: InequalityKind,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Memory layout of the box axes, e.g. `2,0,1`.
    #[arg(long, value_delimiter = ',')]
    pub axis_order: Option<Vec<usize>>,
    /// Write the minimising vector in the lattice text format.
    #[arg(long)]
    pub output_vector: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_dims)]
    pub dims: Dims,
    #[arg(long, default_value_t = 0)]
    pub order: u32,
    #[arg(long)]
    pub radius: u32,
    #[arg(long, value_enum)]
    pub kind: InequalityKind,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Fit a log-log slope to the estimates (needs at least 3 dimensions).
    #[arg(long)]
    pub fit: bool,
    /// Write estimate, lower and upper series as JSON for plotting.
    #[arg(long)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyTorusArgs {
    #[arg(long)]
    pub dim: usize,
    /// Weight exponent `k <= 0`.
    #[arg(long, default_value_t = 0)]
    pub k: i64,
    /// Chain length for `--theorem higher`.
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, value_enum)]
    pub theorem: Theorem,
    #[arg(long, value_enum, default_value_t = HigherOrder::Laplacian)]
    pub which: HigherOrder,
    /// `α` for the square expansion; `2α` must be an integer.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100)]
    pub batch: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Shifted midpoint grid with this many nodes per axis instead of the heat-kernel integrator.
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub radius: u32,
    /// Complex rather than real-valued random polynomials.
    #[arg(long)]
    pub complex: bool,
}

#[derive(Debug, Args)]
pub struct VerifyCorrespondenceArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub k: u32,
    #[arg(long, value_enum)]
    pub kind: InequalityKind,
    #[arg(long, default_value_t = 50)]
    pub batch: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 2)]
    pub radius: u32,
    /// Check one lattice function read from this file instead of a random batch.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long, value_parser = parse_dims)]
    pub dims: Dims,
    #[arg(long, default_value_t = 0)]
    pub order: u32,
    #[arg(long, value_enum)]
    pub kind: InequalityKind,
}

/// A list of dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dims(pub Vec<usize>);

/// `a..b`, `a..=b` (both inclusive) or `a,b,c`.
pub fn parse_dims(s: &str) -> std::result::Result<Dims, String> {
    let bad = || format!("expected a..b or a comma list of dimensions, got {s:?}");
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let dims = if let Some((a, b)) = s.split_once("..") {
        let a = num(a)?;
        let b = num(b.trim_start_matches('='))?;
        if b < a {
            return Err(format!("empty dimension range {s:?}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if dims.contains(&0) {
        return Err("dimensions must be positive".into());
    }
    Ok(Dims(dims))
}

/// Parses `args` (program name first) and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(Outcome::Success) => 0,
        Ok(Outcome::Falsified(msg)) => {
            eprintln!("falsified: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[derive(Debug, PartialEq)]
pub enum Outcome {
    Success,
    Falsified(String),
}

fn writer(cli: &Cli) -> Result<Box<dyn Write>> {
    Ok(match &cli.output {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Argument("--threads must be positive".into()));
        }
        // a second call in the same process keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::Constants(a) => constants_cmd(cli, a),
        Command::Estimate(a) => estimate_cmd(cli, a),
        Command::Sweep(a) => sweep_cmd(cli, a),
        Command::VerifyTorus(a) => verify_torus_cmd(cli, a),
        Command::VerifyCorrespondence(a) => verify_correspondence_cmd(cli, a),
        Command::Bounds(a) => bounds_cmd(cli, a),
    }
}

fn csv_f64(v: f64) -> String {
    format!("{v:?}")
}

fn write_json_lines<T: Serialize>(out: &mut dyn Write, items: &[T]) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut *out, item)?;
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct ConstantRow {
    name: &'static str,
    k: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    m: Option<u32>,
    d: usize,
    value: f64,
}

fn constants_cmd(cli: &Cli, a: &ConstantsArgs) -> Result<Outcome> {
    let chain = matches!(a.table, Table::RellichChain | Table::HardyChain);
    let rows = a
        .dims
        .0
        .iter()
        .map(|&d| {
            let di = d as i64;
            let (name, value) = match a.table {
                Table::Hardy => ("H", weighted_hardy_constant(a.k, di)?),
                Table::Hr => ("HR", weighted_hardy_rellich_constant(a.k, di)?),
                Table::Rellich => ("R", weighted_rellich_constant(a.k, di)?),
                Table::RellichChain => ("C", rellich_chain_constant(a.m, a.k, di)?),
                Table::HardyChain => ("C~", hardy_chain_constant(a.m, a.k, di)?),
            };
            Ok(ConstantRow {
                name,
                k: a.k,
                m: chain.then_some(a.m),
                d,
                value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = writer(cli)?;
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "{}", if chain { "name,k,m,d,value" } else { "name,k,d,value" })?;
            for r in &rows {
                match r.m {
                    Some(m) => writeln!(out, "{},{},{},{},{}", r.name, r.k, m, r.d, csv_f64(r.value))?,
                    None => writeln!(out, "{},{},{},{}", r.name, r.k, r.d, csv_f64(r.value))?,
                }
            }
        }
    }
    out.flush()?;
    Ok(Outcome::Success)
}

#[derive(Debug, Serialize)]
struct EstimateOutput<'a> {
    #[serde(flatten)]
    result: &'a EstimateResult,
    test_quotient: f64,
    lower: Option<f64>,
    upper: Option<f64>,
}

fn estimate_options(tol: f64) -> Result<EstimateOptions> {
    Ok(EstimateOptions {
        tol,
        budget: basis_budget()?,
        ..Default::default()
    })
}

fn estimate_cmd(cli: &Cli, a: &EstimateArgs) -> Result<Outcome> {
    let spec = BoxSpec::new(a.dim, a.radius)?;
    let mut opts = estimate_options(a.tol)?;
    opts.axis_order = a.axis_order.clone();
    let result = estimate_sharp_constant(a.order, spec, a.kind, &opts)?;
    let test_quotient = quotient(&unit_shell_indicator(a.dim), a.order, a.kind)?;
    let bracket = discrete_bound_bracket(a.order, a.dim as u32, a.kind).ok();
    if let (Some(path), Some(v)) = (&a.output_vector, &result.vector) {
        v.write_text(BufWriter::new(File::create(path)?))?;
    }
    let mut out = writer(cli)?;
    match cli.format {
        Format::Json => {
            let o = EstimateOutput {
                result: &result,
                test_quotient,
                lower: bracket.map(|b| b.lower),
                upper: bracket.map(|b| b.upper),
            };
            serde_json::to_writer_pretty(&mut out, &o)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "kind,k,d,radius,value,iterations,residual,quotient_check,test_quotient")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                a.kind.name(),
                a.order,
                a.dim,
                a.radius,
                csv_f64(result.value),
                result.iterations,
                csv_f64(result.residual),
                csv_f64(result.quotient_check),
                csv_f64(test_quotient)
            )?;
        }
    }
    out.flush()?;
    Ok(Outcome::Success)
}

#[derive(Debug, Serialize, PartialEq)]
pub struct PlotSeries {
    pub name: String,
    pub points: Vec<(usize, f64)>,
}

#[derive(Debug, Serialize, PartialEq)]
pub struct PlotData {
    pub series: Vec<PlotSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<LogLogFit>,
}

/// Estimate, lower and upper series of a sweep; the fit is kept only with 3 or more points.
pub fn emit_plot_data(rows: &[SweepRow], fit: bool) -> Result<PlotData> {
    if rows.is_empty() {
        return Err(Error::Argument("no sweep rows to plot".into()));
    }
    let series = |name: &str, f: &dyn Fn(&SweepRow) -> Option<f64>| PlotSeries {
        name: name.into(),
        points: rows.iter().filter_map(|r| f(r).map(|v| (r.d, v))).collect(),
    };
    let fit = if fit && rows.len() >= 3 {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.d as f64, r.estimate.value)).collect();
        Some(fit_log_slope(&pts)?)
    } else {
        None
    };
    Ok(PlotData {
        series: vec![
            series("estimate", &|r| Some(r.estimate.value)),
            series("lower", &|r| r.bracket.map(|b| b.lower)),
            series("upper", &|r| r.bracket.map(|b| b.upper)),
        ],
        fit,
    })
}

#[derive(Debug, Serialize)]
struct SweepOutput<'a> {
    rows: &'a [SweepRow],
    #[serde(skip_serializing_if = "Option::is_none")]
    fit: Option<LogLogFit>,
}

fn sweep_cmd(cli: &Cli, a: &SweepArgs) -> Result<Outcome> {
    let opts = estimate_options(a.tol)?;
    let rows = sweep(a.order, a.kind, &a.dims.0, a.radius, &opts)?;
    let fit = if a.fit && rows.len() >= 3 {
        let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.d as f64, r.estimate.value)).collect();
        Some(fit_log_slope(&pts)?)
    } else {
        None
    };
    if let Some(path) = &a.plot_data {
        let plot = emit_plot_data(&rows, a.fit)?;
        let mut f = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut f, &plot)?;
        writeln!(f)?;
        f.flush()?;
    }
    let mut out = writer(cli)?;
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &SweepOutput { rows: &rows, fit })?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "kind,k,d,radius,value,lower,upper,test_quotient,contained,iterations,residual")?;
            for r in &rows {
                let opt = |v: Option<f64>| v.map(csv_f64).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    a.kind.name(),
                    a.order,
                    r.d,
                    a.radius,
                    csv_f64(r.estimate.value),
                    opt(r.bracket.map(|b| b.lower)),
                    opt(r.bracket.map(|b| b.upper)),
                    csv_f64(r.test_quotient),
                    r.contained.map(|c| c.to_string()).unwrap_or_default(),
                    r.estimate.iterations,
                    csv_f64(r.estimate.residual)
                )?;
            }
            if let Some(f) = fit {
                writeln!(out, "# slope={},intercept={},r2={}", csv_f64(f.slope), csv_f64(f.intercept), csv_f64(f.r2))?;
            }
        }
    }
    out.flush()?;
    let outside: Vec<usize> = rows.iter().filter(|r| r.contained == Some(false)).map(|r| r.d).collect();
    Ok(if outside.is_empty() {
        Outcome::Success
    } else {
        Outcome::Falsified(format!("estimates outside their brackets for d = {outside:?}"))
    })
}

#[derive(Debug, Serialize)]
struct SeededReport<'a> {
    seed: u64,
    #[serde(flatten)]
    report: &'a BatchReport,
}

fn verify_torus_cmd(cli: &Cli, a: &VerifyTorusArgs) -> Result<Outcome> {
    let d = a.dim as i64;
    // domain checks before any polynomial is built
    match a.theorem {
        Theorem::Hardy => drop(weighted_hardy_constant(a.k, d)?),
        Theorem::Hr => drop(weighted_hardy_rellich_constant(a.k, d)?),
        Theorem::Rellich => drop(weighted_rellich_constant(a.k, d)?),
        Theorem::Higher => match a.which {
            HigherOrder::Laplacian => drop(rellich_chain_constant(a.m, a.k, d)?),
            HigherOrder::GradLaplacian => drop(hardy_chain_constant(a.m, a.k, d)?),
        },
        Theorem::SquareExpansion => {
            if !(a.alpha <= 0.0 && (2.0 * a.alpha).fract() == 0.0) {
                return Err(Error::domain("square expansion", "alpha <= 0 with 2·alpha an integer"));
            }
            if a.dim as f64 <= -4.0 * a.alpha + 4.0 {
                return Err(Error::domain(
                    format!("square expansion in dimension {}", a.dim),
                    "d > -4α+4",
                ));
            }
        }
    }
    if a.radius == 0 {
        return Err(Error::Argument("--radius must be at least 1".into()));
    }
    let mut cfg = VerifyConfig::default();
    if let Some(n) = a.grid {
        cfg.integrator = Integrator::Grid(QuadratureSpec::shifted(n)?);
    }
    let spec = BatchSpec {
        theorem: a.theorem,
        dim: a.dim,
        k: a.k,
        m: a.m,
        which: a.which,
        alpha: a.alpha,
        batch: a.batch,
        seed: a.seed,
        radius: a.radius,
        real_valued: !a.complex,
    };
    let reports = verify_batch(&spec, &cfg)?;
    let mut out = writer(cli)?;
    match cli.format {
        Format::Json => {
            let seeded: Vec<SeededReport> = reports
                .iter()
                .enumerate()
                .map(|(i, r)| SeededReport {
                    seed: a.seed.wrapping_add(i as u64),
                    report: r,
                })
                .collect();
            write_json_lines(&mut out, &seeded)?;
        }
        Format::Csv => {
            writeln!(out, "seed,theorem,d,k,constant,lhs,rhs,holds,method")?;
            for (i, r) in reports.iter().enumerate() {
                let seed = a.seed.wrapping_add(i as u64);
                match r {
                    BatchReport::Inequality(r) => writeln!(
                        out,
                        "{seed},{},{},{},{},{},{},{},{}",
                        r.theorem,
                        r.dim,
                        r.k,
                        csv_f64(r.constant),
                        csv_f64(r.lhs),
                        csv_f64(r.rhs),
                        r.holds,
                        r.method
                    )?,
                    BatchReport::SquareExpansion(r) => writeln!(
                        out,
                        "{seed},square-expansion,{},{},,{},{},{},{}",
                        r.dim,
                        csv_f64(r.alpha),
                        csv_f64(r.lhs),
                        csv_f64(r.rhs),
                        r.holds,
                        r.method
                    )?,
                }
            }
        }
    }
    out.flush()?;
    let failed: Vec<u64> = reports
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.holds())
        .map(|(i, _)| a.seed.wrapping_add(i as u64))
        .collect();
    Ok(if failed.is_empty() {
        Outcome::Success
    } else {
        Outcome::Falsified(format!("inequality fails for seeds {failed:?}"))
    })
}

fn verify_correspondence_cmd(cli: &Cli, a: &VerifyCorrespondenceArgs) -> Result<Outcome> {
    let kind = CorrespondenceKind::new(a.kind, a.k);
    let reports = match &a.input {
        Some(path) => {
            let u = LatticeFunction::read_text(BufReader::new(File::open(path)?))?;
            if let Some(d) = a.dim {
                if d != u.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: u.dim(),
                    });
                }
            }
            vec![CorrespondenceReport {
                seed: a.seed,
                weighted_norm: verify_identity_lhs_rhs(&u, kind)?,
                energy: verify_identity_forms(&u, kind)?,
            }]
        }
        None => {
            let dim = a
                .dim
                .ok_or_else(|| Error::Argument("--dim is required without --input".into()))?;
            if dim == 0 || a.radius == 0 {
                return Err(Error::Argument("--dim and --radius must be positive".into()));
            }
            verify_correspondence_batch(dim, kind, a.batch, a.seed, a.radius)?
        }
    };
    let mut out = writer(cli)?;
    match cli.format {
        Format::Json => write_json_lines(&mut out, &reports)?,
        Format::Csv => {
            writeln!(out, "seed,kind,k,d,identity,lhs,rhs,rel_err")?;
            for r in &reports {
                for id in [&r.weighted_norm, &r.energy] {
                    writeln!(
                        out,
                        "{},{},{},{},{},{},{},{}",
                        r.seed,
                        id.kind.name(),
                        id.k,
                        id.dim,
                        id.identity,
                        csv_f64(id.lhs),
                        csv_f64(id.rhs),
                        csv_f64(id.rel_err)
                    )?;
                }
            }
        }
    }
    out.flush()?;
    let failed: Vec<u64> = reports
        .iter()
        .filter(|r| !(r.max_rel_err() < IDENTITY_TOL))
        .map(|r| r.seed)
        .collect();
    Ok(if failed.is_empty() {
        Outcome::Success
    } else {
        Outcome::Falsified(format!("identity error above {IDENTITY_TOL:e} for seeds {failed:?}"))
    })
}

fn bounds_cmd(cli: &Cli, a: &BoundsArgs) -> Result<Outcome> {
    let rows = a
        .dims
        .0
        .iter()
        .map(|&d| discrete_bound_bracket(a.order, d as u32, a.kind))
        .collect::<Result<Vec<_>>>()?;
    let mut out = writer(cli)?;
    match cli.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(out, "kind,k,d,lower,upper")?;
            for b in &rows {
                writeln!(out, "{},{},{},{},{}", b.kind.name(), b.k, b.d, csv_f64(b.lower), csv_f64(b.upper))?;
            }
        }
    }
    out.flush()?;
    Ok(Outcome::Success)
}
