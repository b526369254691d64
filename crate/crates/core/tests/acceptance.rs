//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::time::Instant;

use lattice_hardy::cli;
use lattice_hardy::constants::{
    discrete_bound_bracket, hardy_chain_constant, rellich_chain_constant,
    weighted_hardy_constant_exact, weighted_hardy_rellich_constant_exact, weighted_rellich_constant,
};
use lattice_hardy::correspondence::{verify_correspondence_batch, CorrespondenceKind};
use lattice_hardy::estimator::{estimate_sharp_constant, fit_log_slope, BoxSpec, EstimateOptions};
use lattice_hardy::lattice::random_lattice_function;
use lattice_hardy::InequalityKind::{self, Hardy, Rellich};
use num_bigint::BigInt;
use num_rational::BigRational;

type Check = std::result::Result<String, String>;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn closed_forms() -> Check {
    for d in 3..=200i64 {
        let want = ratio(d * (d - 2) * (d - 2), 3 * d * d + 8 * d + 4);
        let got = weighted_hardy_constant_exact(0, d).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("H(0,{d}) = {got}, closed form {want}"));
        }
    }
    for d in 8..=200i64 {
        let want = ratio(d * d, 3 * d + 20);
        let got = weighted_hardy_rellich_constant_exact(0, d).map_err(|e| e.to_string())?;
        if got != want {
            return Err(format!("HR(0,{d}) = {got}, closed form {want}"));
        }
    }
    Ok("H(0,d) for d=3..200 and HR(0,d) for d=8..200 exact".into())
}

fn correspondence() -> Check {
    let mut worst = 0.0f64;
    let mut configs = 0;
    for kind in [Hardy, Rellich] {
        for dim in 1..=4 {
            for k in 0..=2 {
                let reports = verify_correspondence_batch(dim, CorrespondenceKind::new(kind, k), 50, 1000 + dim as u64, 2)
                    .map_err(|e| format!("{kind:?} d={dim} k={k}: {e}"))?;
                for r in &reports {
                    let e = r.max_rel_err();
                    if !(e < 1e-10) {
                        return Err(format!("{kind:?} d={dim} k={k} seed {}: rel_err {e:e}", r.seed));
                    }
                    worst = worst.max(e);
                }
                configs += 1;
            }
        }
    }
    Ok(format!("{configs} configurations x 50 functions, max rel_err {worst:.2e}"))
}

fn torus_batches() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: &[&[&str]] = &[
        &["--theorem", "hardy", "--dim", "3", "--k", "0"],
        &["--theorem", "hardy", "--dim", "4", "--k", "0"],
        &["--theorem", "hardy", "--dim", "5", "--k", "-1"],
        &["--theorem", "hardy", "--dim", "6", "--k", "-1"],
        &["--theorem", "hr", "--dim", "8", "--k", "0"],
        &["--theorem", "rellich", "--dim", "5", "--k", "0"],
        &["--theorem", "rellich", "--dim", "6", "--k", "0"],
        &["--theorem", "square-expansion", "--dim", "6", "--alpha", "0"],
        &["--theorem", "higher", "--which", "laplacian", "--m", "1", "--dim", "5"],
        &["--theorem", "higher", "--which", "laplacian", "--m", "1", "--dim", "7"],
        &["--theorem", "higher", "--which", "grad-laplacian", "--m", "1", "--dim", "7"],
    ];
    let mut reports = 0;
    for (i, run) in runs.iter().enumerate() {
        let out = dir.path().join(format!("run{i}.jsonl"));
        let mut args = vec!["lattice-hardy", "verify-torus", "--batch", "100", "--seed", "0"];
        args.extend_from_slice(run);
        args.extend_from_slice(&["--output", out.to_str().unwrap()]);
        let code = cli::run(args.iter().copied());
        if code != 0 {
            return Err(format!("{} exited with {code}", run.join(" ")));
        }
        let text = std::fs::read_to_string(&out).map_err(|e| e.to_string())?;
        let n = text.lines().count();
        if n != 100 {
            return Err(format!("{}: {n} reports", run.join(" ")));
        }
        reports += n;
    }
    Ok(format!("{} configurations, {reports} polynomials, no falsification", runs.len()))
}

fn estimate(k: u32, dim: usize, radius: u32, kind: InequalityKind) -> std::result::Result<f64, String> {
    let spec = BoxSpec::new(dim, radius).map_err(|e| e.to_string())?;
    estimate_sharp_constant(k, spec, kind, &EstimateOptions::default())
        .map(|r| r.value)
        .map_err(|e| format!("{kind:?} k={k} d={dim} R={radius}: {e}"))
}

fn brackets() -> Check {
    let mut parts = Vec::new();
    let cases = [(Hardy, 0, 3, 4), (Hardy, 0, 4, 4), (Hardy, 0, 5, 4), (Hardy, 0, 6, 4), (Rellich, 1, 5, 3), (Rellich, 1, 6, 3)];
    for (kind, k, d, r) in cases {
        let b = discrete_bound_bracket(k, d as u32, kind).map_err(|e| e.to_string())?;
        let v = estimate(k, d, r, kind)?;
        if !b.contains(v) {
            return Err(format!("{kind:?} k={k} d={d}: {v} outside [{}, {}]", b.lower, b.upper));
        }
        parts.push(format!("{}{d}: {:.4} <= {v:.4} <= {}", kind.name(), b.lower, b.upper));
    }
    // the lower ends are the torus constants scaled by 4 and 16
    for d in 3..=6i64 {
        let b = discrete_bound_bracket(0, d as u32, Hardy).unwrap();
        let h = lattice_hardy::constants::weighted_hardy_constant(0, d).unwrap();
        if (b.lower - 4.0 * h).abs() > 1e-14 * b.lower || b.upper != 4.0 * d as f64 {
            return Err(format!("hardy bracket endpoints at d={d}"));
        }
    }
    for d in 5..=6i64 {
        let b = discrete_bound_bracket(1, d as u32, Rellich).unwrap();
        let r = weighted_rellich_constant(0, d).unwrap();
        if (b.lower - 16.0 * r).abs() > 1e-14 * b.lower || b.upper != 16.0 * (d * d) as f64 {
            return Err(format!("rellich bracket endpoints at d={d}"));
        }
    }
    Ok(parts.join("; "))
}

fn hand_values() -> Check {
    let h = estimate(0, 1, 1, Hardy)?;
    let r = estimate(1, 1, 1, Rellich)?;
    if (h - 2.0).abs() > 1e-10 || (r - 5.0).abs() > 1e-10 {
        return Err(format!("hardy {h}, rellich {r}"));
    }
    let mut prev = f64::INFINITY;
    let mut floor = Vec::new();
    for e in 0..=9 {
        let radius = 1u32 << e;
        let v = estimate(0, 1, radius, Hardy)?;
        // monotone up to the eigensolver tolerance
        if v < 0.25 || v > prev * (1.0 + 1e-8) {
            return Err(format!("1-D floor at R={radius}: {v} (previous {prev})"));
        }
        prev = v;
        floor.push(v);
    }
    Ok(format!("hardy {h:.12}, rellich {r:.12}, 1-D R=512 value {:.6}", floor[9]))
}

fn slopes() -> Check {
    // every integer dimension in [2^6, 2^12]
    let dims: Vec<f64> = (64..=4096).map(f64::from).collect();
    let mut parts = Vec::new();
    let mut misses = Vec::new();
    for k in 0..=2u32 {
        let s = i32::try_from(k).unwrap();
        let fit = |f: &dyn Fn(i64) -> lattice_hardy::Result<f64>| -> std::result::Result<f64, String> {
            let pts = dims
                .iter()
                .map(|&d| f(d as i64).map(|v| (d, v)))
                .collect::<lattice_hardy::Result<Vec<_>>>()
                .map_err(|e| e.to_string())?;
            fit_log_slope(&pts).map(|f| f.slope).map_err(|e| e.to_string())
        };
        let hardy_lower = fit(&|d| Ok(4f64.powi(2 * s + 1) * hardy_chain_constant(k, 0, d)?))?;
        let rellich_lower = fit(&|d| Ok(4f64.powi(2 * s) * rellich_chain_constant(k, 0, d)?))?;
        let hardy_upper = fit(&|d| Ok(4f64.powi(2 * s + 1) * (d as f64).powi(2 * s + 1)))?;
        let rellich_upper = fit(&|d| Ok(4f64.powi(2 * s) * (d as f64).powi(2 * s)))?;
        let (h, r) = (f64::from(2 * k + 1), f64::from(2 * k));
        for (name, got, want, tol) in [
            ("hardy lower", hardy_lower, h, 0.05),
            ("rellich lower", rellich_lower, r, 0.05),
            ("hardy upper", hardy_upper, h, 1e-12),
            ("rellich upper", rellich_upper, r, 1e-12),
        ] {
            if !((got - want).abs() <= tol) {
                misses.push(format!("k={k} {name} slope {got:.4}, want {want} +- {tol}"));
            }
        }
        parts.push(format!("k={k}: {hardy_lower:.4}/{rellich_lower:.4}"));
    }
    let summary = format!("lower-bound slopes (hardy/rellich) {}", parts.join(", "));
    if misses.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", misses.join("; ")))
    }
}

fn operator_norm() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for dim in 2..=4 {
        for k in 1..=2u32 {
            let d = dim as f64;
            for i in 0..200u64 {
                let u = random_lattice_function(dim, 2, 7000 + 1000 * dim as u64 + 100 * u64::from(k) + i, false);
                let mass = u.norm_sq();
                let rel = u.rellich_form(k);
                let dir = u.dirichlet_form(k);
                let rel_bound = 4f64.powi(2 * k as i32) * d.powi(2 * k as i32) * mass;
                let dir_bound = 4f64.powi(2 * k as i32 + 1) * d.powi(2 * k as i32 + 1) * mass;
                if rel > rel_bound || dir > dir_bound {
                    return Err(format!("d={dim} k={k} sample {i}: {rel} vs {rel_bound}, {dir} vs {dir_bound}"));
                }
                worst = worst.max(rel / rel_bound).max(dir / dir_bound);
                count += 1;
            }
        }
    }
    Ok(format!("{count} functions, largest form/bound ratio {worst:.4}"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 7] = [
        ("closed-form constants", closed_forms),
        ("correspondence identities", correspondence),
        ("torus inequalities", torus_batches),
        ("bracket containment", brackets),
        ("hand values and 1-D floor", hand_values),
        ("asymptotic slopes", slopes),
        ("operator-norm bound", operator_norm),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
