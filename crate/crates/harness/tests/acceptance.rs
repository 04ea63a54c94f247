//! Acceptance criteria, one `criterion N: PASS|FAIL` line each.
//!
//! Runs without the libtest harness so the criteria execute in order and
//! the timings are not skewed by other tests sharing the machine.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use pwenv::checks::{self, Context};
use pwenv::config::ExperimentConfig;
use pwenv::report::{Status, VerificationReport};

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        ok,
        detail: detail.into(),
    }
}

fn context() -> Context {
    Context::new(ExperimentConfig::default()).expect("default config is valid")
}

fn failures(rep: &VerificationReport) -> Vec<String> {
    rep.records
        .iter()
        .filter(|r| r.failed())
        .map(|r| {
            format!(
                "{} {:?} lhs={} rhs={} note={:?}",
                r.check, r.inputs, r.lhs, r.rhs, r.note
            )
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let rep = checks::check_plancherel_polya(&context());
    let bad = failures(&rep);
    let axis_ok = rep
        .check("plancherel-polya")
        .filter(|r| r.inputs.get("y").and_then(|v| v.as_f64()) == Some(0.0))
        .all(|r| (r.lhs - r.rhs).abs() <= 1e-9 * r.rhs.abs());
    let rows = rep.summary.total - rep.summary.skipped;
    verdict(
        bad.is_empty() && axis_ok && rows > 0,
        format!(
            "{rows} rows, {} failures, {} low-confidence, axis rows exact: {axis_ok} {bad:?}",
            bad.len(),
            rep.summary.low_confidence
        ),
    )
}

fn criterion_2() -> Verdict {
    let rep = checks::check_projection(&context());
    let bad = failures(&rep);
    let inverse = rep.check("projection-inverse").count();
    let diagonal = rep.check("t-diagonal").count();
    let worst = rep
        .check("projection-inverse")
        .map(|r| r.lhs / r.budget.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    verdict(
        bad.is_empty() && inverse >= 6 && diagonal == inverse,
        format!("{inverse} functions incl. zero, worst error/budget {worst:.2e} {bad:?}"),
    )
}

fn criterion_3() -> Verdict {
    let rep = checks::check_conformal(&context());
    let bad = failures(&rep);
    let closed: Vec<_> = rep.check("transfer-closed-form").collect();
    let closed_ok = closed.len() == 2
        && closed
            .iter()
            .all(|r| r.status == Status::Pass && (r.lhs - PI).abs() <= 1e-6 * PI);
    verdict(
        bad.is_empty() && closed_ok,
        format!(
            "{} rows, closed form sides {:?}, {} failures {bad:?}",
            rep.summary.total,
            closed.iter().map(|r| r.lhs).collect::<Vec<_>>(),
            bad.len()
        ),
    )
}

fn criterion_4() -> Verdict {
    let rep = checks::check_closed_forms(&context());
    let bad = failures(&rep);
    let norms: Vec<_> = rep.check("closed-form-norm").collect();
    let ok = norms.len() == 2 && norms.iter().all(|r| (r.lhs - r.rhs).abs() <= 1e-6 * r.rhs);
    verdict(
        bad.is_empty() && ok,
        format!(
            "E^1, E^2 of fejer(pi/2): {:?}",
            norms.iter().map(|r| r.lhs).collect::<Vec<_>>()
        ),
    )
}

fn criterion_5() -> Verdict {
    let rep = checks::run_counterexample_sweep(&context());
    let bad = failures(&rep);
    let monotone = rep.check("counterexample-monotone").all(|r| r.status == Status::Pass);
    let growth = rep.check("counterexample-growth").count() > 0
        && rep.check("counterexample-growth").all(|r| r.status == Status::Pass);
    let ratios: Vec<String> = rep
        .check("counterexample-ratio")
        .map(|r| {
            format!(
                "k={} eps={} {}",
                r.inputs["k"],
                r.inputs["eps"],
                r.note.as_deref().unwrap_or("")
            )
        })
        .collect();
    let factors: Vec<String> = rep
        .check("counterexample-growth")
        .map(|r| format!("k={} {}", r.inputs["k"], r.note.as_deref().unwrap_or("")))
        .collect();
    verdict(
        bad.is_empty() && monotone && growth,
        format!("strictly increasing: {monotone}; growth >= 2: {growth}; {factors:?}; {ratios:?}"),
    )
}

fn criterion_6() -> Verdict {
    let rep = checks::check_envelope_consistency(&context());
    let bad = failures(&rep);
    let compared = rep
        .check("envelope-consistency")
        .filter(|r| matches!(r.status, Status::Pass | Status::LowConfidence))
        .count();
    // Fejér decays like x^-2, so its line tails are always flagged as
    // dominant; the row still has to agree to the stated tolerance.
    let closed = rep
        .check("envelope-closed-form")
        .all(|r| matches!(r.status, Status::Pass | Status::LowConfidence));
    verdict(
        bad.is_empty() && compared >= 3 && closed,
        format!("{compared} functions agree with direct quadrature, fejer closed form: {closed} {bad:?}"),
    )
}

fn criterion_7() -> Verdict {
    let (rep, docs) = checks::run_equivalence_study(&context());
    let bad = failures(&rep);
    let in_band = rep
        .check("equivalence-ratio")
        .filter(|r| matches!(r.status, Status::Pass | Status::LowConfidence))
        .count();
    let constants = rep.check("equivalence-constants").next();
    verdict(
        bad.is_empty() && in_band >= 10 && constants.is_some() && docs.len() == in_band,
        format!(
            "{in_band} ratios in [1e-3, 1e3], empirical constants {:?} {bad:?}",
            constants.map(|r| (r.lhs, r.rhs))
        ),
    )
}

fn criterion_8() -> Verdict {
    let rep = checks::check_q_envelope(&context());
    let bad = failures(&rep);
    let pairs = rep.check("q-triangle").filter(|r| r.status != Status::Skipped).count();
    let homogeneous = rep.check("q-homogeneity").count();
    verdict(
        bad.is_empty() && pairs == 20 && homogeneous > 0,
        format!(
            "{pairs} pairs, {homogeneous} homogeneity rows, {} failures {bad:?}",
            bad.len()
        ),
    )
}

fn run_cli(config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_pwenv"))
        .args(["verify", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .args(["--seed", "7"])
        .stderr(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if status.code() == Some(2) {
        return Err(format!("cli exited with {status}"));
    }
    Ok(())
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().expect("tempdir");
    let config = dir.path().join("small.toml");
    std::fs::write(
        &config,
        "suite = \"determinism\"\n\
         p_grid = [0.75]\n\
         y_grid = [-1.0, 0.5]\n\
         eps_grid = [1.0, 0.5]\n\
         smoothness_grid = [3]\n\
         [q_envelope]\n\
         pairs = 3\n",
    )
    .expect("write config");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    if let Err(e) = run_cli(&config, &a).and_then(|_| run_cli(&config, &b)) {
        return verdict(false, e);
    }
    let mut compared = 0;
    for name in ["verify.json", "verify.csv"] {
        let (x, y) = (std::fs::read(a.join(name)), std::fs::read(b.join(name)));
        match (x, y) {
            (Ok(x), Ok(y)) if x == y => compared += 1,
            (Ok(_), Ok(_)) => return verdict(false, format!("{name} differs between runs")),
            _ => return verdict(false, format!("{name} missing")),
        }
    }
    verdict(true, format!("{compared} report files byte-identical across two runs"))
}

type Criterion = (u32, fn() -> Verdict, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Some(Duration::from_secs(30))),
        (2, criterion_2, Some(Duration::from_secs(10))),
        (3, criterion_3, Some(Duration::from_secs(60))),
        (4, criterion_4, Some(Duration::from_secs(5))),
        (5, criterion_5, Some(Duration::from_secs(300))),
        (6, criterion_6, Some(Duration::from_secs(300))),
        (7, criterion_7, None),
        (8, criterion_8, Some(Duration::from_secs(120))),
        (9, criterion_9, None),
    ];
    let only: Option<u32> = std::env::var("PWENV_CRITERION").ok().and_then(|s| s.parse().ok());
    let mut all_ok = true;
    for (n, run, limit) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let in_time = limit.is_none_or(|l| took <= l);
        let ok = v.ok && in_time;
        all_ok &= ok;
        let budget = limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
        println!(
            "criterion {n}: {} in {:.1}s{budget}: {}",
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            v.detail
        );
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
