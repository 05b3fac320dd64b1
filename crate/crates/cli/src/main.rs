mod plot;
mod schema;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use hypwind::checks;
use hypwind::schottky::{self, NestedSpec};
use hypwind::walpha::{self, ConvergenceReport};

use schema::{fmt_real, CheckMeta, CheckReport, Input, Real, RunFile, SequenceFile, SuiteEntry};

#[derive(Parser)]
#[command(
    name = "hypwind",
    version,
    about = "Winding of geodesic rays around short closed geodesics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a nested sequence of hyperbolic generators.
    Construct(ConstructArgs),
    /// Run the seeded invariant suites.
    Check(CheckArgs),
    /// Iterate the winding along a subsequence and check convergence of w_α.
    Walpha(WalphaArgs),
    /// Draw a sequence or run as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct ConstructArgs {
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Scale A_0 of the first axis (−A_0, A_0).
    #[arg(long, default_value_t = std::f64::consts::E)]
    first_scale: f64,
    #[arg(long, default_value_t = 4.0)]
    margin: f64,
    /// Translation lengths, comma separated; defaults to 2^{−(2n+3)}.
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<f64>>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Report file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WalphaArgs {
    /// Sequence or run JSON.
    file: PathBuf,
    /// Indices of the subsequence; all generators by default.
    #[arg(long, value_delimiter = ',', conflicts_with = "avoid")]
    pick: Option<Vec<usize>>,
    #[arg(long, default_value_t = 25.0)]
    t_max: f64,
    #[arg(long, default_value_t = 0.25)]
    step: f64,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// Convergence table for the deepest vector.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Boundary values the limit endpoint must avoid; selects the pick.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    avoid: Option<Vec<f64>>,
    /// Write the run (sequence plus pick, endpoints and times) as JSON.
    #[arg(long)]
    run_out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Sequence or run JSON.
    file: PathBuf,
    /// Output file; standard output when omitted.
    #[arg(long)]
    svg: Option<PathBuf>,
}

/// Outcome of a command that ran to completion.
enum Verdict {
    Pass,
    Violation,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => construct(a),
        Command::Check(a) => check(a),
        Command::Walpha(a) => walpha_cmd(a),
        Command::Plot(a) => plot_cmd(a),
    };
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json_text<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn construct(a: ConstructArgs) -> anyhow::Result<Verdict> {
    let mut spec = NestedSpec::with_depth(a.depth);
    spec.first_scale = a.first_scale;
    spec.margin = a.margin;
    if let Some(l) = a.lengths {
        spec.lengths = l;
    }
    let seq = schottky::build_nested(&spec)?;
    let validation = schottky::validate_nested(&seq);
    let cert = schottky::certify_schottky(&seq);
    emit(
        a.out.as_deref(),
        &json_text(&SequenceFile::from_sequence(&seq))?,
    )?;
    eprintln!(
        "built {} generators; nested conditions {}; ping-pong {} (min gap {}, {} words, min displacement {})",
        seq.len(),
        if validation.passes() { "hold" } else { "FAIL" },
        if cert.passes() { "certified" } else { "FAILED" },
        fmt_real(cert.min_gap),
        cert.words_tested,
        fmt_real(cert.word_check),
    );
    for f in &validation.failures {
        eprintln!("  {:?} at {}: {}", f.condition, f.index, f.detail);
    }
    Ok(if validation.passes() && cert.passes() {
        Verdict::Pass
    } else {
        Verdict::Violation
    })
}

fn check(a: CheckArgs) -> anyhow::Result<Verdict> {
    let results = checks::run_all(a.seed, a.trials);
    let report = CheckReport {
        meta: CheckMeta {
            schema: schema::SCHEMA,
            seed: a.seed,
            rng: "ChaCha8, stream (suite << 48) | trial",
        },
        suites: results
            .iter()
            .map(|r| SuiteEntry {
                suite: r.suite,
                trials: r.trials,
                worst_slack: Real(r.worst_slack),
                violations: r.violations,
            })
            .collect(),
    };
    emit(a.out.as_deref(), &json_text(&report)?)?;
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passes())
        .map(|r| r.suite)
        .collect();
    if failed.is_empty() {
        eprintln!(
            "{} suites, {} trials each: all pass",
            results.len(),
            a.trials
        );
        Ok(Verdict::Pass)
    } else {
        eprintln!("violations in: {}", failed.join(", "));
        Ok(Verdict::Violation)
    }
}

fn write_csv(path: &Path, report: &ConvergenceReport) -> anyhow::Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(["t", "n_star", "d1_upper", "d2_upper", "bound", "level"])?;
    for r in report.w_alpha_rows() {
        w.write_record([
            fmt_real(r.t),
            r.n_star.to_string(),
            fmt_real(r.d1_upper),
            fmt_real(r.d2_upper),
            r.bound.map(fmt_real).unwrap_or_default(),
            r.level.map(|l| l.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("never".into(), |t| format!("{t:.2}"))
}

fn walpha_cmd(a: WalphaArgs) -> anyhow::Result<Verdict> {
    if !(a.step > 0.0 && a.step <= 1.0) {
        bail!("--step must lie in (0, 1], got {}", a.step);
    }
    if !(a.t_max >= 0.0 && a.t_max.is_finite()) {
        bail!("--t-max must be finite and non-negative, got {}", a.t_max);
    }
    let input = schema::read_input(&a.file)?;
    let seq = input.sequence().to_sequence()?;
    let validation = schottky::validate_nested(&seq);
    if !validation.passes() {
        let first = &validation.failures[0];
        bail!(
            "{} is not a nested sequence: {:?} at {}: {}",
            a.file.display(),
            first.condition,
            first.index,
            first.detail
        );
    }

    let mut ok = true;
    let pick = if let Some(targets) = &a.avoid {
        let pick = walpha::diagonal_avoid(&seq, targets)?;
        let d = walpha::verify_diagonal(&seq, &pick, targets)?;
        println!("avoid: indices {pick:?}");
        for (t, g) in targets.iter().zip(&d.target_gaps) {
            println!("  target {t}: final endpoint gap {}", fmt_real(*g));
        }
        println!(
            "  (*) {}  (**) {}",
            if d.star { "holds" } else { "FAILS" },
            if d.star_star { "holds" } else { "FAILS" }
        );
        ok &= d.passes();
        pick
    } else if let Some(p) = a.pick {
        p
    } else if let Input::Run(r) = &input {
        r.pick.clone()
    } else {
        (0..seq.len()).collect()
    };

    let run = walpha::run_alpha(&seq, &pick)?;
    if let Some(p) = &a.run_out {
        schema::write_json(p, &RunFile::new(&seq, &run))?;
    }
    let report = walpha::verify_wss(&run, a.t_max, a.step, a.levels);
    if let Some(p) = &a.csv {
        write_csv(p, &report)?;
    }

    println!(
        "run of depth {}: r_N = {}, x_N = {}",
        run.depth(),
        fmt_real(*run.r.last().unwrap()),
        fmt_real(*run.endpoints.last().unwrap())
    );
    println!("level  T       bound     first met (d1)  first met (d2)");
    for m in 0..=a.levels {
        println!(
            "{m:<6} {:<7.3} {:<9.6} {:<15} {}",
            report.t_levels[m],
            2.0 * (-(m as f64)).exp2(),
            fmt_opt(report.first_met[m]),
            fmt_opt(report.d2_first_met[m])
        );
    }
    if report.levels_covered <= a.levels {
        eprintln!(
            "warning: grid to t = {} reaches {} of {} levels; --t-max {:.1} covers all",
            a.t_max,
            report.levels_covered,
            a.levels + 1,
            walpha::covering_t_max(&run, a.levels, 5.0)
        );
    }
    println!(
        "d1 bound violations: {}; d2 violations: {}",
        report.violations, report.d2_violations
    );
    ok &= report.pass && report.d2_pass;
    Ok(if ok {
        Verdict::Pass
    } else {
        Verdict::Violation
    })
}

fn plot_cmd(a: PlotArgs) -> anyhow::Result<Verdict> {
    let input = schema::read_input(&a.file)?;
    let svg = plot::render(&input)?;
    emit(a.svg.as_deref(), &svg)?;
    Ok(Verdict::Pass)
}
