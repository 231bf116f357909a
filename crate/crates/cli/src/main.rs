//! `previewsafe`: batch front end for robust controlled invariant sets with
//! disturbance preview.
//!
//! Exit codes: 0 success or nonempty verdict, 3 empty verdict, 2 usage or
//! configuration error, 1 numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use previewsafe::brunovsky::{self, closed_form, nonempty_ineq, nonempty_vertex, sweep, sweep_csv};
use previewsafe::casestudies::{example1_config, example4_config, example5_config, ScalarPreviewProblem};
use previewsafe::fmt::to_json;
use previewsafe::geometry::{HPolytope, Hyperbox};
use previewsafe::invariance::{method1, method2, preview_gain, IterOptions};
use previewsafe::simulation::{LaneConfig, PreviewScenario};
use previewsafe::systems::{augment, BrunovskyProblem, LinearSystem, SystemConfig};
use previewsafe::Error;
use serde_json::json;

#[derive(Parser)]
#[command(name = "previewsafe", version, about = "Robust controlled invariant sets with disturbance preview")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Nonemptiness verdict for a Brunovsky-form problem.
    Check {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        params: CaseParams,
        #[arg(long)]
        preview: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Invariant set of the preview-augmented system.
    Invariant {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        params: CaseParams,
        #[arg(long)]
        preview: Option<usize>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2), conflicts_with = "closed_form")]
        method: u8,
        /// Closed-form set for Brunovsky-form problems.
        #[arg(long)]
        closed_form: bool,
        /// Method 2 iteration count.
        #[arg(long = "K", default_value_t = 10, value_parser = positive_usize)]
        k: usize,
        /// Method 2 seed set (H-polytope JSON in the augmented space).
        #[arg(long)]
        seed_set: Option<PathBuf>,
        #[command(flatten)]
        iter: IterArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Largest symmetric disturbance bound versus preview on the unit box.
    SweepC {
        #[arg(long, default_value_t = 10, value_parser = positive_usize)]
        n: usize,
        #[arg(long, default_value_t = 12)]
        p_max: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Inner/outer volume bounds on the gain from more preview.
    Bounds {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        params: CaseParams,
        #[arg(long, default_value_t = 0)]
        p_low: usize,
        #[arg(long)]
        preview: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20_000, value_parser = positive_usize)]
        samples: usize,
        #[command(flatten)]
        iter: IterArgs,
        #[command(flatten)]
        output: Output,
    },
    /// Supervised rollouts with and without preview from a gap state.
    Simulate {
        #[command(flatten)]
        target: OptionalTarget,
        #[command(flatten)]
        params: CaseParams,
        /// Lane-keeping parameter file (defaults to the shipped one).
        #[arg(long, conflicts_with_all = ["case", "system"])]
        lane_config: Option<PathBuf>,
        #[arg(long)]
        preview: Option<usize>,
        #[arg(long = "T", value_parser = positive_usize)]
        horizon: Option<usize>,
        #[arg(long = "K", value_parser = positive_usize)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory for the traces and summary.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// System config JSON of a named case.
    Export {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        params: CaseParams,
        #[arg(long)]
        preview: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct Target {
    #[arg(long)]
    case: Option<Case>,
    #[arg(long)]
    system: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[group(required = false, multiple = false)]
struct OptionalTarget {
    #[arg(long)]
    case: Option<Case>,
    #[arg(long)]
    system: Option<PathBuf>,
}

/// Parameters of the `brunovsky` case: the unit box in `ℝⁿ` with
/// disturbances in `[-c, c]ⁿ`.
#[derive(Args, Clone)]
struct CaseParams {
    #[arg(long, default_value_t = 2, value_parser = positive_usize)]
    n: usize,
    #[arg(long, default_value_t = 0.1, value_parser = nonnegative_f64)]
    c: f64,
}

#[derive(Args, Clone)]
struct IterArgs {
    #[arg(long, value_parser = positive_usize)]
    max_iter: Option<usize>,
    #[arg(long, value_parser = positive_f64)]
    tol: Option<f64>,
}

impl IterArgs {
    fn options(&self) -> IterOptions {
        let mut o = IterOptions::default();
        if let Some(m) = self.max_iter {
            o.max_iter = m;
        }
        if let Some(t) = self.tol {
            o.tol = t;
        }
        o
    }
}

#[derive(Args, Clone)]
struct Output {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Case {
    Example1,
    #[value(alias = "scalar")]
    Example2,
    Example4,
    Example5,
    Brunovsky,
    LaneKeeping,
}

fn positive_usize(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, got `{s}`")),
    }
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

fn nonnegative_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a nonnegative number, got `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_)
            | Error::InvalidParameters(_)
            | Error::DimensionMismatch(_)
            | Error::ScriptExhausted { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type CmdResult = Result<ExitCode, Failure>;

const EMPTY: u8 = 3;

/// A resolved case or config file.
struct Resolved {
    sys: LinearSystem,
    p: usize,
    seed: Option<HPolytope>,
    brunovsky: Option<BrunovskyProblem>,
}

fn scalar_problem(p: usize) -> Result<ScalarPreviewProblem, Error> {
    ScalarPreviewProblem::new(2.0, 1.0, 1.0, 2.0, p.max(1))
}

fn resolve(
    case: Option<Case>,
    system: Option<&Path>,
    params: &CaseParams,
    preview: Option<usize>,
) -> Result<Resolved, Error> {
    let plain = |sys, p| Resolved { sys, p, seed: None, brunovsky: None };
    if let Some(path) = system {
        let cfg = SystemConfig::load(path)?;
        let p = preview.unwrap_or(cfg.preview);
        let sys = cfg.to_system()?;
        let brunovsky = match brunovsky::from_system(&sys, p) {
            Some(ev) => Some(ev?.problem),
            None => None,
        };
        return Ok(Resolved { sys, p, seed: None, brunovsky });
    }
    let p = preview.unwrap_or(0);
    Ok(match case.expect("clap enforces a target") {
        Case::Example1 => {
            let (sys, seed) = example1_config(p);
            Resolved { sys, p, seed: Some(seed), brunovsky: None }
        }
        Case::Example2 => plain(scalar_problem(p)?.system(), p),
        Case::Example4 => plain(example4_config(), p),
        Case::Example5 => plain(example5_config(&scalar_problem(p)?).0, p),
        Case::Brunovsky => {
            let pr = BrunovskyProblem::symmetric(params.n, params.c, p)?;
            Resolved { sys: pr.system(), p, seed: None, brunovsky: Some(pr) }
        }
        Case::LaneKeeping => {
            let cfg = LaneConfig::shipped();
            plain(cfg.system()?, preview.unwrap_or(cfg.preview))
        }
    })
}

fn resolve_target(t: &Target, params: &CaseParams, preview: Option<usize>) -> Result<Resolved, Error> {
    resolve(t.case, t.system.as_deref(), params, preview)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn json_only(output: &Output) -> Result<(), Failure> {
    match output.format {
        Some(Format::Csv) => Err(Failure::Usage("this command only writes JSON".into())),
        _ => Ok(()),
    }
}

fn cmd_check(target: &Target, params: &CaseParams, preview: Option<usize>, output: &Output) -> CmdResult {
    json_only(output)?;
    let r = resolve_target(target, params, preview)?;
    let pr =
        r.brunovsky.ok_or_else(|| Failure::Usage("check needs a Brunovsky-form system with a box safe set".into()))?;
    let ineq = nonempty_ineq(&pr);
    let vertex = match nonempty_vertex(&pr) {
        Ok(v) => Some(v),
        Err(Error::DimensionTooLarge { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let verdict = json!({
        "n": pr.n(),
        "p": pr.p(),
        "nonempty": ineq,
        "nonempty_vertex": vertex,
        "agree": vertex.map(|v| v == ineq),
    });
    emit(output.out.as_deref(), &to_json(&verdict))?;
    Ok(if ineq { ExitCode::SUCCESS } else { ExitCode::from(EMPTY) })
}

#[allow(clippy::too_many_arguments)]
fn cmd_invariant(
    target: &Target,
    params: &CaseParams,
    preview: Option<usize>,
    method: u8,
    closed: bool,
    k: usize,
    seed_set: Option<&Path>,
    iter: &IterArgs,
    output: &Output,
) -> CmdResult {
    json_only(output)?;
    let r = resolve_target(target, params, preview)?;
    if closed {
        let pr = r
            .brunovsky
            .ok_or_else(|| Failure::Usage("--closed-form needs a Brunovsky-form system with a box safe set".into()))?;
        return match closed_form(&pr) {
            Ok(inv) => {
                let body = json!({ "closed_form": inv, "polytope": inv.to_hpolytope() });
                emit(output.out.as_deref(), &to_json(&body))?;
                Ok(ExitCode::SUCCESS)
            }
            Err(Error::EmptyInvariant) => {
                let dim = pr.n() + pr.n() * pr.p();
                let body = json!({ "closed_form": null, "polytope": HPolytope::empty(dim) });
                emit(output.out.as_deref(), &to_json(&body))?;
                Ok(ExitCode::from(EMPTY))
            }
            Err(e) => Err(e.into()),
        };
    }
    let aug = augment(&r.sys, r.p).aug;
    let opts = iter.options();
    let report = if method == 1 {
        method1(&aug, &opts)?
    } else {
        let seed = match (seed_set, r.seed) {
            (Some(path), _) => {
                let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                serde_json::from_str::<HPolytope>(&text)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
            }
            (None, Some(seed)) => seed,
            (None, None) => return Err(Failure::Usage("method 2 needs --seed-set for this system".into())),
        };
        method2(&aug, &seed, k, &opts)?
    };
    info!("{} iterations, converged: {}", report.iterations, report.converged);
    emit(output.out.as_deref(), &to_json(&report))?;
    Ok(if report.result.is_empty()? { ExitCode::from(EMPTY) } else { ExitCode::SUCCESS })
}

fn cmd_sweep_c(n: usize, p_max: usize, output: &Output) -> CmdResult {
    let rows = sweep(n, p_max, &Hyperbox::symmetric(n, 1.0))?;
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&rows).trim_end().to_string(),
        Format::Json => {
            let items: Vec<_> = rows.iter().map(|(p, c)| json!({ "p": p, "largest_c": c })).collect();
            to_json(&items)
        }
    };
    emit(output.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_bounds(
    target: &Target,
    params: &CaseParams,
    p_low: usize,
    preview: Option<usize>,
    seed: u64,
    samples: usize,
    iter: &IterArgs,
    output: &Output,
) -> CmdResult {
    json_only(output)?;
    let r = resolve_target(target, params, preview)?;
    if p_low > r.p {
        return Err(Failure::Usage(format!("--p-low {p_low} exceeds --preview {}", r.p)));
    }
    let gain = preview_gain(&r.sys, p_low, r.p, seed, samples, &iter.options())?;
    emit(output.out.as_deref(), &to_json(&gain))?;
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    target: &OptionalTarget,
    params: &CaseParams,
    lane_config: Option<&Path>,
    preview: Option<usize>,
    horizon: Option<usize>,
    k: Option<usize>,
    seed: u64,
    out: &Path,
) -> CmdResult {
    let lane = match (target.case, &target.system) {
        (None, None) | (Some(Case::LaneKeeping), _) => Some(match lane_config {
            Some(path) => LaneConfig::load(path)?,
            None => LaneConfig::shipped(),
        }),
        _ => None,
    };
    let (scenario, horizon) = match lane {
        Some(cfg) => {
            let p = preview.unwrap_or(cfg.preview);
            let sc = PreviewScenario::compute(cfg.system()?, p, k.unwrap_or(cfg.growth_iterations), cfg.input_box())?;
            (sc, horizon.unwrap_or(cfg.horizon))
        }
        None => {
            let r = resolve(target.case, target.system.as_deref(), params, preview)?;
            let input_box = PreviewScenario::input_box_of(&r.sys)?;
            (PreviewScenario::compute(r.sys, r.p, k.unwrap_or(10), input_box)?, horizon.unwrap_or(100))
        }
    };
    fs::create_dir_all(out).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
    let write = |name: &str, text: &str| {
        let path = out.join(name);
        fs::write(&path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
    };
    let summary = match scenario.simulate(horizon, seed) {
        Ok(demo) => {
            write("trace_preview.csv", &demo.trace_preview.to_csv())?;
            write("trace_no_preview.csv", &demo.trace_no_preview.to_csv())?;
            json!({
                "gap_found": true,
                "p": scenario.p,
                "T": horizon,
                "seed": seed,
                "cmax0_rows": demo.cmax0.result.n_rows(),
                "cmax0_iterations": demo.cmax0.iterations,
                "cio_rows": demo.cio.result.n_rows(),
                "cio_iterations": demo.cio.iterations,
                "gap_state": demo.gap_state,
                "gap_violation": demo.gap_violation,
                "preview": demo.trace_preview.summary(),
                "no_preview": demo.trace_no_preview.summary(),
            })
        }
        Err(Error::NoGapFound) => json!({
            "gap_found": false,
            "p": scenario.p,
            "T": horizon,
            "seed": seed,
            "cmax0_rows": scenario.cmax0.result.n_rows(),
            "cio_rows": scenario.cio.result.n_rows(),
        }),
        Err(e) => return Err(e.into()),
    };
    let text = to_json(&summary);
    write("summary.json", &format!("{text}\n"))?;
    println!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(target: &Target, params: &CaseParams, preview: Option<usize>, output: &Output) -> CmdResult {
    json_only(output)?;
    let r = resolve_target(target, params, preview)?;
    emit(output.out.as_deref(), &to_json(&SystemConfig::from_system(&r.sys, r.p)))?;
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> CmdResult {
    match &cli.command {
        Command::Check { target, params, preview, output } => cmd_check(target, params, *preview, output),
        Command::Invariant { target, params, preview, method, closed_form, k, seed_set, iter, output } => {
            cmd_invariant(target, params, *preview, *method, *closed_form, *k, seed_set.as_deref(), iter, output)
        }
        Command::SweepC { n, p_max, output } => cmd_sweep_c(*n, *p_max, output),
        Command::Bounds { target, params, p_low, preview, seed, samples, iter, output } => {
            cmd_bounds(target, params, *p_low, *preview, *seed, *samples, iter, output)
        }
        Command::Simulate { target, params, lane_config, preview, horizon, k, seed, out } => {
            cmd_simulate(target, params, lane_config.as_deref(), *preview, *horizon, *k, *seed, out)
        }
        Command::Export { target, params, preview, output } => cmd_export(target, params, *preview, output),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("PREVIEWSAFE_LOG")).format_timestamp(None).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
