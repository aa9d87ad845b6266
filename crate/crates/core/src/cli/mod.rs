//! Command-line front end: resolves a run configuration, dispatches to the
//! experiment drivers and writes CSV tables with a JSON manifest.

pub mod config;
pub mod output;

pub use config::{Experiment, InlineModel, ModelChoice, RunConfig, ThetaGrid};
pub use output::{file_stem, write_artifacts, Cell, Table};

use crate::error::{Error, Result};
use crate::experiments::{
    adaptive_estimate, critical_table, fit_window, default_window, preparation_table, run_adiabatic, run_dephasing_sweep,
    run_prepare_unknown, run_scaling, theta_scan, AdaptiveConfig, DephasingSettings, FitKind, ScalingResult,
};
use crate::metrology::ground_state_cfi;
use crate::models::{build_h_split, list_presets, optimal_measurement};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

/// Finite-difference step of the ground-state CFI column in `qfi-scan`.
const SCAN_CFI_DELTA: f64 = 1e-5;

#[derive(Debug, Parser)]
#[command(name = "qpt-sense", version, about = "Critical quantum sensing simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy gap over a theta grid, and the critical point per size
    GapScan(RunArgs),
    /// Ground-state quantum and classical Fisher information over a theta grid
    QfiScan(RunArgs),
    /// Gap and QFI at the critical point against system size, with fits
    Scaling(RunArgs),
    /// Adiabatic preparation through a window around the critical point
    Adiabatic(RunArgs),
    /// Probe preparation with the control-field ramp for unknown theta
    PrepareUnknown(RunArgs),
    /// Critical QFI of states prepared under local dephasing
    Dephasing(RunArgs),
    /// Adaptive estimation loop with size-matched probes
    Adaptive(RunArgs),
    /// Local adiabatic preparation time against system size
    PrepTime(RunArgs),
    /// Print the named model presets as JSON
    ListPresets,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// JSON run configuration; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Preset name
    #[arg(long)]
    model: Option<String>,
}

/// What a successful run produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub summary: String,
    pub artifacts: Vec<PathBuf>,
}

/// Runs one experiment from a configuration. Every table and the manifest
/// are written under `config.out`.
pub fn run(config: RunConfig, experiment: Experiment) -> Result<Outcome> {
    let cfg = config.resolve(experiment)?;
    let pool = match cfg.threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let (tables, results, summary) = pool.install(|| dispatch(&cfg, experiment))?;
    let stem = file_stem(&cfg.model_label(), experiment.name());
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from(config::DEFAULT_OUT));
    let artifacts = write_artifacts(&dir, &stem, experiment.name(), &cfg, &tables, results)?;
    Ok(Outcome { summary, artifacts })
}

type Produced = (Vec<Table>, Value, String);

fn dispatch(cfg: &RunConfig, e: Experiment) -> Result<Produced> {
    match e {
        Experiment::GapScan => gap_scan(cfg),
        Experiment::QfiScan => qfi_scan(cfg),
        Experiment::Scaling => scaling(cfg),
        Experiment::Adiabatic => adiabatic(cfg),
        Experiment::PrepareUnknown => prepare_unknown(cfg),
        Experiment::Dephasing => dephasing(cfg),
        Experiment::Adaptive => adaptive(cfg),
        Experiment::PrepTime => prep_time(cfg),
    }
}

fn need<T: Clone>(v: &Option<T>, what: &str) -> Result<T> {
    v.clone().ok_or_else(|| Error::InvalidArgument(format!("{what} is not set")))
}

fn fit_table(fits: &[(&str, &ScalingResult)]) -> Table {
    let mut t = Table::new("fits", &["quantity", "kind", "exponent", "prefactor", "r_squared", "fit_from", "flagged"]);
    for (name, f) in fits {
        let kind = serde_json::to_value(f.fit_kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let from = f.fitted_points().first().map_or(f64::NAN, |p| p.0);
        t.push(vec![(*name).into(), Cell::Text(kind), f.exponent.into(), f.prefactor.into(), f.r_squared.into(), from.into(), f.flagged.into()]);
    }
    t
}

fn gap_scan(cfg: &RunConfig) -> Result<Produced> {
    let fam = cfg.family()?;
    let sizes = need(&cfg.sizes, "sizes")?;
    let rows = theta_scan(&fam, &sizes, &need(&cfg.thetas, "thetas")?.values())?;
    let crit = critical_table(&fam, &sizes)?;
    let mut t = Table::new("", &["L", "theta", "gap"]);
    for r in &rows {
        t.push(vec![r.l.into(), r.theta.into(), r.gap.into()]);
    }
    let mut c = Table::new("critical", &["L", "theta_c", "gap"]);
    for r in &crit {
        c.push(vec![r.l.into(), r.theta_c.into(), r.gap.into()]);
    }
    let last = crit.last().expect("sizes checked non-empty");
    let summary = format!("gap-scan {}: L={} theta_c={:.6} gap_c={:.4e}", fam.name, last.l, last.theta_c, last.gap);
    Ok((vec![t, c], json!({ "spec": fam.spec, "critical": crit }), summary))
}

fn qfi_scan(cfg: &RunConfig) -> Result<Produced> {
    let fam = cfg.family()?;
    let sizes = need(&cfg.sizes, "sizes")?;
    let rows = theta_scan(&fam, &sizes, &need(&cfg.thetas, "thetas")?.values())?;
    let probes = sizes
        .iter()
        .map(|&l| {
            let spec = fam.at_size(l)?;
            Ok((l, build_h_split(&spec)?, optimal_measurement(&spec)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let cfi = rows
        .par_iter()
        .map(|r| {
            let (_, split, meas) = probes.iter().find(|p| p.0 == r.l).expect("size present");
            Ok(ground_state_cfi(split, meas, r.theta, SCAN_CFI_DELTA)?.value)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut t = Table::new("", &["L", "theta", "qfi", "cfi"]);
    for (r, c) in rows.iter().zip(&cfi) {
        t.push(vec![r.l.into(), r.theta.into(), r.qfi.into(), (*c).into()]);
    }
    let peak = rows.iter().max_by(|a, b| a.qfi.total_cmp(&b.qfi)).expect("non-empty scan");
    let summary = format!("qfi-scan {}: peak qfi={:.6e} at L={} theta={:.6}", fam.name, peak.qfi, peak.l, peak.theta);
    Ok((vec![t], json!({ "spec": fam.spec, "peak": peak }), summary))
}

fn scaling(cfg: &RunConfig) -> Result<Produced> {
    let fam = cfg.family()?;
    let study = run_scaling(&fam, &need(&cfg.sizes, "sizes")?, need(&cfg.beta_tolerance, "beta_tolerance")?)?;
    let mut t = Table::new("", &["L", "theta_c", "gap", "qfi"]);
    for r in &study.rows {
        t.push(vec![r.l.into(), r.theta_c.into(), r.gap.into(), r.qfi.into()]);
    }
    let f = fit_table(&[("gap", &study.gap), ("qfi", &study.qfi)]);
    let b = &study.beta_two_alpha;
    let summary = format!(
        "scaling {}: alpha={:.4} beta={:.4} beta/2alpha-1={} theta_c(L={})={:.6}",
        fam.name,
        b.alpha,
        b.beta,
        b.relative_error.map_or("n/a".to_string(), |x| format!("{x:+.3}")),
        study.rows.last().map_or(0, |r| r.l),
        study.rows.last().map_or(f64::NAN, |r| r.theta_c),
    );
    Ok((vec![t, f], json!({ "spec": fam.spec, "study": study }), summary))
}

fn adiabatic(cfg: &RunConfig) -> Result<Produced> {
    let fam = cfg.family()?;
    let run = run_adiabatic(
        &fam,
        need(&cfg.size, "size")?,
        need(&cfg.epsilon, "epsilon")?,
        need(&cfg.numerator, "numerator")?,
        cfg.window,
        need(&cfg.points, "points")?,
    )?;
    let mut t = Table::new("", &["theta", "fidelity", "qfi_evolved", "qfi_ground", "cfi_evolved", "cfi_ground"]);
    for r in &run.rows {
        t.push(vec![r.theta.into(), r.fidelity.into(), r.qfi_evolved.into(), r.qfi_ground.into(), r.cfi_evolved.into(), r.cfi_ground.into()]);
    }
    let mut tr = Table::new("trajectory", &["t", "s", "theta", "fidelity"]);
    for r in &run.trajectory {
        tr.push(vec![r.t.into(), r.s.into(), r.theta.into(), r.fidelity.into()]);
    }
    let summary = format!(
        "adiabatic {} L={}: theta_c={:.6} T={:.4e} fidelity_c={:.6} min_fidelity={:.6} worst |F/F_gs-1|={:.4}",
        fam.name,
        run.l,
        run.theta_c,
        run.t_total,
        run.fidelity_at_c,
        run.min_fidelity,
        run.worst_qfi_ratio()
    );
    let results = json!({
        "spec": fam.at_size(run.l)?,
        "L": run.l, "theta_c": run.theta_c, "gap_c": run.gap_c, "T_total": run.t_total,
        "delta": run.delta, "min_fidelity": run.min_fidelity, "fidelity_at_c": run.fidelity_at_c,
        "worst_qfi_ratio": run.worst_qfi_ratio(),
    });
    Ok((vec![t, tr], results, summary))
}

fn prepare_unknown(cfg: &RunConfig) -> Result<Produced> {
    let fam = cfg.family()?;
    let l = need(&cfg.size, "size")?;
    let sweep = run_prepare_unknown(&fam, l, &need(&cfg.thetas, "thetas")?.values(), need(&cfg.epsilon, "epsilon")?)?;
    let mut t = Table::new(
        "",
        &["theta", "offset", "fidelity", "min_fidelity", "qfi_prepared", "qfi_ground", "cfi_prepared", "cfi_ground"],
    );
    for r in &sweep.rows {
        t.push(vec![
            r.theta.into(),
            r.offset.into(),
            r.fidelity.into(),
            r.min_fidelity.into(),
            r.qfi_prepared.into(),
            r.qfi_ground.into(),
            r.cfi_prepared.into(),
            r.cfi_ground.into(),
        ]);
    }
    let worst = sweep.rows.iter().map(|r| r.fidelity).fold(1.0, f64::min);
    let summary = format!(
        "prepare-unknown {} L={}: theta_c={:.6} T={:.4e} lowest fidelity={:.6}",
        fam.name, l, sweep.theta_c, sweep.t_total, worst
    );
    let results = json!({ "spec": fam.at_size(l)?, "theta_c": sweep.theta_c, "T_total": sweep.t_total, "delta": sweep.delta });
    Ok((vec![t], results, summary))
}

fn dephasing(cfg: &RunConfig) -> Result<Produced> {
    let fam = cfg.family()?;
    let settings = DephasingSettings {
        epsilon: need(&cfg.epsilon, "epsilon")?,
        numerator: need(&cfg.numerator, "numerator")?,
        ..Default::default()
    };
    let sizes = need(&cfg.sizes, "sizes")?;
    let sweep = run_dephasing_sweep(&fam, &sizes, &need(&cfg.gammas, "gammas")?, &settings)?;
    let mut t = Table::new("", &["L", "gamma", "theta_c", "T_total", "qfi", "fidelity", "qfi_closed", "qfi_ground"]);
    for r in &sweep.rows {
        t.push(vec![
            r.l.into(),
            r.gamma.into(),
            r.theta_c.into(),
            r.t_total.into(),
            r.qfi.into(),
            r.fidelity.into(),
            r.qfi_closed.into(),
            r.qfi_ground.into(),
        ]);
    }
    let size_names: Vec<String> = sweep.size_fits.iter().map(|(g, _)| format!("qfi_vs_L@gamma={g}")).collect();
    let gamma_names: Vec<String> = sweep.gamma_fits.iter().map(|(l, _)| format!("qfi_vs_gamma@L={l}")).collect();
    let mut fits: Vec<(&str, &ScalingResult)> = Vec::new();
    for (n, (_, f)) in size_names.iter().zip(&sweep.size_fits) {
        fits.push((n, f));
    }
    for (n, (_, f)) in gamma_names.iter().zip(&sweep.gamma_fits) {
        fits.push((n, f));
    }
    let largest = *sizes.iter().max().expect("sizes checked non-empty");
    let summary = format!(
        "dephasing {}: {} runs, gamma-decay exponent at L={}: {}",
        fam.name,
        sweep.rows.len(),
        largest,
        sweep.decay_exponent(largest).map_or("n/a".to_string(), |x| format!("{x:.4}"))
    );
    let results = json!({ "spec": fam.spec, "settings": settings, "size_fits": sweep.size_fits, "gamma_fits": sweep.gamma_fits });
    Ok((vec![t, fit_table(&fits)], results, summary))
}

fn adaptive(cfg: &RunConfig) -> Result<Produced> {
    let fam = cfg.family()?;
    let base = need(&cfg.seed, "seed")?;
    let n = need(&cfg.seeds, "seeds")?;
    let runs = (0..n as u64)
        .into_par_iter()
        .map(|k| {
            let c = AdaptiveConfig {
                theta_true: need(&cfg.theta_true, "theta_true")?,
                epsilon0: need(&cfg.epsilon0, "epsilon0")?,
                rounds: need(&cfg.rounds, "rounds")?,
                shots_per_round: need(&cfg.shots, "shots")?,
                seed: base + k,
                max_probe_size: need(&cfg.max_probe_size, "max_probe_size")?,
            };
            adaptive_estimate(&fam, &c)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(
        "",
        &[
            "seed", "iteration", "theta_est", "epsilon_det", "probe_size", "control_field", "shots", "epsilon_next",
            "standard_error", "cramer_rao", "flagged",
        ],
    );
    for run in &runs {
        for r in &run.rounds {
            t.push(vec![
                run.config.seed.into(),
                r.iteration.into(),
                r.theta_est.into(),
                r.epsilon_det.into(),
                r.probe_size.into(),
                r.control_field.into(),
                r.shots.into(),
                r.epsilon_next.into(),
                r.standard_error.into(),
                r.cramer_rao.into(),
                r.flagged.into(),
            ]);
        }
    }
    let first = &runs[0];
    let summary = match first.rounds.last() {
        Some(r) => format!(
            "adaptive {}: seed {} theta_true={} theta_est={:.8} epsilon {} -> {:.3e} after {} rounds{}",
            fam.name,
            first.config.seed,
            first.config.theta_true,
            r.theta_est,
            first.config.epsilon0,
            r.epsilon_next,
            first.rounds.len(),
            if first.stopped_at_cap { " (probe-size cap reached)" } else { "" }
        ),
        None => format!("adaptive {}: no rounds run", fam.name),
    };
    let results: Vec<Value> = runs
        .iter()
        .map(|r| json!({ "seed": r.config.seed, "theta_initial": r.theta_initial, "stopped_at_cap": r.stopped_at_cap }))
        .collect();
    Ok((vec![t], json!({ "runs": results }), summary))
}

fn prep_time(cfg: &RunConfig) -> Result<Produced> {
    let fam = cfg.family()?;
    let rows = preparation_table(&fam, &need(&cfg.sizes, "sizes")?, need(&cfg.epsilon, "epsilon")?)?;
    let mut t = Table::new("", &["L", "theta_c", "gap", "T_total"]);
    for r in &rows {
        t.push(vec![r.l.into(), r.theta_c.into(), r.gap.into(), r.t_total.into()]);
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.l as f64, r.t_total)).collect();
    // too few sizes for a fit is not an error here; the table still stands
    let fit = fit_window(&pts, default_window(pts.len()), FitKind::Exponential).ok();
    let mut tables = vec![t];
    if let Some(f) = &fit {
        tables.push(fit_table(&[("T_total", f)]));
    }
    let summary = format!(
        "prep-time {}: T(L={})={:.4e}, exponential rate {}",
        fam.name,
        rows.last().map_or(0, |r| r.l),
        rows.last().map_or(f64::NAN, |r| r.t_total),
        fit.as_ref().map_or("n/a".to_string(), |f| format!("{:.4}", f.exponent))
    );
    Ok((tables, json!({ "spec": fam.spec, "fit": fit }), summary))
}

fn failure(code: i32, kind: &str, message: &str) -> i32 {
    println!("{}", json!({ "status": "error", "exit_code": code, "kind": kind, "message": message }));
    code
}

fn experiment_of(c: &Command) -> Option<Experiment> {
    Some(match c {
        Command::GapScan(_) => Experiment::GapScan,
        Command::QfiScan(_) => Experiment::QfiScan,
        Command::Scaling(_) => Experiment::Scaling,
        Command::Adiabatic(_) => Experiment::Adiabatic,
        Command::PrepareUnknown(_) => Experiment::PrepareUnknown,
        Command::Dephasing(_) => Experiment::Dephasing,
        Command::Adaptive(_) => Experiment::Adaptive,
        Command::PrepTime(_) => Experiment::PrepTime,
        Command::ListPresets => return None,
    })
}

fn merged_config(a: &RunArgs) -> Result<RunConfig> {
    let mut c = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &a.out {
        c.out = Some(o.clone());
    }
    if a.seed.is_some() {
        c.seed = a.seed;
    }
    if a.threads.is_some() {
        c.threads = a.threads;
    }
    if let Some(m) = &a.model {
        c.model = Some(ModelChoice::Preset(m.clone()));
    }
    Ok(c)
}

/// Parses arguments, runs, prints a summary or a failure JSON and returns
/// the exit status: 0 on success, 2 for usage and configuration errors,
/// 1 for numerical failures.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return failure(2, "usage", e.kind().to_string().as_str());
        }
    };
    let Some(exp) = experiment_of(&cli.command) else {
        let all: Vec<Value> = list_presets().iter().map(|p| json!(p)).collect();
        // a closed pipe (`| head`) is not a failure
        let _ = writeln!(std::io::stdout(), "{}", serde_json::to_string_pretty(&all).expect("presets serialize"));
        return 0;
    };
    let args = match &cli.command {
        Command::GapScan(a)
        | Command::QfiScan(a)
        | Command::Scaling(a)
        | Command::Adiabatic(a)
        | Command::PrepareUnknown(a)
        | Command::Dephasing(a)
        | Command::Adaptive(a)
        | Command::PrepTime(a) => a,
        Command::ListPresets => unreachable!(),
    };
    // an unreadable config file is a usage error like a malformed one
    let config = match merged_config(args) {
        Ok(c) => c,
        Err(e) => return failure(2, e.kind(), &e.to_string()),
    };
    match run(config, exp) {
        Ok(o) => {
            println!("{}", o.summary);
            0
        }
        Err(e) => failure(if e.is_usage() { 2 } else { 1 }, e.kind(), &e.to_string()),
    }
}
