//! Command-line interface. Exit codes: 0 success, 2 usage or configuration
//! error, 3 I/O error, 4 record schema error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use dimwit_core::configs::{builtin_config, config_bloch_vectors, predicted_prob_matrix};
use dimwit_core::extremal::EffectClass;
use dimwit_core::noise::{
    apply_common_leakage, apply_readout_error, coherent_leak_prob_matrix, generate_drift_ensemble_with,
    CoherentLeakParams, DriftMode, DriftModel, LeakageParams,
};
use dimwit_core::witness::witness_variance;
use dimwit_core::{ConfigSet, ExperimentPlan, ExtremalProblem, Field, ProbMatrix, BUILTIN_IDS};

use crate::drivers;
use crate::error::{Error, Result};
use crate::format::{self, ConfigFile, SearchExport};
use crate::fsutil::write_atomic;
use crate::report::AnalysisReport;

#[derive(Debug, Parser)]
#[command(
    name = "dimwit",
    version,
    about = "Determinant dimension witness: simulation and analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a configuration file for a built-in id or re-emit a custom file
    GenConfig {
        /// Built-in id or path to a configuration file
        #[arg(long)]
        config: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate an experiment record
    Simulate(SimulateArgs),
    /// Estimate the witness of a record with both estimators
    Analyze {
        record: PathBuf,
        /// Per-job scatter CSV
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-job scatter plot
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Check pooled witnesses of drift ensembles against the drift bound
    AuditDrift(AuditArgs),
    /// Maximize |W| over strategies in dimension 2 to 4
    Optimize(OptimizeArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Built-in id or path to a configuration file
    #[arg(long)]
    pub config: String,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 1)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Preparation leakage probability
    #[arg(long, default_value_t = 0.0)]
    pub leak_lambda: f64,
    /// Probability that leaked population reads out as 1
    #[arg(long, default_value_t = 0.0)]
    pub leak_mu: f64,
    /// Probability of reading 1 for a true 0
    #[arg(long, default_value_t = 0.0)]
    pub readout_e0: f64,
    /// Probability of reading 0 for a true 1
    #[arg(long, default_value_t = 0.0)]
    pub readout_e1: f64,
    /// Entrywise drift bound per job
    #[arg(long, default_value_t = 0.0)]
    pub drift_eps: f64,
    #[arg(long, value_enum, default_value_t = DriftModeArg::Jitter)]
    pub drift_mode: DriftModeArg,
    /// Leak angle of the coherent qutrit model
    #[arg(long)]
    pub coherent_leak: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long)]
    pub config: String,
    #[arg(long)]
    pub drift_eps: f64,
    #[arg(long, default_value_t = 10)]
    pub jobs: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Only this mode; both when omitted
    #[arg(long, value_enum)]
    pub drift_mode: Option<DriftModeArg>,
    /// CSV with one row per mode
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    #[arg(long, value_enum, default_value_t = FieldArg::Real)]
    pub field: FieldArg,
    #[arg(long, value_enum, default_value_t = EffectsArg::Projective)]
    pub effects: EffectsArg,
    /// Defaults to the budget for the dimension
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Search result JSON
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DriftModeArg {
    Jitter,
    ColumnMix,
}

impl From<DriftModeArg> for DriftMode {
    fn from(m: DriftModeArg) -> Self {
        match m {
            DriftModeArg::Jitter => DriftMode::AngleJitter,
            DriftModeArg::ColumnMix => DriftMode::ColumnMix,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FieldArg {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EffectsArg {
    Projective,
    General,
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::GenConfig { config, out: path } => gen_config(&config, &path, out),
        Command::Simulate(args) => simulate(&args, out),
        Command::Analyze { record, out: csv, svg } => analyze(&record, csv.as_deref(), svg.as_deref(), out),
        Command::AuditDrift(args) => audit_drift(&args, out),
        Command::Optimize(args) => optimize(&args, out),
    }
}

/// A built-in id, or else a path to a configuration file.
pub fn resolve_config(name: &str) -> Result<(ConfigFile, ConfigSet)> {
    if let Ok(c) = builtin_config(name) {
        return Ok((ConfigFile::from_config(&c), c));
    }
    let path = Path::new(name);
    if path.exists() {
        return format::read_config(path);
    }
    Err(Error::Usage(format!(
        "unknown configuration {name:?}: not a file and not one of {}",
        BUILTIN_IDS.join(", ")
    )))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn gen_config(name: &str, path: &Path, out: &mut dyn Write) -> Result<()> {
    let (file, config) = resolve_config(name)?;
    write_atomic(path, format::config_json(&file).as_bytes())?;
    let (preps, effects) = config_bloch_vectors(&config);
    let mut text = format!("wrote {} to {}\n", file.id, path.display());
    for (j, n) in preps.iter().enumerate() {
        let [x, y, z] = *n.as_array();
        text += &format!("n{} = ({x:+.6}, {y:+.6}, {z:+.6})\n", j + 1);
    }
    for (k, m) in effects.iter().enumerate() {
        let [x, y, z] = m.direction();
        text += &format!("m{} = ({x:+.6}, {y:+.6}, {z:+.6})  m0 = {:.6}\n", k + 1, m.m0());
    }
    emit(out, &text)
}

/// Job matrices implied by the noise flags.
pub fn job_truths(config: &ConfigSet, args: &SimulateArgs) -> Result<Vec<ProbMatrix>> {
    let leak = args.coherent_leak.map(CoherentLeakParams::new).transpose()?;
    let truth = |c: &ConfigSet| match &leak {
        Some(params) => coherent_leak_prob_matrix(c, params),
        None => predicted_prob_matrix(c),
    };
    let base = if args.drift_eps > 0.0 {
        let model = DriftModel::new(args.drift_eps, args.jobs, args.drift_mode.into())?;
        generate_drift_ensemble_with(config, &model, args.seed, &truth)
    } else {
        vec![truth(config)]
    };
    let leakage = LeakageParams::new(args.leak_lambda, args.leak_mu)?;
    base.iter()
        .map(|p| {
            let p = apply_common_leakage(p, &leakage)?;
            Ok(apply_readout_error(&p, args.readout_e0, args.readout_e1)?)
        })
        .collect()
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let (_, config) = resolve_config(&args.config)?;
    let plan = ExperimentPlan::new(args.jobs, args.shots, args.reps, args.seed)?;
    let truths = job_truths(&config, args)?;
    let record = drivers::simulate_record(config.id(), &truths, &plan)?;
    write_atomic(&args.out, format::record_json(&record).as_bytes())?;
    let mean = ProbMatrix::mean(&truths)?;
    let t = plan.total_per_cell();
    let sigma = witness_variance(&mean, t)?.sqrt();
    emit(
        out,
        &format!(
            "wrote {} jobs to {}\nT = {t}\nW (truth) = {:.6e}\nsigma = {sigma:.6e}\n",
            plan.n_jobs,
            args.out.display(),
            mean.witness()
        ),
    )
}

fn analyze(record: &Path, csv: Option<&Path>, svg: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let record = format::read_record(record)?;
    let report = AnalysisReport::new(&record)?;
    for w in report.warnings() {
        eprintln!("warning: {w}");
    }
    if let Some(path) = csv {
        write_atomic(path, &report.scatter_csv())?;
    }
    if let Some(path) = svg {
        write_atomic(path, report.scatter_svg().as_bytes())?;
    }
    emit(out, &report.to_text())
}

fn audit_drift(args: &AuditArgs, out: &mut dyn Write) -> Result<()> {
    let (_, config) = resolve_config(&args.config)?;
    let modes: Vec<DriftModeArg> = match args.drift_mode {
        Some(m) => vec![m],
        None => vec![DriftModeArg::Jitter, DriftModeArg::ColumnMix],
    };
    let mut text = String::new();
    let mut table = csv::Writer::from_writer(Vec::new());
    table
        .write_record(["mode", "epsilon", "trials", "max_abs_w", "bound", "fraction", "verdict"])
        .expect("in-memory write");
    for mode in modes {
        let model = DriftModel::new(args.drift_eps, args.jobs, mode.into())?;
        let audit = drivers::audit_drift(&config, &model, args.trials, args.seed, &predicted_prob_matrix)?;
        let verdict = if audit.passed() { "PASS" } else { "FAIL" };
        let name = mode.to_possible_value().expect("named").get_name().to_owned();
        text += &format!(
            "{name:<10} eps {:.4}  max|W| {:.6e}  bound {:.6e}  fraction {:.3e}  {verdict}\n",
            audit.epsilon,
            audit.max_abs_w,
            audit.bound,
            audit.fraction()
        );
        table
            .write_record([
                name,
                audit.epsilon.to_string(),
                audit.trials.to_string(),
                audit.max_abs_w.to_string(),
                audit.bound.to_string(),
                audit.fraction().to_string(),
                verdict.to_owned(),
            ])
            .expect("in-memory write");
    }
    if let Some(path) = &args.out {
        write_atomic(path, &table.into_inner().expect("in-memory write"))?;
    }
    emit(out, &text)
}

fn optimize(args: &OptimizeArgs, out: &mut dyn Write) -> Result<()> {
    let field = match args.field {
        FieldArg::Real => Field::Real,
        FieldArg::Complex => Field::Complex,
    };
    let class = match args.effects {
        EffectsArg::Projective => EffectClass::Projective,
        EffectsArg::General => EffectClass::General,
    };
    let problem = ExtremalProblem::new(args.dim, field, class)?;
    let restarts = args.restarts.unwrap_or_else(|| problem.default_restarts());
    let result = drivers::maximize_witness(&problem, restarts, args.seed)?;
    let export = SearchExport::new(&problem, args.seed, &result)?;
    if let Some(path) = &args.out {
        write_atomic(path, format::search_json(&export).as_bytes())?;
    }
    let target = match problem.known_maximum() {
        Some(t) => format!("{t:.7}"),
        None => "unknown".to_owned(),
    };
    emit(
        out,
        &format!(
            "d = {} {} {}\nbest |W| = {:.10}  (restart {})\ntarget   = {target}\nconverged {}/{} restarts\n",
            args.dim,
            format::field_name(field),
            format::effect_class_name(class),
            result.best_w,
            result.best_restart,
            result.converged_restarts,
            result.restarts
        ),
    )
}
