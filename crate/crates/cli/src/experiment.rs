//! Repeated seeded runs, aggregation and report files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use evofs_core::data::{load_csv, prepare, Dataset};
use evofs_core::engine::{RngStream, TerminationSpec};
use evofs_core::fitness::SubsetEvaluator;
use evofs_core::optimizers::{self, IterationRecord, OptimizerId, Problem};
use rayon::prelude::*;

use crate::config::{fitness_mode_name, ExperimentConfig};
use crate::output::{fmt_g12, write_atomic};
use crate::CliError;

pub const REPORT_FILE: &str = "report.txt";
pub const TIMING_FILE: &str = "timing.txt";
pub const CONVERGENCE_HEADER: &str = "run_id,iteration,best_fitness,mean_fitness,subset_size";

/// Outcome of one completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    pub best_mask: Vec<bool>,
    pub best_fitness: f64,
    /// Quality term of the objective (accuracy, correlation or dependency).
    pub accuracy: f64,
    pub subset_size: usize,
    pub selected_features: Vec<String>,
    pub history: Vec<IterationRecord>,
    pub evaluations: usize,
    pub reduct: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutcome {
    Completed(RunRecord),
    Failed {
        run_id: usize,
        seed: u64,
        message: String,
    },
}

impl RunOutcome {
    pub fn run_id(&self) -> usize {
        match self {
            RunOutcome::Completed(r) => r.run_id,
            RunOutcome::Failed { run_id, .. } => *run_id,
        }
    }

    pub fn record(&self) -> Option<&RunRecord> {
        match self {
            RunOutcome::Completed(r) => Some(r),
            RunOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

impl MeanStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self {
                mean: f64::NAN,
                std: f64::NAN,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n == 1 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub completed: usize,
    pub failed: usize,
    pub best_fitness: MeanStd,
    pub subset_size: MeanStd,
    pub accuracy: MeanStd,
}

impl Aggregate {
    pub fn from_runs(runs: &[RunOutcome]) -> Self {
        let done: Vec<&RunRecord> = runs.iter().filter_map(RunOutcome::record).collect();
        let col = |f: &dyn Fn(&RunRecord) -> f64| done.iter().map(|r| f(r)).collect::<Vec<_>>();
        Self {
            completed: done.len(),
            failed: runs.len() - done.len(),
            best_fitness: MeanStd::of(&col(&|r| r.best_fitness)),
            subset_size: MeanStd::of(&col(&|r| r.subset_size as f64)),
            accuracy: MeanStd::of(&col(&|r| r.accuracy)),
        }
    }

    pub fn single_run(&self) -> bool {
        self.completed == 1
    }

    /// Some runs failed; the aggregate covers the completed ones only.
    pub fn warning(&self) -> bool {
        self.failed > 0
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub optimizer: OptimizerId,
    pub dataset: PathBuf,
    pub fitness_mode: &'static str,
    pub max_iterations: usize,
    pub runs: Vec<RunOutcome>,
    pub wall_clock: Vec<Duration>,
    pub aggregate: Aggregate,
}

impl ExperimentReport {
    pub fn records(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter_map(RunOutcome::record)
    }

    pub fn mean_wall_clock(&self) -> Duration {
        let n = self.wall_clock.len().max(1) as u32;
        self.wall_clock.iter().sum::<Duration>() / n
    }
}

/// Loads the dataset and applies mean imputation and min-max scaling.
pub fn prepare_dataset(cfg: &ExperimentConfig) -> Result<Arc<Dataset>, CliError> {
    let raw = load_csv(&cfg.dataset, &cfg.load)?;
    Ok(Arc::new(prepare(&raw)?))
}

fn run_seed(base: u64, run_id: usize) -> u64 {
    base.wrapping_add(run_id as u64)
}

fn single_run(
    cfg: &ExperimentConfig,
    evaluator: &SubsetEvaluator,
    run_id: usize,
) -> (RunOutcome, Duration) {
    let seed = run_seed(cfg.base_seed, run_id);
    let start = Instant::now();
    let mut rng = RngStream::new(seed);
    let result = optimizers::run(
        cfg.optimizer,
        Problem::from_evaluator(evaluator),
        &cfg.optimizer_config,
        &cfg.termination,
        &mut rng,
    );
    let outcome = match result {
        Ok(report) => {
            let mask = report.best.to_mask();
            let names = &evaluator.dataset().feature_names;
            let name_of = |idx: &[usize]| idx.iter().map(|&j| names[j].clone()).collect();
            RunOutcome::Completed(RunRecord {
                run_id,
                seed,
                accuracy: evaluator.quality(&mask).unwrap_or(f64::NAN),
                subset_size: report.best.selected_count(),
                selected_features: name_of(&report.selected_features()),
                best_mask: mask,
                best_fitness: report.best_fitness,
                history: report.history,
                evaluations: report.evaluations,
                reduct: report.reduct.as_deref().map(name_of),
            })
        }
        Err(e) => RunOutcome::Failed {
            run_id,
            seed,
            message: e.to_string(),
        },
    };
    (outcome, start.elapsed())
}

/// Runs every repeat against `evaluator` without touching the filesystem.
/// Configuration problems surface before run 0 starts.
pub fn run_repeats(
    cfg: &ExperimentConfig,
    evaluator: &SubsetEvaluator,
) -> Result<ExperimentReport, CliError> {
    cfg.validate()?;
    // A zero-iteration run exercises all of the optimizer's parameter checks.
    let mut probe = RngStream::new(cfg.base_seed);
    optimizers::run(
        cfg.optimizer,
        Problem::from_evaluator(evaluator),
        &cfg.optimizer_config,
        &TerminationSpec::iterations(0),
        &mut probe,
    )?;
    let results: Vec<(RunOutcome, Duration)> = (0..cfg.repeats)
        .into_par_iter()
        .map(|i| single_run(cfg, evaluator, i))
        .collect();
    let (runs, wall_clock): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    Ok(ExperimentReport {
        optimizer: cfg.optimizer,
        dataset: cfg.dataset.clone(),
        fitness_mode: fitness_mode_name(cfg.fitness.mode),
        max_iterations: cfg.termination.max_iterations,
        aggregate: Aggregate::from_runs(&runs),
        runs,
        wall_clock,
    })
}

/// Full experiment: load, run all repeats, write the report, one convergence
/// CSV per run and the timing file into `cfg.out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    cfg.validate()?;
    let data = prepare_dataset(cfg)?;
    let evaluator = SubsetEvaluator::new(data, cfg.fitness)?;
    let report = run_repeats(cfg, &evaluator)?;
    write_outputs(&report, &cfg.out_dir)?;
    Ok(report)
}

pub fn convergence_path(out_dir: &Path, run_id: usize) -> PathBuf {
    out_dir.join(format!("convergence_run_{run_id}.csv"))
}

pub fn write_outputs(report: &ExperimentReport, out_dir: &Path) -> Result<(), CliError> {
    for run in report.records() {
        write_atomic(
            &convergence_path(out_dir, run.run_id),
            convergence_csv(run).as_bytes(),
        )?;
    }
    let mut timing = String::from("run_id,wall_clock_seconds\n");
    for (run, t) in report.runs.iter().zip(&report.wall_clock) {
        let _ = writeln!(timing, "{},{:.6}", run.run_id(), t.as_secs_f64());
    }
    write_atomic(&out_dir.join(TIMING_FILE), timing.as_bytes())?;
    write_atomic(&out_dir.join(REPORT_FILE), report_text(report).as_bytes())
}

pub fn convergence_csv(run: &RunRecord) -> String {
    let mut s = format!("{CONVERGENCE_HEADER}\n");
    for h in &run.history {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            run.run_id,
            h.iteration,
            fmt_g12(h.best_fitness),
            fmt_g12(h.mean_fitness),
            h.subset_size
        );
    }
    s
}

fn bits(mask: &[bool]) -> String {
    mask.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Report text. Contains no timing so repeated runs are byte-identical.
pub fn report_text(report: &ExperimentReport) -> String {
    let a = &report.aggregate;
    let mut flags = Vec::new();
    if a.single_run() {
        flags.push("single-run");
    }
    if a.warning() {
        flags.push("warning:failed-runs");
    }
    let mut s = String::new();
    let _ = writeln!(s, "[aggregate]");
    let _ = writeln!(s, "optimizer = {}", report.optimizer);
    let _ = writeln!(s, "dataset = {}", report.dataset.display());
    let _ = writeln!(s, "fitness = {}", report.fitness_mode);
    let _ = writeln!(s, "max_iterations = {}", report.max_iterations);
    let _ = writeln!(s, "repeats = {}", report.runs.len());
    let _ = writeln!(s, "completed = {}", a.completed);
    let _ = writeln!(s, "failed = {}", a.failed);
    let _ = writeln!(s, "mean_best_fitness = {:?}", a.best_fitness.mean);
    let _ = writeln!(s, "std_best_fitness = {:?}", a.best_fitness.std);
    let _ = writeln!(s, "mean_subset_size = {:?}", a.subset_size.mean);
    let _ = writeln!(s, "std_subset_size = {:?}", a.subset_size.std);
    let _ = writeln!(s, "mean_accuracy = {:?}", a.accuracy.mean);
    let _ = writeln!(s, "std_accuracy = {:?}", a.accuracy.std);
    let _ = writeln!(
        s,
        "flags = {}",
        if flags.is_empty() {
            "none".to_string()
        } else {
            flags.join(",")
        }
    );
    for run in &report.runs {
        let _ = writeln!(s, "\n[run {}]", run.run_id());
        match run {
            RunOutcome::Completed(r) => {
                let _ = writeln!(s, "seed = {}", r.seed);
                let _ = writeln!(s, "status = completed");
                let _ = writeln!(s, "best_fitness = {:?}", r.best_fitness);
                let _ = writeln!(s, "accuracy = {:?}", r.accuracy);
                let _ = writeln!(s, "subset_size = {}", r.subset_size);
                let _ = writeln!(s, "best_genome = {}", bits(&r.best_mask));
                let _ = writeln!(s, "selected_features = {}", r.selected_features.join(","));
                let _ = writeln!(s, "iterations = {}", r.history.len());
                let _ = writeln!(s, "evaluations = {}", r.evaluations);
                if let Some(reduct) = &r.reduct {
                    let _ = writeln!(s, "reduct = {}", reduct.join(","));
                }
            }
            RunOutcome::Failed { seed, message, .. } => {
                let _ = writeln!(s, "seed = {seed}");
                let _ = writeln!(s, "status = failed");
                let _ = writeln!(s, "error = {message}");
            }
        }
    }
    s
}

/// One row of a comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub label: String,
    pub best_fitness: MeanStd,
    pub mean_subset_size: f64,
    pub mean_wall_clock: Duration,
}

/// Rows sorted by mean fitness (descending), then smaller subsets.
pub fn comparison_rows(reports: &[ExperimentReport]) -> Vec<ComparisonRow> {
    let mut rows: Vec<ComparisonRow> = reports
        .iter()
        .map(|r| ComparisonRow {
            label: r.optimizer.to_string(),
            best_fitness: r.aggregate.best_fitness,
            mean_subset_size: r.aggregate.subset_size.mean,
            mean_wall_clock: r.mean_wall_clock(),
        })
        .collect();
    rows.sort_by(|a, b| {
        b.best_fitness
            .mean
            .total_cmp(&a.best_fitness.mean)
            .then(a.mean_subset_size.total_cmp(&b.mean_subset_size))
    });
    rows
}

pub fn comparison_text(rows: &[ComparisonRow]) -> String {
    let mut s = format!(
        "{:<10} {:>24} {:>12} {:>14}\n",
        "optimizer", "best_fitness", "subset_size", "wall_clock_s"
    );
    for r in rows {
        let fit = format!("{:.6} +- {:.6}", r.best_fitness.mean, r.best_fitness.std);
        let _ = writeln!(
            s,
            "{:<10} {:>24} {:>12.3} {:>14.4}",
            r.label,
            fit,
            r.mean_subset_size,
            r.mean_wall_clock.as_secs_f64()
        );
    }
    s
}

/// Runs every configuration on their shared dataset, each into its own
/// output directory.
pub fn compare(
    cfgs: &[ExperimentConfig],
) -> Result<(Vec<ExperimentReport>, Vec<ComparisonRow>), CliError> {
    if cfgs.len() < 2 {
        return Err(CliError::Usage(
            "compare needs at least two configurations".into(),
        ));
    }
    if let Some(other) = cfgs
        .iter()
        .find(|c| c.dataset != cfgs[0].dataset || c.load != cfgs[0].load)
    {
        return Err(CliError::Usage(format!(
            "compare needs one dataset, got {} and {}",
            cfgs[0].dataset.display(),
            other.dataset.display()
        )));
    }
    let reports = cfgs
        .iter()
        .map(run_experiment)
        .collect::<Result<Vec<_>, _>>()?;
    let rows = comparison_rows(&reports);
    Ok((reports, rows))
}
