use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use evofs_cli::config::parse_label_col;
use evofs_cli::experiment::{comparison_text, REPORT_FILE};
use evofs_cli::oracle::optimum_path;
use evofs_cli::output::write_atomic;
use evofs_cli::{
    compare, generate_oracle_dataset, run_experiment, CliError, ExperimentConfig, OracleSpec,
    Settings,
};
use evofs_core::data::{load_csv, prepare, write_csv, Dataset, LoadOptions};
use evofs_core::engine::RngStream;
use evofs_core::fitness::FitnessSpec;
use evofs_core::reduction::{gp_generate_features, GpConfig, PcaModel};

#[derive(Parser)]
#[command(
    name = "evofs",
    version,
    about = "Nature-inspired feature selection experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repeated seeded runs of one optimizer.
    Run(ExperimentArgs),
    /// Runs several optimizers on one dataset and tabulates them.
    Compare(ExperimentArgs),
    /// Writes the synthetic oracle dataset and its exhaustive optimum.
    GenOracle(OracleArgs),
    /// Fits PCA and writes the model and the projected dataset.
    Pca(PcaArgs),
    /// Appends GP-generated features to a dataset.
    GpGen(GpArgs),
}

#[derive(Args, Clone)]
struct ExperimentArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    /// One optimizer for `run`; a comma-separated list for `compare`.
    #[arg(long, value_delimiter = ',')]
    optimizer: Vec<String>,
    /// filter, knn or rough.
    #[arg(long)]
    fitness: Option<String>,
    #[arg(long)]
    repeats: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    iterations: Option<String>,
    #[arg(long)]
    pop_size: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
    /// `last` or a zero-based column index.
    #[arg(long)]
    label_col: Option<String>,
    /// Any config key as `section.key=value`, e.g. `optimizer.limit=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value = "oracle.csv")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 12)]
    features: usize,
    #[arg(long, default_value_t = 4)]
    informative: usize,
    #[arg(long, default_value_t = 200)]
    rows: usize,
}

#[derive(Args)]
struct PcaArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    components: usize,
    #[arg(long, default_value = "pca")]
    out_dir: PathBuf,
    #[arg(long, default_value = "last")]
    label_col: String,
}

#[derive(Args)]
struct GpArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 20)]
    generations: usize,
    #[arg(long, default_value_t = 60)]
    population: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "last")]
    label_col: String,
}

impl ExperimentArgs {
    fn settings(&self) -> Result<Settings, CliError> {
        let mut s = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        let pairs = [
            ("dataset", &self.dataset),
            ("fitness", &self.fitness),
            ("repeats", &self.repeats),
            ("seed", &self.seed),
            ("iterations", &self.iterations),
            ("pop_size", &self.pop_size),
            ("out_dir", &self.out_dir),
            ("label_col", &self.label_col),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                flags.set(key, v.clone());
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            flags.set(k.trim(), v.trim());
        }
        s.merge(flags);
        Ok(s)
    }
}

fn load(path: &PathBuf, label_col: &str) -> Result<Dataset, CliError> {
    let options = LoadOptions {
        label_column: parse_label_col(label_col)?,
    };
    Ok(prepare(&load_csv(path, &options)?)?)
}

fn write_dataset(ds: &Dataset, path: &std::path::Path) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_csv(ds, &mut buf).map_err(|e| CliError::io(path, e))?;
    write_atomic(path, &buf)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let mut s = args.settings()?;
            match args.optimizer.as_slice() {
                [] => {}
                [one] => s.set("optimizer", one.clone()),
                _ => {
                    return Err(CliError::Usage(
                        "run takes one optimizer; use compare".into(),
                    ))
                }
            }
            let cfg = ExperimentConfig::from_settings(&s)?;
            let report = run_experiment(&cfg)?;
            let a = &report.aggregate;
            println!(
                "{}: mean best fitness {:.6} (sd {:.6}) over {} runs, mean subset size {:.2}",
                report.optimizer,
                a.best_fitness.mean,
                a.best_fitness.std,
                a.completed,
                a.subset_size.mean
            );
            if a.warning() {
                eprintln!(
                    "warning: {} run(s) failed; see {}",
                    a.failed,
                    cfg.out_dir.join(REPORT_FILE).display()
                );
            }
        }
        Command::Compare(args) => {
            let base = args.settings()?;
            if args.optimizer.len() < 2 {
                return Err(CliError::Usage(
                    "compare needs at least two optimizers".into(),
                ));
            }
            let root = ExperimentConfig::from_settings(&{
                let mut s = base.clone();
                s.set("optimizer", args.optimizer[0].clone());
                s
            })?
            .out_dir;
            let cfgs = args
                .optimizer
                .iter()
                .map(|name| {
                    let mut s = base.clone();
                    s.set("optimizer", name.clone());
                    let mut cfg = ExperimentConfig::from_settings(&s)?;
                    cfg.out_dir = root.join(cfg.optimizer.name());
                    Ok(cfg)
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let (_, rows) = compare(&cfgs)?;
            let table = comparison_text(&rows);
            print!("{table}");
            write_atomic(&root.join("comparison.txt"), table.as_bytes())?;
        }
        Command::GenOracle(a) => {
            let spec = OracleSpec {
                n_features: a.features,
                informative: a.informative,
                rows: a.rows,
                seed: a.seed,
                ..Default::default()
            };
            let optimum = generate_oracle_dataset(&a.out, &spec, &FitnessSpec::default())?;
            println!(
                "wrote {} (optimum {:.6}, stored in {})",
                a.out.display(),
                optimum.fitness,
                optimum_path(&a.out).display()
            );
        }
        Command::Pca(a) => {
            let ds = load(&a.dataset, &a.label_col)?;
            let model = PcaModel::fit(&ds, a.components)?;
            write_atomic(&a.out_dir.join("pca_model.txt"), model.to_text().as_bytes())?;
            write_dataset(&model.transform(&ds)?, &a.out_dir.join("projected.csv"))?;
            let total: f64 = model.explained_variance.iter().sum();
            println!(
                "{} components, explained variance {:.6}",
                model.n_components(),
                total
            );
        }
        Command::GpGen(a) => {
            let ds = load(&a.dataset, &a.label_col)?;
            let config = GpConfig {
                generations: a.generations,
                population: a.population,
                ..Default::default()
            };
            let out = gp_generate_features(&ds, a.count, &config, &mut RngStream::new(a.seed))?;
            write_dataset(&out, &a.out)?;
            if let Some(t) = out.provenance.transforms.last() {
                println!("{t}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Usage(_)
                | CliError::Config { .. }
                | CliError::Core(evofs_core::Error::Usage(_)) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
