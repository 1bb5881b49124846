//! Experiment configuration: a flat `key = value` file with `[section]`
//! headers. Keys before the first header belong to `[experiment]`. Command
//! line values are merged on top, so flags win.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use evofs_core::data::{LabelColumn, LoadOptions};
use evofs_core::engine::{Crossover, LocalSearchSpec, SelectionSpec, TerminationSpec};
use evofs_core::fitness::{FitnessMode, FitnessSpec, Validation};
use evofs_core::optimizers::{AlgorithmParams, Encoding, OptimizerConfig, OptimizerId};

use crate::CliError;

pub const DEFAULT_REPEATS: usize = 30;
pub const DEFAULT_POP_SIZE: usize = 30;
pub const DEFAULT_ITERATIONS: usize = 100;

/// Raw settings keyed `section.key`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        let mut section = "experiment".to_string();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            let err = |message: String| CliError::Config {
                line: i + 1,
                message,
            };
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| err(format!("unterminated section header {line:?}")))?
                    .trim();
                if !SECTIONS.contains(&name) {
                    return Err(err(format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let key = format!("{section}.{}", k.trim());
            if values.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(err(format!("duplicate key {key}")));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    /// Sets `key` (either `section.key` or a bare experiment key).
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        let key = if key.contains('.') {
            key.to_string()
        } else {
            format!("experiment.{key}")
        };
        self.values.insert(key, value.into());
    }

    /// Overlays `other`; its values win.
    pub fn merge(&mut self, other: Settings) {
        self.values.extend(other.values);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::Usage(format!("{key} = {v:?}: {e}")))
            })
            .transpose()
    }
}

const SECTIONS: [&str; 4] = ["experiment", "fitness", "termination", "optimizer"];

const EXPERIMENT_KEYS: [&str; 9] = [
    "dataset",
    "label_col",
    "optimizer",
    "fitness",
    "repeats",
    "seed",
    "iterations",
    "pop_size",
    "out_dir",
];
const FITNESS_KEYS: [&str; 5] = [
    "accuracy_weight",
    "knn_k",
    "validation",
    "split_seed",
    "bins",
];
const TERMINATION_KEYS: [&str; 2] = ["target_fitness", "stagnation_window"];

/// Everything a repeated-run experiment needs.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    pub load: LoadOptions,
    pub optimizer: OptimizerId,
    pub optimizer_config: OptimizerConfig,
    pub fitness: FitnessSpec,
    pub termination: TerminationSpec,
    pub repeats: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    /// Defaults for `optimizer` on `dataset`.
    pub fn new(dataset: impl Into<PathBuf>, optimizer: OptimizerId) -> Self {
        Self {
            dataset: dataset.into(),
            load: LoadOptions::default(),
            optimizer,
            optimizer_config: OptimizerConfig::default_for(optimizer, DEFAULT_POP_SIZE),
            fitness: FitnessSpec::default(),
            termination: TerminationSpec::iterations(DEFAULT_ITERATIONS),
            repeats: DEFAULT_REPEATS,
            base_seed: 0,
            out_dir: PathBuf::from("results"),
        }
    }

    pub fn from_settings(s: &Settings) -> Result<Self, CliError> {
        for key in s.values.keys() {
            let (section, name) = key.split_once('.').expect("keys are qualified");
            let known = match section {
                "experiment" => EXPERIMENT_KEYS.contains(&name),
                "fitness" => FITNESS_KEYS.contains(&name),
                "termination" => TERMINATION_KEYS.contains(&name),
                "optimizer" => true,
                _ => false,
            };
            if !known {
                return Err(CliError::Usage(format!("unknown setting {key}")));
            }
        }
        let dataset = s
            .get("experiment.dataset")
            .ok_or_else(|| CliError::Usage("no dataset given".into()))?;
        let optimizer: OptimizerId = s
            .parsed("experiment.optimizer")?
            .ok_or_else(|| CliError::Usage("no optimizer given".into()))?;
        let mut cfg = Self::new(dataset, optimizer);
        if let Some(v) = s.get("experiment.label_col") {
            cfg.load.label_column = parse_label_col(v)?;
        }
        if let Some(v) = s.get("experiment.fitness") {
            cfg.fitness.mode = parse_fitness_mode(v)?;
        }
        if let Some(v) = s.parsed("experiment.repeats")? {
            cfg.repeats = v;
        }
        if let Some(v) = s.parsed("experiment.seed")? {
            cfg.base_seed = v;
        }
        if let Some(v) = s.parsed("experiment.iterations")? {
            cfg.termination.max_iterations = v;
        }
        if let Some(v) = s.parsed("experiment.pop_size")? {
            cfg.optimizer_config.pop_size = v;
        }
        if let Some(v) = s.get("experiment.out_dir") {
            cfg.out_dir = PathBuf::from(v);
        }
        if let Some(v) = s.parsed("fitness.accuracy_weight")? {
            cfg.fitness.accuracy_weight = v;
        }
        if let Some(v) = s.parsed("fitness.knn_k")? {
            cfg.fitness.knn_k = v;
        }
        if let Some(v) = s.get("fitness.validation") {
            cfg.fitness.validation = parse_validation(v)?;
        }
        if let Some(v) = s.parsed("fitness.split_seed")? {
            cfg.fitness.split_seed = v;
        }
        if let Some(v) = s.parsed("fitness.bins")? {
            cfg.fitness.bins = v;
        }
        cfg.termination.target_fitness = s.parsed("termination.target_fitness")?;
        cfg.termination.stagnation_window = s.parsed("termination.stagnation_window")?;

        let opt_keys: BTreeMap<&str, &str> = s
            .values
            .iter()
            .filter_map(|(k, v)| k.strip_prefix("optimizer.").map(|k| (k, v.as_str())))
            .collect();
        apply_optimizer_keys(optimizer, &mut cfg.optimizer_config.params, &opt_keys)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.repeats == 0 {
            return Err(CliError::Usage("repeats must be at least 1".into()));
        }
        self.fitness.validate()?;
        self.termination.validate()?;
        Ok(())
    }
}

pub fn parse_label_col(v: &str) -> Result<LabelColumn, CliError> {
    if v.eq_ignore_ascii_case("last") {
        return Ok(LabelColumn::Last);
    }
    v.parse().map(LabelColumn::Index).map_err(|_| {
        CliError::Usage(format!(
            "label column must be 'last' or an index, got {v:?}"
        ))
    })
}

pub fn parse_fitness_mode(v: &str) -> Result<FitnessMode, CliError> {
    match v.to_ascii_lowercase().as_str() {
        "filter" => Ok(FitnessMode::FilterCorrelation),
        "knn" | "wrapper" => Ok(FitnessMode::WrapperKnn),
        "rough" => Ok(FitnessMode::RoughSetDependency),
        _ => Err(CliError::Usage(format!(
            "fitness must be filter, knn or rough, got {v:?}"
        ))),
    }
}

pub fn fitness_mode_name(mode: FitnessMode) -> &'static str {
    match mode {
        FitnessMode::FilterCorrelation => "filter",
        FitnessMode::WrapperKnn => "knn",
        FitnessMode::RoughSetDependency => "rough",
    }
}

/// `holdout:<fraction>`, `kfold:<k>` or `resubstitution`.
pub fn parse_validation(v: &str) -> Result<Validation, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "validation {v:?} is not holdout:<f>, kfold:<k> or resubstitution"
        ))
    };
    let (kind, arg) = v.split_once(':').unwrap_or((v, ""));
    match kind.trim() {
        "holdout" => Ok(Validation::Holdout(arg.trim().parse().map_err(|_| bad())?)),
        "kfold" => Ok(Validation::KFold(arg.trim().parse().map_err(|_| bad())?)),
        "resubstitution" => Ok(Validation::Resubstitution),
        _ => Err(bad()),
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Usage(format!("optimizer.{key} = {v:?} is not a valid number")))
}

fn opt_num<T: FromStr>(key: &str, v: &str) -> Result<Option<T>, CliError> {
    if v.eq_ignore_ascii_case("auto") {
        Ok(None)
    } else {
        num(key, v).map(Some)
    }
}

fn apply_optimizer_keys(
    id: OptimizerId,
    params: &mut AlgorithmParams,
    keys: &BTreeMap<&str, &str>,
) -> Result<(), CliError> {
    for (&key, &v) in keys {
        let used = match params {
            AlgorithmParams::Ga(c) => match key {
                "selection" => {
                    c.breeder.selection = parse_selection(v)?;
                    true
                }
                "crossover" => {
                    c.breeder.variation.crossover = parse_crossover(v)?;
                    true
                }
                "mutation_rate" => {
                    c.breeder.variation.mutation_rate = num(key, v)?;
                    true
                }
                "elitism" => {
                    c.breeder.elitism = num(key, v)?;
                    true
                }
                "local_search" => {
                    let budget: usize = num(key, v)?;
                    c.breeder.local_search = (budget > 0).then_some(LocalSearchSpec { budget });
                    true
                }
                "encoding" => {
                    c.encoding = parse_encoding(v)?;
                    true
                }
                _ => false,
            },
            AlgorithmParams::Abc(c) => match key {
                "limit" => {
                    c.limit = num(key, v)?;
                    true
                }
                "lower_bound" => {
                    c.lower_bound = num(key, v)?;
                    true
                }
                "upper_bound" => {
                    c.upper_bound = num(key, v)?;
                    true
                }
                "turbulence" => {
                    c.turbulence = num(key, v)?;
                    true
                }
                _ => false,
            },
            AlgorithmParams::Pso(c) => {
                let slot = match key {
                    "c1" => Some(&mut c.c1),
                    "c2" => Some(&mut c.c2),
                    "max_velocity" => Some(&mut c.max_velocity),
                    "min_weight" => Some(&mut c.min_weight),
                    "max_weight" => Some(&mut c.max_weight),
                    "turbulence" => Some(&mut c.turbulence),
                    _ => None,
                };
                match slot {
                    Some(s) => {
                        *s = num(key, v)?;
                        true
                    }
                    None => false,
                }
            }
            AlgorithmParams::Aco(c) => {
                if key == "top_q" {
                    c.top_q = num(key, v)?;
                    true
                } else {
                    let slot = match key {
                        "evaporation" => Some(&mut c.evaporation),
                        "alpha" => Some(&mut c.alpha),
                        "beta" => Some(&mut c.beta),
                        "tau_min" => Some(&mut c.tau_min),
                        "tau_initial" => Some(&mut c.tau_initial),
                        "eta_floor" => Some(&mut c.eta_floor),
                        _ => None,
                    };
                    match slot {
                        Some(s) => {
                            *s = num(key, v)?;
                            true
                        }
                        None => false,
                    }
                }
            }
            AlgorithmParams::Gwo(c) => match key {
                "a_initial" => {
                    c.a_initial = num(key, v)?;
                    true
                }
                "turbulence" => {
                    c.turbulence = num(key, v)?;
                    true
                }
                _ => false,
            },
            AlgorithmParams::Coa(c) => match key {
                "coyotes_per_pack" => {
                    c.coyotes_per_pack = num(key, v)?;
                    true
                }
                "scatter" => {
                    c.scatter = opt_num(key, v)?;
                    true
                }
                "association" => {
                    c.association = opt_num(key, v)?;
                    true
                }
                _ => false,
            },
            AlgorithmParams::Cso(c) => {
                if key == "reorder_period" {
                    c.reorder_period = num(key, v)?;
                    true
                } else {
                    let slot = match key {
                        "rooster_ratio" => Some(&mut c.rooster_ratio),
                        "hen_ratio" => Some(&mut c.hen_ratio),
                        "chick_ratio" => Some(&mut c.chick_ratio),
                        "turbulence" => Some(&mut c.turbulence),
                        _ => None,
                    };
                    match slot {
                        Some(s) => {
                            *s = num(key, v)?;
                            true
                        }
                        None => false,
                    }
                }
            }
            AlgorithmParams::Fsa(c) => match key {
                "visual_scope" => {
                    c.visual_scope = opt_num(key, v)?;
                    true
                }
                "crowding_factor" => {
                    c.crowding_factor = num(key, v)?;
                    true
                }
                _ => false,
            },
        };
        if !used {
            return Err(CliError::Usage(format!(
                "optimizer.{key} is not a setting of {id}"
            )));
        }
    }
    Ok(())
}

/// `tournament[:k]`, `roulette` or `uniform`.
pub fn parse_selection(v: &str) -> Result<SelectionSpec, CliError> {
    let (kind, arg) = v.split_once(':').unwrap_or((v, ""));
    match kind.trim() {
        "tournament" if arg.is_empty() => Ok(SelectionSpec::Tournament { k: 2 }),
        "tournament" => Ok(SelectionSpec::Tournament {
            k: num("selection", arg.trim())?,
        }),
        "roulette" => Ok(SelectionSpec::RouletteWheel),
        "uniform" => Ok(SelectionSpec::Uniform),
        _ => Err(CliError::Usage(format!("unknown selection {v:?}"))),
    }
}

/// `uniform` or `kpoint:<k>`.
pub fn parse_crossover(v: &str) -> Result<Crossover, CliError> {
    let (kind, arg) = v.split_once(':').unwrap_or((v, ""));
    match kind.trim() {
        "uniform" => Ok(Crossover::Uniform),
        "kpoint" => Ok(Crossover::KPoint(num("crossover", arg.trim())?)),
        _ => Err(CliError::Usage(format!("unknown crossover {v:?}"))),
    }
}

/// `binary` or `subset:<m>`.
pub fn parse_encoding(v: &str) -> Result<Encoding, CliError> {
    let (kind, arg) = v.split_once(':').unwrap_or((v, ""));
    match kind.trim() {
        "binary" => Ok(Encoding::BinaryMask),
        "subset" => Ok(Encoding::IntegerSubset(num("encoding", arg.trim())?)),
        _ => Err(CliError::Usage(format!("unknown encoding {v:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_precedence() {
        let mut s = Settings::parse(
            "dataset = data.csv\noptimizer = pso\n# comment\n[fitness]\nknn_k = 3\n\
             [optimizer]\nc1 = 0.5\n[termination]\nstagnation_window = 20\n",
        )
        .unwrap();
        let mut flags = Settings::default();
        flags.set("repeats", "5");
        flags.set("optimizer.c1", "0.7");
        s.merge(flags);
        let cfg = ExperimentConfig::from_settings(&s).unwrap();
        assert_eq!(cfg.optimizer, OptimizerId::Pso);
        assert_eq!(cfg.repeats, 5);
        assert_eq!(cfg.fitness.knn_k, 3);
        assert_eq!(cfg.termination.stagnation_window, Some(20));
        match cfg.optimizer_config.params {
            AlgorithmParams::Pso(p) => assert_eq!(p.c1, 0.7),
            _ => panic!("wrong params"),
        }
    }

    #[test]
    fn errors_carry_line_numbers() {
        match Settings::parse("dataset = a\nnonsense\n") {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(Settings::parse("[bogus]\n").is_err());
        assert!(Settings::parse("a = 1\na = 2\n").is_err());
    }

    #[test]
    fn rejects_unknown_and_misplaced_keys() {
        let s = Settings::parse("dataset = a\noptimizer = pso\ncolour = red\n").unwrap();
        assert!(ExperimentConfig::from_settings(&s).is_err());
        let s = Settings::parse("dataset = a\noptimizer = pso\n[optimizer]\nlimit = 3\n").unwrap();
        assert!(ExperimentConfig::from_settings(&s).is_err());
        let s = Settings::parse("dataset = a\noptimizer = pso\nrepeats = 0\n").unwrap();
        assert!(ExperimentConfig::from_settings(&s).is_err());
    }

    #[test]
    fn value_parsers() {
        assert_eq!(parse_label_col("last").unwrap(), LabelColumn::Last);
        assert_eq!(parse_label_col("0").unwrap(), LabelColumn::Index(0));
        assert_eq!(parse_validation("kfold:5").unwrap(), Validation::KFold(5));
        assert_eq!(
            parse_validation("holdout:0.25").unwrap(),
            Validation::Holdout(0.25)
        );
        assert_eq!(
            parse_selection("tournament:4").unwrap(),
            SelectionSpec::Tournament { k: 4 }
        );
        assert_eq!(parse_crossover("kpoint:2").unwrap(), Crossover::KPoint(2));
        assert!(parse_fitness_mode("magic").is_err());
    }
}
