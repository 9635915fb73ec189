//! Experiment configuration: TOML file, flag overrides, validation.

use std::fmt;
use std::path::PathBuf;

use serde::Deserialize;
use some_core::benchmarks::{CEC2008_IDS, SUITE_SIZE};
use some_core::iir::{DEFAULT_NOISE_SEED, IIR_BUDGET, IIR_LABEL};
use some_core::stats::DEFAULT_SIGNIFICANCE;
use some_core::Variant;

use crate::CliError;

pub const OUTPUT_ENV: &str = "SOME_OUTPUT_DIR";
pub const DEFAULT_OUTPUT: &str = "some-output";
pub const DEFAULT_RUNS: usize = 30;
pub const DEFAULT_BUDGET_MULTIPLIER: u64 = 5000;
pub const DEFAULT_SEED: u64 = 1;

/// One problem of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ProblemRef {
    Benchmark(u8),
    Iir,
}

impl ProblemRef {
    pub fn label(self) -> String {
        match self {
            ProblemRef::Benchmark(id) => format!("f{id}"),
            ProblemRef::Iir => IIR_LABEL.to_string(),
        }
    }

    /// Parses `7`, `f7` or `iir`.
    pub fn parse(token: &str) -> Result<Self, CliError> {
        let t = token.trim().to_ascii_lowercase();
        if t == IIR_LABEL {
            return Ok(ProblemRef::Iir);
        }
        let digits = t.strip_prefix('f').unwrap_or(&t);
        match digits.parse::<i64>() {
            Ok(id) => Self::from_id(id),
            Err(_) => Err(CliError::Config(format!("unknown problem '{token}'"))),
        }
    }

    fn from_id(id: i64) -> Result<Self, CliError> {
        if (1..=SUITE_SIZE as i64).contains(&id) {
            Ok(ProblemRef::Benchmark(id as u8))
        } else {
            Err(CliError::Config(format!("problem id {id} is outside 1..={SUITE_SIZE}")))
        }
    }
}

impl fmt::Display for ProblemRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Expands a comma-separated suite selection: `all`, `cec2008`, ids,
/// `f<id>` or `iir`. Duplicates are dropped and the result is sorted.
pub fn parse_suite(text: &str) -> Result<Vec<ProblemRef>, CliError> {
    let mut out = Vec::new();
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token.to_ascii_lowercase().as_str() {
            "all" => out.extend((1..=SUITE_SIZE).map(ProblemRef::Benchmark)),
            "cec2008" => out.extend(CEC2008_IDS.iter().map(|&id| ProblemRef::Benchmark(id))),
            _ => out.push(ProblemRef::parse(token)?),
        }
    }
    finish_suite(out)
}

fn finish_suite(mut out: Vec<ProblemRef>) -> Result<Vec<ProblemRef>, CliError> {
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err(CliError::Config("suite selects no problems".into()));
    }
    Ok(out)
}

pub fn parse_algorithms(text: &str) -> Result<Vec<Variant>, CliError> {
    text.split(',').map(str::trim).filter(|t| !t.is_empty()).map(parse_variant).collect()
}

fn parse_variant(token: &str) -> Result<Variant, CliError> {
    token.parse::<Variant>().map_err(|_| CliError::Config(format!("unknown algorithm '{token}'")))
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SuiteField {
    Text(String),
    List(Vec<SuiteEntry>),
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SuiteEntry {
    Id(i64),
    Text(String),
}

/// Raw contents of a config file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    suite: Option<SuiteField>,
    algorithms: Option<Vec<String>>,
    reference: Option<String>,
    runs: Option<i64>,
    budget_multiplier: Option<i64>,
    budget: Option<i64>,
    iir_budget: Option<i64>,
    seed: Option<u64>,
    noise_seed: Option<u64>,
    significance: Option<f64>,
    output: Option<PathBuf>,
    paper_reported: Option<PathBuf>,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub suite: Option<String>,
    pub algorithms: Option<String>,
    pub reference: Option<String>,
    pub runs: Option<i64>,
    pub budget_multiplier: Option<i64>,
    pub budget: Option<i64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub paper_reported: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BudgetRule {
    /// `multiplier * n` evaluations for benchmark problems.
    PerDimension(u64),
    /// The same budget for every benchmark problem.
    Flat(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub suite: Vec<ProblemRef>,
    pub algorithms: Vec<Variant>,
    pub reference: Variant,
    pub runs: usize,
    pub budget: BudgetRule,
    pub iir_budget: u64,
    pub seed: u64,
    pub noise_seed: u64,
    pub significance: f64,
    pub output: PathBuf,
    pub paper_reported: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Evaluations per run on `problem` of dimension `dim`.
    pub fn budget_for(&self, problem: ProblemRef, dim: usize) -> u64 {
        match (problem, &self.budget) {
            (ProblemRef::Iir, BudgetRule::Flat(b)) => *b,
            (ProblemRef::Iir, BudgetRule::PerDimension(_)) => self.iir_budget,
            (_, BudgetRule::Flat(b)) => *b,
            (_, BudgetRule::PerDimension(m)) => m * dim as u64,
        }
    }
}

fn positive(name: &str, value: i64) -> Result<u64, CliError> {
    if value <= 0 {
        Err(CliError::Config(format!("{name} must be positive, got {value}")))
    } else {
        Ok(value as u64)
    }
}

/// Parses `text` as a config file. An empty file yields all defaults.
pub fn validate_config(text: &str) -> Result<ExperimentConfig, CliError> {
    resolve(text, &Overrides::default(), None)
}

/// Merges defaults, the config file (if any) and `overrides`, then
/// validates. `env_output` is the value of [`OUTPUT_ENV`].
pub fn resolve(text: &str, overrides: &Overrides, env_output: Option<PathBuf>) -> Result<ExperimentConfig, CliError> {
    let file: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))?;

    let suite = match (&overrides.suite, file.suite) {
        (Some(s), _) => parse_suite(s)?,
        (None, Some(SuiteField::Text(s))) => parse_suite(&s)?,
        (None, Some(SuiteField::List(entries))) => {
            let mut out = Vec::new();
            for e in entries {
                match e {
                    SuiteEntry::Id(id) => out.push(ProblemRef::from_id(id)?),
                    SuiteEntry::Text(s) => out.extend(parse_suite(&s)?),
                }
            }
            finish_suite(out)?
        }
        (None, None) => parse_suite("all")?,
    };

    let algorithms = match (&overrides.algorithms, file.algorithms) {
        (Some(s), _) => parse_algorithms(s)?,
        (None, Some(list)) => list.iter().map(|s| parse_variant(s)).collect::<Result<_, _>>()?,
        (None, None) => vec![Variant::ThreeSome],
    };
    if algorithms.is_empty() {
        return Err(CliError::Config("no algorithms selected".into()));
    }
    for (i, a) in algorithms.iter().enumerate() {
        if algorithms[..i].contains(a) {
            return Err(CliError::Config(format!("algorithm {a} listed twice")));
        }
    }

    let reference = match overrides.reference.clone().or(file.reference) {
        Some(r) => {
            let v = parse_variant(&r)?;
            if !algorithms.contains(&v) {
                return Err(CliError::Config(format!("reference {v} is not among the algorithms")));
            }
            v
        }
        None if algorithms.contains(&Variant::ThreeSome) => Variant::ThreeSome,
        None => algorithms[0],
    };

    let runs = positive("runs", overrides.runs.or(file.runs).unwrap_or(DEFAULT_RUNS as i64))? as usize;
    let budget = match overrides.budget.or(file.budget) {
        Some(b) => BudgetRule::Flat(positive("budget", b)?),
        None => {
            let m = overrides.budget_multiplier.or(file.budget_multiplier).unwrap_or(DEFAULT_BUDGET_MULTIPLIER as i64);
            BudgetRule::PerDimension(positive("budget_multiplier", m)?)
        }
    };
    let iir_budget = positive("iir_budget", file.iir_budget.unwrap_or(IIR_BUDGET as i64))?;
    let significance = file.significance.unwrap_or(DEFAULT_SIGNIFICANCE);
    if !(significance > 0.0 && significance < 1.0) {
        return Err(CliError::Config(format!("significance must lie in (0, 1), got {significance}")));
    }
    let output = overrides
        .output
        .clone()
        .or(file.output)
        .or(env_output)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT));

    Ok(ExperimentConfig {
        suite,
        algorithms,
        reference,
        runs,
        budget,
        iir_budget,
        seed: overrides.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        noise_seed: file.noise_seed.unwrap_or(DEFAULT_NOISE_SEED),
        significance,
        output,
        paper_reported: overrides.paper_reported.clone().or(file.paper_reported),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn err(text: &str) -> String {
        match validate_config(text) {
            Err(CliError::Config(m)) => m,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_file_gives_defaults() {
        let c = validate_config("").unwrap();
        assert_eq!(c.suite.len(), 30);
        assert_eq!(c.algorithms, vec![Variant::ThreeSome]);
        assert_eq!(c.reference, Variant::ThreeSome);
        assert_eq!(c.runs, 30);
        assert_eq!(c.budget, BudgetRule::PerDimension(5000));
        assert_eq!(c.iir_budget, 10_000);
        assert_eq!(c.budget_for(ProblemRef::Benchmark(1), 30), 150_000);
        assert_eq!(c.budget_for(ProblemRef::Iir, 21), 10_000);
        assert_eq!(c.output, PathBuf::from(DEFAULT_OUTPUT));
    }

    #[test]
    fn suite_forms() {
        assert_eq!(parse_suite("cec2008").unwrap().len(), 7);
        assert_eq!(parse_suite("f3, 1 ,iir,1").unwrap(), vec![ProblemRef::Benchmark(1), ProblemRef::Benchmark(3), ProblemRef::Iir]);
        let c = validate_config("suite = [24, \"f2\", \"iir\"]").unwrap();
        assert_eq!(c.suite, vec![ProblemRef::Benchmark(2), ProblemRef::Benchmark(24), ProblemRef::Iir]);
        assert!(err("suite = [31]").contains("31"));
        assert!(err("suite = \"f0\"").contains('0'));
        assert!(err("suite = \"\"").contains("no problems"));
    }

    #[test]
    fn rejections() {
        assert!(err("algorithms = [\"3SOME\", \"4SOME\"]").contains("4SOME"));
        assert!(err("runs = 0").contains("runs"));
        assert!(err("budget_multiplier = -5").contains("budget_multiplier"));
        assert!(err("budget = 0").contains("budget"));
        assert!(err("colour = 3").contains("colour"));
        assert!(err("runs = \"many\"").contains("runs"));
        assert!(err("algorithms = [\"1SOME\"]\nreference = \"3SOME\"").contains("reference"));
        assert!(err("algorithms = [\"1SOME\", \"1some\"]").contains("twice"));
        assert!(err("significance = 1.5").contains("significance"));
    }

    #[test]
    fn flags_override_file_and_env() {
        let text = "runs = 4\nseed = 9\noutput = \"from-file\"";
        let c = resolve(text, &Overrides::default(), Some("from-env".into())).unwrap();
        assert_eq!((c.runs, c.seed), (4, 9));
        assert_eq!(c.output, PathBuf::from("from-file"));
        let c = resolve("", &Overrides::default(), Some("from-env".into())).unwrap();
        assert_eq!(c.output, PathBuf::from("from-env"));
        let o = Overrides {
            runs: Some(2),
            algorithms: Some("1SOME,2SOME_LM".into()),
            budget: Some(100),
            output: Some("flag".into()),
            ..Default::default()
        };
        let c = resolve(text, &o, Some("from-env".into())).unwrap();
        assert_eq!(c.runs, 2);
        assert_eq!(c.reference, Variant::OneSome);
        assert_eq!(c.budget_for(ProblemRef::Benchmark(24), 100), 100);
        assert_eq!(c.output, PathBuf::from("flag"));
    }
}
