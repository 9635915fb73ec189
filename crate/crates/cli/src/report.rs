//! Result tables, rank-sum verdicts, Holm table, convergence trends and run
//! archives.

use std::fs;
use std::path::{Path, PathBuf};

use some_core::iir::{self, FilterCoeffs, SignalPair, IIR_LABEL};
use some_core::search::CHECKPOINTS_PER_RUN;
use some_core::stats::{self, SampleSet};
use some_core::Variant;

use crate::experiment::BatchRecord;
use crate::CliError;

pub const RESULTS_FILE: &str = "results.csv";
pub const WILCOXON_FILE: &str = "wilcoxon.csv";
pub const HOLM_FILE: &str = "holm.csv";
pub const TRENDS_DIR: &str = "trends";
pub const RUNS_DIR: &str = "runs";
pub const IIR_RESPONSE_FILE: &str = "iir_response.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";

/// Scientific notation with seven significant digits.
pub fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| io_err(path, e))
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(header).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

fn batch_file_name(r: &BatchRecord) -> String {
    format!("{}_{}", r.problem, r.algorithm.label())
}

/// Writes one JSON file per batch under `out/runs`.
pub fn save_records(records: &[BatchRecord], out: &Path) -> Result<(), CliError> {
    let dir = out.join(RUNS_DIR);
    create_dir(&dir)?;
    for r in records {
        let path = dir.join(format!("{}.json", batch_file_name(r)));
        let text = serde_json::to_string(r).map_err(|e| io_err(&path, e))?;
        fs::write(&path, text).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

/// Reads every batch stored under `out/runs`, in report order.
pub fn load_records(out: &Path) -> Result<Vec<BatchRecord>, CliError> {
    let dir = out.join(RUNS_DIR);
    let entries = fs::read_dir(&dir).map_err(|e| io_err(&dir, e))?;
    let mut records = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| io_err(&dir, e))?.path();
        if path.extension().is_some_and(|e| e == "json") {
            let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
            let record: BatchRecord = serde_json::from_str(&text).map_err(|e| io_err(&path, e))?;
            records.push(record);
        }
    }
    if records.is_empty() {
        return Err(CliError::Runtime(format!("no run files in {}", dir.display())));
    }
    records.sort_by_key(BatchRecord::sort_key);
    Ok(records)
}

fn problems_of(records: &[BatchRecord]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for r in records {
        if !out.contains(&r.problem) {
            out.push(r.problem.clone());
        }
    }
    out
}

fn algorithms_of(records: &[BatchRecord]) -> Vec<Variant> {
    Variant::ALL.iter().copied().filter(|v| records.iter().any(|r| r.algorithm == *v)).collect()
}

fn find<'a>(records: &'a [BatchRecord], problem: &str, algorithm: Variant) -> Option<&'a BatchRecord> {
    records.iter().find(|r| r.problem == problem && r.algorithm == algorithm)
}

fn sample(r: &BatchRecord) -> Result<SampleSet, CliError> {
    SampleSet::new(r.final_fitness()).map_err(|e| CliError::Runtime(format!("{} {}: {e}", r.problem, r.algorithm)))
}

pub fn results_rows(records: &[BatchRecord]) -> Vec<Vec<String>> {
    records
        .iter()
        .map(|r| {
            let f = r.final_fitness();
            let (mean, std) = stats::mean_std(&f);
            let best = f.iter().copied().fold(f64::INFINITY, f64::min);
            let worst = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            vec![
                r.problem.clone(),
                r.algorithm.to_string(),
                r.dimension.to_string(),
                r.budget.to_string(),
                r.runs.len().to_string(),
                sci(mean),
                sci(std),
                sci(best),
                sci(worst),
            ]
        })
        .collect()
}

pub fn wilcoxon_rows(records: &[BatchRecord], reference: Variant, significance: f64) -> Result<Vec<Vec<String>>, CliError> {
    let mut rows = Vec::new();
    for problem in problems_of(records) {
        let Some(base) = find(records, &problem, reference) else { continue };
        let a = sample(base)?;
        for challenger in records.iter().filter(|r| r.problem == problem && r.algorithm != reference) {
            let b = sample(challenger)?;
            let test = stats::rank_sum_test(a.values(), b.values()).map_err(|e| CliError::Runtime(e.to_string()))?;
            let verdict = stats::wilcoxon_verdict(&a, &b, significance).map_err(|e| CliError::Runtime(e.to_string()))?;
            rows.push(vec![
                problem.clone(),
                reference.to_string(),
                challenger.algorithm.to_string(),
                sci(test.p_two_sided),
                verdict.to_string(),
            ]);
        }
    }
    Ok(rows)
}

/// Holm rows over the problems on which every algorithm was run. Empty when
/// fewer than two algorithms are present.
pub fn holm_rows(records: &[BatchRecord], reference: Variant, delta: f64) -> Result<Vec<Vec<String>>, CliError> {
    let algorithms = algorithms_of(records);
    let Some(ref_index) = algorithms.iter().position(|v| *v == reference) else {
        return Ok(Vec::new());
    };
    if algorithms.len() < 2 {
        return Ok(Vec::new());
    }
    let complete: Vec<String> = problems_of(records)
        .into_iter()
        .filter(|p| algorithms.iter().all(|a| find(records, p, *a).is_some()))
        .collect();
    if complete.is_empty() {
        return Ok(Vec::new());
    }
    let means: Vec<Vec<f64>> = algorithms
        .iter()
        .map(|a| complete.iter().map(|p| stats::mean_std(&find(records, p, *a).unwrap().final_fitness()).0).collect())
        .collect();
    let ranks = stats::rank_scores(&means).map_err(|e| CliError::Runtime(e.to_string()))?;
    let labels: Vec<&str> = algorithms.iter().map(|a| a.label()).collect();
    let rows = stats::holm_procedure(&ranks, &labels, ref_index, complete.len(), delta)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(rows
        .into_iter()
        .map(|r| vec![r.j_index.to_string(), r.algorithm, sci(r.z), sci(r.p), sci(r.threshold), r.hypothesis.to_string()])
        .collect())
}

/// Evaluation counts at which trends are reported: multiples of
/// `budget / 200`, plus the budget itself.
pub fn trend_grid(budget: u64) -> Vec<u64> {
    let step = (budget / CHECKPOINTS_PER_RUN).max(1);
    let mut grid: Vec<u64> = (1..).map(|i| i * step).take_while(|&g| g <= budget).collect();
    if grid.last() != Some(&budget) {
        grid.push(budget);
    }
    grid
}

/// Mean best-so-far fitness over the runs at each grid point.
pub fn trend(record: &BatchRecord) -> Vec<(u64, f64)> {
    let mut out: Vec<(u64, f64)> = Vec::new();
    for g in trend_grid(record.budget) {
        let values: Option<Vec<f64>> = record.runs.iter().map(|r| r.fitness_at(g)).collect();
        let Some(values) = values else { continue };
        let mut mean = stats::mean_std(&values).0;
        // Every run is non-increasing; clamp away rounding in the average.
        if let Some(&(_, prev)) = out.last() {
            mean = mean.min(prev);
        }
        out.push((g, mean));
    }
    out
}

fn write_iir_response(record: &BatchRecord, path: &Path) -> Result<bool, CliError> {
    let (Some(noise_seed), Some(best)) = (record.noise_seed, record.best_run()) else {
        return Ok(false);
    };
    let coeffs = FilterCoeffs::unpack(&best.best.genes).map_err(|e| CliError::Runtime(e.to_string()))?;
    let signals = SignalPair::new(noise_seed);
    let rows: Vec<Vec<String>> = iir::response_table(&coeffs, &signals, Default::default())
        .into_iter()
        .map(|r| vec![r.k.to_string(), sci(r.u), sci(r.d), sci(r.y)])
        .collect();
    write_csv(path, &["k", "u", "d", "y_best"], &rows)?;
    Ok(true)
}

fn comparison_rows(records: &[BatchRecord], paper: &Path) -> Result<Vec<Vec<String>>, CliError> {
    let mut rows: Vec<Vec<String>> = results_rows(records)
        .into_iter()
        .map(|r| vec![r[0].clone(), r[1].clone(), "measured".into(), r[5].clone(), r[6].clone()])
        .collect();
    let mut reader = csv::Reader::from_path(paper).map_err(|e| CliError::Config(format!("{}: {e}", paper.display())))?;
    let headers = reader.headers().map_err(|e| CliError::Config(format!("{}: {e}", paper.display())))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Config(format!("{}: missing column '{name}'", paper.display())))
    };
    let (p, a, m, s) = (col("problem")?, col("algorithm")?, col("mean")?, col("std")?);
    for rec in reader.records() {
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", paper.display())))?;
        let get = |i: usize| rec.get(i).unwrap_or("").trim().to_string();
        rows.push(vec![get(p), get(a), "paper-reported".into(), get(m), get(s)]);
    }
    Ok(rows)
}

/// Writes every report for `records` into `out` and returns the paths.
pub fn write_reports(
    records: &[BatchRecord],
    reference: Variant,
    significance: f64,
    out: &Path,
    paper_reported: Option<&Path>,
) -> Result<Vec<PathBuf>, CliError> {
    create_dir(out)?;
    let mut written = Vec::new();

    let path = out.join(RESULTS_FILE);
    write_csv(
        &path,
        &["problem", "algorithm", "dimension", "budget", "runs", "mean", "std", "best", "worst"],
        &results_rows(records),
    )?;
    written.push(path);

    let path = out.join(WILCOXON_FILE);
    write_csv(&path, &["problem", "reference", "challenger", "p_value", "verdict"], &wilcoxon_rows(records, reference, significance)?)?;
    written.push(path);

    let path = out.join(HOLM_FILE);
    write_csv(&path, &["j_index", "algorithm", "z", "p", "threshold", "hypothesis"], &holm_rows(records, reference, significance)?)?;
    written.push(path);

    let trends = out.join(TRENDS_DIR);
    create_dir(&trends)?;
    for r in records {
        let path = trends.join(format!("{}.csv", batch_file_name(r)));
        let rows: Vec<Vec<String>> = trend(r).into_iter().map(|(g, f)| vec![g.to_string(), sci(f)]).collect();
        write_csv(&path, &["evaluations", "mean_best_fitness"], &rows)?;
        written.push(path);
    }

    if let Some(r) = records.iter().find(|r| r.problem == IIR_LABEL && r.algorithm == reference) {
        let path = out.join(IIR_RESPONSE_FILE);
        if write_iir_response(r, &path)? {
            written.push(path);
        }
    }

    if let Some(paper) = paper_reported {
        let path = out.join(COMPARISON_FILE);
        write_csv(&path, &["problem", "algorithm", "source", "mean", "std"], &comparison_rows(records, paper)?)?;
        written.push(path);
    }
    Ok(written)
}
