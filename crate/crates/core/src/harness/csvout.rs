//! CSV schemas. Every file starts with a header row; fields are quoted
//! RFC 4180-style where needed. Floating-point columns use six decimals.
//!
//! | file              | columns |
//! |-------------------|---------|
//! | `ea_runs.csv`     | instance, seed, chain, maxsteps, success, generations, best_sum, best_max, best_mean, best_weighted_sum, best_weighted_max, best_weighted_mean, best_word |
//! | `ea_summary.csv`  | degree, params, chain, maxsteps, instances, successes, success_rate, mean_fail_cost, mean_success_generations, metric |
//! | `trace_NNNN.csv`  | generation, best_sum, best_max, best_mean, best_weighted_sum, best_weighted_max, best_weighted_mean, best_word, initial, h1..h6, crossover, selection, chain |
//! | `lba_sweep.csv`   | heuristic, instances, successes, success_rate, mean_iterations_on_success |
//! | `lba_runs.csv`    | heuristic, instance, success, iterations, best_sum |
//! | `chains.csv`      | iteration, chain, train_*, test_*, valid_* (three objective components each), best, accepted |
//! | `table.csv`       | degree, params, insertion, chain_metric, iteration, best_chain, runs |

use std::fs::File;
use std::path::Path;

use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::aag::CostVector;
use crate::ea::{EaRunResult, GenerationRecord, Operator};
use crate::error::{Error, Result};

pub fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn rat(x: &BigRational) -> String {
    f6(x.to_f64().unwrap_or(f64::INFINITY))
}

pub fn cost_fields(c: &CostVector) -> [String; 6] {
    [
        c.sum.to_string(),
        c.max.to_string(),
        rat(&c.mean),
        c.weighted_sum.to_string(),
        c.weighted_max.to_string(),
        rat(&c.weighted_mean),
    ]
}

pub fn writer(path: &Path) -> Result<csv::Writer<File>> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::Writer::from_writer(f))
}

pub const EA_RUNS_HEADER: [&str; 13] = [
    "instance",
    "seed",
    "chain",
    "maxsteps",
    "success",
    "generations",
    "best_sum",
    "best_max",
    "best_mean",
    "best_weighted_sum",
    "best_weighted_max",
    "best_weighted_mean",
    "best_word",
];

pub fn ea_run_row(instance: usize, chain: &str, maxsteps: usize, r: &EaRunResult) -> Vec<String> {
    let mut row = vec![
        instance.to_string(),
        r.seed.to_string(),
        chain.to_string(),
        maxsteps.to_string(),
        r.success.to_string(),
        r.generations_used.to_string(),
    ];
    row.extend(cost_fields(&r.best_cost));
    row.push(r.best_word.to_string());
    row
}

pub fn trace_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "generation",
        "best_sum",
        "best_max",
        "best_mean",
        "best_weighted_sum",
        "best_weighted_max",
        "best_weighted_mean",
        "best_word",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(Operator::COLUMNS.iter().map(|s| s.to_string()));
    h
}

pub fn trace_row(rec: &GenerationRecord) -> Vec<String> {
    let mut row = vec![rec.generation.to_string()];
    row.extend(cost_fields(&rec.best_cost));
    row.push(rec.best_word.to_string());
    row.extend(rec.attribution.0.iter().map(|c| c.to_string()));
    row
}

pub fn write_trace(path: &Path, trace: &[GenerationRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(trace_header())?;
    for rec in trace {
        w.write_record(trace_row(rec))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
