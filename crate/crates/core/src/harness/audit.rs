//! Re-derives an EA batch summary from its trace files and checks it against
//! `ea_runs.csv` and `ea_summary.csv`.

use std::path::{Path, PathBuf};

use crate::ea::Operator;
use crate::error::{Error, Result};
use crate::harness::csvout::f6;

/// Result of [`audit_ea_output`].
#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    pub runs: usize,
    pub generations: usize,
    pub successes: usize,
    pub mean_fail_cost: f64,
    pub mean_success_generations: f64,
}

struct TraceSummary {
    generations: usize,
    final_sum: String,
}

fn read_rows(path: &Path) -> Result<(csv::StringRecord, Vec<csv::StringRecord>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::parse(path, e))?;
    let header = r.headers()?.clone();
    let rows = r.records().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((header, rows))
}

fn column(header: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::parse(path, format!("missing column {name}")))
}

fn audit_trace(path: &Path, population: usize) -> Result<TraceSummary> {
    let (header, rows) = read_rows(path)?;
    let gen_col = column(&header, "generation", path)?;
    let sum_col = column(&header, "best_sum", path)?;
    let ops: Vec<usize> = Operator::COLUMNS
        .iter()
        .map(|c| column(&header, c, path))
        .collect::<Result<_>>()?;
    if rows.is_empty() {
        return Err(Error::Audit(format!("{}: empty trace", path.display())));
    }
    for (k, row) in rows.iter().enumerate() {
        let g: usize = row[gen_col]
            .parse()
            .map_err(|e| Error::parse(path, format!("generation: {e}")))?;
        if g != k + 1 {
            return Err(Error::Audit(format!(
                "{}: row {} has generation {g}",
                path.display(),
                k + 1
            )));
        }
        let mut total = 0usize;
        for &c in &ops {
            total += row[c]
                .parse::<usize>()
                .map_err(|e| Error::parse(path, format!("attribution: {e}")))?;
        }
        if total != population {
            return Err(Error::Audit(format!(
                "{}: generation {g} attributes {total} members, expected {population}",
                path.display()
            )));
        }
        if k + 1 < rows.len() && &row[sum_col] == "0" {
            return Err(Error::Audit(format!(
                "{}: solved at generation {g} but continued",
                path.display()
            )));
        }
    }
    Ok(TraceSummary {
        generations: rows.len(),
        final_sum: rows[rows.len() - 1][sum_col].to_string(),
    })
}

/// Audits `dir` as written by an EA batch with traces enabled.
pub fn audit_ea_output(dir: &Path, population: usize) -> Result<AuditReport> {
    let runs_path = dir.join("ea_runs.csv");
    let (header, rows) = read_rows(&runs_path)?;
    let inst_col = column(&header, "instance", &runs_path)?;
    let succ_col = column(&header, "success", &runs_path)?;
    let gens_col = column(&header, "generations", &runs_path)?;
    let sum_col = column(&header, "best_sum", &runs_path)?;

    let mut generations = 0;
    let mut ok_gens = Vec::new();
    let mut fail_costs = Vec::new();
    for row in &rows {
        let j: usize = row[inst_col]
            .parse()
            .map_err(|e| Error::parse(&runs_path, format!("instance: {e}")))?;
        let trace_path: PathBuf = dir.join("traces").join(format!("trace_{j:04}.csv"));
        let t = audit_trace(&trace_path, population)?;
        generations += t.generations;
        let claimed_gens: usize = row[gens_col]
            .parse()
            .map_err(|e| Error::parse(&runs_path, format!("generations: {e}")))?;
        let success = &row[succ_col] == "true";
        if claimed_gens != t.generations || row[sum_col] != t.final_sum {
            return Err(Error::Audit(format!(
                "instance {j}: run row ({claimed_gens} generations, sum {}) disagrees with trace ({}, {})",
                &row[sum_col], t.generations, t.final_sum
            )));
        }
        if success != (t.final_sum == "0") {
            return Err(Error::Audit(format!(
                "instance {j}: success flag disagrees with cost"
            )));
        }
        if success {
            ok_gens.push(t.generations as f64);
        } else {
            let c: f64 = t
                .final_sum
                .parse()
                .map_err(|e| Error::parse(&trace_path, format!("best_sum: {e}")))?;
            fail_costs.push(c);
        }
    }
    let mean = |xs: &[f64]| {
        if xs.is_empty() {
            0.0
        } else {
            xs.iter().sum::<f64>() / xs.len() as f64
        }
    };
    let report = AuditReport {
        runs: rows.len(),
        generations,
        successes: ok_gens.len(),
        mean_fail_cost: mean(&fail_costs),
        mean_success_generations: mean(&ok_gens),
    };

    let summary_path = dir.join("ea_summary.csv");
    let (header, rows) = read_rows(&summary_path)?;
    let row = rows
        .first()
        .ok_or_else(|| Error::Audit("empty summary".into()))?;
    let expect = [
        ("instances", report.runs.to_string()),
        ("successes", report.successes.to_string()),
        ("mean_fail_cost", f6(report.mean_fail_cost)),
        (
            "mean_success_generations",
            f6(report.mean_success_generations),
        ),
    ];
    for (name, value) in expect {
        let got = &row[column(&header, name, &summary_path)?];
        if got != value {
            return Err(Error::Audit(format!(
                "summary column {name} is {got}, traces give {value}"
            )));
        }
    }
    Ok(report)
}
