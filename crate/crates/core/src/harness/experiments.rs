//! Batch runners behind the CLI subcommands.
//!
//! Seed paths (see [`RunSeed::derive`]):
//!
//! | stream                         | path                       |
//! |--------------------------------|----------------------------|
//! | instance `j` of set `label`    | `instances/{label}/{j}`    |
//! | EA on instance `j`             | `ea/{chain}/inst{j}`       |
//! | hillclimber `H` on instance `j`| `lba/{H}/inst{j}`          |
//! | chain search, run `r`          | `hh/run{r}`                |

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aag::{generate_instance, load_instance, save_instance, AagInstance, AagParams};
use crate::ea::{run_ea_traced, EaConfig, EaRunResult, GenerationRecord};
use crate::error::{Error, Result};
use crate::harness::csvout::{self, ea_run_row, f6, writer, EA_RUNS_HEADER};
use crate::harness::parallel::Executor;
use crate::harness::seed::RunSeed;
use crate::heuristics::HeuristicId;
use crate::hyperheuristic::{
    run_hyperheuristic, HhConfig, HhRunReport, InstanceSets, PhaseMetrics,
};
use crate::lba::{run_lba, LbaConfig};
use crate::pcgroup::GroupSpec;

pub fn instance_seed(master: u64, label: &str, j: usize) -> RunSeed {
    RunSeed::derive(master, &format!("instances/{label}/{j}"))
}

/// `count` seeded instances; instance `j` depends only on `(master, label, j)`.
pub fn generate_instance_set(
    spec: &GroupSpec,
    params: AagParams,
    count: usize,
    master: u64,
    label: &str,
    exec: &Executor,
) -> Result<Vec<AagInstance>> {
    let idx: Vec<usize> = (0..count).collect();
    exec.map(&idx, |&j| {
        generate_instance(spec, params, instance_seed(master, label, j))
    })
    .into_iter()
    .collect()
}

pub fn instance_file_name(j: usize) -> String {
    format!("instance_{j:04}.json")
}

pub fn write_instance_dir(spec: &GroupSpec, instances: &[AagInstance], dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (j, inst) in instances.iter().enumerate() {
        save_instance(spec, inst, dir.join(instance_file_name(j)))?;
    }
    Ok(())
}

/// Loads every `*.json` instance in `dir`, in file-name order.
pub fn load_instance_dir(spec: &GroupSpec, dir: &Path) -> Result<Vec<AagInstance>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(Error::InvalidParams(format!(
            "no instances in {}",
            dir.display()
        )));
    }
    paths.iter().map(|p| load_instance(spec, p)).collect()
}

pub fn ea_seed(master: u64, cfg: &EaConfig, j: usize) -> RunSeed {
    RunSeed::derive(master, &format!("ea/{}/inst{j}", cfg.injected_chain))
}

/// Runs the EA on every instance (instances in parallel).
pub fn run_ea_batch(
    spec: &GroupSpec,
    instances: &[AagInstance],
    cfg: &EaConfig,
    master: u64,
    exec: &Executor,
) -> Result<Vec<(EaRunResult, Vec<GenerationRecord>)>> {
    exec.map_indexed(instances, |j, inst| {
        run_ea_traced(spec, inst, cfg, ea_seed(master, cfg, j), exec, None)
    })
    .into_iter()
    .collect()
}

pub const EA_SUMMARY_HEADER: [&str; 10] = [
    "degree",
    "params",
    "chain",
    "maxsteps",
    "instances",
    "successes",
    "success_rate",
    "mean_fail_cost",
    "mean_success_generations",
    "metric",
];

pub fn summary_row(
    degree: usize,
    params: &AagParams,
    cfg: &EaConfig,
    m: &PhaseMetrics,
) -> Vec<String> {
    vec![
        degree.to_string(),
        params.to_string(),
        cfg.injected_chain.to_string(),
        cfg.maxsteps.to_string(),
        m.runs.to_string(),
        m.successes.to_string(),
        f6(m.success_rate()),
        f6(m.mean_fail_cost),
        f6(m.mean_success_generations),
        m.to_string(),
    ]
}

/// Output of [`write_ea_outputs`].
#[derive(Clone, Debug)]
pub struct EaBatchOutput {
    pub metrics: PhaseMetrics,
    pub runs_csv: PathBuf,
    pub summary_csv: PathBuf,
}

/// Writes `ea_runs.csv`, `ea_summary.csv` and, when `traces` is set,
/// `traces/trace_NNNN.csv` under `out`.
pub fn write_ea_outputs(
    spec: &GroupSpec,
    params: &AagParams,
    cfg: &EaConfig,
    runs: &[(EaRunResult, Vec<GenerationRecord>)],
    out: &Path,
    traces: bool,
) -> Result<EaBatchOutput> {
    let results: Vec<EaRunResult> = runs.iter().map(|(r, _)| r.clone()).collect();
    let metrics = PhaseMetrics::from_results(&results)?;
    let runs_csv = out.join("ea_runs.csv");
    let mut w = writer(&runs_csv)?;
    w.write_record(EA_RUNS_HEADER)?;
    let chain = cfg.injected_chain.to_string();
    for (j, r) in results.iter().enumerate() {
        w.write_record(ea_run_row(j, &chain, cfg.maxsteps, r))?;
    }
    w.flush().map_err(|e| Error::io(&runs_csv, e))?;

    let summary_csv = out.join("ea_summary.csv");
    let mut w = writer(&summary_csv)?;
    w.write_record(EA_SUMMARY_HEADER)?;
    w.write_record(summary_row(spec.degree(), params, cfg, &metrics))?;
    w.flush().map_err(|e| Error::io(&summary_csv, e))?;

    if traces {
        for (j, (_, trace)) in runs.iter().enumerate() {
            csvout::write_trace(&out.join("traces").join(format!("trace_{j:04}.csv")), trace)?;
        }
    }
    Ok(EaBatchOutput {
        metrics,
        runs_csv,
        summary_csv,
    })
}

/// One row of the hillclimber sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct LbaSweepRow {
    pub heuristic: HeuristicId,
    pub instances: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_iterations_on_success: f64,
    pub runs: Vec<EaRunResult>,
}

pub fn lba_seed(master: u64, h: HeuristicId, j: usize) -> RunSeed {
    RunSeed::derive(master, &format!("lba/{h}/inst{j}"))
}

/// Runs each hillclimber on every instance.
pub fn run_lba_sweep(
    spec: &GroupSpec,
    instances: &[AagInstance],
    heuristics: &[HeuristicId],
    max_iterations: usize,
    master: u64,
    exec: &Executor,
) -> Vec<LbaSweepRow> {
    heuristics
        .iter()
        .map(|&h| {
            let cfg = LbaConfig::new(h, max_iterations);
            let runs = exec.map_indexed(instances, |j, inst| {
                run_lba(spec, inst, &cfg, lba_seed(master, h, j))
            });
            let ok: Vec<&EaRunResult> = runs.iter().filter(|r| r.success).collect();
            let mean_it = if ok.is_empty() {
                0.0
            } else {
                ok.iter().map(|r| r.generations_used as f64).sum::<f64>() / ok.len() as f64
            };
            LbaSweepRow {
                heuristic: h,
                instances: runs.len(),
                successes: ok.len(),
                success_rate: ok.len() as f64 / runs.len().max(1) as f64,
                mean_iterations_on_success: mean_it,
                runs,
            }
        })
        .collect()
}

pub fn write_lba_outputs(rows: &[LbaSweepRow], out: &Path) -> Result<PathBuf> {
    let path = out.join("lba_sweep.csv");
    let mut w = writer(&path)?;
    w.write_record([
        "heuristic",
        "instances",
        "successes",
        "success_rate",
        "mean_iterations_on_success",
    ])?;
    for r in rows {
        w.write_record([
            r.heuristic.to_string(),
            r.instances.to_string(),
            r.successes.to_string(),
            f6(r.success_rate),
            f6(r.mean_iterations_on_success),
        ])?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let runs_path = out.join("lba_runs.csv");
    let mut w = writer(&runs_path)?;
    w.write_record(["heuristic", "instance", "success", "iterations", "best_sum"])?;
    for r in rows {
        for (j, run) in r.runs.iter().enumerate() {
            w.write_record([
                r.heuristic.to_string(),
                j.to_string(),
                run.success.to_string(),
                run.generations_used.to_string(),
                run.best_cost.sum.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(&runs_path, e))?;
    Ok(path)
}

/// Instance sets for a chain search, labelled `train`, `test` and `valid`.
pub fn generate_instance_sets(
    spec: &GroupSpec,
    params: AagParams,
    hh: &HhConfig,
    master: u64,
    exec: &Executor,
) -> Result<InstanceSets> {
    Ok(InstanceSets {
        train: generate_instance_set(spec, params, hh.n_train, master, "train", exec)?,
        test: generate_instance_set(spec, params, hh.n_test, master, "test", exec)?,
        valid: generate_instance_set(spec, params, hh.n_valid, master, "valid", exec)?,
    })
}

/// Metadata written next to each chain-search report.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HhReportFile {
    pub degree: usize,
    pub params: AagParams,
    pub master_seed: u64,
    pub run: usize,
    pub hh: HhConfig,
    pub report: HhRunReport,
}

pub const CHAINS_HEADER: [&str; 13] = [
    "iteration",
    "chain",
    "train_fail_cost",
    "train_neg_success",
    "train_generations",
    "test_fail_cost",
    "test_neg_success",
    "test_generations",
    "valid_neg_success",
    "valid_fail_cost",
    "valid_generations",
    "best",
    "accepted",
];

fn objective_fields(o: Option<crate::hyperheuristic::ObjectiveVector>) -> [String; 3] {
    match o {
        Some(v) => v.0.map(f6),
        None => Default::default(),
    }
}

/// Writes `report.json` and `chains.csv` for one search run.
pub fn write_hh_outputs(file: &HhReportFile, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json = serde_json::to_string_pretty(file).expect("serializable") + "\n";
    let path = dir.join("report.json");
    std::fs::write(&path, json).map_err(|e| Error::io(&path, e))?;

    let path = dir.join("chains.csv");
    let mut w = writer(&path)?;
    w.write_record(CHAINS_HEADER)?;
    let report = &file.report;
    for rec in &report.records {
        let valid = report.validation.as_ref().and_then(|v| {
            if rec.iteration == report.best_iteration {
                Some(v.best_objective)
            } else if rec.iteration == 1 {
                Some(v.initial_objective)
            } else {
                None
            }
        });
        let mut row = vec![rec.iteration.to_string(), rec.chain.to_string()];
        row.extend(objective_fields(Some(rec.train.objective())));
        let test = match rec.iteration {
            1 => report.initial_test,
            _ => rec.test,
        };
        row.extend(objective_fields(test.map(|t| t.objective())));
        row.extend(objective_fields(valid));
        row.push(rec.best.to_string());
        row.push(rec.accepted.to_string());
        w.write_record(row)?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

/// Outcome of [`run_hh_experiment`].
#[derive(Clone, Debug)]
pub struct HhExperimentOutcome {
    pub reports: Vec<HhReportFile>,
    /// 1-based index of the first run whose best chain validated as an
    /// improvement.
    pub improved_run: Option<usize>,
}

/// Repeats the chain search up to `runs` times with fresh instance sets,
/// stopping at the first run whose best chain beats the initial chain on
/// validation. Each run writes under `out/run{r}`.
#[allow(clippy::too_many_arguments)]
pub fn run_hh_experiment(
    spec: &GroupSpec,
    params: AagParams,
    ea_cfg: &EaConfig,
    hh_cfg: &HhConfig,
    master: u64,
    runs: usize,
    exec: &Executor,
    out: Option<&Path>,
) -> Result<HhExperimentOutcome> {
    let mut reports = Vec::new();
    let mut improved_run = None;
    for r in 0..runs {
        let run_master = RunSeed::derive(master, &format!("hh/run{r}"));
        let sets_master = u64::from_le_bytes(run_master.bytes()[..8].try_into().expect("8 bytes"));
        let sets = generate_instance_sets(spec, params, hh_cfg, sets_master, exec)?;
        let report = run_hyperheuristic(spec, &sets, ea_cfg, hh_cfg, run_master, exec)?;
        let improved = report.validation.as_ref().is_some_and(|v| v.improved);
        let file = HhReportFile {
            degree: spec.degree(),
            params,
            master_seed: master,
            run: r + 1,
            hh: hh_cfg.clone(),
            report,
        };
        if let Some(dir) = out {
            write_hh_outputs(&file, &dir.join(format!("run{}", r + 1)))?;
        }
        reports.push(file);
        if improved {
            improved_run = Some(r + 1);
            break;
        }
    }
    Ok(HhExperimentOutcome {
        reports,
        improved_run,
    })
}

pub const TABLE_HEADER: [&str; 7] = [
    "degree",
    "params",
    "insertion",
    "chain_metric",
    "iteration",
    "best_chain",
    "runs",
];

/// Collects the `report.json` files below each directory into one
/// table row per directory: the last run's validation of the initial chain,
/// the best chain's validation, its iteration, the chain in run-length form
/// and the number of runs taken.
pub fn build_table(dirs: &[PathBuf], out: &Path) -> Result<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    for dir in dirs {
        let mut run_dirs: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.join("report.json").exists())
            .collect();
        run_dirs.sort_by_key(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_prefix("run"))
                .and_then(|n| n.parse::<usize>().ok())
                .unwrap_or(usize::MAX)
        });
        let Some(last) = run_dirs.last() else {
            return Err(Error::InvalidParams(format!(
                "no run*/report.json under {}",
                dir.display()
            )));
        };
        let path = last.join("report.json");
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let file: HhReportFile = serde_json::from_str(&text).map_err(|e| Error::parse(&path, e))?;
        let rep = &file.report;
        let (insertion, chain_metric) = match &rep.validation {
            Some(v) => (v.initial.to_string(), v.best.to_string()),
            None => (String::new(), String::new()),
        };
        rows.push(vec![
            file.degree.to_string(),
            file.params.to_string(),
            insertion,
            chain_metric,
            rep.best_iteration.to_string(),
            rep.best_chain.to_compact_string(),
            run_dirs.len().to_string(),
        ]);
    }
    let mut w = writer(out)?;
    w.write_record(TABLE_HEADER)?;
    for r in &rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| Error::io(out, e))?;
    Ok(rows)
}
