use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use polyhh_core::harness::audit::audit_ea_output;
use polyhh_core::harness::config::{parse_initial_chain, ExperimentConfig, GroupSource};
use polyhh_core::harness::experiments::{
    build_table, generate_instance_set, load_instance_dir, run_ea_batch, run_hh_experiment,
    run_lba_sweep, write_ea_outputs, write_instance_dir, write_lba_outputs,
};
use polyhh_core::harness::parallel::WORKERS_ENV;
use polyhh_core::lba::DEFAULT_SWEEP;
use polyhh_core::pcgroup::builtin::BUILTIN_DEGREES;
use polyhh_core::pcgroup::io::{group_spec_to_string, save_group_spec};
use polyhh_core::{
    AagInstance, AagParams, EaConfig, Executor, GroupSpec, HeuristicChain, HeuristicId,
};

/// Length-based and evolutionary attacks on AAG key exchange over polycyclic groups.
#[derive(Parser)]
#[command(name = "polyhh", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a built-in group as JSON.
    GenGroup {
        /// Degree of the defining polynomial (1, 2 or 3).
        #[arg(long)]
        degree: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded instances into a directory.
    GenInstances {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: InstanceArgs,
    },
    /// Run the EA with an injected chain on every instance.
    RunEa {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: InstanceArgs,
        /// Injected chain, e.g. "H2" or "H1 H3^2".
        #[arg(long, default_value = "H2")]
        chain: HeuristicChain,
        #[arg(long, default_value_t = 1250)]
        maxsteps: usize,
        /// Also write per-generation traces.
        #[arg(long)]
        trace: bool,
    },
    /// Run one hillclimber per heuristic on every instance.
    RunLba {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        source: InstanceArgs,
        /// Iteration budget per run.
        #[arg(long, default_value_t = 5000)]
        maxsteps: usize,
        /// Heuristics to sweep, comma-separated (default H1..H6).
        #[arg(long, value_delimiter = ',')]
        heuristics: Vec<HeuristicId>,
    },
    /// Search the space of heuristic chains.
    RunHh(HhArgs),
    /// Summarise chain-search output directories into one table.
    Report {
        /// Directories written by `run-hh`.
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
        #[arg(long, default_value = "table.csv")]
        out: PathBuf,
    },
    /// Re-derive an EA summary from its traces.
    Audit {
        /// Directory written by `run-ea --trace`.
        dir: PathBuf,
        #[arg(long, default_value_t = 25)]
        population: usize,
    },
}

#[derive(Args)]
struct Common {
    /// Built-in degree ("d1".."d3") or a group JSON file.
    #[arg(long, default_value = "d1")]
    group: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, env = WORKERS_ENV, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance parameters as N,L,L1,L2.
    #[arg(long, default_value = "20,5,10,13")]
    params: String,
    #[arg(long, default_value_t = 20)]
    count: usize,
    /// Label mixed into instance seeds.
    #[arg(long, default_value = "main")]
    label: String,
    /// Load instances from this directory instead of generating them.
    #[arg(long)]
    instances: Option<PathBuf>,
}

#[derive(Args)]
struct HhArgs {
    /// TOML experiment file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Initial chain, or "random".
    #[arg(long)]
    chain: Option<String>,
    /// Validation-phase maxsteps.
    #[arg(long)]
    maxsteps: Option<usize>,
    #[arg(long)]
    c_max: Option<usize>,
    /// Instance counts as TRAIN,TEST,VALID.
    #[arg(long)]
    phases: Option<String>,
    /// Repeat the search until a validated improvement, at most this often.
    #[arg(long)]
    runs: Option<usize>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Runs `f` with an `INCOMPLETE` marker in `out` that is removed on success.
fn flagged<T>(out: &Path, f: impl FnOnce() -> Result<T>) -> Result<T> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let marker = out.join("INCOMPLETE");
    std::fs::write(&marker, "run did not finish\n")?;
    let v = f()?;
    std::fs::remove_file(&marker)?;
    Ok(v)
}

fn load_group(s: &str) -> Result<GroupSpec> {
    GroupSource::parse(s)
        .load()
        .with_context(|| format!("loading group {s}"))
}

fn instances(
    spec: &GroupSpec,
    common: &Common,
    src: &InstanceArgs,
    exec: &Executor,
) -> Result<(AagParams, Vec<AagInstance>)> {
    if let Some(dir) = &src.instances {
        let insts = load_instance_dir(spec, dir)?;
        return Ok((insts[0].params, insts));
    }
    let params = AagParams::parse_csv(&src.params)?;
    if src.count == 0 {
        bail!("--count must be at least 1");
    }
    let insts = generate_instance_set(spec, params, src.count, common.seed, &src.label, exec)?;
    Ok((params, insts))
}

fn executor(workers: usize) -> Result<Executor> {
    if workers == 0 {
        bail!("--workers must be at least 1");
    }
    Ok(Executor::new(workers))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenGroup { degree, out } => {
            if !BUILTIN_DEGREES.contains(&degree) {
                bail!("no built-in group of degree {degree}; available: {BUILTIN_DEGREES:?}");
            }
            let spec = polyhh_core::pcgroup::builtin::builtin_group(degree)?;
            match out {
                Some(p) => save_group_spec(&spec, &p)?,
                None => print!("{}", group_spec_to_string(&spec)),
            }
        }
        Command::GenInstances { common, source } => {
            let spec = load_group(&common.group)?;
            let exec = executor(common.workers)?;
            flagged(&common.out, || {
                let (_, insts) = instances(&spec, &common, &source, &exec)?;
                write_instance_dir(&spec, &insts, &common.out)?;
                println!(
                    "wrote {} instances to {}",
                    insts.len(),
                    common.out.display()
                );
                Ok(())
            })?;
        }
        Command::RunEa {
            common,
            source,
            chain,
            maxsteps,
            trace,
        } => {
            let spec = load_group(&common.group)?;
            let exec = executor(common.workers)?;
            let cfg = EaConfig::default()
                .with_chain(chain)
                .with_maxsteps(maxsteps);
            flagged(&common.out, || {
                let (params, insts) = instances(&spec, &common, &source, &exec)?;
                let runs = run_ea_batch(&spec, &insts, &cfg, common.seed, &exec)?;
                let out = write_ea_outputs(&spec, &params, &cfg, &runs, &common.out, trace)?;
                println!(
                    "d={} {} chain {}: {}",
                    spec.degree(),
                    params,
                    cfg.injected_chain,
                    out.metrics
                );
                Ok(())
            })?;
        }
        Command::RunLba {
            common,
            source,
            maxsteps,
            heuristics,
        } => {
            let spec = load_group(&common.group)?;
            let exec = executor(common.workers)?;
            let hs = if heuristics.is_empty() {
                DEFAULT_SWEEP.to_vec()
            } else {
                heuristics
            };
            flagged(&common.out, || {
                let (_, insts) = instances(&spec, &common, &source, &exec)?;
                let rows = run_lba_sweep(&spec, &insts, &hs, maxsteps, common.seed, &exec);
                write_lba_outputs(&rows, &common.out)?;
                for r in &rows {
                    println!(
                        "{}: {}/{} solved ({:.1}%)",
                        r.heuristic,
                        r.successes,
                        r.instances,
                        100.0 * r.success_rate
                    );
                }
                Ok(())
            })?;
        }
        Command::RunHh(args) => run_hh(args)?,
        Command::Report { dirs, out } => {
            let rows = build_table(&dirs, &out)?;
            for r in rows {
                println!("{}", r.join("\t"));
            }
        }
        Command::Audit { dir, population } => {
            let r = audit_ea_output(&dir, population)?;
            println!(
                "ok: {} runs, {} generations, {} solved",
                r.runs, r.generations, r.successes
            );
        }
    }
    Ok(())
}

fn run_hh(a: HhArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(
            GroupSource::Builtin(1),
            AagParams::parse_csv(a.params.as_deref().unwrap_or("20,5,10,13"))?,
        ),
    };
    if let Some(g) = &a.group {
        cfg.group = GroupSource::parse(g);
    }
    if let Some(p) = &a.params {
        cfg.params = AagParams::parse_csv(p)?;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(w) = a.workers {
        cfg.workers = w;
    }
    if let Some(o) = &a.out {
        cfg.out = o.clone();
    }
    if let Some(r) = a.runs {
        cfg.runs = r;
    }
    if let Some(c) = &a.chain {
        parse_initial_chain(c)?;
        cfg.hh.initial_chain = Some(c.clone());
    }
    if let Some(m) = a.maxsteps {
        cfg.hh.valid_maxsteps = Some(m);
    }
    if let Some(c) = a.c_max {
        cfg.hh.c_max = Some(c);
    }
    if let Some(p) = &a.phases {
        let v: Vec<usize> = p
            .split(',')
            .map(|x| x.trim().parse())
            .collect::<std::result::Result<_, _>>()
            .context("--phases expects TRAIN,TEST,VALID")?;
        let [train, test, valid] = v[..] else {
            bail!("--phases expects TRAIN,TEST,VALID");
        };
        cfg.instances.train = train;
        cfg.instances.test = test;
        cfg.instances.valid = valid;
    }
    cfg.validate()?;
    let spec = cfg.group.load()?;
    let (ea, hh) = cfg.resolve(&spec)?;
    let exec = executor(cfg.workers)?;
    flagged(&cfg.out, || {
        let outcome = run_hh_experiment(
            &spec,
            cfg.params,
            &ea,
            &hh,
            cfg.seed,
            cfg.runs,
            &exec,
            Some(&cfg.out),
        )?;
        for f in &outcome.reports {
            let r = &f.report;
            print!(
                "run {}: {} chains, best {} at iteration {}",
                f.run,
                r.records.len(),
                r.best_chain.to_compact_string(),
                r.best_iteration
            );
            match &r.validation {
                Some(v) => println!("; validation {} vs initial {}", v.best, v.initial),
                None => println!("; no improvement to validate"),
            }
        }
        Ok(())
    })
}
