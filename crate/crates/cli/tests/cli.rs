use std::path::Path;
use std::process::{Command, Output};

fn polyhh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyhh"))
        .args(args)
        .env_remove("POLYHH_WORKERS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = polyhh(args);
    assert!(
        out.status.success(),
        "polyhh {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn gen_instances_is_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for (dir, workers) in [(&a, "1"), (&b, "4")] {
        ok(&[
            "gen-instances",
            "--group",
            "d2",
            "--params",
            "20,5,10,13",
            "--count",
            "6",
            "--seed",
            "17",
            "--workers",
            workers,
            "--out",
            dir.to_str().unwrap(),
        ]);
    }
    let ba = dir_bytes(&a);
    assert_eq!(ba.len(), 6);
    assert_eq!(ba, dir_bytes(&b));
    assert!(!a.join("INCOMPLETE").exists());
}

#[test]
fn gen_group_round_trips_into_run_ea() {
    let tmp = tempfile::tempdir().unwrap();
    let group = tmp.path().join("d1.json");
    ok(&[
        "gen-group",
        "--degree",
        "1",
        "--out",
        group.to_str().unwrap(),
    ]);
    let stdout = ok(&["gen-group", "--degree", "1"]);
    assert_eq!(stdout, std::fs::read_to_string(&group).unwrap());

    let inst = tmp.path().join("inst");
    ok(&[
        "gen-instances",
        "--group",
        group.to_str().unwrap(),
        "--count",
        "4",
        "--seed",
        "3",
        "--out",
        inst.to_str().unwrap(),
    ]);
    let out = tmp.path().join("ea");
    let line = ok(&[
        "run-ea",
        "--group",
        group.to_str().unwrap(),
        "--instances",
        inst.to_str().unwrap(),
        "--chain",
        "H2",
        "--maxsteps",
        "1250",
        "--trace",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(line.contains("[100%, 0,"), "{line}");
    let summary = std::fs::read_to_string(out.join("ea_summary.csv")).unwrap();
    assert!(summary.starts_with("degree,params,chain,maxsteps,instances,successes"));
    assert!(
        summary.contains("1,\"20,5,10,13\",H2,1250,4,4,1.000000"),
        "{summary}"
    );
    let audit = ok(&["audit", out.to_str().unwrap()]);
    assert!(audit.starts_with("ok: 4 runs"), "{audit}");
}

#[test]
fn run_lba_writes_sweep() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("lba");
    let stdout = ok(&[
        "run-lba",
        "--group",
        "d1",
        "--params",
        "5,5,5,8",
        "--count",
        "3",
        "--maxsteps",
        "200",
        "--heuristics",
        "H2,H3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(stdout.lines().count(), 2);
    let csv = std::fs::read_to_string(out.join("lba_sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "heuristic,instances,successes,success_rate,mean_iterations_on_success"
    );
    assert!(lines.next().unwrap().starts_with("H2,3,"));
}

#[test]
fn run_hh_smoke_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("hh");
    ok(&[
        "run-hh",
        "--group",
        "d1",
        "--params",
        "5,5,5,8",
        "--seed",
        "4",
        "--c-max",
        "5",
        "--phases",
        "3,4,4",
        "--maxsteps",
        "200",
        "--out",
        out.to_str().unwrap(),
    ]);
    let run1 = out.join("run1");
    let chains = std::fs::read_to_string(run1.join("chains.csv")).unwrap();
    let rows = chains.lines().count() - 1;
    assert!((1..=5).contains(&rows));
    let report = std::fs::read_to_string(run1.join("report.json")).unwrap();
    let best_is_first = report.contains("\"best_iteration\": 1,");
    assert_eq!(report.contains("\"validation\": null"), best_is_first);

    let table = tmp.path().join("table.csv");
    let stdout = ok(&[
        "report",
        out.to_str().unwrap(),
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(stdout.starts_with("1\t5,5,5,8\t"), "{stdout}");
    let text = std::fs::read_to_string(&table).unwrap();
    assert!(text.starts_with("degree,params,insertion,chain_metric,iteration,best_chain,runs"));
}

#[test]
fn run_hh_reads_toml_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("exp.toml");
    let out = tmp.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            "group = {{ builtin = 1 }}\nparams = {{ n = 5, key_len = 5, l1 = 5, l2 = 8 }}\nseed = 9\nout = {:?}\ninstances = {{ train = 2, test = 2, valid = 2 }}\n[hh]\nc_max = 3\nvalid_maxsteps = 100\n",
            out
        ),
    )
    .unwrap();
    ok(&["run-hh", "--config", cfg.to_str().unwrap()]);
    assert!(out.join("run1/report.json").exists());
}

#[test]
fn bad_arguments_fail_with_nonzero_exit() {
    for args in [
        vec!["gen-group", "--degree", "4"],
        vec!["run-ea", "--params", "1,2,3"],
        vec!["run-ea", "--chain", "H9"],
        vec!["gen-instances", "--group", "/does/not/exist.json"],
        vec!["run-hh", "--phases", "1,2"],
        vec!["frobnicate"],
    ] {
        let out = polyhh(&args);
        assert!(!out.status.success(), "{args:?} should fail");
        assert!(!out.stderr.is_empty());
    }
}
