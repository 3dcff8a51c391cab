use polyhh_core::harness::audit::audit_ea_output;
use polyhh_core::harness::experiments::{
    build_table, generate_instance_set, load_instance_dir, run_ea_batch, run_hh_experiment,
    write_ea_outputs, write_instance_dir,
};
use polyhh_core::pcgroup::builtin::builtin_group;
use polyhh_core::{AagParams, EaConfig, Executor, HhConfig};

#[test]
fn audit_accepts_written_output_and_rejects_tampering() {
    let g = builtin_group(1).unwrap();
    let exec = Executor::Sequential;
    let params = AagParams::wide();
    let insts = generate_instance_set(&g, params, 3, 5, "audit", &exec).unwrap();
    let cfg = EaConfig::default();
    let runs = run_ea_batch(&g, &insts, &cfg, 5, &exec).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    write_ea_outputs(&g, &params, &cfg, &runs, tmp.path(), true).unwrap();
    let report = audit_ea_output(tmp.path(), 25).unwrap();
    assert_eq!(report.runs, 3);
    assert_eq!(report.successes, 3);

    let trace = tmp.path().join("traces/trace_0001.csv");
    let text = std::fs::read_to_string(&trace).unwrap();
    let tampered = text.replacen(",25,0,0,0,0,0,0,0,0,0", ",24,0,0,0,0,0,0,0,0,0", 1);
    assert_ne!(tampered, text);
    std::fs::write(&trace, tampered).unwrap();
    assert!(audit_ea_output(tmp.path(), 25).is_err());
}

#[test]
fn instance_directories_round_trip() {
    let g = builtin_group(2).unwrap();
    let insts = generate_instance_set(
        &g,
        AagParams::narrow_short(),
        4,
        8,
        "dir",
        &Executor::Sequential,
    )
    .unwrap();
    let tmp = tempfile::tempdir().unwrap();
    write_instance_dir(&g, &insts, tmp.path()).unwrap();
    let back = load_instance_dir(&g, tmp.path()).unwrap();
    assert_eq!(back.len(), 4);
    for (a, b) in insts.iter().zip(&back) {
        assert_eq!(a.planted_key, b.planted_key);
        assert_eq!(a.conjugates, b.conjugates);
        assert_eq!(a.seed, b.seed);
    }
}

#[test]
fn table_summarises_last_run() {
    let g = builtin_group(1).unwrap();
    let mut hh = HhConfig::for_degree(1);
    hh.c_max = 4;
    hh.n_train = 2;
    hh.n_test = 2;
    hh.n_valid = 2;
    hh.valid_maxsteps = 100;
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("d1");
    let outcome = run_hh_experiment(
        &g,
        AagParams::narrow_short(),
        &EaConfig::default(),
        &hh,
        3,
        2,
        &Executor::Sequential,
        Some(&out),
    )
    .unwrap();
    let rows = build_table(std::slice::from_ref(&out), &tmp.path().join("table.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "1");
    assert_eq!(rows[0][6], outcome.reports.len().to_string());
    let last = &outcome.reports.last().unwrap().report;
    assert_eq!(rows[0][5], last.best_chain.to_compact_string());
    assert_eq!(rows[0][2].is_empty(), last.validation.is_none());
}
