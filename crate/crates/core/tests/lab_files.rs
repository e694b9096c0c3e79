use std::fs;

use mirrorqst::lab::{emit_csv, emit_report, run_scenario, ScenarioConfig, ScenarioReport, CSV_HEADER};

const FIG3: &str = "\
# engineered chain with m = 1, l = 2
chain.family = ml
chain.n_sites = 4
chain.m = 1
chain.l = 2
psi0.preset = real
scan.repro = true
scan.steps = 200
";

#[test]
fn key_value_and_json_files_load_the_same_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let text_path = dir.path().join("fig3.cfg");
    fs::write(&text_path, FIG3).unwrap();
    let from_text = ScenarioConfig::load(&text_path).unwrap();

    let json_path = dir.path().join("fig3.json");
    fs::write(&json_path, from_text.to_json()).unwrap();
    let from_json = ScenarioConfig::load(&json_path).unwrap();
    assert_eq!(from_text, from_json);

    let again = ScenarioConfig::parse(&from_text.to_config_string()).unwrap();
    assert_eq!(again, from_text);
}

#[test]
fn emitted_files_are_byte_identical_across_runs() {
    let cfg = ScenarioConfig::parse(FIG3).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (run, threads) in [(0, 1), (1, 4)] {
        let out = run_scenario(&cfg, threads).unwrap();
        let csv = dir.path().join(format!("run{run}.csv"));
        let json = dir.path().join(format!("run{run}.json"));
        emit_csv(&out.series, &csv).unwrap();
        emit_report(&out.report, &json).unwrap();
        files.push((fs::read(csv).unwrap(), fs::read(json).unwrap()));
    }
    assert_eq!(files[0], files[1]);

    let csv = String::from_utf8(files[0].0.clone()).unwrap();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 1 + 201);
    let report: ScenarioReport = serde_json::from_slice(&files[0].1).unwrap();
    assert!(report.certified);
    assert_eq!(report.scenario.as_ref(), Some(&cfg));
}

#[test]
fn bad_files_report_the_offending_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "chain.family = ml\nchain.n_sites = 5\nchain.m = 1\nchain.l = 1\n").unwrap();
    let err = ScenarioConfig::load(&path).unwrap_err();
    assert!(!err.is_numerical());

    fs::write(&path, "chain.family = christandl\nchain.n_sites = 4\nscan.stepz = 10\n").unwrap();
    let err = ScenarioConfig::load(&path).unwrap_err();
    assert!(err.to_string().contains("scan.stepz"), "{err}");

    let missing = dir.path().join("nope.cfg");
    let err = ScenarioConfig::load(&missing).unwrap_err();
    assert!(err.to_string().contains("nope.cfg"), "{err}");
}
