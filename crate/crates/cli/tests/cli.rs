use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cough_core::config::PipelineConfig;
use cough_core::dataset::Scenario;
use cough_core::evaluation::EvalSummary;
use cough_core::features::FeatureTable;
use cough_core::matrix::Matrix;
use cough_core::pipeline::{Detector, DetectorModel};
use cough_core::selection::SelectionReport;

const SMALL: &str = "seed = 11\n[synth]\npatients = 3\ncoughs_per_scenario = 30\nspeech_events_per_recording = 3\n";

fn coughdet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coughdet"))
        .arg("--output-dir")
        .arg(dir)
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("spawn coughdet")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = coughdet(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn small_config(dir: &Path) -> String {
    let p = dir.join("small.toml");
    std::fs::write(&p, SMALL).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn zeroed_model_bytes(path: &Path) -> Vec<u8> {
    let mut d = Detector::load(path).unwrap();
    match &mut d.model {
        DetectorModel::Single(m) => m.created_unix = 0,
        DetectorModel::Ensemble(e) => e.members.iter_mut().for_each(|m| m.created_unix = 0),
    }
    d.to_bytes()
}

#[test]
fn full_pipeline_on_synthetic_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = small_config(dir);
    ok(dir, &["--config", &cfg, "synth"]);
    assert_eq!(std::fs::read_dir(dir.join("corpus")).unwrap().count(), 9 * 2 + 1);
    ok(dir, &["--config", &cfg, "extract"]);
    ok(dir, &["--config", &cfg, "select"]);
    let report = SelectionReport::load(&dir.join("selection/selection.json")).unwrap();
    assert!(!report.selected_names.is_empty());
    ok(dir, &["--config", &cfg, "train"]);
    ok(dir, &["--config", &cfg, "train", "--mode", "per-part"]);
    for f in ["ensemble", "per-part-part1", "per-part-part2", "per-part-part3"] {
        assert!(dir.join(format!("models/{f}.cdet")).is_file(), "{f}");
    }
    let out = ok(dir, &["--config", &cfg, "predict"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("ACC"));
    let pred = std::fs::read_to_string(dir.join("predictions/patient01_part1.csv")).unwrap();
    assert!(pred.starts_with("group,start_s,end_s,score,label,truth\n"));
    assert!(pred.lines().count() > 10);
    ok(
        dir,
        &[
            "--config",
            &cfg,
            "evaluate",
            "--scheme",
            "lopo",
            "--modes",
            "ensemble,single",
        ],
    );
    let summary = EvalSummary::load(&dir.join("reports/evaluation.json")).unwrap();
    assert_eq!(summary.n_folds, 3);
    assert_eq!(summary.report("ensemble").unwrap().folds.len(), 3);
    assert!(dir.join("reports/evaluation.txt").is_file());
    assert!(dir.join("reports/evaluation_roc_ensemble.csv").is_file());

    // Same inputs and seed give the same artifacts.
    let first = std::fs::read(dir.join("reports/evaluation.json")).unwrap();
    ok(
        dir,
        &[
            "--config",
            &cfg,
            "--jobs",
            "1",
            "evaluate",
            "--scheme",
            "lopo",
            "--modes",
            "ensemble,single",
        ],
    );
    assert_eq!(std::fs::read(dir.join("reports/evaluation.json")).unwrap(), first);
    let sel = std::fs::read(dir.join("selection/selection.json")).unwrap();
    ok(dir, &["--config", &cfg, "select"]);
    assert_eq!(std::fs::read(dir.join("selection/selection.json")).unwrap(), sel);
}

/// Alternating runs of clearly separated frames.
fn toy_table(patient: usize, scenario: Scenario) -> FeatureTable {
    let n = 120;
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let pos = (i / 15) % 2 == 1;
        let jitter = ((i * 37 + patient * 13 + scenario.index() * 7) % 101) as f64 * 0.005;
        let c = if pos { 2.0 } else { -2.0 };
        data.extend([c + jitter, c - jitter]);
        labels.push(u8::from(pos));
    }
    FeatureTable {
        recording_id: format!("p{patient}_{scenario}"),
        patient_id: format!("p{patient}"),
        scenario: scenario.to_string(),
        names: vec!["x".into(), "y".into()],
        matrix: Matrix::new(n, 2, data).unwrap(),
        start_times: (0..n).map(|i| i as f64 * 0.056).collect(),
        labels,
    }
}

fn write_toy_corpus(dir: &Path) {
    for p in 0..2 {
        for s in Scenario::ALL {
            let t = toy_table(p, s);
            t.write_bin(&dir.join(format!("features/{}.cft", t.recording_id)))
                .unwrap();
        }
    }
    let report = SelectionReport {
        selected_names: vec!["x".into(), "y".into()],
        rows: Vec::new(),
        trials: 0,
        intrinsic_dimension: None,
    };
    report
        .save(
            &dir.join("selection/selection.json"),
            &dir.join("selection/selection.txt"),
        )
        .unwrap();
}

#[test]
fn predicting_training_set_of_separable_toy_is_exact() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_toy_corpus(dir);
    for mode in ["ensemble", "single"] {
        ok(dir, &["train", "--mode", mode]);
        let model = dir.join(format!("models/{mode}.cdet"));
        let out = ok(dir, &["predict", "--model", model.to_str().unwrap()]);
        let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
        assert!(stdout.contains("ACC 100.00"), "{mode}: {stdout}");
    }
}

#[test]
fn training_twice_is_byte_identical_modulo_timestamp() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_toy_corpus(dir);
    let model = dir.join("models/ensemble.cdet");
    ok(dir, &["--seed", "5", "train", "--representation", "boaw"]);
    let a = zeroed_model_bytes(&model);
    ok(dir, &["--seed", "5", "train", "--representation", "boaw"]);
    assert_eq!(zeroed_model_bytes(&model), a);
}

#[test]
fn empty_manifest_warns_and_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let manifest = dir.join("manifest.csv");
    std::fs::write(&manifest, "wav,annotation,patient_id,scenario\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_coughdet"))
        .arg("--output-dir")
        .arg(dir)
        .args(["extract", "--manifest", manifest.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("no recordings"), "{}", stderr(&out));
    assert!(!dir.join("features").exists());
}

#[test]
fn missing_artifacts_name_the_upstream_stage() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cases: [(&[&str], &str); 5] = [
        (&["extract"], "synth"),
        (&["select"], "extract"),
        (&["train"], "extract"),
        (&["predict"], "train"),
        (&["evaluate"], "extract"),
    ];
    for (args, stage) in cases {
        let out = coughdet(dir, args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(
            stderr(&out).contains(&format!("coughdet {stage}")),
            "{args:?}: {}",
            stderr(&out)
        );
    }
    write_toy_corpus(dir);
    std::fs::remove_file(dir.join("selection/selection.json")).unwrap();
    let out = coughdet(dir, &["train"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("coughdet select"), "{}", stderr(&out));
}

#[test]
fn feature_mismatch_reports_both_dimensions() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_toy_corpus(dir);
    ok(dir, &["train", "--mode", "single"]);
    let mut t = toy_table(0, Scenario::Part1);
    t.names = vec!["x".into(), "z".into()];
    let other: PathBuf = dir.join("other.cft");
    t.write_bin(&other).unwrap();
    let model = dir.join("models/single.cdet");
    let out = coughdet(
        dir,
        &["predict", "--model", model.to_str().unwrap(), other.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("expects 2 features") && err.contains("2 columns") && err.contains('y'),
        "{err}"
    );
}

#[test]
fn unreadable_recording_fails_extraction_but_keeps_others() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = small_config(dir);
    ok(dir, &["--config", &cfg, "synth"]);
    std::fs::write(dir.join("corpus/patient02_part2.wav"), b"RIFF nonsense").unwrap();
    let out = coughdet(dir, &["--config", &cfg, "extract"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("patient02_part2.wav"), "{}", stderr(&out));
    assert_eq!(std::fs::read_dir(dir.join("features")).unwrap().count(), 8);
}

#[test]
fn bad_config_and_bad_arguments_are_input_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let cfg = dir.join("bad.toml");
    std::fs::write(&cfg, "[svm]\nkernel_degree = 3\n").unwrap();
    let out = coughdet(dir, &["--config", cfg.to_str().unwrap(), "config"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.toml"));
    assert_eq!(coughdet(dir, &["frobnicate"]).status.code(), Some(2));
    assert_eq!(coughdet(dir, &["train", "--mode", "both"]).status.code(), Some(2));
    let missing = dir.join("absent.toml");
    assert_eq!(
        coughdet(dir, &["--config", missing.to_str().unwrap(), "config"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_command_prints_loadable_toml() {
    let tmp = tempfile::tempdir().unwrap();
    let out = ok(tmp.path(), &["--seed", "99", "config"]);
    let cfg = PipelineConfig::from_toml(&String::from_utf8_lossy(&out.stdout)).unwrap();
    assert_eq!(cfg.seed, 99);
    assert_eq!(cfg.svm, PipelineConfig::default().svm);
}
