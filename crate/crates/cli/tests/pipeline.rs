//! End-to-end runs of the `prefault` binary: pipeline composition,
//! byte-level determinism, the exit-code contract, and output-directory
//! plumbing. Each test works in its own directory under the system
//! temp dir.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use prefault_core::io::{read_predictions_csv, save_json, write_waveform_csv, WaveformManifest};
use prefault_core::synth::{synth_base, GridScenario, WindowSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_prefault")
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("prefault-pipeline-{}-{name}", std::process::id()));
    if dir.exists() {
        fs::remove_dir_all(&dir).unwrap();
    }
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary should spawn")
}

/// Run and require success, carrying both streams into the panic text.
fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "prefault {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn exit_code(args: &[&str]) -> i32 {
    run(args).status.code().expect("no exit code")
}

fn s(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn pipeline_composes_from_synth_to_report() {
    let d = workdir("compose");
    let ev = d.join("events");
    let sel = d.join("select");
    let trn = d.join("train-rec");
    let tst = d.join("test-rec");
    let fp = d.join("hourly");
    let model = d.join("model");
    let pred = d.join("pred");
    let evl = d.join("eval");
    let rep = d.join("report");
    let swp = d.join("sweep");

    ok(&["synth", "events", "--per-class", "3", "--out", &s(&ev)]);
    ok(&["extract", "--input", &s(&ev), "--out", &s(&ev)]);
    ok(&[
        "select",
        "--features",
        &s(&ev.join("features.csv")),
        "--labels",
        &s(&ev.join("labels.csv")),
        "--accelerated",
        "--floor",
        "400",
        "--folds",
        "3",
        "--out",
        &s(&sel),
    ]);
    let selected: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(sel.join("selected.json")).unwrap()).unwrap();
    let n_selected = selected["ids"].as_array().unwrap().len();
    assert!(n_selected > 0, "selection should keep at least one feature");

    ok(&["synth", "recording", "--days", "5", "--faults", "1", "--out", &s(&trn)]);
    ok(&[
        "synth",
        "recording",
        "--days",
        "4",
        "--faults",
        "1",
        "--seed",
        "9",
        "--start",
        "2024-04-01T00:00:00Z",
        "--out",
        &s(&tst),
    ]);
    let selected_path = s(&sel.join("selected.json"));
    ok(&[
        "extract",
        "--input",
        &s(&trn.join("recording.csv")),
        "--hourly",
        "--selected",
        &selected_path,
        "--prefix",
        "train_hourly",
        "--out",
        &s(&fp),
    ]);
    ok(&[
        "extract",
        "--input",
        &s(&tst.join("recording.csv")),
        "--hourly",
        "--selected",
        &selected_path,
        "--prefix",
        "test_hourly",
        "--out",
        &s(&fp),
    ]);
    ok(&[
        "train",
        "--hourly",
        &s(&fp.join("train_hourly.csv")),
        "--faults",
        &s(&trn.join("faults.csv")),
        "--out",
        &s(&model),
    ]);
    ok(&[
        "predict",
        "--model",
        &s(&model.join("model.json")),
        "--hourly",
        &s(&fp.join("test_hourly.csv")),
        "--out",
        &s(&pred),
    ]);

    let rows = read_predictions_csv(&pred.join("predictions.csv")).unwrap();
    assert_eq!(rows.len(), 4 * 24, "one prediction row per recorded hour");
    assert!(rows.iter().any(|r| r.probability.is_some()));

    ok(&[
        "eval",
        "--preds",
        &s(&pred.join("predictions.csv")),
        "--faults",
        &s(&tst.join("faults.csv")),
        "--out",
        &s(&evl),
    ]);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(evl.join("report.json")).unwrap()).unwrap();
    let f1 = report["combined"]["f1"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&f1), "F1 out of range: {f1}");

    ok(&[
        "sweep",
        "--train-hourly",
        &s(&fp.join("train_hourly.csv")),
        "--train-faults",
        &s(&trn.join("faults.csv")),
        "--test-hourly",
        &s(&fp.join("test_hourly.csv")),
        "--test-faults",
        &s(&tst.join("faults.csv")),
        "--horizons",
        "24,96",
        "--out",
        &s(&swp),
    ]);
    let sweep = fs::read_to_string(swp.join("sweep.csv")).unwrap();
    assert_eq!(sweep.lines().count(), 3, "header plus one row per horizon");

    ok(&[
        "report",
        "--report",
        &s(&evl.join("report.json")),
        "--trace",
        &s(&sel.join("trace.csv")),
        "--sweep",
        &s(&swp.join("sweep.csv")),
        "--svg",
        "--out",
        &s(&rep),
    ]);
    let metrics = fs::read_to_string(rep.join("metrics.csv")).unwrap();
    assert!(metrics.lines().count() >= 3, "combined plus per-station rows");
    let svg = fs::read_to_string(rep.join("report.svg")).unwrap();
    assert!(svg.starts_with("<svg "), "report.svg should be a standalone SVG");

    // Every command leaves a manifest naming its inputs and outputs.
    for (dir, manifest) in [
        (&ev, "extract.manifest.json"),
        (&sel, "select.manifest.json"),
        (&model, "train.manifest.json"),
        (&pred, "predict.manifest.json"),
        (&evl, "eval.manifest.json"),
        (&swp, "sweep.manifest.json"),
        (&rep, "report.manifest.json"),
    ] {
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.join(manifest)).unwrap()).unwrap();
        assert!(m["config"]["seed"].is_u64(), "{manifest} should embed the config");
        assert!(!m["outputs"].as_object().unwrap().is_empty());
    }

    fs::remove_dir_all(&d).unwrap();
}

#[test]
fn reruns_and_thread_counts_are_byte_identical() {
    let d = workdir("determinism");
    let a = d.join("a");
    let b = d.join("b");
    let c = d.join("c");

    ok(&["--threads", "1", "synth", "events", "--per-class", "2", "--out", &s(&a)]);
    ok(&["--threads", "8", "synth", "events", "--per-class", "2", "--out", &s(&b)]);
    for shard in ["windows_class_00.csv", "windows_class_21.csv", "labels.csv"] {
        assert_eq!(
            fs::read(a.join(shard)).unwrap(),
            fs::read(b.join(shard)).unwrap(),
            "{shard} differs across thread counts"
        );
    }

    ok(&["--threads", "1", "extract", "--input", &s(&a), "--out", &s(&a)]);
    ok(&["--threads", "8", "extract", "--input", &s(&a), "--out", &s(&b)]);
    ok(&["extract", "--input", &s(&a), "--out", &s(&c)]);
    let first = fs::read(a.join("features.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("features.csv")).unwrap(), "extraction depends on threads");
    assert_eq!(first, fs::read(c.join("features.csv")).unwrap(), "extraction is not replayable");

    fs::remove_dir_all(&d).unwrap();
}

#[test]
fn exit_codes_follow_the_contract() {
    let d = workdir("exit-codes");

    assert_eq!(exit_code(&["synth", "events", "--bogus-flag"]), 2, "unknown flag");
    assert_eq!(
        exit_code(&["synth", "events", "--per-class", "0", "--out", &s(&d)]),
        2,
        "out-of-range value"
    );
    assert_eq!(exit_code(&["--threads", "0", "registry", "--out", &s(&d)]), 2, "zero threads");
    assert_eq!(
        exit_code(&["extract", "--input", &s(&d.join("missing.csv")), "--out", &s(&d)]),
        3,
        "missing input"
    );

    // A selection whose registry hash does not match is refused.
    ok(&["registry", "--family", "thd", "--out", &s(&d)]);
    let sel_path = d.join("selected_thd.json");
    let tampered = fs::read_to_string(&sel_path).unwrap().replacen("\"ids\"", "\"ids_\"", 1);
    fs::write(&sel_path, tampered).unwrap();
    ok(&["synth", "events", "--per-class", "1", "--out", &s(&d)]);
    assert_eq!(
        exit_code(&["extract", "--input", &s(&d), "--selected", &s(&sel_path), "--out", &s(&d)]),
        3,
        "malformed selection file"
    );

    let err = run(&["synth", "events", "--per-class", "0", "--out", &s(&d)]);
    assert!(
        String::from_utf8_lossy(&err.stderr).starts_with("error:"),
        "failures should report on stderr"
    );

    fs::remove_dir_all(&d).unwrap();
}

#[test]
fn output_directory_comes_from_flag_config_or_environment() {
    let d = workdir("outdir");
    let from_env = d.join("from-env");
    let from_cfg = d.join("from-cfg");
    let from_flag = d.join("from-flag");

    let out = Command::new(bin())
        .args(["registry"])
        .env("PREFAULT_OUT_DIR", &from_env)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(from_env.join("registry.json").exists(), "environment override ignored");

    let cfg = d.join("config.json");
    fs::write(&cfg, format!(r#"{{"out_dir": {:?}}}"#, s(&from_cfg))).unwrap();
    ok(&["--config", &s(&cfg), "registry"]);
    assert!(from_cfg.join("registry.json").exists(), "config out_dir ignored");

    ok(&["--config", &s(&cfg), "registry", "--out", &s(&from_flag)]);
    assert!(from_flag.join("registry.json").exists(), "--out should win over config");
    assert!(!from_flag.join("registry.json").metadata().unwrap().permissions().readonly());

    fs::remove_dir_all(&d).unwrap();
}

#[test]
fn windows_command_splits_minutes_and_indexes_them() {
    let d = workdir("windows");

    // Two quiet minutes at a reduced rate; selection only needs shape,
    // not the full 4 kHz.
    let rate = 400.0;
    let spec = WindowSpec {
        samples: (2.0 * 60.0 * rate) as usize,
        sample_rate_hz: rate,
        fundamental_hz: 50.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let scenario = GridScenario::draw(&mut rng);
    let start = "2024-05-01T06:00:00Z".parse().unwrap();
    let wave = synth_base(&spec, &scenario, Some(start), &mut rng).unwrap();
    let wave_path = d.join("capture.csv");
    write_waveform_csv(&wave_path, &wave).unwrap();
    let manifest = WaveformManifest {
        sample_rate_hz: rate,
        fundamental_hz: 50.0,
        station: "station-9".into(),
        start_time_iso8601: Some("2024-05-01T06:00:00Z".into()),
        derive_zero_sequence: false,
    };
    let manifest_path = d.join("capture.manifest.json");
    save_json(&manifest_path, &manifest).unwrap();

    ok(&["windows", "--input", &s(&wave_path), "--manifest", &s(&manifest_path), "--out", &s(&d)]);

    let index: Vec<serde_json::Value> =
        serde_json::from_str(&fs::read_to_string(d.join("windows_index.json")).unwrap()).unwrap();
    assert_eq!(index.len(), 2, "one index entry per minute");
    assert_eq!(index[0]["minute_iso8601"], "2024-05-01T06:00:00Z");
    assert_eq!(index[1]["minute_iso8601"], "2024-05-01T06:01:00Z");
    for entry in &index {
        assert!(d.join(entry["continuous_file"].as_str().unwrap()).exists());
        assert!(d.join(entry["transient_file"].as_str().unwrap()).exists());
    }
    assert!(d.join("selected.csv").exists());

    fs::remove_dir_all(&d).unwrap();
}
