use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fmo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fmo"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

const SMALL_SWEEP: &str = r#"{
  "schema_version": 1,
  "sweep": {
    "system": {"sink": {"length": 30, "drain_coupling_per_mm": 0.6, "internal_coupling_per_mm": 0.7}},
    "amplitudes_per_mm": [0.0, 0.5, 1.0],
    "realizations": 4,
    "seed": 5
  }
}"#;

#[test]
fn chip_plan_default_has_seven_spacings() {
    let dir = tempfile::tempdir().unwrap();
    let o = fmo(dir.path(), &["chip-plan", "--out", "plan"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&dir.path().join("plan/chip_plan.csv"));
    assert_eq!(r.iter().filter(|r| r[0] == "spacing").count(), 7);
    assert!(r.iter().all(|r| r[0] != "speed"));
}

#[test]
fn chip_plan_full_amplitude_schedule_peaks_at_fifty() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cp.json"),
        r#"{"schema_version": 1, "noise": {"kind": "colored", "amplitude_per_mm": 1.0, "segments": 20, "total_length_mm": 40.0}}"#,
    )
    .unwrap();
    let o = fmo(
        dir.path(),
        &["chip-plan", "--config", "cp.json", "--out", "plan"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let speeds: Vec<f64> = rows(&dir.path().join("plan/chip_plan.csv"))
        .into_iter()
        .filter(|r| r[0] == "speed")
        .map(|r| r[4].parse().unwrap())
        .collect();
    assert_eq!(speeds.len(), 7 * 20);
    let max = speeds.iter().cloned().fold(0.0, f64::max);
    assert!((max - 50.0).abs() < 1e-9, "{max}");

    fs::write(
        dir.path().join("zero.json"),
        r#"{"schema_version": 1, "noise": {"amplitude_per_mm": 0.0}}"#,
    )
    .unwrap();
    let o = fmo(
        dir.path(),
        &["chip-plan", "--config", "zero.json", "--out", "zero"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let r = rows(&dir.path().join("zero/chip_plan.csv"));
    assert!(r
        .iter()
        .filter(|r| r[0] == "speed")
        .all(|r| r[4].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn simulate_is_deterministic_and_replayable() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = fmo(dir.path(), &["simulate", "--seed", "9", "--out", out]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let a = fs::read(dir.path().join("a/trace.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b/trace.csv")).unwrap());
    let o = fmo(
        dir.path(),
        &[
            "simulate",
            "--seed",
            "9",
            "--noise",
            "a/noise.csv",
            "--out",
            "c",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(a, fs::read(dir.path().join("c/trace.csv")).unwrap());
    // The echoed config reruns to the same trace.
    let o = fmo(
        dir.path(),
        &["simulate", "--config", "a/config.json", "--out", "d"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(a, fs::read(dir.path().join("d/trace.csv")).unwrap());
}

#[test]
fn sweep_is_thread_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sweep.json"), SMALL_SWEEP).unwrap();
    for (threads, out) in [("1", "t1"), ("3", "t3")] {
        let o = fmo(
            dir.path(),
            &[
                "--threads",
                threads,
                "sweep",
                "--config",
                "sweep.json",
                "--out",
                out,
            ],
        );
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("argmax_per_mm"));
    }
    for f in [
        "sweep_raw.csv",
        "sweep_summary.csv",
        "manifest.json",
        "config.json",
    ] {
        assert_eq!(
            fs::read(dir.path().join("t1").join(f)).unwrap(),
            fs::read(dir.path().join("t3").join(f)).unwrap(),
            "{f}"
        );
    }
    let o = fmo(
        dir.path(),
        &["sweep", "--config", "t1/config.json", "--out", "again"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read(dir.path().join("t1/sweep_raw.csv")).unwrap(),
        fs::read(dir.path().join("again/sweep_raw.csv")).unwrap()
    );
}

#[test]
fn sweep_json_format() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("sweep.json"), SMALL_SWEEP).unwrap();
    let o = fmo(
        dir.path(),
        &[
            "sweep",
            "--config",
            "sweep.json",
            "--format",
            "json",
            "--out",
            "j",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("j/sweep.json")).unwrap()).unwrap();
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
}

#[test]
fn config_errors_exit_two_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.json"),
        r#"{"schema_version": 1, "sweep": {"realizations": 4, "noise": {"kind": "pink"}}}"#,
    )
    .unwrap();
    let o = fmo(dir.path(), &["sweep", "--config", "bad.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sweep.noise.kind"), "{}", stderr(&o));

    fs::write(
        dir.path().join("extra.json"),
        r#"{"schema_version": 1, "colour": 3}"#,
    )
    .unwrap();
    let o = fmo(dir.path(), &["simulate", "--config", "extra.json"]);
    assert_eq!(o.status.code(), Some(2));

    fs::write(dir.path().join("old.json"), r#"{"schema_version": 7}"#).unwrap();
    let o = fmo(dir.path(), &["chip-plan", "--config", "old.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_file_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let o = fmo(dir.path(), &["sweep", "--config", "nope.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn unknown_figure_lists_valid_ids() {
    let dir = tempfile::tempdir().unwrap();
    let o = fmo(dir.path(), &["reproduce", "fig9z"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("fig3b") && err.contains("figS16"), "{err}");
}

#[test]
fn reproduce_fig3b_fits_linear_law() {
    let dir = tempfile::tempdir().unwrap();
    let o = fmo(
        dir.path(),
        &["reproduce", "fig3b", "--realizations", "10", "--out", "f"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let fit: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("f/fig3b_fit.json")).unwrap()).unwrap();
    assert!(fit["r_squared"].as_f64().unwrap() > 0.95);
    let first = &rows(&dir.path().join("f/fig3b_reorganization.csv"))[0];
    assert_eq!(first[1].parse::<f64>().unwrap(), 0.0);
    assert_eq!(first[2].parse::<f64>().unwrap(), 0.0);
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("f/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["study"], "fig3b");
    assert_eq!(manifest["schema_version"], 1);
}

fn image_fixture(dir: &Path) {
    let mut m = vec![vec![0.0; 20]; 10];
    m[4][4] = 30.0;
    m[3][14] = 35.0;
    m[6][16] = 35.0;
    let text: String = m
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(" ")
                + "\n"
        })
        .collect();
    fs::write(dir.join("img.txt"), text).unwrap();
}

#[test]
fn analyze_image_reports_split() {
    let dir = tempfile::tempdir().unwrap();
    image_fixture(dir.path());
    let o = fmo(
        dir.path(),
        &[
            "analyze-image",
            "img.txt",
            "--ellipse",
            "4,4,3,2",
            "--rect",
            "12,2,6,6",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stdout(&o).lines().nth(1).unwrap().to_owned();
    let eta: f64 = line.split(',').next().unwrap().parse().unwrap();
    assert_eq!(eta, 0.7);

    let o = fmo(
        dir.path(),
        &[
            "analyze-image",
            "img.txt",
            "--ellipse",
            "4,4,3,2",
            "--rect",
            "5,3,4,2",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("overlap"));

    fs::write(dir.path().join("ragged.txt"), "1 2 3\n4 5 6\n7 8\n").unwrap();
    let o = fmo(
        dir.path(),
        &[
            "analyze-image",
            "ragged.txt",
            "--ellipse",
            "1,1,1,1",
            "--rect",
            "0,0,1,1",
        ],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn analyze_noise_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = fmo(dir.path(), &["simulate", "--out", "s"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = fmo(
        dir.path(),
        &[
            "analyze-noise",
            "s/noise.csv",
            "--sampling-frequency",
            "0.5",
            "--out",
            "n",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(rows(&dir.path().join("n/noise_summary.csv")).len(), 7);
    let acf = rows(&dir.path().join("n/noise_acf.csv"));
    assert_eq!(acf[0][2].parse::<f64>().unwrap(), 1.0);
}
