//! Black-box tests of the `specreg` binary: exit codes, artifact layout,
//! stamping, and byte-level reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specreg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).expect("config written");
    path.to_str().expect("utf-8 path").to_string()
}

const VALIDATE_GRIDS: &str = r#"
    "alpha_grid": {"min": 1e-8, "max": 1e2, "per_decade": 20},
    "lambda_grid": {"min": 1e-8, "max": 1e2, "per_decade": 20}
"#;

#[test]
fn validate_filter_passes_for_tikhonov() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "tik.json",
        &format!(r#"{{"filter": "tikhonov", {VALIDATE_GRIDS}}}"#),
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "validate-filter",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let report = std::fs::read_to_string(out_dir.join("filter_report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(json["config_hash"].as_str().unwrap().len(), 64);
    assert!(json["version"].is_string());
    assert_eq!(json["report"]["all_passed"], serde_json::Value::Bool(true));
}

#[test]
fn validate_filter_flags_a_hard_cutoff() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cut.json",
        &format!(r#"{{"filter": "cutoff:2", {VALIDATE_GRIDS}}}"#),
    );
    let out = run(&["validate-filter", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("regular_alpha=false"), "{stdout}");
    assert!(stdout.contains("diagonal=false"), "{stdout}");
}

#[test]
fn malformed_json_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "broken.json", "{ not json");
    let out = run(&["validate-filter", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid config"));
}

#[test]
fn unknown_config_keys_are_named_in_the_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "typo.json",
        r#"{"filter": "tikhonov", "alpha_gird": {"min": 1e-8, "max": 1e2, "per_decade": 20}}"#,
    );
    let out = run(&["validate-filter", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("alpha_gird"),
        "stderr should name the offending key: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn missing_required_block_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "incomplete.json", r#"{"filter": "tikhonov"}"#);
    let out = run(&["rate-exact", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("operator"));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = run(&["rate-exact"]); // missing --config
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));
}

const RATE_CONFIG: &str = r#"{
    "operator": {"kind": "polynomial", "p": 1.0, "n": 2000},
    "profile": {"target": "holder:1"},
    "filter": "tikhonov",
    "alpha_grid": {"min": 1e-7, "max": 1e-1, "per_decade": 10},
    "window": {"min": 1e-5, "max": 1e-2}
}"#;

#[test]
fn rate_exact_writes_a_stamped_curve_and_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "rate.json", RATE_CONFIG);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "rate-exact",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(out_dir.join("error_curve.csv")).unwrap();
    let mut lines = csv.lines();
    let stamp = lines.next().unwrap();
    assert!(stamp.starts_with("# config_hash="), "{stamp}");
    assert!(stamp.contains("version="));
    let header = lines.next().unwrap();
    assert!(header.starts_with("alpha,"), "{header}");
    assert!(lines.clone().count() > 50);

    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("rate_fit.json")).unwrap())
            .unwrap();
    assert_eq!(fit["report"]["model"].as_str(), Some("power"));
    let slope = fit["report"]["slope"].as_f64().expect("power fit slope");
    assert!(
        (slope - 1.0).abs() < 0.1,
        "holder:1 profile should fit near slope 1, got {slope}"
    );
}

#[test]
fn fit_refusal_still_leaves_the_curve_behind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "narrow.json",
        &RATE_CONFIG.replace(
            r#""window": {"min": 1e-5, "max": 1e-2}"#,
            r#""window": {"min": 1e-12, "max": 5e-12}"#,
        ),
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "rate-exact",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("error_curve.csv").exists());
    assert!(!out_dir.join("rate_fit.json").exists());
    assert!(String::from_utf8_lossy(&out.stderr).contains("rate fit failed"));
}

#[test]
fn rate_noisy_brackets_every_noise_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "noisy.json",
        r#"{
            "operator": {"kind": "polynomial", "p": 1.0, "n": 500},
            "profile": {"target": "holder:1"},
            "filter": "tikhonov",
            "deltas": [1e-3, 1e-4],
            "scan_grid": {"min": 1e-9, "max": 1.0, "per_decade": 10}
        }"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "rate-noisy",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(out_dir.join("noisy_rates.csv")).unwrap();
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("delta,alpha_delta,lower"));
    assert_eq!(csv.lines().count(), 4); // stamp + header + two noise levels
    assert!(out_dir.join("noisy_rates.json").exists());
}

const VARIATIONAL_CONFIG: &str = r#"{
    "operator": {"kind": "polynomial", "p": 1.0, "n": 500},
    "profile": {"target": "holder:1"},
    "phi": "holder:0.5",
    "nu": 0.5,
    "random_samples": 50,
    "seed": 7
}"#;

#[test]
fn var_ineq_reports_consistent_constants() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "vi.json", VARIATIONAL_CONFIG);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "var-ineq",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("variational.json")).unwrap())
            .unwrap();
    assert_eq!(json["seed"].as_u64(), Some(7));
    assert_eq!(json["report"]["forward_ok"], serde_json::Value::Bool(true));
    assert_eq!(json["report"]["converse_ok"], serde_json::Value::Bool(true));
}

#[test]
fn identical_config_and_seed_reproduce_artifacts_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "vi.json", VARIATIONAL_CONFIG);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out_dir in [&out_a, &out_b] {
        let out = run(&[
            "var-ineq",
            "--config",
            &cfg,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(out_a.join("variational.json")).unwrap();
    let b = std::fs::read(out_b.join("variational.json")).unwrap();
    assert_eq!(a, b, "same config and seed must reproduce bytes");
}

#[test]
fn seed_flag_overrides_the_config_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "vi.json", VARIATIONAL_CONFIG);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "var-ineq",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "99",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("variational.json")).unwrap())
            .unwrap();
    assert_eq!(json["seed"].as_u64(), Some(99));
}

#[test]
fn distance_profile_covers_every_radius() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "dist.json",
        r#"{
            "operator": {"kind": "polynomial", "p": 1.0, "n": 200},
            "profile": {"target": "holder:1"},
            "phi": "holder:0.5",
            "radius_grid": {"min": 0.05, "max": 5.0, "per_decade": 5}
        }"#,
    );
    let out_dir = dir.path().join("out");
    let out = run(&[
        "distance",
        "--config",
        &cfg,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let csv = std::fs::read_to_string(out_dir.join("distance_profile.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("R,d,mu"));
    assert!(out_dir.join("distance_fit.json").exists());
}
