use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fermiqc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermiqc"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("FQC_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).expect("file written")).expect("valid json")
}

#[test]
fn verify_passes_and_reports_the_czf_phase() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fermiqc(&["verify"], dir.path()).status.success());
    let v = read_json(&dir.path().join("verify.json"));
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["passed"], true);
    let checks = v["checks"].as_array().unwrap();
    let czf = checks
        .iter()
        .find(|c| c["name"] == "transversal CZf logical phase d=3 is -i")
        .unwrap();
    assert_eq!(
        (czf["passed"].as_bool(), czf["detail"].as_str()),
        (Some(true), Some("-i"))
    );
}

#[test]
fn injected_fault_fails_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = fermiqc(&["verify", "--inject-fault", "Sf: g_i"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let v = read_json(&dir.path().join("verify.json"));
    assert_eq!(v["failed"], serde_json::json!(["table Sf: g_i"]));
}

#[test]
fn noiseless_repetition_memory() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fermiqc(
        &[
            "codes",
            "--family",
            "repetition",
            "--n",
            "3",
            "--noise",
            "0"
        ],
        dir.path()
    )
    .status
    .success());
    let v = read_json(&dir.path().join("codes_repetition_n3.json"));
    assert_eq!(v["memory"]["result"]["logical_error_rate"], 0.0);
}

#[test]
fn color_code_listing() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fermiqc(
        &["codes", "--family", "color", "--d", "3", "--format", "json"],
        dir.path()
    )
    .status
    .success());
    let v = read_json(&dir.path().join("codes_color_d3.json"));
    assert_eq!(v["n_sites"], 7);
    assert_eq!(v["generators"].as_array().unwrap().len(), 6);
    assert!(!dir.path().join("syndromes_color_d3.csv").exists());
}

#[test]
fn seed_changes_sampled_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["codes", "--noise", "0.1", "--shots", "2000"];
    let run = |seed: &str, sub: &str| {
        let p = dir.path().join(sub);
        let mut a = args.to_vec();
        a.extend(["--seed", seed]);
        assert!(fermiqc(&a, &p).status.success());
        std::fs::read(p.join("codes_repetition_n3.json")).unwrap()
    };
    assert_ne!(run("1", "a"), run("2", "b"));
}

#[test]
fn fft_table_has_four_sizes_per_method() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fermiqc(&["fft", "--sizes", "2,4,8,16"], dir.path())
        .status
        .success());
    let csv = std::fs::read_to_string(dir.path().join("fft.csv")).unwrap();
    let rows: Vec<&str> = csv
        .lines()
        .skip(1)
        .filter(|l| l.starts_with("fermionic_fft,"))
        .collect();
    assert_eq!(
        rows,
        [
            "fermionic_fft,2,4,3,0,0,4,2",
            "fermionic_fft,4,9,12,1,1,8,8",
            "fermionic_fft,8,14,36,5,2,12,24",
            "fermionic_fft,16,19,96,17,6,16,64"
        ]
    );
    assert!(fermiqc(&["fft", "--sizes", "3"], dir.path()).status.code() == Some(2));
}

#[test]
fn ramsey_without_molecules() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fermiqc(
        &["pairing", "--experiment", "ramsey", "--n", "0"],
        dir.path()
    )
    .status
    .success());
    let v = read_json(&dir.path().join("pairing_ramsey.json"));
    for c in v["curves"].as_array().unwrap() {
        assert!(c["contrast"].as_f64().unwrap().abs() < 1e-6);
    }
    let csv = std::fs::read_to_string(dir.path().join("pairing_ramsey.csv")).unwrap();
    assert!(csv.starts_with("experiment,N1,N2,theta,value,fit_C,fit_D,residual\n"));
}

#[test]
fn choi_at_one_hundred_molecules() {
    let dir = tempfile::tempdir().unwrap();
    assert!(fermiqc(
        &["pairing", "--experiment", "choi", "--n2", "100"],
        dir.path()
    )
    .status
    .success());
    let v = read_json(&dir.path().join("pairing_choi.json"));
    let r = &v["results"][0];
    assert_eq!(r["converged"], true);
    assert!(r["result"]["average_infidelity"].as_f64().unwrap() <= 2e-3);
}

#[test]
fn config_file_and_output_dir_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"seed": 4, "fft": {"sizes": [2, 4]}, "format": "csv"}"#,
    )
    .unwrap();
    let env_dir = dir.path().join("from-env");
    let out = Command::new(env!("CARGO_BIN_EXE_fermiqc"))
        .args(["fft", "--config", cfg.to_str().unwrap()])
        .env("FQC_OUTPUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(env_dir.join("fft.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 * 2);
    assert!(!env_dir.join("fft.json").exists());

    std::fs::write(&cfg, r#"{"seed": 4, "sizes": [2, 4]}"#).unwrap();
    let out = fermiqc(&["fft", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));
}
