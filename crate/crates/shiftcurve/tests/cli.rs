use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use shiftcurve::{
    estimate_bundle, rate_study_bundle, risk_bundle, run_section4_study, select_bundle, simulate_bundle, Bundle,
    ExperimentConfig,
};
use shiftcurve_core::Sequential;

const SMALL: [&str; 10] = [
    "--n",
    "30",
    "--k",
    "16",
    "--replications",
    "8",
    "--m0-override",
    "10",
    "--grid",
    "64",
];

fn small_config() -> ExperimentConfig {
    ExperimentConfig {
        n: 30,
        k: 16,
        replications: 8,
        m0_override: Some(10),
        grid: 64,
        ..ExperimentConfig::section4()
    }
}

fn shiftcurve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftcurve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn read_dir(dir: &Path) -> Bundle {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read_to_string(e.path()).unwrap(),
            )
        })
        .collect()
}

fn run_to_dir(args: &[&str]) -> Bundle {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let mut all = args.to_vec();
    all.extend(["--out", out]);
    let o = shiftcurve(&all);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    read_dir(dir.path())
}

fn with_small<'a>(head: &[&'a str]) -> Vec<&'a str> {
    head.iter().copied().chain(SMALL).collect()
}

#[test]
fn cli_output_equals_library_output() {
    let cfg = small_config();
    assert_eq!(run_to_dir(&with_small(&["simulate"])), simulate_bundle(&cfg).unwrap());
    assert_eq!(run_to_dir(&with_small(&["estimate"])), estimate_bundle(&cfg).unwrap());
    assert_eq!(run_to_dir(&with_small(&["select"])), select_bundle(&cfg).unwrap());
    assert_eq!(
        run_to_dir(&with_small(&["risk", "--ratios"])),
        risk_bundle(&cfg, true, &Sequential).unwrap()
    );
    assert_eq!(
        run_to_dir(&with_small(&["study-section4"])),
        run_section4_study(&cfg, &Sequential).unwrap()
    );

    let rate = ExperimentConfig {
        replications: 4,
        k: 16,
        grid: 64,
        ..ExperimentConfig::rate_preset()
    };
    assert_eq!(
        run_to_dir(&[
            "rate-study",
            "--replications",
            "4",
            "--k",
            "16",
            "--grid",
            "64",
            "--n-grid",
            "100,200,400"
        ]),
        rate_study_bundle(&rate, &[100, 200, 400], &Sequential).unwrap()
    );
}

#[test]
fn stdout_carries_the_main_table() {
    let o = shiftcurve(&with_small(&["select"]));
    assert!(o.status.success());
    let expected = select_bundle(&small_config()).unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), expected["selection.csv"]);
}

#[test]
fn repeated_and_parallel_runs_are_byte_identical() {
    let args = with_small(&["study-section4", "--seed", "99"]);
    let a = run_to_dir(&args);
    let b = run_to_dir(&args);
    let mut seq = args.clone();
    seq.push("--sequential");
    let c = run_to_dir(&seq);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let other = run_to_dir(&with_small(&["study-section4", "--seed", "100"]));
    assert_ne!(a["selections.csv"], other["selections.csv"]);
}

#[test]
fn config_file_round_trips_through_dump() {
    let dir = tempfile::tempdir().unwrap();
    let first = shiftcurve(&with_small(&[
        "select",
        "--dump-config",
        "--penalty-variant",
        "proof_form",
    ]));
    assert!(first.status.success());
    let path = dir.path().join("cfg.toml");
    fs::write(&path, &first.stdout).unwrap();
    let second = shiftcurve(&["select", "--dump-config", "--config", path.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
    let parsed = ExperimentConfig::from_file(&path, ExperimentConfig::rate_preset()).unwrap();
    assert_eq!(parsed.n, 30);
}

fn error_line(o: &Output) -> serde_json::Value {
    let stderr = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    serde_json::from_str(stderr.trim()).unwrap()
}

#[test]
fn config_errors_are_machine_readable() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "n = 30\nepsilon = 0.1\ncurvez = 4\n").unwrap();
    let o = shiftcurve(&["simulate", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let e = error_line(&o);
    assert_eq!(e["error"], "config");
    assert_eq!(e["key"], "curvez");
    assert_eq!(e["line"], 3);

    fs::write(&path, "k = 10\nm0_override = 11\n").unwrap();
    let e = error_line(&shiftcurve(&["risk", "--config", path.to_str().unwrap()]));
    assert_eq!(e["key"], "m0_override");
    assert_eq!(e["line"], 2);

    let o = shiftcurve(&["simulate", "--n", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_line(&o)["key"], "n");
}

#[test]
fn usage_and_runtime_errors_are_machine_readable() {
    let o = shiftcurve(&["simulate", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_line(&o)["error"], "usage");

    // γ_2 of the uniform law on [-1/4, 1/4] vanishes
    let o = shiftcurve(&[
        "risk",
        "--density",
        "uniform",
        "--half-width",
        "0.25",
        "--m0-override",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_line(&o)["error"], "core");

    let o = shiftcurve(&["simulate", "--template", "missing.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_line(&o)["error"], "coefficients");
}

#[test]
fn coefficient_file_template() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    fs::write(&path, "k,re,im\n1,0.5,0\n3,0.1,-0.2\n").unwrap();
    let bundle = run_to_dir(&[
        "simulate",
        "--template",
        path.to_str().unwrap(),
        "--k",
        "8",
        "--grid",
        "32",
        "--n",
        "5",
        "--m0-override",
        "none",
    ]);
    assert_eq!(bundle["curves.csv"].lines().count(), 6);
}
