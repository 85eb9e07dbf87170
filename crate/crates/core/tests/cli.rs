use std::f64::consts::SQRT_2;
use std::process::{Command, Output};

use serde_json::Value;

fn braket(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_braket")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn complex(v: &Value) -> (f64, f64) {
    (v["re"].as_f64().unwrap(), v["im"].as_f64().unwrap())
}

const EPR_PSI: &str = "(|up>|dn> - |dn>|up>)/sqrt(2)";
const EPR_PHI: &str = "(|up> + i|dn>) kron (|up> + |dn>) / 2";

#[test]
fn weak_epr_is_minus_one() {
    let v = stdout_json(&braket(&["weak", "--psi", EPR_PSI, "--phi", EPR_PHI, "--obs", "sx kron I"]));
    let (re, im) = complex(&v["weak"]);
    assert!((re + 1.0).abs() < 1e-12 && im.abs() < 1e-12);
    assert_eq!(v["inputs"]["dims"], serde_json::json!([2, 2]));
}

#[test]
fn scenario_hardy_modular_values() {
    let v = stdout_json(&braket(&["scenario", "hardy", "--g", "0.7"]));
    let m = &v["modular_values"];
    let (re, im) = complex(&m["Pi_O_pos"]);
    assert!((re - 0.7f64.cos()).abs() < 1e-12 && (im + 0.7f64.sin()).abs() < 1e-12);
    let (re, im) = complex(&m["Pi_O_pos+Pi_O_el"]);
    assert!((re - (2.0 * 0.7f64.cos() - 1.0)).abs() < 1e-12);
    assert!((im + 2.0 * 0.7f64.sin()).abs() < 1e-12);
}

#[test]
fn sweep_peaks_at_pi() {
    let out = braket(&["sweep", "crz", "--range", "0", "6.283185307179586", "201"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("g,re_mod,im_mod,abs_mod,re_weak,im_weak"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 201);
    let (imax, max) = rows
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r[3]))
        .fold((0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
    assert_eq!(imax, 100);
    assert!((max - (1.0 + SQRT_2)).abs() < 1e-11);
    assert!((rows[100][0] - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
}

#[test]
fn sweep_from_expressions_matches_scenario_sweep() {
    let a = braket(&["sweep", "crz", "--range", "0", "3", "7"]);
    let b = braket(&[
        "sweep",
        "--psi",
        "(|0> + |1>)/sqrt(2)",
        "--phi",
        "(sqrt(2 + sqrt(2))|0> - sqrt(2 - sqrt(2))|1>)/2",
        "--obs",
        "sz",
        "--range",
        "0",
        "3",
        "7",
    ]);
    assert!(a.status.success() && b.status.success());
    let parse = |o: &Output| -> Vec<f64> {
        String::from_utf8_lossy(&o.stdout)
            .lines()
            .skip(1)
            .flat_map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>())
            .collect()
    };
    for (x, y) in parse(&a).iter().zip(parse(&b)) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn modular_with_zero_coupling() {
    let v = stdout_json(&braket(&["modular", "--psi", "|H>|L> + |V>|R>", "--phi", "|H>|R> + 2|V>|L> + |H>|L>", "--obs", "S kron proj(|L>)", "--g", "0"]));
    assert_eq!(complex(&v["modular"]), (1.0, 0.0));
}

#[test]
fn sumrule_reports_the_gap() {
    let v = stdout_json(&braket(&[
        "sumrule", "--psi", EPR_PSI, "--phi", EPR_PHI, "--term", "0:sx", "--term", "1:sy", "--g", "0",
    ]));
    let (re, im) = complex(&v["sum_rule"]["gap"]);
    assert!((re + 1.0).abs() < 1e-12 && im.abs() < 1e-12);
    assert!((complex(&v["product_rule"]["gap"]).0 + 2.0).abs() < 1e-12);
}

#[test]
fn meter_shots_are_deterministic_per_seed() {
    let args = ["meter", "--psi", EPR_PSI, "--phi", EPR_PHI, "--obs", "sx kron I", "--theta", "1.5707963267948966", "--gamma-bar", "0.5", "--shots", "20000", "--seed", "11"];
    let (a, b) = (braket(&args), braket(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    let (re, im) = complex(&v["tomography"]["estimate"]["value"]);
    let se = v["tomography"]["estimate"]["std_error_re"].as_f64().unwrap();
    let g = std::f64::consts::FRAC_PI_4;
    assert!((re - g.cos()).abs() < 6.0 * se && (im - g.sin()).abs() < 6.0 * se);
    let mut other = args.to_vec();
    *other.last_mut().unwrap() = "12";
    assert_ne!(braket(&other).stdout, a.stdout);
}

#[test]
fn out_flag_writes_file_and_keeps_stdout_empty() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cheshire.json");
    let out = braket(&["scenario", "cheshire", "--g", "0.5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["name"], "cheshire");
}

#[test]
fn outputs_are_byte_stable() {
    for args in [
        vec!["scenario", "epr", "--g", "0.3"],
        vec!["scenario", "crz", "--theta", "2"],
        vec!["sweep", "crz", "--range", "0", "1", "5", "--format", "json"],
    ] {
        assert_eq!(braket(&args).stdout, braket(&args).stdout);
    }
}

#[test]
fn exit_codes_and_diagnostics() {
    let parse_err = braket(&["weak", "--psi", "|0> + sx", "--phi", "|0>", "--obs", "sz"]);
    assert_eq!(parse_err.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&parse_err.stderr);
    assert!(msg.contains("type error") && msg.contains("1:5"), "{msg}");
    assert!(parse_err.stdout.is_empty());

    let orth = braket(&["weak", "--psi", "|0>", "--phi", "|1>", "--obs", "sz"]);
    assert_eq!(orth.status.code(), Some(1));

    assert_eq!(braket(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(braket(&["sweep", "crz", "--range", "0", "1", "1"]).status.code(), Some(2));
    assert_eq!(braket(&["sweep", "hardy", "--range", "0", "1", "3"]).status.code(), Some(2));
    assert_eq!(braket(&["meter", "--psi", "|0>", "--phi", "|0>", "--obs", "sz", "--g", "1", "--gamma-bar", "1.5"]).status.code(), Some(1));
    assert_eq!(braket(&["scenario", "epr", "--g", "1", "--format", "csv"]).status.code(), Some(2));
    assert_eq!(braket(&["--version"]).status.code(), Some(0));
}

#[test]
fn basis_declarations() {
    let v = stdout_json(&braket(&["weak", "--psi", "|x>|q>", "--phi", "|x>|q>", "--obs", "sz kron sz", "--basis", "x,y", "p,q"]));
    assert_eq!(complex(&v["weak"]).0, -1.0);
}
