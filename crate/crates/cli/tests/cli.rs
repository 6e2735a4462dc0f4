use std::path::PathBuf;
use std::process::{Command, Output};

use iquantum::qring::{LaurentPoly, PowerSeriesTrunc, RatQ, SeriesDir};
use serde_json::Value;

fn iqg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iqg")).args(args).output().expect("the binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("iqg-{}-{name}.json", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

const TAU_NAMES: &str = r#"{
  "nodes": ["i", "ti"], "cartan": [[2, -1], [-1, 2]], "d": [1, 1],
  "tau": {"i": "ti", "ti": "i"}, "varsigma": {"i": 1, "ti": 0},
  "weights": {"L0": {"lam": {"i": 2}}}
}"#;

#[test]
fn single_cup_pairing_matches() {
    let cfg = write_config("cup", TAU_NAMES);
    let o = iqg(&["--config", cfg.to_str().unwrap(), "pair", "--i", "ti i", "--j", "", "--lambda", "L0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("match: true"), "{text}");
    // One cup of degree zero, weighted by 1 / (1 - q^-2).
    let value: RatQ = text.lines().next().unwrap().trim_start_matches("shapes: ").parse().unwrap();
    assert_eq!(value, "(+1*q^2)/(-1*q^0+1*q^2)".parse().unwrap());
}

#[test]
fn iserre_sweep_is_all_equal() {
    for preset in ["diagonal_a1a1", "quasi_split_a2", "split_a2"] {
        let o = iqg(&["--preset", preset, "iserre", "--all", "--lambda-range", "-3..3"]);
        assert_eq!(o.status.code(), Some(0), "{preset}");
        assert!(stdout(&o).contains("all equal: true"));
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["--preset", "quasi_split_a3", "shapes", "--top", "1 3 2", "--bottom", "2", "--lambda", "L1"];
    assert_eq!(iqg(&args).stdout, iqg(&args).stdout);
    let args = ["--preset", "quasi_split_a2", "--json", "bkl", "--i", "1", "--lambda", "L3"];
    assert_eq!(iqg(&args).stdout, iqg(&args).stdout);
}

#[test]
fn json_round_trips() {
    let o = iqg(&["--preset", "quasi_split_a2", "--json", "pair", "--i", "1 2 1", "--j", "1", "--lambda", "L1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["shapes", "recursive"] {
        let s = v[key].as_str().unwrap();
        assert_eq!(s.parse::<RatQ>().unwrap().to_string(), s);
    }
    assert_eq!(serde_json::from_str::<Value>(&serde_json::to_string(&v).unwrap()).unwrap(), v);

    let o = iqg(&["--preset", "split_a2", "--json", "--order", "12", "grdim", "--i", "1 2", "--j", "2 1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rank = &v["rank"];
    let poly: LaurentPoly = rank["poly"].as_str().unwrap().parse().unwrap();
    let s = PowerSeriesTrunc::from_poly(&poly, SeriesDir::AscendingQ, rank["order"].as_i64().unwrap());
    assert_eq!(s.to_string(), rank["text"].as_str().unwrap());
}

#[test]
fn klr_normal_forms() {
    let o = iqg(&["--preset", "split_a2", "klr", "--expr", "e(1 1) ; s1 ; x1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "e(1 1) ; s1 ; x1 = +1 e(1 1) +1 s1 x2 e(1 1)\n");
}

#[test]
fn end_grdim_split_a1() {
    let o = iqg(&["--preset", "split_a1", "--order", "10", "grdim", "--end"]);
    assert_eq!(stdout(&o), "end: +1*q^0+1*q^2+1*q^4+2*q^6+2*q^8+3*q^10 + O(q^11)\n");
}

#[test]
fn config_errors_exit_two() {
    let bad = TAU_NAMES.replace(r#""varsigma": {"i": 1, "ti": 0}"#, r#""varsigma": {"i": 1, "ti": 1}"#);
    let cfg = write_config("recap", &bad);
    let o = iqg(&["--config", cfg.to_str().unwrap(), "pair", "--i", "i", "--j", "i"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("varsigma"));

    let fixed = r#"{"nodes":["a"],"cartan":[[2]],"d":[1],"tau":{"a":"a"},"varsigma":{"a":-1},
                    "weights":{"L0":{"lam":{}}}}"#;
    let cfg = write_config("parity", fixed);
    let o = iqg(&["--config", cfg.to_str().unwrap(), "grdim", "--end"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("node a"));

    assert_eq!(iqg(&["pair", "--i", "1", "--j", "1"]).status.code(), Some(2));
    assert_eq!(iqg(&["--preset", "split_a1", "frobnicate"]).status.code(), Some(2));
    assert_eq!(iqg(&["--preset", "split_a1", "pair", "--i", "7", "--j", ""]).status.code(), Some(2));
}

#[test]
fn selftest_passes_on_shipped_configs() {
    let o = iqg(&["selftest"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
}
