use std::process::{Command, Output};

use nonlocal_cli::{run, Command as Suite, Format, RunConfig};
use proptest::prelude::*;

fn nonlocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn constants_passes_with_defaults() {
    let o = nonlocal(&["constants"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("constants: PASS"));
}

#[test]
fn sigma_below_sqrt_n_is_a_usage_error() {
    let o = nonlocal(&["counterexample", "--sigma", "1.2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("sqrt(n)"), "{err}");
}

#[test]
fn small_lambda_ratio_is_a_usage_error() {
    let o = nonlocal(&["counterexample", "--Lambda", "2.5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_command_is_a_usage_error() {
    assert_eq!(nonlocal(&["integrate"]).status.code(), Some(1));
    assert_eq!(nonlocal(&["constants", "--format", "xml"]).status.code(), Some(1));
}

#[test]
fn help_lists_every_flag_with_defaults() {
    let o = nonlocal(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for flag in ["--n", "--sigma", "--lambda", "--Lambda", "--tol", "--N", "--p", "--out", "--format", "--seed", "--config"] {
        assert!(text.contains(&format!("{flag} ")), "missing {flag}");
    }
    assert!(text.matches("[default:").count() >= 9);
}

#[test]
fn counterexample_csv_has_monotone_ratio_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ce.csv");
    let o = nonlocal(&["counterexample", "--n", "2", "--sigma", "1.6", "--N", "16,64,256,1024", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let header = rdr.headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), ["N", "A", "A_bound", "B", "B_bound", "C", "D", "E", "F"]);
    let c: Vec<f64> = rdr.records().map(|r| r.unwrap()[5].parse().unwrap()).collect();
    assert_eq!(c.len(), 4);
    assert!(c.windows(2).all(|w| w[1] > w[0]), "{c:?}");
}

#[test]
fn csv_numbers_carry_at_least_twelve_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = nonlocal(&["constants", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let row = rdr.records().next().unwrap().unwrap();
    let a_pos = &row[2];
    let mantissa = a_pos.split('e').next().unwrap().replace(['.', '-'], "");
    assert!(mantissa.len() >= 12, "{a_pos}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.json");
    let out = dir.path().join("r.json");
    let mut cfg = RunConfig::default();
    cfg.command = Suite::Counterexample;
    cfg.ladder = vec![16, 64];
    cfg.format = Format::Json;
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let o = nonlocal(&["--config", cfg_path.to_str().unwrap(), "--N", "16,32", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["command"], "counterexample");
    assert_eq!(doc["pass"], true);
    assert_eq!(doc["params"]["N"], serde_json::json!([16, 32]));
    assert_eq!(doc["results"][1]["N"], 32);
    assert!(doc["version"].is_string());
}

#[test]
fn identical_configs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, fmt) in [(Suite::Constants, Format::Csv), (Suite::Counterexample, Format::Csv), (Suite::Counterexample, Format::Json)] {
        let path = dir.path().join(cmd.name());
        let cfg = RunConfig { command: cmd, format: fmt, seed: 7, output_path: Some(path.clone()), ..RunConfig::default() };
        let mut bytes = Vec::new();
        for _ in 0..2 {
            run(&cfg).unwrap();
            bytes.push(std::fs::read(&path).unwrap());
        }
        assert!(bytes[0] == bytes[1], "{} reports differ", cmd.name());
    }
}

#[test]
fn empty_config_file_means_defaults() {
    let cfg: RunConfig = serde_json::from_str("{}").unwrap();
    assert_eq!(cfg, RunConfig::default());
}

proptest! {
    #[test]
    fn config_round_trips_through_json(
        cmd in 0usize..6,
        n in 2usize..6,
        sigma in 0.05f64..1.95,
        lambda in 0.1f64..2.0,
        ratio in 1.0f64..10.0,
        tol in 1e-12f64..1e-2,
        ladder in proptest::collection::vec(2u64..100_000, 0..6),
        p in proptest::option::of(1.0f64..5.0),
        json in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let mut cfg = RunConfig {
            command: Suite::ALL[cmd],
            ladder,
            p,
            format: if json { Format::Json } else { Format::Csv },
            seed,
            output_path: Some("out/report.csv".into()),
            ..RunConfig::default()
        };
        cfg.params.n = n;
        cfg.params.sigma = sigma;
        cfg.params.lambda = lambda;
        cfg.params.big_lambda = lambda * ratio;
        cfg.spec.tol = tol;
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, cfg);
    }
}
