//! End-to-end tests driving the compiled binary: report contents for the
//! documented examples, byte-level determinism, report ordering, and the
//! exit-code contract over randomly assembled problem files.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cylmp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).expect("temp file write");
    path
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&output.stdout)
        )
    })
}

fn standard_gaussian(dir: &TempDir) -> PathBuf {
    write(
        dir,
        "g.json",
        r#"{"head": {"diag": ["1"]}, "tail": {"model": "power", "C": "1", "p": "2"}}"#,
    )
}

#[test]
fn eval_reports_the_exact_value() {
    let dir = TempDir::new().unwrap();
    let spec = standard_gaussian(&dir);
    let output = run(&["eval", "--spec", spec.to_str().unwrap(), "--poly", "x1^4 - 3"]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["check"], "eval");
    assert_eq!(report["result"]["value"], "0");
    assert_eq!(report["pass"], true);
    let summary = String::from_utf8_lossy(&output.stderr);
    assert!(summary.contains("eval: pass"), "summary was: {summary}");
}

#[test]
fn classify_reads_the_verdict_off_the_tail() {
    let dir = TempDir::new().unwrap();
    let slow = write(
        &dir,
        "p1.json",
        r#"{"head": {"diag": ["1"]}, "tail": {"model": "power", "C": "1", "p": "1"}}"#,
    );
    let output = run(&["classify", "--spec", slow.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout_json(&output)["result"]["verdict"], "CylinderOnly");

    let fast = standard_gaussian(&dir);
    let output = run(&["classify", "--spec", fast.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    assert_eq!(stdout_json(&output)["result"]["verdict"], "SigmaAdditive");
}

#[test]
fn carleman_reports_divergence_for_the_standard_gaussian() {
    let dir = TempDir::new().unwrap();
    let spec = standard_gaussian(&dir);
    let output = run(&[
        "carleman",
        "--spec",
        spec.to_str().unwrap(),
        "--var",
        "1",
        "--horizon",
        "3",
    ]);
    assert_eq!(output.status.code(), Some(0));
    let report = stdout_json(&output);
    assert_eq!(report["result"]["verdict"]["kind"], "Diverges");
    let sums = report["result"]["partial_sums"].as_array().unwrap();
    let last = sums.last().unwrap().as_f64().unwrap();
    assert!((last - 2.396_608_905_124_763).abs() < 1e-9, "sum was {last}");
}

/// Problem file used by the determinism and ordering tests: both backends,
/// a Monte Carlo check (dense head forces sampling), and duplicate check
/// kinds to exercise tie ordering.
fn mixed_problem(seed: u64) -> String {
    json!({
        "covariance": {
            "head": {"dense": [["2", "1/2"], ["1/2", "1"]]},
            "tail": {"model": "geometric", "C": "1", "r": "1/2"}
        },
        "moment_table": {
            "support": [1],
            "max_degree": 4,
            "moments": {"1": "1", "x1^2": "1", "x1^4": "3"}
        },
        "polynomials": {"gap": "x1^4 - 3"},
        "checks": [
            {"check": "hankel", "backend": "covariance", "indices": [1, 2], "degree": 2},
            {"check": "eval", "backend": "covariance", "poly": "x1^2*x2^2"},
            {"check": "axioms", "indices": [1, 2], "seed": seed, "boxes": {
                "whole": [{"lo": "-2", "hi": "2"}, {"lo": "-2", "hi": "2"}],
                "cells": [
                    [{"lo": "-2", "hi": "0"}, {"lo": "-2", "hi": "2"}],
                    [{"lo": "0", "lo_open": true, "hi": "2"}, {"lo": "-2", "hi": "2"}]
                ]
            }},
            {"check": "eval", "backend": "moment_table", "poly": "gap"},
            {"check": "classify"},
            {"check": "wick", "poly": "x1^2*x2^2"},
            {"check": "quad", "backend": "moment_table", "var": 1, "degree": 2}
        ]
    })
    .to_string()
}

#[test]
fn reports_are_byte_identical_for_identical_inputs() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "problem.json", &mixed_problem(7));
    let path = file.to_str().unwrap();
    let first = run(&["run", path, "--jobs", "1"]);
    assert_eq!(first.status.code(), Some(0));
    let again = run(&["run", path, "--jobs", "1"]);
    let parallel = run(&["run", path, "--jobs", "4"]);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(first.stdout, parallel.stdout);

    let reseeded_file = write(&dir, "reseeded.json", &mixed_problem(8));
    let reseeded = run(&["run", reseeded_file.to_str().unwrap(), "--jobs", "1"]);
    assert_eq!(reseeded.status.code(), Some(0));
    let total = |output: &Output| -> f64 {
        let reports = stdout_json(output);
        let axioms = reports
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["check"] == "axioms")
            .unwrap()
            .clone();
        axioms["result"]["total"]["value"].as_f64().unwrap()
    };
    assert_ne!(
        total(&first),
        total(&reseeded),
        "Monte Carlo estimate ignores the seed"
    );
}

#[test]
fn batch_reports_are_sorted_by_check_with_file_order_ties() {
    let dir = TempDir::new().unwrap();
    let file = write(&dir, "problem.json", &mixed_problem(7));
    let output = run(&["run", file.to_str().unwrap()]);
    let reports = stdout_json(&output);
    let names: Vec<&str> = reports
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["check"].as_str().unwrap())
        .collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted, "reports are not sorted by check name");

    let evals: Vec<&Value> = reports
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["check"] == "eval")
        .collect();
    assert_eq!(evals.len(), 2);
    assert_eq!(evals[0]["params"]["backend"], "gaussian");
    assert_eq!(evals[1]["params"]["backend"], "table");
}

#[test]
fn batch_errors_are_reported_per_check() {
    let dir = TempDir::new().unwrap();
    let text = json!({
        "covariance": {"head": {"diag": ["1"]}, "tail": {"model": "power", "C": "1", "p": "2"}},
        "checks": [
            {"check": "frobnicate"},
            {"check": "eval", "poly": "x1^2"}
        ]
    })
    .to_string();
    let file = write(&dir, "problem.json", &text);
    let output = run(&["run", file.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let reports = stdout_json(&output);
    let reports = reports.as_array().unwrap();
    assert_eq!(reports.len(), 2);
    let good = &reports[0];
    assert_eq!(good["check"], "eval");
    assert_eq!(good["pass"], true);
    let bad = &reports[1];
    assert_eq!(bad["check"], "frobnicate");
    assert_eq!(bad["pass"], false);
    assert_eq!(bad["error"]["code"], "usage");
}

#[test]
fn out_flag_redirects_the_report() {
    let dir = TempDir::new().unwrap();
    let spec = standard_gaussian(&dir);
    let target = dir.path().join("report.json");
    let output = run(&[
        "eval",
        "--spec",
        spec.to_str().unwrap(),
        "--poly",
        "x1^2",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0));
    assert!(output.stdout.is_empty());
    let report: Value = serde_json::from_str(&fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(report["result"]["value"], "1");
}

#[test]
fn malformed_invocations_exit_2() {
    let dir = TempDir::new().unwrap();
    let spec = standard_gaussian(&dir);
    let spec = spec.to_str().unwrap();
    let table = write(
        &dir,
        "t.json",
        r#"{"support": [1], "max_degree": 2, "moments": {"1": "1", "x1^2": "1"}}"#,
    );
    let garbage = write(&dir, "garbage.json", "not json");
    let missing = dir.path().join("missing.json");

    let cases: Vec<Vec<&str>> = vec![
        vec!["eval", "--spec", spec],
        vec!["eval", "--spec", spec, "--table", table.to_str().unwrap(), "--poly", "x1"],
        vec!["eval", "--spec", spec, "--poly", "x1^^"],
        vec!["eval", "--spec", missing.to_str().unwrap(), "--poly", "x1"],
        vec!["eval", "--spec", garbage.to_str().unwrap(), "--poly", "x1"],
        vec!["hankel", "--spec", spec, "--indices", "0", "--degree", "1"],
        vec!["carleman", "--spec", spec, "--var", "1"],
        vec!["run", missing.to_str().unwrap()],
    ];
    for args in cases {
        let output = run(&args);
        assert_eq!(
            output.status.code(),
            Some(2),
            "expected exit 2 for {args:?}, stderr: {}",
            String::from_utf8_lossy(&output.stderr)
        );
    }
}

/// One check descriptor of known validity and verdict for the corpus
/// test. The shared problem file declares both backends, so functional
/// checks must name one explicitly; `Ambiguous` leaves that out.
#[derive(Debug, Clone)]
enum Case {
    EvalGaussian,
    EvalTable,
    Wick,
    Classify,
    Frac,
    ChebyshevGaussian,
    QuadGaussian,
    AxiomsExact { seed: u64 },
    HankelGaussian,
    // The shared table is deliberately not a moment sequence; this check
    // runs fine and reports a failing verdict.
    HankelTableFails,
    UnknownCheck,
    MissingSeed,
    MissingField,
    BadPoly,
    Ambiguous,
}

impl Case {
    fn descriptor(&self) -> Value {
        match self {
            Case::EvalGaussian => {
                json!({"check": "eval", "backend": "covariance", "poly": "x1^2 + x2^2"})
            }
            Case::EvalTable => {
                json!({"check": "eval", "backend": "moment_table", "poly": "x1^2 - 1"})
            }
            Case::Wick => json!({"check": "wick", "poly": "x1^2*x2^2"}),
            Case::Classify => json!({"check": "classify"}),
            Case::Frac => json!({"check": "frac", "poly": "x1 / (1+x1^2)"}),
            Case::ChebyshevGaussian => json!({
                "check": "chebyshev", "backend": "covariance", "poly": "x1", "threshold": "2"
            }),
            Case::QuadGaussian => {
                json!({"check": "quad", "backend": "covariance", "var": 1, "degree": 2})
            }
            Case::AxiomsExact { seed } => json!({
                "check": "axioms", "indices": [1], "seed": seed,
                "boxes": {"cells": [
                    [{"hi": "1", "hi_open": false}],
                    [{"lo": "1", "lo_open": true}]
                ]}
            }),
            Case::HankelGaussian => {
                json!({"check": "hankel", "backend": "covariance", "indices": [1, 2], "degree": 1})
            }
            Case::HankelTableFails => {
                json!({"check": "hankel", "backend": "moment_table", "indices": [1], "degree": 1})
            }
            Case::UnknownCheck => json!({"check": "frobnicate"}),
            Case::MissingSeed => json!({
                "check": "axioms", "indices": [1],
                "boxes": {"cells": [[{}]]}
            }),
            Case::MissingField => json!({"check": "carleman", "backend": "covariance", "var": 1}),
            Case::BadPoly => json!({"check": "eval", "backend": "covariance", "poly": "x1^^"}),
            Case::Ambiguous => json!({"check": "eval", "poly": "x1"}),
        }
    }

    fn is_malformed(&self) -> bool {
        matches!(
            self,
            Case::UnknownCheck
                | Case::MissingSeed
                | Case::MissingField
                | Case::BadPoly
                | Case::Ambiguous
        )
    }

    fn fails(&self) -> bool {
        matches!(self, Case::HankelTableFails)
    }
}

fn case() -> impl Strategy<Value = Case> {
    prop_oneof![
        Just(Case::EvalGaussian),
        Just(Case::EvalTable),
        Just(Case::Wick),
        Just(Case::Classify),
        Just(Case::Frac),
        Just(Case::ChebyshevGaussian),
        Just(Case::QuadGaussian),
        any::<u64>().prop_map(|seed| Case::AxiomsExact { seed }),
        Just(Case::HankelGaussian),
        Just(Case::HankelTableFails),
        Just(Case::UnknownCheck),
        Just(Case::MissingSeed),
        Just(Case::MissingField),
        Just(Case::BadPoly),
        Just(Case::Ambiguous),
    ]
}

fn corpus_problem(cases: &[Case]) -> String {
    let checks: Vec<Value> = cases.iter().map(Case::descriptor).collect();
    json!({
        "covariance": {
            "head": {"diag": ["1", "2"]},
            "tail": {"model": "power", "C": "1", "p": "2"}
        },
        "moment_table": {
            "support": [1],
            "max_degree": 2,
            "moments": {"1": "1", "x1": "2", "x1^2": "1"}
        },
        "checks": checks
    })
    .to_string()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Exit status is 2 if any check is malformed, else 1 if any check
    /// fails, else 0; and every check reports exactly one entry.
    #[test]
    fn exit_code_contract_over_random_problem_files(
        cases in proptest::collection::vec(case(), 1..6),
        jobs in 1usize..4,
    ) {
        let dir = TempDir::new().unwrap();
        let file = write(&dir, "problem.json", &corpus_problem(&cases));
        let output = run(&[
            "run",
            file.to_str().unwrap(),
            "--jobs",
            &jobs.to_string(),
        ]);
        let expected = if cases.iter().any(Case::is_malformed) {
            2
        } else if cases.iter().any(Case::fails) {
            1
        } else {
            0
        };
        prop_assert_eq!(
            output.status.code(),
            Some(expected),
            "cases: {:?}, stderr: {}",
            cases,
            String::from_utf8_lossy(&output.stderr)
        );
        let reports = stdout_json(&output);
        prop_assert_eq!(reports.as_array().unwrap().len(), cases.len());
    }
}
