use assert_cmd::Command;
use predicates::prelude::*;

fn bin() -> Command {
    Command::cargo_bin("arithdyn").unwrap()
}

#[test]
fn unique_classify() {
    bin()
        .args(["unique", "classify", "--base", "1.9"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"category\":\"PositiveDim\""));
    bin()
        .args(["unique", "classify", "--base", "1.5"])
        .assert()
        .success()
        .stdout(predicate::str::contains("Empty"));
}

#[test]
fn count_block_and_word() {
    bin()
        .args(["count", "block", "--params", "2", "--format", "plain"])
        .assert()
        .success()
        .stdout("3\n");
    bin()
        .args(["count", "word", "10000", "--format", "plain"])
        .assert()
        .success()
        .stdout("3\n");
}

#[test]
fn beta_expand_golden_half() {
    bin()
        .args([
            "beta", "expand", "--base", "golden", "--x", "1/2", "--digits", "9", "--format",
            "plain",
        ])
        .assert()
        .success()
        .stdout("010010010\n");
}

#[test]
fn beta_parry_golden() {
    bin()
        .args(["beta", "parry", "--base", "golden"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"period\":[1,0]"));
}

#[test]
fn rotate_roundtrip_flags() {
    bin()
        .args([
            "rotate", "cf", "--alpha", "sqrt:2:-1:1", "--depth", "4", "--format", "plain",
        ])
        .assert()
        .success()
        .stdout("2,2,2,2\n");
    bin()
        .args(["rotate", "integers", "--n", "4", "--model", "1", "--format", "plain"])
        .assert()
        .success();
}

#[test]
fn adic_succ_steps() {
    bin()
        .args([
            "adic", "succ", "--compactum", "full:2,2,2", "--path", "0,0,0", "--steps", "3",
        ])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"path\":[1,1,0]"));
}

#[test]
fn toral_counts_and_exit_codes() {
    bin()
        .args(["toral", "preimages", "--matrix", "1,1,1,0", "--xi", "1", "--format", "plain"])
        .assert()
        .success()
        .stdout("5\n");
    bin()
        .args(["toral", "bac", "--matrix", "1,1,1,0", "--bound", "2"])
        .assert()
        .success()
        .stdout(predicate::str::contains("\"found\":true"));
    // 4x^2 - 2y^2 is even: bounded search cannot resolve, exit 2
    bin()
        .args(["toral", "bac", "--matrix", "3,2,4,3", "--bound", "3"])
        .assert()
        .code(2);
}

#[test]
fn usage_errors_exit_one() {
    bin().args(["frobnicate"]).assert().code(1);
    bin()
        .args(["beta", "expand", "--base", "not-a-base", "--x", "1/2"])
        .assert()
        .code(1);
}

#[test]
fn deterministic_stats_output() {
    let run = || {
        bin()
            .args([
                "rotate", "stats", "--alpha", "golden", "--n", "50", "--samples", "20", "--seed",
                "7",
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run(), run());
}
