//! The acceptance gate: one test per shipped criterion, each printing a
//! single `ACCEPTANCE <n> <name>: PASS/FAIL` line and enforcing both the
//! property and its runtime budget. Criteria 1-10 drive the certification
//! suites through the library; criterion 11 drives the installed binary.

use std::process::Command;
use std::time::{Duration, Instant};

use aal_core::checks::run_lemma;
use aal_core::report::{LemmaReport, RunConfig};

fn suite(name: &str) -> (LemmaReport, Duration) {
    let started = Instant::now();
    let lemma = run_lemma(name, &RunConfig::default()).expect("known suite name");
    (lemma, started.elapsed())
}

fn gate(number: u32, name: &str, pass: bool) {
    println!("ACCEPTANCE {number:02} {name}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "acceptance criterion {number} ({name}) failed");
}

#[test]
fn acceptance_01_trinity_bijection() {
    let (lemma, elapsed) = suite("bijection");
    let pass = lemma.pass && lemma.instances == 89 && elapsed < Duration::from_secs(10);
    gate(1, "trinity-bijection", pass);
}

#[test]
fn acceptance_02_adjoint_duality() {
    let (lemma, elapsed) = suite("adjoints");
    let pass = lemma.pass && lemma.instances == 500 && elapsed < Duration::from_secs(10);
    gate(2, "adjoint-duality", pass);
}

#[test]
fn acceptance_03_image_factorization() {
    let (lemma, elapsed) = suite("factorization");
    let pass = lemma.pass && lemma.instances == 500 && elapsed < Duration::from_secs(10);
    gate(3, "image-factorization", pass);
}

#[test]
fn acceptance_04_monad_laws() {
    let (lemma, elapsed) = suite("monad-laws");
    let pass = lemma.pass && lemma.instances == 17_056_104 && elapsed < Duration::from_secs(30);
    gate(4, "monad-laws", pass);
}

#[test]
fn acceptance_05_evaluation_naturality() {
    let (lemma, elapsed) = suite("evaluation");
    let pass = lemma.pass && lemma.instances == 208_956 && elapsed < Duration::from_secs(10);
    gate(5, "evaluation-naturality", pass);
}

#[test]
fn acceptance_06_structurality() {
    let (lemma, elapsed) = suite("structurality");
    let pass = lemma.pass
        && lemma.instances == 39_217_354_250_604_714_579_238_272_309_342
        && elapsed < Duration::from_secs(60);
    gate(6, "structurality", pass);
}

#[test]
fn acceptance_07_lindenbaum_tarski() {
    let (lemma, elapsed) = suite("lindenbaum-tarski");
    let pass = lemma.pass
        && lemma.detail.contains("boolean/1:4")
        && lemma.detail.contains("boolean/2:16")
        && lemma.detail.contains("boolean+heyting/1:6")
        && lemma.detail.contains("boolean+heyting/2:162")
        && elapsed < Duration::from_secs(60);
    gate(7, "lindenbaum-tarski", pass);
}

#[test]
fn acceptance_08_algebraisation() {
    let (lemma, elapsed) = suite("algebraisation");
    let pass = lemma.pass
        && lemma.detail.contains("projection control rejected:")
        && elapsed < Duration::from_secs(120);
    gate(8, "algebraisation", pass);
}

#[test]
fn acceptance_09_projective_lifting() {
    let (lemma, elapsed) = suite("lifting");
    let pass = lemma.pass && lemma.instances == 500 && elapsed < Duration::from_secs(10);
    gate(9, "projective-lifting", pass);
}

#[test]
fn acceptance_10_quotient_iso_translations() {
    let (lemma, elapsed) = suite("quotient-iso");
    let pass = lemma.pass
        && lemma.instances == 49
        && lemma.detail.contains("15 isomorphic and 34 non-isomorphic")
        && elapsed < Duration::from_secs(10);
    gate(10, "quotient-iso-translations", pass);
}

#[test]
fn acceptance_11_cli_determinism() {
    let started = Instant::now();
    let dir = tempfile::tempdir().expect("tempdir");
    let json = dir.path().join("report.json");
    let json_arg = json.to_str().expect("utf8 path").to_string();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_aal"))
            .current_dir(dir.path())
            .args(["check-lemmas", "--all", "--seed", "7", "--json", &json_arg])
            .output()
            .expect("binary runs")
    };

    let first = run();
    let first_json = std::fs::read(&json).expect("first report");
    let second = run();
    let second_json = std::fs::read(&json).expect("second report");

    let pass = first.status.code() == Some(0)
        && second.status.code() == Some(0)
        && first.stdout == second.stdout
        && first_json == second_json
        && !first_json.is_empty()
        && started.elapsed() < Duration::from_secs(300);
    gate(11, "cli-determinism", pass);
}
