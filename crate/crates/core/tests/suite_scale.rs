//! Full-scale runs of the exhaustive lemma suites with their deterministic
//! instance counts frozen. The counts follow from the default config alone
//! (term depth 2, contexts up to 2, sets up to size 2), so any drift in
//! enumeration or classification shows up here as a count change.

use aal_core::checks;
use aal_core::report::RunConfig;

fn run(name: &str) -> aal_core::report::LemmaReport {
    let report = checks::run_lemma(name, &RunConfig::default()).expect("registered suite");
    assert!(report.pass, "{name}: {}", report.detail);
    report
}

#[test]
fn monad_laws_full_scale_count() {
    let report = run("monad-laws");
    assert_eq!(report.instances, 17_056_104);
    assert_eq!(report.detail, "952 unit and 17055152 sequencing instances");
}

#[test]
fn evaluation_full_scale_count() {
    let report = run("evaluation");
    assert_eq!(report.instances, 208_956);
}

#[test]
fn structurality_full_scale_coverage() {
    let report = run("structurality");
    assert_eq!(report.instances, 39_217_354_250_604_714_579_238_272_309_342u128);
    assert!(report.detail.starts_with("1616 class pairs"), "{}", report.detail);
}

#[test]
fn lindenbaum_tarski_full_scale_carriers() {
    let report = run("lindenbaum-tarski");
    assert_eq!(report.instances, 201_112_066);
    assert_eq!(
        report.detail,
        "carriers boolean/1:4 boolean/2:16 boolean+heyting/1:6 boolean+heyting/2:162"
    );
}

#[test]
fn algebraisation_full_scale_coverage() {
    let report = run("algebraisation");
    assert_eq!(report.instances, 2_039_262_197_111_151);
    assert!(
        report.detail.contains("276 representation and 245 inversion classes"),
        "{}",
        report.detail
    );
    assert!(
        report.detail.contains("forward entailment fails at {p=0, q=0} in B2"),
        "{}",
        report.detail
    );
}
