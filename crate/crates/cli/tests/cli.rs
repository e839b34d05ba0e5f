//! End-to-end tests of the `aal` binary: exit codes, report text, and the
//! file formats, driven through real processes on the bundled fixtures.

use std::path::Path;
use std::process::{Command, Output};

fn aal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn aal_with_env(args: &[&str], key: &str, value: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aal"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn check_sig_lists_operations() {
    let out = aal(&["check-sig", "--sig", &fixture("bool.sig")]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("signature BOOL"));
    assert!(text.contains("op imp arity 2"));
    assert!(text.contains("op top arity 0"));
    assert!(text.contains("verdict: ok"));
}

#[test]
fn term_prints_canonical_form_depth_and_inferred_context() {
    let out = aal(&["term", "--sig", &fixture("bool.sig"), "(and p (not q))"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("term (and p (not q))"));
    assert!(text.contains("depth 2"));
    assert!(text.contains("context [p, q]"));
}

#[test]
fn malformed_term_is_a_usage_error() {
    let out = aal(&["term", "--sig", &fixture("bool.sig"), "(and p"]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("verdict: error"));
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let out = aal(&["check-sig"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn entail_modus_ponens_in_the_boolean_matrix() {
    let out = aal(&[
        "entail",
        "--sig",
        &fixture("bool.sig"),
        "--matrices",
        &fixture("b2.alg"),
        "--designated",
        "1",
        "--gamma",
        "p,(imp p q)",
        "--phi",
        "q",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: yes"));
}

#[test]
fn entail_non_consequence_prints_a_witness() {
    let out = aal(&[
        "entail",
        "--sig",
        &fixture("bool.sig"),
        "--matrices",
        &fixture("b2.alg"),
        "--designated",
        "1",
        "--gamma",
        "p",
        "--phi",
        "q",
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("witness {p=1, q=0} in B2"));
    assert!(text.contains("verdict: no"));
}

#[test]
fn entail_equation_reflexivity_in_the_class() {
    let out = aal(&[
        "entail",
        "--sig",
        &fixture("bool.sig"),
        "--class",
        &fixture("b2.alg"),
        "--eq",
        "p ~ p",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: yes"));
}

#[test]
fn entail_excluded_middle_fails_in_the_heyting_chain() {
    let out = aal(&[
        "entail",
        "--sig",
        &fixture("bool.sig"),
        "--class",
        &fixture("h3.alg"),
        "--eq",
        "(or p (not p)) ~ top",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("witness {p=h} in H3"));
}

#[test]
fn entail_equation_with_premises() {
    let out = aal(&[
        "entail",
        "--sig",
        &fixture("bool.sig"),
        "--class",
        &fixture("b2.alg"),
        &fixture("h3.alg"),
        "--premises",
        "p ~ top; q ~ top",
        "--eq",
        "(and p q) ~ top",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: yes"));
}

#[test]
fn entail_refuses_to_exceed_the_evaluation_guard() {
    let out = aal(&[
        "entail",
        "--sig",
        &fixture("bool.sig"),
        "--matrices",
        &fixture("b2.alg"),
        "--designated",
        "1",
        "--gamma",
        "p",
        "--phi",
        "q",
        "--guard-evals",
        "2",
    ]);
    assert_eq!(code(&out), 4);
    assert!(stdout(&out).contains("verdict: error"));
}

#[test]
fn entail_unknown_designated_label_is_a_usage_error() {
    let out = aal(&[
        "entail",
        "--sig",
        &fixture("bool.sig"),
        "--matrices",
        &fixture("b2.alg"),
        "--designated",
        "2",
        "--phi",
        "p",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn derive_self_implication_from_the_hilbert_axioms() {
    let out = aal(&[
        "derive",
        "--sig",
        &fixture("min.sig"),
        "--rules",
        &fixture("cpc.rules"),
        "--phi",
        "(imp p p)",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: yes"));
}

#[test]
fn derive_modus_ponens_from_premises() {
    let out = aal(&[
        "derive",
        "--sig",
        &fixture("min.sig"),
        "--rules",
        &fixture("cpc.rules"),
        "--gamma",
        "p,(imp p q)",
        "--phi",
        "q",
        "--instance-depth",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: yes"));
}

#[test]
fn derive_guards_against_instance_explosion() {
    let out = aal(&[
        "derive",
        "--sig",
        &fixture("min.sig"),
        "--rules",
        &fixture("cpc.rules"),
        "--gamma",
        "p,(imp p q)",
        "--phi",
        "q",
    ]);
    // Two context variables at instance depth 2 blow past the axiom
    // instantiation bound; the guard refuses rather than thrash.
    assert_eq!(code(&out), 4);
}

#[test]
fn derive_underivable_goal_is_inconclusive() {
    let out = aal(&[
        "derive",
        "--sig",
        &fixture("min.sig"),
        "--rules",
        &fixture("cpc.rules"),
        "--phi",
        "q",
        "--budget",
        "1",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("verdict: unknown"));
}

#[test]
fn free_algebra_boolean_carrier_sizes() {
    for (vars, size) in [("p", "carrier size 4"), ("p,q", "carrier size 16"), ("", "carrier size 2")] {
        let out = aal(&[
            "free-algebra",
            "--sig",
            &fixture("bool.sig"),
            "--class",
            &fixture("b2.alg"),
            "--vars",
            vars,
        ]);
        assert_eq!(code(&out), 0, "vars {vars:?}");
        assert!(stdout(&out).contains(size), "vars {vars:?}");
    }
}

#[test]
fn free_algebra_tables_cover_every_operation_row() {
    let out = aal(&[
        "free-algebra",
        "--sig",
        &fixture("bool.sig"),
        "--class",
        &fixture("b2.alg"),
        "--vars",
        "",
        "--tables",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    // Two elements: 4 rows per binary op, 2 unary, 1 per constant.
    assert_eq!(text.matches("op and(").count(), 4);
    assert_eq!(text.matches("op not(").count(), 2);
    assert_eq!(text.matches("op top(").count(), 1);
}

#[test]
fn free_algebra_cache_replays_byte_identically() {
    let dir = tempfile::tempdir().expect("tempdir");
    let args = [
        "free-algebra",
        "--sig",
        &fixture("bool.sig"),
        "--class",
        &fixture("b2.alg"),
        &fixture("h3.alg"),
        "--vars",
        "p,q",
    ];
    let first = aal_with_env(&args, "AAL_CACHE_DIR", dir.path());
    let second = aal_with_env(&args, "AAL_CACHE_DIR", dir.path());
    assert_eq!(code(&first), 0);
    assert_eq!(code(&second), 0);
    assert_eq!(first.stdout, second.stdout);
    assert!(stdout(&first).contains("carrier size 162"));
    let cached = std::fs::read_dir(dir.path()).expect("readable").count();
    assert_eq!(cached, 1);
}

#[test]
fn lt_identifies_classical_implication_with_its_disjunctive_form() {
    let out = aal(&[
        "lt",
        "--sig",
        &fixture("bool.sig"),
        "--class",
        &fixture("b2.alg"),
        "--lhs",
        "(imp p q)",
        "--rhs",
        "(or (not p) q)",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: yes"));
}

#[test]
fn lt_separates_distinct_generators() {
    let out = aal(&[
        "lt",
        "--sig",
        &fixture("bool.sig"),
        "--class",
        &fixture("b2.alg"),
        "--lhs",
        "p",
        "--rhs",
        "q",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("verdict: no"));
}

#[test]
fn lt_separates_heyting_double_negation() {
    let out = aal(&[
        "lt",
        "--sig",
        &fixture("bool.sig"),
        "--class",
        &fixture("b2.alg"),
        &fixture("h3.alg"),
        "--lhs",
        "(not (not p))",
        "--rhs",
        "p",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn theories_over_the_conjunction_universe() {
    let out = aal(&[
        "theories",
        "--sig",
        &fixture("bool.sig"),
        "--matrices",
        &fixture("b2.alg"),
        "--designated",
        "1",
        "--universe",
        "p,q,(and p q)",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("closed theories 4"));
    assert!(text.contains("close {p,q} -> {p,q,(and p q)}"));
    assert!(text.contains("cover {p} < {p,q,(and p q)}"));
}

#[test]
fn theories_empty_universe_is_the_one_point_lattice() {
    let out = aal(&[
        "theories",
        "--sig",
        &fixture("bool.sig"),
        "--matrices",
        &fixture("b2.alg"),
        "--designated",
        "1",
        "--universe",
        "",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("closed theories 1"));
}

#[test]
fn theories_refuses_an_oversized_universe() {
    let out = aal(&[
        "theories",
        "--sig",
        &fixture("bool.sig"),
        "--matrices",
        &fixture("b2.alg"),
        "--designated",
        "1",
        "--universe",
        "p,q,(and p q)",
        "--guard-universe",
        "2",
    ]);
    assert_eq!(code(&out), 4);
}

#[test]
fn theories_accepts_a_rule_engine() {
    let out = aal(&[
        "theories",
        "--sig",
        &fixture("min.sig"),
        "--rules",
        &fixture("cpc.rules"),
        "--universe",
        "p,(imp p p)",
        "--budget",
        "1",
        "--depth",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("closed theories"));
}

#[test]
fn factorize_reports_the_middle_object_and_composite() {
    let out = aal(&[
        "factorize",
        "--source",
        &fixture("diamond.lat"),
        "--target",
        &fixture("chain3.lat"),
        "--map",
        "bot:bot,a:mid,b:mid,top:mid",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("middle size 2"));
    assert!(text.contains("inclusion injective true"));
    assert!(text.contains("composite equals map true"));
    assert!(text.contains("duality pass true"));
}

#[test]
fn factorize_rejects_a_non_join_preserving_map() {
    let out = aal(&[
        "factorize",
        "--source",
        &fixture("diamond.lat"),
        "--target",
        &fixture("chain3.lat"),
        "--map",
        "bot:bot,a:mid,b:mid,top:top",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("verdict: error"));
}

#[test]
fn factorize_rejects_an_incomplete_map() {
    let out = aal(&[
        "factorize",
        "--source",
        &fixture("diamond.lat"),
        "--target",
        &fixture("chain3.lat"),
        "--map",
        "bot:bot,top:top",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_lemmas_single_suite_passes() {
    let out = aal(&["check-lemmas", "--only", "bijection"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("bijection: pass"));
    assert!(text.contains("verdict: pass"));
}

#[test]
fn check_lemmas_accepts_a_smaller_exhaustive_bound() {
    let out = aal(&["check-lemmas", "--only", "bijection", "--max-elems", "3"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("bijection: pass"));
}

#[test]
fn check_lemmas_unknown_name_lists_the_valid_ones() {
    let out = aal(&["check-lemmas", "--only", "nonsense"]);
    assert_eq!(code(&out), 2);
    let text = stdout(&out);
    assert!(text.contains("unknown lemma"));
    assert!(text.contains("monad-laws"));
    assert!(text.contains("quotient-iso"));
}

#[test]
fn check_lemmas_requires_a_selection() {
    let out = aal(&["check-lemmas"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn class_commands_require_the_class_flag() {
    for args in [
        vec!["free-algebra", "--sig", &fixture("bool.sig"), "--vars", "p"],
        vec!["lt", "--sig", &fixture("bool.sig"), "--lhs", "p", "--rhs", "p"],
        vec![
            "algebraise",
            "--sig",
            &fixture("bool.sig"),
            "--matrices",
            &fixture("b2.alg"),
            "--designated",
            "1",
            "--translations",
            &fixture("cpc.trans"),
        ],
    ] {
        let out = aal(&args);
        assert_eq!(code(&out), 2, "missing --class must be a usage error: {args:?}");
    }
}

#[test]
fn algebraise_boolean_translation_passes() {
    let out = aal(&[
        "algebraise",
        "--sig",
        &fixture("bool.sig"),
        "--matrices",
        &fixture("b2.alg"),
        "--designated",
        "1",
        "--class",
        &fixture("b2.alg"),
        "--translations",
        &fixture("cpc.trans"),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("verdict: pass"));
}

#[test]
fn algebraise_projection_delta_fails_with_a_counterexample() {
    let out = aal(&[
        "algebraise",
        "--sig",
        &fixture("bool.sig"),
        "--matrices",
        &fixture("b2.alg"),
        "--designated",
        "1",
        "--class",
        &fixture("b2.alg"),
        "--translations",
        &fixture("broken.trans"),
    ]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("inversion counterexample:"));
    assert!(text.contains("verdict: fail"));
}

#[test]
fn algebraise_starved_rule_engine_is_inconclusive() {
    let out = aal(&[
        "algebraise",
        "--sig",
        &fixture("min.sig"),
        "--rules",
        &fixture("cpc.rules"),
        "--class",
        &fixture("b2min.alg"),
        "--translations",
        &fixture("cpcmin.trans"),
        "--budget",
        "1",
        "--ctx",
        "1",
        "--pairs",
        "6",
    ]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("verdict: inconclusive"));
}

#[test]
fn lattice_iso_finds_the_relabeling() {
    let out = aal(&[
        "lattice-iso",
        "--a",
        &fixture("diamond.lat"),
        "--b",
        &fixture("square.lat"),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("isomorphic DIAMOND ~ SQUARE"));
    assert!(text.contains("map bot -> o"));
}

#[test]
fn lattice_iso_separates_different_shapes() {
    let out = aal(&[
        "lattice-iso",
        "--a",
        &fixture("diamond.lat"),
        "--b",
        &fixture("chain3.lat"),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("not isomorphic"));
}

#[test]
fn json_report_is_written_and_parses() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("report.json");
    let out = aal(&[
        "entail",
        "--sig",
        &fixture("bool.sig"),
        "--class",
        &fixture("b2.alg"),
        "--eq",
        "p ~ p",
        "--json",
        path.to_str().expect("utf8 path"),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&path).expect("report file");
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert_eq!(value["verdict"], "yes");
    assert_eq!(value["config"]["depth"], 2);
    assert!(value["command"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn json_report_is_written_on_errors_too() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("report.json");
    let out = aal(&[
        "term",
        "--sig",
        &fixture("bool.sig"),
        "(and p",
        "--json",
        path.to_str().expect("utf8 path"),
    ]);
    assert_eq!(code(&out), 2);
    let text = std::fs::read_to_string(&path).expect("report file");
    let value: serde_json::Value = serde_json::from_str(&text).expect("valid json");
    assert_eq!(value["verdict"], "error");
}
