//! Run configuration and report structures shared by the lemma suites and
//! the command-line front end. The machine-readable form must be byte-stable
//! across runs with the same inputs, so wall-clock timing stays out of the
//! serialized tree and is rendered separately for humans.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub depth: usize,
    pub ctx: usize,
    pub set_size: usize,
    pub budget: usize,
    pub guard_evals: usize,
    pub guard_product: usize,
    pub guard_iso: usize,
    pub guard_universe: usize,
    pub max_elems: usize,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            seed: 0,
            depth: 2,
            ctx: 2,
            set_size: 2,
            budget: 4,
            guard_evals: crate::algebra::EVALUATION_BOUND,
            guard_product: crate::algebra::PRODUCT_BOUND,
            guard_iso: crate::suplattice::ISO_SEARCH_BOUND,
            guard_universe: crate::suplattice::FREE_GENERATOR_BOUND,
            max_elems: 4,
            parallel: false,
        }
    }
}

/// Result of one lemma suite: a verdict, the number of covered instances
/// (counted, not necessarily enumerated one by one), and a short
/// deterministic description of what was checked.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub name: String,
    pub pass: bool,
    pub instances: u128,
    pub detail: String,
}

impl LemmaReport {
    pub fn new(name: &str, pass: bool, instances: u128, detail: impl Into<String>) -> LemmaReport {
        LemmaReport { name: name.to_string(), pass, instances, detail: detail.into() }
    }
}

/// One run's full report: the command echo, the effective configuration,
/// an overall verdict, human-oriented detail lines, and any lemma results.
/// Everything serialized is deterministic for fixed inputs and seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub config: RunConfig,
    pub verdict: String,
    pub lines: Vec<String>,
    pub lemmas: Vec<LemmaReport>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

impl Report {
    pub fn new(command: Vec<String>, config: RunConfig) -> Report {
        Report {
            command,
            config,
            verdict: String::new(),
            lines: Vec::new(),
            lemmas: Vec::new(),
            elapsed_ms: 0,
        }
    }

    pub fn push_line(&mut self, line: impl Into<String>) {
        self.lines.push(line.into());
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    /// Render the human view of the same tree.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        for line in &self.lines {
            out.push_str(line);
            out.push('\n');
        }
        for lemma in &self.lemmas {
            out.push_str(&format!(
                "{}: {} ({} instances) {}\n",
                lemma.name,
                if lemma.pass { "pass" } else { "FAIL" },
                lemma.instances,
                lemma.detail,
            ));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_matches_the_documented_bounds() {
        let c = RunConfig::default();
        assert_eq!(c.seed, 0);
        assert_eq!(c.depth, 2);
        assert_eq!(c.ctx, 2);
        assert_eq!(c.set_size, 2);
        assert_eq!(c.budget, 4);
        assert_eq!(c.guard_evals, 4096);
        assert_eq!(c.guard_product, 20000);
        assert_eq!(c.guard_iso, 12);
        assert_eq!(c.guard_universe, 12);
        assert_eq!(c.max_elems, 4);
    }

    #[test]
    fn json_form_is_stable_and_omits_timing() {
        let mut report = Report::new(vec!["check-lemmas".into()], RunConfig::default());
        report.verdict = "pass".into();
        report.push_line("hello");
        report.lemmas.push(LemmaReport::new("bijection", true, 42, "round trips"));
        report.elapsed_ms = 1234;
        let a = report.to_json();
        report.elapsed_ms = 9999;
        let b = report.to_json();
        assert_eq!(a, b);
        assert!(!a.contains("elapsed"));
        assert!(a.contains("\"bijection\""));
        assert!(report.render_human().contains("verdict: pass"));
    }

    #[test]
    fn instance_counts_beyond_u64_serialize_and_round_trip() {
        let big: u128 = 39_217_354_250_604_714_579_238_272_309_342;
        let mut report = Report::new(vec!["check-lemmas".into()], RunConfig::default());
        report.lemmas.push(LemmaReport::new("structurality", true, big, "mask classes"));
        let json = report.to_json();
        assert!(json.contains("39217354250604714579238272309342"));
        let back: Report = serde_json::from_str(&json).expect("round trip");
        assert_eq!(back.lemmas[0].instances, big);
    }
}
