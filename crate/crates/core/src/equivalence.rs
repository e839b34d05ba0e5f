//! Template translations between formula-side and equation-side
//! consequence, the representation and inversion checks that certify an
//! algebraisation candidate, and the construction of translation pairs from
//! an isomorphism of quotients of free suplattices.

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{
    enumerate_evaluations, evaluate, semantic_consequence, AlgebraClass, AlgebraError,
};
use crate::consequence::{ConsequenceError, Entails, Verdict};
use crate::suplattice::{
    iso_search, lift_through_surjection, FreeSupLattice, LatticeError, QuotientFin, SupMorphism,
    ISO_SEARCH_BOUND,
};
use crate::term::{
    parse_equation, parse_term, subst_equation, substitute, Equation, Signature, Term, TermError,
    TermSubstitution, VarContext,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivalenceError {
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Consequence(#[from] ConsequenceError),
    #[error("a translation needs at least one template")]
    EmptyTemplates,
    #[error("quotient source is not the given free suplattice")]
    NotOverFree,
}

/// The one-hole schematic context `{_}` for formula-to-equation templates.
pub fn hole_ctx() -> VarContext {
    VarContext::from_names(&["_"])
}

/// The two-hole schematic context `{_1, _2}` for equation-to-formula
/// templates.
pub fn hole2_ctx() -> VarContext {
    VarContext::from_names(&["_1", "_2"])
}

/// Formula-to-equation translation: a finite nonempty set of equation
/// templates over the one-hole context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationFmlToEq {
    templates: Vec<Equation>,
}

impl TranslationFmlToEq {
    pub fn new(sig: &Signature, templates: Vec<Equation>) -> Result<TranslationFmlToEq, EquivalenceError> {
        if templates.is_empty() {
            return Err(EquivalenceError::EmptyTemplates);
        }
        let ctx = hole_ctx();
        for eq in &templates {
            crate::term::check_term(sig, &ctx, &eq.lhs)?;
            crate::term::check_term(sig, &ctx, &eq.rhs)?;
        }
        Ok(TranslationFmlToEq { templates })
    }

    pub fn templates(&self) -> &[Equation] {
        &self.templates
    }
}

/// Equation-to-formula translation: a finite nonempty set of term templates
/// over the two-hole context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationEqToFml {
    templates: Vec<Term>,
}

impl TranslationEqToFml {
    pub fn new(sig: &Signature, templates: Vec<Term>) -> Result<TranslationEqToFml, EquivalenceError> {
        if templates.is_empty() {
            return Err(EquivalenceError::EmptyTemplates);
        }
        let ctx = hole2_ctx();
        for t in &templates {
            crate::term::check_term(sig, &ctx, t)?;
        }
        Ok(TranslationEqToFml { templates })
    }

    pub fn templates(&self) -> &[Term] {
        &self.templates
    }
}

/// Translate a set of formulas to the union of instantiated equation
/// templates, deduplicated in canonical order.
pub fn apply_tau(
    tau: &TranslationFmlToEq,
    ctx: &VarContext,
    gamma: &[Term],
) -> Result<Vec<Equation>, EquivalenceError> {
    let mut out: Vec<Equation> = Vec::new();
    for phi in gamma {
        let sigma = TermSubstitution::new(hole_ctx(), ctx.clone(), vec![phi.clone()])?;
        for template in &tau.templates {
            let eq = subst_equation(template, &sigma)?;
            if !out.contains(&eq) {
                out.push(eq);
            }
        }
    }
    Ok(out)
}

/// Translate a set of equations to the union of instantiated term
/// templates, the left side filling `_1` and the right side `_2`.
pub fn apply_delta(
    delta: &TranslationEqToFml,
    ctx: &VarContext,
    eqs: &[Equation],
) -> Result<Vec<Term>, EquivalenceError> {
    let mut out: Vec<Term> = Vec::new();
    for eq in eqs {
        let sigma = TermSubstitution::new(
            hole2_ctx(),
            ctx.clone(),
            vec![eq.lhs.clone(), eq.rhs.clone()],
        )?;
        for template in &delta.templates {
            let t = substitute(template, &sigma)?;
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    Ok(out)
}

/// Contents of a translation file: a `tau:` line, a `delta:` line, or both.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TranslationFile {
    pub tau: Option<TranslationFmlToEq>,
    pub delta: Option<TranslationEqToFml>,
}

/// Parse a translation file.
///
/// Grammar: `tau: <TERM> ~ <TERM> (";" <TERM> ~ <TERM>)*` with hole token
/// `_`, and `delta: <TERM> (";" <TERM>)*` with hole tokens `_1`, `_2`.
pub fn parse_translations(src: &str, sig: &Signature) -> Result<TranslationFile, EquivalenceError> {
    let mut out = TranslationFile::default();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = crate::term::strip_comment(raw);
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (kind, body) = trimmed.split_once(':').ok_or_else(|| EquivalenceError::File {
            line,
            message: "expected `tau:` or `delta:`".into(),
        })?;
        match kind.trim() {
            "tau" => {
                let ctx = hole_ctx();
                let mut templates = Vec::new();
                for part in body.split(';') {
                    let eq = parse_equation(sig, &ctx, part).map_err(|e| EquivalenceError::File {
                        line,
                        message: e.to_string(),
                    })?;
                    templates.push(eq);
                }
                out.tau = Some(TranslationFmlToEq::new(sig, templates)?);
            }
            "delta" => {
                let ctx = hole2_ctx();
                let mut templates = Vec::new();
                for part in body.split(';') {
                    let t = parse_term(sig, &ctx, part).map_err(|e| EquivalenceError::File {
                        line,
                        message: e.to_string(),
                    })?;
                    templates.push(t);
                }
                out.delta = Some(TranslationEqToFml::new(sig, templates)?);
            }
            other => {
                return Err(EquivalenceError::File {
                    line,
                    message: format!("unexpected directive {other:?}"),
                });
            }
        }
    }
    Ok(out)
}

/// Outcome of one side of an algebraisation check over a finite domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub checked: usize,
    pub holds: usize,
    pub skipped_unknown: usize,
    pub counterexamples: Vec<String>,
    pub empty_domain: bool,
}

impl CheckReport {
    fn new() -> CheckReport {
        CheckReport {
            checked: 0,
            holds: 0,
            skipped_unknown: 0,
            counterexamples: Vec::new(),
            empty_domain: false,
        }
    }

    /// Pass means no counterexample; an empty domain passes vacuously but
    /// keeps its warning flag.
    pub fn pass(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn conclusive(&self) -> bool {
        self.skipped_unknown == 0
    }
}

fn show_terms(ts: &[Term]) -> String {
    let inner: Vec<String> = ts.iter().map(crate::term::print_term).collect();
    format!("{{{}}}", inner.join(", "))
}

fn show_equations(eqs: &[Equation]) -> String {
    let inner: Vec<String> = eqs.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

/// An evaluation into a class member at which every premise equation holds
/// but the conclusion fails, formatted for a counterexample message.
fn equation_witness(
    k: &AlgebraClass,
    ctx: &VarContext,
    premises: &[Equation],
    conclusion: &Equation,
) -> Result<Option<String>, EquivalenceError> {
    for member in k.members() {
        for e in enumerate_evaluations(member, ctx) {
            let mut premises_hold = true;
            for eq in premises {
                if evaluate(&eq.lhs, member, &e)? != evaluate(&eq.rhs, member, &e)? {
                    premises_hold = false;
                    break;
                }
            }
            if !premises_hold {
                continue;
            }
            if evaluate(&conclusion.lhs, member, &e)? != evaluate(&conclusion.rhs, member, &e)? {
                let assignment: Vec<String> = ctx
                    .vars()
                    .iter()
                    .map(|v| {
                        let value = e.value_of(v).expect("evaluation covers its context");
                        format!("{v}={}", member.carrier()[value])
                    })
                    .collect();
                return Ok(Some(format!("{{{}}} in {}", assignment.join(", "), member.name())));
            }
        }
    }
    Ok(None)
}

/// Check the representation biconditional on a finite domain of formula
/// queries: `Γ ⊢ Δ` iff the translated equations entail each other over the
/// class. Unknown verdicts of the formula engine skip the point.
pub fn representation_check(
    engine: &impl Entails,
    k: &AlgebraClass,
    tau: &TranslationFmlToEq,
    domain: &[(VarContext, Vec<Term>, Vec<Term>)],
    eval_bound: usize,
) -> Result<CheckReport, EquivalenceError> {
    let mut report = CheckReport::new();
    report.empty_domain = domain.is_empty();
    for (ctx, gamma, delta) in domain {
        report.checked += 1;
        let formula_side = match engine.entails(ctx, gamma, delta)? {
            Verdict::Yes => true,
            Verdict::No => false,
            Verdict::Unknown => {
                report.skipped_unknown += 1;
                continue;
            }
        };
        let tau_gamma = apply_tau(tau, ctx, gamma)?;
        let tau_delta = apply_tau(tau, ctx, delta)?;
        let equation_side = semantic_consequence(k, ctx, &tau_gamma, &tau_delta, eval_bound)?;
        if formula_side == equation_side {
            report.holds += 1;
        } else {
            report.counterexamples.push(format!(
                "{} |- {}: formula side {}, equation side {}",
                show_terms(gamma),
                show_terms(delta),
                if formula_side { "yes" } else { "no" },
                if equation_side { "yes" } else { "no" },
            ));
        }
    }
    Ok(report)
}

/// The mirrored representation check on equation queries: `E ⊨_K F` iff the
/// translated formulas entail each other in the formula engine.
pub fn representation_check_eq(
    engine: &impl Entails,
    k: &AlgebraClass,
    delta: &TranslationEqToFml,
    domain: &[(VarContext, Vec<Equation>, Vec<Equation>)],
    eval_bound: usize,
) -> Result<CheckReport, EquivalenceError> {
    let mut report = CheckReport::new();
    report.empty_domain = domain.is_empty();
    for (ctx, e_side, f_side) in domain {
        report.checked += 1;
        let equation_side = semantic_consequence(k, ctx, e_side, f_side, eval_bound)?;
        let delta_e = apply_delta(delta, ctx, e_side)?;
        let delta_f = apply_delta(delta, ctx, f_side)?;
        let formula_side = match engine.entails(ctx, &delta_e, &delta_f)? {
            Verdict::Yes => true,
            Verdict::No => false,
            Verdict::Unknown => {
                report.skipped_unknown += 1;
                continue;
            }
        };
        if formula_side == equation_side {
            report.holds += 1;
        } else {
            report.counterexamples.push(format!(
                "{} |= {}: equation side {}, formula side {}",
                show_equations(e_side),
                show_equations(f_side),
                if equation_side { "yes" } else { "no" },
                if formula_side { "yes" } else { "no" },
            ));
        }
    }
    Ok(report)
}

/// Check mutual entailment between each sampled equation and its round trip
/// through the translations: `z =||=_K τ(δ(z))`.
pub fn inversion_check(
    k: &AlgebraClass,
    tau: &TranslationFmlToEq,
    delta: &TranslationEqToFml,
    domain: &[(VarContext, Equation)],
    eval_bound: usize,
) -> Result<CheckReport, EquivalenceError> {
    let mut report = CheckReport::new();
    report.empty_domain = domain.is_empty();
    for (ctx, z) in domain {
        report.checked += 1;
        let round_trip = apply_tau(tau, ctx, &apply_delta(delta, ctx, std::slice::from_ref(z))?)?;
        let z_slice = std::slice::from_ref(z);
        let forward = semantic_consequence(k, ctx, z_slice, &round_trip, eval_bound)?;
        let backward = semantic_consequence(k, ctx, &round_trip, z_slice, eval_bound)?;
        if forward && backward {
            report.holds += 1;
            continue;
        }
        let witness = if !forward {
            equation_witness(k, ctx, z_slice, &round_trip[0])?
                .map(|w| format!(" at {w}"))
                .unwrap_or_default()
        } else {
            equation_witness(k, ctx, &round_trip, z)?
                .map(|w| format!(" at {w}"))
                .unwrap_or_default()
        };
        report.counterexamples.push(format!(
            "({z}) vs {}: {} fails{witness}",
            show_equations(&round_trip),
            if !forward { "forward entailment" } else { "backward entailment" },
        ));
    }
    Ok(report)
}

/// The mirrored inversion on the formula side: `φ ⊣⊢ δ(τ(φ))` through the
/// formula engine.
pub fn inversion_check_fml(
    engine: &impl Entails,
    tau: &TranslationFmlToEq,
    delta: &TranslationEqToFml,
    domain: &[(VarContext, Term)],
) -> Result<CheckReport, EquivalenceError> {
    let mut report = CheckReport::new();
    report.empty_domain = domain.is_empty();
    for (ctx, phi) in domain {
        report.checked += 1;
        let round_trip = apply_delta(delta, ctx, &apply_tau(tau, ctx, std::slice::from_ref(phi))?)?;
        let phi_slice = std::slice::from_ref(phi);
        let forward = engine.entails(ctx, phi_slice, &round_trip)?;
        let backward = engine.entails(ctx, &round_trip, phi_slice)?;
        if forward == Verdict::Unknown || backward == Verdict::Unknown {
            report.skipped_unknown += 1;
            continue;
        }
        if forward == Verdict::Yes && backward == Verdict::Yes {
            report.holds += 1;
        } else {
            report.counterexamples.push(format!(
                "{} vs {}: {} entailment refuted",
                crate::term::print_term(phi),
                show_terms(&round_trip),
                if forward != Verdict::Yes { "forward" } else { "backward" },
            ));
        }
    }
    Ok(report)
}

/// Aggregated verdict of an algebraisation candidate over its sampled
/// domains. Passing means both checks hold everywhere; unknown formula
/// verdicts anywhere make the verdict inconclusive rather than a pass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceVerdict {
    pub representation: CheckReport,
    pub inversion: CheckReport,
    pub domain: String,
    pub eval_bound: usize,
}

impl EquivalenceVerdict {
    pub fn pass(&self) -> bool {
        self.representation.pass() && self.inversion.pass() && self.conclusive()
    }

    pub fn fail(&self) -> bool {
        !self.representation.pass() || !self.inversion.pass()
    }

    pub fn conclusive(&self) -> bool {
        self.representation.conclusive() && self.inversion.conclusive()
    }
}

/// Run the representation and inversion checks and aggregate them.
pub fn algebraisation_check(
    engine: &impl Entails,
    k: &AlgebraClass,
    tau: &TranslationFmlToEq,
    delta: &TranslationEqToFml,
    formula_domain: &[(VarContext, Vec<Term>, Vec<Term>)],
    equation_domain: &[(VarContext, Equation)],
    eval_bound: usize,
) -> Result<EquivalenceVerdict, EquivalenceError> {
    let representation = representation_check(engine, k, tau, formula_domain, eval_bound)?;
    let inversion = inversion_check(k, tau, delta, equation_domain, eval_bound)?;
    Ok(EquivalenceVerdict {
        representation,
        inversion,
        domain: format!(
            "{} formula queries, {} equations",
            formula_domain.len(),
            equation_domain.len()
        ),
        eval_bound,
    })
}

/// A translation pair constructed from an isomorphism of quotients, with
/// the isomorphism itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationPair {
    pub tau: SupMorphism,
    pub delta: SupMorphism,
    pub rho: SupMorphism,
}

/// Search for an isomorphism between the targets of two quotients of free
/// suplattices; on success, lift along it to a translation pair satisfying
/// `τ;q2 = q1;ρ`, `δ;q1 = q2;ρ⁻¹`, and `δ;τ;q2 = q2` exactly. A `None` is a
/// definitive negative: no isomorphism exists.
pub fn equivalence_via_quotient_iso(
    free1: &FreeSupLattice,
    q1: &QuotientFin,
    free2: &FreeSupLattice,
    q2: &QuotientFin,
) -> Result<Option<TranslationPair>, EquivalenceError> {
    if q1.source() != free1.lattice() || q2.source() != free2.lattice() {
        return Err(EquivalenceError::NotOverFree);
    }
    let Some(iso) = iso_search(q1.target(), q2.target(), ISO_SEARCH_BOUND)? else {
        return Ok(None);
    };
    let mut inverse = vec![0usize; iso.len()];
    for (i, &j) in iso.iter().enumerate() {
        inverse[j] = i;
    }
    let rho = SupMorphism::new(q1.target().clone(), q2.target().clone(), iso)?;
    let rho_inv = SupMorphism::new(q2.target().clone(), q1.target().clone(), inverse)?;
    let tau = lift_through_surjection(&q1.morphism().then(&rho)?, free1, q2)?;
    let delta = lift_through_surjection(&q2.morphism().then(&rho_inv)?, free2, q1)?;
    let tau_q2 = tau.then(q2.morphism())?;
    assert_eq!(tau_q2, q1.morphism().then(&rho)?, "lift of q1;rho lost the defining equality");
    assert_eq!(
        delta.then(q1.morphism())?,
        q2.morphism().then(&rho_inv)?,
        "lift of q2;rho inverse lost the defining equality"
    );
    assert_eq!(
        delta.then(&tau_q2)?,
        *q2.morphism(),
        "round trip through both translations moved the quotient"
    );
    Ok(Some(TranslationPair { tau, delta, rho }))
}
