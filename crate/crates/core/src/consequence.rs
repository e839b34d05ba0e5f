//! Formula-side consequence engines over a shared three-valued verdict:
//! budgeted forward chaining over rule systems, and designated-value
//! preservation over classes of logical matrices. Also builds the lattice
//! of closed theories on a finite universe of formulas, bridging to the
//! suplattice module.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{enumerate_evaluations, evaluate, AlgebraError, FiniteAlgebra};
use crate::suplattice::{free_suplattice, ClosureOperator, FreeSupLattice, LatticeError};
use crate::term::{
    enumerate_terms, substitute, Signature, Term, TermError, TermSubstitution, VarContext,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConsequenceError {
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("no algebra named {0:?} was provided")]
    UnknownAlgebra(String),
    #[error("matrix on {0:?} has an empty designated set")]
    EmptyDesignated(String),
    #[error("{what} is {size}, above the bound {bound}; lower the instance depth or raise the bound")]
    InstanceGuard { what: String, size: usize, bound: usize },
    #[error("theories closure is not idempotent under the current budget ({detail}); increase the derivation budget")]
    ClosureNotIdempotent { detail: String },
}

/// Three-valued answer of a consequence engine. Matrix engines never return
/// `Unknown`; budgeted rule engines never return `No`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}

/// An inference rule: finitely many premises and a conclusion over a
/// schematic context whose variables stand for arbitrary formulas.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub ctx: VarContext,
    pub premises: Vec<Term>,
    pub conclusion: Term,
}

/// A named set of rules and axiom schemes over one signature. Axioms are
/// zero-premise rules kept separately so extensions can append to them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSystem {
    pub sig: Signature,
    pub rules: Vec<Rule>,
    pub axioms: Vec<Rule>,
}

/// Bounds for forward chaining: how many rounds to run, how deep the terms
/// substituted for unconstrained schematic variables may be, and a ceiling
/// that caps both the axiom-instantiation sweep and the derived set itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeriveBudget {
    pub derivation_depth: usize,
    pub instance_depth: usize,
    pub instance_bound: usize,
}

pub const DERIVE_INSTANCE_BOUND: usize = 200_000;

impl Default for DeriveBudget {
    fn default() -> DeriveBudget {
        DeriveBudget {
            derivation_depth: 4,
            instance_depth: 2,
            instance_bound: DERIVE_INSTANCE_BOUND,
        }
    }
}

/// Parse a rules file over a signature.
///
/// Grammar: `rule <IDENT>: <TERM> ("," <TERM>)* => <TERM>` and
/// `axiom <IDENT>: <TERM>` lines. Identifiers in the terms that are not
/// operations become schematic variables, in order of first occurrence
/// across the premises and then the conclusion.
pub fn parse_rules(src: &str, sig: &Signature) -> Result<RuleSystem, ConsequenceError> {
    let mut rules = Vec::new();
    let mut axioms = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = crate::term::strip_comment(raw);
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        let (kind, rest) = match trimmed.split_once(char::is_whitespace) {
            Some((k, r)) if k == "rule" || k == "axiom" => (k, r),
            _ => {
                return Err(ConsequenceError::File {
                    line,
                    message: "expected a `rule` or `axiom` line".into(),
                });
            }
        };
        let (name, body) = rest.split_once(':').ok_or_else(|| ConsequenceError::File {
            line,
            message: "expected `<IDENT>:` after the keyword".into(),
        })?;
        let name = name.trim();
        if !crate::term::is_ident(name) {
            return Err(ConsequenceError::File {
                line,
                message: format!("invalid rule name {name:?}"),
            });
        }
        let (premise_srcs, conclusion_src): (Vec<&str>, &str) = if kind == "rule" {
            let (l, r) = body.split_once("=>").ok_or_else(|| ConsequenceError::File {
                line,
                message: "expected `=>` in rule body".into(),
            })?;
            let premises: Vec<&str> =
                l.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            (premises, r.trim())
        } else {
            if body.contains("=>") {
                return Err(ConsequenceError::File {
                    line,
                    message: "axioms have no premises; use `rule` instead".into(),
                });
            }
            (Vec::new(), body.trim())
        };
        // Schematic variables: every identifier that is not an operation,
        // in first-occurrence order.
        let mut vars: Vec<String> = Vec::new();
        for src_part in premise_srcs.iter().chain([&conclusion_src]) {
            for ident in crate::term::scan_idents(src_part) {
                if !sig.is_op(&ident) && !vars.contains(&ident) {
                    vars.push(ident);
                }
            }
        }
        let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
        let ctx = VarContext::from_names(&refs);
        let parse = |s: &str| -> Result<Term, ConsequenceError> {
            crate::term::parse_term(sig, &ctx, s).map_err(|e| ConsequenceError::File {
                line,
                message: e.to_string(),
            })
        };
        let premises: Vec<Term> = premise_srcs.iter().map(|s| parse(s)).collect::<Result<_, _>>()?;
        let conclusion = parse(conclusion_src)?;
        let rule = Rule { name: name.to_string(), ctx, premises, conclusion };
        if kind == "rule" {
            rules.push(rule);
        } else {
            axioms.push(rule);
        }
    }
    Ok(RuleSystem { sig: sig.clone(), rules, axioms })
}

/// An algebra with a nonempty set of designated elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalMatrix {
    alg: FiniteAlgebra,
    designated: Vec<usize>,
}

impl LogicalMatrix {
    pub fn new(alg: FiniteAlgebra, designated: Vec<usize>) -> Result<LogicalMatrix, ConsequenceError> {
        if designated.is_empty() {
            return Err(ConsequenceError::EmptyDesignated(alg.name().to_string()));
        }
        let mut designated = designated;
        designated.sort_unstable();
        designated.dedup();
        if let Some(&bad) = designated.iter().find(|&&d| d >= alg.carrier_len()) {
            return Err(ConsequenceError::File {
                line: 0,
                message: format!("designated element #{bad} outside the carrier of {}", alg.name()),
            });
        }
        Ok(LogicalMatrix { alg, designated })
    }

    pub fn alg(&self) -> &FiniteAlgebra {
        &self.alg
    }

    pub fn designated(&self) -> &[usize] {
        &self.designated
    }

    pub fn is_designated(&self, v: usize) -> bool {
        self.designated.contains(&v)
    }
}

/// Parse a matrices file: `matrix <ALG-IDENT>` headers each followed by one
/// `designated <IDENT>+` line. Algebra names refer to the provided list.
pub fn parse_matrices(
    src: &str,
    available: &[FiniteAlgebra],
) -> Result<Vec<LogicalMatrix>, ConsequenceError> {
    let mut out = Vec::new();
    let mut pending: Option<(usize, FiniteAlgebra)> = None;
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = crate::term::strip_comment(raw);
        let mut words = text.split_whitespace();
        let Some(head) = words.next() else { continue };
        match head {
            "matrix" => {
                if let Some((l, _)) = pending {
                    return Err(ConsequenceError::File {
                        line: l,
                        message: "matrix header without a designated line".into(),
                    });
                }
                let name = words.next().ok_or_else(|| ConsequenceError::File {
                    line,
                    message: "expected `matrix <ALG-IDENT>`".into(),
                })?;
                let alg = available
                    .iter()
                    .find(|a| a.name() == name)
                    .ok_or_else(|| ConsequenceError::UnknownAlgebra(name.to_string()))?;
                pending = Some((line, alg.clone()));
            }
            "designated" => {
                let (_, alg) = pending.take().ok_or_else(|| ConsequenceError::File {
                    line,
                    message: "designated line without a preceding matrix header".into(),
                })?;
                let mut designated = Vec::new();
                for w in words {
                    let i = alg.element_index(w).ok_or_else(|| ConsequenceError::File {
                        line,
                        message: format!("unknown carrier element {w:?} in {}", alg.name()),
                    })?;
                    designated.push(i);
                }
                out.push(LogicalMatrix::new(alg, designated)?);
            }
            other => {
                return Err(ConsequenceError::File {
                    line,
                    message: format!("unexpected directive {other:?}"),
                });
            }
        }
    }
    if let Some((l, _)) = pending {
        return Err(ConsequenceError::File {
            line: l,
            message: "matrix header without a designated line".into(),
        });
    }
    Ok(out)
}

/// Designated-value preservation over a class of matrices: every evaluation
/// that designates all of `gamma` designates all of `delta`. Decided by
/// full enumeration with the same per-member guard as equational
/// consequence.
pub fn matrix_entails(
    matrices: &[LogicalMatrix],
    ctx: &VarContext,
    gamma: &[Term],
    delta: &[Term],
    eval_bound: usize,
) -> Result<bool, ConsequenceError> {
    for m in matrices {
        let count = m.alg().carrier_len().checked_pow(ctx.len() as u32);
        match count {
            Some(c) if c <= eval_bound => {}
            _ => {
                return Err(ConsequenceError::Algebra(AlgebraError::SizeGuard {
                    what: format!("evaluations of {} into {}", ctx.len(), m.alg().name()),
                    size: count.unwrap_or(usize::MAX),
                    bound: eval_bound,
                }))
            }
        }
        for e in enumerate_evaluations(m.alg(), ctx) {
            let mut premises_hold = true;
            for g in gamma {
                if !m.is_designated(evaluate(g, m.alg(), &e)?) {
                    premises_hold = false;
                    break;
                }
            }
            if !premises_hold {
                continue;
            }
            for d in delta {
                if !m.is_designated(evaluate(d, m.alg(), &e)?) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// One-way matching of a schematic pattern against a concrete term,
/// extending `binding` and recording new keys on `trail` so the caller can
/// roll back a failed branch.
fn match_pattern(
    pattern: &Term,
    value: &Term,
    binding: &mut std::collections::BTreeMap<String, Term>,
    trail: &mut Vec<String>,
) -> bool {
    match pattern {
        Term::Var(v) => match binding.get(v) {
            Some(bound) => bound == value,
            None => {
                binding.insert(v.clone(), value.clone());
                trail.push(v.clone());
                true
            }
        },
        Term::App(op, args) => match value {
            Term::App(vop, vargs) if vop == op && vargs.len() == args.len() => {
                args.iter().zip(vargs).all(|(p, v)| match_pattern(p, v, binding, trail))
            }
            _ => false,
        },
    }
}

/// Apply a partial binding; `None` when the term mentions an unbound
/// schematic variable.
fn apply_binding(
    t: &Term,
    binding: &std::collections::BTreeMap<String, Term>,
) -> Option<Term> {
    match t {
        Term::Var(v) => binding.get(v).cloned(),
        Term::App(op, args) => {
            let mapped: Option<Vec<Term>> =
                args.iter().map(|a| apply_binding(a, binding)).collect();
            Some(Term::App(op.clone(), mapped?))
        }
    }
}

/// Backtracking search over the reordered premises; calls `emit` once per
/// complete binding. Ground premises are decided by set lookup, open ones
/// by scanning the derived set.
fn match_premises(
    premises: &[&Term],
    derived: &BTreeSet<Term>,
    binding: &mut std::collections::BTreeMap<String, Term>,
    trail: &mut Vec<String>,
    emit: &mut dyn FnMut(&std::collections::BTreeMap<String, Term>),
) {
    let Some((first, rest)) = premises.split_first() else {
        emit(binding);
        return;
    };
    if let Some(ground) = apply_binding(first, binding) {
        if derived.contains(&ground) {
            match_premises(rest, derived, binding, trail, emit);
        }
        return;
    }
    for candidate in derived {
        let mark = trail.len();
        if match_pattern(first, candidate, binding, trail) {
            match_premises(rest, derived, binding, trail, emit);
        }
        for key in trail.drain(mark..) {
            binding.remove(&key);
        }
    }
}

/// Everything derivable from `gamma` by forward chaining within the budget.
///
/// Round 0 is `gamma` itself. Each later round sweeps every axiom over all
/// substitutions whose images are terms over `ctx` of depth at most the
/// instance depth (so axiom instances arrive in round 1), and matches the
/// premises of every rule against the formulas already derived, which may
/// bind schematic variables to arbitrarily deep formulas. Conclusion
/// variables left unbound by the premises fall back to the bounded image
/// enumeration.
pub fn derive_set(
    system: &RuleSystem,
    ctx: &VarContext,
    gamma: &[Term],
    budget: &DeriveBudget,
) -> Result<BTreeSet<Term>, ConsequenceError> {
    let images = enumerate_terms(&system.sig, ctx, budget.instance_depth);
    let mut axiom_total = 0usize;
    for axiom in &system.axioms {
        let count = images.len().checked_pow(axiom.ctx.len() as u32);
        axiom_total = count
            .and_then(|c| axiom_total.checked_add(c))
            .unwrap_or(usize::MAX);
    }
    if axiom_total > budget.instance_bound {
        return Err(ConsequenceError::InstanceGuard {
            what: "axiom instances per round".into(),
            size: axiom_total,
            bound: budget.instance_bound,
        });
    }
    let mut derived: BTreeSet<Term> = gamma.iter().cloned().collect();
    for _round in 0..budget.derivation_depth {
        let mut added: Vec<Term> = Vec::new();
        for axiom in &system.axioms {
            let k = axiom.ctx.len();
            if k > 0 && images.is_empty() {
                continue;
            }
            let mut slots = vec![0usize; k];
            loop {
                let chosen: Vec<Term> = slots.iter().map(|&s| images[s].clone()).collect();
                let sigma = TermSubstitution::new(axiom.ctx.clone(), ctx.clone(), chosen)?;
                let conclusion = substitute(&axiom.conclusion, &sigma)?;
                if !derived.contains(&conclusion) {
                    added.push(conclusion);
                }
                let mut j = k;
                loop {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                    slots[j] += 1;
                    if slots[j] < images.len() {
                        break;
                    }
                    slots[j] = 0;
                }
                if k == 0 || (j == 0 && slots[0] == 0) {
                    break;
                }
            }
        }
        for rule in &system.rules {
            // Structured premises first so bare variables become ground
            // lookups instead of full scans.
            let mut ordered: Vec<&Term> = rule.premises.iter().collect();
            ordered.sort_by_key(|p| matches!(p, Term::Var(_)));
            let mut binding = std::collections::BTreeMap::new();
            let mut trail = Vec::new();
            let mut failure: Option<ConsequenceError> = None;
            match_premises(&ordered, &derived, &mut binding, &mut trail, &mut |b| {
                if failure.is_some() {
                    return;
                }
                match apply_binding(&rule.conclusion, b) {
                    Some(conclusion) => {
                        if !derived.contains(&conclusion) {
                            added.push(conclusion);
                        }
                    }
                    None => {
                        // Conclusion-only variables: enumerate bounded images.
                        let free: Vec<String> = rule
                            .ctx
                            .vars()
                            .iter()
                            .filter(|v| !b.contains_key(*v))
                            .cloned()
                            .collect();
                        let mut extended = b.clone();
                        let mut slots = vec![0usize; free.len()];
                        if images.is_empty() {
                            return;
                        }
                        loop {
                            for (v, &s) in free.iter().zip(&slots) {
                                extended.insert(v.clone(), images[s].clone());
                            }
                            match apply_binding(&rule.conclusion, &extended) {
                                Some(conclusion) => {
                                    if !derived.contains(&conclusion) {
                                        added.push(conclusion);
                                    }
                                }
                                None => {
                                    failure = Some(ConsequenceError::File {
                                        line: 0,
                                        message: format!(
                                            "rule {} mentions a variable outside its schematic context",
                                            rule.name
                                        ),
                                    });
                                    return;
                                }
                            }
                            let mut j = free.len();
                            loop {
                                if j == 0 {
                                    break;
                                }
                                j -= 1;
                                slots[j] += 1;
                                if slots[j] < images.len() {
                                    break;
                                }
                                slots[j] = 0;
                            }
                            if free.is_empty() || (j == 0 && slots[0] == 0) {
                                break;
                            }
                        }
                    }
                }
            });
            if let Some(err) = failure {
                return Err(err);
            }
        }
        let before = derived.len();
        derived.extend(added);
        if derived.len() > budget.instance_bound {
            return Err(ConsequenceError::InstanceGuard {
                what: "derived formulas".into(),
                size: derived.len(),
                bound: budget.instance_bound,
            });
        }
        if derived.len() == before {
            break;
        }
    }
    Ok(derived)
}

/// Whether `phi` is reachable from `gamma` within the budget: `Yes` when the
/// forward-chaining closure contains it, `Unknown` otherwise. Never a
/// definitive `No`.
pub fn derive(
    system: &RuleSystem,
    ctx: &VarContext,
    gamma: &[Term],
    phi: &Term,
    budget: &DeriveBudget,
) -> Result<Verdict, ConsequenceError> {
    if gamma.contains(phi) {
        return Ok(Verdict::Yes);
    }
    let derived = derive_set(system, ctx, gamma, budget)?;
    Ok(if derived.contains(phi) { Verdict::Yes } else { Verdict::Unknown })
}

/// Anything that answers set-to-set consequence queries. Set-to-set is
/// always the conjunction of the set-to-singleton queries.
pub trait Entails {
    fn entails(
        &self,
        ctx: &VarContext,
        gamma: &[Term],
        delta: &[Term],
    ) -> Result<Verdict, ConsequenceError>;
}

/// A consequence engine: either a rule system with a derivation budget or a
/// class of logical matrices with an evaluation guard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConsequenceEngine {
    Rules { system: RuleSystem, budget: DeriveBudget },
    Matrices { matrices: Vec<LogicalMatrix>, eval_bound: usize },
}

impl ConsequenceEngine {
    pub fn from_rules(system: RuleSystem, budget: DeriveBudget) -> ConsequenceEngine {
        ConsequenceEngine::Rules { system, budget }
    }

    pub fn from_matrices(matrices: Vec<LogicalMatrix>, eval_bound: usize) -> ConsequenceEngine {
        ConsequenceEngine::Matrices { matrices, eval_bound }
    }
}

impl Entails for ConsequenceEngine {
    fn entails(
        &self,
        ctx: &VarContext,
        gamma: &[Term],
        delta: &[Term],
    ) -> Result<Verdict, ConsequenceError> {
        match self {
            ConsequenceEngine::Matrices { matrices, eval_bound } => {
                let mut yes = true;
                for d in delta {
                    if !matrix_entails(matrices, ctx, gamma, std::slice::from_ref(d), *eval_bound)? {
                        yes = false;
                        break;
                    }
                }
                Ok(if yes { Verdict::Yes } else { Verdict::No })
            }
            ConsequenceEngine::Rules { system, budget } => {
                let derived = derive_set(system, ctx, gamma, budget)?;
                let all = delta.iter().all(|d| derived.contains(d));
                Ok(if all { Verdict::Yes } else { Verdict::Unknown })
            }
        }
    }
}

/// Extend an engine by an axiom scheme over a schematic context.
///
/// Rule engines gain the scheme as a zero-premise rule. Matrix engines keep
/// exactly the matrices validating the scheme; validity under every
/// substitution instance is equivalent to validity under every evaluation
/// of the schematic variables, since instance evaluations factor through
/// them, so the check enumerates schematic evaluations only.
pub fn axiom_extension(
    engine: &ConsequenceEngine,
    scheme_ctx: &VarContext,
    scheme: &Term,
) -> Result<ConsequenceEngine, ConsequenceError> {
    match engine {
        ConsequenceEngine::Rules { system, budget } => {
            let mut system = system.clone();
            let name = format!("ext{}", system.axioms.len());
            system.axioms.push(Rule {
                name,
                ctx: scheme_ctx.clone(),
                premises: Vec::new(),
                conclusion: scheme.clone(),
            });
            Ok(ConsequenceEngine::Rules { system, budget: *budget })
        }
        ConsequenceEngine::Matrices { matrices, eval_bound } => {
            let mut kept = Vec::new();
            for m in matrices {
                let mut valid = true;
                for e in enumerate_evaluations(m.alg(), scheme_ctx) {
                    if !m.is_designated(evaluate(scheme, m.alg(), &e)?) {
                        valid = false;
                        break;
                    }
                }
                if valid {
                    kept.push(m.clone());
                }
            }
            Ok(ConsequenceEngine::Matrices { matrices: kept, eval_bound: *eval_bound })
        }
    }
}

/// Outcome of a structurality sweep: how often a `Yes` was preserved under
/// renaming, and any definitive counterexamples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructuralityReport {
    pub queries: usize,
    pub yes_queries: usize,
    pub preserved: usize,
    pub unknown_after_renaming: usize,
    pub failures: Vec<String>,
}

impl StructuralityReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every renaming between the two contexts and every sampled pair of
/// formula sets with a `Yes` verdict, the renamed query must not flip to a
/// definitive `No`.
pub fn structurality_test(
    engine: &impl Entails,
    source: &VarContext,
    target: &VarContext,
    samples: &[(Vec<Term>, Vec<Term>)],
) -> Result<StructuralityReport, ConsequenceError> {
    let mut report = StructuralityReport {
        queries: 0,
        yes_queries: 0,
        preserved: 0,
        unknown_after_renaming: 0,
        failures: Vec::new(),
    };
    for f in crate::term::enumerate_renamings(source, target) {
        for (gamma, delta) in samples {
            report.queries += 1;
            if engine.entails(source, gamma, delta)? != Verdict::Yes {
                continue;
            }
            report.yes_queries += 1;
            let gamma_f: Vec<Term> =
                gamma.iter().map(|t| crate::term::rename(t, &f)).collect::<Result<_, _>>()?;
            let delta_f: Vec<Term> =
                delta.iter().map(|t| crate::term::rename(t, &f)).collect::<Result<_, _>>()?;
            match engine.entails(target, &gamma_f, &delta_f)? {
                Verdict::Yes => report.preserved += 1,
                Verdict::Unknown => report.unknown_after_renaming += 1,
                Verdict::No => {
                    let show = |ts: &[Term]| {
                        ts.iter().map(crate::term::print_term).collect::<Vec<_>>().join(", ")
                    };
                    report.failures.push(format!(
                        "{{{}}} |- {{{}}} holds but the renamed query {{{}}} |- {{{}}} is refuted",
                        show(gamma),
                        show(delta),
                        show(&gamma_f),
                        show(&delta_f)
                    ));
                }
            }
        }
    }
    Ok(report)
}

/// Materialize the lattice of theories over a finite universe of formulas:
/// the free suplattice on the universe together with the closure sending a
/// subset to the universe members it entails.
///
/// Budgeted rule engines can produce a non-idempotent candidate closure;
/// that is reported as an explicit error rather than silently accepted.
pub fn theories_lattice(
    engine: &impl Entails,
    ctx: &VarContext,
    universe: &[Term],
) -> Result<(FreeSupLattice, ClosureOperator), ConsequenceError> {
    let labels: Vec<String> = universe.iter().map(crate::term::print_term).collect();
    let free = free_suplattice(&labels)?;
    let n = free.lattice().len();
    let mut map = Vec::with_capacity(n);
    for subset in 0..n {
        let gamma: Vec<Term> = universe
            .iter()
            .enumerate()
            .filter(|(i, _)| subset >> i & 1 == 1)
            .map(|(_, t)| t.clone())
            .collect();
        let mut closed = 0usize;
        for (i, phi) in universe.iter().enumerate() {
            if engine.entails(ctx, &gamma, std::slice::from_ref(phi))? == Verdict::Yes {
                closed |= 1 << i;
            }
        }
        map.push(closed);
    }
    let closure = ClosureOperator::new(free.lattice().clone(), map).map_err(|err| {
        ConsequenceError::ClosureNotIdempotent { detail: err.to_string() }
    })?;
    Ok((free, closure))
}
