//! Lemma certification suites.
//!
//! Each suite exercises one executable claim end to end and returns a
//! [`LemmaReport`] with a deterministic instance count. Exhaustive suites
//! whose raw instance spaces are astronomically large factor terms into
//! evaluation classes, verify every class pair exactly, count the covered
//! instances with multiplicity, and cross-check class representatives
//! through the same public deciders the CLI exposes. Randomised suites draw
//! from a seeded generator, so identical configs replay identical samples.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{
    enumerate_evaluations, evaluate, free_algebra, lt_equal, renaming_compat_check,
    semantic_consequence, three_element_heyting, two_element_boolean, AlgebraClass, AlgebraError,
    Evaluation, FiniteAlgebra,
};
use crate::consequence::{ConsequenceEngine, ConsequenceError, Entails, LogicalMatrix, Verdict};
use crate::equivalence::{
    apply_tau, equivalence_via_quotient_iso, hole2_ctx, hole_ctx, inversion_check,
    EquivalenceError, TranslationEqToFml, TranslationFmlToEq,
};
use crate::report::{LemmaReport, RunConfig};
use crate::suplattice::{
    closure_to_consequence, closure_to_quotient, consequence_to_closure,
    enumerate_closure_operators, enumerate_consequence_relations, enumerate_sup_morphisms,
    enumerate_suplattices, free_extension, free_suplattice, image_factorization, iso_search,
    lift_through_surjection, quotient_to_closure, quotients_equal, random_closure_operator,
    random_sup_morphism, random_suplattice, right_adjoint, surjectivity_duality_check,
    FiniteSupLattice, LatticeError, QuotientFin,
};
use crate::term::{
    enumerate_renamings, enumerate_terms, parse_term, print_term, rename_equation, substitute,
    Equation, Signature, Term, TermError, TermSubstitution, VarContext,
};

/// Sample size for the randomised suites.
pub const RANDOM_SAMPLES: usize = 500;

/// Element bound for randomly drawn suplattices.
pub const RANDOM_MAX_ELEMS: usize = 6;

/// Registry of suite names, in the order `run_all` executes them.
pub const LEMMA_NAMES: [&str; 10] = [
    "monad-laws",
    "evaluation",
    "bijection",
    "adjoints",
    "factorization",
    "structurality",
    "lindenbaum-tarski",
    "algebraisation",
    "lifting",
    "quotient-iso",
];

/// Run one suite by name; `None` for names outside the registry.
pub fn run_lemma(name: &str, config: &RunConfig) -> Option<LemmaReport> {
    let suite: fn(&RunConfig) -> LemmaReport = match name {
        "monad-laws" => lemma_monad_laws,
        "evaluation" => lemma_evaluation,
        "bijection" => lemma_bijection,
        "adjoints" => lemma_adjoints,
        "factorization" => lemma_factorization,
        "structurality" => lemma_structurality,
        "lindenbaum-tarski" => lemma_lindenbaum_tarski,
        "algebraisation" => lemma_algebraisation,
        "lifting" => lemma_lifting,
        "quotient-iso" => lemma_quotient_iso,
        _ => return None,
    };
    Some(suite(config))
}

/// Run every registered suite.
pub fn run_all(config: &RunConfig) -> Vec<LemmaReport> {
    LEMMA_NAMES
        .iter()
        .map(|name| run_lemma(name, config).expect("registry names resolve"))
        .collect()
}

#[derive(Debug, Error)]
enum CheckError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Consequence(#[from] ConsequenceError),
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
}

fn aborted(name: &str, err: &CheckError) -> LemmaReport {
    LemmaReport::new(name, false, 0, format!("aborted: {err}"))
}

/// Instance bookkeeping shared by the suites: total covered instances plus
/// the first few failure messages, with failures counted past the cap.
struct Tally {
    instances: u128,
    failed: u64,
    first_failures: Vec<String>,
}

impl Tally {
    fn new() -> Tally {
        Tally { instances: 0, failed: 0, first_failures: Vec::new() }
    }

    fn ok(&mut self, weight: u128) {
        self.instances += weight;
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.first_failures.len() < 5 {
            self.first_failures.push(msg);
        }
    }

    fn report(self, name: &str, detail: String) -> LemmaReport {
        let detail = if self.failed == 0 {
            detail
        } else {
            format!("{detail}; {} failed: {}", self.failed, self.first_failures.join(" | "))
        };
        LemmaReport::new(name, self.failed == 0, self.instances, detail)
    }
}

fn pool_ctx(names: [&str; 2], n: usize) -> VarContext {
    VarContext::from_names(&names[..n])
}

// ------------------------------------------------------------- substitution

fn monad_signature() -> Signature {
    Signature::new("SUBST", vec![("not".into(), 1), ("and".into(), 2), ("top".into(), 0)])
        .expect("fixed signature is well formed")
}

/// Every substitution from `source` whose images are drawn from `images`.
fn substitutions(
    source: &VarContext,
    target: &VarContext,
    images: &[Term],
) -> Vec<TermSubstitution> {
    let k = source.vars().len();
    if k > 0 && images.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; k];
    loop {
        let picked: Vec<Term> = idx.iter().map(|&i| images[i].clone()).collect();
        out.push(
            TermSubstitution::new(source.clone(), target.clone(), picked)
                .expect("enumerated images are well formed"),
        );
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < images.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Does `u[rho] == w`, compared structurally without building `u[rho]`?
fn subst_matches(u: &Term, rho: &TermSubstitution, w: &Term) -> bool {
    match u {
        Term::Var(y) => rho.apply_var(y).map(|img| img == w).unwrap_or(false),
        Term::App(op, args) => match w {
            Term::App(wop, wargs) if wop == op && wargs.len() == args.len() => {
                args.iter().zip(wargs.iter()).all(|(a, b)| subst_matches(a, rho, b))
            }
            _ => false,
        },
    }
}

/// Does `u[rho] == t[both]` where `u == t[sigma]` and `both == sigma;rho`?
/// Walks `t` and `u` in lockstep so neither side is materialised.
fn composite_matches(t: &Term, u: &Term, rho: &TermSubstitution, both: &TermSubstitution) -> bool {
    match (t, u) {
        (Term::Var(x), _) => both.apply_var(x).map(|w| subst_matches(u, rho, w)).unwrap_or(false),
        (Term::App(op, args), Term::App(uop, uargs))
            if op == uop && args.len() == uargs.len() =>
        {
            args.iter().zip(uargs.iter()).all(|(a, ua)| composite_matches(a, ua, rho, both))
        }
        _ => false,
    }
}

/// Substitution is a monad on terms: the unit substitution extends to the
/// identity, extending a substitution agrees with its images on variables,
/// and sequencing extensions agrees with extending the composite.
pub fn lemma_monad_laws(config: &RunConfig) -> LemmaReport {
    monad_laws(config).unwrap_or_else(|e| aborted("monad-laws", &e))
}

fn monad_laws(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let sig = monad_signature();
    let image_depth = config.depth.saturating_sub(1);
    let mut tally = Tally::new();
    let mut units: u128 = 0;
    let mut assoc: u128 = 0;

    for nx in 0..=config.ctx.min(2) {
        let xs = pool_ctx(["x1", "x2"], nx);
        let terms = enumerate_terms(&sig, &xs, config.depth);

        let unit = TermSubstitution::unit(&xs);
        for t in &terms {
            if &substitute(t, &unit)? == t {
                tally.ok(1);
                units += 1;
            } else {
                tally.fail(format!("unit extension moved {}", print_term(t)));
            }
        }

        for ny in 0..=config.ctx.min(2) {
            let ys = pool_ctx(["y1", "y2"], ny);
            let y_images = enumerate_terms(&sig, &ys, image_depth);
            let sigmas = substitutions(&xs, &ys, &y_images);

            for s in &sigmas {
                for x in xs.vars() {
                    if &substitute(&Term::Var(x.clone()), s)? == s.apply_var(x)? {
                        tally.ok(1);
                        units += 1;
                    } else {
                        tally.fail(format!("extension disagrees with image on {x}"));
                    }
                }
            }

            for nz in 0..=config.ctx.min(2) {
                let zs = pool_ctx(["z1", "z2"], nz);
                let z_images = enumerate_terms(&sig, &zs, image_depth);
                let rhos = substitutions(&ys, &zs, &z_images);
                if sigmas.is_empty() || rhos.is_empty() {
                    continue;
                }

                for s in &sigmas {
                    let mut composed: Vec<TermSubstitution> = Vec::with_capacity(rhos.len());
                    for r in &rhos {
                        composed.push(s.then(r)?);
                    }
                    for t in &terms {
                        let u = substitute(t, s)?;
                        for (ri, r) in rhos.iter().enumerate() {
                            if composite_matches(t, &u, r, &composed[ri]) {
                                tally.ok(1);
                                assoc += 1;
                            } else {
                                tally.fail(format!(
                                    "sequencing disagreed with the composite on {}",
                                    print_term(t)
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(tally.report("monad-laws", format!("{units} unit and {assoc} sequencing instances")))
}

// --------------------------------------------------------------- evaluation

/// Evaluating a renamed term equals evaluating the original under the
/// pulled-back assignment, exhaustively over renamings and evaluations.
pub fn lemma_evaluation(config: &RunConfig) -> LemmaReport {
    evaluation_suite(config).unwrap_or_else(|e| aborted("evaluation", &e))
}

fn evaluation_suite(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let b2 = two_element_boolean();
    let sig = b2.signature().clone();
    let mut tally = Tally::new();
    let mut renamings = 0usize;

    for nx in 0..=config.ctx.min(2) {
        let xs = pool_ctx(["p", "q"], nx);
        let terms = enumerate_terms(&sig, &xs, config.depth);
        for ny in 0..=config.ctx.min(2) {
            let ys = pool_ctx(["r", "s"], ny);
            for f in enumerate_renamings(&xs, &ys) {
                renamings += 1;
                for e in enumerate_evaluations(&b2, &ys) {
                    let report = renaming_compat_check(&b2, &f, &e, &terms)?;
                    tally.ok(report.checked as u128);
                    for msg in report.failures {
                        tally.fail(msg);
                    }
                }
            }
        }
    }
    Ok(tally.report("evaluation", format!("{renamings} renamings across context pairs")))
}

// ---------------------------------------------------------------- bijection

/// Closure operators, finitary consequence relations, and quotients on one
/// suplattice are the same data: every round trip is the identity on the
/// exhaustive census.
pub fn lemma_bijection(config: &RunConfig) -> LemmaReport {
    bijection_suite(config).unwrap_or_else(|e| aborted("bijection", &e))
}

fn bijection_suite(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let mut tally = Tally::new();
    let max = config.max_elems.min(5);
    let census_sizes = [1usize, 1, 1, 2, 5];

    let mut lattices: Vec<FiniteSupLattice> = Vec::new();
    for n in 1..=max {
        let batch = enumerate_suplattices(n);
        if batch.len() != census_sizes[n - 1] {
            tally.fail(format!(
                "census of size {n} has {} lattices, expected {}",
                batch.len(),
                census_sizes[n - 1]
            ));
        }
        lattices.extend(batch);
    }

    let mut closure_total = 0usize;
    let mut relation_total = 0usize;
    let mut surjection_total = 0usize;
    for p in &lattices {
        let closures = enumerate_closure_operators(p);
        closure_total += closures.len();
        for j in &closures {
            let via_relation = consequence_to_closure(&closure_to_consequence(j));
            if &via_relation == j {
                tally.ok(1);
            } else {
                tally.fail(format!("closure round trip through consequence broke on size {}", p.len()));
            }
            let via_quotient = quotient_to_closure(&closure_to_quotient(j));
            if &via_quotient == j {
                tally.ok(1);
            } else {
                tally.fail(format!("closure round trip through quotient broke on size {}", p.len()));
            }
        }
        if p.len() <= 4 {
            let relations = enumerate_consequence_relations(p);
            relation_total += relations.len();
            if relations.len() != closures.len() {
                tally.fail(format!(
                    "size {}: {} relations vs {} closure operators",
                    p.len(),
                    relations.len(),
                    closures.len()
                ));
            }
            for c in &relations {
                if &closure_to_consequence(&consequence_to_closure(c)) == c {
                    tally.ok(1);
                } else {
                    tally.fail(format!("relation round trip broke on size {}", p.len()));
                }
            }
        }
        for t in &lattices {
            if t.len() > p.len() {
                continue;
            }
            for m in enumerate_sup_morphisms(p, t) {
                if !m.is_surjective() {
                    continue;
                }
                surjection_total += 1;
                let q = QuotientFin::new(m)?;
                let back = closure_to_quotient(&quotient_to_closure(&q));
                if quotients_equal(&q, &back) {
                    tally.ok(1);
                } else {
                    tally.fail(format!("quotient round trip broke on size {}", p.len()));
                }
            }
        }
    }
    Ok(tally.report(
        "bijection",
        format!(
            "{} lattices, {closure_total} closure operators, {relation_total} consequence relations, {surjection_total} surjective quotients",
            lattices.len()
        ),
    ))
}

// ----------------------------------------------------------------- adjoints

/// Right adjoints of random join-preserving maps: the adjunction
/// biconditional holds pointwise and surjectivity/injectivity dualise.
pub fn lemma_adjoints(config: &RunConfig) -> LemmaReport {
    adjoints_suite(config).unwrap_or_else(|e| aborted("adjoints", &e))
}

fn adjoints_suite(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tally = Tally::new();

    for i in 0..RANDOM_SAMPLES {
        let p = random_suplattice(&mut rng, RANDOM_MAX_ELEMS);
        let q = random_suplattice(&mut rng, RANDOM_MAX_ELEMS);
        let f = random_sup_morphism(&mut rng, &p, &q);
        let duality = surjectivity_duality_check(&f);
        if !duality.pass() {
            tally.fail(format!("duality report failed on sample {i}"));
            continue;
        }
        let g = right_adjoint(&f);
        let mut adjoint_ok = true;
        for x in 0..p.len() {
            for y in 0..q.len() {
                if q.leq(f.apply(x), y) != p.leq(x, g.apply(y)) {
                    adjoint_ok = false;
                }
            }
        }
        if adjoint_ok {
            tally.ok(1);
        } else {
            tally.fail(format!("adjunction biconditional failed on sample {i}"));
        }
    }
    Ok(tally.report(
        "adjoints",
        format!("{RANDOM_SAMPLES} random morphisms up to {RANDOM_MAX_ELEMS} elements"),
    ))
}

// ------------------------------------------------------------ factorization

/// Surjection-injection factorisation of random join-preserving maps: the
/// composite restores the map and the middle object is the image with its
/// induced order.
pub fn lemma_factorization(config: &RunConfig) -> LemmaReport {
    factorization_suite(config).unwrap_or_else(|e| aborted("factorization", &e))
}

fn factorization_suite(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tally = Tally::new();

    for i in 0..RANDOM_SAMPLES {
        let p = random_suplattice(&mut rng, RANDOM_MAX_ELEMS);
        let q = random_suplattice(&mut rng, RANDOM_MAX_ELEMS);
        let f = random_sup_morphism(&mut rng, &p, &q);
        let fact = image_factorization(&f);
        let composite = fact.quotient.morphism().then(&fact.inclusion)?;
        if composite.map() != f.map() {
            tally.fail(format!("factor composite differs from the map on sample {i}"));
            continue;
        }
        if !fact.inclusion.is_injective() {
            tally.fail(format!("inclusion leg is not injective on sample {i}"));
            continue;
        }
        let mut image: Vec<usize> = (0..p.len()).map(|x| f.apply(x)).collect();
        image.sort_unstable();
        image.dedup();
        let labels: Vec<String> = image.iter().map(|&y| q.label(y).to_string()).collect();
        let image_lattice = FiniteSupLattice::new(labels, |a, b| q.leq(image[a], image[b]))?;
        match iso_search(fact.quotient.target(), &image_lattice, config.guard_iso)? {
            Some(_) => tally.ok(1),
            None => tally.fail(format!("middle object is not the image on sample {i}")),
        }
    }
    Ok(tally.report(
        "factorization",
        format!("{RANDOM_SAMPLES} random morphisms up to {RANDOM_MAX_ELEMS} elements"),
    ))
}

// ------------------------------------------------------------ structurality

/// Bits of a term's value over an enumerated evaluation list; requires a
/// two-element carrier so the bit is the value itself.
fn value_bits(
    alg: &FiniteAlgebra,
    evals: &[Evaluation],
    t: &Term,
) -> Result<usize, AlgebraError> {
    debug_assert!(alg.carrier_len() == 2 && evals.len() < usize::BITS as usize);
    let mut bits = 0usize;
    for (i, e) in evals.iter().enumerate() {
        if evaluate(t, alg, e)? == 1 {
            bits |= 1 << i;
        }
    }
    Ok(bits)
}

/// Counts and representatives for finite sets (up to size two) drawn from
/// mask-classified items, keyed by intersected mask. The empty set sits at
/// the full mask.
fn subset_classes<T: Clone>(
    count: &[u128],
    rep: &[Option<T>],
    set_size: usize,
    full: usize,
) -> (Vec<u128>, Vec<Option<Vec<T>>>) {
    let n = count.len();
    let mut set_count = vec![0u128; n];
    let mut set_rep: Vec<Option<Vec<T>>> = vec![None; n];
    set_count[full] += 1;
    set_rep[full] = Some(Vec::new());
    if set_size >= 1 {
        for m in 0..n {
            if count[m] == 0 {
                continue;
            }
            set_count[m] += count[m];
            if set_rep[m].is_none() {
                set_rep[m] =
                    Some(vec![rep[m].clone().expect("counted classes carry representatives")]);
            }
        }
    }
    if set_size >= 2 {
        for m1 in 0..n {
            if count[m1] == 0 {
                continue;
            }
            set_count[m1] += count[m1] * (count[m1] - 1) / 2;
            for m2 in m1 + 1..n {
                if count[m2] == 0 {
                    continue;
                }
                let m = m1 & m2;
                set_count[m] += count[m1] * count[m2];
                if set_rep[m].is_none() {
                    set_rep[m] = Some(vec![
                        rep[m1].clone().expect("counted classes carry representatives"),
                        rep[m2].clone().expect("counted classes carry representatives"),
                    ]);
                }
            }
        }
    }
    (set_count, set_rep)
}

/// Equational consequence over the two-element boolean algebra is closed
/// under variable renaming. Equation sets are factored into agreement-mask
/// classes: the verdict of a set pair depends only on mask inclusion, the
/// renamed verdict only on pulled-back masks, so checking all class pairs
/// (with representatives fed through the real decider) covers every set
/// pair, counted with multiplicity.
pub fn lemma_structurality(config: &RunConfig) -> LemmaReport {
    structurality_suite(config).unwrap_or_else(|e| aborted("structurality", &e))
}

fn structurality_suite(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let b2 = two_element_boolean();
    let sig = b2.signature().clone();
    let k = AlgebraClass::new(vec![b2.clone()])?;
    let set_size = config.set_size.min(2);
    let mut tally = Tally::new();
    let mut class_pairs: u64 = 0;

    for nx in 0..=config.ctx.min(2) {
        let xs = pool_ctx(["p", "q"], nx);
        let x_evals = enumerate_evaluations(&b2, &xs);
        let full = (1usize << x_evals.len()) - 1;
        let terms = enumerate_terms(&sig, &xs, config.depth);

        let mut vec_count: BTreeMap<usize, u128> = BTreeMap::new();
        let mut vec_rep: BTreeMap<usize, &Term> = BTreeMap::new();
        for t in &terms {
            let v = value_bits(&b2, &x_evals, t)?;
            *vec_count.entry(v).or_insert(0) += 1;
            vec_rep.entry(v).or_insert(t);
        }

        let mut eq_count = vec![0u128; full + 1];
        let mut eq_rep: Vec<Option<Equation>> = vec![None; full + 1];
        for (&v, &cv) in &vec_count {
            for (&w, &cw) in &vec_count {
                let mask = !(v ^ w) & full;
                eq_count[mask] += cv * cw;
                if eq_rep[mask].is_none() {
                    eq_rep[mask] =
                        Some(Equation::new(vec_rep[&v].clone(), vec_rep[&w].clone()));
                }
            }
        }
        let (set_count, set_rep) = subset_classes(&eq_count, &eq_rep, set_size, full);

        // Tie the mask arithmetic to the decider on every class pair.
        for me in 0..=full {
            if set_count[me] == 0 {
                continue;
            }
            for mf in 0..=full {
                if set_count[mf] == 0 {
                    continue;
                }
                class_pairs += 1;
                let predicted = me & !mf == 0;
                let e_set = set_rep[me].as_ref().expect("counted class");
                let f_set = set_rep[mf].as_ref().expect("counted class");
                let direct = semantic_consequence(&k, &xs, e_set, f_set, config.guard_evals)?;
                if direct != predicted {
                    tally.fail(format!(
                        "class verdict mismatch at context size {nx}, masks {me:#x} vs {mf:#x}"
                    ));
                }
            }
        }

        let x_index: BTreeMap<Vec<usize>, usize> =
            x_evals.iter().enumerate().map(|(i, e)| (e.map().to_vec(), i)).collect();

        for ny in 0..=config.ctx.min(2) {
            let ys = pool_ctx(["r", "s"], ny);
            let y_evals = enumerate_evaluations(&b2, &ys);
            for f in enumerate_renamings(&xs, &ys) {
                let pull: Vec<usize> = y_evals
                    .iter()
                    .map(|e| {
                        let pulled: Vec<usize> = (0..xs.vars().len())
                            .map(|i| e.map()[f.image_indices()[i]])
                            .collect();
                        x_index[&pulled]
                    })
                    .collect();
                let preimage = |m: usize| -> usize {
                    pull.iter()
                        .enumerate()
                        .filter(|(_, &ex)| m >> ex & 1 == 1)
                        .fold(0usize, |acc, (ey, _)| acc | 1 << ey)
                };

                for me in 0..=full {
                    if set_count[me] == 0 {
                        continue;
                    }
                    for mf in 0..=full {
                        if set_count[mf] == 0 {
                            continue;
                        }
                        class_pairs += 1;
                        let renamed_holds = preimage(me) & !preimage(mf) == 0;
                        if me & !mf == 0 {
                            if renamed_holds {
                                tally.ok(set_count[me] * set_count[mf]);
                            } else {
                                tally.fail(format!(
                                    "renaming broke an entailment at context sizes {nx}->{ny}"
                                ));
                            }
                        }
                        let e_set = set_rep[me].as_ref().expect("counted class");
                        let f_set = set_rep[mf].as_ref().expect("counted class");
                        let e_renamed: Vec<Equation> =
                            e_set.iter().map(|eq| rename_equation(eq, &f)).collect::<Result<_, _>>()?;
                        let f_renamed: Vec<Equation> =
                            f_set.iter().map(|eq| rename_equation(eq, &f)).collect::<Result<_, _>>()?;
                        let direct =
                            semantic_consequence(&k, &ys, &e_renamed, &f_renamed, config.guard_evals)?;
                        if direct != renamed_holds {
                            tally.fail(format!(
                                "renamed class verdict mismatch at context sizes {nx}->{ny}"
                            ));
                        }
                    }
                }
            }
        }
    }
    Ok(tally.report(
        "structurality",
        format!("{class_pairs} class pairs tied to the decider; sets up to size {set_size}"),
    ))
}

// -------------------------------------------------------- lindenbaum-tarski

/// Independent recount of the free algebra carrier: close the generator
/// value vectors under pointwise operations until nothing new appears.
fn stabilized_carrier_count(
    members: &[FiniteAlgebra],
    ctx: &VarContext,
) -> Result<usize, CheckError> {
    let mut columns: Vec<(usize, Evaluation)> = Vec::new();
    for (mi, m) in members.iter().enumerate() {
        for e in enumerate_evaluations(m, ctx) {
            columns.push((mi, e));
        }
    }
    let sig = members[0].signature().clone();
    let ops: Vec<(String, usize)> = sig.ops().to_vec();

    let mut elems: Vec<Vec<usize>> = Vec::new();
    let mut index: BTreeSet<Vec<usize>> = BTreeSet::new();
    for v in ctx.vars() {
        let vec: Vec<usize> = columns
            .iter()
            .map(|(_, e)| e.value_of(v).expect("context evaluations cover their variables"))
            .collect();
        if index.insert(vec.clone()) {
            elems.push(vec);
        }
    }
    for (op, arity) in &ops {
        if *arity != 0 {
            continue;
        }
        let mut vec = Vec::with_capacity(columns.len());
        for (mi, _) in &columns {
            vec.push(members[*mi].apply(op, &[])?);
        }
        if index.insert(vec.clone()) {
            elems.push(vec);
        }
    }

    let mut processed = 0usize;
    loop {
        let len = elems.len();
        if processed == len {
            break;
        }
        let start = processed;
        processed = len;
        for (op, arity) in &ops {
            let k = *arity;
            if k == 0 {
                continue;
            }
            let mut idx = vec![0usize; k];
            loop {
                if idx.iter().any(|&i| i >= start) {
                    let mut vec = Vec::with_capacity(columns.len());
                    for (c, (mi, _)) in columns.iter().enumerate() {
                        let args: Vec<usize> = idx.iter().map(|&i| elems[i][c]).collect();
                        vec.push(members[*mi].apply(op, &args)?);
                    }
                    if index.insert(vec.clone()) {
                        elems.push(vec);
                    }
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    idx[pos] += 1;
                    if idx[pos] < len {
                        break;
                    }
                    idx[pos] = 0;
                }
                if idx.iter().all(|&i| i == 0) {
                    break;
                }
            }
        }
    }
    Ok(elems.len())
}

/// The free algebra identifies exactly the semantically equal terms: the
/// map from value vectors to carrier elements is a bijection on the reached
/// fragment, carrier sizes match an independent recount, and `lt_equal`
/// agrees with the validity decider on a direct slice.
pub fn lemma_lindenbaum_tarski(config: &RunConfig) -> LemmaReport {
    lindenbaum_tarski_suite(config).unwrap_or_else(|e| aborted("lindenbaum-tarski", &e))
}

fn lindenbaum_tarski_suite(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let b2 = two_element_boolean();
    let h3 = three_element_heyting();
    let sig = b2.signature().clone();
    let classes: [(&str, Vec<FiniteAlgebra>); 2] = [
        ("boolean", vec![b2.clone()]),
        ("boolean+heyting", vec![b2.clone(), h3.clone()]),
    ];
    let frozen_boolean_sizes = [4usize, 16];
    let mut tally = Tally::new();
    let mut size_log: Vec<String> = Vec::new();

    for (label, members) in &classes {
        let k = AlgebraClass::new(members.clone())?;
        for n in 1..=config.ctx.min(2) {
            let xs = pool_ctx(["p", "q"], n);
            let free = free_algebra(&k, &xs, config.guard_product)?;
            let terms = enumerate_terms(&sig, &xs, config.depth);
            let eval_sets: Vec<(usize, Vec<Evaluation>)> = members
                .iter()
                .enumerate()
                .map(|(mi, m)| (mi, enumerate_evaluations(m, &xs)))
                .collect();

            let mut vec_to_class: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
            let mut class_to_vec: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            let mut partitions_agree = true;
            for t in &terms {
                let mut v: Vec<usize> = Vec::new();
                for (mi, evals) in &eval_sets {
                    for e in evals {
                        v.push(evaluate(t, &members[*mi], e)?);
                    }
                }
                let class = free.lambda(t)?;
                match vec_to_class.get(&v) {
                    Some(&prev) if prev != class => {
                        partitions_agree = false;
                        tally.fail(format!(
                            "equal vectors, distinct classes under {label} at context size {n}"
                        ));
                    }
                    Some(_) => {}
                    None => {
                        vec_to_class.insert(v.clone(), class);
                    }
                }
                match class_to_vec.get(&class) {
                    Some(prev) if prev != &v => {
                        partitions_agree = false;
                        tally.fail(format!(
                            "one class, distinct vectors under {label} at context size {n}"
                        ));
                    }
                    Some(_) => {}
                    None => {
                        class_to_vec.insert(class, v);
                    }
                }
            }
            if partitions_agree {
                tally.ok((terms.len() as u128) * (terms.len() as u128));
            }

            let recount = stabilized_carrier_count(members, &xs)?;
            if free.alg.carrier_len() != recount {
                tally.fail(format!(
                    "carrier {} disagrees with recount {recount} under {label} at context size {n}",
                    free.alg.carrier_len()
                ));
            }
            if members.len() == 1 && free.alg.carrier_len() != frozen_boolean_sizes[n - 1] {
                tally.fail(format!(
                    "boolean carrier at context size {n} is {}, expected {}",
                    free.alg.carrier_len(),
                    frozen_boolean_sizes[n - 1]
                ));
            }
            size_log.push(format!("{label}/{n}:{}", free.alg.carrier_len()));

            for s in terms.iter().take(40) {
                for t in terms.iter().take(40) {
                    let via_free = lt_equal(&free, s, t)?;
                    let eq = Equation::new(s.clone(), t.clone());
                    let via_decider =
                        semantic_consequence(&k, &xs, &[], &[eq], config.guard_evals)?;
                    if via_free == via_decider {
                        tally.ok(1);
                    } else {
                        tally.fail(format!(
                            "lt_equal and the decider split on {} vs {} under {label}",
                            print_term(s),
                            print_term(t)
                        ));
                    }
                }
            }
        }
    }
    Ok(tally.report("lindenbaum-tarski", format!("carriers {}", size_log.join(" "))))
}

// ------------------------------------------------------------ algebraisation

/// Classical propositional consequence is equivalent to boolean equational
/// consequence through the standard translations. Formula sets are factored
/// into designated-mask classes; every class pair runs through both the
/// matrix engine and the equation decider, inversion runs on every
/// vector-class pair of equations, and a projection translation must fail
/// with a printed witness.
pub fn lemma_algebraisation(config: &RunConfig) -> LemmaReport {
    algebraisation_suite(config).unwrap_or_else(|e| aborted("algebraisation", &e))
}

fn algebraisation_suite(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let b2 = two_element_boolean();
    let sig = b2.signature().clone();
    let k = AlgebraClass::new(vec![b2.clone()])?;
    let engine = ConsequenceEngine::from_matrices(
        vec![LogicalMatrix::new(b2.clone(), vec![1])?],
        config.guard_evals,
    );
    let tau = TranslationFmlToEq::new(
        &sig,
        vec![Equation::new(
            parse_term(&sig, &hole_ctx(), "_")?,
            parse_term(&sig, &hole_ctx(), "top")?,
        )],
    )?;
    let delta = TranslationEqToFml::new(
        &sig,
        vec![
            parse_term(&sig, &hole2_ctx(), "(imp _1 _2)")?,
            parse_term(&sig, &hole2_ctx(), "(imp _2 _1)")?,
        ],
    )?;
    let set_size = config.set_size.min(2);
    let mut tally = Tally::new();
    let mut representation_classes: u64 = 0;
    let mut inversion_classes: u64 = 0;

    for n in 0..=config.ctx.min(2) {
        let xs = pool_ctx(["p", "q"], n);
        let evals = enumerate_evaluations(&b2, &xs);
        let full = (1usize << evals.len()) - 1;
        let terms = enumerate_terms(&sig, &xs, config.depth);

        let mut mask_count = vec![0u128; full + 1];
        let mut mask_rep: Vec<Option<Term>> = vec![None; full + 1];
        for t in &terms {
            let m = value_bits(&b2, &evals, t)?;
            mask_count[m] += 1;
            if mask_rep[m].is_none() {
                mask_rep[m] = Some(t.clone());
            }
        }
        let (set_count, set_rep) = subset_classes(&mask_count, &mask_rep, set_size, full);

        for mg in 0..=full {
            if set_count[mg] == 0 {
                continue;
            }
            for md in 0..=full {
                if set_count[md] == 0 {
                    continue;
                }
                representation_classes += 1;
                let predicted = mg & !md == 0;
                let gamma = set_rep[mg].as_ref().expect("counted class");
                let delta_side = set_rep[md].as_ref().expect("counted class");
                let formula_side = match engine.entails(&xs, gamma, delta_side)? {
                    Verdict::Yes => true,
                    Verdict::No => false,
                    Verdict::Unknown => {
                        tally.fail(format!("matrix engine was inconclusive at context size {n}"));
                        continue;
                    }
                };
                let gamma_eqs = apply_tau(&tau, &xs, gamma)?;
                let delta_eqs = apply_tau(&tau, &xs, delta_side)?;
                let equation_side =
                    semantic_consequence(&k, &xs, &gamma_eqs, &delta_eqs, config.guard_evals)?;
                if formula_side == predicted && equation_side == predicted {
                    tally.ok(set_count[mg] * set_count[md]);
                } else {
                    tally.fail(format!(
                        "translation broke a verdict at context size {n}: formula {formula_side}, equations {equation_side}"
                    ));
                }
            }
        }

        for mv in 0..=full {
            if mask_count[mv] == 0 {
                continue;
            }
            for mw in 0..=full {
                if mask_count[mw] == 0 {
                    continue;
                }
                inversion_classes += 1;
                let z = Equation::new(
                    mask_rep[mv].clone().expect("counted class"),
                    mask_rep[mw].clone().expect("counted class"),
                );
                let round = inversion_check(&k, &tau, &delta, &[(xs.clone(), z)], config.guard_evals)?;
                if round.pass() && round.checked == 1 {
                    tally.ok(mask_count[mv] * mask_count[mw]);
                } else {
                    tally.fail(format!("inversion failed on a class pair at context size {n}"));
                }
            }
        }
    }

    // A translation that drops one side of the equation must be refused.
    let projection = TranslationEqToFml::new(&sig, vec![parse_term(&sig, &hole2_ctx(), "_1")?])?;
    let control_ctx = pool_ctx(["p", "q"], 2);
    let control = Equation::new(Term::Var("p".into()), Term::Var("q".into()));
    let round = inversion_check(
        &k,
        &tau,
        &projection,
        &[(control_ctx, control)],
        config.guard_evals,
    )?;
    let control_note = if round.pass() {
        tally.fail("projection control unexpectedly passed".into());
        String::from("projection control unexpectedly passed")
    } else {
        format!(
            "projection control rejected: {}",
            round.counterexamples.first().cloned().unwrap_or_default()
        )
    };

    Ok(tally.report(
        "algebraisation",
        format!(
            "{representation_classes} representation and {inversion_classes} inversion classes; {control_note}"
        ),
    ))
}

// ------------------------------------------------------------------ lifting

/// Morphisms out of a free suplattice into a quotient lift through the
/// quotient map: the lift composed with the quotient restores the original.
pub fn lemma_lifting(config: &RunConfig) -> LemmaReport {
    lifting_suite(config).unwrap_or_else(|e| aborted("lifting", &e))
}

fn lifting_suite(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut tally = Tally::new();

    for i in 0..RANDOM_SAMPLES {
        let gen_count = rng.random_range(1..=3);
        let names: Vec<String> = (0..gen_count).map(|g| format!("t{g}")).collect();
        let free = free_suplattice(&names)?;
        let base = random_suplattice(&mut rng, RANDOM_MAX_ELEMS);
        let j = random_closure_operator(&mut rng, &base);
        let q = closure_to_quotient(&j);
        let images: Vec<usize> =
            (0..gen_count).map(|_| rng.random_range(0..q.target().len())).collect();
        let s = free_extension(&free, &images, q.target())?;
        let lifted = lift_through_surjection(&s, &free, &q)?;
        let composite = lifted.then(q.morphism())?;
        if composite.map() == s.map() {
            tally.ok(1);
        } else {
            tally.fail(format!("lift composed with the quotient missed on sample {i}"));
        }
    }
    Ok(tally.report(
        "lifting",
        format!("{RANDOM_SAMPLES} random liftings through quotients"),
    ))
}

// ------------------------------------------------------------- quotient-iso

/// Two quotients of free suplattices present equivalent structure exactly
/// when their targets are isomorphic: positives come back with verified
/// commuting translations, negatives are definitive.
pub fn lemma_quotient_iso(config: &RunConfig) -> LemmaReport {
    quotient_iso_suite(config).unwrap_or_else(|e| aborted("quotient-iso", &e))
}

fn quotient_iso_suite(config: &RunConfig) -> Result<LemmaReport, CheckError> {
    let names: Vec<String> = vec!["a".into(), "b".into()];
    let free = free_suplattice(&names)?;
    let closures = enumerate_closure_operators(free.lattice());
    let mut tally = Tally::new();
    if closures.len() != 7 {
        tally.fail(format!(
            "expected 7 closure operators on the free square, found {}",
            closures.len()
        ));
    }
    let quotients: Vec<QuotientFin> = closures.iter().map(closure_to_quotient).collect();
    let mut positives = 0usize;
    let mut negatives = 0usize;

    for q1 in &quotients {
        for q2 in &quotients {
            match equivalence_via_quotient_iso(&free, q1, &free, q2)? {
                Some(pair) => {
                    positives += 1;
                    let tau_leg = pair.tau.then(q2.morphism())?;
                    let rho_leg = q1.morphism().then(&pair.rho)?;
                    let delta_leg = pair.delta.then(q1.morphism())?.then(&pair.rho)?;
                    let round = pair.delta.then(&pair.tau)?.then(q2.morphism())?;
                    if tau_leg.map() == rho_leg.map()
                        && delta_leg.map() == q2.morphism().map()
                        && round.map() == q2.morphism().map()
                    {
                        tally.ok(1);
                    } else {
                        tally.fail("translation pair failed its commuting identities".into());
                    }
                }
                None => {
                    negatives += 1;
                    if iso_search(q1.target(), q2.target(), config.guard_iso)?.is_some() {
                        tally.fail("negative verdict despite isomorphic targets".into());
                    } else {
                        tally.ok(1);
                    }
                }
            }
        }
    }
    if positives != 15 || negatives != 34 {
        tally.fail(format!(
            "iso split {positives}+{negatives} differs from the frozen 15+34"
        ));
    }
    Ok(tally.report(
        "quotient-iso",
        format!("{positives} isomorphic and {negatives} non-isomorphic ordered pairs"),
    ))
}
