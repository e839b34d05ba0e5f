//! `aal`: a finite-scale workbench for propositional signatures, logical
//! matrices, suplattices of theories, and translations between formula-side
//! and equation-side consequence.
//!
//! Every command builds one [`Report`]: deterministic detail lines, a
//! verdict string, and the effective configuration. The human view goes to
//! stdout; `--json PATH` additionally writes the machine-readable form,
//! which is byte-stable across runs with the same inputs and seed.
//!
//! Exit codes: 0 pass/yes, 1 fail/no, 2 usage or parse error, 3
//! inconclusive (a budgeted engine could not settle the question), 4 a
//! size guard refused the computation.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use aal_core::algebra::{
    enumerate_evaluations, evaluate, free_algebra, lt_equal, parse_algebra, satisfies,
    semantic_consequence, AlgebraClass, AlgebraError, Evaluation, FiniteAlgebra,
};
use aal_core::checks::{run_lemma, LEMMA_NAMES};
use aal_core::consequence::{
    derive, derive_set, matrix_entails, parse_rules, theories_lattice, ConsequenceEngine,
    ConsequenceError, DeriveBudget, LogicalMatrix, RuleSystem, Verdict,
};
use aal_core::equivalence::{
    algebraisation_check, parse_translations, EquivalenceError, TranslationEqToFml,
    TranslationFmlToEq,
};
use aal_core::report::{Report, RunConfig};
use aal_core::suplattice::{
    image_factorization, iso_search, parse_suplattice, surjectivity_duality_check,
    FiniteSupLattice, LatticeError, SupMorphism,
};
use aal_core::term::{
    infer_context, parse_equation, parse_signature, parse_term, Equation, Signature, Term,
    TermError, VarContext,
};

#[derive(Parser)]
#[command(name = "aal", version, about = "workbench for algebraic logic at finite scale")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Seed for every randomized sample
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Term depth bound for enumerations and derivation instances
    #[arg(long, global = true, default_value_t = 2)]
    depth: usize,
    /// Context size bound for lemma suites
    #[arg(long, global = true, default_value_t = 2)]
    ctx: usize,
    /// Premise and conclusion set size bound for lemma suites
    #[arg(long, global = true, default_value_t = 2)]
    set_size: usize,
    /// Derivation depth for rule engines
    #[arg(long, global = true, default_value_t = 4)]
    budget: usize,
    /// Refuse to enumerate more evaluations than this
    #[arg(long, global = true, default_value_t = 4096)]
    guard_evals: usize,
    /// Refuse to build a free algebra beyond this carrier product
    #[arg(long, global = true, default_value_t = 20000)]
    guard_product: usize,
    /// Refuse isomorphism search above this lattice size
    #[arg(long, global = true, default_value_t = 12)]
    guard_iso: usize,
    /// Refuse theory universes larger than this
    #[arg(long, global = true, default_value_t = 12)]
    guard_universe: usize,
    /// Also write the machine-readable report here
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
}

impl GlobalOpts {
    fn config(&self) -> RunConfig {
        RunConfig {
            seed: self.seed,
            depth: self.depth,
            ctx: self.ctx,
            set_size: self.set_size,
            budget: self.budget,
            guard_evals: self.guard_evals,
            guard_product: self.guard_product,
            guard_iso: self.guard_iso,
            guard_universe: self.guard_universe,
            ..RunConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse a signature file and list its operations
    CheckSig(CheckSigArgs),
    /// Parse a term and print its canonical form, depth, and context
    Term(TermArgs),
    /// Decide entailment against matrices or an equational class
    Entail(EntailArgs),
    /// Search for a derivation in a Hilbert-style rule system
    Derive(DeriveArgs),
    /// Build the free algebra of a class over a variable context
    FreeAlgebra(FreeAlgebraArgs),
    /// Compare two terms in the free algebra of a class
    Lt(LtArgs),
    /// Close every subset of a formula universe and list the theories
    Theories(TheoriesArgs),
    /// Factor a join-preserving map through its image
    Factorize(FactorizeArgs),
    /// Run the certification suites
    CheckLemmas(CheckLemmasArgs),
    /// Check a translation pair for algebraisability
    Algebraise(AlgebraiseArgs),
    /// Search for a suplattice isomorphism
    LatticeIso(LatticeIsoArgs),
}

#[derive(Args)]
struct CheckSigArgs {
    /// Signature file
    #[arg(long, value_name = "FILE")]
    sig: PathBuf,
}

#[derive(Args)]
struct TermArgs {
    #[arg(long, value_name = "FILE")]
    sig: PathBuf,
    /// Context variables, comma separated; inferred from the term if omitted
    #[arg(long, value_name = "VARS")]
    vars: Option<String>,
    /// Term in prefix form, e.g. "(and p (not q))"
    term: String,
}

#[derive(Args)]
struct EntailArgs {
    #[arg(long, value_name = "FILE")]
    sig: PathBuf,
    /// Algebra files read as matrices (formula mode, with --designated)
    #[arg(long, value_name = "FILE", num_args = 1..)]
    matrices: Vec<PathBuf>,
    /// Designated element labels, comma separated
    #[arg(long, value_name = "LABELS")]
    designated: Option<String>,
    /// Premise formulas, comma separated
    #[arg(long, value_name = "TERMS", default_value = "")]
    gamma: String,
    /// Conclusion formula (formula mode)
    #[arg(long, value_name = "TERM")]
    phi: Option<String>,
    /// Algebra files forming an equational class (equation mode)
    #[arg(long, value_name = "FILE", num_args = 1..)]
    class: Vec<PathBuf>,
    /// Premise equations, semicolon separated (equation mode)
    #[arg(long, value_name = "EQS", default_value = "")]
    premises: String,
    /// Conclusion equation, e.g. "p ~ (not (not p))" (equation mode)
    #[arg(long, value_name = "EQ")]
    eq: Option<String>,
    /// Context variables; inferred from the query when omitted
    #[arg(long, value_name = "VARS")]
    vars: Option<String>,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(long, value_name = "FILE")]
    sig: PathBuf,
    /// Rule system file
    #[arg(long, value_name = "FILE")]
    rules: PathBuf,
    /// Premise formulas, comma separated
    #[arg(long, value_name = "TERMS", default_value = "")]
    gamma: String,
    /// Goal formula
    #[arg(long, value_name = "TERM")]
    phi: String,
    /// Context variables; inferred from the query when omitted
    #[arg(long, value_name = "VARS")]
    vars: Option<String>,
    /// Depth bound for axiom and rule instances
    #[arg(long, default_value_t = 2)]
    instance_depth: usize,
}

#[derive(Args)]
struct FreeAlgebraArgs {
    #[arg(long, value_name = "FILE")]
    sig: PathBuf,
    /// Algebra files forming the class
    #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
    class: Vec<PathBuf>,
    /// Context variables, comma separated; may be empty
    #[arg(long, value_name = "VARS", default_value = "")]
    vars: String,
    /// Also print the operation tables
    #[arg(long)]
    tables: bool,
}

#[derive(Args)]
struct LtArgs {
    #[arg(long, value_name = "FILE")]
    sig: PathBuf,
    #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
    class: Vec<PathBuf>,
    /// Context variables; inferred from the terms when omitted
    #[arg(long, value_name = "VARS")]
    vars: Option<String>,
    #[arg(long, value_name = "TERM")]
    lhs: String,
    #[arg(long, value_name = "TERM")]
    rhs: String,
}

#[derive(Args)]
struct TheoriesArgs {
    #[arg(long, value_name = "FILE")]
    sig: PathBuf,
    #[command(flatten)]
    engine: EngineOpts,
    /// Universe of formulas, comma separated; may be empty
    #[arg(long, value_name = "TERMS", default_value = "")]
    universe: String,
    /// Context variables; inferred from the universe when omitted
    #[arg(long, value_name = "VARS")]
    vars: Option<String>,
}

#[derive(Args)]
struct FactorizeArgs {
    /// Source suplattice file
    #[arg(long, value_name = "FILE")]
    source: PathBuf,
    /// Target suplattice file
    #[arg(long, value_name = "FILE")]
    target: PathBuf,
    /// Element assignment, e.g. "bot:bot,a:x,top:top"
    #[arg(long, value_name = "MAP")]
    map: String,
}

#[derive(Args)]
struct CheckLemmasArgs {
    /// Run every suite
    #[arg(long, conflicts_with = "only")]
    all: bool,
    /// Run one named suite (repeatable)
    #[arg(long, value_name = "NAME")]
    only: Vec<String>,
    /// Largest lattice size enumerated exhaustively
    #[arg(long, value_name = "N")]
    max_elems: Option<usize>,
}

#[derive(Args)]
struct AlgebraiseArgs {
    #[arg(long, value_name = "FILE")]
    sig: PathBuf,
    #[command(flatten)]
    engine: EngineOpts,
    /// Algebra files forming the equation-side class
    #[arg(long, value_name = "FILE", num_args = 1.., required = true)]
    class: Vec<PathBuf>,
    /// Translation file defining tau and delta
    #[arg(long, value_name = "FILE")]
    translations: PathBuf,
    /// Context variables for the check domain; defaults to p, q, ... up to --ctx
    #[arg(long, value_name = "VARS")]
    vars: Option<String>,
    /// Number of enumerated terms paired into the check domain
    #[arg(long, default_value_t = 24)]
    pairs: usize,
}

#[derive(Args)]
struct LatticeIsoArgs {
    /// First suplattice file
    #[arg(long, value_name = "FILE")]
    a: PathBuf,
    /// Second suplattice file
    #[arg(long, value_name = "FILE")]
    b: PathBuf,
}

/// Engine selection shared by `theories` and `algebraise`: either a rule
/// system or a set of matrices with designated elements.
#[derive(Args)]
struct EngineOpts {
    /// Algebra files read as matrices (with --designated)
    #[arg(long, value_name = "FILE", num_args = 1..)]
    matrices: Vec<PathBuf>,
    /// Designated element labels for the matrices, comma separated
    #[arg(long, value_name = "LABELS")]
    designated: Option<String>,
    /// Rule system file
    #[arg(long, value_name = "FILE")]
    rules: Option<PathBuf>,
}

/// A command failure: the message becomes an `error:` line in the report
/// and the code becomes the process exit status.
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn usage(message: impl Into<String>) -> Fail {
        Fail { code: 2, message: message.into() }
    }
}

fn term_code(_: &TermError) -> u8 {
    2
}

fn algebra_code(e: &AlgebraError) -> u8 {
    match e {
        AlgebraError::SizeGuard { .. } => 4,
        _ => 2,
    }
}

fn lattice_code(e: &LatticeError) -> u8 {
    match e {
        LatticeError::SizeGuard { .. } => 4,
        _ => 2,
    }
}

fn consequence_code(e: &ConsequenceError) -> u8 {
    match e {
        ConsequenceError::InstanceGuard { .. } => 4,
        ConsequenceError::ClosureNotIdempotent { .. } => 3,
        ConsequenceError::Term(inner) => term_code(inner),
        ConsequenceError::Algebra(inner) => algebra_code(inner),
        ConsequenceError::Lattice(inner) => lattice_code(inner),
        _ => 2,
    }
}

fn equivalence_code(e: &EquivalenceError) -> u8 {
    match e {
        EquivalenceError::Term(inner) => term_code(inner),
        EquivalenceError::Algebra(inner) => algebra_code(inner),
        EquivalenceError::Lattice(inner) => lattice_code(inner),
        EquivalenceError::Consequence(inner) => consequence_code(inner),
        _ => 2,
    }
}

impl From<TermError> for Fail {
    fn from(e: TermError) -> Fail {
        Fail { code: term_code(&e), message: e.to_string() }
    }
}

impl From<AlgebraError> for Fail {
    fn from(e: AlgebraError) -> Fail {
        Fail { code: algebra_code(&e), message: e.to_string() }
    }
}

impl From<LatticeError> for Fail {
    fn from(e: LatticeError) -> Fail {
        Fail { code: lattice_code(&e), message: e.to_string() }
    }
}

impl From<ConsequenceError> for Fail {
    fn from(e: ConsequenceError) -> Fail {
        Fail { code: consequence_code(&e), message: e.to_string() }
    }
}

impl From<EquivalenceError> for Fail {
    fn from(e: EquivalenceError) -> Fail {
        Fail { code: equivalence_code(&e), message: e.to_string() }
    }
}

type Outcome = Result<(&'static str, u8), Fail>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut config = cli.global.config();
    if let Command::CheckLemmas(args) = &cli.command {
        if let Some(m) = args.max_elems {
            config.max_elems = m;
        }
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let mut report = Report::new(argv, config);
    let started = Instant::now();
    let outcome = run(&cli.command, &config, &mut report);
    let (verdict, mut code) = match outcome {
        Ok((verdict, code)) => (verdict.to_string(), code),
        Err(fail) => {
            report.push_line(format!("error: {}", fail.message));
            ("error".to_string(), fail.code)
        }
    };
    report.verdict = verdict;
    report.elapsed_ms = started.elapsed().as_millis();
    if let Some(path) = &cli.global.json {
        if let Err(e) = fs::write(path, report.to_json()) {
            eprintln!("error: cannot write {}: {e}", path.display());
            if code == 0 {
                code = 2;
            }
        }
    }
    print!("{}", report.render_human());
    ExitCode::from(code)
}

fn run(command: &Command, config: &RunConfig, report: &mut Report) -> Outcome {
    match command {
        Command::CheckSig(args) => cmd_check_sig(args, report),
        Command::Term(args) => cmd_term(args, report),
        Command::Entail(args) => cmd_entail(args, config, report),
        Command::Derive(args) => cmd_derive(args, config, report),
        Command::FreeAlgebra(args) => cmd_free_algebra(args, config, report),
        Command::Lt(args) => cmd_lt(args, config, report),
        Command::Theories(args) => cmd_theories(args, config, report),
        Command::Factorize(args) => cmd_factorize(args, report),
        Command::CheckLemmas(args) => cmd_check_lemmas(args, config, report),
        Command::Algebraise(args) => cmd_algebraise(args, config, report),
        Command::LatticeIso(args) => cmd_lattice_iso(args, config, report),
    }
}

// ---------------------------------------------------------------- loading

fn read_file(path: &Path) -> Result<String, Fail> {
    fs::read_to_string(path)
        .map_err(|e| Fail::usage(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, code: u8, err: impl std::fmt::Display) -> Fail {
    Fail { code, message: format!("{}: {err}", path.display()) }
}

fn load_signature(path: &Path) -> Result<Signature, Fail> {
    let src = read_file(path)?;
    parse_signature(&src).map_err(|e| in_file(path, term_code(&e), e))
}

fn load_algebra(path: &Path, sig: &Signature) -> Result<FiniteAlgebra, Fail> {
    let src = read_file(path)?;
    parse_algebra(&src, sig).map_err(|e| in_file(path, algebra_code(&e), e))
}

fn load_algebras(paths: &[PathBuf], sig: &Signature) -> Result<Vec<FiniteAlgebra>, Fail> {
    paths.iter().map(|p| load_algebra(p, sig)).collect()
}

fn load_lattice(path: &Path) -> Result<(String, FiniteSupLattice), Fail> {
    let src = read_file(path)?;
    parse_suplattice(&src).map_err(|e| in_file(path, lattice_code(&e), e))
}

fn load_rules(path: &Path, sig: &Signature) -> Result<RuleSystem, Fail> {
    let src = read_file(path)?;
    parse_rules(&src, sig).map_err(|e| in_file(path, consequence_code(&e), e))
}

fn load_translations(
    path: &Path,
    sig: &Signature,
) -> Result<(TranslationFmlToEq, TranslationEqToFml), Fail> {
    let src = read_file(path)?;
    let file = parse_translations(&src, sig).map_err(|e| in_file(path, equivalence_code(&e), e))?;
    match (file.tau, file.delta) {
        (Some(tau), Some(delta)) => Ok((tau, delta)),
        _ => Err(Fail::usage(format!(
            "{}: translations file must define both tau and delta",
            path.display()
        ))),
    }
}

// ------------------------------------------------------------- query text

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::to_string)
        .collect()
}

fn split_eqs(s: &str) -> Vec<String> {
    s.split(';')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::to_string)
        .collect()
}

/// Context from `--vars`, or inferred from the query sources. Equation
/// sources must be split on `~` before inference so only term text is
/// scanned.
fn context_for(sig: &Signature, vars: &Option<String>, sources: &[&str]) -> Result<VarContext, Fail> {
    match vars {
        Some(spec) => Ok(VarContext::new(split_list(spec))?),
        None => Ok(infer_context(sig, sources)?),
    }
}

fn parse_terms(sig: &Signature, ctx: &VarContext, sources: &[String]) -> Result<Vec<Term>, Fail> {
    sources
        .iter()
        .map(|s| parse_term(sig, ctx, s).map_err(Fail::from))
        .collect()
}

fn parse_eqs(sig: &Signature, ctx: &VarContext, sources: &[String]) -> Result<Vec<Equation>, Fail> {
    sources
        .iter()
        .map(|s| parse_equation(sig, ctx, s).map_err(Fail::from))
        .collect()
}

/// Term fragments of equation sources: the pieces around each `~`.
fn eq_term_sources(sources: &[String]) -> Vec<&str> {
    sources.iter().flat_map(|s| s.split('~')).collect()
}

// ----------------------------------------------------------------- shared

fn build_engine(
    opts: &EngineOpts,
    sig: &Signature,
    config: &RunConfig,
) -> Result<ConsequenceEngine, Fail> {
    match (&opts.rules, opts.matrices.is_empty()) {
        (Some(path), true) => {
            let system = load_rules(path, sig)?;
            let budget = DeriveBudget {
                derivation_depth: config.budget,
                instance_depth: config.depth,
                ..DeriveBudget::default()
            };
            Ok(ConsequenceEngine::from_rules(system, budget))
        }
        (None, false) => {
            let designated = opts
                .designated
                .as_deref()
                .ok_or_else(|| Fail::usage("--matrices requires --designated"))?;
            let algs = load_algebras(&opts.matrices, sig)?;
            let matrices = to_matrices(algs, designated)?;
            Ok(ConsequenceEngine::from_matrices(matrices, config.guard_evals))
        }
        (Some(_), false) => Err(Fail::usage("pass either --rules or --matrices, not both")),
        (None, true) => Err(Fail::usage(
            "pass an engine: --rules FILE, or --matrices FILE... --designated LABELS",
        )),
    }
}

fn to_matrices(algs: Vec<FiniteAlgebra>, designated: &str) -> Result<Vec<LogicalMatrix>, Fail> {
    let labels = split_list(designated);
    if labels.is_empty() {
        return Err(Fail::usage("--designated needs at least one element label"));
    }
    let mut out = Vec::with_capacity(algs.len());
    for alg in algs {
        let mut indices = Vec::with_capacity(labels.len());
        for label in &labels {
            match alg.element_index(label) {
                Some(i) => indices.push(i),
                None => {
                    return Err(Fail::usage(format!(
                        "designated element {label:?} is not in the carrier of {}",
                        alg.name()
                    )))
                }
            }
        }
        out.push(LogicalMatrix::new(alg, indices)?);
    }
    Ok(out)
}

fn eval_witness(ctx: &VarContext, e: &Evaluation, alg: &FiniteAlgebra) -> String {
    let pairs: Vec<String> = ctx
        .vars()
        .iter()
        .map(|v| {
            let value = e.value_of(v).expect("evaluation covers its context");
            format!("{v}={}", alg.element_label(value))
        })
        .collect();
    format!("{{{}}} in {}", pairs.join(", "), alg.name())
}

// --------------------------------------------------------------- commands

fn cmd_check_sig(args: &CheckSigArgs, report: &mut Report) -> Outcome {
    let sig = load_signature(&args.sig)?;
    report.push_line(format!("signature {}", sig.name()));
    for (op, arity) in sig.ops() {
        report.push_line(format!("op {op} arity {arity}"));
    }
    Ok(("ok", 0))
}

fn cmd_term(args: &TermArgs, report: &mut Report) -> Outcome {
    let sig = load_signature(&args.sig)?;
    let ctx = context_for(&sig, &args.vars, &[args.term.as_str()])?;
    let t = parse_term(&sig, &ctx, &args.term)?;
    report.push_line(format!("term {t}"));
    report.push_line(format!("depth {}", t.depth()));
    report.push_line(format!("context [{}]", ctx.vars().join(", ")));
    Ok(("ok", 0))
}

fn cmd_entail(args: &EntailArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    match (args.matrices.is_empty(), args.class.is_empty()) {
        (false, true) => entail_formulas(args, config, report),
        (true, false) => entail_equations(args, config, report),
        (false, false) => Err(Fail::usage("pass either --matrices or --class, not both")),
        (true, true) => Err(Fail::usage(
            "pass a semantics: --matrices FILE... --designated LABELS, or --class FILE...",
        )),
    }
}

fn entail_formulas(args: &EntailArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    let sig = load_signature(&args.sig)?;
    let designated = args
        .designated
        .as_deref()
        .ok_or_else(|| Fail::usage("--matrices requires --designated"))?;
    let phi_src = args
        .phi
        .as_deref()
        .ok_or_else(|| Fail::usage("matrix entailment needs a conclusion: --phi TERM"))?;
    let gamma_srcs = split_list(&args.gamma);
    let mut sources: Vec<&str> = gamma_srcs.iter().map(String::as_str).collect();
    sources.push(phi_src);
    let ctx = context_for(&sig, &args.vars, &sources)?;
    let gamma = parse_terms(&sig, &ctx, &gamma_srcs)?;
    let phi = parse_term(&sig, &ctx, phi_src)?;
    let matrices = to_matrices(load_algebras(&args.matrices, &sig)?, designated)?;

    report.push_line(format!(
        "gamma [{}]",
        gamma.iter().map(Term::to_string).collect::<Vec<_>>().join(", ")
    ));
    report.push_line(format!("phi {phi}"));
    let holds = matrix_entails(
        &matrices,
        &ctx,
        &gamma,
        std::slice::from_ref(&phi),
        config.guard_evals,
    )?;
    if holds {
        Ok(("yes", 0))
    } else {
        'search: for m in &matrices {
            for e in enumerate_evaluations(m.alg(), &ctx) {
                let mut premises_hold = true;
                for g in &gamma {
                    if !m.is_designated(evaluate(g, m.alg(), &e)?) {
                        premises_hold = false;
                        break;
                    }
                }
                if premises_hold && !m.is_designated(evaluate(&phi, m.alg(), &e)?) {
                    report.push_line(format!("witness {}", eval_witness(&ctx, &e, m.alg())));
                    break 'search;
                }
            }
        }
        Ok(("no", 1))
    }
}

fn entail_equations(args: &EntailArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    let sig = load_signature(&args.sig)?;
    let eq_src = args
        .eq
        .as_deref()
        .ok_or_else(|| Fail::usage("equational entailment needs a conclusion: --eq \"T ~ T\""))?;
    let premise_srcs = split_eqs(&args.premises);
    let mut all_srcs = premise_srcs.clone();
    all_srcs.push(eq_src.to_string());
    let ctx = context_for(&sig, &args.vars, &eq_term_sources(&all_srcs))?;
    let premises = parse_eqs(&sig, &ctx, &premise_srcs)?;
    let conclusion = parse_equation(&sig, &ctx, eq_src)?;
    let k = AlgebraClass::new(load_algebras(&args.class, &sig)?)?;

    report.push_line(format!(
        "premises [{}]",
        premises.iter().map(Equation::to_string).collect::<Vec<_>>().join("; ")
    ));
    report.push_line(format!("conclusion {conclusion}"));
    let holds = semantic_consequence(
        &k,
        &ctx,
        &premises,
        std::slice::from_ref(&conclusion),
        config.guard_evals,
    )?;
    if holds {
        Ok(("yes", 0))
    } else {
        'search: for alg in k.members() {
            for e in enumerate_evaluations(alg, &ctx) {
                let mut premises_hold = true;
                for p in &premises {
                    if !satisfies(alg, &e, p)? {
                        premises_hold = false;
                        break;
                    }
                }
                if premises_hold && !satisfies(alg, &e, &conclusion)? {
                    report.push_line(format!("witness {}", eval_witness(&ctx, &e, alg)));
                    break 'search;
                }
            }
        }
        Ok(("no", 1))
    }
}

fn cmd_derive(args: &DeriveArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    let sig = load_signature(&args.sig)?;
    let system = load_rules(&args.rules, &sig)?;
    let gamma_srcs = split_list(&args.gamma);
    let mut sources: Vec<&str> = gamma_srcs.iter().map(String::as_str).collect();
    sources.push(&args.phi);
    let ctx = context_for(&sig, &args.vars, &sources)?;
    let gamma = parse_terms(&sig, &ctx, &gamma_srcs)?;
    let phi = parse_term(&sig, &ctx, &args.phi)?;
    let budget = DeriveBudget {
        derivation_depth: config.budget,
        instance_depth: args.instance_depth,
        ..DeriveBudget::default()
    };
    report.push_line(format!(
        "derivation depth {} instance depth {}",
        budget.derivation_depth, budget.instance_depth
    ));
    match derive(&system, &ctx, &gamma, &phi, &budget)? {
        Verdict::Yes => {
            report.push_line(format!("derived {phi}"));
            Ok(("yes", 0))
        }
        _ => {
            let derived = derive_set(&system, &ctx, &gamma, &budget)?;
            report.push_line(format!(
                "{phi} not among the {} formulas derivable within budget",
                derived.len()
            ));
            Ok(("unknown", 3))
        }
    }
}

fn cmd_free_algebra(args: &FreeAlgebraArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    let sig_src = read_file(&args.sig)?;
    let sig = parse_signature(&sig_src).map_err(|e| in_file(&args.sig, term_code(&e), e))?;
    let mut class_srcs = Vec::with_capacity(args.class.len());
    let mut algs = Vec::with_capacity(args.class.len());
    for path in &args.class {
        let src = read_file(path)?;
        algs.push(parse_algebra(&src, &sig).map_err(|e| in_file(path, algebra_code(&e), e))?);
        class_srcs.push(src);
    }
    let k = AlgebraClass::new(algs)?;
    let ctx = VarContext::new(split_list(&args.vars))?;

    let cache = cache_path(&sig_src, &class_srcs, &args.vars, args.tables);
    if let Some(path) = &cache {
        if let Some(lines) = read_cached_lines(path) {
            for line in lines {
                report.push_line(line);
            }
            return Ok(("ok", 0));
        }
    }

    let fresh_from = report.lines.len();
    let free = free_algebra(&k, &ctx, config.guard_product)?;
    report.push_line(format!("carrier size {}", free.alg.carrier_len()));
    for (v, idx) in ctx.vars().iter().zip(&free.generators) {
        report.push_line(format!("generator {v} -> {}", free.alg.element_label(*idx)));
    }
    if args.tables {
        push_tables(&free.alg, report)?;
    }
    if let Some(path) = &cache {
        write_cached_lines(path, &report.lines[fresh_from..]);
    }
    Ok(("ok", 0))
}

fn push_tables(alg: &FiniteAlgebra, report: &mut Report) -> Result<(), Fail> {
    let n = alg.carrier_len();
    for (op, arity) in alg.signature().ops().to_vec() {
        let mut args = vec![0usize; arity];
        loop {
            let value = alg.apply(&op, &args)?;
            let shown: Vec<&str> = args.iter().map(|&i| alg.element_label(i)).collect();
            report.push_line(format!(
                "op {op}({}) -> {}",
                shown.join(", "),
                alg.element_label(value)
            ));
            let mut pos = arity;
            loop {
                if pos == 0 {
                    break;
                }
                args[pos - 1] += 1;
                if args[pos - 1] < n {
                    break;
                }
                args[pos - 1] = 0;
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
        }
    }
    Ok(())
}

/// Content-addressed cache location under `AAL_CACHE_DIR`, if set. The key
/// hashes every input that determines the output lines, so a hit is safe
/// to replay verbatim.
fn cache_path(sig_src: &str, class_srcs: &[String], vars: &str, tables: bool) -> Option<PathBuf> {
    let dir = std::env::var_os("AAL_CACHE_DIR")?;
    let mut parts: Vec<&str> = vec![sig_src, vars, if tables { "tables" } else { "plain" }];
    parts.extend(class_srcs.iter().map(String::as_str));
    let key = fnv1a64(&parts);
    Some(PathBuf::from(dir).join(format!("free-{key:016x}.json")))
}

fn fnv1a64(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for b in part.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

fn read_cached_lines(path: &Path) -> Option<Vec<String>> {
    let text = fs::read_to_string(path).ok()?;
    serde_json::from_str(&text).ok()
}

fn write_cached_lines(path: &Path, lines: &[String]) {
    // A failed cache write must not fail the command.
    if let Ok(text) = serde_json::to_string(&lines.to_vec()) {
        let _ = fs::write(path, text);
    }
}

fn cmd_lt(args: &LtArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    let sig = load_signature(&args.sig)?;
    let ctx = context_for(&sig, &args.vars, &[args.lhs.as_str(), args.rhs.as_str()])?;
    let lhs = parse_term(&sig, &ctx, &args.lhs)?;
    let rhs = parse_term(&sig, &ctx, &args.rhs)?;
    let k = AlgebraClass::new(load_algebras(&args.class, &sig)?)?;
    let free = free_algebra(&k, &ctx, config.guard_product)?;
    report.push_line(format!("carrier size {}", free.alg.carrier_len()));
    report.push_line(format!("lhs class {}", free.alg.element_label(free.lambda(&lhs)?)));
    report.push_line(format!("rhs class {}", free.alg.element_label(free.lambda(&rhs)?)));
    if lt_equal(&free, &lhs, &rhs)? {
        Ok(("yes", 0))
    } else {
        Ok(("no", 1))
    }
}

fn cmd_theories(args: &TheoriesArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    let sig = load_signature(&args.sig)?;
    let engine = build_engine(&args.engine, &sig, config)?;
    let universe_srcs = split_list(&args.universe);
    if universe_srcs.len() > config.guard_universe {
        return Err(Fail {
            code: 4,
            message: format!(
                "universe has {} formulas, above the bound {}",
                universe_srcs.len(),
                config.guard_universe
            ),
        });
    }
    let srcs: Vec<&str> = universe_srcs.iter().map(String::as_str).collect();
    let ctx = context_for(&sig, &args.vars, &srcs)?;
    let universe = parse_terms(&sig, &ctx, &universe_srcs)?;
    let (_, closure) = theories_lattice(&engine, &ctx, &universe)?;

    report.push_line(format!("universe size {}", universe.len()));
    let lattice = closure.lattice();
    for i in 0..lattice.len() {
        report.push_line(format!("close {} -> {}", lattice.label(i), lattice.label(closure.apply(i))));
    }
    let fixed = closure.fixed_points();
    report.push_line(format!("closed theories {}", fixed.len()));
    for &i in &fixed {
        report.push_line(format!("theory {}", lattice.label(i)));
    }
    for &a in &fixed {
        for &b in &fixed {
            if a == b || !lattice.leq(a, b) {
                continue;
            }
            let between = fixed
                .iter()
                .any(|&c| c != a && c != b && lattice.leq(a, c) && lattice.leq(c, b));
            if !between {
                report.push_line(format!("cover {} < {}", lattice.label(a), lattice.label(b)));
            }
        }
    }
    Ok(("ok", 0))
}

fn cmd_factorize(args: &FactorizeArgs, report: &mut Report) -> Outcome {
    let (_, source) = load_lattice(&args.source)?;
    let (_, target) = load_lattice(&args.target)?;
    let mut map: Vec<Option<usize>> = vec![None; source.len()];
    for piece in split_list(&args.map) {
        let (from, to) = piece
            .split_once(':')
            .ok_or_else(|| Fail::usage(format!("map entry {piece:?} is not LABEL:LABEL")))?;
        let i = source
            .index_of(from.trim())
            .ok_or_else(|| Fail::usage(format!("{from:?} is not a source element")))?;
        let j = target
            .index_of(to.trim())
            .ok_or_else(|| Fail::usage(format!("{to:?} is not a target element")))?;
        if map[i].is_some() {
            return Err(Fail::usage(format!("{from:?} is mapped twice")));
        }
        map[i] = Some(j);
    }
    let map: Vec<usize> = map
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Fail::usage(format!("{:?} is not mapped", source.label(i)))))
        .collect::<Result<_, _>>()?;

    let f = SupMorphism::new(source, target, map)?;
    let duality = surjectivity_duality_check(&f);
    let fact = image_factorization(&f);
    let composite = fact.quotient.morphism().then(&fact.inclusion)?;

    report.push_line(format!("surjective {}", f.is_surjective()));
    report.push_line(format!("injective {}", f.is_injective()));
    report.push_line(format!("right adjoint injective {}", duality.right_injective));
    report.push_line(format!("right adjoint surjective {}", duality.right_surjective));
    report.push_line(format!("duality pass {}", duality.pass()));
    let middle = fact.inclusion.source();
    report.push_line(format!("middle size {}", middle.len()));
    for i in 0..middle.len() {
        report.push_line(format!(
            "include {} -> {}",
            middle.label(i),
            f.target().label(fact.inclusion.apply(i))
        ));
    }
    report.push_line(format!("inclusion injective {}", fact.inclusion.is_injective()));
    report.push_line(format!("composite equals map {}", composite.map() == f.map()));
    Ok(("ok", 0))
}

fn cmd_check_lemmas(args: &CheckLemmasArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    let names: Vec<&str> = if args.all {
        LEMMA_NAMES.to_vec()
    } else if args.only.is_empty() {
        return Err(Fail::usage("pass --all or --only NAME"));
    } else {
        args.only.iter().map(String::as_str).collect()
    };
    for name in &names {
        if !LEMMA_NAMES.contains(name) {
            return Err(Fail::usage(format!(
                "unknown lemma {name:?}; valid names: {}",
                LEMMA_NAMES.join(", ")
            )));
        }
    }
    for name in &names {
        let lemma = run_lemma(name, config).expect("name was validated");
        report.lemmas.push(lemma);
    }
    if report.lemmas.iter().all(|l| l.pass) {
        Ok(("pass", 0))
    } else {
        Ok(("fail", 1))
    }
}

fn cmd_algebraise(args: &AlgebraiseArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    let sig = load_signature(&args.sig)?;
    let engine = build_engine(&args.engine, &sig, config)?;
    let k = AlgebraClass::new(load_algebras(&args.class, &sig)?)?;
    let (tau, delta) = load_translations(&args.translations, &sig)?;
    let ctx = match &args.vars {
        Some(spec) => VarContext::new(split_list(spec))?,
        None => {
            let pool = ["p", "q", "r", "s", "t0", "t1"];
            if config.ctx > pool.len() {
                return Err(Fail::usage(format!(
                    "default context stops at {} variables; pass --vars",
                    pool.len()
                )));
            }
            VarContext::from_names(&pool[..config.ctx])
        }
    };
    let terms = aal_core::term::enumerate_terms(&sig, &ctx, config.depth);
    let slice: Vec<&Term> = terms.iter().take(args.pairs).collect();
    if slice.is_empty() {
        return Err(Fail::usage("the signature admits no terms at this depth"));
    }
    let mut formula_domain = Vec::with_capacity(slice.len() * slice.len());
    let mut equation_domain = Vec::with_capacity(slice.len() * slice.len());
    for &t in &slice {
        for &u in &slice {
            formula_domain.push((ctx.clone(), vec![t.clone()], vec![u.clone()]));
            equation_domain.push((ctx.clone(), Equation::new(t.clone(), u.clone())));
        }
    }
    let verdict = algebraisation_check(
        &engine,
        &k,
        &tau,
        &delta,
        &formula_domain,
        &equation_domain,
        config.guard_evals,
    )?;
    report.push_line(format!("domain {}", verdict.domain));
    report.push_line(format!(
        "representation checked {} holds {} unknown {}",
        verdict.representation.checked,
        verdict.representation.holds,
        verdict.representation.skipped_unknown
    ));
    report.push_line(format!(
        "inversion checked {} holds {} unknown {}",
        verdict.inversion.checked, verdict.inversion.holds, verdict.inversion.skipped_unknown
    ));
    for c in verdict.representation.counterexamples.iter().take(5) {
        report.push_line(format!("representation counterexample: {c}"));
    }
    for c in verdict.inversion.counterexamples.iter().take(5) {
        report.push_line(format!("inversion counterexample: {c}"));
    }
    if verdict.fail() {
        Ok(("fail", 1))
    } else if !verdict.conclusive() {
        Ok(("inconclusive", 3))
    } else {
        Ok(("pass", 0))
    }
}

fn cmd_lattice_iso(args: &LatticeIsoArgs, config: &RunConfig, report: &mut Report) -> Outcome {
    let (name_a, a) = load_lattice(&args.a)?;
    let (name_b, b) = load_lattice(&args.b)?;
    match iso_search(&a, &b, config.guard_iso)? {
        Some(perm) => {
            report.push_line(format!("isomorphic {name_a} ~ {name_b}"));
            for (i, &j) in perm.iter().enumerate() {
                report.push_line(format!("map {} -> {}", a.label(i), b.label(j)));
            }
            Ok(("yes", 0))
        }
        None => {
            report.push_line(format!("not isomorphic {name_a} !~ {name_b}"));
            Ok(("no", 1))
        }
    }
}
