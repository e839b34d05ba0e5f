//! Finite algebras over a signature: operation tables, term evaluation,
//! equation satisfaction, semantic consequence over a class of algebras, and
//! free algebras computed as generated subalgebras of evaluation products.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::term::{Equation, Renaming, Signature, Term, VarContext};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
    #[error("algebra is over signature {found:?}, expected {expected:?}")]
    SignatureMismatch { expected: String, found: String },
    #[error("operation {0:?} is not in the signature")]
    UnknownOp(String),
    #[error("no table rows for operation {0:?}")]
    MissingTable(String),
    #[error("operation {op:?} has {got} rows, expected {expected}")]
    PartialTable { op: String, expected: usize, got: usize },
    #[error("duplicate table row for operation {op:?} at input {input:?}")]
    DuplicateRow { op: String, input: String },
    #[error("unknown carrier element {element:?} in table for {op:?}")]
    UnknownElement { op: String, element: String },
    #[error("carrier is empty")]
    EmptyCarrier,
    #[error("duplicate carrier element {0:?}")]
    DuplicateElement(String),
    #[error("variable {0:?} is not in the evaluation context")]
    UnknownVar(String),
    #[error("operation {op:?} applied to {got} arguments, table expects {expected}")]
    ArityMismatch { op: String, expected: usize, got: usize },
    #[error("algebras in a class must share one signature")]
    MixedSignatures,
    #[error("{what} is {size}, above the bound {bound}")]
    SizeGuard { what: String, size: usize, bound: usize },
    #[error("evaluation does not cover the context")]
    EvaluationMismatch,
}

/// A finite algebra: a named carrier of labelled elements together with a
/// total operation table for every symbol of its signature.
///
/// Tables are stored row-major over argument tuples, first argument most
/// significant, so table index arithmetic matches the lexicographic
/// enumeration order used everywhere else in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    signature: Signature,
    carrier: Vec<String>,
    tables: BTreeMap<String, Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(
        name: &str,
        signature: Signature,
        carrier: Vec<String>,
        tables: BTreeMap<String, Vec<usize>>,
    ) -> Result<FiniteAlgebra, AlgebraError> {
        if carrier.is_empty() {
            return Err(AlgebraError::EmptyCarrier);
        }
        for (i, label) in carrier.iter().enumerate() {
            if carrier[..i].contains(label) {
                return Err(AlgebraError::DuplicateElement(label.clone()));
            }
        }
        for op in tables.keys() {
            if signature.arity(op).is_none() {
                return Err(AlgebraError::UnknownOp(op.clone()));
            }
        }
        for (op, arity) in signature.ops() {
            let expected = carrier.len().pow(*arity as u32);
            match tables.get(op) {
                None => return Err(AlgebraError::MissingTable(op.clone())),
                Some(t) if t.len() != expected => {
                    return Err(AlgebraError::PartialTable {
                        op: op.clone(),
                        expected,
                        got: t.len(),
                    })
                }
                Some(t) => {
                    if let Some(&bad) = t.iter().find(|&&v| v >= carrier.len()) {
                        return Err(AlgebraError::UnknownElement {
                            op: op.clone(),
                            element: format!("#{bad}"),
                        });
                    }
                }
            }
        }
        Ok(FiniteAlgebra { name: name.to_string(), signature, carrier, tables })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn carrier_len(&self) -> usize {
        self.carrier.len()
    }

    pub fn carrier(&self) -> &[String] {
        &self.carrier
    }

    pub fn element_label(&self, i: usize) -> &str {
        &self.carrier[i]
    }

    pub fn element_index(&self, label: &str) -> Option<usize> {
        self.carrier.iter().position(|l| l == label)
    }

    /// Apply an operation table to argument indices.
    pub fn apply(&self, op: &str, args: &[usize]) -> Result<usize, AlgebraError> {
        let arity = self
            .signature
            .arity(op)
            .ok_or_else(|| AlgebraError::UnknownOp(op.to_string()))?;
        if args.len() != arity {
            return Err(AlgebraError::ArityMismatch {
                op: op.to_string(),
                expected: arity,
                got: args.len(),
            });
        }
        let mut idx = 0usize;
        for &a in args {
            idx = idx * self.carrier.len() + a;
        }
        Ok(self.tables[op][idx])
    }
}

/// Parse an algebra file over a known signature.
///
/// Grammar: an `algebra <IDENT> over <SIG-IDENT>` header, one
/// `carrier <IDENT>+` line, and one `op <OP>: <args> -> <result>` row per
/// input tuple (nullary operations are written `op c: -> v`). Rows may come
/// in any order; each operation's table must be total and duplicate rows
/// are rejected.
pub fn parse_algebra(src: &str, sig: &Signature) -> Result<FiniteAlgebra, AlgebraError> {
    let mut name: Option<String> = None;
    let mut carrier: Vec<String> = Vec::new();
    let mut rows: BTreeMap<String, BTreeMap<Vec<usize>, usize>> = BTreeMap::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = crate::term::strip_comment(raw);
        let mut words = text.split_whitespace();
        let Some(head) = words.next() else { continue };
        match head {
            "algebra" => {
                let ident = words.next().ok_or_else(|| AlgebraError::File {
                    line,
                    message: "expected `algebra <IDENT> over <SIG-IDENT>`".into(),
                })?;
                if words.next() != Some("over") {
                    return Err(AlgebraError::File {
                        line,
                        message: "expected `over` after the algebra name".into(),
                    });
                }
                let sig_name = words.next().ok_or_else(|| AlgebraError::File {
                    line,
                    message: "expected a signature name after `over`".into(),
                })?;
                if sig_name != sig.name() {
                    return Err(AlgebraError::SignatureMismatch {
                        expected: sig.name().to_string(),
                        found: sig_name.to_string(),
                    });
                }
                if name.replace(ident.to_string()).is_some() {
                    return Err(AlgebraError::File {
                        line,
                        message: "duplicate algebra header".into(),
                    });
                }
            }
            "carrier" => {
                if !carrier.is_empty() {
                    return Err(AlgebraError::File {
                        line,
                        message: "duplicate carrier line".into(),
                    });
                }
                carrier.extend(words.map(str::to_string));
                if carrier.is_empty() {
                    return Err(AlgebraError::EmptyCarrier);
                }
            }
            "op" => {
                let op_token = words.next().ok_or_else(|| AlgebraError::File {
                    line,
                    message: "expected `op <IDENT>: <args> -> <result>`".into(),
                })?;
                let op = op_token.strip_suffix(':').ok_or_else(|| AlgebraError::File {
                    line,
                    message: format!("expected a colon after the operation name, got {op_token:?}"),
                })?;
                let arity = sig
                    .arity(op)
                    .ok_or_else(|| AlgebraError::UnknownOp(op.to_string()))?;
                let rest: Vec<&str> = words.collect();
                let arrow = rest.iter().position(|&w| w == "->").ok_or_else(|| {
                    AlgebraError::File {
                        line,
                        message: "expected `->` in table row".into(),
                    }
                })?;
                let lookup = |label: &str| -> Result<usize, AlgebraError> {
                    carrier.iter().position(|l| l == label).ok_or_else(|| {
                        AlgebraError::UnknownElement {
                            op: op.to_string(),
                            element: label.to_string(),
                        }
                    })
                };
                let args: Vec<usize> =
                    rest[..arrow].iter().map(|w| lookup(w)).collect::<Result<_, _>>()?;
                if args.len() != arity {
                    return Err(AlgebraError::ArityMismatch {
                        op: op.to_string(),
                        expected: arity,
                        got: args.len(),
                    });
                }
                if rest.len() != arrow + 2 {
                    return Err(AlgebraError::File {
                        line,
                        message: "expected exactly one result element after `->`".into(),
                    });
                }
                let result = lookup(rest[arrow + 1])?;
                let table = rows.entry(op.to_string()).or_default();
                if table.insert(args.clone(), result).is_some() {
                    let input = args
                        .iter()
                        .map(|&a| carrier[a].as_str())
                        .collect::<Vec<_>>()
                        .join(" ");
                    return Err(AlgebraError::DuplicateRow { op: op.to_string(), input });
                }
            }
            other => {
                return Err(AlgebraError::File {
                    line,
                    message: format!("unexpected directive {other:?}"),
                });
            }
        }
    }
    let name = name.ok_or_else(|| AlgebraError::File {
        line: 1,
        message: "missing `algebra <IDENT> over <SIG-IDENT>` header".into(),
    })?;
    if carrier.is_empty() {
        return Err(AlgebraError::EmptyCarrier);
    }
    let mut tables = BTreeMap::new();
    for (op, arity) in sig.ops() {
        let table = rows.remove(op).ok_or_else(|| AlgebraError::MissingTable(op.clone()))?;
        let expected = carrier.len().pow(*arity as u32);
        if table.len() != expected {
            return Err(AlgebraError::PartialTable {
                op: op.clone(),
                expected,
                got: table.len(),
            });
        }
        // Re-linearize sparse rows into the row-major layout; completeness
        // plus the duplicate check above guarantee every index is filled.
        let mut flat = vec![0usize; expected];
        for (args, result) in table {
            let mut idx = 0usize;
            for &a in &args {
                idx = idx * carrier.len() + a;
            }
            flat[idx] = result;
        }
        tables.insert(op.clone(), flat);
    }
    FiniteAlgebra::new(&name, sig.clone(), carrier, tables)
}

/// A variable assignment into an algebra's carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    ctx: VarContext,
    map: Vec<usize>,
}

impl Evaluation {
    pub fn new(ctx: VarContext, alg: &FiniteAlgebra, map: Vec<usize>) -> Result<Evaluation, AlgebraError> {
        if map.len() != ctx.len() {
            return Err(AlgebraError::EvaluationMismatch);
        }
        if map.iter().any(|&v| v >= alg.carrier_len()) {
            return Err(AlgebraError::EvaluationMismatch);
        }
        Ok(Evaluation { ctx, map })
    }

    pub fn ctx(&self) -> &VarContext {
        &self.ctx
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn value_of(&self, var: &str) -> Option<usize> {
        self.ctx.index_of(var).map(|i| self.map[i])
    }
}

/// All evaluations of a context into an algebra, in lexicographic order with
/// the first variable most significant.
pub fn enumerate_evaluations(alg: &FiniteAlgebra, ctx: &VarContext) -> Vec<Evaluation> {
    let n = alg.carrier_len();
    let k = ctx.len();
    let total = n.pow(k as u32);
    (0..total)
        .map(|mut code| {
            let mut map = vec![0usize; k];
            for slot in (0..k).rev() {
                map[slot] = code % n;
                code /= n;
            }
            Evaluation { ctx: ctx.clone(), map }
        })
        .collect()
}

/// Evaluate a term by structural recursion: variables through the
/// evaluation, applications through the tables.
pub fn evaluate(t: &Term, alg: &FiniteAlgebra, e: &Evaluation) -> Result<usize, AlgebraError> {
    match t {
        Term::Var(x) => e
            .value_of(x)
            .ok_or_else(|| AlgebraError::UnknownVar(x.clone())),
        Term::App(op, args) => {
            let vals: Vec<usize> = args
                .iter()
                .map(|a| evaluate(a, alg, e))
                .collect::<Result<_, _>>()?;
            alg.apply(op, &vals)
        }
    }
}

/// Whether an equation holds under one evaluation: both sides evaluate to
/// the same element.
pub fn satisfies(alg: &FiniteAlgebra, e: &Evaluation, eq: &Equation) -> Result<bool, AlgebraError> {
    Ok(evaluate(&eq.lhs, alg, e)? == evaluate(&eq.rhs, alg, e)?)
}

/// A finite class of algebras over one shared signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraClass {
    members: Vec<FiniteAlgebra>,
}

impl AlgebraClass {
    pub fn new(members: Vec<FiniteAlgebra>) -> Result<AlgebraClass, AlgebraError> {
        if let Some(first) = members.first() {
            if members.iter().any(|m| m.signature() != first.signature()) {
                return Err(AlgebraError::MixedSignatures);
            }
        }
        Ok(AlgebraClass { members })
    }

    pub fn members(&self) -> &[FiniteAlgebra] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

pub const EVALUATION_BOUND: usize = 4096;

/// Equational consequence over a class: every member evaluation satisfying
/// all the premises satisfies all the conclusions. Decided by full
/// enumeration, guarded by a per-member bound on the number of evaluations.
pub fn semantic_consequence(
    k: &AlgebraClass,
    ctx: &VarContext,
    premises: &[Equation],
    conclusions: &[Equation],
    eval_bound: usize,
) -> Result<bool, AlgebraError> {
    for member in k.members() {
        let count = member.carrier_len().checked_pow(ctx.len() as u32);
        match count {
            Some(c) if c <= eval_bound => {}
            _ => {
                return Err(AlgebraError::SizeGuard {
                    what: format!("evaluations of {} into {}", ctx.len(), member.name()),
                    size: count.unwrap_or(usize::MAX),
                    bound: eval_bound,
                })
            }
        }
        for e in enumerate_evaluations(member, ctx) {
            let mut premises_hold = true;
            for eq in premises {
                if !satisfies(member, &e, eq)? {
                    premises_hold = false;
                    break;
                }
            }
            if !premises_hold {
                continue;
            }
            for eq in conclusions {
                if !satisfies(member, &e, eq)? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Report for the compatibility of evaluation with variable renaming:
/// renaming then evaluating agrees with evaluating along the composite
/// assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenamingCompatReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl RenamingCompatReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For each sample term `t` over the renaming's source context, compare
/// evaluating the renamed term under `e` with evaluating `t` under the
/// pulled-back evaluation `x -> e(f(x))`.
pub fn renaming_compat_check(
    alg: &FiniteAlgebra,
    f: &Renaming,
    e: &Evaluation,
    samples: &[Term],
) -> Result<RenamingCompatReport, AlgebraError> {
    if e.ctx() != f.target() {
        return Err(AlgebraError::EvaluationMismatch);
    }
    let pulled_map: Vec<usize> = (0..f.source().len())
        .map(|i| e.map()[f.image_indices()[i]])
        .collect();
    let pulled = Evaluation::new(f.source().clone(), alg, pulled_map)?;
    let mut report = RenamingCompatReport { checked: 0, failures: Vec::new() };
    for t in samples {
        let renamed = crate::term::rename(t, f).map_err(|err| AlgebraError::File {
            line: 0,
            message: err.to_string(),
        })?;
        let lhs = evaluate(&renamed, alg, e)?;
        let rhs = evaluate(t, alg, &pulled)?;
        report.checked += 1;
        if lhs != rhs {
            report.failures.push(format!(
                "{t}: renamed side {} vs composite side {}",
                alg.element_label(lhs),
                alg.element_label(rhs)
            ));
        }
    }
    Ok(report)
}

pub const PRODUCT_BOUND: usize = 20000;

/// The free algebra on a context relative to a class, with its quotient map
/// from terms.
///
/// Carrier elements are reachable tuples in the product over all pairs of a
/// member and an evaluation into it; `generators` are the tuples of the
/// context variables and `lambda` evaluates a term to its tuple's index.
#[derive(Debug, Clone)]
pub struct FreeAlgebraResult {
    pub alg: FiniteAlgebra,
    pub ctx: VarContext,
    /// Carrier index of each context variable's generator tuple.
    pub generators: Vec<usize>,
    /// The underlying product tuples, one per carrier element, in discovery
    /// order; kept for inspection and cross-checks.
    pub tuples: Vec<Vec<usize>>,
}

impl FreeAlgebraResult {
    /// The quotient map from terms: evaluate inside the free algebra with
    /// variables at their generators.
    pub fn lambda(&self, t: &Term) -> Result<usize, AlgebraError> {
        let e = Evaluation::new(self.ctx.clone(), &self.alg, self.generators.clone())?;
        evaluate(t, &self.alg, &e)
    }
}

/// Compute the free algebra as the subalgebra of the evaluation product
/// generated by the variable tuples.
///
/// Discovery is breadth-first: each round applies every operation, in
/// signature order, to every argument tuple over the elements found so far,
/// in lexicographic order, appending new tuples as `t0, t1, ...`. The guard
/// bounds both the product dimension and the discovered carrier.
pub fn free_algebra(
    k: &AlgebraClass,
    ctx: &VarContext,
    product_bound: usize,
) -> Result<FreeAlgebraResult, AlgebraError> {
    let sig = match k.members().first() {
        Some(m) => m.signature().clone(),
        None => {
            // Empty class: the one-point algebra over an empty product.
            return one_point_free(ctx);
        }
    };
    // Columns of the product: (member, evaluation) pairs in member order
    // then evaluation order.
    let mut columns: Vec<(usize, Vec<usize>)> = Vec::new();
    for (mi, member) in k.members().iter().enumerate() {
        for e in enumerate_evaluations(member, ctx) {
            columns.push((mi, e.map().to_vec()));
        }
    }
    if columns.len() > product_bound {
        return Err(AlgebraError::SizeGuard {
            what: "product dimension".into(),
            size: columns.len(),
            bound: product_bound,
        });
    }
    let mut tuples: Vec<Vec<usize>> = Vec::new();
    let mut index: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut generators = Vec::new();
    for v in 0..ctx.len() {
        let tuple: Vec<usize> = columns.iter().map(|(_, emap)| emap[v]).collect();
        let next = tuples.len();
        let id = *index.entry(tuple.clone()).or_insert_with(|| {
            tuples.push(tuple);
            next
        });
        generators.push(id);
    }
    let apply_pointwise = |k: &AlgebraClass,
                           columns: &[(usize, Vec<usize>)],
                           op: &str,
                           args: &[&Vec<usize>]|
     -> Result<Vec<usize>, AlgebraError> {
        columns
            .iter()
            .enumerate()
            .map(|(c, (mi, _))| {
                let vals: Vec<usize> = args.iter().map(|t| t[c]).collect();
                k.members()[*mi].apply(op, &vals)
            })
            .collect()
    };
    loop {
        let snapshot = tuples.len();
        for (op, arity) in sig.ops().to_vec() {
            if arity > 0 && snapshot == 0 {
                continue;
            }
            let mut slots = vec![0usize; arity];
            loop {
                let args: Vec<&Vec<usize>> = slots.iter().map(|&s| &tuples[s]).collect();
                let result = apply_pointwise(k, &columns, &op, &args)?;
                if !index.contains_key(&result) {
                    if tuples.len() >= product_bound {
                        return Err(AlgebraError::SizeGuard {
                            what: "free algebra carrier".into(),
                            size: tuples.len() + 1,
                            bound: product_bound,
                        });
                    }
                    index.insert(result.clone(), tuples.len());
                    tuples.push(result);
                }
                // Advance the rightmost slot over the snapshot.
                let mut k2 = arity;
                loop {
                    if k2 == 0 {
                        break;
                    }
                    k2 -= 1;
                    slots[k2] += 1;
                    if slots[k2] < snapshot {
                        break;
                    }
                    slots[k2] = 0;
                }
                if arity == 0 || (k2 == 0 && slots[0] == 0) {
                    break;
                }
            }
        }
        if tuples.len() == snapshot {
            break;
        }
    }
    if tuples.is_empty() {
        // No variables and no constants: nothing is reachable, so fall back
        // to the one-point algebra, matching the empty-product convention.
        return one_point_free(ctx);
    }
    let labels: Vec<String> = (0..tuples.len()).map(|i| format!("t{i}")).collect();
    let mut op_tables = BTreeMap::new();
    for (op, arity) in sig.ops() {
        let mut flat = Vec::with_capacity(tuples.len().pow(*arity as u32));
        let mut slots = vec![0usize; *arity];
        loop {
            let args: Vec<&Vec<usize>> = slots.iter().map(|&s| &tuples[s]).collect();
            let result = apply_pointwise(k, &columns, op, &args)?;
            flat.push(index[&result]);
            let mut k2 = *arity;
            loop {
                if k2 == 0 {
                    break;
                }
                k2 -= 1;
                slots[k2] += 1;
                if slots[k2] < tuples.len() {
                    break;
                }
                slots[k2] = 0;
            }
            if *arity == 0 || (k2 == 0 && slots[0] == 0) {
                break;
            }
        }
        op_tables.insert(op.clone(), flat);
    }
    let alg = FiniteAlgebra::new("free", sig, labels, op_tables)?;
    Ok(FreeAlgebraResult { alg, ctx: ctx.clone(), generators, tuples })
}

fn one_point_free(ctx: &VarContext) -> Result<FreeAlgebraResult, AlgebraError> {
    // Over the empty class every operation collapses to the single point.
    // The signature is irrelevant for evaluation, but the algebra still
    // needs one; use an empty signature so tables stay trivial.
    let sig = Signature::new("EMPTY", Vec::new()).expect("empty signature is valid");
    let alg = FiniteAlgebra::new("free", sig, vec!["t0".into()], BTreeMap::new())?;
    Ok(FreeAlgebraResult {
        alg,
        ctx: ctx.clone(),
        generators: vec![0; ctx.len()],
        tuples: vec![Vec::new()],
    })
}

/// Whether two terms have the same image in the free algebra.
pub fn lt_equal(free: &FreeAlgebraResult, phi: &Term, psi: &Term) -> Result<bool, AlgebraError> {
    Ok(free.lambda(phi)? == free.lambda(psi)?)
}

/// Extend a generator assignment to a homomorphism by following the
/// closure of the generators, or report that no homomorphism exists.
///
/// Both the source generators and their images are carrier indices. The
/// source must be generated by `gens`; reachable elements get images forced
/// by the tables, and any conflict means there is no such homomorphism.
pub fn hom_from_generators(
    a: &FiniteAlgebra,
    gens: &[usize],
    b: &FiniteAlgebra,
    images: &[usize],
) -> Option<Vec<usize>> {
    if a.signature() != b.signature() || gens.len() != images.len() {
        return None;
    }
    let n = a.carrier_len();
    let mut image = vec![usize::MAX; n];
    for (&g, &im) in gens.iter().zip(images) {
        if image[g] != usize::MAX && image[g] != im {
            return None;
        }
        image[g] = im;
    }
    loop {
        let mut changed = false;
        let known: Vec<usize> = (0..n).filter(|&x| image[x] != usize::MAX).collect();
        for (op, arity) in a.signature().ops() {
            if *arity > 0 && known.is_empty() {
                continue;
            }
            let mut slots = vec![0usize; *arity];
            loop {
                let args: Vec<usize> = slots.iter().map(|&s| known[s]).collect();
                let target = a.apply(op, &args).ok()?;
                let mapped: Vec<usize> = args.iter().map(|&x| image[x]).collect();
                let want = b.apply(op, &mapped).ok()?;
                if image[target] == usize::MAX {
                    image[target] = want;
                    changed = true;
                } else if image[target] != want {
                    return None;
                }
                let mut k2 = *arity;
                loop {
                    if k2 == 0 {
                        break;
                    }
                    k2 -= 1;
                    slots[k2] += 1;
                    if slots[k2] < known.len() {
                        break;
                    }
                    slots[k2] = 0;
                }
                if *arity == 0 || (k2 == 0 && slots[0] == 0) {
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }
    if image.contains(&usize::MAX) {
        return None;
    }
    Some(image)
}

/// The signature with the six usual Boolean connectives.
pub fn boolean_signature() -> Signature {
    Signature::new(
        "BOOL",
        vec![
            ("and".into(), 2),
            ("or".into(), 2),
            ("not".into(), 1),
            ("imp".into(), 2),
            ("top".into(), 0),
            ("bot".into(), 0),
        ],
    )
    .expect("fixed signature is valid")
}

/// The two-element Boolean algebra over [`boolean_signature`].
pub fn two_element_boolean() -> FiniteAlgebra {
    let sig = boolean_signature();
    let carrier: Vec<String> = vec!["0".into(), "1".into()];
    let mut tables = BTreeMap::new();
    tables.insert("and".into(), vec![0, 0, 0, 1]);
    tables.insert("or".into(), vec![0, 1, 1, 1]);
    tables.insert("not".into(), vec![1, 0]);
    tables.insert("imp".into(), vec![1, 1, 0, 1]);
    tables.insert("top".into(), vec![1]);
    tables.insert("bot".into(), vec![0]);
    FiniteAlgebra::new("B2", sig, carrier, tables).expect("fixed tables are valid")
}

/// The three-element Heyting chain 0 < h < 1 over [`boolean_signature`]:
/// meet, join, the relative pseudocomplement `imp x y = 1 if x <= y else y`,
/// and `not x = imp x 0`.
pub fn three_element_heyting() -> FiniteAlgebra {
    let sig = boolean_signature();
    let carrier: Vec<String> = vec!["0".into(), "h".into(), "1".into()];
    let imp = |x: usize, y: usize| if x <= y { 2 } else { y };
    let mut and = Vec::new();
    let mut or = Vec::new();
    let mut impt = Vec::new();
    for x in 0..3 {
        for y in 0..3 {
            and.push(x.min(y));
            or.push(x.max(y));
            impt.push(imp(x, y));
        }
    }
    let not: Vec<usize> = (0..3).map(|x| imp(x, 0)).collect();
    let mut tables = BTreeMap::new();
    tables.insert("and".into(), and);
    tables.insert("or".into(), or);
    tables.insert("not".into(), not);
    tables.insert("imp".into(), impt);
    tables.insert("top".into(), vec![2]);
    tables.insert("bot".into(), vec![0]);
    FiniteAlgebra::new("H3", sig, carrier, tables).expect("fixed tables are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{enumerate_renamings, enumerate_terms, parse_equation, parse_term};
    use std::collections::BTreeSet;

    fn ctx(names: &[&str]) -> VarContext {
        VarContext::from_names(names)
    }

    fn b2_file() -> String {
        let mut s = String::from("algebra B2 over BOOL\ncarrier 0 1\n");
        let b2 = two_element_boolean();
        for (op, arity) in b2.signature().ops().to_vec() {
            match arity {
                0 => {
                    let v = b2.apply(&op, &[]).unwrap();
                    s.push_str(&format!("op {op}: -> {}\n", b2.element_label(v)));
                }
                1 => {
                    for x in 0..2 {
                        let v = b2.apply(&op, &[x]).unwrap();
                        s.push_str(&format!("op {op}: {x} -> {v}\n"));
                    }
                }
                _ => {
                    for x in 0..2 {
                        for y in 0..2 {
                            let v = b2.apply(&op, &[x, y]).unwrap();
                            s.push_str(&format!("op {op}: {x} {y} -> {v}\n"));
                        }
                    }
                }
            }
        }
        s
    }

    #[test]
    fn parse_algebra_round_trips_the_boolean_tables() {
        let parsed = parse_algebra(&b2_file(), &boolean_signature()).unwrap();
        assert_eq!(parsed, two_element_boolean());
    }

    #[test]
    fn parse_algebra_rejects_partial_and_duplicate_tables() {
        let sig = boolean_signature();
        let mut partial = b2_file();
        // Drop one row of `and`.
        partial = partial.replacen("op and: 0 0 -> 0\n", "", 1);
        assert!(matches!(
            parse_algebra(&partial, &sig).unwrap_err(),
            AlgebraError::PartialTable { expected: 4, got: 3, .. }
        ));
        let mut dup = b2_file();
        dup.push_str("op and: 0 0 -> 1\n");
        assert!(matches!(
            parse_algebra(&dup, &sig).unwrap_err(),
            AlgebraError::DuplicateRow { .. }
        ));
        let mut bad = b2_file();
        bad.push_str("op xor: 0 0 -> 0\n");
        assert!(matches!(
            parse_algebra(&bad, &sig).unwrap_err(),
            AlgebraError::UnknownOp(op) if op == "xor"
        ));
    }

    #[test]
    fn parse_algebra_accepts_a_one_element_algebra() {
        let sig = Signature::new("S", vec![("f".into(), 1), ("c".into(), 0)]).unwrap();
        let src = "algebra One over S\ncarrier e\nop f: e -> e\nop c: -> e\n";
        let one = parse_algebra(src, &sig).unwrap();
        assert_eq!(one.carrier_len(), 1);
    }

    #[test]
    fn evaluate_matches_the_truth_tables() {
        let b2 = two_element_boolean();
        let c = ctx(&["p", "q"]);
        let t = parse_term(b2.signature(), &c, "(and p q)").unwrap();
        let e = Evaluation::new(c.clone(), &b2, vec![1, 0]).unwrap();
        assert_eq!(evaluate(&t, &b2, &e).unwrap(), 0);
        let top = parse_term(b2.signature(), &c, "top").unwrap();
        assert_eq!(evaluate(&top, &b2, &e).unwrap(), 1);
        let p = parse_term(b2.signature(), &c, "p").unwrap();
        assert_eq!(evaluate(&p, &b2, &e).unwrap(), 1);
    }

    #[test]
    fn satisfaction_by_enumeration() {
        let b2 = two_element_boolean();
        let c = ctx(&["p", "q"]);
        let comm = parse_equation(b2.signature(), &c, "(and p q) ~ (and q p)").unwrap();
        let contradiction = parse_equation(b2.signature(), &c, "p ~ (not p)").unwrap();
        for e in enumerate_evaluations(&b2, &c) {
            assert!(satisfies(&b2, &e, &comm).unwrap());
            assert!(!satisfies(&b2, &e, &contradiction).unwrap());
        }
    }

    #[test]
    fn semantic_consequence_examples() {
        let b2 = two_element_boolean();
        let sig = b2.signature().clone();
        let k = AlgebraClass::new(vec![b2]).unwrap();
        let c = ctx(&["p", "q"]);
        let premise = vec![parse_equation(&sig, &c, "p ~ top").unwrap()];
        let conclusion = vec![parse_equation(&sig, &c, "(or p q) ~ top").unwrap()];
        assert!(semantic_consequence(&k, &c, &premise, &conclusion, EVALUATION_BOUND).unwrap());
        assert!(!semantic_consequence(&k, &c, &[], &conclusion, EVALUATION_BOUND).unwrap());
        // Reflexivity and the empty class.
        assert!(semantic_consequence(&k, &c, &conclusion, &conclusion, EVALUATION_BOUND).unwrap());
        let empty = AlgebraClass::new(Vec::new()).unwrap();
        assert!(semantic_consequence(&empty, &c, &[], &conclusion, EVALUATION_BOUND).unwrap());
    }

    #[test]
    fn semantic_consequence_guards_large_contexts() {
        let b2 = two_element_boolean();
        let k = AlgebraClass::new(vec![b2]).unwrap();
        let big = VarContext::from_names(
            &(0..13).map(|i| format!("x{i}")).collect::<Vec<_>>()
                .iter().map(String::as_str).collect::<Vec<_>>(),
        );
        let err = semantic_consequence(&k, &big, &[], &[], 4096).unwrap_err();
        assert!(matches!(err, AlgebraError::SizeGuard { .. }));
    }

    #[test]
    fn evaluation_respects_renaming_exhaustively() {
        // Over all depth <= 2 terms on two source variables, all renamings
        // into two target variables, and all target evaluations into the
        // two-element Boolean algebra.
        let b2 = two_element_boolean();
        let xs = ctx(&["p", "q"]);
        let ys = ctx(&["r", "s"]);
        let terms = enumerate_terms(b2.signature(), &xs, 2);
        let mut checked = 0usize;
        for f in enumerate_renamings(&xs, &ys) {
            for e in enumerate_evaluations(&b2, &ys) {
                let report = renaming_compat_check(&b2, &f, &e, &terms).unwrap();
                assert!(report.pass(), "{:?}", report.failures);
                checked += report.checked;
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn free_algebra_on_one_boolean_generator_has_four_elements() {
        let k = AlgebraClass::new(vec![two_element_boolean()]).unwrap();
        let c = ctx(&["p"]);
        let free = free_algebra(&k, &c, PRODUCT_BOUND).unwrap();
        assert_eq!(free.alg.carrier_len(), 4);
        // Independent oracle: distinct evaluation vectors of terms, with
        // depth stabilization detected by set equality.
        assert_eq!(free.alg.carrier_len(), stabilized_vector_count(&k, &c));
    }

    #[test]
    fn free_algebra_on_two_boolean_generators_has_sixteen_elements() {
        let k = AlgebraClass::new(vec![two_element_boolean()]).unwrap();
        let c = ctx(&["p", "q"]);
        let free = free_algebra(&k, &c, PRODUCT_BOUND).unwrap();
        assert_eq!(free.alg.carrier_len(), 16);
        assert_eq!(free.alg.carrier_len(), stabilized_vector_count(&k, &c));
    }

    #[test]
    fn free_algebra_on_empty_context_closes_the_constants() {
        let k = AlgebraClass::new(vec![two_element_boolean()]).unwrap();
        let c = VarContext::empty();
        let free = free_algebra(&k, &c, PRODUCT_BOUND).unwrap();
        assert_eq!(free.alg.carrier_len(), 2);
    }

    #[test]
    fn free_algebra_sizes_match_the_oracle_with_the_heyting_member() {
        let k = AlgebraClass::new(vec![two_element_boolean(), three_element_heyting()]).unwrap();
        for names in [&["p"][..], &["p", "q"][..]] {
            let c = ctx(names);
            let free = free_algebra(&k, &c, PRODUCT_BOUND).unwrap();
            assert_eq!(free.alg.carrier_len(), stabilized_vector_count(&k, &c), "{names:?}");
        }
    }

    #[test]
    fn free_algebra_over_the_empty_class_is_one_point() {
        let k = AlgebraClass::new(Vec::new()).unwrap();
        let c = ctx(&["p", "q"]);
        let free = free_algebra(&k, &c, PRODUCT_BOUND).unwrap();
        assert_eq!(free.alg.carrier_len(), 1);
        assert_eq!(free.generators, vec![0, 0]);
    }

    #[test]
    fn free_algebra_over_a_one_point_member_is_one_point() {
        let sig = boolean_signature();
        let mut tables = BTreeMap::new();
        for (op, arity) in sig.ops() {
            tables.insert(op.clone(), vec![0; 1usize.pow(*arity as u32)]);
        }
        let one = FiniteAlgebra::new("One", sig, vec!["e".into()], tables).unwrap();
        let k = AlgebraClass::new(vec![one]).unwrap();
        let free = free_algebra(&k, &ctx(&["p"]), PRODUCT_BOUND).unwrap();
        assert_eq!(free.alg.carrier_len(), 1);
        let t = parse_term(&boolean_signature(), &ctx(&["p"]), "(not p)").unwrap();
        assert_eq!(free.lambda(&t).unwrap(), 0);
    }

    #[test]
    fn lambda_is_a_homomorphism_on_the_generated_carrier() {
        let k = AlgebraClass::new(vec![two_element_boolean()]).unwrap();
        let c = ctx(&["p", "q"]);
        let free = free_algebra(&k, &c, PRODUCT_BOUND).unwrap();
        for t in enumerate_terms(free.alg.signature(), &c, 2).iter().take(200) {
            if let Term::App(op, args) = t {
                let arg_images: Vec<usize> =
                    args.iter().map(|a| free.lambda(a).unwrap()).collect();
                assert_eq!(
                    free.lambda(t).unwrap(),
                    free.alg.apply(op, &arg_images).unwrap()
                );
            }
        }
        // Generators are the variable images.
        for (i, v) in c.vars().iter().enumerate() {
            assert_eq!(free.lambda(&Term::var(v)).unwrap(), free.generators[i]);
        }
    }

    #[test]
    fn lt_equality_is_semantic_equality() {
        // The executable heart of the free-algebra construction: two terms
        // have equal images iff they are semantically equal over the class.
        let b2 = two_element_boolean();
        let h3 = three_element_heyting();
        for k in [
            AlgebraClass::new(vec![b2.clone()]).unwrap(),
            AlgebraClass::new(vec![b2.clone(), h3]).unwrap(),
        ] {
            for names in [&["p"][..], &["p", "q"][..]] {
                let c = ctx(names);
                let free = free_algebra(&k, &c, PRODUCT_BOUND).unwrap();
                let terms = enumerate_terms(b2.signature(), &c, 2);
                // Factored exhaustive form over all pairs: two terms are
                // semantically equal iff their evaluation vectors coincide,
                // so the map from vectors to lambda images must be a
                // bijection on the terms swept.
                let mut vec_to_lambda: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
                let mut lambda_to_vec: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for t in &terms {
                    let vector = eval_vector(&k, &c, t);
                    let l = free.lambda(t).unwrap();
                    assert_eq!(*vec_to_lambda.entry(vector.clone()).or_insert(l), l);
                    assert_eq!(*lambda_to_vec.entry(l).or_insert(vector.clone()), vector);
                }
                // Direct slice through the public predicates.
                for phi in terms.iter().take(40) {
                    for psi in terms.iter().take(40) {
                        let eq = Equation { lhs: phi.clone(), rhs: psi.clone() };
                        assert_eq!(
                            lt_equal(&free, phi, psi).unwrap(),
                            semantic_consequence(&k, &c, &[], &[eq], EVALUATION_BOUND).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn free_algebra_is_stable_under_iteration() {
        let k = AlgebraClass::new(vec![two_element_boolean()]).unwrap();
        let c = ctx(&["p", "q"]);
        let first = free_algebra(&k, &c, PRODUCT_BOUND).unwrap();
        let again = free_algebra(
            &AlgebraClass::new(vec![first.alg.clone()]).unwrap(),
            &c,
            PRODUCT_BOUND,
        )
        .unwrap();
        assert_eq!(again.alg.carrier_len(), first.alg.carrier_len());
        // The generator-preserving extension is an isomorphism.
        let iso = hom_from_generators(&again.alg, &again.generators, &first.alg, &first.generators)
            .expect("generator map extends to a homomorphism");
        let distinct: BTreeSet<usize> = iso.iter().copied().collect();
        assert_eq!(distinct.len(), first.alg.carrier_len());
    }

    #[test]
    fn free_algebra_guards_oversized_products() {
        let k = AlgebraClass::new(vec![two_element_boolean()]).unwrap();
        let names: Vec<String> = (0..15).map(|i| format!("x{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let c = VarContext::from_names(&refs);
        assert!(matches!(
            free_algebra(&k, &c, PRODUCT_BOUND).unwrap_err(),
            AlgebraError::SizeGuard { .. }
        ));
    }

    /// Oracle for free algebra sizes: the set of evaluation vectors of
    /// depth-bounded terms, computed level by level on the vectors
    /// themselves (a term of depth d+1 applies one operation to vectors of
    /// depth <= d terms), deepened until the set is literally stable, which
    /// forces closure under every operation.
    fn stabilized_vector_count(k: &AlgebraClass, c: &VarContext) -> usize {
        let sig = k.members()[0].signature().clone();
        let mut level: BTreeSet<Vec<usize>> = c
            .vars()
            .iter()
            .map(|v| eval_vector(k, c, &Term::var(v)))
            .collect();
        for (op, arity) in sig.ops() {
            if *arity == 0 {
                level.insert(eval_vector(k, c, &Term::app(op, Vec::new())));
            }
        }
        loop {
            let mut next = level.clone();
            let pool: Vec<&Vec<usize>> = level.iter().collect();
            for (op, arity) in sig.ops() {
                let mut slots = vec![0usize; *arity];
                if *arity > 0 && pool.is_empty() {
                    continue;
                }
                loop {
                    let vector: Vec<usize> = apply_componentwise(k, c, op, &slots, &pool);
                    next.insert(vector);
                    let mut j = *arity;
                    loop {
                        if j == 0 {
                            break;
                        }
                        j -= 1;
                        slots[j] += 1;
                        if slots[j] < pool.len() {
                            break;
                        }
                        slots[j] = 0;
                    }
                    if *arity == 0 || (j == 0 && slots[0] == 0) {
                        break;
                    }
                }
            }
            if next == level {
                return level.len();
            }
            level = next;
        }
    }

    fn apply_componentwise(
        k: &AlgebraClass,
        c: &VarContext,
        op: &str,
        slots: &[usize],
        pool: &[&Vec<usize>],
    ) -> Vec<usize> {
        let mut out = Vec::new();
        let mut col = 0usize;
        for member in k.members() {
            for _ in 0..member.carrier_len().pow(c.len() as u32) {
                let args: Vec<usize> = slots.iter().map(|&s| pool[s][col]).collect();
                out.push(member.apply(op, &args).unwrap());
                col += 1;
            }
        }
        out
    }

    fn eval_vector(k: &AlgebraClass, c: &VarContext, t: &Term) -> Vec<usize> {
        let mut v = Vec::new();
        for member in k.members() {
            for e in enumerate_evaluations(member, c) {
                v.push(evaluate(t, member, &e).unwrap());
            }
        }
        v
    }
}
