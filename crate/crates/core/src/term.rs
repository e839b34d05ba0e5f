//! Signatures, variable contexts, and first-order terms without binders.
//!
//! Terms are ordinary trees over a finite signature of ranked operation
//! symbols. Variables are named identifiers drawn from an ordered context,
//! renamings relabel variables, and substitutions map variables to whole
//! terms. Everything here is deterministic: enumeration orders are part of
//! the contract, not an accident of iteration.

use std::fmt;

use thiserror::Error;

/// Errors raised by signature, context, and term construction or parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid identifier {0:?} (expected [A-Za-z0-9_]+)")]
    InvalidIdent(String),
    #[error("duplicate operation symbol {0:?}")]
    DuplicateOp(String),
    #[error("duplicate context variable {0:?}")]
    DuplicateVar(String),
    #[error("variable {0:?} collides with an operation symbol")]
    VarShadowsOp(String),
    #[error("unknown variable {0:?}")]
    UnknownVar(String),
    #[error("operation {op:?} expects {expected} argument(s), got {got}")]
    ArityMismatch {
        op: String,
        expected: usize,
        got: usize,
    },
    #[error("variable {0:?} used in operation position")]
    VarApplied(String),
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("context mismatch: expected {expected:?}, found {found:?}")]
    ContextMismatch { expected: Vec<String>, found: Vec<String> },
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
}

pub(crate) fn is_ident(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A finite signature: an ordered list of operation symbols with arities.
///
/// The declaration order matters; term enumeration visits operations in this
/// order, so two signatures with the same symbols in different order are
/// different objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    name: String,
    ops: Vec<(String, usize)>,
}

impl Signature {
    pub fn new(
        name: impl Into<String>,
        ops: Vec<(String, usize)>,
    ) -> Result<Signature, TermError> {
        let name = name.into();
        if !is_ident(&name) {
            return Err(TermError::InvalidIdent(name));
        }
        for (i, (sym, _)) in ops.iter().enumerate() {
            if !is_ident(sym) {
                return Err(TermError::InvalidIdent(sym.clone()));
            }
            if ops[..i].iter().any(|(s, _)| s == sym) {
                return Err(TermError::DuplicateOp(sym.clone()));
            }
        }
        Ok(Signature { name, ops })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Operations in declaration order.
    pub fn ops(&self) -> &[(String, usize)] {
        &self.ops
    }

    pub fn arity(&self, sym: &str) -> Option<usize> {
        self.ops.iter().find(|(s, _)| s == sym).map(|(_, a)| *a)
    }

    pub fn is_op(&self, sym: &str) -> bool {
        self.arity(sym).is_some()
    }
}

/// Parse a signature file.
///
/// Line-oriented grammar: a `signature <IDENT>` header followed by
/// `op <IDENT> <NONNEG-INT>` lines. Blank lines and `#` comments are
/// ignored. Errors carry 1-based line numbers.
pub fn parse_signature(src: &str) -> Result<Signature, TermError> {
    let mut name: Option<String> = None;
    let mut ops: Vec<(String, usize)> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = strip_comment(raw);
        let mut words = text.split_whitespace();
        let Some(head) = words.next() else { continue };
        match head {
            "signature" => {
                if name.is_some() {
                    return Err(TermError::File {
                        line,
                        message: "duplicate signature header".into(),
                    });
                }
                let ident = words.next().ok_or_else(|| TermError::File {
                    line,
                    message: "expected `signature <IDENT>`".into(),
                })?;
                expect_end(words, line)?;
                name = Some(ident.to_string());
            }
            "op" => {
                if name.is_none() {
                    return Err(TermError::File {
                        line,
                        message: "`op` before `signature` header".into(),
                    });
                }
                let sym = words.next().ok_or_else(|| TermError::File {
                    line,
                    message: "expected `op <IDENT> <NONNEG-INT>`".into(),
                })?;
                let arity_tok = words.next().ok_or_else(|| TermError::File {
                    line,
                    message: format!("missing arity for operation {sym:?}"),
                })?;
                let arity: usize = arity_tok.parse().map_err(|_| TermError::File {
                    line,
                    message: format!("invalid arity {arity_tok:?}"),
                })?;
                expect_end(words, line)?;
                ops.push((sym.to_string(), arity));
            }
            other => {
                return Err(TermError::File {
                    line,
                    message: format!("unexpected directive {other:?}"),
                });
            }
        }
    }
    let name = name.ok_or_else(|| TermError::File {
        line: src.lines().count().max(1),
        message: "missing `signature <IDENT>` header".into(),
    })?;
    Signature::new(name, ops).map_err(|e| TermError::File {
        line: 1,
        message: e.to_string(),
    })
}

pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

pub(crate) fn expect_end<'a>(
    mut words: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<(), TermError> {
    match words.next() {
        None => Ok(()),
        Some(tok) => Err(TermError::File {
            line,
            message: format!("unexpected trailing token {tok:?}"),
        }),
    }
}

/// An ordered list of distinct variable names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarContext {
    vars: Vec<String>,
}

impl VarContext {
    pub fn new(vars: Vec<String>) -> Result<VarContext, TermError> {
        for (i, v) in vars.iter().enumerate() {
            if !is_ident(v) {
                return Err(TermError::InvalidIdent(v.clone()));
            }
            if vars[..i].iter().any(|w| w == v) {
                return Err(TermError::DuplicateVar(v.clone()));
            }
        }
        Ok(VarContext { vars })
    }

    pub fn from_names(names: &[&str]) -> VarContext {
        VarContext::new(names.iter().map(|s| s.to_string()).collect())
            .expect("invalid fixed context")
    }

    pub fn empty() -> VarContext {
        VarContext { vars: Vec::new() }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Context variables must not shadow operation symbols.
    pub fn check_disjoint(&self, sig: &Signature) -> Result<(), TermError> {
        match self.vars.iter().find(|v| sig.is_op(v)) {
            Some(v) => Err(TermError::VarShadowsOp(v.clone())),
            None => Ok(()),
        }
    }
}

/// A term: a variable or an operation applied to argument terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(op: &str, args: Vec<Term>) -> Term {
        Term::App(op.to_string(), args)
    }

    /// Nesting depth: variables and constants have depth 0, an application
    /// has depth one more than its deepest argument.
    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => match args.iter().map(Term::depth).max() {
                Some(d) => 1 + d,
                None => 0,
            },
        }
    }

    /// Variables in order of first occurrence (left to right).
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.iter().any(|w| w == v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }
}

/// Check that a term is well formed over a signature and context: every
/// application head is a declared operation used at its declared arity, and
/// every variable is in the context.
pub fn check_term(sig: &Signature, ctx: &VarContext, t: &Term) -> Result<(), TermError> {
    match t {
        Term::Var(v) => {
            if sig.is_op(v) {
                return Err(TermError::VarShadowsOp(v.clone()));
            }
            if ctx.index_of(v).is_none() {
                return Err(TermError::UnknownVar(v.clone()));
            }
            Ok(())
        }
        Term::App(op, args) => {
            let Some(arity) = sig.arity(op) else {
                return Err(TermError::VarApplied(op.clone()));
            };
            if arity != args.len() {
                return Err(TermError::ArityMismatch {
                    op: op.clone(),
                    expected: arity,
                    got: args.len(),
                });
            }
            for a in args {
                check_term(sig, ctx, a)?;
            }
            Ok(())
        }
    }
}

/// Canonical printed form: variables bare, nullary operations bare, and
/// `(op arg ...)` otherwise. Printing is injective on well-formed terms and
/// round-trips through [`parse_term`].
pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    write_term(t, &mut s);
    s
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::App(op, args) if args.is_empty() => out.push_str(op),
        Term::App(op, args) => {
            out.push('(');
            out.push_str(op);
            for a in args {
                out.push(' ');
                write_term(a, out);
            }
            out.push(')');
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Open(usize),
    Close(usize),
    Ident(usize, String),
}

fn tokenize(src: &str) -> Result<Vec<Token>, TermError> {
    let mut tokens = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            chars.next();
            tokens.push(Token::Open(pos));
        } else if c == ')' {
            chars.next();
            tokens.push(Token::Close(pos));
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let mut ident = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            tokens.push(Token::Ident(pos, ident));
        } else {
            return Err(TermError::Parse {
                offset: pos,
                message: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(tokens)
}

/// Every identifier occurring in a term source, in textual order and with
/// repeats. Used to discover schematic variables before parsing.
pub(crate) fn scan_idents(src: &str) -> Vec<String> {
    match tokenize(src) {
        Ok(tokens) => tokens
            .into_iter()
            .filter_map(|t| match t {
                Token::Ident(_, s) => Some(s),
                _ => None,
            })
            .collect(),
        Err(_) => Vec::new(),
    }
}

/// Build a context from the variables mentioned in the given term sources,
/// in order of first occurrence. An identifier counts as a variable exactly
/// when the signature does not declare it as an operation.
pub fn infer_context(sig: &Signature, sources: &[&str]) -> Result<VarContext, TermError> {
    let mut vars: Vec<String> = Vec::new();
    for src in sources {
        for ident in scan_idents(src) {
            if !sig.is_op(&ident) && !vars.contains(&ident) {
                vars.push(ident);
            }
        }
    }
    VarContext::new(vars)
}

/// Parse a term in prefix form: `TERM := IDENT | "(" IDENT TERM* ")"`.
///
/// An identifier is an operation exactly when the signature declares it;
/// otherwise it must be a context variable. Nullary operations are written
/// bare (`top`, not `(top)`), though the parenthesised form is accepted.
pub fn parse_term(sig: &Signature, ctx: &VarContext, src: &str) -> Result<Term, TermError> {
    let tokens = tokenize(src)?;
    let mut pos = 0;
    let t = parse_at(sig, ctx, &tokens, &mut pos, src.len())?;
    if pos != tokens.len() {
        let offset = token_offset(&tokens[pos]);
        return Err(TermError::Parse {
            offset,
            message: "trailing input after term".into(),
        });
    }
    Ok(t)
}

fn token_offset(tok: &Token) -> usize {
    match tok {
        Token::Open(p) | Token::Close(p) => *p,
        Token::Ident(p, _) => *p,
    }
}

fn parse_at(
    sig: &Signature,
    ctx: &VarContext,
    tokens: &[Token],
    pos: &mut usize,
    end: usize,
) -> Result<Term, TermError> {
    match tokens.get(*pos) {
        None => Err(TermError::Parse {
            offset: end,
            message: "unexpected end of input".into(),
        }),
        Some(Token::Close(p)) => Err(TermError::Parse {
            offset: *p,
            message: "unexpected `)`".into(),
        }),
        Some(Token::Ident(p, ident)) => {
            *pos += 1;
            classify_leaf(sig, ctx, ident, *p)
        }
        Some(Token::Open(open_pos)) => {
            *pos += 1;
            let Some(Token::Ident(_, head)) = tokens.get(*pos) else {
                return Err(TermError::Parse {
                    offset: *open_pos,
                    message: "expected operation symbol after `(`".into(),
                });
            };
            let head = head.clone();
            let Some(arity) = sig.arity(&head) else {
                return Err(TermError::Parse {
                    offset: token_offset(&tokens[*pos]),
                    message: format!("identifier {head:?} is not an operation"),
                });
            };
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some(Token::Close(_)) => {
                        *pos += 1;
                        break;
                    }
                    None => {
                        return Err(TermError::Parse {
                            offset: end,
                            message: "missing `)`".into(),
                        });
                    }
                    _ => args.push(parse_at(sig, ctx, tokens, pos, end)?),
                }
            }
            if args.len() != arity {
                return Err(TermError::ArityMismatch {
                    op: head,
                    expected: arity,
                    got: args.len(),
                });
            }
            Ok(Term::App(head, args))
        }
    }
}

fn classify_leaf(
    sig: &Signature,
    ctx: &VarContext,
    ident: &str,
    offset: usize,
) -> Result<Term, TermError> {
    if let Some(arity) = sig.arity(ident) {
        if arity != 0 {
            return Err(TermError::ArityMismatch {
                op: ident.to_string(),
                expected: arity,
                got: 0,
            });
        }
        return Ok(Term::App(ident.to_string(), Vec::new()));
    }
    if ctx.index_of(ident).is_some() {
        return Ok(Term::Var(ident.to_string()));
    }
    Err(TermError::Parse {
        offset,
        message: format!("identifier {ident:?} is neither an operation nor in the context"),
    })
}

/// A total relabelling of variables from one context into another.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Renaming {
    source: VarContext,
    target: VarContext,
    /// `images[i]` is the target index of the image of `source.vars()[i]`.
    images: Vec<usize>,
}

impl Renaming {
    pub fn new(
        source: VarContext,
        target: VarContext,
        images: Vec<usize>,
    ) -> Result<Renaming, TermError> {
        if images.len() != source.len() {
            return Err(TermError::ContextMismatch {
                expected: source.vars().to_vec(),
                found: images.iter().map(|i| i.to_string()).collect(),
            });
        }
        if let Some(&bad) = images.iter().find(|&&i| i >= target.len()) {
            return Err(TermError::UnknownVar(format!("#{bad}")));
        }
        Ok(Renaming {
            source,
            target,
            images,
        })
    }

    /// Build from `source var -> target var` name pairs; every source
    /// variable must be assigned exactly once.
    pub fn from_pairs(
        source: VarContext,
        target: VarContext,
        pairs: &[(&str, &str)],
    ) -> Result<Renaming, TermError> {
        let mut images = vec![usize::MAX; source.len()];
        for (from, to) in pairs {
            let i = source
                .index_of(from)
                .ok_or_else(|| TermError::UnknownVar(from.to_string()))?;
            let j = target
                .index_of(to)
                .ok_or_else(|| TermError::UnknownVar(to.to_string()))?;
            images[i] = j;
        }
        if let Some(i) = images.iter().position(|&j| j == usize::MAX) {
            return Err(TermError::UnknownVar(source.vars()[i].clone()));
        }
        Renaming::new(source, target, images)
    }

    pub fn identity(ctx: &VarContext) -> Renaming {
        Renaming {
            source: ctx.clone(),
            target: ctx.clone(),
            images: (0..ctx.len()).collect(),
        }
    }

    pub fn source(&self) -> &VarContext {
        &self.source
    }

    pub fn target(&self) -> &VarContext {
        &self.target
    }

    pub fn image_indices(&self) -> &[usize] {
        &self.images
    }

    pub fn apply_var(&self, name: &str) -> Result<&str, TermError> {
        let i = self
            .source
            .index_of(name)
            .ok_or_else(|| TermError::UnknownVar(name.to_string()))?;
        Ok(&self.target.vars()[self.images[i]])
    }

    /// Composition in diagram order: apply `self`, then `other`.
    pub fn then(&self, other: &Renaming) -> Result<Renaming, TermError> {
        if self.target != other.source {
            return Err(TermError::ContextMismatch {
                expected: self.target.vars().to_vec(),
                found: other.source.vars().to_vec(),
            });
        }
        let images = self.images.iter().map(|&i| other.images[i]).collect();
        Renaming::new(self.source.clone(), other.target.clone(), images)
    }

    /// The substitution sending each variable to its renamed variable.
    pub fn to_substitution(&self) -> TermSubstitution {
        let images = self
            .images
            .iter()
            .map(|&i| Term::Var(self.target.vars()[i].clone()))
            .collect();
        TermSubstitution {
            source: self.source.clone(),
            target: self.target.clone(),
            images,
        }
    }
}

/// Apply a renaming to every variable of a term.
pub fn rename(t: &Term, f: &Renaming) -> Result<Term, TermError> {
    match t {
        Term::Var(v) => Ok(Term::Var(f.apply_var(v)?.to_string())),
        Term::App(op, args) => {
            let args = args
                .iter()
                .map(|a| rename(a, f))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::App(op.clone(), args))
        }
    }
}

/// A total map from source variables to terms over the target context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermSubstitution {
    source: VarContext,
    target: VarContext,
    images: Vec<Term>,
}

impl TermSubstitution {
    pub fn new(
        source: VarContext,
        target: VarContext,
        images: Vec<Term>,
    ) -> Result<TermSubstitution, TermError> {
        if images.len() != source.len() {
            return Err(TermError::ContextMismatch {
                expected: source.vars().to_vec(),
                found: images.iter().map(print_term).collect(),
            });
        }
        Ok(TermSubstitution {
            source,
            target,
            images,
        })
    }

    /// The unit substitution `x -> x`.
    pub fn unit(ctx: &VarContext) -> TermSubstitution {
        TermSubstitution {
            source: ctx.clone(),
            target: ctx.clone(),
            images: ctx.vars().iter().map(|v| Term::Var(v.clone())).collect(),
        }
    }

    pub fn source(&self) -> &VarContext {
        &self.source
    }

    pub fn target(&self) -> &VarContext {
        &self.target
    }

    pub fn images(&self) -> &[Term] {
        &self.images
    }

    pub fn apply_var(&self, name: &str) -> Result<&Term, TermError> {
        let i = self
            .source
            .index_of(name)
            .ok_or_else(|| TermError::UnknownVar(name.to_string()))?;
        Ok(&self.images[i])
    }

    /// Kleisli composition in diagram order: `(self.then(rho))(x)` is
    /// `substitute(self(x), rho)`.
    pub fn then(&self, rho: &TermSubstitution) -> Result<TermSubstitution, TermError> {
        if self.target != rho.source {
            return Err(TermError::ContextMismatch {
                expected: self.target.vars().to_vec(),
                found: rho.source.vars().to_vec(),
            });
        }
        let images = self
            .images
            .iter()
            .map(|t| substitute(t, rho))
            .collect::<Result<Vec<_>, _>>()?;
        TermSubstitution::new(self.source.clone(), rho.target.clone(), images)
    }
}

/// Substitute every variable of a term by its image, leaving operations in
/// place. This is the primitive; composition of substitutions and flattening
/// of nested terms both reduce to it.
pub fn substitute(t: &Term, sigma: &TermSubstitution) -> Result<Term, TermError> {
    match t {
        Term::Var(v) => sigma.apply_var(v).cloned(),
        Term::App(op, args) => {
            let args = args
                .iter()
                .map(|a| substitute(a, sigma))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Term::App(op.clone(), args))
        }
    }
}

/// An equation between two terms over a shared context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Equation {
        Equation { lhs, rhs }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ~ {}", self.lhs, self.rhs)
    }
}

/// Parse `<TERM> ~ <TERM>`.
pub fn parse_equation(sig: &Signature, ctx: &VarContext, src: &str) -> Result<Equation, TermError> {
    let Some(split) = src.find('~') else {
        return Err(TermError::Parse {
            offset: src.len(),
            message: "expected `~` between the sides of an equation".into(),
        });
    };
    if src[split + 1..].contains('~') {
        return Err(TermError::Parse {
            offset: split,
            message: "more than one `~` in equation".into(),
        });
    }
    let lhs = parse_term(sig, ctx, &src[..split])?;
    let rhs = parse_term(sig, ctx, &src[split + 1..]).map_err(|e| shift_offset(e, split + 1))?;
    Ok(Equation { lhs, rhs })
}

fn shift_offset(e: TermError, by: usize) -> TermError {
    match e {
        TermError::Parse { offset, message } => TermError::Parse {
            offset: offset + by,
            message,
        },
        other => other,
    }
}

pub fn subst_equation(eq: &Equation, sigma: &TermSubstitution) -> Result<Equation, TermError> {
    Ok(Equation {
        lhs: substitute(&eq.lhs, sigma)?,
        rhs: substitute(&eq.rhs, sigma)?,
    })
}

pub fn rename_equation(eq: &Equation, f: &Renaming) -> Result<Equation, TermError> {
    Ok(Equation {
        lhs: rename(&eq.lhs, f)?,
        rhs: rename(&eq.rhs, f)?,
    })
}

/// A sequent: finitely many antecedent and succedent terms over one context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub antecedents: Vec<Term>,
    pub succedents: Vec<Term>,
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |ts: &[Term]| {
            ts.iter()
                .map(print_term)
                .collect::<Vec<_>>()
                .join(", ")
        };
        write!(f, "{} => {}", side(&self.antecedents), side(&self.succedents))
    }
}

pub fn subst_sequent(s: &Sequent, sigma: &TermSubstitution) -> Result<Sequent, TermError> {
    let map = |ts: &[Term]| -> Result<Vec<Term>, TermError> {
        ts.iter().map(|t| substitute(t, sigma)).collect()
    };
    Ok(Sequent {
        antecedents: map(&s.antecedents)?,
        succedents: map(&s.succedents)?,
    })
}

pub fn rename_sequent(s: &Sequent, f: &Renaming) -> Result<Sequent, TermError> {
    let map = |ts: &[Term]| -> Result<Vec<Term>, TermError> {
        ts.iter().map(|t| rename(t, f)).collect()
    };
    Ok(Sequent {
        antecedents: map(&s.antecedents)?,
        succedents: map(&s.succedents)?,
    })
}

/// All terms of depth at most `depth`, in the canonical order.
///
/// The order is: context variables first (context order), then one block per
/// operation in signature order, each block listing `op` applied to every
/// tuple of previously enumerated depth `< depth` terms in lexicographic
/// tuple order. The depth-`d` listing is a subsequence of the depth-`d+1`
/// listing, and its length obeys the counting recurrence in [`count_terms`].
pub fn enumerate_terms(sig: &Signature, ctx: &VarContext, depth: usize) -> Vec<Term> {
    let mut level: Vec<Term> = Vec::new();
    for d in 0..=depth {
        let mut next: Vec<Term> = ctx.vars().iter().map(|v| Term::Var(v.clone())).collect();
        for (op, arity) in sig.ops() {
            if d == 0 {
                if *arity == 0 {
                    next.push(Term::App(op.clone(), Vec::new()));
                }
                continue;
            }
            if *arity > 0 && level.is_empty() {
                continue;
            }
            let mut tuple = vec![0usize; *arity];
            loop {
                next.push(Term::App(
                    op.clone(),
                    tuple.iter().map(|&i| level[i].clone()).collect(),
                ));
                // Advance the rightmost digit of the argument tuple.
                let mut k = *arity;
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    tuple[k] += 1;
                    if tuple[k] < level.len() {
                        break;
                    }
                    tuple[k] = 0;
                }
                if *arity == 0 || (k == 0 && tuple[0] == 0) {
                    break;
                }
            }
        }
        level = next;
    }
    level
}

/// Number of terms of depth at most `depth`, computed by the recurrence
/// `N(0) = |ctx| + #nullary` and `N(d+1) = |ctx| + sum over ops of
/// N(d)^arity`. This is the coefficient count of the depth-stratified
/// decomposition of the term functor, and serves as an independent check on
/// [`enumerate_terms`].
pub fn count_terms(sig: &Signature, ctx_len: usize, depth: usize) -> u128 {
    let mut n: u128 = ctx_len as u128
        + sig.ops().iter().filter(|(_, a)| *a == 0).count() as u128;
    for _ in 0..depth {
        let mut next = ctx_len as u128;
        for (_, arity) in sig.ops() {
            next += n.pow(*arity as u32);
        }
        n = next;
    }
    n
}

/// All renamings from `source` to `target`, in lexicographic order of their
/// image tuples (first source variable most significant). There are
/// `|target|^|source|` of them; in particular none when the source is
/// nonempty and the target is empty.
pub fn enumerate_renamings(source: &VarContext, target: &VarContext) -> Vec<Renaming> {
    let n = source.len();
    let m = target.len();
    if n > 0 && m == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut images = vec![0usize; n];
    loop {
        out.push(Renaming {
            source: source.clone(),
            target: target.clone(),
            images: images.clone(),
        });
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            images[k] += 1;
            if images[k] < m {
                break;
            }
            images[k] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bool_sig() -> Signature {
        Signature::new(
            "BOOL",
            vec![
                ("and".into(), 2),
                ("not".into(), 1),
                ("top".into(), 0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn signature_rejects_duplicate_ops() {
        let err = Signature::new("S", vec![("f".into(), 1), ("f".into(), 2)]).unwrap_err();
        assert_eq!(err, TermError::DuplicateOp("f".into()));
    }

    #[test]
    fn parse_signature_file() {
        let src = "# booleans\nsignature BOOL\nop and 2\nop not 1\nop top 0\n";
        let sig = parse_signature(src).unwrap();
        assert_eq!(sig.name(), "BOOL");
        assert_eq!(sig.arity("and"), Some(2));
        assert_eq!(sig.arity("top"), Some(0));
        assert!(!sig.is_op("p"));
    }

    #[test]
    fn parse_signature_reports_line_numbers() {
        let err = parse_signature("signature S\nop f two\n").unwrap_err();
        assert_eq!(
            err,
            TermError::File {
                line: 2,
                message: "invalid arity \"two\"".into()
            }
        );
    }

    #[test]
    fn parse_term_examples() {
        let sig = bool_sig();
        let ctx = VarContext::from_names(&["p", "q"]);
        let t = parse_term(&sig, &ctx, "(and p (not q))").unwrap();
        assert_eq!(
            t,
            Term::app("and", vec![Term::var("p"), Term::app("not", vec![Term::var("q")])])
        );
        // Nullary operations parse bare.
        assert_eq!(parse_term(&sig, &ctx, "top").unwrap(), Term::app("top", vec![]));
        // The parenthesised nullary form is accepted but prints bare.
        let t = parse_term(&sig, &ctx, "(top)").unwrap();
        assert_eq!(print_term(&t), "top");
    }

    #[test]
    fn parse_term_rejects_bad_arity_and_unknown_idents() {
        let sig = bool_sig();
        let ctx = VarContext::from_names(&["p"]);
        assert!(matches!(
            parse_term(&sig, &ctx, "(not p p)").unwrap_err(),
            TermError::ArityMismatch { expected: 1, got: 2, .. }
        ));
        assert!(matches!(
            parse_term(&sig, &ctx, "(and p r)").unwrap_err(),
            TermError::Parse { .. }
        ));
        // A bare non-nullary operation is an arity error, not a variable.
        assert!(matches!(
            parse_term(&sig, &ctx, "and").unwrap_err(),
            TermError::ArityMismatch { expected: 2, got: 0, .. }
        ));
        // Variables cannot head an application.
        assert!(matches!(
            parse_term(&sig, &ctx, "(p)").unwrap_err(),
            TermError::Parse { .. }
        ));
    }

    #[test]
    fn print_is_canonical() {
        let sig = bool_sig();
        let ctx = VarContext::from_names(&["p", "q"]);
        let t = parse_term(&sig, &ctx, "  (and   p (not q) ) ").unwrap();
        assert_eq!(print_term(&t), "(and p (not q))");
    }

    #[test]
    fn depth_convention() {
        let sig = bool_sig();
        let ctx = VarContext::from_names(&["p"]);
        assert_eq!(parse_term(&sig, &ctx, "p").unwrap().depth(), 0);
        assert_eq!(parse_term(&sig, &ctx, "top").unwrap().depth(), 0);
        assert_eq!(parse_term(&sig, &ctx, "(not top)").unwrap().depth(), 1);
        assert_eq!(parse_term(&sig, &ctx, "(and p (not p))").unwrap().depth(), 2);
    }

    #[test]
    fn rename_and_substitute() {
        let sig = bool_sig();
        let xs = VarContext::from_names(&["p", "q"]);
        let ys = VarContext::from_names(&["q"]);
        let f = Renaming::from_pairs(xs.clone(), ys.clone(), &[("p", "q"), ("q", "q")]).unwrap();
        let t = parse_term(&sig, &xs, "(and p (not q))").unwrap();
        assert_eq!(print_term(&rename(&t, &f).unwrap()), "(and q (not q))");

        let sigma = TermSubstitution::new(
            VarContext::from_names(&["p"]),
            xs.clone(),
            vec![parse_term(&sig, &xs, "(and q q)").unwrap()],
        )
        .unwrap();
        let u = parse_term(&sig, &VarContext::from_names(&["p"]), "(not p)").unwrap();
        assert_eq!(print_term(&substitute(&u, &sigma).unwrap()), "(not (and q q))");
    }

    #[test]
    fn substitute_on_empty_context_is_total() {
        let sig = bool_sig();
        let empty = VarContext::empty();
        let sigma = TermSubstitution::unit(&empty);
        let t = parse_term(&sig, &empty, "(not top)").unwrap();
        assert_eq!(substitute(&t, &sigma).unwrap(), t);
    }

    #[test]
    fn enumerate_terms_single_unary_op() {
        let sig = Signature::new("S", vec![("not".into(), 1)]).unwrap();
        let ctx = VarContext::from_names(&["p"]);
        let terms = enumerate_terms(&sig, &ctx, 2);
        let printed: Vec<String> = terms.iter().map(print_term).collect();
        assert_eq!(printed, vec!["p", "(not p)", "(not (not p))"]);
    }

    #[test]
    fn enumerate_terms_depth_zero_order() {
        let sig = bool_sig();
        let ctx = VarContext::from_names(&["p"]);
        let printed: Vec<String> = enumerate_terms(&sig, &ctx, 0).iter().map(print_term).collect();
        assert_eq!(printed, vec!["p", "top"]);
    }

    #[test]
    fn enumerate_terms_matches_counting_recurrence() {
        let sig = bool_sig();
        for ctx_names in [&[][..], &["p"][..], &["p", "q"][..]] {
            let ctx = VarContext::from_names(ctx_names);
            for depth in 0..=2 {
                let ts = enumerate_terms(&sig, &ctx, depth);
                assert_eq!(
                    ts.len() as u128,
                    count_terms(&sig, ctx.len(), depth),
                    "ctx {ctx_names:?} depth {depth}"
                );
                // No duplicates, and nothing deeper than requested.
                let mut seen = std::collections::BTreeSet::new();
                for t in &ts {
                    assert!(t.depth() <= depth);
                    assert!(seen.insert(t.clone()));
                }
            }
        }
    }

    #[test]
    fn enumerate_terms_is_prefix_respecting() {
        let sig = bool_sig();
        let ctx = VarContext::from_names(&["p", "q"]);
        for depth in 0..2 {
            let small = enumerate_terms(&sig, &ctx, depth);
            let big = enumerate_terms(&sig, &ctx, depth + 1);
            // The smaller listing embeds into the larger one in order.
            let mut it = big.iter();
            for t in &small {
                assert!(it.any(|u| u == t), "{t} lost at depth {}", depth + 1);
            }
        }
    }

    #[test]
    fn empty_context_without_constants_has_no_terms() {
        let sig = Signature::new("S", vec![("f".into(), 2)]).unwrap();
        let ctx = VarContext::empty();
        for depth in 0..=3 {
            assert!(enumerate_terms(&sig, &ctx, depth).is_empty());
            assert_eq!(count_terms(&sig, 0, depth), 0);
        }
    }

    #[test]
    fn enumerate_renamings_lexicographic() {
        let xs = VarContext::from_names(&["x1", "x2"]);
        let ys = VarContext::from_names(&["y1", "y2"]);
        let fs = enumerate_renamings(&xs, &ys);
        assert_eq!(fs.len(), 4);
        let images: Vec<Vec<usize>> = fs.iter().map(|f| f.image_indices().to_vec()).collect();
        assert_eq!(images, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        // No renamings into an empty context from a nonempty one.
        assert!(enumerate_renamings(&xs, &VarContext::empty()).is_empty());
        // Exactly the empty renaming from an empty context.
        assert_eq!(enumerate_renamings(&VarContext::empty(), &ys).len(), 1);
    }

    #[test]
    fn equations_and_sequents_substitute_componentwise() {
        let sig = bool_sig();
        let xs = VarContext::from_names(&["p"]);
        let ys = VarContext::from_names(&["q"]);
        let eq = parse_equation(&sig, &xs, "(not p) ~ top").unwrap();
        let sigma = TermSubstitution::new(
            xs.clone(),
            ys.clone(),
            vec![parse_term(&sig, &ys, "(and q q)").unwrap()],
        )
        .unwrap();
        let eq2 = subst_equation(&eq, &sigma).unwrap();
        assert_eq!(eq2.to_string(), "(not (and q q)) ~ top");

        let s = Sequent {
            antecedents: vec![Term::var("p")],
            succedents: vec![parse_term(&sig, &xs, "(not p)").unwrap()],
        };
        let s2 = subst_sequent(&s, &sigma).unwrap();
        assert_eq!(s2.to_string(), "(and q q) => (not (and q q))");
    }

    // Strategy for arbitrary well-formed terms over BOOL and {p, q}.
    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::var("p")),
            Just(Term::var("q")),
            Just(Term::app("top", vec![])),
        ];
        leaf.prop_recursive(3, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::app("not", vec![t])),
                (inner.clone(), inner).prop_map(|(a, b)| Term::app("and", vec![a, b])),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(t in arb_term()) {
            let sig = bool_sig();
            let ctx = VarContext::from_names(&["p", "q"]);
            let back = parse_term(&sig, &ctx, &print_term(&t)).unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn unit_substitution_is_identity(t in arb_term()) {
            let ctx = VarContext::from_names(&["p", "q"]);
            let unit = TermSubstitution::unit(&ctx);
            prop_assert_eq!(substitute(&t, &unit).unwrap(), t);
        }

        #[test]
        fn renaming_matches_its_substitution(t in arb_term()) {
            let xs = VarContext::from_names(&["p", "q"]);
            let ys = VarContext::from_names(&["q", "p"]);
            for f in enumerate_renamings(&xs, &ys) {
                prop_assert_eq!(
                    rename(&t, &f).unwrap(),
                    substitute(&t, &f.to_substitution()).unwrap()
                );
            }
        }
    }
}
