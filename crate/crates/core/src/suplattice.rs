//! Finite suplattices: posets in which every subset, including the empty
//! one, has a least upper bound.
//!
//! Elements are indices into an ordered label list and the order relation is
//! stored as explicit bit rows, so joins and meets are computed by scanning
//! bound sets rather than by clever algebra. Join-preserving maps, closure
//! operators, consequence relations, and surjective quotients are separate
//! types, each validated at construction; the conversion functions between
//! them implement the standard bijections and are exercised exhaustively by
//! the test suites.

#![allow(clippy::needless_range_loop)]

use std::fmt;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("duplicate element label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("not a suplattice: {0}")]
    Invalid(SupLatticeReport),
    #[error("map assigns out-of-range element {0}")]
    OutOfRange(usize),
    #[error("map does not preserve joins: f({x} v {y}) = {got}, join of images = {want}")]
    NotJoinPreserving { x: String, y: String, got: String, want: String },
    #[error("map does not preserve the empty join: f(bottom) = {0}")]
    BottomNotPreserved(String),
    #[error("map is not monotone at {x} <= {y}")]
    NotMonotone { x: String, y: String },
    #[error("map does not preserve meets: g({x} ^ {y}) = {got}, meet of images = {want}")]
    NotMeetPreserving { x: String, y: String, got: String, want: String },
    #[error("map does not preserve the empty meet: g(top) = {0}")]
    TopNotPreserved(String),
    #[error("operator is not extensive at {0}")]
    NotExtensive(String),
    #[error("operator is not idempotent at {0}")]
    NotIdempotent(String),
    #[error("morphism is not surjective: {0} has no preimage")]
    NotSurjective(String),
    #[error("consequence relation is not reflexive at {0}")]
    ConsequenceNotReflexive(String),
    #[error("consequence relation is not transitive: {x} |- {y} |- {z} but not {x} |- {z}")]
    ConsequenceNotTransitive { x: String, y: String, z: String },
    #[error("consequence relation omits the order pair {x} |- {y} (where {y} <= {x})")]
    ConsequenceMissingOrderPair { x: String, y: String },
    #[error("consequence relation violates the join condition at {x}: join of consequences is {join} but {x} |- {join} fails")]
    ConsequenceJoinEscape { x: String, join: String },
    #[error("source/target mismatch between composed maps")]
    CompositionMismatch,
    #[error("{what} has {size} elements, above the bound {bound}")]
    SizeGuard { what: String, size: usize, bound: usize },
    #[error("quotient target differs from morphism target")]
    QuotientTargetMismatch,
    #[error("line {line}: {message}")]
    File { line: usize, message: String },
}

/// Fixed-width bit rows used for order relations and consequence relations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub(crate) fn empty(n: usize) -> Bits {
        Bits { words: vec![0; n.div_ceil(64)] }
    }

    pub(crate) fn full(n: usize) -> Bits {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    pub(crate) fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn and_assign(&mut self, other: &Bits) {
        for (w, v) in self.words.iter_mut().zip(&other.words) {
            *w &= v;
        }
    }

    pub(crate) fn is_subset(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(w, v)| w & !v == 0)
    }

    pub(crate) fn iter_ones(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (0..n).filter(move |&i| self.get(i))
    }
}

/// A finite suplattice over an ordered list of element labels.
///
/// Construction validates reflexivity, antisymmetry, transitivity, and the
/// existence of all joins, so a value of this type is always a genuine
/// suplattice and the order-theoretic operations below are total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSupLattice {
    labels: Vec<String>,
    /// `up[i]` has bit `j` set iff `i <= j`.
    up: Vec<Bits>,
    /// `dn[i]` has bit `j` set iff `j <= i`.
    dn: Vec<Bits>,
}

/// Validation outcome for candidate suplattice data. Every violated axiom is
/// listed with a witness.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SupLatticeReport {
    pub reflexivity_failures: Vec<String>,
    pub antisymmetry_failures: Vec<(String, String)>,
    pub transitivity_failures: Vec<(String, String, String)>,
    pub missing_joins: Vec<Vec<String>>,
}

impl SupLatticeReport {
    pub fn is_valid(&self) -> bool {
        self.reflexivity_failures.is_empty()
            && self.antisymmetry_failures.is_empty()
            && self.transitivity_failures.is_empty()
            && self.missing_joins.is_empty()
    }
}

impl fmt::Display for SupLatticeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid suplattice");
        }
        let mut parts = Vec::new();
        for x in &self.reflexivity_failures {
            parts.push(format!("reflexivity fails at {x}"));
        }
        for (x, y) in &self.antisymmetry_failures {
            parts.push(format!("antisymmetry fails at {x}, {y}"));
        }
        for (x, y, z) in &self.transitivity_failures {
            parts.push(format!("transitivity fails at {x} <= {y} <= {z}"));
        }
        for s in &self.missing_joins {
            parts.push(format!("no join for {{{}}}", s.join(", ")));
        }
        write!(f, "{}", parts.join("; "))
    }
}

/// Check candidate order data against every suplattice axiom.
///
/// In the finite case a poset is a suplattice exactly when the empty set and
/// every two-element set have joins, so those are the witness subsets
/// reported for missing joins.
pub fn check_suplattice(labels: &[String], leq: &dyn Fn(usize, usize) -> bool) -> SupLatticeReport {
    let n = labels.len();
    let mut report = SupLatticeReport::default();
    for i in 0..n {
        if !leq(i, i) {
            report.reflexivity_failures.push(labels[i].clone());
        }
    }
    for i in 0..n {
        for j in 0..i {
            if leq(i, j) && leq(j, i) {
                report.antisymmetry_failures.push((labels[j].clone(), labels[i].clone()));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if !leq(i, j) {
                continue;
            }
            for k in 0..n {
                if leq(j, k) && !leq(i, k) {
                    report
                        .transitivity_failures
                        .push((labels[i].clone(), labels[j].clone(), labels[k].clone()));
                }
            }
        }
    }
    if !report.reflexivity_failures.is_empty()
        || !report.antisymmetry_failures.is_empty()
        || !report.transitivity_failures.is_empty()
    {
        return report;
    }
    let lub = |subset: &[usize]| -> Option<usize> {
        let ubs: Vec<usize> = (0..n)
            .filter(|&u| subset.iter().all(|&i| leq(i, u)))
            .collect();
        ubs.iter().copied().find(|&u| ubs.iter().all(|&v| leq(u, v)))
    };
    if lub(&[]).is_none() {
        report.missing_joins.push(Vec::new());
    }
    for i in 0..n {
        for j in 0..=i {
            if lub(&[i, j]).is_none() {
                report.missing_joins.push(vec![labels[j].clone(), labels[i].clone()]);
            }
        }
    }
    report
}

impl FiniteSupLattice {
    /// Build a suplattice from labels and an order predicate, rejecting any
    /// axiom violation with the full report.
    pub fn new(
        labels: Vec<String>,
        leq: impl Fn(usize, usize) -> bool,
    ) -> Result<FiniteSupLattice, LatticeError> {
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        let report = check_suplattice(&labels, &|i, j| leq(i, j));
        if !report.is_valid() {
            return Err(LatticeError::Invalid(report));
        }
        let n = labels.len();
        let mut up = vec![Bits::empty(n); n];
        let mut dn = vec![Bits::empty(n); n];
        for i in 0..n {
            for j in 0..n {
                if leq(i, j) {
                    up[i].set(j);
                    dn[j].set(i);
                }
            }
        }
        Ok(FiniteSupLattice { labels, up, dn })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i].get(j)
    }

    /// Least upper bound of a set of elements; the empty join is the bottom.
    pub fn join_of(&self, elems: &[usize]) -> usize {
        let n = self.len();
        let mut ubs = Bits::full(n);
        for &i in elems {
            ubs.and_assign(&self.up[i]);
        }
        self.least_of(&ubs)
    }

    /// Greatest lower bound, computed as the join of the lower bounds.
    pub fn meet_of(&self, elems: &[usize]) -> usize {
        let n = self.len();
        let mut lbs = Bits::full(n);
        for &i in elems {
            lbs.and_assign(&self.dn[i]);
        }
        let lbs_vec: Vec<usize> = lbs.iter_ones(n).collect();
        self.join_of(&lbs_vec)
    }

    fn least_of(&self, candidates: &Bits) -> usize {
        candidates
            .iter_ones(self.len())
            .find(|&u| candidates.is_subset(&self.up[u]))
            .expect("validated suplattice has all joins")
    }

    pub fn bottom(&self) -> usize {
        self.join_of(&[])
    }

    pub fn top(&self) -> usize {
        let all: Vec<usize> = (0..self.len()).collect();
        self.join_of(&all)
    }

    /// Join-irreducible elements: nonbottom elements that are not the join
    /// of the elements strictly below them.
    pub fn join_irreducibles(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| {
                let below: Vec<usize> = self.dn[x]
                    .iter_ones(self.len())
                    .filter(|&y| y != x)
                    .collect();
                self.join_of(&below) != x
            })
            .collect()
    }

}

/// Parse a suplattice file: a `suplattice <IDENT>` header, one
/// `elements <IDENT>+` line, and `leq <IDENT> <IDENT>` lines. The
/// reflexive-transitive closure of the given pairs is taken automatically;
/// antisymmetry violations and missing joins are rejected with the
/// validation report. Returns the declared name alongside the lattice.
pub fn parse_suplattice(src: &str) -> Result<(String, FiniteSupLattice), LatticeError> {
    let mut name: Option<String> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let text = crate::term::strip_comment(raw);
        let mut words = text.split_whitespace();
        let Some(head) = words.next() else { continue };
        match head {
            "suplattice" => {
                let ident = words.next().ok_or_else(|| LatticeError::File {
                    line,
                    message: "expected `suplattice <IDENT>`".into(),
                })?;
                if name.replace(ident.to_string()).is_some() {
                    return Err(LatticeError::File {
                        line,
                        message: "duplicate suplattice header".into(),
                    });
                }
            }
            "elements" => {
                if !labels.is_empty() {
                    return Err(LatticeError::File {
                        line,
                        message: "duplicate elements line".into(),
                    });
                }
                for w in words {
                    if labels.iter().any(|l| l == w) {
                        return Err(LatticeError::File {
                            line,
                            message: format!("duplicate element label {w:?}"),
                        });
                    }
                    labels.push(w.to_string());
                }
                if labels.is_empty() {
                    return Err(LatticeError::File {
                        line,
                        message: "elements line lists no elements".into(),
                    });
                }
            }
            "leq" => {
                let elem = |w: Option<&str>| -> Result<usize, LatticeError> {
                    let w = w.ok_or_else(|| LatticeError::File {
                        line,
                        message: "expected `leq <IDENT> <IDENT>`".into(),
                    })?;
                    labels
                        .iter()
                        .position(|l| l == w)
                        .ok_or_else(|| LatticeError::File {
                            line,
                            message: format!("unknown element {w:?}"),
                        })
                };
                let a = elem(words.next())?;
                let b = elem(words.next())?;
                pairs.push((a, b));
            }
            other => {
                return Err(LatticeError::File {
                    line,
                    message: format!("unexpected directive {other:?}"),
                });
            }
        }
    }
    let name = name.ok_or_else(|| LatticeError::File {
        line: 1,
        message: "missing `suplattice <IDENT>` header".into(),
    })?;
    if labels.is_empty() {
        return Err(LatticeError::File {
            line: 1,
            message: "missing `elements` line".into(),
        });
    }
    // Reflexive-transitive closure by iterated composition.
    let n = labels.len();
    let mut leq = vec![vec![false; n]; n];
    for i in 0..n {
        leq[i][i] = true;
    }
    for &(a, b) in &pairs {
        leq[a][b] = true;
    }
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if !leq[i][j] {
                    continue;
                }
                for k in 0..n {
                    if leq[j][k] && !leq[i][k] {
                        leq[i][k] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let lattice = FiniteSupLattice::new(labels, |i, j| leq[i][j])?;
    Ok((name, lattice))
}

/// A join-preserving map between suplattices; preserves all joins including
/// the empty one, hence also the bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupMorphism {
    source: FiniteSupLattice,
    target: FiniteSupLattice,
    map: Vec<usize>,
}

impl SupMorphism {
    pub fn new(
        source: FiniteSupLattice,
        target: FiniteSupLattice,
        map: Vec<usize>,
    ) -> Result<SupMorphism, LatticeError> {
        if map.len() != source.len() {
            return Err(LatticeError::CompositionMismatch);
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target.len()) {
            return Err(LatticeError::OutOfRange(bad));
        }
        check_join_preserving(&source, &target, &map)?;
        Ok(SupMorphism { source, target, map })
    }

    pub fn identity(lattice: &FiniteSupLattice) -> SupMorphism {
        SupMorphism {
            source: lattice.clone(),
            target: lattice.clone(),
            map: (0..lattice.len()).collect(),
        }
    }

    pub fn source(&self) -> &FiniteSupLattice {
        &self.source
    }

    pub fn target(&self) -> &FiniteSupLattice {
        &self.target
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn is_surjective(&self) -> bool {
        (0..self.target.len()).all(|y| self.map.contains(&y))
    }

    pub fn is_injective(&self) -> bool {
        for i in 0..self.map.len() {
            if self.map[..i].contains(&self.map[i]) {
                return false;
            }
        }
        true
    }

    /// Composition in diagram order: apply `self`, then `other`.
    pub fn then(&self, other: &SupMorphism) -> Result<SupMorphism, LatticeError> {
        if self.target != other.source {
            return Err(LatticeError::CompositionMismatch);
        }
        let map = self.map.iter().map(|&i| other.map[i]).collect();
        SupMorphism::new(self.source.clone(), other.target.clone(), map)
    }
}

fn check_join_preserving(
    source: &FiniteSupLattice,
    target: &FiniteSupLattice,
    map: &[usize],
) -> Result<(), LatticeError> {
    let bot = map[source.bottom()];
    if bot != target.bottom() {
        return Err(LatticeError::BottomNotPreserved(target.label(bot).to_string()));
    }
    for x in 0..source.len() {
        for y in 0..=x {
            let got = map[source.join_of(&[x, y])];
            let want = target.join_of(&[map[x], map[y]]);
            if got != want {
                return Err(LatticeError::NotJoinPreserving {
                    x: source.label(x).to_string(),
                    y: source.label(y).to_string(),
                    got: target.label(got).to_string(),
                    want: target.label(want).to_string(),
                });
            }
        }
    }
    Ok(())
}

/// A monotone map between suplattices, the shape of right adjoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneMap {
    source: FiniteSupLattice,
    target: FiniteSupLattice,
    map: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(
        source: FiniteSupLattice,
        target: FiniteSupLattice,
        map: Vec<usize>,
    ) -> Result<MonotoneMap, LatticeError> {
        if map.len() != source.len() {
            return Err(LatticeError::CompositionMismatch);
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= target.len()) {
            return Err(LatticeError::OutOfRange(bad));
        }
        for x in 0..source.len() {
            for y in 0..source.len() {
                if source.leq(x, y) && !target.leq(map[x], map[y]) {
                    return Err(LatticeError::NotMonotone {
                        x: source.label(x).to_string(),
                        y: source.label(y).to_string(),
                    });
                }
            }
        }
        Ok(MonotoneMap { source, target, map })
    }

    pub fn source(&self) -> &FiniteSupLattice {
        &self.source
    }

    pub fn target(&self) -> &FiniteSupLattice {
        &self.target
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }
}

/// The right adjoint of a join-preserving map: `g(y)` is the join of all
/// `x` with `f(x) <= y`, the largest such `x`.
pub fn right_adjoint(f: &SupMorphism) -> MonotoneMap {
    let p = f.source();
    let q = f.target();
    let map: Vec<usize> = (0..q.len())
        .map(|y| {
            let below: Vec<usize> = (0..p.len()).filter(|&x| q.leq(f.apply(x), y)).collect();
            p.join_of(&below)
        })
        .collect();
    MonotoneMap::new(q.clone(), p.clone(), map).expect("right adjoints are monotone")
}

/// The left adjoint of a meet-preserving monotone map: `f(x)` is the meet of
/// all `y` with `x <= g(y)`. Errors if the input fails to preserve some meet
/// (including the empty meet, the top), since only those maps have left
/// adjoints.
pub fn left_adjoint(g: &MonotoneMap) -> Result<SupMorphism, LatticeError> {
    let q = g.source();
    let p = g.target();
    let top = g.apply(q.top());
    if top != p.top() {
        return Err(LatticeError::TopNotPreserved(p.label(top).to_string()));
    }
    for x in 0..q.len() {
        for y in 0..=x {
            let got = g.apply(q.meet_of(&[x, y]));
            let want = p.meet_of(&[g.apply(x), g.apply(y)]);
            if got != want {
                return Err(LatticeError::NotMeetPreserving {
                    x: q.label(x).to_string(),
                    y: q.label(y).to_string(),
                    got: p.label(got).to_string(),
                    want: p.label(want).to_string(),
                });
            }
        }
    }
    let map: Vec<usize> = (0..p.len())
        .map(|x| {
            let above: Vec<usize> = (0..q.len()).filter(|&y| p.leq(x, g.apply(y))).collect();
            q.meet_of(&above)
        })
        .collect();
    SupMorphism::new(p.clone(), q.clone(), map)
}

/// What the adjoint pair of a join-preserving map looks like: whether each
/// side is surjective or injective, whether the two dualities line up, and
/// whether the corresponding composite collapses to the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjointDualityReport {
    pub left_surjective: bool,
    pub right_injective: bool,
    pub left_injective: bool,
    pub right_surjective: bool,
    /// `f` surjective iff its right adjoint is injective.
    pub surjective_duality: bool,
    /// `f` injective iff its right adjoint is surjective.
    pub injective_duality: bool,
    /// When `f` is surjective, `f . g = id` on the target.
    pub surjective_composite_identity: Option<bool>,
    /// When `f` is injective, `g . f = id` on the source.
    pub injective_composite_identity: Option<bool>,
}

impl AdjointDualityReport {
    pub fn pass(&self) -> bool {
        self.surjective_duality
            && self.injective_duality
            && self.surjective_composite_identity.unwrap_or(true)
            && self.injective_composite_identity.unwrap_or(true)
    }
}

pub fn surjectivity_duality_check(f: &SupMorphism) -> AdjointDualityReport {
    let g = right_adjoint(f);
    let left_surjective = f.is_surjective();
    let left_injective = f.is_injective();
    let right_injective = {
        let m = g.map();
        (0..m.len()).all(|i| !m[..i].contains(&m[i]))
    };
    let right_surjective = (0..f.source().len()).any(|_| true)
        && (0..f.source().len()).all(|x| g.map().contains(&x));
    let surjective_composite_identity = left_surjective
        .then(|| (0..f.target().len()).all(|y| f.apply(g.apply(y)) == y));
    let injective_composite_identity = left_injective
        .then(|| (0..f.source().len()).all(|x| g.apply(f.apply(x)) == x));
    AdjointDualityReport {
        left_surjective,
        right_injective,
        left_injective,
        right_surjective,
        surjective_duality: left_surjective == right_injective,
        injective_duality: left_injective == right_surjective,
        surjective_composite_identity,
        injective_composite_identity,
    }
}

/// A closure operator: monotone, extensive, idempotent endomap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureOperator {
    lattice: FiniteSupLattice,
    map: Vec<usize>,
}

impl ClosureOperator {
    pub fn new(lattice: FiniteSupLattice, map: Vec<usize>) -> Result<ClosureOperator, LatticeError> {
        if map.len() != lattice.len() {
            return Err(LatticeError::CompositionMismatch);
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= lattice.len()) {
            return Err(LatticeError::OutOfRange(bad));
        }
        for x in 0..lattice.len() {
            if !lattice.leq(x, map[x]) {
                return Err(LatticeError::NotExtensive(lattice.label(x).to_string()));
            }
        }
        for x in 0..lattice.len() {
            for y in 0..lattice.len() {
                if lattice.leq(x, y) && !lattice.leq(map[x], map[y]) {
                    return Err(LatticeError::NotMonotone {
                        x: lattice.label(x).to_string(),
                        y: lattice.label(y).to_string(),
                    });
                }
            }
        }
        for x in 0..lattice.len() {
            if map[map[x]] != map[x] {
                return Err(LatticeError::NotIdempotent(lattice.label(x).to_string()));
            }
        }
        Ok(ClosureOperator { lattice, map })
    }

    pub fn lattice(&self) -> &FiniteSupLattice {
        &self.lattice
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// Indices of closed elements, in element order.
    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.lattice.len()).filter(|&x| self.map[x] == x).collect()
    }
}

/// A finitary consequence relation presented as an explicit relation on
/// lattice elements: a preorder containing the reversed lattice order whose
/// consequence sets are principal downsets of their own join.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsequenceRelationFin {
    lattice: FiniteSupLattice,
    rel: Vec<Bits>,
}

impl ConsequenceRelationFin {
    pub fn new(
        lattice: FiniteSupLattice,
        entails: impl Fn(usize, usize) -> bool,
    ) -> Result<ConsequenceRelationFin, LatticeError> {
        let n = lattice.len();
        for x in 0..n {
            if !entails(x, x) {
                return Err(LatticeError::ConsequenceNotReflexive(
                    lattice.label(x).to_string(),
                ));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if lattice.leq(y, x) && !entails(x, y) {
                    return Err(LatticeError::ConsequenceMissingOrderPair {
                        x: lattice.label(x).to_string(),
                        y: lattice.label(y).to_string(),
                    });
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                if !entails(x, y) {
                    continue;
                }
                for z in 0..n {
                    if entails(y, z) && !entails(x, z) {
                        return Err(LatticeError::ConsequenceNotTransitive {
                            x: lattice.label(x).to_string(),
                            y: lattice.label(y).to_string(),
                            z: lattice.label(z).to_string(),
                        });
                    }
                }
            }
        }
        for x in 0..n {
            let consequences: Vec<usize> = (0..n).filter(|&y| entails(x, y)).collect();
            let join = lattice.join_of(&consequences);
            if !entails(x, join) {
                return Err(LatticeError::ConsequenceJoinEscape {
                    x: lattice.label(x).to_string(),
                    join: lattice.label(join).to_string(),
                });
            }
        }
        let mut rel = vec![Bits::empty(n); n];
        for x in 0..n {
            for y in 0..n {
                if entails(x, y) {
                    rel[x].set(y);
                }
            }
        }
        Ok(ConsequenceRelationFin { lattice, rel })
    }

    pub fn lattice(&self) -> &FiniteSupLattice {
        &self.lattice
    }

    pub fn entails(&self, x: usize, y: usize) -> bool {
        self.rel[x].get(y)
    }
}

/// A surjective join-preserving map presenting its target as a quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientFin {
    morphism: SupMorphism,
}

impl QuotientFin {
    pub fn new(morphism: SupMorphism) -> Result<QuotientFin, LatticeError> {
        if let Some(y) = (0..morphism.target().len()).find(|&y| !morphism.map().contains(&y)) {
            return Err(LatticeError::NotSurjective(
                morphism.target().label(y).to_string(),
            ));
        }
        Ok(QuotientFin { morphism })
    }

    pub fn morphism(&self) -> &SupMorphism {
        &self.morphism
    }

    pub fn source(&self) -> &FiniteSupLattice {
        self.morphism.source()
    }

    pub fn target(&self) -> &FiniteSupLattice {
        self.morphism.target()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.morphism.apply(i)
    }
}

/// Two quotients of the same lattice are equal when some order isomorphism
/// of their targets commutes with the surjections; since the surjections
/// determine everything, this reduces to comparing kernels and induced
/// orders pointwise.
pub fn quotients_equal(a: &QuotientFin, b: &QuotientFin) -> bool {
    if a.source() != b.source() {
        return false;
    }
    let n = a.source().len();
    for x in 0..n {
        for y in 0..n {
            let a_le = a.target().leq(a.apply(x), a.apply(y));
            let b_le = b.target().leq(b.apply(x), b.apply(y));
            if a_le != b_le {
                return false;
            }
        }
    }
    true
}

/// The consequence relation of a closure operator: `x |- y` iff
/// `y <= j(x)`.
pub fn closure_to_consequence(j: &ClosureOperator) -> ConsequenceRelationFin {
    let lattice = j.lattice().clone();
    ConsequenceRelationFin::new(lattice.clone(), |x, y| lattice.leq(y, j.apply(x)))
        .expect("closure operators induce consequence relations")
}

/// The closure operator of a consequence relation: `j(x)` is the join of
/// everything `x` entails.
pub fn consequence_to_closure(c: &ConsequenceRelationFin) -> ClosureOperator {
    let lattice = c.lattice().clone();
    let n = lattice.len();
    let map: Vec<usize> = (0..n)
        .map(|x| {
            let consequences: Vec<usize> = (0..n).filter(|&y| c.entails(x, y)).collect();
            lattice.join_of(&consequences)
        })
        .collect();
    ClosureOperator::new(lattice, map).expect("consequence relations induce closure operators")
}

/// The quotient presented by a closure operator: corestrict it to its
/// fixed-point lattice, whose elements keep their labels from the source.
/// Joins in the fixed-point lattice are closures of source joins, while
/// meets agree with source meets.
pub fn closure_to_quotient(j: &ClosureOperator) -> QuotientFin {
    let lattice = j.lattice();
    let fixed = j.fixed_points();
    let labels: Vec<String> = fixed.iter().map(|&x| lattice.label(x).to_string()).collect();
    let target = FiniteSupLattice::new(labels, |a, b| lattice.leq(fixed[a], fixed[b]))
        .expect("fixed points of a closure operator form a suplattice");
    let map: Vec<usize> = (0..lattice.len())
        .map(|x| {
            let jx = j.apply(x);
            fixed.iter().position(|&f| f == jx).expect("closure lands on fixed points")
        })
        .collect();
    let morphism = SupMorphism::new(lattice.clone(), target, map)
        .expect("corestricted closure preserves joins");
    QuotientFin::new(morphism).expect("corestricted closure is surjective")
}

/// The closure operator of a quotient: compose the surjection with its
/// right adjoint.
pub fn quotient_to_closure(q: &QuotientFin) -> ClosureOperator {
    let g = right_adjoint(q.morphism());
    let map: Vec<usize> = (0..q.source().len()).map(|x| g.apply(q.apply(x))).collect();
    ClosureOperator::new(q.source().clone(), map)
        .expect("section-retraction composites of quotients are closure operators")
}

/// Image factorization of a join-preserving map: the surjection onto the
/// fixed points of `f` followed by its right adjoint, and the injective
/// comparison into the target.
#[derive(Debug, Clone)]
pub struct ImageFactorization {
    pub quotient: QuotientFin,
    pub inclusion: SupMorphism,
}

pub fn image_factorization(f: &SupMorphism) -> ImageFactorization {
    let g = right_adjoint(f);
    let eps_map: Vec<usize> = (0..f.source().len()).map(|x| g.apply(f.apply(x))).collect();
    let eps = ClosureOperator::new(f.source().clone(), eps_map)
        .expect("adjoint round trips are closure operators");
    let quotient = closure_to_quotient(&eps);
    let fixed = eps.fixed_points();
    let incl_map: Vec<usize> = fixed.iter().map(|&x| f.apply(x)).collect();
    let inclusion = SupMorphism::new(quotient.target().clone(), f.target().clone(), incl_map)
        .expect("restriction of a join-preserving map to closed elements preserves joins");
    debug_assert!(inclusion.is_injective());
    debug_assert_eq!(
        quotient.morphism().then(&inclusion).expect("composable").map(),
        f.map()
    );
    ImageFactorization { quotient, inclusion }
}

/// The free suplattice on a finite set: the powerset ordered by inclusion.
/// Element `k` is the subset whose members are the generators at the set
/// bits of `k`, labelled `{a,b}` style in generator order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FreeSupLattice {
    lattice: FiniteSupLattice,
    generators: Vec<String>,
}

pub const FREE_GENERATOR_BOUND: usize = 12;

pub fn free_suplattice(generators: &[String]) -> Result<FreeSupLattice, LatticeError> {
    if generators.len() > FREE_GENERATOR_BOUND {
        return Err(LatticeError::SizeGuard {
            what: "free suplattice generator set".into(),
            size: generators.len(),
            bound: FREE_GENERATOR_BOUND,
        });
    }
    for (i, g) in generators.iter().enumerate() {
        if generators[..i].contains(g) {
            return Err(LatticeError::DuplicateLabel(g.clone()));
        }
    }
    let n = 1usize << generators.len();
    let labels: Vec<String> = (0..n)
        .map(|k| {
            let members: Vec<&str> = generators
                .iter()
                .enumerate()
                .filter(|(i, _)| k >> i & 1 == 1)
                .map(|(_, g)| g.as_str())
                .collect();
            format!("{{{}}}", members.join(","))
        })
        .collect();
    let lattice = FiniteSupLattice::new(labels, |a, b| a & !b == 0)
        .expect("powersets are suplattices");
    Ok(FreeSupLattice {
        lattice,
        generators: generators.to_vec(),
    })
}

impl FreeSupLattice {
    pub fn lattice(&self) -> &FiniteSupLattice {
        &self.lattice
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    /// Index of the singleton on the `i`-th generator.
    pub fn singleton(&self, i: usize) -> usize {
        1usize << i
    }

    /// Index of an arbitrary subset of generator positions.
    pub fn subset(&self, gens: &[usize]) -> usize {
        gens.iter().fold(0usize, |acc, &i| acc | 1 << i)
    }
}

/// Extend a generator assignment to the whole free suplattice by
/// `S -> join of the images of the members of S`. This is the unique
/// join-preserving map agreeing with the assignment on singletons.
pub fn free_extension(
    free: &FreeSupLattice,
    images: &[usize],
    target: &FiniteSupLattice,
) -> Result<SupMorphism, LatticeError> {
    if images.len() != free.generators().len() {
        return Err(LatticeError::CompositionMismatch);
    }
    if let Some(&bad) = images.iter().find(|&&v| v >= target.len()) {
        return Err(LatticeError::OutOfRange(bad));
    }
    let map: Vec<usize> = (0..free.lattice().len())
        .map(|k| {
            let members: Vec<usize> = images
                .iter()
                .enumerate()
                .filter(|(i, _)| k >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            target.join_of(&members)
        })
        .collect();
    SupMorphism::new(free.lattice().clone(), target.clone(), map)
}

/// Lift a map out of a free suplattice through a surjective quotient: send
/// each generator to the smallest-index preimage of its image, then extend
/// freely. The composite with the quotient reproduces the original map.
pub fn lift_through_surjection(
    s: &SupMorphism,
    free: &FreeSupLattice,
    q: &QuotientFin,
) -> Result<SupMorphism, LatticeError> {
    if s.source() != free.lattice() {
        return Err(LatticeError::CompositionMismatch);
    }
    if s.target() != q.target() {
        return Err(LatticeError::QuotientTargetMismatch);
    }
    let picks: Vec<usize> = (0..free.generators().len())
        .map(|i| {
            let y = s.apply(free.singleton(i));
            (0..q.source().len())
                .find(|&x| q.apply(x) == y)
                .expect("quotients are surjective")
        })
        .collect();
    let lift = free_extension(free, &picks, q.source())?;
    debug_assert_eq!(lift.then(q.morphism()).expect("composable").map(), s.map());
    Ok(lift)
}

pub const ISO_SEARCH_BOUND: usize = 12;

/// Search for an order isomorphism between two suplattices by backtracking,
/// pruning candidates whose up-set and down-set sizes disagree. Returns the
/// first isomorphism in index order, or `None`. Refuses lattices larger
/// than `bound` elements (default [`ISO_SEARCH_BOUND`]).
pub fn iso_search(
    a: &FiniteSupLattice,
    b: &FiniteSupLattice,
    bound: usize,
) -> Result<Option<Vec<usize>>, LatticeError> {
    if a.len() > bound || b.len() > bound {
        return Err(LatticeError::SizeGuard {
            what: "isomorphism search".into(),
            size: a.len().max(b.len()),
            bound,
        });
    }
    if a.len() != b.len() {
        return Ok(None);
    }
    let n = a.len();
    let degree = |l: &FiniteSupLattice, x: usize| {
        let upc = (0..n).filter(|&y| l.leq(x, y)).count();
        let dnc = (0..n).filter(|&y| l.leq(y, x)).count();
        (upc, dnc)
    };
    let da: Vec<_> = (0..n).map(|x| degree(a, x)).collect();
    let db: Vec<_> = (0..n).map(|x| degree(b, x)).collect();
    let mut assigned = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn backtrack(
        a: &FiniteSupLattice,
        b: &FiniteSupLattice,
        da: &[(usize, usize)],
        db: &[(usize, usize)],
        assigned: &mut Vec<usize>,
        used: &mut Vec<bool>,
        x: usize,
    ) -> bool {
        let n = assigned.len();
        if x == n {
            return true;
        }
        for y in 0..n {
            if used[y] || da[x] != db[y] {
                continue;
            }
            let consistent = (0..x).all(|x2| {
                let y2 = assigned[x2];
                a.leq(x, x2) == b.leq(y, y2) && a.leq(x2, x) == b.leq(y2, y)
            });
            if !consistent {
                continue;
            }
            assigned[x] = y;
            used[y] = true;
            if backtrack(a, b, da, db, assigned, used, x + 1) {
                return true;
            }
            assigned[x] = usize::MAX;
            used[y] = false;
        }
        false
    }
    if backtrack(a, b, &da, &db, &mut assigned, &mut used, 0) {
        Ok(Some(assigned))
    } else {
        Ok(None)
    }
}

/// All suplattices with exactly `n` labelled elements, one representative
/// per isomorphism class, labelled `e0..`, in a deterministic order.
pub fn enumerate_suplattices(n: usize) -> Vec<FiniteSupLattice> {
    assert!(n <= 5, "exhaustive lattice enumeration is desk-scale only");
    let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let strict_pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut found: Vec<FiniteSupLattice> = Vec::new();
    for mask in 0u64..(1 << strict_pairs.len()) {
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
        }
        for (bit, &(i, j)) in strict_pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                leq[i][j] = true;
            }
        }
        if !check_suplattice(&labels, &|i, j| leq[i][j]).is_valid() {
            continue;
        }
        let lattice = FiniteSupLattice::new(labels.clone(), |i, j| leq[i][j]).unwrap();
        let known = found.iter().any(|l| {
            iso_search(l, &lattice, ISO_SEARCH_BOUND).unwrap().is_some()
        });
        if !known {
            found.push(lattice);
        }
    }
    found
}

/// All closure operators on a lattice, by filtering every endomap.
pub fn enumerate_closure_operators(lattice: &FiniteSupLattice) -> Vec<ClosureOperator> {
    let n = lattice.len();
    let mut out = Vec::new();
    let mut map = vec![0usize; n];
    loop {
        if let Ok(j) = ClosureOperator::new(lattice.clone(), map.clone()) {
            out.push(j);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            map[k] += 1;
            if map[k] < n {
                break;
            }
            map[k] = 0;
        }
        if k == 0 && map[0] == 0 {
            return out;
        }
    }
}

/// All consequence relations on a lattice, by filtering every relation.
/// Exponential in the square of the size; intended for lattices of at most
/// four elements.
pub fn enumerate_consequence_relations(lattice: &FiniteSupLattice) -> Vec<ConsequenceRelationFin> {
    let n = lattice.len();
    assert!(n <= 4, "relation enumeration is 2^(n^2); keep n <= 4");
    let mut out = Vec::new();
    for mask in 0u64..(1 << (n * n)) {
        let entails = |x: usize, y: usize| mask >> (x * n + y) & 1 == 1;
        if let Ok(c) = ConsequenceRelationFin::new(lattice.clone(), entails) {
            out.push(c);
        }
    }
    out
}

/// All join-preserving maps from `p` to `q`, as raw index vectors in a
/// deterministic order.
///
/// A join-preserving map is determined by its values on join-irreducibles,
/// so candidates are generated from assignments on those and filtered by a
/// direct join-preservation check.
pub fn enumerate_sup_morphism_maps(p: &FiniteSupLattice, q: &FiniteSupLattice) -> Vec<Vec<usize>> {
    let irr = p.join_irreducibles();
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut assign = vec![0usize; irr.len()];
    'outer: loop {
        let map: Vec<usize> = (0..p.len())
            .map(|x| {
                let images: Vec<usize> = irr
                    .iter()
                    .enumerate()
                    .filter(|(_, &j)| p.leq(j, x))
                    .map(|(k, _)| assign[k])
                    .collect();
                q.join_of(&images)
            })
            .collect();
        if check_join_preserving(p, q, &map).is_ok() && seen.insert(map.clone()) {
            out.push(map);
        }
        let mut k = irr.len();
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            assign[k] += 1;
            if assign[k] < q.len() {
                break;
            }
            assign[k] = 0;
        }
    }
    out
}

pub fn enumerate_sup_morphisms(p: &FiniteSupLattice, q: &FiniteSupLattice) -> Vec<SupMorphism> {
    enumerate_sup_morphism_maps(p, q)
        .into_iter()
        .map(|map| SupMorphism::new(p.clone(), q.clone(), map).expect("filtered maps preserve joins"))
        .collect()
}

/// A seeded random suplattice with between 1 and `max_elems` elements,
/// labelled `e0..`. Generated by sampling a bottom-rooted cover relation and
/// rejecting candidates that are missing some join.
pub fn random_suplattice(rng: &mut impl Rng, max_elems: usize) -> FiniteSupLattice {
    assert!(max_elems >= 1);
    loop {
        let n = rng.random_range(1..=max_elems);
        let labels: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
        let mut leq = vec![vec![false; n]; n];
        for i in 0..n {
            leq[i][i] = true;
            if i > 0 {
                leq[0][i] = true;
                for j in 1..i {
                    if rng.random_bool(0.4) {
                        leq[j][i] = true;
                    }
                }
            }
        }
        // Transitive closure; the relation is acyclic by construction.
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        if check_suplattice(&labels, &|i, j| leq[i][j]).is_valid() {
            return FiniteSupLattice::new(labels, |i, j| leq[i][j]).unwrap();
        }
    }
}

/// A seeded random join-preserving map, drawn uniformly from the full
/// enumeration.
pub fn random_sup_morphism(
    rng: &mut impl Rng,
    p: &FiniteSupLattice,
    q: &FiniteSupLattice,
) -> SupMorphism {
    let maps = enumerate_sup_morphism_maps(p, q);
    let map = maps[rng.random_range(0..maps.len())].clone();
    SupMorphism::new(p.clone(), q.clone(), map).expect("enumerated maps preserve joins")
}

/// A seeded random closure operator, built from a random meet-closed subset
/// containing the top: `j(x)` is the least closed element above `x`.
pub fn random_closure_operator(rng: &mut impl Rng, lattice: &FiniteSupLattice) -> ClosureOperator {
    let n = lattice.len();
    let mut closed = vec![false; n];
    closed[lattice.top()] = true;
    for x in 0..n {
        if rng.random_bool(0.5) {
            closed[x] = true;
        }
    }
    // Close under binary meets.
    loop {
        let mut changed = false;
        let members: Vec<usize> = (0..n).filter(|&x| closed[x]).collect();
        for &x in &members {
            for &y in &members {
                let m = lattice.meet_of(&[x, y]);
                if !closed[m] {
                    closed[m] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let map: Vec<usize> = (0..n)
        .map(|x| {
            let above: Vec<usize> = (0..n).filter(|&c| closed[c] && lattice.leq(x, c)).collect();
            lattice.meet_of(&above)
        })
        .collect();
    ClosureOperator::new(lattice.clone(), map).expect("meet-closed subsets induce closure operators")
}
