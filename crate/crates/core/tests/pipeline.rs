//! Cross-module integration: everything here flows through the text
//! formats and the public API, the way the command-line front end uses the
//! library. No internal constructors, no prebuilt fixtures.

use aal_core::algebra::{free_algebra, parse_algebra, AlgebraClass};
use aal_core::consequence::{
    derive, matrix_entails, parse_rules, theories_lattice, ConsequenceEngine, DeriveBudget,
    Entails, LogicalMatrix, Verdict,
};
use aal_core::suplattice::{closure_to_quotient, quotient_to_closure};
use aal_core::term::{parse_signature, parse_term, VarContext};

const MIN_SIG: &str = "signature MIN\nop imp 2\nop not 1\n";

const B2MIN: &str = "algebra B2MIN over MIN\n\
carrier 0 1\n\
op imp: 0 0 -> 1\nop imp: 0 1 -> 1\nop imp: 1 0 -> 0\nop imp: 1 1 -> 1\n\
op not: 0 -> 1\nop not: 1 -> 0\n";

const CPC: &str = "axiom K: (imp a (imp b a))\n\
axiom S: (imp (imp a (imp b c)) (imp (imp a b) (imp a c)))\n\
axiom C: (imp (imp (not a) (not b)) (imp b a))\n\
rule MP: a, (imp a b) => b\n";

const BOOL_SIG: &str = "signature BOOL\n\
op and 2\nop or 2\nop not 1\nop imp 2\nop top 0\nop bot 0\n";

const B2: &str = "algebra B2 over BOOL\n\
carrier 0 1\n\
op and: 0 0 -> 0\nop and: 0 1 -> 0\nop and: 1 0 -> 0\nop and: 1 1 -> 1\n\
op or: 0 0 -> 0\nop or: 0 1 -> 1\nop or: 1 0 -> 1\nop or: 1 1 -> 1\n\
op not: 0 -> 1\nop not: 1 -> 0\n\
op imp: 0 0 -> 1\nop imp: 0 1 -> 1\nop imp: 1 0 -> 0\nop imp: 1 1 -> 1\n\
op top: -> 1\nop bot: -> 0\n";

const H3: &str = "algebra H3 over BOOL\n\
carrier 0 h 1\n\
op and: 0 0 -> 0\nop and: 0 h -> 0\nop and: 0 1 -> 0\n\
op and: h 0 -> 0\nop and: h h -> h\nop and: h 1 -> h\n\
op and: 1 0 -> 0\nop and: 1 h -> h\nop and: 1 1 -> 1\n\
op or: 0 0 -> 0\nop or: 0 h -> h\nop or: 0 1 -> 1\n\
op or: h 0 -> h\nop or: h h -> h\nop or: h 1 -> 1\n\
op or: 1 0 -> 1\nop or: 1 h -> 1\nop or: 1 1 -> 1\n\
op not: 0 -> 1\nop not: h -> 0\nop not: 1 -> 0\n\
op imp: 0 0 -> 1\nop imp: 0 h -> 1\nop imp: 0 1 -> 1\n\
op imp: h 0 -> 0\nop imp: h h -> 1\nop imp: h 1 -> 1\n\
op imp: 1 0 -> 0\nop imp: 1 h -> h\nop imp: 1 1 -> 1\n\
op top: -> 1\nop bot: -> 0\n";

/// Whatever the budgeted Hilbert system derives, the parsed two-valued
/// matrix validates: soundness of the axioms, through both text formats.
#[test]
fn parsed_rule_derivations_are_sound_for_the_parsed_matrix() {
    let sig = parse_signature(MIN_SIG).unwrap();
    let alg = parse_algebra(B2MIN, &sig).unwrap();
    let one = alg.element_index("1").unwrap();
    let matrix = LogicalMatrix::new(alg, vec![one]).unwrap();
    let system = parse_rules(CPC, &sig).unwrap();
    let ctx = VarContext::from_names(&["p"]);
    let budget = DeriveBudget {
        derivation_depth: 4,
        instance_depth: 2,
        ..DeriveBudget::default()
    };

    let goals = [
        "(imp p p)",
        "(imp p (imp p p))",
        "(imp (imp (not p) (not p)) (imp p p))",
    ];
    for src in goals {
        let phi = parse_term(&sig, &ctx, src).unwrap();
        let derived = derive(&system, &ctx, &[], &phi, &budget).unwrap();
        assert_eq!(derived, Verdict::Yes, "{src} should be derivable");
        let valid = matrix_entails(
            std::slice::from_ref(&matrix),
            &ctx,
            &[],
            std::slice::from_ref(&phi),
            4096,
        )
        .unwrap();
        assert!(valid, "{src} derivable but not matrix-valid");
    }
}

/// Rule and matrix engines answer entailment queries compatibly: the rule
/// engine never says yes where the matrix engine says no.
#[test]
fn rule_engine_yes_implies_matrix_engine_yes() {
    let sig = parse_signature(MIN_SIG).unwrap();
    let alg = parse_algebra(B2MIN, &sig).unwrap();
    let one = alg.element_index("1").unwrap();
    let matrix_engine =
        ConsequenceEngine::from_matrices(vec![LogicalMatrix::new(alg, vec![one]).unwrap()], 4096);
    let system = parse_rules(CPC, &sig).unwrap();
    let budget = DeriveBudget {
        derivation_depth: 3,
        instance_depth: 1,
        ..DeriveBudget::default()
    };
    let rule_engine = ConsequenceEngine::from_rules(system, budget);

    let ctx = VarContext::from_names(&["p", "q"]);
    let queries = [
        (vec![], "(imp p p)"),
        (vec!["p", "(imp p q)"], "q"),
        (vec!["p"], "(imp q p)"),
        (vec!["(not q)", "p"], "(imp (imp p q) q)"),
    ];
    for (gamma_srcs, phi_src) in queries {
        let gamma: Vec<_> = gamma_srcs
            .iter()
            .map(|s| parse_term(&sig, &ctx, s).unwrap())
            .collect();
        let phi = parse_term(&sig, &ctx, phi_src).unwrap();
        let by_rules = rule_engine
            .entails(&ctx, &gamma, std::slice::from_ref(&phi))
            .unwrap();
        let by_matrix = matrix_engine
            .entails(&ctx, &gamma, std::slice::from_ref(&phi))
            .unwrap();
        if by_rules == Verdict::Yes {
            assert_eq!(by_matrix, Verdict::Yes, "{gamma_srcs:?} |- {phi_src}");
        }
    }
}

/// The theories lattice of the parsed Boolean matrix over a three-formula
/// universe: its closure operator and quotient views agree both ways.
#[test]
fn theories_closure_and_quotient_views_round_trip() {
    let sig = parse_signature(BOOL_SIG).unwrap();
    let alg = parse_algebra(B2, &sig).unwrap();
    let one = alg.element_index("1").unwrap();
    let engine =
        ConsequenceEngine::from_matrices(vec![LogicalMatrix::new(alg, vec![one]).unwrap()], 4096);
    let ctx = VarContext::from_names(&["p", "q"]);
    let universe: Vec<_> = ["p", "q", "(and p q)"]
        .iter()
        .map(|s| parse_term(&sig, &ctx, s).unwrap())
        .collect();

    let (_, closure) = theories_lattice(&engine, &ctx, &universe).unwrap();
    assert_eq!(closure.fixed_points().len(), 4);

    let quotient = closure_to_quotient(&closure);
    assert_eq!(quotient.target().len(), 4);
    let back = quotient_to_closure(&quotient);
    assert_eq!(back.map(), closure.map());
}

/// The free algebra of the parsed two-member class is the one the
/// certification suite freezes: six one-variable classes.
#[test]
fn free_algebra_of_the_parsed_two_member_class() {
    let sig = parse_signature(BOOL_SIG).unwrap();
    let b2 = parse_algebra(B2, &sig).unwrap();
    let h3 = parse_algebra(H3, &sig).unwrap();
    let k = AlgebraClass::new(vec![b2, h3]).unwrap();
    let ctx = VarContext::from_names(&["p"]);
    let free = free_algebra(&k, &ctx, 20000).unwrap();
    assert_eq!(free.alg.carrier_len(), 6);

    let phi = parse_term(&sig, &ctx, "(not (not p))").unwrap();
    let psi = parse_term(&sig, &ctx, "p").unwrap();
    assert_ne!(free.lambda(&phi).unwrap(), free.lambda(&psi).unwrap());
}
