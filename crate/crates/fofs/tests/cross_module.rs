//! Tests tying proof theory to semantics: accepted proofs hold on
//! in-class models, refutation search never contradicts derivability,
//! and generated-submodel restriction preserves truth.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fofs::frameclasses::{random_model, FrameClassSpec, ModelBounds};
use fofs::gen;
use fofs::proof::{
    bounded_derive, check_proof, derive_schema, pair_consistent_bounded, BaseLogic, DeriveOutcome,
    DerivedSchema, LogicId, PairVerdict, Proof,
};
use fofs::search::{find_countermodel, CountermodelResult, SearchBounds};
use fofs::semantics::{eval_sentence, restrict_generated, Model};
use fofs::syntax::{Formula, Signature, Term};

fn fs() -> LogicId {
    LogicId::new(BaseLogic::Fs)
}

fn valid_on_seeded_models(logic: LogicId, theorem: &Formula, n_models: usize, seed: u64) {
    let spec = FrameClassSpec::new(logic);
    let bounds = ModelBounds::new(4, 3, 2);
    for i in 0..n_models {
        let m = random_model(&spec, &bounds, seed ^ (i as u64).wrapping_mul(0x9E37));
        if m.signature.well_formed(theorem).is_err() {
            continue;
        }
        for w in 0..m.frame.len() {
            assert!(
                eval_sentence(&m, w, theorem).unwrap(),
                "accepted conclusion {theorem} fails at world {w} of model {i} ({})",
                logic.token()
            );
        }
    }
}

/// Random derived proofs hold on random models of their class.
#[test]
fn accepted_proofs_are_valid_on_class_models() {
    let sig = fofs::frameclasses::fuzz_signature(2);
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    for logic in [fs(), LogicId::new(BaseLogic::FsS4).with_ni()] {
        for round in 0..10 {
            let phi = gen::random_sentence(&sig, 2, &mut rng);
            let psi = gen::random_sentence(&sig, 2, &mut rng);
            let proofs: Vec<Proof> = vec![
                derive_schema(
                    logic,
                    DerivedSchema::DiaConj {
                        phi: phi.clone(),
                        psi: psi.clone(),
                    },
                )
                .unwrap(),
                derive_schema(
                    logic,
                    DerivedSchema::BoxOrDist {
                        disjuncts: vec![phi.clone(), psi.clone()],
                    },
                )
                .unwrap(),
            ];
            for p in proofs {
                assert!(check_proof(&p).is_accepted());
                valid_on_seeded_models(logic, &p.required_final(), 100, 100 + round);
            }
        }
    }
}

/// Proofs found by the bounded search also hold everywhere.
#[test]
fn bounded_derive_output_valid_on_models() {
    let sig = fofs::frameclasses::fuzz_signature(2);
    let mut rng = ChaCha8Rng::seed_from_u64(0xF00D);
    let mut proven = 0;
    for _ in 0..200 {
        let a = gen::random_sentence(&sig, 2, &mut rng);
        let b = gen::random_sentence(&sig, 2, &mut rng);
        let gamma: BTreeSet<Formula> = [a.clone()].into_iter().collect();
        let goal = Formula::or(b, a);
        if let DeriveOutcome::Proven(p) = bounded_derive(fs(), &gamma, &goal, 16) {
            assert!(check_proof(&p).is_accepted());
            valid_on_seeded_models(fs(), &p.required_final(), 20, 7);
            proven += 1;
        }
    }
    assert!(proven > 150, "search should prove most of these ({proven})");
}

/// A sequent with a small proof admits no countermodel.
#[test]
fn proven_sequents_are_not_refutable() {
    let sig = Signature::new(
        vec!["c".into()],
        [("P".to_string(), 1), ("Q".to_string(), 1)]
            .into_iter()
            .collect(),
    )
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xCAFE);
    let mut tested = 0;
    let bounds = SearchBounds::new(2, 2);
    while tested < 100 {
        let a = gen::random_sentence(&sig, 1, &mut rng);
        let b = gen::random_sentence(&sig, 1, &mut rng);
        let gamma = vec![a.clone()];
        let goal = if rng.gen_bool(0.5) {
            Formula::or(a.clone(), b)
        } else {
            Formula::imp(b, a.clone())
        };
        let gset: BTreeSet<Formula> = gamma.iter().cloned().collect();
        if !matches!(bounded_derive(fs(), &gset, &goal, 24), DeriveOutcome::Proven(_)) {
            continue;
        }
        tested += 1;
        match find_countermodel(&gamma, &goal, &FrameClassSpec::new(fs()), &bounds) {
            CountermodelResult::NotFoundWithinBounds { .. } => {}
            CountermodelResult::Found { model, world } => panic!(
                "refuted a proven sequent {:?} |- {goal} at {world}: {}",
                gamma,
                fofs::semantics::model_to_json(&model)
            ),
        }
    }
}

/// The spec's semantic consistency witness: asserted P(c), denied Q(c)
/// is satisfiable, so no budget refutes it.
#[test]
fn satisfiable_pair_never_refuted() {
    let sig = Signature::new(
        vec!["c".into()],
        [("P".to_string(), 1), ("Q".to_string(), 1)]
            .into_iter()
            .collect(),
    )
    .unwrap();
    let pc = Formula::pred("P", vec![Term::con("c")]);
    let qc = Formula::pred("Q", vec![Term::con("c")]);

    // the one-world model with P true and Q false satisfies the pair
    let doc = r#"{
        "worlds": ["w"],
        "modal": [],
        "domains": {"w": ["a"]},
        "constants": {"c": "a"},
        "predicates": {"w": {"P": [["a"]], "Q": []}}
    }"#;
    let m = fofs::semantics::model_from_json(doc, Some(&sig)).unwrap();
    assert!(m.validate().is_empty());
    assert!(eval_sentence(&m, 0, &pc).unwrap());
    assert!(!eval_sentence(&m, 0, &qc).unwrap());

    let pair = fofs::proof::TheoryApprox::new(sig, [pc], [qc]).unwrap();
    for budget in [1, 8, 64, 256] {
        assert!(matches!(
            pair_consistent_bounded(fs(), &pair, budget),
            PairVerdict::Unknown
        ));
    }
}

fn one_pred_exact(size: usize, has_x: bool, memo: &mut std::collections::HashMap<(usize, bool), Vec<Formula>>) -> Vec<Formula> {
    if let Some(v) = memo.get(&(size, has_x)) {
        return v.clone();
    }
    let out = if size == 0 {
        let mut atoms = vec![
            Formula::pred("P", vec![Term::con("c")]),
            Formula::eq(Term::con("c"), Term::con("c")),
            Formula::False,
        ];
        if has_x {
            atoms.push(Formula::pred("P", vec![Term::var("x")]));
            atoms.push(Formula::eq(Term::var("x"), Term::con("c")));
        }
        atoms
    } else {
        let mut out = Vec::new();
        for a in one_pred_exact(size - 1, has_x, memo) {
            out.push(Formula::boxed(a.clone()));
            out.push(Formula::dia(a));
        }
        for body in one_pred_exact(size - 1, true, memo) {
            out.push(Formula::forall("x", body.clone()));
            out.push(Formula::exists("x", body));
        }
        for left in 0..size {
            let right = size - 1 - left;
            for a in one_pred_exact(left, has_x, memo) {
                for b in one_pred_exact(right, has_x, memo) {
                    out.push(Formula::and(a.clone(), b.clone()));
                    out.push(Formula::or(a.clone(), b.clone()));
                    out.push(Formula::imp(a.clone(), b.clone()));
                }
            }
        }
        out
    };
    memo.insert((size, has_x), out.clone());
    out
}

/// Every sentence over the signature {P/1, c} with at most `max_size`
/// connective, modal, or quantifier nodes (one quantified variable).
fn one_pred_sentences(max_size: usize) -> Vec<Formula> {
    let mut memo = std::collections::HashMap::new();
    let mut out: Vec<Formula> = Vec::new();
    for size in 0..=max_size {
        out.extend(
            one_pred_exact(size, false, &mut memo)
                .into_iter()
                .filter(|f| f.is_sentence()),
        );
    }
    out
}

/// Generated-submodel restriction preserves truth at retained worlds:
/// exhaustive over small sentences, sampled over deeper ones.
#[test]
fn restriction_preserves_truth() {
    let spec = FrameClassSpec::new(fs());
    let sig = Signature::new(
        vec!["c".into()],
        [("P".to_string(), 1)].into_iter().collect(),
    )
    .unwrap();
    let mut sentences: Vec<Formula> = one_pred_sentences(3);
    sentences.sort();
    sentences.dedup();
    assert!(sentences.len() > 300, "got {}", sentences.len());
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1CE);
    for _ in 0..40 {
        let deep = gen::random_sentence(&sig, 4, &mut rng);
        sentences.push(deep);
    }

    let mut checked_worlds = 0usize;
    for seed in 0..6u64 {
        let m = fofs::frameclasses::random_model_over(
            &spec,
            &sig,
            &ModelBounds::new(6, 3, 1),
            seed,
        );
        for seed_world in 0..m.frame.len().min(2) {
            let seeds: BTreeSet<usize> = [seed_world].into_iter().collect();
            let sub: Model = restrict_generated(&m, &seeds).unwrap();
            assert!(sub.validate().is_empty());
            for w_sub in 0..sub.frame.len() {
                let name = &sub.frame.worlds[w_sub];
                let w_orig = m.world_index(name).unwrap();
                checked_worlds += 1;
                for f in &sentences {
                    let before = eval_sentence(&m, w_orig, f).unwrap();
                    let after = eval_sentence(&sub, w_sub, f).unwrap();
                    assert_eq!(
                        before, after,
                        "restriction changed {f} at {name} (seed {seed})"
                    );
                }
            }
        }
    }
    assert!(checked_worlds > 4);
}
