//! Shared helpers for integration tests: random instantiation of the
//! derived schemata.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use fofs::gen;
use fofs::proof::{Justification, LogicId, Proof, ProofLine, Rule};
use fofs::proof::DerivedSchema;
use fofs::syntax::{subst_var, Formula, Signature, Term};

pub const SCHEMA_NAMES: [&str; 9] = [
    "box-or-dist",
    "dia-conj",
    "dia-mp",
    "eq-euclid",
    "dia-forall",
    "necessitation",
    "under-box",
    "generalize",
    "exists-antecedent",
];

fn int_theorem(logic: LogicId, f: Formula) -> Proof {
    Proof {
        logic,
        assumptions: vec![],
        lines: vec![ProofLine {
            id: 1,
            formula: f.clone(),
            justification: Justification::Axiom(Rule::Int),
        }],
        conclusion: f,
    }
}

fn ipc_under(logic: LogicId, gamma: Vec<Formula>, f: Formula) -> Proof {
    let target = fofs::proof::gamma_imp(&gamma, &f);
    Proof {
        logic,
        assumptions: gamma,
        lines: vec![ProofLine {
            id: 1,
            formula: target,
            justification: Justification::Ipc(vec![]),
        }],
        conclusion: f,
    }
}

/// A random, side-condition-satisfying instantiation of the named
/// derived schema over the signature.
pub fn random_instance(
    name: &str,
    logic: LogicId,
    sig: &Signature,
    rng: &mut ChaCha8Rng,
) -> DerivedSchema {
    let sent = |rng: &mut ChaCha8Rng| gen::random_sentence(sig, 2, rng);
    match name {
        "box-or-dist" => {
            let n = rng.gen_range(1..=4);
            DerivedSchema::BoxOrDist {
                disjuncts: (0..n).map(|_| sent(rng)).collect(),
            }
        }
        "dia-conj" => DerivedSchema::DiaConj {
            phi: sent(rng),
            psi: sent(rng),
        },
        "dia-mp" => DerivedSchema::DiaMp {
            phi: sent(rng),
            psi: sent(rng),
        },
        "eq-euclid" => {
            let consts = sig.constants();
            let pick = |rng: &mut ChaCha8Rng| consts[rng.gen_range(0..consts.len())].clone();
            DerivedSchema::EqEuclid {
                c1: pick(rng),
                c2: pick(rng),
                c3: pick(rng),
            }
        }
        "dia-forall" => DerivedSchema::DiaForallDist {
            body: gen::random_one_place(sig, "x", 2, rng),
            var: "x".into(),
            fresh: "fr0".into(),
        },
        "necessitation" => {
            let a = sent(rng);
            let b = sent(rng);
            DerivedSchema::Necessitation {
                theorem: int_theorem(logic, Formula::imp(Formula::and(a.clone(), b), a)),
            }
        }
        "under-box" => {
            let phi = sent(rng);
            let psi = sent(rng);
            let gamma = vec![Formula::boxed(phi.clone()), Formula::boxed(psi.clone())];
            DerivedSchema::UnderBox {
                box_phi: ipc_under(logic, gamma.clone(), Formula::boxed(phi.clone())),
                box_psi: ipc_under(logic, gamma.clone(), Formula::boxed(psi.clone())),
                imp: int_theorem(
                    logic,
                    Formula::imp(Formula::and(phi.clone(), psi), phi),
                ),
            }
        }
        "generalize" => {
            let body = gen::random_one_place(sig, "x", 1, rng);
            let at_fresh = subst_var(&body, "x", &Term::con("fr0")).unwrap();
            let phi_c = Formula::imp(at_fresh.clone(), at_fresh);
            let gamma = if rng.gen_bool(0.5) {
                vec![sent(rng)]
            } else {
                vec![]
            };
            DerivedSchema::Generalize {
                premise: ipc_under(logic, gamma, phi_c),
                constant: "fr0".into(),
                variable: "x".into(),
            }
        }
        "exists-antecedent" => {
            let p = rng.gen_range(1..=2usize);
            let constants: Vec<String> = (0..p).map(|k| format!("fr{k}")).collect();
            // names outside the generator's binder pool, so instantiated
            // constants never sit under a binder of the same name
            let variables: Vec<String> = (0..p).map(|k| format!("x{k}")).collect();
            let mut parts = Vec::new();
            for c in &constants {
                let body = gen::random_one_place(sig, "x", 1, rng);
                parts.push(subst_var(&body, "x", &Term::con(c.clone())).unwrap());
            }
            let phi = Formula::conj(parts);
            let psi = Formula::top();
            DerivedSchema::ExistsAntecedent {
                premise: int_theorem(logic, Formula::imp(phi, psi)),
                constants,
                variables,
            }
        }
        other => panic!("unknown schema {other}"),
    }
}
