//! The builders must emit checker-accepted proofs for random argument
//! instantiations of every schema.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fofs::proof::{check_proof, derive_schema, BaseLogic, LogicId, Verdict};

#[test]
fn two_hundred_random_instantiations_per_schema() {
    let sig = fofs::frameclasses::fuzz_signature(2);
    let logic = LogicId::new(BaseLogic::Fs);
    let mut rng = ChaCha8Rng::seed_from_u64(0xDE11);
    for name in common::SCHEMA_NAMES {
        for k in 0..200 {
            let schema = common::random_instance(name, logic, &sig, &mut rng);
            let proof = derive_schema(logic, schema)
                .unwrap_or_else(|e| panic!("{name} instance {k} failed to build: {e}"));
            match check_proof(&proof) {
                Verdict::Accepted => {}
                Verdict::Rejected { line, reason } => {
                    panic!("{name} instance {k} rejected at line {line}: {reason}")
                }
            }
        }
    }
}

#[test]
fn builders_work_in_extension_logics() {
    let sig = fofs::frameclasses::fuzz_signature(2);
    let mut rng = ChaCha8Rng::seed_from_u64(0xA11);
    for base in BaseLogic::ALL {
        let logic = LogicId::new(base).with_nd();
        for name in common::SCHEMA_NAMES {
            let schema = common::random_instance(name, logic, &sig, &mut rng);
            let proof = derive_schema(logic, schema).unwrap();
            assert!(check_proof(&proof).is_accepted(), "{name} in {}", logic.token());
        }
    }
}
