//! Obligation back-propagation along a modal chain: from a target set
//! at the top link, each lower link receives the boxed sentences whose
//! body provably implies a disjunction over the level above. Every
//! membership carries its checking proof.

use std::collections::BTreeSet;

use crate::proof::{bounded_derive, DeriveOutcome, LogicId, Proof, TheoryApprox};
use crate::syntax::Formula;

/// One link of a finitely presented modal chain.
#[derive(Debug, Clone)]
pub struct ChainLink {
    pub label: String,
    pub theory: TheoryApprox,
}

#[derive(Debug, Clone)]
pub struct ObligationMember {
    /// the boxed sentence itself
    pub sentence: Formula,
    /// a checking proof of `asserted(k+1) |- body -> disjunction(k+1)`
    pub proof: Proof,
}

#[derive(Debug, Clone, Default)]
pub struct ObligationSet {
    pub members: Vec<ObligationMember>,
}

impl ObligationSet {
    pub fn sentences(&self) -> Vec<Formula> {
        self.members.iter().map(|m| m.sentence.clone()).collect()
    }
}

/// Computes the obligation sets below the top of a chain: position `k`
/// of the result holds the set for link `k`, derived from link `k+1`'s
/// theory and the set at `k+1` (the given target set at the top).
/// Candidate bodies come from the finite subformula pool of the chain,
/// restricted to the link's signature and capped by the budget; budget
/// exhaustion shrinks the sets, so они are under-approximations.
pub fn compute_obligations(
    logic: LogicId,
    chain: &[ChainLink],
    omega_top: &BTreeSet<Formula>,
    budget: usize,
) -> Vec<ObligationSet> {
    if chain.len() < 2 {
        return Vec::new();
    }
    let n = chain.len() - 1;
    let mut sets: Vec<ObligationSet> = (0..n).map(|_| ObligationSet::default()).collect();
    // shared candidate pool: sentential subformulas of everything in
    // the chain plus the target set
    let mut pool: BTreeSet<Formula> = BTreeSet::new();
    for link in chain {
        for f in link.theory.asserted().iter().chain(link.theory.denied()) {
            pool.extend(f.subformulas().into_iter().filter(|g| g.is_sentence()));
        }
    }
    for f in omega_top {
        pool.extend(f.subformulas().into_iter().filter(|g| g.is_sentence()));
    }

    let mut above: Vec<Formula> = omega_top.iter().cloned().collect();
    for k in (0..n).rev() {
        let gamma = &chain[k + 1].theory;
        let sig_k = chain[k].theory.signature();
        if above.is_empty() {
            above = Vec::new();
            continue;
        }
        let mut target_parts = above.clone();
        target_parts.sort_by_key(|f| f.to_string());
        let target = Formula::disj(target_parts);

        let mut candidates: Vec<Formula> = pool
            .iter()
            .filter(|beta| sig_k.well_formed(beta).is_ok())
            .cloned()
            .collect();
        candidates.sort_by_key(|f| (f.size(), f.to_string()));
        candidates.truncate(budget);

        let mut members = Vec::new();
        for beta in candidates {
            let goal = Formula::imp(beta.clone(), target.clone());
            if let DeriveOutcome::Proven(proof) =
                bounded_derive(logic, gamma.asserted(), &goal, budget)
            {
                members.push(ObligationMember {
                    sentence: Formula::boxed(beta),
                    proof,
                });
            }
        }
        sets[k] = ObligationSet { members };
        above = sets[k].sentences();
    }
    sets
}
