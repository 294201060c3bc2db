//! Budgeted saturation of a consistent pair: an alternating loop over
//! enumerated disjunctions and existentials (plus diamond sentences in
//! diamond mode) that picks prime witnesses, Henkin constants, and
//! diamond commitments while re-checking consistency at every step.

use std::collections::BTreeSet;

use crate::proof::{
    bounded_derive, pair_consistent_bounded, DeriveOutcome, LogicId, PairVerdict, TheoryApprox,
};
use crate::syntax::{Formula, Signature, Term};

use super::TraceError;

/// Fixed budget for the inner derivability checks. Keeping it
/// independent of the outer step budget makes the processed-event
/// sequence a prefix across budgets.
const INNER_BUDGET: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaturateMode {
    Plain,
    Diamond,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProcessedEvent {
    /// a disjunction together with the disjunct added
    Disjunction(Formula, Formula),
    /// an existential together with its fresh Henkin constant
    Henkin(Formula, String),
    /// a diamond sentence committed to
    Diamond(Formula),
    /// a disjunction whose both branches were refuted at the inner
    /// budget; nothing was added
    Stuck(Formula),
}

#[derive(Debug, Clone)]
pub struct SaturationState {
    pub theory: TheoryApprox,
    pub processed: Vec<ProcessedEvent>,
    pub steps_used: usize,
}

#[derive(Debug, Clone)]
pub enum SaturateOutcome {
    /// no candidate left to process
    Saturated(SaturationState),
    /// the step budget ran out first
    BudgetExhausted(SaturationState),
}

impl SaturateOutcome {
    pub fn state(&self) -> &SaturationState {
        match self {
            SaturateOutcome::Saturated(s) | SaturateOutcome::BudgetExhausted(s) => s,
        }
    }
}

/// Runs the alternating saturation schedule for up to `budget` steps:
/// odd steps process disjunctions and even steps existentials; in
/// diamond mode the schedule cycles disjunction, existential, diamond.
/// Candidates are drawn, in length-then-text order, from the sentential
/// subformula closure of the evolving pair. The output is never refuted
/// at the inner budget; processed existentials always receive a fresh
/// witness from the target signature.
pub fn bounded_saturate(
    logic: LogicId,
    pair: &TheoryApprox,
    target_sig: &Signature,
    budget: usize,
    mode: SaturateMode,
) -> Result<SaturateOutcome, TraceError> {
    for c in pair.signature().constants() {
        if !target_sig.has_constant(c) {
            return Err(TraceError::Theory(crate::proof::TheoryError::NotWellFormed(
                format!("target signature lacks the pair constant {c}"),
            )));
        }
    }
    if let PairVerdict::Refuted(proof) = pair_consistent_bounded(logic, pair, budget.max(1)) {
        return Err(TraceError::InitialRefutation(Box::new(proof)));
    }

    let base_constants: BTreeSet<String> =
        pair.signature().constants().iter().cloned().collect();
    let mut theory = TheoryApprox::new(
        target_sig.clone(),
        pair.asserted().iter().cloned(),
        pair.denied().iter().cloned(),
    )?;
    let mut processed: Vec<ProcessedEvent> = Vec::new();
    let mut steps_used = 0usize;

    for step in 1..=budget {
        let phase = match mode {
            SaturateMode::Plain => {
                if step % 2 == 1 {
                    Phase::Disjunction
                } else {
                    Phase::Henkin
                }
            }
            SaturateMode::Diamond => match step % 3 {
                1 => Phase::Disjunction,
                2 => Phase::Henkin,
                _ => Phase::Diamond,
            },
        };
        let scheduled = next_candidate(logic, &theory, phase, &processed);
        if scheduled.is_none() {
            // stop outright when no phase has a candidate left
            let others: Vec<Phase> = match mode {
                SaturateMode::Plain => vec![Phase::Disjunction, Phase::Henkin],
                SaturateMode::Diamond => {
                    vec![Phase::Disjunction, Phase::Henkin, Phase::Diamond]
                }
            };
            let any_left = others
                .into_iter()
                .filter(|p| *p != phase)
                .any(|p| next_candidate(logic, &theory, p, &processed).is_some());
            if !any_left {
                return Ok(SaturateOutcome::Saturated(SaturationState {
                    theory,
                    processed,
                    steps_used,
                }));
            }
        }
        steps_used = step;
        let Some(cand) = scheduled else {
            continue;
        };
        match phase {
            Phase::Disjunction => {
                let (a, b) = match &cand {
                    Formula::Or(a, b) => ((**a).clone(), (**b).clone()),
                    _ => unreachable!("disjunction candidates are disjunctions"),
                };
                let mut chosen = None;
                for branch in [a, b] {
                    // a branch that is outright denied counts as refuted
                    let Ok(grown) = with_added(&theory, branch.clone()) else {
                        continue;
                    };
                    if !pair_consistent_bounded(logic, &grown, INNER_BUDGET).is_refuted() {
                        chosen = Some((branch, grown));
                        break;
                    }
                }
                match chosen {
                    Some((branch, grown)) => {
                        theory = grown;
                        processed.push(ProcessedEvent::Disjunction(cand, branch));
                    }
                    None => processed.push(ProcessedEvent::Stuck(cand)),
                }
            }
            Phase::Henkin => {
                let body = match &cand {
                    Formula::Exists(x, body) => {
                        crate::syntax::subst_var(body, x, &Term::var("_henkin"))
                            .expect("fresh variable never captures")
                    }
                    _ => unreachable!("henkin candidates are existentials"),
                };
                let used: BTreeSet<String> = theory
                    .asserted()
                    .iter()
                    .chain(theory.denied())
                    .flat_map(|f| f.constants())
                    .collect();
                let fresh = target_sig
                    .constants()
                    .iter()
                    .find(|c| !base_constants.contains(*c) && !used.contains(*c))
                    .cloned()
                    .ok_or(TraceError::OutOfConstants)?;
                let witness =
                    crate::syntax::subst_var(&body, "_henkin", &Term::con(fresh.clone()))
                        .expect("constants never capture");
                // a vacuous existential can make the witness collide
                // with the denied set when an earlier budget-limited
                // step admitted too much; record it as stuck rather
                // than grow into a refuted pair
                match with_added(&theory, witness) {
                    Ok(grown)
                        if !pair_consistent_bounded(logic, &grown, INNER_BUDGET)
                            .is_refuted() =>
                    {
                        theory = grown;
                        processed.push(ProcessedEvent::Henkin(cand, fresh));
                    }
                    _ => processed.push(ProcessedEvent::Stuck(cand)),
                }
            }
            Phase::Diamond => {
                theory = with_added(&theory, cand.clone())?;
                processed.push(ProcessedEvent::Diamond(cand));
            }
        }
    }
    Ok(SaturateOutcome::BudgetExhausted(SaturationState {
        theory,
        processed,
        steps_used,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Disjunction,
    Henkin,
    Diamond,
}

fn with_added(theory: &TheoryApprox, f: Formula) -> Result<TheoryApprox, TraceError> {
    let mut asserted: BTreeSet<Formula> = theory.asserted().clone();
    asserted.insert(f);
    Ok(TheoryApprox::new(
        theory.signature().clone(),
        asserted,
        theory.denied().iter().cloned(),
    )?)
}

fn already_processed(processed: &[ProcessedEvent], cand: &Formula) -> bool {
    processed.iter().any(|e| match e {
        ProcessedEvent::Disjunction(d, _) | ProcessedEvent::Stuck(d) => d == cand,
        ProcessedEvent::Henkin(h, _) => h == cand,
        ProcessedEvent::Diamond(z) => z == cand,
    })
}

/// The least unprocessed candidate of the phase in length-then-text
/// order, per the selection rules: a disjunction must be derivable with
/// neither disjunct derivable; an existential must be derivable with no
/// existing constant witnessing it; a diamond sentence must be
/// underივable but consistent to add.
fn next_candidate(
    logic: LogicId,
    theory: &TheoryApprox,
    phase: Phase,
    processed: &[ProcessedEvent],
) -> Option<Formula> {
    let mut pool: BTreeSet<Formula> = BTreeSet::new();
    for f in theory.asserted().iter().chain(theory.denied()) {
        pool.extend(f.subformulas().into_iter().filter(|g| g.is_sentence()));
    }
    let mut candidates: Vec<Formula> = pool
        .into_iter()
        .filter(|f| match phase {
            Phase::Disjunction => matches!(f, Formula::Or(_, _)),
            Phase::Henkin => matches!(f, Formula::Exists(_, _)),
            Phase::Diamond => matches!(f, Formula::Dia(_)),
        })
        .collect();
    candidates.sort_by_key(|f| (f.size(), f.to_string()));
    let derivable = |goal: &Formula| {
        matches!(
            bounded_derive(logic, theory.asserted(), goal, INNER_BUDGET),
            DeriveOutcome::Proven(_)
        )
    };
    candidates.into_iter().find(|cand| {
        if already_processed(processed, cand) {
            return false;
        }
        match phase {
            Phase::Disjunction => {
                let (a, b) = match cand {
                    Formula::Or(a, b) => (&**a, &**b),
                    _ => return false,
                };
                derivable(cand) && !derivable(a) && !derivable(b)
            }
            Phase::Henkin => {
                if !derivable(cand) {
                    return false;
                }
                let (x, body) = match cand {
                    Formula::Exists(x, body) => (x, &**body),
                    _ => return false,
                };
                let consts: BTreeSet<String> = theory
                    .asserted()
                    .iter()
                    .flat_map(|f| f.constants())
                    .collect();
                !consts.iter().any(|c| {
                    crate::syntax::subst_var(body, x, &Term::con(c.clone()))
                        .map(|inst| derivable(&inst))
                        .unwrap_or(false)
                })
            }
            Phase::Diamond => {
                if derivable(cand) {
                    return false;
                }
                with_added(theory, cand.clone())
                    .map(|grown| {
                        !pair_consistent_bounded(logic, &grown, INNER_BUDGET).is_refuted()
                    })
                    .unwrap_or(false)
            }
        }
    })
}

/// A bounded check of the aversion property: every asserted sentence
/// `box (phi | psi)` must come with `dia psi` asserted or derivable at
/// the budget.
pub fn is_averse_bounded(
    logic: LogicId,
    theory: &TheoryApprox,
    phi: &Formula,
    budget: usize,
) -> bool {
    for f in theory.asserted() {
        if let Formula::Box(inner) = f {
            if let Formula::Or(a, b) = &**inner {
                if **a == *phi {
                    let want = Formula::dia((**b).clone());
                    let proven = matches!(
                        bounded_derive(logic, theory.asserted(), &want, budget),
                        DeriveOutcome::Proven(_)
                    );
                    if !proven {
                        return false;
                    }
                }
            }
        }
    }
    true
}
