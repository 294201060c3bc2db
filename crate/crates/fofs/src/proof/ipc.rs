//! Decision procedure for intuitionistic propositional logic.
//!
//! Backward proof search in a contraction-free sequent calculus: the
//! left implication rule is split by the shape of the antecedent, which
//! bounds every branch by a decreasing degree measure, so search
//! terminates without loop checking.
//!
//! The modal and first-order connectives never reach the prover: a
//! formula is first *skeletonized*, freezing each maximal subformula
//! whose head is an atom, `=`, `box`, `dia`, `forall`, or `exists` as an
//! opaque propositional atom (identical subformulas freeze to the same
//! atom). A formula is a substitution instance of an IPC theorem exactly
//! when its skeleton is provable.

use std::collections::BTreeMap;

use crate::syntax::{Formula, SyntaxError};

/// Propositional skeleton over frozen atoms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Prop {
    Atom(u32),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Imp(Box<Prop>, Box<Prop>),
    Bot,
}

pub(crate) fn skeleton(f: &Formula) -> Prop {
    let mut table = BTreeMap::new();
    skeleton_with(f, &mut table)
}

fn skeleton_with(f: &Formula, table: &mut BTreeMap<Formula, u32>) -> Prop {
    match f {
        Formula::And(a, b) => Prop::And(
            Box::new(skeleton_with(a, table)),
            Box::new(skeleton_with(b, table)),
        ),
        Formula::Or(a, b) => Prop::Or(
            Box::new(skeleton_with(a, table)),
            Box::new(skeleton_with(b, table)),
        ),
        Formula::Imp(a, b) => Prop::Imp(
            Box::new(skeleton_with(a, table)),
            Box::new(skeleton_with(b, table)),
        ),
        Formula::False => Prop::Bot,
        frozen => {
            let next = table.len() as u32;
            let id = *table.entry(frozen.clone()).or_insert(next);
            Prop::Atom(id)
        }
    }
}

/// Decides intuitionistic propositional validity of a formula built from
/// predicate/equality atoms, `&`, `|`, `->`, and `false`. Modal or
/// quantified input is rejected.
pub fn ipc_decide(f: &Formula) -> Result<bool, SyntaxError> {
    let mut bad = None;
    f_walk(f, &mut |g| {
        if matches!(
            g,
            Formula::Box(_) | Formula::Dia(_) | Formula::Forall(_, _) | Formula::Exists(_, _)
        ) && bad.is_none()
        {
            bad = Some(format!("{g}"));
        }
    });
    if let Some(sub) = bad {
        return Err(SyntaxError::Parse {
            pos: 0,
            msg: format!("non-propositional subformula {sub}"),
        });
    }
    Ok(ipc_valid_skeleton(f))
}

fn f_walk(f: &Formula, check: &mut impl FnMut(&Formula)) {
    check(f);
    match f {
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
            f_walk(a, check);
            f_walk(b, check);
        }
        Formula::Box(a) | Formula::Dia(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => {
            f_walk(a, check)
        }
        _ => {}
    }
}

/// Is `f` a substitution instance of an IPC theorem? Total on all
/// formulas; used by the proof checker for INT axioms and IPC lines.
pub(crate) fn ipc_valid_skeleton(f: &Formula) -> bool {
    let mut fuel = usize::MAX;
    prove(Ctx::default(), Vec::new(), skeleton(f), &mut fuel)
}

/// Is `conj(premises) -> goal` a substitution instance of an IPC
/// theorem? Freezing is shared across premises and goal.
pub(crate) fn ipc_entails(premises: &[Formula], goal: &Formula) -> bool {
    let mut fuel = usize::MAX;
    ipc_entails_fueled(premises, goal, &mut fuel)
}

/// Entailment with a work limit for the proof-search side: exhausting
/// the fuel answers `false`, so a `true` is always a genuine theorem
/// and the exact checker re-verifies anything search emits.
pub(crate) fn ipc_entails_limited(premises: &[Formula], goal: &Formula, fuel: usize) -> bool {
    let mut fuel = fuel;
    ipc_entails_fueled(premises, goal, &mut fuel)
}

fn ipc_entails_fueled(premises: &[Formula], goal: &Formula, fuel: &mut usize) -> bool {
    let mut table = BTreeMap::new();
    let ctx: Vec<Prop> = premises
        .iter()
        .map(|p| skeleton_with(p, &mut table))
        .collect();
    let g = skeleton_with(goal, &mut table);
    prove(Ctx::default(), ctx, g, fuel)
}

/// Saturated context: atoms seen so far plus stored implications whose
/// antecedent is an absent atom or a nested implication.
#[derive(Debug, Clone, Default)]
struct Ctx {
    atoms: Vec<u32>,
    atom_imps: Vec<(u32, Prop)>,
    nested_imps: Vec<(Prop, Prop, Prop)>, // ((c -> d) -> b) stored as (c, d, b)
}

impl Ctx {
    fn has_atom(&self, a: u32) -> bool {
        self.atoms.contains(&a)
    }
}

fn prove(mut ctx: Ctx, mut pending: Vec<Prop>, mut goal: Prop, fuel: &mut usize) -> bool {
    match fuel.checked_sub(1) {
        Some(f) => *fuel = f,
        None => return false,
    }
    while let Prop::Imp(a, b) = goal {
        pending.push(*a);
        goal = *b;
    }
    if let Prop::And(a, b) = goal {
        return prove(ctx.clone(), pending.clone(), *a, fuel) && prove(ctx, pending, *b, fuel);
    }

    // Invertible left rules, to saturation.
    while let Some(p) = pending.pop() {
        match p {
            Prop::Bot => return true,
            Prop::Atom(x) => {
                if !ctx.has_atom(x) {
                    ctx.atoms.push(x);
                    let mut i = 0;
                    while i < ctx.atom_imps.len() {
                        if ctx.atom_imps[i].0 == x {
                            let (_, body) = ctx.atom_imps.swap_remove(i);
                            pending.push(body);
                        } else {
                            i += 1;
                        }
                    }
                }
            }
            Prop::And(a, b) => {
                pending.push(*a);
                pending.push(*b);
            }
            Prop::Or(a, b) => {
                let mut lp = pending.clone();
                lp.push(*a);
                if !prove(ctx.clone(), lp, goal.clone(), fuel) {
                    return false;
                }
                pending.push(*b);
                return prove(ctx, pending, goal, fuel);
            }
            Prop::Imp(ant, body) => match *ant {
                Prop::Bot => {}
                Prop::Atom(x) => {
                    if ctx.has_atom(x) {
                        pending.push(*body);
                    } else {
                        ctx.atom_imps.push((x, *body));
                    }
                }
                Prop::And(c, d) => {
                    pending.push(Prop::Imp(c, Box::new(Prop::Imp(d, body))));
                }
                Prop::Or(c, d) => {
                    pending.push(Prop::Imp(c, Box::new((*body).clone())));
                    pending.push(Prop::Imp(d, body));
                }
                Prop::Imp(c, d) => {
                    ctx.nested_imps.push((*c, *d, *body));
                }
            },
        }
    }

    if let Prop::Atom(x) = goal {
        if ctx.has_atom(x) {
            return true;
        }
    }

    // Non-invertible choices, tried with backtracking.
    if let Prop::Or(a, b) = &goal {
        if prove(ctx.clone(), Vec::new(), (**a).clone(), fuel)
            || prove(ctx.clone(), Vec::new(), (**b).clone(), fuel)
        {
            return true;
        }
    }
    for i in 0..ctx.nested_imps.len() {
        let (c, d, b) = ctx.nested_imps[i].clone();
        let mut without = ctx.clone();
        without.nested_imps.remove(i);
        // premise 1: Gamma, d -> b  =>  c -> d
        let pending1 = vec![Prop::Imp(Box::new(d.clone()), Box::new(b.clone()))];
        let goal1 = Prop::Imp(Box::new(c), Box::new(d));
        if prove(without.clone(), pending1, goal1, fuel) {
            // premise 2: Gamma, b  =>  goal
            if prove(without, vec![b], goal.clone(), fuel) {
                return true;
            }
        }
    }
    false
}
