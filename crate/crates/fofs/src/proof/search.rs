//! Best-effort bounded derivability and pair-consistency refutation.
//!
//! The search is deterministic for fixed inputs and budget: a
//! goal-directed decomposition (implication, conjunction, and
//! universal goals), then a pool of lemma candidates in a fixed order
//! (axiom instances drawn from the subformula closure first, then
//! regularity steps whose side implications are derived recursively on
//! a shared step counter), with an intuitionistic-consequence test
//! after every pool addition. Modus ponens lives inside that final IPC
//! step. `Unknown` is never a claim of non-derivability.

use std::collections::BTreeSet;

use crate::syntax::{subst_var, Formula, Term};

use super::{
    check_proof, derive_schema, gamma_imp, ipc::ipc_entails_limited, DerivedSchema,
    Justification, LogicId, Proof, ProofLine, Rule, TheoryApprox,
};

/// Work limit per intuitionistic test inside the bounded search; a
/// test that exhausts it counts as unproven.
const IPC_SEARCH_FUEL: usize = 50_000;

#[derive(Debug, Clone)]
pub enum DeriveOutcome {
    Proven(Proof),
    Unknown,
}

impl DeriveOutcome {
    pub fn proof(&self) -> Option<&Proof> {
        match self {
            DeriveOutcome::Proven(p) => Some(p),
            DeriveOutcome::Unknown => None,
        }
    }
}

#[derive(Debug, Clone)]
pub enum PairVerdict {
    Refuted(Proof),
    Unknown,
}

impl PairVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, PairVerdict::Refuted(_))
    }
}

/// Searches for a proof of `gamma |- phi` within `budget` candidate
/// steps. A returned proof always passes `check_proof`.
pub fn bounded_derive(
    logic: LogicId,
    gamma: &BTreeSet<Formula>,
    phi: &Formula,
    budget: usize,
) -> DeriveOutcome {
    let mut gamma_vec: Vec<Formula> = gamma.iter().cloned().collect();
    gamma_vec.sort_by_key(|f| f.to_string());
    let mut steps = budget;
    match derive_rec(logic, &gamma_vec, phi, &mut steps) {
        Some(p) => {
            debug_assert!(check_proof(&p).is_accepted());
            DeriveOutcome::Proven(p)
        }
        None => DeriveOutcome::Unknown,
    }
}

/// Refutes a pair by deriving the disjunction of the denied sentences
/// (or `false` when nothing is denied) from the asserted set.
pub fn pair_consistent_bounded(
    logic: LogicId,
    pair: &TheoryApprox,
    budget: usize,
) -> PairVerdict {
    let target = denied_disjunction(pair);
    match bounded_derive(logic, pair.asserted(), &target, budget) {
        DeriveOutcome::Proven(p) => PairVerdict::Refuted(p),
        DeriveOutcome::Unknown => PairVerdict::Unknown,
    }
}

/// The refutation target of a pair: the text-ordered disjunction of the
/// denied set, defaulting to `false`.
pub(crate) fn denied_disjunction(pair: &TheoryApprox) -> Formula {
    let mut denied: Vec<Formula> = pair.denied().iter().cloned().collect();
    if denied.is_empty() {
        return Formula::False;
    }
    denied.sort_by_key(|f| f.to_string());
    Formula::disj(denied)
}

fn derive_rec(
    logic: LogicId,
    gamma: &[Formula],
    phi: &Formula,
    steps: &mut usize,
) -> Option<Proof> {
    // Pool-free intuitionistic consequence.
    if ipc_entails_limited(gamma, phi, IPC_SEARCH_FUEL) {
        let target = gamma_imp(gamma, phi);
        return Some(Proof {
            logic,
            assumptions: gamma.to_vec(),
            lines: vec![ProofLine {
                id: 1,
                formula: target,
                justification: Justification::Ipc(vec![]),
            }],
            conclusion: phi.clone(),
        });
    }

    // Goal-directed decomposition.
    match phi {
        Formula::And(a, b) => {
            if let Some(pa) = derive_rec(logic, gamma, a, steps) {
                if let Some(pb) = derive_rec(logic, gamma, b, steps) {
                    return Some(combine_two(logic, gamma, &pa, &pb, phi));
                }
            }
        }
        Formula::Imp(a, b) => {
            if a.is_sentence() {
                let mut wider: Vec<Formula> = gamma.to_vec();
                if !wider.contains(a) {
                    wider.push((**a).clone());
                    wider.sort_by_key(|f| f.to_string());
                }
                if let Some(pb) = derive_rec(logic, &wider, b, steps) {
                    return Some(combine_one(logic, gamma, &pb, phi));
                }
            }
        }
        Formula::Forall(x, body) => {
            let fv = body.free_vars();
            if fv.len() == 1 && fv.contains(x) {
                let mut used: BTreeSet<String> = phi.constants();
                for g in gamma {
                    used.extend(g.constants());
                }
                let fresh = (0..)
                    .map(|i| format!("_g{i}"))
                    .find(|c| !used.contains(c))
                    .unwrap();
                if let Ok(inst) = subst_var(body, x, &Term::con(fresh.clone())) {
                    if let Some(sub) = derive_rec(logic, gamma, &inst, steps) {
                        if let Ok(p) = derive_schema(
                            logic,
                            DerivedSchema::Generalize {
                                premise: sub,
                                constant: fresh,
                                variable: x.clone(),
                            },
                        ) {
                            return Some(p);
                        }
                    }
                }
            }
        }
        _ => {}
    }

    // Lemma pool.
    let cands = candidates(logic, gamma, phi);
    let mut pool: Vec<PoolItem> = Vec::new();
    let mut pool_formulas: Vec<Formula> = gamma.to_vec();
    for cand in cands {
        if *steps == 0 {
            return None;
        }
        *steps -= 1;
        let item = match cand {
            Cand::Ax(rule, f) => PoolItem::Ax(rule, f),
            Cand::Reg(a, b) => {
                let side = Formula::imp(a.clone(), b.clone());
                match derive_rec(logic, &[], &side, steps) {
                    Some(sub) => PoolItem::Reg(sub, a, b),
                    None => continue,
                }
            }
        };
        for f in item.formulas() {
            pool_formulas.push(f);
        }
        pool.push(item);
        if ipc_entails_limited(&pool_formulas, phi, IPC_SEARCH_FUEL) {
            return Some(assemble(logic, gamma, &pool, phi));
        }
    }
    None
}

enum Cand {
    Ax(Rule, Formula),
    Reg(Formula, Formula),
}

enum PoolItem {
    Ax(Rule, Formula),
    Reg(Proof, Formula, Formula),
}

impl PoolItem {
    fn formulas(&self) -> Vec<Formula> {
        match self {
            PoolItem::Ax(_, f) => vec![f.clone()],
            PoolItem::Reg(_, a, b) => vec![
                Formula::imp(Formula::boxed(a.clone()), Formula::boxed(b.clone())),
                Formula::imp(Formula::dia(a.clone()), Formula::dia(b.clone())),
            ],
        }
    }
}

fn candidates(logic: LogicId, gamma: &[Formula], phi: &Formula) -> Vec<Cand> {
    let mut closure: BTreeSet<Formula> = phi.subformulas();
    for g in gamma {
        closure.extend(g.subformulas());
    }
    let sentences: Vec<Formula> = {
        let mut v: Vec<Formula> = closure.iter().filter(|f| f.is_sentence()).cloned().collect();
        v.sort_by_key(|f| f.to_string());
        v
    };
    let modal_bodies: Vec<Formula> = {
        let mut set = BTreeSet::new();
        for f in &sentences {
            match f {
                Formula::Box(a) | Formula::Dia(a) => {
                    set.insert((**a).clone());
                }
                _ => {}
            }
        }
        let mut v: Vec<Formula> = set.into_iter().collect();
        v.sort_by_key(|f| f.to_string());
        v
    };
    let consts: Vec<String> = {
        let mut set: BTreeSet<String> = phi.constants();
        for g in gamma {
            set.extend(g.constants());
        }
        set.into_iter().collect()
    };
    let axioms = logic.axioms();

    let mut out = Vec::new();
    out.push(Cand::Ax(Rule::KBb, Formula::boxed(Formula::top())));
    out.push(Cand::Ax(
        Rule::KDb,
        Formula::neg(Formula::dia(Formula::False)),
    ));
    for u in &modal_bodies {
        if let Formula::And(a, b) = u {
            out.push(Cand::Ax(
                Rule::KBa,
                kba_instance((**a).clone(), (**b).clone()),
            ));
        }
        if let Formula::Or(a, b) = u {
            out.push(Cand::Ax(
                Rule::KDa,
                kda_instance((**a).clone(), (**b).clone()),
            ));
        }
        if let Formula::Imp(a, b) = u {
            out.push(Cand::Ax(
                Rule::Fs1,
                Formula::imp(
                    Formula::imp(Formula::dia((**a).clone()), Formula::boxed((**b).clone())),
                    Formula::boxed(u.clone()),
                ),
            ));
            out.push(Cand::Ax(
                Rule::Fs2,
                Formula::imp(
                    Formula::dia(u.clone()),
                    Formula::imp(Formula::boxed((**a).clone()), Formula::dia((**b).clone())),
                ),
            ));
        }
        if axioms.contains(&Rule::D) {
            out.push(Cand::Ax(
                Rule::D,
                Formula::imp(Formula::boxed(u.clone()), Formula::dia(u.clone())),
            ));
        }
        if axioms.contains(&Rule::TBox) {
            out.push(Cand::Ax(
                Rule::TBox,
                Formula::imp(Formula::boxed(u.clone()), u.clone()),
            ));
            out.push(Cand::Ax(
                Rule::TDia,
                Formula::imp(u.clone(), Formula::dia(u.clone())),
            ));
        }
        if axioms.contains(&Rule::FourBox) {
            out.push(Cand::Ax(
                Rule::FourBox,
                Formula::imp(
                    Formula::boxed(u.clone()),
                    Formula::boxed(Formula::boxed(u.clone())),
                ),
            ));
            out.push(Cand::Ax(
                Rule::FourDia,
                Formula::imp(
                    Formula::dia(Formula::dia(u.clone())),
                    Formula::dia(u.clone()),
                ),
            ));
        }
    }
    // quantifier instances
    for f in &sentences {
        match f {
            Formula::Forall(x, body) if one_place(body, x) => {
                for c in &consts {
                    if let Ok(inst) = subst_var(body, x, &Term::con(c.clone())) {
                        out.push(Cand::Ax(Rule::Univ, Formula::imp(f.clone(), inst)));
                    }
                }
            }
            Formula::Exists(x, body) if one_place(body, x) => {
                for c in &consts {
                    if let Ok(inst) = subst_var(body, x, &Term::con(c.clone())) {
                        out.push(Cand::Ax(Rule::Exist, Formula::imp(inst, f.clone())));
                    }
                }
            }
            _ => {}
        }
    }
    // equality reasoning
    let eqs: Vec<(String, String)> = sentences
        .iter()
        .filter_map(|f| match f {
            Formula::Eq(Term::Con(a), Term::Con(b)) => Some((a.clone(), b.clone())),
            _ => None,
        })
        .collect();
    if !eqs.is_empty() {
        for c in &consts {
            out.push(Cand::Ax(
                Rule::IdRef,
                Formula::eq(Term::con(c.clone()), Term::con(c.clone())),
            ));
        }
    }
    for (c1, c2) in &eqs {
        let eq = Formula::eq(Term::con(c1.clone()), Term::con(c2.clone()));
        // substitution into every subformula sentence mentioning c1
        for f in &sentences {
            if matches!(f, Formula::Eq(_, _)) || !f.constants().contains(c1) {
                continue;
            }
            if !logic.ni && !f.is_modal_free() {
                continue;
            }
            let swapped = replace_constant(f, c1, c2);
            out.push(Cand::Ax(
                Rule::IdSub,
                Formula::imp(eq.clone(), Formula::imp(f.clone(), swapped)),
            ));
        }
        // symmetry helper: c1 = c2 -> (c1 = c1 -> c2 = c1)
        out.push(Cand::Ax(
            Rule::IdSub,
            Formula::imp(
                eq.clone(),
                Formula::imp(
                    Formula::eq(Term::con(c1.clone()), Term::con(c1.clone())),
                    Formula::eq(Term::con(c2.clone()), Term::con(c1.clone())),
                ),
            ),
        ));
        if logic.ni {
            out.push(Cand::Ax(Rule::Ni, Formula::imp(eq.clone(), Formula::boxed(eq.clone()))));
        }
        if logic.nd {
            out.push(Cand::Ax(Rule::Nd, Formula::imp(Formula::dia(eq.clone()), eq.clone())));
        }
    }
    // regularity steps, most expensive last
    for a in &modal_bodies {
        for b in &modal_bodies {
            if a != b {
                out.push(Cand::Reg(a.clone(), b.clone()));
            }
        }
    }
    out
}

fn one_place(body: &Formula, x: &str) -> bool {
    let fv = body.free_vars();
    fv.len() == 1 && fv.contains(x)
}

fn replace_constant(f: &Formula, from: &str, to: &str) -> Formula {
    // total constant-for-constant replacement; no capture is possible
    let x = "_swap";
    let abstracted = crate::syntax::abstract_constant(f, from, x);
    match abstracted {
        Ok(g) => subst_var(&g, x, &Term::con(to.to_string())).unwrap_or_else(|_| f.clone()),
        Err(_) => f.clone(),
    }
}

fn kba_instance(a: Formula, b: Formula) -> Formula {
    let both = Formula::boxed(Formula::and(a.clone(), b.clone()));
    let split = Formula::and(Formula::boxed(a), Formula::boxed(b));
    Formula::and(
        Formula::imp(both.clone(), split.clone()),
        Formula::imp(split, both),
    )
}

fn kda_instance(a: Formula, b: Formula) -> Formula {
    let either = Formula::dia(Formula::or(a.clone(), b.clone()));
    let split = Formula::or(Formula::dia(a), Formula::dia(b));
    Formula::and(
        Formula::imp(either.clone(), split.clone()),
        Formula::imp(split, either),
    )
}

fn assemble(logic: LogicId, gamma: &[Formula], pool: &[PoolItem], phi: &Formula) -> Proof {
    let mut lines: Vec<ProofLine> = Vec::new();
    let mut cite: Vec<usize> = Vec::new();
    for item in pool {
        match item {
            PoolItem::Ax(rule, f) => {
                let id = lines.len() + 1;
                lines.push(ProofLine {
                    id,
                    formula: f.clone(),
                    justification: Justification::Axiom(*rule),
                });
                cite.push(id);
            }
            PoolItem::Reg(sub, a, b) => {
                let offset = lines.len();
                for l in &sub.lines {
                    let justification = remap_justification(&l.justification, offset);
                    lines.push(ProofLine {
                        id: l.id + offset,
                        formula: l.formula.clone(),
                        justification,
                    });
                }
                let side_id = lines.len();
                let box_id = lines.len() + 1;
                lines.push(ProofLine {
                    id: box_id,
                    formula: Formula::imp(Formula::boxed(a.clone()), Formula::boxed(b.clone())),
                    justification: Justification::RegBox(side_id),
                });
                let dia_id = lines.len() + 1;
                lines.push(ProofLine {
                    id: dia_id,
                    formula: Formula::imp(Formula::dia(a.clone()), Formula::dia(b.clone())),
                    justification: Justification::RegDia(side_id),
                });
                cite.push(box_id);
                cite.push(dia_id);
            }
        }
    }
    let target = gamma_imp(gamma, phi);
    let id = lines.len() + 1;
    lines.push(ProofLine {
        id,
        formula: target,
        justification: Justification::Ipc(cite),
    });
    Proof {
        logic,
        assumptions: gamma.to_vec(),
        lines,
        conclusion: phi.clone(),
    }
}

fn remap_justification(j: &Justification, offset: usize) -> Justification {
    match j {
        Justification::Axiom(r) => Justification::Axiom(*r),
        Justification::Mp(i, k) => Justification::Mp(i + offset, k + offset),
        Justification::Gen {
            premise,
            constant,
            variable,
        } => Justification::Gen {
            premise: premise + offset,
            constant: constant.clone(),
            variable: variable.clone(),
        },
        Justification::RegBox(i) => Justification::RegBox(i + offset),
        Justification::RegDia(i) => Justification::RegDia(i + offset),
        Justification::Ipc(ids) => Justification::Ipc(ids.iter().map(|i| i + offset).collect()),
    }
}

fn combine_two(
    logic: LogicId,
    gamma: &[Formula],
    pa: &Proof,
    pb: &Proof,
    phi: &Formula,
) -> Proof {
    let mut lines = Vec::new();
    let mut offset = 0;
    let mut cite = Vec::new();
    for sub in [pa, pb] {
        for l in &sub.lines {
            lines.push(ProofLine {
                id: l.id + offset,
                formula: l.formula.clone(),
                justification: remap_justification(&l.justification, offset),
            });
        }
        offset = lines.len();
        cite.push(offset);
    }
    let target = gamma_imp(gamma, phi);
    lines.push(ProofLine {
        id: lines.len() + 1,
        formula: target,
        justification: Justification::Ipc(cite),
    });
    Proof {
        logic,
        assumptions: gamma.to_vec(),
        lines,
        conclusion: phi.clone(),
    }
}

fn combine_one(logic: LogicId, gamma: &[Formula], sub: &Proof, phi: &Formula) -> Proof {
    let mut lines = Vec::new();
    for l in &sub.lines {
        lines.push(l.clone());
    }
    let last = lines.len();
    let target = gamma_imp(gamma, phi);
    lines.push(ProofLine {
        id: lines.len() + 1,
        formula: target,
        justification: Justification::Ipc(vec![last]),
    });
    Proof {
        logic,
        assumptions: gamma.to_vec(),
        lines,
        conclusion: phi.clone(),
    }
}
