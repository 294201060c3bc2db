//! The truth-clause evaluator, the sampled persistence checker, and
//! generated-submodel restriction.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gen;
use crate::syntax::{Formula, Term};

use super::{Model, ModelError, Relation, Report};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("assignment value {elem} outside the domain of {world}")]
    OutsideDomain { elem: String, world: String },
    #[error("unknown world {0}")]
    UnknownWorld(String),
}

/// A variable assignment into a world's domain.
pub type Assignment = BTreeMap<String, usize>;

/// Truth at a world under an assignment.
///
/// The clauses: atoms look up the extension, equality consults the
/// world's partition, implication and the universal quantifier range
/// over intuitionistic successors, `box` ranges over the worlds
/// reachable by one `<=` step followed by one modal step, `dia` and the
/// existential quantifier are one-step witnesses, and `false` never
/// holds.
pub fn eval(m: &Model, w: usize, g: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    for (v, &e) in g {
        if !m.domains[w].contains(&e) {
            return Err(EvalError::OutsideDomain {
                elem: m
                    .elems
                    .get(e)
                    .cloned()
                    .unwrap_or_else(|| format!("#{e}")),
                world: format!("{} (assignment of {})", m.frame.worlds[w], v),
            });
        }
    }
    let mut env: Vec<(&str, usize)> = g.iter().map(|(k, &v)| (k.as_str(), v)).collect();
    let mut scratch = Vec::new();
    go(m, w, &mut env, f, &mut scratch)
}

fn term_value(m: &Model, env: &[(&str, usize)], t: &Term) -> Result<usize, EvalError> {
    match t {
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(name, _)| *name == v)
            .map(|(_, e)| *e)
            .ok_or_else(|| EvalError::UnboundVariable(v.clone())),
        Term::Con(c) => m
            .constants
            .get(c)
            .copied()
            .ok_or_else(|| EvalError::UnknownConstant(c.clone())),
    }
}

fn go<'a>(
    m: &Model,
    w: usize,
    env: &mut Vec<(&'a str, usize)>,
    f: &'a Formula,
    scratch: &mut Vec<usize>,
) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::Pred(p, args) => {
            scratch.clear();
            for t in args {
                scratch.push(term_value(m, env, t)?);
            }
            if m.signature.arity(p).is_none() {
                return Err(EvalError::UnknownPredicate(p.clone()));
            }
            m.extensions[w]
                .get(p)
                .is_some_and(|ts| ts.contains(scratch.as_slice()))
        }
        Formula::Eq(s, t) => {
            let a = term_value(m, env, s)?;
            let b = term_value(m, env, t)?;
            m.eq_at(w, a, b)
        }
        Formula::And(a, b) => go(m, w, env, a, scratch)? && go(m, w, env, b, scratch)?,
        Formula::Or(a, b) => go(m, w, env, a, scratch)? || go(m, w, env, b, scratch)?,
        Formula::Imp(a, b) => {
            for wp in m.frame.leq.successors(w) {
                if go(m, wp, env, a, scratch)? && !go(m, wp, env, b, scratch)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Box(a) => {
            for &v in m.box_targets(w) {
                if !go(m, v, env, a, scratch)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Dia(a) => {
            for v in m.frame.modal.successors(w) {
                if go(m, v, env, a, scratch)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Forall(x, a) => {
            for wp in m.frame.leq.successors(w) {
                for k in 0..m.domain_order(wp).len() {
                    let e = m.domain_order(wp)[k];
                    env.push((x.as_str(), e));
                    let ok = go(m, wp, env, a, scratch)?;
                    env.pop();
                    if !ok {
                        return Ok(false);
                    }
                }
            }
            true
        }
        Formula::Exists(x, a) => {
            for k in 0..m.domain_order(w).len() {
                let e = m.domain_order(w)[k];
                env.push((x.as_str(), e));
                let ok = go(m, w, env, a, scratch)?;
                env.pop();
                if ok {
                    return Ok(true);
                }
            }
            false
        }
        Formula::False => false,
    })
}

/// Evaluates a sentence (empty assignment).
pub fn eval_sentence(m: &Model, w: usize, f: &Formula) -> Result<bool, EvalError> {
    eval(m, w, &Assignment::new(), f)
}

/// Samples (world, assignment, formula) triples and reports any case
/// where truth fails to persist along the intuitionistic order. Any
/// violation indicates a model- or evaluator-level bug.
pub fn check_persistence(m: &Model, samples: usize, seed: u64) -> Report {
    let mut report = Report::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = m.frame.len();
    let vars = ["x".to_string(), "y".to_string()];
    for _ in 0..samples {
        let w = rng.gen_range(0..n);
        let n_free = rng.gen_range(0..=2usize.min(m.domains[w].len()));
        let free: Vec<String> = vars[..n_free].to_vec();
        let f = gen::random_formula(&m.signature, &free, 4, &mut rng);
        let mut g = Assignment::new();
        let dom: Vec<usize> = m.domains[w].iter().copied().collect();
        for v in &free {
            g.insert(v.clone(), dom[rng.gen_range(0..dom.len())]);
        }
        let here = match eval(m, w, &g, &f) {
            Ok(b) => b,
            Err(e) => {
                report.push("eval-error", e.to_string());
                continue;
            }
        };
        if !here {
            continue;
        }
        for wp in m.frame.leq.successors(w) {
            match eval(m, wp, &g, &f) {
                Ok(true) => {}
                Ok(false) => report.push(
                    "persistence",
                    format!(
                        "{} true at {} but false at {}",
                        f, m.frame.worlds[w], m.frame.worlds[wp]
                    ),
                ),
                Err(e) => report.push("eval-error", e.to_string()),
            }
        }
    }
    report
}

/// The submodel generated by the seed worlds: closure under both
/// relations, with everything else restricted accordingly.
pub fn restrict_generated(m: &Model, seeds: &BTreeSet<usize>) -> Result<Model, ModelError> {
    if seeds.is_empty() {
        return Err(ModelError::EmptySeeds);
    }
    let n = m.frame.len();
    let mut keep = vec![false; n];
    let mut stack: Vec<usize> = seeds.iter().copied().collect();
    for &s in seeds {
        keep[s] = true;
    }
    while let Some(w) = stack.pop() {
        for v in m
            .frame
            .leq
            .successors(w)
            .chain(m.frame.modal.successors(w))
        {
            if !keep[v] {
                keep[v] = true;
                stack.push(v);
            }
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&w| keep[w]).collect();
    let index_of: BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let k = kept.len();
    let mut leq = Relation::new(k);
    let mut modal = Relation::new(k);
    for (&old, &new) in &index_of {
        for v in m.frame.leq.successors(old) {
            if let Some(&nv) = index_of.get(&v) {
                leq.set(new, nv);
            }
        }
        for v in m.frame.modal.successors(old) {
            if let Some(&nv) = index_of.get(&v) {
                modal.set(new, nv);
            }
        }
    }
    let frame = super::Frame {
        worlds: kept.iter().map(|&w| m.frame.worlds[w].clone()).collect(),
        leq,
        modal,
    };
    let domains: Vec<BTreeSet<usize>> = kept.iter().map(|&w| m.domains[w].clone()).collect();
    let eq_blocks: Vec<Vec<Vec<usize>>> = kept
        .iter()
        .map(|&w| {
            let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (&e, &r) in &m.eq_rep[w] {
                blocks.entry(r).or_default().push(e);
            }
            blocks.into_values().collect()
        })
        .collect();
    let extensions = kept.iter().map(|&w| m.extensions[w].clone()).collect();
    Model::new(
        m.signature.clone(),
        frame,
        m.elems.clone(),
        domains,
        eq_blocks,
        m.constants.clone(),
        extensions,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::Frame;
    use crate::syntax::Signature;

    fn sig() -> Signature {
        Signature::new(
            vec!["c".into()],
            [("P".to_string(), 1)].into_iter().collect(),
        )
        .unwrap()
    }

    /// Two worlds w0 <= w1, one element, P(c) true only at w1.
    fn ascending() -> Model {
        let mut leq = Relation::new(2);
        leq.set(0, 1);
        leq.reflexive_close();
        leq.transitive_close();
        let frame = Frame {
            worlds: vec!["w0".into(), "w1".into()],
            leq,
            modal: Relation::new(2),
        };
        Model::new(
            sig(),
            frame,
            vec!["e".into()],
            vec![[0].into_iter().collect(), [0].into_iter().collect()],
            vec![vec![], vec![]],
            [("c".to_string(), 0)].into_iter().collect(),
            vec![
                BTreeMap::new(),
                [(
                    "P".to_string(),
                    [vec![0]].into_iter().collect::<BTreeSet<_>>(),
                )]
                .into_iter()
                .collect(),
            ],
        )
        .unwrap()
    }

    fn pc() -> Formula {
        Formula::pred("P", vec![Term::con("c")])
    }

    #[test]
    fn atomic_truth() {
        let m = ascending();
        assert!(!eval_sentence(&m, 0, &pc()).unwrap());
        assert!(eval_sentence(&m, 1, &pc()).unwrap());
    }

    #[test]
    fn ascending_chain_decides_the_spec_cases() {
        let m = ascending();
        // at w0: P(c) false, ~~P(c) true, P(c) | ~P(c) false
        assert!(!eval_sentence(&m, 0, &pc()).unwrap());
        assert!(eval_sentence(&m, 0, &Formula::neg(Formula::neg(pc()))).unwrap());
        assert!(!eval_sentence(&m, 0, &Formula::or(pc(), Formula::neg(pc()))).unwrap());
    }

    #[test]
    fn box_is_vacuous_without_modal_successors() {
        let m = ascending();
        assert!(eval_sentence(&m, 0, &Formula::boxed(Formula::False)).unwrap());
        assert!(!eval_sentence(&m, 0, &Formula::dia(Formula::top())).unwrap());
    }

    #[test]
    fn quantifiers_over_growing_domains() {
        // unchanged domain: forall x P(x) quantifies over successors too
        let m = ascending();
        let all = Formula::forall("x", Formula::pred("P", vec![Term::var("x")]));
        // at w1, P holds of everything; at w0 the w1-stage fails it
        assert!(eval_sentence(&m, 1, &all).unwrap());
        assert!(!eval_sentence(&m, 0, &all).unwrap());
        let some = Formula::exists("x", Formula::pred("P", vec![Term::var("x")]));
        assert!(!eval_sentence(&m, 0, &some).unwrap());
        assert!(eval_sentence(&m, 1, &some).unwrap());
    }

    #[test]
    fn persistence_clean_on_valid_model() {
        let m = ascending();
        let report = check_persistence(&m, 300, 5);
        assert!(report.is_empty(), "{report}");
    }

    #[test]
    fn persistence_catches_corruption() {
        let mut m = ascending();
        // make P true at w0 but not w1: a deliberate monotonicity break
        m.extensions[0].insert(
            "P".to_string(),
            [vec![0]].into_iter().collect::<BTreeSet<_>>(),
        );
        m.extensions[1].clear();
        let report = check_persistence(&m, 300, 5);
        assert!(!report.is_empty());
    }

    #[test]
    fn restriction_identity_and_single() {
        let m = ascending();
        let all: BTreeSet<usize> = [0, 1].into_iter().collect();
        let same = restrict_generated(&m, &all).unwrap();
        assert_eq!(m, same);
        let single: BTreeSet<usize> = [1].into_iter().collect();
        let one = restrict_generated(&m, &single).unwrap();
        assert_eq!(one.frame.worlds, vec!["w1".to_string()]);
        assert!(one.validate().is_empty());
        assert!(restrict_generated(&m, &BTreeSet::new()).is_err());
    }

    #[test]
    fn vacuous_binder_laws() {
        let m = ascending();
        // x not free in P(c): exists x P(c) == P(c)
        for w in 0..2 {
            let e = eval_sentence(&m, w, &Formula::exists("x", pc())).unwrap();
            let direct = eval_sentence(&m, w, &pc()).unwrap();
            assert_eq!(e, direct);
        }
    }
}
