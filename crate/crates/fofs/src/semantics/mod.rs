//! Finite birelational models with increasing domains and per-world
//! equality: structural validators, the truth-clause evaluator, and
//! generated-submodel restriction.

mod eval;
mod file;

pub use eval::{check_persistence, eval, eval_sentence, restrict_generated, Assignment, EvalError};
pub use file::{model_from_json, model_to_json, ModelFileError};

use std::collections::{BTreeMap, BTreeSet};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use crate::syntax::Signature;

/// A binary relation on `0..n`, one bitset row per source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    n: usize,
    rows: Vec<FixedBitSet>,
}

impl Relation {
    pub fn new(n: usize) -> Relation {
        Relation {
            n,
            rows: vec![FixedBitSet::with_capacity(n); n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn set(&mut self, a: usize, b: usize) {
        self.rows[a].insert(b);
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    pub fn successors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.rows[a].ones()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |a| self.rows[a].ones().map(move |b| (a, b)))
    }

    pub fn reflexive_close(&mut self) {
        for a in 0..self.n {
            self.rows[a].insert(a);
        }
    }

    pub fn transitive_close(&mut self) {
        loop {
            let mut changed = false;
            for a in 0..self.n {
                let mut acc = self.rows[a].clone();
                for b in self.rows[a].ones().collect::<Vec<_>>() {
                    acc.union_with(&self.rows[b]);
                }
                if acc != self.rows[a] {
                    self.rows[a] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|a| self.contains(a, a))
    }

    pub fn is_transitive(&self) -> bool {
        self.pairs().all(|(a, b)| self.rows[b].is_subset(&self.rows[a]))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.pairs().all(|(a, b)| a == b || !self.contains(b, a))
    }

    pub fn is_serial(&self) -> bool {
        (0..self.n).all(|a| self.rows[a].count_ones(..) > 0)
    }
}

/// Worlds with the intuitionistic order and the modal relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub worlds: Vec<String>,
    pub leq: Relation,
    pub modal: Relation,
}

impl Frame {
    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.iter().position(|w| w == name)
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: String,
    pub witness: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, condition: &str, witness: String) {
        self.violations.push(Violation {
            condition: condition.to_string(),
            witness,
        });
    }

    pub fn merge(&mut self, other: Report) {
        self.violations.extend(other.violations);
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.violations.is_empty() {
            write!(f, "ok")
        } else {
            for v in &self.violations {
                writeln!(f, "{}: {}", v.condition, v.witness)?;
            }
            Ok(())
        }
    }
}

/// Checks partial-order laws for the intuitionistic relation and the two
/// compatibility conditions tying it to the modal relation.
pub fn validate_frame(frame: &Frame) -> Report {
    let mut report = Report::default();
    let n = frame.len();
    let name = |w: usize| frame.worlds[w].clone();
    for w in 0..n {
        if !frame.leq.contains(w, w) {
            report.push("int-reflexivity", name(w));
        }
    }
    for (a, b) in frame.leq.pairs() {
        if a != b && frame.leq.contains(b, a) {
            report.push("int-antisymmetry", format!("{} <= {} <= {}", name(a), name(b), name(a)));
        }
        for c in frame.leq.successors(b) {
            if !frame.leq.contains(a, c) {
                report.push(
                    "int-transitivity",
                    format!("{} <= {} <= {}", name(a), name(b), name(c)),
                );
            }
        }
    }
    // FC1: w R v <= v' requires some w' with w <= w' R v'
    for (w, v) in frame.modal.pairs() {
        for vp in frame.leq.successors(v) {
            let ok = frame
                .leq
                .successors(w)
                .any(|wp| frame.modal.contains(wp, vp));
            if !ok {
                report.push(
                    "fc1",
                    format!("{} R {} <= {}", name(w), name(v), name(vp)),
                );
            }
        }
    }
    // FC2: w <= w', w R v requires some v' with v <= v' and w' R v'
    for (w, wp) in frame.leq.pairs() {
        for v in frame.modal.successors(w) {
            let ok = frame
                .leq
                .successors(v)
                .any(|vp| frame.modal.contains(wp, vp));
            if !ok {
                report.push(
                    "fc2",
                    format!("{} <= {}, {} R {}", name(w), name(wp), name(w), name(v)),
                );
            }
        }
    }
    report
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown world {0}")]
    UnknownWorld(String),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("predicate {pred} expects arity {expected}, got tuple of {got}")]
    Arity {
        pred: String,
        expected: usize,
        got: usize,
    },
    #[error("duplicate name {0}")]
    Duplicate(String),
    #[error("equality block member {elem} not in the domain of {world}")]
    BlockOutsideDomain { elem: String, world: String },
    #[error("closing the intuitionistic relation broke antisymmetry: {0}")]
    ClosureAntisymmetry(String),
    #[error("restriction seeds are empty")]
    EmptySeeds,
    #[error("{0}")]
    Signature(#[from] crate::syntax::SyntaxError),
}

/// A finite model: frame, domain system, and interpretation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub signature: Signature,
    pub frame: Frame,
    pub elems: Vec<String>,
    /// per-world domains, as element indices
    pub domains: Vec<BTreeSet<usize>>,
    /// per-world representative map: element -> least element of its block
    pub eq_rep: Vec<BTreeMap<usize, usize>>,
    pub constants: BTreeMap<String, usize>,
    /// per-world predicate extensions
    pub extensions: Vec<BTreeMap<String, BTreeSet<Vec<usize>>>>,
    /// per-world frontier of the box clause: first <=, then R
    box_frontier: Vec<Vec<usize>>,
    /// per-world domain in iteration order
    domain_order: Vec<Vec<usize>>,
    /// per-world representative lookup indexed by element id
    rep_index: Vec<Vec<usize>>,
}

const NO_REP: usize = usize::MAX;

impl Model {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        signature: Signature,
        frame: Frame,
        elems: Vec<String>,
        domains: Vec<BTreeSet<usize>>,
        eq_blocks: Vec<Vec<Vec<usize>>>,
        constants: BTreeMap<String, usize>,
        extensions: Vec<BTreeMap<String, BTreeSet<Vec<usize>>>>,
    ) -> Result<Model, ModelError> {
        let n = frame.len();
        assert_eq!(domains.len(), n, "one domain per world");
        assert_eq!(eq_blocks.len(), n, "one partition per world");
        assert_eq!(extensions.len(), n, "one extension table per world");
        {
            let mut seen = BTreeSet::new();
            for w in &frame.worlds {
                if !seen.insert(w.clone()) {
                    return Err(ModelError::Duplicate(w.clone()));
                }
            }
            let mut seen = BTreeSet::new();
            for e in &elems {
                if !seen.insert(e.clone()) {
                    return Err(ModelError::Duplicate(e.clone()));
                }
            }
        }
        for c in constants.keys() {
            if !signature.has_constant(c) {
                return Err(ModelError::UnknownConstant(c.clone()));
            }
        }
        for (w, table) in extensions.iter().enumerate() {
            for (p, tuples) in table {
                let arity = signature
                    .arity(p)
                    .ok_or_else(|| ModelError::UnknownPredicate(p.clone()))?;
                for t in tuples {
                    if t.len() != arity {
                        return Err(ModelError::Arity {
                            pred: p.clone(),
                            expected: arity,
                            got: t.len(),
                        });
                    }
                    for &e in t {
                        if e >= elems.len() {
                            return Err(ModelError::UnknownElement(format!("#{e}")));
                        }
                    }
                }
            }
            let _ = w;
        }
        // build representative maps from blocks; unlisted domain
        // elements are singletons
        let mut eq_rep = Vec::with_capacity(n);
        for (w, blocks) in eq_blocks.iter().enumerate() {
            let mut rep: BTreeMap<usize, usize> = BTreeMap::new();
            for block in blocks {
                let min = *block
                    .iter()
                    .min()
                    .ok_or_else(|| ModelError::Duplicate("empty equality block".into()))?;
                for &e in block {
                    if !domains[w].contains(&e) {
                        return Err(ModelError::BlockOutsideDomain {
                            elem: elems
                                .get(e)
                                .cloned()
                                .unwrap_or_else(|| format!("#{e}")),
                            world: frame.worlds[w].clone(),
                        });
                    }
                    if rep.insert(e, min).is_some() {
                        return Err(ModelError::Duplicate(format!(
                            "element {} listed in two blocks at {}",
                            elems[e], frame.worlds[w]
                        )));
                    }
                }
            }
            for &e in &domains[w] {
                rep.entry(e).or_insert(e);
            }
            eq_rep.push(rep);
        }
        let box_frontier = compute_box_frontier(&frame);
        let domain_order: Vec<Vec<usize>> =
            domains.iter().map(|d| d.iter().copied().collect()).collect();
        let rep_index: Vec<Vec<usize>> = (0..n)
            .map(|w| {
                let mut row = vec![NO_REP; elems.len()];
                for (&e, &r) in &eq_rep[w] {
                    row[e] = r;
                }
                row
            })
            .collect();
        Ok(Model {
            signature,
            frame,
            elems,
            domains,
            eq_rep,
            constants,
            extensions,
            box_frontier,
            domain_order,
            rep_index,
        })
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.frame.world_index(name)
    }

    pub fn elem_index(&self, name: &str) -> Option<usize> {
        self.elems.iter().position(|e| e == name)
    }

    /// Equality of two domain elements at a world.
    pub fn eq_at(&self, w: usize, a: usize, b: usize) -> bool {
        let row = &self.rep_index[w];
        let (x, y) = (row[a], row[b]);
        x != NO_REP && x == y
    }

    pub(crate) fn domain_order(&self, w: usize) -> &[usize] {
        &self.domain_order[w]
    }

    pub(crate) fn box_targets(&self, w: usize) -> &[usize] {
        &self.box_frontier[w]
    }

    /// Frame, domain-system, and interpretation invariants.
    pub fn validate(&self) -> Report {
        let mut report = validate_frame(&self.frame);
        let name = |w: usize| self.frame.worlds[w].clone();
        let ename = |e: usize| self.elems[e].clone();
        let n = self.frame.len();

        // domains grow along both relations
        for (w, wp) in self.frame.leq.pairs() {
            if !self.domains[w].is_subset(&self.domains[wp]) {
                report.push(
                    "domain-int-monotone",
                    format!("{} <= {}", name(w), name(wp)),
                );
            }
        }
        for (w, v) in self.frame.modal.pairs() {
            if !self.domains[w].is_subset(&self.domains[v]) {
                report.push("domain-modal-monotone", format!("{} R {}", name(w), name(v)));
            }
        }
        // equality coarsens along <=
        for (w, wp) in self.frame.leq.pairs() {
            let dom: Vec<usize> = self.domains[w].iter().copied().collect();
            for (i, &a) in dom.iter().enumerate() {
                for &b in &dom[i + 1..] {
                    if self.eq_at(w, a, b) && !self.eq_at(wp, a, b) {
                        report.push(
                            "equality-int-coarsening",
                            format!("{} ~ {} at {} but not at {}", ename(a), ename(b), name(w), name(wp)),
                        );
                    }
                }
            }
        }
        // constants denote everywhere
        for c in self.signature.constants() {
            match self.constants.get(c) {
                None => report.push("constant-denotes", c.clone()),
                Some(&e) => {
                    for w in 0..n {
                        if !self.domains[w].contains(&e) {
                            report.push(
                                "constant-in-domain",
                                format!("{} = {} missing from {}", c, ename(e), name(w)),
                            );
                        }
                    }
                }
            }
        }
        // extensions: tuples over the local domain, monotone, congruent
        for w in 0..n {
            for (p, tuples) in &self.extensions[w] {
                for t in tuples {
                    if !t.iter().all(|e| self.domains[w].contains(e)) {
                        report.push(
                            "extension-in-domain",
                            format!("{p}{t:?} at {}", name(w)),
                        );
                    }
                }
            }
        }
        for (w, wp) in self.frame.leq.pairs() {
            for (p, tuples) in &self.extensions[w] {
                let upper = self.extensions[wp].get(p);
                for t in tuples {
                    if upper.map_or(true, |u| !u.contains(t)) {
                        report.push(
                            "extension-int-monotone",
                            format!("{p}{t:?} at {} missing at {}", name(w), name(wp)),
                        );
                    }
                }
            }
        }
        for w in 0..n {
            for (p, tuples) in &self.extensions[w] {
                for t in tuples {
                    for (i, &a) in t.iter().enumerate() {
                        for &b in self.domains[w].iter() {
                            if b != a && self.eq_at(w, a, b) {
                                let mut variant = t.clone();
                                variant[i] = b;
                                if !tuples.contains(&variant) {
                                    report.push(
                                        "extension-congruence",
                                        format!(
                                            "{p}{t:?} at {} but not {p}{variant:?}",
                                            name(w)
                                        ),
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
        report
    }
}

fn compute_box_frontier(frame: &Frame) -> Vec<Vec<usize>> {
    let n = frame.len();
    let mut out = Vec::with_capacity(n);
    for w in 0..n {
        let mut targets = BTreeSet::new();
        for wp in frame.leq.successors(w) {
            for v in frame.modal.successors(wp) {
                targets.insert(v);
            }
        }
        out.push(targets.into_iter().collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain2() -> Frame {
        // w0 <= w1, no modal edges
        let mut leq = Relation::new(2);
        leq.set(0, 1);
        leq.reflexive_close();
        leq.transitive_close();
        Frame {
            worlds: vec!["w0".into(), "w1".into()],
            leq,
            modal: Relation::new(2),
        }
    }

    #[test]
    fn single_world_frame_is_valid() {
        let mut leq = Relation::new(1);
        leq.reflexive_close();
        let f = Frame {
            worlds: vec!["w".into()],
            leq,
            modal: Relation::new(1),
        };
        assert!(validate_frame(&f).is_empty());
    }

    #[test]
    fn fc2_violation_detected() {
        // w <= w', w R v, and nothing else
        let mut leq = Relation::new(3);
        leq.set(0, 1);
        leq.reflexive_close();
        leq.transitive_close();
        let mut modal = Relation::new(3);
        modal.set(0, 2);
        let f = Frame {
            worlds: vec!["w".into(), "wp".into(), "v".into()],
            leq,
            modal,
        };
        let report = validate_frame(&f);
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == "fc2" && v.witness.contains("wp")));
    }

    #[test]
    fn antisymmetry_violation_detected() {
        let mut leq = Relation::new(2);
        leq.set(0, 1);
        leq.set(1, 0);
        leq.reflexive_close();
        let f = Frame {
            worlds: vec!["a".into(), "b".into()],
            leq,
            modal: Relation::new(2),
        };
        let report = validate_frame(&f);
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == "int-antisymmetry"));
    }

    #[test]
    fn fc1_violation_detected() {
        // w R v <= v' with no w' <= ... R v'
        let mut leq = Relation::new(3);
        leq.set(1, 2);
        leq.reflexive_close();
        leq.transitive_close();
        let mut modal = Relation::new(3);
        modal.set(0, 1);
        let f = Frame {
            worlds: vec!["w".into(), "v".into(), "vp".into()],
            leq,
            modal,
        };
        let report = validate_frame(&f);
        assert!(report.violations.iter().any(|v| v.condition == "fc1"));
    }

    fn tiny_sig() -> Signature {
        Signature::new(
            vec!["c".into()],
            [("P".to_string(), 1)].into_iter().collect(),
        )
        .unwrap()
    }

    #[test]
    fn model_invariant_violations_reported() {
        let frame = chain2();
        // P true of e0 at w0 but not at w1: monotonicity violation
        let m = Model::new(
            tiny_sig(),
            frame,
            vec!["e0".into()],
            vec![[0].into_iter().collect(), [0].into_iter().collect()],
            vec![vec![], vec![]],
            [("c".to_string(), 0)].into_iter().collect(),
            vec![
                [(
                    "P".to_string(),
                    [vec![0]].into_iter().collect::<BTreeSet<_>>(),
                )]
                .into_iter()
                .collect(),
                BTreeMap::new(),
            ],
        )
        .unwrap();
        let report = m.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == "extension-int-monotone"));
    }

    #[test]
    fn congruence_violation_reported() {
        let mut leq = Relation::new(1);
        leq.reflexive_close();
        let frame = Frame {
            worlds: vec!["w".into()],
            leq,
            modal: Relation::new(1),
        };
        let m = Model::new(
            tiny_sig(),
            frame,
            vec!["e0".into(), "e1".into()],
            vec![[0, 1].into_iter().collect()],
            vec![vec![vec![0, 1]]],
            [("c".to_string(), 0)].into_iter().collect(),
            vec![[(
                "P".to_string(),
                [vec![0]].into_iter().collect::<BTreeSet<_>>(),
            )]
            .into_iter()
            .collect()],
        )
        .unwrap();
        let report = m.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == "extension-congruence"));
    }

    #[test]
    fn constant_missing_from_domain_reported() {
        let frame = chain2();
        let m = Model::new(
            tiny_sig(),
            frame,
            vec!["e0".into(), "e1".into()],
            // constant maps to e1, but w0's domain lacks it
            vec![[0].into_iter().collect(), [0, 1].into_iter().collect()],
            vec![vec![], vec![]],
            [("c".to_string(), 1)].into_iter().collect(),
            vec![BTreeMap::new(), BTreeMap::new()],
        )
        .unwrap();
        let report = m.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| v.condition == "constant-in-domain"));
    }
}
