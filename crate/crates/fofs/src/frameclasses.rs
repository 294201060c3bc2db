//! Frame classes for the six logics and their identity refinements:
//! membership checking and seeded random in-class model generation.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::proof::{BadLogicToken, LogicId};
use crate::semantics::{Frame, Model, Relation, Report};
use crate::syntax::Signature;

/// The frame/domain/equality conditions a logic imposes, all derived
/// from the logic id: D is serial, 4 transitive, T reflexive, S4 both;
/// NI transfers equality forward along the modal relation and ND
/// reflects it backward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameClassSpec {
    pub logic: LogicId,
}

impl FrameClassSpec {
    pub fn new(logic: LogicId) -> FrameClassSpec {
        FrameClassSpec { logic }
    }

    pub fn parse_token(tok: &str) -> Result<FrameClassSpec, BadLogicToken> {
        LogicId::parse_token(tok).map(FrameClassSpec::new)
    }

    pub fn token(&self) -> String {
        self.logic.token()
    }

    pub fn serial(&self) -> bool {
        self.logic.base.serial()
    }

    pub fn transitive(&self) -> bool {
        self.logic.base.transitive()
    }

    pub fn reflexive(&self) -> bool {
        self.logic.base.reflexive()
    }

    pub fn forward_transfer(&self) -> bool {
        self.logic.ni
    }

    pub fn backward_transfer(&self) -> bool {
        self.logic.nd
    }
}

/// Checks the modal-relation conditions and equality-transfer conditions
/// of the class. Frame and model invariants are assumed already checked.
pub fn check_membership(m: &Model, spec: &FrameClassSpec) -> Report {
    let mut report = Report::default();
    let name = |w: usize| m.frame.worlds[w].clone();
    let n = m.frame.len();
    if spec.serial() && !m.frame.modal.is_serial() {
        for w in 0..n {
            if m.frame.modal.successors(w).next().is_none() {
                report.push("modal-serial", name(w));
            }
        }
    }
    if spec.reflexive() {
        for w in 0..n {
            if !m.frame.modal.contains(w, w) {
                report.push("modal-reflexive", name(w));
            }
        }
    }
    if spec.transitive() {
        for (a, b) in m.frame.modal.pairs() {
            for c in m.frame.modal.successors(b) {
                if !m.frame.modal.contains(a, c) {
                    report.push(
                        "modal-transitive",
                        format!("{} R {} R {}", name(a), name(b), name(c)),
                    );
                }
            }
        }
    }
    if spec.forward_transfer() || spec.backward_transfer() {
        for (w, v) in m.frame.modal.pairs() {
            let dom: Vec<usize> = m.domains[w].iter().copied().collect();
            for (i, &a) in dom.iter().enumerate() {
                for &b in &dom[i + 1..] {
                    if spec.forward_transfer() && m.eq_at(w, a, b) && !m.eq_at(v, a, b) {
                        report.push(
                            "equality-forward-transfer",
                            format!(
                                "{} ~ {} at {} but not at {}",
                                m.elems[a], m.elems[b], name(w), name(v)
                            ),
                        );
                    }
                    if spec.backward_transfer() && m.eq_at(v, a, b) && !m.eq_at(w, a, b) {
                        report.push(
                            "equality-backward-transfer",
                            format!(
                                "{} ~ {} at {} but not at {}",
                                m.elems[a], m.elems[b], name(v), name(w)
                            ),
                        );
                    }
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelBounds {
    pub worlds: usize,
    pub domain: usize,
    pub predicates: usize,
}

impl ModelBounds {
    pub fn new(worlds: usize, domain: usize, predicates: usize) -> ModelBounds {
        assert!(worlds >= 1 && domain >= 1 && predicates >= 1);
        ModelBounds {
            worlds,
            domain,
            predicates,
        }
    }
}

/// Closes the modal relation so that the compatibility conditions and
/// the class's modal conditions hold: compose with the intuitionistic
/// order on both sides (which discharges both compatibility
/// existentials by the reflexivity of the order), then re-close for the
/// class conditions, iterating to a fixpoint on the finite edge set.
pub fn repair_modal(
    leq: &Relation,
    modal: &Relation,
    spec: &FrameClassSpec,
) -> Relation {
    let n = modal.size();
    let mut r = modal.clone();
    loop {
        let mut changed = false;
        // w R v <= v'  gives  w R v'
        let mut add = Vec::new();
        for (w, v) in r.pairs() {
            for vp in leq.successors(v) {
                if !r.contains(w, vp) {
                    add.push((w, vp));
                }
            }
        }
        // w <= w', w R v  gives  w' R v
        for (w, wp) in leq.pairs() {
            for v in r.successors(w) {
                if !r.contains(wp, v) {
                    add.push((wp, v));
                }
            }
        }
        for (a, b) in add.drain(..) {
            if !r.contains(a, b) {
                r.set(a, b);
                changed = true;
            }
        }
        if spec.transitive() {
            let before = r.clone();
            r.transitive_close();
            if r != before {
                changed = true;
            }
        }
        if spec.reflexive() {
            for w in 0..n {
                if !r.contains(w, w) {
                    r.set(w, w);
                    changed = true;
                }
            }
        }
        if spec.serial() {
            for w in 0..n {
                if r.successors(w).next().is_none() {
                    r.set(w, w);
                    changed = true;
                }
            }
        }
        if !changed {
            return r;
        }
    }
}

/// The signature used for generated models: constants `c`, `d` and
/// predicates `P0..` with arities alternating 1, 2.
pub fn fuzz_signature(predicates: usize) -> Signature {
    let preds: BTreeMap<String, usize> = (0..predicates)
        .map(|i| (format!("P{i}"), 1 + i % 2))
        .collect();
    Signature::new(vec!["c".into(), "d".into()], preds).expect("static names are valid")
}

/// Deterministic seeded in-class model generation: random seed
/// structure, then closure repair for every invariant. The output
/// passes `Model::validate` and `check_membership`.
pub fn random_model(spec: &FrameClassSpec, bounds: &ModelBounds, seed: u64) -> Model {
    let sig = fuzz_signature(bounds.predicates);
    random_model_over(spec, &sig, bounds, seed)
}

pub fn random_model_over(
    spec: &FrameClassSpec,
    sig: &Signature,
    bounds: &ModelBounds,
    seed: u64,
) -> Model {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=bounds.worlds);

    // intuitionistic order: random edges upward in index, closed
    let mut leq = Relation::new(n);
    for a in 0..n {
        for b in (a + 1)..n {
            if rng.gen_bool(0.45) {
                leq.set(a, b);
            }
        }
    }
    leq.reflexive_close();
    leq.transitive_close();

    let mut modal = Relation::new(n);
    for a in 0..n {
        for b in 0..n {
            if rng.gen_bool(0.3) {
                modal.set(a, b);
            }
        }
    }
    let modal = repair_modal(&leq, &modal, spec);

    // elements and constants
    let n_consts = sig.constants().len();
    let m_total = bounds.domain.max(n_consts.min(bounds.domain));
    let m = rng.gen_range(n_consts.clamp(1, m_total)..=m_total).max(1);
    let elems: Vec<String> = (0..m).map(|e| format!("e{e}")).collect();
    let mut constants = BTreeMap::new();
    for (i, c) in sig.constants().iter().enumerate() {
        constants.insert(c.clone(), i % m);
    }
    let const_elems: BTreeSet<usize> = constants.values().copied().collect();

    // domains: random base including constant denotations, then union
    // along both relations to a fixpoint
    let mut domains: Vec<BTreeSet<usize>> = (0..n)
        .map(|_| {
            let mut d = const_elems.clone();
            for e in 0..m {
                if rng.gen_bool(0.5) {
                    d.insert(e);
                }
            }
            if d.is_empty() {
                d.insert(0);
            }
            d
        })
        .collect();
    loop {
        let mut changed = false;
        for (a, b) in leq.pairs().chain(modal.pairs()).collect::<Vec<_>>() {
            if !domains[a].is_subset(&domains[b]) {
                let extra: Vec<usize> = domains[a].difference(&domains[b]).copied().collect();
                domains[b].extend(extra);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // equality: random merges, then coarsening closure along <= (and
    // along the modal relation per the transfer flags)
    let mut rep: Vec<Vec<usize>> = (0..n).map(|_| (0..m).collect()).collect();
    fn find(rep: &mut Vec<usize>, e: usize) -> usize {
        let mut root = e;
        while rep[root] != root {
            root = rep[root];
        }
        let mut cur = e;
        while rep[cur] != root {
            let next = rep[cur];
            rep[cur] = root;
            cur = next;
        }
        root
    }
    fn union(rep: &mut Vec<usize>, a: usize, b: usize) -> bool {
        let (x, y) = (find(rep, a), find(rep, b));
        if x == y {
            false
        } else {
            let (lo, hi) = (x.min(y), x.max(y));
            rep[hi] = lo;
            true
        }
    }
    for (w, domain) in domains.iter().enumerate() {
        let dom: Vec<usize> = domain.iter().copied().collect();
        if dom.len() >= 2 && rng.gen_bool(0.5) {
            let i = rng.gen_range(0..dom.len());
            let j = rng.gen_range(0..dom.len());
            union(&mut rep[w], dom[i], dom[j]);
        }
    }
    loop {
        let mut changed = false;
        for (a, b) in leq.pairs().collect::<Vec<_>>() {
            let dom: Vec<usize> = domains[a].iter().copied().collect();
            for (i, &x) in dom.iter().enumerate() {
                for &y in &dom[i + 1..] {
                    if find(&mut rep[a], x) == find(&mut rep[a], y)
                        && union(&mut rep[b], x, y)
                    {
                        changed = true;
                    }
                }
            }
        }
        for (w, v) in modal.pairs().collect::<Vec<_>>() {
            let dom: Vec<usize> = domains[w].iter().copied().collect();
            for (i, &x) in dom.iter().enumerate() {
                for &y in &dom[i + 1..] {
                    let src = find(&mut rep[w], x) == find(&mut rep[w], y);
                    let dst = find(&mut rep[v], x) == find(&mut rep[v], y);
                    if spec.forward_transfer() && src && !dst && union(&mut rep[v], x, y) {
                        changed = true;
                    }
                    if spec.backward_transfer() && dst && !src && union(&mut rep[w], x, y) {
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let eq_blocks: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|w| {
            let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            let dom: Vec<usize> = domains[w].iter().copied().collect();
            for &e in &dom {
                let r = find(&mut rep[w], e);
                blocks.entry(r).or_default().push(e);
            }
            blocks.into_values().filter(|b| b.len() > 1).collect()
        })
        .collect();

    // predicate extensions: random tuples, then monotone and congruence
    // closure
    let mut extensions: Vec<BTreeMap<String, BTreeSet<Vec<usize>>>> =
        (0..n).map(|_| BTreeMap::new()).collect();
    for w in 0..n {
        let dom: Vec<usize> = domains[w].iter().copied().collect();
        for (p, &arity) in sig.predicates() {
            let mut set = BTreeSet::new();
            let tries = rng.gen_range(0..=dom.len().min(3));
            for _ in 0..tries {
                let tuple: Vec<usize> = (0..arity)
                    .map(|_| dom[rng.gen_range(0..dom.len())])
                    .collect();
                set.insert(tuple);
            }
            if !set.is_empty() {
                extensions[w].insert(p.clone(), set);
            }
        }
    }
    loop {
        let mut changed = false;
        for (a, b) in leq.pairs().collect::<Vec<_>>() {
            let lower = extensions[a].clone();
            for (p, tuples) in lower {
                let upper = extensions[b].entry(p).or_default();
                for t in tuples {
                    if upper.insert(t) {
                        changed = true;
                    }
                }
            }
        }
        for w in 0..n {
            let table = extensions[w].clone();
            for (p, tuples) in table {
                let mut grown = tuples.clone();
                for t in &tuples {
                    let choices: Vec<Vec<usize>> = t
                        .iter()
                        .map(|&e| {
                            let root = find(&mut rep[w], e);
                            domains[w]
                                .iter()
                                .copied()
                                .filter(|&x| find(&mut rep[w], x) == root)
                                .collect()
                        })
                        .collect();
                    let mut variants: Vec<Vec<usize>> = vec![vec![]];
                    for pos in &choices {
                        let mut next = Vec::new();
                        for v in &variants {
                            for &e in pos {
                                let mut nv = v.clone();
                                nv.push(e);
                                next.push(nv);
                            }
                        }
                        variants = next;
                    }
                    for v in variants {
                        grown.insert(v);
                    }
                }
                if grown.len() != extensions[w][&p].len() {
                    changed = true;
                    extensions[w].insert(p, grown);
                }
            }
        }
        if !changed {
            break;
        }
    }

    let frame = Frame {
        worlds: (0..n).map(|w| format!("w{w}")).collect(),
        leq,
        modal,
    };
    Model::new(
        sig.clone(),
        frame,
        elems,
        domains,
        eq_blocks,
        constants,
        extensions,
    )
    .expect("generated structure is well-formed")
}
