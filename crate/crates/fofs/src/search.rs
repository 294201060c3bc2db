//! Bounded enumeration of in-class models, countermodel search, and the
//! soundness fuzz harness.
//!
//! Enumeration is exhaustive up to world/element renaming: candidate
//! structures are generated in a fixed order and deduplicated by a
//! canonical key (the least encoding over the applicable permutation
//! group). Countermodel search additionally restricts to models
//! generated from a root world and evaluates there, which loses no
//! witnesses because truth is preserved under generated submodels.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frameclasses::{FrameClassSpec, ModelBounds};
use crate::gen;
use crate::proof::{LogicId, Rule};
use crate::semantics::{eval_sentence, Frame, Model, Relation, Report};
use crate::syntax::{subst_var, Formula, Signature, Term};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_worlds: usize,
    pub max_domain: usize,
    /// cap on tuples per predicate per world
    pub tuple_cap: usize,
    /// when set, the returned witness is minimal in (worlds, then total
    /// domain size) among all witnesses within bounds
    pub minimal_witness: bool,
}

impl SearchBounds {
    pub fn new(max_worlds: usize, max_domain: usize) -> SearchBounds {
        assert!(max_worlds >= 1);
        SearchBounds {
            max_worlds,
            max_domain,
            tuple_cap: usize::MAX,
            minimal_witness: false,
        }
    }

    pub fn with_minimality(mut self) -> SearchBounds {
        self.minimal_witness = true;
        self
    }
}

#[derive(Debug, Clone)]
pub enum CountermodelResult {
    Found { model: Model, world: String },
    NotFoundWithinBounds { examined: u64 },
}

impl CountermodelResult {
    pub fn found(&self) -> Option<(&Model, &str)> {
        match self {
            CountermodelResult::Found { model, world } => Some((model, world)),
            CountermodelResult::NotFoundWithinBounds { .. } => None,
        }
    }
}

// ---------------------------------------------------------------------
// frame enumeration
//
// During enumeration a relation on n <= 5 worlds lives in the low n*n
// bits of a u32, row-major.

fn bit(n: usize, a: usize, b: usize) -> u32 {
    1u32 << (a * n + b)
}

fn row(r: u32, n: usize, a: usize) -> u32 {
    (r >> (a * n)) & ((1u32 << n) - 1)
}

fn bits_transitive(r: u32, n: usize) -> bool {
    for a in 0..n {
        let mut reach = row(r, n, a);
        let mut via = reach;
        while via != 0 {
            let b = via.trailing_zeros() as usize;
            via &= via - 1;
            reach |= row(r, n, b);
        }
        if reach & !row(r, n, a) != 0 {
            return false;
        }
    }
    true
}

fn bits_reflexive(r: u32, n: usize) -> bool {
    (0..n).all(|a| r & bit(n, a, a) != 0)
}

fn bits_serial(r: u32, n: usize) -> bool {
    (0..n).all(|a| row(r, n, a) != 0)
}

fn bits_fc(leq: u32, modal: u32, n: usize) -> bool {
    // box frontier per world: union of modal rows over leq-successors
    let mut frontier = [0u32; 5];
    for (w, slot) in frontier.iter_mut().enumerate().take(n) {
        let mut ws = row(leq, n, w);
        while ws != 0 {
            let wp = ws.trailing_zeros() as usize;
            ws &= ws - 1;
            *slot |= row(modal, n, wp);
        }
    }
    for w in 0..n {
        let mut vs = row(modal, n, w);
        while vs != 0 {
            let v = vs.trailing_zeros() as usize;
            vs &= vs - 1;
            // FC1: every leq-successor of v is in the frontier of w
            if row(leq, n, v) & !frontier[w] != 0 {
                return false;
            }
            // FC2: for each leq-successor w' of w, some leq-successor
            // of v is a modal successor of w'
            let mut wps = row(leq, n, w);
            while wps != 0 {
                let wp = wps.trailing_zeros() as usize;
                wps &= wps - 1;
                if row(leq, n, v) & row(modal, n, wp) == 0 {
                    return false;
                }
            }
        }
    }
    true
}

fn bits_permute(r: u32, n: usize, perm: &[usize]) -> u32 {
    let mut out = 0u32;
    let mut rest = r;
    while rest != 0 {
        let k = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let (a, b) = (k / n, k % n);
        out |= bit(n, perm[a], perm[b]);
    }
    out
}

fn bits_reachable(leq: u32, modal: u32, n: usize) -> bool {
    let both = leq | modal;
    let mut seen = 1u32;
    loop {
        let mut next = seen;
        let mut ws = seen;
        while ws != 0 {
            let w = ws.trailing_zeros() as usize;
            ws &= ws - 1;
            next |= row(both, n, w);
        }
        if next == seen {
            break;
        }
        seen = next;
    }
    seen.count_ones() as usize == n
}

fn relation_from_bits(r: u32, n: usize) -> Relation {
    let mut out = Relation::new(n);
    for a in 0..n {
        for b in 0..n {
            if r & bit(n, a, b) != 0 {
                out.set(a, b);
            }
        }
    }
    out
}

fn permutations(n: usize, fix_zero: bool) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    fn heap(k: usize, items: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(items.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, items, out);
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut items, &mut out);
    out.sort();
    if fix_zero {
        out.retain(|p| p[0] == 0);
    }
    out
}

/// All partial orders on `0..n` whose edges respect the index order,
/// deduplicated after closure, as row-major bitmasks.
fn closed_orders_bits(n: usize) -> Vec<u32> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for subset in 0..(1u64 << pairs.len()) {
        let mut leq = 0u32;
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if subset >> i & 1 == 1 {
                leq |= bit(n, a, b);
            }
        }
        for a in 0..n {
            leq |= bit(n, a, a);
        }
        // transitive closure
        loop {
            let mut next = leq;
            for a in 0..n {
                let mut bs = row(leq, n, a);
                while bs != 0 {
                    let b = bs.trailing_zeros() as usize;
                    bs &= bs - 1;
                    next |= row(leq, n, b) << (a * n);
                }
            }
            if next == leq {
                break;
            }
            leq = next;
        }
        if seen.insert(leq) {
            out.push(leq);
        }
    }
    out.sort_unstable();
    out
}

/// In-class frames on exactly `n` worlds, one per isomorphism class
/// (root-preserving isomorphism when `rooted`). Cached per argument
/// triple: the sweep over candidate modal relations is the expensive
/// part of bounded search.
fn frames_exact(spec: &FrameClassSpec, n: usize, rooted: bool) -> std::sync::Arc<Vec<Frame>> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    type Cache = Mutex<HashMap<(String, usize, bool), Arc<Vec<Frame>>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (spec.token(), n, rooted);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return hit.clone();
    }

    assert!(n <= 5, "frame enumeration is for desk-scale bounds");
    let perms = permutations(n, rooted);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for leq in closed_orders_bits(n) {
        for modal in 0..(1u32 << (n * n)) as u64 {
            let modal = modal as u32;
            if spec.serial() && !bits_serial(modal, n) {
                continue;
            }
            if spec.reflexive() && !bits_reflexive(modal, n) {
                continue;
            }
            if spec.transitive() && !bits_transitive(modal, n) {
                continue;
            }
            if !bits_fc(leq, modal, n) {
                continue;
            }
            if rooted && !bits_reachable(leq, modal, n) {
                continue;
            }
            let canon = perms
                .iter()
                .map(|p| {
                    ((bits_permute(leq, n, p) as u64) << 32) | bits_permute(modal, n, p) as u64
                })
                .min()
                .unwrap();
            if !seen.insert(canon) {
                continue;
            }
            out.push(Frame {
                worlds: (0..n).map(|w| format!("w{w}")).collect(),
                leq: relation_from_bits(leq, n),
                modal: relation_from_bits(modal, n),
            });
        }
    }
    let arc = Arc::new(out);
    cache.lock().unwrap().insert(key, arc.clone());
    arc
}

// ---------------------------------------------------------------------
// model enumeration over a frame

struct Skeleton {
    domains: Vec<BTreeSet<usize>>,
    blocks: Vec<Vec<Vec<usize>>>,
    rep: Vec<BTreeMap<usize, usize>>,
    constants: BTreeMap<String, usize>,
    m: usize,
}

/// All partitions of a set, as lists of blocks over sorted input.
fn partitions_of(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let rest = &items[1..];
    let mut out = Vec::new();
    for mut p in partitions_of(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        p.insert(0, vec![first]);
        out.push(p);
    }
    out
}

fn rep_of(blocks: &[Vec<usize>], domain: &BTreeSet<usize>) -> BTreeMap<usize, usize> {
    let mut rep = BTreeMap::new();
    for block in blocks {
        let min = *block.iter().min().unwrap();
        for &e in block {
            rep.insert(e, min);
        }
    }
    for &e in domain {
        rep.entry(e).or_insert(e);
    }
    rep
}

fn same_block(rep: &BTreeMap<usize, usize>, a: usize, b: usize) -> bool {
    match (rep.get(&a), rep.get(&b)) {
        (Some(x), Some(y)) => x == y,
        _ => false,
    }
}

/// Symmetry reductions that are sound for countermodel existence but
/// must stay off for the exhaustive public enumeration.
#[derive(Clone, Copy, Default)]
struct Reductions {
    /// fix constant denotations to a first-appearance canonical form
    /// and require non-denoted elements to first appear in world order
    canonical_elems: bool,
    /// every element must be denoted by some constant (sound when all
    /// sequents are quantifier-free)
    denoted_cover: bool,
    /// only the discrete partition per world (sound when no sequent
    /// mentions equality)
    discrete_equality: bool,
}

fn skeletons(
    frame: &Frame,
    sig: &Signature,
    m: usize,
    spec: &FrameClassSpec,
    domain_sum: Option<usize>,
    red: Reductions,
    visit: &mut impl FnMut(Skeleton) -> bool,
) -> bool {
    let n = frame.len();
    let _ = n;
    let consts: Vec<String> = sig.constants().to_vec();
    // constant denotations; in canonical mode the denotations form a
    // restricted-growth sequence over constant order
    let mut const_maps: Vec<(BTreeMap<String, usize>, usize)> = vec![(BTreeMap::new(), 0)];
    for c in &consts {
        let mut next = Vec::new();
        for (map, hi) in &const_maps {
            let limit = if red.canonical_elems {
                (hi + 1).min(m)
            } else {
                m
            };
            for e in 0..limit {
                let mut map2 = map.clone();
                map2.insert(c.clone(), e);
                next.push((map2, (*hi).max(e + 1)));
            }
        }
        const_maps = next;
    }
    for (constants, _) in const_maps {
        let denoted: BTreeSet<usize> = constants.values().copied().collect();
        if red.denoted_cover && denoted.len() != m {
            continue;
        }
        // enumerate monotone domain assignments containing the denoted
        // elements
        let subsets: Vec<BTreeSet<usize>> = (0..(1u32 << m))
            .map(|bits| (0..m).filter(|e| bits >> e & 1 == 1).collect::<BTreeSet<usize>>())
            .filter(|s| denoted.is_subset(s))
            .collect();
        let mut stack: Vec<BTreeSet<usize>> = Vec::new();
        if !domains_dfs(
            frame,
            &subsets,
            &mut stack,
            domain_sum,
            &mut |domains: &[BTreeSet<usize>]| {
                // every element must appear somewhere, else this is a
                // relabeling of a smaller universe
                let mut used: BTreeSet<usize> = BTreeSet::new();
                for d in domains {
                    used.extend(d.iter().copied());
                }
                if used.len() != m {
                    return true;
                }
                if red.canonical_elems {
                    // non-denoted elements first appear in world order
                    let first = |e: usize| domains.iter().position(|d| d.contains(&e));
                    let free: Vec<usize> =
                        (0..m).filter(|e| !denoted.contains(e)).collect();
                    for pair in free.windows(2) {
                        if first(pair[0]) > first(pair[1]) {
                            return true;
                        }
                    }
                }
                if red.discrete_equality {
                    let blocks: Vec<Vec<Vec<usize>>> =
                        (0..frame.len()).map(|_| Vec::new()).collect();
                    let rep: Vec<BTreeMap<usize, usize>> = (0..frame.len())
                        .map(|w| domains[w].iter().map(|&e| (e, e)).collect())
                        .collect();
                    return visit(Skeleton {
                        domains: domains.to_vec(),
                        blocks,
                        rep,
                        constants: constants.clone(),
                        m,
                    });
                }
                partitions_dfs(frame, domains, spec, &mut |blocks, rep| {
                    visit(Skeleton {
                        domains: domains.to_vec(),
                        blocks: blocks.to_vec(),
                        rep: rep.to_vec(),
                        constants: constants.clone(),
                        m,
                    })
                })
            },
        ) {
            return false;
        }
    }
    true
}

fn domains_dfs(
    frame: &Frame,
    subsets: &[BTreeSet<usize>],
    stack: &mut Vec<BTreeSet<usize>>,
    domain_sum: Option<usize>,
    visit: &mut impl FnMut(&[BTreeSet<usize>]) -> bool,
) -> bool {
    let w = stack.len();
    if w == frame.len() {
        if let Some(s) = domain_sum {
            let total: usize = stack.iter().map(|d| d.len()).sum();
            if total != s {
                return true;
            }
        }
        return visit(stack);
    }
    'next: for cand in subsets {
        // check inclusion constraints against already-assigned worlds
        for v in 0..w {
            if frame.leq.contains(v, w) || frame.modal.contains(v, w) {
                if !stack[v].is_subset(cand) {
                    continue 'next;
                }
            }
            if frame.leq.contains(w, v) || frame.modal.contains(w, v) {
                if !cand.is_subset(&stack[v]) {
                    continue 'next;
                }
            }
        }
        if let Some(s) = domain_sum {
            let total: usize = stack.iter().map(|d| d.len()).sum();
            if total + cand.len() > s {
                continue;
            }
        }
        stack.push(cand.clone());
        if !domains_dfs(frame, subsets, stack, domain_sum, visit) {
            stack.pop();
            return false;
        }
        stack.pop();
    }
    true
}

fn partitions_dfs(
    frame: &Frame,
    domains: &[BTreeSet<usize>],
    spec: &FrameClassSpec,
    visit: &mut impl FnMut(&[Vec<Vec<usize>>], &[BTreeMap<usize, usize>]) -> bool,
) -> bool {
    let n = frame.len();
    let per_world: Vec<Vec<Vec<Vec<usize>>>> = (0..n)
        .map(|w| {
            let items: Vec<usize> = domains[w].iter().copied().collect();
            partitions_of(&items)
        })
        .collect();
    let mut blocks: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut reps: Vec<BTreeMap<usize, usize>> = Vec::new();
    fn go(
        frame: &Frame,
        domains: &[BTreeSet<usize>],
        spec: &FrameClassSpec,
        per_world: &[Vec<Vec<Vec<usize>>>],
        blocks: &mut Vec<Vec<Vec<usize>>>,
        reps: &mut Vec<BTreeMap<usize, usize>>,
        visit: &mut impl FnMut(&[Vec<Vec<usize>>], &[BTreeMap<usize, usize>]) -> bool,
    ) -> bool {
        let w = blocks.len();
        if w == frame.len() {
            return visit(blocks, reps);
        }
        'next: for cand in &per_world[w] {
            let rep = rep_of(cand, &domains[w]);
            for v in 0..w {
                let shared: Vec<usize> =
                    domains[v.min(w)].intersection(&domains[v.max(w)]).copied().collect();
                for (i, &a) in shared.iter().enumerate() {
                    for &b in &shared[i + 1..] {
                        let at_v = same_block(&reps[v], a, b);
                        let at_w = same_block(&rep, a, b);
                        // coarsening along the intuitionistic order
                        if frame.leq.contains(v, w)
                            && domains[v].contains(&a)
                            && domains[v].contains(&b)
                            && at_v
                            && !at_w
                        {
                            continue 'next;
                        }
                        if frame.leq.contains(w, v)
                            && domains[w].contains(&a)
                            && domains[w].contains(&b)
                            && at_w
                            && !at_v
                        {
                            continue 'next;
                        }
                        // identity transfer along the modal relation
                        if spec.forward_transfer() {
                            if frame.modal.contains(v, w)
                                && domains[v].contains(&a)
                                && domains[v].contains(&b)
                                && at_v
                                && !at_w
                            {
                                continue 'next;
                            }
                            if frame.modal.contains(w, v)
                                && domains[w].contains(&a)
                                && domains[w].contains(&b)
                                && at_w
                                && !at_v
                            {
                                continue 'next;
                            }
                        }
                        if spec.backward_transfer() {
                            if frame.modal.contains(v, w)
                                && domains[v].contains(&a)
                                && domains[v].contains(&b)
                                && at_w
                                && !at_v
                            {
                                continue 'next;
                            }
                            if frame.modal.contains(w, v)
                                && domains[w].contains(&a)
                                && domains[w].contains(&b)
                                && at_v
                                && !at_w
                            {
                                continue 'next;
                            }
                        }
                    }
                }
            }
            blocks.push(cand.clone());
            reps.push(rep);
            if !go(frame, domains, spec, per_world, blocks, reps, visit) {
                blocks.pop();
                reps.pop();
                return false;
            }
            blocks.pop();
            reps.pop();
        }
        true
    }
    go(frame, domains, spec, &per_world, &mut blocks, &mut reps, visit)
}

/// Enumerates per-predicate extensions: for each world (in index order,
/// which extends the intuitionistic order) a congruence-closed tuple
/// set including everything inherited from below.
fn extensions_dfs(
    frame: &Frame,
    sk: &Skeleton,
    preds: &[(String, usize)],
    tuple_cap: usize,
    visit: &mut impl FnMut(&[BTreeMap<String, BTreeSet<Vec<usize>>>]) -> bool,
) -> bool {
    let n = frame.len();
    // tuple classes per world per predicate
    struct PredWorld {
        classes: Vec<Vec<Vec<usize>>>, // each class: tuples congruent to each other
    }
    let mut table: Vec<Vec<PredWorld>> = Vec::new(); // [pred][world]
    for (_p, arity) in preds {
        let mut per_world = Vec::new();
        for w in 0..n {
            let dom: Vec<usize> = sk.domains[w].iter().copied().collect();
            let mut tuples: Vec<Vec<usize>> = vec![vec![]];
            for _ in 0..*arity {
                let mut next = Vec::new();
                for t in &tuples {
                    for &e in &dom {
                        let mut t2 = t.clone();
                        t2.push(e);
                        next.push(t2);
                    }
                }
                tuples = next;
            }
            // group by congruence class: key each position by its block
            // representative
            let mut by_key: BTreeMap<Vec<usize>, Vec<Vec<usize>>> = BTreeMap::new();
            for t in tuples {
                let key: Vec<usize> = t.iter().map(|&e| sk.rep[w][&e]).collect();
                by_key.entry(key).or_default().push(t);
            }
            per_world.push(PredWorld {
                classes: by_key.into_values().collect(),
            });
        }
        table.push(per_world);
    }

    // DFS over (pred, world) picking class subsets
    fn go(
        frame: &Frame,
        preds: &[(String, usize)],
        table: &[Vec<PredWorld>],
        tuple_cap: usize,
        acc: &mut Vec<BTreeMap<String, BTreeSet<Vec<usize>>>>,
        pi: usize,
        wi: usize,
        visit: &mut impl FnMut(&[BTreeMap<String, BTreeSet<Vec<usize>>>]) -> bool,
    ) -> bool {
        if pi == preds.len() {
            return visit(acc);
        }
        if wi == frame.len() {
            return go(frame, preds, table, tuple_cap, acc, pi + 1, 0, visit);
        }
        let pname = &preds[pi].0;
        // forced tuples: union from lower worlds
        let mut forced: BTreeSet<Vec<usize>> = BTreeSet::new();
        for v in 0..wi {
            if frame.leq.contains(v, wi) {
                if let Some(ts) = acc[v].get(pname) {
                    forced.extend(ts.iter().cloned());
                }
            }
        }
        let classes = &table[pi][wi].classes;
        let optional: Vec<usize> = (0..classes.len())
            .filter(|&ci| !classes[ci].iter().any(|t| forced.contains(t)))
            .collect();
        // forced must include complete classes (congruence of lower
        // worlds may be finer; close upward)
        let mut base = forced.clone();
        for ci in 0..classes.len() {
            if classes[ci].iter().any(|t| base.contains(t)) {
                for t in &classes[ci] {
                    base.insert(t.clone());
                }
            }
        }
        for bits in 0..(1u64 << optional.len()) {
            let mut ext = base.clone();
            for (k, &ci) in optional.iter().enumerate() {
                if bits >> k & 1 == 1 {
                    for t in &classes[ci] {
                        ext.insert(t.clone());
                    }
                }
            }
            if ext.len() > tuple_cap {
                continue;
            }
            if !ext.is_empty() {
                acc[wi].insert(pname.clone(), ext);
            } else {
                acc[wi].remove(pname);
            }
            if !go(frame, preds, table, tuple_cap, acc, pi, wi + 1, visit) {
                acc[wi].remove(pname);
                return false;
            }
            acc[wi].remove(pname);
        }
        true
    }
    let mut acc: Vec<BTreeMap<String, BTreeSet<Vec<usize>>>> =
        (0..n).map(|_| BTreeMap::new()).collect();
    go(frame, preds, &table, tuple_cap, &mut acc, 0, 0, visit)
}

fn build_model(frame: &Frame, sk: &Skeleton, sig: &Signature, ext: &[BTreeMap<String, BTreeSet<Vec<usize>>>]) -> Model {
    let elems: Vec<String> = (0..sk.m).map(|e| format!("e{e}")).collect();
    Model::new(
        sig.clone(),
        frame.clone(),
        elems,
        sk.domains.clone(),
        sk.blocks.clone(),
        sk.constants.clone(),
        ext.to_vec(),
    )
    .expect("enumerated structure is well-formed")
}

/// Visits in-class models over `sig` within bounds; `rooted` restricts
/// to models generated by world 0. The visitor returns `false` to stop.
/// Returns the number of models visited.
fn visit_models(
    spec: &FrameClassSpec,
    sig: &Signature,
    bounds: &SearchBounds,
    rooted: bool,
    domain_range: (usize, usize),
    domain_sum: Option<usize>,
    visit: &mut impl FnMut(&Frame, &Skeleton, &[BTreeMap<String, BTreeSet<Vec<usize>>>]) -> bool,
) -> u64 {
    let mut count = 0u64;
    'outer: for n in 1..=bounds.max_worlds {
        for frame in frames_exact(spec, n, rooted).iter() {
            let more = visit_frame_models(
                frame,
                spec,
                sig,
                bounds,
                domain_range,
                domain_sum,
                Reductions::default(),
                &mut count,
                visit,
            );
            if !more {
                break 'outer;
            }
        }
    }
    count
}

#[allow(clippy::too_many_arguments)]
fn visit_frame_models(
    frame: &Frame,
    spec: &FrameClassSpec,
    sig: &Signature,
    bounds: &SearchBounds,
    domain_range: (usize, usize),
    domain_sum: Option<usize>,
    red: Reductions,
    count: &mut u64,
    visit: &mut impl FnMut(&Frame, &Skeleton, &[BTreeMap<String, BTreeSet<Vec<usize>>>]) -> bool,
) -> bool {
    let preds: Vec<(String, usize)> = sig
        .predicates()
        .iter()
        .map(|(p, &a)| (p.clone(), a))
        .collect();
    let (lo, hi) = domain_range;
    for m in lo..=hi {
        let keep_going = skeletons(frame, sig, m, spec, domain_sum, red, &mut |sk| {
            extensions_dfs(frame, &sk, &preds, bounds.tuple_cap, &mut |ext| {
                *count += 1;
                visit(frame, &sk, ext)
            })
        });
        if !keep_going {
            return false;
        }
    }
    true
}

/// Exhaustive-up-to-renaming enumeration of in-class models over a
/// signature. Intended for tiny bounds; every emitted model passes the
/// validators, and no two emitted models are isomorphic.
pub fn enumerate_models(
    spec: &FrameClassSpec,
    sig: &Signature,
    bounds: &SearchBounds,
) -> Vec<Model> {
    let mut out = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    let min_m = if sig.constants().is_empty() { 0 } else { 1 };
    visit_models(
        spec,
        sig,
        bounds,
        false,
        (min_m, bounds.max_domain),
        None,
        &mut |frame, sk, ext| {
            let model = build_model(frame, sk, sig, ext);
            let key = canonical_model_key(&model);
            if seen.insert(key) {
                out.push(model);
            }
            true
        },
    );
    out
}

/// Canonical key of a model under joint world and element renaming.
fn canonical_model_key(m: &Model) -> String {
    let n = m.frame.len();
    let me = m.elems.len();
    let wperms = permutations(n, false);
    let eperms = permutations(me, false);
    let mut best: Option<String> = None;
    for wp in &wperms {
        for ep in &eperms {
            let mut s = String::new();
            // relations
            for a in 0..n {
                for b in 0..n {
                    let (ia, ib) = (wp.iter().position(|&x| x == a).unwrap(), wp.iter().position(|&x| x == b).unwrap());
                    s.push(if m.frame.leq.contains(ia, ib) { '1' } else { '0' });
                    s.push(if m.frame.modal.contains(ia, ib) { '1' } else { '0' });
                }
            }
            // domains, equality, extensions
            for a in 0..n {
                let ia = wp.iter().position(|&x| x == a).unwrap();
                for e in 0..me {
                    let ie = ep.iter().position(|&x| x == e).unwrap();
                    s.push(if m.domains[ia].contains(&ie) { '1' } else { '0' });
                }
                for e in 0..me {
                    for f in 0..me {
                        let (ie, iff) = (ep.iter().position(|&x| x == e).unwrap(), ep.iter().position(|&x| x == f).unwrap());
                        s.push(if m.eq_at(ia, ie, iff) { '1' } else { '0' });
                    }
                }
                for (p, _) in m.signature.predicates() {
                    s.push('|');
                    s.push_str(p);
                    if let Some(ts) = m.extensions[ia].get(p) {
                        let mut rows: Vec<String> = ts
                            .iter()
                            .map(|t| {
                                t.iter()
                                    .map(|&e| ep[e].to_string())
                                    .collect::<Vec<_>>()
                                    .join(",")
                            })
                            .collect();
                        rows.sort();
                        s.push_str(&rows.join(";"));
                    }
                }
            }
            // constants
            for (c, &e) in &m.constants {
                s.push('#');
                s.push_str(c);
                s.push_str(&ep[e].to_string());
            }
            if best.as_ref().map_or(true, |b| s < *b) {
                best = Some(s);
            }
        }
    }
    best.unwrap()
}

/// The signature actually used by a sequent.
fn sequent_signature(gamma: &[Formula], goal: &Formula) -> Signature {
    let mut constants: BTreeSet<String> = goal.constants();
    let mut preds: BTreeMap<String, usize> = goal.predicates();
    for g in gamma {
        constants.extend(g.constants());
        preds.extend(g.predicates());
    }
    Signature::with_generated(constants.into_iter().collect(), preds)
        .expect("names from parsed formulas are valid")
}

/// Searches for an in-class model and world where every sentence of
/// `gamma` holds and `goal` fails.
pub fn find_countermodel(
    gamma: &[Formula],
    goal: &Formula,
    spec: &FrameClassSpec,
    bounds: &SearchBounds,
) -> CountermodelResult {
    if bounds.minimal_witness {
        // scan by exact world count, then exact domain sum
        for n in 1..=bounds.max_worlds {
            let sub = SearchBounds {
                max_worlds: n,
                ..*bounds
            };
            let sig = sequent_signature(gamma, goal);
            let quantified = !goal.is_quantifier_free()
                || gamma.iter().any(|g| !g.is_quantifier_free());
            let max_m = if quantified {
                bounds.max_domain
            } else {
                sig.constants().len().min(bounds.max_domain)
            };
            let min_m = if sig.constants().is_empty() { 0 } else { 1 };
            for s in 0..=(n * max_m) {
                let mut result = None;
                visit_models(
                    spec,
                    &sig,
                    &SearchBounds {
                        max_worlds: n,
                        ..sub
                    },
                    true,
                    (min_m, max_m),
                    Some(s),
                    &mut |frame, sk, ext| {
                        if frame.len() != n {
                            return true;
                        }
                        let model = build_model(frame, sk, &sig, ext);
                        if refutes_at_root(&model, gamma, goal) {
                            result = Some(model);
                            false
                        } else {
                            true
                        }
                    },
                );
                if let Some(model) = result {
                    let world = model.frame.worlds[0].clone();
                    return CountermodelResult::Found { model, world };
                }
            }
        }
        return CountermodelResult::NotFoundWithinBounds { examined: 0 };
    }
    let mut results = find_countermodels_batch(
        std::slice::from_ref(&(gamma.to_vec(), goal.clone())),
        spec,
        bounds,
    );
    results.pop().unwrap()
}

fn refutes_at_root(model: &Model, gamma: &[Formula], goal: &Formula) -> bool {
    if eval_sentence(model, 0, goal).unwrap_or(true) {
        return false;
    }
    gamma
        .iter()
        .all(|g| eval_sentence(model, 0, g).unwrap_or(false))
}

fn uses_equality(f: &Formula) -> bool {
    let mut found = false;
    fn walk(f: &Formula, found: &mut bool) {
        match f {
            Formula::Eq(_, _) => *found = true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                walk(a, found);
                walk(b, found);
            }
            Formula::Box(a) | Formula::Dia(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => {
                walk(a, found)
            }
            _ => {}
        }
    }
    walk(f, &mut found);
    found
}

/// Runs many sequents against shared enumeration passes. Sequents are
/// grouped by whether they quantify and whether they mention equality;
/// each group scans rooted models over its union signature, evaluating
/// at the root (complete, because a countermodel restricts to the
/// submodel its witness world generates). Groups with no equality fix
/// the discrete partition; quantifier-free groups additionally clamp
/// the element universe to the denoted elements. The scan is
/// partitioned across threads by frame with a deterministic merge: the
/// witness reported is the one the sequential enumeration order finds
/// first.
pub fn find_countermodels_batch(
    sequents: &[(Vec<Formula>, Formula)],
    spec: &FrameClassSpec,
    bounds: &SearchBounds,
) -> Vec<CountermodelResult> {
    let mut results: Vec<Option<CountermodelResult>> = vec![None; sequents.len()];
    let mut groups: BTreeMap<(bool, bool), Vec<usize>> = BTreeMap::new();
    for (i, (gamma, goal)) in sequents.iter().enumerate() {
        let quantified =
            !goal.is_quantifier_free() || gamma.iter().any(|g| !g.is_quantifier_free());
        let eq = uses_equality(goal) || gamma.iter().any(uses_equality);
        groups.entry((quantified, eq)).or_default().push(i);
    }
    for ((quantified, eq), members) in groups {
        let group: Vec<(Vec<Formula>, Formula)> =
            members.iter().map(|&i| sequents[i].clone()).collect();
        let group_results = scan_group(&group, spec, bounds, quantified, eq);
        for (slot, r) in members.into_iter().zip(group_results) {
            results[slot] = Some(r);
        }
    }
    results.into_iter().map(|r| r.unwrap()).collect()
}

fn scan_group(
    sequents: &[(Vec<Formula>, Formula)],
    spec: &FrameClassSpec,
    bounds: &SearchBounds,
    quantified: bool,
    eq: bool,
) -> Vec<CountermodelResult> {
    use std::sync::atomic::{AtomicU64, Ordering};

    let mut constants: BTreeSet<String> = BTreeSet::new();
    let mut preds: BTreeMap<String, usize> = BTreeMap::new();
    for (gamma, goal) in sequents {
        let s = sequent_signature(gamma, goal);
        constants.extend(s.constants().iter().cloned());
        preds.extend(s.predicates().clone());
    }
    let sig = Signature::with_generated(constants.into_iter().collect(), preds)
        .expect("sequent names are valid");
    let max_m = if quantified {
        bounds.max_domain
    } else {
        sig.constants()
            .len()
            .min(bounds.max_domain)
            .max(usize::from(!sig.constants().is_empty()))
    };
    let min_m = if sig.constants().is_empty() { 0 } else { 1 };
    let red = Reductions {
        canonical_elems: true,
        denoted_cover: !quantified && !sig.constants().is_empty(),
        discrete_equality: !eq,
    };

    // frames in global enumeration order
    let mut frames: Vec<Frame> = Vec::new();
    for n in 1..=bounds.max_worlds {
        frames.extend(frames_exact(spec, n, rooted_scan()).iter().cloned());
    }

    // best[i] holds the packed frame index of the earliest find so far,
    // letting other threads skip already-settled sequents
    let best: Vec<AtomicU64> = (0..sequents.len()).map(|_| AtomicU64::new(u64::MAX)).collect();
    let threads = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1)
        .min(8)
        .max(1);

    struct Hit {
        sequent: usize,
        frame_idx: u64,
        order_in_frame: u64,
        model: Model,
    }

    let mut all_hits: Vec<Hit> = Vec::new();
    let mut examined = 0u64;
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for t in 0..threads {
            let frames = &frames;
            let sig = &sig;
            let best = &best;
            handles.push(scope.spawn(move || {
                let mut hits: Vec<Hit> = Vec::new();
                let mut local_found: Vec<bool> = vec![false; sequents.len()];
                let mut examined = 0u64;
                let preds: Vec<(String, usize)> = sig
                    .predicates()
                    .iter()
                    .map(|(p, &a)| (p.clone(), a))
                    .collect();
                let empty_ext: Vec<BTreeMap<String, BTreeSet<Vec<usize>>>> = Vec::new();
                for (fi, frame) in frames.iter().enumerate().skip(t).step_by(threads) {
                    let fi = fi as u64;
                    let mut order = 0u64;
                    for m in min_m..=max_m {
                        skeletons(frame, sig, m, spec, None, red, &mut |sk| {
                            // one base model per skeleton; extension
                            // tables are swapped in per candidate
                            let mut empty = empty_ext.clone();
                            empty.resize(frame.len(), BTreeMap::new());
                            let mut base = build_model(frame, &sk, sig, &empty);
                            extensions_dfs(frame, &sk, &preds, bounds.tuple_cap, &mut |ext| {
                                examined += 1;
                                base.extensions.clear();
                                base.extensions.extend(ext.iter().cloned());
                                for (i, (gamma, goal)) in sequents.iter().enumerate() {
                                    if local_found[i] || best[i].load(Ordering::Relaxed) < fi
                                    {
                                        continue;
                                    }
                                    if refutes_at_root(&base, gamma, goal) {
                                        local_found[i] = true;
                                        best[i].fetch_min(fi, Ordering::Relaxed);
                                        hits.push(Hit {
                                            sequent: i,
                                            frame_idx: fi,
                                            order_in_frame: order,
                                            model: base.clone(),
                                        });
                                    }
                                }
                                order += 1;
                                true
                            })
                        });
                    }
                    if local_found.iter().all(|&b| b) {
                        break;
                    }
                }
                (hits, examined)
            }));
        }
        for h in handles {
            let (hits, ex) = h.join().expect("scan worker panicked");
            all_hits.extend(hits);
            examined += ex;
        }
    });

    let mut results: Vec<CountermodelResult> = (0..sequents.len())
        .map(|_| CountermodelResult::NotFoundWithinBounds { examined })
        .collect();
    all_hits.sort_by_key(|h| (h.sequent, h.frame_idx, h.order_in_frame));
    let mut done = vec![false; sequents.len()];
    for h in all_hits {
        if !done[h.sequent] {
            done[h.sequent] = true;
            let world = h.model.frame.worlds[0].clone();
            results[h.sequent] = CountermodelResult::Found {
                model: h.model,
                world,
            };
        }
    }
    results
}

fn rooted_scan() -> bool {
    true
}

// ---------------------------------------------------------------------
// soundness fuzzing

/// A random instance of an axiom schema over the signature.
pub fn axiom_instance(
    rule: Rule,
    logic: &LogicId,
    sig: &Signature,
    rng: &mut ChaCha8Rng,
) -> Formula {
    let sent = |rng: &mut ChaCha8Rng| gen::random_sentence(sig, 2, rng);
    let consts = sig.constants();
    let c = |rng: &mut ChaCha8Rng| consts[rng.gen_range(0..consts.len())].clone();
    match rule {
        Rule::Int => {
            // substitution instances of a few fixed theorems
            let a = sent(rng);
            let b = sent(rng);
            match rng.gen_range(0..5) {
                0 => Formula::imp(a.clone(), a),
                1 => Formula::imp(a.clone(), Formula::imp(b, a)),
                2 => Formula::imp(Formula::and(a.clone(), b.clone()), a),
                3 => Formula::imp(a.clone(), Formula::or(a, b)),
                _ => Formula::neg(Formula::neg(Formula::or(a.clone(), Formula::neg(a)))),
            }
        }
        Rule::KBa => {
            let (a, b) = (sent(rng), sent(rng));
            let both = Formula::boxed(Formula::and(a.clone(), b.clone()));
            let split = Formula::and(Formula::boxed(a), Formula::boxed(b));
            Formula::and(
                Formula::imp(both.clone(), split.clone()),
                Formula::imp(split, both),
            )
        }
        Rule::KBb => Formula::boxed(Formula::top()),
        Rule::KDa => {
            let (a, b) = (sent(rng), sent(rng));
            let either = Formula::dia(Formula::or(a.clone(), b.clone()));
            let split = Formula::or(Formula::dia(a), Formula::dia(b));
            Formula::and(
                Formula::imp(either.clone(), split.clone()),
                Formula::imp(split, either),
            )
        }
        Rule::KDb => Formula::neg(Formula::dia(Formula::False)),
        Rule::Fs1 => {
            let (a, b) = (sent(rng), sent(rng));
            Formula::imp(
                Formula::imp(Formula::dia(a.clone()), Formula::boxed(b.clone())),
                Formula::boxed(Formula::imp(a, b)),
            )
        }
        Rule::Fs2 => {
            let (a, b) = (sent(rng), sent(rng));
            Formula::imp(
                Formula::dia(Formula::imp(a.clone(), b.clone())),
                Formula::imp(Formula::boxed(a), Formula::dia(b)),
            )
        }
        Rule::Univ => {
            let body = gen::random_one_place(sig, "x", 2, rng);
            let inst = subst_var(&body, "x", &Term::con(c(rng))).unwrap();
            Formula::imp(Formula::forall("x", body), inst)
        }
        Rule::Exist => {
            let body = gen::random_one_place(sig, "x", 2, rng);
            let inst = subst_var(&body, "x", &Term::con(c(rng))).unwrap();
            Formula::imp(inst, Formula::exists("x", body))
        }
        Rule::ForallAnt => {
            let a = gen::random_one_place(sig, "x", 2, rng);
            let b = sent(rng);
            Formula::imp(
                Formula::forall("x", Formula::imp(a.clone(), b.clone())),
                Formula::imp(Formula::exists("x", a), b),
            )
        }
        Rule::ForallCon => {
            let a = sent(rng);
            let b = gen::random_one_place(sig, "x", 2, rng);
            Formula::imp(
                Formula::forall("x", Formula::imp(a.clone(), b.clone())),
                Formula::imp(a, Formula::forall("x", b)),
            )
        }
        Rule::IdRef => {
            let k = c(rng);
            Formula::eq(Term::con(k.clone()), Term::con(k))
        }
        Rule::IdSub => {
            let body = if logic.ni {
                gen::random_one_place(sig, "x", 2, rng)
            } else {
                loop {
                    let b = gen::random_one_place(sig, "x", 2, rng);
                    if b.is_modal_free() {
                        break b;
                    }
                }
            };
            let (c1, c2) = (c(rng), c(rng));
            let a1 = subst_var(&body, "x", &Term::con(c1.clone())).unwrap();
            let a2 = subst_var(&body, "x", &Term::con(c2.clone())).unwrap();
            Formula::imp(
                Formula::eq(Term::con(c1), Term::con(c2)),
                Formula::imp(a1, a2),
            )
        }
        Rule::D => {
            let a = sent(rng);
            Formula::imp(Formula::boxed(a.clone()), Formula::dia(a))
        }
        Rule::TBox => {
            let a = sent(rng);
            Formula::imp(Formula::boxed(a.clone()), a)
        }
        Rule::TDia => {
            let a = sent(rng);
            Formula::imp(a.clone(), Formula::dia(a))
        }
        Rule::FourBox => {
            let a = sent(rng);
            Formula::imp(
                Formula::boxed(a.clone()),
                Formula::boxed(Formula::boxed(a)),
            )
        }
        Rule::FourDia => {
            let a = sent(rng);
            Formula::imp(Formula::dia(Formula::dia(a.clone())), Formula::dia(a))
        }
        Rule::Ni => {
            let eq = Formula::eq(Term::con(c(rng)), Term::con(c(rng)));
            Formula::imp(eq.clone(), Formula::boxed(eq))
        }
        Rule::Nd => {
            let eq = Formula::eq(Term::con(c(rng)), Term::con(c(rng)));
            Formula::imp(Formula::dia(eq.clone()), eq)
        }
    }
}

/// Generates seeded in-class models and random instances of every axiom
/// schema of the logic, evaluating each instance at every world of
/// every model. By soundness the report must be empty; any entry is an
/// implementation bug.
pub fn soundness_fuzz(
    logic: LogicId,
    n_models: usize,
    n_instances: usize,
    seed: u64,
) -> Report {
    let spec = FrameClassSpec::new(logic);
    let sig = crate::frameclasses::fuzz_signature(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances: Vec<(Rule, Formula)> = Vec::new();
    for rule in logic.axioms() {
        for _ in 0..n_instances {
            instances.push((rule, axiom_instance(rule, &logic, &sig, &mut rng)));
        }
    }
    let mut report = Report::default();
    let bounds = ModelBounds::new(5, 4, 2);
    for i in 0..n_models {
        let model = crate::frameclasses::random_model(&spec, &bounds, seed ^ (i as u64) << 17);
        for (rule, f) in &instances {
            for w in 0..model.frame.len() {
                match eval_sentence(&model, w, f) {
                    Ok(true) => {}
                    Ok(false) => report.push(
                        "soundness",
                        format!(
                            "{} instance {} false at model {} world {}",
                            rule.name(),
                            f,
                            i,
                            model.frame.worlds[w]
                        ),
                    ),
                    Err(e) => report.push("eval-error", e.to_string()),
                }
            }
        }
    }
    report
}

/// Evaluates one sentence at every world of seeded in-class models;
/// used as the negative control for the fuzz harness.
pub fn fuzz_formula(logic: LogicId, f: &Formula, n_models: usize, seed: u64) -> Report {
    let spec = FrameClassSpec::new(logic);
    let mut report = Report::default();
    let bounds = ModelBounds::new(5, 4, 2);
    for i in 0..n_models {
        let model = crate::frameclasses::random_model(&spec, &bounds, seed ^ (i as u64) << 17);
        for w in 0..model.frame.len() {
            match eval_sentence(&model, w, f) {
                Ok(false) => report.push(
                    "counterexample",
                    format!("{} false at model {} world {}", f, i, model.frame.worlds[w]),
                ),
                Ok(true) => {}
                Err(e) => report.push("eval-error", e.to_string()),
            }
        }
    }
    report
}
