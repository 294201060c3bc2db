//! Theory oracles: finite label sets indexed by grid position, with the
//! vertical and horizontal candidate relations and a finite
//! amalgamation table serving as the compatibility callback.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TraceError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLabel {
    pub name: String,
    pub i: usize,
    pub j: usize,
}

/// Labels standing for saturated theories, the `U` (vertical) and `R`
/// (horizontal) relations on them, and the amalgamation table: for a
/// row `(g, g', d) -> d'` the table asserts that `d'` completes the
/// square, i.e. `g' R d'` and `d U d'`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryOracle {
    labels: Vec<OracleLabel>,
    u_edges: BTreeSet<(usize, usize)>,
    r_edges: BTreeSet<(usize, usize)>,
    amalgamation: BTreeMap<(usize, usize, usize), usize>,
}

impl TheoryOracle {
    pub fn new(
        labels: Vec<OracleLabel>,
        u_pairs: Vec<(String, String)>,
        r_pairs: Vec<(String, String)>,
        amalgamation_rows: Vec<(String, String, String, String)>,
    ) -> Result<TheoryOracle, TraceError> {
        let index: BTreeMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(k, l)| (l.name.clone(), k))
            .collect();
        if index.len() != labels.len() {
            return Err(TraceError::BadRecord("duplicate label names".into()));
        }
        let resolve = |name: &str| -> Result<usize, TraceError> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| TraceError::UnknownLabel(name.to_string()))
        };
        let mut u_edges = BTreeSet::new();
        for (a, b) in &u_pairs {
            let (ia, ib) = (resolve(a)?, resolve(b)?);
            let (la, lb) = (&labels[ia], &labels[ib]);
            if lb.i != la.i || lb.j != la.j + 1 {
                return Err(TraceError::BadEdge(a.clone(), b.clone()));
            }
            u_edges.insert((ia, ib));
        }
        let mut r_edges = BTreeSet::new();
        for (a, b) in &r_pairs {
            let (ia, ib) = (resolve(a)?, resolve(b)?);
            let (la, lb) = (&labels[ia], &labels[ib]);
            if lb.i != la.i + 1 || lb.j != la.j {
                return Err(TraceError::BadEdge(a.clone(), b.clone()));
            }
            r_edges.insert((ia, ib));
        }
        let mut amalgamation = BTreeMap::new();
        for (g, gp, d, dp) in &amalgamation_rows {
            let (ig, igp, id, idp) = (resolve(g)?, resolve(gp)?, resolve(d)?, resolve(dp)?);
            let ok = r_edges.contains(&(ig, id))
                && u_edges.contains(&(ig, igp))
                && r_edges.contains(&(igp, idp))
                && u_edges.contains(&(id, idp));
            if !ok {
                return Err(TraceError::BadAmalgamationRow(
                    g.clone(),
                    gp.clone(),
                    d.clone(),
                    dp.clone(),
                ));
            }
            amalgamation.insert((ig, igp, id), idp);
        }
        Ok(TheoryOracle {
            labels,
            u_edges,
            r_edges,
            amalgamation,
        })
    }

    pub fn labels(&self) -> &[OracleLabel] {
        &self.labels
    }

    pub fn name(&self, id: usize) -> &str {
        &self.labels[id].name
    }

    pub fn position(&self, id: usize) -> (usize, usize) {
        (self.labels[id].i, self.labels[id].j)
    }

    /// Label ids at a grid cell, in declaration order.
    pub fn labels_at(&self, i: usize, j: usize) -> Vec<usize> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, l)| l.i == i && l.j == j)
            .map(|(k, _)| k)
            .collect()
    }

    pub fn u_related(&self, a: usize, b: usize) -> bool {
        self.u_edges.contains(&(a, b))
    }

    pub fn r_related(&self, a: usize, b: usize) -> bool {
        self.r_edges.contains(&(a, b))
    }

    /// The compatibility callback: given `g R d` and `g U g'`, the
    /// completing label `d'`. A missing entry is a callback failure.
    pub fn amalgamate(&self, g: usize, gp: usize, d: usize) -> Result<usize, TraceError> {
        self.amalgamation.get(&(g, gp, d)).copied().ok_or_else(|| {
            TraceError::AmalgamationFailure(
                self.name(g).to_string(),
                self.name(gp).to_string(),
                self.name(d).to_string(),
            )
        })
    }

    pub fn from_json(text: &str) -> Result<TheoryOracle, TraceError> {
        let doc: OracleDoc = serde_json::from_str(text)?;
        TheoryOracle::new(
            doc.labels,
            doc.u.into_iter().collect(),
            doc.r.into_iter().collect(),
            doc.amalgamation
                .into_iter()
                .map(|row| (row.0, row.1, row.2, row.3))
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let doc = OracleDoc {
            labels: self.labels.clone(),
            u: self
                .u_edges
                .iter()
                .map(|&(a, b)| (self.name(a).to_string(), self.name(b).to_string()))
                .collect(),
            r: self
                .r_edges
                .iter()
                .map(|&(a, b)| (self.name(a).to_string(), self.name(b).to_string()))
                .collect(),
            amalgamation: self
                .amalgamation
                .iter()
                .map(|(&(g, gp, d), &dp)| {
                    (
                        self.name(g).to_string(),
                        self.name(gp).to_string(),
                        self.name(d).to_string(),
                        self.name(dp).to_string(),
                    )
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("oracle documents serialize")
    }
}

#[derive(Serialize, Deserialize)]
struct OracleDoc {
    labels: Vec<OracleLabel>,
    #[serde(default, rename = "U")]
    u: Vec<(String, String)>,
    #[serde(default, rename = "R")]
    r: Vec<(String, String)>,
    #[serde(default)]
    amalgamation: Vec<(String, String, String, String)>,
}

/// A random oracle on the grid `[0, l] x [0, m]` whose amalgamation
/// table is complete by construction: labels are arranged in threads
/// running vertically, the horizontal relation is replicated across
/// rows, and squares complete by lifting the horizontal edge one row.
pub fn random_oracle(l: usize, m: usize, threads: usize, seed: u64) -> TheoryOracle {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = |i: usize, j: usize, t: usize| format!("g{i}_{j}_{t}");
    let mut labels = Vec::new();
    for i in 0..=l {
        for j in 0..=m {
            for t in 0..threads {
                labels.push(OracleLabel {
                    name: name(i, j, t),
                    i,
                    j,
                });
            }
        }
    }
    // per-column horizontal base edges between threads, replicated over j
    let mut base: BTreeSet<(usize, usize, usize)> = BTreeSet::new(); // (i, t, t')
    for i in 0..l {
        for t in 0..threads {
            for tp in 0..threads {
                if rng.gen_bool(0.6) {
                    base.insert((i, t, tp));
                }
            }
        }
    }
    let mut u = Vec::new();
    for i in 0..=l {
        for j in 0..m {
            for t in 0..threads {
                u.push((name(i, j, t), name(i, j + 1, t)));
            }
        }
    }
    let mut r = Vec::new();
    for &(i, t, tp) in &base {
        for j in 0..=m {
            r.push((name(i, j, t), name(i + 1, j, tp)));
        }
    }
    let mut amalgamation = Vec::new();
    for &(i, t, tp) in &base {
        for j in 0..m {
            amalgamation.push((
                name(i, j, t),
                name(i, j + 1, t),
                name(i + 1, j, tp),
                name(i + 1, j + 1, tp),
            ));
        }
    }
    TheoryOracle::new(labels, u, r, amalgamation).expect("thread construction is consistent")
}
