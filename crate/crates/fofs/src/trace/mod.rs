//! Desk-scale trace machinery: Ferrers index sets, records over theory
//! oracles, trace-frame fragments with their compatibility witnesses,
//! obligation back-propagation, and budgeted saturation.

mod fragment;
mod obligations;
mod oracle;
mod saturate;

pub use fragment::{build_trace_fragment, end_extends, enumerate_records, fc2_witness, Record, TraceFragment, TraceVariant};
pub use obligations::{compute_obligations, ChainLink, ObligationMember, ObligationSet};
pub use oracle::{random_oracle, OracleLabel, TheoryOracle};
pub use saturate::{
    bounded_saturate, is_averse_bounded, ProcessedEvent, SaturateMode, SaturateOutcome,
    SaturationState,
};

use std::collections::BTreeSet;

use thiserror::Error;

use crate::semantics::Report;

/// Enumeration cap for Ferrers sets.
pub const FERRERS_CAP: usize = 8;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("ferrers enumeration cap exceeded: ({0}, {1}) with cap {FERRERS_CAP}")]
    CapExceeded(usize, usize),
    #[error("invalid ferrers set: {0}")]
    BadFerrers(String),
    #[error("label {0} not in the oracle")]
    UnknownLabel(String),
    #[error("label {label} declared at ({i}, {j}) which does not match its use")]
    LabelIndex { label: String, i: usize, j: usize },
    #[error("edge {0} -> {1} does not step by one grid cell")]
    BadEdge(String, String),
    #[error("amalgamation table row ({0}, {1}, {2}) -> {3} violates the edge constraints")]
    BadAmalgamationRow(String, String, String, String),
    #[error("amalgamation callback has no answer for ({0}, {1}, {2})")]
    AmalgamationFailure(String, String, String),
    #[error("record constraint violated: {0}")]
    BadRecord(String),
    #[error("the pair is refuted at this budget")]
    InitialRefutation(Box<crate::proof::Proof>),
    #[error("no fresh constant left in the target signature")]
    OutOfConstants,
    #[error("{0}")]
    Theory(#[from] crate::proof::TheoryError),
    #[error("malformed oracle document: {0}")]
    Json(#[from] serde_json::Error),
}

/// A staircase-shaped index set in the grid `[0,l] x [0,m]`, stored as
/// the weakly decreasing column-height profile (height of column `i` =
/// number of cells, counted from the top row `m` downward).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FerrersSet {
    l: usize,
    m: usize,
    heights: Vec<usize>,
}

impl FerrersSet {
    /// The full rectangle `[0,l] x [0,m]`.
    pub fn rectangle(l: usize, m: usize) -> FerrersSet {
        FerrersSet {
            l,
            m,
            heights: vec![m + 1; l + 1],
        }
    }

    pub fn from_heights(l: usize, m: usize, heights: Vec<usize>) -> Result<FerrersSet, TraceError> {
        if heights.len() != l + 1 {
            return Err(TraceError::BadFerrers(format!(
                "need {} column heights, got {}",
                l + 1,
                heights.len()
            )));
        }
        if heights[0] != m + 1 {
            return Err(TraceError::BadFerrers(
                "column 0 must reach the bottom row".into(),
            ));
        }
        for w in heights.windows(2) {
            if w[1] > w[0] {
                return Err(TraceError::BadFerrers(
                    "column heights must be weakly decreasing".into(),
                ));
            }
        }
        if *heights.last().unwrap() == 0 {
            return Err(TraceError::BadFerrers(
                "the last column must contain the top cell".into(),
            ));
        }
        Ok(FerrersSet { l, m, heights })
    }

    pub fn from_cells(
        l: usize,
        m: usize,
        cells: &BTreeSet<(usize, usize)>,
    ) -> Result<FerrersSet, TraceError> {
        let report = validate_ferrers(l, m, cells);
        if !report.is_empty() {
            return Err(TraceError::BadFerrers(report.to_string()));
        }
        let mut heights = Vec::with_capacity(l + 1);
        for i in 0..=l {
            heights.push((0..=m).filter(|&j| cells.contains(&(i, j))).count());
        }
        FerrersSet::from_heights(l, m, heights)
    }

    pub fn bounds(&self) -> (usize, usize) {
        (self.l, self.m)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        i <= self.l && j <= self.m && self.heights[i] >= self.m + 1 - j
    }

    /// Cells in column-major order (`i` ascending, then `j` ascending).
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..=self.l {
            for j in (self.m + 1 - self.heights[i])..=self.m {
                out.push((i, j));
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.heights.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        false // (0,0) and (l,m) are always present
    }

    /// The restriction to `[0,l'] x [0,m']`, defined when `(l', m')` is
    /// a cell; it is again a Ferrers set.
    pub fn restrict(&self, l2: usize, m2: usize) -> Result<FerrersSet, TraceError> {
        if !self.contains(l2, m2) {
            return Err(TraceError::BadFerrers(format!(
                "({l2}, {m2}) is outside the set"
            )));
        }
        // cells of column i with j <= m2
        let heights = (0..=l2)
            .map(|i| {
                let low = self.m + 1 - self.heights[i];
                if low > m2 {
                    0
                } else {
                    m2 + 1 - low
                }
            })
            .collect::<Vec<_>>();
        FerrersSet::from_heights(l2, m2, heights)
    }
}

/// Checks the four conditions of an `(l, m)` Ferrers set, localizing
/// each violation.
pub fn validate_ferrers(l: usize, m: usize, cells: &BTreeSet<(usize, usize)>) -> Report {
    let mut report = Report::default();
    for &(i, j) in cells {
        if i > l || j > m {
            report.push("in-grid", format!("({i}, {j}) outside [0,{l}] x [0,{m}]"));
        }
    }
    if !cells.contains(&(0, 0)) {
        report.push("contains-origin", "(0, 0) missing".into());
    }
    if !cells.contains(&(l, m)) {
        report.push("contains-corner", format!("({l}, {m}) missing"));
    }
    for &(i, j) in cells {
        if i > 0 && !cells.contains(&(i - 1, j)) {
            report.push(
                "left-closed",
                format!("({i}, {j}) present but ({}, {j}) missing", i - 1),
            );
        }
        if j < m && !cells.contains(&(i, j + 1)) {
            report.push(
                "up-closed",
                format!("({i}, {j}) present but ({i}, {}) missing", j + 1),
            );
        }
    }
    report
}

/// All `(l, m)` Ferrers sets in deterministic order.
pub fn enumerate_ferrers(l: usize, m: usize) -> Result<Vec<FerrersSet>, TraceError> {
    if l > FERRERS_CAP || m > FERRERS_CAP {
        return Err(TraceError::CapExceeded(l, m));
    }
    let mut out = Vec::new();
    let mut heights = vec![m + 1];
    fn go(l: usize, m: usize, heights: &mut Vec<usize>, out: &mut Vec<FerrersSet>) {
        if heights.len() == l + 1 {
            if *heights.last().unwrap() >= 1 {
                out.push(FerrersSet {
                    l,
                    m,
                    heights: heights.clone(),
                });
            }
            return;
        }
        let cap = *heights.last().unwrap();
        for h in (1..=cap).rev() {
            heights.push(h);
            go(l, m, heights, out);
            heights.pop();
        }
    }
    go(l, m, &mut heights, &mut out);
    Ok(out)
}
