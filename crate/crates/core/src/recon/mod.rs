//! Layer-by-layer reconstruction and its subroutines. Everything here talks to
//! the hidden graph only through an [`OracleSession`].

mod cells;
mod centers;
mod lbl;

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::graph::Vertex;
use crate::oracle::{OracleError, OracleSession, PairQuery, QueryLedger};

pub use cells::{closed_ball, reconstruct, reconstruct_budget, reconstruct_sub, CellCover, Neighborhood};
pub(crate) use cells::{cover_and_query, retry_with_budget};
pub use centers::{estimated_centers, samples_per_candidate, CentersState, Removal};
pub use lbl::{lbl_r, size_cutoff, top_iteration};

/// Recovered edges keyed by `(u, v)` with `u < v`.
pub type EdgeSet = BTreeMap<(Vertex, Vertex), f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReconError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("gave up after {0} attempts")]
    GaveUp(u32),
    #[error("hidden graph is disconnected (infinite distance observed)")]
    Disconnected,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconConfig {
    /// Constant in the per-candidate sample count `T = K s ln n lnln n`.
    pub k_const: f64,
    /// Constant in the per-attempt query budget.
    pub c_q: f64,
    /// Restarts allowed before giving up.
    pub max_attempts: u32,
    /// Test hook: overrides the budget of the first attempt of every
    /// budgeted call, to force restarts.
    pub first_attempt_budget: Option<u64>,
}

impl Default for ReconConfig {
    fn default() -> Self {
        Self {
            k_const: 1.0,
            c_q: 50.0,
            max_attempts: 64,
            first_attempt_budget: None,
        }
    }
}

/// Which branch handled a component in one LBL-R iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentPath {
    Exhaustive,
    Reconstruct,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub threshold: f64,
    pub component_sizes: Vec<usize>,
    pub paths: Vec<ComponentPath>,
    pub qc_queries: u64,
    pub edges_known: usize,
}

impl IterationRecord {
    pub fn largest_component(&self) -> usize {
        self.component_sizes.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionResult {
    pub edges: EdgeSet,
    pub ledger: QueryLedger,
    pub trace: Vec<IterationRecord>,
    /// Iteration at which every component was small enough to stop early.
    pub break_iteration: Option<usize>,
}

/// Instrumentation hooks. The reconstruction never reads anything back from
/// a probe; test and acceptance code uses them to check invariants against
/// ground truth.
pub trait Probe {
    fn iteration_start(&mut self, _iteration: usize, _thr: f64, _known: &EdgeSet) {}
    fn components_found(&mut self, _thr: f64, _components: &[Vec<Vertex>], _qc_queries: u64) {}
    fn centers_chosen(&mut self, _vertices: &[Vertex], _thr: f64, _state: &CentersState) {}
    /// Return true to receive a [`CellCover`] per center.
    fn wants_cells(&self) -> bool {
        false
    }
    fn cell(&mut self, _vertices: &[Vertex], _thr: f64, _cover: &CellCover) {}
    fn sub_output(&mut self, _vertices: &[Vertex], _thr: f64, _edges: &EdgeSet) {}
}

pub struct NoProbe;

impl Probe for NoProbe {}

/// Keeps each element independently with probability `s / |items|`, or
/// returns everything when `|items| <= s`.
pub fn sample<T: Copy, R: Rng + ?Sized>(items: &[T], s: f64, rng: &mut R) -> Vec<T> {
    if items.len() as f64 <= s {
        return items.to_vec();
    }
    let p = s / items.len() as f64;
    items.iter().copied().filter(|_| rng.random::<f64>() < p).collect()
}

/// `q_w` on every unordered pair of `c`; `|c|(|c|-1)/2` queries.
pub fn exhaustive_query(session: &mut OracleSession<'_>, c: &[Vertex], thr: f64) -> Result<EdgeSet, OracleError> {
    let mut out = EdgeSet::new();
    for (i, &u) in c.iter().enumerate() {
        let rest = &c[i + 1..];
        if rest.is_empty() {
            break;
        }
        let table = session.batch_query(PairQuery::Weight, &[u], rest, thr)?;
        for (&v, &w) in rest.iter().zip(&table.values) {
            if w != 0.0 {
                out.insert((u.min(v), u.max(v)), w);
            }
        }
    }
    Ok(out)
}

/// Exact components of `G[w >= thr]` restricted to `vertices`, found with
/// component queries only.
///
/// Each vertex is tested once against the union of the components found so
/// far; on a hit, the component list is halved by list order until a single
/// component remains, testing the first half each time.
pub fn find_connected_components(
    session: &mut OracleSession<'_>,
    vertices: &[Vertex],
    thr: f64,
) -> Result<Vec<Vec<Vertex>>, OracleError> {
    let Some((&first, rest)) = vertices.split_first() else {
        return Ok(Vec::new());
    };
    let mut comps: Vec<Vec<Vertex>> = vec![vec![first]];
    for &v in rest {
        if !session.q_c(v, comps.iter().flatten().copied(), thr)? {
            comps.push(vec![v]);
            continue;
        }
        let (mut lo, mut hi) = (0, comps.len());
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if session.q_c(v, comps[lo..mid].iter().flatten().copied(), thr)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        comps[lo].push(v);
    }
    Ok(comps)
}

/// `N_2(a)` in the layer, `a` included: the neighbors of `a` and of each of
/// its neighbors, discovered by `q_w` scans over `vertices`.
pub fn find_neighbors(
    session: &mut OracleSession<'_>,
    vertices: &[Vertex],
    a: Vertex,
    thr: f64,
) -> Result<Vec<Vertex>, OracleError> {
    let scan = |session: &mut OracleSession<'_>, x: Vertex| -> Result<Vec<Vertex>, OracleError> {
        let table = session.batch_query(PairQuery::Weight, &[x], vertices, thr)?;
        Ok(vertices
            .iter()
            .zip(&table.values)
            .filter(|&(&v, &w)| v != x && w != 0.0)
            .map(|(&v, _)| v)
            .collect())
    };
    let first = scan(session, a)?;
    let mut out = vec![a];
    out.extend_from_slice(&first);
    for &v in &first {
        out.extend(scan(session, v)?);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}
