use rand::Rng;
use serde::Serialize;

use super::sample;
use crate::graph::Vertex;
use crate::oracle::{OracleError, OracleSession, PairQuery};

/// One candidate dropped from the working set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Removal {
    pub vertex: Vertex,
    /// Estimated cell size `C~(w)` at removal.
    pub estimate: f64,
    pub pass: usize,
}

/// Outcome of center selection over `vertices` (all per-vertex arrays are
/// aligned with that slice).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentersState {
    pub centers: Vec<Vertex>,
    pub s: f64,
    /// Sample count `T` per candidate and pass.
    pub samples: usize,
    pub k_const: f64,
    pub passes: usize,
    pub removals: Vec<Removal>,
    /// `d(A, v)` for every `v`, from the queried `A x V` distances.
    #[serde(skip)]
    pub dist_to_centers: Vec<f64>,
    /// `d(a, v)` rows, one per center in `centers` order.
    #[serde(skip)]
    pub center_rows: Vec<Vec<f64>>,
}

impl CentersState {
    /// Removal threshold `5n/s` on estimated cell sizes.
    pub fn cutoff(&self) -> f64 {
        5.0 * self.dist_to_centers.len() as f64 / self.s
    }
}

/// `T = K s ln n max(1, ln ln n)`, rounded up, at least 1.
pub fn samples_per_candidate(k_const: f64, s: f64, n: usize) -> usize {
    let ln = (n.max(1) as f64).ln();
    let lnln = if ln > 0.0 { ln.ln().max(1.0) } else { 1.0 };
    ((k_const * s * ln * lnln).ceil() as usize).max(1)
}

/// Center selection by cell-size estimation.
///
/// Each pass samples the surviving candidates into the center set (querying
/// their distances to every vertex), then estimates each candidate's cell
/// size from `T` vertices drawn with replacement, keeping the candidates
/// whose estimate is still at least `5n/s`.
pub fn estimated_centers<R: Rng + ?Sized>(
    session: &mut OracleSession<'_>,
    vertices: &[Vertex],
    s: f64,
    thr: f64,
    k_const: f64,
    rng: &mut R,
) -> Result<CentersState, OracleError> {
    let n = vertices.len();
    let samples = samples_per_candidate(k_const, s, n);
    let cutoff = 5.0 * n as f64 / s;
    let mut state = CentersState {
        centers: Vec::new(),
        s,
        samples,
        k_const,
        passes: 0,
        removals: Vec::new(),
        dist_to_centers: vec![f64::INFINITY; n],
        center_rows: Vec::new(),
    };
    let mut working: Vec<usize> = (0..n).collect();
    let mut picks: Vec<usize> = Vec::with_capacity(samples);
    let mut ids: Vec<Vertex> = Vec::with_capacity(samples);

    while !working.is_empty() {
        state.passes += 1;
        let fresh = sample(&working, s, rng);
        if !fresh.is_empty() {
            let fresh_ids: Vec<Vertex> = fresh.iter().map(|&i| vertices[i]).collect();
            let table = session.batch_query(PairQuery::Distance, &fresh_ids, vertices, thr)?;
            for (r, &a) in fresh_ids.iter().enumerate() {
                let row = table.row(r);
                for (best, &d) in state.dist_to_centers.iter_mut().zip(row) {
                    if d < *best {
                        *best = d;
                    }
                }
                state.center_rows.push(row.to_vec());
                state.centers.push(a);
            }
        }

        let mut keep = Vec::with_capacity(working.len());
        for &w in &working {
            picks.clear();
            picks.extend((0..samples).map(|_| rng.random_range(0..n)));
            ids.clear();
            ids.extend(picks.iter().map(|&i| vertices[i]));
            let table = session.batch_query(PairQuery::Distance, &ids, &[vertices[w]], thr)?;
            let hits = picks
                .iter()
                .zip(&table.values)
                .filter(|&(&x, &d)| d < state.dist_to_centers[x])
                .count();
            let estimate = hits as f64 * n as f64 / samples as f64;
            if estimate >= cutoff {
                keep.push(w);
            } else {
                state.removals.push(Removal {
                    vertex: vertices[w],
                    estimate,
                    pass: state.passes,
                });
            }
        }
        working = keep;
    }
    Ok(state)
}
