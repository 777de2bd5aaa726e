use rand::Rng;

use super::{
    exhaustive_query, find_connected_components, reconstruct, ComponentPath, EdgeSet, IterationRecord, Probe,
    ReconConfig, ReconError, ReconstructionResult,
};
use crate::graph::Vertex;
use crate::oracle::OracleSession;

/// Smallest integer `c` with `c^4 >= n`, i.e. `ceil(n^(1/4))`.
pub fn size_cutoff(n: usize) -> usize {
    let mut c = 0usize;
    while c.pow(4) < n {
        c += 1;
    }
    c
}

/// Largest `j` with `2^j <= wmax` (0 when `wmax < 2`).
pub fn top_iteration(wmax: f64) -> usize {
    let mut j = 0;
    while 2f64.powi(j as i32 + 1) <= wmax {
        j += 1;
    }
    j
}

/// Layer-by-layer reconstruction.
///
/// Iteration `j` works in `G[w >= 2^j]`: components up to `ceil(n^(1/4))`
/// vertices are searched exhaustively, larger ones are reconstructed; the
/// loop stops as soon as every component of the iteration is small.
pub fn lbl_r<R: Rng + ?Sized>(
    session: &mut OracleSession<'_>,
    vertices: &[Vertex],
    cfg: &ReconConfig,
    rng: &mut R,
    probe: &mut dyn Probe,
) -> Result<ReconstructionResult, ReconError> {
    let cutoff = size_cutoff(vertices.len());
    let last = top_iteration(session.announced_wmax());
    let mut edges = EdgeSet::new();
    let mut trace = Vec::new();
    let mut break_iteration = None;

    for j in 0..=last {
        let thr = 2f64.powi(j as i32);
        probe.iteration_start(j, thr, &edges);
        let before = session.ledger().qc();
        let comps = find_connected_components(session, vertices, thr)?;
        let qc_queries = session.ledger().qc() - before;
        probe.components_found(thr, &comps, qc_queries);

        let mut paths = Vec::with_capacity(comps.len());
        for c in &comps {
            let found = if c.len() <= cutoff {
                paths.push(ComponentPath::Exhaustive);
                exhaustive_query(session, c, thr)?
            } else {
                paths.push(ComponentPath::Reconstruct);
                reconstruct(session, c, thr, cfg, rng, probe)?
            };
            edges.extend(found);
        }

        let record = IterationRecord {
            iteration: j,
            threshold: thr,
            component_sizes: comps.iter().map(Vec::len).collect(),
            paths,
            qc_queries,
            edges_known: edges.len(),
        };
        let largest = record.largest_component();
        trace.push(record);
        if largest <= cutoff {
            break_iteration = Some(j);
            break;
        }
    }

    Ok(ReconstructionResult {
        edges,
        ledger: session.ledger().clone(),
        trace,
        break_iteration,
    })
}
