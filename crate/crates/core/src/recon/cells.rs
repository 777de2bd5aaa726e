use rand::Rng;

use super::{estimated_centers, exhaustive_query, find_neighbors, CentersState, EdgeSet, Probe, ReconConfig, ReconError};
use crate::graph::Vertex;
use crate::oracle::{OracleError, OracleSession, PairQuery};

/// How the neighborhood of each center is obtained before cells are unioned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Neighborhood {
    /// `N_2(a)` found by edge-weight scans.
    TwoHop,
    /// Closed distance ball of the given radius, read off the center's
    /// already-queried distance row.
    Ball(f64),
}

/// What one center contributed: its neighborhood, the strict Voronoi cells
/// of the neighborhood members, the extended cell and the edges found in it.
#[derive(Debug, Clone, PartialEq)]
pub struct CellCover {
    pub center: Vertex,
    pub neighborhood: Vec<Vertex>,
    pub cells: Vec<(Vertex, Vec<Vertex>)>,
    pub extended: Vec<Vertex>,
    pub edges: EdgeSet,
}

/// `{v : d(a, v) <= radius}` from a distance row aligned with `vertices`.
pub fn closed_ball(vertices: &[Vertex], dists: &[f64], radius: f64) -> Vec<Vertex> {
    vertices
        .iter()
        .zip(dists)
        .filter(|&(_, &d)| d <= radius)
        .map(|(&v, _)| v)
        .collect()
}

pub(crate) fn cover_and_query(
    session: &mut OracleSession<'_>,
    vertices: &[Vertex],
    thr: f64,
    centers: &CentersState,
    hood: Neighborhood,
    probe: &mut dyn Probe,
) -> Result<EdgeSet, OracleError> {
    let n = vertices.len();
    let want_cells = probe.wants_cells();
    let mut found = EdgeSet::new();
    let mut in_extended = vec![false; n];
    let mut marked: Vec<usize> = Vec::new();

    for (ci, &a) in centers.centers.iter().enumerate() {
        let mut nbhd = match hood {
            Neighborhood::TwoHop => find_neighbors(session, vertices, a, thr)?,
            Neighborhood::Ball(r) => closed_ball(vertices, &centers.center_rows[ci], r),
        };
        nbhd.sort_unstable();
        let table = session.batch_query(PairQuery::Distance, &nbhd, vertices, thr)?;

        let mut cells = Vec::new();
        for (r, &b) in nbhd.iter().enumerate() {
            let row = table.row(r);
            let mut cell = Vec::new();
            for (j, (&d, &best)) in row.iter().zip(&centers.dist_to_centers).enumerate() {
                if d < best {
                    if !in_extended[j] {
                        in_extended[j] = true;
                        marked.push(j);
                    }
                    if want_cells {
                        cell.push(vertices[j]);
                    }
                }
            }
            if want_cells {
                cells.push((b, cell));
            }
        }

        let mut extended: Vec<Vertex> = marked.iter().map(|&j| vertices[j]).collect();
        for &j in &marked {
            in_extended[j] = false;
        }
        marked.clear();
        extended.extend_from_slice(&nbhd);
        extended.sort_unstable();
        extended.dedup();

        let edges = exhaustive_query(session, &extended, thr)?;
        found.extend(edges.iter().map(|(&k, &w)| (k, w)));
        if want_cells {
            probe.cell(
                vertices,
                thr,
                &CellCover {
                    center: a,
                    neighborhood: nbhd,
                    cells,
                    extended,
                    edges,
                },
            );
        }
    }
    Ok(found)
}

/// One reconstruction pass over a component connected in `G[w >= thr]`:
/// centers with `s = D sqrt(n)`, two-hop neighborhoods, strict cells, and an
/// exhaustive search inside every extended cell.
pub fn reconstruct_sub<R: Rng + ?Sized>(
    session: &mut OracleSession<'_>,
    vertices: &[Vertex],
    thr: f64,
    cfg: &ReconConfig,
    rng: &mut R,
    probe: &mut dyn Probe,
) -> Result<EdgeSet, OracleError> {
    let n = vertices.len();
    let d = session.announced_max_degree().max(1) as f64;
    let s = d * (n as f64).sqrt();
    let centers = estimated_centers(session, vertices, s, thr, cfg.k_const, rng)?;
    probe.centers_chosen(vertices, thr, &centers);
    let edges = cover_and_query(session, vertices, thr, &centers, Neighborhood::TwoHop, probe)?;
    probe.sub_output(vertices, thr, &edges);
    Ok(edges)
}

/// Per-attempt budget `c_Q D^3 n^1.5 (ln n)^2 max(1, ln ln n)`.
pub fn reconstruct_budget(c_q: f64, max_degree: usize, n: usize) -> u64 {
    let nf = n as f64;
    let ln = nf.ln().max(0.0);
    let lnln = if ln > 0.0 { ln.ln().max(1.0) } else { 1.0 };
    let d = max_degree.max(1) as f64;
    let q = c_q * d.powi(3) * nf.powf(1.5) * ln * ln * lnln;
    if q >= u64::MAX as f64 {
        u64::MAX
    } else {
        (q.ceil() as u64).max(1)
    }
}

/// Runs `attempt` under a per-attempt budget, restarting with fresh
/// randomness whenever the budget runs out.
pub(crate) fn retry_with_budget<T>(
    session: &mut OracleSession<'_>,
    budget: u64,
    cfg: &ReconConfig,
    mut attempt: impl FnMut(&mut OracleSession<'_>) -> Result<T, ReconError>,
) -> Result<T, ReconError> {
    let previous = session.budget();
    let mut tries = 0;
    let outcome = loop {
        tries += 1;
        let limit = match (tries, cfg.first_attempt_budget) {
            (1, Some(forced)) => forced,
            _ => budget,
        };
        session.set_budget(Some(limit));
        match attempt(session) {
            Err(ReconError::Oracle(OracleError::BudgetExhausted { .. })) => {
                if tries >= cfg.max_attempts {
                    break Err(ReconError::GaveUp(tries));
                }
                session.reset_attempt();
            }
            other => break other,
        }
    };
    session.set_budget(previous);
    outcome
}

/// Reconstruction of one connected component with budgeted restarts.
pub fn reconstruct<R: Rng + ?Sized>(
    session: &mut OracleSession<'_>,
    vertices: &[Vertex],
    thr: f64,
    cfg: &ReconConfig,
    rng: &mut R,
    probe: &mut dyn Probe,
) -> Result<EdgeSet, ReconError> {
    let budget = reconstruct_budget(cfg.c_q, session.announced_max_degree(), vertices.len());
    retry_with_budget(session, budget, cfg, |s| {
        reconstruct_sub(s, vertices, thr, cfg, rng, probe).map_err(ReconError::from)
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::graph::WeightedGraph;
    use crate::recon::NoProbe;

    #[test]
    fn ball_examples() {
        // path a-b-c-d with weights 1, 2, 2
        let v = [0, 1, 2, 3];
        assert_eq!(closed_ball(&v, &[0.0, 1.0, 3.0, 5.0], 0.0), vec![0]);
        assert_eq!(closed_ball(&v, &[0.0, 1.0, 3.0, 5.0], 4.0), vec![0, 1, 2]);
    }

    #[test]
    fn budget_formula() {
        let q = reconstruct_budget(50.0, 4, 1000);
        let ln = 1000f64.ln();
        let want = 50.0 * 64.0 * 1000f64.powf(1.5) * ln * ln * ln.ln();
        assert_eq!(q, want.ceil() as u64);
        assert!(reconstruct_budget(50.0, 4, 1) >= 1);
    }

    #[test]
    fn single_edge_component() {
        let g = WeightedGraph::new(2, [(0, 1, 2.0)]).unwrap();
        let mut s = OracleSession::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let e = reconstruct_sub(&mut s, &[0, 1], 2.0, &ReconConfig::default(), &mut rng, &mut NoProbe).unwrap();
        assert_eq!(e.into_iter().collect::<Vec<_>>(), vec![((0, 1), 2.0)]);
    }

    #[test]
    fn forced_restart_is_recorded() {
        let spec = crate::gen::InstanceSpec::connected(60, 3, 2.0, 21);
        let g = crate::gen::gen_graph(&spec).unwrap();
        let mut s = OracleSession::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = ReconConfig {
            first_attempt_budget: Some(10),
            ..ReconConfig::default()
        };
        let v: Vec<Vertex> = (0..60).collect();
        let e = reconstruct(&mut s, &v, 1.0, &cfg, &mut rng, &mut NoProbe).unwrap();
        assert_eq!(s.ledger().attempt_index(), 2);
        assert!(s.ledger().cumulative_total() >= s.ledger().attempt_total());
        // every edge below 2 is covered
        for edge in g.edges().iter().filter(|e| e.w < 2.0) {
            assert_eq!(e.get(&(edge.u, edge.v)), Some(&edge.w));
        }
    }

    #[test]
    fn gives_up_when_budget_never_suffices() {
        let g = WeightedGraph::new(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        let mut s = OracleSession::new(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let cfg = ReconConfig {
            c_q: 1e-9,
            max_attempts: 3,
            ..ReconConfig::default()
        };
        let err = reconstruct(&mut s, &[0, 1, 2, 3], 1.0, &cfg, &mut rng, &mut NoProbe).unwrap_err();
        assert_eq!(err, ReconError::GaveUp(3));
        assert_eq!(s.ledger().attempt_index(), 3);
        assert_eq!(s.budget(), None);
    }
}
