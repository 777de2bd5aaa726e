//! No-threshold reconstruction of connected graphs: every query runs at
//! threshold 1 and each center's two-hop neighborhood is replaced by the
//! closed distance ball of radius `2 W_max`.

use rand::Rng;
use serde::Serialize;

use crate::graph::Vertex;
use crate::oracle::OracleSession;
use crate::recon::{
    cover_and_query, estimated_centers, retry_with_budget, EdgeSet, IterationRecord, Neighborhood, Probe,
    ReconConfig, ReconError, ReconstructionResult,
};

pub use crate::recon::closed_ball;

/// Largest power `D^(2 W_max + 1)` accepted before `b` loses integer precision.
const MAX_POWER: f64 = 9_007_199_254_740_992.0; // 2^53

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallParams {
    pub wmax: f64,
    pub max_degree: usize,
    /// Bound on the size of a radius-`2 W_max` ball: `(D^(2W+1) - 1) / (D - 1)`.
    pub b: f64,
    /// Center sample size `sqrt(b n)`, capped at `n`.
    pub s: f64,
    /// Per-attempt budget `c_Q n^1.5 b^1.5`.
    pub budget: u64,
}

impl BallParams {
    pub fn new(wmax: f64, max_degree: usize, n: usize, c_q: f64) -> Result<Self, ReconError> {
        if !(wmax >= 1.0) || !wmax.is_finite() {
            return Err(ReconError::InvalidParams(format!("W_max must be finite and >= 1, got {wmax}")));
        }
        let exponent = 2.0 * wmax + 1.0;
        let b = match max_degree {
            0 => 1.0,
            1 => exponent,
            d => {
                let power = (d as f64).powf(exponent);
                if power > MAX_POWER {
                    return Err(ReconError::InvalidParams(format!(
                        "D^(2 W_max + 1) = {power:e} exceeds 2^53 (D = {d}, W_max = {wmax})"
                    )));
                }
                (power - 1.0) / (d as f64 - 1.0)
            }
        };
        let nf = n as f64;
        let s = (b * nf).sqrt().min(nf);
        let q = c_q * nf.powf(1.5) * b.powf(1.5);
        let budget = if q >= u64::MAX as f64 { u64::MAX } else { (q.ceil() as u64).max(1) };
        Ok(Self {
            wmax,
            max_degree,
            b,
            s,
            budget,
        })
    }

    pub fn radius(&self) -> f64 {
        2.0 * self.wmax
    }
}

/// One NT-R pass: center selection with `s = sqrt(b n)`, then distance balls
/// as neighborhoods. All queries at threshold 1.
pub fn nt_rs<R: Rng + ?Sized>(
    session: &mut OracleSession<'_>,
    vertices: &[Vertex],
    params: &BallParams,
    cfg: &ReconConfig,
    rng: &mut R,
    probe: &mut dyn Probe,
) -> Result<EdgeSet, ReconError> {
    let centers = estimated_centers(session, vertices, params.s, 1.0, cfg.k_const, rng)?;
    if centers.center_rows.iter().flatten().any(|d| d.is_infinite()) {
        return Err(ReconError::Disconnected);
    }
    probe.centers_chosen(vertices, 1.0, &centers);
    let edges = cover_and_query(session, vertices, 1.0, &centers, Neighborhood::Ball(params.radius()), probe)?;
    probe.sub_output(vertices, 1.0, &edges);
    Ok(edges)
}

/// NT-R: [`nt_rs`] wrapped in budgeted restarts.
pub fn nt_r<R: Rng + ?Sized>(
    session: &mut OracleSession<'_>,
    vertices: &[Vertex],
    cfg: &ReconConfig,
    rng: &mut R,
    probe: &mut dyn Probe,
) -> Result<ReconstructionResult, ReconError> {
    let params = BallParams::new(
        session.announced_wmax(),
        session.announced_max_degree(),
        vertices.len(),
        cfg.c_q,
    )?;
    let edges = retry_with_budget(session, params.budget, cfg, |s| nt_rs(s, vertices, &params, cfg, rng, probe))?;
    let record = IterationRecord {
        iteration: 0,
        threshold: 1.0,
        component_sizes: vec![vertices.len()],
        paths: vec![crate::recon::ComponentPath::Reconstruct],
        qc_queries: 0,
        edges_known: edges.len(),
    };
    Ok(ReconstructionResult {
        edges,
        ledger: session.ledger().clone(),
        trace: vec![record],
        break_iteration: None,
    })
}
