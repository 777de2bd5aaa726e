//! Experiment runner: single trials, configured sweeps with CSV output and
//! summaries, the distance-query indistinguishability demo, and Monte-Carlo
//! statistics for the weight-tail, component-size and early-termination
//! behaviour of layered reconstruction.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gen::{self, GenError, InstanceSpec, Structure, WeightKind};
use crate::graph::{self, Vertex, WeightedGraph};
use crate::ntr::{nt_r, BallParams};
use crate::oracle::{OracleSession, PairQuery};
use crate::recon::{exhaustive_query, lbl_r, size_cutoff, top_iteration, EdgeSet, NoProbe, ReconConfig};

/// Calibrations of the asymptotic statements checked by [`lemma_stats`].
pub const WMAX_MIN_RATE: f64 = 0.99;
pub const LARGEST_COMPONENT_FACTOR: f64 = 12.0;
pub const LARGEST_COMPONENT_MIN_RATE: f64 = 0.95;
pub const EARLY_TERMINATION_MIN_RATE: f64 = 0.90;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Gen(#[from] GenError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "lbl_r")]
    LblR,
    #[serde(rename = "nt_r")]
    NtR,
    #[serde(rename = "exhaustive-baseline")]
    Exhaustive,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::LblR => "lbl_r",
            Algorithm::NtR => "nt_r",
            Algorithm::Exhaustive => "exhaustive-baseline",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lbl_r" | "lbl-r" => Ok(Algorithm::LblR),
            "nt_r" | "nt-r" => Ok(Algorithm::NtR),
            "exhaustive-baseline" | "exhaustive" => Ok(Algorithm::Exhaustive),
            other => Err(format!("unknown algorithm {other:?} (lbl_r, nt_r, exhaustive-baseline)")),
        }
    }
}

/// Sweep configuration, read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub n: Vec<usize>,
    pub d_max: Vec<usize>,
    pub alpha: Vec<f64>,
    pub structure: Structure,
    pub k: usize,
    pub weight_model: WeightKind,
    pub w_cap: Option<f64>,
    pub trials: usize,
    pub seed: u64,
    pub k_const: f64,
    pub c_q: f64,
    pub max_attempts: u32,
    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let recon = ReconConfig::default();
        Self {
            algorithm: Algorithm::LblR,
            n: vec![64],
            d_max: vec![4],
            alpha: vec![2.0],
            structure: Structure::Connected,
            k: 1,
            weight_model: WeightKind::Pareto,
            w_cap: None,
            trials: 1,
            seed: 1,
            k_const: recon.k_const,
            c_q: recon.c_q,
            max_attempts: recon.max_attempts,
            output: None,
        }
    }
}

impl ExperimentConfig {
    pub fn recon(&self) -> ReconConfig {
        ReconConfig {
            k_const: self.k_const,
            c_q: self.c_q,
            max_attempts: self.max_attempts,
            first_attempt_budget: None,
        }
    }

    /// Every sweep point, in `n`-major then `d_max`, `alpha` order.
    pub fn points(&self) -> Vec<TrialPoint> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &d in &self.d_max {
                for &alpha in &self.alpha {
                    out.push(TrialPoint {
                        algorithm: self.algorithm,
                        spec: InstanceSpec {
                            n,
                            d_max: d,
                            structure: self.structure,
                            k: self.k,
                            weight_model: self.weight_model,
                            alpha,
                            w_cap: self.w_cap,
                            seed: 0,
                        },
                        recon: self.recon(),
                    });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be positive".into()));
        }
        if self.n.is_empty() || self.d_max.is_empty() || self.alpha.is_empty() {
            return Err(HarnessError::Config("sweep lists must be non-empty".into()));
        }
        for p in self.points() {
            p.validate()?;
        }
        Ok(())
    }
}

/// One configuration point; the spec's seed is replaced per trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialPoint {
    pub algorithm: Algorithm,
    pub spec: InstanceSpec,
    pub recon: ReconConfig,
}

impl TrialPoint {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let spec = &self.spec;
        spec.weight_model().validate()?;
        if spec.n == 0 {
            return Err(HarnessError::Config("n must be positive".into()));
        }
        if self.algorithm == Algorithm::NtR {
            if spec.structure != Structure::Connected {
                return Err(HarnessError::Config("nt_r requires connected instances".into()));
            }
            let bound = match spec.weight_model {
                WeightKind::Fixed => spec.w_cap.unwrap_or(1.0),
                _ => spec.w_cap.ok_or_else(|| {
                    HarnessError::Config("nt_r requires a weight cap (w_cap) to bound W_max".into())
                })?,
            };
            BallParams::new(bound, spec.d_max, spec.n, self.recon.c_q)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        Ok(())
    }
}

/// One Monte-Carlo run. Serializes to the CSV columns
/// `trial,algo,n,m,dmax,alpha,seed,qw,qd,qc,total,attempts,break_iter,wmax,wstar,exact,ms`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub algo: Algorithm,
    pub n: usize,
    pub m: usize,
    pub dmax: usize,
    pub alpha: f64,
    pub seed: u64,
    pub qw: u64,
    pub qd: u64,
    pub qc: u64,
    pub total: u64,
    pub attempts: u32,
    pub break_iter: Option<usize>,
    pub wmax: f64,
    pub wstar: f64,
    pub exact: bool,
    pub ms: f64,
    #[serde(skip)]
    pub spec: InstanceSpec,
    #[serde(skip)]
    pub largest_per_iteration: Vec<usize>,
    #[serde(skip)]
    pub error: Option<String>,
}

impl TrialRecord {
    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &Self) -> bool {
        let mut a = self.clone();
        a.ms = other.ms;
        &a == other
    }
}

pub const CSV_HEADER: [&str; 17] = [
    "trial", "algo", "n", "m", "dmax", "alpha", "seed", "qw", "qd", "qc", "total", "attempts", "break_iter", "wmax",
    "wstar", "exact", "ms",
];

fn algorithm_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0x5851_F42D_4C95_7F2D)
}

pub fn truth_edges(g: &WeightedGraph) -> EdgeSet {
    g.edges().iter().map(|e| ((e.u, e.v), e.w)).collect()
}

/// Generates the instance for `seed`, runs the algorithm through a fresh
/// session and checks the result against ground truth.
pub fn run_trial(point: &TrialPoint, trial: usize, seed: u64) -> Result<TrialRecord, HarnessError> {
    point.validate()?;
    let spec = InstanceSpec {
        seed,
        ..point.spec.clone()
    };
    let g = gen::gen_graph(&spec)?;
    Ok(run_on_graph(point.algorithm, &g, &spec, &point.recon, trial))
}

/// Runs one algorithm on a given graph; `spec` is echoed into the record.
pub fn run_on_graph(algo: Algorithm, g: &WeightedGraph, spec: &InstanceSpec, recon: &ReconConfig, trial: usize) -> TrialRecord {
    let vertices: Vec<Vertex> = (0..g.n()).collect();
    let mut session = OracleSession::new(g);
    let mut rng = algorithm_rng(spec.seed);
    let start = Instant::now();
    let outcome = match algo {
        Algorithm::LblR => lbl_r(&mut session, &vertices, recon, &mut rng, &mut NoProbe)
            .map(|r| (r.edges, r.break_iteration, r.trace.iter().map(|t| t.largest_component()).collect()))
            .map_err(|e| e.to_string()),
        Algorithm::NtR => nt_r(&mut session, &vertices, recon, &mut rng, &mut NoProbe)
            .map(|r| (r.edges, None, vec![g.n()]))
            .map_err(|e| e.to_string()),
        Algorithm::Exhaustive => exhaustive_query(&mut session, &vertices, 1.0)
            .map(|e| (e, None, vec![]))
            .map_err(|e| e.to_string()),
    };
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let ledger = session.ledger();
    let (exact, break_iter, largest, error) = match outcome {
        Ok((edges, b, largest)) => (edges == truth_edges(g), b, largest, None),
        Err(e) => (false, None, Vec::new(), Some(e)),
    };
    TrialRecord {
        trial,
        algo,
        n: g.n(),
        m: g.m(),
        dmax: spec.d_max,
        alpha: spec.alpha,
        seed: spec.seed,
        qw: ledger.qw(),
        qd: ledger.qd(),
        qc: ledger.qc(),
        total: ledger.cumulative_total(),
        attempts: ledger.attempt_index(),
        break_iter,
        wmax: g.max_weight(),
        wstar: gen::critical_threshold(spec.d_max, spec.alpha),
        exact,
        ms: (ms * 1e3).round() / 1e3,
        spec: spec.clone(),
        largest_per_iteration: largest,
        error,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointSummary {
    pub algo: Algorithm,
    pub n: usize,
    pub dmax: usize,
    pub alpha: f64,
    pub trials: usize,
    pub median_total: f64,
    pub success_rate: f64,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub algo: Algorithm,
    pub dmax: usize,
    pub alpha: f64,
    /// Least-squares slope of `ln(median total)` against `ln(n)`.
    pub slope: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub rows: usize,
    pub points: Vec<PointSummary>,
    pub slopes: Vec<SlopeFit>,
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Log-log slope of median total queries against `n`.
pub fn loglog_slope(medians: &[(usize, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = medians.iter().map(|&(n, q)| ((n as f64).ln(), q.ln())).collect();
    ls_slope(&pts)
}

pub fn summarize(records: &[TrialRecord]) -> ExperimentSummary {
    let mut keys: Vec<(Algorithm, usize, usize, u64)> = Vec::new();
    for r in records {
        let key = (r.algo, r.n, r.dmax, r.alpha.to_bits());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let points: Vec<PointSummary> = keys
        .iter()
        .map(|&(algo, n, dmax, abits)| {
            let rows: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.algo == algo && r.n == n && r.dmax == dmax && r.alpha.to_bits() == abits)
                .collect();
            let mut totals: Vec<f64> = rows.iter().map(|r| r.total as f64).collect();
            let ok = rows.iter().filter(|r| r.exact).count();
            PointSummary {
                algo,
                n,
                dmax,
                alpha: f64::from_bits(abits),
                trials: rows.len(),
                median_total: median(&mut totals),
                success_rate: ok as f64 / rows.len() as f64,
                failures: rows.len() - ok,
            }
        })
        .collect();

    let mut slopes = Vec::new();
    let mut groups: Vec<(Algorithm, usize, u64)> = Vec::new();
    for p in &points {
        let g = (p.algo, p.dmax, p.alpha.to_bits());
        if !groups.contains(&g) {
            groups.push(g);
        }
    }
    for (algo, dmax, abits) in groups {
        let meds: Vec<(usize, f64)> = points
            .iter()
            .filter(|p| p.algo == algo && p.dmax == dmax && p.alpha.to_bits() == abits)
            .map(|p| (p.n, p.median_total))
            .collect();
        if meds.len() >= 2 {
            slopes.push(SlopeFit {
                algo,
                dmax,
                alpha: f64::from_bits(abits),
                slope: loglog_slope(&meds),
                points: meds.len(),
            });
        }
    }
    ExperimentSummary {
        rows: records.len(),
        points,
        slopes,
    }
}

pub fn write_csv<W: std::io::Write>(out: W, records: &[TrialRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    if records.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs every trial of the sweep. Trial `i` uses seed `config.seed + i`.
/// Failed trials are kept as rows with `exact = false`.
pub fn run_experiment(config: &ExperimentConfig) -> Result<(Vec<TrialRecord>, ExperimentSummary), HarnessError> {
    config.validate()?;
    let mut records = Vec::new();
    let mut index = 0;
    for point in config.points() {
        for _ in 0..config.trials {
            let seed = config.seed.wrapping_add(index as u64);
            records.push(run_trial(&point, index, seed)?);
            index += 1;
        }
    }
    if let Some(path) = &config.output {
        write_csv(std::fs::File::create(path)?, &records)?;
    }
    let summary = summarize(&records);
    Ok((records, summary))
}

/// Result of comparing a triangle `ab = 1, bc = 1` with and without the
/// transitive edge `ac = 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QdDemoReport {
    /// `(threshold, complete q_d tables equal)` for each threshold probed.
    pub tables_equal: Vec<(f64, bool)>,
    pub distance_tables_agree_at_one: bool,
    pub qw_ac_with_edge: f64,
    pub qw_ac_without_edge: f64,
    pub ac_is_transitive: bool,
    pub distinguished_by_qw: bool,
}

pub fn qd_indistinguishability_demo() -> QdDemoReport {
    let without = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0)]).expect("valid triangle");
    let with = WeightedGraph::new(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)]).expect("valid triangle");
    let all = [0, 1, 2];
    let table = |g: &WeightedGraph, thr: f64| {
        let mut s = OracleSession::new(g);
        s.batch_query(PairQuery::Distance, &all, &all, thr)
            .expect("unbudgeted query")
            .values
    };
    let same = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits());
    let tables_equal: Vec<(f64, bool)> = [1.0, 2.0]
        .into_iter()
        .map(|thr| (thr, same(&table(&with, thr), &table(&without, thr))))
        .collect();
    let qw_ac_with_edge = OracleSession::new(&with).q_w(0, 2, 1.0).expect("valid pair");
    let qw_ac_without_edge = OracleSession::new(&without).q_w(0, 2, 1.0).expect("valid pair");
    QdDemoReport {
        distance_tables_agree_at_one: tables_equal[0].1,
        tables_equal,
        qw_ac_with_edge,
        qw_ac_without_edge,
        ac_is_transitive: graph::is_transitive_edge(&with, 0, 2).expect("ac is an edge"),
        distinguished_by_qw: qw_ac_with_edge != qw_ac_without_edge,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WmaxReport {
    pub m: usize,
    pub alpha: f64,
    pub d: usize,
    pub c: f64,
    pub wstar: f64,
    pub trials: usize,
    pub exceed_rate: f64,
}

/// Empirical `P(W_max > c w*)` over `m` i.i.d. Pareto weights.
pub fn wmax_tail(m: usize, alpha: f64, d: usize, c: f64, trials: usize, seed: u64) -> WmaxReport {
    let wstar = gen::critical_threshold(d, alpha);
    let bar = c * wstar;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..trials)
        .filter(|_| (0..m).map(|_| gen::pareto_sample(alpha, &mut rng)).fold(1.0, f64::max) > bar)
        .count();
    WmaxReport {
        m,
        alpha,
        d,
        c,
        wstar,
        trials,
        exceed_rate: hits as f64 / trials as f64,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LargestComponentReport {
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    /// Layer threshold with `D * P(w >= thr)` equal to the target.
    pub threshold: f64,
    pub layer_probability: f64,
    pub bound: f64,
    pub sizes: Vec<usize>,
    pub within_rate: f64,
}

/// Largest component of the layer where `D p = target_dp`, against
/// `factor * ln n`.
pub fn largest_component_stats(
    n: usize,
    d: usize,
    alpha: f64,
    target_dp: f64,
    factor: f64,
    trials: usize,
    seed: u64,
) -> Result<LargestComponentReport, HarnessError> {
    let p = target_dp / d as f64;
    let threshold = p.powf(-1.0 / alpha);
    let bound = factor * (n as f64).ln();
    let mut sizes = Vec::with_capacity(trials);
    for t in 0..trials {
        let g = gen::gen_graph(&InstanceSpec::connected(n, d, alpha, seed.wrapping_add(t as u64)))?;
        let view = graph::layer(&g, threshold).expect("threshold above 1");
        sizes.push(graph::components(&view).iter().map(Vec::len).max().unwrap_or(0));
    }
    let within = sizes.iter().filter(|&&s| s as f64 <= bound).count();
    Ok(LargestComponentReport {
        n,
        d,
        alpha,
        threshold,
        layer_probability: p,
        bound,
        within_rate: within as f64 / trials as f64,
        sizes,
    })
}

/// Break iteration of the layered loop computed straight from the hidden
/// graph (first `j` whose layer `2^j` has only components of at most
/// `ceil(n^(1/4))` vertices, searched up to `floor(log2 W_max)`).
pub fn predicted_break_iteration(g: &WeightedGraph) -> Option<usize> {
    let cutoff = size_cutoff(g.n());
    (0..=top_iteration(g.max_weight())).find(|&j| {
        let view = graph::layer(g, 2f64.powi(j as i32)).expect("threshold >= 1");
        graph::components(&view).iter().all(|c| c.len() <= cutoff)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EarlyTerminationRow {
    pub seed: u64,
    pub break_iteration: Option<usize>,
    pub top_iteration: usize,
    pub wmax: f64,
    pub exact: Option<bool>,
    pub total: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EarlyTerminationReport {
    pub n: usize,
    pub d: usize,
    pub alpha: f64,
    pub rows: Vec<EarlyTerminationRow>,
    /// Fraction of runs with `break_iteration < floor(log2 W_max)`.
    pub early_rate: f64,
    /// `(break iteration, count)`; `None` counts runs that never broke.
    pub histogram: Vec<(Option<usize>, usize)>,
}

/// Distribution of the break iteration. With `run_lbl_r` every trial runs
/// the full reconstruction through an oracle; otherwise the break iteration
/// is read from the hidden graph's layers directly.
pub fn early_termination_stats(
    n: usize,
    d: usize,
    alpha: f64,
    trials: usize,
    seed: u64,
    run_lbl_r: Option<&ReconConfig>,
) -> Result<EarlyTerminationReport, HarnessError> {
    let mut rows = Vec::with_capacity(trials);
    for t in 0..trials {
        let spec = InstanceSpec::connected(n, d, alpha, seed.wrapping_add(t as u64));
        let g = gen::gen_graph(&spec)?;
        let row = match run_lbl_r {
            Some(cfg) => {
                let rec = run_on_graph(Algorithm::LblR, &g, &spec, cfg, t);
                EarlyTerminationRow {
                    seed: spec.seed,
                    break_iteration: rec.break_iter,
                    top_iteration: top_iteration(rec.wmax),
                    wmax: rec.wmax,
                    exact: Some(rec.exact),
                    total: Some(rec.total),
                }
            }
            None => EarlyTerminationRow {
                seed: spec.seed,
                break_iteration: predicted_break_iteration(&g),
                top_iteration: top_iteration(g.max_weight()),
                wmax: g.max_weight(),
                exact: None,
                total: None,
            },
        };
        rows.push(row);
    }
    let early = rows
        .iter()
        .filter(|r| r.break_iteration.is_some_and(|b| b < r.top_iteration))
        .count();
    let mut histogram: Vec<(Option<usize>, usize)> = Vec::new();
    for r in &rows {
        match histogram.iter_mut().find(|(b, _)| *b == r.break_iteration) {
            Some(entry) => entry.1 += 1,
            None => histogram.push((r.break_iteration, 1)),
        }
    }
    histogram.sort();
    Ok(EarlyTerminationReport {
        n,
        d,
        alpha,
        early_rate: early as f64 / trials as f64,
        rows,
        histogram,
    })
}

/// Which lemma statistic to compute.
#[derive(Debug, Clone, PartialEq)]
pub enum LemmaKind {
    Wmax { m: usize, alpha: f64, d: usize, c: f64 },
    LargestComponent { n: usize, d: usize, alpha: f64, target_dp: f64 },
    EarlyTermination { n: usize, d: usize, alpha: f64, run_lbl_r: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LemmaReport {
    Wmax(WmaxReport),
    LargestComponent(LargestComponentReport),
    EarlyTermination(EarlyTerminationReport),
}

impl LemmaReport {
    /// Whether the statistic meets its calibrated threshold.
    pub fn passes(&self) -> bool {
        match self {
            LemmaReport::Wmax(r) => r.exceed_rate >= WMAX_MIN_RATE,
            LemmaReport::LargestComponent(r) => r.within_rate >= LARGEST_COMPONENT_MIN_RATE,
            LemmaReport::EarlyTermination(r) => r.early_rate >= EARLY_TERMINATION_MIN_RATE,
        }
    }
}

pub fn lemma_stats(kind: &LemmaKind, trials: usize, seed: u64) -> Result<LemmaReport, HarnessError> {
    if trials == 0 {
        return Err(HarnessError::Config("trials must be positive".into()));
    }
    Ok(match *kind {
        LemmaKind::Wmax { m, alpha, d, c } => LemmaReport::Wmax(wmax_tail(m, alpha, d, c, trials, seed)),
        LemmaKind::LargestComponent { n, d, alpha, target_dp } => LemmaReport::LargestComponent(
            largest_component_stats(n, d, alpha, target_dp, LARGEST_COMPONENT_FACTOR, trials, seed)?,
        ),
        LemmaKind::EarlyTermination { n, d, alpha, run_lbl_r } => {
            let cfg = ReconConfig::default();
            LemmaReport::EarlyTermination(early_termination_stats(
                n,
                d,
                alpha,
                trials,
                seed,
                run_lbl_r.then_some(&cfg),
            )?)
        }
    })
}

/// Uniform draw used by tests that need a free-standing seed stream.
pub fn seed_stream(seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random()).collect()
}
