//! The query oracle: thresholded edge-weight, distance and component queries
//! over a hidden graph, with exact per-type accounting and optional budgets.
//!
//! Every issued query is charged, including repeats, unless the optional
//! memo flag is switched on. Truth values come from the engines in
//! [`crate::graph`]; per-source distance rows are cached internally, which
//! never changes what is charged.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Write;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{self, Vertex, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum QueryKind {
    #[serde(rename = "qw")]
    Weight,
    #[serde(rename = "qd")]
    Distance,
    #[serde(rename = "qc")]
    Component,
}

impl QueryKind {
    pub fn tag(self) -> &'static str {
        match self {
            QueryKind::Weight => "qw",
            QueryKind::Distance => "qd",
            QueryKind::Component => "qc",
        }
    }

    fn slot(self) -> usize {
        match self {
            QueryKind::Weight => 0,
            QueryKind::Distance => 1,
            QueryKind::Component => 2,
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Pair queries that can be issued over a Cartesian product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairQuery {
    Weight,
    Distance,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("query pair ({0},{0}) is not a valid edge-weight query")]
    InvalidPair(Vertex),
    #[error("component query vertex {0} is a member of the query set")]
    InvalidSet(Vertex),
    #[error("vertex {0} out of range")]
    InvalidVertex(Vertex),
    #[error("threshold {0} is below 1")]
    InvalidThreshold(f64),
    #[error("query budget of {budget} exhausted (attempt total {spent}, requested {requested})")]
    BudgetExhausted { budget: u64, spent: u64, requested: u64 },
    #[error("trace log write failed: {0}")]
    Trace(String),
}

/// Exact query counters.
///
/// `attempt_total` counts the queries of the current budget window; the
/// window is closed whenever a reconstruction attempt restarts or a new
/// budgeted call begins.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QueryLedger {
    counts: [u64; 3],
    attempt_total: u64,
    cumulative_total: u64,
    closed_total: u64,
    attempt_index: u32,
}

impl Default for QueryLedger {
    fn default() -> Self {
        Self {
            counts: [0; 3],
            attempt_total: 0,
            cumulative_total: 0,
            closed_total: 0,
            attempt_index: 1,
        }
    }
}

impl QueryLedger {
    pub fn count(&self, kind: QueryKind) -> u64 {
        self.counts[kind.slot()]
    }

    pub fn qw(&self) -> u64 {
        self.count(QueryKind::Weight)
    }

    pub fn qd(&self) -> u64 {
        self.count(QueryKind::Distance)
    }

    pub fn qc(&self) -> u64 {
        self.count(QueryKind::Component)
    }

    pub fn attempt_total(&self) -> u64 {
        self.attempt_total
    }

    pub fn cumulative_total(&self) -> u64 {
        self.cumulative_total
    }

    /// Sum of the totals of every window closed so far.
    pub fn closed_total(&self) -> u64 {
        self.closed_total
    }

    /// 1 + number of restarts recorded.
    pub fn attempt_index(&self) -> u32 {
        self.attempt_index
    }

    fn add(&mut self, kind: QueryKind, k: u64) {
        self.counts[kind.slot()] += k;
        self.attempt_total += k;
        self.cumulative_total += k;
    }

    /// Closes the current window for a restart.
    pub fn reset_attempt(&mut self) {
        self.close_window();
        self.attempt_index += 1;
    }

    /// Closes the current window without counting a restart.
    pub fn close_window(&mut self) {
        self.closed_total += self.attempt_total;
        self.attempt_total = 0;
    }
}

/// Row-major `rows x cols` answers of a batch query.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchTable {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f64>,
}

impl BatchTable {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }
}

/// Shadow-check counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ShadowReport {
    pub checked: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<String>,
}

// Second, independent truth engine: Floyd-Warshall, union-find and a hash map
// of edge weights. Distances are compared to a relative 1e-12 because the two
// engines associate the same path sums differently.
struct Shadow {
    threshold_bits: Option<u64>,
    apsp: Vec<f64>,
    uf: Vec<usize>,
    weights: HashMap<(Vertex, Vertex), f64>,
    report: ShadowReport,
}

impl Shadow {
    fn new(g: &WeightedGraph) -> Self {
        Self {
            threshold_bits: None,
            apsp: Vec::new(),
            uf: Vec::new(),
            weights: g.edges().iter().map(|e| ((e.u, e.v), e.w)).collect(),
            report: ShadowReport::default(),
        }
    }

    fn prepare(&mut self, g: &WeightedGraph, thr: f64) {
        if self.threshold_bits != Some(thr.to_bits()) {
            let view = graph::layer(g, thr).expect("threshold validated");
            self.apsp = graph::all_pairs_distances(&view);
            self.uf = graph::union_find_labels(&view);
            self.threshold_bits = Some(thr.to_bits());
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.report.checked += 1;
        if !ok {
            self.report.mismatches += 1;
            if self.report.first_mismatch.is_none() {
                self.report.first_mismatch = Some(what());
            }
        }
    }

    fn check_weight(&mut self, g: &WeightedGraph, u: Vertex, v: Vertex, thr: f64, got: f64) {
        self.prepare(g, thr);
        let key = (u.min(v), u.max(v));
        let want = match self.weights.get(&key) {
            Some(&w) if w >= thr => w,
            _ => 0.0,
        };
        self.record(want.to_bits() == got.to_bits(), || {
            format!("qw {u} {v} {thr}: oracle {got}, shadow {want}")
        });
    }

    fn check_distance(&mut self, g: &WeightedGraph, u: Vertex, v: Vertex, thr: f64, got: f64) {
        self.prepare(g, thr);
        let want = self.apsp[u * g.n() + v];
        let ok = if want.is_infinite() || got.is_infinite() {
            want == got
        } else {
            (want - got).abs() <= 1e-12 * want.abs().max(1.0)
        };
        self.record(ok, || format!("qd {u} {v} {thr}: oracle {got}, shadow {want}"));
    }

    fn check_component(&mut self, g: &WeightedGraph, u: Vertex, set: &[Vertex], thr: f64, got: bool) {
        self.prepare(g, thr);
        let want = set.iter().any(|&s| self.uf[s] == self.uf[u]);
        self.record(want == got, || {
            format!("qc {u} |S|={} {thr}: oracle {got}, shadow {want}", set.len())
        });
    }
}

const ROW_CACHE_BYTES: usize = 1 << 30;

struct RowCache {
    threshold_bits: Option<u64>,
    rows: Vec<Option<Box<[f64]>>>,
    held: usize,
    cap: usize,
}

impl RowCache {
    fn new(n: usize) -> Self {
        Self {
            threshold_bits: None,
            rows: vec![None; n],
            held: 0,
            cap: (ROW_CACHE_BYTES / 8 / n.max(1)).max(16),
        }
    }

    fn ensure(&mut self, g: &WeightedGraph, src: Vertex, thr: f64) {
        if self.threshold_bits != Some(thr.to_bits()) {
            self.rows.iter_mut().for_each(|r| *r = None);
            self.held = 0;
            self.threshold_bits = Some(thr.to_bits());
        }
        if self.rows[src].is_none() {
            if self.held >= self.cap {
                self.rows.iter_mut().for_each(|r| *r = None);
                self.held = 0;
            }
            let view = graph::layer(g, thr).expect("threshold validated");
            self.rows[src] = Some(graph::dijkstra(&view, src).into_boxed_slice());
            self.held += 1;
        }
    }

    fn row(&self, src: Vertex) -> &[f64] {
        self.rows[src].as_deref().expect("row ensured")
    }
}

/// One algorithm run's view of a hidden graph.
///
/// Not shared between callers; independent sessions may run side by side.
pub struct OracleSession<'g> {
    hidden: &'g WeightedGraph,
    ledger: QueryLedger,
    budget: Option<u64>,
    announced_wmax: f64,
    announced_dmax: usize,
    memo: Option<HashSet<(QueryKind, Vertex, Vertex, u64)>>,
    rows: RowCache,
    labels: Option<(u64, Vec<usize>)>,
    trace: Option<Box<dyn Write + 'g>>,
    shadow: Option<Shadow>,
}

impl<'g> OracleSession<'g> {
    pub fn new(hidden: &'g WeightedGraph) -> Self {
        Self {
            hidden,
            ledger: QueryLedger::default(),
            budget: None,
            announced_wmax: hidden.max_weight(),
            announced_dmax: hidden.max_degree(),
            memo: None,
            rows: RowCache::new(hidden.n()),
            labels: None,
            trace: None,
            shadow: None,
        }
    }

    /// Cross-check every answer against an independent all-pairs engine.
    /// Costs `O(n^3)` per distinct threshold, so keep it to small graphs.
    pub fn with_shadow(mut self) -> Self {
        self.shadow = Some(Shadow::new(self.hidden));
        self
    }

    /// Repeated identical `q_w`/`q_d` queries are answered for free.
    /// Comparison experiments only; off by default.
    pub fn with_memo(mut self) -> Self {
        self.memo = Some(HashSet::new());
        self
    }

    /// Log one line per query: `type u v thr result` (`q_c` logs `|S|` for `v`).
    pub fn with_trace(mut self, sink: impl Write + 'g) -> Self {
        self.trace = Some(Box::new(sink));
        self
    }

    pub fn n(&self) -> usize {
        self.hidden.n()
    }

    pub fn announced_wmax(&self) -> f64 {
        self.announced_wmax
    }

    pub fn announced_max_degree(&self) -> usize {
        self.announced_dmax
    }

    pub fn ledger(&self) -> &QueryLedger {
        &self.ledger
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    /// Sets the per-attempt budget and opens a fresh window.
    pub fn set_budget(&mut self, budget: Option<u64>) {
        self.ledger.close_window();
        self.budget = budget;
    }

    pub fn reset_attempt(&mut self) {
        self.ledger.reset_attempt();
    }

    pub fn shadow_report(&self) -> Option<&ShadowReport> {
        self.shadow.as_ref().map(|s| &s.report)
    }

    fn check(&self, v: Vertex) -> Result<(), OracleError> {
        if v < self.hidden.n() {
            Ok(())
        } else {
            Err(OracleError::InvalidVertex(v))
        }
    }

    fn check_thr(thr: f64) -> Result<(), OracleError> {
        if thr >= 1.0 {
            Ok(())
        } else {
            Err(OracleError::InvalidThreshold(thr))
        }
    }

    fn charge(&mut self, kind: QueryKind, k: u64) -> Result<(), OracleError> {
        if let Some(budget) = self.budget {
            let spent = self.ledger.attempt_total();
            if spent + k > budget {
                return Err(OracleError::BudgetExhausted {
                    budget,
                    spent,
                    requested: k,
                });
            }
        }
        self.ledger.add(kind, k);
        Ok(())
    }

    // Charges a single pair query unless the memo already holds it.
    fn charge_pair(&mut self, kind: QueryKind, u: Vertex, v: Vertex, thr: f64) -> Result<(), OracleError> {
        let key = (kind, u.min(v), u.max(v), thr.to_bits());
        if self.memo.as_ref().is_some_and(|m| m.contains(&key)) {
            return Ok(());
        }
        self.charge(kind, 1)?;
        if let Some(m) = &mut self.memo {
            m.insert(key);
        }
        Ok(())
    }

    fn log(&mut self, kind: QueryKind, u: Vertex, v: usize, thr: f64, result: f64) -> Result<(), OracleError> {
        if let Some(out) = &mut self.trace {
            writeln!(out, "{kind} {u} {v} {thr} {result}").map_err(|e| OracleError::Trace(e.to_string()))?;
        }
        Ok(())
    }

    fn weight_truth(&self, u: Vertex, v: Vertex, thr: f64) -> f64 {
        match self.hidden.weight(u, v) {
            Some(w) if w >= thr => w,
            _ => 0.0,
        }
    }

    /// Weight of edge `uv` in `G[w >= thr]`, or 0 when absent.
    pub fn q_w(&mut self, u: Vertex, v: Vertex, thr: f64) -> Result<f64, OracleError> {
        self.check(u)?;
        self.check(v)?;
        Self::check_thr(thr)?;
        if u == v {
            return Err(OracleError::InvalidPair(u));
        }
        self.charge_pair(QueryKind::Weight, u, v, thr)?;
        let w = self.weight_truth(u, v, thr);
        if let Some(sh) = &mut self.shadow {
            sh.check_weight(self.hidden, u, v, thr, w);
        }
        self.log(QueryKind::Weight, u, v, thr, w)?;
        Ok(w)
    }

    /// Shortest weighted distance in `G[w >= thr]`, `+inf` if disconnected.
    pub fn q_d(&mut self, u: Vertex, v: Vertex, thr: f64) -> Result<f64, OracleError> {
        self.check(u)?;
        self.check(v)?;
        Self::check_thr(thr)?;
        self.charge_pair(QueryKind::Distance, u, v, thr)?;
        self.rows.ensure(self.hidden, u, thr);
        let d = self.rows.row(u)[v];
        if let Some(sh) = &mut self.shadow {
            sh.check_distance(self.hidden, u, v, thr, d);
        }
        self.log(QueryKind::Distance, u, v, thr, d)?;
        Ok(d)
    }

    /// True iff some member of `set` shares `u`'s component in `G[w >= thr]`.
    /// One query regardless of `|set|`.
    pub fn q_c<I>(&mut self, u: Vertex, set: I, thr: f64) -> Result<bool, OracleError>
    where
        I: IntoIterator<Item = Vertex>,
        I::IntoIter: Clone,
    {
        self.check(u)?;
        Self::check_thr(thr)?;
        let iter = set.into_iter();
        let mut size = 0usize;
        for s in iter.clone() {
            self.check(s)?;
            if s == u {
                return Err(OracleError::InvalidSet(u));
            }
            size += 1;
        }
        self.charge(QueryKind::Component, 1)?;
        let bits = thr.to_bits();
        if self.labels.as_ref().map(|(b, _)| *b) != Some(bits) {
            let view = graph::layer(self.hidden, thr).expect("threshold validated");
            self.labels = Some((bits, graph::component_labels(&view)));
        }
        let labels = &self.labels.as_ref().expect("labels computed").1;
        let answer = iter.clone().any(|s| labels[s] == labels[u]);
        if let Some(sh) = &mut self.shadow {
            let members: Vec<Vertex> = iter.collect();
            sh.check_component(self.hidden, u, &members, thr, answer);
        }
        self.log(QueryKind::Component, u, size, thr, if answer { 1.0 } else { 0.0 })?;
        Ok(answer)
    }

    /// Runs `kind` over every pair of `a x b`. Identical pairs are skipped
    /// (and uncharged) for edge-weight queries and report 0.
    ///
    /// The whole batch is checked against the budget before anything is
    /// answered; an exhausted budget aborts it uncharged.
    pub fn batch_query(&mut self, kind: PairQuery, a: &[Vertex], b: &[Vertex], thr: f64) -> Result<BatchTable, OracleError> {
        Self::check_thr(thr)?;
        for &v in a.iter().chain(b) {
            self.check(v)?;
        }
        let qkind = match kind {
            PairQuery::Weight => QueryKind::Weight,
            PairQuery::Distance => QueryKind::Distance,
        };
        let mut charged = 0u64;
        if self.memo.is_some() {
            let mut fresh = HashSet::new();
            let seen = self.memo.as_ref().expect("memo on");
            for &x in a {
                for &y in b {
                    if kind == PairQuery::Weight && x == y {
                        continue;
                    }
                    let key = (qkind, x.min(y), x.max(y), thr.to_bits());
                    if !seen.contains(&key) && fresh.insert(key) {
                        charged += 1;
                    }
                }
            }
            self.charge(qkind, charged)?;
            self.memo.as_mut().expect("memo on").extend(fresh);
        } else {
            charged = match kind {
                PairQuery::Distance => (a.len() * b.len()) as u64,
                PairQuery::Weight => {
                    let mut in_b: HashMap<Vertex, usize> = HashMap::new();
                    for &y in b {
                        *in_b.entry(y).or_default() += 1;
                    }
                    let same: usize = a.iter().map(|x| in_b.get(x).copied().unwrap_or(0)).sum();
                    (a.len() * b.len() - same) as u64
                }
            };
            self.charge(qkind, charged)?;
        }

        let mut values = vec![0.0; a.len() * b.len()];
        match kind {
            PairQuery::Weight => {
                for (i, &x) in a.iter().enumerate() {
                    for (j, &y) in b.iter().enumerate() {
                        if x != y {
                            values[i * b.len() + j] = self.weight_truth(x, y, thr);
                        }
                    }
                }
            }
            PairQuery::Distance => {
                if a.len() <= b.len() {
                    for (i, &x) in a.iter().enumerate() {
                        self.rows.ensure(self.hidden, x, thr);
                        let row = self.rows.row(x);
                        for (j, &y) in b.iter().enumerate() {
                            values[i * b.len() + j] = row[y];
                        }
                    }
                } else {
                    for (j, &y) in b.iter().enumerate() {
                        self.rows.ensure(self.hidden, y, thr);
                        let row = self.rows.row(y);
                        for (i, &x) in a.iter().enumerate() {
                            values[i * b.len() + j] = row[x];
                        }
                    }
                }
            }
        }

        if self.shadow.is_some() || self.trace.is_some() {
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    if kind == PairQuery::Weight && x == y {
                        continue;
                    }
                    let val = values[i * b.len() + j];
                    if let Some(sh) = &mut self.shadow {
                        match kind {
                            PairQuery::Weight => sh.check_weight(self.hidden, x, y, thr, val),
                            PairQuery::Distance => sh.check_distance(self.hidden, x, y, thr, val),
                        }
                    }
                    self.log(qkind, x, y, thr, val)?;
                }
            }
        }
        Ok(BatchTable {
            rows: a.len(),
            cols: b.len(),
            values,
        })
    }
}
