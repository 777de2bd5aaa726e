#![allow(dead_code)]

use std::collections::HashSet;

use graph_recon::graph::{Vertex, WeightedGraph};
use graph_recon::recon::{CellCover, CentersState, EdgeSet, Probe};

pub fn truth(g: &WeightedGraph) -> EdgeSet {
    g.edges().iter().map(|e| ((e.u, e.v), e.w)).collect()
}

/// Checks every reconstruction pass against the hidden graph:
/// edges of the pass's component with weight in `[thr, 2 thr)` must be in its
/// output, and (when `track_cover`) every layer edge of the component must
/// have both endpoints in some extended cell.
pub struct CoverageProbe<'g> {
    g: &'g WeightedGraph,
    track_cover: bool,
    covered: HashSet<(Vertex, Vertex)>,
    pub passes: usize,
    pub largest_neighborhood: usize,
    pub band_edges_checked: usize,
    pub violations: Vec<String>,
    pub uncovered: Vec<String>,
}

impl<'g> CoverageProbe<'g> {
    pub fn new(g: &'g WeightedGraph, track_cover: bool) -> Self {
        Self {
            g,
            track_cover,
            covered: HashSet::new(),
            passes: 0,
            largest_neighborhood: 0,
            band_edges_checked: 0,
            violations: Vec::new(),
            uncovered: Vec::new(),
        }
    }

    fn component_edges(&self, vertices: &[Vertex], thr: f64) -> Vec<(Vertex, Vertex, f64)> {
        let inside: HashSet<Vertex> = vertices.iter().copied().collect();
        self.g
            .edges()
            .iter()
            .filter(|e| e.w >= thr && inside.contains(&e.u) && inside.contains(&e.v))
            .map(|e| (e.u, e.v, e.w))
            .collect()
    }
}

impl Probe for CoverageProbe<'_> {
    fn centers_chosen(&mut self, _vertices: &[Vertex], _thr: f64, _state: &CentersState) {
        self.covered.clear();
    }

    fn wants_cells(&self) -> bool {
        self.track_cover
    }

    fn cell(&mut self, _vertices: &[Vertex], _thr: f64, cover: &CellCover) {
        self.largest_neighborhood = self.largest_neighborhood.max(cover.neighborhood.len());
        let ext: HashSet<Vertex> = cover.extended.iter().copied().collect();
        for e in self.g.edges() {
            if ext.contains(&e.u) && ext.contains(&e.v) {
                self.covered.insert((e.u, e.v));
            }
        }
    }

    fn sub_output(&mut self, vertices: &[Vertex], thr: f64, edges: &EdgeSet) {
        self.passes += 1;
        for (u, v, w) in self.component_edges(vertices, thr) {
            if w < 2.0 * thr {
                self.band_edges_checked += 1;
                if edges.get(&(u, v)) != Some(&w) {
                    self.violations.push(format!("edge ({u},{v},{w}) missing at threshold {thr}"));
                }
            }
            if self.track_cover && !self.covered.contains(&(u, v)) {
                self.uncovered.push(format!("edge ({u},{v},{w}) in no extended cell at threshold {thr}"));
            }
        }
    }
}

/// Minimum weight over all simple paths in `G[w >= thr]`, by enumeration.
pub fn path_enumeration_distance(g: &WeightedGraph, s: Vertex, t: Vertex, thr: f64) -> f64 {
    fn go(g: &WeightedGraph, at: Vertex, t: Vertex, thr: f64, seen: &mut Vec<bool>, len: f64, best: &mut f64) {
        if at == t {
            *best = best.min(len);
            return;
        }
        for &(x, w) in g.neighbors(at) {
            if w >= thr && !seen[x] {
                seen[x] = true;
                go(g, x, t, thr, seen, len + w, best);
                seen[x] = false;
            }
        }
    }
    let mut seen = vec![false; g.n()];
    seen[s] = true;
    let mut best = f64::INFINITY;
    go(g, s, t, thr, &mut seen, 0.0, &mut best);
    best
}

/// Reflexive-transitive closure of `G[w >= thr]` as a boolean matrix.
pub fn transitive_closure(g: &WeightedGraph, thr: f64) -> Vec<Vec<bool>> {
    let n = g.n();
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for e in g.edges().iter().filter(|e| e.w >= thr) {
        r[e.u][e.v] = true;
        r[e.v][e.u] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Thresholds worth probing on `g`: 1, every distinct weight, and just above the maximum.
pub fn probe_thresholds(g: &WeightedGraph) -> Vec<f64> {
    let mut t: Vec<f64> = g.edges().iter().map(|e| e.w).collect();
    t.push(1.0);
    t.push(g.max_weight() + 0.5);
    t.sort_by(f64::total_cmp);
    t.dedup();
    t
}

#[derive(Debug, Default)]
pub struct SweepReport {
    pub graphs: usize,
    pub queries: u64,
    pub mismatches: Vec<String>,
}

fn close(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        a == b
    } else {
        (a - b).abs() <= 1e-12 * a.abs().max(1.0)
    }
}

/// Compares every oracle answer on `g` with path enumeration, transitive
/// closure and the raw edge list.
pub fn check_small_graph(g: &WeightedGraph, report: &mut SweepReport) {
    use graph_recon::oracle::OracleSession;
    let n = g.n();
    let mut s = OracleSession::new(g);
    report.graphs += 1;
    for thr in probe_thresholds(g) {
        let closure = transitive_closure(g, thr);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    let want = g.weight(u, v).filter(|&w| w >= thr).unwrap_or(0.0);
                    let got = s.q_w(u, v, thr).unwrap();
                    if got != want {
                        report.mismatches.push(format!("qw {u} {v} {thr}: {got} vs {want}"));
                    }
                    let got = s.q_c(u, [v], thr).unwrap();
                    if got != closure[u][v] {
                        report.mismatches.push(format!("qc {u} {{{v}}} {thr}: {got}"));
                    }
                }
                let want = path_enumeration_distance(g, u, v, thr);
                let got = s.q_d(u, v, thr).unwrap();
                if !close(got, want) {
                    report.mismatches.push(format!("qd {u} {v} {thr}: {got} vs {want}"));
                }
            }
            // every subset of the other vertices
            let others: Vec<Vertex> = (0..n).filter(|&x| x != u).collect();
            for mask in 1u32..(1 << others.len()) {
                let set: Vec<Vertex> = others
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect();
                let want = set.iter().any(|&x| closure[u][x]);
                if s.q_c(u, set.iter().copied(), thr).unwrap() != want {
                    report.mismatches.push(format!("qc {u} {set:?} {thr}"));
                }
            }
        }
    }
    report.queries += s.ledger().cumulative_total();
}

/// Every graph on up to 4 vertices with weights from {1, 2, 3}, plus seeded
/// random graphs on 5 to 7 vertices.
pub fn small_graph_sweep(random_per_size: usize) -> SweepReport {
    use rand::{Rng, SeedableRng};
    let mut report = SweepReport::default();
    for n in 1..=4usize {
        let pairs: Vec<(Vertex, Vertex)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let combos = 4usize.pow(pairs.len() as u32);
        for code in 0..combos {
            let mut c = code;
            let mut edges = Vec::new();
            for &(u, v) in &pairs {
                let w = c % 4;
                c /= 4;
                if w > 0 {
                    edges.push((u, v, w as f64));
                }
            }
            check_small_graph(&WeightedGraph::new(n, edges).unwrap(), &mut report);
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for n in 5..=7usize {
        for _ in 0..random_per_size {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random::<f64>() < 0.45 {
                        let w = if rng.random::<bool>() {
                            rng.random_range(1..5) as f64
                        } else {
                            1.0 + 3.0 * rng.random::<f64>()
                        };
                        edges.push((u, v, w));
                    }
                }
            }
            check_small_graph(&WeightedGraph::new(n, edges).unwrap(), &mut report);
        }
    }
    report
}
