//! Ground-truth weighted graphs, threshold layers and the exact engines
//! (shortest paths, components) that back the oracle.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {0} out of range for graph with {1} vertices")]
    InvalidVertex(Vertex, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(Vertex, Vertex),
    #[error("edge ({0},{1}) has weight {2}; weights must be >= 1")]
    InvalidWeight(Vertex, Vertex, f64),
    #[error("threshold {0} is below 1")]
    InvalidThreshold(f64),
    #[error("({0},{1}) is not an edge")]
    NotAnEdge(Vertex, Vertex),
    #[error("malformed graph text at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An undirected edge stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub w: f64,
}

/// Undirected weighted graph on the dense vertex ids `0..n`.
///
/// Every weight is at least 1; there are no self-loops and no parallel edges.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adj: Vec<Vec<(Vertex, f64)>>,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex, f64)>,
    {
        let mut adj: Vec<Vec<(Vertex, f64)>> = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (a, b, w) in edges {
            if a >= n {
                return Err(GraphError::InvalidVertex(a, n));
            }
            if b >= n {
                return Err(GraphError::InvalidVertex(b, n));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            // also rejects NaN
            if !(w >= 1.0) {
                return Err(GraphError::InvalidWeight(a, b, w));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            list.push(Edge { u, v, w });
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        list.sort_by(|x, y| (x.u, x.v).cmp(&(y.u, y.v)));
        if let Some(pair) = list.windows(2).find(|p| p[0].u == p[1].u && p[0].v == p[1].v) {
            return Err(GraphError::ParallelEdge(pair[0].u, pair[0].v));
        }
        for nbrs in &mut adj {
            nbrs.sort_by_key(|&(x, _)| x);
        }
        Ok(Self { adj, edges: list })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(u, v)` with `u < v`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, f64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Largest edge weight; 1 for an edgeless graph.
    pub fn max_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.w).fold(1.0, f64::max)
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> Option<f64> {
        let (short, other) = if self.adj[u].len() <= self.adj[v].len() {
            (&self.adj[u], v)
        } else {
            (&self.adj[v], u)
        };
        short
            .binary_search_by_key(&other, |&(x, _)| x)
            .ok()
            .map(|i| short[i].1)
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex(v, self.n()))
        }
    }

    pub fn layer(&self, threshold: f64) -> Result<LayerView<'_>, GraphError> {
        layer(self, threshold)
    }

    /// Serializes to the line format: `n m`, then one `u v w` line per edge
    /// sorted by `(u, v)`, weights in shortest round-trip decimal.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.n(), self.m());
        for e in &self.edges {
            let _ = writeln!(out, "{} {} {}", e.u, e.v, e.w);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header".into(),
        })?;
        let perr = |line: usize, msg: &str| GraphError::Parse {
            line: line + 1,
            msg: msg.to_string(),
        };
        let mut head = header.split_whitespace();
        let n: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| perr(hl, "bad vertex count"))?;
        let m: usize = head
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| perr(hl, "bad edge count"))?;
        let mut edges = Vec::with_capacity(m);
        for (ln, line) in lines {
            let mut it = line.split_whitespace();
            let u: Vertex = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| perr(ln, "bad endpoint"))?;
            let v: Vertex = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| perr(ln, "bad endpoint"))?;
            let w: f64 = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| perr(ln, "bad weight"))?;
            if it.next().is_some() {
                return Err(perr(ln, "trailing tokens"));
            }
            edges.push((u, v, w));
        }
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 1,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, edges)
    }
}

/// The subgraph `G[w >= threshold]`: every vertex, only the heavy edges.
#[derive(Debug, Clone, Copy)]
pub struct LayerView<'g> {
    base: &'g WeightedGraph,
    threshold: f64,
}

pub fn layer(g: &WeightedGraph, threshold: f64) -> Result<LayerView<'_>, GraphError> {
    if !(threshold >= 1.0) {
        return Err(GraphError::InvalidThreshold(threshold));
    }
    Ok(LayerView { base: g, threshold })
}

impl<'g> LayerView<'g> {
    pub fn base(&self) -> &'g WeightedGraph {
        self.base
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn edges(&self) -> impl Iterator<Item = &'g Edge> + '_ {
        let t = self.threshold;
        self.base.edges.iter().filter(move |e| e.w >= t)
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = (Vertex, f64)> + '_ {
        let t = self.threshold;
        self.base.adj[v].iter().copied().filter(move |&(_, w)| w >= t)
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> Option<f64> {
        self.base.weight(u, v).filter(|&w| w >= self.threshold)
    }
}

/// Single-source distances in one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    pub source: Vertex,
    /// Weighted distance, `f64::INFINITY` when unreachable.
    pub dist: Vec<f64>,
    /// Hop distance, `None` when unreachable.
    pub hops: Vec<Option<u32>>,
}

#[derive(Copy, Clone, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: Vertex,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn dijkstra_impl(view: &LayerView<'_>, source: Vertex, skip: Option<(Vertex, Vertex)>) -> Vec<f64> {
    let n = view.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapItem {
        dist: 0.0,
        vertex: source,
    });
    while let Some(HeapItem { dist: d, vertex: x }) = heap.pop() {
        if d > dist[x] {
            continue;
        }
        for (y, w) in view.neighbors(x) {
            if let Some((a, b)) = skip {
                if (x == a && y == b) || (x == b && y == a) {
                    continue;
                }
            }
            let nd = d + w;
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(HeapItem { dist: nd, vertex: y });
            }
        }
    }
    dist
}

/// Weighted single-source distances within the layer.
pub fn dijkstra(view: &LayerView<'_>, source: Vertex) -> Vec<f64> {
    dijkstra_impl(view, source, None)
}

/// Unweighted BFS distances within the layer.
pub fn hop_distances(view: &LayerView<'_>, source: Vertex) -> Vec<Option<u32>> {
    let mut hops = vec![None; view.n()];
    let mut queue = VecDeque::new();
    hops[source] = Some(0);
    queue.push_back(source);
    while let Some(x) = queue.pop_front() {
        let h = hops[x].unwrap_or(0);
        for (y, _) in view.neighbors(x) {
            if hops[y].is_none() {
                hops[y] = Some(h + 1);
                queue.push_back(y);
            }
        }
    }
    hops
}

pub fn shortest_paths(view: &LayerView<'_>, source: Vertex) -> Result<DistanceMap, GraphError> {
    view.base.check_vertex(source)?;
    Ok(DistanceMap {
        source,
        dist: dijkstra(view, source),
        hops: hop_distances(view, source),
    })
}

/// Component id per vertex; ids are assigned in order of smallest member.
pub fn component_labels(view: &LayerView<'_>) -> Vec<usize> {
    let n = view.n();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        stack.push(start);
        while let Some(x) = stack.pop() {
            for (y, _) in view.neighbors(x) {
                if label[y] == usize::MAX {
                    label[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    label
}

/// Connected components of the layer, each sorted, ordered by smallest vertex.
pub fn components(view: &LayerView<'_>) -> Vec<Vec<Vertex>> {
    let labels = component_labels(view);
    let k = labels.iter().copied().max().map_or(0, |x| x + 1);
    let mut out = vec![Vec::new(); k];
    for (v, &c) in labels.iter().enumerate() {
        out[c].push(v);
    }
    out
}

/// Definition of a transitive edge: some other `u`-`v` path is no longer than the edge.
pub fn is_transitive_edge(g: &WeightedGraph, u: Vertex, v: Vertex) -> Result<bool, GraphError> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    let w = g.weight(u, v).ok_or(GraphError::NotAnEdge(u, v))?;
    let view = layer(g, 1.0)?;
    let dist = dijkstra_impl(&view, u, Some((u, v)));
    Ok(dist[v] <= w)
}

/// All-pairs distances by Floyd-Warshall, row-major `n * n`.
///
/// Independent of the Dijkstra engine; used for shadow checking.
pub fn all_pairs_distances(view: &LayerView<'_>) -> Vec<f64> {
    let n = view.n();
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for e in view.edges() {
        d[e.u * n + e.v] = e.w;
        d[e.v * n + e.u] = e.w;
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik == f64::INFINITY {
                continue;
            }
            for j in 0..n {
                let cand = dik + d[k * n + j];
                if cand < d[i * n + j] {
                    d[i * n + j] = cand;
                }
            }
        }
    }
    d
}

/// Union-find component representatives; a second route to the same partition.
pub fn union_find_labels(view: &LayerView<'_>) -> Vec<usize> {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let n = view.n();
    let mut parent: Vec<usize> = (0..n).collect();
    for e in view.edges() {
        let a = find(&mut parent, e.u);
        let b = find(&mut parent, e.v);
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    (0..n).map(|v| find(&mut parent, v)).collect()
}
