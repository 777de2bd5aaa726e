//! Random instances: a fixed bounded-degree structure with i.i.d. edge
//! weights drawn from a Pareto law (or a truncated/fixed alternative).

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Vertex, WeightedGraph};

/// Extra-edge target per vertex for connected blocks (`m ~ 1.5 n`, capped by `n D / 2`).
pub const EDGE_FACTOR: f64 = 1.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("infeasible instance: {0}")]
    Infeasible(String),
    #[error("invalid weight model: {0}")]
    InvalidModel(String),
}

/// Inverse CDF of the Pareto law `F(w) = 1 - w^-alpha` on `[1, inf)`.
///
/// `u` is a uniform draw on `(0, 1]`; `u = 1` maps to the support minimum.
pub fn pareto_quantile(alpha: f64, u: f64) -> f64 {
    u.powf(-1.0 / alpha)
}

/// One Pareto(alpha) sample with minimum 1.
pub fn pareto_sample<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    // random() is on [0, 1); flip it so the draw lies on (0, 1]
    let u = 1.0 - rng.random::<f64>();
    pareto_quantile(alpha, u)
}

pub fn pareto_cdf(alpha: f64, w: f64) -> f64 {
    if w < 1.0 {
        0.0
    } else {
        1.0 - w.powf(-alpha)
    }
}

/// `P(w >= thr)` under Pareto(alpha).
pub fn tail_probability(alpha: f64, thr: f64) -> f64 {
    if thr <= 1.0 {
        1.0
    } else {
        thr.powf(-alpha)
    }
}

/// Threshold where the expected layer degree `D * p` reaches 1.
pub fn critical_threshold(max_degree: usize, alpha: f64) -> f64 {
    (max_degree as f64).powf(1.0 / alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightKind {
    Pareto,
    UniformTruncated,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightModel {
    /// Pareto(alpha), truncated to `[1, cap]` when a cap is given.
    Pareto { alpha: f64, cap: Option<f64> },
    UniformTruncated { cap: f64 },
    Fixed { value: f64 },
}

impl WeightModel {
    pub fn validate(&self) -> Result<(), GenError> {
        match *self {
            WeightModel::Pareto { alpha, cap } => {
                if !(alpha > 0.0) || !alpha.is_finite() {
                    return Err(GenError::InvalidModel(format!("alpha must be positive, got {alpha}")));
                }
                if let Some(c) = cap {
                    if !(c >= 1.0) {
                        return Err(GenError::InvalidModel(format!("cap must be >= 1, got {c}")));
                    }
                }
            }
            WeightModel::UniformTruncated { cap } => {
                if !(cap >= 1.0) || !cap.is_finite() {
                    return Err(GenError::InvalidModel(format!("cap must be >= 1, got {cap}")));
                }
            }
            WeightModel::Fixed { value } => {
                if !(value >= 1.0) || !value.is_finite() {
                    return Err(GenError::InvalidModel(format!("fixed weight must be >= 1, got {value}")));
                }
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightModel::Pareto { alpha, cap: None } => pareto_sample(alpha, rng),
            WeightModel::Pareto { alpha, cap: Some(cap) } => {
                // inverse CDF of the law conditioned on w <= cap
                let mass = 1.0 - cap.powf(-alpha);
                let u = rng.random::<f64>();
                (1.0 - u * mass).powf(-1.0 / alpha).clamp(1.0, cap)
            }
            WeightModel::UniformTruncated { cap } => 1.0 + rng.random::<f64>() * (cap - 1.0),
            WeightModel::Fixed { value } => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Structure {
    Connected,
    MultiComponent,
}

/// Serialized with exactly the fields
/// `n, d_max, structure, k, weight_model, alpha, w_cap, seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub d_max: usize,
    pub structure: Structure,
    pub k: usize,
    pub weight_model: WeightKind,
    pub alpha: f64,
    pub w_cap: Option<f64>,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn connected(n: usize, d_max: usize, alpha: f64, seed: u64) -> Self {
        Self {
            n,
            d_max,
            structure: Structure::Connected,
            k: 1,
            weight_model: WeightKind::Pareto,
            alpha,
            w_cap: None,
            seed,
        }
    }

    pub fn multi(n: usize, d_max: usize, k: usize, alpha: f64, seed: u64) -> Self {
        Self {
            structure: Structure::MultiComponent,
            k,
            ..Self::connected(n, d_max, alpha, seed)
        }
    }

    pub fn weight_model(&self) -> WeightModel {
        match self.weight_model {
            WeightKind::Pareto => WeightModel::Pareto {
                alpha: self.alpha,
                cap: self.w_cap,
            },
            WeightKind::UniformTruncated => WeightModel::UniformTruncated {
                cap: self.w_cap.unwrap_or(2.0),
            },
            WeightKind::Fixed => WeightModel::Fixed {
                value: self.w_cap.unwrap_or(1.0),
            },
        }
    }

    pub fn component_count(&self) -> usize {
        match self.structure {
            Structure::Connected => 1,
            Structure::MultiComponent => self.k,
        }
    }
}

/// Generates the instance described by `spec` from its own seed.
pub fn gen_graph(spec: &InstanceSpec) -> Result<WeightedGraph, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    gen_graph_with(spec, &mut rng)
}

pub fn gen_graph_with<R: Rng + ?Sized>(spec: &InstanceSpec, rng: &mut R) -> Result<WeightedGraph, GenError> {
    let model = spec.weight_model();
    model.validate()?;
    let n = spec.n;
    let k = spec.component_count();
    if n == 0 {
        return Err(GenError::Infeasible("n must be at least 1".into()));
    }
    if k == 0 || k > n {
        return Err(GenError::Infeasible(format!("cannot split {n} vertices into {k} components")));
    }

    let sizes = if k == 1 { vec![n] } else { block_sizes(n, k, rng) };
    for &size in &sizes {
        check_block(size, spec.d_max)?;
    }
    let mut ids: Vec<Vertex> = (0..n).collect();
    if k > 1 {
        ids.shuffle(rng);
    }

    let mut pairs: Vec<(Vertex, Vertex)> = Vec::new();
    let mut start = 0;
    for &size in &sizes {
        connected_block(&ids[start..start + size], spec.d_max, rng, &mut pairs);
        start += size;
    }

    for p in &mut pairs {
        if p.0 > p.1 {
            *p = (p.1, p.0);
        }
    }
    pairs.sort_unstable();
    let edges: Vec<_> = pairs.into_iter().map(|(u, v)| (u, v, model.sample(rng))).collect();
    Ok(WeightedGraph::new(n, edges).expect("generator emits simple graphs with weights >= 1"))
}

fn check_block(size: usize, d_max: usize) -> Result<(), GenError> {
    let needed = match size {
        1 => 0,
        2 => 1,
        _ => 2,
    };
    if d_max < needed {
        return Err(GenError::Infeasible(format!(
            "a connected block of {size} vertices needs max degree >= {needed}, got {d_max}"
        )));
    }
    Ok(())
}

// Symmetric Dirichlet(1) split of n into k positive parts.
fn block_sizes<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let draws: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = draws.iter().sum();
    let spare = (n - k) as f64;
    let shares: Vec<f64> = draws.iter().map(|x| x / total * spare).collect();
    let mut sizes: Vec<usize> = shares.iter().map(|s| 1 + s.floor() as usize).collect();
    let mut left = n - sizes.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        let fa = shares[a] - shares[a].floor();
        let fb = shares[b] - shares[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        sizes[i] += 1;
        left -= 1;
    }
    sizes
}

// Random spanning tree under the degree cap, then random extra edges.
fn connected_block<R: Rng + ?Sized>(verts: &[Vertex], d_max: usize, rng: &mut R, out: &mut Vec<(Vertex, Vertex)>) {
    let size = verts.len();
    if size < 2 {
        return;
    }
    let mut order = verts.to_vec();
    order.shuffle(rng);
    let mut degree = std::collections::HashMap::with_capacity(size);
    let mut open: Vec<Vertex> = vec![order[0]];
    let mut present: HashSet<(Vertex, Vertex)> = HashSet::new();

    let bump = |v: Vertex, open: &mut Vec<Vertex>, degree: &mut std::collections::HashMap<Vertex, usize>| {
        let d = degree.entry(v).or_insert(0);
        *d += 1;
        if *d >= d_max {
            if let Some(pos) = open.iter().position(|&x| x == v) {
                open.swap_remove(pos);
            }
        }
    };

    for &v in &order[1..] {
        let parent = open[rng.random_range(0..open.len())];
        out.push((parent, v));
        present.insert((parent.min(v), parent.max(v)));
        bump(parent, &mut open, &mut degree);
        open.push(v);
        bump(v, &mut open, &mut degree);
    }

    let max_edges = size * (size - 1) / 2;
    let target = ((EDGE_FACTOR * size as f64).ceil() as usize)
        .min(size * d_max / 2)
        .min(max_edges);
    let mut edges = size - 1;
    let mut tries = 0;
    while edges < target && tries < 50 * target && open.len() >= 2 {
        tries += 1;
        let a = open[rng.random_range(0..open.len())];
        let b = open[rng.random_range(0..open.len())];
        if a == b || !present.insert((a.min(b), a.max(b))) {
            continue;
        }
        out.push((a, b));
        bump(a, &mut open, &mut degree);
        bump(b, &mut open, &mut degree);
        edges += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceStats {
    pub n: usize,
    pub m: usize,
    pub max_degree: usize,
    pub wmax: f64,
    pub wstar: f64,
}

/// Size statistics plus the critical threshold `w* = D^(1/alpha)` for the
/// graph's observed maximum degree.
pub fn instance_stats(g: &WeightedGraph, alpha: f64) -> InstanceStats {
    let d = g.max_degree();
    InstanceStats {
        n: g.n(),
        m: g.m(),
        max_degree: d,
        wmax: g.max_weight(),
        wstar: critical_threshold(d, alpha),
    }
}
