//! Watts-Strogatz and Barabasi-Albert generators.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphError, NodeId};

/// Small-world ring lattice with random rewiring.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WsParams {
    pub n: usize,
    /// Lattice radius: each node links to `nei` neighbors on each side.
    pub nei: usize,
    pub rewire_p: f64,
}

/// Preferential attachment growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaParams {
    pub n: usize,
    /// Edges added with every new node.
    pub m: usize,
    /// Exponent of the attachment kernel `degree^power + 1`.
    pub power: f64,
}

impl WsParams {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.nei < 1 {
            return Err(GraphError::InvalidParams("nei must be at least 1"));
        }
        if self.n <= 2 * self.nei {
            return Err(GraphError::InvalidParams("n must exceed 2 * nei"));
        }
        if !(0.0..=1.0).contains(&self.rewire_p) {
            return Err(GraphError::InvalidParams("rewire_p must lie in [0, 1]"));
        }
        if self.n > NodeId::MAX as usize {
            return Err(GraphError::TooLarge(self.n));
        }
        Ok(())
    }
}

impl BaParams {
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.m < 1 {
            return Err(GraphError::InvalidParams("m must be at least 1"));
        }
        if self.n <= self.m {
            return Err(GraphError::InvalidParams("n must exceed m"));
        }
        if !(self.power >= 0.0 && self.power.is_finite()) {
            return Err(GraphError::InvalidParams("power must be finite and non-negative"));
        }
        if self.n > NodeId::MAX as usize {
            return Err(GraphError::TooLarge(self.n));
        }
        Ok(())
    }

    /// Edge count of every graph produced with these parameters.
    pub fn expected_edges(&self) -> usize {
        self.m * (self.m + 1) / 2 + (self.n - self.m - 1) * self.m
    }
}

/// Ring lattice of `n * nei` edges, each far endpoint rewired with
/// probability `rewire_p` to a uniform node. Self-loops and duplicates are
/// rejected by resampling, so the edge count never changes.
pub fn generate_ws<R: Rng + ?Sized>(p: &WsParams, rng: &mut R) -> Result<Graph, GraphError> {
    p.validate()?;
    let n = p.n;
    let mut adj: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
    let mut lattice = Vec::with_capacity(n * p.nei);
    for u in 0..n {
        for j in 1..=p.nei {
            let v = (u + j) % n;
            adj[u].insert(v as NodeId);
            adj[v].insert(u as NodeId);
            lattice.push((u as NodeId, v as NodeId));
        }
    }

    if p.rewire_p > 0.0 {
        for &(u, v) in &lattice {
            if !rng.random_bool(p.rewire_p) {
                continue;
            }
            // saturated node: nowhere to go
            if adj[u as usize].len() >= n - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n) as NodeId;
                if w != u && !adj[u as usize].contains(&w) {
                    break w;
                }
            };
            adj[u as usize].remove(&v);
            adj[v as usize].remove(&u);
            adj[u as usize].insert(w);
            adj[w as usize].insert(u);
        }
    }

    let pairs = adj
        .iter()
        .enumerate()
        .flat_map(|(u, set)| set.iter().map(move |&v| (u as NodeId, v)))
        .filter(|&(u, v)| u < v);
    Ok(Graph::from_pairs(n, pairs))
}

/// Growth from a clique on `m + 1` nodes; every later node attaches to `m`
/// distinct earlier nodes drawn with probability proportional to
/// `degree^power + 1`.
pub fn generate_ba<R: Rng + ?Sized>(p: &BaParams, rng: &mut R) -> Result<Graph, GraphError> {
    p.validate()?;
    let (n, m) = (p.n, p.m);
    let kernel = |deg: usize| libm::pow(deg as f64, p.power) + 1.0;

    let mut edges: Vec<(NodeId, NodeId)> = Vec::with_capacity(p.expected_edges());
    let mut degree = vec![0usize; n];
    for u in 0..=m {
        for v in (u + 1)..=m {
            edges.push((u as NodeId, v as NodeId));
        }
    }
    degree[..=m].fill(m);

    let mut tree = Fenwick::new(n);
    for (u, &d) in degree.iter().enumerate().take(m + 1) {
        tree.set(u, kernel(d));
    }

    let mut targets = Vec::with_capacity(m);
    for v in (m + 1)..n {
        targets.clear();
        while targets.len() < m {
            let t = tree.sample(rng);
            tree.set(t, 0.0);
            targets.push(t);
        }
        for &t in &targets {
            edges.push((t as NodeId, v as NodeId));
            degree[t] += 1;
            tree.set(t, kernel(degree[t]));
        }
        degree[v] = m;
        tree.set(v, kernel(m));
    }
    Ok(Graph::from_pairs(n, edges))
}

/// Binary indexed tree of non-negative weights supporting proportional draws.
struct Fenwick {
    tree: Vec<f64>,
    weights: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick { tree: vec![0.0; n + 1], weights: vec![0.0; n] }
    }

    fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.weights[i];
        self.weights[i] = w;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut k = self.weights.len();
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let n = self.weights.len();
        let top = if n == 0 { 0 } else { 1usize << (usize::BITS - 1 - n.leading_zeros()) };
        loop {
            let mut target = rng.random::<f64>() * self.total();
            let mut pos = 0;
            let mut step = top;
            while step > 0 {
                let next = pos + step;
                if next <= n && self.tree[next] <= target {
                    pos = next;
                    target -= self.tree[next];
                }
                step >>= 1;
            }
            // rounding drift can land on an emptied slot
            if pos < n && self.weights[pos] > 0.0 {
                return pos;
            }
        }
    }
}
