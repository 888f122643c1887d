//! Static node rankings used to pick seeds.
//!
//! All score-based strategies rank descending by score; ties go to the
//! higher-degree node, then to the lower node id.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "R")]
    Random,
    #[serde(rename = "D")]
    Degree,
    #[serde(rename = "D2")]
    SecondDegree,
    #[serde(rename = "CL")]
    Closeness,
    #[serde(rename = "CC")]
    Clustering,
    #[serde(rename = "PR")]
    PageRank,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Random,
        Strategy::Degree,
        Strategy::SecondDegree,
        Strategy::Closeness,
        Strategy::Clustering,
        Strategy::PageRank,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Strategy::Random => "R",
            Strategy::Degree => "D",
            Strategy::SecondDegree => "D2",
            Strategy::Closeness => "CL",
            Strategy::Clustering => "CC",
            Strategy::PageRank => "PR",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown ranking strategy (expected one of R, D, D2, CL, CC, PR)")]
pub struct ParseStrategyError;

impl FromStr for Strategy {
    type Err = ParseStrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.code().eq_ignore_ascii_case(s))
            .ok_or(ParseStrategyError)
    }
}

/// Total order over all nodes, best seed first.
#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub strategy: Strategy,
    pub order: Vec<NodeId>,
    /// Per-node scores indexed by node id; `None` for random rankings.
    pub scores: Option<Vec<f64>>,
}

impl Ranking {
    /// Sorts nodes by descending score with the global tie-break.
    pub fn from_scores(g: &Graph, strategy: Strategy, scores: Vec<f64>) -> Self {
        assert_eq!(scores.len(), g.node_count());
        let mut order: Vec<NodeId> = g.nodes().collect();
        order.sort_by(|&a, &b| {
            scores[b as usize]
                .total_cmp(&scores[a as usize])
                .then_with(|| g.degree(b).cmp(&g.degree(a)))
                .then_with(|| a.cmp(&b))
        });
        Ranking { strategy, order, scores: Some(scores) }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Position of every node in `order` (0 = best).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &v) in self.order.iter().enumerate() {
            pos[v as usize] = i;
        }
        pos
    }
}

/// Ranks every node of `g`. The rng is only consumed by [`Strategy::Random`].
pub fn rank_nodes<R: Rng + ?Sized>(g: &Graph, strategy: Strategy, rng: &mut R) -> Ranking {
    let scores = match strategy {
        Strategy::Random => {
            let mut order: Vec<NodeId> = g.nodes().collect();
            order.shuffle(rng);
            return Ranking { strategy, order, scores: None };
        }
        Strategy::Degree => g.nodes().map(|v| g.degree(v) as f64).collect(),
        Strategy::SecondDegree => two_hop_degrees(g).into_iter().map(|d| d as f64).collect(),
        Strategy::Closeness => closeness_scores(g),
        Strategy::Clustering => clustering_scores(g),
        Strategy::PageRank => pagerank_scores(g, &PageRankConfig::default())
            .expect("default PageRank configuration is valid")
            .scores,
    };
    Ranking::from_scores(g, strategy, scores)
}

/// Number of distinct nodes within distance two of `v`, excluding `v`.
pub fn two_hop_degree(g: &Graph, v: NodeId) -> usize {
    let mut seen = vec![false; g.node_count()];
    two_hop_with(g, v, &mut seen, &mut Vec::new())
}

pub fn two_hop_degrees(g: &Graph) -> Vec<usize> {
    let mut seen = vec![false; g.node_count()];
    let mut touched = Vec::new();
    g.nodes().map(|v| two_hop_with(g, v, &mut seen, &mut touched)).collect()
}

fn two_hop_with(g: &Graph, v: NodeId, seen: &mut [bool], touched: &mut Vec<NodeId>) -> usize {
    seen[v as usize] = true;
    touched.push(v);
    for &u in g.neighbors(v) {
        for &w in core::iter::once(&u).chain(g.neighbors(u)) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                touched.push(w);
            }
        }
    }
    let count = touched.len() - 1;
    for w in touched.drain(..) {
        seen[w as usize] = false;
    }
    count
}

/// Harmonic closeness: `sum over u != v of 1 / dist(v, u)`, unreachable
/// nodes contributing nothing.
pub fn closeness_scores(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut dist = vec![u32::MAX; n];
    let mut queue: Vec<NodeId> = Vec::with_capacity(n);
    let mut layer_sizes: Vec<usize> = Vec::new();
    let mut scores = Vec::with_capacity(n);

    for s in g.nodes() {
        queue.clear();
        layer_sizes.clear();
        dist[s as usize] = 0;
        queue.push(s);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            let d = dist[u as usize];
            for &w in g.neighbors(u) {
                if dist[w as usize] == u32::MAX {
                    dist[w as usize] = d + 1;
                    let layer = d as usize;
                    if layer_sizes.len() <= layer {
                        layer_sizes.push(0);
                    }
                    layer_sizes[layer] += 1;
                    queue.push(w);
                }
            }
        }
        // summing per distance keeps the result independent of node labels
        let score = layer_sizes
            .iter()
            .enumerate()
            .map(|(i, &c)| c as f64 / (i + 1) as f64)
            .sum();
        scores.push(score);
        for &u in &queue {
            dist[u as usize] = u32::MAX;
        }
    }
    scores
}

/// Local clustering coefficient; zero for nodes of degree below two.
pub fn clustering_scores(g: &Graph) -> Vec<f64> {
    let mut mark = vec![false; g.node_count()];
    g.nodes()
        .map(|v| {
            let adj = g.neighbors(v);
            let k = adj.len();
            if k < 2 {
                return 0.0;
            }
            for &u in adj {
                mark[u as usize] = true;
            }
            let mut links = 0usize;
            for &u in adj {
                links += g.neighbors(u).iter().filter(|&&w| mark[w as usize]).count();
            }
            for &u in adj {
                mark[u as usize] = false;
            }
            // every neighbor-neighbor edge was seen from both ends
            let links = links / 2;
            links as f64 / (k * (k - 1) / 2) as f64
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig { damping: 0.85, tol: 1e-9, max_iter: 200 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRank {
    pub scores: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("damping factor {0} outside (0, 1)")]
pub struct DampingError(pub f64);

/// Power iteration with uniform teleport; the mass of isolated nodes is
/// spread uniformly. Stops when the L1 change drops below `tol`.
pub fn pagerank_scores(g: &Graph, cfg: &PageRankConfig) -> Result<PageRank, DampingError> {
    let d = cfg.damping;
    if !(d > 0.0 && d < 1.0) {
        return Err(DampingError(d));
    }
    let n = g.node_count();
    if n == 0 {
        return Ok(PageRank { scores: Vec::new(), iterations: 0, converged: true });
    }
    let inv_n = 1.0 / n as f64;
    let mut x = vec![inv_n; n];
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.max_iter {
        iterations += 1;
        let dangling: f64 = g.nodes().filter(|&v| g.degree(v) == 0).map(|v| x[v as usize]).sum();
        let base = (1.0 - d) * inv_n + d * dangling * inv_n;
        for v in g.nodes() {
            let inflow: f64 = g
                .neighbors(v)
                .iter()
                .map(|&u| x[u as usize] / g.degree(u) as f64)
                .sum();
            next[v as usize] = base + d * inflow;
        }
        // renormalise away accumulated rounding
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|s| *s /= total);
        let delta: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        core::mem::swap(&mut x, &mut next);
        if delta < cfg.tol {
            converged = true;
            break;
        }
    }
    Ok(PageRank { scores: x, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(edges: &[(u64, u64)], n: usize) -> Graph {
        Graph::from_edges(edges.iter().copied(), Some(n)).unwrap()
    }

    fn star() -> Graph {
        g(&[(0, 1), (0, 2), (0, 3), (0, 4)], 5)
    }

    fn path(n: u64) -> Graph {
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        g(&e, n as usize)
    }

    #[test]
    fn degree_ranks_star_center_first() {
        let r = rank_nodes(&star(), Strategy::Degree, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(r.order[0], 0);
        // leaves tie on score and degree: lower id first
        assert_eq!(&r.order[1..], &[1, 2, 3, 4]);
    }

    #[test]
    fn random_ranking_is_reproducible() {
        let gr = path(30);
        let a = rank_nodes(&gr, Strategy::Random, &mut ChaCha8Rng::seed_from_u64(5));
        let b = rank_nodes(&gr, Strategy::Random, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a, b);
        assert!(a.scores.is_none());
        let mut sorted = a.order.clone();
        sorted.sort();
        assert_eq!(sorted, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn closeness_ranks_path_middle_first() {
        let r = rank_nodes(&path(3), Strategy::Closeness, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(r.order[0], 1);
    }

    #[test]
    fn two_hop_cases() {
        assert_eq!(two_hop_degree(&g(&[], 1), 0), 0);
        assert_eq!(two_hop_degree(&path(5), 0), 2);
        assert_eq!(two_hop_degree(&star(), 0), 4);
        assert_eq!(two_hop_degree(&star(), 1), 4);
        assert_eq!(two_hop_degrees(&path(5)), vec![2, 3, 4, 3, 2]);
    }

    #[test]
    fn closeness_cases() {
        assert_eq!(closeness_scores(&g(&[], 2)), vec![0.0, 0.0]);
        assert_eq!(closeness_scores(&path(3)), vec![1.5, 2.0, 1.5]);
        let k4 = g(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], 4);
        assert_eq!(closeness_scores(&k4), vec![3.0; 4]);
    }

    #[test]
    fn clustering_cases() {
        assert_eq!(clustering_scores(&g(&[(0, 1), (1, 2), (2, 0)], 3)), vec![1.0; 3]);
        assert_eq!(clustering_scores(&star())[0], 0.0);
        let pendant = g(&[(0, 1), (1, 2), (2, 0), (0, 3)], 4);
        let cc = clustering_scores(&pendant);
        assert!((cc[0] - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(cc[3], 0.0);
    }

    #[test]
    fn pagerank_regular_graph_is_uniform() {
        let ring = g(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], 5);
        let pr = pagerank_scores(&ring, &PageRankConfig::default()).unwrap();
        assert!(pr.converged);
        assert!(pr.scores.iter().all(|&s| (s - 0.2).abs() < 1e-12));
    }

    #[test]
    fn pagerank_rejects_bad_damping() {
        let cfg = PageRankConfig { damping: 1.0, ..Default::default() };
        assert!(pagerank_scores(&path(3), &cfg).is_err());
    }

    #[test]
    fn pagerank_reports_non_convergence() {
        let cfg = PageRankConfig { max_iter: 1, tol: 0.0, ..Default::default() };
        let pr = pagerank_scores(&path(4), &cfg).unwrap();
        assert!(!pr.converged);
        assert_eq!(pr.iterations, 1);
        assert!((pr.scores.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strategy_codes_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.code().parse::<Strategy>().unwrap(), s);
        }
        assert!("XX".parse::<Strategy>().is_err());
    }
}
