//! Immutable undirected simple graphs in compressed sparse row form.
//!
//! Every undirected edge `{u, v}` is stored twice, once in each endpoint's
//! neighbor list. The position of `v` inside the flat neighbor array of `u`
//! is the *slot* of the directed influence attempt `u -> v`; diffusion code
//! uses slots to address per-attempt coin flips.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

/// Dense node identifier, `0..node_count`.
pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("node id {id} out of range for a graph of {node_count} nodes")]
    NodeOutOfRange { id: u64, node_count: usize },
    #[error("graph has no nodes")]
    Empty,
    #[error("node count {0} does not fit in a 32-bit node id")]
    TooLarge(usize),
    #[error("invalid generator parameters: {0}")]
    InvalidParams(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph from an edge list.
    ///
    /// Self-loops are dropped and repeated pairs (in either orientation)
    /// collapse to a single undirected edge. Without an explicit
    /// `node_count` the graph spans `0..=max id`.
    pub fn from_edges<I>(edges: I, node_count: Option<usize>) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut pairs = Vec::new();
        let mut max_id: Option<u64> = None;
        for (u, v) in edges {
            if let Some(n) = node_count {
                for id in [u, v] {
                    if id >= n as u64 {
                        return Err(GraphError::NodeOutOfRange { id, node_count: n });
                    }
                }
            }
            max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
            pairs.push((u, v));
        }
        let n = match node_count {
            Some(n) => n,
            None => max_id.map_or(0, |m| m as usize + 1),
        };
        if n > NodeId::MAX as usize {
            return Err(GraphError::TooLarge(n));
        }
        Ok(Self::from_pairs(
            n,
            pairs.into_iter().map(|(u, v)| (u as NodeId, v as NodeId)),
        ))
    }

    /// Builds from pairs already known to be in range.
    pub(crate) fn from_pairs<I>(node_count: usize, pairs: I) -> Self
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut directed: Vec<(NodeId, NodeId)> = Vec::new();
        for (u, v) in pairs {
            if u != v {
                directed.push((u, v));
                directed.push((v, u));
            }
        }
        directed.sort_unstable();
        directed.dedup();

        let mut offsets = vec![0usize; node_count + 1];
        for &(u, _) in &directed {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let neighbors = directed.into_iter().map(|(_, v)| v).collect();
        Graph { offsets, neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Number of directed influence slots, `2 * edge_count`.
    pub fn slot_count(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    /// Sorted neighbor list of `v`.
    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        let v = v as usize;
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Slot range of the directed attempts leaving `v`; slot `first + i`
    /// targets `neighbors(v)[i]`.
    #[inline]
    pub fn slot_range(&self, v: NodeId) -> core::ops::Range<usize> {
        let v = v as usize;
        self.offsets[v]..self.offsets[v + 1]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Slot of the directed attempt `u -> v`, if `{u, v}` is an edge.
    pub fn slot_of(&self, u: NodeId, v: NodeId) -> Option<usize> {
        self.neighbors(u)
            .binary_search(&v)
            .ok()
            .map(|i| self.offsets[u as usize] + i)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        0..self.node_count() as NodeId
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes().flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Returns a copy with node `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[NodeId]) -> Graph {
        assert_eq!(perm.len(), self.node_count(), "permutation length");
        Self::from_pairs(
            self.node_count(),
            self.edges().map(|(u, v)| (perm[u as usize], perm[v as usize])),
        )
    }
}
