//! Exact minimum spanning tree pipeline: clique MST prefix, uniform
//! sampling, rank-partitioned MST with guardians, and supporter routing.

mod ccmst;
mod exact;
mod route_labels;
mod sqmst;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{ComponentLabeling, DisjointSet, Edge, Graph, VertexId};

pub use ccmst::{
    cc_mst, ccmst_phase_cap, clique_mst_reference, CcMstOptions, CcMstOutput, CliqueView, ClusterPartition,
};
pub use exact::{exact_mst, ExactMstOutput};
pub use route_labels::{
    assign_guardians_and_supporters, route_labels, supporter_rho, LabelVector, LabelledEdge, PartitionAssignment,
};
pub use sqmst::{sq_mst, SqMstOutput};

/// A graph whose vertices are component leaders. Every edge is a host
/// edge (the witness) whose endpoints lie in two different components;
/// at most one witness per leader pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractedGraph {
    labels: ComponentLabeling,
    edges: Vec<Edge>,
}

impl ContractedGraph {
    pub fn new(labels: ComponentLabeling, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort();
        let mut pairs = BTreeSet::new();
        for e in &edges {
            if e.v >= labels.len() {
                return Err(Error::InvalidGraph(format!("edge {e} out of range")));
            }
            let (a, b) = (labels.label(e.u), labels.label(e.v));
            if a == b {
                return Err(Error::InvalidGraph(format!("edge {e} lies inside component {a}")));
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                return Err(Error::InvalidGraph(format!("two witnesses for leader pair ({a}, {b})")));
            }
        }
        Ok(ContractedGraph { labels, edges })
    }

    /// Every vertex is its own leader.
    pub fn from_graph(g: &Graph) -> Self {
        ContractedGraph {
            labels: ComponentLabeling::identity(g.n()),
            edges: g.edges().to_vec(),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &ComponentLabeling {
        &self.labels
    }

    /// Witness edges sorted by key.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Leader endpoints `(a, b)` with `a < b`.
    pub fn ends(&self, e: &Edge) -> (VertexId, VertexId) {
        let (a, b) = (self.labels.label(e.u), self.labels.label(e.v));
        (a.min(b), a.max(b))
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n()];
        for e in &self.edges {
            let (a, b) = self.ends(e);
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// Leaders with at least one incident edge.
    pub fn vertices(&self) -> Vec<VertexId> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn subgraph(&self, keep: impl Fn(&Edge) -> bool) -> ContractedGraph {
        ContractedGraph {
            labels: self.labels.clone(),
            edges: self.edges.iter().copied().filter(|e| keep(e)).collect(),
        }
    }

    /// Sequential minimum spanning forest over the leader graph, by witness key.
    pub fn kruskal_reference(&self) -> Vec<Edge> {
        let mut dsu = DisjointSet::new(self.n());
        self.edges
            .iter()
            .copied()
            .filter(|e| {
                let (a, b) = self.ends(e);
                dsu.union(a, b)
            })
            .collect()
    }
}
