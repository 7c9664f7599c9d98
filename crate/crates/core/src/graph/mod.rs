//! Sequential graph types and the reference oracles every distributed
//! routine is checked against.

mod cuts;
mod dsu;
mod io;
mod oracle;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cuts::{enumerate_cuts, k_projection, max_cut_bruteforce, rounded_degree, CutIter, MAX_BRUTEFORCE_N};
pub use dsu::DisjointSet;
pub use io::{parse_graph, read_graph, write_graph, write_graph_to};
pub use oracle::{
    build_component_graph_reference, connected_components, f_light_classify, kruskal_mst, spanning_forest_local,
    EdgeClass, PathMax,
};

/// Dense node identifier in `[0, n)`.
pub type VertexId = usize;

/// Non-negative edge weight with a reserved `INFINITY` sentinel that
/// compares above every finite value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Weight(u64);

impl Weight {
    pub const INFINITY: Weight = Weight(u64::MAX);
    pub const ONE: Weight = Weight(1);

    /// Finite weight. `u64::MAX` is reserved for `INFINITY`.
    pub fn new(value: u64) -> Result<Self> {
        if value == u64::MAX {
            return Err(Error::InvalidArgument(
                "weight u64::MAX is reserved for INFINITY".into(),
            ));
        }
        Ok(Weight(value))
    }

    pub fn is_infinite(self) -> bool {
        self == Weight::INFINITY
    }

    pub fn raw(self) -> u64 {
        self.0
    }

    pub(crate) fn from_raw(raw: u64) -> Self {
        Weight(raw)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Undirected weighted edge stored with `u < v`.
///
/// Edges order by the key `(w, u, v)`, which makes every weight
/// comparison strict and the minimum spanning forest unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: Weight,
}

impl Edge {
    /// Builds the canonical form of `{a, b}`. Panics on a self-loop.
    pub fn new(a: VertexId, b: VertexId, w: Weight) -> Self {
        assert_ne!(a, b, "self-loop {a}");
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Edge { u, v, w }
    }

    pub fn key(&self) -> (Weight, VertexId, VertexId) {
        (self.w, self.u, self.v)
    }

    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        (self.u, self.v)
    }
}

impl Ord for Edge {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key())
    }
}

impl PartialOrd for Edge {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.u, self.v, self.w)
    }
}

/// Simple undirected graph with per-vertex sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<(VertexId, Weight)>>,
    edges: Vec<Edge>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adjacency: vec![Vec::new(); n],
            edges: Vec::new(),
        }
    }

    /// Validates and builds a graph. Rejects self-loops, parallel edges,
    /// out-of-range endpoints and `INFINITY` weights.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut list: Vec<Edge> = Vec::new();
        for e in edges {
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("self-loop at {}", e.u)));
            }
            if e.v >= n || e.u >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) out of range for n = {n}",
                    e.u, e.v
                )));
            }
            if e.w.is_infinite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has reserved weight INFINITY",
                    e.u, e.v
                )));
            }
            list.push(Edge::new(e.u, e.v, e.w));
        }
        list.sort_by_key(|e| (e.u, e.v));
        if let Some(w) = list.windows(2).find(|w| w[0].u == w[1].u && w[0].v == w[1].v) {
            return Err(Error::InvalidGraph(format!("parallel edge ({}, {})", w[0].u, w[0].v)));
        }
        let mut adjacency = vec![Vec::new(); n];
        for e in &list {
            adjacency[e.u].push((e.v, e.w));
            adjacency[e.v].push((e.u, e.w));
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }
        list.sort();
        Ok(Graph {
            n,
            adjacency,
            edges: list,
        })
    }

    /// Unweighted convenience constructor; every edge gets weight 1.
    pub fn unweighted(n: usize, pairs: &[(VertexId, VertexId)]) -> Result<Self> {
        Self::from_edges(n, pairs.iter().map(|&(a, b)| Edge::new(a, b, Weight::ONE)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    /// Edges sorted by `(w, u, v)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, Weight)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn weight(&self, a: VertexId, b: VertexId) -> Option<Weight> {
        self.adjacency[a]
            .binary_search_by_key(&b, |&(x, _)| x)
            .ok()
            .map(|i| self.adjacency[a][i].1)
    }

    pub fn has_edge(&self, e: &Edge) -> bool {
        self.weight(e.u, e.v) == Some(e.w)
    }

    pub fn incident_edges(&self, v: VertexId) -> impl Iterator<Item = Edge> + '_ {
        self.adjacency[v].iter().map(move |&(u, w)| Edge::new(v, u, w))
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|e| e.w == Weight::ONE)
    }

    /// Same topology with every weight set to 1.
    pub fn with_unit_weights(&self) -> Graph {
        let mut g = self.clone();
        for adj in &mut g.adjacency {
            for entry in adj.iter_mut() {
                entry.1 = Weight::ONE;
            }
        }
        for e in &mut g.edges {
            e.w = Weight::ONE;
        }
        g.edges.sort();
        g
    }
}

/// Component labels: `label[v]` is the minimum id in `v`'s component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentLabeling {
    labels: Vec<VertexId>,
}

impl ComponentLabeling {
    pub fn from_edges<'a>(n: usize, edges: impl IntoIterator<Item = &'a Edge>) -> Self {
        let mut dsu = DisjointSet::new(n);
        for e in edges {
            dsu.union(e.u, e.v);
        }
        Self::from_dsu(&mut dsu)
    }

    pub(crate) fn from_dsu(dsu: &mut DisjointSet) -> Self {
        let n = dsu.len();
        let mut min_of_root = vec![usize::MAX; n];
        for v in 0..n {
            let r = dsu.find(v);
            if min_of_root[r] == usize::MAX {
                min_of_root[r] = v;
            }
        }
        let labels = (0..n).map(|v| min_of_root[dsu.find(v)]).collect();
        ComponentLabeling { labels }
    }

    pub fn identity(n: usize) -> Self {
        ComponentLabeling {
            labels: (0..n).collect(),
        }
    }

    pub fn label(&self, v: VertexId) -> VertexId {
        self.labels[v]
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_leader(&self, v: VertexId) -> bool {
        self.labels[v] == v
    }

    pub fn leaders(&self) -> Vec<VertexId> {
        (0..self.labels.len()).filter(|&v| self.is_leader(v)).collect()
    }

    pub fn component_count(&self) -> usize {
        (0..self.labels.len()).filter(|&v| self.is_leader(v)).count()
    }

    /// Members of every component, keyed by leader, in id order.
    pub fn members(&self) -> std::collections::BTreeMap<VertexId, Vec<VertexId>> {
        let mut out: std::collections::BTreeMap<VertexId, Vec<VertexId>> = Default::default();
        for (v, &l) in self.labels.iter().enumerate() {
            out.entry(l).or_default().push(v);
        }
        out
    }
}

/// An acyclic edge set over `n` vertices, kept sorted by `(w, u, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Forest {
    n: usize,
    edges: Vec<Edge>,
}

impl Forest {
    pub fn empty(n: usize) -> Self {
        Forest { n, edges: Vec::new() }
    }

    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut edges: Vec<Edge> = edges.into_iter().collect();
        edges.sort();
        edges.dedup();
        let mut dsu = DisjointSet::new(n);
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(Error::InvalidGraph(format!("forest edge {e} out of range")));
            }
            if !dsu.union(e.u, e.v) {
                return Err(Error::NotAForest(e.u, e.v));
            }
        }
        Ok(Forest { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Number of trees, counting isolated vertices as singleton trees.
    pub fn tree_count(&self) -> usize {
        self.n - self.edges.len()
    }

    pub fn total_weight(&self) -> u128 {
        self.edges.iter().map(|e| e.w.raw() as u128).sum()
    }

    pub fn labeling(&self) -> ComponentLabeling {
        ComponentLabeling::from_edges(self.n, &self.edges)
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.binary_search(e).is_ok()
    }

    /// Union of two forests; fails if the union has a cycle.
    pub fn union(&self, other: &Forest) -> Result<Forest> {
        Forest::new(
            self.n.max(other.n),
            self.edges.iter().chain(other.edges.iter()).copied(),
        )
    }

    pub fn has_infinite_edge(&self) -> bool {
        self.edges.iter().any(|e| e.w.is_infinite())
    }

    pub fn without_infinite_edges(&self) -> Forest {
        Forest {
            n: self.n,
            edges: self.edges.iter().copied().filter(|e| !e.w.is_infinite()).collect(),
        }
    }
}

/// Component graph `cg[G, sub]`: one vertex per component of `(V, sub)` and
/// one inter-component edge per adjacent pair, carrying the minimum-key
/// host edge across the pair as its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentGraph {
    pub labels: ComponentLabeling,
    pub inter: std::collections::BTreeMap<(VertexId, VertexId), Edge>,
}

impl ComponentGraph {
    pub fn leaders(&self) -> Vec<VertexId> {
        self.labels.leaders()
    }

    pub fn inter_edge_count(&self) -> usize {
        self.inter.len()
    }

    /// Leaders that still have at least one incident inter-component edge.
    pub fn unfinished_leaders(&self) -> std::collections::BTreeSet<VertexId> {
        self.inter.keys().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// Leaders with no incident inter-component edge.
    pub fn finished_leaders(&self) -> std::collections::BTreeSet<VertexId> {
        let open = self.unfinished_leaders();
        self.leaders().into_iter().filter(|l| !open.contains(l)).collect()
    }

    /// Witness edges of all inter-component pairs.
    pub fn witnesses(&self) -> Vec<Edge> {
        self.inter.values().copied().collect()
    }
}
