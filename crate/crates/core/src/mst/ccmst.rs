use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ComponentLabeling, DisjointSet, Edge, Forest, Graph, VertexId, Weight};
use crate::net::{CcMstStrategy, Payload, Simulator};

/// The complete graph over a host graph's vertices: host edges keep their
/// weight (or weight 1 in unit mode), every non-edge weighs `INFINITY`.
#[derive(Debug, Clone, Copy)]
pub struct CliqueView<'a> {
    graph: &'a Graph,
    unit: bool,
}

impl<'a> CliqueView<'a> {
    pub fn weighted(graph: &'a Graph) -> Self {
        CliqueView { graph, unit: false }
    }

    pub fn unit(graph: &'a Graph) -> Self {
        CliqueView { graph, unit: true }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn weight(&self, a: VertexId, b: VertexId) -> Weight {
        match self.graph.weight(a, b) {
            Some(_) if self.unit => Weight::ONE,
            Some(w) => w,
            None => Weight::INFINITY,
        }
    }

    fn finite_neighbors(&self, x: VertexId) -> impl Iterator<Item = (VertexId, Weight)> + '_ {
        let unit = self.unit;
        self.graph
            .neighbors(x)
            .iter()
            .map(move |&(y, w)| (y, if unit { Weight::ONE } else { w }))
    }

    /// Lightest clique edge from `x` to a vertex with a different label.
    fn min_outgoing(&self, x: VertexId, labels: &[VertexId]) -> Option<Edge> {
        let finite = self
            .finite_neighbors(x)
            .filter(|&(y, _)| labels[y] != labels[x])
            .map(|(y, w)| Edge::new(x, y, w))
            .min();
        finite.or_else(|| {
            // Among INFINITY edges the smallest key goes to the smallest id.
            (0..labels.len())
                .find(|&y| labels[y] != labels[x])
                .map(|y| Edge::new(x, y, Weight::INFINITY))
        })
    }

    /// Lightest clique edge from `x` into every other cluster.
    fn min_per_cluster(
        &self,
        x: VertexId,
        labels: &[VertexId],
        first_member: &BTreeMap<VertexId, VertexId>,
    ) -> BTreeMap<VertexId, Edge> {
        let mut out: BTreeMap<VertexId, Edge> = BTreeMap::new();
        for (y, w) in self.finite_neighbors(x) {
            if labels[y] == labels[x] {
                continue;
            }
            let e = Edge::new(x, y, w);
            out.entry(labels[y])
                .and_modify(|best| {
                    if e < *best {
                        *best = e;
                    }
                })
                .or_insert(e);
        }
        for (&c, &y) in first_member {
            if c != labels[x] {
                out.entry(c).or_insert_with(|| Edge::new(x, y, Weight::INFINITY));
            }
        }
        out
    }
}

/// The clique's unique minimum spanning tree under the `(w, u, v)` key,
/// by an `O(n^2)` Prim scan.
pub fn clique_mst_reference(view: &CliqueView<'_>) -> Forest {
    let n = view.n();
    let mut in_tree = vec![false; n];
    let mut best: Vec<Option<Edge>> = vec![None; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    if n == 0 {
        return Forest::empty(0);
    }
    in_tree[0] = true;
    for (y, slot) in best.iter_mut().enumerate().skip(1) {
        *slot = Some(Edge::new(0, y, view.weight(0, y)));
    }
    for _ in 1..n {
        let next = (0..n)
            .filter(|&y| !in_tree[y])
            .min_by_key(|&y| best[y].expect("candidate"))
            .expect("vertex left");
        let e = best[next].expect("candidate");
        edges.push(e);
        in_tree[next] = true;
        for y in 0..n {
            if !in_tree[y] {
                let cand = Edge::new(next, y, view.weight(next, y));
                if cand < best[y].expect("candidate") {
                    best[y] = Some(cand);
                }
            }
        }
    }
    Forest::new(n, edges).expect("prim output is acyclic")
}

/// Cluster partition after some number of phases.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterPartition {
    pub labels: ComponentLabeling,
    /// Union of all cluster trees; may contain `INFINITY` edges.
    pub forest: Forest,
    pub phase: usize,
    pub min_cluster_size: usize,
}

impl ClusterPartition {
    pub fn clusters(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        self.labels.members()
    }

    pub fn trees(&self) -> BTreeMap<VertexId, Vec<Edge>> {
        let mut out: BTreeMap<VertexId, Vec<Edge>> =
            self.labels.leaders().into_iter().map(|l| (l, Vec::new())).collect();
        for e in self.forest.edges() {
            out.get_mut(&self.labels.label(e.u)).expect("leader").push(*e);
        }
        out
    }

    pub fn cluster_count(&self) -> usize {
        self.labels.component_count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CcMstOptions {
    pub max_phases: usize,
    /// Stop at the first phase boundary with at most this many clusters.
    pub target_clusters: usize,
    pub strategy: CcMstStrategy,
}

impl CcMstOptions {
    /// Runs until a single cluster remains.
    pub fn full(n: usize, strategy: CcMstStrategy) -> Self {
        let mut phases = 1;
        while phases < 64 && (1u128 << ((1u32 << (phases - 1)).min(127))) < n as u128 {
            phases += 1;
        }
        CcMstOptions {
            max_phases: phases + 1,
            target_clusters: 1,
            strategy,
        }
    }

    /// Stops once the cluster count is at most `floor(n / log2(n)^2)`.
    pub fn prefix(n: usize, strategy: CcMstStrategy) -> Self {
        let l = crate::sampling::log2n(n.max(2));
        CcMstOptions {
            max_phases: ccmst_phase_cap(n),
            target_clusters: ((n as f64 / (l * l)).floor() as usize).max(1),
            strategy,
        }
    }
}

/// `ceil(max(0, log2 log2 log2 n)) + 3`.
pub fn ccmst_phase_cap(n: usize) -> usize {
    let lll = (n.max(2) as f64).log2().log2().log2();
    (if lll > 0.0 { lll.ceil() as usize } else { 0 }) + 3
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CcMstOutput {
    pub partition: ClusterPartition,
    /// Cluster count after each completed phase.
    pub cluster_counts: Vec<usize>,
    pub phases: usize,
}

impl CcMstOutput {
    pub fn forest(&self) -> &Forest {
        &self.partition.forest
    }
}

struct State {
    n: usize,
    labels: Vec<VertexId>,
    forest: Vec<Edge>,
}

impl State {
    fn new(n: usize) -> Self {
        State {
            n,
            labels: (0..n).collect(),
            forest: Vec::new(),
        }
    }

    fn relabel(&mut self) {
        self.labels = ComponentLabeling::from_edges(self.n, &self.forest).as_slice().to_vec();
    }

    fn cluster_count(&self) -> usize {
        (0..self.n).filter(|&v| self.labels[v] == v).count()
    }

    fn sizes(&self) -> BTreeMap<VertexId, usize> {
        let mut out = BTreeMap::new();
        for &l in &self.labels {
            *out.entry(l).or_insert(0) += 1;
        }
        out
    }

    fn max_internal(&self) -> BTreeMap<VertexId, Edge> {
        let mut out: BTreeMap<VertexId, Edge> = BTreeMap::new();
        for e in &self.forest {
            let l = self.labels[e.u];
            out.entry(l)
                .and_modify(|m| {
                    if e > m {
                        *m = *e;
                    }
                })
                .or_insert(*e);
        }
        out
    }

    /// Adds `edges` in key order, skipping any that would close a cycle.
    fn merge(&mut self, mut edges: Vec<Edge>) -> usize {
        edges.sort();
        edges.dedup();
        let mut dsu = DisjointSet::new(self.n);
        for e in &self.forest {
            dsu.union(e.u, e.v);
        }
        let mut added = 0;
        for e in edges {
            if dsu.union(e.u, e.v) {
                self.forest.push(e);
                added += 1;
            }
        }
        self.relabel();
        added
    }
}

const TAG_BASE: u64 = 1 << 32;

/// Every cluster's minimum outgoing clique edge, made known to all nodes.
fn gather_min_outgoing(sim: &mut Simulator, view: &CliqueView<'_>, st: &State) -> Result<BTreeMap<VertexId, Edge>> {
    let items: Vec<Vec<(u64, Edge)>> = (0..st.n)
        .map(|x| view.min_outgoing(x, &st.labels).map(|e| (0, e)).into_iter().collect())
        .collect();
    let at_leaders = sim.converge_min(&st.labels, items)?;
    let outgoing: Vec<(VertexId, Payload)> = at_leaders
        .iter()
        .enumerate()
        .filter_map(|(l, m)| m.get(&0).map(|e| (l, Payload::edge(TAG_BASE + l as u64, e))))
        .collect();
    let table = sim.disseminate_all(outgoing)?;
    Ok(table
        .iter()
        .map(|p| ((p.tag() - TAG_BASE) as VertexId, p.as_edge().expect("edge payload")))
        .collect())
}

/// Merges clusters whose minimum outgoing edge is lighter than their
/// heaviest tree edge until none remain. Returns the final gather.
fn close_separation(sim: &mut Simulator, view: &CliqueView<'_>, st: &mut State) -> Result<BTreeMap<VertexId, Edge>> {
    loop {
        let gathered = gather_min_outgoing(sim, view, st)?;
        let internal = st.max_internal();
        let fixes: Vec<Edge> = gathered
            .iter()
            .filter(|(l, e)| internal.get(l).is_some_and(|m| *e < m))
            .map(|(_, e)| *e)
            .collect();
        if fixes.is_empty() {
            return Ok(gathered);
        }
        log::trace!("separation closure merges {} clusters", fixes.len());
        st.merge(fixes);
    }
}

fn check_separation(sim: &mut Simulator, st: &State, gathered: &BTreeMap<VertexId, Edge>) -> Result<()> {
    for (l, m) in st.max_internal() {
        if let Some(out) = gathered.get(&l) {
            if *out < m {
                return sim.fail(Error::ClusterSeparation {
                    leader: l,
                    internal: m.to_string(),
                    outgoing: out.to_string(),
                });
            }
        }
    }
    Ok(())
}

fn squaring_phase(sim: &mut Simulator, view: &CliqueView<'_>, st: &mut State) -> Result<()> {
    let sizes = st.sizes();
    let s = sizes.values().copied().min().unwrap_or(1);
    let first_member: BTreeMap<VertexId, VertexId> = sizes.keys().map(|&l| (l, l)).collect();
    let items: Vec<Vec<(u64, Edge)>> = (0..st.n)
        .map(|x| {
            view.min_per_cluster(x, &st.labels, &first_member)
                .into_iter()
                .map(|(c, e)| (c as u64, e))
                .collect()
        })
        .collect();
    let at_leaders = sim.converge_min(&st.labels, items)?;
    let mut outgoing = Vec::new();
    for (l, per_cluster) in at_leaders.iter().enumerate() {
        let mut lightest: Vec<Edge> = per_cluster.values().copied().collect();
        lightest.sort();
        lightest.truncate(s);
        outgoing.extend(
            lightest
                .into_iter()
                .map(|e| (l, Payload::edge(TAG_BASE + l as u64, &e))),
        );
    }
    let table = sim.disseminate_all(outgoing)?;

    let mut lists: BTreeMap<VertexId, Vec<Edge>> = BTreeMap::new();
    for p in &table {
        lists
            .entry((p.tag() - TAG_BASE) as VertexId)
            .or_default()
            .push(p.as_edge().expect("edge payload"));
    }
    // limit[c]: edges heavier than this cannot be certified as the
    // component's minimum outgoing edge.
    let mut limit: BTreeMap<VertexId, Edge> = BTreeMap::new();
    for (&l, list) in &lists {
        if list.len() == s {
            limit.insert(l, *list.iter().max().expect("non-empty"));
        }
    }
    let mut candidates: Vec<Edge> = lists.values().flatten().copied().collect();
    candidates.sort();
    candidates.dedup();

    let n = st.n;
    let mut dsu = DisjointSet::new(n);
    let mut comp_limit: Vec<Option<Edge>> = (0..n).map(|v| limit.get(&v).copied()).collect();
    let mut comp_size: Vec<usize> = (0..n).map(|v| sizes.get(&v).copied().unwrap_or(0)).collect();
    let mut merged = vec![false; n];
    let frozen = |root: usize, e: &Edge, lim: &[Option<Edge>], size: &[usize], merged: &[bool]| {
        lim[root].is_some_and(|m| *e > m) || (size[root] >= s * s && merged[root])
    };
    let mut added = Vec::new();
    for e in candidates {
        let (a, b) = (dsu.find(st.labels[e.u]), dsu.find(st.labels[e.v]));
        if a == b {
            continue;
        }
        let blocked_a = frozen(a, &e, &comp_limit, &comp_size, &merged);
        let blocked_b = frozen(b, &e, &comp_limit, &comp_size, &merged);
        if blocked_a && blocked_b {
            continue;
        }
        let lim = match (comp_limit[a], comp_limit[b]) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        let size = comp_size[a] + comp_size[b];
        dsu.union(a, b);
        let r = dsu.find(a);
        comp_limit[r] = lim;
        comp_size[r] = size;
        merged[r] = true;
        added.push(e);
    }
    st.merge(added);
    Ok(())
}

/// Clique MST phases over `view`. After every phase each cluster's
/// heaviest tree edge is lighter than all edges leaving it.
pub fn cc_mst(sim: &mut Simulator, view: &CliqueView<'_>, opts: CcMstOptions) -> Result<CcMstOutput> {
    let n = view.n();
    if n != sim.n() {
        return Err(Error::InvalidArgument(
            "clique size differs from the network size".into(),
        ));
    }
    let mut st = State::new(n);
    let mut counts = Vec::new();
    let mut gathered = if n > 1 {
        gather_min_outgoing(sim, view, &st)?
    } else {
        BTreeMap::new()
    };
    let mut phase = 0;
    while phase < opts.max_phases && st.cluster_count() > opts.target_clusters.max(1) {
        phase += 1;
        match opts.strategy {
            CcMstStrategy::SafeBoruvka => {
                let rounds = 1usize << (phase - 1).min(20);
                for _ in 0..rounds {
                    if st.cluster_count() == 1 {
                        break;
                    }
                    st.merge(gathered.values().copied().collect());
                    gathered = close_separation(sim, view, &mut st)?;
                }
            }
            CcMstStrategy::Squaring => {
                squaring_phase(sim, view, &mut st)?;
                gathered = close_separation(sim, view, &mut st)?;
            }
        }
        check_separation(sim, &st, &gathered)?;
        counts.push(st.cluster_count());
        log::debug!("cc-mst phase {phase}: {} clusters", st.cluster_count());
    }
    let forest = Forest::new(n, st.forest.iter().copied())?;
    if opts.strategy == CcMstStrategy::Squaring {
        let reference = clique_mst_reference(view);
        if let Some(e) = forest.edges().iter().find(|e| !reference.contains(e)) {
            return sim.fail(Error::SquaringDivergence(e.u, e.v));
        }
    }
    let min_cluster_size = st.sizes().values().copied().min().unwrap_or(0);
    Ok(CcMstOutput {
        partition: ClusterPartition {
            labels: ComponentLabeling::from_edges(n, forest.edges()),
            forest,
            phase,
            min_cluster_size,
        },
        cluster_counts: counts,
        phases: phase,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::kruskal_mst;
    use crate::net::SimConfig;

    fn w(x: u64) -> Weight {
        Weight::new(x).unwrap()
    }

    fn clique(n: usize, weight: impl Fn(usize, usize) -> u64) -> Graph {
        let edges = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)));
        Graph::from_edges(n, edges.map(|(a, b)| Edge::new(a, b, w(weight(a, b))))).unwrap()
    }

    fn run(g: &Graph, strategy: CcMstStrategy) -> CcMstOutput {
        let mut sim = Simulator::new(SimConfig::new(g.n(), 1)).unwrap();
        cc_mst(&mut sim, &CliqueView::weighted(g), CcMstOptions::full(g.n(), strategy)).unwrap()
    }

    #[test]
    fn four_clique_in_two_phases() {
        let g = clique(4, |a, b| (a * 4 + b) as u64);
        let out = run(&g, CcMstStrategy::SafeBoruvka);
        assert_eq!(out.forest(), &kruskal_mst(&g));
        assert_eq!(out.partition.cluster_count(), 1);
        assert!(out.phases <= 2);
    }

    #[test]
    fn spanning_path_under_infinite_weights() {
        let path: Vec<Edge> = (0..9).map(|i| Edge::new(i, i + 1, w(9 - i as u64))).collect();
        let g = Graph::from_edges(10, path.clone()).unwrap();
        for strategy in [CcMstStrategy::SafeBoruvka, CcMstStrategy::Squaring] {
            let out = run(&g, strategy);
            assert_eq!(out.forest().edges().len(), 9);
            assert!(!out.forest().has_infinite_edge());
            assert_eq!(out.forest(), &kruskal_mst(&g));
        }
    }

    #[test]
    fn separation_counterexample_path() {
        // Plain Boruvka fragments here would put 5 inside a cluster whose
        // outgoing edge weighs 4.
        let g = Graph::from_edges(
            5,
            [
                Edge::new(0, 1, w(5)),
                Edge::new(1, 2, w(3)),
                Edge::new(2, 3, w(4)),
                Edge::new(3, 4, w(1)),
            ],
        )
        .unwrap();
        let mut sim = Simulator::new(SimConfig::new(5, 1)).unwrap();
        let opts = CcMstOptions {
            max_phases: 1,
            target_clusters: 1,
            strategy: CcMstStrategy::SafeBoruvka,
        };
        let out = cc_mst(&mut sim, &CliqueView::weighted(&g), opts).unwrap();
        assert!(sim.metrics().violations.is_empty());
        let mst = kruskal_mst(&g);
        assert!(out.forest().edges().iter().all(|e| mst.contains(e)));
    }

    #[test]
    fn disconnected_host_uses_infinite_bridges() {
        let g = Graph::unweighted(6, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let mut sim = Simulator::new(SimConfig::new(6, 1)).unwrap();
        let out = cc_mst(
            &mut sim,
            &CliqueView::unit(&g),
            CcMstOptions::full(6, CcMstStrategy::SafeBoruvka),
        )
        .unwrap();
        assert_eq!(out.partition.cluster_count(), 1);
        let finite = out.forest().without_infinite_edges();
        assert_eq!(finite.labeling().component_count(), 3);
        assert_eq!(out.forest(), &clique_mst_reference(&CliqueView::unit(&g)));
    }

    #[test]
    fn prefix_options_and_cap() {
        assert_eq!(ccmst_phase_cap(16), 4);
        assert_eq!(ccmst_phase_cap(1024), 5);
        let o = CcMstOptions::prefix(1024, CcMstStrategy::SafeBoruvka);
        assert_eq!(o.target_clusters, 10);
        assert_eq!(CcMstOptions::prefix(16, CcMstStrategy::SafeBoruvka).target_clusters, 1);
    }
}
