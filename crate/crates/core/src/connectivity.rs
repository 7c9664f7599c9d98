//! Three-phase connectivity: shrink components with the clique MST prefix,
//! sample away the large cuts, then gather the few remaining
//! inter-component edges at node 0.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ComponentGraph, ComponentLabeling, DisjointSet, Edge, Forest, Graph, VertexId};
use crate::mst::{cc_mst, CcMstOptions, CliqueView};
use crate::net::{Message, Payload, Simulator};
use crate::sampling::{log2n, sample_adjacency, SamplingRule, STREAM_SAMPLE};

const TAG_DEGREE: u64 = 0x4A;
const TAG_GATHER: u64 = 0x4B;
const TAG_TREE: u64 = 0x4C;

/// The node every gather targets.
pub const COORDINATOR: VertexId = 0;

/// Gather capacity at the coordinator in phase two, in multiples of `n`.
const PHASE2_INSTANCES: u64 = 8;
const PHASE3_INSTANCES: u64 = 2;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhaseOutput {
    /// Edges added in this phase.
    pub forest: Vec<Edge>,
    /// Everything found so far.
    pub spanning: Forest,
    #[serde(skip)]
    pub component_graph: ComponentGraph,
    pub inter_edges: usize,
    pub finished_leaders: BTreeSet<VertexId>,
    pub unfinished_leaders: BTreeSet<VertexId>,
    pub rounds_used: u64,
    /// Edges gathered at the coordinator (phases two and three).
    pub gathered: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConnOutput {
    pub forest: Forest,
    pub ccmst_phases: usize,
    pub cluster_counts: Vec<usize>,
    pub phases: [PhaseOutput; 3],
}

impl ConnOutput {
    pub fn tree_count(&self) -> usize {
        self.forest.tree_count()
    }
}

/// Every leader of the components of `(V, sub)` learns, for each adjacent
/// component, the minimum-key host edge joining the two. Each node keeps
/// only its lightest edge per target component before sending.
pub fn build_component_graph(sim: &mut Simulator, g: &Graph, sub: &[Edge]) -> Result<ComponentGraph> {
    let labels = ComponentLabeling::from_edges(g.n(), sub);
    let items: Vec<Vec<(u64, Edge)>> = (0..g.n())
        .map(|x| {
            let mut best: BTreeMap<VertexId, Edge> = BTreeMap::new();
            for e in g.incident_edges(x) {
                let target = labels.label(e.other(x));
                if target == labels.label(x) {
                    continue;
                }
                best.entry(target)
                    .and_modify(|b| {
                        if e < *b {
                            *b = e;
                        }
                    })
                    .or_insert(e);
            }
            best.into_iter().map(|(t, e)| (t as u64, e)).collect()
        })
        .collect();
    let at_leaders = sim.converge_min(labels.as_slice(), items)?;
    let mut inter = BTreeMap::new();
    for (leader, map) in at_leaders.iter().enumerate() {
        for (&other, &e) in map {
            let other = other as VertexId;
            let pair = (leader.min(other), leader.max(other));
            let prev = inter.insert(pair, e);
            debug_assert!(prev.is_none() || prev == Some(e));
        }
    }
    Ok(ComponentGraph { labels, inter })
}

fn phase_output(
    sim: &Simulator,
    start: u64,
    forest: Vec<Edge>,
    spanning: Forest,
    cg: ComponentGraph,
    gathered: usize,
) -> PhaseOutput {
    PhaseOutput {
        forest,
        spanning,
        inter_edges: cg.inter_edge_count(),
        finished_leaders: cg.finished_leaders(),
        unfinished_leaders: cg.unfinished_leaders(),
        component_graph: cg,
        rounds_used: sim.metrics().rounds_total - start,
        gathered,
    }
}

/// Phase one: clique MST over unit weights with `INFINITY` on non-edges,
/// stopped once few clusters remain; `INFINITY` edges are then dropped.
pub fn reduce_components(sim: &mut Simulator, g: &Graph) -> Result<(PhaseOutput, usize, Vec<usize>)> {
    let n = g.n();
    let seed = sim.config().seed;
    let start = sim.metrics().rounds_total;
    let opts = CcMstOptions::prefix(n, sim.config().ccmst_strategy);
    let cc = cc_mst(sim, &CliqueView::unit(g), opts)?;
    let t1 = cc.forest().without_infinite_edges();
    let cg = build_component_graph(sim, g, t1.edges())?;
    let l = log2n(n.max(2));
    let unfinished = cg.unfinished_leaders().len();
    if n < 16 {
        log::debug!("n = {n}: unfinished-component bound skipped");
    } else if unfinished as f64 > n as f64 / (l * l) {
        return sim.fail(Error::Bound {
            check: "phase1_unfinished_bound",
            seed,
            detail: format!("{unfinished} unfinished trees for n = {n}"),
        });
    }
    let forest = t1.edges().to_vec();
    let out = phase_output(sim, start, forest, t1, cg, 0);
    Ok((out, cc.phases, cc.cluster_counts))
}

/// Spanning forest of the leader graph induced by `edges`, returned as the
/// witness edges, scanned in key order.
fn leader_forest(edges: &[Edge], labels: &ComponentLabeling) -> Vec<Edge> {
    let mut sorted = edges.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut dsu = DisjointSet::new(labels.len());
    sorted
        .into_iter()
        .filter(|e| dsu.union(labels.label(e.u), labels.label(e.v)))
        .collect()
}

/// Sends every node's edges to the coordinator, which builds a
/// leader forest and disseminates it.
fn gather_and_spread(
    sim: &mut Simulator,
    outgoing: Vec<Vec<Edge>>,
    labels: &ComponentLabeling,
    instances: u64,
) -> Result<(Vec<Edge>, usize)> {
    let n = sim.n();
    let msgs: Vec<Vec<Message>> = outgoing
        .iter()
        .enumerate()
        .map(|(v, list)| {
            list.iter()
                .map(|e| Message::new(v, COORDINATOR, Payload::edge(TAG_GATHER, e)))
                .collect()
        })
        .collect();
    let inboxes = sim.route_batched(msgs, instances)?;
    let received: Vec<Edge> = inboxes[COORDINATOR]
        .iter()
        .map(|m| m.payload.as_edge().expect("edge payload"))
        .collect();
    let tree = leader_forest(&received, labels);
    debug_assert!(tree.len() < n.max(1));
    let items = tree.iter().map(|e| (COORDINATOR, Payload::edge(TAG_TREE, e))).collect();
    let table = sim.disseminate_all(items)?;
    let spread: Vec<Edge> = table.iter().map(|p| p.as_edge().expect("edge payload")).collect();
    Ok((spread, received.len()))
}

/// Phase two: unfinished leaders sample their inter-component edges by
/// rounded degree and the coordinator keeps a spanning forest of the sample.
pub fn remove_large_cuts(sim: &mut Simulator, g: &Graph, prev: &PhaseOutput) -> Result<PhaseOutput> {
    let n = g.n();
    let seed = sim.config().seed;
    let c = sim.config().c_sample;
    let start = sim.metrics().rounds_total;
    let cg = &prev.component_graph;

    let mut adj: Vec<Vec<(VertexId, Edge)>> = vec![Vec::new(); n];
    for (&(a, b), &e) in &cg.inter {
        adj[a].push((b, e));
        adj[b].push((a, e));
    }
    sim.broadcast_value(adj.iter().map(|a| Payload::value(TAG_DEGREE, a.len() as u64)).collect())?;
    let outcome = sample_adjacency(&adj, n, c, SamplingRule::PerEdge, |v| sim.node_rng(v, STREAM_SAMPLE))?;
    let total: usize = outcome.by_sampler.iter().map(Vec::len).sum();
    if total > 8 * n {
        return sim.fail(Error::Bound {
            check: "phase2_sample_bound",
            seed,
            detail: format!("{total} sampled edges exceed 8n = {}", 8 * n),
        });
    }
    let (t2, gathered) = gather_and_spread(sim, outcome.by_sampler, &cg.labels, PHASE2_INSTANCES)?;
    let spanning = Forest::new(n, prev.spanning.edges().iter().chain(&t2).copied())?;
    let g2 = build_component_graph(sim, g, spanning.edges())?;
    Ok(phase_output(sim, start, t2, spanning, g2, gathered))
}

/// Phase three: the remaining inter-component edges go to the coordinator,
/// which completes the forest.
pub fn handle_small_cuts(sim: &mut Simulator, g: &Graph, prev: &PhaseOutput) -> Result<PhaseOutput> {
    let n = g.n();
    let seed = sim.config().seed;
    let start = sim.metrics().rounds_total;
    let cg = &prev.component_graph;
    if cg.inter_edge_count() > 2 * n {
        return sim.fail(Error::Bound {
            check: "phase3_edge_bound",
            seed,
            detail: format!("{} inter-component edges exceed 2n = {}", cg.inter_edge_count(), 2 * n),
        });
    }
    let mut outgoing: Vec<Vec<Edge>> = vec![Vec::new(); n];
    for (&(a, _), &e) in &cg.inter {
        outgoing[a].push(e);
    }
    let (t3, gathered) = gather_and_spread(sim, outgoing, &cg.labels, PHASE3_INSTANCES)?;
    let spanning = Forest::new(n, prev.spanning.edges().iter().chain(&t3).copied())?;
    let g3 = build_component_graph(sim, g, spanning.edges())?;
    if g3.inter_edge_count() != 0 {
        return sim.fail(Error::Bound {
            check: "phase3_unfinished",
            seed,
            detail: format!("{} inter-component edges survive", g3.inter_edge_count()),
        });
    }
    Ok(phase_output(sim, start, t3, spanning, g3, gathered))
}

/// Maximal spanning forest of `g`, known to every node.
pub fn conn(sim: &mut Simulator, g: &Graph) -> Result<ConnOutput> {
    if g.n() != sim.n() {
        return Err(Error::InvalidArgument(
            "graph size differs from the network size".into(),
        ));
    }
    sim.set_phase("phase1");
    let (p1, ccmst_phases, cluster_counts) = reduce_components(sim, g)?;
    sim.set_phase("phase2");
    let p2 = remove_large_cuts(sim, g, &p1)?;
    sim.set_phase("phase3");
    let p3 = handle_small_cuts(sim, g, &p2)?;
    let forest = p3.spanning.clone();
    if forest.has_infinite_edge() {
        return Err(Error::InvalidGraph("infinite edge in the spanning forest".into()));
    }
    Ok(ConnOutput {
        forest,
        ccmst_phases,
        cluster_counts,
        phases: [p1, p2, p3],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_component_graph_reference, connected_components};
    use crate::net::SimConfig;

    fn sim(n: usize) -> Simulator {
        Simulator::new(SimConfig::new(n, 7)).unwrap()
    }

    fn complete_on(vertices: std::ops::Range<usize>) -> Vec<(usize, usize)> {
        let v: Vec<usize> = vertices.collect();
        v.iter()
            .enumerate()
            .flat_map(|(i, &a)| v[i + 1..].iter().map(move |&b| (a, b)))
            .collect()
    }

    #[test]
    fn component_graph_examples() {
        let k4 = Graph::unweighted(4, &complete_on(0..4)).unwrap();
        let mut s = sim(4);
        let spanning = build_component_graph(&mut s, &k4, k4.edges()).unwrap();
        assert_eq!(spanning.inter_edge_count(), 0);
        let empty = build_component_graph(&mut s, &k4, &[]).unwrap();
        assert_eq!(empty.inter_edge_count(), 6);
        assert_eq!(empty, build_component_graph_reference(&k4, &[]));
    }

    #[test]
    fn empty_graph_is_all_singletons() {
        let g = Graph::empty(9);
        let out = conn(&mut sim(9), &g).unwrap();
        assert!(out.forest.is_empty());
        assert_eq!(out.tree_count(), 9);
        assert_eq!(out.phases[1].gathered, 0);
    }

    #[test]
    fn two_cliques_finish_in_phase_one() {
        let mut pairs = complete_on(0..10);
        pairs.extend(complete_on(10..20));
        let g = Graph::unweighted(20, &pairs).unwrap();
        let out = conn(&mut sim(20), &g).unwrap();
        assert_eq!(out.tree_count(), 2);
        assert_eq!(out.phases[0].spanning.tree_count(), 2);
        assert!(out.phases[0].unfinished_leaders.is_empty());
    }

    #[test]
    fn path_matches_oracle() {
        let pairs: Vec<_> = (0..39).map(|i| (i, i + 1)).collect();
        let g = Graph::unweighted(40, &pairs).unwrap();
        let out = conn(&mut sim(40), &g).unwrap();
        assert_eq!(out.tree_count(), 1);
        assert_eq!(out.forest.labeling(), connected_components(&g));
    }

    #[test]
    fn phase_rounds_do_not_depend_on_the_graph() {
        let a = Graph::unweighted(32, &complete_on(0..32)).unwrap();
        let b = Graph::unweighted(32, &[(0, 1), (5, 9)]).unwrap();
        let ra = conn(&mut sim(32), &a).unwrap();
        let rb = conn(&mut sim(32), &b).unwrap();
        assert_eq!(ra.phases[1].rounds_used, rb.phases[1].rounds_used);
        assert_eq!(ra.phases[2].rounds_used, rb.phases[2].rounds_used);
    }
}
