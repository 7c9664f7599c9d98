use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{DisjointSet, Edge, VertexId};
use crate::net::{Message, Payload, Simulator};
use crate::sampling::{sample_adjacency, SamplingRule, STREAM_SAMPLE};

use super::route_labels::{assign_guardians_and_supporters, route_labels, supporter_rho, LabelVector};
use super::ContractedGraph;

const TAG_DEGREE: u64 = 0x2A;
const TAG_RANK: u64 = 0x2B;
const TAG_PART: u64 = 0x2C;
const TAG_SAMPLE: u64 = 0x2D;
const TAG_LABEL: u64 = 0x2E;
const TAG_COUNT: u64 = 0x2F;
const TAG_RESULT: u64 = 0x30;

/// Largest gather at a guardian, in multiples of `n`.
const SAMPLE_INSTANCES: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SqMstOutput {
    /// Minimum spanning forest of the contracted graph, as witness edges.
    pub edges: Vec<Edge>,
    pub parts: usize,
    pub rho: usize,
    /// Distinct sampled edges gathered by each guardian.
    pub sample_sizes: Vec<usize>,
    /// Separated earlier edges delivered to each guardian.
    pub separated_sizes: Vec<usize>,
    /// Every guardian's keep/drop decision, in rank order.
    pub decisions: Vec<(Edge, bool)>,
}

/// Minimum spanning forest of a contracted graph.
///
/// Edges are ranked by key and split into parts of `n`; guardian `i`
/// receives part `i`, learns how the lighter parts connect the vertices
/// through a sampled forest plus the edges that forest leaves separated,
/// and keeps an edge of its part exactly when no lighter edge already
/// joins its endpoints.
pub fn sq_mst(sim: &mut Simulator, g: &ContractedGraph) -> Result<SqMstOutput> {
    let n = sim.n();
    let seed = sim.config().seed;
    let c = sim.config().c_sample;
    if g.n() != n {
        return Err(Error::InvalidArgument("contracted graph must span the network".into()));
    }
    let edges = g.edges();
    let m = edges.len();
    let base = sim.phase().to_string();
    let stage = |name: &str| format!("{base}.{name}");

    sim.set_phase(&stage("degrees"));
    let degrees = g.degrees();
    sim.broadcast_value(degrees.iter().map(|&d| Payload::value(TAG_DEGREE, d as u64)).collect())?;
    let rho = supporter_rho(degrees.iter().sum(), n);
    let asg = match assign_guardians_and_supporters(&degrees, n, rho) {
        Ok(a) => a,
        Err(e) => return sim.fail(e),
    };

    sim.set_phase(&stage("sort"));
    // The smaller endpoint holds each edge for sorting.
    let mut held: Vec<Vec<Edge>> = vec![Vec::new(); n];
    let mut held_idx: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, e) in edges.iter().enumerate() {
        let (a, _) = g.ends(e);
        held[a].push(*e);
        held_idx[a].push(idx);
    }
    let ranked = sim.dist_sort(&held)?;
    let mut ranks = vec![0u64; m];
    for (a, list) in held_idx.iter().enumerate() {
        for (k, &idx) in list.iter().enumerate() {
            ranks[idx] = ranked[a][k];
        }
    }
    let asg = asg.with_ranks(ranks.clone());
    let p = asg.parts;
    if p >= n {
        return Err(Error::InvalidArgument(format!(
            "{p} parts need more than {n} guardians"
        )));
    }

    // The larger endpoint learns the rank from the holder.
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    for (idx, e) in edges.iter().enumerate() {
        let (a, b) = g.ends(e);
        out[a].push(Message::new(a, b, Payload::value(TAG_RANK, ranks[idx])));
    }
    sim.route_idt(out)?;

    // Parts travel to their guardians.
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    for (idx, e) in edges.iter().enumerate() {
        let (a, _) = g.ends(e);
        let dst = asg.guardian(asg.part_of_rank(ranks[idx]));
        out[a].push(Message::new(a, dst, Payload::edge(TAG_PART, e)));
    }
    let inboxes = sim.route_idt(out)?;
    let part_edges: Vec<Vec<Edge>> = (1..=p)
        .map(|i| {
            let mut list: Vec<Edge> = inboxes[asg.guardian(i)]
                .iter()
                .map(|msg| msg.payload.as_edge().expect("edge payload"))
                .collect();
            list.sort();
            list
        })
        .collect();

    sim.set_phase(&stage("sample"));
    // Every vertex samples its edges of each lighter prefix and sends the
    // picks to that prefix's guardian.
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    let mut sample_sizes = vec![0usize; p];
    for i in 2..=p {
        let limit = ((i - 1) * n) as u64;
        let mut adj: Vec<Vec<(VertexId, Edge)>> = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            if ranks[idx] <= limit {
                let (a, b) = g.ends(e);
                adj[a].push((b, *e));
                adj[b].push((a, *e));
            }
        }
        let stream = STREAM_SAMPLE ^ ((i as u64) << 16);
        let outcome = sample_adjacency(&adj, n, c, SamplingRule::PerVertex, |v| sim.node_rng(v, stream))?;
        sample_sizes[i - 1] = outcome.sampled.len();
        let dst = asg.guardian(i);
        for (v, picks) in outcome.by_sampler.iter().enumerate() {
            out[v].extend(picks.iter().map(|e| Message::new(v, dst, Payload::edge(TAG_SAMPLE, e))));
        }
    }
    if let Some((i, &size)) = sample_sizes.iter().enumerate().find(|(_, &s)| s > 8 * n) {
        return sim.fail(Error::Bound {
            check: "sqmst_sample_bound",
            seed,
            detail: format!("guardian {} sampled {size} edges (limit {})", i + 1, 8 * n),
        });
    }
    let inboxes = sim.route_batched(out, SAMPLE_INSTANCES)?;

    sim.set_phase(&stage("forest"));
    // Guardians build their sampled forests and return the labels.
    let vertices = g.vertices();
    let mut forests: Vec<Vec<(VertexId, VertexId)>> = vec![Vec::new(); p];
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    for i in 1..=p {
        let gi = asg.guardian(i);
        let mut sampled: Vec<Edge> = inboxes[gi]
            .iter()
            .map(|msg| msg.payload.as_edge().expect("edge payload"))
            .collect();
        sampled.sort();
        sampled.dedup();
        let mut dsu = DisjointSet::new(n);
        for e in &sampled {
            let (a, b) = g.ends(e);
            if dsu.union(a, b) {
                forests[i - 1].push((a, b));
            }
        }
        let mut min_of: BTreeMap<usize, VertexId> = BTreeMap::new();
        for &v in &vertices {
            min_of.entry(dsu.find(v)).or_insert(v);
        }
        for &v in &vertices {
            let label = min_of[&dsu.find(v)];
            out[gi].push(Message::new(
                gi,
                v,
                Payload::from_words(&[TAG_LABEL, i as u64, label as u64]),
            ));
        }
    }
    let inboxes = sim.route_idt(out)?;
    let vectors: BTreeMap<VertexId, LabelVector> = vertices
        .iter()
        .map(|&v| {
            let mut labels = vec![v; p];
            for msg in &inboxes[v] {
                labels[msg.payload.word(1) as usize - 1] = msg.payload.word(2) as VertexId;
            }
            (v, LabelVector { owner: v, labels })
        })
        .collect();

    sim.set_phase(&stage("route_labels"));
    let separated = route_labels(sim, g, &asg, &vectors)?;

    sim.set_phase(&stage("filter"));
    // Rank-order filter at every guardian.
    let mut kept: Vec<Vec<Edge>> = vec![Vec::new(); p];
    let mut decisions = Vec::with_capacity(m);
    for i in 1..=p {
        let mut dsu = DisjointSet::new(n);
        for &(a, b) in &forests[i - 1] {
            dsu.union(a, b);
        }
        for &(a, b, _) in &separated[i - 1] {
            dsu.union(a, b);
        }
        for e in &part_edges[i - 1] {
            let (a, b) = g.ends(e);
            let keep = dsu.union(a, b);
            if keep {
                kept[i - 1].push(*e);
            }
            decisions.push((*e, keep));
        }
    }

    let counts: Vec<Payload> = (0..n)
        .map(|v| {
            let count = if (1..=p).contains(&v) { kept[v - 1].len() } else { 0 };
            Payload::value(TAG_COUNT, count as u64)
        })
        .collect();
    sim.broadcast_value(counts)?;
    let items: Vec<(VertexId, Payload)> = (1..=p)
        .flat_map(|i| kept[i - 1].iter().map(move |e| (i, Payload::edge(TAG_RESULT, e))))
        .collect();
    let table = sim.disseminate_all(items)?;
    let mut result: Vec<Edge> = table.iter().map(|p| p.as_edge().expect("edge payload")).collect();
    result.sort();
    sim.set_phase(&base);

    Ok(SqMstOutput {
        edges: result,
        parts: p,
        rho,
        sample_sizes,
        separated_sizes: separated.iter().map(Vec::len).collect(),
        decisions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ComponentLabeling, Graph, Weight};
    use crate::net::SimConfig;

    fn weighted_clique_edges(vertices: &[usize], base: u64) -> Vec<Edge> {
        let mut out = Vec::new();
        let mut w = base;
        for (k, &a) in vertices.iter().enumerate() {
            for &b in &vertices[k + 1..] {
                w = (w * 7919 + 13) % 100_003;
                out.push(Edge::new(a, b, Weight::new(w).unwrap()));
            }
        }
        out
    }

    #[test]
    fn single_part_is_local_kruskal() {
        let n = 32;
        let g = Graph::from_edges(n, weighted_clique_edges(&(0..7).collect::<Vec<_>>(), 5)).unwrap();
        let cg = ContractedGraph::from_graph(&g);
        let mut sim = Simulator::new(SimConfig::new(n, 2)).unwrap();
        let out = sq_mst(&mut sim, &cg).unwrap();
        assert_eq!(out.parts, 1);
        assert_eq!(out.edges, cg.kruskal_reference());
    }

    #[test]
    fn two_cliques_give_two_trees() {
        let n = 32;
        let mut edges = weighted_clique_edges(&(0..9).collect::<Vec<_>>(), 3);
        edges.extend(weighted_clique_edges(&(9..18).collect::<Vec<_>>(), 11));
        let g = Graph::from_edges(n, edges).unwrap();
        let cg = ContractedGraph::from_graph(&g);
        let mut config = SimConfig::new(n, 4);
        config.c_sample = 0.2;
        let mut sim = Simulator::new(config).unwrap();
        let out = sq_mst(&mut sim, &cg).unwrap();
        assert!(out.parts > 2);
        assert_eq!(out.edges, cg.kruskal_reference());
        assert_eq!(out.edges.len(), 16);
    }

    #[test]
    fn contracted_vertices_use_witness_edges() {
        let n = 16;
        let labels = ComponentLabeling::from_edges(n, &[Edge::new(0, 1, Weight::ONE), Edge::new(2, 3, Weight::ONE)]);
        let w = |x| Weight::new(x).unwrap();
        let cg = ContractedGraph::new(
            labels,
            [Edge::new(1, 3, w(4)), Edge::new(0, 5, w(9)), Edge::new(3, 5, w(2))],
        )
        .unwrap();
        let mut sim = Simulator::new(SimConfig::new(n, 4)).unwrap();
        let out = sq_mst(&mut sim, &cg).unwrap();
        assert_eq!(out.edges, vec![Edge::new(3, 5, w(2)), Edge::new(1, 3, w(4))]);
    }

    #[test]
    fn empty_input() {
        let n = 8;
        let cg = ContractedGraph::from_graph(&Graph::empty(n));
        let mut sim = Simulator::new(SimConfig::new(n, 4)).unwrap();
        let out = sq_mst(&mut sim, &cg).unwrap();
        assert!(out.edges.is_empty());
        assert_eq!(out.parts, 0);
    }
}
