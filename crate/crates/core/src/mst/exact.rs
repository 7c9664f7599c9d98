use serde::Serialize;

use crate::connectivity::build_component_graph;
use crate::error::{Error, Result};
use crate::graph::{Edge, EdgeClass, Forest, Graph, PathMax};
use crate::net::{bernoulli, Message, Payload, Simulator};
use crate::sampling::{log2n, STREAM_KKT};

use super::ccmst::{cc_mst, CcMstOptions, CliqueView};
use super::sqmst::{sq_mst, SqMstOutput};
use super::ContractedGraph;

const TAG_SAMPLED: u64 = 0x3A;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactMstOutput {
    pub forest: Forest,
    /// Minimum spanning forest prefix from the clique phases.
    pub prefix: Forest,
    pub ccmst_phases: usize,
    pub cluster_counts: Vec<usize>,
    /// Leaders with at least one inter-component edge after the prefix.
    pub unfinished: usize,
    pub inter_edges: usize,
    pub sampled_edges: usize,
    pub light_edges: usize,
    /// Inter-component edges classified heavy against the sampled forest.
    pub heavy: Vec<Edge>,
    pub sq_h: SqMstOutput,
    pub sq_light: SqMstOutput,
}

/// Minimum spanning forest of `g` under the `(w, u, v)` key, known to
/// every node. Non-edges count as `INFINITY` and never enter the result.
pub fn exact_mst(sim: &mut Simulator, g: &Graph) -> Result<ExactMstOutput> {
    let n = sim.n();
    let seed = sim.config().seed;
    let strategy = sim.config().ccmst_strategy;
    if g.n() != n {
        return Err(Error::InvalidArgument(
            "graph size differs from the network size".into(),
        ));
    }

    sim.set_phase("ccmst");
    let cc = cc_mst(sim, &CliqueView::weighted(g), CcMstOptions::prefix(n, strategy))?;
    let prefix = cc.forest().without_infinite_edges();

    sim.set_phase("kkt_sample");
    let g1 = build_component_graph(sim, g, prefix.edges())?;
    let unfinished = g1.unfinished_leaders().len();
    let l = log2n(n.max(2));
    if n < 16 {
        log::debug!("n = {n}: unfinished-component bound skipped");
    } else if unfinished as f64 > n as f64 / (l * l) {
        return sim.fail(Error::Bound {
            check: "ccmst_unfinished_bound",
            seed,
            detail: format!("{unfinished} unfinished components after the clique phases"),
        });
    }
    let contracted = ContractedGraph::new(g1.labels.clone(), g1.witnesses())?;
    let p = 1.0 / (n as f64).sqrt();
    let cap = 4.0 * (n as f64).powf(1.5);
    // The smaller leader flips the coin for each pair and tells the other.
    let mut sampled = Vec::new();
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    for leader in g1.leaders() {
        let mut rng = sim.node_rng(leader, STREAM_KKT);
        for e in contracted.edges() {
            let (a, b) = contracted.ends(e);
            if a == leader && bernoulli(&mut rng, p) {
                sampled.push(*e);
                out[a].push(Message::new(a, b, Payload::edge(TAG_SAMPLED, e)));
            }
        }
    }
    sim.route_idt(out)?;
    if sampled.len() as f64 > cap {
        return sim.fail(Error::Bound {
            check: "kkt_sample_bound",
            seed,
            detail: format!("{} sampled edges exceed 4 n^(3/2)", sampled.len()),
        });
    }
    let h = contracted.subgraph(|e| sampled.binary_search(e).is_ok());

    sim.set_phase("sqmst_h");
    let sq_h = sq_mst(sim, &h)?;

    sim.set_phase("flight_filter");
    let leader_forest = Forest::new(
        n,
        sq_h.edges.iter().map(|e| {
            let (a, b) = contracted.ends(e);
            Edge::new(a, b, e.w)
        }),
    )?;
    let path_max = PathMax::new(&leader_forest);
    let is_light = |e: &Edge| {
        let (a, b) = contracted.ends(e);
        path_max.classify(&Edge::new(a, b, e.w)) == EdgeClass::Light
    };
    let heavy: Vec<Edge> = contracted.edges().iter().copied().filter(|e| !is_light(e)).collect();
    let light = contracted.subgraph(is_light);
    if light.m() as f64 > cap {
        return sim.fail(Error::Bound {
            check: "flight_edge_bound",
            seed,
            detail: format!("{} light edges exceed 4 n^(3/2)", light.m()),
        });
    }

    sim.set_phase("sqmst_el");
    let sq_light = sq_mst(sim, &light)?;
    let forest = Forest::new(n, prefix.edges().iter().chain(sq_light.edges.iter()).copied())?;

    Ok(ExactMstOutput {
        forest,
        prefix,
        ccmst_phases: cc.phases,
        cluster_counts: cc.cluster_counts,
        unfinished,
        inter_edges: contracted.m(),
        sampled_edges: h.m(),
        light_edges: light.m(),
        heavy,
        sq_h,
        sq_light,
    })
}
