use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexId;
use crate::net::{Message, Payload, Simulator};

use super::ContractedGraph;

const TAG_LABEL: u64 = 0x1A;
const TAG_NOTIFY: u64 = 0x1B;
const TAG_CHUNK: u64 = 0x1C;
const TAG_FORWARD: u64 = 0x1D;
const TAG_INTER: u64 = 0x1E;
const NONE: u64 = u64::MAX;

/// Rank partition of the contracted edges, guardians and supporters.
///
/// Part `i` (1-based) holds ranks `(i - 1) * n + 1 ..= i * n` and is kept by
/// guardian node `i`. Every vertex `v` with positive degree owns the block
/// of consecutive supporter ids `sup(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionAssignment {
    pub n: usize,
    pub rho: usize,
    pub parts: usize,
    pub degrees: Vec<usize>,
    pub supporters: BTreeMap<VertexId, Range<usize>>,
    /// Global rank of every edge, aligned with the contracted graph's key order.
    pub ranks: Vec<u64>,
}

impl PartitionAssignment {
    pub fn guardian(&self, part: usize) -> VertexId {
        part
    }

    pub fn part_of_rank(&self, rank: u64) -> usize {
        ((rank - 1) / self.n as u64) as usize + 1
    }

    pub fn sup(&self, v: VertexId) -> Range<usize> {
        self.supporters.get(&v).cloned().unwrap_or(0..0)
    }

    /// Incident edges per supporter of `v`: `ceil(deg(v) / |sup(v)|)`.
    pub fn chunk_size(&self, v: VertexId) -> usize {
        let k = self.sup(v).len().max(1);
        self.degrees[v].div_ceil(k).max(1)
    }

    /// Supporter of `v` responsible for `v`'s incident edge at `position`
    /// in key order.
    pub fn supporter_at(&self, v: VertexId, position: usize) -> VertexId {
        self.sup(v).start + position / self.chunk_size(v)
    }

    /// Routing instances that cover one supporter's label traffic:
    /// fewer than `2 rho sqrt(n)` edges per chunk, each needing up to
    /// `parts` labels.
    pub fn label_instances(&self) -> u64 {
        (self.rho * self.rho) as u64 + 1
    }

    /// Records the ranks and derives the part count.
    pub fn with_ranks(mut self, ranks: Vec<u64>) -> Self {
        let m = ranks.len();
        self.parts = m.div_ceil(self.n);
        self.ranks = ranks;
        self
    }
}

/// `max(1, ceil(2 * total_degree / n^(3/2)))`.
pub fn supporter_rho(total_degree: usize, n: usize) -> usize {
    let scale = (n as f64).powf(1.5);
    ((2.0 * total_degree as f64 / scale).ceil() as usize).max(1)
}

/// Supporters per vertex: blocks of `max(1, floor(deg / (rho sqrt n)))`
/// consecutive ids, carved in increasing vertex order. Every node computes
/// the same result from the broadcast degrees.
pub fn assign_guardians_and_supporters(degrees: &[usize], n: usize, rho: usize) -> Result<PartitionAssignment> {
    if n == 0 || rho == 0 {
        return Err(Error::InvalidArgument("n and rho must be positive".into()));
    }
    let unit = rho as f64 * (n as f64).sqrt();
    let mut next = 0usize;
    let mut supporters = BTreeMap::new();
    for (v, &d) in degrees.iter().enumerate() {
        if d == 0 {
            continue;
        }
        let count = ((d as f64 / unit).floor() as usize).max(1);
        supporters.insert(v, next..next + count);
        next += count;
    }
    if next > n {
        return Err(Error::Capacity { needed: next, n });
    }
    Ok(PartitionAssignment {
        n,
        rho,
        parts: 0,
        degrees: degrees.to_vec(),
        supporters,
        ranks: Vec::new(),
    })
}

/// A vertex's component label under each guardian's forest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelVector {
    pub owner: VertexId,
    /// `labels[i - 1]` is the label under part `i`'s forest.
    pub labels: Vec<VertexId>,
}

/// Inter-component edge as seen by a guardian: leader endpoints and rank.
pub type LabelledEdge = (VertexId, VertexId, u64);

/// Delivers to every guardian `i` the edges of parts `j < i` whose
/// endpoints carry different labels under part `i`'s forest.
///
/// `vectors` is indexed by vertex id; vertices of degree 0 are ignored.
pub fn route_labels(
    sim: &mut Simulator,
    g: &ContractedGraph,
    asg: &PartitionAssignment,
    vectors: &BTreeMap<VertexId, LabelVector>,
) -> Result<Vec<Vec<LabelledEdge>>> {
    let n = sim.n();
    let p = asg.parts;
    let seed = sim.config().seed;
    for (v, vec) in vectors {
        if vec.labels.len() != p || vec.owner != *v {
            return Err(Error::InvalidArgument(format!(
                "label vector of {v} has the wrong shape"
            )));
        }
    }
    // Incident edges per vertex, in key order: (edge index, other endpoint).
    let mut incident: Vec<Vec<(usize, VertexId)>> = vec![Vec::new(); g.n()];
    for (idx, e) in g.edges().iter().enumerate() {
        let (a, b) = g.ends(e);
        incident[a].push((idx, b));
        incident[b].push((idx, a));
    }

    // Each vertex hands its label vector to all of its supporters.
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    for (&v, vec) in vectors {
        for s in asg.sup(v) {
            for (i, &label) in vec.labels.iter().enumerate() {
                out[v].push(Message::new(
                    v,
                    s,
                    Payload::from_words(&[TAG_LABEL, v as u64, i as u64 + 1, label as u64]),
                ));
            }
        }
    }
    let inboxes = sim.route_idt(out)?;
    let mut held_labels: Vec<BTreeMap<usize, VertexId>> = vec![BTreeMap::new(); n];
    for (s, inbox) in inboxes.iter().enumerate() {
        for m in inbox {
            held_labels[s].insert(m.payload.word(2) as usize, m.payload.word(3) as VertexId);
        }
    }

    // The smaller endpoint tells the larger one which of its supporters
    // holds the shared edge.
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    for (a, list) in incident.iter().enumerate() {
        for (pos, &(idx, b)) in list.iter().enumerate() {
            if a < b {
                let r = asg.ranks[idx];
                let s = asg.supporter_at(a, pos) as u64;
                out[a].push(Message::new(a, b, Payload::from_words(&[TAG_NOTIFY, r, s])));
            }
        }
    }
    let inboxes = sim.route_idt(out)?;
    let mut partner_supporter: Vec<BTreeMap<u64, u64>> = vec![BTreeMap::new(); n];
    for (b, inbox) in inboxes.iter().enumerate() {
        for m in inbox {
            partner_supporter[b].insert(m.payload.word(1), m.payload.word(2));
        }
    }

    // Chunks of incident edges go to the supporters.
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    for (v, list) in incident.iter().enumerate() {
        for (pos, &(idx, other)) in list.iter().enumerate() {
            let r = asg.ranks[idx];
            let partner = if v > other { partner_supporter[v][&r] } else { NONE };
            let s = asg.supporter_at(v, pos);
            out[v].push(Message::new(
                v,
                s,
                Payload::from_words(&[TAG_CHUNK, r, other as u64, partner]),
            ));
        }
    }
    let inboxes = sim.route_idt(out)?;
    // chunk[s]: (owner, rank, other endpoint, partner supporter)
    let chunk: Vec<Vec<(VertexId, u64, VertexId, u64)>> = inboxes
        .iter()
        .map(|inbox| {
            inbox
                .iter()
                .map(|m| {
                    (
                        m.src,
                        m.payload.word(1),
                        m.payload.word(2) as VertexId,
                        m.payload.word(3),
                    )
                })
                .collect()
        })
        .collect();

    // Supporters of the larger endpoint forward its labels for every later
    // part to the smaller endpoint's supporter.
    let instances = asg.label_instances();
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    for (s, entries) in chunk.iter().enumerate() {
        for &(owner, r, other, partner) in entries {
            if owner < other {
                continue;
            }
            for i in asg.part_of_rank(r) + 1..=p {
                let label = held_labels[s][&i] as u64;
                out[s].push(Message::new(
                    s,
                    partner as usize,
                    Payload::from_words(&[TAG_FORWARD, r, i as u64, label]),
                ));
            }
        }
    }
    let inboxes = sim.route_batched(out, instances)?;

    // The smaller endpoint's supporter compares labels and reports
    // separated edges to the guardian of that part.
    let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
    let mut per_guardian = vec![0usize; p + 1];
    for (s, inbox) in inboxes.iter().enumerate() {
        let own: BTreeMap<u64, (VertexId, VertexId)> = chunk[s]
            .iter()
            .filter(|&&(owner, _, other, _)| owner < other)
            .map(|&(owner, r, other, _)| (r, (owner, other)))
            .collect();
        for m in inbox {
            let (r, i, label_b) = (
                m.payload.word(1),
                m.payload.word(2) as usize,
                m.payload.word(3) as VertexId,
            );
            let (a, b) = own[&r];
            if held_labels[s][&i] != label_b {
                per_guardian[i] += 1;
                let dst = asg.guardian(i);
                out[s].push(Message::new(
                    s,
                    dst,
                    Payload::from_words(&[TAG_INTER, a as u64, b as u64, r]),
                ));
            }
        }
    }
    let vertex_count = vectors.len();
    if let Some((i, &count)) = per_guardian.iter().enumerate().find(|(_, &c)| c > 2 * vertex_count) {
        return sim.fail(Error::Bound {
            check: "route_labels_edge_bound",
            seed,
            detail: format!("guardian {i} would receive {count} edges for {vertex_count} vertices"),
        });
    }
    let inboxes = sim.route_batched(out, instances)?;
    let mut result: Vec<Vec<LabelledEdge>> = vec![Vec::new(); p];
    for i in 1..=p {
        let mut list: Vec<LabelledEdge> = inboxes[asg.guardian(i)]
            .iter()
            .map(|m| {
                (
                    m.payload.word(1) as VertexId,
                    m.payload.word(2) as VertexId,
                    m.payload.word(3),
                )
            })
            .collect();
        list.sort_by_key(|&(_, _, r)| r);
        result[i - 1] = list;
    }
    Ok(result)
}
