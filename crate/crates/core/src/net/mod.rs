//! Lock-step Congested Clique simulator.
//!
//! Raw rounds go through [`Simulator::run_round`], which enforces one
//! message per ordered link per round and a four-word payload cap. The
//! constant-round routing, sorting and aggregation building blocks are
//! modelled as primitives: their preconditions are validated on every call
//! and a configurable number of rounds is charged.

mod rng;

use std::collections::BTreeMap;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, VertexId, Weight};

pub use rng::{bernoulli, derive_stream};

pub const MAX_PAYLOAD_WORDS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CcMstStrategy {
    #[default]
    SafeBoruvka,
    Squaring,
}

impl std::str::FromStr for CcMstStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "safe-boruvka" => Ok(CcMstStrategy::SafeBoruvka),
            "squaring" => Ok(CcMstStrategy::Squaring),
            other => Err(Error::InvalidArgument(format!("unknown CC-MST strategy `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub seed: u64,
    /// Rounds charged per routing call.
    pub route_cost: u64,
    /// Rounds charged per distributed sort.
    pub sort_cost: u64,
    /// Rounds charged per group-min aggregation.
    pub agg_cost: u64,
    /// Constant in front of `log^2 n / rd(e)` in the sampling probability.
    pub c_sample: f64,
    pub ccmst_strategy: CcMstStrategy,
}

impl SimConfig {
    pub fn new(n: usize, seed: u64) -> Self {
        SimConfig {
            n,
            seed,
            route_cost: 2,
            sort_cost: 3,
            agg_cost: 2,
            c_sample: 50.0,
            ccmst_strategy: CcMstStrategy::SafeBoruvka,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be positive".into()));
        }
        if self.route_cost == 0 || self.sort_cost == 0 || self.agg_cost == 0 {
            return Err(Error::InvalidArgument("primitive costs must be >= 1".into()));
        }
        if !(self.c_sample > 0.0 && self.c_sample.is_finite()) {
            return Err(Error::InvalidArgument("c_sample must be a positive number".into()));
        }
        Ok(())
    }
}

/// At most four machine words: a tag plus up to two ids and a weight.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Payload(SmallVec<[u64; MAX_PAYLOAD_WORDS]>);

impl Payload {
    pub fn from_words(words: &[u64]) -> Self {
        Payload(SmallVec::from_slice(words))
    }

    pub fn value(tag: u64, x: u64) -> Self {
        Payload::from_words(&[tag, x])
    }

    pub fn edge(tag: u64, e: &Edge) -> Self {
        Payload::from_words(&[tag, e.u as u64, e.v as u64, e.w.raw()])
    }

    pub fn words(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tag(&self) -> u64 {
        self.0.first().copied().unwrap_or(0)
    }

    pub fn word(&self, i: usize) -> u64 {
        self.0[i]
    }

    /// Decodes a payload built by [`Payload::edge`].
    pub fn as_edge(&self) -> Option<Edge> {
        if self.0.len() != 4 {
            return None;
        }
        Some(Edge::new(
            self.0[1] as usize,
            self.0[2] as usize,
            Weight::from_raw(self.0[3]),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub src: VertexId,
    pub dst: VertexId,
    pub payload: Payload,
}

impl Message {
    pub fn new(src: VertexId, dst: VertexId, payload: Payload) -> Self {
        Message { src, dst, payload }
    }
}

/// Accumulated round and message accounting for one simulator run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundMetrics {
    pub rounds_total: u64,
    pub rounds_by_phase: BTreeMap<String, u64>,
    pub messages_total: u64,
    pub messages_by_phase: BTreeMap<String, u64>,
    /// Raw rounds only: the largest number of messages one node sent in a round.
    pub max_send_per_round: u64,
    pub max_recv_per_round: u64,
    /// Largest per-node load inside a single routing instance.
    pub max_primitive_send: u64,
    pub max_primitive_recv: u64,
    pub primitive_calls: BTreeMap<String, u64>,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RoundDelta {
    pub messages: u64,
    pub max_send: u64,
    pub max_recv: u64,
}

/// What a node sees while computing its step.
pub struct NodeContext<'a> {
    pub id: VertexId,
    pub adjacency: &'a [(VertexId, Weight)],
    pub inbox: &'a [Message],
    pub rng: ChaCha8Rng,
}

pub struct Simulator {
    config: SimConfig,
    metrics: RoundMetrics,
    phase: String,
    step: u64,
    adjacency: Vec<Vec<(VertexId, Weight)>>,
    inboxes: Vec<Vec<Message>>,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let n = config.n;
        Ok(Simulator {
            config,
            metrics: RoundMetrics::default(),
            phase: "main".into(),
            step: 0,
            adjacency: vec![Vec::new(); n],
            inboxes: vec![Vec::new(); n],
        })
    }

    /// Simulator whose node contexts expose `g`'s adjacency lists.
    pub fn with_graph(config: SimConfig, g: &Graph) -> Result<Self> {
        if g.n() != config.n {
            return Err(Error::InvalidArgument(format!(
                "graph has {} vertices but the network has {}",
                g.n(),
                config.n
            )));
        }
        let mut sim = Simulator::new(config)?;
        sim.adjacency = (0..g.n()).map(|v| g.neighbors(v).to_vec()).collect();
        Ok(sim)
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn metrics(&self) -> &RoundMetrics {
        &self.metrics
    }

    pub fn into_metrics(self) -> RoundMetrics {
        self.metrics
    }

    pub fn phase(&self) -> &str {
        &self.phase
    }

    pub fn set_phase(&mut self, phase: &str) {
        if self.phase != phase {
            log::debug!(
                "phase {} -> {} at round {}",
                self.phase,
                phase,
                self.metrics.rounds_total
            );
            self.phase = phase.to_string();
        }
        self.metrics.rounds_by_phase.entry(phase.to_string()).or_insert(0);
        self.metrics.messages_by_phase.entry(phase.to_string()).or_insert(0);
    }

    /// Logical communication step; advances once per raw round or primitive
    /// call regardless of the configured round charges.
    pub fn step(&self) -> u64 {
        self.step
    }

    /// Per-node random stream for the current step.
    pub fn node_rng(&self, id: VertexId, stream: u64) -> ChaCha8Rng {
        derive_stream(self.config.seed, id as u64, self.step, stream)
    }

    pub fn inbox(&self, id: VertexId) -> &[Message] {
        &self.inboxes[id]
    }

    /// Records the violation in the metrics and hands the error back.
    pub fn fail<T>(&mut self, err: Error) -> Result<T> {
        log::debug!("violation: {err}");
        self.metrics.violations.push(err.violation_name().to_string());
        Err(err)
    }

    fn charge(&mut self, rounds: u64, messages: u64) {
        self.step += 1;
        self.metrics.rounds_total += rounds;
        self.metrics.messages_total += messages;
        *self.metrics.rounds_by_phase.entry(self.phase.clone()).or_insert(0) += rounds;
        *self.metrics.messages_by_phase.entry(self.phase.clone()).or_insert(0) += messages;
        log::trace!(
            "[{}] step {} +{} rounds, +{} messages",
            self.phase,
            self.step,
            rounds,
            messages
        );
    }

    fn count_call(&mut self, primitive: &str, times: u64) {
        *self.metrics.primitive_calls.entry(primitive.to_string()).or_insert(0) += times;
    }

    fn check_payload(&mut self, p: &Payload, src: VertexId) -> Result<()> {
        if p.len() > MAX_PAYLOAD_WORDS {
            return self.fail(Error::Bandwidth(format!(
                "node {src} emitted a {}-word payload (limit {MAX_PAYLOAD_WORDS})",
                p.len()
            )));
        }
        Ok(())
    }

    /// One synchronous round. Every node's handler runs against the inbox
    /// of the previous round; all emitted messages are delivered together.
    pub fn run_round<F>(&mut self, mut handler: F) -> Result<RoundDelta>
    where
        F: FnMut(&mut NodeContext<'_>) -> Vec<Message>,
    {
        let n = self.n();
        let mut outgoing = Vec::with_capacity(n);
        for id in 0..n {
            let mut ctx = NodeContext {
                id,
                adjacency: &self.adjacency[id],
                inbox: &self.inboxes[id],
                rng: derive_stream(self.config.seed, id as u64, self.step, 0),
            };
            outgoing.push(handler(&mut ctx));
        }
        let mut seen = vec![usize::MAX; n];
        let mut next: Vec<Vec<Message>> = vec![Vec::new(); n];
        let mut recv = vec![0u64; n];
        let mut delta = RoundDelta::default();
        for (id, msgs) in outgoing.into_iter().enumerate() {
            for m in msgs {
                if m.src != id || m.dst >= n || m.dst == id {
                    return self.fail(Error::Bandwidth(format!(
                        "node {id} emitted an invalid message {} -> {}",
                        m.src, m.dst
                    )));
                }
                if seen[m.dst] == id {
                    return self.fail(Error::Bandwidth(format!(
                        "node {id} sent two messages to {} in one round",
                        m.dst
                    )));
                }
                seen[m.dst] = id;
                self.check_payload(&m.payload, id)?;
                recv[m.dst] += 1;
                next[m.dst].push(m);
            }
        }
        for (id, inbox) in next.iter().enumerate() {
            let sent = seen.iter().filter(|&&s| s == id).count() as u64;
            delta.max_send = delta.max_send.max(sent);
            delta.messages += inbox.len() as u64;
        }
        delta.max_recv = recv.iter().copied().max().unwrap_or(0);
        self.inboxes = next;
        self.metrics.max_send_per_round = self.metrics.max_send_per_round.max(delta.max_send);
        self.metrics.max_recv_per_round = self.metrics.max_recv_per_round.max(delta.max_recv);
        self.count_call("raw_round", 1);
        self.charge(1, delta.messages);
        Ok(delta)
    }

    /// Every node sends one payload to every other node in a single round.
    /// The returned table, indexed by sender, is the view every node holds
    /// afterwards.
    pub fn broadcast_value(&mut self, values: Vec<Payload>) -> Result<Vec<Payload>> {
        let n = self.n();
        if values.len() != n {
            return Err(Error::InvalidArgument(format!(
                "broadcast needs one payload per node ({} given, n = {n})",
                values.len()
            )));
        }
        for (id, p) in values.iter().enumerate() {
            self.check_payload(p, id)?;
        }
        let per_node = (n - 1) as u64;
        self.metrics.max_send_per_round = self.metrics.max_send_per_round.max(per_node);
        self.metrics.max_recv_per_round = self.metrics.max_recv_per_round.max(per_node);
        self.count_call("broadcast", 1);
        self.charge(1, n as u64 * per_node);
        Ok(values)
    }

    fn validate_routing(&mut self, outgoing: &[Vec<Message>]) -> Result<(Vec<usize>, Vec<usize>)> {
        let n = self.n();
        if outgoing.len() != n {
            return Err(Error::InvalidArgument(format!(
                "routing needs one queue per node ({} given, n = {n})",
                outgoing.len()
            )));
        }
        let mut send = vec![0usize; n];
        let mut recv = vec![0usize; n];
        for (id, msgs) in outgoing.iter().enumerate() {
            for m in msgs {
                if m.src != id || m.dst >= n {
                    return self.fail(Error::Bandwidth(format!(
                        "node {id} queued an invalid message {} -> {}",
                        m.src, m.dst
                    )));
                }
                self.check_payload(&m.payload, id)?;
                recv[m.dst] += 1;
            }
            send[id] = msgs.len();
        }
        Ok((send, recv))
    }

    fn deliver(outgoing: Vec<Vec<Message>>, n: usize) -> (Vec<Vec<Message>>, u64) {
        let mut inboxes: Vec<Vec<Message>> = vec![Vec::new(); n];
        let mut total = 0;
        for msgs in outgoing {
            for m in msgs {
                total += 1;
                let dst = m.dst;
                inboxes[dst].push(m);
            }
        }
        (inboxes, total)
    }

    /// Information Distribution Task: every node sends at most `n` and
    /// receives at most `n` messages. Inboxes are ordered by source, then
    /// by emission index.
    pub fn route_idt(&mut self, outgoing: Vec<Vec<Message>>) -> Result<Vec<Vec<Message>>> {
        let n = self.n();
        let (send, recv) = self.validate_routing(&outgoing)?;
        if let Some((node, &count)) = send.iter().enumerate().find(|(_, &c)| c > n) {
            return self.fail(Error::IdtSend { node, count, limit: n });
        }
        if let Some((node, &count)) = recv.iter().enumerate().find(|(_, &c)| c > n) {
            return self.fail(Error::IdtRecv { node, count, limit: n });
        }
        self.note_primitive_load(&send, &recv, 1);
        let (inboxes, total) = Self::deliver(outgoing, n);
        self.count_call("route_idt", 1);
        self.charge(self.config.route_cost, total);
        Ok(inboxes)
    }

    /// Routing for loads bounded by `instances * n` per sender and per
    /// receiver. The bipartite send/receive multigraph then has maximum
    /// degree at most `instances * n`, so its edges split into `instances`
    /// colour classes that each form a valid IDT instance.
    pub fn route_batched(&mut self, outgoing: Vec<Vec<Message>>, instances: u64) -> Result<Vec<Vec<Message>>> {
        let n = self.n();
        let instances = instances.max(1);
        let limit = n * instances as usize;
        let (send, recv) = self.validate_routing(&outgoing)?;
        if let Some((node, &count)) = send.iter().enumerate().find(|(_, &c)| c > limit) {
            return self.fail(Error::IdtSend { node, count, limit });
        }
        if let Some((node, &count)) = recv.iter().enumerate().find(|(_, &c)| c > limit) {
            return self.fail(Error::IdtRecv { node, count, limit });
        }
        self.note_primitive_load(&send, &recv, instances as usize);
        let (inboxes, total) = Self::deliver(outgoing, n);
        self.count_call("route_idt", instances);
        self.charge(instances * self.config.route_cost, total);
        Ok(inboxes)
    }

    fn note_primitive_load(&mut self, send: &[usize], recv: &[usize], instances: usize) {
        let per = |x: usize| x.div_ceil(instances) as u64;
        let s = send.iter().copied().map(per).max().unwrap_or(0);
        let r = recv.iter().copied().map(per).max().unwrap_or(0);
        self.metrics.max_primitive_send = self.metrics.max_primitive_send.max(s);
        self.metrics.max_primitive_recv = self.metrics.max_primitive_recv.max(r);
    }

    /// Global 1-based ranks of every node's keys. Ties are broken by
    /// `(key, holder, local index)`.
    pub fn dist_sort<K: Ord>(&mut self, keys: &[Vec<K>]) -> Result<Vec<Vec<u64>>> {
        let n = self.n();
        if let Some((node, held)) = keys.iter().enumerate().find(|(_, k)| k.len() > n) {
            return self.fail(Error::SortOverflow {
                node,
                count: held.len(),
                limit: n,
            });
        }
        let mut all: Vec<(&K, usize, usize)> = keys
            .iter()
            .enumerate()
            .flat_map(|(h, ks)| ks.iter().enumerate().map(move |(i, k)| (k, h, i)))
            .collect();
        all.sort();
        let mut ranks: Vec<Vec<u64>> = keys.iter().map(|k| vec![0; k.len()]).collect();
        for (r, &(_, h, i)) in all.iter().enumerate() {
            ranks[h][i] = r as u64 + 1;
        }
        let counts: Vec<usize> = keys.iter().map(Vec::len).collect();
        self.note_primitive_load(&counts, &counts, 1);
        self.count_call("dist_sort", 1);
        self.charge(self.config.sort_cost, all.len() as u64);
        Ok(ranks)
    }

    /// Each item travels to the leader of its sender's group; every leader
    /// ends up with the minimum edge per group key.
    pub fn converge_min(
        &mut self,
        group_of: &[VertexId],
        items: Vec<Vec<(u64, Edge)>>,
    ) -> Result<Vec<BTreeMap<u64, Edge>>> {
        let n = self.n();
        if group_of.len() != n || items.len() != n {
            return Err(Error::InvalidArgument(
                "converge_min needs a leader and an item list per node".into(),
            ));
        }
        let mut out: Vec<BTreeMap<u64, Edge>> = vec![BTreeMap::new(); n];
        let mut total = 0u64;
        for (node, list) in items.into_iter().enumerate() {
            if list.len() > n {
                return self.fail(Error::AggOverflow {
                    leader: group_of[node],
                    count: list.len(),
                    limit: n,
                });
            }
            let leader = group_of[node];
            for (key, e) in list {
                total += 1;
                out[leader]
                    .entry(key)
                    .and_modify(|best| {
                        if e < *best {
                            *best = e;
                        }
                    })
                    .or_insert(e);
            }
        }
        if let Some((leader, map)) = out.iter().enumerate().find(|(_, m)| m.len() > n) {
            return self.fail(Error::AggOverflow {
                leader,
                count: map.len(),
                limit: n,
            });
        }
        self.count_call("converge_min", 1);
        self.charge(self.config.agg_cost, total);
        Ok(out)
    }

    /// Makes up to `n` items known to every node: item `j` is routed from its
    /// owner to node `j`, which then broadcasts it. Returns the item table
    /// every node holds afterwards, in input order.
    pub fn disseminate_all(&mut self, items: Vec<(VertexId, Payload)>) -> Result<Vec<Payload>> {
        let n = self.n();
        if items.len() > n {
            return self.fail(Error::DisseminationOverflow {
                count: items.len(),
                limit: n,
            });
        }
        let mut send = vec![0usize; n];
        for (j, (owner, p)) in items.iter().enumerate() {
            if *owner >= n {
                return Err(Error::InvalidArgument(format!("owner {owner} out of range")));
            }
            self.check_payload(p, *owner)?;
            if *owner != j {
                send[*owner] += 1;
            }
        }
        let recv: Vec<usize> = (0..n).map(|j| usize::from(j < items.len())).collect();
        self.note_primitive_load(&send, &recv, 1);
        let per_node = (n - 1) as u64;
        if !items.is_empty() {
            self.metrics.max_send_per_round = self.metrics.max_send_per_round.max(per_node);
            self.metrics.max_recv_per_round = self.metrics.max_recv_per_round.max(per_node);
        }
        let routed = send.iter().sum::<usize>() as u64;
        let messages = routed + items.len() as u64 * per_node;
        self.count_call("disseminate_all", 1);
        self.charge(self.config.route_cost + 1, messages);
        Ok(items.into_iter().map(|(_, p)| p).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sim(n: usize) -> Simulator {
        Simulator::new(SimConfig::new(n, 1)).unwrap()
    }

    #[test]
    fn silent_round() {
        let mut s = sim(5);
        let d = s.run_round(|_| Vec::new()).unwrap();
        assert_eq!(d.messages, 0);
        assert_eq!(s.metrics().rounds_total, 1);
    }

    #[test]
    fn node_zero_sends_degree_to_all() {
        let g = Graph::unweighted(6, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let mut s = Simulator::with_graph(SimConfig::new(6, 1), &g).unwrap();
        let d = s
            .run_round(|ctx| {
                if ctx.id != 0 {
                    return Vec::new();
                }
                let deg = ctx.adjacency.len() as u64;
                (1..6).map(|v| Message::new(0, v, Payload::value(1, deg))).collect()
            })
            .unwrap();
        assert_eq!(d.messages, 5);
        assert_eq!(d.max_send, 5);
        assert!(s.inbox(0).is_empty());
        for v in 1..6 {
            assert_eq!(s.inbox(v).len(), 1);
            assert_eq!(s.inbox(v)[0].payload.word(1), 3);
        }
    }

    #[test]
    fn duplicate_link_is_bandwidth_violation() {
        let mut s = sim(8);
        let err = s
            .run_round(|ctx| {
                if ctx.id == 0 {
                    vec![
                        Message::new(0, 5, Payload::value(1, 1)),
                        Message::new(0, 5, Payload::value(1, 2)),
                    ]
                } else {
                    Vec::new()
                }
            })
            .unwrap_err();
        assert!(matches!(err, Error::Bandwidth(_)));
        assert_eq!(s.metrics().violations, vec!["bandwidth_violation"]);
    }

    #[test]
    fn oversized_payload_is_bandwidth_violation() {
        let mut s = sim(3);
        let err = s
            .run_round(|ctx| {
                if ctx.id == 1 {
                    vec![Message::new(1, 2, Payload::from_words(&[1, 2, 3, 4, 5]))]
                } else {
                    Vec::new()
                }
            })
            .unwrap_err();
        assert!(matches!(err, Error::Bandwidth(_)));
    }

    #[test]
    fn inbox_visible_next_round() {
        let mut s = sim(3);
        s.run_round(|ctx| vec![Message::new(ctx.id, (ctx.id + 1) % 3, Payload::value(0, ctx.id as u64))])
            .unwrap();
        let mut seen = Vec::new();
        s.run_round(|ctx| {
            seen.push(ctx.inbox.iter().map(|m| m.src).collect::<Vec<_>>());
            Vec::new()
        })
        .unwrap();
        assert_eq!(seen, vec![vec![2], vec![0], vec![1]]);
    }

    #[test]
    fn broadcast_star_degrees() {
        let g = Graph::unweighted(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let mut s = sim(5);
        let table = s
            .broadcast_value((0..5).map(|v| Payload::value(0, g.degree(v) as u64)).collect())
            .unwrap();
        let degs: Vec<u64> = table.iter().map(|p| p.word(1)).collect();
        assert_eq!(degs, vec![4, 1, 1, 1, 1]);
        assert_eq!(s.metrics().rounds_total, 1);
        assert_eq!(s.metrics().messages_total, 20);
    }

    #[test]
    fn route_idt_boundaries() {
        let n = 6;
        let mut s = sim(n);
        let out: Vec<Vec<Message>> = (0..n)
            .map(|v| vec![Message::new(v, 0, Payload::value(0, v as u64))])
            .collect();
        let inboxes = s.route_idt(out).unwrap();
        assert_eq!(inboxes[0].len(), n);
        assert_eq!(
            inboxes[0].iter().map(|m| m.src).collect::<Vec<_>>(),
            (0..n).collect::<Vec<_>>()
        );
        assert_eq!(s.metrics().rounds_total, 2);

        let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
        out[3] = (0..=n)
            .map(|i| Message::new(3, 0, Payload::value(0, i as u64)))
            .collect();
        assert!(matches!(s.route_idt(out), Err(Error::IdtSend { node: 3, .. })));

        let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
        out[3] = (0..4).map(|i| Message::new(3, 0, Payload::value(0, i))).collect();
        out[4] = (0..3).map(|i| Message::new(4, 0, Payload::value(0, i))).collect();
        assert!(matches!(
            s.route_idt(out),
            Err(Error::IdtRecv { node: 0, count: 7, .. })
        ));
    }

    #[test]
    fn route_batched_scales_limit() {
        let n = 4;
        let mut s = sim(n);
        let mut out: Vec<Vec<Message>> = vec![Vec::new(); n];
        for (v, slot) in out.iter_mut().enumerate().skip(1) {
            *slot = (0..3).map(|i| Message::new(v, 0, Payload::value(0, i))).collect();
        }
        assert!(matches!(
            s.route_batched(out.clone(), 2),
            Err(Error::IdtRecv { count: 9, limit: 8, .. })
        ));
        let inboxes = s.route_batched(out, 3).unwrap();
        assert_eq!(inboxes[0].len(), 9);
        assert_eq!(s.metrics().rounds_total, 3 * 2);
        assert_eq!(s.metrics().primitive_calls["route_idt"], 3);
        assert!(s.metrics().max_primitive_recv <= n as u64);
    }

    #[test]
    fn dist_sort_examples() {
        let mut s = sim(3);
        assert_eq!(
            s.dist_sort(&[vec![5], vec![2], vec![9]]).unwrap(),
            vec![vec![2], vec![1], vec![3]]
        );
        let ranks = s.dist_sort(&[vec![7, 7], vec![7], vec![7]]).unwrap();
        assert_eq!(ranks, vec![vec![1, 2], vec![3], vec![4]]);
        assert!(matches!(
            s.dist_sort(&[vec![1, 2, 3, 4], vec![], vec![]]),
            Err(Error::SortOverflow { .. })
        ));
        assert_eq!(s.metrics().rounds_total, 6);
    }

    #[test]
    fn converge_min_examples() {
        let mut s = sim(3);
        let w = |x| Weight::new(x).unwrap();
        let out = s
            .converge_min(
                &[0, 0, 2],
                vec![
                    vec![(2, Edge::new(0, 2, w(7)))],
                    vec![(2, Edge::new(1, 2, w(3)))],
                    vec![],
                ],
            )
            .unwrap();
        assert_eq!(out[0][&2], Edge::new(1, 2, w(3)));
        let empty = s.converge_min(&[0, 1, 2], vec![vec![]; 3]).unwrap();
        assert!(empty.iter().all(BTreeMap::is_empty));
    }

    #[test]
    fn disseminate_boundaries() {
        let n = 5;
        let mut s = sim(n);
        let table = s.disseminate_all(vec![(2, Payload::value(9, 1))]).unwrap();
        assert_eq!(table.len(), 1);
        let items: Vec<_> = (0..n).map(|j| (0, Payload::value(9, j as u64))).collect();
        assert_eq!(s.disseminate_all(items).unwrap().len(), n);
        let items: Vec<_> = (0..=n).map(|j| (0, Payload::value(9, j as u64))).collect();
        assert!(matches!(
            s.disseminate_all(items),
            Err(Error::DisseminationOverflow { .. })
        ));
        assert_eq!(s.metrics().rounds_total, 6);
    }

    #[test]
    fn config_validation() {
        let mut c = SimConfig::new(4, 0);
        c.route_cost = 0;
        assert!(Simulator::new(c).is_err());
        let mut c = SimConfig::new(4, 0);
        c.c_sample = 0.0;
        assert!(Simulator::new(c).is_err());
        assert_eq!("SQUARING".parse::<CcMstStrategy>().unwrap(), CcMstStrategy::Squaring);
    }
}
