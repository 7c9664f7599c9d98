//! Degree-based edge sampling, the uniform sampler used for light-edge
//! filtering, and empirical checks for the cut-coverage and sample-size bounds.

use std::collections::BTreeMap;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{
    build_component_graph_reference, enumerate_cuts, rounded_degree, Edge, Graph, VertexId, MAX_BRUTEFORCE_N,
};
use crate::net::{bernoulli, derive_stream, Payload, Simulator};

pub(crate) const STREAM_SAMPLE: u64 = 0x5A;
pub(crate) const STREAM_KKT: u64 = 0x4B;

const TAG_DEGREE: u64 = 0xD0;

/// Number of uniform random bipartitions checked in randomized mode.
pub const RANDOM_CUTS: usize = 10_000;

/// `log2 n` as used by the sampling probability; exact for powers of two.
pub fn log2n(n: usize) -> f64 {
    if n.is_power_of_two() {
        n.trailing_zeros() as f64
    } else {
        (n as f64).log2()
    }
}

/// `min(1, c * log2(n)^2 / rd_e)`.
pub fn edge_probability(rd_e: usize, n: usize, c: f64) -> f64 {
    debug_assert!(rd_e >= 1 && n >= 2);
    let l = log2n(n);
    (c * l * l / rd_e as f64).min(1.0)
}

/// The endpoint an edge is charged to: the one with the smaller rounded
/// degree, ties going to the smaller id.
pub fn charge_edge(u: VertexId, v: VertexId, rd_u: usize, rd_v: usize) -> VertexId {
    if rd_u < rd_v || (rd_u == rd_v && u < v) {
        u
    } else {
        v
    }
}

/// Which rounded degree drives an edge's probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingRule {
    /// The charged endpoint samples with `rd(e) = min(rd(u), rd(v))`.
    PerEdge,
    /// Every endpoint samples its incident edges with its own `rd(v)`; an
    /// edge is kept if either endpoint picks it.
    PerVertex,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleOutcome {
    /// Sampled edges, sorted by key.
    pub sampled: Vec<Edge>,
    /// Edges each vertex was responsible for sampling.
    pub charged_count: Vec<usize>,
    /// Edges each vertex sampled itself.
    pub charged_sampled: Vec<usize>,
    /// The sampled edges grouped by the vertex that drew them.
    pub by_sampler: Vec<Vec<Edge>>,
    pub probabilities: BTreeMap<(VertexId, VertexId), f64>,
}

impl SampleOutcome {
    pub fn max_charged_sampled(&self) -> usize {
        self.charged_sampled.iter().copied().max().unwrap_or(0)
    }
}

/// Samples over an abstract adjacency structure: `adj[x]` lists
/// `(neighbor, witness edge)` pairs and the probability uses the degree in
/// this structure with `log2(n_net)`. `rng_for(x)` supplies `x`'s stream.
pub fn sample_adjacency<R: RngCore>(
    adj: &[Vec<(VertexId, Edge)>],
    n_net: usize,
    c: f64,
    rule: SamplingRule,
    mut rng_for: impl FnMut(VertexId) -> R,
) -> Result<SampleOutcome> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument("sampling constant must be positive".into()));
    }
    let k = adj.len();
    let rd: Vec<usize> = adj
        .iter()
        .map(|a| {
            if a.is_empty() {
                0
            } else {
                rounded_degree(a.len()).unwrap_or(1)
            }
        })
        .collect();
    let mut out = SampleOutcome {
        charged_count: vec![0; k],
        charged_sampled: vec![0; k],
        by_sampler: vec![Vec::new(); k],
        ..Default::default()
    };
    let mut kept: Vec<Edge> = Vec::new();
    for x in 0..k {
        if adj[x].is_empty() {
            continue;
        }
        let mut rng = rng_for(x);
        for &(y, e) in &adj[x] {
            let p = match rule {
                SamplingRule::PerEdge => {
                    if charge_edge(x, y, rd[x], rd[y]) != x {
                        continue;
                    }
                    edge_probability(rd[x].min(rd[y]), n_net.max(2), c)
                }
                SamplingRule::PerVertex => edge_probability(rd[x], n_net.max(2), c),
            };
            out.charged_count[x] += 1;
            let slot = out.probabilities.entry((e.u, e.v)).or_insert(p);
            *slot = slot.max(p);
            if bernoulli(&mut rng, p) {
                out.charged_sampled[x] += 1;
                out.by_sampler[x].push(e);
                kept.push(e);
            }
        }
    }
    kept.sort();
    kept.dedup();
    out.sampled = kept;
    Ok(out)
}

fn graph_adjacency(g: &Graph) -> Vec<Vec<(VertexId, Edge)>> {
    (0..g.n())
        .map(|v| g.incident_edges(v).map(|e| (e.other(v), e)).collect())
        .collect()
}

/// Sequential sampler drawing from the same per-node streams the simulator
/// hands out at logical step `step`.
pub fn sample_edges_central(g: &Graph, c: f64, rule: SamplingRule, seed: u64, step: u64) -> Result<SampleOutcome> {
    sample_adjacency(&graph_adjacency(g), g.n(), c, rule, |v| {
        derive_stream(seed, v as u64, step, STREAM_SAMPLE)
    })
}

/// Distributed degree-based sampling: one degree broadcast, after which
/// every node samples the edges charged to it with its own stream.
/// Returns the outcome and the logical step the streams were drawn at.
pub fn sample_edges_distributed(
    sim: &mut Simulator,
    g: &Graph,
    c: f64,
    rule: SamplingRule,
) -> Result<(SampleOutcome, u64)> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument("sampling constant must be positive".into()));
    }
    let degrees: Vec<Payload> = (0..g.n())
        .map(|v| Payload::value(TAG_DEGREE, g.degree(v) as u64))
        .collect();
    let table = sim.broadcast_value(degrees)?;
    debug_assert!(table.iter().enumerate().all(|(v, p)| p.word(1) as usize == g.degree(v)));
    let step = sim.step();
    let outcome = sample_adjacency(&graph_adjacency(g), g.n(), c, rule, |v| sim.node_rng(v, STREAM_SAMPLE))?;
    Ok((outcome, step))
}

/// Keeps every edge independently with probability `p`.
pub fn kkt_sample(g: &Graph, p: f64, rng: &mut impl RngCore) -> Result<Graph> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sampling probability {p} outside (0, 1]"
        )));
    }
    let kept: Vec<Edge> = g.edges().iter().copied().filter(|_| bernoulli(rng, p)).collect();
    Graph::from_edges(g.n(), kept)
}

/// Number of inter-component pairs left after contracting `sampled`.
pub fn intercomponent_edge_count(g: &Graph, sampled: &[Edge]) -> usize {
    build_component_graph_reference(g, sampled).inter_edge_count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverageMode {
    Exhaustive,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutMiss {
    pub side_size: usize,
    pub cut_size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCoverageReport {
    pub mode: CoverageMode,
    pub cuts_checked: u64,
    pub large_cuts_checked: u64,
    pub threshold: usize,
    pub misses: Vec<CutMiss>,
    pub pass: bool,
}

impl CutCoverageReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Checks that every cut of size at least `threshold` has a sampled edge
/// crossing it. Exhaustive for `n <= 20`, otherwise randomized with a fixed
/// seed.
pub fn verify_large_cut_coverage(g: &Graph, sampled: &[Edge], threshold: usize) -> CutCoverageReport {
    verify_large_cut_coverage_seeded(g, sampled, threshold, 0)
}

pub fn verify_large_cut_coverage_seeded(g: &Graph, sampled: &[Edge], threshold: usize, seed: u64) -> CutCoverageReport {
    let threshold = threshold.max(1);
    if g.n() <= MAX_BRUTEFORCE_N {
        exhaustive_coverage(g, sampled, threshold)
    } else {
        randomized_coverage(g, sampled, threshold, seed)
    }
}

fn exhaustive_coverage(g: &Graph, sampled: &[Edge], threshold: usize) -> CutCoverageReport {
    let mut smask = vec![0u32; g.n()];
    for e in sampled {
        smask[e.u] |= 1 << e.v;
        smask[e.v] |= 1 << e.u;
    }
    let mut report = CutCoverageReport {
        mode: CoverageMode::Exhaustive,
        cuts_checked: 0,
        large_cuts_checked: 0,
        threshold,
        misses: Vec::new(),
        pass: true,
    };
    for (side, size) in enumerate_cuts(g).expect("n within brute-force range") {
        report.cuts_checked += 1;
        if size < threshold {
            continue;
        }
        report.large_cuts_checked += 1;
        let mut rest = side;
        let mut covered = false;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if smask[v] & !side != 0 {
                covered = true;
                break;
            }
        }
        if !covered {
            report.misses.push(CutMiss {
                side_size: side.count_ones() as usize,
                cut_size: size,
            });
        }
    }
    report.pass = report.misses.is_empty();
    report
}

struct Bitsets {
    words: usize,
    rows: Vec<u64>,
}

impl Bitsets {
    fn new(n: usize, edges: impl Iterator<Item = (VertexId, VertexId)>) -> Self {
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for (a, b) in edges {
            rows[a * words + b / 64] |= 1 << (b % 64);
            rows[b * words + a / 64] |= 1 << (a % 64);
        }
        Bitsets { words, rows }
    }

    fn row(&self, v: VertexId) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    fn crossing(&self, v: VertexId, side: &[u64]) -> u32 {
        self.row(v).iter().zip(side).map(|(a, s)| (a & !s).count_ones()).sum()
    }
}

fn randomized_coverage(g: &Graph, sampled: &[Edge], threshold: usize, seed: u64) -> CutCoverageReport {
    let n = g.n();
    let full = Bitsets::new(n, g.edges().iter().map(|e| (e.u, e.v)));
    let samp = Bitsets::new(n, sampled.iter().map(|e| (e.u, e.v)));
    let mut report = CutCoverageReport {
        mode: CoverageMode::Randomized,
        cuts_checked: 0,
        large_cuts_checked: 0,
        threshold,
        misses: Vec::new(),
        pass: true,
    };
    let mut record = |report: &mut CutCoverageReport, side_size: usize, cut: usize, covered: bool| {
        report.cuts_checked += 1;
        if cut >= threshold {
            report.large_cuts_checked += 1;
            if !covered {
                report.misses.push(CutMiss {
                    side_size,
                    cut_size: cut,
                });
            }
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = full.words;
    let mut side = vec![0u64; words];
    let mut members = Vec::with_capacity(n);
    let mut drawn = 0;
    while drawn < RANDOM_CUTS {
        side.iter_mut().for_each(|w| *w = 0);
        members.clear();
        for v in 0..n {
            if rng.gen::<bool>() {
                side[v / 64] |= 1 << (v % 64);
                members.push(v);
            }
        }
        if members.is_empty() || members.len() == n {
            continue;
        }
        drawn += 1;
        let cut: u32 = members.iter().map(|&v| full.crossing(v, &side)).sum();
        let covered = members.iter().any(|&v| samp.crossing(v, &side) > 0);
        record(&mut report, members.len(), cut as usize, covered);
    }

    let sampled_deg: Vec<usize> = {
        let mut d = vec![0; n];
        for e in sampled {
            d[e.u] += 1;
            d[e.v] += 1;
        }
        d
    };
    for (v, &d) in sampled_deg.iter().enumerate() {
        record(&mut report, 1, g.degree(v), d > 0);
    }

    let mut by_degree: Vec<VertexId> = (0..n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    prefix_cuts(g, sampled, &by_degree, &mut report, &mut record);
    by_degree.reverse();
    prefix_cuts(g, sampled, &by_degree, &mut report, &mut record);
    for root in bfs_roots(g) {
        let order = bfs_order(g, root);
        prefix_cuts(g, sampled, &order, &mut report, &mut record);
    }
    report.pass = report.misses.is_empty();
    report
}

fn bfs_roots(g: &Graph) -> Vec<VertexId> {
    let n = g.n();
    let max_deg = (0..n).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)));
    let min_deg = (0..n).min_by_key(|&v| (g.degree(v), v));
    let mut roots: Vec<VertexId> = [Some(0), max_deg, min_deg].into_iter().flatten().collect();
    roots.sort();
    roots.dedup();
    roots
}

/// BFS visiting order from `root`, continuing into unreached components.
fn bfs_order(g: &Graph, root: VertexId) -> Vec<VertexId> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for start in std::iter::once(root).chain(0..n) {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut head = order.len();
        order.push(start);
        while head < order.len() {
            let x = order[head];
            head += 1;
            for &(y, _) in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    order.push(y);
                }
            }
        }
    }
    order
}

/// Cuts formed by the first `i` vertices of `order`, for `0 < i < n`,
/// maintained incrementally.
fn prefix_cuts(
    g: &Graph,
    sampled: &[Edge],
    order: &[VertexId],
    report: &mut CutCoverageReport,
    record: &mut impl FnMut(&mut CutCoverageReport, usize, usize, bool),
) {
    let n = g.n();
    let mut sadj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for e in sampled {
        sadj[e.u].push(e.v);
        sadj[e.v].push(e.u);
    }
    let mut inside = vec![false; n];
    let mut cut: i64 = 0;
    let mut scut: i64 = 0;
    for (i, &v) in order.iter().enumerate().take(n.saturating_sub(1)) {
        let within = g.neighbors(v).iter().filter(|&&(y, _)| inside[y]).count() as i64;
        cut += g.degree(v) as i64 - 2 * within;
        let swithin = sadj[v].iter().filter(|&&y| inside[y]).count() as i64;
        scut += sadj[v].len() as i64 - 2 * swithin;
        inside[v] = true;
        record(report, i + 1, cut as usize, scut > 0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Weight;

    fn complete(n: usize) -> Graph {
        let pairs: Vec<_> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        Graph::unweighted(n, &pairs).unwrap()
    }

    #[test]
    fn probability_examples() {
        assert_eq!(edge_probability(16, 256, 50.0), 1.0);
        assert_eq!(edge_probability(4096, 256, 50.0), 0.78125);
        assert_eq!(edge_probability(1024, 16, 0.5), 0.0078125);
    }

    #[test]
    fn charging_rule() {
        assert_eq!(charge_edge(1, 2, 4, 8), 1);
        assert_eq!(charge_edge(1, 2, 8, 4), 2);
        assert_eq!(charge_edge(3, 9, 8, 8), 3);
        assert_eq!(charge_edge(9, 3, 8, 8), 3);
    }

    #[test]
    fn charging_is_total() {
        let g = complete(9);
        let out = sample_edges_central(&g, 0.01, SamplingRule::PerEdge, 3, 0).unwrap();
        assert_eq!(out.charged_count.iter().sum::<usize>(), g.m());
        assert_eq!(out.probabilities.len(), g.m());
    }

    #[test]
    fn clamped_probabilities_keep_everything() {
        let g = complete(12);
        let out = sample_edges_central(&g, 50.0, SamplingRule::PerEdge, 1, 0).unwrap();
        assert_eq!(out.sampled, g.edges());
        assert!(sample_edges_central(&g, 0.0, SamplingRule::PerEdge, 1, 0).is_err());
    }

    #[test]
    fn distributed_matches_central() {
        let g = complete(40);
        let mut sim = Simulator::new(crate::net::SimConfig::new(40, 9)).unwrap();
        let (dist, step) = sample_edges_distributed(&mut sim, &g, 0.3, SamplingRule::PerEdge).unwrap();
        let central = sample_edges_central(&g, 0.3, SamplingRule::PerEdge, 9, step).unwrap();
        assert_eq!(dist, central);
        assert!(dist.sampled.len() < g.m());
        assert_eq!(sim.metrics().rounds_total, 1);
    }

    #[test]
    fn kkt_sample_full_probability() {
        let g = complete(10);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(kkt_sample(&g, 1.0, &mut rng).unwrap(), g);
        assert!(kkt_sample(&g, 0.0, &mut rng).is_err());
    }

    #[test]
    fn coverage_trivial_cases() {
        let k6 = complete(6);
        let all = verify_large_cut_coverage(&k6, k6.edges(), 5);
        assert!(all.pass);
        assert_eq!(all.mode, CoverageMode::Exhaustive);
        let none = verify_large_cut_coverage(&k6, &[], 5);
        assert!(!none.pass);
        assert_eq!(none.misses.len() as u64, none.large_cuts_checked);
        assert_eq!(none.large_cuts_checked, 31);
    }

    #[test]
    fn randomized_mode_on_large_graph() {
        let g = complete(30);
        let rep = verify_large_cut_coverage(&g, g.edges(), 30);
        assert_eq!(rep.mode, CoverageMode::Randomized);
        assert!(rep.pass);
        assert!(rep.cuts_checked >= RANDOM_CUTS as u64 + 30);
        let star: Vec<Edge> = (1..30).map(|v| Edge::new(0, v, Weight::ONE)).collect();
        let rep = verify_large_cut_coverage(&g, &star, 29);
        assert!(rep.pass);
        let rep = verify_large_cut_coverage(&g, &star[1..], 29);
        assert!(!rep.pass);
        assert!(rep.misses.iter().any(|m| m.side_size == 1 || m.side_size == 29));
        let json = rep.to_json();
        assert!(json.starts_with("{\"mode\":\"randomized\""));
    }

    #[test]
    fn intercomponent_counts() {
        let g = complete(5);
        assert_eq!(intercomponent_edge_count(&g, g.edges()), 0);
        assert_eq!(intercomponent_edge_count(&g, &[]), 10);
    }
}
