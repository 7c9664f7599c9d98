//! Seeded instance generators.
//!
//! Every generator is deterministic in its seed. Weights are a random
//! permutation of `1..=m` unless ties are allowed, in which case they are
//! drawn from a small range.

use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, VertexId, Weight};

/// Number of distinct weights used when ties are allowed.
const TIED_WEIGHTS: u64 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    Gnp,
    WeightedClique,
    Components,
    Barbell,
    Path,
}

impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "gnp" => Ok(GraphKind::Gnp),
            "weighted-clique" | "clique" => Ok(GraphKind::WeightedClique),
            "components" => Ok(GraphKind::Components),
            "barbell" => Ok(GraphKind::Barbell),
            "path" => Ok(GraphKind::Path),
            other => Err(Error::InvalidArgument(format!("unknown graph type `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GraphKind,
    pub n: usize,
    /// Edge probability for `gnp` and the extra intra-component density
    /// for `components`.
    pub p: f64,
    /// Component count for `components`.
    pub k: usize,
    pub allow_ties: bool,
}

impl GeneratorSpec {
    pub fn new(kind: GraphKind, n: usize) -> Self {
        GeneratorSpec {
            kind,
            n,
            p: 0.5,
            k: 1,
            allow_ties: false,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn with_ties(mut self, allow: bool) -> Self {
        self.allow_ties = allow;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n = {} must be at least 2", self.n)));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidArgument(format!("p = {} outside [0, 1]", self.p)));
        }
        if self.kind == GraphKind::Components && !(1..=self.n).contains(&self.k) {
            return Err(Error::InvalidArgument(format!(
                "k = {} must lie in 1..={}",
                self.k, self.n
            )));
        }
        if self.kind == GraphKind::Barbell && self.n < 4 {
            return Err(Error::InvalidArgument("barbell needs n >= 4".into()));
        }
        Ok(())
    }
}

pub fn generate(spec: &GeneratorSpec, seed: u64) -> Result<Graph> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n;
    let pairs = match spec.kind {
        GraphKind::Gnp => gnp_pairs(0..n, spec.p, &mut rng),
        GraphKind::WeightedClique => clique_pairs(0..n),
        GraphKind::Components => components_pairs(n, spec.k, spec.p, &mut rng),
        GraphKind::Barbell => {
            let half = n / 2;
            let mut pairs = clique_pairs(0..half);
            pairs.extend(clique_pairs(half..n));
            pairs.push((half - 1, half));
            pairs
        }
        GraphKind::Path => (1..n).map(|v| (v - 1, v)).collect(),
    };
    Graph::from_edges(n, assign_weights(pairs, spec.allow_ties, &mut rng))
}

fn clique_pairs(range: std::ops::Range<usize>) -> Vec<(VertexId, VertexId)> {
    let (lo, hi) = (range.start, range.end);
    (lo..hi).flat_map(|a| (a + 1..hi).map(move |b| (a, b))).collect()
}

fn gnp_pairs(range: std::ops::Range<usize>, p: f64, rng: &mut ChaCha8Rng) -> Vec<(VertexId, VertexId)> {
    clique_pairs(range).into_iter().filter(|_| rng.gen_bool(p)).collect()
}

/// `k` blocks of near-equal size, each a random spanning tree plus
/// `G(n, p)` edges inside the block.
fn components_pairs(n: usize, k: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<(VertexId, VertexId)> {
    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for block in 0..k {
        let members = &order[block * n / k..(block + 1) * n / k];
        for i in 1..members.len() {
            let parent = members[rng.gen_range(0..i)];
            let (a, b) = (parent.min(members[i]), parent.max(members[i]));
            pairs.push((a, b));
        }
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                if rng.gen_bool(p) {
                    pairs.push((a.min(b), a.max(b)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn assign_weights(pairs: Vec<(VertexId, VertexId)>, allow_ties: bool, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    let m = pairs.len() as u64;
    let weights: Vec<u64> = if allow_ties {
        (0..m).map(|_| rng.gen_range(1..=TIED_WEIGHTS)).collect()
    } else {
        let mut w: Vec<u64> = (1..=m).collect();
        w.shuffle(rng);
        w
    };
    pairs
        .into_iter()
        .zip(weights)
        .map(|((a, b), w)| Edge::new(a, b, Weight::new(w).expect("finite weight")))
        .collect()
}
