//! The sequential oracles checked against independent references: a
//! quadratic Prim, exhaustive spanning-tree enumeration, and BFS.

use std::collections::VecDeque;

use clique_sim::generate::{generate, GeneratorSpec, GraphKind};
use clique_sim::graph::{connected_components, kruskal_mst, DisjointSet, Edge, Graph, Weight};

fn prim_weight(g: &Graph) -> u128 {
    let n = g.n();
    let mut in_tree = vec![false; n];
    let mut best = vec![u64::MAX; n];
    let mut total = 0u128;
    for start in 0..n {
        if in_tree[start] {
            continue;
        }
        best[start] = 0;
        loop {
            let next = (0..n)
                .filter(|&v| !in_tree[v] && best[v] != u64::MAX)
                .min_by_key(|&v| best[v]);
            let Some(x) = next else { break };
            in_tree[x] = true;
            total += best[x] as u128;
            for &(y, w) in g.neighbors(x) {
                if !in_tree[y] && w.raw() < best[y] {
                    best[y] = w.raw();
                }
            }
        }
    }
    total
}

fn bfs_components(g: &Graph) -> usize {
    let mut seen = vec![false; g.n()];
    let mut count = 0;
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(x) = q.pop_front() {
            for &(y, _) in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    q.push_back(y);
                }
            }
        }
    }
    count
}

/// Every spanning tree of a connected graph with at most 20 edges, as
/// sorted edge lists.
fn all_spanning_trees(g: &Graph) -> Vec<Vec<Edge>> {
    let edges = g.edges();
    let need = g.n() - 1;
    let mut out = Vec::new();
    for mask in 0u32..(1 << edges.len()) {
        if mask.count_ones() as usize != need {
            continue;
        }
        let mut dsu = DisjointSet::new(g.n());
        let chosen: Vec<Edge> = (0..edges.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| edges[i])
            .collect();
        if chosen.iter().all(|e| dsu.union(e.u, e.v)) {
            let mut t = chosen;
            t.sort();
            out.push(t);
        }
    }
    out
}

#[test]
fn kruskal_weight_matches_prim() {
    for seed in 0..30 {
        let spec = GeneratorSpec::new(GraphKind::Gnp, 40)
            .with_p(0.15)
            .with_ties(seed % 2 == 0);
        let g = generate(&spec, seed).unwrap();
        assert_eq!(kruskal_mst(&g).total_weight(), prim_weight(&g), "seed {seed}");
    }
}

#[test]
fn kruskal_is_the_unique_minimum_over_all_spanning_trees() {
    for seed in 0..20 {
        let g = generate(&GeneratorSpec::new(GraphKind::Gnp, 6).with_p(0.8), seed).unwrap();
        if bfs_components(&g) != 1 || g.m() > 20 {
            continue;
        }
        let trees = all_spanning_trees(&g);
        let weight = |t: &Vec<Edge>| t.iter().map(|e| e.w.raw()).sum::<u64>();
        let best = trees.iter().map(weight).min().unwrap();
        let optimal: Vec<&Vec<Edge>> = trees.iter().filter(|t| weight(t) == best).collect();
        assert_eq!(optimal.len(), 1, "distinct weights give a unique MST");
        assert_eq!(kruskal_mst(&g).edges(), optimal[0].as_slice());
    }
}

#[test]
fn tie_break_picks_the_lexicographic_minimum_tree() {
    // K6 with all weights equal: every spanning tree is optimal, the key
    // order (w, u, v) selects the star at vertex 0.
    let pairs: Vec<(usize, usize)> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
    let g = Graph::from_edges(6, pairs.iter().map(|&(a, b)| Edge::new(a, b, Weight::new(3).unwrap()))).unwrap();
    let mut trees = all_spanning_trees(&g);
    assert_eq!(trees.len(), 1296);
    trees.sort();
    assert_eq!(kruskal_mst(&g).edges(), trees[0].as_slice());
}

#[test]
fn component_labels_match_bfs() {
    for seed in 0..30 {
        let g = generate(&GeneratorSpec::new(GraphKind::Gnp, 60).with_p(0.03), seed).unwrap();
        assert_eq!(connected_components(&g).component_count(), bfs_components(&g));
    }
}
