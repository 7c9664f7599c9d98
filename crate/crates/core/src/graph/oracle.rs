use std::collections::{BTreeMap, VecDeque};

use super::{ComponentGraph, ComponentLabeling, DisjointSet, Edge, Forest, Graph, VertexId, Weight};

pub fn connected_components(g: &Graph) -> ComponentLabeling {
    ComponentLabeling::from_edges(g.n(), g.edges())
}

/// Minimum spanning forest under the `(w, u, v)` key. The result is unique.
pub fn kruskal_mst(g: &Graph) -> Forest {
    spanning_forest_local(g.edges(), g.n())
}

/// Spanning forest of the edge-induced graph on `n` vertices, built by
/// scanning edges in `(w, u, v)` order. Deterministic for a given edge set.
pub fn spanning_forest_local(edges: &[Edge], n: usize) -> Forest {
    let mut sorted: Vec<Edge> = edges.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut dsu = DisjointSet::new(n);
    let kept = sorted.into_iter().filter(|e| dsu.union(e.u, e.v)).collect::<Vec<_>>();
    Forest::new(n, kept).expect("kruskal output is acyclic")
}

/// Sequential `cg[g, sub]`.
pub fn build_component_graph_reference(g: &Graph, sub: &[Edge]) -> ComponentGraph {
    let labels = ComponentLabeling::from_edges(g.n(), sub);
    let mut inter: BTreeMap<(VertexId, VertexId), Edge> = BTreeMap::new();
    for e in g.edges() {
        let (a, b) = (labels.label(e.u), labels.label(e.v));
        if a == b {
            continue;
        }
        let pair = (a.min(b), a.max(b));
        inter
            .entry(pair)
            .and_modify(|best| {
                if e < best {
                    *best = *e;
                }
            })
            .or_insert(*e);
    }
    ComponentGraph { labels, inter }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum EdgeClass {
    Light,
    Heavy,
}

/// `F`-light / `F`-heavy classification of a single edge.
pub fn f_light_classify(f: &Forest, e: &Edge) -> EdgeClass {
    PathMax::new(f).classify(e)
}

/// Path-maximum queries over a forest. Each tree is rooted once; a query
/// walks both endpoints up to their meeting point.
#[derive(Debug, Clone)]
pub struct PathMax {
    parent: Vec<Option<(VertexId, Weight)>>,
    depth: Vec<usize>,
    root: Vec<VertexId>,
}

impl PathMax {
    pub fn new(f: &Forest) -> Self {
        let n = f.n();
        let mut adj: Vec<Vec<(VertexId, Weight)>> = vec![Vec::new(); n];
        for e in f.edges() {
            adj[e.u].push((e.v, e.w));
            adj[e.v].push((e.u, e.w));
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut root = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if root[s] != usize::MAX {
                continue;
            }
            root[s] = s;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &(y, w) in &adj[x] {
                    if root[y] == usize::MAX {
                        root[y] = s;
                        parent[y] = Some((x, w));
                        depth[y] = depth[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        PathMax { parent, depth, root }
    }

    /// Maximum weight on the forest path between `a` and `b`;
    /// `INFINITY` when they lie in different trees.
    pub fn path_max(&self, mut a: VertexId, mut b: VertexId) -> Weight {
        if self.root[a] != self.root[b] {
            return Weight::INFINITY;
        }
        let mut best: Option<Weight> = None;
        let mut bump = |w: Weight| best = Some(best.map_or(w, |b: Weight| b.max(w)));
        while self.depth[a] > self.depth[b] {
            let (p, w) = self.parent[a].expect("non-root has parent");
            bump(w);
            a = p;
        }
        while self.depth[b] > self.depth[a] {
            let (p, w) = self.parent[b].expect("non-root has parent");
            bump(w);
            b = p;
        }
        while a != b {
            let (pa, wa) = self.parent[a].expect("non-root has parent");
            let (pb, wb) = self.parent[b].expect("non-root has parent");
            bump(wa);
            bump(wb);
            a = pa;
            b = pb;
        }
        // a == b on entry means an empty path; treat like a missing path.
        best.unwrap_or(Weight::INFINITY)
    }

    pub fn classify(&self, e: &Edge) -> EdgeClass {
        if e.w > self.path_max(e.u, e.v) {
            EdgeClass::Heavy
        } else {
            EdgeClass::Light
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(x: u64) -> Weight {
        Weight::new(x).unwrap()
    }

    #[test]
    fn components_examples() {
        let g = Graph::empty(3);
        assert_eq!(connected_components(&g).as_slice(), &[0, 1, 2]);
        let g = Graph::unweighted(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(connected_components(&g).as_slice(), &[0, 0, 0]);
        let g = Graph::unweighted(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(connected_components(&g).as_slice(), &[0, 0, 0, 3, 3, 3]);
    }

    #[test]
    fn kruskal_triangle_and_tied_cycle() {
        let g = Graph::from_edges(3, [Edge::new(0, 1, w(1)), Edge::new(1, 2, w(2)), Edge::new(0, 2, w(3))]).unwrap();
        let f = kruskal_mst(&g);
        assert_eq!(f.edges(), &[Edge::new(0, 1, w(1)), Edge::new(1, 2, w(2))]);
        assert_eq!(f.total_weight(), 3);

        let g = Graph::from_edges(
            4,
            [
                Edge::new(0, 1, w(5)),
                Edge::new(1, 2, w(5)),
                Edge::new(2, 3, w(5)),
                Edge::new(0, 3, w(5)),
            ],
        )
        .unwrap();
        let f = kruskal_mst(&g);
        assert_eq!(
            f.edges(),
            &[Edge::new(0, 1, w(5)), Edge::new(0, 3, w(5)), Edge::new(1, 2, w(5))]
        );
    }

    #[test]
    fn spanning_forest_small_cases() {
        let one = Weight::ONE;
        let f = spanning_forest_local(&[Edge::new(0, 1, one), Edge::new(1, 2, one), Edge::new(0, 2, one)], 3);
        assert_eq!(f.len(), 2);
        assert_eq!(f.tree_count(), 1);
        assert!(spanning_forest_local(&[], 5).is_empty());
    }

    #[test]
    fn component_graph_collapses_pairs_to_min_witness() {
        // Components {0,1}, {2,3}, {4} with two crossing edges between the
        // first two.
        let g = Graph::from_edges(
            5,
            [
                Edge::new(0, 1, w(1)),
                Edge::new(2, 3, w(1)),
                Edge::new(0, 2, w(9)),
                Edge::new(1, 3, w(4)),
                Edge::new(3, 4, w(7)),
            ],
        )
        .unwrap();
        let sub = [Edge::new(0, 1, w(1)), Edge::new(2, 3, w(1))];
        let cg = build_component_graph_reference(&g, &sub);
        assert_eq!(cg.leaders(), vec![0, 2, 4]);
        assert_eq!(cg.inter.len(), 2);
        assert_eq!(cg.inter[&(0, 2)], Edge::new(1, 3, w(4)));
        assert_eq!(cg.inter[&(2, 4)], Edge::new(3, 4, w(7)));

        let cg = build_component_graph_reference(&g, g.edges());
        assert_eq!(cg.inter_edge_count(), 0);
        assert_eq!(cg.labels.component_count(), 1);
    }

    #[test]
    fn f_light_examples() {
        // u = 0, x = 1, v = 2
        let f = Forest::new(4, [Edge::new(0, 1, w(3)), Edge::new(1, 2, w(5))]).unwrap();
        assert_eq!(f_light_classify(&f, &Edge::new(0, 2, w(7))), EdgeClass::Heavy);
        assert_eq!(f_light_classify(&f, &Edge::new(0, 2, w(4))), EdgeClass::Light);
        assert_eq!(f_light_classify(&f, &Edge::new(0, 2, w(5))), EdgeClass::Light);
        assert_eq!(
            f_light_classify(&f, &Edge::new(0, 3, w(1_000_000_000))),
            EdgeClass::Light
        );
    }
}
