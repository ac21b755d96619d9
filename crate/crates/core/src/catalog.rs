//! Small reference graphs used throughout tests, benches and the CLI.

use crate::kgraph::KGraph;
use crate::skeleton::SkeletonBuilder;

fn build(b: SkeletonBuilder) -> KGraph {
    KGraph::new(b.build().expect("catalog skeleton is well formed")).expect("catalog skeleton is valid")
}

/// One vertex `v` with two loops `alpha`, `beta`.
pub fn g1() -> KGraph {
    build(
        SkeletonBuilder::new(1)
            .vertex("v")
            .edge("alpha", 0, "v", "v")
            .edge("beta", 0, "v", "v"),
    )
}

/// The golden-mean graph: edges `uu`, `uv` (source `u`, range `v`) and `vu`.
pub fn g2() -> KGraph {
    build(
        SkeletonBuilder::new(1)
            .vertices(["u", "v"])
            .edge("uu", 0, "u", "u")
            .edge("uv", 0, "v", "u")
            .edge("vu", 0, "u", "v"),
    )
}

/// One vertex, blue loops `b1`, `b2`, red loops `r1`, `r2`, squares `bᵢrⱼ = rⱼbᵢ`.
pub fn g3() -> KGraph {
    let mut b = SkeletonBuilder::new(2)
        .vertex("v")
        .edge("b1", 0, "v", "v")
        .edge("b2", 0, "v", "v")
        .edge("r1", 1, "v", "v")
        .edge("r2", 1, "v", "v");
    for i in ["1", "2"] {
        for j in ["1", "2"] {
            let (bi, rj) = (format!("b{i}"), format!("r{j}"));
            b = b.square((0, 1), [&bi, &rj], [&rj, &bi]);
        }
    }
    build(b)
}

/// One vertex, one loop per color, one square.
pub fn g4() -> KGraph {
    build(
        SkeletonBuilder::new(2)
            .vertex("v")
            .edge("b", 0, "v", "v")
            .edge("r", 1, "v", "v")
            .square((0, 1), ["b", "r"], ["r", "b"]),
    )
}

/// Same edges as [`g3`] but with squares `bᵢrⱼ = rᵢbⱼ`, so that every path
/// is invariant under trading one blue step for one red step.
pub fn periodic_two_graph() -> KGraph {
    let mut b = SkeletonBuilder::new(2)
        .vertex("v")
        .edge("b1", 0, "v", "v")
        .edge("b2", 0, "v", "v")
        .edge("r1", 1, "v", "v")
        .edge("r2", 1, "v", "v");
    for i in ["1", "2"] {
        for j in ["1", "2"] {
            b = b.square(
                (0, 1),
                [&format!("b{i}"), &format!("r{j}")],
                [&format!("r{i}"), &format!("b{j}")],
            );
        }
    }
    build(b)
}

/// `u ⇄ v`: irreducible with period 2.
pub fn two_cycle() -> KGraph {
    build(
        SkeletonBuilder::new(1)
            .vertices(["u", "v"])
            .edge("uv", 0, "v", "u")
            .edge("vu", 0, "u", "v"),
    )
}

/// Loops at `u` and `v` plus an edge from `u` to `v`; not strongly connected.
pub fn reducible() -> KGraph {
    build(
        SkeletonBuilder::new(1)
            .vertices(["u", "v"])
            .edge("uu", 0, "u", "u")
            .edge("vv", 0, "v", "v")
            .edge("uv", 0, "v", "u"),
    )
}

/// The four example graphs by name.
pub fn by_name(name: &str) -> Option<KGraph> {
    match name {
        "g1" => Some(g1()),
        "g2" => Some(g2()),
        "g3" => Some(g3()),
        "g4" => Some(g4()),
        "periodic" => Some(periodic_two_graph()),
        "two_cycle" => Some(two_cycle()),
        "reducible" => Some(reducible()),
        _ => None,
    }
}

/// Seeded random graphs for property tests. Every generated graph is
/// irreducible and satisfies the standing assumption.
pub mod random {
    use std::collections::BTreeMap;

    use rand::seq::SliceRandom;
    use rand::Rng;

    use crate::construct::product;
    use crate::kgraph::KGraph;
    use crate::skeleton::SkeletonBuilder;

    /// `(range, source)` pairs of a random multigraph on `n` vertices: a
    /// Hamiltonian cycle plus extra edges, at most `max_out` leaving each vertex.
    fn random_edges<R: Rng + ?Sized>(rng: &mut R, n: usize, max_out: usize) -> Vec<(usize, usize)> {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut edges = Vec::new();
        for i in 0..n {
            edges.push((order[(i + 1) % n], order[i]));
        }
        for s in 0..n {
            let extra = rng.random_range(0..max_out.max(1));
            for _ in 0..extra {
                edges.push((rng.random_range(0..n), s));
            }
        }
        edges.sort_unstable();
        edges
    }

    fn vertex_names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    /// A 1-graph with `1..=max_vertices` vertices.
    pub fn one_graph<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize, max_out: usize) -> KGraph {
        let n = rng.random_range(1..=max_vertices.max(1));
        let names = vertex_names(n);
        let mut b = SkeletonBuilder::new(1).vertices(names.iter().cloned());
        for (i, (r, s)) in random_edges(rng, n, max_out).into_iter().enumerate() {
            b = b.edge(format!("e{i}"), 0, &names[r], &names[s]);
        }
        KGraph::new(b.build().expect("well formed")).expect("1-graphs need no squares")
    }

    /// A 2-graph whose two colors share one random vertex matrix, with
    /// squares drawn as random bijections between the composable pairs of
    /// each `(range, source)` class.
    pub fn two_graph<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize, max_out: usize) -> KGraph {
        let n = rng.random_range(1..=max_vertices.max(1));
        let names = vertex_names(n);
        let edges = random_edges(rng, n, max_out);
        let mut b = SkeletonBuilder::new(2).vertices(names.iter().cloned());
        for (i, (r, s)) in edges.iter().enumerate() {
            b = b.edge(format!("a{i}"), 0, &names[*r], &names[*s]);
            b = b.edge(format!("b{i}"), 1, &names[*r], &names[*s]);
        }
        // Composable pairs xy (s(x) = r(y)) keyed by (r(x), s(y)).
        let mut pairs: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
        for (i, x) in edges.iter().enumerate() {
            for (j, y) in edges.iter().enumerate() {
                if x.1 == y.0 {
                    pairs.entry((x.0, y.1)).or_default().push((i, j));
                }
            }
        }
        for list in pairs.values() {
            let mut right = list.clone();
            right.shuffle(rng);
            for (&(f, g), &(gp, fp)) in list.iter().zip(&right) {
                b = b.square(
                    (0, 1),
                    [&format!("a{f}"), &format!("b{g}")],
                    [&format!("b{gp}"), &format!("a{fp}")],
                );
            }
        }
        KGraph::new(b.build().expect("well formed")).expect("random squares are bijective")
    }

    /// A 3-graph built as the product of a random 1-graph and a random
    /// 2-graph, which is cube consistent by construction. The factors are
    /// sized so that the product has at most `max_vertices` vertices.
    pub fn three_graph<R: Rng + ?Sized>(rng: &mut R, max_vertices: usize, max_out: usize) -> KGraph {
        let a = one_graph(rng, max_vertices, max_out);
        let b = two_graph(rng, (max_vertices / a.vertex_count()).max(1), max_out);
        product(&a, &b).expect("products of valid graphs are valid")
    }

    pub fn graph<R: Rng + ?Sized>(rng: &mut R, k: usize, max_vertices: usize, max_out: usize) -> KGraph {
        match k {
            1 => one_graph(rng, max_vertices, max_out),
            2 => two_graph(rng, max_vertices, max_out),
            3 => three_graph(rng, max_vertices, max_out),
            _ => panic!("random graphs are provided for k ≤ 3"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn named_graphs() {
        for name in ["g1", "g2", "g3", "g4", "periodic", "two_cycle", "reducible"] {
            assert!(by_name(name).is_some());
        }
        assert!(by_name("g5").is_none());
    }

    #[test]
    fn random_graphs_are_irreducible() {
        use crate::degree::DegreeVector;
        use crate::spectral::{classify_connectivity, DEFAULT_SEARCH_BOUND};
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=3 {
            for _ in 0..10 {
                let kg = random::graph(&mut rng, k, 6, 4);
                assert_eq!(kg.k(), k);
                assert!(kg.vertex_count() <= 6);
                let c = classify_connectivity(&kg, &DegreeVector::splat(k, DEFAULT_SEARCH_BOUND));
                assert!(c.irreducible);
            }
        }
    }
}
