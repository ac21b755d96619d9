//! Derived graphs: opposite, product, diamond and diagonal restriction.

use serde::{Deserialize, Serialize};

use crate::degree::DegreeVector;
use crate::error::{KGraphError, Result};
use crate::kgraph::KGraph;
use crate::skeleton::SkeletonBuilder;

/// Separator used in the ids of pair vertices and pair edges.
pub const PAIR_SEPARATOR: char = '*';

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineMode {
    Product,
    Diamond,
}

fn pair(a: &str, b: &str) -> String {
    format!("{a}{PAIR_SEPARATOR}{b}")
}

/// Λ^op: same vertex and edge ids, range and source exchanged. The square
/// `f·g = g′·f′` becomes `f′ᵒᵖ·g′ᵒᵖ = gᵒᵖ·fᵒᵖ`.
///
/// Edge indices are preserved, so [`KGraph::opposite_of`] on the result
/// transports morphisms.
pub fn opposite_graph(kg: &KGraph) -> Result<KGraph> {
    let sk = kg.skeleton();
    let mut b = SkeletonBuilder::new(sk.k()).vertices(sk.vertex_ids().iter().cloned());
    for e in sk.edges() {
        b = b.edge(e.id.clone(), e.color, sk.vertex_id(e.source), sk.vertex_id(e.range));
    }
    for t in sk.squares() {
        for s in &t.entries {
            let (f, g) = s.left;
            let (gp, fp) = s.right;
            b = b.square(
                t.colors,
                [sk.edge_id(fp), sk.edge_id(gp)],
                [sk.edge_id(g), sk.edge_id(f)],
            );
        }
    }
    KGraph::new(b.build()?)
}

pub fn combine(a: &KGraph, b: &KGraph, mode: CombineMode) -> Result<KGraph> {
    match mode {
        CombineMode::Product => product(a, b),
        CombineMode::Diamond => diamond(a, b),
    }
}

/// Λ₁ × Λ₂ as a `(k₁ + k₂)`-graph; the colors of Λ₂ are shifted by `k₁`.
/// Vertices are `v₁*v₂`, edges `e₁*v₂` and `v₁*e₂`.
pub fn product(a: &KGraph, b: &KGraph) -> Result<KGraph> {
    let (s1, s2) = (a.skeleton(), b.skeleton());
    let k1 = s1.k();
    let mut out = SkeletonBuilder::new(k1 + s2.k());
    for v1 in s1.vertex_ids() {
        for v2 in s2.vertex_ids() {
            out = out.vertex(pair(v1, v2));
        }
    }
    for e in s1.edges() {
        for v2 in s2.vertex_ids() {
            out = out.edge(
                pair(&e.id, v2),
                e.color,
                pair(s1.vertex_id(e.range), v2),
                pair(s1.vertex_id(e.source), v2),
            );
        }
    }
    for e in s2.edges() {
        for v1 in s1.vertex_ids() {
            out = out.edge(
                pair(v1, &e.id),
                k1 + e.color,
                pair(v1, s2.vertex_id(e.range)),
                pair(v1, s2.vertex_id(e.source)),
            );
        }
    }
    for t in s1.squares() {
        for s in &t.entries {
            for v2 in s2.vertex_ids() {
                let id = |e| pair(s1.edge_id(e), v2);
                out = out.square(
                    t.colors,
                    [&id(s.left.0), &id(s.left.1)],
                    [&id(s.right.0), &id(s.right.1)],
                );
            }
        }
    }
    for t in s2.squares() {
        let colors = (t.colors.0 + k1, t.colors.1 + k1);
        for s in &t.entries {
            for v1 in s1.vertex_ids() {
                let id = |e| pair(v1, s2.edge_id(e));
                out = out.square(colors, [&id(s.left.0), &id(s.left.1)], [&id(s.right.0), &id(s.right.1)]);
            }
        }
    }
    // (f₁, v₂)(s(f₁), g₂) = (r(f₁), g₂)(f₁, s(g₂))
    for f1 in s1.edges() {
        for g2 in s2.edges() {
            let (r1, src1) = (s1.vertex_id(f1.range), s1.vertex_id(f1.source));
            let (r2, src2) = (s2.vertex_id(g2.range), s2.vertex_id(g2.source));
            out = out.square(
                (f1.color, k1 + g2.color),
                [&pair(&f1.id, r2), &pair(src1, &g2.id)],
                [&pair(r1, &g2.id), &pair(&f1.id, src2)],
            );
        }
    }
    KGraph::new(out.build()?)
}

/// Λ₁ ◇ Λ₂: pairs of morphisms of equal degree. Edges of color `i` are
/// pairs of color-`i` edges, named `e₁*e₂`.
pub fn diamond(a: &KGraph, b: &KGraph) -> Result<KGraph> {
    let (s1, s2) = (a.skeleton(), b.skeleton());
    if s1.k() != s2.k() {
        return Err(KGraphError::RankMismatch(s1.k(), s2.k()));
    }
    let mut out = SkeletonBuilder::new(s1.k());
    for v1 in s1.vertex_ids() {
        for v2 in s2.vertex_ids() {
            out = out.vertex(pair(v1, v2));
        }
    }
    for e1 in s1.edges() {
        for e2 in s2.edges().iter().filter(|e2| e2.color == e1.color) {
            out = out.edge(
                pair(&e1.id, &e2.id),
                e1.color,
                pair(s1.vertex_id(e1.range), s2.vertex_id(e2.range)),
                pair(s1.vertex_id(e1.source), s2.vertex_id(e2.source)),
            );
        }
    }
    for (t1, t2) in s1.squares().iter().zip(s2.squares()) {
        for x in &t1.entries {
            for y in &t2.entries {
                let id = |p: crate::skeleton::Edge, q| pair(s1.edge_id(p), s2.edge_id(q));
                out = out.square(
                    t1.colors,
                    [&id(x.left.0, y.left.0), &id(x.left.1, y.left.1)],
                    [&id(x.right.0, y.right.0), &id(x.right.1, y.right.1)],
                );
            }
        }
    }
    KGraph::new(out.build()?)
}

/// The 1-graph whose edges are the morphisms of degree `e = (1,…,1)`; edge ids
/// join the normal-form word with `.`.
pub fn diagonal_restriction(kg: &KGraph) -> Result<KGraph> {
    let sk = kg.skeleton();
    let paths = kg.enumerate_morphisms(&DegreeVector::ones(kg.k()))?;
    let mut out = SkeletonBuilder::new(1).vertices(sk.vertex_ids().iter().cloned());
    for lam in &paths {
        out = out.edge(
            kg.word_ids(lam).join("."),
            0,
            sk.vertex_id(lam.range()),
            sk.vertex_id(lam.source()),
        );
    }
    KGraph::new(out.build()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::spectral::vertex_matrix;

    fn rows(kg: &KGraph, p: &[i64]) -> Vec<Vec<u64>> {
        vertex_matrix(kg, &DegreeVector::new(p.to_vec())).to_u64_rows().unwrap()
    }

    #[test]
    fn opposite_transposes_and_is_an_involution() {
        let g2 = catalog::g2();
        let op = opposite_graph(&g2).unwrap();
        assert_eq!(rows(&op, &[1]), vec![vec![1, 1], vec![1, 0]]);
        for p in 0..4 {
            let m = vertex_matrix(&g2, &DegreeVector::from([p]));
            assert_eq!(vertex_matrix(&op, &DegreeVector::from([p])), m.transpose());
        }
        for kg in [catalog::g1(), catalog::g3(), catalog::periodic_two_graph()] {
            let twice = opposite_graph(&opposite_graph(&kg).unwrap()).unwrap();
            assert_eq!(twice.skeleton(), kg.skeleton());
        }
    }

    #[test]
    fn opposite_of_g1_reverses_words() {
        let g1 = catalog::g1();
        let op = opposite_graph(&g1).unwrap();
        let w = g1.morphism_from_ids(&["alpha", "alpha", "beta"]).unwrap();
        assert_eq!(op.word_ids(&op.opposite_of(&w)), ["beta", "alpha", "alpha"]);
    }

    #[test]
    fn product_of_g1_with_itself() {
        let p = product(&catalog::g1(), &catalog::g1()).unwrap();
        assert_eq!(p.k(), 2);
        assert_eq!(p.vertex_count(), 1);
        assert_eq!(rows(&p, &[1, 0]), vec![vec![2]]);
        assert_eq!(rows(&p, &[0, 1]), vec![vec![2]]);
        assert_eq!(p.skeleton().vertex_ids(), ["v*v"]);
    }

    #[test]
    fn product_with_single_loop_factor_keeps_matrices() {
        let p = product(&catalog::g2(), &catalog::g4()).unwrap();
        assert_eq!(p.k(), 3);
        assert_eq!(rows(&p, &[1, 0, 0]), rows(&catalog::g2(), &[1]));
        assert_eq!(rows(&p, &[0, 1, 0]), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(rows(&p, &[2, 1, 1]), rows(&catalog::g2(), &[2]));
    }

    #[test]
    fn product_of_two_graphs_is_cube_consistent() {
        let p = product(&catalog::g3(), &catalog::g2()).unwrap();
        assert_eq!(p.k(), 3);
        assert_eq!(p.vertex_count(), 2);
    }

    #[test]
    fn diamond_of_g1_with_itself() {
        let d = diamond(&catalog::g1(), &catalog::g1()).unwrap();
        assert_eq!(d.k(), 1);
        assert_eq!(rows(&d, &[1]), vec![vec![4]]);
        let d3 = diamond(&catalog::g3(), &catalog::g4()).unwrap();
        assert_eq!(rows(&d3, &[1, 1]), vec![vec![4]]);
        assert_eq!(
            combine(&catalog::g1(), &catalog::g3(), CombineMode::Diamond).unwrap_err(),
            KGraphError::RankMismatch(1, 2)
        );
    }

    #[test]
    fn diagonal_restrictions() {
        let d1 = diagonal_restriction(&catalog::g1()).unwrap();
        assert_eq!(d1.skeleton(), catalog::g1().skeleton());
        let d3 = diagonal_restriction(&catalog::g3()).unwrap();
        assert_eq!(rows(&d3, &[1]), vec![vec![4]]);
        let d4 = diagonal_restriction(&catalog::g4()).unwrap();
        assert_eq!(rows(&d4, &[1]), vec![vec![1]]);
        let d2 = diagonal_restriction(&catalog::g2()).unwrap();
        assert_eq!(rows(&d2, &[1]), rows(&catalog::g2(), &[1]));
    }
}
