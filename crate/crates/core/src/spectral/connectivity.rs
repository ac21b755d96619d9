use std::collections::HashMap;

use serde::Serialize;

use crate::degree::DegreeVector;
use crate::kgraph::KGraph;

/// Default per-coordinate bound for the primitivity scan.
pub const DEFAULT_SEARCH_BOUND: i64 = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectivityClass {
    pub irreducible: bool,
    pub primitive: bool,
    /// `M` with `|Λᵐ| > 0` entrywise for every `m ≥ M`; present iff primitive.
    pub primitivity_threshold: Option<DegreeVector>,
    /// Irreducible but no positive power was found within the bound.
    pub inconclusive: bool,
    pub search_bound: DegreeVector,
}

type BoolMatrix = Vec<Vec<bool>>;

fn bool_generators(kg: &KGraph) -> Vec<BoolMatrix> {
    let n = kg.vertex_count();
    (0..kg.k())
        .map(|c| {
            let mut m = vec![vec![false; n]; n];
            for e in kg.skeleton().edges().iter().filter(|e| e.color == c) {
                m[e.range.0][e.source.0] = true;
            }
            m
        })
        .collect()
}

fn bool_mul(a: &BoolMatrix, b: &BoolMatrix) -> BoolMatrix {
    let n = a.len();
    let mut out = vec![vec![false; n]; n];
    for i in 0..n {
        for l in 0..n {
            if a[i][l] {
                for j in 0..n {
                    out[i][j] |= b[l][j];
                }
            }
        }
    }
    out
}

fn all_true(m: &BoolMatrix) -> bool {
    m.iter().all(|r| r.iter().all(|&x| x))
}

/// Irreducibility is decided exactly from the union of the color graphs;
/// primitivity by scanning the zero patterns of `|Λᵐ|` for `m ≤ search_bound`.
///
/// Among the nonzero degrees `M` with `|Λ^M|` entrywise positive the threshold
/// reported is the one of least total degree, ties broken lexicographically.
/// Every `m ≥ M` in the box is then checked as well.
pub fn classify_connectivity(kg: &KGraph, search_bound: &DegreeVector) -> ConnectivityClass {
    let n = kg.vertex_count();
    let gens = bool_generators(kg);

    // transitive closure of the union graph, paths of length >= 1
    let mut reach: BoolMatrix = vec![vec![false; n]; n];
    for g in &gens {
        for i in 0..n {
            for j in 0..n {
                reach[i][j] |= g[i][j];
            }
        }
    }
    for l in 0..n {
        for i in 0..n {
            if reach[i][l] {
                for j in 0..n {
                    if reach[l][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    let irreducible = all_true(&reach);

    let zero = DegreeVector::zero(kg.k());
    let mut patterns: HashMap<DegreeVector, BoolMatrix> = HashMap::new();
    let mut identity = vec![vec![false; n]; n];
    for (i, row) in identity.iter_mut().enumerate() {
        row[i] = true;
    }
    patterns.insert(zero.clone(), identity);
    let mut best: Option<DegreeVector> = None;
    for m in DegreeVector::box_iter(&zero, search_bound) {
        if m.is_zero() {
            continue;
        }
        let c = (0..m.k()).rev().find(|&c| m.get(c) > 0).expect("nonzero");
        let prev = &m - &DegreeVector::unit(m.k(), c);
        let pat = bool_mul(&patterns[&prev], &gens[c]);
        if all_true(&pat) {
            let better = match &best {
                None => true,
                Some(b) => (m.total(), &m) < (b.total(), b),
            };
            if better {
                best = Some(m.clone());
            }
        }
        patterns.insert(m, pat);
    }

    let threshold = best.filter(|m| DegreeVector::box_iter(m, search_bound).all(|q| all_true(&patterns[&q])));
    let primitive = irreducible && threshold.is_some();
    ConnectivityClass {
        irreducible,
        primitive,
        inconclusive: irreducible && !primitive,
        primitivity_threshold: if primitive { threshold } else { None },
        search_bound: search_bound.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn bound(k: usize) -> DegreeVector {
        DegreeVector::splat(k, DEFAULT_SEARCH_BOUND)
    }

    #[test]
    fn g1_primitive_at_one() {
        let c = classify_connectivity(&catalog::g1(), &bound(1));
        assert!(c.irreducible && c.primitive && !c.inconclusive);
        assert_eq!(c.primitivity_threshold, Some(DegreeVector::from([1])));
    }

    #[test]
    fn g2_primitive_at_two() {
        let c = classify_connectivity(&catalog::g2(), &bound(1));
        assert!(c.primitive);
        assert_eq!(c.primitivity_threshold, Some(DegreeVector::from([2])));
    }

    #[test]
    fn two_cycle_is_irreducible_not_primitive() {
        let c = classify_connectivity(&catalog::two_cycle(), &bound(1));
        assert!(c.irreducible);
        assert!(!c.primitive);
        assert!(c.inconclusive);
        assert_eq!(c.primitivity_threshold, None);
    }

    #[test]
    fn reducible_graph() {
        let c = classify_connectivity(&catalog::reducible(), &bound(1));
        assert!(!c.irreducible && !c.primitive && !c.inconclusive);
    }

    #[test]
    fn g3_threshold_is_a_unit_degree() {
        let c = classify_connectivity(&catalog::g3(), &bound(2));
        assert_eq!(c.primitivity_threshold, Some(DegreeVector::from([0, 1])));
    }
}
