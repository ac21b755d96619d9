//! Validated k-graphs and their morphisms.
//!
//! Morphisms are stored as words of edges in *color-normal form*: all color-0
//! edges first, then color-1 edges, and so on, each adjacent pair composable.
//! Reordering a word uses the square tables one adjacent transposition at a
//! time; cube consistency makes the result independent of the swap order.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use sha2::{Digest, Sha256};

use crate::degree::DegreeVector;
use crate::error::{KGraphError, Result};
use crate::skeleton::{Edge, Skeleton, Vertex};
use crate::spectral::vertex_matrix;
use crate::validate::{swap_table, validate_skeleton};

/// Default cap on the number of morphisms a single enumeration may return.
pub const DEFAULT_ENUMERATION_CAP: u64 = 1_000_000;

/// A morphism λ ∈ Λⁿ in color-normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Morphism {
    degree: DegreeVector,
    range: Vertex,
    source: Vertex,
    edges: Vec<Edge>,
}

impl Morphism {
    pub fn degree(&self) -> &DegreeVector {
        &self.degree
    }

    pub fn range(&self) -> Vertex {
        self.range
    }

    pub fn source(&self) -> Vertex {
        self.source
    }

    /// The normal-form word; empty exactly for vertex identities.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_identity(&self) -> bool {
        self.edges.is_empty()
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Morphism{{d={}, r={}, s={}, {:?}}}",
            self.degree,
            self.range.0,
            self.source.0,
            self.edges.iter().map(|e| e.0).collect::<Vec<_>>()
        )
    }
}

/// A skeleton that passed [`validate_skeleton`], with lookup tables for path
/// algebra.
#[derive(Clone, Debug)]
pub struct KGraph {
    skeleton: Skeleton,
    swap: HashMap<(Edge, Edge), (Edge, Edge)>,
    /// `[color][vertex]` → edges of that color with that range.
    by_range: Vec<Vec<Vec<Edge>>>,
    /// `[color][vertex]` → edges of that color with that source.
    by_source: Vec<Vec<Vec<Edge>>>,
    fingerprint: String,
    cap: u64,
}

impl PartialEq for KGraph {
    fn eq(&self, other: &Self) -> bool {
        self.skeleton == other.skeleton
    }
}

impl KGraph {
    pub fn new(skeleton: Skeleton) -> Result<KGraph> {
        let report = validate_skeleton(&skeleton);
        if !report.is_valid() {
            return Err(KGraphError::ValidationFailure(report));
        }
        let k = skeleton.k();
        let nv = skeleton.vertex_count();
        let mut by_range = vec![vec![Vec::new(); nv]; k];
        let mut by_source = vec![vec![Vec::new(); nv]; k];
        for (i, e) in skeleton.edges().iter().enumerate() {
            by_range[e.color][e.range.0].push(Edge(i));
            by_source[e.color][e.source.0].push(Edge(i));
        }
        let fingerprint = fingerprint(&skeleton);
        Ok(KGraph {
            swap: swap_table(&skeleton),
            skeleton,
            by_range,
            by_source,
            fingerprint,
            cap: DEFAULT_ENUMERATION_CAP,
        })
    }

    /// Replaces the enumeration cap.
    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn k(&self) -> usize {
        self.skeleton.k()
    }

    pub fn vertex_count(&self) -> usize {
        self.skeleton.vertex_count()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = Vertex> + '_ {
        self.skeleton.vertices()
    }

    /// Short content hash of the skeleton, used to tag serialized windows.
    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn edges_with_range(&self, color: usize, v: Vertex) -> &[Edge] {
        &self.by_range[color][v.0]
    }

    pub fn edges_with_source(&self, color: usize, v: Vertex) -> &[Edge] {
        &self.by_source[color][v.0]
    }

    pub fn identity(&self, v: Vertex) -> Morphism {
        Morphism {
            degree: DegreeVector::zero(self.k()),
            range: v,
            source: v,
            edges: Vec::new(),
        }
    }

    pub fn edge_morphism(&self, e: Edge) -> Morphism {
        let ce = self.skeleton.edge(e);
        Morphism {
            degree: DegreeVector::unit(self.k(), ce.color),
            range: ce.range,
            source: ce.source,
            edges: vec![e],
        }
    }

    /// Builds a morphism from a composable word of edges in any color order.
    pub fn morphism_from_word(&self, word: &[Edge]) -> Result<Morphism> {
        let Some(first) = word.first() else {
            return Err(KGraphError::DegreeMismatch(
                "empty word; use identity() for vertices".into(),
            ));
        };
        for pair in word.windows(2) {
            let (a, b) = (self.skeleton.edge(pair[0]), self.skeleton.edge(pair[1]));
            if a.source != b.range {
                return Err(KGraphError::NotComposable {
                    source_vertex: self.skeleton.vertex_id(a.source).to_owned(),
                    range_vertex: self.skeleton.vertex_id(b.range).to_owned(),
                });
            }
        }
        let mut degree = vec![0i64; self.k()];
        for e in word {
            degree[self.skeleton.color(*e)] += 1;
        }
        Ok(Morphism {
            degree: DegreeVector::new(degree),
            range: self.skeleton.edge(*first).range,
            source: self.skeleton.edge(*word.last().expect("nonempty")).source,
            edges: self.normalize(word),
        })
    }

    /// Convenience constructor from edge ids, e.g. `["b1", "r2"]`.
    pub fn morphism_from_ids(&self, ids: &[&str]) -> Result<Morphism> {
        let word = ids
            .iter()
            .map(|id| {
                self.skeleton
                    .edge_by_id(id)
                    .ok_or_else(|| KGraphError::MalformedSkeleton {
                        location: "word".into(),
                        message: format!("unknown edge {id:?}"),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        self.morphism_from_word(&word)
    }

    /// Edge ids of a morphism's normal-form word.
    pub fn word_ids(&self, m: &Morphism) -> Vec<String> {
        self.skeleton.word_ids(&m.edges)
    }

    /// Swaps the adjacent edges at `pos, pos + 1` through their commuting
    /// square. Returns `false` (leaving the word untouched) when they have the
    /// same color.
    pub fn swap_at(&self, word: &mut [Edge], pos: usize) -> bool {
        match self.swap.get(&(word[pos], word[pos + 1])) {
            Some(&(a, b)) => {
                word[pos] = a;
                word[pos + 1] = b;
                true
            }
            None => false,
        }
    }

    /// Rewrites a composable word so that its color sequence becomes
    /// `target`, which must be a permutation of the word's colors.
    pub fn reorder(&self, word: &[Edge], target: &[usize]) -> Vec<Edge> {
        debug_assert_eq!(word.len(), target.len());
        let mut w = word.to_vec();
        for p in 0..w.len() {
            let want = target[p];
            let q = (p..w.len())
                .find(|&q| self.skeleton.color(w[q]) == want)
                .expect("target is a permutation of the word's colors");
            // colors strictly between p and q differ from `want`
            for pos in (p..q).rev() {
                let swapped = self.swap_at(&mut w, pos);
                debug_assert!(swapped);
            }
        }
        w
    }

    /// Color-normal form of a composable word.
    pub fn normalize(&self, word: &[Edge]) -> Vec<Edge> {
        let mut colors: Vec<usize> = word.iter().map(|e| self.skeleton.color(*e)).collect();
        if colors.windows(2).all(|c| c[0] <= c[1]) {
            return word.to_vec();
        }
        colors.sort_unstable();
        self.reorder(word, &colors)
    }

    /// Exact number of morphisms of degree `n`.
    pub fn count(&self, n: &DegreeVector) -> BigUint {
        vertex_matrix(self, n).total()
    }

    fn check_cap(&self, n: &DegreeVector, count: BigUint) -> Result<()> {
        if count > BigUint::from(self.cap) {
            return Err(KGraphError::BoundExceeded {
                what: format!("Λ^{n}"),
                count: count.to_string(),
                cap: self.cap,
            });
        }
        Ok(())
    }

    fn check_degree(&self, n: &DegreeVector) -> Result<()> {
        if n.k() != self.k() || !n.is_nonneg() {
            return Err(KGraphError::DegreeMismatch(format!(
                "{n} is not an element of N^{}",
                self.k()
            )));
        }
        Ok(())
    }

    /// All of Λⁿ, each in normal form, ordered by range vertex and then
    /// lexicographically by edge index.
    pub fn enumerate_morphisms(&self, n: &DegreeVector) -> Result<Vec<Morphism>> {
        self.check_degree(n)?;
        self.check_cap(n, self.count(n))?;
        let starts: Vec<Vertex> = self.vertices().collect();
        Ok(self.extend_right(n, &starts))
    }

    /// Morphisms of degree `n` with range `v`.
    pub fn enumerate_with_range(&self, n: &DegreeVector, v: Vertex) -> Result<Vec<Morphism>> {
        self.check_degree(n)?;
        let m = vertex_matrix(self, n);
        self.check_cap(n, m.row_sum(v.0))?;
        Ok(self.extend_right(n, &[v]))
    }

    /// Morphisms of degree `n` with source `v`.
    pub fn enumerate_with_source(&self, n: &DegreeVector, v: Vertex) -> Result<Vec<Morphism>> {
        self.check_degree(n)?;
        let m = vertex_matrix(self, n);
        self.check_cap(n, m.col_sum(v.0))?;
        // Build words right to left in reversed color order.
        let mut partial: Vec<(Vec<Edge>, Vertex)> = vec![(Vec::new(), v)];
        for color in (0..self.k()).rev() {
            for _ in 0..n.get(color) {
                let mut next = Vec::with_capacity(partial.len() * 2);
                for (word, r) in &partial {
                    for &e in self.edges_with_source(color, *r) {
                        let mut w = Vec::with_capacity(word.len() + 1);
                        w.push(e);
                        w.extend_from_slice(word);
                        next.push((w, self.skeleton.edge(e).range));
                    }
                }
                partial = next;
            }
        }
        let mut out: Vec<Morphism> = partial
            .into_iter()
            .map(|(edges, r)| Morphism {
                degree: n.clone(),
                range: r,
                source: v,
                edges,
            })
            .collect();
        out.sort();
        Ok(out)
    }

    fn extend_right(&self, n: &DegreeVector, starts: &[Vertex]) -> Vec<Morphism> {
        let mut partial: Vec<(Vertex, Vec<Edge>, Vertex)> = starts.iter().map(|&v| (v, Vec::new(), v)).collect();
        for color in 0..self.k() {
            for _ in 0..n.get(color) {
                let mut next = Vec::with_capacity(partial.len() * 2);
                for (r, word, s) in &partial {
                    for &e in self.edges_with_range(color, *s) {
                        let mut w = word.clone();
                        w.push(e);
                        next.push((*r, w, self.skeleton.edge(e).source));
                    }
                }
                partial = next;
            }
        }
        partial
            .into_iter()
            .map(|(range, edges, source)| Morphism {
                degree: n.clone(),
                range,
                source,
                edges,
            })
            .collect()
    }

    /// λ = μ·ν, requiring `s(μ) = r(ν)`.
    pub fn compose(&self, mu: &Morphism, nu: &Morphism) -> Result<Morphism> {
        if mu.source != nu.range {
            return Err(KGraphError::NotComposable {
                source_vertex: self.skeleton.vertex_id(mu.source).to_owned(),
                range_vertex: self.skeleton.vertex_id(nu.range).to_owned(),
            });
        }
        if mu.is_identity() {
            return Ok(nu.clone());
        }
        if nu.is_identity() {
            return Ok(mu.clone());
        }
        let mut word = Vec::with_capacity(mu.edges.len() + nu.edges.len());
        word.extend_from_slice(&mu.edges);
        word.extend_from_slice(&nu.edges);
        Ok(Morphism {
            degree: &mu.degree + &nu.degree,
            range: mu.range,
            source: nu.source,
            edges: self.normalize(&word),
        })
    }

    /// The unique `(ν₁, ν₂)` with `d(ν₁) = n1`, `d(ν₂) = n2` and `ν₁ν₂ = λ`.
    pub fn factorize(&self, lambda: &Morphism, n1: &DegreeVector, n2: &DegreeVector) -> Result<(Morphism, Morphism)> {
        if n1.k() != self.k() || n2.k() != self.k() || !n1.is_nonneg() || !n2.is_nonneg() {
            return Err(KGraphError::DegreeMismatch(format!(
                "split {n1} + {n2} is not in N^{}",
                self.k()
            )));
        }
        if &(n1 + n2) != lambda.degree() {
            return Err(KGraphError::DegreeMismatch(format!(
                "{n1} + {n2} != d(λ) = {}",
                lambda.degree()
            )));
        }
        let target: Vec<usize> = normal_colors(n1).chain(normal_colors(n2)).collect();
        let word = self.reorder(&lambda.edges, &target);
        let cut = n1.total() as usize;
        let (w1, w2) = word.split_at(cut);
        let mid = match w1.last() {
            Some(e) => self.skeleton.edge(*e).source,
            None => lambda.range,
        };
        Ok((
            Morphism {
                degree: n1.clone(),
                range: lambda.range,
                source: mid,
                edges: w1.to_vec(),
            },
            Morphism {
                degree: n2.clone(),
                range: mid,
                source: lambda.source,
                edges: w2.to_vec(),
            },
        ))
    }

    /// The sub-block λ(m, n) for `0 ≤ m ≤ n ≤ d(λ)`.
    pub fn block(&self, lambda: &Morphism, m: &DegreeVector, n: &DegreeVector) -> Result<Morphism> {
        let d = lambda.degree();
        if !(m.is_nonneg() && m.le(n) && n.le(d)) {
            return Err(KGraphError::DegreeMismatch(format!(
                "block ({m}, {n}) is not inside [0, {d}]"
            )));
        }
        if m.is_zero() && n == d {
            return Ok(lambda.clone());
        }
        let (_, rest) = self.factorize(lambda, m, &(d - m))?;
        let (mid, _) = self.factorize(&rest, &(n - m), &(d - n))?;
        Ok(mid)
    }

    /// Transports a morphism of the graph this one is opposite to: reverses the
    /// word, swaps range and source, and normalizes in `self`.
    pub fn opposite_of(&self, m: &Morphism) -> Morphism {
        let mut word = m.edges.clone();
        word.reverse();
        Morphism {
            degree: m.degree.clone(),
            range: m.source,
            source: m.range,
            edges: self.normalize(&word),
        }
    }
}

/// The color sequence of the normal form of degree `n`.
pub fn normal_colors(n: &DegreeVector) -> impl Iterator<Item = usize> + '_ {
    n.components()
        .iter()
        .enumerate()
        .flat_map(|(c, &len)| std::iter::repeat_n(c, len.max(0) as usize))
}

fn fingerprint(sk: &Skeleton) -> String {
    let mut h = Sha256::new();
    h.update(sk.k().to_le_bytes());
    for v in sk.vertex_ids() {
        h.update(v.as_bytes());
        h.update([0u8]);
    }
    for e in sk.edges() {
        h.update(e.id.as_bytes());
        h.update([0u8]);
        h.update(e.color.to_le_bytes());
        h.update(e.range.0.to_le_bytes());
        h.update(e.source.0.to_le_bytes());
    }
    for t in sk.squares() {
        for s in &t.entries {
            for e in [s.left.0, s.left.1, s.right.0, s.right.1] {
                h.update(e.0.to_le_bytes());
            }
        }
    }
    hex::encode(&h.finalize()[..8])
}

/// Converts an exact count to `u64` when it fits.
pub fn count_to_u64(c: &BigUint) -> Option<u64> {
    c.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn d(v: &[i64]) -> DegreeVector {
        DegreeVector::new(v.to_vec())
    }

    #[test]
    fn g1_paths_of_length_three() {
        let g1 = catalog::g1();
        let all = g1.enumerate_morphisms(&d(&[3])).unwrap();
        assert_eq!(all.len(), 8);
        let mut sorted = all.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
    }

    #[test]
    fn degree_zero_is_identities() {
        for kg in [catalog::g1(), catalog::g2(), catalog::g3(), catalog::g4()] {
            let ids = kg.enumerate_morphisms(&DegreeVector::zero(kg.k())).unwrap();
            assert_eq!(ids.len(), kg.vertex_count());
            assert!(ids.iter().all(|m| m.is_identity() && m.range() == m.source()));
        }
    }

    #[test]
    fn g3_degree_one_one() {
        let g3 = catalog::g3();
        let all = g3.enumerate_morphisms(&d(&[1, 1])).unwrap();
        assert_eq!(all.len(), 4);
        for m in &all {
            let ids = g3.word_ids(m);
            assert!(ids[0].starts_with('b') && ids[1].starts_with('r'));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let g1 = catalog::g1().with_cap(100);
        assert!(g1.enumerate_morphisms(&d(&[6])).is_ok());
        match g1.enumerate_morphisms(&d(&[7])) {
            Err(KGraphError::BoundExceeded { count, cap, .. }) => {
                assert_eq!(count, "128");
                assert_eq!(cap, 100);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn compose_identity_and_swap() {
        let g3 = catalog::g3();
        let nu = g3.morphism_from_ids(&["b1", "r2"]).unwrap();
        let id = g3.identity(nu.range());
        assert_eq!(g3.compose(&id, &nu).unwrap(), nu);
        assert_eq!(g3.compose(&nu, &g3.identity(nu.source())).unwrap(), nu);

        let r2 = g3.morphism_from_ids(&["r2"]).unwrap();
        let b1 = g3.morphism_from_ids(&["b1"]).unwrap();
        let c = g3.compose(&r2, &b1).unwrap();
        assert_eq!(g3.word_ids(&c), vec!["b1", "r2"]);
        assert_eq!(c.degree(), &d(&[1, 1]));
    }

    #[test]
    fn g1_concatenation() {
        let g1 = catalog::g1();
        let a = g1.morphism_from_ids(&["alpha"]).unwrap();
        let b = g1.morphism_from_ids(&["beta"]).unwrap();
        let ab = g1.compose(&a, &b).unwrap();
        assert_eq!(g1.word_ids(&ab), vec!["alpha", "beta"]);
        assert_eq!(ab.degree(), &d(&[2]));
    }

    #[test]
    fn not_composable() {
        let g2 = catalog::g2();
        // u->v has range v; v->u has source v... compose(u->v, u->v) needs s(u->v)=u = r(u->v)=v
        let uv = g2.morphism_from_ids(&["uv"]).unwrap();
        assert!(matches!(g2.compose(&uv, &uv), Err(KGraphError::NotComposable { .. })));
    }

    #[test]
    fn factorize_examples() {
        let g3 = catalog::g3();
        let lam = g3.morphism_from_ids(&["b1", "r2"]).unwrap();
        let (first, second) = g3.factorize(&lam, &d(&[0, 1]), &d(&[1, 0])).unwrap();
        // G3 square entry (b1, r2) -> (r2, b1)
        assert_eq!(g3.word_ids(&first), vec!["r2"]);
        assert_eq!(g3.word_ids(&second), vec!["b1"]);

        let (id, rest) = g3.factorize(&lam, &d(&[0, 0]), &d(&[1, 1])).unwrap();
        assert_eq!(id, g3.identity(lam.range()));
        assert_eq!(rest, lam);

        let g1 = catalog::g1();
        let aba = g1.morphism_from_ids(&["alpha", "beta", "alpha"]).unwrap();
        let (p, q) = g1.factorize(&aba, &d(&[1]), &d(&[2])).unwrap();
        assert_eq!(g1.word_ids(&p), vec!["alpha"]);
        assert_eq!(g1.word_ids(&q), vec!["beta", "alpha"]);

        assert!(matches!(
            g1.factorize(&aba, &d(&[1]), &d(&[1])),
            Err(KGraphError::DegreeMismatch(_))
        ));
    }

    #[test]
    fn block_extraction() {
        let g1 = catalog::g1();
        let w = g1.morphism_from_ids(&["alpha", "alpha", "beta", "beta"]).unwrap();
        let mid = g1.block(&w, &d(&[1]), &d(&[3])).unwrap();
        assert_eq!(g1.word_ids(&mid), vec!["alpha", "beta"]);
        assert!(g1.block(&w, &d(&[3]), &d(&[2])).is_err());
    }

    #[test]
    fn fingerprints_differ() {
        assert_ne!(catalog::g1().fingerprint(), catalog::g3().fingerprint());
        assert_eq!(catalog::g1().fingerprint(), catalog::g1().fingerprint());
        assert_eq!(catalog::g1().fingerprint().len(), 16);
    }
}
