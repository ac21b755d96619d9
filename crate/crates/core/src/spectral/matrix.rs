use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::degree::DegreeVector;
use crate::kgraph::KGraph;

/// The exact count matrix `|Λᵖ|(u, v) = |{λ ∈ Λᵖ : r(λ) = u, s(λ) = v}|`.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexMatrix {
    degree: DegreeVector,
    n: usize,
    entries: Vec<BigUint>,
}

impl VertexMatrix {
    pub fn identity(k: usize, n: usize) -> Self {
        let mut entries = vec![BigUint::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigUint::one();
        }
        VertexMatrix {
            degree: DegreeVector::zero(k),
            n,
            entries,
        }
    }

    /// Builds a matrix from row-major counts; mainly for tests and fixtures.
    pub fn from_rows(degree: DegreeVector, rows: &[Vec<u64>]) -> Self {
        let n = rows.len();
        let entries = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), n, "square matrix expected");
                r.iter().map(|&x| BigUint::from(x))
            })
            .collect();
        VertexMatrix { degree, n, entries }
    }

    pub fn degree(&self) -> &DegreeVector {
        &self.degree
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, u: usize, v: usize) -> &BigUint {
        &self.entries[u * self.n + v]
    }

    /// Matrix product; degrees add.
    pub fn mul(&self, rhs: &VertexMatrix) -> VertexMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut entries = vec![BigUint::zero(); n * n];
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(l, j);
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        VertexMatrix {
            degree: &self.degree + &rhs.degree,
            n,
            entries,
        }
    }

    pub fn transpose(&self) -> VertexMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(j, i).clone());
            }
        }
        VertexMatrix {
            degree: self.degree.clone(),
            n,
            entries,
        }
    }

    /// Sum of all entries: |Λᵖ|.
    pub fn total(&self) -> BigUint {
        self.entries.iter().sum()
    }

    pub fn row_sum(&self, u: usize) -> BigUint {
        (0..self.n).map(|v| self.get(u, v)).sum()
    }

    pub fn col_sum(&self, v: usize) -> BigUint {
        (0..self.n).map(|u| self.get(u, v)).sum()
    }

    pub fn is_positive(&self) -> bool {
        self.entries.iter().all(|x| !x.is_zero())
    }

    /// `selfᵀ · x` for a column vector of exact counts.
    pub fn transpose_apply(&self, x: &[BigUint]) -> Vec<BigUint> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j) * &x[i]).sum())
            .collect()
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).to_f64().unwrap_or(f64::INFINITY))
                    .collect()
            })
            .collect()
    }

    /// Rows as `u64` where every entry fits, for reports.
    pub fn to_u64_rows(&self) -> Option<Vec<Vec<u64>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_u64()).collect())
            .collect()
    }

    /// Rows as decimal strings (always available).
    pub fn to_string_rows(&self) -> Vec<Vec<String>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).to_string()).collect())
            .collect()
    }
}

impl fmt::Debug for VertexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|Λ^{}| = {:?}", self.degree, self.to_string_rows())
    }
}

/// `|Λ^{e_color}|`, counted from the skeleton's edges.
pub fn generator_matrix(kg: &KGraph, color: usize) -> VertexMatrix {
    let sk = kg.skeleton();
    let n = sk.vertex_count();
    let mut entries = vec![BigUint::zero(); n * n];
    for e in sk.edges().iter().filter(|e| e.color == color) {
        entries[e.range.0 * n + e.source.0] += 1u32;
    }
    VertexMatrix {
        degree: DegreeVector::unit(sk.k(), color),
        n,
        entries,
    }
}

/// `|Λᵖ| = Π_i |Λ^{e_i}|^{p_i}` (the generators commute for a valid k-graph).
pub fn vertex_matrix(kg: &KGraph, p: &DegreeVector) -> VertexMatrix {
    assert!(p.is_nonneg(), "vertex_matrix needs p in N^k, got {p}");
    let mut acc = VertexMatrix::identity(kg.k(), kg.vertex_count());
    for color in 0..kg.k() {
        let times = p.get(color);
        if times == 0 {
            continue;
        }
        let g = generator_matrix(kg, color);
        for _ in 0..times {
            acc = acc.mul(&g);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn rows(m: &VertexMatrix) -> Vec<Vec<u64>> {
        m.to_u64_rows().unwrap()
    }

    #[test]
    fn g1_power_five() {
        let g1 = catalog::g1();
        assert_eq!(rows(&vertex_matrix(&g1, &DegreeVector::from([5]))), vec![vec![32]]);
    }

    #[test]
    fn degree_zero_is_identity() {
        for kg in [catalog::g1(), catalog::g2(), catalog::g3()] {
            let m = vertex_matrix(&kg, &DegreeVector::zero(kg.k()));
            assert_eq!(m, VertexMatrix::identity(kg.k(), kg.vertex_count()));
        }
    }

    #[test]
    fn g2_square() {
        let g2 = catalog::g2();
        assert_eq!(
            rows(&vertex_matrix(&g2, &DegreeVector::from([1]))),
            vec![vec![1, 1], vec![1, 0]]
        );
        assert_eq!(
            rows(&vertex_matrix(&g2, &DegreeVector::from([2]))),
            vec![vec![2, 1], vec![1, 1]]
        );
    }

    #[test]
    fn big_powers_do_not_overflow() {
        let g1 = catalog::g1();
        let m = vertex_matrix(&g1, &DegreeVector::from([100]));
        assert_eq!(m.get(0, 0), &(BigUint::one() << 100u32));
        assert!(m.to_u64_rows().is_none());
    }
}
