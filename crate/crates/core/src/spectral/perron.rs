use serde::Serialize;

use crate::degree::DegreeVector;
use crate::error::{KGraphError, Result};
use crate::kgraph::KGraph;
use crate::skeleton::Vertex;

use super::connectivity::classify_connectivity;
use super::matrix::{generator_matrix, vertex_matrix};

/// Default residual tolerance for the power iteration.
pub const DEFAULT_TOL: f64 = 1e-12;

const MAX_ITERATIONS: usize = 1_000_000;
/// Extra sweeps after the tolerance is met, to settle at rounding level.
const POLISH_ITERATIONS: usize = 64;

/// Common eigenvalues `t` and positive left/right eigenfunctions `a`, `b` of
/// the vertex matrices, normalized so that `Σ a(v) b(v) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronData {
    /// Fingerprint of the k-graph the data was computed for.
    pub graph: String,
    pub t: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// Largest relative eigen-equation residual over all generators and both
    /// sides.
    pub residual: f64,
    /// `|Σ a(v) b(v) − 1|`.
    pub normalization_deviation: f64,
    /// `j` such that `A = Σ_{0 ≠ p ≤ je} |Λᵖ|` was used.
    pub combination_bound: i64,
    pub iterations: usize,
}

impl PerronData {
    pub fn k(&self) -> usize {
        self.t.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self, v: Vertex) -> f64 {
        self.a[v.0]
    }

    pub fn b(&self, v: Vertex) -> f64 {
        self.b[v.0]
    }

    /// `tⁿ = Π tᵢ^{nᵢ}` for `n ∈ ℤᵏ`.
    pub fn t_pow(&self, n: &DegreeVector) -> f64 {
        self.t
            .iter()
            .zip(n.components())
            .map(|(t, &e)| t.powi(e as i32))
            .product()
    }

    /// `Σ_u a(u)|Λᵖ|(u,v) − tᵖ a(v)` and `Σ_v |Λᵖ|(u,v) b(v) − tᵖ b(u)`, as the
    /// largest deviation relative to `max(1, tᵖ·entry)`.
    pub fn eigen_deviation(&self, kg: &KGraph, p: &DegreeVector) -> f64 {
        let m = vertex_matrix(kg, p).to_f64_rows();
        let tp = self.t_pow(p);
        let n = self.vertex_count();
        let mut worst: f64 = 0.0;
        for v in 0..n {
            let lhs: f64 = (0..n).map(|u| self.a[u] * m[u][v]).sum();
            let rhs = tp * self.a[v];
            worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
        }
        for u in 0..n {
            let lhs: f64 = (0..n).map(|v| m[u][v] * self.b[v]).sum();
            let rhs = tp * self.b[u];
            worst = worst.max((lhs - rhs).abs() / rhs.abs().max(1.0));
        }
        worst
    }
}

type Mat = Vec<Vec<f64>>;

fn apply(a: &Mat, x: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

fn transpose(a: &Mat) -> Mat {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| a[j][i]).collect()).collect()
}

fn sup_norm(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Right Perron vector of an entrywise positive matrix, sup-normalized.
/// Returns `(vector, eigenvalue, relative residual, iterations)`.
fn power_iteration(a: &Mat, tol: f64) -> Result<(Vec<f64>, f64, f64, usize)> {
    let n = a.len();
    let mut x = vec![1.0; n];
    let mut polish = None;
    let mut best = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let y = apply(a, &x);
        let lambda = sup_norm(&y);
        let next: Vec<f64> = y.iter().map(|v| v / lambda).collect();
        let ay = apply(a, &next);
        let residual = ay
            .iter()
            .zip(&next)
            .map(|(p, q)| (p - lambda * q).abs())
            .fold(0.0, f64::max)
            / lambda;
        x = next;
        best = best.min(residual);
        if residual <= tol && polish.is_none() {
            polish = Some(it + POLISH_ITERATIONS);
        }
        if polish.is_some_and(|stop| it >= stop) {
            let lambda = sup_norm(&apply(a, &x));
            return Ok((x, lambda, residual, it));
        }
    }
    Err(KGraphError::NotConverged { tol, residual: best })
}

/// Perron–Frobenius data of an irreducible k-graph.
///
/// An entrywise positive `A = Σ_{0 ≠ p ≤ je} |Λᵖ|` is formed for the least
/// `j ≥ 1` that works; `A` commutes with every `|Λ^{e_i}|`, so its Perron
/// vectors are common eigenvectors and each `tᵢ` is read off as
/// `(|Λ^{e_i}| b)(u) / b(u)`. The vectors are scaled so that `‖a‖₂ = ‖b‖₂`
/// and `Σ a(v) b(v) = 1`.
pub fn perron_data(kg: &KGraph, tol: f64) -> Result<PerronData> {
    let k = kg.k();
    let n = kg.vertex_count();
    let conn = classify_connectivity(kg, &DegreeVector::ones(k));
    if !conn.irreducible {
        return Err(KGraphError::NotIrreducible);
    }

    // An irreducible graph connects any two vertices by a path of at most n
    // edges, hence of degree ≤ n·e.
    let max_j = n as i64 + 1;
    let mut chosen = None;
    for j in 1..=max_j {
        let mut acc = vec![vec![0.0f64; n]; n];
        for p in DegreeVector::box_iter(&DegreeVector::zero(k), &DegreeVector::splat(k, j)) {
            if p.is_zero() {
                continue;
            }
            let m = vertex_matrix(kg, &p).to_f64_rows();
            for (row, mrow) in acc.iter_mut().zip(&m) {
                for (x, y) in row.iter_mut().zip(mrow) {
                    *x += y;
                }
            }
        }
        if acc.iter().all(|r| r.iter().all(|&x| x > 0.0)) {
            chosen = Some((j, acc));
            break;
        }
    }
    let Some((j, a_mat)) = chosen else {
        return Err(KGraphError::NoPositiveCombination(
            DegreeVector::splat(k, max_j).to_string(),
        ));
    };

    let (mut b, _, res_b, it_b) = power_iteration(&a_mat, tol)?;
    let (mut a, _, res_a, it_a) = power_iteration(&transpose(&a_mat), tol)?;

    let mut t = Vec::with_capacity(k);
    let mut residual = res_a.max(res_b);
    for color in 0..k {
        let g = generator_matrix(kg, color).to_f64_rows();
        let gb = apply(&g, &b);
        let ratios: Vec<f64> = gb.iter().zip(&b).map(|(x, y)| x / y).collect();
        let ti = ratios.iter().sum::<f64>() / n as f64;
        let ga = apply(&transpose(&g), &a);
        let left: Vec<f64> = ga.iter().zip(&a).map(|(x, y)| x / y).collect();
        for r in ratios.iter().chain(&left) {
            residual = residual.max((r - ti).abs() / ti);
        }
        t.push(ti);
    }

    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (na, nb) = (norm(&a), norm(&b));
    a.iter_mut().for_each(|v| *v /= na);
    b.iter_mut().for_each(|v| *v /= nb);
    let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let s = dot.sqrt();
    a.iter_mut().for_each(|v| *v /= s);
    b.iter_mut().for_each(|v| *v /= s);
    let normalization_deviation = (a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>() - 1.0).abs();

    Ok(PerronData {
        graph: kg.fingerprint().to_owned(),
        t,
        a,
        b,
        residual,
        normalization_deviation,
        combination_bound: j,
        iterations: it_a.max(it_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn g4_is_trivial() {
        let pd = perron_data(&catalog::g4(), DEFAULT_TOL).unwrap();
        assert_eq!(pd.t, vec![1.0, 1.0]);
        assert_eq!(pd.a, vec![1.0]);
        assert_eq!(pd.b, vec![1.0]);
        assert_eq!(pd.residual, 0.0);
    }

    #[test]
    fn g2_golden_ratio() {
        // Exact oracle: the Perron root of [[1,1],[1,0]] is φ = (1+√5)/2 and the
        // eigenvector is (φ, 1); the matrix is symmetric so a = b = (φ,1)/‖(φ,1)‖.
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let norm = (phi * phi + 1.0).sqrt();
        let pd = perron_data(&catalog::g2(), DEFAULT_TOL).unwrap();
        assert!((pd.t[0] - phi).abs() < 1e-12);
        for (got, want) in pd.a.iter().zip([phi / norm, 1.0 / norm]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        for (got, want) in pd.b.iter().zip([phi / norm, 1.0 / norm]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert!((pd.a[0] - 0.850651).abs() < 1e-6 && (pd.a[1] - 0.525731).abs() < 1e-6);
        assert!(pd.normalization_deviation < 1e-12);
        assert_eq!(pd.combination_bound, 2);
    }

    #[test]
    fn g3_doubling() {
        let pd = perron_data(&catalog::g3(), DEFAULT_TOL).unwrap();
        assert!((pd.t[0] - 2.0).abs() < 1e-12 && (pd.t[1] - 2.0).abs() < 1e-12);
        assert!((pd.a[0] - 1.0).abs() < 1e-12 && (pd.b[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn periodic_graph_still_has_perron_data() {
        let pd = perron_data(&catalog::two_cycle(), DEFAULT_TOL).unwrap();
        assert!((pd.t[0] - 1.0).abs() < 1e-12);
        let h = 0.5f64.sqrt();
        assert!(pd.a.iter().chain(&pd.b).all(|x| (x - h).abs() < 1e-12));
    }

    #[test]
    fn reducible_is_rejected() {
        assert_eq!(
            perron_data(&catalog::reducible(), DEFAULT_TOL).unwrap_err(),
            KGraphError::NotIrreducible
        );
    }

    #[test]
    fn eigen_equations_hold_for_composite_degrees() {
        let pd = perron_data(&catalog::g2(), DEFAULT_TOL).unwrap();
        for p in 0..=6 {
            assert!(pd.eigen_deviation(&catalog::g2(), &DegreeVector::from([p])) < 1e-11);
        }
    }
}
