use num_bigint::BigUint;

use crate::degree::DegreeVector;
use crate::kgraph::KGraph;

use super::matrix::{vertex_matrix, VertexMatrix};

/// Block data for the inclusion `F_m ↪ F_{m+n}` of the AF tower.
#[derive(Clone, Debug, PartialEq)]
pub struct AfData {
    pub m: DegreeVector,
    pub n: DegreeVector,
    /// `blockDims(v) = |{λ ∈ Λᵐ : s(λ) = v}|`.
    pub block_dims: Vec<BigUint>,
    /// `|Λⁿ|`.
    pub multiplicity: VertexMatrix,
    /// Block dimensions of `F_{m+n}`.
    pub next_block_dims: Vec<BigUint>,
    /// `multiplicityᵀ · block_dims`.
    pub predicted_next: Vec<BigUint>,
    pub consistent: bool,
}

pub fn af_multiplicities(kg: &KGraph, m: &DegreeVector, n: &DegreeVector) -> AfData {
    let nv = kg.vertex_count();
    let dims = |mat: &VertexMatrix| (0..nv).map(|v| mat.col_sum(v)).collect::<Vec<_>>();
    let block_dims = dims(&vertex_matrix(kg, m));
    let multiplicity = vertex_matrix(kg, n);
    let next_block_dims = dims(&vertex_matrix(kg, &(m + n)));
    let predicted_next = multiplicity.transpose_apply(&block_dims);
    AfData {
        m: m.clone(),
        n: n.clone(),
        consistent: predicted_next == next_block_dims,
        block_dims,
        multiplicity,
        next_block_dims,
        predicted_next,
    }
}
