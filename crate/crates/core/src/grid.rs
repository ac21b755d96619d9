//! Lattice labelling of a morphism: the edge λ(p, p + e_c) for every point `p`
//! and color `c` of its degree box. Two blocks are equal exactly when their
//! unit edges agree, so window comparisons reduce to array lookups.

use crate::degree::DegreeVector;
use crate::kgraph::{KGraph, Morphism};
use crate::skeleton::{Edge, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathGrid {
    dims: DegreeVector,
    strides: Vec<usize>,
    vertices: Vec<Vertex>,
    labels: Vec<Option<Edge>>,
}

impl PathGrid {
    pub fn new(kg: &KGraph, lambda: &Morphism) -> PathGrid {
        let dims = lambda.degree().clone();
        let k = dims.k();
        let mut strides = vec![1usize; k];
        for c in (0..k.saturating_sub(1)).rev() {
            strides[c] = strides[c + 1] * (dims.get(c + 1) as usize + 1);
        }
        let points = if k == 0 {
            1
        } else {
            strides[0] * (dims.get(0) as usize + 1)
        };
        let mut vertices = vec![lambda.range(); points];
        let mut labels = vec![None; points * k];
        // tails[idx]: normal form of λ(p, d). Moving its first color-c edge to
        // the front passes only the blocks of colors below c, and what remains
        // is the normal form of λ(p + e_c, d).
        let mut tails: Vec<Option<Vec<Edge>>> = vec![None; points];
        tails[0] = Some(lambda.edges().to_vec());
        let zero = DegreeVector::zero(k);
        for p in DegreeVector::box_iter(&zero, &dims) {
            let idx = index(&strides, &p);
            let tail = tails[idx].take().expect("predecessor visited first");
            vertices[idx] = match tail.first() {
                Some(e) => kg.skeleton().edge(*e).range,
                None => lambda.source(),
            };
            let mut offset = 0;
            for c in 0..k {
                let remaining = (dims.get(c) - p.get(c)) as usize;
                if remaining > 0 {
                    let mut word = tail.clone();
                    for q in (0..offset).rev() {
                        let swapped = kg.swap_at(&mut word, q);
                        debug_assert!(swapped, "edges of distinct colors always swap");
                    }
                    labels[idx * k + c] = Some(word[0]);
                    let next = idx + strides[c];
                    if tails[next].is_none() {
                        word.remove(0);
                        tails[next] = Some(word);
                    }
                }
                offset += remaining;
            }
        }
        PathGrid {
            dims,
            strides,
            vertices,
            labels,
        }
    }

    /// The grid of the block `λ(lo, hi)`, copied out of this one.
    pub fn sub_grid(&self, lo: &DegreeVector, hi: &DegreeVector) -> PathGrid {
        let dims = hi - lo;
        let k = dims.k();
        let mut strides = vec![1usize; k];
        for c in (0..k.saturating_sub(1)).rev() {
            strides[c] = strides[c + 1] * (dims.get(c + 1) as usize + 1);
        }
        let points = if k == 0 {
            1
        } else {
            strides[0] * (dims.get(0) as usize + 1)
        };
        let mut vertices = Vec::with_capacity(points);
        let mut labels = Vec::with_capacity(points * k);
        for q in DegreeVector::box_iter(&DegreeVector::zero(k), &dims) {
            let i = self.idx(&(lo + &q));
            vertices.push(self.vertices[i]);
            for c in 0..k {
                labels.push(if q.get(c) < dims.get(c) {
                    self.labels[i * k + c]
                } else {
                    None
                });
            }
        }
        PathGrid {
            dims,
            strides,
            vertices,
            labels,
        }
    }

    pub fn dims(&self) -> &DegreeVector {
        &self.dims
    }

    fn idx(&self, p: &DegreeVector) -> usize {
        debug_assert!(p.is_nonneg() && p.le(&self.dims), "{p} outside [0, {}]", self.dims);
        index(&self.strides, p)
    }

    pub fn vertex_at(&self, p: &DegreeVector) -> Vertex {
        self.vertices[self.idx(p)]
    }

    /// λ(p, p + e_c), if that edge lies inside the box.
    pub fn label(&self, p: &DegreeVector, c: usize) -> Option<Edge> {
        self.labels[self.idx(p) * self.dims.k() + c]
    }

    /// Normal-form word of the block λ(m, n), read along the staircase that
    /// walks color 0 first, then color 1, and so on.
    pub fn block_word(&self, m: &DegreeVector, n: &DegreeVector) -> Vec<Edge> {
        let k = self.dims.k();
        let mut word = Vec::with_capacity((n - m).total() as usize);
        let mut p = m.clone();
        for c in 0..k {
            let step = DegreeVector::unit(k, c);
            while p.get(c) < n.get(c) {
                word.push(self.label(&p, c).expect("inside box"));
                p = &p + &step;
            }
        }
        word
    }

    /// Whether `self(m, m + size) == other(m2, m2 + size)`.
    pub fn blocks_equal(&self, m: &DegreeVector, other: &PathGrid, m2: &DegreeVector, size: &DegreeVector) -> bool {
        if self.vertex_at(m) != other.vertex_at(m2) {
            return false;
        }
        let k = self.dims.k();
        let size: Vec<usize> = size.components().iter().map(|&c| c as usize).collect();
        let (mut o1, mut o2) = (self.idx(m), other.idx(m2));
        let mut q = vec![0usize; k];
        // odometer over [0, size], last coordinate fastest
        loop {
            for c in 0..k {
                if q[c] < size[c] && self.labels[o1 * k + c] != other.labels[o2 * k + c] {
                    return false;
                }
            }
            let mut c = k;
            loop {
                if c == 0 {
                    return true;
                }
                c -= 1;
                if q[c] < size[c] {
                    q[c] += 1;
                    o1 += self.strides[c];
                    o2 += other.strides[c];
                    break;
                }
                o1 -= q[c] * self.strides[c];
                o2 -= q[c] * other.strides[c];
                q[c] = 0;
            }
        }
    }
}

fn index(strides: &[usize], p: &DegreeVector) -> usize {
    strides.iter().zip(p.components()).map(|(s, &c)| s * c as usize).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn staircase_matches_block_extraction() {
        let g3 = catalog::g3();
        let d = DegreeVector::from([2, 2]);
        for lam in g3.enumerate_morphisms(&d).unwrap() {
            let grid = PathGrid::new(&g3, &lam);
            assert_eq!(grid.block_word(&DegreeVector::zero(2), &d), lam.edges());
            for m in DegreeVector::box_iter(&DegreeVector::zero(2), &d) {
                for n in DegreeVector::box_iter(&m, &d) {
                    let blk = g3.block(&lam, &m, &n).unwrap();
                    assert_eq!(grid.block_word(&m, &n), blk.edges());
                    assert_eq!(grid.vertex_at(&m), blk.range());
                }
            }
        }
    }

    #[test]
    fn sub_grid_matches_block_grid() {
        let g3 = catalog::g3();
        let d = DegreeVector::from([2, 2]);
        for lam in g3.enumerate_morphisms(&d).unwrap().iter().step_by(3) {
            let grid = PathGrid::new(&g3, lam);
            let (lo, hi) = (DegreeVector::from([1, 0]), DegreeVector::from([2, 2]));
            let blk = g3.block(lam, &lo, &hi).unwrap();
            assert_eq!(grid.sub_grid(&lo, &hi), PathGrid::new(&g3, &blk));
        }
    }

    #[test]
    fn block_equality_agrees_with_morphism_equality() {
        let g1 = catalog::g1();
        let w = g1.morphism_from_ids(&["alpha", "beta", "alpha", "beta"]).unwrap();
        let grid = PathGrid::new(&g1, &w);
        let two = DegreeVector::from([2]);
        assert!(grid.blocks_equal(&DegreeVector::from([0]), &grid, &DegreeVector::from([2]), &two));
        assert!(!grid.blocks_equal(&DegreeVector::from([0]), &grid, &DegreeVector::from([1]), &two));
    }
}
