use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use smallvec::{smallvec, SmallVec};

/// An element of ℤᵏ (or ℕᵏ where the context requires it), ordered coordinatewise.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeVector(SmallVec<[i64; 4]>);

impl DegreeVector {
    pub fn new(components: Vec<i64>) -> Self {
        DegreeVector(SmallVec::from_vec(components))
    }

    pub fn zero(k: usize) -> Self {
        DegreeVector(smallvec![0; k])
    }

    /// The vector e = (1, …, 1).
    pub fn ones(k: usize) -> Self {
        DegreeVector(smallvec![1; k])
    }

    /// The i-th canonical generator of ℕᵏ.
    pub fn unit(k: usize, i: usize) -> Self {
        let mut v = smallvec![0; k];
        v[i] = 1;
        DegreeVector(v)
    }

    pub fn splat(k: usize, value: i64) -> Self {
        DegreeVector(smallvec![value; k])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn get(&self, i: usize) -> i64 {
        self.0[i]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    /// Coordinatewise `self ≤ other`.
    pub fn le(&self, other: &Self) -> bool {
        debug_assert_eq!(self.k(), other.k());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn scale(&self, factor: i64) -> Self {
        DegreeVector(self.0.iter().map(|c| c * factor).collect())
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// Sum of the components; the length of a normal-form word of this degree.
    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn min(&self, other: &Self) -> Self {
        DegreeVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn max(&self, other: &Self) -> Self {
        DegreeVector(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// Positive part, componentwise `max(c, 0)`.
    pub fn positive_part(&self) -> Self {
        DegreeVector(self.0.iter().map(|&c| c.max(0)).collect())
    }

    /// All vectors `m` with `lo ≤ m ≤ hi`, in lexicographic order. Empty when
    /// the box is empty.
    pub fn box_iter(lo: &DegreeVector, hi: &DegreeVector) -> BoxIter {
        debug_assert_eq!(lo.k(), hi.k());
        let empty = !lo.le(hi);
        BoxIter {
            lo: lo.clone(),
            hi: hi.clone(),
            next: if empty { None } else { Some(lo.clone()) },
        }
    }
}

/// Iterator over the lattice points of a box in ℤᵏ.
#[derive(Debug, Clone)]
pub struct BoxIter {
    lo: DegreeVector,
    hi: DegreeVector,
    next: Option<DegreeVector>,
}

impl Iterator for BoxIter {
    type Item = DegreeVector;

    fn next(&mut self) -> Option<DegreeVector> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut i = succ.k();
        loop {
            if i == 0 {
                // wrapped around: done
                break;
            }
            i -= 1;
            if succ.0[i] < self.hi.0[i] {
                succ.0[i] += 1;
                self.next = Some(succ);
                break;
            }
            succ.0[i] = self.lo.0[i];
        }
        Some(current)
    }
}

impl Add for &DegreeVector {
    type Output = DegreeVector;
    fn add(self, rhs: &DegreeVector) -> DegreeVector {
        debug_assert_eq!(self.k(), rhs.k());
        DegreeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &DegreeVector {
    type Output = DegreeVector;
    fn sub(self, rhs: &DegreeVector) -> DegreeVector {
        debug_assert_eq!(self.k(), rhs.k());
        DegreeVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for DegreeVector {
    type Output = DegreeVector;
    fn add(self, rhs: DegreeVector) -> DegreeVector {
        &self + &rhs
    }
}

impl Sub for DegreeVector {
    type Output = DegreeVector;
    fn sub(self, rhs: DegreeVector) -> DegreeVector {
        &self - &rhs
    }
}

impl Neg for &DegreeVector {
    type Output = DegreeVector;
    fn neg(self) -> DegreeVector {
        DegreeVector(self.0.iter().map(|c| -c).collect())
    }
}

impl Neg for DegreeVector {
    type Output = DegreeVector;
    fn neg(self) -> DegreeVector {
        -&self
    }
}

impl From<Vec<i64>> for DegreeVector {
    fn from(v: Vec<i64>) -> Self {
        DegreeVector(SmallVec::from_vec(v))
    }
}

impl<const K: usize> From<[i64; K]> for DegreeVector {
    fn from(v: [i64; K]) -> Self {
        DegreeVector(SmallVec::from_slice(&v))
    }
}

impl fmt::Debug for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for DegreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Parses `"1,2"`, `"(1,2)"` or `"3"`.
impl FromStr for DegreeVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        if trimmed.is_empty() {
            return Err("empty degree vector".into());
        }
        trimmed
            .split(',')
            .map(|c| c.trim().parse::<i64>().map_err(|e| format!("bad component {c:?}: {e}")))
            .collect::<Result<SmallVec<_>, _>>()
            .map(DegreeVector)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_iteration_counts() {
        let lo = DegreeVector::from([-1, 0]);
        let hi = DegreeVector::from([1, 2]);
        let pts: Vec<_> = DegreeVector::box_iter(&lo, &hi).collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], lo);
        assert_eq!(pts[8], hi);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn empty_box() {
        let lo = DegreeVector::from([1, 0]);
        let hi = DegreeVector::from([0, 2]);
        assert_eq!(DegreeVector::box_iter(&lo, &hi).count(), 0);
    }

    #[test]
    fn zero_rank_box_is_single_point() {
        let z = DegreeVector::zero(0);
        assert_eq!(DegreeVector::box_iter(&z, &z).count(), 1);
    }

    #[test]
    fn parse_and_display() {
        let d: DegreeVector = "(1, -2,3)".parse().unwrap();
        assert_eq!(d, DegreeVector::from([1, -2, 3]));
        assert_eq!(d.to_string(), "(1,-2,3)");
        assert!("".parse::<DegreeVector>().is_err());
        assert!("1,x".parse::<DegreeVector>().is_err());
    }

    #[test]
    fn order_and_arithmetic() {
        let a = DegreeVector::from([1, 2]);
        let b = DegreeVector::from([2, 2]);
        assert!(a.le(&b));
        assert!(!b.le(&a));
        assert_eq!(&b - &a, DegreeVector::unit(2, 0));
        assert_eq!((&a + &b).total(), 7);
        assert_eq!((-&a).max_abs(), 2);
        assert_eq!(DegreeVector::from([-3, 2]).positive_part(), DegreeVector::from([0, 2]));
    }
}
