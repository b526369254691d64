use std::fmt;

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// A point of `Z^d`, used both for lattice sites and for Fourier frequencies.
///
/// Ordering is lexicographic on the coordinates, which fixes the iteration
/// order of every support walk in the crate.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(SmallVec<[i32; 8]>);

impl MultiIndex {
    pub fn new(coords: impl Into<SmallVec<[i32; 8]>>) -> Self {
        MultiIndex(coords.into())
    }

    pub fn from_slice(coords: &[i32]) -> Self {
        MultiIndex(SmallVec::from_slice(coords))
    }

    pub fn origin(dim: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, dim))
    }

    /// The canonical basis vector `e_axis` (0-based axis).
    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut n = Self::origin(dim);
        n.0[axis] = 1;
        n
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Squared Euclidean norm in exact integer arithmetic.
    pub fn norm_sq(&self) -> i64 {
        self.0.iter().map(|&c| i64::from(c) * i64::from(c)).sum()
    }

    pub fn linf_norm(&self) -> u32 {
        self.0.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    /// `self + delta * e_axis`.
    pub fn shifted(&self, axis: usize, delta: i32) -> Self {
        let mut n = self.clone();
        n.0[axis] += delta;
        n
    }

    pub fn neg(&self) -> Self {
        MultiIndex(self.0.iter().map(|&c| -c).collect())
    }

    pub fn add(&self, other: &MultiIndex) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    /// Coordinates reordered so that output axis `i` takes input axis `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        MultiIndex(order.iter().map(|&a| self.0[a]).collect())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0.as_slice())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl From<Vec<i32>> for MultiIndex {
    fn from(v: Vec<i32>) -> Self {
        MultiIndex(SmallVec::from_vec(v))
    }
}

impl<const N: usize> From<[i32; N]> for MultiIndex {
    fn from(v: [i32; N]) -> Self {
        MultiIndex::from_slice(&v)
    }
}

/// All points of the cube `[-radius, radius]^dim`, in lexicographic order.
pub fn cube_points(dim: usize, radius: u32) -> Vec<MultiIndex> {
    let r = radius as i32;
    let side = 2 * radius as usize + 1;
    let total = side.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    let mut cur: SmallVec<[i32; 8]> = SmallVec::from_elem(-r, dim);
    for _ in 0..total {
        out.push(MultiIndex(cur.clone()));
        for axis in (0..dim).rev() {
            if cur[axis] < r {
                cur[axis] += 1;
                break;
            }
            cur[axis] = -r;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_is_exact() {
        let n = MultiIndex::from([3, -4, 12]);
        assert_eq!(n.norm_sq(), 169);
        assert_eq!(n.linf_norm(), 12);
    }

    #[test]
    fn cube_is_lexicographic() {
        let pts = cube_points(2, 1);
        assert_eq!(pts.len(), 9);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(pts[0], MultiIndex::from([-1, -1]));
        assert_eq!(pts[4], MultiIndex::origin(2));
    }
}
