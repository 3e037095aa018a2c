//! Row-major flattening of `I_N = (Z_N)^d`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSpace {
    pub n: usize,
    pub d: usize,
}

impl IndexSpace {
    pub fn new(n: usize, d: usize) -> Self {
        IndexSpace { n, d }
    }

    /// `N^d`.
    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Axis 0 varies slowest.
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for axis in (0..self.d).rev() {
            out[axis] = flat % self.n;
            flat /= self.n;
        }
        out
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.n + (i % self.n))
    }

    /// Flat index of `a - b` modulo `N` per axis.
    pub fn sub(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut stride = 1;
        for _ in 0..self.d {
            let da = a % self.n;
            let db = b % self.n;
            out += ((da + self.n - db) % self.n) * stride;
            a /= self.n;
            b /= self.n;
            stride *= self.n;
        }
        out
    }

    /// `lᵀm` over the unflattened indices (not reduced).
    pub fn dot(&self, a: usize, b: usize) -> usize {
        let (mut a, mut b) = (a, b);
        let mut acc = 0;
        for _ in 0..self.d {
            acc += (a % self.n) * (b % self.n);
            a /= self.n;
            b /= self.n;
        }
        acc
    }

    pub fn iter(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(move |i| self.unflatten(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flatten_round_trip_and_sub() {
        let s = IndexSpace::new(3, 2);
        for i in 0..s.len() {
            assert_eq!(s.flatten(&s.unflatten(i)), i);
        }
        let a = s.flatten(&[0, 2]);
        let b = s.flatten(&[1, 1]);
        assert_eq!(s.unflatten(s.sub(a, b)), vec![2, 1]);
        assert_eq!(s.dot(a, b), 2);
    }
}
