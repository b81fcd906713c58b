//! Uniform node-centered reconstruction grids.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::vector::Vec3;

/// `n[k]` nodes from `lo[k]` to `hi[k]` inclusive along each axis. Unused
/// axes of a 2D grid have one node.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub dim: usize,
    pub n: [usize; 3],
    pub lo: Vec3,
    pub hi: Vec3,
}

impl GridSpec {
    pub fn new(dim: usize, n: [usize; 3], lo: Vec3, hi: Vec3) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::InvalidGrid("dimension must be 2 or 3"));
        }
        for k in 0..3 {
            if k < dim {
                if n[k] < 2 {
                    return Err(Error::InvalidGrid("need at least 2 nodes per axis"));
                }
                if hi[k] <= lo[k] || hi[k].is_nan() || !lo[k].is_finite() || !hi[k].is_finite() {
                    return Err(Error::InvalidGrid("empty or non-finite extent"));
                }
            } else if n[k] != 1 {
                return Err(Error::InvalidGrid("unused axes must have one node"));
            }
        }
        Ok(GridSpec { dim, n, lo, hi })
    }

    /// `n × n` grid on `[lo, hi]²`.
    pub fn square(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(2, [n, n, 1], [lo, lo, 0.0], [hi, hi, 0.0])
    }

    /// `n × n × n` grid on `[lo, hi]³`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(3, [n; 3], [lo; 3], [hi; 3])
    }

    /// Grid over the box `[lo, hi]` with `n` nodes per used axis.
    pub fn fit(dim: usize, n: usize, lo: Vec3, hi: Vec3) -> Result<Self> {
        let mut nn = [1; 3];
        let mut l = [0.0; 3];
        let mut h = [0.0; 3];
        for k in 0..dim {
            nn[k] = n;
            l[k] = lo[k];
            h[k] = hi[k];
        }
        Self::new(dim, nn, l, h)
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> Vec3 {
        let mut h = [0.0; 3];
        for k in 0..self.dim {
            h[k] = (self.hi[k] - self.lo[k]) / (self.n[k] - 1) as f64;
        }
        h
    }

    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        if self.n[axis] == 1 {
            return self.lo[axis];
        }
        self.lo[axis] + (self.hi[axis] - self.lo[axis]) * i as f64 / (self.n[axis] - 1) as f64
    }

    #[inline]
    pub fn point(&self, idx: [usize; 3]) -> Vec3 {
        [
            self.coord(0, idx[0]),
            self.coord(1, idx[1]),
            self.coord(2, idx[2]),
        ]
    }

    #[inline]
    pub fn index(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.n[1] + idx[1]) * self.n[2] + idx[2]
    }

    pub fn unindex(&self, flat: usize) -> [usize; 3] {
        let i2 = flat % self.n[2];
        let r = flat / self.n[2];
        [r / self.n[1], r % self.n[1], i2]
    }
}

/// Scalar values on a [`GridSpec`], row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl ImageGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        ImageGrid {
            spec,
            values: vec![0.0; spec.len()],
        }
    }

    pub fn from_fn(spec: GridSpec, f: impl Fn(Vec3) -> f64) -> Self {
        let values = (0..spec.len())
            .map(|i| f(spec.point(spec.unindex(i))))
            .collect();
        ImageGrid { spec, values }
    }

    pub fn get(&self, idx: [usize; 3]) -> f64 {
        self.values[self.spec.index(idx)]
    }

    /// Values at nodes where `keep` holds, in storage order.
    pub fn masked(&self, keep: impl Fn(Vec3) -> bool) -> Vec<f64> {
        (0..self.spec.len())
            .filter(|&i| keep(self.spec.point(self.spec.unindex(i))))
            .map(|i| self.values[i])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trips() {
        let g = GridSpec::new(3, [3, 4, 5], [0.0; 3], [1.0, 2.0, 3.0]).unwrap();
        for i in 0..g.len() {
            assert_eq!(g.index(g.unindex(i)), i);
        }
        assert_eq!(g.point([2, 3, 4]), [1.0, 2.0, 3.0]);
        assert_eq!(g.spacing(), [0.5, 2.0 / 3.0, 0.75]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::square(1, -1.0, 1.0).is_err());
        assert!(GridSpec::square(5, 1.0, 1.0).is_err());
        assert!(GridSpec::new(2, [4, 4, 2], [0.0; 3], [1.0; 3]).is_err());
        assert!(GridSpec::new(4, [4, 4, 4], [0.0; 3], [1.0; 3]).is_err());
    }

    #[test]
    fn two_dimensional_layout() {
        let g = GridSpec::square(3, -1.0, 1.0).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.point([1, 2, 0]), [0.0, 1.0, 0.0]);
        let img = ImageGrid::from_fn(g, |p| p[0] + 10.0 * p[1]);
        assert_eq!(img.get([2, 0, 0]), 1.0 - 10.0);
    }
}
