//! Dense row-major `f64` tensor, the carrier for all block math.
//!
//! Feature maps use NCHW layout. Construction validates that every value is
//! finite, so downstream operators can assume clean data.

use crate::{Error, Result};

/// Dense N-dimensional array of `f64` in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Build a tensor, checking that `data.len()` matches the shape product,
    /// every extent is positive, and every value is finite.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.iter().any(|&e| e == 0) {
            return Err(Error::InvalidInput(format!(
                "tensor extents must all be positive, got {shape:?}"
            )));
        }
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} implies {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "tensor contains a non-finite value ({bad})"
            )));
        }
        Ok(Self { shape, data })
    }

    /// All-zeros tensor of the given shape.
    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        assert!(!shape.is_empty() && shape.iter().all(|&e| e > 0));
        Self {
            shape,
            data: vec![0.0; n],
        }
    }

    /// Tensor filled by a function of the flat index.
    pub fn from_fn(shape: Vec<usize>, f: impl FnMut(usize) -> f64) -> Result<Self> {
        let n: usize = shape.iter().product();
        Self::new(shape, (0..n).map(f).collect())
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Elementwise map into a new tensor. The result is re-validated so a
    /// map that produces NaN/Inf surfaces as an error, not silent poison.
    pub fn map(&self, f: impl FnMut(f64) -> f64) -> Result<Self> {
        Self::new(self.shape.clone(), self.data.iter().copied().map(f).collect())
    }

    /// Flat index of `[n, c, h, w]` in an NCHW tensor.
    #[inline]
    pub fn nchw_index(&self, n: usize, c: usize, h: usize, w: usize) -> usize {
        debug_assert_eq!(self.shape.len(), 4);
        let (cn, hn, wn) = (self.shape[1], self.shape[2], self.shape[3]);
        ((n * cn + c) * hn + h) * wn + w
    }

    #[inline]
    pub fn at4(&self, n: usize, c: usize, h: usize, w: usize) -> f64 {
        self.data[self.nchw_index(n, c, h, w)]
    }

    /// Value at `[row, col]` of a rank-2 tensor.
    #[inline]
    pub fn at2(&self, row: usize, col: usize) -> f64 {
        debug_assert_eq!(self.shape.len(), 2);
        self.data[row * self.shape[1] + col]
    }

    /// Require an exact rank, with a readable error.
    pub fn expect_rank(&self, rank: usize, what: &str) -> Result<()> {
        if self.shape.len() != rank {
            return Err(Error::ShapeMismatch(format!(
                "{what} must have rank {rank}, got shape {:?}",
                self.shape
            )));
        }
        Ok(())
    }

    /// Construct without the finiteness scan. Callers must guarantee the
    /// invariants; used by operators whose arithmetic cannot produce
    /// non-finite values from validated inputs.
    pub(crate) fn from_parts(shape: Vec<usize>, data: Vec<f64>) -> Self {
        debug_assert_eq!(shape.iter().product::<usize>(), data.len());
        Self { shape, data }
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_inf() {
        assert!(Tensor::new(vec![2], vec![1.0, f64::NAN]).is_err());
        assert!(Tensor::new(vec![2], vec![f64::INFINITY, 0.0]).is_err());
        assert!(Tensor::new(vec![2], vec![1.0, -2.0]).is_ok());
    }

    #[test]
    fn rejects_shape_data_disagreement() {
        assert!(Tensor::new(vec![2, 3], vec![0.0; 5]).is_err());
        assert!(Tensor::new(vec![2, 0], vec![]).is_err());
        assert!(Tensor::new(vec![], vec![]).is_err());
    }

    #[test]
    fn nchw_indexing_is_row_major() {
        let t = Tensor::from_fn(vec![1, 2, 3, 4], |i| i as f64).unwrap();
        assert_eq!(t.at4(0, 0, 0, 0), 0.0);
        assert_eq!(t.at4(0, 0, 0, 3), 3.0);
        assert_eq!(t.at4(0, 0, 1, 0), 4.0);
        assert_eq!(t.at4(0, 1, 0, 0), 12.0);
        assert_eq!(t.at4(0, 1, 2, 3), 23.0);
    }

    #[test]
    fn map_revalidates() {
        let t = Tensor::new(vec![2], vec![1.0, 0.0]).unwrap();
        assert!(t.map(|v| 1.0 / v).is_err()); // division by zero -> inf
    }
}
