//! Dense block vectors for compositional algebra.
//!
//! Superpositions of sparse block vectors are no longer sparse; this type
//! carries the block structure and supports superposition, Hadamard
//! products, and blockwise circular convolution/correlation on arbitrary
//! real-valued contents.

use super::{check_same_shape, check_shape, BmapVector, PsbcVector, SbcVector, VsaError};

/// Real-valued vector with block structure `(n, l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseVector {
    block_len: usize,
    data: Vec<f64>,
}

impl DenseVector {
    pub fn new(data: Vec<f64>, l: usize) -> Result<Self, VsaError> {
        check_shape(data.len(), l)?;
        Ok(Self {
            block_len: l,
            data,
        })
    }

    pub fn n(&self) -> usize {
        self.data.len()
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn num_blocks(&self) -> usize {
        self.data.len() / self.block_len
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    fn shape(&self) -> (usize, usize) {
        (self.data.len(), self.block_len)
    }

    /// Component-wise sum (superposition).
    pub fn add(&self, other: &Self) -> Result<Self, VsaError> {
        check_same_shape(self.shape(), other.shape())?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            block_len: self.block_len,
            data,
        })
    }

    /// Component-wise product.
    pub fn hadamard(&self, other: &Self) -> Result<Self, VsaError> {
        check_same_shape(self.shape(), other.shape())?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Self {
            block_len: self.block_len,
            data,
        })
    }

    /// Blockwise circular convolution.
    pub fn lcc_bind(&self, other: &Self) -> Result<Self, VsaError> {
        check_same_shape(self.shape(), other.shape())?;
        let l = self.block_len;
        let mut data = vec![0.0; self.data.len()];
        for k in 0..self.num_blocks() {
            let a = &self.data[k * l..(k + 1) * l];
            let b = &other.data[k * l..(k + 1) * l];
            let out = &mut data[k * l..(k + 1) * l];
            for i in 0..l {
                for j in 0..l {
                    out[(i + j) % l] += a[i] * b[j];
                }
            }
        }
        Ok(Self {
            block_len: l,
            data,
        })
    }

    /// Blockwise circular correlation: the inverse of [`Self::lcc_bind`].
    pub fn lcc_unbind(&self, other: &Self) -> Result<Self, VsaError> {
        check_same_shape(self.shape(), other.shape())?;
        let l = self.block_len;
        let mut data = vec![0.0; self.data.len()];
        for k in 0..self.num_blocks() {
            let c = &self.data[k * l..(k + 1) * l];
            let b = &other.data[k * l..(k + 1) * l];
            let out = &mut data[k * l..(k + 1) * l];
            for i in 0..l {
                for j in 0..l {
                    out[(i + l - j) % l] += c[i] * b[j];
                }
            }
        }
        Ok(Self {
            block_len: l,
            data,
        })
    }

    /// Inner product normalised by the number of blocks. Identical sparse
    /// block vectors score 1; superpositions can exceed 1.
    pub fn overlap(&self, other: &Self) -> Result<f64, VsaError> {
        check_same_shape(self.shape(), other.shape())?;
        let dot: f64 = self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum();
        Ok(dot / self.num_blocks() as f64)
    }
}

impl From<&SbcVector> for DenseVector {
    fn from(v: &SbcVector) -> Self {
        DenseVector {
            block_len: v.block_len(),
            data: v.to_dense(),
        }
    }
}

impl From<&PsbcVector> for DenseVector {
    fn from(v: &PsbcVector) -> Self {
        DenseVector {
            block_len: v.block_len(),
            data: v.to_dense(),
        }
    }
}

impl From<&BmapVector> for DenseVector {
    fn from(v: &BmapVector) -> Self {
        DenseVector {
            block_len: v.block_len(),
            data: v.to_dense(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::vsa::{lcc_bind, lcc_unbind};

    #[test]
    fn dense_lcc_matches_sparse_lcc() {
        let mut rng = substream(41, "dense");
        for _ in 0..50 {
            let a = PsbcVector::random(32, 4, &mut rng).unwrap();
            let b = PsbcVector::random(32, 4, &mut rng).unwrap();
            let sparse = lcc_bind(&a, &b).unwrap();
            let dense = DenseVector::from(&a).lcc_bind(&DenseVector::from(&b)).unwrap();
            assert_eq!(dense, DenseVector::from(&sparse));

            let back = dense.lcc_unbind(&DenseVector::from(&b)).unwrap();
            assert_eq!(back, DenseVector::from(&lcc_unbind(&sparse, &b).unwrap()));
        }
    }

    #[test]
    fn overlap_of_identical_sbc_is_one() {
        let mut rng = substream(41, "ovl");
        let a = SbcVector::random(32, 4, &mut rng).unwrap();
        let d = DenseVector::from(&a);
        assert_eq!(d.overlap(&d).unwrap(), 1.0);
    }
}
