//! Hypervector types and the mixed SBC / bMAP binding algebra.
//!
//! Three atomic vector kinds are used throughout:
//!
//! - [`SbcVector`] — binary sparse block code: `N` components in `M` blocks
//!   of length `L`, exactly one 1 per block (coding level `f = 1/L`)
//! - [`BmapVector`] — block-constant dense bipolar vector: one ±1 sign per
//!   block, repeated across the block
//! - [`PsbcVector`] — bipolar sparse block code: one ±1 entry per block,
//!   the Hadamard product of an SBC and a bMAP vector
//!
//! Binding between an SBC and a bMAP vector is the Hadamard product; binding
//! between sparse block vectors is blockwise local circular convolution
//! (LCC). Relaxed network states with silent blocks are [`BlockState`].

pub mod analogy;
mod capacity;
mod codebook;
mod dense;

pub use capacity::{collision_capacity, exceedance_rate, CollisionCapacity, ExceedanceReport};
pub use codebook::{Codebook, Hypervector, VectorKind};
pub use dense::DenseVector;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VsaError {
    #[error("block length {l} does not divide dimension {n}")]
    BadBlockShape { n: usize, l: usize },
    #[error("dimension mismatch: ({n_a}, L={l_a}) vs ({n_b}, L={l_b})")]
    DimensionMismatch {
        n_a: usize,
        l_a: usize,
        n_b: usize,
        l_b: usize,
    },
    #[error("similarity undefined for a zero vector")]
    ZeroVector,
    #[error("codebook entry {0:?} not found")]
    MissingEntry(String),
}

fn check_shape(n: usize, l: usize) -> Result<(), VsaError> {
    if l == 0 || n == 0 || n % l != 0 {
        return Err(VsaError::BadBlockShape { n, l });
    }
    Ok(())
}

fn check_same_shape(
    (n_a, l_a): (usize, usize),
    (n_b, l_b): (usize, usize),
) -> Result<(), VsaError> {
    if n_a != n_b || l_a != l_b {
        return Err(VsaError::DimensionMismatch { n_a, l_a, n_b, l_b });
    }
    Ok(())
}

/// Binary sparse block code: exactly one active component per block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SbcVector {
    block_len: usize,
    /// Within-block index of the active component, one entry per block.
    active: Vec<u32>,
}

impl SbcVector {
    /// Draw a random SBC vector: one uniformly chosen active index per block.
    pub fn random(n: usize, l: usize, rng: &mut impl Rng) -> Result<Self, VsaError> {
        check_shape(n, l)?;
        let active = (0..n / l).map(|_| rng.gen_range(0..l as u32)).collect();
        Ok(Self {
            block_len: l,
            active,
        })
    }

    /// Build from within-block active indices.
    pub fn from_active(l: usize, active: Vec<u32>) -> Result<Self, VsaError> {
        if active.iter().any(|&a| a as usize >= l) {
            return Err(VsaError::BadBlockShape {
                n: active.len() * l,
                l,
            });
        }
        check_shape(active.len() * l, l)?;
        Ok(Self {
            block_len: l,
            active,
        })
    }

    /// The LCC identity: only the first element of each block is active.
    pub fn lcc_identity(n: usize, l: usize) -> Result<Self, VsaError> {
        check_shape(n, l)?;
        Ok(Self {
            block_len: l,
            active: vec![0; n / l],
        })
    }

    pub fn n(&self) -> usize {
        self.active.len() * self.block_len
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn num_blocks(&self) -> usize {
        self.active.len()
    }

    /// Coding level `f = 1/L`.
    pub fn coding_level(&self) -> f64 {
        1.0 / self.block_len as f64
    }

    pub fn active(&self) -> &[u32] {
        &self.active
    }

    /// Absolute component indices of the active entries, ascending.
    pub fn active_components(&self) -> Vec<usize> {
        self.active
            .iter()
            .enumerate()
            .map(|(k, &a)| k * self.block_len + a as usize)
            .collect()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.n()];
        for i in self.active_components() {
            v[i] = 1.0;
        }
        v
    }

    fn shape(&self) -> (usize, usize) {
        (self.n(), self.block_len)
    }
}

/// Block-constant dense bipolar vector: one ±1 sign per block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BmapVector {
    block_len: usize,
    signs: Vec<i8>,
}

impl BmapVector {
    /// Draw a random bMAP vector: each block's sign ±1 with equal probability.
    pub fn random(n: usize, l: usize, rng: &mut impl Rng) -> Result<Self, VsaError> {
        check_shape(n, l)?;
        let signs = (0..n / l)
            .map(|_| if rng.gen_range(0..2u8) == 1 { 1 } else { -1 })
            .collect();
        Ok(Self {
            block_len: l,
            signs,
        })
    }

    pub fn from_signs(l: usize, signs: Vec<i8>) -> Result<Self, VsaError> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(VsaError::BadBlockShape {
                n: signs.len() * l,
                l,
            });
        }
        check_shape(signs.len() * l, l)?;
        Ok(Self {
            block_len: l,
            signs,
        })
    }

    pub fn all_plus(n: usize, l: usize) -> Result<Self, VsaError> {
        check_shape(n, l)?;
        Ok(Self {
            block_len: l,
            signs: vec![1; n / l],
        })
    }

    pub fn n(&self) -> usize {
        self.signs.len() * self.block_len
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn num_blocks(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Binary mask form `s = (s̄ + 1)/2`: a block is on where the sign is +1.
    pub fn to_mask(&self) -> BlockMask {
        BlockMask {
            on: self.signs.iter().map(|&s| s > 0).collect(),
        }
    }

    /// Bipolar form from a binary mask (on → +1, off → −1).
    pub fn from_mask(mask: &BlockMask, l: usize) -> Self {
        Self {
            block_len: l,
            signs: mask.on.iter().map(|&m| if m { 1 } else { -1 }).collect(),
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n());
        for &s in &self.signs {
            v.extend(std::iter::repeat(s as f64).take(self.block_len));
        }
        v
    }

    fn shape(&self) -> (usize, usize) {
        (self.n(), self.block_len)
    }
}

/// Bipolar sparse block code: exactly one ±1 component per block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsbcVector {
    block_len: usize,
    active: Vec<u32>,
    signs: Vec<i8>,
}

impl PsbcVector {
    pub fn random(n: usize, l: usize, rng: &mut impl Rng) -> Result<Self, VsaError> {
        check_shape(n, l)?;
        let m = n / l;
        let active = (0..m).map(|_| rng.gen_range(0..l as u32)).collect();
        let signs = (0..m)
            .map(|_| if rng.gen_range(0..2u8) == 1 { 1 } else { -1 })
            .collect();
        Ok(Self {
            block_len: l,
            active,
            signs,
        })
    }

    pub fn n(&self) -> usize {
        self.active.len() * self.block_len
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn num_blocks(&self) -> usize {
        self.active.len()
    }

    pub fn active(&self) -> &[u32] {
        &self.active
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.n()];
        for (k, (&a, &s)) in self.active.iter().zip(&self.signs).enumerate() {
            v[k * self.block_len + a as usize] = s as f64;
        }
        v
    }

    fn shape(&self) -> (usize, usize) {
        (self.n(), self.block_len)
    }
}

impl From<&SbcVector> for PsbcVector {
    fn from(v: &SbcVector) -> Self {
        PsbcVector {
            block_len: v.block_len,
            active: v.active.clone(),
            signs: vec![1; v.active.len()],
        }
    }
}

/// Per-block on/off mask. Off blocks are removed from network dynamics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockMask {
    on: Vec<bool>,
}

impl BlockMask {
    pub fn all_on(num_blocks: usize) -> Self {
        Self {
            on: vec![true; num_blocks],
        }
    }

    pub fn all_off(num_blocks: usize) -> Self {
        Self {
            on: vec![false; num_blocks],
        }
    }

    pub fn from_on(on: Vec<bool>) -> Self {
        Self { on }
    }

    pub fn num_blocks(&self) -> usize {
        self.on.len()
    }

    pub fn is_on(&self, block: usize) -> bool {
        self.on[block]
    }

    pub fn on_count(&self) -> usize {
        self.on.iter().filter(|&&b| b).count()
    }
}

/// Relaxed sparse block state: at most one active component per block.
///
/// Strict SBC vectors convert losslessly into this form; masking and
/// block-argmax under a mask may leave blocks silent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockState {
    block_len: usize,
    active: Vec<Option<u32>>,
}

impl BlockState {
    pub fn silent(n: usize, l: usize) -> Result<Self, VsaError> {
        check_shape(n, l)?;
        Ok(Self {
            block_len: l,
            active: vec![None; n / l],
        })
    }

    pub fn from_active(l: usize, active: Vec<Option<u32>>) -> Self {
        Self {
            block_len: l,
            active,
        }
    }

    pub fn n(&self) -> usize {
        self.active.len() * self.block_len
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn num_blocks(&self) -> usize {
        self.active.len()
    }

    pub fn active(&self) -> &[Option<u32>] {
        &self.active
    }

    pub fn popcount(&self) -> usize {
        self.active.iter().filter(|a| a.is_some()).count()
    }

    /// Absolute component indices of active entries, ascending.
    pub fn active_components(&self) -> Vec<usize> {
        self.active
            .iter()
            .enumerate()
            .filter_map(|(k, a)| a.map(|i| k * self.block_len + i as usize))
            .collect()
    }

    /// Silence every block that is off in `mask` (component-wise AND with
    /// the mask's block-constant binary vector).
    pub fn masked(&self, mask: &BlockMask) -> Result<Self, VsaError> {
        if mask.num_blocks() != self.num_blocks() {
            return Err(VsaError::DimensionMismatch {
                n_a: self.n(),
                l_a: self.block_len,
                n_b: mask.num_blocks() * self.block_len,
                l_b: self.block_len,
            });
        }
        let active = self
            .active
            .iter()
            .enumerate()
            .map(|(k, &a)| if mask.is_on(k) { a } else { None })
            .collect();
        Ok(Self {
            block_len: self.block_len,
            active,
        })
    }

    /// Strict SBC view, if every block is active.
    pub fn to_sbc(&self) -> Option<SbcVector> {
        let active: Option<Vec<u32>> = self.active.iter().copied().collect();
        active.map(|active| SbcVector {
            block_len: self.block_len,
            active,
        })
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.n()];
        for i in self.active_components() {
            v[i] = 1.0;
        }
        v
    }
}

impl From<&SbcVector> for BlockState {
    fn from(v: &SbcVector) -> Self {
        BlockState {
            block_len: v.block_len,
            active: v.active.iter().map(|&a| Some(a)).collect(),
        }
    }
}

// ── Binding and masking operations ───────────────────────────────────

/// Hadamard-bind an SBC vector with a bMAP vector, producing a pSBC vector.
///
/// The result is pseudo-orthogonal to `a`; binding with the same `b` again
/// recovers `a` exactly (±1 multiplication is its own inverse).
pub fn hadamard_bind(a: &SbcVector, b: &BmapVector) -> Result<PsbcVector, VsaError> {
    check_same_shape(a.shape(), b.shape())?;
    Ok(PsbcVector {
        block_len: a.block_len,
        active: a.active.clone(),
        signs: b.signs.clone(),
    })
}

/// Hadamard-bind a pSBC vector with a bMAP vector (sign flip per block).
pub fn hadamard_bind_psbc(a: &PsbcVector, b: &BmapVector) -> Result<PsbcVector, VsaError> {
    check_same_shape(a.shape(), b.shape())?;
    let signs = a
        .signs
        .iter()
        .zip(&b.signs)
        .map(|(&x, &y)| x * y)
        .collect();
    Ok(PsbcVector {
        block_len: a.block_len,
        active: a.active.clone(),
        signs,
    })
}

/// Component-wise AND of an SBC vector with a block-constant binary mask.
///
/// Off blocks lose their active component; the result is a relaxed state.
pub fn mask(a: &SbcVector, m: &BlockMask) -> Result<BlockState, VsaError> {
    BlockState::from(a).masked(m)
}

/// Blockwise local circular convolution of two sparse block vectors.
///
/// Per block, active indices add mod `L` and signs multiply. The identity
/// element is [`SbcVector::lcc_identity`].
pub fn lcc_bind(a: &PsbcVector, b: &PsbcVector) -> Result<PsbcVector, VsaError> {
    check_same_shape(a.shape(), b.shape())?;
    let l = a.block_len as u32;
    let active = a
        .active
        .iter()
        .zip(&b.active)
        .map(|(&x, &y)| (x + y) % l)
        .collect();
    let signs = a
        .signs
        .iter()
        .zip(&b.signs)
        .map(|(&x, &y)| x * y)
        .collect();
    Ok(PsbcVector {
        block_len: a.block_len,
        active,
        signs,
    })
}

/// Blockwise circular correlation: the inverse of [`lcc_bind`].
pub fn lcc_unbind(c: &PsbcVector, b: &PsbcVector) -> Result<PsbcVector, VsaError> {
    check_same_shape(c.shape(), b.shape())?;
    let l = c.block_len as u32;
    let active = c
        .active
        .iter()
        .zip(&b.active)
        .map(|(&x, &y)| (x + l - y) % l)
        .collect();
    let signs = c
        .signs
        .iter()
        .zip(&b.signs)
        .map(|(&x, &y)| x * y)
        .collect();
    Ok(PsbcVector {
        block_len: c.block_len,
        active,
        signs,
    })
}

// ── Similarity ───────────────────────────────────────────────────────

/// Number of blocks where both vectors activate the same component.
pub fn sbc_overlap(a: &SbcVector, b: &SbcVector) -> Result<u32, VsaError> {
    check_same_shape(a.shape(), b.shape())?;
    Ok(a.active
        .iter()
        .zip(&b.active)
        .filter(|(x, y)| x == y)
        .count() as u32)
}

/// Normalised inner product of two dense vectors, `a·b / (‖a‖₂ ‖b‖₂)`.
pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, VsaError> {
    if a.len() != b.len() {
        return Err(VsaError::DimensionMismatch {
            n_a: a.len(),
            l_a: 0,
            n_b: b.len(),
            l_b: 0,
        });
    }
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (&x, &y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(VsaError::ZeroVector);
    }
    Ok(dot / (na.sqrt() * nb.sqrt()))
}

/// Normalised inner product of two SBC vectors; equals `overlap / M`.
pub fn similarity_sbc(a: &SbcVector, b: &SbcVector) -> Result<f64, VsaError> {
    Ok(sbc_overlap(a, b)? as f64 / a.num_blocks() as f64)
}

/// Normalised inner product of two hypervectors of any kind.
pub fn similarity(a: &Hypervector, b: &Hypervector) -> Result<f64, VsaError> {
    check_same_shape(a.shape(), b.shape())?;
    if let (Hypervector::Sbc(x), Hypervector::Sbc(y)) = (a, b) {
        return similarity_sbc(x, y);
    }
    cosine(&a.to_dense(), &b.to_dense())
}

// ── Block argmax ─────────────────────────────────────────────────────

/// Winner-take-all within each block: the index of the maximal entry of
/// each on block becomes active; ties go to the lowest index; off blocks
/// are silent.
pub fn block_argmax(x: &[f64], l: usize, mask: Option<&BlockMask>) -> Result<BlockState, VsaError> {
    check_shape(x.len(), l)?;
    let m = x.len() / l;
    if let Some(mask) = mask {
        if mask.num_blocks() != m {
            return Err(VsaError::DimensionMismatch {
                n_a: x.len(),
                l_a: l,
                n_b: mask.num_blocks() * l,
                l_b: l,
            });
        }
    }
    let active = (0..m)
        .map(|k| {
            if mask.map_or(false, |msk| !msk.is_on(k)) {
                return None;
            }
            let block = &x[k * l..(k + 1) * l];
            let mut best = 0usize;
            for (i, &v) in block.iter().enumerate() {
                if v > block[best] {
                    best = i;
                }
            }
            Some(best as u32)
        })
        .collect();
    Ok(BlockState {
        block_len: l,
        active,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn sbc_has_one_active_per_block() {
        let mut rng = substream(1, "t");
        let v = SbcVector::random(8, 4, &mut rng).unwrap();
        assert_eq!(v.num_blocks(), 2);
        let comps = v.active_components();
        assert_eq!(comps.len(), 2);
        assert!(comps[0] < 4 && comps[1] >= 4 && comps[1] < 8);
        // coding level is the nonzero fraction
        assert_eq!(v.coding_level(), 0.25);
    }

    #[test]
    fn sbc_same_seed_identical() {
        let a = SbcVector::random(64, 8, &mut substream(3, "x")).unwrap();
        let b = SbcVector::random(64, 8, &mut substream(3, "x")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sbc_rejects_bad_shape() {
        let mut rng = substream(1, "t");
        assert!(matches!(
            SbcVector::random(10, 4, &mut rng),
            Err(VsaError::BadBlockShape { .. })
        ));
    }

    #[test]
    fn sbc_mean_similarity_approaches_coding_level() {
        // ⟨sim⟩ over independent pairs → f = 1/L
        let mut rng = substream(11, "pairs");
        let (n, l, pairs) = (512, 8, 10_000);
        let mut total = 0.0;
        for _ in 0..pairs {
            let a = SbcVector::random(n, l, &mut rng).unwrap();
            let b = SbcVector::random(n, l, &mut rng).unwrap();
            total += similarity_sbc(&a, &b).unwrap();
        }
        let mean = total / pairs as f64;
        let f = 1.0 / l as f64;
        let m = (n / l) as f64;
        let tol = 3.0 * (f * (1.0 - f) / (m * pairs as f64)).sqrt();
        assert!((mean - f).abs() < tol.max(0.01), "mean {mean} vs f {f}");
    }

    #[test]
    fn bmap_block_constant_and_balanced() {
        let mut rng = substream(5, "bmap");
        let v = BmapVector::random(8, 4, &mut rng).unwrap();
        let d = v.to_dense();
        assert_eq!(&d[0..4], &[d[0]; 4]);
        assert_eq!(&d[4..8], &[d[4]; 4]);

        // fraction of +1 blocks ≈ 0.5 over many draws
        let mut plus = 0usize;
        let mut blocks = 0usize;
        for _ in 0..10_000 {
            let v = BmapVector::random(32, 8, &mut rng).unwrap();
            plus += v.signs().iter().filter(|&&s| s > 0).count();
            blocks += v.num_blocks();
        }
        let frac = plus as f64 / blocks as f64;
        assert!((frac - 0.5).abs() < 0.02, "frac {frac}");
    }

    #[test]
    fn bmap_bipolar_binary_roundtrip() {
        // s̄ = 2s − 1 round-trips exactly
        let mut rng = substream(5, "bmap-rt");
        let v = BmapVector::random(32, 4, &mut rng).unwrap();
        let back = BmapVector::from_mask(&v.to_mask(), 4);
        assert_eq!(v, back);
    }

    #[test]
    fn similarity_identity_is_one() {
        let mut rng = substream(9, "sim");
        let v = SbcVector::random(64, 8, &mut rng).unwrap();
        assert_eq!(similarity_sbc(&v, &v).unwrap(), 1.0);
        let h = Hypervector::Sbc(v);
        assert_eq!(similarity(&h, &h).unwrap(), 1.0);
    }

    #[test]
    fn similarity_dimension_mismatch() {
        let mut rng = substream(9, "sim2");
        let a = SbcVector::random(64, 8, &mut rng).unwrap();
        let b = SbcVector::random(32, 8, &mut rng).unwrap();
        assert!(sbc_overlap(&a, &b).is_err());
    }

    #[test]
    fn bound_vector_pseudo_orthogonal_to_operand() {
        // ⟨(q ∘ s̄) · q⟩ = 0 over independent draws
        let mut rng = substream(13, "bind");
        let (n, l, trials) = (256, 8, 10_000);
        let mut total = 0.0;
        for _ in 0..trials {
            let q = SbcVector::random(n, l, &mut rng).unwrap();
            let s = BmapVector::random(n, l, &mut rng).unwrap();
            let bound = hadamard_bind(&q, &s).unwrap();
            let dot: f64 = bound
                .to_dense()
                .iter()
                .zip(q.to_dense())
                .map(|(a, b)| a * b)
                .sum();
            total += dot / q.num_blocks() as f64;
        }
        let mean = total / trials as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn hadamard_bind_is_involution() {
        let mut rng = substream(17, "inv");
        for _ in 0..50 {
            let q = SbcVector::random(64, 8, &mut rng).unwrap();
            let s = BmapVector::random(64, 8, &mut rng).unwrap();
            let once = hadamard_bind(&q, &s).unwrap();
            let twice = hadamard_bind_psbc(&once, &s).unwrap();
            assert_eq!(twice, PsbcVector::from(&q));
        }
    }

    #[test]
    fn bind_with_all_plus_is_identity() {
        let mut rng = substream(17, "idbind");
        let q = SbcVector::random(64, 8, &mut rng).unwrap();
        let one = BmapVector::all_plus(64, 8).unwrap();
        assert_eq!(hadamard_bind(&q, &one).unwrap(), PsbcVector::from(&q));
    }

    #[test]
    fn masked_overlap_is_half_m() {
        // (q ∘ s̄)·(q ∧ s) = M/2 in expectation
        let mut rng = substream(19, "mask");
        let (n, l, trials) = (256, 8, 10_000);
        let m = (n / l) as f64;
        let mut total = 0.0;
        for _ in 0..trials {
            let q = SbcVector::random(n, l, &mut rng).unwrap();
            let s = BmapVector::random(n, l, &mut rng).unwrap();
            let bound = hadamard_bind(&q, &s).unwrap();
            let masked = mask(&q, &s.to_mask()).unwrap();
            let dot: f64 = bound
                .to_dense()
                .iter()
                .zip(masked.to_dense())
                .map(|(a, b)| a * b)
                .sum();
            total += dot;
        }
        let mean = total / trials as f64;
        assert!((mean - m / 2.0).abs() < 0.05 * m, "mean {mean} vs {}", m / 2.0);
    }

    #[test]
    fn mask_identity_and_annihilator() {
        let mut rng = substream(19, "mask2");
        let q = SbcVector::random(64, 8, &mut rng).unwrap();
        let all = BlockMask::all_on(8);
        let none = BlockMask::all_off(8);
        assert_eq!(mask(&q, &all).unwrap(), BlockState::from(&q));
        assert_eq!(mask(&q, &none).unwrap().popcount(), 0);
    }

    #[test]
    fn masked_popcount_half_in_expectation() {
        let mut rng = substream(19, "mask3");
        let (n, l, trials) = (256, 8, 10_000);
        let mut total = 0usize;
        for _ in 0..trials {
            let q = SbcVector::random(n, l, &mut rng).unwrap();
            let s = BmapVector::random(n, l, &mut rng).unwrap();
            total += mask(&q, &s.to_mask()).unwrap().popcount();
        }
        let mean = total as f64 / trials as f64;
        let expect = (n / l) as f64 / 2.0;
        assert!((mean - expect).abs() < 0.05 * expect, "mean {mean}");
    }

    #[test]
    fn lcc_identity_and_roundtrip() {
        let mut rng = substream(23, "lcc");
        let id = PsbcVector::from(&SbcVector::lcc_identity(64, 8).unwrap());
        for _ in 0..100 {
            let a = PsbcVector::random(64, 8, &mut rng).unwrap();
            let b = PsbcVector::random(64, 8, &mut rng).unwrap();
            assert_eq!(lcc_bind(&a, &id).unwrap(), a);
            let c = lcc_bind(&a, &b).unwrap();
            assert_eq!(lcc_unbind(&c, &b).unwrap(), a);
        }
    }

    #[test]
    fn lcc_associative_commutative() {
        let mut rng = substream(23, "lcc2");
        for _ in 0..100 {
            let a = PsbcVector::random(64, 8, &mut rng).unwrap();
            let b = PsbcVector::random(64, 8, &mut rng).unwrap();
            let c = PsbcVector::random(64, 8, &mut rng).unwrap();
            let ab_c = lcc_bind(&lcc_bind(&a, &b).unwrap(), &c).unwrap();
            let a_bc = lcc_bind(&a, &lcc_bind(&b, &c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
            assert_eq!(
                lcc_bind(&a, &b).unwrap(),
                lcc_bind(&b, &a).unwrap()
            );
        }
    }

    #[test]
    fn hadamard_commutes_with_lcc() {
        // (m₁∘x₁) ⊛ (m₂∘x₂) = (m₁∘m₂) ∘ (x₁⊛x₂) for block-constant m
        let mut rng = substream(29, "comm");
        for _ in 0..100 {
            let x1 = SbcVector::random(64, 8, &mut rng).unwrap();
            let x2 = SbcVector::random(64, 8, &mut rng).unwrap();
            let m1 = BmapVector::random(64, 8, &mut rng).unwrap();
            let m2 = BmapVector::random(64, 8, &mut rng).unwrap();
            let lhs = lcc_bind(
                &hadamard_bind(&x1, &m1).unwrap(),
                &hadamard_bind(&x2, &m2).unwrap(),
            )
            .unwrap();
            let m12 = BmapVector::from_signs(
                8,
                m1.signs().iter().zip(m2.signs()).map(|(a, b)| a * b).collect(),
            )
            .unwrap();
            let x12 = lcc_bind(&PsbcVector::from(&x1), &PsbcVector::from(&x2)).unwrap();
            let rhs = hadamard_bind_psbc(&x12, &m12).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn block_argmax_fixed_point_and_ties() {
        // already one-hot per block → unchanged
        let mut rng = substream(31, "wta");
        let q = SbcVector::random(64, 8, &mut rng).unwrap();
        let out = block_argmax(&q.to_dense(), 8, None).unwrap();
        assert_eq!(out, BlockState::from(&q));

        // tie within a block → lowest index wins, deterministically
        let x = vec![1.0, 1.0, 0.5, 1.0];
        for _ in 0..5 {
            let out = block_argmax(&x, 4, None).unwrap();
            assert_eq!(out.active(), &[Some(0)]);
        }

        // fully masked block → all-zero block
        let x = vec![3.0, 1.0, 2.0, 9.0];
        let m = BlockMask::from_on(vec![true, false]);
        let out = block_argmax(&x, 2, Some(&m)).unwrap();
        assert_eq!(out.active(), &[Some(0), None]);
    }
}
