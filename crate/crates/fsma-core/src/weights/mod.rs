//! Weight compiler: turn a DFA plus a hypervector codebook into the dense
//! recurrent coupling matrix of a block-WTA attractor network.
//!
//! The matrix is a superposition of three outer-product families:
//!
//! - attractor terms `(q−f)(q−f)ᵀ` storing each state vector as a fixed
//!   point,
//! - bridge terms `(q−f)(b−f)ᵀ + Σ_s (b−q)((b−f)∘s̄)ᵀ` making each state's
//!   bridge vector flow to the state without input and hold while a valid
//!   input mask is applied,
//! - transition terms `(b′−q)((q−f)∘s̄)ᵀ` for every non-loop edge, hidden
//!   by the binding with `s̄` until the matching mask reveals them.
//!
//! `f` is the coding level `1/L`, or 0 when the codebook is orthogonal.

mod build;
mod predict;
mod snr;
mod store;
mod transform;

pub use build::{
    build_attractor_matrix, build_weight_components, build_weights, build_weights_with,
    BridgeInputs, WeightComponents,
};
pub use predict::{predict_h_stats, DriveCondition, HStats};
pub use snr::{snr_monte_carlo, SnrComparison};
pub use store::{load_weights, save_weights};
pub use transform::{
    add_weight_noise, binarize_stochastic, quantize_fixed_point, quantize_ternary,
    zero_intra_block, TernaryMode, TransformPipeline, DEFAULT_BINARIZE_BETA,
};

use ndarray::Array2;
use thiserror::Error;

use crate::dfa::Dfa;
use crate::rng::substream;
use crate::vsa::{BmapVector, SbcVector, VsaError};

#[derive(Debug, Error)]
pub enum WeightError {
    #[error(transparent)]
    Vsa(#[from] VsaError),
    #[error("codebook does not cover the DFA: {0}")]
    MissingCodebookEntry(String),
    #[error("orthogonal codebooks need 2·|Q| ≤ L, got |Q|={q} with L={l}")]
    OrthogonalDoesNotFit { q: usize, l: usize },
    #[error("orthogonal mask construction supports at most 2 inputs, got {0}")]
    TooManyOrthogonalInputs(usize),
    #[error("orthogonal masks need an even number of blocks, got {0}")]
    OddBlockCount(usize),
    #[error("expected {expected:?} weights, got {got:?}")]
    WrongProvenance {
        expected: &'static str,
        got: Provenance,
    },
    #[error("drive statistics assume a random codebook; orthogonal codebooks are refused")]
    OrthogonalPrediction,
    #[error("matrix shape {rows}×{cols} does not match n={n}")]
    BadShape { rows: usize, cols: usize, n: usize },
    #[error("weight store: {0}")]
    Store(String),
}

/// How state/input vectors were drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodebookMode {
    /// Independent random hypervectors; relies on pseudo-orthogonality.
    Random,
    /// Exactly orthogonal state/bridge vectors and balanced, mutually
    /// orthogonal bipolar masks; for small networks where random overlap
    /// is not negligible. Weight construction then uses `f = 0`.
    Orthogonal,
}

/// State, bridge, and input vectors assigned to one DFA.
#[derive(Debug, Clone)]
pub struct EmbeddingCodebook {
    n: usize,
    l: usize,
    mode: CodebookMode,
    q_vecs: Vec<SbcVector>,
    b_vecs: Vec<SbcVector>,
    s_vecs: Vec<BmapVector>,
}

impl EmbeddingCodebook {
    /// Generate vectors for every state and input of `dfa`.
    ///
    /// Entries are derived from named substreams of `seed`, so they depend
    /// only on `(seed, mode, name)`.
    pub fn generate(
        dfa: &Dfa,
        n: usize,
        l: usize,
        mode: CodebookMode,
        seed: u64,
    ) -> Result<Self, WeightError> {
        match mode {
            CodebookMode::Random => {
                let q_vecs = dfa
                    .states()
                    .iter()
                    .map(|name| {
                        SbcVector::random(n, l, &mut substream(seed, &format!("embed/q/{name}")))
                    })
                    .collect::<Result<_, _>>()?;
                let b_vecs = dfa
                    .states()
                    .iter()
                    .map(|name| {
                        SbcVector::random(n, l, &mut substream(seed, &format!("embed/b/{name}")))
                    })
                    .collect::<Result<_, _>>()?;
                let s_vecs = dfa
                    .inputs()
                    .iter()
                    .map(|name| {
                        BmapVector::random(n, l, &mut substream(seed, &format!("embed/s/{name}")))
                    })
                    .collect::<Result<_, _>>()?;
                Ok(Self {
                    n,
                    l,
                    mode,
                    q_vecs,
                    b_vecs,
                    s_vecs,
                })
            }
            CodebookMode::Orthogonal => Self::orthogonal(dfa, n, l),
        }
    }

    /// Deterministic orthogonal assignment: state `k` takes within-block
    /// index `k`, its bridge takes `|Q|+k`, in every block. Masks are rows
    /// of a sign (Walsh) pattern: balanced, pairwise orthogonal as bipolar
    /// vectors, and never complementary (complementary masks would cancel
    /// the bound bridge terms in the superposition).
    fn orthogonal(dfa: &Dfa, n: usize, l: usize) -> Result<Self, WeightError> {
        let q = dfa.num_states();
        if 2 * q > l {
            return Err(WeightError::OrthogonalDoesNotFit { q, l });
        }
        if n % l != 0 {
            return Err(WeightError::Vsa(VsaError::BadBlockShape { n, l }));
        }
        let m = n / l;
        if dfa.num_inputs() > 2 {
            return Err(WeightError::TooManyOrthogonalInputs(dfa.num_inputs()));
        }
        if dfa.num_inputs() >= 1 && m % 2 != 0 || dfa.num_inputs() == 2 && m % 4 != 0 {
            return Err(WeightError::OddBlockCount(m));
        }
        let q_vecs = (0..q)
            .map(|k| SbcVector::from_active(l, vec![k as u32; m]))
            .collect::<Result<_, _>>()?;
        let b_vecs = (0..q)
            .map(|k| SbcVector::from_active(l, vec![(q + k) as u32; m]))
            .collect::<Result<_, _>>()?;
        let s_vecs = (0..dfa.num_inputs())
            .map(|j| {
                // coarsest sign waves first: halves, then quarters — the
                // wide stripes spread a faulty device row's two presynaptic
                // neurons (grid row r carries presyn r and r + rows) across
                // an on and an off block
                let period = 1usize << (j + 1);
                let signs = (0..m)
                    .map(|k| {
                        if (k * period / m) % 2 == 0 {
                            1i8
                        } else {
                            -1i8
                        }
                    })
                    .collect();
                BmapVector::from_signs(l, signs)
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            n,
            l,
            mode: CodebookMode::Orthogonal,
            q_vecs,
            b_vecs,
            s_vecs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn num_blocks(&self) -> usize {
        self.n / self.l
    }

    pub fn mode(&self) -> CodebookMode {
        self.mode
    }

    /// Coding level used in weight construction: `1/L`, or 0 in
    /// orthogonal mode.
    pub fn f_used(&self) -> f64 {
        match self.mode {
            CodebookMode::Random => 1.0 / self.l as f64,
            CodebookMode::Orthogonal => 0.0,
        }
    }

    pub fn state_vec(&self, state: usize) -> &SbcVector {
        &self.q_vecs[state]
    }

    pub fn bridge_vec(&self, state: usize) -> &SbcVector {
        &self.b_vecs[state]
    }

    pub fn input_vec(&self, input: usize) -> &BmapVector {
        &self.s_vecs[input]
    }

    pub fn state_vecs(&self) -> &[SbcVector] {
        &self.q_vecs
    }

    pub fn bridge_vecs(&self) -> &[SbcVector] {
        &self.b_vecs
    }

    pub fn input_vecs(&self) -> &[BmapVector] {
        &self.s_vecs
    }

    fn covers(&self, dfa: &Dfa) -> Result<(), WeightError> {
        if self.q_vecs.len() != dfa.num_states() || self.b_vecs.len() != dfa.num_states() {
            return Err(WeightError::MissingCodebookEntry(format!(
                "{} states, codebook holds {}",
                dfa.num_states(),
                self.q_vecs.len()
            )));
        }
        if self.s_vecs.len() != dfa.num_inputs() {
            return Err(WeightError::MissingCodebookEntry(format!(
                "{} inputs, codebook holds {}",
                dfa.num_inputs(),
                self.s_vecs.len()
            )));
        }
        Ok(())
    }
}

/// Transform history of a weight matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Ideal,
    Binarized,
    Noisy,
    Ternary,
    FixedPoint,
}

/// Dense N×N recurrent coupling matrix. Entry `(i, j)` couples presynaptic
/// neuron `j` to postsynaptic neuron `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix {
    pub data: Array2<f64>,
    n: usize,
    l: usize,
    provenance: Provenance,
    f_used: f64,
}

impl WeightMatrix {
    pub fn new(data: Array2<f64>, l: usize, provenance: Provenance, f_used: f64) -> Self {
        let n = data.nrows();
        assert_eq!(data.ncols(), n, "weight matrix must be square");
        assert!(n % l == 0, "block length must divide n");
        assert!(data.iter().all(|w| w.is_finite()), "weights must be finite");
        Self {
            data,
            n,
            l,
            provenance,
            f_used,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn f_used(&self) -> f64 {
        self.f_used
    }

    /// Mean of all N² entries.
    pub fn mean(&self) -> f64 {
        self.data.sum() / (self.n * self.n) as f64
    }

    /// Population standard deviation of all N² entries.
    pub fn std(&self) -> f64 {
        let mean = self.mean();
        let var = self.data.iter().map(|w| (w - mean).powi(2)).sum::<f64>()
            / (self.n * self.n) as f64;
        var.sqrt()
    }

    /// Mean absolute entry value.
    pub fn mean_abs(&self) -> f64 {
        self.data.iter().map(|w| w.abs()).sum::<f64>() / (self.n * self.n) as f64
    }

    /// Presynaptic-major (column-major) copy of the couplings, with
    /// intra-block entries zeroed: column `j` occupies `[j·n, (j+1)·n)`.
    ///
    /// This is the form the engines consume; within a block the coupling
    /// is realised by the WTA mechanism, not by the weight matrix.
    pub fn to_engine_columns(&self) -> Vec<f64> {
        let n = self.n;
        let l = self.l;
        let mut cols = vec![0.0; n * n];
        for j in 0..n {
            let block = j / l;
            let col = &mut cols[j * n..(j + 1) * n];
            for i in 0..n {
                col[i] = if i / l == block {
                    0.0
                } else {
                    self.data[(i, j)]
                };
            }
        }
        cols
    }
}

/// Drive vector `h = W·z` for a set of active components.
pub fn drive(w: &WeightMatrix, active_components: &[usize]) -> Vec<f64> {
    let n = w.n();
    let mut h = vec![0.0; n];
    for &j in active_components {
        for i in 0..n {
            h[i] += w.data[(i, j)];
        }
    }
    h
}

/// Attractor energy `E(z) = −zᵀWz` of a binary state given by its active
/// components. For a pure attractor matrix this equals
/// `−Σ_q (z·(q−f))²`.
pub fn energy(w: &WeightMatrix, active_components: &[usize]) -> f64 {
    let mut e = 0.0;
    for &i in active_components {
        for &j in active_components {
            e += w.data[(i, j)];
        }
    }
    -e
}
