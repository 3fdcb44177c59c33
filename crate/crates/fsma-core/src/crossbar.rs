//! Software emulation of a 1T1R memristive crossbar storing ternary
//! weights, read in closed loop by the spiking engine.
//!
//! A logical `n×n` weight matrix is stored on an `(n/2) × 2n` device grid:
//! the outgoing weights of presynaptic neuron `j < n/2` sit in grid row
//! `j`, columns `0..n`, and those of neuron `j + n/2` in the same row,
//! columns `n..2n`. A matrix-vector read is two partial reads — first the
//! lower presynaptic half as input voltages, then the upper half — whose
//! current vectors are summed, which reproduces `W·z` exactly when the
//! devices are noiseless.

use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dfa::Dfa;
use crate::schedule::InputSchedule;
use crate::snn::{run_with_charge, SimParams, SnnError, SpikeTrace, StateReadout};
use crate::vsa::BlockMask;
use crate::weights::{EmbeddingCodebook, Provenance, WeightMatrix};

#[derive(Debug, Error)]
pub enum CrossbarError {
    #[error("crossbar stores ternary weights, got {0:?}")]
    NotTernary(Provenance),
    #[error("weight matrix is {n}×{n} but the {rows}×{cols} grid stores {fits}×{fits}")]
    WrongShape {
        n: usize,
        rows: usize,
        cols: usize,
        fits: usize,
    },
    #[error("fault at ({row}, {col:?}) is outside the {rows}×{cols} grid")]
    FaultOutOfRange {
        row: usize,
        col: Option<usize>,
        rows: usize,
        cols: usize,
    },
    #[error("spike vector has {got} entries, expected {expected}")]
    BadSpikeVector { expected: usize, got: usize },
    #[error(transparent)]
    Snn(#[from] SnnError),
}

/// Device fault classes seen on real arrays: rows that conduct almost
/// nothing, and devices with anomalously large current.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaultKind {
    StuckLow,
    StuckHigh,
}

/// Column selector in a fault entry: one device or the whole row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaultCol {
    One(usize),
    All,
}

impl Serialize for FaultCol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            FaultCol::One(i) => s.serialize_u64(*i as u64),
            FaultCol::All => s.serialize_str("*"),
        }
    }
}

impl<'de> Deserialize<'de> for FaultCol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Index(i) => Ok(FaultCol::One(i)),
            Raw::Text(s) if s == "*" => Ok(FaultCol::All),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "column must be an index or \"*\", got {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultSpec {
    pub row: usize,
    pub col: FaultCol,
    pub kind: FaultKind,
}

/// Grid geometry and nonideality parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrossbarConfig {
    pub rows: usize,
    pub cols: usize,
    /// Relative std of the programmed conductance (fixed-pattern noise).
    pub programming_cv: f64,
    /// Absolute std of each partial-read current, per output line.
    pub read_std: f64,
    /// Relative std of post-programming drift.
    pub relaxation_cv: f64,
    pub faults: Vec<FaultSpec>,
    /// Conductance of a stuck-low device.
    pub stuck_low_value: f64,
    /// Conductance of a stuck-high device (top level is 1.0).
    pub stuck_high_value: f64,
}

impl Default for CrossbarConfig {
    fn default() -> Self {
        Self::standard()
    }
}

impl CrossbarConfig {
    /// Grid for a 64-neuron network with the default noise magnitudes.
    pub fn standard() -> Self {
        Self {
            rows: 32,
            cols: 128,
            programming_cv: 0.1,
            read_std: 0.05,
            relaxation_cv: 0.05,
            faults: Vec::new(),
            stuck_low_value: 0.0,
            stuck_high_value: 2.0,
        }
    }

    /// Same grid with every nonideality switched off.
    pub fn noiseless() -> Self {
        Self {
            programming_cv: 0.0,
            read_std: 0.0,
            relaxation_cv: 0.0,
            ..Self::standard()
        }
    }

    /// Logical network size the grid can hold.
    pub fn logical_n(&self) -> usize {
        2 * self.rows
    }
}

/// Programmed crossbar: realised conductances, their targets, and the
/// fault map.
#[derive(Debug, Clone)]
pub struct CrossbarState {
    cfg: CrossbarConfig,
    g: Array2<f64>,
    g_target: Array2<f64>,
    fault: Array2<u8>, // 0 ok, 1 stuck low, 2 stuck high
    /// Mean |w| of the source matrix, kept for charge calibration.
    source_mean_abs: f64,
    l: usize,
}

impl CrossbarState {
    pub fn conductances(&self) -> &Array2<f64> {
        &self.g
    }

    pub fn targets(&self) -> &Array2<f64> {
        &self.g_target
    }

    pub fn config(&self) -> &CrossbarConfig {
        &self.cfg
    }

    pub fn block_len(&self) -> usize {
        self.l
    }

    pub fn source_mean_abs(&self) -> f64 {
        self.source_mean_abs
    }

    /// Fault tag per device: 0 healthy, 1 stuck low, 2 stuck high.
    pub fn fault_map(&self) -> &Array2<u8> {
        &self.fault
    }
}

/// Currents of one full (two-pass) matrix-vector read.
#[derive(Debug, Clone)]
pub struct ReadResult {
    pub currents: Vec<f64>,
}

/// Program a ternary `n×n` matrix onto the grid.
///
/// Intra-block couplings are programmed to the lowest level (the WTA
/// circuit owns within-block interaction). Each healthy device realises
/// `level·(1+ε_prog)·(1+ε_relax)` with the ε drawn once here; stuck
/// devices ignore programming entirely.
pub fn program(
    cfg: &CrossbarConfig,
    w: &WeightMatrix,
    rng: &mut impl Rng,
) -> Result<CrossbarState, CrossbarError> {
    if w.provenance() != Provenance::Ternary {
        return Err(CrossbarError::NotTernary(w.provenance()));
    }
    let n = w.n();
    if cfg.logical_n() != n || cfg.cols != 2 * n {
        return Err(CrossbarError::WrongShape {
            n,
            rows: cfg.rows,
            cols: cfg.cols,
            fits: cfg.logical_n(),
        });
    }
    let source_mean_abs = w.mean_abs();

    let mut fault = Array2::<u8>::zeros((cfg.rows, cfg.cols));
    for f in &cfg.faults {
        let code = match f.kind {
            FaultKind::StuckLow => 1,
            FaultKind::StuckHigh => 2,
        };
        match f.col {
            FaultCol::All if f.row < cfg.rows => {
                fault.row_mut(f.row).fill(code);
            }
            FaultCol::One(c) if f.row < cfg.rows && c < cfg.cols => {
                fault[(f.row, c)] = code;
            }
            _ => {
                return Err(CrossbarError::FaultOutOfRange {
                    row: f.row,
                    col: match f.col {
                        FaultCol::One(c) => Some(c),
                        FaultCol::All => None,
                    },
                    rows: cfg.rows,
                    cols: cfg.cols,
                })
            }
        }
    }

    let l = w.block_len();
    let level = |post: usize, pre: usize| -> f64 {
        if post / l == pre / l {
            0.0
        } else {
            w.data[(post, pre)]
        }
    };
    let mut g_target = Array2::<f64>::zeros((cfg.rows, cfg.cols));
    for r in 0..cfg.rows {
        for c in 0..cfg.cols {
            g_target[(r, c)] = if c < n {
                level(c, r)
            } else {
                level(c - n, r + cfg.rows)
            };
        }
    }

    let prog_noise = (cfg.programming_cv > 0.0)
        .then(|| Normal::new(0.0, cfg.programming_cv).unwrap());
    let relax_noise = (cfg.relaxation_cv > 0.0)
        .then(|| Normal::new(0.0, cfg.relaxation_cv).unwrap());
    let mut g = Array2::<f64>::zeros((cfg.rows, cfg.cols));
    for r in 0..cfg.rows {
        for c in 0..cfg.cols {
            g[(r, c)] = match fault[(r, c)] {
                1 => cfg.stuck_low_value,
                2 => cfg.stuck_high_value,
                _ => {
                    let mut value = g_target[(r, c)];
                    if let Some(noise) = &prog_noise {
                        value *= 1.0 + noise.sample(rng);
                    }
                    if let Some(noise) = &relax_noise {
                        value *= 1.0 + noise.sample(rng);
                    }
                    value.max(0.0)
                }
            };
        }
    }

    Ok(CrossbarState {
        cfg: cfg.clone(),
        g,
        g_target,
        fault,
        source_mean_abs,
        l,
    })
}

/// Matrix-vector read: two partial passes over the presynaptic halves,
/// each with independent per-line read noise, summed.
pub fn read_mvm(
    xbar: &CrossbarState,
    spikes: &[bool],
    rng: &mut impl Rng,
) -> Result<ReadResult, CrossbarError> {
    let n = xbar.cfg.logical_n();
    if spikes.len() != n {
        return Err(CrossbarError::BadSpikeVector {
            expected: n,
            got: spikes.len(),
        });
    }
    let rows = xbar.cfg.rows;
    let noise = (xbar.cfg.read_std > 0.0).then(|| Normal::new(0.0, xbar.cfg.read_std).unwrap());
    let mut partial = |col_offset: usize, spike_offset: usize| -> Vec<f64> {
        let mut currents = vec![0.0; n];
        for r in 0..rows {
            if !spikes[spike_offset + r] {
                continue;
            }
            let row = xbar.g.row(r);
            for (i, c) in currents.iter_mut().enumerate() {
                *c += row[col_offset + i];
            }
        }
        if let Some(noise) = &noise {
            for c in currents.iter_mut() {
                *c += noise.sample(rng);
            }
        }
        currents
    };
    let first = partial(0, 0);
    let second = partial(n, rows);
    let currents: Vec<f64> = first.iter().zip(&second).map(|(a, b)| a + b).collect();
    Ok(ReadResult { currents })
}

/// Run the spiking engine with the recurrent pathway served by crossbar
/// reads: whenever neurons spiked on the previous step, the grid is read
/// once with the full binary spike vector and the scaled currents are
/// injected as postsynaptic charge.
///
/// The current scale maps a top-level device (conductance 1.0) to the same
/// charge the in-memory engine assigns to a unit weight, so a noiseless,
/// fault-free crossbar reproduces the in-memory run exactly.
pub fn run_closed_loop(
    params: &SimParams,
    xbar: &CrossbarState,
    cb: &EmbeddingCodebook,
    dfa: &Dfa,
    schedule: &InputSchedule,
    rng: &mut impl Rng,
) -> Result<SpikeTrace, CrossbarError> {
    let n = xbar.cfg.logical_n();
    if params.n != n {
        return Err(CrossbarError::Snn(SnnError::WrongSize {
            expected: params.n,
            got: n,
        }));
    }
    let current_scale = params.mean_charge / xbar.source_mean_abs;
    let readout = StateReadout::new(dfa, cb);
    let masks: Vec<BlockMask> = cb.input_vecs().iter().map(|s| s.to_mask()).collect();
    let initial = cb.state_vec(dfa.initial()).active_components();
    let mut spike_bits = vec![false; n];
    let trace = run_with_charge(
        params,
        &readout,
        &masks,
        &initial,
        schedule,
        |spikes, charge| {
            spike_bits.iter_mut().for_each(|b| *b = false);
            for &j in spikes {
                spike_bits[j as usize] = true;
            }
            let read = read_mvm(xbar, &spike_bits, rng).expect("validated length");
            for (c, current) in charge.iter_mut().zip(&read.currents) {
                *c = current * current_scale;
            }
        },
    )?;
    Ok(trace)
}
