//! Discrete-time block-WTA recurrent engine.
//!
//! One step computes `z_{t+1} = bWTA[W·(z_t ∧ i_t)]`: the current state is
//! masked by the input, multiplied through the weights, and each on block
//! activates its most-driven unit. Fast enough for walk verification and
//! capacity sweeps; the spiking engine reproduces the same dynamics in
//! continuous time.

mod capacity;
mod energy;

pub use energy::{energy_descent_check, EnergyDescentReport};
pub use capacity::{
    capacity_summary, capacity_sweep, fit_scaling, scaled_block_len, CapacityCell,
    CapacityConfig, CapacitySummaryRow, ScalingFit, WeightMode,
};

use thiserror::Error;

use crate::dfa::Dfa;
use crate::schedule::InputSchedule;
use crate::vsa::{block_argmax, BlockMask, BlockState, SbcVector, VsaError};
use crate::weights::{EmbeddingCodebook, WeightMatrix};

#[derive(Debug, Error)]
pub enum RnnError {
    #[error(transparent)]
    Vsa(#[from] VsaError),
    #[error("state has {got} blocks, engine expects {expected}")]
    WrongState { expected: usize, got: usize },
    #[error("schedule symbol {0} is out of range")]
    BadSymbol(usize),
}

/// Network state plus step counter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RnnState {
    pub z: BlockState,
    pub t: u64,
}

/// Outcome of iterating the autonomous (no-input) dynamics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPointOutcome {
    /// `z` no longer changes.
    FixedPoint { z: BlockState, steps: u64 },
    /// The synchronous update entered a period-2 orbit.
    TwoCycle {
        a: BlockState,
        b: BlockState,
        steps: u64,
    },
    /// Neither within the step budget.
    Undecided { z: BlockState, steps: u64 },
}

/// Walk execution parameters (durations in steps).
#[derive(Debug, Clone, Copy)]
pub struct WalkParams {
    pub settle_steps: u32,
    pub on_steps: u32,
    pub off_steps: u32,
}

impl Default for WalkParams {
    fn default() -> Self {
        // ten steps per phase, matching the capacity protocol
        Self {
            settle_steps: 10,
            on_steps: 10,
            off_steps: 10,
        }
    }
}

/// Result of a full walk.
#[derive(Debug, Clone)]
pub struct WalkResult {
    /// State decoded from the final network state by maximum similarity.
    pub decoded: usize,
    /// Oracle state from the symbolic walk.
    pub expected: usize,
    pub success: bool,
    /// Network state after every step.
    pub trace: Vec<BlockState>,
}

/// Discrete engine bound to one weight matrix.
///
/// Intra-block couplings are zeroed on ingestion: within a block the WTA
/// rule is the only interaction.
pub struct RnnEngine {
    n: usize,
    l: usize,
    /// presynaptic-major couplings; column j at [j*n, (j+1)*n)
    w_cols: Vec<f64>,
}

impl RnnEngine {
    pub fn new(w: &WeightMatrix) -> Self {
        Self {
            n: w.n(),
            l: w.block_len(),
            w_cols: w.to_engine_columns(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_len(&self) -> usize {
        self.l
    }

    fn num_blocks(&self) -> usize {
        self.n / self.l
    }

    /// Postsynaptic drive `h = W·(z ∧ mask)`.
    pub fn drive(&self, z: &BlockState, mask: &BlockMask) -> Result<Vec<f64>, RnnError> {
        if z.num_blocks() != self.num_blocks() || z.block_len() != self.l {
            return Err(RnnError::WrongState {
                expected: self.num_blocks(),
                got: z.num_blocks(),
            });
        }
        let mut h = vec![0.0; self.n];
        for (block, &active) in z.active().iter().enumerate() {
            if !mask.is_on(block) {
                continue;
            }
            let Some(within) = active else { continue };
            let j = block * self.l + within as usize;
            let col = &self.w_cols[j * self.n..(j + 1) * self.n];
            for (hi, &wij) in h.iter_mut().zip(col) {
                *hi += wij;
            }
        }
        Ok(h)
    }

    /// One synchronous step: all blocks update together; off blocks fall
    /// silent in the output.
    pub fn step(&self, z: &BlockState, mask: &BlockMask) -> Result<BlockState, RnnError> {
        let h = self.drive(z, mask)?;
        Ok(block_argmax(&h, self.l, Some(mask))?)
    }

    /// One asynchronous update of a single block: its winner becomes the
    /// most-driven unit given the rest of the network (no input mask).
    pub fn step_async(&self, z: &mut BlockState, block: usize) -> Result<(), RnnError> {
        let mask = BlockMask::all_on(self.num_blocks());
        // intra-block weights are zero, so z's own block does not feed h
        let h = self.drive(z, &mask)?;
        let start = block * self.l;
        let slice = &h[start..start + self.l];
        let mut best = 0usize;
        for (i, &v) in slice.iter().enumerate() {
            if v > slice[best] {
                best = i;
            }
        }
        let mut active = z.active().to_vec();
        active[block] = Some(best as u32);
        *z = BlockState::from_active(self.l, active);
        Ok(())
    }

    /// Iterate the autonomous synchronous dynamics until a fixed point or
    /// a period-2 orbit, up to `max_steps`.
    pub fn run_to_fixed_point(
        &self,
        z0: &BlockState,
        max_steps: u64,
    ) -> Result<FixedPointOutcome, RnnError> {
        let mask = BlockMask::all_on(self.num_blocks());
        let mut prev = z0.clone();
        let mut current = self.step(&prev, &mask)?;
        let mut steps = 1;
        while steps < max_steps {
            if current == prev {
                return Ok(FixedPointOutcome::FixedPoint { z: current, steps });
            }
            let next = self.step(&current, &mask)?;
            if next == prev {
                return Ok(FixedPointOutcome::TwoCycle {
                    a: prev,
                    b: current,
                    steps,
                });
            }
            prev = current;
            current = next;
            steps += 1;
        }
        Ok(FixedPointOutcome::Undecided { z: current, steps })
    }

    /// Run `schedule` from `z0`, returning the state after every step.
    pub fn run_schedule(
        &self,
        z0: &BlockState,
        schedule: &InputSchedule,
        masks: &[BlockMask],
    ) -> Result<Vec<BlockState>, RnnError> {
        let all_on = BlockMask::all_on(self.num_blocks());
        let mut trace = Vec::new();
        let mut z = z0.clone();
        for segment in schedule.segments() {
            let mask = match segment.symbol {
                Some(s) => masks.get(s).ok_or(RnnError::BadSymbol(s))?,
                None => &all_on,
            };
            for _ in 0..segment.duration as u64 {
                z = self.step(&z, mask)?;
                trace.push(z.clone());
            }
        }
        Ok(trace)
    }
}

/// Decode a network state as the stored state vector with the greatest
/// overlap; ties resolve to the lowest state index.
pub fn decode_state(z: &BlockState, state_vecs: &[SbcVector]) -> usize {
    let mut best = 0usize;
    let mut best_overlap = -1i64;
    for (idx, q) in state_vecs.iter().enumerate() {
        let overlap = q
            .active()
            .iter()
            .zip(z.active())
            .filter(|(&qa, &za)| za == Some(qa))
            .count() as i64;
        if overlap > best_overlap {
            best_overlap = overlap;
            best = idx;
        }
    }
    best
}

/// Execute a symbol word on the embedded machine and compare the decoded
/// final state against the symbolic oracle.
pub fn run_walk(
    engine: &RnnEngine,
    cb: &EmbeddingCodebook,
    dfa: &Dfa,
    word: &[usize],
    params: WalkParams,
) -> Result<WalkResult, RnnError> {
    let masks: Vec<BlockMask> = cb.input_vecs().iter().map(|s| s.to_mask()).collect();
    let mut segments = vec![crate::schedule::Segment {
        symbol: None,
        duration: params.settle_steps.max(1) as f64,
    }];
    for &s in word {
        if s >= masks.len() {
            return Err(RnnError::BadSymbol(s));
        }
        segments.push(crate::schedule::Segment {
            symbol: Some(s),
            duration: params.on_steps as f64,
        });
        segments.push(crate::schedule::Segment {
            symbol: None,
            duration: params.off_steps as f64,
        });
    }
    let schedule = InputSchedule::new(segments);
    let z0 = BlockState::from(cb.state_vec(dfa.initial()));
    let trace = engine.run_schedule(&z0, &schedule, &masks)?;
    let final_z = trace.last().cloned().unwrap_or(z0);
    let decoded = decode_state(&final_z, cb.state_vecs());
    let expected = dfa.walk(word);
    Ok(WalkResult {
        decoded,
        expected,
        success: decoded == expected,
        trace,
    })
}
