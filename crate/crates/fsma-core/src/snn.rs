//! Spiking execution engine: leaky integrate-and-fire neurons with
//! second-order (alpha-kernel) synapses, block-WTA via forced
//! refractoriness, input masking by sustained suppression, and
//! firing-rate readout projected onto the stored state vectors.
//!
//! With the default parameters the rest potential sits above the spiking
//! threshold, so every unmasked, non-refractory neuron drifts toward
//! threshold on its own; the recurrent drive decides which neuron in each
//! block gets there first, and the WTA reset silences the rest of the
//! block. This tonic drive is what keeps an attractor firing indefinitely
//! without external input.

use thiserror::Error;

use crate::dfa::Dfa;
use crate::schedule::InputSchedule;
use crate::vsa::{BlockMask, VsaError};
use crate::weights::{EmbeddingCodebook, WeightMatrix};

#[derive(Debug, Error)]
pub enum SnnError {
    #[error(transparent)]
    Vsa(#[from] VsaError),
    #[error("weight matrix is {got}×{got}, parameters expect n={expected}")]
    WrongSize { expected: usize, got: usize },
    #[error("schedule symbol {0} has no mask vector")]
    BadSymbol(usize),
    #[error("non-finite neuron state at t = {t_ms} ms (neuron {neuron})")]
    NonFinite { t_ms: f64, neuron: usize },
    #[error("weights are all zero; cannot calibrate the charge scale")]
    ZeroWeights,
}

/// Simulation parameters. Times are milliseconds, voltages millivolts,
/// capacitance farads; synaptic charge is voltage × capacitance.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SimParams {
    pub n: usize,
    pub l: usize,
    /// Euler step (ms).
    pub dt: f64,
    /// Membrane time constant (ms).
    pub tau_m: f64,
    /// Spiking threshold (mV).
    pub u_theta: f64,
    /// Rest potential (mV); above threshold by default (tonic drive).
    pub u_rest: f64,
    /// Post-spike reset (mV).
    pub u_reset: f64,
    /// Membrane capacitance (F).
    pub c_mem: f64,
    /// Synaptic time constant of both filter stages (ms).
    pub tau_syn: f64,
    /// Refractory period (ms).
    pub tau_ref: f64,
    /// Readout kernel time constant (ms).
    pub tau_readout: f64,
    /// Target mean charge per spike, `⟨|w|⟩·w_scale` (mV·F). The weight
    /// scale is calibrated from the matrix to hit this.
    pub mean_charge: f64,
    /// External current injected into the initial state's neurons (mV·F/ms).
    pub init_kick_current: f64,
    /// Kick duration (ms); 2·tau_syn when None.
    pub init_kick_ms: Option<f64>,
    /// Rate sampling interval (ms).
    pub rate_stride_ms: f64,
    /// A state counts as inhabited when its rate exceeds this fraction of
    /// the mean active-neuron rate.
    pub decode_threshold: f64,
}

impl SimParams {
    /// Defaults used by the reference simulations.
    pub fn standard(n: usize, l: usize) -> Self {
        Self {
            n,
            l,
            dt: 0.05,
            tau_m: 20.0,
            u_theta: 20.0,
            u_rest: 25.0,
            u_reset: 0.0,
            c_mem: 1.0,
            tau_syn: 20.0,
            tau_ref: 10.0,
            tau_readout: 10.0,
            mean_charge: 0.1,
            init_kick_current: 25.0,
            init_kick_ms: None,
            rate_stride_ms: 1.0,
            decode_threshold: 0.5,
        }
    }

    fn validate(&self) -> Result<(), SnnError> {
        assert!(self.l > 0 && self.n % self.l == 0, "block length must divide n");
        assert!(
            self.dt > 0.0 && self.tau_m > 0.0 && self.tau_syn > 0.0 && self.tau_ref > 0.0,
            "time constants must be positive"
        );
        assert!(
            self.dt <= self.tau_syn / 10.0,
            "dt must be much smaller than tau_syn"
        );
        Ok(())
    }

    fn kick_duration(&self) -> f64 {
        self.init_kick_ms.unwrap_or(2.0 * self.tau_syn)
    }
}

/// Per-neuron dynamic state.
#[derive(Debug, Clone)]
pub struct NeuronArray {
    /// Membrane voltages (mV).
    pub u: Vec<f64>,
    /// Second synapse stage feeding the membrane (mV·F/ms).
    pub i_syn: Vec<f64>,
    /// First synapse stage receiving spike impulses.
    pub j_syn: Vec<f64>,
    /// Per-neuron refractory deadline (ms).
    pub ref_until: Vec<f64>,
    /// Sustained suppression by the current input mask.
    pub masked: Vec<bool>,
}

impl NeuronArray {
    fn new(n: usize, u_reset: f64) -> Self {
        Self {
            u: vec![u_reset; n],
            i_syn: vec![0.0; n],
            j_syn: vec![0.0; n],
            ref_until: vec![f64::NEG_INFINITY; n],
            masked: vec![false; n],
        }
    }
}

/// State (or gap) decoded in one no-input segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodedState {
    pub segment: usize,
    /// First sample time at which the decoded state was inhabited.
    pub t_enter_ms: f64,
    /// None when no state rate cleared the decode threshold.
    pub state: Option<usize>,
}

/// Full record of one spiking run.
#[derive(Debug, Clone)]
pub struct SpikeTrace {
    /// Spike events `(t_ms, neuron)`, time-ordered.
    pub events: Vec<(f64, u32)>,
    /// Rate sample times (ms).
    pub rate_times: Vec<f64>,
    /// One label per readout series: `q*` states then `b*` bridges.
    pub rate_labels: Vec<String>,
    /// Kernel-filtered rates (Hz), one series per label.
    pub rates: Vec<Vec<f64>>,
    /// Mean rate of the currently active population (Hz), per sample.
    pub mean_active_rate: Vec<f64>,
    /// Decoded state per no-input segment, in time order.
    pub decoded: Vec<DecodedState>,
}

impl SpikeTrace {
    /// State decoded in the final gap.
    pub fn final_state(&self) -> Option<usize> {
        self.decoded.last().and_then(|d| d.state)
    }

    /// Decoded walk with consecutive duplicates merged: `(state, t_enter)`.
    pub fn decoded_walk(&self) -> Vec<(usize, f64)> {
        let mut walk: Vec<(usize, f64)> = Vec::new();
        for d in &self.decoded {
            if let Some(state) = d.state {
                if walk.last().map(|&(s, _)| s) != Some(state) {
                    walk.push((state, d.t_enter_ms));
                }
            }
        }
        walk
    }
}

/// Readout projection set: which neurons belong to which labelled state.
pub struct StateReadout {
    num_blocks: usize,
    labels: Vec<String>,
    num_states: usize,
    /// membership[neuron] = indices of series containing that neuron
    membership: Vec<Vec<u16>>,
}

impl StateReadout {
    /// Series for every state vector (`q…`) followed by every bridge
    /// vector (`b…`).
    pub fn new(dfa: &Dfa, cb: &EmbeddingCodebook) -> Self {
        let mut labels = Vec::new();
        let mut vectors = Vec::new();
        for (idx, q) in cb.state_vecs().iter().enumerate() {
            labels.push(dfa.state_name(idx).to_string());
            vectors.push(q);
        }
        for (idx, b) in cb.bridge_vecs().iter().enumerate() {
            labels.push(format!("b{idx}"));
            vectors.push(b);
        }
        let mut membership = vec![Vec::new(); cb.n()];
        for (series, vector) in vectors.iter().enumerate() {
            for neuron in vector.active_components() {
                membership[neuron].push(series as u16);
            }
        }
        Self {
            num_blocks: cb.num_blocks(),
            labels,
            num_states: cb.state_vecs().len(),
            membership,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }
}

/// Spiking engine bound to one weight matrix. Intra-block couplings are
/// zeroed on ingestion (the WTA circuit owns within-block interaction) and
/// the charge scale is calibrated so `⟨|w|⟩·w_scale = mean_charge`.
pub struct SnnEngine {
    params: SimParams,
    w_cols: Vec<f64>,
    w_scale: f64,
}

impl SnnEngine {
    pub fn new(params: SimParams, w: &WeightMatrix) -> Result<Self, SnnError> {
        params.validate()?;
        if w.n() != params.n {
            return Err(SnnError::WrongSize {
                expected: params.n,
                got: w.n(),
            });
        }
        let mean_abs = w.mean_abs();
        if mean_abs == 0.0 {
            return Err(SnnError::ZeroWeights);
        }
        Ok(Self {
            w_scale: params.mean_charge / mean_abs,
            w_cols: w.to_engine_columns(),
            params,
        })
    }

    pub fn w_scale(&self) -> f64 {
        self.w_scale
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    /// Run a walk: the network is kicked into the initial state, then the
    /// schedule's symbol masks are applied in sequence.
    pub fn run(
        &self,
        dfa: &Dfa,
        cb: &EmbeddingCodebook,
        schedule: &InputSchedule,
    ) -> Result<SpikeTrace, SnnError> {
        let readout = StateReadout::new(dfa, cb);
        let masks: Vec<BlockMask> = cb.input_vecs().iter().map(|s| s.to_mask()).collect();
        let initial = cb.state_vec(dfa.initial()).active_components();
        let n = self.params.n;
        let w_cols = &self.w_cols;
        let w_scale = self.w_scale;
        run_with_charge(
            &self.params,
            &readout,
            &masks,
            &initial,
            schedule,
            |spikes, charge| {
                charge.iter_mut().for_each(|c| *c = 0.0);
                for &j in spikes {
                    let col = &w_cols[j as usize * n..(j as usize + 1) * n];
                    for (c, &wij) in charge.iter_mut().zip(col) {
                        *c += wij;
                    }
                }
                for c in charge.iter_mut() {
                    *c *= w_scale;
                }
            },
        )
    }
}

/// Core integration loop with a caller-supplied recurrent pathway.
///
/// `charge_for(spikes, out)` must fill `out` with the total synaptic
/// charge (mV·F) delivered to each neuron by the given presynaptic spikes;
/// it is invoked once per step only when at least one neuron spiked on the
/// previous step.
pub fn run_with_charge(
    params: &SimParams,
    readout: &StateReadout,
    masks: &[BlockMask],
    initial_active: &[usize],
    schedule: &InputSchedule,
    mut charge_for: impl FnMut(&[u32], &mut [f64]),
) -> Result<SpikeTrace, SnnError> {
    params.validate()?;
    let n = params.n;
    let l = params.l;
    let num_blocks = n / l;
    let dt = params.dt;
    let kick_until = params.kick_duration();
    for mask in masks {
        if mask.num_blocks() != num_blocks {
            return Err(SnnError::Vsa(VsaError::DimensionMismatch {
                n_a: n,
                l_a: l,
                n_b: mask.num_blocks() * l,
                l_b: l,
            }));
        }
    }
    let mut kick_target = vec![false; n];
    for &i in initial_active {
        kick_target[i] = true;
    }

    let mut neurons = NeuronArray::new(n, params.u_reset);
    let mut charge = vec![0.0; n];
    let mut spikes_prev: Vec<u32> = Vec::new();
    let mut events: Vec<(f64, u32)> = Vec::new();

    // readout filters: one alpha cascade per labelled series plus one for
    // the whole population
    let series_count = readout.labels.len();
    let mut y1 = vec![0.0; series_count];
    let mut y2 = vec![0.0; series_count];
    let mut total_y1 = 0.0;
    let mut total_y2 = 0.0;
    let k_read = dt / params.tau_readout;
    let impulse = 1.0 / params.tau_readout;

    let mut rate_times = Vec::new();
    let mut rates: Vec<Vec<f64>> = vec![Vec::new(); series_count];
    let mut mean_active_rate = Vec::new();
    let stride = (params.rate_stride_ms / dt).round().max(1.0) as u64;

    // per-segment bookkeeping
    struct SegmentRun {
        mask: Option<usize>,
        steps: u64,
        start_ms: f64,
    }
    let mut segments = Vec::new();
    let mut t_acc = 0.0;
    for seg in schedule.segments() {
        if let Some(sym) = seg.symbol {
            if sym >= masks.len() {
                return Err(SnnError::BadSymbol(sym));
            }
        }
        segments.push(SegmentRun {
            mask: seg.symbol,
            steps: (seg.duration / dt).round() as u64,
            start_ms: t_acc,
        });
        t_acc += seg.duration;
    }

    let m = readout.num_blocks as f64;
    let k_u = dt / params.tau_m;
    let k_syn = dt / params.tau_syn;
    let inv_c = dt / params.c_mem;

    let mut winners: Vec<i64> = vec![-1; num_blocks];
    let mut step_index: u64 = 0;

    for segment in &segments {
        // apply the segment's mask as sustained suppression
        for (i, flag) in neurons.masked.iter_mut().enumerate() {
            let on = match segment.mask {
                Some(sym) => masks[sym].is_on(i / l),
                None => true,
            };
            *flag = !on;
            if *flag {
                neurons.u[i] = params.u_reset;
            }
        }

        for _ in 0..segment.steps {
            let t_now = step_index as f64 * dt;
            let t_next = t_now + dt;

            // recurrent charge from last step's spikes
            let have_input = !spikes_prev.is_empty();
            if have_input {
                charge_for(&spikes_prev, &mut charge);
            }

            // integrate: u from old I, I from old J, J from charge
            let kicking = t_now < kick_until;
            for i in 0..n {
                let refractory = t_now < neurons.ref_until[i];
                if neurons.masked[i] || refractory {
                    neurons.u[i] = params.u_reset;
                } else {
                    let mut current = neurons.i_syn[i];
                    if kicking && kick_target[i] {
                        current += params.init_kick_current;
                    }
                    neurons.u[i] +=
                        k_u * (params.u_rest - neurons.u[i]) + inv_c * current;
                }
                let j_old = neurons.j_syn[i];
                neurons.i_syn[i] += k_syn * (j_old - neurons.i_syn[i]);
                neurons.j_syn[i] -= k_syn * j_old;
                if have_input {
                    neurons.j_syn[i] += charge[i] / params.tau_syn;
                }
            }

            // threshold + block-WTA: the most depolarised eligible neuron
            // of each block spikes; everyone else in the block is reset
            // and refractory
            winners.iter_mut().for_each(|w| *w = -1);
            let mut any = false;
            for i in 0..n {
                if neurons.masked[i] || t_now < neurons.ref_until[i] {
                    continue;
                }
                if neurons.u[i] > params.u_theta {
                    let block = i / l;
                    let best = winners[block];
                    if best < 0 || neurons.u[i] > neurons.u[best as usize] {
                        winners[block] = i as i64;
                    }
                    any = true;
                }
            }
            spikes_prev.clear();
            if any {
                for block in 0..num_blocks {
                    let winner = winners[block];
                    if winner < 0 {
                        continue;
                    }
                    let winner = winner as usize;
                    events.push((t_next, winner as u32));
                    spikes_prev.push(winner as u32);
                    for i in block * l..(block + 1) * l {
                        neurons.u[i] = params.u_reset;
                        neurons.ref_until[i] = t_next + params.tau_ref;
                    }
                }
            }

            // readout cascade
            for s in 0..series_count {
                y2[s] += k_read * (y1[s] - y2[s]);
                y1[s] -= k_read * y1[s];
            }
            total_y2 += k_read * (total_y1 - total_y2);
            total_y1 -= k_read * total_y1;
            for &spike in &spikes_prev {
                for &s in &readout.membership[spike as usize] {
                    y1[s as usize] += impulse;
                }
                total_y1 += impulse;
            }

            step_index += 1;
            if step_index % stride == 0 {
                rate_times.push(t_next);
                for s in 0..series_count {
                    // spikes/ms per pattern unit → Hz
                    rates[s].push(y2[s] / m * 1000.0);
                }
                mean_active_rate.push(total_y2 / m * 1000.0);
            }

            if step_index % 512 == 0 {
                for i in 0..n {
                    if !(neurons.u[i].is_finite()
                        && neurons.i_syn[i].is_finite()
                        && neurons.j_syn[i].is_finite())
                    {
                        return Err(SnnError::NonFinite { t_ms: t_next, neuron: i });
                    }
                }
            }
        }
    }

    // decode each gap from the sampled rates
    let mut decoded = Vec::new();
    for (seg_idx, segment) in segments.iter().enumerate() {
        if segment.mask.is_some() {
            continue;
        }
        let seg_start = segment.start_ms;
        let seg_end = segment.start_ms + segment.steps as f64 * dt;
        let window = (seg_end - seg_start) / 2.0;
        let eval_from = seg_end - window.min(100.0);
        let in_window: Vec<usize> = rate_times
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > eval_from && t <= seg_end)
            .map(|(k, _)| k)
            .collect();
        if in_window.is_empty() {
            continue;
        }
        let mean_of = |series: &[f64]| {
            in_window.iter().map(|&k| series[k]).sum::<f64>() / in_window.len() as f64
        };
        let nu_hat = mean_of(&mean_active_rate);
        let mut best: Option<usize> = None;
        let mut best_rate = params.decode_threshold * nu_hat;
        for q in 0..readout.num_states {
            let rate = mean_of(&rates[q]);
            if rate > best_rate {
                best_rate = rate;
                best = Some(q);
            }
        }
        // entry time: first in-segment sample where the winner leads and
        // clears the threshold
        let t_enter = best
            .and_then(|state| {
                rate_times
                    .iter()
                    .enumerate()
                    .filter(|(_, &t)| t > seg_start && t <= seg_end)
                    .find(|(k, _)| {
                        let r = rates[state][*k];
                        r > params.decode_threshold * mean_active_rate[*k]
                            && (0..readout.num_states).all(|other| rates[other][*k] <= r)
                    })
                    .map(|(_, &t)| t)
            })
            .unwrap_or(seg_start);
        decoded.push(DecodedState {
            segment: seg_idx,
            t_enter_ms: t_enter,
            state: best,
        });
    }

    Ok(SpikeTrace {
        events,
        rate_times,
        rate_labels: readout.labels.clone(),
        rates,
        mean_active_rate,
        decoded,
    })
}

/// Check the block-sparsity contract on a trace: no two spikes from the
/// same block closer than the refractory period.
pub fn audit_block_sparsity(
    events: &[(f64, u32)],
    l: usize,
    num_blocks: usize,
    tau_ref: f64,
) -> Result<(), String> {
    let mut last_spike = vec![f64::NEG_INFINITY; num_blocks];
    for &(t, neuron) in events {
        let block = neuron as usize / l;
        let gap = t - last_spike[block];
        // same-step double spikes or sub-refractory gaps violate the WTA
        if gap < tau_ref - 1e-9 {
            return Err(format!(
                "block {block} spiked twice within {gap:.3} ms at t = {t:.3}"
            ));
        }
        last_spike[block] = t;
    }
    Ok(())
}

/// Convenience wrapper: build the engine and run one schedule.
pub fn run_snn(
    params: SimParams,
    w: &WeightMatrix,
    cb: &EmbeddingCodebook,
    dfa: &Dfa,
    schedule: &InputSchedule,
) -> Result<SpikeTrace, SnnError> {
    SnnEngine::new(params, w)?.run(dfa, cb, schedule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Segment;
    use crate::weights::Provenance;
    use ndarray::Array2;

    fn quiet_params(n: usize, l: usize) -> SimParams {
        // no tonic drive, no kick: only explicit input moves anything
        SimParams {
            u_rest: 0.0,
            init_kick_current: 0.0,
            ..SimParams::standard(n, l)
        }
    }

    #[test]
    fn alpha_kernel_peak_from_single_spike() {
        // one presynaptic spike of weight w: the postsynaptic current
        // peaks at w·w_scale/(τ_syn·e) a time τ_syn after the spike
        let n = 2;
        let mut data = Array2::zeros((n, n));
        data[(1, 0)] = 1.0;
        let w = WeightMatrix::new(data, 1, Provenance::Ideal, 0.0);
        let mut params = quiet_params(n, 1);
        params.mean_charge = 2.0; // w_scale = 2.0/ (1/4) = 8
        params.tau_ref = 1e6;
        params.init_kick_current = 50.0;
        params.init_kick_ms = Some(1.0);
        let engine = SnnEngine::new(params.clone(), &w).unwrap();

        // drive neuron 0 to a single spike via the kick, then watch I on
        // neuron 1 — reconstruct by stepping manually through the loop
        let readout_dfa = Dfa::moddiv(2).unwrap();
        let cb = EmbeddingCodebook::generate(
            &readout_dfa,
            2,
            1,
            crate::weights::CodebookMode::Random,
            0,
        )
        .unwrap();
        let schedule = InputSchedule::new(vec![Segment {
            symbol: None,
            duration: 120.0,
        }]);
        // run the raw loop with a probe charge function
        let readout = StateReadout::new(&readout_dfa, &cb);
        let masks: Vec<BlockMask> = vec![];
        let mut i_peak: f64 = 0.0;
        let w_cols = w.to_engine_columns();
        let w_scale = engine.w_scale();
        let mut i_state = vec![0.0; n];
        let mut j_state = vec![0.0; n];
        // reimplement the two-stage filter directly as the oracle
        let trace = run_with_charge(
            &params,
            &readout,
            &masks,
            &[0],
            &schedule,
            |spikes, out| {
                out.iter_mut().for_each(|c| *c = 0.0);
                for &j in spikes {
                    for i in 0..n {
                        out[i] += w_cols[j as usize * n + i] * w_scale;
                    }
                }
            },
        )
        .unwrap();
        assert_eq!(trace.events.len(), 1, "exactly one spike expected");
        let (t_spike, neuron) = trace.events[0];
        assert_eq!(neuron, 0);
        // independent filter integration
        let dt = params.dt;
        let mut t = t_spike;
        j_state[1] += 1.0 * w_scale / params.tau_syn;
        let mut t_at_peak = t;
        for _ in 0..(3.0 * params.tau_syn / dt) as usize {
            let j_old = j_state[1];
            i_state[1] += dt / params.tau_syn * (j_old - i_state[1]);
            j_state[1] -= dt / params.tau_syn * j_old;
            t += dt;
            if i_state[1] > i_peak {
                i_peak = i_state[1];
                t_at_peak = t;
            }
        }
        let analytic = w_scale * 1.0 / (params.tau_syn * std::f64::consts::E);
        assert!(
            (i_peak - analytic).abs() / analytic < 0.01,
            "peak {i_peak} vs {analytic}"
        );
        assert!(
            (t_at_peak - t_spike - params.tau_syn).abs() < 0.5,
            "peak at {t_at_peak}, spike at {t_spike}"
        );
    }

    #[test]
    fn masked_neurons_never_spike() {
        // tonic drive pushes everyone to threshold, but the masked block
        // stays silent for the whole mask duration
        let n = 8;
        let l = 4;
        let params = SimParams::standard(n, l);
        let dfa = Dfa::parse_text(
            "states: q0\ninputs: a\ninitial: q0\naccepting:\nmissing: self-loop\n",
        )
        .unwrap();
        let cb = EmbeddingCodebook::generate(&dfa, n, l, crate::weights::CodebookMode::Random, 3)
            .unwrap();
        let readout = StateReadout::new(&dfa, &cb);
        // mask that switches block 0 off
        let masks = vec![BlockMask::from_on(vec![false, true])];
        let schedule = InputSchedule::new(vec![
            Segment {
                symbol: None,
                duration: 50.0,
            },
            Segment {
                symbol: Some(0),
                duration: 200.0,
            },
        ]);
        let trace = run_with_charge(&params, &readout, &masks, &[], &schedule, |_, out| {
            out.iter_mut().for_each(|c| *c = 0.0);
        })
        .unwrap();
        let mask_start = 50.0;
        for &(t, neuron) in &trace.events {
            if t > mask_start + params.dt {
                assert!(neuron >= 4, "masked neuron {neuron} spiked at {t}");
            }
        }
        // the unmasked block does keep spiking
        assert!(trace.events.iter().any(|&(t, n)| t > mask_start && n >= 4));
    }

    #[test]
    fn block_wta_tie_resolves_to_lowest_index_deterministically() {
        let n = 4;
        let l = 4;
        let params = SimParams::standard(n, l); // tonic drive, no inputs
        let dfa = Dfa::parse_text(
            "states: q0\ninputs: a\ninitial: q0\naccepting:\nmissing: self-loop\n",
        )
        .unwrap();
        let cb = EmbeddingCodebook::generate(&dfa, n, l, crate::weights::CodebookMode::Random, 4)
            .unwrap();
        let readout = StateReadout::new(&dfa, &cb);
        let schedule = InputSchedule::new(vec![Segment {
            symbol: None,
            duration: 300.0,
        }]);
        let run = || {
            run_with_charge(&params, &readout, &[], &[], &schedule, |_, out| {
                out.iter_mut().for_each(|c| *c = 0.0);
            })
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.events, b.events, "reruns must be identical");
        // all four neurons drift identically; the tie goes to neuron 0
        assert!(!a.events.is_empty());
        assert!(a.events.iter().all(|&(_, n)| n == 0));
        audit_block_sparsity(&a.events, l, 1, params.tau_ref).unwrap();
    }

    #[test]
    fn zero_spikes_zero_rates() {
        let n = 8;
        let l = 4;
        let mut data = Array2::zeros((n, n));
        data[(4, 0)] = 1.0;
        let w = WeightMatrix::new(data, l, Provenance::Ideal, 0.25);
        let params = quiet_params(n, l);
        let dfa = Dfa::parse_text(
            "states: q0\ninputs: a\ninitial: q0\naccepting:\nmissing: self-loop\n",
        )
        .unwrap();
        let cb = EmbeddingCodebook::generate(&dfa, n, l, crate::weights::CodebookMode::Random, 5)
            .unwrap();
        let engine = SnnEngine::new(params, &w).unwrap();
        let schedule = InputSchedule::new(vec![Segment {
            symbol: None,
            duration: 100.0,
        }]);
        let trace = engine.run(&dfa, &cb, &schedule).unwrap();
        assert!(trace.events.is_empty());
        assert!(trace
            .rates
            .iter()
            .all(|series| series.iter().all(|&r| r == 0.0)));
        assert_eq!(trace.final_state(), None);
    }
}
