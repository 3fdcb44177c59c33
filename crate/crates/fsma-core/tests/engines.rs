//! Cross-engine integration: spiking walks against the symbolic oracle,
//! discrete/spiking agreement, crossbar closed-loop behaviour, and the
//! spiking engine's structural contracts.

use fsma_core::crossbar::{program, run_closed_loop, CrossbarConfig, FaultCol, FaultKind, FaultSpec};
use fsma_core::dfa::Dfa;
use fsma_core::rng::substream;
use fsma_core::rnn::{run_walk, RnnEngine, WalkParams};
use fsma_core::schedule::InputSchedule;
use fsma_core::snn::{audit_block_sparsity, run_snn, SimParams};
use fsma_core::weights::{
    build_weights, build_weights_with, quantize_ternary, BridgeInputs, CodebookMode,
    EmbeddingCodebook, WeightMatrix,
};

const COUNTER: &str = "\
states: q0 q1 q2 q3
inputs: s
initial: q0
accepting: q0
edge: q0 s q1
edge: q1 s q2
edge: q2 s q3
edge: q3 s q0
";

const TWO_INPUT: &str = "\
states: q0 q1 q2 q3
inputs: a b
initial: q0
accepting: q0
missing: self-loop
edge: q0 a q1
edge: q1 a q2
edge: q2 b q3
edge: q3 b q0
";

fn crossbar_machine(text: &str, seed: u64) -> (Dfa, EmbeddingCodebook, WeightMatrix) {
    let dfa = Dfa::parse_text(text).unwrap();
    let cb = EmbeddingCodebook::generate(&dfa, 64, 8, CodebookMode::Orthogonal, seed).unwrap();
    // small machines bind each bridge only to the inputs that reach it;
    // the ternary clip otherwise collapses summed ±2 entries
    let ideal = build_weights_with(&dfa, &cb, BridgeInputs::IncomingOnly).unwrap();
    let s = ideal.std();
    let ternary = quantize_ternary(&ideal, -0.5 * s, 0.5 * s).unwrap();
    (dfa, cb, ternary)
}

fn counter_ternary(seed: u64) -> (Dfa, EmbeddingCodebook, WeightMatrix) {
    crossbar_machine(COUNTER, seed)
}

fn crossbar_params() -> SimParams {
    let mut params = SimParams::standard(64, 8);
    params.mean_charge = 4.0;
    params
}

#[test]
fn snn_ideal_walk_matches_oracle_and_is_block_sparse() {
    let dfa = Dfa::moddiv(23).unwrap();
    let cb = EmbeddingCodebook::generate(&dfa, 2048, 8, CodebookMode::Random, 7).unwrap();
    let w = build_weights(&dfa, &cb).unwrap();
    let word = dfa.parse_word("10").unwrap();
    let schedule = InputSchedule::regular(&word, 200.0, 200.0, 200.0);
    let trace = run_snn(SimParams::standard(2048, 8), &w, &cb, &dfa, &schedule).unwrap();
    assert_eq!(trace.final_state(), Some(dfa.walk(&word)));
    // walk passes through the intermediate state
    let walk: Vec<usize> = trace.decoded_walk().iter().map(|&(s, _)| s).collect();
    assert_eq!(walk, vec![0, dfa.next(0, 1), dfa.walk(&word)]);
    audit_block_sparsity(&trace.events, 8, 256, trace_params_tau_ref()).unwrap();
}

fn trace_params_tau_ref() -> f64 {
    SimParams::standard(2048, 8).tau_ref
}

#[test]
fn snn_attractor_persists_without_input() {
    // no input for half a second after settling: decoded state constant
    let dfa = Dfa::moddiv(23).unwrap();
    let cb = EmbeddingCodebook::generate(&dfa, 2048, 8, CodebookMode::Random, 8).unwrap();
    let w = build_weights(&dfa, &cb).unwrap();
    let schedule = InputSchedule::new(vec![fsma_core::schedule::Segment {
        symbol: None,
        duration: 700.0,
    }]);
    let trace = run_snn(SimParams::standard(2048, 8), &w, &cb, &dfa, &schedule).unwrap();
    // rate samples from 200 ms onward must all decode to q0
    let q0 = &trace.rates[0];
    for (k, &t) in trace.rate_times.iter().enumerate() {
        if t < 200.0 {
            continue;
        }
        let nu = trace.mean_active_rate[k];
        assert!(
            q0[k] > 0.5 * nu,
            "q0 rate {} vs mean {} at t = {t}",
            q0[k],
            nu
        );
    }
}

#[test]
fn snn_invalid_input_leaves_state_unchanged() {
    // two-input machine: input `b` has no stored transition out of q0
    let dfa = Dfa::parse_text(TWO_INPUT).unwrap();
    let cb = EmbeddingCodebook::generate(&dfa, 512, 8, CodebookMode::Random, 9).unwrap();
    let w = build_weights(&dfa, &cb).unwrap();
    let b = dfa.input_index("b").unwrap();
    let schedule = InputSchedule::regular(&[b], 200.0, 200.0, 200.0);
    let trace = run_snn(SimParams::standard(512, 8), &w, &cb, &dfa, &schedule).unwrap();
    assert_eq!(trace.final_state(), Some(0));
}

#[test]
fn snn_readout_tracks_active_rate_with_residual_overlap() {
    // sitting in q0: m_q0 ≈ ν̂, and other states read ≈ ν̂/L
    let dfa = Dfa::moddiv(5).unwrap();
    let cb = EmbeddingCodebook::generate(&dfa, 1024, 8, CodebookMode::Random, 10).unwrap();
    let w = build_weights(&dfa, &cb).unwrap();
    let schedule = InputSchedule::new(vec![fsma_core::schedule::Segment {
        symbol: None,
        duration: 600.0,
    }]);
    let trace = run_snn(SimParams::standard(1024, 8), &w, &cb, &dfa, &schedule).unwrap();
    let window: Vec<usize> = trace
        .rate_times
        .iter()
        .enumerate()
        .filter(|(_, &t)| t > 300.0)
        .map(|(k, _)| k)
        .collect();
    let mean_of = |series: &[f64]| -> f64 {
        window.iter().map(|&k| series[k]).sum::<f64>() / window.len() as f64
    };
    let nu = mean_of(&trace.mean_active_rate);
    assert!(nu > 10.0, "active rate {nu} Hz");
    let m_q0 = mean_of(&trace.rates[0]);
    assert!((m_q0 - nu).abs() / nu < 0.15, "m_q0 {m_q0} vs nu {nu}");
    // off states: expected residual ν/L from random overlap
    for q in 1..5 {
        let m = mean_of(&trace.rates[q]);
        assert!(
            (m - nu / 8.0).abs() < nu * 0.1,
            "state {q}: rate {m} vs residual {}",
            nu / 8.0
        );
    }
}

#[test]
fn snn_dt_convergence_on_golden_walk() {
    // halving dt must not change any decoded state
    let dfa = Dfa::moddiv(23).unwrap();
    let cb = EmbeddingCodebook::generate(&dfa, 2048, 8, CodebookMode::Random, 11).unwrap();
    let w = build_weights(&dfa, &cb).unwrap();
    let word = dfa.parse_word("10").unwrap();
    let schedule = InputSchedule::regular(&word, 200.0, 200.0, 200.0);
    let mut walks = Vec::new();
    for dt in [0.05, 0.025] {
        let mut params = SimParams::standard(2048, 8);
        params.dt = dt;
        let trace = run_snn(params, &w, &cb, &dfa, &schedule).unwrap();
        walks.push(
            trace
                .decoded_walk()
                .iter()
                .map(|&(s, _)| s)
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(walks[0], walks[1]);
    assert_eq!(*walks[0].last().unwrap(), dfa.walk(&word));
}

#[test]
fn rnn_and_snn_agree_on_ideal_walks() {
    let dfa = Dfa::moddiv(23).unwrap();
    let cb = EmbeddingCodebook::generate(&dfa, 2048, 8, CodebookMode::Random, 12).unwrap();
    let w = build_weights(&dfa, &cb).unwrap();
    let engine = RnnEngine::new(&w);
    let word = dfa.parse_word("1000100").unwrap();
    let discrete = run_walk(&engine, &cb, &dfa, &word, WalkParams::default()).unwrap();
    assert!(discrete.success);
    assert_eq!(discrete.decoded, 22);
    let schedule = InputSchedule::regular(&word, 200.0, 200.0, 200.0);
    let trace = run_snn(SimParams::standard(2048, 8), &w, &cb, &dfa, &schedule).unwrap();
    assert_eq!(trace.final_state(), Some(22));
}

// ── crossbar closed loop ─────────────────────────────────────────────

#[test]
fn closed_loop_counter_walk_with_default_noise() {
    let (dfa, cb, ternary) = counter_ternary(0);
    let s = dfa.input_index("s").unwrap();
    let word = vec![s; 4];
    let mut rng = substream(100, "xbar");
    let xbar = program(&CrossbarConfig::standard(), &ternary, &mut rng).unwrap();
    let schedule = InputSchedule::regular(&word, 200.0, 200.0, 200.0);
    let trace =
        run_closed_loop(&crossbar_params(), &xbar, &cb, &dfa, &schedule, &mut rng).unwrap();
    let walk: Vec<usize> = trace.decoded_walk().iter().map(|&(s, _)| s).collect();
    assert_eq!(walk, vec![0, 1, 2, 3, 0], "full counter cycle");
}

#[test]
fn closed_loop_two_input_walk() {
    let (dfa, cb, ternary) = crossbar_machine(TWO_INPUT, 0);
    let word = dfa.parse_word("aabb").unwrap();
    let mut rng = substream(101, "xbar");
    let xbar = program(&CrossbarConfig::standard(), &ternary, &mut rng).unwrap();
    let schedule = InputSchedule::regular(&word, 200.0, 200.0, 200.0);
    let trace =
        run_closed_loop(&crossbar_params(), &xbar, &cb, &dfa, &schedule, &mut rng).unwrap();
    let walk: Vec<usize> = trace.decoded_walk().iter().map(|&(s, _)| s).collect();
    assert_eq!(walk, vec![0, 1, 2, 3, 0]);
}

#[test]
fn closed_loop_zero_noise_equals_in_memory_exactly() {
    let (dfa, cb, ternary) = counter_ternary(1);
    let s = dfa.input_index("s").unwrap();
    let word = vec![s; 4];
    let schedule = InputSchedule::regular(&word, 200.0, 200.0, 200.0);
    let params = crossbar_params();

    let reference = run_snn(params.clone(), &ternary, &cb, &dfa, &schedule).unwrap();
    let mut rng = substream(102, "xbar");
    let xbar = program(&CrossbarConfig::noiseless(), &ternary, &mut rng).unwrap();
    let trace = run_closed_loop(&params, &xbar, &cb, &dfa, &schedule, &mut rng).unwrap();

    assert_eq!(trace.events, reference.events, "spike-for-spike equality");
    assert_eq!(
        trace.decoded_walk(),
        reference.decoded_walk()
    );
    assert_eq!(reference.final_state(), Some(0));
}

#[test]
fn closed_loop_survives_stuck_row() {
    let (dfa, cb, ternary) = counter_ternary(2);
    let s = dfa.input_index("s").unwrap();
    let word = vec![s; 4];
    // one presynaptic neuron's 64 devices stuck low (grid row 13 carries
    // the bridge-pattern units of blocks 1 and 5)
    let mut cfg = CrossbarConfig::standard();
    for c in 0..64 {
        cfg.faults.push(FaultSpec {
            row: 13,
            col: FaultCol::One(c),
            kind: FaultKind::StuckLow,
        });
    }
    let mut rng = substream(103, "xbar");
    let xbar = program(&cfg, &ternary, &mut rng).unwrap();
    let schedule = InputSchedule::regular(&word, 200.0, 200.0, 200.0);
    let trace =
        run_closed_loop(&crossbar_params(), &xbar, &cb, &dfa, &schedule, &mut rng).unwrap();
    let walk: Vec<usize> = trace.decoded_walk().iter().map(|&(s, _)| s).collect();
    assert_eq!(walk, vec![0, 1, 2, 3, 0]);
}

#[test]
fn closed_loop_noise_degradation_is_monotonic() {
    // success over seeds must not improve as read noise grows
    let (dfa, cb, ternary) = counter_ternary(3);
    let s = dfa.input_index("s").unwrap();
    let word = vec![s; 4];
    let expected = vec![0usize, 1, 2, 3, 0];
    let mut rates = Vec::new();
    for read_std in [0.0, 0.05, 0.1, 0.2] {
        let mut cfg = CrossbarConfig::standard();
        cfg.read_std = read_std;
        let mut ok = 0;
        let seeds = 20;
        for seed in 0..seeds {
            let mut rng = substream(200 + seed, "xbar-noise");
            let xbar = program(&cfg, &ternary, &mut rng).unwrap();
            let schedule = InputSchedule::regular(&word, 200.0, 200.0, 200.0);
            let trace =
                run_closed_loop(&crossbar_params(), &xbar, &cb, &dfa, &schedule, &mut rng)
                    .unwrap();
            let walk: Vec<usize> = trace.decoded_walk().iter().map(|&(s, _)| s).collect();
            if walk == expected {
                ok += 1;
            }
        }
        rates.push(ok);
    }
    // programming noise stays on, so the baseline need not be perfect;
    // allow two seeds of slack between adjacent read-noise levels
    for pair in rates.windows(2) {
        assert!(
            pair[1] <= pair[0] + 2,
            "success counts not non-increasing: {rates:?}"
        );
    }
    assert!(
        rates[0] >= 18 && *rates.last().unwrap() < rates[0],
        "degradation not visible: {rates:?}"
    );
}
