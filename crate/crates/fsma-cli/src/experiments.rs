//! Experiment runners: each consumes a validated config, runs the
//! relevant engines, and writes CSV/JSON/SVG artifacts plus a manifest
//! into the output directory.

use anyhow::{bail, Context, Result};
use fsma_core::crossbar::{program, read_mvm, CrossbarConfig};
use fsma_core::dfa::{random_pattern, regex_match, regex_to_dfa, Dfa};
use fsma_core::rng::substream;
use fsma_core::rnn::{
    capacity_summary, capacity_sweep, decode_state, fit_scaling, run_walk, RnnEngine,
    WalkParams, WeightMode,
};
use fsma_core::schedule::InputSchedule;
use fsma_core::snn::{run_snn, run_with_charge, SimParams, SpikeTrace, StateReadout};
use fsma_core::vsa::analogy::{run_analogy_case, AnalogyCase};
use fsma_core::vsa::BlockMask;
use fsma_core::rnn::energy_descent_check;
use fsma_core::weights::{
    build_weights_with, quantize_ternary, snr_monte_carlo, BridgeInputs, CodebookMode,
    DriveCondition, EmbeddingCodebook, TransformPipeline, WeightMatrix,
};
use rand::Rng;
use serde_json::json;
use std::path::Path;

use crate::config::*;
use crate::output;
use crate::plot;

/// Dispatch a validated config; artifacts land in `out`.
pub fn run(config: &ExperimentConfig, out: &Path, bit_exact: bool) -> Result<serde_json::Value> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    Manifest::new(config, bit_exact)?.write(out)?;
    match config {
        ExperimentConfig::WalkSnn(c) => walk_snn(c, out),
        ExperimentConfig::WalkRnn(c) => walk_rnn(c, out),
        ExperimentConfig::Capacity(c) => capacity(c, out),
        ExperimentConfig::Crossbar(c) => crossbar(c, out),
        ExperimentConfig::Analogy(c) => analogy(c, out),
        ExperimentConfig::SnrCheck(c) => snr_check(c, out),
        ExperimentConfig::EnergyCheck(c) => energy_check(c, out),
        ExperimentConfig::Regex(c) => regex(c, out),
    }
}

/// Bridge-input policy paired with each codebook mode: random codebooks
/// use the conservative all-symbols sum; small orthogonal codebooks bind
/// each bridge only to its incoming inputs (the ternary clip otherwise
/// collapses coinciding bound terms).
fn bridge_policy(mode: CodebookMode) -> BridgeInputs {
    match mode {
        CodebookMode::Random => BridgeInputs::AllSymbols,
        CodebookMode::Orthogonal => BridgeInputs::IncomingOnly,
    }
}

pub fn build_transformed(
    dfa: &Dfa,
    n: usize,
    l: usize,
    mode: CodebookMode,
    transform: &TransformPipeline,
    seed: u64,
) -> Result<(EmbeddingCodebook, WeightMatrix)> {
    let cb = EmbeddingCodebook::generate(dfa, n, l, mode, seed)?;
    let ideal = build_weights_with(dfa, &cb, bridge_policy(mode))?;
    let mut rng = substream(seed, "weights");
    let w = transform.apply(&ideal, &mut rng)?;
    Ok((cb, w))
}

fn make_schedule(config: &ScheduleConfig, word: &[usize], seed: u64) -> InputSchedule {
    match *config {
        ScheduleConfig::Regular { settle, on, off } => {
            InputSchedule::regular(word, settle, on, off)
        }
        ScheduleConfig::Irregular { settle, lo, hi } => {
            let mut rng = substream(seed, "schedule");
            InputSchedule::irregular(word, settle, lo, hi, &mut rng)
        }
    }
}

fn walk_summary(trace: &SpikeTrace, dfa: &Dfa, word: &[usize]) -> serde_json::Value {
    let expected = dfa.walk(word);
    let decoded = trace.final_state();
    json!({
        "final_state": decoded.map(|s| dfa.state_name(s).to_string()),
        "expected": dfa.state_name(expected),
        "success": decoded == Some(expected),
        "spikes": trace.events.len(),
    })
}

fn walk_snn(config: &WalkSnnConfig, out: &Path) -> Result<serde_json::Value> {
    let dfa = config.dfa.load()?;
    let word = dfa.parse_word(&config.word)?;
    let (cb, w) = build_transformed(
        &dfa,
        config.n,
        config.l,
        config.codebook,
        &config.transform,
        config.seed,
    )?;
    let mut params = SimParams::standard(config.n, config.l);
    if let Some(dt) = config.dt {
        params.dt = dt;
    }
    if let Some(charge) = config.mean_charge {
        params.mean_charge = charge;
    }
    let schedule = make_schedule(&config.schedule, &word, config.seed);
    let trace = run_snn(params, &w, &cb, &dfa, &schedule)?;
    output::write_spike_csv(out, &trace)?;
    output::write_rates_csv(out, &trace)?;
    let names: Vec<String> = dfa.states().to_vec();
    output::write_json(out, "decoded_walk.json", &output::decoded_walk_json(&trace, &names))?;
    plot::spike_raster(out, &trace, 64)?;
    plot::rate_traces(out, &trace)?;
    Ok(walk_summary(&trace, &dfa, &word))
}

fn walk_rnn(config: &WalkRnnConfig, out: &Path) -> Result<serde_json::Value> {
    let dfa = config.dfa.load()?;
    let word = dfa.parse_word(&config.word)?;
    let (cb, w) = build_transformed(
        &dfa,
        config.n,
        config.l,
        config.codebook,
        &config.transform,
        config.seed,
    )?;
    let engine = RnnEngine::new(&w);
    let params = WalkParams {
        settle_steps: 10,
        on_steps: config.on_steps,
        off_steps: config.off_steps,
    };
    let result = run_walk(&engine, &cb, &dfa, &word, params)?;
    let mut writer = csv::Writer::from_path(out.join("trace.csv"))?;
    writer.write_record(["step", "decoded_state", "active_blocks"])?;
    for (step, z) in result.trace.iter().enumerate() {
        let state = decode_state(z, cb.state_vecs());
        writer.write_record(&[
            step.to_string(),
            dfa.state_name(state).to_string(),
            z.popcount().to_string(),
        ])?;
    }
    writer.flush()?;
    let summary = json!({
        "final_state": dfa.state_name(result.decoded),
        "expected": dfa.state_name(result.expected),
        "success": result.success,
        "steps": result.trace.len(),
    });
    output::write_json(out, "walk.json", &summary)?;
    Ok(summary)
}

fn capacity(config: &fsma_core::rnn::CapacityConfig, out: &Path) -> Result<serde_json::Value> {
    let cells = capacity_sweep(config);
    let mut writer = csv::Writer::from_path(out.join("cells.csv"))?;
    writer.write_record(["n", "l", "p", "weight_mode", "trial", "seed", "success"])?;
    for cell in &cells {
        writer.write_record(&[
            cell.n.to_string(),
            cell.l.to_string(),
            cell.p.to_string(),
            cell.mode.as_str().to_string(),
            cell.trial.to_string(),
            cell.seed.to_string(),
            format!("{}", cell.success),
        ])?;
    }
    writer.flush()?;

    let summary = capacity_summary(&cells, 0.9);
    let mut writer = csv::Writer::from_path(out.join("summary.csv"))?;
    writer.write_record(["n", "p_max_ideal", "p_max_binary", "ratio"])?;
    for row in &summary {
        writer.write_record(&[
            row.n.to_string(),
            row.p_max_ideal.to_string(),
            row.p_max_binary.to_string(),
            row.ratio.map(|r| format!("{r}")).unwrap_or_default(),
        ])?;
    }
    writer.flush()?;

    let ideal_fit = fit_scaling(&summary, WeightMode::Ideal);
    let binary_fit = fit_scaling(&summary, WeightMode::Binary);
    let fits = json!({
        "ideal": {"slope": ideal_fit.slope, "intercept": ideal_fit.intercept, "r_squared": ideal_fit.r_squared},
        "binary": {"slope": binary_fit.slope, "intercept": binary_fit.intercept, "r_squared": binary_fit.r_squared},
    });
    output::write_json(out, "fit.json", &fits)?;
    plot::capacity_scatter(out, &cells, &summary, WeightMode::Ideal)?;
    plot::capacity_scatter(out, &cells, &summary, WeightMode::Binary)?;
    Ok(json!({
        "rows": summary.len(),
        "fits": fits,
        "summary": summary.iter().map(|r| json!({
            "n": r.n, "p_max_ideal": r.p_max_ideal, "p_max_binary": r.p_max_binary,
            "ratio": r.ratio,
        })).collect::<Vec<_>>(),
    }))
}

fn crossbar(config: &CrossbarExpConfig, out: &Path) -> Result<serde_json::Value> {
    let dfa = config.dfa.load()?;
    let word = dfa.parse_word(&config.word)?;
    let xbar_cfg = config.crossbar.clone().unwrap_or_else(CrossbarConfig::standard);
    let n = xbar_cfg.logical_n();
    let l = 8;
    let cb = EmbeddingCodebook::generate(&dfa, n, l, CodebookMode::Orthogonal, config.seed)?;
    let ideal = build_weights_with(&dfa, &cb, BridgeInputs::IncomingOnly)?;
    let std = ideal.std();
    let ternary = quantize_ternary(&ideal, -0.5 * std, 0.5 * std)?;
    let mut rng = substream(config.seed, "crossbar");
    let xbar = program(&xbar_cfg, &ternary, &mut rng)?;

    // conductance dump: target vs realised per device
    let mut writer = csv::Writer::from_path(out.join("devices.csv"))?;
    writer.write_record(["row", "col", "target", "conductance", "fault"])?;
    for ((r, c), &target) in xbar.targets().indexed_iter() {
        writer.write_record(&[
            r.to_string(),
            c.to_string(),
            format!("{target}"),
            format!("{}", xbar.conductances()[(r, c)]),
            xbar.fault_map()[(r, c)].to_string(),
        ])?;
    }
    writer.flush()?;

    // closed loop with a recording read pathway
    let mut params = SimParams::standard(n, l);
    params.mean_charge = config.mean_charge;
    let schedule = make_schedule(&config.schedule, &word, config.seed);
    let current_scale = params.mean_charge / xbar.source_mean_abs();
    let readout = StateReadout::new(&dfa, &cb);
    let masks: Vec<BlockMask> = cb.input_vecs().iter().map(|s| s.to_mask()).collect();
    let initial = cb.state_vec(dfa.initial()).active_components();
    let mut reads: Vec<(f64, Vec<f64>)> = Vec::new();
    let dt = params.dt;
    let mut step = 0u64;
    let mut spike_bits = vec![false; n];
    let trace = run_with_charge(
        &params,
        &readout,
        &masks,
        &initial,
        &schedule,
        |spikes, charge| {
            step += 1;
            spike_bits.iter_mut().for_each(|b| *b = false);
            for &j in spikes {
                spike_bits[j as usize] = true;
            }
            let read = read_mvm(&xbar, &spike_bits, &mut rng).expect("validated length");
            // thin the dump: every 20th read keeps files reasonable
            if step % 20 == 0 {
                reads.push((step as f64 * dt, read.currents.clone()));
            }
            for (c, current) in charge.iter_mut().zip(&read.currents) {
                *c = current * current_scale;
            }
        },
    )?;

    let mut writer = csv::Writer::from_path(out.join("reads.csv"))?;
    writer.write_record(["t_ms", "line", "current"])?;
    for (t, currents) in &reads {
        for (line, current) in currents.iter().enumerate() {
            writer.write_record(&[format!("{t}"), line.to_string(), format!("{current}")])?;
        }
    }
    writer.flush()?;

    output::write_spike_csv(out, &trace)?;
    output::write_rates_csv(out, &trace)?;
    let names: Vec<String> = dfa.states().to_vec();
    output::write_json(out, "decoded_walk.json", &output::decoded_walk_json(&trace, &names))?;
    plot::spike_raster(out, &trace, n)?;
    plot::rate_traces(out, &trace)?;
    Ok(walk_summary(&trace, &dfa, &word))
}

fn analogy(config: &AnalogyConfig, out: &Path) -> Result<serde_json::Value> {
    let cases = [
        AnalogyCase::AllPsbc,
        AnalogyCase::RolesSbcFillersBmap,
        AnalogyCase::RolesBmapFillersSbc,
    ];
    let mut writer = csv::Writer::from_path(out.join("analogy.csv"))?;
    writer.write_record([
        "case",
        "trials",
        "wins",
        "winner_overlap_mean",
        "distractor_overlap_mean",
    ])?;
    let mut rows = Vec::new();
    for case in cases {
        let report = run_analogy_case(case, config.n, config.l, config.trials, config.seed)?;
        writer.write_record(&[
            format!("{case:?}"),
            report.trials.to_string(),
            report.wins.to_string(),
            format!("{}", report.winner_overlap_mean),
            format!("{}", report.distractor_overlap_mean),
        ])?;
        rows.push(json!({
            "case": format!("{case:?}"),
            "wins": report.wins,
            "trials": report.trials,
            "winner_overlap_mean": report.winner_overlap_mean,
            "distractor_overlap_mean": report.distractor_overlap_mean,
        }));
    }
    writer.flush()?;
    Ok(json!({ "cases": rows }))
}

fn snr_check(config: &SnrConfig, out: &Path) -> Result<serde_json::Value> {
    let dfa = Dfa::moddiv(config.modulus)?;
    let mut rows = Vec::new();
    for condition in [DriveCondition::AtState, DriveCondition::AtStateMasked] {
        let report = snr_monte_carlo(
            &dfa,
            config.n,
            config.l,
            condition,
            config.draws,
            config.seed,
        )?;
        rows.push(json!({
            "condition": format!("{condition:?}"),
            "predicted_gap": report.predicted.signal_gap,
            "measured_gap": report.measured_gap,
            "predicted_std": report.predicted.noise_std,
            "measured_std": report.measured_std,
            "draws": report.draws,
        }));
    }
    let summary = json!({ "conditions": rows });
    output::write_json(out, "snr.json", &summary)?;
    Ok(summary)
}

fn energy_check(config: &EnergyConfig, out: &Path) -> Result<serde_json::Value> {
    let report = energy_descent_check(
        config.n,
        config.l,
        config.patterns,
        config.starts,
        config.max_sweeps,
        config.seed,
    );
    let summary = json!({
        "runs": report.runs,
        "total_updates": report.total_updates,
        "increase_violations": report.increase_violations,
        "max_increase": report.max_increase,
        "reached_fixed_point": report.reached_fixed_point,
    });
    output::write_json(out, "energy.json", &summary)?;
    if report.increase_violations > 0 {
        bail!("energy increased on {} updates", report.increase_violations);
    }
    Ok(summary)
}

fn regex(config: &RegexConfig, out: &Path) -> Result<serde_json::Value> {
    let alphabet: Vec<char> = config.alphabet.chars().collect();
    let patterns: Vec<String> = if config.patterns.is_empty() {
        let mut rng = substream(config.seed, "regex");
        (0..config.random_patterns)
            .map(|_| random_pattern(&mut rng, &alphabet, 4))
            .collect()
    } else {
        config.patterns.clone()
    };

    let mut writer = csv::Writer::from_path(out.join("regex.csv"))?;
    writer.write_record(["pattern", "states", "agreement", "words_checked", "network_ok"])?;
    let mut all_agree = true;
    let mut rows = Vec::new();
    for (idx, pattern) in patterns.iter().enumerate() {
        let dfa = regex_to_dfa(pattern, &alphabet)?;
        std::fs::write(out.join(format!("dfa_{idx}.txt")), dfa.to_text())?;
        let mut agree = true;
        let mut words_checked = 0usize;
        let mut stack: Vec<String> = vec![String::new()];
        while let Some(word) = stack.pop() {
            let symbols: Vec<usize> = word
                .chars()
                .map(|c| dfa.input_index(&c.to_string()).unwrap())
                .collect();
            let by_dfa = dfa.is_accepting(dfa.walk(&symbols));
            let by_matcher = regex_match(pattern, &alphabet, &word)?;
            words_checked += 1;
            if by_dfa != by_matcher {
                agree = false;
                break;
            }
            if word.chars().count() < config.max_len {
                for &c in &alphabet {
                    let mut next = word.clone();
                    next.push(c);
                    stack.push(next);
                }
            }
        }
        all_agree &= agree;

        let network_ok = if config.run_network {
            let cb = EmbeddingCodebook::generate(
                &dfa,
                config.n,
                config.l,
                CodebookMode::Random,
                config.seed,
            )?;
            let w = build_weights_with(&dfa, &cb, BridgeInputs::AllSymbols)?;
            let engine = RnnEngine::new(&w);
            let mut rng = substream(config.seed, &format!("regex-walks/{idx}"));
            let mut ok = true;
            for _ in 0..5 {
                let word: Vec<usize> = (0..6)
                    .map(|_| rng.gen_range(0..dfa.num_inputs()))
                    .collect();
                let result = run_walk(&engine, &cb, &dfa, &word, WalkParams::default())?;
                ok &= result.success;
            }
            Some(ok)
        } else {
            None
        };

        writer.write_record(&[
            pattern.clone(),
            dfa.num_states().to_string(),
            agree.to_string(),
            words_checked.to_string(),
            network_ok.map(|b| b.to_string()).unwrap_or_default(),
        ])?;
        rows.push(json!({
            "pattern": pattern,
            "states": dfa.num_states(),
            "agreement": agree,
            "network_ok": network_ok,
        }));
    }
    writer.flush()?;
    if !all_agree {
        bail!("compiled machine disagreed with the reference matcher");
    }
    Ok(json!({ "patterns": rows }))
}
