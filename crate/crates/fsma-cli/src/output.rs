//! CSV and JSON artifact writers. CSVs are comma-separated UTF-8 with a
//! header row and '.' decimals; files are written once, in deterministic
//! order, so reruns from a manifest reproduce identical bytes.

use anyhow::{Context, Result};
use fsma_core::snn::SpikeTrace;
use std::path::Path;

pub fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value)?)
        .with_context(|| format!("writing {}", path.display()))
}

pub fn write_spike_csv(dir: &Path, trace: &SpikeTrace) -> Result<()> {
    let mut writer = csv::Writer::from_path(dir.join("spikes.csv"))?;
    writer.write_record(["t_ms", "neuron"])?;
    for &(t, neuron) in &trace.events {
        writer.write_record(&[format!("{t}"), neuron.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_rates_csv(dir: &Path, trace: &SpikeTrace) -> Result<()> {
    let mut writer = csv::Writer::from_path(dir.join("rates.csv"))?;
    let mut header = vec!["t_ms".to_string(), "mean_active".to_string()];
    header.extend(trace.rate_labels.iter().cloned());
    writer.write_record(&header)?;
    for (k, &t) in trace.rate_times.iter().enumerate() {
        let mut row = vec![format!("{t}"), format!("{}", trace.mean_active_rate[k])];
        for series in &trace.rates {
            row.push(format!("{}", series[k]));
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Decoded walk as `[{state, t_enter_ms}]`, using state names.
pub fn decoded_walk_json(
    trace: &SpikeTrace,
    state_names: &[String],
) -> Vec<serde_json::Value> {
    trace
        .decoded_walk()
        .iter()
        .map(|&(state, t)| {
            serde_json::json!({
                "state": state_names[state],
                "t_enter_ms": t,
            })
        })
        .collect()
}
