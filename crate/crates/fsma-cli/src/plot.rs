//! Static SVG plots: spike rasters, state-rate traces, and capacity
//! scatter plots.

use anyhow::Result;
use fsma_core::rnn::{CapacityCell, CapacitySummaryRow, WeightMode};
use fsma_core::snn::SpikeTrace;
use plotters::prelude::*;
use std::path::Path;

/// Spike raster of the first `max_neurons` neurons.
pub fn spike_raster(dir: &Path, trace: &SpikeTrace, max_neurons: usize) -> Result<()> {
    let path = dir.join("raster.svg");
    let t_end = trace
        .rate_times
        .last()
        .copied()
        .unwrap_or(1.0)
        .max(1.0);
    let root = SVGBackend::new(&path, (900, 400)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(10)
        .x_label_area_size(35)
        .y_label_area_size(45)
        .caption("spike raster", ("sans-serif", 18))
        .build_cartesian_2d(0.0..t_end, 0.0..max_neurons as f64)?;
    chart
        .configure_mesh()
        .x_desc("t (ms)")
        .y_desc("neuron")
        .draw()?;
    chart.draw_series(
        trace
            .events
            .iter()
            .filter(|&&(_, n)| (n as usize) < max_neurons)
            .map(|&(t, n)| Circle::new((t, n as f64), 1, BLACK.filled())),
    )?;
    root.present()?;
    Ok(())
}

/// Kernel-filtered rate of every readout series over time.
pub fn rate_traces(dir: &Path, trace: &SpikeTrace) -> Result<()> {
    let path = dir.join("rates.svg");
    let t_end = trace.rate_times.last().copied().unwrap_or(1.0).max(1.0);
    let max_rate = trace
        .rates
        .iter()
        .flat_map(|s| s.iter())
        .copied()
        .fold(1.0f64, f64::max);
    let root = SVGBackend::new(&path, (900, 400)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(10)
        .x_label_area_size(35)
        .y_label_area_size(45)
        .caption("state rates", ("sans-serif", 18))
        .build_cartesian_2d(0.0..t_end, 0.0..max_rate * 1.05)?;
    chart
        .configure_mesh()
        .x_desc("t (ms)")
        .y_desc("rate (Hz)")
        .draw()?;
    for (idx, series) in trace.rates.iter().enumerate() {
        let color = Palette99::pick(idx).mix(0.9);
        let is_bridge = trace.rate_labels[idx].starts_with('b');
        let points = trace.rate_times.iter().copied().zip(series.iter().copied());
        if is_bridge {
            chart.draw_series(DashedLineSeries::new(points, 4, 3, color.stroke_width(1)))?;
        } else {
            chart
                .draw_series(LineSeries::new(points, color.stroke_width(1)))?
                .label(trace.rate_labels[idx].clone());
        }
    }
    root.present()?;
    Ok(())
}

/// Success scatter against the sparse-capacity abscissa N²/(log N)².
pub fn capacity_scatter(
    dir: &Path,
    cells: &[CapacityCell],
    summary: &[CapacitySummaryRow],
    mode: WeightMode,
) -> Result<()> {
    let path = dir.join(format!("capacity_{}.svg", mode.as_str()));
    let x_of = |n: usize| {
        let n = n as f64;
        n * n / n.ln().powi(2)
    };
    let filtered: Vec<&CapacityCell> = cells.iter().filter(|c| c.mode == mode).collect();
    if filtered.is_empty() {
        return Ok(());
    }
    let x_max = filtered.iter().map(|c| x_of(c.n)).fold(0.0, f64::max) * 1.05;
    let y_max = filtered.iter().map(|c| c.p as f64).fold(0.0, f64::max) * 1.1;
    let root = SVGBackend::new(&path, (600, 450)).into_drawing_area();
    root.fill(&WHITE)?;
    let mut chart = ChartBuilder::on(&root)
        .margin(10)
        .x_label_area_size(40)
        .y_label_area_size(45)
        .caption(
            format!("capacity, {} weights", mode.as_str()),
            ("sans-serif", 18),
        )
        .build_cartesian_2d(0.0..x_max, 0.0..y_max)?;
    chart
        .configure_mesh()
        .x_desc("N² / (ln N)²")
        .y_desc("machine states P")
        .draw()?;
    chart
        .draw_series(
            filtered
                .iter()
                .filter(|c| c.success >= 0.9)
                .map(|c| Circle::new((x_of(c.n), c.p as f64), 3, GREEN.filled())),
        )?
        .label("reliable");
    chart
        .draw_series(
            filtered
                .iter()
                .filter(|c| c.success < 0.9)
                .map(|c| Cross::new((x_of(c.n), c.p as f64), 3, RED.stroke_width(1))),
        )?
        .label("failing");
    // the measured boundary
    chart.draw_series(LineSeries::new(
        summary.iter().map(|row| {
            let p = match mode {
                WeightMode::Ideal => row.p_max_ideal,
                WeightMode::Binary => row.p_max_binary,
            };
            (x_of(row.n), p as f64)
        }),
        BLUE.stroke_width(2),
    ))?;
    root.present()?;
    Ok(())
}
