//! Analytical design-space models: module count from memory bandwidth, peak
//! throughput, silicon area and power.

use serde::Serialize;
use thiserror::Error;

use crate::accel::{energy_breakdown, ByCategory, RunMetrics};
use crate::config::{element_bytes, AcceleratorConfig, TechParams};
use crate::sparse::{CsrMatrix, SparseVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DseError {
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("bandwidth range is empty")]
    EmptyRange,
}

/// Published efficiency figures used as reference rows in reports. These are
/// literature values, not measurements made by this model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Baseline {
    pub label: &'static str,
    pub gflops_per_w_low: f64,
    pub gflops_per_w_high: f64,
}

pub const BASELINES: [Baseline; 2] = [
    Baseline {
        label: "GPU SpMV (K20/GTX660, literature)",
        gflops_per_w_low: 0.1,
        gflops_per_w_high: 0.5,
    },
    Baseline {
        label: "multicore SpMV (literature)",
        gflops_per_w_low: 0.03,
        gflops_per_w_high: 0.03,
    },
];

/// Upper end of the GPU baseline range.
pub const GPU_BASELINE_GFLOPS_PER_W: f64 = 0.5;

/// Modules the memory system can feed: one (value, index) element per module
/// per cycle, `floor(bw / (clock_hz · ceil((value_bits + index_bits) / 8)))`.
pub fn modules_from_bandwidth(
    bw_bytes_per_s: f64,
    clock_hz: f64,
    value_bits: u32,
    index_bits: u32,
) -> Result<usize, DseError> {
    if !(bw_bytes_per_s > 0.0) {
        return Err(DseError::NonPositive("bandwidth"));
    }
    if !(clock_hz > 0.0) {
        return Err(DseError::NonPositive("clock frequency"));
    }
    if value_bits == 0 {
        return Err(DseError::NonPositive("value width"));
    }
    if index_bits == 0 {
        return Err(DseError::NonPositive("index width"));
    }
    let per_cycle = bw_bytes_per_s / (clock_hz * element_bytes(value_bits, index_bits) as f64);
    Ok(per_cycle.floor() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeakPerformance {
    pub flops_per_s: f64,
    pub index_ops_per_s: f64,
}

/// `2k` FLOPs and `k·h` index matches per cycle.
pub fn peak_performance(k: usize, h: usize, clock_hz: f64) -> PeakPerformance {
    PeakPerformance {
        flops_per_s: 2.0 * k as f64 * clock_hz,
        index_ops_per_s: k as f64 * h as f64 * clock_hz,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MemoryStyle {
    Cmos,
    Resistive,
}

/// Accelerator area in mm²:
/// `k·(h·w·cam_bit + h·value_bits·ram_bit + fpu) + accumulator`.
pub fn area_estimate(cfg: &AcceleratorConfig, tech: &TechParams, style: MemoryStyle) -> f64 {
    let (cam_bit, ram_bit) = match style {
        MemoryStyle::Cmos => (
            tech.cmos_cam_bit_area_um2 * 1e-6,
            tech.cmos_ram_bit_area_um2 * 1e-6,
        ),
        MemoryStyle::Resistive => (tech.cell_area_recam_mm2(), tech.cell_area_reram_mm2()),
    };
    let h = cfg.h as f64;
    let module = h * f64::from(cfg.w) * cam_bit + h * f64::from(cfg.value_bits) * ram_bit + tech.fpu_area_mm2;
    cfg.k as f64 * module + tech.accumulator_area_mm2
}

/// Average power by category over `wall_seconds`, with energy re-derived
/// from the run's event counts and `cfg`'s energy constants. A non-positive
/// duration reports zero everywhere.
pub fn power_estimate(cfg: &AcceleratorConfig, metrics: &RunMetrics, wall_seconds: f64) -> ByCategory {
    if !(wall_seconds > 0.0) {
        return ByCategory::default();
    }
    energy_breakdown(&cfg.energy, metrics).scaled(1.0 / wall_seconds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub bandwidth_bytes_per_s: f64,
    pub k: usize,
    pub peak_flops_per_s: f64,
    pub peak_index_ops_per_s: f64,
}

/// One [`SweepPoint`] per bandwidth, using the template's clock, widths and height.
pub fn bandwidth_sweep(
    bandwidths: &[f64],
    template: &AcceleratorConfig,
) -> Result<Vec<SweepPoint>, DseError> {
    if bandwidths.is_empty() {
        return Err(DseError::EmptyRange);
    }
    bandwidths
        .iter()
        .map(|&bw| {
            let k = modules_from_bandwidth(bw, template.clock_hz, template.value_bits, template.w)?;
            let peak = peak_performance(k, template.h, template.clock_hz);
            Ok(SweepPoint {
                bandwidth_bytes_per_s: bw,
                k,
                peak_flops_per_s: peak.flops_per_s,
                peak_index_ops_per_s: peak.index_ops_per_s,
            })
        })
        .collect()
}

/// Workload that keeps every module busy on every cycle: a dense vector of
/// length `h` (one pass) and `n_rows` rows of exactly `2k` entries, all of
/// which hit in the CAM.
pub fn full_utilization_workload(k: usize, h: usize, n_rows: usize) -> (CsrMatrix, SparseVector) {
    assert!(2 * k <= h, "need 2k <= h distinct columns per row");
    let per_row = 2 * k;
    let mut row_start = Vec::with_capacity(n_rows + 1);
    let mut col_idx = Vec::with_capacity(n_rows * per_row);
    let mut values = Vec::with_capacity(n_rows * per_row);
    row_start.push(0);
    for j in 0..n_rows {
        let offset = (j * 7) % (h - per_row + 1);
        for c in 0..per_row {
            col_idx.push(offset + c);
            values.push(((j + c) % 5 + 1) as f64);
        }
        row_start.push(col_idx.len());
    }
    let a = CsrMatrix::from_parts(n_rows, h, row_start, col_idx, values)
        .expect("workload is well-formed");
    let b = SparseVector::new(h, (0..h).map(|i| (i, (i % 3 + 1) as f64)).collect())
        .expect("workload is well-formed");
    (a, b)
}
