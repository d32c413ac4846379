//! Plot-ready tables. CSV output starts with `# key=value` comment lines
//! holding the effective configuration, followed by a header row and data
//! rows in a fixed column order. JSON output carries the same data as one
//! object with a `config` map and arrays of row objects.

use std::io::Write;

use camspmv::dse::{
    area_estimate, bandwidth_sweep, Baseline, MemoryStyle, BASELINES,
};
use camspmv::config::required_index_bits;
use camspmv::{AcceleratorConfig, CsrMatrix, ModelConfig};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{HarnessError, Result};
use crate::experiment::ReportRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfoRow {
    pub matrix: String,
    pub n_rows: usize,
    pub n_cols: usize,
    pub nnz: usize,
    pub max_nzr: usize,
    pub mean_nzr: f64,
    pub required_w: u32,
}

impl InfoRow {
    pub fn new(id: String, m: &CsrMatrix) -> Self {
        let (max_nzr, mean_nzr) = m.row_stats();
        InfoRow {
            matrix: id,
            n_rows: m.n_rows(),
            n_cols: m.n_cols(),
            nnz: m.nnz(),
            max_nzr,
            mean_nzr,
            required_w: required_index_bits(m.n_cols()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DseRow {
    pub bandwidth_gb_s: f64,
    pub bandwidth_bytes_per_s: f64,
    pub k: usize,
    pub peak_gflops: f64,
    pub peak_index_ops_per_s: f64,
    pub area_cmos_mm2: f64,
    pub area_resistive_mm2: f64,
    pub cmos_to_resistive_ratio: f64,
}

/// Sweep rows for bandwidths given in GB/s, with both area estimates at each `k`.
pub fn dse_table(bandwidths_gb_s: &[f64], cfg: &ModelConfig) -> Result<Vec<DseRow>> {
    let bws: Vec<f64> = bandwidths_gb_s.iter().map(|g| g * 1e9).collect();
    let points = bandwidth_sweep(&bws, &cfg.accel).map_err(|e| HarnessError::Usage(e.to_string()))?;
    Ok(points
        .into_iter()
        .zip(bandwidths_gb_s)
        .map(|(p, &gb)| {
            let at_k = AcceleratorConfig {
                k: p.k,
                ..cfg.accel.clone()
            };
            let cmos = area_estimate(&at_k, &cfg.tech, MemoryStyle::Cmos);
            let res = area_estimate(&at_k, &cfg.tech, MemoryStyle::Resistive);
            DseRow {
                bandwidth_gb_s: gb,
                bandwidth_bytes_per_s: p.bandwidth_bytes_per_s,
                k: p.k,
                peak_gflops: p.peak_flops_per_s / 1e9,
                peak_index_ops_per_s: p.peak_index_ops_per_s,
                area_cmos_mm2: cmos,
                area_resistive_mm2: res,
                cmos_to_resistive_ratio: cmos / res,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub statistic: &'static str,
    pub gflops: f64,
    pub index_ops_per_s: f64,
    pub utilization: f64,
    pub w_total: f64,
    pub gflops_per_w: f64,
}

fn order_stats(mut v: Vec<f64>) -> [f64; 3] {
    if v.is_empty() {
        return [0.0; 3];
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let median = if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    };
    [v[0], median, v[n - 1]]
}

/// Min, median and max of each rate column.
pub fn summarize(rows: &[ReportRow]) -> Vec<SummaryRow> {
    let col = |f: fn(&ReportRow) -> f64| order_stats(rows.iter().map(f).collect());
    let g = col(|r| r.gflops);
    let i = col(|r| r.index_ops_per_s);
    let u = col(|r| r.utilization);
    let w = col(|r| r.w_total);
    let e = col(|r| r.gflops_per_w);
    ["min", "median", "max"]
        .into_iter()
        .enumerate()
        .map(|(n, statistic)| SummaryRow {
            statistic,
            gflops: g[n],
            index_ops_per_s: i[n],
            utilization: u[n],
            w_total: w[n],
            gflops_per_w: e[n],
        })
        .collect()
}

fn csv_section<W: Write, T: Serialize>(out: &mut W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for r in rows {
        wtr.serialize(r)?;
    }
    let bytes = wtr.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
    out.write_all(&bytes)?;
    Ok(())
}

fn config_comments<W: Write>(out: &mut W, cfg: &ModelConfig) -> Result<()> {
    for (k, v) in cfg.entries() {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

fn config_json(cfg: &ModelConfig) -> Value {
    let mut m = Map::new();
    for (k, v) in cfg.entries() {
        m.insert(k.to_string(), Value::String(v));
    }
    Value::Object(m)
}

fn write_json<W: Write>(out: &mut W, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

pub fn write_info<W: Write>(out: &mut W, rows: &[InfoRow], format: Format) -> Result<()> {
    match format {
        Format::Csv => csv_section(out, rows),
        Format::Json => write_json(out, &json!({ "rows": rows })),
    }
}

pub fn write_run<W: Write>(out: &mut W, cfg: &ModelConfig, rows: &[ReportRow], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            config_comments(out, cfg)?;
            csv_section(out, rows)
        }
        Format::Json => write_json(out, &json!({ "config": config_json(cfg), "rows": rows })),
    }
}

/// Per-matrix rows, then min/median/max, then the literature baselines.
pub fn write_bench<W: Write>(out: &mut W, cfg: &ModelConfig, rows: &[ReportRow], format: Format) -> Result<()> {
    let summary = summarize(rows);
    let baselines: &[Baseline] = &BASELINES;
    match format {
        Format::Csv => {
            config_comments(out, cfg)?;
            csv_section(out, rows)?;
            writeln!(out)?;
            writeln!(out, "# summary")?;
            csv_section(out, &summary)?;
            writeln!(out)?;
            writeln!(out, "# baselines: literature values, not measured by this model")?;
            csv_section(out, baselines)
        }
        Format::Json => write_json(
            out,
            &json!({
                "config": config_json(cfg),
                "rows": rows,
                "summary": summary,
                "baselines": baselines,
            }),
        ),
    }
}

pub fn write_dse<W: Write>(out: &mut W, cfg: &ModelConfig, rows: &[DseRow], format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            config_comments(out, cfg)?;
            csv_section(out, rows)
        }
        Format::Json => write_json(out, &json!({ "config": config_json(cfg), "rows": rows })),
    }
}

pub fn write_defaults<W: Write>(out: &mut W, cfg: &ModelConfig, format: Format) -> Result<()> {
    match format {
        Format::Csv => {
            out.write_all(cfg.to_kv().as_bytes())?;
            for b in BASELINES {
                writeln!(
                    out,
                    "# baseline (literature): {} = {}..{} GFLOPs/W",
                    b.label, b.gflops_per_w_low, b.gflops_per_w_high
                )?;
            }
            Ok(())
        }
        Format::Json => write_json(out, &json!({ "config": config_json(cfg), "baselines": BASELINES })),
    }
}
