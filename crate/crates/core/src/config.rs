//! Accelerator, energy and technology parameters, plus the `key=value`
//! configuration file that overrides them.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("invalid value for '{key}': {msg}")]
    Value { key: String, msg: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Energy per event, in joules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyParams {
    /// Per logical CAM bit taking part in a compare.
    pub e_compare_bit: f64,
    /// Per RAM word read on a CAM hit.
    pub e_ram_read: f64,
    /// Per CAM/RAM row written during initialization.
    pub e_write: f64,
    pub e_mul: f64,
    pub e_add: f64,
    /// Per byte moved across the accelerator's memory interface.
    pub e_mem_byte: f64,
}

impl Default for EnergyParams {
    fn default() -> Self {
        EnergyParams {
            e_compare_bit: 0.1e-15,
            e_ram_read: 0.5e-12,
            e_write: 1.0e-12,
            e_mul: 3.0e-12,
            e_add: 1.0e-12,
            // Accelerator-side interface only; DRAM device energy is outside the model.
            e_mem_byte: 0.1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceleratorConfig {
    /// Number of acceleration modules.
    pub k: usize,
    /// CAM/RAM array height.
    pub h: usize,
    /// CAM index width in bits.
    pub w: u32,
    /// Word length of a stored value, used by the bandwidth and area models.
    pub value_bits: u32,
    pub clock_hz: f64,
    pub pipeline_depth: u64,
    pub memory_bw_bytes_per_s: f64,
    /// Round values and arithmetic to `f32`.
    pub single_precision: bool,
    pub energy: EnergyParams,
}

impl Default for AcceleratorConfig {
    fn default() -> Self {
        AcceleratorConfig {
            k: 15,
            h: 512,
            w: 32,
            value_bits: 32,
            clock_hz: 2.0e9,
            pipeline_depth: 6,
            memory_bw_bytes_per_s: 250.0e9,
            single_precision: false,
            energy: EnergyParams::default(),
        }
    }
}

impl AcceleratorConfig {
    pub fn with_geometry(k: usize, h: usize) -> Self {
        AcceleratorConfig {
            k,
            h,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.k < 1 {
            return bad("k must be at least 1");
        }
        if self.h < 1 {
            return bad("h must be at least 1");
        }
        if !(1..=64).contains(&self.w) {
            return bad("w must lie in 1..=64");
        }
        if self.value_bits < 1 {
            return bad("value_bits must be at least 1");
        }
        if self.pipeline_depth < 1 {
            return bad("pipeline_depth must be at least 1");
        }
        if !(self.clock_hz.is_finite() && self.clock_hz > 0.0) {
            return bad("clock_hz must be positive");
        }
        if !(self.memory_bw_bytes_per_s.is_finite() && self.memory_bw_bytes_per_s > 0.0) {
            return bad("memory bandwidth must be positive");
        }
        let e = &self.energy;
        let all = [
            e.e_compare_bit,
            e.e_ram_read,
            e.e_write,
            e.e_mul,
            e.e_add,
            e.e_mem_byte,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return bad("energy constants must be finite and non-negative");
        }
        Ok(())
    }

    /// Bytes per (value, index) element: `ceil((value_bits + w) / 8)`.
    pub fn element_bytes(&self) -> u64 {
        element_bytes(self.value_bits, self.w)
    }
}

pub fn element_bytes(value_bits: u32, index_bits: u32) -> u64 {
    (u64::from(value_bits) + u64::from(index_bits)).div_ceil(8)
}

/// Smallest index width able to address a vector of length `n`: `ceil(log2(max(n, 2)))`.
pub fn required_index_bits(n: usize) -> u32 {
    let n = n.max(2) as u64;
    64 - (n - 1).leading_zeros()
}

/// Technology constants for the area model.
///
/// The CMOS per-bit areas and the FPU area are calibration constants: the
/// defaults put a k=15, h=2^20, w=32 design at about 90 mm² in 22 nm. How
/// that total splits between CAM, RAM and arithmetic is a modeling choice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TechParams {
    pub feature_nm: f64,
    /// Vertically integrated memristor layers under one resistive CAM cell.
    pub recam_layers: u32,
    pub cmos_cam_bit_area_um2: f64,
    pub cmos_ram_bit_area_um2: f64,
    pub fpu_area_mm2: f64,
    pub accumulator_area_mm2: f64,
}

impl Default for TechParams {
    fn default() -> Self {
        TechParams {
            feature_nm: 22.0,
            recam_layers: 1,
            cmos_cam_bit_area_um2: 0.12,
            cmos_ram_bit_area_um2: 0.06,
            fpu_area_mm2: 0.01,
            accumulator_area_mm2: 0.01,
        }
    }
}

impl TechParams {
    fn f_squared_mm2(&self) -> f64 {
        let f_mm = self.feature_nm * 1e-6;
        f_mm * f_mm
    }

    /// Resistive CAM bitcell: 8F²/l.
    pub fn cell_area_recam_mm2(&self) -> f64 {
        8.0 * self.f_squared_mm2() / f64::from(self.recam_layers)
    }

    /// Resistive RAM bitcell: 4F².
    pub fn cell_area_reram_mm2(&self) -> f64 {
        4.0 * self.f_squared_mm2()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let areas = [
            self.feature_nm,
            self.cmos_cam_bit_area_um2,
            self.cmos_ram_bit_area_um2,
            self.fpu_area_mm2,
            self.accumulator_area_mm2,
        ];
        if areas.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.recam_layers == 0 {
            return Err(ConfigError::Invalid(
                "technology areas and layer count must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Everything a run depends on, as read from CLI flags and config files.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ModelConfig {
    pub accel: AcceleratorConfig,
    pub tech: TechParams,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError::Value {
        key: key.to_string(),
        msg: format!("cannot parse '{v}'"),
    })
}

impl ModelConfig {
    /// Sets one parameter by its configuration-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let a = &mut self.accel;
        let e = &mut a.energy;
        let t = &mut self.tech;
        match key {
            "k" => a.k = parse_num(key, value)?,
            "h" => a.h = parse_num(key, value)?,
            "w" => a.w = parse_num(key, value)?,
            "value_bits" => a.value_bits = parse_num(key, value)?,
            "clock_hz" => a.clock_hz = parse_num(key, value)?,
            "pipeline_depth" => a.pipeline_depth = parse_num(key, value)?,
            "memory_bw_bytes_per_s" => a.memory_bw_bytes_per_s = parse_num(key, value)?,
            "single_precision" => a.single_precision = parse_num(key, value)?,
            "e_compare_bit" => e.e_compare_bit = parse_num(key, value)?,
            "e_ram_read" => e.e_ram_read = parse_num(key, value)?,
            "e_write" => e.e_write = parse_num(key, value)?,
            "e_mul" => e.e_mul = parse_num(key, value)?,
            "e_add" => e.e_add = parse_num(key, value)?,
            "e_mem_byte" => e.e_mem_byte = parse_num(key, value)?,
            "feature_nm" => t.feature_nm = parse_num(key, value)?,
            "recam_layers" => t.recam_layers = parse_num(key, value)?,
            "cmos_cam_bit_area_um2" => t.cmos_cam_bit_area_um2 = parse_num(key, value)?,
            "cmos_ram_bit_area_um2" => t.cmos_ram_bit_area_um2 = parse_num(key, value)?,
            "fpu_area_mm2" => t.fpu_area_mm2 = parse_num(key, value)?,
            "accumulator_area_mm2" => t.accumulator_area_mm2 = parse_num(key, value)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies `key=value` lines. Blank lines and `#` comments are ignored.
    pub fn apply_kv(&mut self, text: &str) -> Result<(), ConfigError> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError::Syntax {
                    line: n + 1,
                    msg: format!("expected key=value, got '{line}'"),
                });
            };
            self.set(key.trim(), value.trim()).map_err(|e| ConfigError::Syntax {
                line: n + 1,
                msg: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// All parameters as `(key, value)` pairs, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let a = &self.accel;
        let e = &a.energy;
        let t = &self.tech;
        vec![
            ("k", a.k.to_string()),
            ("h", a.h.to_string()),
            ("w", a.w.to_string()),
            ("value_bits", a.value_bits.to_string()),
            ("clock_hz", format!("{:e}", a.clock_hz)),
            ("pipeline_depth", a.pipeline_depth.to_string()),
            ("memory_bw_bytes_per_s", format!("{:e}", a.memory_bw_bytes_per_s)),
            ("single_precision", a.single_precision.to_string()),
            ("e_compare_bit", format!("{:e}", e.e_compare_bit)),
            ("e_ram_read", format!("{:e}", e.e_ram_read)),
            ("e_write", format!("{:e}", e.e_write)),
            ("e_mul", format!("{:e}", e.e_mul)),
            ("e_add", format!("{:e}", e.e_add)),
            ("e_mem_byte", format!("{:e}", e.e_mem_byte)),
            ("feature_nm", t.feature_nm.to_string()),
            ("recam_layers", t.recam_layers.to_string()),
            ("cmos_cam_bit_area_um2", t.cmos_cam_bit_area_um2.to_string()),
            ("cmos_ram_bit_area_um2", t.cmos_ram_bit_area_um2.to_string()),
            ("fpu_area_mm2", t.fpu_area_mm2.to_string()),
            ("accumulator_area_mm2", t.accumulator_area_mm2.to_string()),
        ]
    }

    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        for (k, v) in self.entries() {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.accel.validate()?;
        self.tech.validate()
    }
}
