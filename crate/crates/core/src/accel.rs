//! SpMSpV / SpMSpM engine built from `k` CAM/RAM modules, `k` multipliers
//! and one accumulator.
//!
//! Timing model: the six algorithm steps (accumulator reset, fetch,
//! compare, RAM read, multiply, accumulate) are fully pipelined. A run costs
//! `pipeline_depth` fill cycles plus one cycle per inner iteration, where
//! row `j` needs `ceil(nzr_j / k)` iterations on every pass over `B`.
//! Empty rows cost nothing. Accumulator reset and the store of `C_j` are
//! hidden by the pipeline.
//!
//! Summation order, fixed so results are reproducible:
//! * the products of one iteration are added in module order `0..k`, then
//!   the running row sum is added to that iteration sum;
//! * iterations accumulate in fetch order;
//! * per-pass partial sums of `C_j` are added in pass order.

use serde::Serialize;
use thiserror::Error;

use crate::cam::{CamError, CamRamArray, EnergyTally};
use crate::config::{required_index_bits, AcceleratorConfig, ConfigError, EnergyParams};
use crate::sparse::{CooMatrix, CsrMatrix, SparseError, SparseVector};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AccelError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index width {w} cannot address a vector of length {n} (needs {required} bits)")]
    IndexWidth { w: u32, n: usize, required: u32 },
    #[error(transparent)]
    Cam(#[from] CamError),
    #[error(transparent)]
    Sparse(#[from] SparseError),
}

/// Values split by energy (or power) category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ByCategory {
    pub compare: f64,
    pub ram_read: f64,
    pub write: f64,
    pub multiply: f64,
    pub accumulate: f64,
    pub memory: f64,
}

impl ByCategory {
    pub fn total(&self) -> f64 {
        self.compare + self.ram_read + self.write + self.multiply + self.accumulate + self.memory
    }

    pub fn scaled(&self, f: f64) -> ByCategory {
        ByCategory {
            compare: self.compare * f,
            ram_read: self.ram_read * f,
            write: self.write * f,
            multiply: self.multiply * f,
            accumulate: self.accumulate * f,
            memory: self.memory * f,
        }
    }

    /// `(name, value)` pairs in report column order.
    pub fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("compare", self.compare),
            ("ram_read", self.ram_read),
            ("write", self.write),
            ("multiply", self.multiply),
            ("accumulate", self.accumulate),
            ("memory", self.memory),
        ]
    }
}

impl std::ops::AddAssign for ByCategory {
    fn add_assign(&mut self, o: Self) {
        self.compare += o.compare;
        self.ram_read += o.ram_read;
        self.write += o.write;
        self.multiply += o.multiply;
        self.accumulate += o.accumulate;
        self.memory += o.memory;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunMetrics {
    pub cycles: u64,
    /// Inner-loop iterations; one compare cycle each.
    pub inner_iterations: u64,
    /// `k·h` per compare cycle.
    pub index_match_ops: u64,
    /// Two per fetched element of `A` (multiply and accumulate).
    pub flops: u64,
    /// Elements of `A` streamed, summed over all passes.
    pub fetched_elements: u64,
    pub mem_read_bytes: u64,
    pub mem_write_bytes: u64,
    /// Passes over `B` (tiles of at most `h` entries).
    pub passes: u64,
    /// Nonzeros stored into `C`.
    pub result_nnz: u64,
    pub tally: EnergyTally,
    /// Joules by category.
    pub energy: ByCategory,
}

impl RunMetrics {
    pub fn seconds(&self, clock_hz: f64) -> f64 {
        self.cycles as f64 / clock_hz
    }

    pub fn flops_per_second(&self, clock_hz: f64) -> f64 {
        if self.cycles == 0 {
            0.0
        } else {
            self.flops as f64 / self.seconds(clock_hz)
        }
    }

    pub fn index_ops_per_second(&self, clock_hz: f64) -> f64 {
        if self.cycles == 0 {
            0.0
        } else {
            self.index_match_ops as f64 / self.seconds(clock_hz)
        }
    }

    /// Achieved FLOPs over the `2k`-per-cycle peak.
    pub fn utilization(&self, k: usize) -> f64 {
        if self.cycles == 0 {
            0.0
        } else {
            self.flops as f64 / (2.0 * k as f64 * self.cycles as f64)
        }
    }

    /// FLOPs per joule, in GFLOPs/W.
    pub fn gflops_per_watt(&self) -> f64 {
        let e = self.energy.total();
        if e > 0.0 {
            self.flops as f64 / e / 1e9
        } else {
            0.0
        }
    }
}

/// Number of passes needed to stream `nnz_b` vector entries through arrays of
/// height `h`: `ceil(nnz_b / h)`, and at least one.
pub fn plan_tiles(nnz_b: usize, h: usize) -> usize {
    assert!(h >= 1, "array height must be positive");
    nnz_b.div_ceil(h).max(1)
}

/// Value arithmetic, either native `f64` or emulated `f32`.
#[derive(Clone, Copy)]
struct Arith {
    single: bool,
}

impl Arith {
    #[inline]
    fn round(self, x: f64) -> f64 {
        // f64 has more than 2·24+2 mantissa bits, so rounding each exact-in-f64
        // f32 result once more gives the correctly rounded f32 result.
        if self.single {
            x as f32 as f64
        } else {
            x
        }
    }

    #[inline]
    fn mul(self, a: f64, b: f64) -> f64 {
        self.round(self.round(a) * b)
    }

    #[inline]
    fn add(self, a: f64, b: f64) -> f64 {
        self.round(a + b)
    }
}

/// An accelerator instance. Module state persists across runs, so endurance
/// counters accumulate over every vector ever loaded.
#[derive(Debug, Clone)]
pub struct Accelerator {
    cfg: AcceleratorConfig,
    modules: Vec<CamRamArray>,
}

impl Accelerator {
    pub fn new(cfg: AcceleratorConfig) -> Result<Self, AccelError> {
        cfg.validate()?;
        let modules = (0..cfg.k)
            .map(|_| CamRamArray::new(cfg.h, cfg.w))
            .collect::<Result<_, _>>()?;
        Ok(Accelerator { cfg, modules })
    }

    pub fn config(&self) -> &AcceleratorConfig {
        &self.cfg
    }

    pub fn modules(&self) -> &[CamRamArray] {
        &self.modules
    }

    pub fn max_write_count(&self) -> u64 {
        self.modules.iter().map(CamRamArray::max_write_count).max().unwrap_or(0)
    }

    fn tally(&self) -> EnergyTally {
        let mut t = EnergyTally::default();
        for m in &self.modules {
            t += m.energy();
        }
        t
    }

    fn check_width(&self, n: usize) -> Result<(), AccelError> {
        let required = required_index_bits(n);
        if self.cfg.w < required {
            return Err(AccelError::IndexWidth {
                w: self.cfg.w,
                n,
                required,
            });
        }
        Ok(())
    }

    /// Multiplies `A` by a sparse vector, returning `C` and the run metrics.
    pub fn spmspv(
        &mut self,
        a: &CsrMatrix,
        b: &SparseVector,
    ) -> Result<(SparseVector, RunMetrics), AccelError> {
        if a.n_cols() != b.len() {
            return Err(AccelError::DimensionMismatch(format!(
                "matrix has {} columns but vector has length {}",
                a.n_cols(),
                b.len()
            )));
        }
        self.check_width(b.len())?;
        let (partial, mut metrics) = self.stream(a, b)?;
        metrics.cycles += self.cfg.pipeline_depth;

        let entries: Vec<(usize, f64)> = partial
            .into_iter()
            .enumerate()
            .filter(|&(_, v)| v != 0.0)
            .collect();
        metrics.result_nnz = entries.len() as u64;
        let eb = self.cfg.element_bytes();
        metrics.mem_read_bytes += b.nnz() as u64 * eb;
        metrics.mem_write_bytes = metrics.result_nnz * eb;
        metrics.energy = energy_breakdown(&self.cfg.energy, &metrics);
        Ok((SparseVector::new(a.n_rows(), entries)?, metrics))
    }

    /// Streams every nonzero row of `A` against each tile of `B`. Returns the
    /// per-row sums and the metrics without pipeline fill or vector traffic.
    fn stream(
        &mut self,
        a: &CsrMatrix,
        b: &SparseVector,
    ) -> Result<(Vec<f64>, RunMetrics), AccelError> {
        let k = self.cfg.k;
        let h = self.cfg.h;
        let ar = Arith {
            single: self.cfg.single_precision,
        };
        let before = self.tally();
        let passes = plan_tiles(b.nnz(), h);
        let mut sums = vec![0.0f64; a.n_rows()];
        let mut m = RunMetrics {
            passes: passes as u64,
            ..Default::default()
        };

        for pass in 0..passes {
            let lo = (pass * h).min(b.nnz());
            let hi = ((pass + 1) * h).min(b.nnz());
            let segment: Vec<(u64, f64)> = b.entries()[lo..hi]
                .iter()
                .map(|&(i, v)| (i as u64, ar.round(v)))
                .collect();
            // Every module holds its own copy of the tile.
            for module in &mut self.modules {
                module.load_segment(&segment)?;
            }

            for (j, sum) in sums.iter_mut().enumerate() {
                let (cols, vals) = a.row(j);
                if cols.is_empty() {
                    continue;
                }
                let mut row_acc = 0.0;
                for (chunk_cols, chunk_vals) in cols.chunks(k).zip(vals.chunks(k)) {
                    let mut iter_sum: Option<f64> = None;
                    for ((module, &c), &v) in self.modules.iter_mut().zip(chunk_cols).zip(chunk_vals) {
                        let bv = module.search_and_read(c as u64);
                        let p = ar.mul(v, bv);
                        iter_sum = Some(match iter_sum {
                            None => p,
                            Some(s) => ar.add(s, p),
                        });
                    }
                    row_acc = ar.add(iter_sum.unwrap_or(0.0), row_acc);
                    m.inner_iterations += 1;
                }
                *sum = ar.add(*sum, row_acc);
            }
            m.fetched_elements += a.nnz() as u64;
        }

        let after = self.tally();
        m.tally = EnergyTally {
            compare_bit_ops: after.compare_bit_ops - before.compare_bit_ops,
            ram_reads: after.ram_reads - before.ram_reads,
            writes: after.writes - before.writes,
        };
        m.cycles = m.inner_iterations;
        m.index_match_ops = m.inner_iterations * (k as u64) * (h as u64);
        m.flops = 2 * m.fetched_elements;
        m.mem_read_bytes = m.fetched_elements * self.cfg.element_bytes();
        Ok((sums, m))
    }

    /// Multiplies two sparse matrices column by column: column `c` of the
    /// result is `A` times column `c` of `B`. The pipeline is filled once
    /// for the whole product.
    pub fn spmspm(
        &mut self,
        a: &CsrMatrix,
        b: &CsrMatrix,
    ) -> Result<(CsrMatrix, RunMetrics), AccelError> {
        if a.n_cols() != b.n_rows() {
            return Err(AccelError::DimensionMismatch(format!(
                "left operand has {} columns but right operand has {} rows",
                a.n_cols(),
                b.n_rows()
            )));
        }
        self.check_width(b.n_rows())?;
        let columns = b.transpose();
        let eb = self.cfg.element_bytes();
        let mut total = RunMetrics::default();
        let mut coo = CooMatrix::new(a.n_rows(), b.n_cols());

        for c in 0..columns.n_rows() {
            let col = columns.extract_row(c)?;
            let (sums, m) = self.stream(a, &col)?;
            for (j, v) in sums.into_iter().enumerate() {
                if v != 0.0 {
                    coo.push(j, c, v);
                }
            }
            total.inner_iterations += m.inner_iterations;
            total.cycles += m.cycles;
            total.index_match_ops += m.index_match_ops;
            total.flops += m.flops;
            total.fetched_elements += m.fetched_elements;
            total.mem_read_bytes += m.mem_read_bytes + col.nnz() as u64 * eb;
            total.passes += m.passes;
            total.tally += m.tally;
        }
        total.cycles += self.cfg.pipeline_depth;
        total.result_nnz = coo.nnz() as u64;
        total.mem_write_bytes = total.result_nnz * eb;
        total.energy = energy_breakdown(&self.cfg.energy, &total);
        let c = crate::sparse::coo_to_csr(&coo)?;
        Ok((c, total))
    }
}

/// Converts the event counts of a run into joules by category.
pub fn energy_breakdown(e: &EnergyParams, m: &RunMetrics) -> ByCategory {
    ByCategory {
        compare: m.tally.compare_bit_ops as f64 * e.e_compare_bit,
        ram_read: m.tally.ram_reads as f64 * e.e_ram_read,
        write: m.tally.writes as f64 * e.e_write,
        multiply: m.fetched_elements as f64 * e.e_mul,
        accumulate: m.fetched_elements as f64 * e.e_add,
        memory: (m.mem_read_bytes + m.mem_write_bytes) as f64 * e.e_mem_byte,
    }
}

/// Runs `A·B` on a fresh accelerator built from `cfg`.
pub fn spmspv(
    a: &CsrMatrix,
    b: &SparseVector,
    cfg: &AcceleratorConfig,
) -> Result<(SparseVector, RunMetrics), AccelError> {
    Accelerator::new(cfg.clone())?.spmspv(a, b)
}

/// Runs `A·B` for a sparse right operand on a fresh accelerator.
pub fn spmspm(
    a: &CsrMatrix,
    b: &CsrMatrix,
    cfg: &AcceleratorConfig,
) -> Result<(CsrMatrix, RunMetrics), AccelError> {
    Accelerator::new(cfg.clone())?.spmspm(a, b)
}
