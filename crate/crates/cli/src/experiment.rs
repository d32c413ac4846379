//! Experiment runner: one accelerator simulation per (matrix, repetition),
//! each checked against the brute-force oracle.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use camspmv::dse::power_estimate;
use camspmv::sparse::{gen_random_csr_with, oracle_spmspv, read_matrix_market, ValueDist};
use camspmv::{spmspv, AcceleratorConfig, CsrMatrix, ModelConfig, SparseVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{HarnessError, Result};

/// Per-element tolerance for the oracle check, relative to `1 + |expected|`.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

/// Parameters of a generated matrix: `ROWSxCOLS:DENSITY:SEED[:int]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub n_rows: usize,
    pub n_cols: usize,
    pub density: f64,
    pub seed: u64,
    pub integer: bool,
}

impl FromStr for GenSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let bad = || format!("generator spec '{s}' must look like ROWSxCOLS:DENSITY:SEED[:int]");
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let (r, c) = parts[0].split_once('x').ok_or_else(bad)?;
        let density: f64 = parts[1].parse().map_err(|_| bad())?;
        if !(0.0..=1.0).contains(&density) {
            return Err(format!("density {density} outside [0, 1]"));
        }
        let integer = match parts.get(3) {
            None => false,
            Some(&"int") => true,
            Some(_) => return Err(bad()),
        };
        Ok(GenSpec {
            n_rows: r.parse().map_err(|_| bad())?,
            n_cols: c.parse().map_err(|_| bad())?,
            density,
            seed: parts[2].parse().map_err(|_| bad())?,
            integer,
        })
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gen:{}x{}:{}:{}", self.n_rows, self.n_cols, self.density, self.seed)?;
        if self.integer {
            write!(f, ":int")?;
        }
        Ok(())
    }
}

impl GenSpec {
    pub fn generate(&self) -> CsrMatrix {
        let dist = if self.integer {
            ValueDist::SmallIntegers(9)
        } else {
            ValueDist::UniformSigned
        };
        gen_random_csr_with(self.n_rows, self.n_cols, self.density, self.seed, dist)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    File(PathBuf),
    Generated(GenSpec),
}

impl MatrixSource {
    pub fn id(&self) -> String {
        match self {
            MatrixSource::File(p) => p.display().to_string(),
            MatrixSource::Generated(g) => g.to_string(),
        }
    }

    pub fn load(&self) -> Result<CsrMatrix> {
        match self {
            MatrixSource::File(p) => load_matrix(p),
            MatrixSource::Generated(g) => Ok(g.generate()),
        }
    }
}

pub fn load_matrix(path: &Path) -> Result<CsrMatrix> {
    read_matrix_market(path).map_err(|source| HarnessError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Where the multiplicand vector comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum VectorSource {
    /// A row of the matrix itself, drawn with `seed + repetition`.
    RandomRow { seed: u64 },
    /// A Matrix Market file holding a single row or a single column.
    File(PathBuf),
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub matrices: Vec<MatrixSource>,
    pub vector: VectorSource,
    pub config: ModelConfig,
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub matrix: String,
    pub n_rows: usize,
    pub n_cols: usize,
    pub nnz: usize,
    pub vector_source: String,
    pub vector_nnz: usize,
    pub repetition: usize,
    pub k: usize,
    pub h: usize,
    pub w: u32,
    pub passes: u64,
    pub cycles: u64,
    pub seconds: f64,
    pub flops: u64,
    pub gflops: f64,
    pub index_ops_per_s: f64,
    pub utilization: f64,
    pub w_compare: f64,
    pub w_ram_read: f64,
    pub w_write: f64,
    pub w_multiply: f64,
    pub w_accumulate: f64,
    pub w_memory: f64,
    pub w_total: f64,
    pub gflops_per_w: f64,
    pub result_nnz: usize,
    pub oracle_match: bool,
}

/// Result of one simulation, kept alongside its report row.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub row: ReportRow,
    pub result: SparseVector,
}

fn vector_from_file(path: &Path) -> Result<SparseVector> {
    let m = load_matrix(path)?;
    let v = if m.n_rows() == 1 {
        m.extract_row(0)
    } else if m.n_cols() == 1 {
        m.transpose().extract_row(0)
    } else {
        return Err(HarnessError::Dimension(format!(
            "{}: a vector file must hold one row or one column, found {}x{}",
            path.display(),
            m.n_rows(),
            m.n_cols()
        )));
    };
    v.map_err(|e| HarnessError::Dimension(e.to_string()))
}

fn pick_vector(a: &CsrMatrix, source: &VectorSource, rep: usize) -> Result<(SparseVector, String)> {
    match source {
        VectorSource::RandomRow { seed } => {
            if a.n_rows() == 0 {
                return Ok((SparseVector::empty(a.n_cols()), format!("seed {seed}: no rows")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(rep as u64));
            let j = rng.random_range(0..a.n_rows());
            let v = a
                .extract_row(j)
                .map_err(|e| HarnessError::Dimension(e.to_string()))?;
            Ok((v, format!("seed {seed}: row {j}")))
        }
        VectorSource::File(p) => Ok((vector_from_file(p)?, p.display().to_string())),
    }
}

fn check_oracle(id: &str, got: &SparseVector, expected: &SparseVector) -> Result<()> {
    for j in 0..expected.len() {
        let (g, e) = (got.get(j), expected.get(j));
        if (g - e).abs() > ORACLE_TOLERANCE * (1.0 + e.abs()) {
            return Err(HarnessError::OracleMismatch {
                matrix: id.to_string(),
                row: j,
                expected: e,
                got: g,
            });
        }
    }
    Ok(())
}

/// Simulates `A·b` once and builds its report row.
pub fn simulate(
    id: &str,
    a: &CsrMatrix,
    b: &SparseVector,
    vector_label: String,
    repetition: usize,
    cfg: &AcceleratorConfig,
) -> Result<RunOutput> {
    let (c, m) = spmspv(a, b, cfg)?;
    let expected = oracle_spmspv(a, b).map_err(|e| HarnessError::Dimension(e.to_string()))?;
    check_oracle(id, &c, &expected)?;
    let seconds = m.seconds(cfg.clock_hz);
    let watts = power_estimate(cfg, &m, seconds);
    let total = watts.total();
    let flops_per_s = m.flops_per_second(cfg.clock_hz);
    let row = ReportRow {
        matrix: id.to_string(),
        n_rows: a.n_rows(),
        n_cols: a.n_cols(),
        nnz: a.nnz(),
        vector_source: vector_label,
        vector_nnz: b.nnz(),
        repetition,
        k: cfg.k,
        h: cfg.h,
        w: cfg.w,
        passes: m.passes,
        cycles: m.cycles,
        seconds,
        flops: m.flops,
        gflops: flops_per_s / 1e9,
        index_ops_per_s: m.index_ops_per_second(cfg.clock_hz),
        utilization: m.utilization(cfg.k),
        w_compare: watts.compare,
        w_ram_read: watts.ram_read,
        w_write: watts.write,
        w_multiply: watts.multiply,
        w_accumulate: watts.accumulate,
        w_memory: watts.memory,
        w_total: total,
        gflops_per_w: if total > 0.0 { flops_per_s / total / 1e9 } else { 0.0 },
        result_nnz: c.nnz(),
        oracle_match: true,
    };
    Ok(RunOutput { row, result: c })
}

/// Runs every (matrix, repetition) pair. Runs execute in parallel, and the
/// output keeps input order: matrix-major, then repetition.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunOutput>> {
    if spec.matrices.is_empty() {
        return Err(HarnessError::Usage("at least one matrix is required".into()));
    }
    spec.config
        .validate()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let matrices = spec
        .matrices
        .par_iter()
        .map(|s| s.load().map(|m| (s.id(), m)))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, usize)> = (0..matrices.len())
        .flat_map(|i| (0..spec.repetitions.max(1)).map(move |r| (i, r)))
        .collect();
    tasks
        .par_iter()
        .map(|&(i, rep)| {
            let (id, a) = &matrices[i];
            let (b, label) = pick_vector(a, &spec.vector, rep)?;
            simulate(id, a, &b, label, rep, &spec.config.accel)
        })
        .collect()
}
