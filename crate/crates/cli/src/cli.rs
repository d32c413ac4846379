//! Command-line surface. `main` parses [`Cli`] and hands it to [`execute`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use camspmv::dse::modules_from_bandwidth;
use camspmv::sparse::write_matrix_market;
use camspmv::{CsrMatrix, ModelConfig};
use clap::{Args, Parser, Subcommand};

use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment, ExperimentSpec, GenSpec, MatrixSource, VectorSource};
use crate::report::{self, dse_table, Format, InfoRow};

/// Matrices bundled with the crate, used by `bench` when no corpus is given.
pub const DEFAULT_CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data/corpus");

/// Array height `dse` assumes unless `--h` is given.
pub const DSE_DEFAULT_H: usize = 1 << 20;

#[derive(Debug, Parser)]
#[command(name = "camspmv", version, about = "Cycle-level model of a CAM-based sparse matrix accelerator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print shape and row statistics of Matrix Market files.
    Info {
        paths: Vec<PathBuf>,
        /// Also describe a generated matrix, ROWSxCOLS:DENSITY:SEED[:int].
        #[arg(long = "gen")]
        generated: Vec<GenSpec>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Simulate sparse matrix times sparse vector on one or more matrices.
    Run {
        #[arg(long = "matrix")]
        matrices: Vec<PathBuf>,
        #[arg(long = "gen")]
        generated: Vec<GenSpec>,
        /// Vector file (one row or one column). Without it a random row of each matrix is used.
        #[arg(long)]
        vector: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        /// Write the product as a 1 x n Matrix Market file. Requires a single run.
        #[arg(long)]
        result_out: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run every matrix in a corpus directory and summarise the rates.
    Bench {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long = "gen")]
        generated: Vec<GenSpec>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        repetitions: usize,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sweep memory bandwidth: module count, peak rates and area.
    Dse {
        /// START:STOP:STEP in GB/s, stop inclusive.
        #[arg(long, default_value = "10:1000:10", conflicts_with = "bandwidths")]
        range: String,
        /// Explicit bandwidths in GB/s, comma separated.
        #[arg(long, value_delimiter = ',')]
        bandwidths: Option<Vec<f64>>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the effective configuration and the literature baselines.
    Defaults {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write a generated matrix in Matrix Market format.
    Gen {
        spec: GenSpec,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// key=value file applied before the flags below.
    #[arg(long)]
    pub energy_config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub h: Option<usize>,
    #[arg(long)]
    pub w: Option<u32>,
    #[arg(long)]
    pub value_bits: Option<u32>,
    #[arg(long)]
    pub clock_hz: Option<f64>,
    /// Memory bandwidth in GB/s. Sets k from the bandwidth unless --k is given.
    #[arg(long)]
    pub bandwidth: Option<f64>,
    #[arg(long)]
    pub pipeline_depth: Option<u64>,
    #[arg(long)]
    pub single_precision: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ModelArgs {
    pub fn resolve(&self, default_h: Option<usize>) -> Result<ModelConfig> {
        let mut cfg = ModelConfig::default();
        if let Some(h) = default_h {
            cfg.accel.h = h;
        }
        if let Some(p) = &self.energy_config {
            let text = fs::read_to_string(p)?;
            cfg.apply_kv(&text)
                .map_err(|e| HarnessError::Config(format!("{}: {e}", p.display())))?;
        }
        let a = &mut cfg.accel;
        if let Some(v) = self.h {
            a.h = v;
        }
        if let Some(v) = self.w {
            a.w = v;
        }
        if let Some(v) = self.value_bits {
            a.value_bits = v;
        }
        if let Some(v) = self.clock_hz {
            a.clock_hz = v;
        }
        if let Some(v) = self.pipeline_depth {
            a.pipeline_depth = v;
        }
        if self.single_precision {
            a.single_precision = true;
        }
        if let Some(gb) = self.bandwidth {
            a.memory_bw_bytes_per_s = gb * 1e9;
            a.k = modules_from_bandwidth(a.memory_bw_bytes_per_s, a.clock_hz, a.value_bits, a.w)
                .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        if let Some(v) = self.k {
            a.k = v;
        }
        cfg.validate().map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(cfg)
    }
}

/// Parses `START:STOP:STEP` into an inclusive list of values.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let bad = || HarnessError::Usage(format!("range '{s}' must look like START:STOP:STEP with STEP > 0"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    let mut v = Vec::new();
    let mut i = 0u64;
    loop {
        let x = start + i as f64 * step;
        if x > stop + step * 1e-9 {
            break;
        }
        v.push(x);
        i += 1;
    }
    if v.is_empty() {
        return Err(HarnessError::Usage(format!("range '{s}' is empty")));
    }
    Ok(v)
}

/// `*.mtx` files directly inside `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mtx"))
        .collect();
    files.sort();
    Ok(files)
}

fn emit(out: &Option<PathBuf>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn sources(files: Vec<PathBuf>, generated: Vec<GenSpec>) -> Vec<MatrixSource> {
    files
        .into_iter()
        .map(MatrixSource::File)
        .chain(generated.into_iter().map(MatrixSource::Generated))
        .collect()
}

pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let mut buf = Vec::new();
    match cli.command {
        Command::Info {
            paths,
            generated,
            output,
        } => {
            let mut rows = Vec::new();
            for src in sources(paths, generated) {
                let m = src.load()?;
                rows.push(InfoRow::new(src.id(), &m));
            }
            if rows.is_empty() {
                return Err(HarnessError::Usage("no matrices given".into()));
            }
            report::write_info(&mut buf, &rows, output.format)?;
            emit(&output.out, &buf, stdout)
        }
        Command::Run {
            matrices,
            generated,
            vector,
            seed,
            repetitions,
            result_out,
            model,
            output,
        } => {
            let spec = ExperimentSpec {
                matrices: sources(matrices, generated),
                vector: match vector {
                    Some(p) => VectorSource::File(p),
                    None => VectorSource::RandomRow { seed },
                },
                config: model.resolve(None)?,
                repetitions,
            };
            let runs = run_experiment(&spec)?;
            if let Some(path) = result_out {
                let [only] = &runs[..] else {
                    return Err(HarnessError::Usage(
                        "--result-out needs exactly one matrix and one repetition".into(),
                    ));
                };
                let m = CsrMatrix::from_rows(only.result.len(), std::slice::from_ref(&only.result))
                    .map_err(|e| HarnessError::Dimension(e.to_string()))?;
                let mut f = fs::File::create(path)?;
                write_matrix_market(&m, &mut f)?;
            }
            let rows: Vec<_> = runs.into_iter().map(|r| r.row).collect();
            report::write_run(&mut buf, &spec.config, &rows, output.format)?;
            emit(&output.out, &buf, stdout)
        }
        Command::Bench {
            corpus,
            generated,
            seed,
            repetitions,
            model,
            output,
        } => {
            let dir = corpus.unwrap_or_else(|| PathBuf::from(DEFAULT_CORPUS));
            let spec = ExperimentSpec {
                matrices: sources(corpus_files(&dir)?, generated),
                vector: VectorSource::RandomRow { seed },
                config: model.resolve(None)?,
                repetitions,
            };
            let rows: Vec<_> = run_experiment(&spec)?.into_iter().map(|r| r.row).collect();
            report::write_bench(&mut buf, &spec.config, &rows, output.format)?;
            emit(&output.out, &buf, stdout)
        }
        Command::Dse {
            range,
            bandwidths,
            model,
            output,
        } => {
            let cfg = model.resolve(Some(DSE_DEFAULT_H))?;
            let bws = match bandwidths {
                Some(b) => b,
                None => parse_range(&range)?,
            };
            let rows = dse_table(&bws, &cfg)?;
            report::write_dse(&mut buf, &cfg, &rows, output.format)?;
            emit(&output.out, &buf, stdout)
        }
        Command::Defaults { model, output } => {
            let cfg = model.resolve(None)?;
            report::write_defaults(&mut buf, &cfg, output.format)?;
            emit(&output.out, &buf, stdout)
        }
        Command::Gen { spec, out } => {
            write_matrix_market(&spec.generate(), &mut buf)?;
            emit(&out, &buf, stdout)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r = parse_range("10:1000:10").unwrap();
        assert_eq!(r.len(), 100);
        assert_eq!(r[24], 250.0);
        assert_eq!(*r.last().unwrap(), 1000.0);
        assert_eq!(parse_range("0.5:1:0.25").unwrap(), vec![0.5, 0.75, 1.0]);
        assert!(parse_range("10:5:1").is_err());
        assert!(parse_range("1:5:0").is_err());
        assert!(parse_range("1:5").is_err());
    }

    #[test]
    fn bandwidth_sets_k_unless_overridden() {
        let m = ModelArgs {
            bandwidth: Some(128.0),
            ..Default::default()
        };
        assert_eq!(m.resolve(None).unwrap().accel.k, 8);
        let m = ModelArgs {
            bandwidth: Some(128.0),
            k: Some(3),
            ..Default::default()
        };
        assert_eq!(m.resolve(None).unwrap().accel.k, 3);
        assert_eq!(ModelArgs::default().resolve(Some(64)).unwrap().accel.h, 64);
    }

    #[test]
    fn invalid_flags_are_config_errors() {
        let m = ModelArgs {
            k: Some(0),
            ..Default::default()
        };
        assert!(matches!(m.resolve(None), Err(HarnessError::Config(_))));
    }
}
