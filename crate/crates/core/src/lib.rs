//! Functional and analytical model of a content-addressable-memory based
//! accelerator for sparse matrix × sparse vector (SpMSpV) and sparse matrix
//! × sparse matrix (SpMSpM) products in CSR format.
//!
//! * [`sparse`]: CSR/COO/sparse-vector types, Matrix Market I/O, generators
//!   and brute-force reference products.
//! * [`cam`]: bit-level CAM/RAM array with masked compare, search-and-read,
//!   endurance and energy-event counters.
//! * [`accel`]: the k-module engine with its cycle, traffic and energy accounting.
//! * [`dse`]: bandwidth, peak-throughput, area and power models.
//! * [`config`]: parameters and the `key=value` configuration format.

pub mod accel;
pub mod cam;
pub mod config;
pub mod dse;
pub mod sparse;

pub use accel::{plan_tiles, spmspm, spmspv, AccelError, Accelerator, ByCategory, RunMetrics};
pub use cam::{CamError, CamRamArray, CompareKey, EnergyTally};
pub use config::{AcceleratorConfig, ConfigError, EnergyParams, ModelConfig, TechParams};
pub use dse::{MemoryStyle, PeakPerformance, SweepPoint};
pub use sparse::{coo_to_csr, CooMatrix, CsrMatrix, SparseError, SparseVector};
