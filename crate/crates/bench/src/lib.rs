//! Shared workloads for the criterion benchmarks in `benches/`.

use camspmv::sparse::{gen_random_csr, gen_random_vector, ValueDist};
use camspmv::{CsrMatrix, SparseVector};

/// A named `A·b` input.
pub struct Workload {
    pub name: String,
    pub a: CsrMatrix,
    pub b: SparseVector,
}

/// Square random matrices of increasing size at a fixed density, each paired
/// with a random vector of the same density.
pub fn random_spmspv(sizes: &[usize], density: f64) -> Vec<Workload> {
    sizes
        .iter()
        .map(|&n| Workload {
            name: format!("{n}x{n}@{density}"),
            a: gen_random_csr(n, n, density, n as u64),
            b: gen_random_vector(n, density, n as u64 + 1, ValueDist::UniformSigned),
        })
        .collect()
}

/// Keys `0..n` with distinct values, for loading one array segment.
pub fn segment(n: usize) -> Vec<(u64, f64)> {
    (0..n as u64).map(|i| (i * 3, i as f64 + 0.5)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn workloads_have_matching_shapes() {
        for w in random_spmspv(&[10, 50], 0.1) {
            assert_eq!(w.a.n_cols(), w.b.len());
        }
        assert_eq!(segment(4)[3], (9, 3.5));
    }
}
