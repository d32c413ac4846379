//! Deterministic synthetic matrices for desk-scale experiments.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::{CsrMatrix, SparseVector};

/// Distribution of generated nonzero values. Neither variant produces an exact zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ValueDist {
    /// Uniform on (-1, 1), redrawn on exact zero.
    UniformSigned,
    /// Uniform integers in `[-max, max] \ {0}`. Products and sums of these stay
    /// exactly representable, so results are independent of summation order.
    SmallIntegers(u32),
}

impl ValueDist {
    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            ValueDist::UniformSigned => loop {
                let v: f64 = rng.random_range(-1.0..1.0);
                if v != 0.0 {
                    return v;
                }
            },
            ValueDist::SmallIntegers(max) => {
                let max = max.max(1) as i64;
                let v = rng.random_range(1..=max);
                if rng.random_bool(0.5) {
                    -v as f64
                } else {
                    v as f64
                }
            }
        }
    }
}

fn sorted_columns<R: Rng>(rng: &mut R, n: usize, density: f64) -> Vec<usize> {
    if n == 0 || density <= 0.0 {
        return Vec::new();
    }
    let count = Binomial::new(n as u64, density.min(1.0))
        .expect("density checked to lie in [0, 1]")
        .sample(rng) as usize;
    let mut cols = index::sample(rng, n, count).into_vec();
    cols.sort_unstable();
    cols
}

/// Random matrix where each entry is present independently with probability
/// `density`, valued by [`ValueDist::UniformSigned`].
pub fn gen_random_csr(n_rows: usize, n_cols: usize, density: f64, seed: u64) -> CsrMatrix {
    gen_random_csr_with(n_rows, n_cols, density, seed, ValueDist::UniformSigned)
}

pub fn gen_random_csr_with(
    n_rows: usize,
    n_cols: usize,
    density: f64,
    seed: u64,
    dist: ValueDist,
) -> CsrMatrix {
    assert!(
        (0.0..=1.0).contains(&density),
        "density must lie in [0, 1], got {density}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut row_start = Vec::with_capacity(n_rows + 1);
    let mut col_idx = Vec::new();
    let mut values = Vec::new();
    row_start.push(0);
    for _ in 0..n_rows {
        for c in sorted_columns(&mut rng, n_cols, density) {
            col_idx.push(c);
            values.push(dist.sample(&mut rng));
        }
        row_start.push(col_idx.len());
    }
    CsrMatrix::from_parts(n_rows, n_cols, row_start, col_idx, values)
        .expect("generator output is well-formed")
}

/// Random sparse vector of the given length and density.
pub fn gen_random_vector(length: usize, density: f64, seed: u64, dist: ValueDist) -> SparseVector {
    assert!((0.0..=1.0).contains(&density));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entries = sorted_columns(&mut rng, length, density)
        .into_iter()
        .map(|i| (i, dist.sample(&mut rng)))
        .collect();
    SparseVector::new(length, entries).expect("generator output is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_density_is_empty() {
        let m = gen_random_csr(10, 10, 0.0, 1);
        assert_eq!(m.nnz(), 0);
        assert_eq!(m.n_rows(), 10);
    }

    #[test]
    fn full_density_is_dense() {
        let m = gen_random_csr(4, 6, 1.0, 1);
        assert_eq!(m.nnz(), 24);
    }

    #[test]
    fn deterministic_for_seed() {
        assert_eq!(gen_random_csr(30, 20, 0.1, 9), gen_random_csr(30, 20, 0.1, 9));
        assert_ne!(gen_random_csr(30, 20, 0.1, 9), gen_random_csr(30, 20, 0.1, 10));
    }

    #[test]
    fn nnz_within_three_sigma() {
        // Binomial(10000, 0.05): mean 500, sigma = sqrt(10000 * 0.05 * 0.95) ~= 21.79.
        let sigma = (10000.0f64 * 0.05 * 0.95).sqrt();
        for seed in 0..20 {
            let nnz = gen_random_csr(100, 100, 0.05, seed).nnz() as f64;
            assert!((nnz - 500.0).abs() <= 3.0 * sigma, "seed {seed}: nnz {nnz}");
        }
    }

    #[test]
    fn integer_values_are_nonzero_integers() {
        let m = gen_random_csr_with(40, 40, 0.2, 3, ValueDist::SmallIntegers(9));
        assert!(m
            .values()
            .iter()
            .all(|&v| v != 0.0 && v.fract() == 0.0 && v.abs() <= 9.0));
        let f = gen_random_csr(40, 40, 0.2, 3);
        assert!(f.values().iter().all(|&v| v != 0.0 && v.abs() < 1.0));
    }
}
