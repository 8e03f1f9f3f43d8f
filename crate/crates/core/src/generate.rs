//! Benchmark problem generator: `F_k = I_q`, `Q_k = N_k N_k^T + floor · I_q`
//! with standard normal `N_k`.
//!
//! In vector mode every summand has `R_k = G_k = 1` (so `r = 1`); matrix mode
//! draws `R_k` the same way at dimension `r` with `G_k = I_r`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ellipsoid::MatrixEllipsoid;
use crate::error::{invalid, Result};
use crate::problem::{SumProblem, SumTerm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    pub q: usize,
    /// Ambient `r`; values above 1 switch to matrix mode.
    pub r: usize,
    pub terms: usize,
    pub seed: u64,
    pub noise_floor: f64,
}

impl GeneratorConfig {
    pub fn vector(q: usize, terms: usize, seed: u64) -> Self {
        Self {
            q,
            r: 1,
            terms,
            seed,
            noise_floor: 0.1,
        }
    }

    pub fn matrix(q: usize, r: usize, terms: usize, seed: u64) -> Self {
        Self {
            r,
            ..Self::vector(q, terms, seed)
        }
    }
}

pub fn generate_problem(config: &GeneratorConfig) -> Result<SumProblem> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    generate_with_rng(config, &mut rng)
}

pub fn generate_with_rng<G: Rng + ?Sized>(
    config: &GeneratorConfig,
    rng: &mut G,
) -> Result<SumProblem> {
    if config.q == 0 || config.r == 0 || config.terms == 0 {
        return Err(invalid("q, r and K must be at least 1"));
    }
    if !(config.noise_floor > 0.0) {
        return Err(invalid("noise floor must be positive"));
    }
    let (q, r) = (config.q, config.r);
    let mut terms = Vec::with_capacity(config.terms);
    for _ in 0..config.terms {
        let left = gram_plus_floor(q, config.noise_floor, rng);
        let right = if r == 1 {
            DMatrix::from_element(1, 1, 1.0)
        } else {
            gram_plus_floor(r, config.noise_floor, rng)
        };
        let e = MatrixEllipsoid::centered(left, right)?;
        terms.push(SumTerm::new(
            DMatrix::identity(q, q),
            e,
            DMatrix::identity(r, r),
        )?);
    }
    SumProblem::new(terms)
}

fn gram_plus_floor<G: Rng + ?Sized>(n: usize, floor: f64, rng: &mut G) -> DMatrix<f64> {
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let m = &a * a.transpose() + DMatrix::identity(n, n) * floor;
    (&m + m.transpose()) * 0.5
}

/// Derives an independent seed from a master seed and a list of labels.
pub fn derive_seed(master: u64, labels: &[u64]) -> u64 {
    labels
        .iter()
        .fold(splitmix(master), |acc, &l| splitmix(acc ^ splitmix(l)))
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
