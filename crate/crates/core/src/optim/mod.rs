//! Solvers over the α-family.
//!
//! * [`solve_trace`]: closed form for the trace criterion.
//! * [`solve_mm`]: majorization-minimization for the log-det criterion.
//! * [`solve_projgrad`]: projected gradient with Armijo backtracking, a
//!   baseline for cross-checking and benchmarking.

mod mm;
mod objective;
mod projgrad;
mod trace;

use web_time::Duration;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::family::{normalize, AlphaVector};
use crate::problem::SumProblem;

pub use mm::{mm_step, solve_mm};
pub use objective::{
    gradient_logdet, objective_logdet, objective_trace, surrogate_coeffs, SurrogateCoeffs,
};
pub use projgrad::{project_onto_slice, solve_projgrad};
pub use trace::{solve_trace, trace_optimal_alpha};

/// Starting point of an iterative solver. Always normalized before use.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    TraceOptimal,
    /// Entries uniform on `[0.1, 1]` drawn from a ChaCha8 stream with this seed.
    Random(u64),
    Given(Vec<f64>),
}

/// What `epsilon` is compared against between consecutive objective values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopRule {
    /// `|f_t - f_{t-1}| < ε`
    Absolute,
    /// `|f_t - f_{t-1}| < ε (1 + |f_t|)`
    Relative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MmConfig {
    pub epsilon: f64,
    pub max_iters: usize,
    pub init: Init,
    /// Smallest admissible Cholesky pivot of `Q(α)` and `R(α)`.
    pub lambda_floor: f64,
    pub stop_rule: StopRule,
}

impl Default for MmConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            max_iters: 10_000,
            init: Init::TraceOptimal,
            lambda_floor: 1e-12,
            stop_rule: StopRule::Absolute,
        }
    }
}

impl MmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(invalid(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be at least 1"));
        }
        if !(self.lambda_floor >= 0.0) {
            return Err(invalid("lambda_floor must be non-negative"));
        }
        Ok(())
    }

    pub(crate) fn stopped(&self, prev: f64, cur: f64) -> bool {
        let delta = (cur - prev).abs();
        match self.stop_rule {
            StopRule::Absolute => delta < self.epsilon,
            StopRule::Relative => delta < self.epsilon * (1.0 + cur.abs()),
        }
    }
}

/// Random weights uniform on `[0.1, 1]`, normalized onto the slice.
pub fn random_alpha<G: Rng + ?Sized>(problem: &SumProblem, rng: &mut G) -> Result<AlphaVector> {
    let beta = DVector::from_fn(problem.len(), |_, _| rng.random_range(0.1..=1.0));
    normalize(problem, &AlphaVector::new(beta)?)
}

pub fn initial_alpha(problem: &SumProblem, init: &Init) -> Result<AlphaVector> {
    match init {
        Init::TraceOptimal => trace_optimal_alpha(problem),
        Init::Random(seed) => random_alpha(problem, &mut ChaCha8Rng::seed_from_u64(*seed)),
        Init::Given(values) => {
            let a = AlphaVector::from_slice(values)?;
            normalize(problem, &a)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIters,
    /// A Cholesky pivot fell below the floor; the report holds the last
    /// iterate that evaluated cleanly.
    Degenerate,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIters => "max_iters",
            Termination::Degenerate => "degenerate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct OptimizerReport {
    pub alpha_final: AlphaVector,
    /// `f(α_t)` for `t = 0, 1, ...`; one entry longer than `iteration_times`.
    pub objective_trace: Vec<f64>,
    /// `|∇f(α_final)|_∞`, NaN if the final point could not be evaluated.
    pub grad_norm_final: f64,
    pub iterations: usize,
    pub iteration_times: Vec<Duration>,
    pub total_time: Duration,
    pub termination: Termination,
}

impl OptimizerReport {
    pub fn final_objective(&self) -> f64 {
        *self.objective_trace.last().expect("trace holds f(alpha_0)")
    }

    pub fn mean_iteration_time(&self) -> Option<Duration> {
        if self.iteration_times.is_empty() {
            return None;
        }
        Some(self.iteration_times.iter().sum::<Duration>() / self.iteration_times.len() as u32)
    }
}
