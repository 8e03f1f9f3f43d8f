//! `solve` and `verify`: bounding ellipsoid for a problem file, and an
//! independent check of a stored solution.

use std::time::Instant;

use ellsum::problem::RANK_TOL;
use ellsum::verify::{check_points, sample_sum_point, verify_containment, ContainmentReport};
use ellsum::{
    certify_dominance, family, objective_logdet, objective_trace, preprocess, solve_mm,
    solve_projgrad, trace_optimal_alpha, AlphaVector, MatrixEllipsoid, MmConfig, Reduction,
    SampleMode, SumProblem, Termination,
};
use nalgebra::{DMatrix, DVector};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::{from_rows, to_rows, Rows};

/// Tolerance on sampled containment margins.
pub const CONTAINMENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Trace,
    Mm,
    Projgrad,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Trace => "trace",
            Method::Mm => "mm",
            Method::Projgrad => "projgrad",
        }
    }
}

/// Weights chosen by a method plus its iteration count and termination.
#[derive(Debug, Clone)]
pub struct MethodRun {
    pub alpha: AlphaVector,
    pub iterations: usize,
    pub termination: Termination,
}

/// Runs one method on an already full-rank problem.
pub fn run_method(problem: &SumProblem, method: Method, config: &MmConfig) -> CliResult<MethodRun> {
    Ok(match method {
        Method::Trace => MethodRun {
            alpha: trace_optimal_alpha(problem)?,
            iterations: 0,
            termination: Termination::Converged,
        },
        Method::Mm | Method::Projgrad => {
            let rep = if method == Method::Mm {
                solve_mm(problem, config)?
            } else {
                solve_projgrad(problem, config)?
            };
            MethodRun {
                alpha: rep.alpha_final,
                iterations: rep.iterations,
                termination: rep.termination,
            }
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentSummary {
    pub samples: usize,
    pub violations: usize,
    pub worst_margin: f64,
}

impl From<ContainmentReport> for ContainmentSummary {
    fn from(r: ContainmentReport) -> Self {
        Self {
            samples: r.samples_tested,
            violations: r.violations,
            worst_margin: r.worst_margin,
        }
    }
}

/// Present when the maps were rank deficient and the problem was solved in
/// reduced coordinates `X = F̄ X' Ḡ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionSummary {
    pub q: usize,
    pub r: usize,
    pub left_factor: Option<Rows>,
    pub right_factor: Option<Rows>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub method: Method,
    pub q: usize,
    pub r: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub center: Rows,
    #[serde(rename = "Q")]
    pub left: Rows,
    #[serde(rename = "R")]
    pub right: Rows,
    pub alpha: Vec<f64>,
    pub objective_trace: f64,
    pub objective_logdet: f64,
    pub iterations: usize,
    pub termination: String,
    pub time_s: f64,
    pub reduction: Option<ReductionSummary>,
    pub containment: Option<ContainmentSummary>,
}

impl SolveOutput {
    pub fn is_degenerate(&self) -> bool {
        self.termination == Termination::Degenerate.as_str()
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub method: Method,
    pub config: MmConfig,
    /// Boundary sum-samples to spot-check; 0 skips the check.
    pub check_containment: usize,
    pub seed: u64,
}

pub fn solve_problem(problem: &SumProblem, opts: &SolveOptions) -> CliResult<SolveOutput> {
    let reduction = preprocess(problem, RANK_TOL)?;
    let reduced = &reduction.problem;

    let start = Instant::now();
    let run = run_method(reduced, opts.method, &opts.config)?;
    let time_s = start.elapsed().as_secs_f64();

    let bounding = family(reduced, &run.alpha)?;
    let containment = if opts.check_containment > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let rep = verify_containment(
            reduced,
            &bounding,
            opts.check_containment,
            SampleMode::Boundary,
            CONTAINMENT_TOL,
            &mut rng,
        )?;
        Some(rep.into())
    } else {
        None
    };
    let (left, right) = reduction.lift_shapes(&bounding.left, &bounding.right);
    Ok(SolveOutput {
        method: opts.method,
        q: problem.q(),
        r: problem.r(),
        k: problem.len(),
        center: to_rows(&problem.center()),
        left: to_rows(&left),
        right: to_rows(&right),
        alpha: run.alpha.as_slice().to_vec(),
        objective_trace: objective_trace(reduced, &run.alpha)?,
        objective_logdet: objective_logdet(reduced, &run.alpha)?,
        iterations: run.iterations,
        termination: run.termination.as_str().to_string(),
        time_s,
        reduction: reduction_summary(&reduction),
        containment,
    })
}

fn reduction_summary(reduction: &Reduction) -> Option<ReductionSummary> {
    if reduction.is_identity() {
        return None;
    }
    Some(ReductionSummary {
        q: reduction.problem.q(),
        r: reduction.problem.r(),
        left_factor: reduction.left_factor.as_ref().map(to_rows),
        right_factor: reduction.right_factor.as_ref().map(to_rows),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    /// `Q(α) ⪯ Q` and `R(α) ⪯ R` for the stored α.
    pub dominance: bool,
    pub containment: Option<ContainmentSummary>,
    pub passed: bool,
}

/// Re-derives the family member for the stored α and checks that the stored
/// `(Q, R)` dominates it, then samples the sum against `E(0, Q, R)`.
pub fn verify_solution(
    problem: &SumProblem,
    solution: &SolveOutput,
    n_samples: usize,
    seed: u64,
) -> CliResult<VerifyOutput> {
    let reduction = preprocess(problem, RANK_TOL)?;
    let reduced = &reduction.problem;
    if solution.alpha.len() != reduced.len() {
        return Err(CliError::Input(format!(
            "alpha: {} entries for {} terms",
            solution.alpha.len(),
            reduced.len()
        )));
    }
    let alpha = AlphaVector::new(DVector::from_vec(solution.alpha.clone()))
        .map_err(|e| CliError::Input(format!("alpha: {e}")))?;
    let mut left = from_rows(&solution.left, "Q")?;
    let mut right = from_rows(&solution.right, "R")?;
    if (left.nrows(), right.nrows()) != (problem.q(), problem.r()) {
        return Err(CliError::Input(format!(
            "Q/R: shapes {}x{} and {}x{} do not match problem ({}, {})",
            left.nrows(),
            left.ncols(),
            right.nrows(),
            right.ncols(),
            problem.q(),
            problem.r()
        )));
    }
    if let Some(f) = &reduction.left_factor {
        left = f.transpose() * left * f;
    }
    if let Some(g) = &reduction.right_factor {
        right = g * right * g.transpose();
    }

    let tol = 1e-9 * (1.0 + left.amax().max(right.amax()));
    let dominance = certify_dominance(reduced, &alpha, &left, &right, tol)?;
    let containment = if n_samples > 0 {
        let e = MatrixEllipsoid::centered(left, right)
            .map_err(|e| CliError::Verification(format!("stored (Q, R): {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points: Vec<DMatrix<f64>> = (0..n_samples)
            .map(|_| sample_sum_point(reduced, SampleMode::Boundary, &mut rng))
            .collect();
        Some(ContainmentSummary::from(check_points(
            &e,
            &points,
            CONTAINMENT_TOL,
        )?))
    } else {
        None
    };
    let passed = dominance && containment.as_ref().is_none_or(|c| c.violations == 0);
    Ok(VerifyOutput {
        dominance,
        containment,
        passed,
    })
}
