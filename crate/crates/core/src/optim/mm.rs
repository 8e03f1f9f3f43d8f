use web_time::Instant;

use crate::error::Result;
use crate::family::{normalize, AlphaVector};
use crate::problem::SumProblem;

use super::objective::{coeffs_from_eval, gradient_from_terms, FamilyEval};
use super::{initial_alpha, MmConfig, OptimizerReport, Termination};

/// One MM update: minimize the separable majorizer at `alpha_t` in closed
/// form, then rescale the minimizer back onto `tr R(α) = r`.
pub fn mm_step(problem: &SumProblem, alpha_t: &AlphaVector) -> Result<AlphaVector> {
    let eval = FamilyEval::new(problem, alpha_t.values(), 0.0)?;
    step_from_eval(problem, &eval)
}

fn step_from_eval(problem: &SumProblem, eval: &FamilyEval) -> Result<AlphaVector> {
    let coeffs = coeffs_from_eval(problem, eval);
    let tilde = AlphaVector::new(coeffs.minimizer())?;
    normalize(problem, &tilde)
}

/// Iterates [`mm_step`] from the configured start until consecutive
/// objective values differ by less than `epsilon` or `max_iters` is hit.
///
/// A degenerate iterate ends the run with [`Termination::Degenerate`] and the
/// last iterate that evaluated cleanly.
pub fn solve_mm(problem: &SumProblem, config: &MmConfig) -> Result<OptimizerReport> {
    config.validate()?;
    let start = Instant::now();
    let alpha0 = initial_alpha(problem, &config.init)?;

    let mut eval = match FamilyEval::new(problem, alpha0.values(), config.lambda_floor) {
        Ok(e) => e,
        Err(e) => {
            log::warn!("initial point is degenerate: {e}");
            return Ok(OptimizerReport {
                alpha_final: alpha0,
                objective_trace: vec![f64::NAN],
                grad_norm_final: f64::NAN,
                iterations: 0,
                iteration_times: Vec::new(),
                total_time: start.elapsed(),
                termination: Termination::Degenerate,
            });
        }
    };
    let mut alpha = alpha0;
    let mut trace = vec![eval.logdet()];
    let mut times = Vec::new();
    let mut termination = Termination::MaxIters;

    for _ in 0..config.max_iters {
        let tick = Instant::now();
        let next = step_from_eval(problem, &eval)?;
        let next_eval = match FamilyEval::new(problem, next.values(), config.lambda_floor) {
            Ok(e) => e,
            Err(e) => {
                log::warn!("MM iterate became degenerate: {e}");
                termination = Termination::Degenerate;
                break;
            }
        };
        times.push(tick.elapsed());
        let f = next_eval.logdet();
        let prev = *trace.last().expect("non-empty");
        trace.push(f);
        alpha = next;
        eval = next_eval;
        if config.stopped(prev, f) {
            termination = Termination::Converged;
            break;
        }
    }

    let (a, b) = eval.trace_terms(problem);
    let grad = gradient_from_terms(&a, &b, alpha.values());
    Ok(OptimizerReport {
        alpha_final: alpha,
        objective_trace: trace,
        grad_norm_final: grad.amax(),
        iterations: times.len(),
        iteration_times: times,
        total_time: start.elapsed(),
        termination,
    })
}
