use web_time::Instant;

use nalgebra::DVector;

use crate::error::Result;
use crate::family::AlphaVector;
use crate::problem::SumProblem;

use super::objective::{gradient_from_terms, FamilyEval};
use super::{initial_alpha, MmConfig, OptimizerReport, Termination};

const ARMIJO_C1: f64 = 1e-4;
const MIN_STEP: f64 = 1e-30;
// Projection keeps α_k >= LOWER_FRAC * r / (K w_k), which keeps the
// objective finite.
const LOWER_FRAC: f64 = 1e-12;

/// Euclidean projection of `y` onto `{ α : α_k >= lower_k, Σ_k w_k α_k = total }`.
///
/// The projection is `α_k = max(lower_k, y_k - τ w_k)` for the unique `τ`
/// where the weighted sum hits `total`; `τ` is found exactly by walking the
/// sorted breakpoints of the piecewise-linear constraint function.
pub fn project_onto_slice(
    y: &DVector<f64>,
    weights: &DVector<f64>,
    lower: &DVector<f64>,
    total: f64,
) -> DVector<f64> {
    let n = y.len();
    let floor_sum: f64 = weights.dot(lower);
    debug_assert!(floor_sum < total, "lower bounds already exceed the slice");

    // Term k is active (above its floor) while τ < bp_k.
    let mut order: Vec<usize> = (0..n).collect();
    let bp = DVector::from_fn(n, |k, _| (y[k] - lower[k]) / weights[k]);
    order.sort_by(|&i, &j| bp[i].total_cmp(&bp[j]));

    // Suffix sums over the sorted order: terms order[idx..] are active.
    let mut wy_suffix = vec![0.0; n + 1];
    let mut ww_suffix = vec![0.0; n + 1];
    for idx in (0..n).rev() {
        let k = order[idx];
        wy_suffix[idx] = wy_suffix[idx + 1] + weights[k] * y[k];
        ww_suffix[idx] = ww_suffix[idx + 1] + weights[k] * weights[k];
    }
    let mut fixed = 0.0;
    // all terms at their floor; only reachable when floor_sum >= total
    let mut tau = bp[order[n - 1]];
    for (idx, &k) in order.iter().enumerate() {
        let candidate = (wy_suffix[idx] + fixed - total) / ww_suffix[idx];
        let lo = if idx == 0 {
            f64::NEG_INFINITY
        } else {
            bp[order[idx - 1]]
        };
        if candidate >= lo && candidate <= bp[k] {
            tau = candidate;
            break;
        }
        fixed += weights[k] * lower[k];
    }
    DVector::from_fn(n, |k, _| (y[k] - tau * weights[k]).max(lower[k]))
}

/// Projected gradient descent on the log-det objective over the slice
/// `tr R(α) = r`, with Armijo backtracking (factor 1/2, initial step 1).
///
/// Stops when consecutive objective values differ by less than `epsilon`
/// (same rule as [`super::solve_mm`]) or the projected-gradient residual
/// `|α - P(α - ∇f)|_∞` drops below `epsilon`.
pub fn solve_projgrad(problem: &SumProblem, config: &MmConfig) -> Result<OptimizerReport> {
    config.validate()?;
    let start = Instant::now();
    let alpha0 = initial_alpha(problem, &config.init)?;
    let weights = DVector::from_iterator(
        problem.len(),
        problem.terms().iter().map(|t| t.right_block().trace()),
    );
    let total = problem.r() as f64;
    let k = problem.len() as f64;
    let lower = weights.map(|w| LOWER_FRAC * total / (k * w));

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
    let mut alpha = alpha0.into_inner();
    let mut trace = vec![eval.logdet()];
    let mut times = Vec::new();
    let mut termination = Termination::MaxIters;

    for _ in 0..config.max_iters {
        let tick = Instant::now();
        let (a, b) = eval.trace_terms(problem);
        let grad = gradient_from_terms(&a, &b, &alpha);
        let f = eval.logdet();

        let residual =
            (&alpha - project_onto_slice(&(&alpha - &grad), &weights, &lower, total)).amax();
        if residual < config.epsilon {
            termination = Termination::Converged;
            break;
        }

        let mut step = 1.0;
        let mut accepted = None;
        while step >= MIN_STEP {
            let cand = project_onto_slice(&(&alpha - &grad * step), &weights, &lower, total);
            if let Ok(ce) = FamilyEval::new(problem, &cand, config.lambda_floor) {
                let decrease = grad.dot(&(&cand - &alpha));
                if ce.logdet() <= f + ARMIJO_C1 * decrease {
                    accepted = Some((cand, ce));
                    break;
                }
            }
            step *= 0.5;
        }
        let Some((cand, ce)) = accepted else {
            // no representable descent step left
            termination = Termination::Converged;
            break;
        };
        times.push(tick.elapsed());
        let f_new = ce.logdet();
        trace.push(f_new);
        alpha = cand;
        eval = ce;
        if config.stopped(f, f_new) {
            termination = Termination::Converged;
            break;
        }
    }

    let (a, b) = eval.trace_terms(problem);
    let grad = gradient_from_terms(&a, &b, &alpha);
    Ok(OptimizerReport {
        alpha_final: AlphaVector::for_problem(problem, alpha)?,
        objective_trace: trace,
        grad_norm_final: grad.amax(),
        iterations: times.len(),
        iteration_times: times,
        total_time: start.elapsed(),
        termination,
    })
}
