use nalgebra::DVector;

use crate::error::Result;
use crate::family::{family, AlphaVector, BoundingEllipsoid};
use crate::problem::SumProblem;

/// Closed-form minimizer of `tr R(α) · tr Q(α)` on the slice `tr R(α) = r`:
///
/// ```text
/// α_k = r sqrt(u_k / v_k) / Σ_l sqrt(u_l v_l),   u_k = tr(F_k Q_k F_k^T), v_k = tr(G_k^T R_k G_k)
/// ```
pub fn trace_optimal_alpha(problem: &SumProblem) -> Result<AlphaVector> {
    let u: Vec<f64> = problem
        .terms()
        .iter()
        .map(|t| t.left_block().trace())
        .collect();
    let v: Vec<f64> = problem
        .terms()
        .iter()
        .map(|t| t.right_block().trace())
        .collect();
    let denom: f64 = u.iter().zip(&v).map(|(u, v)| (u * v).sqrt()).sum();
    let r = problem.r() as f64;
    let values = DVector::from_iterator(
        problem.len(),
        u.iter().zip(&v).map(|(u, v)| r * (u / v).sqrt() / denom),
    );
    AlphaVector::for_problem(problem, values)
}

pub fn solve_trace(problem: &SumProblem) -> Result<(AlphaVector, BoundingEllipsoid)> {
    let alpha = trace_optimal_alpha(problem)?;
    let bounding = family(problem, &alpha)?;
    Ok((alpha, bounding))
}
