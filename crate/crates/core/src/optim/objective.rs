//! Log-det objective `f(α) = q log det R(α) + r log det Q(α)`, its gradient
//! and the separable majorizer used by the MM iteration.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::family::{family_shapes, AlphaVector};
use crate::linalg;
use crate::problem::SumProblem;

/// Cholesky factors of `Q(α)` and `R(α)` at one weight vector.
#[derive(Debug, Clone)]
pub(crate) struct FamilyEval {
    pub left: DMatrix<f64>,
    pub right: DMatrix<f64>,
    left_chol: Cholesky<f64, Dyn>,
    right_chol: Cholesky<f64, Dyn>,
    pub logdet_left: f64,
    pub logdet_right: f64,
}

impl FamilyEval {
    /// Fails with [`Error::Degenerate`] if a Cholesky pivot of either shape
    /// falls below `pivot_floor`.
    pub fn new(problem: &SumProblem, alpha: &DVector<f64>, pivot_floor: f64) -> Result<Self> {
        let (left, right) = family_shapes(problem, alpha);
        let left_chol = factor(&left, "Q(alpha)", pivot_floor)?;
        let right_chol = factor(&right, "R(alpha)", pivot_floor)?;
        let logdet_left = linalg::logdet(&left_chol);
        let logdet_right = linalg::logdet(&right_chol);
        Ok(Self {
            left,
            right,
            left_chol,
            right_chol,
            logdet_left,
            logdet_right,
        })
    }

    pub fn logdet(&self) -> f64 {
        self.left.nrows() as f64 * self.logdet_right + self.right.nrows() as f64 * self.logdet_left
    }

    /// `A_k = q tr(R^{-1} G_k^T R_k G_k)` and `B_k = r tr(Q^{-1} F_k Q_k F_k^T)`.
    pub fn trace_terms(&self, problem: &SumProblem) -> (DVector<f64>, DVector<f64>) {
        let q = problem.q() as f64;
        let r = problem.r() as f64;
        let left_inv = self.left_chol.inverse();
        let right_inv = self.right_chol.inverse();
        let k = problem.len();
        let mut a = DVector::zeros(k);
        let mut b = DVector::zeros(k);
        for (i, t) in problem.terms().iter().enumerate() {
            a[i] = q * linalg::frobenius_dot(&right_inv, t.right_block());
            b[i] = r * linalg::frobenius_dot(&left_inv, t.left_block());
        }
        (a, b)
    }
}

fn factor(m: &DMatrix<f64>, what: &str, floor: f64) -> Result<Cholesky<f64, Dyn>> {
    let chol = Cholesky::new(m.clone())
        .ok_or_else(|| Error::Degenerate(format!("{what} is not positive definite")))?;
    let pivot = linalg::min_pivot(&chol);
    if !(pivot >= floor) || !pivot.is_finite() {
        return Err(Error::Degenerate(format!(
            "{what} pivot {pivot:.3e} below floor {floor:.1e}"
        )));
    }
    Ok(chol)
}

fn check(problem: &SumProblem, alpha: &AlphaVector) -> Result<()> {
    if alpha.len() != problem.len() {
        return Err(crate::error::invalid(format!(
            "alpha has {} entries for {} terms",
            alpha.len(),
            problem.len()
        )));
    }
    Ok(())
}

pub fn objective_logdet(problem: &SumProblem, alpha: &AlphaVector) -> Result<f64> {
    check(problem, alpha)?;
    Ok(FamilyEval::new(problem, alpha.values(), 0.0)?.logdet())
}

/// `tr R(α) · tr Q(α)`.
pub fn objective_trace(problem: &SumProblem, alpha: &AlphaVector) -> Result<f64> {
    check(problem, alpha)?;
    let (left, right) = family_shapes(problem, alpha.values());
    Ok(left.trace() * right.trace())
}

/// `∂f/∂α_k = q tr(R(α)^{-1} G_k^T R_k G_k) - (r/α_k²) tr(Q(α)^{-1} F_k Q_k F_k^T)`.
pub fn gradient_logdet(problem: &SumProblem, alpha: &AlphaVector) -> Result<DVector<f64>> {
    check(problem, alpha)?;
    let eval = FamilyEval::new(problem, alpha.values(), 0.0)?;
    let (a, b) = eval.trace_terms(problem);
    Ok(gradient_from_terms(&a, &b, alpha.values()))
}

pub(crate) fn gradient_from_terms(
    a: &DVector<f64>,
    b: &DVector<f64>,
    alpha: &DVector<f64>,
) -> DVector<f64> {
    DVector::from_fn(alpha.len(), |k, _| a[k] - b[k] / (alpha[k] * alpha[k]))
}

/// Majorizer `g(α | α_t) = Σ_k (A_k α_k + B_k / α_k) + C` of the log-det
/// objective, tight at `α_t`.
///
/// It comes from linearizing the concave `log det R(α)` at `α_t` and doing the
/// same for `log det Q(α)` viewed as a function of `1/α`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateCoeffs {
    pub a: DVector<f64>,
    pub b: DVector<f64>,
    /// `f(α_t) - 2qr`.
    pub constant: f64,
}

impl SurrogateCoeffs {
    pub fn value(&self, alpha: &DVector<f64>) -> f64 {
        let sep: f64 = (0..alpha.len())
            .map(|k| self.a[k] * alpha[k] + self.b[k] / alpha[k])
            .sum();
        sep + self.constant
    }

    pub fn gradient(&self, alpha: &DVector<f64>) -> DVector<f64> {
        gradient_from_terms(&self.a, &self.b, alpha)
    }

    /// Unconstrained minimizer `α_k = sqrt(B_k / A_k)`.
    pub fn minimizer(&self) -> DVector<f64> {
        self.a.zip_map(&self.b, |a, b| (b / a).sqrt())
    }
}

pub fn surrogate_coeffs(problem: &SumProblem, alpha_t: &AlphaVector) -> Result<SurrogateCoeffs> {
    check(problem, alpha_t)?;
    let eval = FamilyEval::new(problem, alpha_t.values(), 0.0)?;
    Ok(coeffs_from_eval(problem, &eval))
}

pub(crate) fn coeffs_from_eval(problem: &SumProblem, eval: &FamilyEval) -> SurrogateCoeffs {
    let (a, b) = eval.trace_terms(problem);
    let qr = (problem.q() * problem.r()) as f64;
    SurrogateCoeffs {
        a,
        b,
        constant: eval.logdet() - 2.0 * qr,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ellipsoid::MatrixEllipsoid;
    use crate::problem::SumTerm;

    fn symmetric_pair() -> SumProblem {
        let one = DMatrix::from_element(1, 1, 1.0);
        let e = MatrixEllipsoid::centered(one.clone(), one.clone()).unwrap();
        SumProblem::new(vec![
            SumTerm::new(one.clone(), e.clone(), one.clone()).unwrap(),
            SumTerm::new(one.clone(), e, one).unwrap(),
        ])
        .unwrap()
    }

    fn single() -> SumProblem {
        let q1 = DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let r1 = DMatrix::from_row_slice(3, 3, &[1.5, -0.2, 0.0, -0.2, 0.7, 0.1, 0.0, 0.1, 1.1]);
        let e = MatrixEllipsoid::centered(q1, r1).unwrap();
        SumProblem::new(vec![SumTerm::new(
            DMatrix::identity(2, 2),
            e,
            DMatrix::identity(3, 3),
        )
        .unwrap()])
        .unwrap()
    }

    #[test]
    fn singleton_objective_is_summand_logdet() {
        let p = single();
        let e = p.terms()[0].ellipsoid();
        let f = objective_logdet(&p, &AlphaVector::from_slice(&[1.0]).unwrap()).unwrap();
        let expected = 2.0 * e.right().determinant().ln() + 3.0 * e.left().determinant().ln();
        assert!((f - expected).abs() < 1e-12);
    }

    #[test]
    fn symmetric_pair_is_stationary_at_half() {
        let p = symmetric_pair();
        let g = gradient_logdet(&p, &AlphaVector::from_slice(&[0.5, 0.5]).unwrap()).unwrap();
        assert!(g.amax() < 1e-14);
    }

    #[test]
    fn surrogate_is_tight_at_expansion_point() {
        let p = single();
        let at = AlphaVector::from_slice(&[0.7]).unwrap();
        let c = surrogate_coeffs(&p, &at).unwrap();
        let f = objective_logdet(&p, &at).unwrap();
        assert!((c.value(at.values()) - f).abs() < 1e-12 * f.abs().max(1.0));
        // Σ A_k α_k = Σ B_k / α_k = qr
        assert!((c.a[0] * 0.7 - 6.0).abs() < 1e-12);
        assert!((c.b[0] / 0.7 - 6.0).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_invalid_input() {
        let p = symmetric_pair();
        let err = objective_logdet(&p, &AlphaVector::from_slice(&[1.0]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn degenerate_family_reported() {
        let p = symmetric_pair();
        let eval = FamilyEval::new(&p, &DVector::from_vec(vec![1.0, 1.0]), 1e300);
        assert!(matches!(eval, Err(Error::Degenerate(_))));
    }
}
