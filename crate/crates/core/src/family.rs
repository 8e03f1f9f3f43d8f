//! The α-parameterized family of bounding ellipsoids
//!
//! ```text
//! Q(α) = Σ_k (1/α_k) F_k Q_k F_k^T,    R(α) = Σ_k α_k G_k^T R_k G_k
//! ```
//!
//! Every member with α > 0 contains the centred Minkowski sum, and every
//! bounding ellipsoid certified by the S-procedure conditions is dominated by
//! some member. `f(cα) = f(α)` for any size criterion of `R ⊗ Q`, so the scale
//! is fixed by the slice `tr R(α) = r`.

use nalgebra::{DMatrix, DVector};

use crate::ellipsoid::MatrixEllipsoid;
use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::problem::SumProblem;

/// Relative tolerance on `tr R(α) = r` for a vector to count as normalized.
pub const NORMALIZED_TOL: f64 = 1e-9;

/// Absolute tolerance on minimum eigenvalues in the certificate checks.
pub const FEASIBILITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaVector {
    values: DVector<f64>,
    normalized: bool,
}

impl AlphaVector {
    /// Strictly positive, finite weights.
    pub fn new(values: DVector<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(invalid("alpha is empty"));
        }
        if let Some(k) = values.iter().position(|a| !(*a > 0.0) || !a.is_finite()) {
            return Err(invalid(format!(
                "alpha[{k}] = {} is not strictly positive",
                values[k]
            )));
        }
        Ok(Self {
            values,
            normalized: false,
        })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(values))
    }

    /// Wraps `values`, flagging it normalized if `tr R(α) = r` holds for
    /// `problem`.
    pub fn for_problem(problem: &SumProblem, values: DVector<f64>) -> Result<Self> {
        let mut a = Self::new(values)?;
        check_len(problem, &a)?;
        let r = problem.r() as f64;
        a.normalized = ((right_trace(problem, &a.values) - r) / r).abs() <= NORMALIZED_TOL;
        Ok(a)
    }

    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.as_slice()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Whether the vector lies on the slice `tr R(α) = r`.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.values
    }
}

fn check_len(problem: &SumProblem, alpha: &AlphaVector) -> Result<()> {
    if alpha.len() != problem.len() {
        return Err(invalid(format!(
            "alpha has {} entries for {} terms",
            alpha.len(),
            problem.len()
        )));
    }
    Ok(())
}

/// `tr R(α) = Σ α_k tr(G_k^T R_k G_k)`.
pub fn right_trace(problem: &SumProblem, alpha: &DVector<f64>) -> f64 {
    problem
        .terms()
        .iter()
        .zip(alpha.iter())
        .map(|(t, a)| a * t.right_block().trace())
        .sum()
}

/// `(Q(α), R(α))` without any definiteness check.
pub fn family_shapes(problem: &SumProblem, alpha: &DVector<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut left = DMatrix::zeros(problem.q(), problem.q());
    let mut right = DMatrix::zeros(problem.r(), problem.r());
    for (t, &a) in problem.terms().iter().zip(alpha.iter()) {
        left += t.left_block() / a;
        right += t.right_block() * a;
    }
    (left, right)
}

/// A member of the bounding family together with the weights that produced it.
#[derive(Debug, Clone)]
pub struct BoundingEllipsoid {
    pub left: DMatrix<f64>,
    pub right: DMatrix<f64>,
    pub alpha: AlphaVector,
    pub center: DMatrix<f64>,
}

impl BoundingEllipsoid {
    pub fn to_ellipsoid(&self) -> Result<MatrixEllipsoid> {
        MatrixEllipsoid::new(self.center.clone(), self.left.clone(), self.right.clone())
    }

    /// Same member centred at the origin.
    pub fn to_centered(&self) -> Result<MatrixEllipsoid> {
        MatrixEllipsoid::centered(self.left.clone(), self.right.clone())
    }
}

pub fn family(problem: &SumProblem, alpha: &AlphaVector) -> Result<BoundingEllipsoid> {
    check_len(problem, alpha)?;
    let (left, right) = family_shapes(problem, alpha.values());
    if linalg::cholesky(&left, "Q(alpha)").is_err() || linalg::cholesky(&right, "R(alpha)").is_err()
    {
        return Err(Error::AssumptionViolation(
            "Q(alpha) or R(alpha) is singular; stacked F/G must have full rank".into(),
        ));
    }
    Ok(BoundingEllipsoid {
        left,
        right,
        alpha: alpha.clone(),
        center: problem.center(),
    })
}

/// Rescales α onto the slice `tr R(α) = r`. The induced `R ⊗ Q` is unchanged.
pub fn normalize(problem: &SumProblem, alpha: &AlphaVector) -> Result<AlphaVector> {
    check_len(problem, alpha)?;
    let scale = problem.r() as f64 / right_trace(problem, alpha.values());
    Ok(AlphaVector {
        values: alpha.values() * scale,
        normalized: true,
    })
}

/// Checks the S-procedure certificate
///
/// ```text
/// diag_k(α_k Q_k^{-1}) - F^T P F ⪰ 0,    R - Σ_k α_k G_k^T R_k G_k ⪰ 0
/// ```
///
/// with minimum eigenvalues allowed down to `-tol`. When it holds,
/// `E^0(P^{-1}, R)` contains the centred sum. `alpha` may contain zeros.
pub fn check_lmi_feasibility(
    problem: &SumProblem,
    precision: &DMatrix<f64>,
    right: &DMatrix<f64>,
    alpha: &[f64],
    tol: f64,
) -> Result<bool> {
    linalg::check_shape(precision, problem.q(), problem.q(), "P")?;
    linalg::check_shape(right, problem.r(), problem.r(), "R")?;
    if alpha.len() != problem.len() {
        return Err(invalid(format!(
            "alpha has {} entries for {} terms",
            alpha.len(),
            problem.len()
        )));
    }
    if alpha.iter().any(|a| !(*a >= 0.0)) {
        return Err(invalid("alpha must be non-negative"));
    }

    let stacked = problem.stacked_left();
    let mut block = -(stacked.transpose() * precision * &stacked);
    let mut at = 0;
    for (t, &a) in problem.terms().iter().zip(alpha) {
        let n = t.left_inverse().nrows();
        let mut view = block.view_mut((at, at), (n, n));
        view += t.left_inverse() * a;
        at += n;
    }
    let block = (&block + block.transpose()) * 0.5;
    if linalg::min_eigenvalue(&block) < -tol {
        return Ok(false);
    }

    let (_, r_alpha) = family_shapes(problem, &DVector::from_column_slice(alpha));
    let gap = right - r_alpha;
    let gap = (&gap + gap.transpose()) * 0.5;
    Ok(linalg::min_eigenvalue(&gap) >= -tol)
}

/// Checks `Q(α) ⪯ Q` and `R(α) ⪯ R` up to `tol`, which certifies
/// `E^0(Q(α), R(α)) ⊆ E^0(Q, R)`.
pub fn certify_dominance(
    problem: &SumProblem,
    alpha: &AlphaVector,
    left: &DMatrix<f64>,
    right: &DMatrix<f64>,
    tol: f64,
) -> Result<bool> {
    check_len(problem, alpha)?;
    linalg::check_shape(left, problem.q(), problem.q(), "Q")?;
    linalg::check_shape(right, problem.r(), problem.r(), "R")?;
    let (l_alpha, r_alpha) = family_shapes(problem, alpha.values());
    let dl = left - l_alpha;
    let dr = right - r_alpha;
    Ok(
        linalg::min_eigenvalue(&((&dl + dl.transpose()) * 0.5)) >= -tol
            && linalg::min_eigenvalue(&((&dr + dr.transpose()) * 0.5)) >= -tol,
    )
}
