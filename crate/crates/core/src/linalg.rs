//! Small dense helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, Dyn, SymmetricEigen};

use crate::error::{invalid, Error, Result};

/// Relative asymmetry accepted before a matrix is rejected as non-symmetric.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Eigenvalues below this fraction of the largest one make a shape matrix
/// unusable for square roots.
pub const SQRT_EIG_FLOOR: f64 = 1e-14;

pub fn symmetrize(a: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(invalid(format!(
            "{what} must be square, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(invalid(format!("{what} has non-finite entries")));
    }
    let asym = (a - a.transpose()).norm();
    if asym > SYMMETRY_TOL * a.norm() {
        return Err(invalid(format!(
            "{what} is not symmetric (|A - A^T|_F = {asym:.3e})"
        )));
    }
    Ok((a + a.transpose()) * 0.5)
}

pub fn cholesky(a: &DMatrix<f64>, what: &str) -> Result<Cholesky<f64, Dyn>> {
    Cholesky::new(a.clone()).ok_or_else(|| Error::NotPositiveDefinite(what.to_string()))
}

/// `log det` from a Cholesky factor.
pub fn logdet(chol: &Cholesky<f64, Dyn>) -> f64 {
    2.0 * chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|d| d.ln())
        .sum::<f64>()
}

/// Smallest squared pivot of a Cholesky factor, i.e. the smallest diagonal
/// entry of the `D` in `L D L^T`.
pub fn min_pivot(chol: &Cholesky<f64, Dyn>) -> f64 {
    chol.l_dirty()
        .diagonal()
        .iter()
        .map(|d| d * d)
        .fold(f64::INFINITY, f64::min)
}

/// Principal square root of a positive definite matrix.
pub fn sqrt_pd(a: &DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(a.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(max > 0.0) || min < SQRT_EIG_FLOOR * max {
        return Err(Error::NotPositiveDefinite(format!(
            "{what} (eigenvalues in [{min:.3e}, {max:.3e}])"
        )));
    }
    let roots = eig.eigenvalues.map(f64::sqrt);
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.transpose())
}

pub fn min_eigenvalue(sym: &DMatrix<f64>) -> f64 {
    if sym.is_empty() {
        return f64::INFINITY;
    }
    SymmetricEigen::new(sym.clone()).eigenvalues.min()
}

pub fn spectral_norm(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().max()
}

/// `tr(A^T B)`, which is `tr(A B)` when `A` is symmetric.
pub fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn check_shape(m: &DMatrix<f64>, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(invalid(format!(
            "{what} has shape {}x{}, expected {rows}x{cols}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}
