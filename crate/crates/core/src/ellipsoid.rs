//! Matrix ellipsoids `E(C, Q, R) = { X : (X - C)^T Q^{-1} (X - C) <= R }`.

use nalgebra::{Cholesky, DMatrix, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::linalg;

/// Which part of an ellipsoid a sampler draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleMode {
    Interior,
    Boundary,
}

#[derive(Debug, Clone)]
pub struct MatrixEllipsoid {
    center: DMatrix<f64>,
    left: DMatrix<f64>,
    right: DMatrix<f64>,
    left_chol: Cholesky<f64, Dyn>,
    left_sqrt: DMatrix<f64>,
    right_sqrt: DMatrix<f64>,
}

impl MatrixEllipsoid {
    /// Builds `E(C, Q, R)`. `Q` and `R` are symmetrized and must be positive
    /// definite and well enough conditioned to admit a square root.
    pub fn new(center: DMatrix<f64>, left: DMatrix<f64>, right: DMatrix<f64>) -> Result<Self> {
        let left = linalg::symmetrize(&left, "Q")?;
        let right = linalg::symmetrize(&right, "R")?;
        linalg::check_shape(&center, left.nrows(), right.nrows(), "C")?;
        if center.iter().any(|v| !v.is_finite()) {
            return Err(invalid("C has non-finite entries"));
        }
        let left_chol = linalg::cholesky(&left, "Q")?;
        linalg::cholesky(&right, "R")?;
        let left_sqrt = linalg::sqrt_pd(&left, "Q")?;
        let right_sqrt = linalg::sqrt_pd(&right, "R")?;
        Ok(Self {
            center,
            left,
            right,
            left_chol,
            left_sqrt,
            right_sqrt,
        })
    }

    /// Ellipsoid centred at the origin, `E^0(Q, R)`.
    pub fn centered(left: DMatrix<f64>, right: DMatrix<f64>) -> Result<Self> {
        let center = DMatrix::zeros(left.nrows(), right.nrows());
        Self::new(center, left, right)
    }

    pub fn center(&self) -> &DMatrix<f64> {
        &self.center
    }

    /// Left shape matrix `Q` (`q x q`).
    pub fn left(&self) -> &DMatrix<f64> {
        &self.left
    }

    /// Right shape matrix `R` (`r x r`).
    pub fn right(&self) -> &DMatrix<f64> {
        &self.right
    }

    pub fn left_chol(&self) -> &Cholesky<f64, Dyn> {
        &self.left_chol
    }

    pub fn left_sqrt(&self) -> &DMatrix<f64> {
        &self.left_sqrt
    }

    pub fn right_sqrt(&self) -> &DMatrix<f64> {
        &self.right_sqrt
    }

    pub fn q(&self) -> usize {
        self.left.nrows()
    }

    pub fn r(&self) -> usize {
        self.right.nrows()
    }

    /// Same point set with the parameters rescaled to `(C, Q/a, a R)`.
    pub fn rescaled(&self, a: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(invalid(format!(
                "rescaling factor must be positive, got {a}"
            )));
        }
        Self::new(self.center.clone(), &self.left / a, &self.right * a)
    }

    /// Default membership slack, `1e-9 (1 + |R|_2)`.
    pub fn default_tol(&self) -> f64 {
        1e-9 * (1.0 + linalg::spectral_norm(&self.right))
    }

    /// Smallest eigenvalue of `R - (X - C)^T Q^{-1} (X - C)`. Non-negative
    /// exactly on the ellipsoid.
    pub fn margin(&self, x: &DMatrix<f64>) -> Result<f64> {
        linalg::check_shape(x, self.q(), self.r(), "X")?;
        let d = x - &self.center;
        Ok(margin_with(&self.left_chol, &self.right, &d))
    }

    pub fn contains(&self, x: &DMatrix<f64>, tol: f64) -> Result<bool> {
        if !(tol >= 0.0) {
            return Err(invalid(format!(
                "tolerance must be non-negative, got {tol}"
            )));
        }
        Ok(self.margin(x)? >= -tol)
    }

    /// `C + Q^{1/2} S R^{1/2}`, the explicit parameterization of the set.
    pub fn map_unit(&self, s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        linalg::check_shape(s, self.q(), self.r(), "S")?;
        Ok(&self.center + &self.left_sqrt * s * &self.right_sqrt)
    }

    pub fn sample<G: Rng + ?Sized>(&self, mode: SampleMode, rng: &mut G) -> DMatrix<f64> {
        let s = sample_spectral_ball(self.q(), self.r(), mode, rng);
        &self.center + &self.left_sqrt * s * &self.right_sqrt
    }

    pub fn to_pi(&self) -> PiMatrix {
        let (q, r) = (self.q(), self.r());
        let qinv_c = self.left_chol.solve(&self.center);
        let ct_qinv_c = self.center.transpose() * &qinv_c;
        let qinv = self.left_chol.inverse();

        let mut pi = DMatrix::zeros(r + q, r + q);
        pi.view_mut((0, 0), (r, r))
            .copy_from(&(&self.right - ct_qinv_c));
        pi.view_mut((0, r), (r, q)).copy_from(&qinv_c.transpose());
        pi.view_mut((r, 0), (q, r)).copy_from(&qinv_c);
        pi.view_mut((r, r), (q, q)).copy_from(&(-qinv));
        PiMatrix { pi, r, q }
    }

    pub fn from_pi(pi: &PiMatrix) -> Result<Self> {
        let (r, q) = (pi.r, pi.q);
        let m = &pi.pi;
        let neg_qinv = -m.view((r, r), (q, q)).into_owned();
        let neg_qinv = linalg::symmetrize(&neg_qinv, "-Pi_22")?;
        let chol = linalg::cholesky(&neg_qinv, "-Pi_22")?;
        let left = chol.inverse();
        let qinv_c = m.view((r, 0), (q, r)).into_owned();
        let center = &left * &qinv_c;
        let right = m.view((0, 0), (r, r)).into_owned() + center.transpose() * &qinv_c;
        Self::new(center, left, right)
    }
}

pub(crate) fn margin_with(
    left_chol: &Cholesky<f64, Dyn>,
    right: &DMatrix<f64>,
    d: &DMatrix<f64>,
) -> f64 {
    // Q = L L^T, so D^T Q^{-1} D = Y^T Y with Y = L^{-1} D.
    let y = left_chol
        .l_dirty()
        .solve_lower_triangular(d)
        .expect("Cholesky factor has a positive diagonal");
    let mut s = right - y.transpose() * y;
    s = (&s + s.transpose()) * 0.5;
    linalg::min_eigenvalue(&s)
}

/// Symmetric block form
/// `[[R - C^T Q^{-1} C, C^T Q^{-1}], [Q^{-1} C, -Q^{-1}]]`, of size
/// `(r + q) x (r + q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiMatrix {
    pi: DMatrix<f64>,
    r: usize,
    q: usize,
}

impl PiMatrix {
    /// Wraps a block matrix whose top-left block is `r x r`.
    pub fn new(pi: DMatrix<f64>, r: usize) -> Result<Self> {
        if !pi.is_square() || pi.nrows() <= r || r == 0 {
            return Err(invalid(format!(
                "Pi must be square with more than r={r} rows, got {}x{}",
                pi.nrows(),
                pi.ncols()
            )));
        }
        let q = pi.nrows() - r;
        let pi = linalg::symmetrize(&pi, "Pi")?;
        Ok(Self { pi, r, q })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.pi
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }
}

/// Draws `S` with `|S|_2 <= 1` (interior) or `|S|_2 = 1` (boundary).
///
/// A Gaussian matrix is normalized by its largest singular value; interior
/// draws are then shrunk by `u^{1/(qr)}` with `u` uniform on `(0, 1]`.
pub fn sample_spectral_ball<G: Rng + ?Sized>(
    q: usize,
    r: usize,
    mode: SampleMode,
    rng: &mut G,
) -> DMatrix<f64> {
    loop {
        let g = DMatrix::<f64>::from_fn(q, r, |_, _| rng.sample(StandardNormal));
        let norm = linalg::spectral_norm(&g);
        if norm > 0.0 && norm.is_finite() {
            let scale = match mode {
                SampleMode::Boundary => 1.0,
                SampleMode::Interior => {
                    let u: f64 = 1.0 - rng.random::<f64>();
                    u.powf(1.0 / (q * r) as f64)
                }
            };
            return g * (scale / norm);
        }
    }
}

/// `tr(R ⊗ Q) = tr(R) tr(Q)`, the sum of squared semi-axes.
pub fn size_trace(left: &DMatrix<f64>, right: &DMatrix<f64>) -> Result<f64> {
    linalg::cholesky(left, "Q")?;
    linalg::cholesky(right, "R")?;
    Ok(left.trace() * right.trace())
}

/// `log det(R ⊗ Q) = q log det R + r log det Q`, the log-volume up to a constant.
pub fn size_logdet(left: &DMatrix<f64>, right: &DMatrix<f64>) -> Result<f64> {
    let lq = linalg::logdet(&linalg::cholesky(left, "Q")?);
    let lr = linalg::logdet(&linalg::cholesky(right, "R")?);
    Ok(left.nrows() as f64 * lr + right.nrows() as f64 * lq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(c: f64, q: f64, r: f64) -> MatrixEllipsoid {
        MatrixEllipsoid::new(
            DMatrix::from_element(1, 1, c),
            DMatrix::from_element(1, 1, q),
            DMatrix::from_element(1, 1, r),
        )
        .unwrap()
    }

    fn random_pd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        &a * a.transpose() + DMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn center_is_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = DMatrix::from_fn(3, 2, |i, j| (i + 2 * j) as f64);
        let e = MatrixEllipsoid::new(c.clone(), random_pd(3, &mut rng), random_pd(2, &mut rng))
            .unwrap();
        assert!(e.contains(&c, 0.0).unwrap());
    }

    #[test]
    fn unit_ellipsoid_is_spectral_ball() {
        let e =
            MatrixEllipsoid::centered(DMatrix::identity(2, 2), DMatrix::identity(3, 3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = sample_spectral_ball(2, 3, SampleMode::Boundary, &mut rng);
        let tol = e.default_tol();
        let delta = 1e-6;
        assert!(!e.contains(&(&s * (1.0 + delta)), tol).unwrap());
        assert!(e.contains(&(&s * (1.0 - delta)), tol).unwrap());
    }

    #[test]
    fn scalar_interval() {
        let e = scalar(0.0, 4.0, 1.0);
        let tol = e.default_tol();
        assert!(e.contains(&DMatrix::from_element(1, 1, 2.0), tol).unwrap());
        assert!(e.contains(&DMatrix::from_element(1, 1, -2.0), tol).unwrap());
        assert!(!e.contains(&DMatrix::from_element(1, 1, 2.1), tol).unwrap());
    }

    #[test]
    fn contains_rejects_wrong_shape() {
        let e = scalar(0.0, 1.0, 1.0);
        let err = e.contains(&DMatrix::zeros(2, 1), 1e-9).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
    }

    #[test]
    fn rejects_indefinite_shapes() {
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            MatrixEllipsoid::centered(bad, DMatrix::identity(1, 1)),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn zero_unit_maps_to_center() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = DMatrix::from_fn(2, 2, |i, j| 1.0 + i as f64 - j as f64);
        let e = MatrixEllipsoid::new(c.clone(), random_pd(2, &mut rng), random_pd(2, &mut rng))
            .unwrap();
        assert_eq!(e.map_unit(&DMatrix::zeros(2, 2)).unwrap(), c);
    }

    #[test]
    fn boundary_samples_of_unit_ellipsoid_have_unit_norm() {
        let e =
            MatrixEllipsoid::centered(DMatrix::identity(3, 3), DMatrix::identity(2, 2)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let x = e.sample(SampleMode::Boundary, &mut rng);
            assert!((linalg::spectral_norm(&x) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn interior_samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = DMatrix::from_fn(3, 2, |i, j| 0.3 * i as f64 - 0.7 * j as f64);
        let e = MatrixEllipsoid::new(c, random_pd(3, &mut rng), random_pd(2, &mut rng)).unwrap();
        let tol = e.default_tol();
        for _ in 0..10_000 {
            let x = e.sample(SampleMode::Interior, &mut rng);
            assert!(e.contains(&x, tol).unwrap());
        }
    }

    #[test]
    fn boundary_samples_touch_the_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let e = MatrixEllipsoid::centered(random_pd(4, &mut rng), random_pd(3, &mut rng)).unwrap();
        for _ in 0..200 {
            let x = e.sample(SampleMode::Boundary, &mut rng);
            let m = e.margin(&x).unwrap();
            assert!(
                m.abs() < 1e-9 * (1.0 + linalg::spectral_norm(e.right())),
                "margin {m}"
            );
        }
    }

    #[test]
    fn pi_of_unit_ellipsoid() {
        let e =
            MatrixEllipsoid::centered(DMatrix::identity(2, 2), DMatrix::identity(3, 3)).unwrap();
        let pi = e.to_pi();
        let mut expected = DMatrix::identity(5, 5);
        for i in 3..5 {
            expected[(i, i)] = -1.0;
        }
        assert_eq!(pi.matrix(), &expected);
    }

    #[test]
    fn pi_scalar_hand_value() {
        let pi = scalar(1.0, 2.0, 3.0).to_pi();
        let expected = DMatrix::from_row_slice(2, 2, &[2.5, 0.5, 0.5, -0.5]);
        assert!((pi.matrix() - expected).norm() < 1e-15);
    }

    #[test]
    fn from_pi_rejects_non_negative_block() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.5]);
        let pi = PiMatrix::new(m, 1).unwrap();
        assert!(MatrixEllipsoid::from_pi(&pi).is_err());
    }

    #[test]
    fn size_functionals_diagonal() {
        let q = DMatrix::identity(2, 2) * 2.0;
        let r = DMatrix::identity(3, 3) * 3.0;
        assert!((size_logdet(&q, &r).unwrap() - 6.0 * 6f64.ln()).abs() < 1e-12);
        assert_eq!(
            size_trace(&DMatrix::identity(4, 4), &DMatrix::identity(3, 3)).unwrap(),
            12.0
        );
        assert!(matches!(
            size_logdet(&-q, &r),
            Err(Error::NotPositiveDefinite(_))
        ));
    }
}
