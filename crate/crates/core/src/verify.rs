//! Independent checks: sampled containment of the Minkowski sum, dense
//! Kronecker oracles, finite-difference gradients and random problems.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::ellipsoid::{sample_spectral_ball, MatrixEllipsoid, SampleMode};
use crate::error::{invalid, Error, Result};
use crate::family::{AlphaVector, BoundingEllipsoid};
use crate::linalg;
use crate::optim::objective_logdet;
use crate::problem::{SumProblem, SumTerm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContainmentReport {
    pub samples_tested: usize,
    pub violations: usize,
    /// Minimum over samples of `λ_min(R - X^T Q^{-1} X)`.
    pub worst_margin: f64,
}

impl ContainmentReport {
    pub fn empty() -> Self {
        Self {
            samples_tested: 0,
            violations: 0,
            worst_margin: f64::INFINITY,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            samples_tested: self.samples_tested + other.samples_tested,
            violations: self.violations + other.violations,
            worst_margin: self.worst_margin.min(other.worst_margin),
        }
    }
}

/// `Σ_k F_k X_k G_k` with each `X_k` drawn from the centred summand `E_k^0`.
pub fn sample_sum_point<G: Rng + ?Sized>(
    problem: &SumProblem,
    mode: SampleMode,
    rng: &mut G,
) -> DMatrix<f64> {
    problem
        .terms()
        .iter()
        .fold(DMatrix::zeros(problem.q(), problem.r()), |acc, t| {
            acc + t.transform(&sample_centered(t.ellipsoid(), mode, rng))
        })
}

fn sample_centered<G: Rng + ?Sized>(
    e: &MatrixEllipsoid,
    mode: SampleMode,
    rng: &mut G,
) -> DMatrix<f64> {
    let s = sample_spectral_ball(e.q(), e.r(), mode, rng);
    e.left_sqrt() * s * e.right_sqrt()
}

/// Checks sampled points of the centred sum against the centred bounding
/// ellipsoid `E^0(Q, R)`.
pub fn verify_containment<G: Rng + ?Sized>(
    problem: &SumProblem,
    bounding: &BoundingEllipsoid,
    n_samples: usize,
    mode: SampleMode,
    tol: f64,
    rng: &mut G,
) -> Result<ContainmentReport> {
    let e = bounding.to_centered()?;
    linalg::check_shape(e.center(), problem.q(), problem.r(), "bounding ellipsoid")?;
    let mut report = ContainmentReport::empty();
    for _ in 0..n_samples {
        let x = sample_sum_point(problem, mode, rng);
        report = report.merge(check_point(&e, &x, tol)?);
    }
    Ok(report)
}

/// Same as [`verify_containment`] for a fixed batch of sum points, so one
/// batch can be checked against several bounding ellipsoids.
pub fn check_points(
    ellipsoid: &MatrixEllipsoid,
    points: &[DMatrix<f64>],
    tol: f64,
) -> Result<ContainmentReport> {
    points
        .iter()
        .try_fold(ContainmentReport::empty(), |acc, x| {
            Ok(acc.merge(check_point(ellipsoid, x, tol)?))
        })
}

fn check_point(e: &MatrixEllipsoid, x: &DMatrix<f64>, tol: f64) -> Result<ContainmentReport> {
    let m = e.margin(x)?;
    Ok(ContainmentReport {
        samples_tested: 1,
        violations: usize::from(m < -tol),
        worst_margin: m,
    })
}

/// Exact radius `Σ_k |F_k| sqrt(Q_k R_k) |G_k|` of a one-dimensional sum.
pub fn tightness_scalar_oracle(problem: &SumProblem) -> Result<f64> {
    if problem.q() != 1 || problem.r() != 1 {
        return Err(invalid(format!(
            "scalar oracle needs q = r = 1, got {}x{}",
            problem.q(),
            problem.r()
        )));
    }
    problem.terms().iter().try_fold(0.0, |acc, t| {
        let e = t.ellipsoid();
        if e.q() != 1 || e.r() != 1 {
            return Err(invalid("scalar oracle needs scalar summands"));
        }
        let f = t.left_map()[(0, 0)].abs();
        let g = t.right_map()[(0, 0)].abs();
        Ok(acc + f * (e.left()[(0, 0)] * e.right()[(0, 0)]).sqrt() * g)
    })
}

/// Radius `sqrt(Q R)` of a scalar bounding interval divided by the exact
/// radius of the sum. At least 1 for any valid bound.
pub fn scalar_approximation_ratio(
    problem: &SumProblem,
    bounding: &BoundingEllipsoid,
) -> Result<f64> {
    let exact = tightness_scalar_oracle(problem)?;
    Ok((bounding.left[(0, 0)] * bounding.right[(0, 0)]).sqrt() / exact)
}

/// Dense Kronecker product `A ⊗ B`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.kronecker(b)
}

/// `log det(R ⊗ Q)` by factoring the full `qr x qr` product.
pub fn dense_kron_logdet(left: &DMatrix<f64>, right: &DMatrix<f64>) -> Result<f64> {
    let k = kron(right, left);
    let chol = linalg::cholesky(&k, "R ⊗ Q")?;
    Ok(linalg::logdet(&chol))
}

/// `tr(R ⊗ Q)` from the dense product.
pub fn dense_kron_trace(left: &DMatrix<f64>, right: &DMatrix<f64>) -> f64 {
    kron(right, left).trace()
}

/// Central differences of the log-det objective with steps `h_k = rel_step α_k`.
pub fn finite_difference_gradient(
    problem: &SumProblem,
    alpha: &AlphaVector,
    rel_step: f64,
) -> Result<DVector<f64>> {
    let base = alpha.values();
    let mut grad = DVector::zeros(base.len());
    for k in 0..base.len() {
        let h = rel_step * base[k];
        let mut plus = base.clone();
        let mut minus = base.clone();
        plus[k] += h;
        minus[k] -= h;
        let fp = objective_logdet(problem, &AlphaVector::new(plus)?)?;
        let fm = objective_logdet(problem, &AlphaVector::new(minus)?)?;
        grad[k] = (fp - fm) / (2.0 * h);
    }
    Ok(grad)
}

/// Shape of randomly generated test problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomProblemSpec {
    pub q: usize,
    pub r: usize,
    pub terms: usize,
    /// Largest summand dimension `q_k` / `r_k`.
    pub max_inner: usize,
    /// Added to every drawn `N N^T` to keep the shapes well conditioned.
    pub ridge: f64,
    /// Random `F_k`, `G_k` when true; identity maps (needing `q_k = q`,
    /// `r_k = r`) otherwise.
    pub general_maps: bool,
}

impl Default for RandomProblemSpec {
    fn default() -> Self {
        Self {
            q: 3,
            r: 2,
            terms: 4,
            max_inner: 3,
            ridge: 0.5,
            general_maps: true,
        }
    }
}

pub fn random_pd<G: Rng + ?Sized>(n: usize, ridge: f64, rng: &mut G) -> DMatrix<f64> {
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let m = &a * a.transpose() + DMatrix::identity(n, n) * ridge;
    (&m + m.transpose()) * 0.5
}

/// Random problem with well-conditioned summands and, for general maps,
/// redraws until stacked `F` / `G` have full rank.
pub fn random_problem<G: Rng + ?Sized>(
    spec: &RandomProblemSpec,
    rng: &mut G,
) -> Result<SumProblem> {
    if spec.q == 0 || spec.r == 0 || spec.terms == 0 || spec.max_inner == 0 {
        return Err(invalid("random problem dimensions must be positive"));
    }
    for _ in 0..100 {
        let mut terms = Vec::with_capacity(spec.terms);
        for _ in 0..spec.terms {
            let (qk, rk) = if spec.general_maps {
                (
                    rng.random_range(1..=spec.max_inner),
                    rng.random_range(1..=spec.max_inner),
                )
            } else {
                (spec.q, spec.r)
            };
            let center = DMatrix::from_fn(qk, rk, |_, _| rng.sample::<f64, _>(StandardNormal));
            let e = MatrixEllipsoid::new(
                center,
                random_pd(qk, spec.ridge, rng),
                random_pd(rk, spec.ridge, rng),
            )?;
            let (f, g) = if spec.general_maps {
                (
                    DMatrix::from_fn(spec.q, qk, |_, _| rng.sample(StandardNormal)),
                    DMatrix::from_fn(rk, spec.r, |_, _| rng.sample(StandardNormal)),
                )
            } else {
                (
                    DMatrix::identity(spec.q, spec.q),
                    DMatrix::identity(spec.r, spec.r),
                )
            };
            terms.push(SumTerm::new(f, e, g)?);
        }
        let problem = SumProblem::new(terms)?;
        if problem.has_full_rank(1e-6) {
            return Ok(problem);
        }
    }
    Err(Error::AssumptionViolation(
        "could not draw a full-rank problem; increase terms or max_inner".into(),
    ))
}

/// Uniformly random point of the slice `tr R(α) = r` (Dirichlet(1) on the
/// weighted simplex).
pub fn random_slice_point<G: Rng + ?Sized>(
    problem: &SumProblem,
    rng: &mut G,
) -> Result<AlphaVector> {
    let r = problem.r() as f64;
    let e: Vec<f64> = (0..problem.len())
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let sum: f64 = e.iter().sum();
    let values = DVector::from_iterator(
        problem.len(),
        problem
            .terms()
            .iter()
            .zip(&e)
            .map(|(t, ei)| r * ei / sum / t.right_block().trace()),
    );
    AlphaVector::for_problem(problem, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::family;
    use crate::optim::solve_trace;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar_problem(qs: &[f64]) -> SumProblem {
        let one = DMatrix::from_element(1, 1, 1.0);
        SumProblem::new(
            qs.iter()
                .map(|&q| {
                    let e = MatrixEllipsoid::centered(DMatrix::from_element(1, 1, q), one.clone())
                        .unwrap();
                    SumTerm::new(one.clone(), e, one.clone()).unwrap()
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn boundary_points_of_two_unit_intervals() {
        let p = scalar_problem(&[1.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = sample_sum_point(&p, SampleMode::Boundary, &mut rng)[(0, 0)];
            let snapped = [-2.0, 0.0, 2.0].iter().any(|v| (x - v).abs() < 1e-12);
            assert!(snapped, "{x}");
        }
    }

    #[test]
    fn sum_points_stay_in_exact_interval() {
        let p = scalar_problem(&[1.0, 4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for mode in [SampleMode::Boundary, SampleMode::Interior] {
            for _ in 0..1000 {
                let x = sample_sum_point(&p, mode, &mut rng)[(0, 0)];
                assert!(x.abs() <= 3.0 + 1e-12);
            }
        }
    }

    #[test]
    fn scalar_oracle_values() {
        let p = scalar_problem(&[1.0, 4.0]);
        assert!((tightness_scalar_oracle(&p).unwrap() - 3.0).abs() < 1e-15);
        let single = scalar_problem(&[2.0]);
        assert!((tightness_scalar_oracle(&single).unwrap() - 2f64.sqrt()).abs() < 1e-15);

        let (_, b) = solve_trace(&p).unwrap();
        assert!((scalar_approximation_ratio(&p, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scalar_oracle_rejects_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_problem(&RandomProblemSpec::default(), &mut rng).unwrap();
        assert!(matches!(
            tightness_scalar_oracle(&p),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn singleton_family_touches_boundary() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let spec = RandomProblemSpec {
            terms: 1,
            general_maps: false,
            ..RandomProblemSpec::default()
        };
        let p = random_problem(&spec, &mut rng).unwrap();
        let b = family(&p, &AlphaVector::from_slice(&[1.0]).unwrap()).unwrap();
        let rep = verify_containment(&p, &b, 500, SampleMode::Boundary, 1e-9, &mut rng).unwrap();
        assert_eq!(rep.violations, 0);
        assert!(rep.worst_margin.abs() < 1e-9, "{}", rep.worst_margin);
    }

    #[test]
    fn shrunk_bound_is_caught() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_problem(&RandomProblemSpec::default(), &mut rng).unwrap();
        let (_, mut b) = solve_trace(&p).unwrap();
        b.left *= 0.5;
        let rep = verify_containment(&p, &b, 2000, SampleMode::Boundary, 1e-8, &mut rng).unwrap();
        assert!(rep.violations > 0);
    }

    #[test]
    fn random_slice_points_are_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let p = random_problem(&RandomProblemSpec::default(), &mut rng).unwrap();
        for _ in 0..20 {
            assert!(random_slice_point(&p, &mut rng).unwrap().is_normalized());
        }
    }
}
