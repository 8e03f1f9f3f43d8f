//! Minkowski sums `T = F_1 E_1 G_1 ⊕ ... ⊕ F_K E_K G_K` of transformed
//! matrix ellipsoids.

use nalgebra::DMatrix;

use crate::ellipsoid::MatrixEllipsoid;
use crate::error::{invalid, Result};

/// Singular values below `RANK_TOL * sigma_max` count as zero in [`preprocess`].
pub const RANK_TOL: f64 = 1e-10;

/// One summand `F E(C_k, Q_k, R_k) G`.
#[derive(Debug, Clone)]
pub struct SumTerm {
    left_map: DMatrix<f64>,
    ellipsoid: MatrixEllipsoid,
    right_map: DMatrix<f64>,
    // F Q_k F^T and G^T R_k G, the blocks the bounding family is built from.
    left_block: DMatrix<f64>,
    right_block: DMatrix<f64>,
    left_inv: DMatrix<f64>,
}

impl SumTerm {
    /// `left_map` is `F` (`q x q_k`), `right_map` is `G` (`r_k x r`).
    pub fn new(
        left_map: DMatrix<f64>,
        ellipsoid: MatrixEllipsoid,
        right_map: DMatrix<f64>,
    ) -> Result<Self> {
        if left_map.ncols() != ellipsoid.q() || left_map.nrows() == 0 {
            return Err(invalid(format!(
                "F is {}x{} but the ellipsoid has q_k={}",
                left_map.nrows(),
                left_map.ncols(),
                ellipsoid.q()
            )));
        }
        if right_map.nrows() != ellipsoid.r() || right_map.ncols() == 0 {
            return Err(invalid(format!(
                "G is {}x{} but the ellipsoid has r_k={}",
                right_map.nrows(),
                right_map.ncols(),
                ellipsoid.r()
            )));
        }
        if left_map
            .iter()
            .chain(right_map.iter())
            .any(|v| !v.is_finite())
        {
            return Err(invalid("F or G has non-finite entries"));
        }
        if is_zero(&left_map) || is_zero(&right_map) {
            return Err(invalid("F and G must be nonzero"));
        }
        let left_block = sym(&left_map * ellipsoid.left() * left_map.transpose());
        let right_block = sym(right_map.transpose() * ellipsoid.right() * &right_map);
        let left_inv = ellipsoid.left_chol().inverse();
        Ok(Self {
            left_map,
            ellipsoid,
            right_map,
            left_block,
            right_block,
            left_inv,
        })
    }

    pub fn left_map(&self) -> &DMatrix<f64> {
        &self.left_map
    }

    pub fn right_map(&self) -> &DMatrix<f64> {
        &self.right_map
    }

    pub fn ellipsoid(&self) -> &MatrixEllipsoid {
        &self.ellipsoid
    }

    /// `F Q_k F^T`.
    pub fn left_block(&self) -> &DMatrix<f64> {
        &self.left_block
    }

    /// `G^T R_k G`.
    pub fn right_block(&self) -> &DMatrix<f64> {
        &self.right_block
    }

    /// Cached `Q_k^{-1}`.
    pub fn left_inverse(&self) -> &DMatrix<f64> {
        &self.left_inv
    }

    /// `F X G` for a point `X` of the summand's own space.
    pub fn transform(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        &self.left_map * x * &self.right_map
    }
}

fn sym(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

fn is_zero(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| *v == 0.0)
}

#[derive(Debug, Clone)]
pub struct SumProblem {
    terms: Vec<SumTerm>,
    q: usize,
    r: usize,
}

impl SumProblem {
    pub fn new(terms: Vec<SumTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| invalid("problem has no terms"))?;
        let (q, r) = (first.left_map.nrows(), first.right_map.ncols());
        for (k, t) in terms.iter().enumerate() {
            if t.left_map.nrows() != q || t.right_map.ncols() != r {
                return Err(invalid(format!(
                    "term {k} maps into {}x{}, expected {q}x{r}",
                    t.left_map.nrows(),
                    t.right_map.ncols()
                )));
            }
        }
        Ok(Self { terms, q, r })
    }

    /// Builds a problem from raw `(F, E, G)` triples, dropping summands whose
    /// `F` or `G` is zero since they contribute only the origin.
    pub fn from_parts(parts: Vec<(DMatrix<f64>, MatrixEllipsoid, DMatrix<f64>)>) -> Result<Self> {
        let mut terms = Vec::with_capacity(parts.len());
        for (k, (f, e, g)) in parts.into_iter().enumerate() {
            if is_zero(&f) || is_zero(&g) {
                log::warn!("dropping term {k}: zero F or G");
                continue;
            }
            terms.push(SumTerm::new(f, e, g)?);
        }
        if terms.is_empty() {
            return Err(invalid("all terms are zero"));
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[SumTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `sum_k F_k C_k G_k`, the center of the Minkowski sum.
    pub fn center(&self) -> DMatrix<f64> {
        self.terms
            .iter()
            .fold(DMatrix::zeros(self.q, self.r), |acc, t| {
                acc + t.transform(t.ellipsoid.center())
            })
    }

    /// `[F_1 ... F_K]`.
    pub fn stacked_left(&self) -> DMatrix<f64> {
        let cols = self.terms.iter().map(|t| t.left_map.ncols()).sum();
        let mut out = DMatrix::zeros(self.q, cols);
        let mut at = 0;
        for t in &self.terms {
            out.view_mut((0, at), (self.q, t.left_map.ncols()))
                .copy_from(&t.left_map);
            at += t.left_map.ncols();
        }
        out
    }

    /// `[G_1; ...; G_K]`.
    pub fn stacked_right(&self) -> DMatrix<f64> {
        let rows = self.terms.iter().map(|t| t.right_map.nrows()).sum();
        let mut out = DMatrix::zeros(rows, self.r);
        let mut at = 0;
        for t in &self.terms {
            out.view_mut((at, 0), (t.right_map.nrows(), self.r))
                .copy_from(&t.right_map);
            at += t.right_map.nrows();
        }
        out
    }

    /// Whether stacked `F` has full row rank and stacked `G` full column rank.
    pub fn has_full_rank(&self, rank_tol: f64) -> bool {
        numerical_rank(&self.stacked_left(), rank_tol) == self.q
            && numerical_rank(&self.stacked_right(), rank_tol) == self.r
    }
}

fn numerical_rank(m: &DMatrix<f64>, rank_tol: f64) -> usize {
    let sv = m.singular_values();
    let max = sv.max();
    sv.iter().filter(|s| **s > rank_tol * max).count()
}

/// Result of [`preprocess`]: an equivalent full-rank problem plus the
/// orthonormal factors relating it to the original space.
///
/// Original sum points are `X = F̄ X' Ḡ` where `X'` is a point of the reduced
/// problem; `F̄` has orthonormal columns and `Ḡ` orthonormal rows.
#[derive(Debug, Clone)]
pub struct Reduction {
    pub problem: SumProblem,
    /// `F̄` (`q x q'`), `None` when stacked `F` already has full row rank.
    pub left_factor: Option<DMatrix<f64>>,
    /// `Ḡ` (`r' x r`), `None` when stacked `G` already has full column rank.
    pub right_factor: Option<DMatrix<f64>>,
}

impl Reduction {
    pub fn is_identity(&self) -> bool {
        self.left_factor.is_none() && self.right_factor.is_none()
    }

    /// Maps a reduced-space point back to the original space.
    pub fn lift(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        if let Some(f) = &self.left_factor {
            out = f * out;
        }
        if let Some(g) = &self.right_factor {
            out *= g;
        }
        out
    }

    /// Maps an original-space point into reduced coordinates. Exact inverse
    /// of [`Reduction::lift`] on the range of the factors.
    pub fn project(&self, x: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = x.clone();
        if let Some(f) = &self.left_factor {
            out = f.transpose() * out;
        }
        if let Some(g) = &self.right_factor {
            out *= g.transpose();
        }
        out
    }

    /// Original-space shape pair `(F̄ Q F̄^T, Ḡ^T R Ḡ)`. Singular whenever a
    /// reduction took place.
    pub fn lift_shapes(
        &self,
        left: &DMatrix<f64>,
        right: &DMatrix<f64>,
    ) -> (DMatrix<f64>, DMatrix<f64>) {
        let l = match &self.left_factor {
            Some(f) => f * left * f.transpose(),
            None => left.clone(),
        };
        let r = match &self.right_factor {
            Some(g) => g.transpose() * right * g,
            None => right.clone(),
        };
        (l, r)
    }
}

/// Reduces a problem so stacked `F` has full row rank and stacked `G` full
/// column rank, using rank factorizations from the SVD.
pub fn preprocess(problem: &SumProblem, rank_tol: f64) -> Result<Reduction> {
    let left_factor = range_basis(&problem.stacked_left(), rank_tol)?;
    let right_factor = range_basis(&problem.stacked_right().transpose(), rank_tol)?;
    let left_factor = left_factor.filter(|f| f.ncols() < problem.q());
    let right_factor = right_factor.filter(|g| g.ncols() < problem.r());
    if left_factor.is_none() && right_factor.is_none() {
        return Ok(Reduction {
            problem: problem.clone(),
            left_factor: None,
            right_factor: None,
        });
    }
    let right_factor = right_factor.map(|v| v.transpose());

    let mut terms = Vec::with_capacity(problem.len());
    for t in problem.terms() {
        let f = match &left_factor {
            Some(fb) => fb.transpose() * &t.left_map,
            None => t.left_map.clone(),
        };
        let g = match &right_factor {
            Some(gb) => &t.right_map * gb.transpose(),
            None => t.right_map.clone(),
        };
        terms.push(SumTerm::new(f, t.ellipsoid.clone(), g)?);
    }
    Ok(Reduction {
        problem: SumProblem::new(terms)?,
        left_factor,
        right_factor,
    })
}

/// Orthonormal basis of the column space, or an error for a zero matrix.
fn range_basis(m: &DMatrix<f64>, rank_tol: f64) -> Result<Option<DMatrix<f64>>> {
    let svd = m.clone().svd(true, false);
    let max = svd.singular_values.max();
    if !(max > 0.0) {
        return Err(invalid("stacked F or G is zero"));
    }
    let u = svd.u.expect("requested U");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rank_tol * max)
        .collect();
    if keep.len() == m.nrows() {
        return Ok(None);
    }
    Ok(Some(u.select_columns(&keep)))
}
