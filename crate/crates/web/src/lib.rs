//! Browser demo: planar (`q = 2`, `r = 1`) sums of ellipses, their trace- and
//! volume-optimal bounding ellipses, and the bound for hand-picked weights.
//!
//! Everything the page needs goes through [`Demo`]; point lists come back as
//! flat `[x0, y0, x1, y1, ...]` arrays.

use ellsum::generate::{generate_problem, GeneratorConfig};
use ellsum::verify::sample_sum_point;
use ellsum::{
    family, normalize, solve_mm, trace_optimal_alpha, AlphaVector, Init, MmConfig, SampleMode,
    SumProblem,
};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

pub const MAX_TERMS: usize = 12;

/// Boundary of `{x : x^T Q^{-1} x <= r}` in the plane.
pub fn ellipse_outline(left: &DMatrix<f64>, r: f64, n: usize) -> Vec<f64> {
    let eig = SymmetricEigen::new(left.clone());
    let axes = eig
        .eigenvectors
        .map_with_location(|_, j, v| v * (eig.eigenvalues[j].max(0.0) * r).sqrt());
    let mut out = Vec::with_capacity(2 * (n + 1));
    for i in 0..=n {
        let t = std::f64::consts::TAU * i as f64 / n as f64;
        let p = &axes * nalgebra::Vector2::new(t.cos(), t.sin());
        out.extend_from_slice(&[p[0], p[1]]);
    }
    out
}

/// Area `π r sqrt(det Q)` of a planar ellipse.
pub fn ellipse_area(left: &DMatrix<f64>, r: f64) -> f64 {
    std::f64::consts::PI * r * left.determinant().max(0.0).sqrt()
}

/// Solved planar problem plus the two reference bounds.
#[wasm_bindgen]
pub struct Demo {
    problem: SumProblem,
    trace_alpha: AlphaVector,
    mm_alpha: AlphaVector,
    mm_history: Vec<f64>,
}

impl Demo {
    pub fn build(terms: usize, seed: u32) -> Result<Self, String> {
        if terms == 0 || terms > MAX_TERMS {
            return Err(format!("number of terms must be 1..={MAX_TERMS}"));
        }
        let problem = generate_problem(&GeneratorConfig::vector(2, terms, seed as u64))
            .map_err(|e| e.to_string())?;
        let trace_alpha = trace_optimal_alpha(&problem).map_err(|e| e.to_string())?;
        let rep = solve_mm(
            &problem,
            &MmConfig {
                init: Init::TraceOptimal,
                epsilon: 1e-10,
                ..MmConfig::default()
            },
        )
        .map_err(|e| e.to_string())?;
        Ok(Self {
            problem,
            trace_alpha,
            mm_alpha: rep.alpha_final,
            mm_history: rep.objective_trace,
        })
    }

    fn weights(&self, alpha: &[f64]) -> Result<AlphaVector, String> {
        if alpha.len() != self.problem.len() {
            return Err(format!("expected {} weights", self.problem.len()));
        }
        let a = AlphaVector::from_slice(alpha).map_err(|e| e.to_string())?;
        normalize(&self.problem, &a).map_err(|e| e.to_string())
    }

    pub fn outline_for(&self, alpha: &AlphaVector, n: usize) -> Result<Vec<f64>, String> {
        let b = family(&self.problem, alpha).map_err(|e| e.to_string())?;
        Ok(ellipse_outline(&b.left, b.right[(0, 0)], n))
    }

    pub fn area_for(&self, alpha: &AlphaVector) -> Result<f64, String> {
        let b = family(&self.problem, alpha).map_err(|e| e.to_string())?;
        Ok(ellipse_area(&b.left, b.right[(0, 0)]))
    }

    pub fn problem(&self) -> &SumProblem {
        &self.problem
    }
}

#[wasm_bindgen]
impl Demo {
    /// Random planar problem with `terms` summands.
    #[wasm_bindgen(constructor)]
    pub fn new(terms: usize, seed: u32) -> Result<Demo, JsError> {
        Self::build(terms, seed).map_err(|e| JsError::new(&e))
    }

    pub fn terms(&self) -> usize {
        self.problem.len()
    }

    /// Outline of each summand, `n + 1` points apiece, concatenated.
    pub fn summand_outlines(&self, n: usize) -> Vec<f64> {
        self.problem
            .terms()
            .iter()
            .flat_map(|t| {
                let e = t.ellipsoid();
                ellipse_outline(e.left(), e.right()[(0, 0)], n)
            })
            .collect()
    }

    /// Points of the Minkowski sum, drawn from summand boundaries.
    pub fn sum_samples(&self, count: usize, seed: u32) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64);
        (0..count)
            .flat_map(|_| {
                let x = sample_sum_point(&self.problem, SampleMode::Boundary, &mut rng);
                [x[(0, 0)], x[(1, 0)]]
            })
            .collect()
    }

    pub fn trace_outline(&self, n: usize) -> Vec<f64> {
        self.outline_for(&self.trace_alpha, n).unwrap_or_default()
    }

    pub fn mm_outline(&self, n: usize) -> Vec<f64> {
        self.outline_for(&self.mm_alpha, n).unwrap_or_default()
    }

    pub fn trace_alpha(&self) -> Vec<f64> {
        self.trace_alpha.as_slice().to_vec()
    }

    pub fn mm_alpha(&self) -> Vec<f64> {
        self.mm_alpha.as_slice().to_vec()
    }

    pub fn trace_area(&self) -> f64 {
        self.area_for(&self.trace_alpha).unwrap_or(f64::NAN)
    }

    pub fn mm_area(&self) -> f64 {
        self.area_for(&self.mm_alpha).unwrap_or(f64::NAN)
    }

    /// Log-det objective after each MM iteration (the first entry is the start).
    pub fn mm_history(&self) -> Vec<f64> {
        self.mm_history.clone()
    }

    /// Bounding ellipse for arbitrary positive weights.
    pub fn alpha_outline(&self, alpha: Vec<f64>, n: usize) -> Result<Vec<f64>, JsError> {
        let a = self.weights(&alpha).map_err(|e| JsError::new(&e))?;
        self.outline_for(&a, n).map_err(|e| JsError::new(&e))
    }

    pub fn alpha_area(&self, alpha: Vec<f64>) -> Result<f64, JsError> {
        let a = self.weights(&alpha).map_err(|e| JsError::new(&e))?;
        self.area_for(&a).map_err(|e| JsError::new(&e))
    }
}

/// Even-odd point-in-polygon test against a flat outline.
pub fn inside_outline(outline: &[f64], x: f64, y: f64) -> bool {
    let pts: Vec<(f64, f64)> = outline.chunks(2).map(|c| (c[0], c[1])).collect();
    let mut inside = false;
    for i in 0..pts.len() {
        let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
        if (a.1 > y) != (b.1 > y) && x < a.0 + (y - a.1) * (b.0 - a.0) / (b.1 - a.1) {
            inside = !inside;
        }
    }
    inside
}
