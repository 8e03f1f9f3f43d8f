//! Outer approximation of Minkowski sums of matrix ellipsoids.
//!
//! Given summands `F_k E(C_k, Q_k, R_k) G_k`, the crate builds bounding
//! ellipsoids from the family
//!
//! ```text
//! Q(α) = Σ_k (1/α_k) F_k Q_k F_k^T,    R(α) = Σ_k α_k G_k^T R_k G_k,    α > 0
//! ```
//!
//! centred at `Σ_k F_k C_k G_k`. Every member contains the sum. The weights
//! are chosen either in closed form (trace criterion, [`optim::solve_trace`])
//! or by majorization-minimization on `log det(R(α) ⊗ Q(α))`
//! ([`optim::solve_mm`]).

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ellipsoid;
pub mod error;
pub mod family;
pub mod generate;
pub mod linalg;
pub mod optim;
pub mod problem;
pub mod verify;

pub use ellipsoid::{size_logdet, size_trace, MatrixEllipsoid, PiMatrix, SampleMode};
pub use error::{Error, Result};
pub use family::{
    certify_dominance, check_lmi_feasibility, family, normalize, AlphaVector, BoundingEllipsoid,
};
pub use optim::{
    gradient_logdet, mm_step, objective_logdet, objective_trace, solve_mm, solve_projgrad,
    solve_trace, surrogate_coeffs, trace_optimal_alpha, Init, MmConfig, OptimizerReport, StopRule,
    SurrogateCoeffs, Termination,
};
pub use problem::{preprocess, Reduction, SumProblem, SumTerm};
