//! Discretization of Fredholm integral operators on compact intervals with
//! an eye on positivity: composite quadrature rules and Nyström operators,
//! collocation and Bubnov-Galerkin projection schemes together with audits
//! of whether each discretization maps cone-nonnegative data to
//! cone-nonnegative output, and dominant-eigenpair studies against the exact
//! Laplace-kernel ground truth.
//!
//! The crate is organized along the pipeline:
//!
//! * [`cone`] — orthant cones, order relations, matrix positivity classes;
//! * [`quadrature`] — summed midpoint/trapezoid/Milne/Gauss rules and
//!   convergence-order diagnostics;
//! * [`kernel`] — dispersal kernels and matrix-valued kernels with sampled
//!   positivity audits;
//! * [`linalg`] — closed-form tridiagonal inverses, power iteration,
//!   bisection;
//! * [`nystrom`] — the discrete Fredholm operator over a quadrature rule;
//! * [`projection`] — basis families, collocation matrices, σ-functions,
//!   the positivity-preserving cubic blend and Galerkin schemes;
//! * [`eigen`] — eigenproblem assembly per method, Krein-Rutman-style
//!   sign diagnostics and convergence studies.

pub mod cone;
pub mod eigen;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod matrix;
pub mod nystrom;
pub mod projection;
pub mod quadrature;

pub use cone::{OrderRelation, OrthantCone, PositivityClass};
pub use eigen::{
    convergence_study, exact_laplace_dominant, run_eigen, ConvergenceStudy, EigenReport,
    MethodKind, MethodSpec, StudyRow,
};
pub use error::{Error, Result};
pub use kernel::{kernel_positivity_audit, KernelAudit, KernelFamily, MatrixKernel, ScalarKernel};
pub use linalg::{bisection_root, dominant_eigenpair, EigenPair, Tridiagonal};
pub use matrix::Matrix;
pub use nystrom::{NystromOperator, PositivityViolation};
pub use projection::{
    cubic_pp_project, pc_galerkin_scheme, pl_galerkin_scheme, uniform_grid, Basis,
    CollocationScheme, CubicBlend, GalerkinScheme, SigmaAudit,
};
pub use quadrature::{estimate_order, QuadratureRule, RuleFamily};
