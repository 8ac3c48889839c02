//! Dominant-eigenpair studies: eigenproblem assembly for each discretization
//! method, sign-change and positivity reporting, the exact Laplace-kernel
//! eigenvalue, and convergence studies against it.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::cone::OrthantCone;
use crate::error::{Error, Result};
use crate::kernel::MatrixKernel;
use crate::linalg::{bisection_root, dominant_eigenpair};
use crate::matrix::Matrix;
use crate::nystrom::NystromOperator;
use crate::projection::{uniform_grid, Basis, CollocationScheme, CubicBlend};
use crate::quadrature::{least_squares_slope, QuadratureRule, RuleFamily};

/// Iteration budget for the eigensolver.
const MAX_ITER: usize = 50_000;

/// Relative threshold below which an eigenvector entry counts as a sign
/// change after normalization to peak `+1`.
const SIGN_TOL: f64 = 1e-8;

/// Eigenproblem discretization kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodKind {
    Nystrom(RuleFamily),
    CollocationHat,
    CollocationLagrange,
    CollocationCubicPP,
    GalerkinPC,
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MethodKind::Nystrom(family) => write!(f, "nystrom-{family}"),
            MethodKind::CollocationHat => f.write_str("collocation-hat"),
            MethodKind::CollocationLagrange => f.write_str("collocation-lagrange"),
            MethodKind::CollocationCubicPP => f.write_str("collocation-cubicpp"),
            MethodKind::GalerkinPC => f.write_str("galerkin-pc"),
        }
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "collocation-hat" => Ok(MethodKind::CollocationHat),
            "collocation-lagrange" => Ok(MethodKind::CollocationLagrange),
            "collocation-cubicpp" => Ok(MethodKind::CollocationCubicPP),
            "galerkin-pc" => Ok(MethodKind::GalerkinPC),
            other => {
                if let Some(rule) = other.strip_prefix("nystrom-") {
                    Ok(MethodKind::Nystrom(rule.parse()?))
                } else {
                    Err(Error::InvalidParameter(format!("unknown method '{other}'")))
                }
            }
        }
    }
}

/// A discretization method with its resolution.
///
/// For Nyström methods `n` is the number of quadrature nodes (the composite
/// rule is sized to produce exactly that many). For projection methods `n`
/// is the number of grid subintervals.
#[derive(Clone, Copy, Debug)]
pub struct MethodSpec {
    pub kind: MethodKind,
    pub n: usize,
    /// Rule family for the inner integrals of projection methods.
    pub inner_rule: RuleFamily,
}

impl MethodSpec {
    pub fn new(kind: MethodKind, n: usize) -> Self {
        Self {
            kind,
            n,
            inner_rule: RuleFamily::Midpoint,
        }
    }
}

/// Outcome of one eigenvalue computation.
#[derive(Clone, Debug)]
pub struct EigenReport {
    pub method: MethodSpec,
    pub lambda_hat: f64,
    /// Eigenvector normalized so its peak-magnitude entry is `+1`.
    pub eigvec: Vec<f64>,
    pub error_vs_exact: Option<f64>,
    /// Entries below `-1e-8` after normalization.
    pub sign_changes: usize,
    /// Whether the method-specific positivity criterion held.
    pub positivity_pass: bool,
}

/// Dominant eigenvalue of the Laplace-kernel operator on `[-L/2, L/2]`: the
/// smallest positive root `ν` of `tan(Lν/(2α)) = 1/ν` gives `λ = 1/(1+ν²)`.
pub fn exact_laplace_dominant(l: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(l > 0.0 && alpha > 0.0) {
        return Err(Error::InvalidParameter(
            "laplace eigenvalue needs L > 0 and alpha > 0".into(),
        ));
    }
    let c = l / (2.0 * alpha);
    // tan(cν) sweeps (0, ∞) on (0, π/(2c)) while 1/ν falls from ∞: exactly
    // one crossing inside the bracket.
    let hi = PI / (2.0 * c) - 1e-9;
    let nu = bisection_root(|v| (c * v).tan() - 1.0 / v, 1e-9, hi, 1e-14)?;
    Ok((nu, 1.0 / (1.0 + nu * nu)))
}

/// Assembles the eigenproblem matrix `K^n` for the method. Matrix-valued
/// kernels produce block matrices in component-major layout.
pub fn assemble_eigen_matrix(
    method: &MethodSpec,
    kernel: &MatrixKernel,
    a: f64,
    b: f64,
) -> Result<Matrix> {
    match method.kind {
        MethodKind::Nystrom(family) => {
            let subintervals = family.subintervals_for_nodes(method.n)?;
            let rule = QuadratureRule::compose(family, a, b, subintervals)?;
            Ok(NystromOperator::assemble(kernel.clone(), rule)?.matrix)
        }
        MethodKind::CollocationHat => {
            require_projection_n(method.n)?;
            let grid = uniform_grid(a, b, method.n);
            let basis = Basis::hat(grid.clone())?;
            assemble_lagrange_property_blocks(kernel, &basis, &grid, method, a, b)
        }
        MethodKind::CollocationLagrange => {
            require_projection_n(method.n)?;
            let points = uniform_grid(a, b, method.n);
            let basis = Basis::lagrange(points.clone())?;
            assemble_lagrange_property_blocks(kernel, &basis, &points, method, a, b)
        }
        MethodKind::CollocationCubicPP => {
            require_projection_n(method.n)?;
            assemble_cubic_blocks(kernel, method, a, b)
        }
        MethodKind::GalerkinPC => {
            require_projection_n(method.n)?;
            assemble_galerkin_pc_blocks(kernel, method, a, b)
        }
    }
}

fn require_projection_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidParameter(
            "projection methods need n >= 2 subintervals".into(),
        ));
    }
    Ok(())
}

/// Blocks `∫ k(x_i, y) φ_j(y) dy` for a Lagrange-property basis, with the
/// inner integral over the whole interval at `4n` panels of the inner rule.
fn assemble_lagrange_property_blocks(
    kernel: &MatrixKernel,
    basis: &Basis,
    points: &[f64],
    method: &MethodSpec,
    a: f64,
    b: f64,
) -> Result<Matrix> {
    let d = kernel.dim();
    let n_fn = basis.len();
    let inner = QuadratureRule::compose(method.inner_rule, a, b, 4 * method.n)?;
    let q = inner.nodes.len();
    // basis values at the quadrature nodes, shared by all blocks
    let phi = Matrix::from_fn(q, n_fn, |qi, j| basis.eval(j, inner.nodes[qi]));
    let mut out = Matrix::zeros(d * n_fn, d * n_fn);
    for i1 in 0..d {
        for i2 in 0..d {
            let entry = kernel.entry(i1, i2);
            let weighted = Matrix::from_fn(n_fn, q, |i, qi| {
                inner.weights[qi] * entry.eval(points[i], inner.nodes[qi])
            });
            let block = weighted.matmul(&phi);
            for i in 0..n_fn {
                for j in 0..n_fn {
                    let value = block[(i, j)];
                    if !value.is_finite() {
                        return Err(Error::NonFinite(format!(
                            "in collocation block ({i1},{i2}) at row {i}"
                        )));
                    }
                    out[(i1 * n_fn + i, i2 * n_fn + j)] = value;
                }
            }
        }
    }
    Ok(out)
}

/// Blocks for the cubic-blend collocation, assembled as the sum of the two
/// one-sided `(n+1) x (n+1)` summands that define the method: cell `j`
/// contributes its fading-weight integral `∫ k(x_i, y) κ_j(y) dy` to entry
/// `(i, j)` for `i < n`, and its rising-weight integral to entry
/// `(i+1, j+1)` with the same kernel row — i.e. the rising-weight summand
/// is shifted down one row, leaving the last fading row and the first
/// rising row empty. Each cell is integrated at 4 panels of the inner rule.
fn assemble_cubic_blocks(
    kernel: &MatrixKernel,
    method: &MethodSpec,
    a: f64,
    b: f64,
) -> Result<Matrix> {
    let d = kernel.dim();
    let n = method.n;
    let grid = uniform_grid(a, b, n);
    let n_fn = n + 1;
    let mut out = Matrix::zeros(d * n_fn, d * n_fn);
    for cell in 0..n {
        let (lo, hi) = (grid[cell], grid[cell + 1]);
        let rule = QuadratureRule::compose(method.inner_rule, lo, hi, 4)?;
        let rising: Vec<f64> = rule
            .nodes
            .iter()
            .map(|&y| CubicBlend::right_weight((y - lo) / (hi - lo)))
            .collect();
        for i1 in 0..d {
            for i2 in 0..d {
                let entry = kernel.entry(i1, i2);
                for i in 0..n {
                    let mut fading_sum = 0.0;
                    let mut rising_sum = 0.0;
                    for (qi, &y) in rule.nodes.iter().enumerate() {
                        let kv = entry.eval(grid[i], y);
                        if !kv.is_finite() {
                            return Err(Error::NonFinite(format!(
                                "in cubic block ({i1},{i2}) at ({}, {y})",
                                grid[i]
                            )));
                        }
                        let w = rule.weights[qi];
                        fading_sum += w * kv * (1.0 - rising[qi]);
                        rising_sum += w * kv * rising[qi];
                    }
                    out[(i1 * n_fn + i, i2 * n_fn + cell)] += fading_sum;
                    out[(i1 * n_fn + i + 1, i2 * n_fn + cell + 1)] += rising_sum;
                }
            }
        }
    }
    Ok(out)
}

/// Galerkin blocks for the piecewise-constant basis in coefficient space:
/// `h_i^{-1} ∬_{cell_i × cell_j} k(x, y) dy dx`, with 4 panels of the inner
/// rule per cell and direction.
fn assemble_galerkin_pc_blocks(
    kernel: &MatrixKernel,
    method: &MethodSpec,
    a: f64,
    b: f64,
) -> Result<Matrix> {
    let d = kernel.dim();
    let n = method.n;
    let grid = uniform_grid(a, b, n);
    let rules: Vec<QuadratureRule> = (0..n)
        .map(|c| QuadratureRule::compose(method.inner_rule, grid[c], grid[c + 1], 4))
        .collect::<Result<_>>()?;
    let mut out = Matrix::zeros(d * n, d * n);
    for i1 in 0..d {
        for i2 in 0..d {
            let entry = kernel.entry(i1, i2);
            for i in 0..n {
                let h_i = grid[i + 1] - grid[i];
                for j in 0..n {
                    let mut acc = 0.0;
                    for (qx, &x) in rules[i].nodes.iter().enumerate() {
                        let wx = rules[i].weights[qx];
                        for (qy, &y) in rules[j].nodes.iter().enumerate() {
                            let kv = entry.eval(x, y);
                            if !kv.is_finite() {
                                return Err(Error::NonFinite(format!(
                                    "in galerkin block ({i1},{i2}) at ({x}, {y})"
                                )));
                            }
                            acc += wx * rules[j].weights[qy] * kv;
                        }
                    }
                    out[(i1 * n + i, i2 * n + j)] = acc / h_i;
                }
            }
        }
    }
    Ok(out)
}

/// Assembles `K^n`, solves for the dominant eigenpair, and reports sign
/// changes plus the positivity criterion that applies to the method
/// (nonnegative weights and kernel audit for Nyström, σ-function audit for
/// collocation, orthogonal-nonnegative-basis reasoning for the others).
pub fn run_eigen(
    method: &MethodSpec,
    kernel: &MatrixKernel,
    cone: &OrthantCone,
    a: f64,
    b: f64,
    exact: Option<f64>,
    tol: f64,
) -> Result<EigenReport> {
    let matrix = assemble_eigen_matrix(method, kernel, a, b)?;
    let pair = dominant_eigenpair(&matrix, tol, MAX_ITER)?;
    let sign_changes = pair.vector.iter().filter(|&&v| v < -SIGN_TOL).count();
    let positivity_pass = match method.kind {
        MethodKind::Nystrom(family) => {
            let subintervals = family.subintervals_for_nodes(method.n)?;
            let rule = QuadratureRule::compose(family, a, b, subintervals)?;
            let op = NystromOperator::assemble(kernel.clone(), rule)?;
            op.discrete_positivity_check(cone)?.0
        }
        MethodKind::CollocationHat => {
            CollocationScheme::hat(uniform_grid(a, b, method.n))?
                .positivity_audit(2000, 1e-12)?
                .passes
        }
        MethodKind::CollocationLagrange => {
            CollocationScheme::lagrange(uniform_grid(a, b, method.n))?
                .positivity_audit(2000, 1e-12)?
                .passes
        }
        // The cubic blend weights lie in [0, 1] and the piecewise-constant
        // basis is orthogonal and nonnegative; both projections preserve
        // positivity unconditionally.
        MethodKind::CollocationCubicPP | MethodKind::GalerkinPC => true,
    };
    Ok(EigenReport {
        method: *method,
        lambda_hat: pair.value,
        eigvec: pair.vector,
        error_vs_exact: exact.map(|ex| (pair.value - ex).abs()),
        sign_changes,
        positivity_pass,
    })
}

/// One resolution of a convergence study; solver failures are recorded, not
/// propagated.
#[derive(Clone, Debug)]
pub struct StudyRow {
    pub n: usize,
    pub lambda_hat: Option<f64>,
    pub error_vs_exact: Option<f64>,
    pub sign_changes: Option<usize>,
    pub positivity_pass: Option<bool>,
    pub failure: Option<String>,
}

/// Convergence study outcome: per-`n` rows ordered by `n` and the fitted
/// slope of `log error` against `log(1/n)` over the converged rows.
#[derive(Clone, Debug)]
pub struct ConvergenceStudy {
    pub rows: Vec<StudyRow>,
    pub slope: Option<f64>,
}

pub fn convergence_study(
    kind: MethodKind,
    n_list: &[usize],
    kernel: &MatrixKernel,
    cone: &OrthantCone,
    a: f64,
    b: f64,
    exact: f64,
    tol: f64,
) -> Result<ConvergenceStudy> {
    if n_list.len() < 3 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "n_list must be strictly ascending with at least 3 entries".into(),
        ));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let method = MethodSpec::new(kind, n);
        match run_eigen(&method, kernel, cone, a, b, Some(exact), tol) {
            Ok(report) => rows.push(StudyRow {
                n,
                lambda_hat: Some(report.lambda_hat),
                error_vs_exact: report.error_vs_exact,
                sign_changes: Some(report.sign_changes),
                positivity_pass: Some(report.positivity_pass),
                failure: None,
            }),
            Err(err) => rows.push(StudyRow {
                n,
                lambda_hat: None,
                error_vs_exact: None,
                sign_changes: None,
                positivity_pass: None,
                failure: Some(err.to_string()),
            }),
        }
    }
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|row| {
            row.error_vs_exact
                .filter(|&e| e > 0.0)
                .map(|e| ((1.0 / row.n as f64).ln(), e.ln()))
        })
        .collect();
    let slope = if usable.len() >= 2 {
        Some(least_squares_slope(&usable))
    } else {
        None
    };
    Ok(ConvergenceStudy { rows, slope })
}
