//! Projection machinery: basis families, collocation matrices and their
//! σ-functions, the positivity-preserving cubic blend, and Bubnov-Galerkin
//! schemes with piecewise-constant and piecewise-linear bases.
//!
//! A collocation scheme stores `P[i][j] = φ_j(x_i)` (rows indexed by
//! collocation points). The σ-functions are the cardinal functions of the
//! scheme, `σ_i(x) = Σ_j (P^{-1})_{ji} φ_j(x)`, so that `σ_i(x_k) = δ_ik`
//! and the projection reads `(Π u)(x) = Σ_i u(x_i) σ_i(x)`. Nonnegativity of
//! all σ-functions is exactly the condition under which the projection
//! preserves cone-positivity.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::Tridiagonal;
use crate::matrix::Matrix;
use crate::quadrature::{QuadratureRule, RuleFamily};

/// Uniform grid `x_j = a + j (b-a)/n`, endpoints included.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    let mut grid: Vec<f64> = (0..=n).map(|j| a + j as f64 * h).collect();
    grid[n] = b;
    grid
}

/// One of the basis families of the ansatz spaces.
#[derive(Clone, Debug)]
pub enum Basis {
    /// Piecewise-linear hat functions on an ascending grid.
    Hat { grid: Vec<f64> },
    /// Lagrange polynomials through pairwise distinct points.
    Lagrange { points: Vec<f64> },
    /// Quadratic B-splines on a uniform knot sequence over `[a, b]`;
    /// `d_n = n + 2` splines indexed from the leftmost.
    QuadBSpline { a: f64, b: f64, n: usize },
    /// Cardinal sine functions under the tanh transform, plus two boundary
    /// ramps; `d_n = 2n + 3`.
    Sinc { a: f64, b: f64, n: usize, step: f64 },
    /// Characteristic functions of the grid cells.
    PiecewiseConstant { grid: Vec<f64> },
}

fn require_ascending(grid: &[f64]) -> Result<()> {
    if grid.len() < 2 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "grid must be strictly ascending with at least 2 points".into(),
        ));
    }
    Ok(())
}

impl Basis {
    pub fn hat(grid: Vec<f64>) -> Result<Self> {
        require_ascending(&grid)?;
        Ok(Basis::Hat { grid })
    }

    pub fn lagrange(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidParameter(
                "lagrange basis needs at least 2 points".into(),
            ));
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::InvalidParameter(format!(
                        "lagrange points must be pairwise distinct, duplicate {}",
                        points[i]
                    )));
                }
            }
        }
        Ok(Basis::Lagrange { points })
    }

    pub fn piecewise_constant(grid: Vec<f64>) -> Result<Self> {
        require_ascending(&grid)?;
        Ok(Basis::PiecewiseConstant { grid })
    }

    /// Dimension `d_n` of the spanned ansatz space.
    pub fn len(&self) -> usize {
        match self {
            Basis::Hat { grid } => grid.len(),
            Basis::Lagrange { points } => points.len(),
            Basis::QuadBSpline { n, .. } => n + 2,
            Basis::Sinc { n, .. } => 2 * n + 3,
            Basis::PiecewiseConstant { grid } => grid.len() - 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Interval the basis lives on.
    pub fn interval(&self) -> (f64, f64) {
        match self {
            Basis::Hat { grid } | Basis::PiecewiseConstant { grid } => {
                (grid[0], grid[grid.len() - 1])
            }
            Basis::Lagrange { points } => {
                let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            Basis::QuadBSpline { a, b, .. } | Basis::Sinc { a, b, .. } => (*a, *b),
        }
    }

    /// Evaluates `φ_i(x)`.
    pub fn eval(&self, i: usize, x: f64) -> f64 {
        match self {
            Basis::Hat { grid } => hat_eval(grid, i, x),
            Basis::Lagrange { points } => lagrange_eval(points, i, x),
            Basis::QuadBSpline { a, b, n } => quad_bspline_eval(*a, *b, *n, i, x),
            Basis::Sinc { a, b, n, step } => sinc_eval(*a, *b, *n, *step, i, x),
            Basis::PiecewiseConstant { grid } => {
                if grid[i] <= x && (x < grid[i + 1] || (i + 2 == grid.len() && x == grid[i + 1])) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Support of `φ_i`, clipped to the basis interval.
    pub fn support(&self, i: usize) -> (f64, f64) {
        match self {
            Basis::Hat { grid } => {
                let n = grid.len() - 1;
                (grid[i.saturating_sub(1)], grid[(i + 1).min(n)])
            }
            Basis::Lagrange { .. } | Basis::Sinc { .. } => self.interval(),
            Basis::QuadBSpline { a, b, n } => {
                let h = (b - a) / *n as f64;
                let lo = a + (i as f64 - 2.0) * h;
                let hi = a + (i as f64 + 1.0) * h;
                (lo.max(*a), hi.min(*b))
            }
            Basis::PiecewiseConstant { grid } => (grid[i], grid[i + 1]),
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Basis::Hat { .. } => "hat",
            Basis::Lagrange { .. } => "lagrange",
            Basis::QuadBSpline { .. } => "quad-bspline",
            Basis::Sinc { .. } => "sinc",
            Basis::PiecewiseConstant { .. } => "piecewise-constant",
        }
    }
}

fn hat_eval(grid: &[f64], j: usize, x: f64) -> f64 {
    let n = grid.len() - 1;
    if j > 0 && x >= grid[j - 1] && x <= grid[j] {
        (x - grid[j - 1]) / (grid[j] - grid[j - 1])
    } else if j < n && x >= grid[j] && x <= grid[j + 1] {
        (grid[j + 1] - x) / (grid[j + 1] - grid[j])
    } else {
        0.0
    }
}

fn lagrange_eval(points: &[f64], j: usize, x: f64) -> f64 {
    let xj = points[j];
    points
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &xk)| (x - xk) / (xj - xk))
        .product()
}

fn quad_bspline_eval(a: f64, b: f64, n: usize, i: usize, x: f64) -> f64 {
    let h = (b - a) / n as f64;
    let knot = |t: isize| a + t as f64 * h;
    let j = i as isize - 2;
    let two_h2 = 2.0 * h * h;
    if x >= knot(j) && x < knot(j + 1) {
        let t = x - knot(j);
        t * t / two_h2
    } else if x >= knot(j + 1) && x < knot(j + 2) {
        let t = x - knot(j + 1);
        (h * h + 2.0 * h * t - 2.0 * t * t) / two_h2
    } else if x >= knot(j + 2) && x < knot(j + 3) {
        let t = knot(j + 3) - x;
        t * t / two_h2
    } else {
        0.0
    }
}

fn cardinal_sine(t: f64) -> f64 {
    if t == 0.0 {
        1.0
    } else {
        (PI * t).sin() / (PI * t)
    }
}

fn sinc_eval(a: f64, b: f64, n: usize, step: f64, i: usize, x: f64) -> f64 {
    let m = i as isize - (n as isize + 1);
    if m == -(n as isize + 1) {
        (b - x) / (b - a)
    } else if m == n as isize + 1 {
        (x - a) / (b - a)
    } else if x <= a || x >= b {
        // limit value of the transformed sinc at the interval ends
        0.0
    } else {
        let t = ((x - a) / (b - x)).ln();
        cardinal_sine((t - m as f64 * step) / step)
    }
}

/// Sampled σ-function audit report.
#[derive(Clone, Debug)]
pub struct SigmaAudit {
    pub min_value: f64,
    /// Sample location attaining the minimum.
    pub argmin: f64,
    /// Whether `min_value >= -tol`.
    pub passes: bool,
}

/// A collocation scheme: basis, collocation points, the collocation matrix
/// `P[i][j] = φ_j(x_i)` and its inverse.
#[derive(Clone, Debug)]
pub struct CollocationScheme {
    pub basis: Basis,
    pub points: Vec<f64>,
    pub matrix: Matrix,
    pub inverse: Matrix,
}

impl CollocationScheme {
    /// Assembles the scheme for an arbitrary basis/point pairing with a
    /// dense inverse. Identity collocation matrices (Lagrange property) are
    /// detected and inverted trivially.
    pub fn from_basis(basis: Basis, points: Vec<f64>) -> Result<Self> {
        let d = basis.len();
        if points.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: points.len(),
            });
        }
        let matrix = Matrix::from_fn(d, d, |i, j| basis.eval(j, points[i]));
        let inverse = if matrix == Matrix::identity(d) {
            Matrix::identity(d)
        } else {
            matrix.inverse()?
        };
        Ok(Self {
            basis,
            points,
            matrix,
            inverse,
        })
    }

    /// Piecewise-linear (hat) collocation on the grid itself; `P = I`.
    pub fn hat(grid: Vec<f64>) -> Result<Self> {
        let basis = Basis::hat(grid.clone())?;
        Self::from_basis(basis, grid)
    }

    /// Polynomial collocation with the Lagrange basis on its own points;
    /// `P = I`.
    pub fn lagrange(points: Vec<f64>) -> Result<Self> {
        let basis = Basis::lagrange(points.clone())?;
        Self::from_basis(basis, points)
    }

    /// Quadratic B-spline collocation with midpoint collocation points; the
    /// collocation matrix is tridiagonal and inverted by the closed-form
    /// tridiagonal formula.
    pub fn quad_bspline(a: f64, b: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(
                "quadratic B-spline collocation needs n >= 3".into(),
            ));
        }
        if !(a < b) {
            return Err(Error::InvalidParameter("need a < b".into()));
        }
        let basis = Basis::QuadBSpline { a, b, n };
        let h = (b - a) / n as f64;
        let d = n + 2;
        let mut points = Vec::with_capacity(d);
        points.push(a);
        for i in 1..=n {
            points.push(a + (i as f64 - 0.5) * h);
        }
        points.push(b);
        let matrix = Matrix::from_fn(d, d, |i, j| basis.eval(j, points[i]));
        let tri = Tridiagonal::new(
            (0..d).map(|i| matrix[(i, i)]).collect(),
            (0..d - 1).map(|i| matrix[(i, i + 1)]).collect(),
            (0..d - 1).map(|i| matrix[(i + 1, i)]).collect(),
        )?;
        let inverse = tri.inverse()?;
        Ok(Self {
            basis,
            points,
            matrix,
            inverse,
        })
    }

    /// Sinc collocation under the tanh transform with boundary ramps. The
    /// step is `h = sqrt(π δ / (α n))` for `δ` in `(0, π)` and growth
    /// parameter `α > 0`; the collocation matrix is a bordered identity and
    /// is inverted densely.
    pub fn sinc(a: f64, b: f64, n: usize, delta: f64, alpha_growth: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParameter(
                "sinc collocation needs n >= 1".into(),
            ));
        }
        if !(a < b) {
            return Err(Error::InvalidParameter("need a < b".into()));
        }
        if !(delta > 0.0 && delta < PI) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, pi), got {delta}"
            )));
        }
        if !(alpha_growth > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "growth parameter must be positive, got {alpha_growth}"
            )));
        }
        let step = (PI * delta / (alpha_growth * n as f64)).sqrt();
        let basis = Basis::Sinc { a, b, n, step };
        let transform = |t: f64| 0.5 * (a + b) + 0.5 * (b - a) * (0.5 * t).tanh();
        let mut points = Vec::with_capacity(2 * n + 3);
        points.push(a);
        for j in -(n as isize)..=(n as isize) {
            points.push(transform(j as f64 * step));
        }
        points.push(b);
        let d = 2 * n + 3;
        let matrix = Matrix::from_fn(d, d, |i, j| basis.eval(j, points[i]));
        let inverse = matrix.inverse()?;
        Ok(Self {
            basis,
            points,
            matrix,
            inverse,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn interval(&self) -> (f64, f64) {
        self.basis.interval()
    }

    /// Cardinal function `σ_i(x) = Σ_j (P^{-1})_{ji} φ_j(x)`.
    pub fn sigma(&self, i: usize, x: f64) -> f64 {
        (0..self.dim())
            .map(|j| self.inverse[(j, i)] * self.basis.eval(j, x))
            .sum()
    }

    /// All σ-values at `x` in one sweep (one basis evaluation per function).
    pub fn sigma_row(&self, x: f64) -> Vec<f64> {
        let d = self.dim();
        let phi: Vec<f64> = (0..d).map(|j| self.basis.eval(j, x)).collect();
        (0..d)
            .map(|i| (0..d).map(|j| self.inverse[(j, i)] * phi[j]).sum())
            .collect()
    }

    /// Samples `min_i σ_i` on a uniform grid and reports the minimum with
    /// its location; the audit passes when the minimum stays above `-tol`.
    pub fn positivity_audit(&self, samples: usize, tol: f64) -> Result<SigmaAudit> {
        if samples < 2 {
            return Err(Error::InvalidParameter(
                "audit needs at least 2 samples".into(),
            ));
        }
        let (a, b) = self.interval();
        let mut min_value = f64::INFINITY;
        let mut argmin = a;
        for s in 0..samples {
            let x = a + (b - a) * s as f64 / (samples - 1) as f64;
            let row_min = self.sigma_row(x).into_iter().fold(f64::INFINITY, f64::min);
            if row_min < min_value {
                min_value = row_min;
                argmin = x;
            }
        }
        Ok(SigmaAudit {
            min_value,
            argmin,
            passes: min_value >= -tol,
        })
    }

    /// Projection `(Π u)(x) = Σ_i u(x_i) σ_i(x)` from samples at the
    /// collocation points; interpolates the data and is idempotent on the
    /// ansatz space.
    pub fn project(&self, u_values: &[f64]) -> Result<impl Fn(f64) -> f64 + '_> {
        if u_values.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u_values.len(),
            });
        }
        // Σ_i u_i σ_i = Σ_j (P^{-1} u)_j φ_j
        let coeffs = self.inverse.matvec(u_values);
        Ok(move |x: f64| {
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * self.basis.eval(j, x))
                .sum()
        })
    }
}

/// The cone-positive piecewise-cubic projection: on each cell the data is
/// blended with the weights `1 - 3θ² + 2θ³` and `3θ² - 2θ³`, both in `[0, 1]`.
/// The result is `C¹` with vanishing derivative at every grid point and its
/// sup-norm is at most twice that of the data.
#[derive(Clone, Debug)]
pub struct CubicBlend {
    grid: Vec<f64>,
    values: Vec<f64>,
}

/// Builds the cubic blend through `u_values` on the grid.
pub fn cubic_pp_project(grid: &[f64], u_values: &[f64]) -> Result<CubicBlend> {
    require_ascending(grid)?;
    if u_values.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: u_values.len(),
        });
    }
    Ok(CubicBlend {
        grid: grid.to_vec(),
        values: u_values.to_vec(),
    })
}

impl CubicBlend {
    /// Blending weight multiplying the right cell value.
    pub fn right_weight(theta: f64) -> f64 {
        theta * theta * (3.0 - 2.0 * theta)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid.len() - 1;
        let x = x.clamp(self.grid[0], self.grid[n]);
        let cell = match self.grid.binary_search_by(|g| g.total_cmp(&x)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i - 1,
        };
        let h = self.grid[cell + 1] - self.grid[cell];
        let theta = (x - self.grid[cell]) / h;
        let w = Self::right_weight(theta);
        (1.0 - w) * self.values[cell] + w * self.values[cell + 1]
    }
}

/// A Bubnov-Galerkin scheme: basis, Gramian and its inverse.
#[derive(Clone, Debug)]
pub struct GalerkinScheme {
    pub basis: Basis,
    pub gramian: Matrix,
    pub gramian_inv: Matrix,
}

/// Piecewise-constant Galerkin scheme; the characteristic-function basis is
/// orthogonal, so the Gramian is `diag(h_0, ..., h_{n-1})`.
pub fn pc_galerkin_scheme(grid: Vec<f64>) -> Result<GalerkinScheme> {
    let basis = Basis::piecewise_constant(grid)?;
    let Basis::PiecewiseConstant { grid } = &basis else {
        unreachable!()
    };
    let n = grid.len() - 1;
    let mut gramian = Matrix::zeros(n, n);
    let mut gramian_inv = Matrix::zeros(n, n);
    for j in 0..n {
        let h = grid[j + 1] - grid[j];
        gramian[(j, j)] = h;
        gramian_inv[(j, j)] = 1.0 / h;
    }
    Ok(GalerkinScheme {
        basis: basis.clone(),
        gramian,
        gramian_inv,
    })
}

impl GalerkinScheme {
    /// σ-values `σ_i(x) = Σ_j (P^{-1})_{ij} φ_j(x)` against the Gramian
    /// inverse; their signs decide whether the projection can preserve
    /// positivity.
    pub fn sigma_row(&self, x: f64) -> Vec<f64> {
        let d = self.basis.len();
        let phi: Vec<f64> = (0..d).map(|j| self.basis.eval(j, x)).collect();
        (0..d)
            .map(|i| (0..d).map(|j| self.gramian_inv[(i, j)] * phi[j]).sum())
            .collect()
    }

    /// Cell means `(Π u)|_{cell j} = h_j^{-1} ∫_{x_j}^{x_{j+1}} u`, each cell
    /// integral evaluated with the supplied rule family at `cells` panels.
    pub fn pc_cell_means(
        &self,
        u: impl Fn(f64) -> f64,
        family: RuleFamily,
        cells: usize,
    ) -> Result<Vec<f64>> {
        let Basis::PiecewiseConstant { grid } = &self.basis else {
            return Err(Error::InvalidParameter(
                "cell means need a piecewise-constant scheme".into(),
            ));
        };
        let mut means = Vec::with_capacity(grid.len() - 1);
        for j in 0..grid.len() - 1 {
            let rule = QuadratureRule::compose(family, grid[j], grid[j + 1], cells)?;
            means.push(rule.integrate(&u)? / (grid[j + 1] - grid[j]));
        }
        Ok(means)
    }
}

/// Piecewise-linear Galerkin scheme on a uniform grid: the hat-function
/// Gramian is the tridiagonal `(b-a)/(6n) · tridiag(1; 2,4,...,4,2; 1)`,
/// inverted by the closed-form tridiagonal formula.
pub fn pl_galerkin_scheme(grid: Vec<f64>) -> Result<GalerkinScheme> {
    require_ascending(&grid)?;
    let n = grid.len() - 1;
    if n < 2 {
        return Err(Error::InvalidParameter(
            "piecewise-linear Galerkin needs n >= 2".into(),
        ));
    }
    let (a, b) = (grid[0], grid[n]);
    let h = (b - a) / n as f64;
    for w in grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-12 * (b - a) {
            return Err(Error::InvalidParameter(
                "piecewise-linear Galerkin needs a uniform grid".into(),
            ));
        }
    }
    let scale = (b - a) / (6.0 * n as f64);
    let diag: Vec<f64> = (0..=n)
        .map(|i| {
            if i == 0 || i == n {
                2.0 * scale
            } else {
                4.0 * scale
            }
        })
        .collect();
    let off = vec![scale; n];
    let tri = Tridiagonal::new(diag, off.clone(), off)?;
    let gramian_inv = tri.inverse()?;
    Ok(GalerkinScheme {
        basis: Basis::hat(grid)?,
        gramian: tri.to_dense(),
        gramian_inv,
    })
}
