//! Dispersal kernels and matrix-valued kernels, with sampled positivity
//! audits against an orthant cone.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::cone::{OrthantCone, PositivityClass};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quadrature::QuadratureRule;

/// The six dispersal-kernel families, all normalized to unit mass on the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelFamily {
    Gauss,
    Cauchy,
    Laplace,
    ExpSqrt,
    TopHat,
    Tent,
}

impl fmt::Display for KernelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            KernelFamily::Gauss => "gauss",
            KernelFamily::Cauchy => "cauchy",
            KernelFamily::Laplace => "laplace",
            KernelFamily::ExpSqrt => "exp-sqrt",
            KernelFamily::TopHat => "top-hat",
            KernelFamily::Tent => "tent",
        };
        f.write_str(name)
    }
}

impl FromStr for KernelFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gauss" => Ok(KernelFamily::Gauss),
            "cauchy" => Ok(KernelFamily::Cauchy),
            "laplace" => Ok(KernelFamily::Laplace),
            "exp-sqrt" | "expsqrt" => Ok(KernelFamily::ExpSqrt),
            "top-hat" | "tophat" => Ok(KernelFamily::TopHat),
            "tent" => Ok(KernelFamily::Tent),
            other => Err(Error::InvalidParameter(format!(
                "unknown kernel '{other}' (expected gauss|cauchy|laplace|exp-sqrt|top-hat|tent)"
            ))),
        }
    }
}

/// A scalar kernel `k(x, y)`; dispersal kernels are of convolution form
/// `k(x, y) = k̃(x - y)`.
#[derive(Clone)]
pub struct ScalarKernel {
    eval: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub description: String,
    /// Dispersal rate, where applicable.
    pub alpha: Option<f64>,
    pub is_convolution: bool,
}

impl fmt::Debug for ScalarKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarKernel")
            .field("description", &self.description)
            .field("alpha", &self.alpha)
            .field("is_convolution", &self.is_convolution)
            .finish()
    }
}

impl ScalarKernel {
    pub fn new(
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        description: impl Into<String>,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            description: description.into(),
            alpha: None,
            is_convolution: false,
        }
    }

    /// Constant kernel `k ≡ c`.
    pub fn constant(c: f64) -> Self {
        let mut k = Self::new(move |_, _| c, format!("constant {c}"));
        k.is_convolution = true;
        k
    }

    /// Dispersal kernel `k(x, y) = k̃(x - y)` of the given family with rate
    /// `alpha > 0`.
    pub fn dispersal(family: KernelFamily, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "dispersal rate must be positive, got {alpha}"
            )));
        }
        let profile: Arc<dyn Fn(f64) -> f64 + Send + Sync> = match family {
            KernelFamily::Gauss => {
                let norm = 1.0 / (2.0 * std::f64::consts::PI * alpha * alpha).sqrt();
                Arc::new(move |z: f64| norm * (-0.5 * z * z / (alpha * alpha)).exp())
            }
            KernelFamily::Cauchy => {
                Arc::new(move |z: f64| alpha / (std::f64::consts::PI * (alpha * alpha + z * z)))
            }
            KernelFamily::Laplace => {
                Arc::new(move |z: f64| (-z.abs() / alpha).exp() / (2.0 * alpha))
            }
            KernelFamily::ExpSqrt => {
                Arc::new(move |z: f64| (-(z.abs() / alpha).sqrt()).exp() / (4.0 * alpha))
            }
            KernelFamily::TopHat => Arc::new(move |z: f64| {
                if z.abs() < alpha {
                    1.0 / (2.0 * alpha)
                } else {
                    0.0
                }
            }),
            KernelFamily::Tent => Arc::new(move |z: f64| (1.0 - z.abs() / alpha).max(0.0) / alpha),
        };
        Ok(Self {
            eval: Arc::new(move |x, y| profile(x - y)),
            description: format!("{family} dispersal kernel, alpha={alpha}"),
            alpha: Some(alpha),
            is_convolution: true,
        })
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    /// Convolution profile `k̃(z) = k(z, 0)`.
    pub fn profile(&self, z: f64) -> f64 {
        self.eval(z, 0.0)
    }

    /// Numerical mass `∫_a^b k̃(y) dy` under the given rule; close to one
    /// whenever `[a, b]` covers the effective support.
    pub fn mass(&self, rule: &QuadratureRule) -> Result<f64> {
        rule.integrate(|y| self.profile(y))
    }
}

/// A `d x d` grid of scalar kernels defining a matrix-valued kernel `K(x,y)`.
#[derive(Clone, Debug)]
pub struct MatrixKernel {
    d: usize,
    entries: Vec<ScalarKernel>,
}

impl MatrixKernel {
    /// Wraps a scalar kernel as the `1 x 1` matrix kernel.
    pub fn scalar(kernel: ScalarKernel) -> Self {
        Self {
            d: 1,
            entries: vec![kernel],
        }
    }

    /// Builds a kernel from a row-major `d x d` grid of entries.
    pub fn from_entries(d: usize, entries: Vec<ScalarKernel>) -> Result<Self> {
        if d == 0 || entries.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                got: entries.len(),
            });
        }
        Ok(Self { d, entries })
    }

    /// The block-triangular two-species system with Laplace diagonal blocks
    /// and coupling entry `-k(x, y)`; positive on the south-east cone for
    /// any strictly positive continuous `k`.
    pub fn laplace_system(alpha1: f64, alpha2: f64, coupling: ScalarKernel) -> Result<Self> {
        let zero = ScalarKernel::new(|_, _| 0.0, "zero");
        let neg = ScalarKernel::new(move |x, y| -coupling.eval(x, y), "negated coupling");
        Self::from_entries(
            2,
            vec![
                ScalarKernel::dispersal(KernelFamily::Laplace, alpha1)?,
                neg,
                zero,
                ScalarKernel::dispersal(KernelFamily::Laplace, alpha2)?,
            ],
        )
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarKernel {
        &self.entries[i * self.d + j]
    }

    /// Pointwise value matrix `K(x, y)`.
    pub fn value_at(&self, x: f64, y: f64) -> Matrix {
        Matrix::from_fn(self.d, self.d, |i, j| self.entry(i, j).eval(x, y))
    }
}

/// Result of a sampled kernel positivity audit.
#[derive(Clone, Debug)]
pub struct KernelAudit {
    /// Weakest class over all sampled `(x, y)` pairs.
    pub class: PositivityClass,
    /// A sample point attaining the weakest class.
    pub witness: (f64, f64),
}

/// Classifies a matrix kernel by the weakest pointwise positivity class over
/// the sample grid `xs × ys`. Strictness is not certified pointwise, so
/// classes are drawn from `{NotPositive, Positive, StronglyPositive}`; this
/// is sampled evidence, not a proof.
pub fn kernel_positivity_audit(
    kernel: &MatrixKernel,
    cone: &OrthantCone,
    xs: &[f64],
    ys: &[f64],
) -> Result<KernelAudit> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidParameter(
            "positivity audit needs nonempty sample grids".into(),
        ));
    }
    let mut weakest = PositivityClass::StronglyPositive;
    let mut witness = (xs[0], ys[0]);
    for &x in xs {
        for &y in ys {
            let class = cone.matrix_positivity_class(&kernel.value_at(x, y), false)?;
            if class < weakest {
                weakest = class;
                witness = (x, y);
            }
        }
    }
    Ok(KernelAudit {
        class: weakest,
        witness,
    })
}

/// Uniform grid of `count >= 2` points on `[a, b]`, endpoints included.
pub fn sample_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    let step = (b - a) / (count - 1) as f64;
    (0..count).map(|i| a + i as f64 * step).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::RuleFamily;
    use approx::assert_abs_diff_eq;

    #[test]
    fn laplace_profile_at_zero() {
        let k = ScalarKernel::dispersal(KernelFamily::Laplace, 1.0).unwrap();
        assert_abs_diff_eq!(k.profile(0.0), 0.5);
    }

    #[test]
    fn top_hat_support_is_the_open_ball() {
        let k = ScalarKernel::dispersal(KernelFamily::TopHat, 0.5).unwrap();
        assert_abs_diff_eq!(k.profile(0.4), 1.0);
        assert_abs_diff_eq!(k.profile(0.6), 0.0);
        assert_abs_diff_eq!(k.profile(0.5), 0.0);
    }

    #[test]
    fn tent_vanishes_at_the_support_boundary() {
        let k = ScalarKernel::dispersal(KernelFamily::Tent, 1.0).unwrap();
        assert_abs_diff_eq!(k.profile(1.0), 0.0);
        assert_abs_diff_eq!(k.profile(0.0), 1.0);
    }

    #[test]
    fn nonpositive_rate_is_rejected() {
        assert!(ScalarKernel::dispersal(KernelFamily::Gauss, 0.0).is_err());
        assert!(ScalarKernel::dispersal(KernelFamily::Gauss, -1.0).is_err());
    }

    #[test]
    fn profiles_are_nonnegative_and_even() {
        for family in [
            KernelFamily::Gauss,
            KernelFamily::Cauchy,
            KernelFamily::Laplace,
            KernelFamily::ExpSqrt,
            KernelFamily::TopHat,
            KernelFamily::Tent,
        ] {
            let k = ScalarKernel::dispersal(family, 0.7).unwrap();
            for i in 0..200 {
                let z = -3.0 + i as f64 * 0.03;
                assert!(k.profile(z) >= 0.0, "{family} at {z}");
                assert_abs_diff_eq!(k.profile(z), k.profile(-z), epsilon = 1e-14);
                assert_abs_diff_eq!(k.eval(z, 0.3), k.eval(0.3, z), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn masses_are_close_to_one_on_covering_intervals() {
        let gauss = ScalarKernel::dispersal(KernelFamily::Gauss, 0.01).unwrap();
        let rule = QuadratureRule::compose(RuleFamily::Gauss6, -1.0, 1.0, 200).unwrap();
        assert_abs_diff_eq!(gauss.mass(&rule).unwrap(), 1.0, epsilon = 1e-6);

        let hat = ScalarKernel::dispersal(KernelFamily::TopHat, 0.5).unwrap();
        let rule = QuadratureRule::compose(RuleFamily::Midpoint, -1.0, 1.0, 1000).unwrap();
        assert_abs_diff_eq!(hat.mass(&rule).unwrap(), 1.0, epsilon = 1e-2);

        let tent = ScalarKernel::dispersal(KernelFamily::Tent, 1.0).unwrap();
        let rule = QuadratureRule::compose(RuleFamily::Trapezoid, -1.0, 1.0, 100).unwrap();
        assert_abs_diff_eq!(tent.mass(&rule).unwrap(), 1.0, epsilon = 1e-4);
    }

    #[test]
    fn mass_converges_to_one_under_refinement() {
        for family in [KernelFamily::Laplace, KernelFamily::Tent] {
            let k = ScalarKernel::dispersal(family, 0.1).unwrap();
            let coarse = QuadratureRule::compose(RuleFamily::Midpoint, -1.0, 1.0, 20).unwrap();
            let fine = QuadratureRule::compose(RuleFamily::Midpoint, -1.0, 1.0, 2000).unwrap();
            let err_coarse = (k.mass(&coarse).unwrap() - 1.0).abs();
            let err_fine = (k.mass(&fine).unwrap() - 1.0).abs();
            // at rounding level both errors sit on the floor
            assert!(err_fine <= err_coarse.max(1e-12));
            assert!(err_fine < 1e-3, "{family}: {err_fine}");
        }
    }

    #[test]
    fn laplace_system_audit_is_positive_on_the_south_east_cone() {
        let coupling = ScalarKernel::new(|x, y| 1.0 + x * x + y * y, "1 + x^2 + y^2");
        let kernel = MatrixKernel::laplace_system(1.0, 2.0, coupling).unwrap();
        let grid = sample_grid(-1.0, 1.0, 20);
        let audit =
            kernel_positivity_audit(&kernel, &OrthantCone::south_east(), &grid, &grid).unwrap();
        assert_eq!(audit.class, PositivityClass::Positive);
    }

    #[test]
    fn gauss_scalar_kernel_audits_strongly_positive() {
        let kernel =
            MatrixKernel::scalar(ScalarKernel::dispersal(KernelFamily::Gauss, 0.5).unwrap());
        let grid = sample_grid(-1.0, 1.0, 15);
        let audit =
            kernel_positivity_audit(&kernel, &OrthantCone::all_plus(1), &grid, &grid).unwrap();
        assert_eq!(audit.class, PositivityClass::StronglyPositive);
    }

    #[test]
    fn top_hat_audit_drops_to_positive_off_support() {
        let kernel =
            MatrixKernel::scalar(ScalarKernel::dispersal(KernelFamily::TopHat, 0.1).unwrap());
        let grid = sample_grid(-1.0, 1.0, 15);
        let audit =
            kernel_positivity_audit(&kernel, &OrthantCone::all_plus(1), &grid, &grid).unwrap();
        assert_eq!(audit.class, PositivityClass::Positive);
        let (x, y) = audit.witness;
        assert_abs_diff_eq!(kernel.entry(0, 0).eval(x, y), 0.0);
    }
}
