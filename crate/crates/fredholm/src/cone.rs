//! Orthant cones in `R^d`, the order relations they induce and the
//! positivity classification of `d x d` matrices against a cone.
//!
//! Only orthant cones are first-class. A cone generated by an arbitrary
//! basis reduces to the all-plus orthant by the coordinate transform in
//! [`generated_cone_coordinates`].

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// An orthant `Y_+ = {x : ς_i x_i >= 0}` given by its sign pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthantCone {
    signs: Vec<i8>,
}

/// Order relation between two vectors relative to a cone, reported as the
/// strongest relation that holds (`Ll` ⇒ `Lt` ⇒ `Leq`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderRelation {
    /// Not comparable.
    None,
    /// `y - x` lies in the cone.
    Leq,
    /// `y - x` lies in the cone and differs from zero.
    Lt,
    /// `y - x` lies in the cone interior.
    Ll,
}

/// Classification of a matrix as an operator on a cone, ordered from weakest
/// to strongest: each class implies all weaker ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PositivityClass {
    NotPositive,
    /// Maps the cone into itself.
    Positive,
    /// Positive and annihilates no nonzero cone element.
    StrictlyPositive,
    /// Maps nonzero cone elements into the cone interior.
    StronglyPositive,
}

impl OrthantCone {
    /// Builds a cone from a sign pattern; every entry must be `+1` or `-1`.
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidParameter(
                "cone dimension must be >= 1".into(),
            ));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidParameter(
                "orthant signs must be +1 or -1".into(),
            ));
        }
        Ok(Self { signs })
    }

    /// The all-plus orthant `R_+^d`.
    pub fn all_plus(d: usize) -> Self {
        Self::new(vec![1; d]).expect("d >= 1")
    }

    /// The south-east quadrant `R_+ x (-R_+)`.
    pub fn south_east() -> Self {
        Self::new(vec![1, -1]).expect("static pattern")
    }

    pub fn dim(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// Membership test `ς_i x_i >= 0` for all components.
    pub fn contains(&self, x: &[f64]) -> Result<bool> {
        self.contains_with_tol(x, 0.0)
    }

    /// Membership with an absolute slack: `ς_i x_i >= -tol`.
    pub fn contains_with_tol(&self, x: &[f64], tol: f64) -> Result<bool> {
        self.check_dim(x.len())?;
        Ok(self
            .signs
            .iter()
            .zip(x)
            .all(|(&s, &xi)| f64::from(s) * xi >= -tol))
    }

    /// A vector in the cone interior (the signed ones vector).
    pub fn interior_direction(&self) -> Vec<f64> {
        self.signs.iter().map(|&s| f64::from(s)).collect()
    }

    /// Strongest order relation between `x` and `y`.
    pub fn relate(&self, x: &[f64], y: &[f64]) -> Result<OrderRelation> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        let mut all_strict = true;
        let mut all_weak = true;
        for ((&s, &xi), &yi) in self.signs.iter().zip(x).zip(y) {
            let diff = f64::from(s) * (yi - xi);
            all_strict &= diff > 0.0;
            all_weak &= diff >= 0.0;
        }
        Ok(if all_strict {
            OrderRelation::Ll
        } else if all_weak {
            if x == y {
                OrderRelation::Leq
            } else {
                OrderRelation::Lt
            }
        } else {
            OrderRelation::None
        })
    }

    /// Classifies `m` as an operator on this cone. The strong and plain
    /// classes come from the sign pattern `ς_i ς_j m_ij`; the strict class
    /// additionally needs cone injectivity, certified here by a full-rank
    /// test (singular values above `1e-12 ‖m‖`) when `injectivity_check`
    /// is set. Without the check at most `Positive` is reported, since
    /// strictness cannot be certified.
    pub fn matrix_positivity_class(
        &self,
        m: &Matrix,
        injectivity_check: bool,
    ) -> Result<PositivityClass> {
        self.matrix_positivity_class_with_tol(m, injectivity_check, 0.0)
    }

    /// Same as [`matrix_positivity_class`](Self::matrix_positivity_class)
    /// with an absolute slack on the sign tests.
    pub fn matrix_positivity_class_with_tol(
        &self,
        m: &Matrix,
        injectivity_check: bool,
        tol: f64,
    ) -> Result<PositivityClass> {
        let d = self.dim();
        if m.rows() != d || m.cols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: m.rows().max(m.cols()),
            });
        }
        let mut strong = true;
        let mut positive = true;
        for i in 0..d {
            for j in 0..d {
                let oriented = f64::from(self.signs[i]) * f64::from(self.signs[j]) * m[(i, j)];
                strong &= oriented > tol;
                positive &= oriented >= -tol;
            }
        }
        if strong {
            return Ok(PositivityClass::StronglyPositive);
        }
        if !positive {
            return Ok(PositivityClass::NotPositive);
        }
        if injectivity_check {
            let threshold = 1e-12 * m.frobenius_norm();
            if m.rank(threshold) == d {
                return Ok(PositivityClass::StrictlyPositive);
            }
        }
        Ok(PositivityClass::Positive)
    }
}

/// Coordinates of `x` relative to the cone generated by the columns of
/// `basis`; membership in that cone is nonnegativity of all coordinates,
/// i.e. membership in the all-plus orthant after this transform.
pub fn generated_cone_coordinates(basis: &Matrix, x: &[f64]) -> Result<Vec<f64>> {
    if !basis.is_square() || basis.rows() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.rows(),
            got: x.len(),
        });
    }
    Ok(basis.inverse()?.matvec(x))
}
