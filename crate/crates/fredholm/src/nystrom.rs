//! Nyström discretization: the discrete Fredholm operator over a quadrature
//! rule, its continuous extension, eigenfunction interpolation and the
//! weight/kernel positivity check.

use crate::cone::{OrthantCone, PositivityClass};
use crate::error::{Error, Result};
use crate::kernel::MatrixKernel;
use crate::linalg::EigenPair;
use crate::matrix::Matrix;
use crate::quadrature::QuadratureRule;

/// The assembled discrete Fredholm operator. For a `d x d` kernel over `N`
/// nodes the matrix is `dN x dN` in component-major block layout: block
/// `(i1, i2)` holds `w_{j2} k_{i1 i2}(η_{j1}, η_{j2})` at `(i1 N + j1, i2 N + j2)`.
#[derive(Clone, Debug)]
pub struct NystromOperator {
    pub rule: QuadratureRule,
    pub kernel: MatrixKernel,
    pub matrix: Matrix,
}

/// First violation found by [`NystromOperator::discrete_positivity_check`],
/// in deterministic scan order (weights first, then node pairs row-major).
#[derive(Clone, Debug, PartialEq)]
pub enum PositivityViolation {
    NegativeWeight { index: usize, weight: f64 },
    NonPositivePair { x: f64, y: f64 },
}

impl NystromOperator {
    /// Assembles the operator; kernel values must be finite on node pairs.
    pub fn assemble(kernel: MatrixKernel, rule: QuadratureRule) -> Result<Self> {
        let d = kernel.dim();
        let n = rule.nodes.len();
        let mut matrix = Matrix::zeros(d * n, d * n);
        for i1 in 0..d {
            for i2 in 0..d {
                let entry = kernel.entry(i1, i2);
                for j1 in 0..n {
                    for j2 in 0..n {
                        let value = entry.eval(rule.nodes[j1], rule.nodes[j2]);
                        if !value.is_finite() {
                            return Err(Error::NonFinite(format!(
                                "for kernel entry ({i1},{i2}) at ({}, {})",
                                rule.nodes[j1], rule.nodes[j2]
                            )));
                        }
                        matrix[(i1 * n + j1, i2 * n + j2)] = rule.weights[j2] * value;
                    }
                }
            }
        }
        Ok(Self {
            rule,
            kernel,
            matrix,
        })
    }

    pub fn node_count(&self) -> usize {
        self.rule.nodes.len()
    }

    /// Continuous-argument extension `Σ_j w_j K(x, η_j) u(η_j)`; at a node it
    /// coincides with the corresponding rows of the matrix-vector product.
    pub fn apply_at(&self, u_nodes: &[f64], x: f64) -> Result<Vec<f64>> {
        let d = self.kernel.dim();
        let n = self.node_count();
        if u_nodes.len() != d * n {
            return Err(Error::DimensionMismatch {
                expected: d * n,
                got: u_nodes.len(),
            });
        }
        let mut out = vec![0.0; d];
        for (j, (&node, &w)) in self.rule.nodes.iter().zip(&self.rule.weights).enumerate() {
            for i1 in 0..d {
                let mut acc = 0.0;
                for i2 in 0..d {
                    acc += self.kernel.entry(i1, i2).eval(x, node) * u_nodes[i2 * n + j];
                }
                out[i1] += w * acc;
            }
        }
        Ok(out)
    }

    /// Nyström interpolate `u*(x) = λ^{-1} Σ_j w_j K(x, η_j) v_j` of an
    /// eigenpair; reproduces the eigenvector at the nodes.
    pub fn interpolate_eigenfunction(&self, pair: &EigenPair, x: f64) -> Result<Vec<f64>> {
        if pair.value == 0.0 {
            return Err(Error::InvalidParameter(
                "cannot interpolate an eigenfunction for eigenvalue zero".into(),
            ));
        }
        let mut out = self.apply_at(&pair.vector, x)?;
        for v in &mut out {
            *v /= pair.value;
        }
        Ok(out)
    }

    /// Discrete positivity criterion: nonnegative weights and a kernel that
    /// is at least cone-positive on every node pair. Returns the first
    /// violation as a witness.
    pub fn discrete_positivity_check(
        &self,
        cone: &OrthantCone,
    ) -> Result<(bool, Option<PositivityViolation>)> {
        for (index, &weight) in self.rule.weights.iter().enumerate() {
            if weight < 0.0 {
                return Ok((
                    false,
                    Some(PositivityViolation::NegativeWeight { index, weight }),
                ));
            }
        }
        for &x in &self.rule.nodes {
            for &y in &self.rule.nodes {
                let class = cone.matrix_positivity_class(&self.kernel.value_at(x, y), false)?;
                if class < PositivityClass::Positive {
                    return Ok((false, Some(PositivityViolation::NonPositivePair { x, y })));
                }
            }
        }
        Ok((true, None))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ScalarKernel;
    use crate::quadrature::RuleFamily;
    use approx::assert_abs_diff_eq;

    fn constant_operator(family: RuleFamily, a: f64, b: f64, n: usize) -> NystromOperator {
        let rule = QuadratureRule::compose(family, a, b, n).unwrap();
        NystromOperator::assemble(MatrixKernel::scalar(ScalarKernel::constant(1.0)), rule).unwrap()
    }

    #[test]
    fn constant_kernel_rows_copy_the_weights() {
        let op = constant_operator(RuleFamily::Trapezoid, 0.0, 1.0, 2);
        for i in 0..3 {
            assert_eq!(op.matrix.row(i), &[0.25, 0.5, 0.25]);
        }
    }

    #[test]
    fn constant_kernel_has_rank_one_spectrum() {
        // k ≡ 1 integrates to b - a, so the dominant eigenvalue is b - a
        // with the constant eigenvector, for every rule family.
        for (a, b) in [(0.0, 1.0), (-1.5, 2.0)] {
            for family in RuleFamily::ALL {
                let op = constant_operator(family, a, b, 4);
                let pair = crate::linalg::dominant_eigenpair(&op.matrix, 1e-12, 10_000).unwrap();
                assert_abs_diff_eq!(pair.value, b - a, epsilon = 1e-10);
                for &v in &pair.vector {
                    assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn apply_at_nodes_matches_the_matrix_product() {
        let kernel = MatrixKernel::scalar(ScalarKernel::new(
            |x, y| (x + 2.0 * y).cos() + 2.0,
            "test kernel",
        ));
        let rule = QuadratureRule::compose(RuleFamily::Gauss6, -1.0, 1.0, 3).unwrap();
        let op = NystromOperator::assemble(kernel, rule).unwrap();
        let u: Vec<f64> = (0..op.node_count())
            .map(|i| (i as f64 * 0.3).sin())
            .collect();
        let product = op.matrix.matvec(&u);
        for (i, &node) in op.rule.nodes.clone().iter().enumerate() {
            let via_apply = op.apply_at(&u, node).unwrap();
            let rel = product[i].abs().max(1.0);
            assert!((via_apply[0] - product[i]).abs() <= 1e-13 * rel);
        }
    }

    #[test]
    fn apply_at_of_zero_is_zero() {
        let op = constant_operator(RuleFamily::Midpoint, 0.0, 1.0, 5);
        let u = vec![0.0; op.node_count()];
        assert_eq!(op.apply_at(&u, 0.37).unwrap(), vec![0.0]);
    }

    #[test]
    fn constant_kernel_extension_of_ones_is_one_everywhere() {
        let op = constant_operator(RuleFamily::Trapezoid, 0.0, 1.0, 4);
        let u = vec![1.0; op.node_count()];
        for x in [0.0, 0.13, 0.5, 0.99] {
            assert_abs_diff_eq!(op.apply_at(&u, x).unwrap()[0], 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn interpolate_reproduces_the_eigenvector_at_nodes() {
        let kernel = MatrixKernel::scalar(
            ScalarKernel::dispersal(crate::kernel::KernelFamily::Gauss, 0.3).unwrap(),
        );
        let rule = QuadratureRule::compose(RuleFamily::Trapezoid, -1.0, 1.0, 24).unwrap();
        let op = NystromOperator::assemble(kernel, rule).unwrap();
        let pair = crate::linalg::dominant_eigenpair(&op.matrix, 1e-12, 10_000).unwrap();
        for (j, &node) in op.rule.nodes.clone().iter().enumerate() {
            let u = op.interpolate_eigenfunction(&pair, node).unwrap();
            let rel = pair.vector[j].abs().max(1e-6);
            assert!(
                (u[0] - pair.vector[j]).abs() <= 1e-10 * rel,
                "node {node}: {} vs {}",
                u[0],
                pair.vector[j]
            );
        }
    }

    #[test]
    fn rank_one_interpolate_is_constant() {
        let op = constant_operator(RuleFamily::Midpoint, 0.0, 1.0, 6);
        let pair = crate::linalg::dominant_eigenpair(&op.matrix, 1e-13, 1000).unwrap();
        for x in [0.05, 0.4, 0.77] {
            assert_abs_diff_eq!(
                op.interpolate_eigenfunction(&pair, x).unwrap()[0],
                1.0,
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn positivity_check_accepts_trapezoid_gauss_kernel() {
        let kernel = MatrixKernel::scalar(
            ScalarKernel::dispersal(crate::kernel::KernelFamily::Gauss, 0.2).unwrap(),
        );
        let rule = QuadratureRule::compose(RuleFamily::Trapezoid, -1.0, 1.0, 10).unwrap();
        let op = NystromOperator::assemble(kernel, rule).unwrap();
        let (ok, witness) = op
            .discrete_positivity_check(&OrthantCone::all_plus(1))
            .unwrap();
        assert!(ok);
        assert!(witness.is_none());
    }

    #[test]
    fn positivity_check_flags_the_first_milne_weight() {
        let kernel = MatrixKernel::scalar(
            ScalarKernel::dispersal(crate::kernel::KernelFamily::Gauss, 0.2).unwrap(),
        );
        let rule = QuadratureRule::compose(RuleFamily::Milne, -1.0, 1.0, 5).unwrap();
        let h = rule.step();
        let op = NystromOperator::assemble(kernel, rule).unwrap();
        let (ok, witness) = op
            .discrete_positivity_check(&OrthantCone::all_plus(1))
            .unwrap();
        assert!(!ok);
        match witness {
            Some(PositivityViolation::NegativeWeight { index, weight }) => {
                assert_eq!(index, 1);
                assert_abs_diff_eq!(weight, -h / 3.0, epsilon = 1e-15);
            }
            other => panic!("expected a negative-weight witness, got {other:?}"),
        }
    }

    #[test]
    fn laplace_system_assembles_block_triangular() {
        let coupling = ScalarKernel::new(|x, y| 1.0 + x * x + y * y, "coupling");
        let kernel = MatrixKernel::laplace_system(1.0, 2.0, coupling).unwrap();
        let rule = QuadratureRule::compose(RuleFamily::Trapezoid, -1.0, 1.0, 2).unwrap();
        let op = NystromOperator::assemble(kernel, rule).unwrap();
        assert_eq!(op.matrix.rows(), 6);
        // Lower-left 3x3 block is the zero kernel entry.
        for i in 3..6 {
            for j in 0..3 {
                assert_eq!(op.matrix[(i, j)], 0.0);
            }
        }
        // Positive on the south-east cone at every node pair.
        let (ok, _) = op
            .discrete_positivity_check(&OrthantCone::south_east())
            .unwrap();
        assert!(ok);
    }

    #[test]
    fn midpoint_laplace_system_passes_the_south_east_check() {
        let coupling = ScalarKernel::new(|x, y| 1.0 + x * x + y * y, "coupling");
        let kernel = MatrixKernel::laplace_system(1.0, 2.0, coupling).unwrap();
        let rule = QuadratureRule::compose(RuleFamily::Midpoint, -1.0, 1.0, 9).unwrap();
        let op = NystromOperator::assemble(kernel, rule).unwrap();
        let (ok, witness) = op
            .discrete_positivity_check(&OrthantCone::south_east())
            .unwrap();
        assert!(ok, "witness: {witness:?}");
    }

    #[test]
    fn nonnegative_vectors_stay_nonnegative_under_positive_operators() {
        let kernel = MatrixKernel::scalar(
            ScalarKernel::dispersal(crate::kernel::KernelFamily::Laplace, 0.5).unwrap(),
        );
        let rule = QuadratureRule::compose(RuleFamily::Trapezoid, -1.0, 1.0, 16).unwrap();
        let op = NystromOperator::assemble(kernel, rule).unwrap();
        let (ok, _) = op
            .discrete_positivity_check(&OrthantCone::all_plus(1))
            .unwrap();
        assert!(ok);
        let u: Vec<f64> = (0..op.node_count())
            .map(|i| ((i * 7919) % 13) as f64 / 13.0)
            .collect();
        for value in op.matrix.matvec(&u) {
            assert!(value >= 0.0);
        }
    }

    #[test]
    fn non_finite_kernel_values_are_reported_with_the_node_pair() {
        let kernel = MatrixKernel::scalar(ScalarKernel::new(
            |x, y| 1.0 / (x - y),
            "singular on the diagonal",
        ));
        let rule = QuadratureRule::compose(RuleFamily::Trapezoid, 0.0, 1.0, 2).unwrap();
        let err = NystromOperator::assemble(kernel, rule).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }
}
