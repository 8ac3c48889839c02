//! Composite quadrature rules on an interval: summed midpoint, trapezoidal,
//! Milne and 6th-order Gauss rules, plus diagnostics for weight positivity,
//! net fineness and empirical convergence order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The four composite rule families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleFamily {
    /// Cell-centered nodes, weight `h` each; order 2.
    Midpoint,
    /// Grid nodes, end weights `h/2`; order 2.
    Trapezoid,
    /// Quarter-point nodes with cell weights `(2h/3, -h/3, 2h/3)`; order 4.
    /// The only family here with negative weights.
    Milne,
    /// Three-point Gauss-Legendre per cell, weights `h/18·(5, 8, 5)`; order 6.
    Gauss6,
}

impl RuleFamily {
    pub const ALL: [RuleFamily; 4] = [
        RuleFamily::Midpoint,
        RuleFamily::Trapezoid,
        RuleFamily::Milne,
        RuleFamily::Gauss6,
    ];

    /// Number of nodes the composite rule with `n` subintervals carries.
    pub fn node_count(self, n: usize) -> usize {
        match self {
            RuleFamily::Midpoint => n,
            RuleFamily::Trapezoid => n + 1,
            RuleFamily::Milne | RuleFamily::Gauss6 => 3 * n,
        }
    }

    /// Inverts [`node_count`](Self::node_count): subintervals needed for
    /// exactly `nodes` quadrature nodes.
    pub fn subintervals_for_nodes(self, nodes: usize) -> Result<usize> {
        let n = match self {
            RuleFamily::Midpoint => nodes,
            RuleFamily::Trapezoid => {
                if nodes < 2 {
                    return Err(Error::InvalidParameter(format!(
                        "trapezoid rule needs at least 2 nodes, got {nodes}"
                    )));
                }
                nodes - 1
            }
            RuleFamily::Milne | RuleFamily::Gauss6 => {
                if nodes == 0 || !nodes.is_multiple_of(3) {
                    return Err(Error::InvalidParameter(format!(
                        "{self} rule has 3 nodes per cell; {nodes} is not a positive multiple of 3"
                    )));
                }
                nodes / 3
            }
        };
        if n == 0 {
            return Err(Error::InvalidParameter(format!(
                "{self} rule needs at least one node, got {nodes}"
            )));
        }
        Ok(n)
    }
}

impl fmt::Display for RuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RuleFamily::Midpoint => "midpoint",
            RuleFamily::Trapezoid => "trapezoid",
            RuleFamily::Milne => "milne",
            RuleFamily::Gauss6 => "gauss6",
        };
        f.write_str(name)
    }
}

impl FromStr for RuleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "midpoint" => Ok(RuleFamily::Midpoint),
            "trapezoid" => Ok(RuleFamily::Trapezoid),
            "milne" => Ok(RuleFamily::Milne),
            "gauss6" => Ok(RuleFamily::Gauss6),
            other => Err(Error::InvalidParameter(format!(
                "unknown quadrature rule '{other}' (expected midpoint|trapezoid|milne|gauss6)"
            ))),
        }
    }
}

/// A composite quadrature rule on `[a, b]` with `n` uniform subintervals.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub family: RuleFamily,
    pub a: f64,
    pub b: f64,
    /// Number of subintervals of the composite rule.
    pub n: usize,
    /// Ascending nodes within `[a, b]`.
    pub nodes: Vec<f64>,
    /// Weights, same length as `nodes`; they sum to `b - a`.
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Builds the summed rule of the given family with `n` subintervals.
    pub fn compose(family: RuleFamily, a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidParameter(format!(
                "interval bounds must satisfy a < b, got [{a}, {b}]"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter(
                "need at least one subinterval".into(),
            ));
        }
        let h = (b - a) / n as f64;
        let mut nodes = Vec::with_capacity(family.node_count(n));
        let mut weights = Vec::with_capacity(family.node_count(n));
        match family {
            RuleFamily::Midpoint => {
                for j in 0..n {
                    nodes.push(a + (j as f64 + 0.5) * h);
                    weights.push(h);
                }
            }
            RuleFamily::Trapezoid => {
                for j in 0..=n {
                    // the last grid point is b by definition; a + n*h can
                    // overshoot it by an ulp
                    nodes.push(if j == n { b } else { a + j as f64 * h });
                    weights.push(if j == 0 || j == n { 0.5 * h } else { h });
                }
            }
            RuleFamily::Milne => {
                for j in 0..n {
                    let x = a + j as f64 * h;
                    nodes.extend([x + 0.25 * h, x + 0.5 * h, x + 0.75 * h]);
                    weights.extend([2.0 * h / 3.0, -h / 3.0, 2.0 * h / 3.0]);
                }
            }
            RuleFamily::Gauss6 => {
                let offset = (3.0f64 / 5.0).sqrt();
                for j in 0..n {
                    let x = a + j as f64 * h;
                    nodes.extend([
                        x + (1.0 - offset) * 0.5 * h,
                        x + 0.5 * h,
                        x + (1.0 + offset) * 0.5 * h,
                    ]);
                    weights.extend([5.0 * h / 18.0, 8.0 * h / 18.0, 5.0 * h / 18.0]);
                }
            }
        }
        Ok(Self {
            family,
            a,
            b,
            n,
            nodes,
            weights,
        })
    }

    /// Step width `h = (b - a)/n` of the underlying grid.
    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.n as f64
    }

    /// Applies the rule: `Σ_j w_j f(η_j)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        let mut acc = 0.0;
        for (&node, &w) in self.nodes.iter().zip(&self.weights) {
            let value = f(node);
            if !value.is_finite() {
                return Err(Error::NonFinite(format!("for integrand at node {node}")));
            }
            acc += w * value;
        }
        Ok(acc)
    }

    /// Whether all weights are strictly positive, and the smallest weight.
    pub fn has_positive_weights(&self) -> (bool, f64) {
        let min = self.weights.iter().copied().fold(f64::INFINITY, f64::min);
        (min > 0.0, min)
    }

    /// Largest distance from a point of `[a, b]` to the nearest node; the
    /// quantity that must shrink to zero for the net condition.
    pub fn net_fineness(&self) -> f64 {
        let first = self.nodes.first().copied().unwrap_or(self.b);
        let last = self.nodes.last().copied().unwrap_or(self.a);
        let max_half_gap = self
            .nodes
            .windows(2)
            .map(|w| 0.5 * (w[1] - w[0]))
            .fold(0.0, f64::max);
        (first - self.a).max(self.b - last).max(max_half_gap)
    }
}

/// Fits the empirical convergence order of a rule family on `f` against the
/// known integral: least-squares slope of `log|error|` versus `log h`.
///
/// Errors already at rounding level (below `1e-15`) are dropped from the fit;
/// if fewer than two samples survive the fit is reported as saturated.
pub fn estimate_order(
    family: RuleFamily,
    f: impl Fn(f64) -> f64,
    exact: f64,
    a: f64,
    b: f64,
    n_list: &[usize],
) -> Result<f64> {
    if n_list.len() < 3 || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "n_list must be strictly increasing with at least 3 entries".into(),
        ));
    }
    let mut points = Vec::new();
    for &n in n_list {
        let rule = QuadratureRule::compose(family, a, b, n)?;
        let err = (rule.integrate(&f)? - exact).abs();
        if err >= 1e-15 {
            points.push((rule.step().ln(), err.ln()));
        }
    }
    if points.len() < 2 {
        return Err(Error::Saturated);
    }
    Ok(least_squares_slope(&points))
}

/// Slope of the least-squares line through `(x, y)` pairs.
pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn trapezoid_nodes_and_weights() {
        let rule = QuadratureRule::compose(RuleFamily::Trapezoid, 0.0, 1.0, 2).unwrap();
        assert_eq!(rule.nodes, vec![0.0, 0.5, 1.0]);
        assert_eq!(rule.weights, vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn milne_single_cell_has_negative_center_weight() {
        let rule = QuadratureRule::compose(RuleFamily::Milne, 0.0, 1.0, 1).unwrap();
        assert_eq!(rule.nodes, vec![0.25, 0.5, 0.75]);
        assert_abs_diff_eq!(rule.weights[0], 2.0 / 3.0);
        assert_abs_diff_eq!(rule.weights[1], -1.0 / 3.0);
        assert_abs_diff_eq!(rule.weights[2], 2.0 / 3.0);
    }

    #[test]
    fn midpoint_single_cell_is_centered() {
        let rule = QuadratureRule::compose(RuleFamily::Midpoint, 0.0, 2.0, 1).unwrap();
        assert_eq!(rule.nodes, vec![1.0]);
        assert_eq!(rule.weights, vec![2.0]);
    }

    #[test]
    fn node_counts_match_the_family() {
        for family in RuleFamily::ALL {
            for n in [1, 2, 5, 13] {
                let rule = QuadratureRule::compose(family, -1.0, 3.0, n).unwrap();
                assert_eq!(rule.nodes.len(), family.node_count(n));
                assert_eq!(rule.weights.len(), rule.nodes.len());
                assert_eq!(family.subintervals_for_nodes(rule.nodes.len()).unwrap(), n);
            }
        }
    }

    #[test]
    fn invalid_bounds_and_zero_cells_are_rejected() {
        assert!(QuadratureRule::compose(RuleFamily::Midpoint, 1.0, 1.0, 4).is_err());
        assert!(QuadratureRule::compose(RuleFamily::Midpoint, 2.0, 1.0, 4).is_err());
        assert!(QuadratureRule::compose(RuleFamily::Midpoint, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn midpoint_is_exact_on_affine_functions() {
        let rule = QuadratureRule::compose(RuleFamily::Midpoint, 0.0, 2.0, 1).unwrap();
        assert_abs_diff_eq!(rule.integrate(|x| x).unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn single_cell_trapezoid_on_x_squared() {
        // (f(0) + f(1))/2 by hand.
        let rule = QuadratureRule::compose(RuleFamily::Trapezoid, 0.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(rule.integrate(|x| x * x).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn gauss6_is_exact_up_to_degree_five() {
        let rule = QuadratureRule::compose(RuleFamily::Gauss6, 0.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(
            rule.integrate(|x| x.powi(5)).unwrap(),
            1.0 / 6.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn design_degree_exactness_per_family() {
        let cases = [
            (RuleFamily::Midpoint, 1),
            (RuleFamily::Trapezoid, 1),
            (RuleFamily::Milne, 3),
            (RuleFamily::Gauss6, 5),
        ];
        for (family, degree) in cases {
            for d in 0..=degree {
                let rule = QuadratureRule::compose(family, -1.0, 2.0, 3).unwrap();
                let exact = (2.0f64.powi(d + 1) - (-1.0f64).powi(d + 1)) / (d + 1) as f64;
                let approx = rule.integrate(|x| x.powi(d)).unwrap();
                assert!(
                    (approx - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                    "{family} degree {d}: {approx} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for family in RuleFamily::ALL {
            for n in [1, 3, 10, 37] {
                let rule = QuadratureRule::compose(family, -2.5, 4.5, n).unwrap();
                let total: f64 = rule.weights.iter().sum();
                assert_abs_diff_eq!(total, 7.0, epsilon = 1e-12 * 7.0);
            }
        }
    }

    #[test]
    fn nodes_are_ascending_and_inside_the_interval() {
        for family in RuleFamily::ALL {
            let rule = QuadratureRule::compose(family, -1.0, 1.0, 7).unwrap();
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
            assert!(rule.nodes.iter().all(|&x| (-1.0..=1.0).contains(&x)));
        }
    }

    #[test]
    fn weight_positivity_reports() {
        let trap = QuadratureRule::compose(RuleFamily::Trapezoid, 0.0, 1.0, 4).unwrap();
        assert_eq!(trap.has_positive_weights(), (true, 0.125));
        let milne = QuadratureRule::compose(RuleFamily::Milne, 0.0, 1.0, 4).unwrap();
        let (positive, min) = milne.has_positive_weights();
        assert!(!positive);
        assert_abs_diff_eq!(min, -0.25 / 3.0, epsilon = 1e-15);
        let gauss = QuadratureRule::compose(RuleFamily::Gauss6, 0.0, 1.0, 1).unwrap();
        let (positive, min) = gauss.has_positive_weights();
        assert!(positive);
        assert_abs_diff_eq!(min, 5.0 / 18.0, epsilon = 1e-15);
    }

    #[test]
    fn net_fineness_examples() {
        let trap = QuadratureRule::compose(RuleFamily::Trapezoid, 0.0, 1.0, 2).unwrap();
        assert_abs_diff_eq!(trap.net_fineness(), 0.25);
        let mid = QuadratureRule::compose(RuleFamily::Midpoint, 0.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(mid.net_fineness(), 0.5);
        let milne = QuadratureRule::compose(RuleFamily::Milne, 0.0, 1.0, 1).unwrap();
        assert_abs_diff_eq!(milne.net_fineness(), 0.25);
    }

    #[test]
    fn net_fineness_shrinks_under_refinement() {
        for family in RuleFamily::ALL {
            for n in [1, 2, 4, 8] {
                let coarse = QuadratureRule::compose(family, 0.0, 1.0, n).unwrap();
                let fine = QuadratureRule::compose(family, 0.0, 1.0, 2 * n).unwrap();
                assert!(fine.net_fineness() <= coarse.net_fineness());
            }
        }
    }

    #[test]
    fn estimated_orders_match_the_error_terms() {
        let exact = std::f64::consts::E - 1.0;
        let slope = estimate_order(
            RuleFamily::Trapezoid,
            f64::exp,
            exact,
            0.0,
            1.0,
            &[4, 8, 16, 32, 64],
        )
        .unwrap();
        assert!((slope - 2.0).abs() <= 0.3, "trapezoid slope {slope}");
        let slope =
            estimate_order(RuleFamily::Milne, f64::exp, exact, 0.0, 1.0, &[2, 4, 8, 16]).unwrap();
        assert!((slope - 4.0).abs() <= 0.3, "milne slope {slope}");
        let slope =
            estimate_order(RuleFamily::Gauss6, f64::exp, exact, 0.0, 1.0, &[1, 2, 4, 8]).unwrap();
        assert!((slope - 6.0).abs() <= 0.4, "gauss6 slope {slope}");
    }

    #[test]
    fn saturated_fits_are_an_error() {
        // Affine integrands are integrated exactly by every family, so every
        // sample sits below the floor.
        let err = estimate_order(
            RuleFamily::Gauss6,
            |x| 2.0 * x,
            1.0,
            0.0,
            1.0,
            &[1, 2, 4, 8],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Saturated));
    }

    #[test]
    fn non_finite_integrand_names_the_node() {
        let rule = QuadratureRule::compose(RuleFamily::Midpoint, 0.0, 2.0, 1).unwrap();
        let err = rule.integrate(|_| f64::NAN).unwrap_err();
        assert!(err.to_string().contains('1'));
    }
}
