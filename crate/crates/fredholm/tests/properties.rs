//! Property tests for the structural invariants: cone axioms, quadrature
//! exactness, partition of unity, idempotence and positivity transfer.

use fredholm::{
    cubic_pp_project, uniform_grid, Basis, CollocationScheme, Matrix, OrderRelation, OrthantCone,
    PositivityClass, QuadratureRule, RuleFamily, Tridiagonal,
};
use proptest::prelude::*;

fn sign_pattern(d: usize) -> impl Strategy<Value = Vec<i8>> {
    proptest::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], d)
}

fn small_vector(d: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0f64..10.0, d)
}

proptest! {
    #[test]
    fn zero_is_in_every_cone(signs in sign_pattern(4)) {
        let cone = OrthantCone::new(signs).unwrap();
        prop_assert!(cone.contains(&[0.0; 4]).unwrap());
    }

    #[test]
    fn cone_is_pointed(signs in sign_pattern(3), x in small_vector(3)) {
        let cone = OrthantCone::new(signs).unwrap();
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        if cone.contains(&x).unwrap() && cone.contains(&neg).unwrap() {
            prop_assert!(x.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn strict_order_survives_interior_nudges(
        signs in sign_pattern(3),
        x in small_vector(3),
        y in small_vector(3),
        eps in 1e-6f64..1e-2,
    ) {
        let cone = OrthantCone::new(signs).unwrap();
        if cone.relate(&x, &y).unwrap() == OrderRelation::Ll {
            let nudged: Vec<f64> = y
                .iter()
                .zip(cone.interior_direction())
                .map(|(v, dir)| v + eps * dir)
                .collect();
            prop_assert_eq!(cone.relate(&x, &nudged).unwrap(), OrderRelation::Ll);
        }
    }

    #[test]
    fn relation_strength_is_consistent(
        signs in sign_pattern(3),
        x in small_vector(3),
        y in small_vector(3),
    ) {
        // whatever is reported, the weaker componentwise predicates hold
        let cone = OrthantCone::new(signs.clone()).unwrap();
        let weak_holds = signs
            .iter()
            .zip(x.iter().zip(&y))
            .all(|(&s, (&xi, &yi))| f64::from(s) * (yi - xi) >= 0.0);
        match cone.relate(&x, &y).unwrap() {
            OrderRelation::Ll | OrderRelation::Lt | OrderRelation::Leq => {
                prop_assert!(weak_holds)
            }
            OrderRelation::None => prop_assert!(!weak_holds),
        }
    }

    #[test]
    fn strongly_positive_matrices_satisfy_the_positive_predicate(
        signs in sign_pattern(2),
        entries in proptest::collection::vec(0.01f64..5.0, 4),
    ) {
        let cone = OrthantCone::new(signs.clone()).unwrap();
        // orient strictly positive magnitudes along the sign pattern
        let m = Matrix::from_fn(2, 2, |i, j| {
            f64::from(signs[i]) * f64::from(signs[j]) * entries[i * 2 + j]
        });
        let class = cone.matrix_positivity_class(&m, false).unwrap();
        prop_assert_eq!(class, PositivityClass::StronglyPositive);
        // and cone vectors stay in the cone
        let x: Vec<f64> = signs.iter().map(|&s| f64::from(s) * 1.3).collect();
        prop_assert!(cone.contains_with_tol(&m.matvec(&x), 1e-12).unwrap());
    }

    #[test]
    fn weights_sum_to_the_interval_length(
        a in -5.0f64..0.0,
        len in 0.1f64..10.0,
        n in 1usize..40,
    ) {
        for family in RuleFamily::ALL {
            let rule = QuadratureRule::compose(family, a, a + len, n).unwrap();
            let total: f64 = rule.weights.iter().sum();
            prop_assert!((total - len).abs() <= 1e-12 * len);
            prop_assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(rule
                .nodes
                .iter()
                .all(|&x| a <= x && x <= a + len));
        }
    }

    #[test]
    fn refinement_never_coarsens_the_net(
        a in -3.0f64..0.0,
        len in 0.5f64..4.0,
        n in 1usize..20,
    ) {
        for family in RuleFamily::ALL {
            let coarse = QuadratureRule::compose(family, a, a + len, n).unwrap();
            let fine = QuadratureRule::compose(family, a, a + len, 2 * n).unwrap();
            prop_assert!(fine.net_fineness() <= coarse.net_fineness() + 1e-14);
        }
    }

    #[test]
    fn hat_functions_partition_unity_on_random_grids(
        mut knots in proptest::collection::vec(-10.0f64..10.0, 3..12),
        t in 0.0f64..1.0,
    ) {
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        prop_assume!(knots.len() >= 3);
        let basis = Basis::hat(knots.clone()).unwrap();
        let x = knots[0] + t * (knots[knots.len() - 1] - knots[0]);
        let total: f64 = (0..basis.len()).map(|j| basis.eval(j, x)).sum();
        prop_assert!((total - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn hat_projection_is_idempotent(
        n in 2usize..12,
        t in 0.0f64..1.0,
        freq in 0.5f64..3.0,
    ) {
        let grid = uniform_grid(-1.0, 1.0, n);
        let scheme = CollocationScheme::hat(grid).unwrap();
        let data: Vec<f64> = scheme.points.iter().map(|&x| (freq * x).sin()).collect();
        let once = scheme.project(&data).unwrap();
        let resampled: Vec<f64> = scheme.points.iter().map(|&x| once(x)).collect();
        let twice = scheme.project(&resampled).unwrap();
        let x = -1.0 + 2.0 * t;
        prop_assert!((once(x) - twice(x)).abs() <= 1e-10);
    }

    #[test]
    fn cubic_blend_respects_data_bounds(
        values in proptest::collection::vec(-4.0f64..4.0, 4..10),
        t in 0.0f64..1.0,
    ) {
        // blending weights are a convex combination on each cell, so the
        // output stays inside [min u, max u] — stronger than the factor-2
        // operator bound
        let n = values.len() - 1;
        let grid = uniform_grid(0.0, 1.0, n);
        let blend = cubic_pp_project(&grid, &values).unwrap();
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let value = blend.eval(t);
        prop_assert!(value >= lo - 1e-12 && value <= hi + 1e-12);
    }

    #[test]
    fn tridiagonal_inverse_multiplies_back_to_identity(
        n in 2usize..20,
        seedling in 0.2f64..0.9,
    ) {
        let diag: Vec<f64> = (0..n).map(|i| 3.0 + (i as f64 * seedling).sin()).collect();
        let sup = vec![seedling; n - 1];
        let sub: Vec<f64> = (0..n - 1).map(|i| -0.5 * seedling - 0.01 * i as f64).collect();
        let t = Tridiagonal::new(diag, sup, sub).unwrap();
        let prod = t.inverse().unwrap().matmul(&t.to_dense());
        for i in 0..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((prod[(i, j)] - expected).abs() <= 1e-10);
            }
        }
    }
}
