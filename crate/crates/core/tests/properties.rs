//! Invariants checked on random inputs.

use std::f64::consts::PI;

use bitime::expr::parse;
use bitime::pde::{cross_triple, SplitSystem};
use bitime::plastic::{costates_star, phi_star, AnglePair, PlasticCostates, PlasticState, SolutionFamily};
use bitime::{build_disc_grid, ExclusionZone, QuasiLinearSystem, ScalarField, StateField};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = f64> {
    -3.0..3.0_f64
}

/// A point of the unit disc outside the origin zone.
fn admissible_point() -> impl Strategy<Value = [f64; 2]> {
    (0.1_f64..1.0, 0.0..2.0 * PI).prop_map(|(r, t)| [r * t.cos(), r * t.sin()])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_is_linear(a in coeff(), b in coeff(), k in 0.5..3.0_f64) {
        let g = build_disc_grid(1.0 / 16.0, 0.125, &[]).unwrap();
        let f = ScalarField::from_point_fn(&g, |[x, y]| (k * x).sin() + y * y);
        let h = ScalarField::from_point_fn(&g, |[x, y]| (x * y).exp());
        let combo = &f.scale(a) + &h.scale(b);
        let lhs = combo.dx();
        let rhs = &f.dx().scale(a) + &h.dx().scale(b);
        prop_assert!((&lhs - &rhs).max_norm() <= 1e-11 * (1.0 + a.abs() + b.abs()));
    }

    #[test]
    fn phi_star_has_unit_norm(p in admissible_point()) {
        let a = phi_star(p, 0.1).unwrap();
        prop_assert!((a.c.hypot(a.s) - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn costate_relations_hold_at_any_angle(x in -1.0..1.0_f64, y in -1.0..1.0_f64, phi in -PI..PI) {
        let angle = AnglePair::from_angle(phi);
        let c = PlasticCostates::particular([x, y], angle);
        for r in c.relation_residuals(angle) {
            prop_assert!(r.abs() <= 1e-14);
        }
    }

    #[test]
    fn particular_costates_reduce_at_phi_star(p in admissible_point()) {
        let c = costates_star(p, 0.1).unwrap();
        let [x, y] = p;
        for (got, want) in [(c.q, [x, y]), (c.r, [-y, x]), (c.p, [y, -x])] {
            prop_assert!((got[0] - want[0]).abs() <= 1e-14 && (got[1] - want[1]).abs() <= 1e-14);
        }
    }

    /// The boundary identities hold at every point of the circle, not only on
    /// the sample lattice.
    #[test]
    fn boundary_identities_are_rotation_invariant(theta in 0.0..2.0 * PI) {
        let n = [theta.cos(), theta.sin()];
        let c = costates_star(n, 0.1).unwrap();
        let dot = |v: [f64; 2]| v[0] * n[0] + v[1] * n[1];
        prop_assert!(dot(c.p).abs() <= 1e-14);
        prop_assert!((dot(c.q) - 1.0).abs() <= 1e-14);
        prop_assert!(dot(c.r).abs() <= 1e-14);
    }

    #[test]
    fn cross_triple_is_linear_in_the_control(lambda in -4.0..4.0_f64) {
        let g = build_disc_grid(1.0 / 8.0, 0.25, &[]).unwrap();
        let sys = QuasiLinearSystem::new(
            2,
            0,
            |i, e| if i == 0 { [[1.0, e.t[0]], [0.0, 2.0]] } else { [[e.t[1], 1.0], [1.0, 3.0]] },
            |_| [0.0, 0.0],
        );
        let states: Vec<StateField> = vec![
            ScalarField::from_point_fn(&g, |[x, y]| x * y).into(),
            ScalarField::from_point_fn(&g, |[x, _]| x).into(),
        ];
        let w = [
            ScalarField::from_point_fn(&g, |[x, y]| x + y * y),
            ScalarField::from_point_fn(&g, |[x, _]| x.cos()),
        ];
        let split = |s: f64| {
            SplitSystem::with_canonical(&sys, &states, &[], vec![[w[0].scale(s), w[1].scale(s)]]).unwrap()
        };
        let (base, scaled) = (split(1.0), split(lambda));
        for i in 0..2 {
            let (t0, t1) = (cross_triple(&base, i).unwrap(), cross_triple(&scaled, i).unwrap());
            prop_assert!((&t1.p - &t0.p.scale(lambda)).max_norm() <= 1e-12);
            prop_assert!((&t1.q - &t0.q.scale(lambda)).max_norm() <= 1e-12);
            prop_assert!((&t1.r - &t0.r).max_norm() == 0.0);
        }
    }

    #[test]
    fn yield_identity_for_any_quadratic_coefficient(alpha in 0.01..10.0_f64) {
        let g = build_disc_grid(1.0 / 16.0, 0.125, &[ExclusionZone::Origin(0.1)]).unwrap();
        let s = PlasticState::from_family(&g, SolutionFamily::quadratic(alpha)).unwrap();
        prop_assert!(s.stress().yield_residual(&s.k).max_norm() <= 1e-12 * alpha * alpha);
    }

    #[test]
    fn parsed_polynomial_matches_direct_evaluation(
        a in coeff(), b in coeff(), c in coeff(), x in -2.0..2.0_f64, y in -2.0..2.0_f64,
    ) {
        let src = format!("{a:?}*x^2 + {b:?}*x*y - ({c:?}) + sin(y)/2");
        let e = parse(&src, &["x", "y"]).unwrap();
        let direct = a * x * x + b * x * y - c + y.sin() / 2.0;
        prop_assert!((e.eval(&[x, y]) - direct).abs() <= 1e-12);
    }
}
