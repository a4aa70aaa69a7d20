//! Property-based checks of the algebraic laws, with independently
//! computed oracles (brute-force sphere search, complex root finding,
//! plain polynomial arithmetic) on the other side of each identity.

use proptest::prelude::*;
use std::sync::Arc;

use skewq_core::expr::FuncExpr;
use skewq_core::linsolve::solve_affine_unit;
use skewq_core::quat::{conjugate_action, dist, Quaternion, ONE};
use skewq_core::skewpoly::{has_root_on_orbit, root_on_orbit, SigmaDeltaAction, SkewPoly};
use skewq_core::{Error, Orbit};

fn quat(bound: f64) -> impl Strategy<Value = Quaternion> {
    (
        -bound..bound,
        -bound..bound,
        -bound..bound,
        -bound..bound,
    )
        .prop_map(|(w, x, y, z)| Quaternion::new(w, x, y, z))
}

fn poly(max_len: usize) -> impl Strategy<Value = SkewPoly> {
    proptest::collection::vec(quat(1.0), 1..=max_len).prop_map(SkewPoly::new)
}

/// Polynomials and constants, the exactly-evaluable law family.
fn law_expr() -> impl Strategy<Value = FuncExpr> {
    prop_oneof![
        poly(5).prop_map(|p| FuncExpr::poly(p).expect("untwisted")),
        quat(1.0).prop_map(FuncExpr::constant),
    ]
}

/// Brute-force minimum of `|P|` over a grid on the orbit sphere.
fn min_on_orbit(p: &SkewPoly, orbit: Orbit) -> f64 {
    let rad = orbit.imag_rad();
    let re = orbit.re();
    let mut min = f64::INFINITY;
    for a in 0..16 {
        let theta = std::f64::consts::PI * (a as f64 + 0.5) / 16.0;
        for b in 0..16 {
            let phi = 2.0 * std::f64::consts::PI * b as f64 / 16.0;
            let w = Quaternion::new(
                re,
                rad * theta.sin() * phi.cos(),
                rad * theta.sin() * phi.sin(),
                rad * theta.cos(),
            );
            min = min.min(p.eval(w).norm());
        }
    }
    min
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn skew_product_is_associative(
        f in law_expr(),
        g in law_expr(),
        h in law_expr(),
        a in quat(1.5),
    ) {
        let lhs = FuncExpr::skew_prod(FuncExpr::skew_prod(f.clone(), g.clone()), h.clone())
            .eval(a)
            .unwrap();
        let rhs = FuncExpr::skew_prod(f, FuncExpr::skew_prod(g, h)).eval(a).unwrap();
        prop_assert!(dist(lhs, rhs) <= 1e-10 * (1.0 + lhs.norm() + rhs.norm()));
    }

    #[test]
    fn skew_product_distributes_on_the_right(
        f in law_expr(),
        g in law_expr(),
        h in law_expr(),
        a in quat(1.5),
    ) {
        let lhs = FuncExpr::skew_prod(FuncExpr::sum(vec![f.clone(), g.clone()]), h.clone())
            .eval(a)
            .unwrap();
        let rhs = FuncExpr::skew_prod(f, h.clone()).eval(a).unwrap()
            + FuncExpr::skew_prod(g, h).eval(a).unwrap();
        prop_assert!(dist(lhs, rhs) <= 1e-10 * (1.0 + lhs.norm() + rhs.norm()));
    }

    #[test]
    fn polynomial_product_evaluates_by_the_moved_point_rule(
        p in poly(7),
        q in poly(7),
        a in quat(1.2),
    ) {
        let prod = p.mul(&q).unwrap();
        let qa = q.eval(a);
        let rule = if qa.is_zero() {
            Quaternion::default()
        } else {
            p.eval(conjugate_action(qa, a).unwrap()) * qa
        };
        let scale = 1.0 + prod.eval(a).norm() + p.eval(a).norm() * qa.norm();
        prop_assert!(dist(prod.eval(a), rule) <= 1e-10 * scale);
    }

    #[test]
    fn engineered_factor_is_found_on_its_orbit(q in poly(5), a in quat(1.5)) {
        prop_assume!(!q.is_zero());
        let p = q.mul(&SkewPoly::t_minus(a)).unwrap();
        prop_assume!(!p.is_zero());
        let orbit = Orbit::of(a);
        prop_assert!(has_root_on_orbit(&p, orbit).unwrap());
        let w = root_on_orbit(&p, orbit).unwrap().expect("root exists");
        let deg = p.degree().unwrap() as i32;
        let scale = p.coeff_scale() * (1.0 + orbit.norm()).powi(deg);
        prop_assert!(p.eval(w).norm() <= 1e-8 * scale);
        prop_assert!(orbit.contains_tol(w, 1e-7 * (1.0 + orbit.norm())));
    }

    #[test]
    fn root_search_agrees_with_brute_force(p in poly(6), seed in quat(2.0)) {
        prop_assume!(!p.is_zero());
        let orbit = Orbit::of(seed);
        prop_assume!(!orbit.is_trivial());
        let deg = p.degree().unwrap() as i32;
        let scale = p.coeff_scale() * (1.0 + orbit.norm()).powi(deg);
        match root_on_orbit(&p, orbit).unwrap() {
            Some(w) => {
                prop_assert!(p.eval(w).norm() <= 1e-8 * scale);
            }
            None => {
                // a vanishing point would contradict the affine reduction
                prop_assert!(min_on_orbit(&p, orbit) > 1e-10 * scale);
            }
        }
    }

    #[test]
    fn real_actor_twist_is_the_untwisted_ring(
        coeffs in proptest::collection::vec(quat(1.0), 1..=5),
        s in -2.0..2.0f64,
        a in quat(1.2),
    ) {
        prop_assume!(s.abs() > 0.1);
        let twist = Arc::new(SigmaDeltaAction::inner(Quaternion::real(s)).unwrap());
        let plain = SkewPoly::new(coeffs.clone());
        let twisted = SkewPoly::with_twist(coeffs, twist);

        prop_assert!(dist(plain.eval(a), twisted.eval(a)) <= 1e-12 * (1.0 + plain.eval(a).norm()));

        let (qp, rp) = plain.right_divide(a);
        let (qt, rt) = twisted.right_divide(a);
        prop_assert!(dist(rp, rt) <= 1e-12 * (1.0 + rp.norm()));
        prop_assert_eq!(qp.coeffs().len(), qt.coeffs().len());
        for (x, y) in qp.coeffs().iter().zip(qt.coeffs()) {
            prop_assert!(dist(*x, *y) <= 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn twisted_multiplication_is_associative(
        ca in proptest::collection::vec(quat(1.0), 1..=4),
        cb in proptest::collection::vec(quat(1.0), 1..=4),
        cc in proptest::collection::vec(quat(1.0), 1..=4),
        s in quat(1.5),
    ) {
        prop_assume!(s.norm() > 0.2 && s.imag_norm() > 0.1);
        let twist = Arc::new(SigmaDeltaAction::inner(s).unwrap());
        let pa = SkewPoly::with_twist(ca, twist.clone());
        let pb = SkewPoly::with_twist(cb, twist.clone());
        let pc = SkewPoly::with_twist(cc, twist.clone());
        let lhs = pa.mul(&pb).unwrap().mul(&pc).unwrap();
        let rhs = pa.mul(&pb.mul(&pc).unwrap()).unwrap();
        let scale = 1.0
            + lhs.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)
            + rhs.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
        let len = lhs.coeffs().len().max(rhs.coeffs().len());
        for m in 0..len {
            prop_assert!(dist(lhs.coeff(m), rhs.coeff(m)) <= 1e-10 * scale);
        }
    }

    #[test]
    fn mixed_twists_are_rejected(
        ca in proptest::collection::vec(quat(1.0), 1..=3),
        cb in proptest::collection::vec(quat(1.0), 1..=3),
        s in quat(1.5),
    ) {
        prop_assume!(s.norm() > 0.2);
        let t1 = Arc::new(SigmaDeltaAction::inner(s).unwrap());
        let t2 = Arc::new(SigmaDeltaAction::inner(s).unwrap());
        let pa = SkewPoly::with_twist(ca, t1);
        let pb = SkewPoly::with_twist(cb, t2);
        let err = pa.mul(&pb).unwrap_err();
        prop_assert_eq!(err.kind(), &Error::TwistMismatch);
    }

    #[test]
    fn exp_log_roundtrip(w in -1.0..1.0f64, v in quat(0.55)) {
        let q = Quaternion::real(w) + v.imag();
        let e = q.exp();
        let back = e.ln().unwrap();
        prop_assert!(dist(back, q) <= 1e-12 * (1.0 + q.norm()));
    }

    #[test]
    fn affine_unit_solution_satisfies_its_equation(
        a in quat(1.5),
        b in quat(1.5),
        p in quat(1.5),
    ) {
        match solve_affine_unit(a, b, p) {
            Ok(x) => {
                let resid = (a * x + b * x * p - ONE).norm();
                prop_assert!(resid <= 1e-9 * (1.0 + x.norm() * (a.norm() + b.norm() * p.norm())));
            }
            Err(e) => prop_assert_eq!(e.kind(), &Error::SingularSystem),
        }
    }

    #[test]
    fn orbit_roundtrip_from_any_direction(re in -2.0..2.0f64, rad in 0.01..2.0f64, dir in quat(1.0)) {
        prop_assume!(dir.imag_norm() > 0.05);
        let norm = (re * re + rad * rad).sqrt();
        let orbit = Orbit::new(re, norm).unwrap();
        let unit = dir.imag() * (1.0 / dir.imag_norm());
        let w = Quaternion::real(re) + unit * rad;
        let o2 = Orbit::of(w);
        prop_assert!((o2.re() - orbit.re()).abs() <= 1e-12 * (1.0 + re.abs()));
        prop_assert!((o2.norm() - orbit.norm()).abs() <= 1e-12 * (1.0 + orbit.norm()));
        prop_assert!(orbit.contains_tol(w, 1e-9));
    }
}
