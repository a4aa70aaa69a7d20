//! Named verification suites over randomized samples.
//!
//! Each suite exercises one family of identities at fixed seeds and
//! tolerances and reports per-check residuals. Reports serialize to JSON
//! with stable field order and shortest-roundtrip floats, so a repeated run
//! with the same seed renders byte-identical output.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::calculus::{
    chain_rule_residual, composition_inverse_dq, inverse_rule_residual, orbital_derivative,
    orbital_derivative_poly, orbital_derivative_spread, orbital_leibniz_residual,
    product_rule_residual, skew_derivative, skew_derivative_numeric, slice_cr_residual,
    slice_derivative, slice_extension, sum_rule_residual,
};
use crate::contour::{cauchy_eval, higher_derivative, orbital_via_integral, spherical_coeff_extract, Circle, Contour};
use crate::error::{Error, Result};
use crate::expr::{is_skew_convex, left_inverse_preimage, skew_inverse_roundtrip, FuncExpr};
use crate::linsolve::solve_affine_unit;
use crate::orbit::{Orbit, SlicePlane};
use crate::quat::{conjugate_action, dist, Quaternion, ONE};
use crate::sample;
use crate::series::{right_inverse_series_partials, SphericalSeries};
use crate::skewpoly::{sd_action, SigmaDeltaAction, SkewPoly};

/// Whether a residual must stay below tolerance or exceed it (for checks
/// that assert a law genuinely fails on a counterexample).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AtMost,
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub direction: Direction,
    pub samples: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    #[serde(rename = "pass")]
    pub passed: bool,
    /// Largest residual among the upper-bounded checks.
    pub max_residual: f64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, checks: Vec<CheckResult>) -> SuiteReport {
        SuiteReport {
            suite: suite.to_string(),
            seed,
            passed: checks.iter().all(|c| c.passed),
            max_residual: checks
                .iter()
                .filter(|c| c.direction == Direction::AtMost)
                .map(|c| c.residual)
                .fold(0.0, f64::max),
            checks,
        }
    }

    /// Stable JSON rendering of the report.
    pub fn render(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }
}

pub const SUITES: [&str; 9] = [
    "near-ring-laws",
    "lam-leroy-product",
    "inverses",
    "orbital-leibniz",
    "derivative-rules",
    "chain-rule",
    "cauchy",
    "extraction",
    "slice-cr",
];

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let checks = match name {
        "near-ring-laws" => near_ring_checks(seed)?,
        "lam-leroy-product" => product_eval_checks(seed)?,
        "inverses" => inverse_checks(seed)?,
        "orbital-leibniz" => orbital_checks(seed)?,
        "derivative-rules" => derivative_rule_checks(seed)?,
        "chain-rule" => chain_rule_checks(seed)?,
        "cauchy" => cauchy_checks(seed)?,
        "extraction" => extraction_checks(seed)?,
        "slice-cr" => slice_cr_checks(seed)?,
        other => return Err(Error::UnknownSuite(other.to_string())),
    };
    Ok(SuiteReport::new(name, seed, checks))
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    SUITES.iter().map(|s| run_suite(s, seed)).collect()
}

fn at_most(name: &str, tol: f64, samples: usize, worst: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: worst <= tol,
        residual: worst,
        tolerance: tol,
        direction: Direction::AtMost,
        samples,
    }
}

fn at_least(name: &str, tol: f64, samples: usize, worst: f64) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed: worst >= tol,
        residual: worst,
        tolerance: tol,
        direction: Direction::AtLeast,
        samples,
    }
}

fn rand_poly(r: &mut ChaCha8Rng, max_deg: usize, bound: f64) -> SkewPoly {
    let deg = r.gen_range(0..=max_deg);
    let coeffs = (0..=deg).map(|_| sample::quat_in_box(r, bound)).collect();
    SkewPoly::new(coeffs)
}

/// Small family of mixed expressions used in law checks.
fn rand_expr(r: &mut ChaCha8Rng) -> FuncExpr {
    match r.gen_range(0..5) {
        0 => FuncExpr::poly(rand_poly(r, 3, 1.0)).expect("untwisted"),
        1 => FuncExpr::Conjugation,
        2 => FuncExpr::orbit_constant("norm+re", |re, n| Quaternion::new(re, n, 0.0, 0.0)),
        3 => FuncExpr::constant(sample::quat_in_box(r, 1.0)),
        _ => FuncExpr::exp(FuncExpr::scale(
            Quaternion::real(0.4),
            FuncExpr::identity(),
        )),
    }
}

fn near_ring_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let samples = 300;

    let mut r = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let f = rand_expr(&mut r);
        let a = sample::quat_in_box(&mut r, 1.5);
        let one = FuncExpr::constant(ONE);
        let fv = f.eval(a)?;
        let scale = 1.0 + fv.norm();
        for p in [
            FuncExpr::skew_prod(f.clone(), one.clone()),
            FuncExpr::skew_prod(one.clone(), f.clone()),
        ] {
            worst = worst.max(dist(p.eval(a)?, fv) / scale);
        }
    }
    checks.push(at_most("constant-one-is-a-unit", 1e-12, samples, worst));

    let mut r = sample::rng(seed ^ 0x1);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let (f, g, h) = (rand_expr(&mut r), rand_expr(&mut r), rand_expr(&mut r));
        let a = sample::quat_in_box(&mut r, 1.5);
        let lhs = FuncExpr::skew_prod(FuncExpr::sum(vec![f.clone(), g.clone()]), h.clone()).eval(a)?;
        let rhs = FuncExpr::skew_prod(f, h.clone()).eval(a)? + FuncExpr::skew_prod(g, h).eval(a)?;
        worst = worst.max(dist(lhs, rhs) / (1.0 + lhs.norm() + rhs.norm()));
    }
    checks.push(at_most("right-distributivity", 1e-10, samples, worst));

    let mut r = sample::rng(seed ^ 0x2);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let (f, g, h) = (rand_expr(&mut r), rand_expr(&mut r), rand_expr(&mut r));
        let a = sample::quat_in_box(&mut r, 1.5);
        let lhs = FuncExpr::skew_prod(FuncExpr::skew_prod(f.clone(), g.clone()), h.clone()).eval(a)?;
        let rhs = FuncExpr::skew_prod(f, FuncExpr::skew_prod(g, h)).eval(a)?;
        worst = worst.max(dist(lhs, rhs) / (1.0 + lhs.norm() + rhs.norm()));
    }
    checks.push(at_most("associativity", 1e-10, samples, worst));

    let mut r = sample::rng(seed ^ 0x3);
    let mut all_convex = true;
    for f in [
        FuncExpr::poly(rand_poly(&mut r, 3, 1.0)).expect("untwisted"),
        FuncExpr::Conjugation,
        FuncExpr::orbit_constant("re+norm j", |re, n| {
            Quaternion::new(re, 0.0, n, 0.0)
        }),
    ] {
        all_convex &= is_skew_convex(&f, &mut r, 80, 1e-9)?;
    }
    checks.push(at_most(
        "polynomials-and-orbit-functions-are-skew-convex",
        0.0,
        240,
        if all_convex { 0.0 } else { 1.0 },
    ));

    // right multiplication by j violates left distributivity
    let mut r = sample::rng(seed ^ 0x4);
    let rm = FuncExpr::right_skew_prod(FuncExpr::identity(), FuncExpr::constant(crate::quat::J));
    let mut violation = 0.0_f64;
    for _ in 0..samples {
        let a = sample::quat_in_box(&mut r, 1.5);
        let c1 = sample::nonzero_in_box(&mut r, 1.5, 0.1);
        let c2 = sample::nonzero_in_box(&mut r, 1.5, 0.1);
        let c = c1 + c2;
        if c.norm() < 0.1 {
            continue;
        }
        let prod = |b: Quaternion| -> Result<Quaternion> {
            Ok(rm.eval(conjugate_action(b, a)?)? * b)
        };
        violation = violation.max(dist(prod(c)?, prod(c1)? + prod(c2)?));
    }
    checks.push(at_least(
        "right-multiplication-breaks-left-distributivity",
        1e-2,
        samples,
        violation,
    ));

    Ok(checks)
}

fn product_eval_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let samples = 300;

    let mut r = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let p = rand_poly(&mut r, 6, 1.0);
        let q = rand_poly(&mut r, 6, 1.0);
        let a = sample::quat_in_box(&mut r, 1.2);
        let prod = p.mul(&q)?;
        let qa = q.eval(a);
        let rule = if qa.is_zero() {
            Quaternion::default()
        } else {
            p.eval(conjugate_action(qa, a)?) * qa
        };
        let scale = 1.0 + prod.eval(a).norm() + p.eval(a).norm() * qa.norm();
        worst = worst.max(dist(prod.eval(a), rule) / scale);
    }
    checks.push(at_most("untwisted-product-evaluation", 1e-10, samples, worst));

    let mut r = sample::rng(seed ^ 0x1);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let s = sample::nonzero_in_box(&mut r, 1.5, 0.3);
        let twist = std::sync::Arc::new(SigmaDeltaAction::inner(s)?);
        let deg_p = r.gen_range(0..=4usize);
        let deg_q = r.gen_range(0..=4usize);
        let p = SkewPoly::with_twist(
            (0..=deg_p).map(|_| sample::quat_in_box(&mut r, 1.0)).collect(),
            twist.clone(),
        );
        let q = SkewPoly::with_twist(
            (0..=deg_q).map(|_| sample::quat_in_box(&mut r, 1.0)).collect(),
            twist.clone(),
        );
        let a = sample::quat_in_box(&mut r, 1.2);
        let prod = p.mul(&q)?;
        let qa = q.eval(a);
        let rule = if qa.is_zero() {
            Quaternion::default()
        } else {
            p.eval(sd_action(Some(twist.as_ref()), qa, a)?) * qa
        };
        let scale = 1.0 + prod.eval(a).norm() + p.eval(a).norm() * qa.norm();
        worst = worst.max(dist(prod.eval(a), rule) / scale);
    }
    checks.push(at_most("twisted-product-evaluation", 1e-9, samples, worst));

    let mut r = sample::rng(seed ^ 0x2);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let p = rand_poly(&mut r, 6, 1.0);
        let a = sample::quat_in_box(&mut r, 1.2);
        let (quot, rem) = p.right_divide(a);
        let back = quot.mul(&SkewPoly::t_minus(a))?.add(&SkewPoly::constant(rem))?;
        let scale = 1.0
            + p.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max)
                * (1.0 + a.norm()).powi(p.degree().unwrap_or(0) as i32);
        let diff = p
            .coeffs()
            .iter()
            .zip(back.coeffs().iter().chain(std::iter::repeat(&Quaternion::default())))
            .map(|(x, y)| dist(*x, *y))
            .fold(0.0, f64::max);
        worst = worst.max(diff / scale);
        worst = worst.max(dist(rem, p.eval(a)) / scale);
    }
    checks.push(at_most("right-division-reconstruction", 1e-11, samples, worst));

    Ok(checks)
}

fn inverse_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let samples = 300;

    // closed form for (T - q0)^<-1> against the pointwise linear solve
    let mut r = sample::rng(seed);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let q0 = sample::quat_in_box(&mut r, 1.5);
        let q = sample::quat_in_box(&mut r, 1.5);
        let scale = 1.0 + q.norm_sqr() + q0.norm_sqr();
        let orbit = Orbit::of(q0);
        if orbit.char_eval(q).norm() < 0.05 * scale {
            continue;
        }
        let closed = FuncExpr::skew_inv_linear(q0).eval(q)?;
        let solved = solve_affine_unit(-q0, ONE, q)?;
        worst = worst.max(dist(closed, solved) / (1.0 + closed.norm()));
        done += 1;
    }
    checks.push(at_most("linear-inverse-closed-form", 1e-11, samples, worst));

    let mut r = sample::rng(seed ^ 0x1);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let q0 = sample::quat_in_box(&mut r, 1.5);
        let q = sample::quat_in_box(&mut r, 1.5);
        let scale = 1.0 + q.norm_sqr() + q0.norm_sqr();
        if Orbit::of(q0).char_eval(q).norm() < 0.05 * scale {
            continue;
        }
        let f = FuncExpr::poly(SkewPoly::t_minus(q0)).expect("untwisted");
        let h = FuncExpr::skew_inv_linear(q0);
        let (l, rr) = skew_inverse_roundtrip(&f, &h, q)?;
        worst = worst.max(l.max(rr));
        done += 1;
    }
    checks.push(at_most("linear-inverse-roundtrips", 1e-10, samples, worst));

    let mut r = sample::rng(seed ^ 0x2);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let q0 = sample::quat_in_box(&mut r, 1.5);
        let q = sample::quat_in_box(&mut r, 1.5);
        let scale = 1.0 + q.norm_sqr() + q0.norm_sqr();
        if Orbit::of(q0).char_eval(q).norm() < 0.05 * scale {
            continue;
        }
        let x = FuncExpr::skew_inv_linear(q0).eval(q)?;
        let back = left_inverse_preimage(q0, x)?;
        worst = worst.max(dist(back, q) / (1.0 + q.norm()));
        done += 1;
    }
    checks.push(at_most("image-law-preimage", 1e-9, samples, worst));

    let mut r = sample::rng(seed ^ 0x3);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let mut coeffs: Vec<f64> = (0..=r.gen_range(1..=4usize))
            .map(|_| r.gen_range(-1.0..=1.0))
            .collect();
        let last = coeffs.len() - 1;
        if coeffs[last].abs() < 0.2 {
            coeffs[last] = 0.5;
        }
        let p = SkewPoly::from_real(&coeffs);
        let h = match FuncExpr::skew_inv_real_poly(p.clone()) {
            Ok(h) => h,
            Err(_) => continue,
        };
        let q = sample::quat_in_box(&mut r, 1.5);
        let pv = p.eval(q);
        if pv.norm() < 0.05 * (1.0 + q.norm_sqr()) {
            continue;
        }
        let hv = h.eval(q)?;
        worst = worst.max((hv * pv - ONE).norm());
        let f = FuncExpr::poly(p).expect("untwisted");
        let (l, rr) = skew_inverse_roundtrip(&f, &h, q)?;
        worst = worst.max(l.max(rr));
        done += 1;
    }
    checks.push(at_most("real-poly-inverse", 1e-9, samples, worst));

    let mut r = sample::rng(seed ^ 0x4);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let a = sample::quat_in_box(&mut r, 1.5);
        let b = sample::nonzero_in_box(&mut r, 1.5, 0.2);
        let q = sample::quat_in_box(&mut r, 1.5);
        let x = match solve_affine_unit(a, b, q) {
            Ok(x) => x,
            Err(_) => continue,
        };
        if x.norm() > 50.0 {
            continue;
        }
        worst = worst.max((a * x + b * x * q - ONE).norm());
        done += 1;
    }
    checks.push(at_most("affine-inverse-pointwise", 1e-10, samples, worst));

    Ok(checks)
}

fn orbital_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let samples = 200;

    let mut r = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let f = match r.gen_range(0..3) {
            0 => FuncExpr::poly(rand_poly(&mut r, 5, 1.0)).expect("untwisted"),
            1 => FuncExpr::exp(FuncExpr::identity()),
            _ => FuncExpr::Conjugation,
        };
        let q = sample::nonreal_in_box(&mut r, 1.2, 0.3);
        let (_, spread) = orbital_derivative_spread(&f, q, &mut r, 8)?;
        worst = worst.max(spread);
    }
    checks.push(at_most("witness-independence", 1e-9, samples, worst));

    let mut r = sample::rng(seed ^ 0x1);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let f = FuncExpr::poly(rand_poly(&mut r, 4, 1.0)).expect("untwisted");
        let g = FuncExpr::poly(rand_poly(&mut r, 4, 1.0)).expect("untwisted");
        let p = sample::nonreal_in_box(&mut r, 1.2, 0.3);
        worst = worst.max(orbital_leibniz_residual(&f, &g, p)?);
    }
    checks.push(at_most("leibniz-product-rule", 1e-9, samples, worst));

    let mut r = sample::rng(seed ^ 0x2);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let p = rand_poly(&mut r, 6, 1.0);
        let q = sample::nonreal_in_box(&mut r, 1.2, 0.2);
        let formula = orbital_derivative_poly(&p, q)?;
        let generic = orbital_derivative(&FuncExpr::poly(p).expect("untwisted"), q)?;
        worst = worst.max(dist(formula, generic) / (1.0 + formula.norm()));
    }
    checks.push(at_most("polynomial-orbital-formula", 1e-10, samples, worst));

    let mut r = sample::rng(seed ^ 0x3);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let q = sample::nonreal_in_box(&mut r, 1.5, 0.1);
        worst = worst.max(dist(orbital_derivative(&FuncExpr::Conjugation, q)?, -ONE));
    }
    checks.push(at_most("conjugation-orbital-is-minus-one", 1e-12, samples, worst));

    Ok(checks)
}

fn derivative_rule_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let samples = 60;

    let mut r = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let p = rand_poly(&mut r, 5, 1.0);
        let f = FuncExpr::poly(p).expect("untwisted");
        let q0 = sample::quat_in_box(&mut r, 1.2);
        let exact = skew_derivative(&f, q0)?;
        let numeric = skew_derivative_numeric(&f, q0)?;
        worst = worst.max(dist(exact.skew, numeric.skew) / (1.0 + exact.skew.norm()));
    }
    checks.push(at_most("numeric-limit-matches-exact", 1e-7, samples, worst));

    let mut r = sample::rng(seed ^ 0x1);
    let mut worst_sum = 0.0_f64;
    let mut worst_prod = 0.0_f64;
    for _ in 0..samples {
        let f = FuncExpr::poly(rand_poly(&mut r, 4, 1.0)).expect("untwisted");
        let g = FuncExpr::poly(rand_poly(&mut r, 4, 1.0)).expect("untwisted");
        let q = sample::quat_in_box(&mut r, 1.2);
        worst_sum = worst_sum.max(sum_rule_residual(&f, &g, q)?);
        worst_prod = worst_prod.max(product_rule_residual(&f, &g, q)?);
    }
    checks.push(at_most("sum-rule", 1e-10, samples, worst_sum));
    checks.push(at_most("product-rule", 1e-9, samples, worst_prod));

    let mut r = sample::rng(seed ^ 0x2);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let q0 = sample::nonzero_in_box(&mut r, 1.2, 0.3);
        let q = sample::quat_in_box(&mut r, 1.5);
        let scale = 1.0 + q.norm_sqr() + q0.norm_sqr();
        if Orbit::of(q0).char_eval(q).norm() < 0.3 * scale {
            continue;
        }
        let f = FuncExpr::poly(SkewPoly::t_minus(q0)).expect("untwisted");
        let h = FuncExpr::skew_inv_linear(q0);
        match inverse_rule_residual(&f, &h, q) {
            Ok(res) => {
                worst = worst.max(res);
                done += 1;
            }
            Err(e) => match e.kind() {
                Error::NoLimit(_) | Error::PoleOrbit => continue,
                _ => return Err(e),
            },
        }
    }
    checks.push(at_most("inverse-rule", 1e-6, samples, worst));

    let mut r = sample::rng(seed ^ 0x5);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let q = sample::nonzero_in_box(&mut r, 1.2, 0.4);
        let l = FuncExpr::log(FuncExpr::identity());
        match skew_derivative(&l, q) {
            Ok(d) => {
                worst = worst.max(dist(d.skew, q.inverse()));
                done += 1;
            }
            Err(e) => match e.kind() {
                Error::BranchCut | Error::NoLimit(_) => continue,
                _ => return Err(e),
            },
        }
    }
    checks.push(at_most("log-derivative-is-reciprocal", 1e-6, samples, worst));

    Ok(checks)
}

fn chain_rule_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let samples = 60;

    let mut r = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let f = FuncExpr::poly(rand_poly(&mut r, 3, 1.0)).expect("untwisted");
        let phi = {
            let deg = r.gen_range(1..=2usize);
            let coeffs: Vec<f64> = (0..=deg).map(|_| r.gen_range(-1.0..=1.0)).collect();
            FuncExpr::real_poly(&coeffs)
        };
        let q0 = sample::nonreal_in_box(&mut r, 1.0, 0.35);
        let p = sample::point_on_orbit(&mut r, Orbit::of(q0));
        worst = worst.max(chain_rule_residual(&f, &phi, q0, p)?);
    }
    checks.push(at_most("real-polynomial-substitution", 1e-6, samples, worst));

    let mut r = sample::rng(seed ^ 0x1);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let f = FuncExpr::poly(rand_poly(&mut r, 3, 1.0)).expect("untwisted");
        let phi = FuncExpr::exp(FuncExpr::identity());
        let q0 = sample::nonreal_in_box(&mut r, 0.8, 0.3);
        let p = sample::point_on_orbit(&mut r, Orbit::of(q0));
        worst = worst.max(chain_rule_residual(&f, &phi, q0, p)?);
    }
    checks.push(at_most("exponential-substitution", 1e-6, samples, worst));

    let mut r = sample::rng(seed ^ 0x2);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let q0 = sample::nonreal_in_box(&mut r, 0.8, 0.3);
        let p = sample::point_on_orbit(&mut r, Orbit::of(q0));
        let phi = FuncExpr::exp(FuncExpr::identity());
        let psi = FuncExpr::log(FuncExpr::identity());
        let direct = match skew_derivative(&phi, q0) {
            Ok(d) => d.dq_at(p),
            Err(_) => continue,
        };
        let via = composition_inverse_dq(&phi, &psi, q0, p)?;
        worst = worst.max(dist(direct, via) / (1.0 + direct.norm()));
        done += 1;
    }
    checks.push(at_most("inverse-composition-derivative", 1e-5, samples, worst));

    Ok(checks)
}

fn slice_cr_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let samples = 100;

    let mut r = sample::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let f = FuncExpr::poly(rand_poly(&mut r, 5, 1.0)).expect("untwisted");
        let q = sample::nonreal_in_box(&mut r, 1.2, 0.1);
        worst = worst.max(slice_cr_residual(&f, q)?);
    }
    checks.push(at_most("polynomials-satisfy-cauchy-riemann", 1e-7, samples, worst));

    let mut r = sample::rng(seed ^ 0x1);
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let q = sample::nonreal_in_box(&mut r, 1.2, 0.1);
        best = best.min(slice_cr_residual(&FuncExpr::Conjugation, q)?);
    }
    checks.push(at_least("conjugation-fails-cauchy-riemann", 0.9, samples, best));

    let mut r = sample::rng(seed ^ 0x2);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let f = FuncExpr::poly(rand_poly(&mut r, 4, 1.0)).expect("untwisted");
        let q = sample::nonreal_in_box(&mut r, 1.2, 0.3);
        let sd = slice_derivative(&f, q)?;
        let kd = skew_derivative(&f, q)?.skew;
        worst = worst.max(dist(sd, kd) / (1.0 + kd.norm()));
    }
    checks.push(at_most("slice-derivative-matches-skew", 1e-7, samples, worst));

    let mut r = sample::rng(seed ^ 0x3);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        // real-coefficient functions are determined by one slice
        let deg = r.gen_range(1..=4usize);
        let coeffs: Vec<f64> = (0..=deg).map(|_| r.gen_range(-1.0..=1.0)).collect();
        let f = FuncExpr::real_poly(&coeffs);
        let q = sample::nonreal_in_box(&mut r, 1.2, 0.2);
        let ext = slice_extension(&f, SlicePlane::default(), q)?;
        worst = worst.max(dist(ext, f.eval(q)?) / (1.0 + ext.norm()));
    }
    checks.push(at_most("slice-extension-representation", 1e-9, samples, worst));

    Ok(checks)
}

fn cauchy_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    let plane = SlicePlane::default();
    let lobes = Contour::new(
        plane,
        vec![
            Circle { center_x: 0.0, center_y: 1.0, radius: 0.5, orientation: 1 },
            Circle { center_x: 0.0, center_y: -1.0, radius: 0.5, orientation: 1 },
        ],
        1024,
    )?;
    let big = Contour::new(
        plane,
        vec![Circle { center_x: 0.0, center_y: 0.0, radius: 1.6, orientation: 1 }],
        1024,
    )?;

    let samples = 20;
    let mut r = sample::rng(seed);
    let f = FuncExpr::poly(rand_poly(&mut r, 5, 1.0)).expect("untwisted");
    let mut worst = 0.0_f64;
    let mut invariance = 0.0_f64;
    let mut done = 0;
    while done < samples {
        let x = r.gen_range(-0.25..=0.25);
        let rad = r.gen_range(0.75..=1.25);
        let u = sample::unit_imaginary(&mut r);
        let p = Quaternion::real(x) + rad * u;
        // both slice points must sit inside the lobes
        if x * x + (rad - 1.0) * (rad - 1.0) > 0.16 {
            continue;
        }
        let direct = f.eval(p)?;
        let via_lobes = cauchy_eval(&f, &lobes, p)?;
        let via_big = cauchy_eval(&f, &big, p)?;
        worst = worst.max(dist(direct, via_lobes) / (1.0 + direct.norm()));
        worst = worst.max(dist(direct, via_big) / (1.0 + direct.norm()));
        invariance = invariance.max(dist(via_lobes, via_big) / (1.0 + direct.norm()));
        done += 1;
    }
    checks.push(at_most("cauchy-reproduces-values", 1e-6, samples, worst));
    checks.push(at_most("homologous-contours-agree", 1e-6, samples, invariance));

    let mut r = sample::rng(seed ^ 0x1);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let f = FuncExpr::poly(rand_poly(&mut r, 4, 1.0)).expect("untwisted");
        let u = sample::unit_imaginary(&mut r);
        let p = Quaternion::real(r.gen_range(-0.2..=0.2)) + r.gen_range(0.8..=1.2) * u;
        let via = orbital_via_integral(&f, &big, p)?;
        let direct = orbital_derivative(&f, p)?;
        worst = worst.max(dist(via, direct) / (1.0 + direct.norm()));
    }
    checks.push(at_most("orbital-integral-matches-quotient", 1e-6, samples, worst));

    let mut r = sample::rng(seed ^ 0x2);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let p = rand_poly(&mut r, 4, 1.0);
        let f = FuncExpr::poly(p.clone()).expect("untwisted");
        let u = sample::unit_imaginary(&mut r);
        let pt = Quaternion::real(r.gen_range(-0.2..=0.2)) + r.gen_range(0.5..=1.0) * u;
        let d1 = higher_derivative(&f, &big, pt, 1)?;
        let d1_exact = p.formal_derivative().eval(pt);
        worst = worst.max(dist(d1, d1_exact) / (1.0 + d1_exact.norm()));
        let d2 = higher_derivative(&f, &big, pt, 2)?;
        let d2_exact = p.formal_derivative().formal_derivative().eval(pt);
        worst = worst.max(dist(d2, d2_exact) / (1.0 + d2_exact.norm()));
    }
    checks.push(at_most("iterated-kernel-derivatives", 1e-5, 10, worst));

    Ok(checks)
}

fn extraction_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut checks = Vec::new();

    // radius oracles
    let o = Orbit::of(crate::quat::I);
    let halves: Vec<Quaternion> = (0..20).map(|n| ONE * 0.5_f64.powi(n)).collect();
    let r_half = SphericalSeries::new(o, halves, None)?.radius_estimate();
    let ones = SphericalSeries::new(o, vec![ONE; 12], None)?.radius_estimate();
    let worst = (r_half.radius - 2.0).abs().max((ones.radius - 1.0).abs())
        + if r_half.confident && ones.confident { 0.0 } else { 1.0 };
    checks.push(at_most("radius-estimates", 1e-9, 2, worst));

    // geometric series against its closed form
    let mut r = sample::rng(seed);
    let geo = SphericalSeries::new(o, vec![ONE; 60], None)?;
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < 100 {
        let q = sample::quat_in_box(&mut r, 1.0);
        let t = o.char_eval(q);
        if t.norm() > 0.6 {
            continue;
        }
        let closed = (ONE - t).inverse();
        let (v, tail) = geo.eval_with_tail(q)?;
        worst = worst.max((dist(v, closed) - tail).max(0.0));
        done += 1;
    }
    checks.push(at_most("geometric-series-closed-form", 1e-12, 100, worst));

    // series derivative against the expanded polynomial derivative
    let mut r = sample::rng(seed ^ 0x1);
    let mut worst = 0.0_f64;
    for _ in 0..40 {
        let orbit = sample::orbit_in_range(&mut r, 0.5, 0.5, 1.5);
        let len = r.gen_range(2..=4usize);
        let coeffs: Vec<Quaternion> = (0..len).map(|_| sample::quat_in_box(&mut r, 1.0)).collect();
        let s = SphericalSeries::new(orbit, coeffs.clone(), None)?;
        // expand sum c_n P^n into an ordinary polynomial
        let p_o = SkewPoly::from_real(&orbit.char_coeffs());
        let mut expanded = SkewPoly::zero();
        let mut pw = SkewPoly::constant(ONE);
        for (n, &c) in coeffs.iter().enumerate() {
            if n > 0 {
                pw = pw.mul(&p_o)?;
            }
            expanded = expanded.add(&pw.scale_left(c))?;
        }
        let d = s.derivative();
        let q = sample::quat_in_box(&mut r, 1.3);
        let exact = skew_derivative(&FuncExpr::poly(expanded).expect("untwisted"), q)?.skew;
        worst = worst.max(dist(d.eval(q)?, exact) / (1.0 + exact.norm()));
    }
    checks.push(at_most("termwise-derivative-matches-expansion", 1e-10, 40, worst));

    // quotient decomposition reconstructs within its tail bound
    let mut r = sample::rng(seed ^ 0x2);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < 40 {
        let orbit = sample::orbit_in_range(&mut r, 0.4, 0.8, 1.2);
        let coeffs: Vec<Quaternion> = (0..25)
            .map(|n| sample::quat_in_box(&mut r, 1.0) * 0.4_f64.powi(n))
            .collect();
        let s = SphericalSeries::new(orbit, coeffs, Some(2.0))?;
        let q0 = sample::quat_in_box(&mut r, 0.8);
        let q = sample::quat_in_box(&mut r, 0.8);
        if orbit.char_eval(q0).norm() > 1.2 || orbit.char_eval(q).norm() > 1.2 {
            continue;
        }
        let d = s.dq_decomposition(q0)?;
        let resid = d.reconstruction_residual(&s, q)?;
        worst = worst.max((resid - d.tail_bound(q)).max(0.0));
        done += 1;
    }
    checks.push(at_most("quotient-decomposition-tail-bound", 1e-10, 40, worst));

    // contour extraction returns the pair it integrated
    let mut r = sample::rng(seed ^ 0x3);
    let plane = SlicePlane::default();
    let mut worst = 0.0_f64;
    for _ in 0..5 {
        let orbit = sample::orbit_in_range(&mut r, 0.4, 0.8, 1.2);
        let contour = Contour::new(
            plane,
            vec![
                Circle {
                    center_x: orbit.re(),
                    center_y: orbit.imag_rad(),
                    radius: 0.35 * orbit.imag_rad(),
                    orientation: 1,
                },
                Circle {
                    center_x: orbit.re(),
                    center_y: -orbit.imag_rad(),
                    radius: 0.35 * orbit.imag_rad(),
                    orientation: 1,
                },
            ],
            1024,
        )?;
        let c1: Vec<Quaternion> = (0..4).map(|n| sample::quat_in_box(&mut r, 1.0) * 0.5_f64.powi(n)).collect();
        let c2: Vec<Quaternion> = (0..3).map(|n| sample::quat_in_box(&mut r, 1.0) * 0.5_f64.powi(n)).collect();
        let s1 = SphericalSeries::new(orbit, c1.clone(), None)?;
        let s2 = SphericalSeries::new(orbit, c2.clone(), None)?;
        let f = FuncExpr::sum(vec![
            FuncExpr::series(s1),
            FuncExpr::skew_prod(FuncExpr::series(s2), FuncExpr::identity()),
        ]);
        let pair = spherical_coeff_extract(&f, &contour, orbit, 6)?;
        for n in 0..=6 {
            let want1 = c1.get(n).copied().unwrap_or_default();
            let want2 = c2.get(n).copied().unwrap_or_default();
            worst = worst.max(dist(pair.s1.coeff(n), want1));
            worst = worst.max(dist(pair.s2.coeff(n), want2));
        }
    }
    checks.push(at_most("contour-coefficient-extraction", 1e-8, 5, worst));

    // right inverse series decays geometrically at the predicted rate
    let mut r = sample::rng(seed ^ 0x4);
    let mut worst = 0.0_f64;
    let mut done = 0;
    while done < 10 {
        let orbit = sample::orbit_in_range(&mut r, 0.3, 0.8, 1.2);
        let p = sample::point_on_orbit(&mut r, orbit) * r.gen_range(0.85..=0.95);
        let q = sample::point_on_orbit(&mut r, orbit) * r.gen_range(1.5..=2.0);
        let tp = orbit.char_eval(p).norm();
        let tq = orbit.char_eval(q).norm();
        if tp < 1e-3 || tp / tq > 0.5 {
            continue;
        }
        let partials = right_inverse_series_partials(p, orbit, q, 30)?;
        let exact = {
            let d = q * q - 2.0 * p.re() * q + Quaternion::real(p.norm_sqr());
            d.inverse() * (q - p.conj())
        };
        let errs: Vec<(f64, f64)> = partials
            .iter()
            .enumerate()
            .map(|(n, v)| ((n + 1) as f64, dist(*v, exact)))
            .filter(|&(_, e)| e > 1e-13)
            .collect();
        if errs.len() < 5 {
            continue;
        }
        // least squares slope of log(err) against the term count
        let n = errs.len() as f64;
        let sx: f64 = errs.iter().map(|e| e.0).sum();
        let sy: f64 = errs.iter().map(|e| e.1.ln()).sum();
        let sxx: f64 = errs.iter().map(|e| e.0 * e.0).sum();
        let sxy: f64 = errs.iter().map(|e| e.0 * e.1.ln()).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let predicted = (tp / tq).ln();
        worst = worst.max((slope - predicted).abs() / predicted.abs());
        done += 1;
    }
    checks.push(at_most("right-inverse-series-decay-rate", 0.05, 10, worst));

    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_suites_pass_at_default_seed() {
        for name in SUITES {
            let report = run_suite(name, 0).unwrap();
            for c in &report.checks {
                assert!(
                    c.passed,
                    "suite {name} check {} residual {} tol {}",
                    c.name, c.residual, c.tolerance
                );
            }
            assert!(report.passed);
        }
    }

    #[test]
    fn unknown_suite_is_rejected() {
        assert_eq!(
            run_suite("nope", 0).unwrap_err(),
            Error::UnknownSuite("nope".into())
        );
    }

    #[test]
    fn reports_render_deterministically() {
        let a = run_suite("near-ring-laws", 7).unwrap().render();
        let b = run_suite("near-ring-laws", 7).unwrap().render();
        assert_eq!(a, b);
        assert!(a.contains("\"suite\": \"near-ring-laws\""));
        assert!(a.contains("\"pass\": true"));
        assert!(a.contains("\"max_residual\""));
    }
}
