//! Orbital, skew and slice derivatives.
//!
//! The skew derivative of `F` at `q0` is the function `D` in the exact
//! decomposition `F = F(q0) + D * (T - q0)`. For polynomials `D` is the
//! quotient of right division, for spherical series it comes from the
//! quotient recursion, and for everything else it is recovered as the limit
//! of `(F - F(q0)) * (T - q0)^<-1>` along probe directions. Restricted to
//! the orbit of `q0`, `D` is affine and is pinned down by its values at
//! `q0` (the skew derivative) and at the conjugate point (the orbital
//! derivative), which is what `DerivativeReport` stores.

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::expr::FuncExpr;
use crate::linsolve::solve_affine_unit;
use crate::orbit::{Orbit, SlicePlane};
use crate::quat::{conjugate_action, dist, Quaternion, ONE};
use crate::sample;
use crate::skewpoly::SkewPoly;

/// Probe scales for the numeric limit; each pair feeds one extrapolant.
const LIMIT_EPS: [f64; 3] = [1e-3, 1e-4, 1e-5];
/// Relative agreement demanded of the extrapolants.
const LIMIT_RTOL: f64 = 1e-6;

/// Difference quotient `(F(p) - F(q)) (p - q)^-1` over a chosen witness
/// `p` on the orbit of `q`; zero at real points, where the orbit has no
/// second witness.
pub fn orbital_derivative_witness(
    f: &FuncExpr,
    q: Quaternion,
    p: Quaternion,
) -> Result<Quaternion> {
    let d = p - q;
    if d.is_zero() {
        return Err(Error::RealPoint);
    }
    Ok((f.eval(p)? - f.eval(q)?) * d.inverse())
}

/// Orbital derivative with the canonical witness `conj(q)`.
pub fn orbital_derivative(f: &FuncExpr, q: Quaternion) -> Result<Quaternion> {
    if Orbit::of(q).is_trivial() {
        return Ok(Quaternion::default());
    }
    orbital_derivative_witness(f, q, q.conj())
}

/// Orbital derivative over several random witnesses: the first value and
/// the largest pairwise disagreement.
pub fn orbital_derivative_spread(
    f: &FuncExpr,
    q: Quaternion,
    rng: &mut ChaCha8Rng,
    witnesses: usize,
) -> Result<(Quaternion, f64)> {
    let orbit = Orbit::of(q);
    if orbit.is_trivial() {
        return Ok((Quaternion::default(), 0.0));
    }
    let mut values = Vec::with_capacity(witnesses);
    while values.len() < witnesses {
        let p = sample::point_on_orbit(rng, orbit);
        if dist(p, q) < 0.1 * orbit.imag_rad() {
            continue;
        }
        values.push(orbital_derivative_witness(f, q, p)?);
    }
    let mut spread = 0.0_f64;
    for a in &values {
        for b in &values {
            spread = spread.max(dist(*a, *b));
        }
    }
    Ok((values[0], spread))
}

/// Exact orbital derivative of a polynomial,
/// `sum_m c_m sum_k conj(q)^k q^(m-1-k)`.
pub fn orbital_derivative_poly(p: &SkewPoly, q: Quaternion) -> Result<Quaternion> {
    if p.twist().is_some() {
        return Err(Error::TwistMismatch);
    }
    let qc = q.conj();
    let mut acc = Quaternion::default();
    for (m, &c) in p.coeffs().iter().enumerate() {
        if m == 0 {
            continue;
        }
        let mut inner = Quaternion::default();
        for k in 0..m {
            inner = inner + qc.powi(k) * q.powi(m - 1 - k);
        }
        acc = acc + c * inner;
    }
    Ok(acc)
}

/// How a skew derivative was obtained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivMethod {
    ExactPoly,
    ExactSeries,
    /// Exact parts combined through sums or scalings of different kinds.
    Mixed,
    /// Richardson-extrapolated limit; carries the directional spread.
    NumericLimit(f64),
}

/// The skew derivative of `F` at a base point: the affine restriction of
/// `D` to the base orbit, stored through its two determining values.
#[derive(Clone, Copy, Debug)]
pub struct DerivativeReport {
    /// `D(q0)`, the skew derivative value.
    pub skew: Quaternion,
    /// `D(conj(q0))`, the orbital derivative value.
    pub orbital: Quaternion,
    pub base: Quaternion,
    pub method: DerivMethod,
}

impl DerivativeReport {
    /// Value of `D` at a point of the base orbit, by affine interpolation
    /// between the two stored values; constant on a trivial orbit.
    pub fn dq_at(&self, p: Quaternion) -> Quaternion {
        let qc = self.base.conj();
        let d = self.base - qc;
        if d.is_zero() {
            return self.skew;
        }
        let b = (self.skew - self.orbital) * d.inverse();
        let a = self.skew - b * self.base;
        a + b * p
    }
}

fn combine_methods(ms: &[DerivMethod]) -> DerivMethod {
    let mut spread: Option<f64> = None;
    for m in ms {
        if let DerivMethod::NumericLimit(s) = m {
            spread = Some(spread.unwrap_or(0.0).max(*s));
        }
    }
    if let Some(s) = spread {
        return DerivMethod::NumericLimit(s);
    }
    if ms.iter().all(|m| *m == ms[0]) && !ms.is_empty() {
        ms[0]
    } else {
        DerivMethod::Mixed
    }
}

/// Skew derivative of `f` at `q0`: exact for polynomial trees and
/// spherical series (recursing through sums and scalings), numeric
/// otherwise.
pub fn skew_derivative(f: &FuncExpr, q0: Quaternion) -> Result<DerivativeReport> {
    if let Some(p) = f.as_poly() {
        let (quot, _) = p.right_divide(q0);
        return Ok(DerivativeReport {
            skew: quot.eval(q0),
            orbital: quot.eval(q0.conj()),
            base: q0,
            method: DerivMethod::ExactPoly,
        });
    }
    match f {
        FuncExpr::Series(s) => {
            let d = s.dq_decomposition(q0).map_err(|e| e.at("series"))?;
            Ok(DerivativeReport {
                skew: d.quotient.eval(q0),
                orbital: d.quotient.eval(q0.conj()),
                base: q0,
                method: DerivMethod::ExactSeries,
            })
        }
        FuncExpr::Sum(terms) => {
            let mut skew = Quaternion::default();
            let mut orbital = Quaternion::default();
            let mut methods = Vec::with_capacity(terms.len());
            for (i, t) in terms.iter().enumerate() {
                let r = skew_derivative(t, q0).map_err(|e| e.at(&format!("sum[{i}]")))?;
                skew = skew + r.skew;
                orbital = orbital + r.orbital;
                methods.push(r.method);
            }
            Ok(DerivativeReport {
                skew,
                orbital,
                base: q0,
                method: combine_methods(&methods),
            })
        }
        FuncExpr::Scale(c, inner) => {
            let r = skew_derivative(inner, q0).map_err(|e| e.at("scale"))?;
            Ok(DerivativeReport {
                skew: *c * r.skew,
                orbital: *c * r.orbital,
                base: q0,
                method: r.method,
            })
        }
        _ => skew_derivative_numeric(f, q0),
    }
}

/// Skew derivative as the limit of `(F(x q x^-1) - F(q0)) x` with
/// `x = (T - q0)^<-1>(q)` as `q` approaches `q0` off the orbit, with
/// Richardson extrapolation in the step and four probe directions.
pub fn skew_derivative_numeric(f: &FuncExpr, q0: Quaternion) -> Result<DerivativeReport> {
    let f0 = f.eval(q0)?;
    let s = 0.5_f64.sqrt();
    let dirs = [
        ONE,
        Quaternion::new(s, s, 0.0, 0.0),
        Quaternion::new(s, 0.0, s, 0.0),
        Quaternion::new(s, 0.0, 0.0, s),
    ];
    let probe = |step: Quaternion| -> Result<Quaternion> {
        let q = q0 + step;
        // recovered step is exact, so the factored characteristic value
        // q d + d q0 - 2 Re(q0) d (zero constant term by Cayley-Hamilton)
        // avoids the cancellation that q^2 - 2 Re(q0) q + |q0|^2 suffers
        let d = q - q0;
        let x = if q0.imag_norm() == 0.0 {
            d.inverse()
        } else {
            let p = q * d + d * q0 - 2.0 * q0.re() * d;
            (q - q0.conj()) * p.inverse()
        };
        let moved = conjugate_action(x, q)?;
        Ok((f.eval(moved)? - f0) * x)
    };
    let mut values = Vec::with_capacity(dirs.len());
    let mut worst = 0.0_f64;
    for u in dirs {
        let g: Vec<Quaternion> = LIMIT_EPS
            .iter()
            .map(|&e| probe(e * u))
            .collect::<Result<_>>()?;
        // two extrapolants from adjacent step pairs must agree
        let r1 = (10.0 * g[1] - g[0]) * (1.0 / 9.0);
        let r2 = (10.0 * g[2] - g[1]) * (1.0 / 9.0);
        let delta = dist(r1, r2);
        if delta > LIMIT_RTOL * (1.0 + r2.norm()) {
            return Err(Error::NoLimit(delta));
        }
        worst = worst.max(delta);
        values.push(r2);
    }
    let mut spread = 0.0_f64;
    for a in &values {
        for b in &values {
            spread = spread.max(dist(*a, *b));
        }
    }
    let mean = (values[0] + values[1] + values[2] + values[3]) * 0.25;
    if spread > 10.0 * LIMIT_RTOL * (1.0 + mean.norm()) {
        return Err(Error::NoLimit(spread));
    }
    let orbital = if Orbit::of(q0).is_trivial() {
        mean
    } else {
        orbital_derivative_witness(f, q0, q0.conj())?
    };
    Ok(DerivativeReport {
        skew: mean,
        orbital,
        base: q0,
        method: DerivMethod::NumericLimit(worst.max(spread)),
    })
}

/// `|(F * G)^o(p) - F^o(p) G(p) - F(moved) G^o(p)|` where `moved` is the
/// conjugate point twisted by `G^o(p)`; the orbital product rule.
pub fn orbital_leibniz_residual(f: &FuncExpr, g: &FuncExpr, p: Quaternion) -> Result<f64> {
    let prod = FuncExpr::skew_prod(f.clone(), g.clone());
    let lhs = orbital_derivative(&prod, p)?;
    let fo = orbital_derivative(f, p)?;
    let go = orbital_derivative(g, p)?;
    let first = fo * g.eval(p)?;
    let second = if go.is_zero() {
        Quaternion::default()
    } else {
        f.eval(conjugate_action(go, p.conj())?)? * go
    };
    Ok(dist(lhs, first + second))
}

/// `|(F + G)'(q) - F'(q) - G'(q)|`.
pub fn sum_rule_residual(f: &FuncExpr, g: &FuncExpr, q: Quaternion) -> Result<f64> {
    let both = skew_derivative(&FuncExpr::sum(vec![f.clone(), g.clone()]), q)?;
    let df = skew_derivative(f, q)?;
    let dg = skew_derivative(g, q)?;
    Ok(dist(both.skew, df.skew + dg.skew))
}

/// `|(F * G)'(q) - (F' * G)(q) - (F * G')(q)|` with `F'` meaning the skew
/// derivative as a function of the base point.
pub fn product_rule_residual(f: &FuncExpr, g: &FuncExpr, q: Quaternion) -> Result<f64> {
    let prod = FuncExpr::skew_prod(f.clone(), g.clone());
    let lhs = skew_derivative(&prod, q)?.skew;
    // (F' * G)(q)
    let gv = g.eval(q)?;
    let t1 = if gv.is_zero() {
        Quaternion::default()
    } else {
        skew_derivative(f, conjugate_action(gv, q)?)?.skew * gv
    };
    // (F * G')(q)
    let dgv = skew_derivative(g, q)?.skew;
    let t2 = if dgv.is_zero() {
        Quaternion::default()
    } else {
        f.eval(conjugate_action(dgv, q)?)? * dgv
    };
    Ok(dist(lhs, t1 + t2))
}

/// `|(F^<-1>)'(q) + (F^<-1> * F' * F^<-1>)(q)|`, the inverse rule.
pub fn inverse_rule_residual(f: &FuncExpr, finv: &FuncExpr, q: Quaternion) -> Result<f64> {
    let lhs = skew_derivative(finv, q)?.skew;
    let hv = finv.eval(q)?;
    if hv.is_zero() {
        return Ok(lhs.norm());
    }
    // (F' * F^<-1>)(q)
    let m1 = conjugate_action(hv, q)?;
    let inner = skew_derivative(f, m1)?.skew * hv;
    let rhs = if inner.is_zero() {
        Quaternion::default()
    } else {
        finv.eval(conjugate_action(inner, q)?)? * inner
    };
    Ok(dist(lhs, -rhs))
}

/// Affine function `a + b p` on the orbit of `q` taking value `v1` at `q`
/// and `v2` at `conj(q)`.
pub fn affine_extend(
    v1: Quaternion,
    v2: Quaternion,
    q: Quaternion,
) -> Result<(Quaternion, Quaternion)> {
    let d = q - q.conj();
    if d.is_zero() {
        return Err(Error::RealPoint);
    }
    let b = (v1 - v2) * d.inverse();
    let a = v1 - b * q;
    Ok((a, b))
}

/// Value at `q` of the affine orbit function interpolating `f` through the
/// two points where the orbit of `q` meets the given slice plane.
pub fn slice_extension(f: &FuncExpr, plane: SlicePlane, q: Quaternion) -> Result<Quaternion> {
    let orbit = Orbit::of(q);
    if orbit.is_trivial() {
        return f.eval(q);
    }
    let (p1, _) = orbit.slice_points(plane);
    let (a, b) = affine_extend(f.eval(p1)?, f.eval(p1.conj())?, p1)?;
    Ok(a + b * q)
}

/// Cauchy-Riemann residual `|(d/dx F + (d/dy F) I)| / 2` of `f` restricted
/// to the slice plane through `q`, by central differences.
pub fn slice_cr_residual(f: &FuncExpr, q: Quaternion) -> Result<f64> {
    let plane = SlicePlane::through(q)?;
    let (x, y) = plane.coords(q, 1e-9).ok_or(Error::InvalidSlicePlane)?;
    let h = 1e-5;
    let fx = (f.eval(plane.embed(x + h, y))? - f.eval(plane.embed(x - h, y))?) * (0.5 / h);
    let fy = (f.eval(plane.embed(x, y + h))? - f.eval(plane.embed(x, y - h))?) * (0.5 / h);
    Ok((fx + fy * plane.unit()).norm() * 0.5)
}

/// Slice derivative `(d/dx F - (d/dy F) I) / 2` on the slice through `q`.
pub fn slice_derivative(f: &FuncExpr, q: Quaternion) -> Result<Quaternion> {
    let plane = SlicePlane::through(q)?;
    let (x, y) = plane.coords(q, 1e-9).ok_or(Error::InvalidSlicePlane)?;
    let h = 1e-5;
    let fx = (f.eval(plane.embed(x + h, y))? - f.eval(plane.embed(x - h, y))?) * (0.5 / h);
    let fy = (f.eval(plane.embed(x, y + h))? - f.eval(plane.embed(x, y - h))?) * (0.5 / h);
    Ok((fx - fy * plane.unit()) * 0.5)
}

/// Chain rule residual at a point `p` of the base orbit:
/// `D(F o phi)(p)` against `D_F(phi(moved)) e` with `e = D_phi(p)` and
/// `moved` the twist of `p` by `e`; `phi` must commute with conjugation
/// twists (real polynomials, exp, log).
pub fn chain_rule_residual(
    f: &FuncExpr,
    phi: &FuncExpr,
    q0: Quaternion,
    p: Quaternion,
) -> Result<f64> {
    let composed = FuncExpr::compose(f.clone(), phi.clone());
    let lhs = skew_derivative(&composed, q0)?.dq_at(p);
    let dphi = skew_derivative(phi, q0)?;
    let dfr = skew_derivative(f, phi.eval(q0)?)?;
    let e = dphi.dq_at(p);
    let rhs = if e.is_zero() {
        Quaternion::default()
    } else {
        dfr.dq_at(phi.eval(conjugate_action(e, p)?)?) * e
    };
    Ok(dist(lhs, rhs))
}

/// Skew derivative of `phi` at `q0` evaluated at an orbit point `p`, using
/// only derivative data of a left inverse `psi` (with `psi o phi = id`):
/// solves `(a + b x phi(p) x^-1) x = 1` where `a + b q` interpolates
/// `D_psi` on the orbit of `phi(q0)`.
pub fn composition_inverse_dq(
    phi: &FuncExpr,
    psi: &FuncExpr,
    q0: Quaternion,
    p: Quaternion,
) -> Result<Quaternion> {
    let w = phi.eval(q0)?;
    let dpsi = skew_derivative(psi, w)?;
    if Orbit::of(w).is_trivial() {
        if dpsi.skew.is_zero() {
            return Err(Error::SingularSystem);
        }
        return Ok(dpsi.skew.inverse());
    }
    let (a, b) = affine_extend(dpsi.skew, dpsi.orbital, w)?;
    solve_affine_unit(a, b, phi.eval(p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{I, J, K};
    use crate::sample::rng;
    use crate::series::SphericalSeries;

    fn sq() -> FuncExpr {
        FuncExpr::real_poly(&[0.0, 0.0, 1.0])
    }

    #[test]
    fn orbital_derivative_of_squaring() {
        // (T^2)^o(q) = conj(q) + q = 2 Re q
        let f = sq();
        let q = Quaternion::new(0.3, 1.0, -0.5, 0.2);
        let v = orbital_derivative(&f, q).unwrap();
        assert!(dist(v, Quaternion::real(2.0 * q.re())) < 1e-12);
        // witness independence
        let mut r = rng(2);
        let (_, spread) = orbital_derivative_spread(&f, q, &mut r, 8).unwrap();
        assert!(spread < 1e-12);
    }

    #[test]
    fn orbital_poly_formula_matches_quotient() {
        let p = SkewPoly::new(vec![J, I, ONE, 0.5 * K]);
        let f = FuncExpr::poly(p.clone()).unwrap();
        let mut r = rng(9);
        for _ in 0..20 {
            let q = sample::nonreal_in_box(&mut r, 1.5, 0.2);
            let via_formula = orbital_derivative_poly(&p, q).unwrap();
            let via_quotient = orbital_derivative(&f, q).unwrap();
            assert!(dist(via_formula, via_quotient) < 1e-11);
            let (quot, _) = p.right_divide(q);
            assert!(dist(via_formula, quot.eval(q.conj())) < 1e-11);
        }
    }

    #[test]
    fn orbital_derivative_of_conjugation_is_minus_one() {
        let q = Quaternion::new(0.1, 0.4, -0.8, 0.3);
        let v = orbital_derivative(&FuncExpr::Conjugation, q).unwrap();
        assert!(dist(v, -ONE) < 1e-14);
    }

    #[test]
    fn exact_poly_derivative_values() {
        // D(T^2) at q0 restricted to the orbit: q0 + p
        let r = skew_derivative(&sq(), I + ONE).unwrap();
        assert_eq!(r.method, DerivMethod::ExactPoly);
        assert!(dist(r.skew, 2.0 * (I + ONE)) < 1e-14);
        assert!(dist(r.orbital, (I + ONE).conj() + I + ONE) < 1e-14);
        let p = ONE + J; // same orbit as 1 + i
        assert!(dist(r.dq_at(p), I + ONE + p) < 1e-13);
    }

    #[test]
    fn numeric_derivative_matches_exact_for_polynomials() {
        let p = SkewPoly::new(vec![J, I, ONE, 0.3 * K]);
        let f = FuncExpr::poly(p).unwrap();
        let mut r = rng(21);
        for _ in 0..10 {
            let q0 = sample::quat_in_box(&mut r, 1.2);
            let exact = skew_derivative(&f, q0).unwrap();
            let numeric = skew_derivative_numeric(&f, q0).unwrap();
            assert!(dist(exact.skew, numeric.skew) < 1e-7 * (1.0 + exact.skew.norm()));
        }
    }

    #[test]
    fn numeric_derivative_works_at_real_base_points() {
        let f = sq();
        let r = skew_derivative_numeric(&f, Quaternion::real(1.5)).unwrap();
        assert!(dist(r.skew, Quaternion::real(3.0)) < 1e-8);
        assert!(dist(r.dq_at(Quaternion::real(1.5)), r.skew) < 1e-15);
    }

    #[test]
    fn series_derivative_is_exact_path() {
        let s = SphericalSeries::new(
            Orbit::of(I),
            vec![Quaternion::default(), Quaternion::default(), ONE],
            None,
        )
        .unwrap();
        let f = FuncExpr::series(s);
        // (P^2)' = 4T^3 + 4T at q0
        let q0 = Quaternion::new(0.4, 0.7, -0.2, 0.5);
        let r = skew_derivative(&f, q0).unwrap();
        assert_eq!(r.method, DerivMethod::ExactSeries);
        assert!(dist(r.skew, 4.0 * q0.powi(3) + 4.0 * q0) < 1e-12);
    }

    #[test]
    fn conjugation_has_no_skew_derivative() {
        let err = skew_derivative(&FuncExpr::Conjugation, ONE + I).unwrap_err();
        assert!(matches!(err.kind(), Error::NoLimit(_)));
    }

    #[test]
    fn exp_is_its_own_derivative_and_log_inverts() {
        let q0 = Quaternion::new(0.3, 0.6, -0.4, 0.2);
        let e = FuncExpr::exp(FuncExpr::identity());
        let r = skew_derivative(&e, q0).unwrap();
        assert!(dist(r.skew, q0.exp()) < 1e-6 * (1.0 + q0.exp().norm()));
        let l = FuncExpr::log(FuncExpr::identity());
        let w = Quaternion::new(1.1, 0.5, -0.3, 0.7);
        let rl = skew_derivative(&l, w).unwrap();
        assert!(dist(rl.skew, w.inverse()) < 1e-6);
    }

    #[test]
    fn derivative_rules_hold() {
        let f = FuncExpr::poly(SkewPoly::new(vec![J, I, ONE])).unwrap();
        let g = FuncExpr::real_poly(&[0.5, -1.0, 0.0, 1.0]);
        let mut r = rng(4);
        for _ in 0..15 {
            let q = sample::quat_in_box(&mut r, 1.2);
            assert!(sum_rule_residual(&f, &g, q).unwrap() < 1e-12);
            assert!(product_rule_residual(&f, &g, q).unwrap() < 1e-10);
        }
    }

    #[test]
    fn inverse_rule_for_linear_inverse() {
        let f = FuncExpr::poly(SkewPoly::t_minus(I)).unwrap();
        let h = FuncExpr::skew_inv_linear(I);
        let mut r = rng(6);
        let mut checked = 0;
        while checked < 10 {
            let q = sample::quat_in_box(&mut r, 1.5);
            if Orbit::of(I).contains_tol(q, 0.2) {
                continue;
            }
            let resid = inverse_rule_residual(&f, &h, q).unwrap();
            assert!(resid < 1e-7, "residual {resid} at {q:?}");
            checked += 1;
        }
    }

    #[test]
    fn leibniz_rule_for_orbital_derivative() {
        // F = T^2, G = T at p: conj(p)^2 + conj(p) p + p^2
        let f = sq();
        let g = FuncExpr::identity();
        let p = Quaternion::new(0.2, 0.8, -0.4, 0.3);
        assert!(orbital_leibniz_residual(&f, &g, p).unwrap() < 1e-12);
        let lhs = orbital_derivative(&FuncExpr::skew_prod(f, g), p).unwrap();
        let pc = p.conj();
        assert!(dist(lhs, pc * pc + pc * p + p * p) < 1e-12);
        // and with genuinely quaternionic coefficients
        let f2 = FuncExpr::poly(SkewPoly::new(vec![K, J, I])).unwrap();
        let g2 = FuncExpr::poly(SkewPoly::new(vec![I, ONE, J])).unwrap();
        let mut r = rng(13);
        for _ in 0..15 {
            let q = sample::nonreal_in_box(&mut r, 1.2, 0.3);
            assert!(orbital_leibniz_residual(&f2, &g2, q).unwrap() < 1e-9);
        }
    }

    #[test]
    fn affine_extension_reproduces_slice_values() {
        // exp through the i-slice at (pi/2) j gives j
        let f = FuncExpr::exp(FuncExpr::identity());
        let plane = SlicePlane::default();
        let q = (std::f64::consts::FRAC_PI_2) * J;
        let v = slice_extension(&f, plane, q).unwrap();
        assert!(dist(v, J) < 1e-12);
    }

    #[test]
    fn cr_residual_separates_regular_from_conjugation() {
        let c = Quaternion::new(0.3, -0.2, 0.7, 0.1);
        let f = FuncExpr::poly(SkewPoly::new(vec![Quaternion::default(), c])).unwrap();
        let q = Quaternion::new(0.4, 0.5, -0.3, 0.8);
        assert!(slice_cr_residual(&f, q).unwrap() < 1e-9);
        let r = slice_cr_residual(&FuncExpr::Conjugation, q).unwrap();
        assert!((r - 1.0).abs() < 1e-9);
    }

    #[test]
    fn slice_derivative_matches_skew_derivative_for_polynomials() {
        let f = FuncExpr::poly(SkewPoly::new(vec![J, I, ONE, 0.25 * K])).unwrap();
        let mut r = rng(17);
        for _ in 0..10 {
            let q = sample::nonreal_in_box(&mut r, 1.2, 0.3);
            let sd = slice_derivative(&f, q).unwrap();
            let kd = skew_derivative(&f, q).unwrap().skew;
            assert!(dist(sd, kd) < 1e-8 * (1.0 + kd.norm()));
        }
    }

    #[test]
    fn chain_rule_for_real_inner_polynomial() {
        let f = FuncExpr::poly(SkewPoly::new(vec![I, J, ONE])).unwrap();
        let phi = FuncExpr::real_poly(&[0.3, 0.0, 1.0]);
        let mut r = rng(8);
        for _ in 0..8 {
            let q0 = sample::nonreal_in_box(&mut r, 1.0, 0.35);
            let p = sample::point_on_orbit(&mut r, Orbit::of(q0));
            let resid = chain_rule_residual(&f, &phi, q0, p).unwrap();
            assert!(resid < 1e-6, "residual {resid}");
        }
    }

    #[test]
    fn inverse_function_derivative_via_log() {
        // phi = exp with left inverse psi = log
        let phi = FuncExpr::exp(FuncExpr::identity());
        let psi = FuncExpr::log(FuncExpr::identity());
        let mut r = rng(14);
        let mut checked = 0;
        while checked < 6 {
            let q0 = sample::nonreal_in_box(&mut r, 0.8, 0.3);
            let p = sample::point_on_orbit(&mut r, Orbit::of(q0));
            let direct = match skew_derivative(&phi, q0) {
                Ok(d) => d.dq_at(p),
                Err(_) => continue,
            };
            let via_inverse = composition_inverse_dq(&phi, &psi, q0, p).unwrap();
            assert!(
                dist(direct, via_inverse) < 1e-5 * (1.0 + direct.norm()),
                "direct {direct:?} vs {via_inverse:?}"
            );
            checked += 1;
        }
    }
}
