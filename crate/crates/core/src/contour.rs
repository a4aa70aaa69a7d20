//! Contour integration in a slice plane and Cauchy-type reconstruction.
//!
//! Contours are systems of oriented circles inside one slice plane,
//! discretized by the trapezoid rule, which is spectrally accurate for the
//! analytic integrands used here. All reconstruction formulas share the
//! shape `(1/2pi) \oint F(q) (-I dq) K(q)` with kernels built from right
//! skew inverses of `T - p`: the kernel itself recovers `F(p)`, its inverse
//! characteristic power recovers the orbital derivative, expansion of the
//! kernel in characteristic powers yields spherical series coefficients,
//! and folded right-skew powers yield higher derivatives.

use crate::error::{Error, Result};
use crate::expr::FuncExpr;
use crate::orbit::{Orbit, SlicePlane};
use crate::quat::Quaternion;
use crate::series::{SphericalPair, SphericalSeries};

/// Oriented circle in slice coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center_x: f64,
    pub center_y: f64,
    pub radius: f64,
    /// `+1` counterclockwise, `-1` clockwise.
    pub orientation: i32,
}

/// A system of circles in one slice plane with a shared node count.
#[derive(Clone, Debug)]
pub struct Contour {
    pub plane: SlicePlane,
    pub circles: Vec<Circle>,
    pub nodes: usize,
}

impl Contour {
    pub fn new(plane: SlicePlane, circles: Vec<Circle>, nodes: usize) -> Result<Contour> {
        if circles.is_empty() {
            return Err(Error::InvalidExpr("contour needs at least one circle".into()));
        }
        if nodes < 16 {
            return Err(Error::InvalidExpr("contour needs at least 16 nodes".into()));
        }
        for c in &circles {
            if !(c.radius > 0.0) {
                return Err(Error::InvalidExpr("circle radius must be positive".into()));
            }
            if c.orientation != 1 && c.orientation != -1 {
                return Err(Error::InvalidExpr("orientation must be +1 or -1".into()));
            }
        }
        Ok(Contour {
            plane,
            circles,
            nodes,
        })
    }

    /// Winding number around a point given in slice coordinates.
    pub fn winding(&self, x: f64, y: f64) -> i32 {
        let mut w = 0;
        for c in &self.circles {
            let dx = x - c.center_x;
            let dy = y - c.center_y;
            if dx * dx + dy * dy < c.radius * c.radius {
                w += c.orientation;
            }
        }
        w
    }

    /// Winding numbers at the two points where an orbit meets the slice
    /// plane (equal when the orbit is trivial).
    pub fn winding_pair(&self, orbit: Orbit) -> (i32, i32) {
        let rad = orbit.imag_rad();
        (
            self.winding(orbit.re(), rad),
            self.winding(orbit.re(), -rad),
        )
    }

    fn require_winding_one(&self, orbit: Orbit) -> Result<()> {
        let (w1, w2) = self.winding_pair(orbit);
        if w1 != 1 || w2 != 1 {
            return Err(Error::BadWinding);
        }
        Ok(())
    }

    /// Smallest `|P(q)|` over the contour nodes for the characteristic
    /// polynomial of `orbit`; the convergence radius a contour certifies.
    pub fn min_char_norm(&self, orbit: Orbit) -> f64 {
        let mut min = f64::INFINITY;
        for c in &self.circles {
            for k in 0..self.nodes {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / self.nodes as f64;
                let q = self.plane.embed(
                    c.center_x + c.radius * theta.cos(),
                    c.center_y + c.radius * theta.sin(),
                );
                min = min.min(orbit.char_eval(q).norm());
            }
        }
        min
    }
}

/// Trapezoid-rule line integral of `integrand(q, dq/dtheta)` over the
/// contour; node order is fixed so repeated runs accumulate identically.
pub fn line_integral<F>(contour: &Contour, mut integrand: F) -> Result<Quaternion>
where
    F: FnMut(Quaternion, Quaternion) -> Result<Quaternion>,
{
    let n = contour.nodes;
    let unit = contour.plane.unit();
    let mut total = Quaternion::default();
    for c in &contour.circles {
        let mut sum = Quaternion::default();
        for k in 0..n {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let (sin, cos) = theta.sin_cos();
            let q = contour
                .plane
                .embed(c.center_x + c.radius * cos, c.center_y + c.radius * sin);
            // gamma'(theta) = r I e^(I theta) inside the slice plane
            let dq = c.radius * (unit * cos - Quaternion::real(sin));
            sum = sum + integrand(q, dq)?;
        }
        let orient = c.orientation as f64;
        total = total + sum * (orient * 2.0 * std::f64::consts::PI / n as f64);
    }
    Ok(total)
}

/// Right skew inverse value of `T - p` at `q`, the reproducing kernel.
fn right_inverse_kernel(p: Quaternion, q: Quaternion) -> Result<Quaternion> {
    let d = q * q - 2.0 * p.re() * q + Quaternion::real(p.norm_sqr());
    if d.norm() <= 1e-13 * (1.0 + q.norm_sqr() + p.norm_sqr()) {
        return Err(Error::PoleOrbit);
    }
    Ok(d.inverse() * (q - p.conj()))
}

/// Reconstructs `F(p)` as `(1/2pi) \oint F(q) (-I dq) (T - p)^<-1>_r(q)`;
/// the contour must wind once around both slice points of the orbit of `p`.
pub fn cauchy_eval(f: &FuncExpr, contour: &Contour, p: Quaternion) -> Result<Quaternion> {
    contour.require_winding_one(Orbit::of(p))?;
    let unit = contour.plane.unit();
    let v = line_integral(contour, |q, dq| {
        Ok(f.eval(q)? * (-unit * dq) * right_inverse_kernel(p, q)?)
    })?;
    Ok(v * (0.5 / std::f64::consts::PI))
}

/// Orbital derivative `F^o(p)` as `(1/2pi) \oint F(q) (-I dq) P(q)^-1`
/// with `P` the characteristic polynomial of the (nontrivial) orbit of `p`.
pub fn orbital_via_integral(f: &FuncExpr, contour: &Contour, p: Quaternion) -> Result<Quaternion> {
    let orbit = Orbit::of(p);
    if orbit.is_trivial() {
        return Err(Error::TrivialOrbit);
    }
    contour.require_winding_one(orbit)?;
    let unit = contour.plane.unit();
    let v = line_integral(contour, |q, dq| {
        let d = orbit.char_eval(q);
        if d.norm() <= 1e-13 * (1.0 + q.norm_sqr()) {
            return Err(Error::PoleOrbit);
        }
        Ok(f.eval(q)? * (-unit * dq) * d.inverse())
    })?;
    Ok(v * (0.5 / std::f64::consts::PI))
}

/// Spherical coefficients of `F` around a nontrivial orbit, through order
/// `order` in the characteristic polynomial: expanding the kernel gives
/// `F = S1 + S2 * T` with
/// `c1_n = (1/2pi) \oint F (-I dq) P^(-n-1) (q - 2 x0)` and
/// `c2_n = (1/2pi) \oint F (-I dq) P^(-n-1)`. The declared radius of the
/// returned pair is the smallest `|P|` over the contour nodes.
pub fn spherical_coeff_extract(
    f: &FuncExpr,
    contour: &Contour,
    orbit: Orbit,
    order: usize,
) -> Result<SphericalPair> {
    if orbit.is_trivial() {
        return Err(Error::TrivialOrbit);
    }
    contour.require_winding_one(orbit)?;
    let unit = contour.plane.unit();
    let x0 = orbit.re();
    let mut c1 = vec![Quaternion::default(); order + 1];
    let mut c2 = vec![Quaternion::default(); order + 1];
    for n in 0..=order {
        let b = line_integral(contour, |q, dq| {
            let d = orbit.char_eval(q);
            if d.norm() <= 1e-13 * (1.0 + q.norm_sqr()) {
                return Err(Error::PoleOrbit);
            }
            Ok(f.eval(q)? * (-unit * dq) * d.inverse().powi(n + 1))
        })? * (0.5 / std::f64::consts::PI);
        let a = line_integral(contour, |q, dq| {
            let d = orbit.char_eval(q);
            if d.norm() <= 1e-13 * (1.0 + q.norm_sqr()) {
                return Err(Error::PoleOrbit);
            }
            Ok(f.eval(q)? * (-unit * dq) * d.inverse().powi(n + 1) * (q - Quaternion::real(2.0 * x0)))
        })? * (0.5 / std::f64::consts::PI);
        c1[n] = a;
        c2[n] = b;
    }
    let radius = contour.min_char_norm(orbit);
    Ok(SphericalPair::new(
        SphericalSeries::new(orbit, c1, Some(radius))?,
        SphericalSeries::new(orbit, c2, Some(radius))?,
    ))
}

/// `n`-th skew derivative of `F` at `p` by the iterated-kernel formula
/// `(n!/2pi) \oint F (-I dq) K^(n+1)(q)` where `K^(n+1)` is the
/// `(n+1)`-fold right skew power of the reproducing kernel.
pub fn higher_derivative(
    f: &FuncExpr,
    contour: &Contour,
    p: Quaternion,
    n: usize,
) -> Result<Quaternion> {
    contour.require_winding_one(Orbit::of(p))?;
    let mut kernel = FuncExpr::right_skew_inv_linear(p);
    for _ in 0..n {
        kernel = FuncExpr::right_skew_prod(kernel, FuncExpr::right_skew_inv_linear(p));
    }
    let mut factorial = 1.0;
    for k in 2..=n {
        factorial *= k as f64;
    }
    let unit = contour.plane.unit();
    let v = line_integral(contour, |q, dq| {
        Ok(f.eval(q)? * (-unit * dq) * kernel.eval(q)?)
    })?;
    Ok(v * (factorial * 0.5 / std::f64::consts::PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::{orbital_derivative, skew_derivative};
    use crate::quat::{dist, I, J, K, ONE};
    use crate::skewpoly::SkewPoly;

    fn circle(x: f64, y: f64, r: f64) -> Circle {
        Circle {
            center_x: x,
            center_y: y,
            radius: r,
            orientation: 1,
        }
    }

    fn big_circle() -> Contour {
        Contour::new(SlicePlane::default(), vec![circle(0.0, 0.0, 2.0)], 512).unwrap()
    }

    #[test]
    fn constant_is_reproduced() {
        let f = FuncExpr::constant(Quaternion::new(0.3, -1.0, 0.5, 2.0));
        let v = cauchy_eval(&f, &big_circle(), 0.5 * I + ONE).unwrap();
        assert!(dist(v, Quaternion::new(0.3, -1.0, 0.5, 2.0)) < 1e-10);
    }

    #[test]
    fn polynomial_values_are_reproduced() {
        let f = FuncExpr::poly(SkewPoly::new(vec![J, -I, Quaternion::default(), ONE])).unwrap();
        let c = big_circle();
        for p in [
            ONE + J,
            0.5 * K,
            Quaternion::real(0.3),
            I,
            Quaternion::new(-0.4, 0.2, 0.9, -0.6),
        ] {
            let direct = f.eval(p).unwrap();
            let via = cauchy_eval(&f, &c, p).unwrap();
            assert!(dist(direct, via) < 1e-9, "at {p:?}: {direct:?} vs {via:?}");
        }
    }

    #[test]
    fn winding_is_validated() {
        let f = FuncExpr::real_poly(&[0.0, 1.0]);
        let c = big_circle();
        // outside
        assert_eq!(
            cauchy_eval(&f, &c, 3.0 * I).unwrap_err(),
            Error::BadWinding
        );
        // only one slice point of O(i) covered
        let lop = Contour::new(SlicePlane::default(), vec![circle(0.0, 1.0, 0.4)], 64).unwrap();
        assert_eq!(cauchy_eval(&f, &lop, I).unwrap_err(), Error::BadWinding);
        // reversed orientation
        let mut rev = big_circle();
        rev.circles[0].orientation = -1;
        assert_eq!(cauchy_eval(&f, &rev, I).unwrap_err(), Error::BadWinding);
        // double cover
        let twice = Contour::new(
            SlicePlane::default(),
            vec![circle(0.0, 0.0, 2.0), circle(0.0, 0.0, 1.9)],
            64,
        )
        .unwrap();
        assert_eq!(cauchy_eval(&f, &twice, I).unwrap_err(), Error::BadWinding);
    }

    #[test]
    fn homologous_contours_agree() {
        let f = FuncExpr::poly(SkewPoly::new(vec![K, J, I, ONE])).unwrap();
        let p = Quaternion::new(0.05, 0.9, 0.3, 0.2);
        let one_big = Contour::new(SlicePlane::default(), vec![circle(0.0, 0.0, 1.6)], 1024).unwrap();
        let two_small = Contour::new(
            SlicePlane::default(),
            vec![circle(0.05, 0.96, 0.5), circle(0.05, -0.96, 0.5)],
            1024,
        )
        .unwrap();
        let a = cauchy_eval(&f, &one_big, p).unwrap();
        let b = cauchy_eval(&f, &two_small, p).unwrap();
        assert!(dist(a, f.eval(p).unwrap()) < 1e-8);
        assert!(dist(a, b) < 1e-8);
    }

    #[test]
    fn orbital_integral_matches_orbital_derivative() {
        let f = FuncExpr::poly(SkewPoly::new(vec![J, I, ONE, 0.5 * K])).unwrap();
        let c = big_circle();
        for p in [I, ONE + J, Quaternion::new(-0.2, 0.4, -0.7, 0.3)] {
            let via_integral = orbital_via_integral(&f, &c, p).unwrap();
            let direct = orbital_derivative(&f, p).unwrap();
            assert!(dist(via_integral, direct) < 1e-9);
        }
        assert_eq!(
            orbital_via_integral(&f, &c, Quaternion::real(0.5)).unwrap_err(),
            Error::TrivialOrbit
        );
    }

    #[test]
    fn extraction_recovers_squaring_series() {
        // T^2 = -1 + P on O(i): c1 = (-1, 1), c2 = 0
        let f = FuncExpr::real_poly(&[0.0, 0.0, 1.0]);
        let pair = spherical_coeff_extract(&f, &big_circle(), Orbit::of(I), 4).unwrap();
        assert!(dist(pair.s1.coeff(0), -ONE) < 1e-10);
        assert!(dist(pair.s1.coeff(1), ONE) < 1e-10);
        for n in 2..=4 {
            assert!(pair.s1.coeff(n).norm() < 1e-10);
        }
        for n in 0..=4 {
            assert!(pair.s2.coeff(n).norm() < 1e-10);
        }
    }

    #[test]
    fn extraction_recovers_a_full_pair_and_reconstructs() {
        let o = Orbit::of(I);
        let s1 = SphericalSeries::new(o, vec![J, 0.5 * ONE, 0.25 * I], None).unwrap();
        let s2 = SphericalSeries::new(o, vec![K, -0.5 * J], None).unwrap();
        let f = FuncExpr::sum(vec![
            FuncExpr::series(s1.clone()),
            FuncExpr::skew_prod(FuncExpr::series(s2.clone()), FuncExpr::identity()),
        ]);
        let pair = spherical_coeff_extract(&f, &big_circle(), o, 5).unwrap();
        for n in 0..=5 {
            assert!(dist(pair.s1.coeff(n), s1.coeff(n)) < 1e-9, "c1[{n}]");
            assert!(dist(pair.s2.coeff(n), s2.coeff(n)) < 1e-9, "c2[{n}]");
        }
        // reconstruction inside the certified region
        let q = Quaternion::new(0.2, 0.6, -0.5, 0.3);
        assert!(pair.s1.declared_radius().unwrap() > 1.0);
        assert!(dist(pair.eval(q).unwrap(), f.eval(q).unwrap()) < 1e-9);
        assert_eq!(
            spherical_coeff_extract(&f, &big_circle(), Orbit::new(0.5, 0.5).unwrap(), 2)
                .unwrap_err(),
            Error::TrivialOrbit
        );
    }

    #[test]
    fn higher_derivatives_of_squaring() {
        let f = FuncExpr::real_poly(&[0.0, 0.0, 1.0]);
        let c = big_circle();
        // F'' = 2 everywhere, F' = 2p
        assert!(dist(
            higher_derivative(&f, &c, Quaternion::default(), 2).unwrap(),
            Quaternion::real(2.0)
        ) < 1e-8);
        for p in [0.5 * J, ONE + 0.3 * I] {
            let d1 = higher_derivative(&f, &c, p, 1).unwrap();
            assert!(dist(d1, 2.0 * p) < 1e-8, "{d1:?} vs {:?}", 2.0 * p);
            let d0 = higher_derivative(&f, &c, p, 0).unwrap();
            assert!(dist(d0, p * p) < 1e-9);
        }
        // and against the exact skew derivative of a noncommutative cubic
        let g = FuncExpr::poly(SkewPoly::new(vec![J, I, ONE, 0.5 * K])).unwrap();
        let p = Quaternion::new(0.1, 0.7, -0.4, 0.2);
        let d1 = higher_derivative(&g, &c, p, 1).unwrap();
        assert!(dist(d1, skew_derivative(&g, p).unwrap().skew) < 1e-8);
    }
}
