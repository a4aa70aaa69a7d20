//! Expression trees for quaternion-valued functions.
//!
//! The skew product twists the argument before multiplying values, so
//! functions here are closed under two products: `skew_prod` follows
//! `(f * g)(a) = f(g(a) a g(a)^-1) g(a)` and `right_skew_prod` follows
//! `(f * g)(a) = f(a) g(f(a)^-1 a f(a))`, both sending `a` to zero when the
//! twisting value vanishes. Inverse nodes carry the closed forms for linear,
//! affine and real-coefficient polynomial arguments.

use std::fmt;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linsolve::solve_affine_unit;
use crate::orbit::Orbit;
use crate::quat::{conjugate_action, dist, Quaternion, ONE};
use crate::realroots::root_orbits;
use crate::sample;
use crate::series::SphericalSeries;
use crate::skewpoly::SkewPoly;

/// Function constant on conjugation orbits, carried as a closure of the
/// orbit invariants `(re, norm)`. Not serializable; built in code only.
#[derive(Clone)]
pub struct OrbitFn {
    pub label: String,
    pub func: Arc<dyn Fn(f64, f64) -> Quaternion + Send + Sync>,
}

impl fmt::Debug for OrbitFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrbitFn({})", self.label)
    }
}

#[derive(Clone, Debug)]
pub enum FuncExpr {
    Const(Quaternion),
    /// The coordinate function `T`.
    Identity,
    /// Quaternion conjugation.
    Conjugation,
    Poly(SkewPoly),
    Series(SphericalSeries),
    OrbitConstant(OrbitFn),
    Sum(Vec<FuncExpr>),
    /// Left scalar multiple `c * F`.
    Scale(Quaternion, Box<FuncExpr>),
    SkewProd(Box<FuncExpr>, Box<FuncExpr>),
    RightSkewProd(Box<FuncExpr>, Box<FuncExpr>),
    /// Left skew inverse of `T - q0`.
    SkewInvLinear(Quaternion),
    /// Right skew inverse of `T - q0`.
    RightSkewInvLinear(Quaternion),
    /// Left skew inverse of a real-coefficient polynomial, with its pole
    /// orbits precomputed at construction.
    SkewInvRealPoly {
        poly: SkewPoly,
        poles: Vec<Orbit>,
    },
    /// Left skew inverse of `a + b T`, solved pointwise.
    SkewInvAffine {
        a: Quaternion,
        b: Quaternion,
    },
    /// `outer` after `inner`.
    Compose {
        outer: Box<FuncExpr>,
        inner: Box<FuncExpr>,
    },
    Exp(Box<FuncExpr>),
    Log(Box<FuncExpr>),
}

impl FuncExpr {
    pub fn constant(c: Quaternion) -> FuncExpr {
        FuncExpr::Const(c)
    }

    pub fn identity() -> FuncExpr {
        FuncExpr::Identity
    }

    /// Untwisted polynomial node; twisted coefficients have no pointwise
    /// evaluation on all of the quaternions.
    pub fn poly(p: SkewPoly) -> Result<FuncExpr> {
        if p.twist().is_some() {
            return Err(Error::TwistMismatch);
        }
        Ok(FuncExpr::Poly(p))
    }

    pub fn real_poly(coeffs: &[f64]) -> FuncExpr {
        FuncExpr::Poly(SkewPoly::from_real(coeffs))
    }

    pub fn series(s: SphericalSeries) -> FuncExpr {
        FuncExpr::Series(s)
    }

    pub fn orbit_constant<F>(label: &str, f: F) -> FuncExpr
    where
        F: Fn(f64, f64) -> Quaternion + Send + Sync + 'static,
    {
        FuncExpr::OrbitConstant(OrbitFn {
            label: label.to_string(),
            func: Arc::new(f),
        })
    }

    pub fn sum(terms: Vec<FuncExpr>) -> FuncExpr {
        FuncExpr::Sum(terms)
    }

    pub fn scale(c: Quaternion, f: FuncExpr) -> FuncExpr {
        FuncExpr::Scale(c, Box::new(f))
    }

    pub fn skew_prod(f: FuncExpr, g: FuncExpr) -> FuncExpr {
        FuncExpr::SkewProd(Box::new(f), Box::new(g))
    }

    pub fn right_skew_prod(f: FuncExpr, g: FuncExpr) -> FuncExpr {
        FuncExpr::RightSkewProd(Box::new(f), Box::new(g))
    }

    pub fn skew_inv_linear(q0: Quaternion) -> FuncExpr {
        FuncExpr::SkewInvLinear(q0)
    }

    pub fn right_skew_inv_linear(q0: Quaternion) -> FuncExpr {
        FuncExpr::RightSkewInvLinear(q0)
    }

    /// Validates real coefficients and locates the pole orbits up front.
    pub fn skew_inv_real_poly(p: SkewPoly) -> Result<FuncExpr> {
        if p.twist().is_some() {
            return Err(Error::TwistMismatch);
        }
        if !p.is_real(1e-12) {
            return Err(Error::NonRealCoefficients);
        }
        if p.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let reals: Vec<f64> = p.coeffs().iter().map(|c| c.re()).collect();
        let poles = if p.degree() == Some(0) {
            vec![]
        } else {
            root_orbits(&reals)?
        };
        Ok(FuncExpr::SkewInvRealPoly { poly: p, poles })
    }

    pub fn skew_inv_affine(a: Quaternion, b: Quaternion) -> Result<FuncExpr> {
        if a.is_zero() && b.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(FuncExpr::SkewInvAffine { a, b })
    }

    pub fn compose(outer: FuncExpr, inner: FuncExpr) -> FuncExpr {
        FuncExpr::Compose {
            outer: Box::new(outer),
            inner: Box::new(inner),
        }
    }

    pub fn exp(f: FuncExpr) -> FuncExpr {
        FuncExpr::Exp(Box::new(f))
    }

    pub fn log(f: FuncExpr) -> FuncExpr {
        FuncExpr::Log(Box::new(f))
    }

    /// Structural reduction to a single untwisted polynomial, when the tree
    /// is built from constants, `T`, polynomials, sums, scalings and left
    /// skew products (which multiply as polynomials).
    pub fn as_poly(&self) -> Option<SkewPoly> {
        match self {
            FuncExpr::Const(c) => Some(SkewPoly::constant(*c)),
            FuncExpr::Identity => Some(SkewPoly::t()),
            FuncExpr::Poly(p) => {
                if p.twist().is_some() {
                    None
                } else {
                    Some(p.clone())
                }
            }
            FuncExpr::Sum(terms) => {
                let mut acc = SkewPoly::zero();
                for t in terms {
                    acc = acc.add(&t.as_poly()?).ok()?;
                }
                Some(acc)
            }
            FuncExpr::Scale(c, f) => Some(f.as_poly()?.scale_left(*c)),
            FuncExpr::SkewProd(f, g) => f.as_poly()?.mul(&g.as_poly()?).ok(),
            _ => None,
        }
    }

    /// Pointwise evaluation. Errors carry the path of the failing node.
    pub fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        match self {
            FuncExpr::Const(c) => Ok(*c),
            FuncExpr::Identity => Ok(q),
            FuncExpr::Conjugation => Ok(q.conj()),
            FuncExpr::Poly(p) => Ok(p.eval(q)),
            FuncExpr::Series(s) => s.eval(q).map_err(|e| e.at("series")),
            FuncExpr::OrbitConstant(f) => Ok((f.func)(q.re(), q.norm())),
            FuncExpr::Sum(terms) => {
                let mut acc = Quaternion::default();
                for (i, t) in terms.iter().enumerate() {
                    acc = acc + t.eval(q).map_err(|e| e.at(&format!("sum[{i}]")))?;
                }
                Ok(acc)
            }
            FuncExpr::Scale(c, f) => Ok(*c * f.eval(q).map_err(|e| e.at("scale"))?),
            FuncExpr::SkewProd(f, g) => {
                let gv = g.eval(q).map_err(|e| e.at("skewprod.right"))?;
                if gv.is_zero() {
                    return Ok(Quaternion::default());
                }
                let moved = conjugate_action(gv, q).expect("nonzero actor");
                let fv = f.eval(moved).map_err(|e| e.at("skewprod.left"))?;
                Ok(fv * gv)
            }
            FuncExpr::RightSkewProd(f, g) => {
                let fv = f.eval(q).map_err(|e| e.at("rskewprod.left"))?;
                if fv.is_zero() {
                    return Ok(Quaternion::default());
                }
                let moved = conjugate_action(fv.inverse(), q).expect("nonzero actor");
                let gv = g.eval(moved).map_err(|e| e.at("rskewprod.right"))?;
                Ok(fv * gv)
            }
            FuncExpr::SkewInvLinear(q0) => {
                let d = char_value(*q0, q).map_err(|e| e.at("skewinv_linear"))?;
                Ok((q - q0.conj()) * d.inverse())
            }
            FuncExpr::RightSkewInvLinear(q0) => {
                let d = char_value(*q0, q).map_err(|e| e.at("rskewinv_linear"))?;
                Ok(d.inverse() * (q - q0.conj()))
            }
            FuncExpr::SkewInvRealPoly { poly, poles } => {
                for o in poles {
                    if o.contains_tol(q, 1e-12) {
                        return Err(Error::PoleOrbit.at("skewinv_realpoly"));
                    }
                }
                let v = poly.eval(q);
                let deg = poly.degree().unwrap_or(0) as i32;
                let scale = poly.coeff_scale() * q.norm().max(1.0).powi(deg);
                if v.norm() <= 1e-13 * scale {
                    return Err(Error::PoleOrbit.at("skewinv_realpoly"));
                }
                Ok(v.inverse())
            }
            FuncExpr::SkewInvAffine { a, b } => {
                solve_affine_unit(*a, *b, q).map_err(|e| e.at("skewinv_affine"))
            }
            FuncExpr::Compose { outer, inner } => {
                let v = inner.eval(q).map_err(|e| e.at("compose.inner"))?;
                outer.eval(v).map_err(|e| e.at("compose.outer"))
            }
            FuncExpr::Exp(f) => Ok(f.eval(q).map_err(|e| e.at("exp"))?.exp()),
            FuncExpr::Log(f) => f
                .eval(q)
                .map_err(|e| e.at("log"))?
                .ln()
                .map_err(|e| e.at("log")),
        }
    }
}

/// `q^2 - 2 Re(q0) q + |q0|^2`, the real characteristic of `O(q0)` at `q`;
/// a pole exactly on the orbit of `q0`.
fn char_value(q0: Quaternion, q: Quaternion) -> Result<Quaternion> {
    let d = q * q - 2.0 * q0.re() * q + Quaternion::real(q0.norm_sqr());
    if d.norm() <= 1e-13 * (1.0 + q.norm_sqr() + q0.norm_sqr()) {
        return Err(Error::PoleOrbit);
    }
    Ok(d)
}

/// Whether the left skew inverse of `T - q0` can never attain `x`: the
/// excluded set is `x = 0` together with `Re x = 0, Re(q0 x) = -1/2`.
pub fn left_inverse_image_excluded(q0: Quaternion, x: Quaternion) -> bool {
    if x.is_zero() {
        return true;
    }
    let tol = 1e-12 * (1.0 + q0.norm()) * (1.0 + x.norm());
    x.re().abs() <= tol && ((q0 * x).re() + 0.5).abs() <= tol
}

/// Point `q` with `(T - q0)^<-1>(q) = x`, namely `x^-1 q0 x + x^-1`;
/// refuses values in the excluded image set.
pub fn left_inverse_preimage(q0: Quaternion, x: Quaternion) -> Result<Quaternion> {
    if left_inverse_image_excluded(q0, x) {
        return Err(Error::ExcludedImagePoint);
    }
    let xi = x.inverse();
    Ok(xi * q0 * x + xi)
}

/// Sampled test of left distributivity over constants: draws `a, c1, c2`
/// and compares `(f * (c1 + c2))(a)` with `(f * c1)(a) + (f * c2)(a)`.
pub fn is_skew_convex(f: &FuncExpr, rng: &mut ChaCha8Rng, samples: usize, tol: f64) -> Result<bool> {
    let mut done = 0;
    let mut attempts = 0;
    let mut last_err = Error::OutsideRegion;
    while done < samples {
        attempts += 1;
        if attempts > 50 + 20 * samples {
            return Err(last_err);
        }
        let a = sample::quat_in_box(rng, 1.5);
        let c1 = sample::nonzero_in_box(rng, 1.5, 0.05);
        let c2 = sample::nonzero_in_box(rng, 1.5, 0.05);
        let c = c1 + c2;
        if c.norm() < 0.05 {
            continue;
        }
        let at = |b: Quaternion| -> Result<Quaternion> {
            let moved = conjugate_action(b, a)?;
            Ok(f.eval(moved)? * b)
        };
        let (v, v1, v2) = match (at(c), at(c1), at(c2)) {
            (Ok(v), Ok(v1), Ok(v2)) => (v, v1, v2),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => {
                last_err = e;
                continue;
            }
        };
        let scale = 1.0 + v1.norm() + v2.norm();
        if dist(v, v1 + v2) > tol * scale {
            return Ok(false);
        }
        done += 1;
    }
    Ok(true)
}

/// Residuals `|(g * f)(q) - 1|` and `|(f * g)(q) - 1|` of a claimed skew
/// inverse pair at one point.
pub fn skew_inverse_roundtrip(f: &FuncExpr, g: &FuncExpr, q: Quaternion) -> Result<(f64, f64)> {
    let left = FuncExpr::skew_prod(g.clone(), f.clone()).eval(q)?;
    let right = FuncExpr::skew_prod(f.clone(), g.clone()).eval(q)?;
    Ok(((left - ONE).norm(), (right - ONE).norm()))
}
