//! Spherical series centered at a conjugation orbit.
//!
//! A spherical series is `S(q) = sum_n c_n P(q)^n` where `P` is the real
//! characteristic polynomial of the center orbit. Because `P(q)` commutes
//! with `q`, such sums behave like one-variable power series: they converge
//! on the region `|P(q)| < R`, differentiate term by term, and admit the
//! quotient decomposition `S = S(q0) + E * (T - q0)` with an explicitly
//! computable polynomial `E`.

use crate::error::{Error, Result};
use crate::orbit::Orbit;
use crate::quat::{Quaternion, ONE};
use crate::skewpoly::SkewPoly;

#[derive(Clone, Debug)]
pub struct SphericalSeries {
    orbit: Orbit,
    coeffs: Vec<Quaternion>,
    declared_radius: Option<f64>,
}

/// Estimated convergence radius together with how trustworthy it is.
/// Fewer than four nonzero tail coefficients make the estimate a guess.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadiusEstimate {
    pub radius: f64,
    pub confident: bool,
}

impl SphericalSeries {
    pub fn new(
        orbit: Orbit,
        coeffs: Vec<Quaternion>,
        declared_radius: Option<f64>,
    ) -> Result<SphericalSeries> {
        if let Some(r) = declared_radius {
            if !(r > 0.0) {
                return Err(Error::InvalidExpr(
                    "series radius must be positive".into(),
                ));
            }
        }
        Ok(SphericalSeries {
            orbit,
            coeffs,
            declared_radius,
        })
    }

    pub fn orbit(&self) -> Orbit {
        self.orbit
    }

    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Quaternion {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    pub fn declared_radius(&self) -> Option<f64> {
        self.declared_radius
    }

    /// `1 / limsup |c_n|^(1/n)` read off the tail of the coefficient list.
    pub fn radius_estimate(&self) -> RadiusEstimate {
        let tail: Vec<(usize, f64)> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, c)| !c.is_zero())
            .map(|(n, c)| (n, c.norm()))
            .collect();
        if tail.is_empty() {
            return RadiusEstimate {
                radius: f64::INFINITY,
                confident: false,
            };
        }
        let window = &tail[tail.len().saturating_sub(8)..];
        let limsup = window
            .iter()
            .map(|&(n, c)| c.powf(1.0 / n as f64))
            .fold(0.0_f64, f64::max);
        RadiusEstimate {
            radius: if limsup == 0.0 {
                f64::INFINITY
            } else {
                1.0 / limsup
            },
            confident: tail.len() >= 4,
        }
    }

    /// Radius used by the evaluator: the declared one, else a confident
    /// estimate, else unbounded (short lists are polynomials in `P`).
    pub fn effective_radius(&self) -> f64 {
        if let Some(r) = self.declared_radius {
            return r;
        }
        let est = self.radius_estimate();
        if est.confident {
            est.radius
        } else {
            f64::INFINITY
        }
    }

    /// Sum of the series at `q`, refusing points with `|P(q)| >= R`.
    pub fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        self.eval_with_tail(q).map(|(v, _)| v)
    }

    /// Evaluation plus the geometric tail bound
    /// `|c_N| |P(q)|^N / (1 - |P(q)|/R)` attached to the last kept term.
    pub fn eval_with_tail(&self, q: Quaternion) -> Result<(Quaternion, f64)> {
        let t = self.orbit.char_eval(q);
        let r = self.effective_radius();
        let tn = t.norm();
        if tn >= r {
            return Err(Error::OutsideRegion);
        }
        let mut acc = Quaternion::default();
        let mut pw = ONE;
        for (n, &c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                pw = pw * t;
            }
            acc = acc + c * pw;
        }
        let tail = if r.is_finite() && !self.coeffs.is_empty() {
            let nn = self.coeffs.len() - 1;
            self.coeff(nn).norm() * tn.powi(nn as i32) / (1.0 - tn / r)
        } else {
            0.0
        };
        Ok((acc, tail))
    }

    /// Term-wise skew derivative, `sum n c_n P^(n-1) P'`, reassembled as a
    /// spherical pair `S1 + S2 * T`.
    pub fn derivative(&self) -> SphericalPair {
        let o = self.orbit;
        if o.is_trivial() {
            // P = T - r, so the derivative is again a single series.
            let coeffs: Vec<Quaternion> = self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &c)| c * n as f64)
                .collect();
            return SphericalPair {
                s1: SphericalSeries {
                    orbit: o,
                    coeffs,
                    declared_radius: self.declared_radius,
                },
                s2: SphericalSeries {
                    orbit: o,
                    coeffs: vec![],
                    declared_radius: self.declared_radius,
                },
            };
        }
        // P' = 2T - 2x0: the T part feeds S2, the constant part S1.
        let x0 = o.re();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (n, &c) in self.coeffs.iter().enumerate().skip(1) {
            let scaled = c * (2.0 * n as f64);
            a.push(scaled * (-x0));
            b.push(scaled);
        }
        SphericalPair {
            s1: SphericalSeries {
                orbit: o,
                coeffs: a,
                declared_radius: self.declared_radius,
            },
            s2: SphericalSeries {
                orbit: o,
                coeffs: b,
                declared_radius: self.declared_radius,
            },
        }
    }

    /// Quotient polynomial `E` of `S = S(q0) + E * (T - q0)`, built from the
    /// recursion `P_1 = T + q0 - 2 x0`, `P_(n+1) = P(q0)^n P_1 + P P_n`
    /// (with `P_1 = 1` at a trivial center).
    pub fn dq_decomposition(&self, q0: Quaternion) -> Result<DqDecomposition> {
        let o = self.orbit;
        let t0 = o.char_eval(q0);
        let r = self.effective_radius();
        if t0.norm() >= r {
            return Err(Error::OutsideRegion);
        }
        let p_o = SkewPoly::from_real(&o.char_coeffs());
        let p1 = if o.is_trivial() {
            SkewPoly::constant(ONE)
        } else {
            SkewPoly::new(vec![q0 - Quaternion::real(2.0 * o.re()), ONE])
        };
        let mut quotient = SkewPoly::zero();
        let mut pn = p1.clone();
        let mut t0_pow = ONE;
        for n in 1..self.coeffs.len() {
            if n > 1 {
                // P_n for the current n from P_(n-1)
                t0_pow = t0_pow * t0;
                pn = p1.scale_left(t0_pow).add(&p_o.mul(&pn)?)?;
            }
            quotient = quotient.add(&pn.scale_left(self.coeff(n)))?;
        }
        let (value_at_base, _) = self.eval_with_tail(q0)?;
        Ok(DqDecomposition {
            quotient,
            base: q0,
            value_at_base,
            orbit: o,
            last_coeff_norm: self.coeffs.last().map_or(0.0, |c| c.norm()),
            kept_terms: self.coeffs.len().saturating_sub(1),
            radius: r,
        })
    }
}

/// Truncated quotient of `S - S(q0)` by `(T - q0)`, with the data needed to
/// bound the dropped tail through `|P_n(q)| <= n |q + q0 - 2 x0| m^(n-1)`.
#[derive(Clone, Debug)]
pub struct DqDecomposition {
    pub quotient: SkewPoly,
    pub base: Quaternion,
    pub value_at_base: Quaternion,
    orbit: Orbit,
    last_coeff_norm: f64,
    kept_terms: usize,
    radius: f64,
}

impl DqDecomposition {
    /// Bound on the dropped terms of the quotient at `q`, treating the
    /// coefficients past the list as geometric with ratio `1/R`.
    pub fn tail_bound(&self, q: Quaternion) -> f64 {
        if !self.radius.is_finite() {
            return 0.0;
        }
        let m = self
            .orbit
            .char_eval(q)
            .norm()
            .max(self.orbit.char_eval(self.base).norm());
        let b = (q + self.base - Quaternion::real(2.0 * self.orbit.re())).norm();
        let n0 = self.kept_terms;
        let mut tail = 0.0;
        let mut coeff = self.last_coeff_norm;
        for k in 1..400 {
            coeff /= self.radius;
            let n = n0 + k;
            let term = coeff * (n as f64) * b * m.powi(n as i32 - 1);
            tail += term;
            if term < 1e-18 * (1.0 + tail) {
                break;
            }
        }
        tail
    }

    /// `|S(q) - S(q0) - (E * (T - q0))(q)|` at a sample point.
    pub fn reconstruction_residual(&self, series: &SphericalSeries, q: Quaternion) -> Result<f64> {
        let product = self
            .quotient
            .mul(&SkewPoly::t_minus(self.base))
            .expect("untwisted");
        let lhs = series.eval(q)?;
        let rhs = self.value_at_base + product.eval(q);
        Ok((lhs - rhs).norm())
    }
}

/// A function of the form `S1 + S2 * T` with both series on one orbit; the
/// shape produced by coefficient extraction and closed under derivatives.
#[derive(Clone, Debug)]
pub struct SphericalPair {
    pub s1: SphericalSeries,
    pub s2: SphericalSeries,
}

impl SphericalPair {
    pub fn new(s1: SphericalSeries, s2: SphericalSeries) -> SphericalPair {
        SphericalPair { s1, s2 }
    }

    pub fn orbit(&self) -> Orbit {
        self.s1.orbit
    }

    /// `S1(q) + S2(q) q`; the skew product with `T` is right multiplication
    /// by `q` because `S2(q)` is a polynomial in `P(q)`.
    pub fn eval(&self, q: Quaternion) -> Result<Quaternion> {
        Ok(self.s1.eval(q)? + self.s2.eval(q)? * q)
    }

    /// Term-wise derivative of `S1 + S2 * T`, closed in pair form:
    /// the product rule contributes `S2`, and `S2' * T * T` re-enters the
    /// pair through `T^2 = P + 2 x0 T - y0^2`.
    pub fn derivative(&self) -> Result<SphericalPair> {
        let o = self.orbit();
        if o.is_trivial() {
            return Err(Error::TrivialOrbit);
        }
        let d1 = self.s1.derivative();
        let d2 = self.s2.derivative();
        let (x0, y0) = (o.re(), o.norm());
        let b2 = &d2.s2;
        // S1 part: A1 + shift(B2) - y0^2 B2 + S2
        let len = [
            d1.s1.coeffs.len(),
            b2.coeffs.len() + 1,
            self.s2.coeffs.len(),
        ]
        .into_iter()
        .max()
        .unwrap();
        let mut s1 = vec![Quaternion::default(); len];
        for (m, v) in s1.iter_mut().enumerate() {
            let mut acc = d1.s1.coeff(m) + self.s2.coeff(m) - b2.coeff(m) * (y0 * y0);
            if m >= 1 {
                acc = acc + b2.coeff(m - 1);
            }
            *v = acc;
        }
        // S2 part: B1 + A2 + 2 x0 B2
        let len2 = [d1.s2.coeffs.len(), d2.s1.coeffs.len(), b2.coeffs.len()]
            .into_iter()
            .max()
            .unwrap();
        let mut s2 = vec![Quaternion::default(); len2];
        for (m, v) in s2.iter_mut().enumerate() {
            *v = d1.s2.coeff(m) + d2.s1.coeff(m) + b2.coeff(m) * (2.0 * x0);
        }
        let r = self.s1.declared_radius;
        Ok(SphericalPair {
            s1: SphericalSeries::new(o, s1, r)?,
            s2: SphericalSeries::new(o, s2, r)?,
        })
    }
}

/// Partial sums of the right skew inverse of `T - p` expanded around the
/// (nontrivial) orbit `O`: `sum_n P(q)^(-n-1) (q + p - 2 x0) P(p)^n`,
/// valid on `|P(p)| < |P(q)|`.
pub fn right_inverse_series_partials(
    p: Quaternion,
    orbit: Orbit,
    q: Quaternion,
    terms: usize,
) -> Result<Vec<Quaternion>> {
    if orbit.is_trivial() {
        return Err(Error::TrivialOrbit);
    }
    let tq = orbit.char_eval(q);
    let tp = orbit.char_eval(p);
    if tp.norm() >= tq.norm() {
        return Err(Error::OutsideAnnulus);
    }
    let mid = q + p - Quaternion::real(2.0 * orbit.re());
    let tq_inv = tq.inverse();
    let mut left = tq_inv;
    let mut right = ONE;
    let mut acc = Quaternion::default();
    let mut out = Vec::with_capacity(terms);
    for n in 0..terms {
        if n > 0 {
            left = left * tq_inv;
            right = right * tp;
        }
        acc = acc + left * mid * right;
        out.push(acc);
    }
    Ok(out)
}

pub fn right_inverse_series_value(
    p: Quaternion,
    orbit: Orbit,
    q: Quaternion,
    terms: usize,
) -> Result<Quaternion> {
    let partials = right_inverse_series_partials(p, orbit, q, terms)?;
    partials.last().copied().ok_or(Error::OutsideAnnulus)
}
