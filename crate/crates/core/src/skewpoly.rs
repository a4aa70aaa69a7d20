//! Skew polynomials over the quaternions.
//!
//! Coefficients sit on the left of the powers of `T`, constant term first.
//! An optional `(sigma, delta)` twist changes the commutation rule to
//! `T a = sigma(a) T + delta(a)`; without a twist `T` is central.
//! Evaluation follows the remainder convention: `P(a)` is the remainder of
//! right division by `T - a`, which for untwisted polynomials is the power
//! sum with powers on the right.

use crate::error::{Error, Result};
use crate::orbit::Orbit;
use crate::quat::{conjugate_action, Quaternion, ONE};
use std::fmt;
use std::sync::Arc;

type EndoFn = Box<dyn Fn(Quaternion) -> Quaternion + Send + Sync>;

/// A `(sigma, delta)` pair acting on the quaternions. `sigma` should be a
/// ring endomorphism and `delta` a `sigma`-derivation; the identity pair
/// recovers plain conjugation as the induced action.
pub struct SigmaDeltaAction {
    label: String,
    sigma: EndoFn,
    delta: EndoFn,
}

impl SigmaDeltaAction {
    pub fn new(
        label: impl Into<String>,
        sigma: impl Fn(Quaternion) -> Quaternion + Send + Sync + 'static,
        delta: impl Fn(Quaternion) -> Quaternion + Send + Sync + 'static,
    ) -> Self {
        SigmaDeltaAction {
            label: label.into(),
            sigma: Box::new(sigma),
            delta: Box::new(delta),
        }
    }

    /// Inner endomorphism `x -> s x s^-1` with zero derivation.
    pub fn inner(s: Quaternion) -> Result<Self> {
        if s.is_zero() {
            return Err(Error::ZeroActor);
        }
        let si = s.inverse();
        Ok(SigmaDeltaAction::new(
            format!("inner({s})"),
            move |x| s * x * si,
            |_| Quaternion::default(),
        ))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    #[inline]
    pub fn sigma(&self, q: Quaternion) -> Quaternion {
        (self.sigma)(q)
    }

    #[inline]
    pub fn delta(&self, q: Quaternion) -> Quaternion {
        (self.delta)(q)
    }

    /// Action of `b` on `a`: `sigma(b) a b^-1 + delta(b) b^-1`.
    pub fn action(&self, b: Quaternion, a: Quaternion) -> Result<Quaternion> {
        if b.is_zero() {
            return Err(Error::ZeroActor);
        }
        let bi = b.inverse();
        Ok(self.sigma(b) * a * bi + self.delta(b) * bi)
    }
}

impl fmt::Debug for SigmaDeltaAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SigmaDeltaAction({})", self.label)
    }
}

/// The untwisted action of `b` on `a` is conjugation, `b a b^-1`.
pub fn sd_action(twist: Option<&SigmaDeltaAction>, b: Quaternion, a: Quaternion) -> Result<Quaternion> {
    match twist {
        None => conjugate_action(b, a),
        Some(t) => t.action(b, a),
    }
}

pub type Twist = Arc<SigmaDeltaAction>;

#[derive(Clone)]
pub struct SkewPoly {
    coeffs: Vec<Quaternion>,
    twist: Option<Twist>,
}

fn trim(coeffs: &mut Vec<Quaternion>) {
    let max = coeffs.iter().fold(0.0_f64, |a, c| a.max(c.norm()));
    let cut = 1e-14 * max;
    while let Some(last) = coeffs.last() {
        if last.norm() <= cut {
            coeffs.pop();
        } else {
            break;
        }
    }
}

impl SkewPoly {
    /// Untwisted polynomial from constant-first coefficients.
    pub fn new(coeffs: Vec<Quaternion>) -> SkewPoly {
        let mut coeffs = coeffs;
        trim(&mut coeffs);
        SkewPoly { coeffs, twist: None }
    }

    pub fn with_twist(coeffs: Vec<Quaternion>, twist: Twist) -> SkewPoly {
        let mut coeffs = coeffs;
        trim(&mut coeffs);
        SkewPoly {
            coeffs,
            twist: Some(twist),
        }
    }

    pub fn zero() -> SkewPoly {
        SkewPoly::new(vec![])
    }

    pub fn constant(c: Quaternion) -> SkewPoly {
        SkewPoly::new(vec![c])
    }

    pub fn from_real(coeffs: &[f64]) -> SkewPoly {
        SkewPoly::new(coeffs.iter().map(|&c| Quaternion::real(c)).collect())
    }

    /// The monic linear polynomial `T - a`.
    pub fn t_minus(a: Quaternion) -> SkewPoly {
        SkewPoly::new(vec![-a, ONE])
    }

    /// The identity polynomial `T`.
    pub fn t() -> SkewPoly {
        SkewPoly::new(vec![Quaternion::default(), ONE])
    }

    pub fn coeffs(&self) -> &[Quaternion] {
        &self.coeffs
    }

    pub fn coeff(&self, m: usize) -> Quaternion {
        self.coeffs.get(m).copied().unwrap_or_default()
    }

    pub fn twist(&self) -> Option<&Twist> {
        self.twist.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.is_real(tol))
    }

    fn same_twist(&self, other: &SkewPoly) -> bool {
        match (&self.twist, &other.twist) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }

    /// Twist carried by either operand once compatibility is established.
    fn merged_twist(&self, other: &SkewPoly) -> Option<Twist> {
        self.twist.clone().or_else(|| other.twist.clone())
    }

    pub fn add(&self, other: &SkewPoly) -> Result<SkewPoly> {
        if !self.same_twist(other) {
            return Err(Error::TwistMismatch);
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for m in 0..n {
            coeffs.push(self.coeff(m) + other.coeff(m));
        }
        trim(&mut coeffs);
        Ok(SkewPoly {
            coeffs,
            twist: self.merged_twist(other),
        })
    }

    pub fn neg(&self) -> SkewPoly {
        SkewPoly {
            coeffs: self.coeffs.iter().map(|&c| -c).collect(),
            twist: self.twist.clone(),
        }
    }

    pub fn sub(&self, other: &SkewPoly) -> Result<SkewPoly> {
        self.add(&other.neg())
    }

    /// Multiply every coefficient by `c` on the left, i.e. `c * P`.
    pub fn scale_left(&self, c: Quaternion) -> SkewPoly {
        let mut coeffs: Vec<_> = self.coeffs.iter().map(|&p| c * p).collect();
        trim(&mut coeffs);
        SkewPoly {
            coeffs,
            twist: self.twist.clone(),
        }
    }

    /// `T * P` under the commutation rule of this ring.
    fn shift_up(&self) -> SkewPoly {
        let mut coeffs = vec![Quaternion::default(); self.coeffs.len() + 1];
        match &self.twist {
            None => {
                for (m, &c) in self.coeffs.iter().enumerate() {
                    coeffs[m + 1] = c;
                }
            }
            Some(t) => {
                for (m, &c) in self.coeffs.iter().enumerate() {
                    coeffs[m + 1] = coeffs[m + 1] + t.sigma(c);
                    coeffs[m] = coeffs[m] + t.delta(c);
                }
            }
        }
        trim(&mut coeffs);
        SkewPoly {
            coeffs,
            twist: self.twist.clone(),
        }
    }

    /// Ring product. Both operands must carry the same twist.
    pub fn mul(&self, other: &SkewPoly) -> Result<SkewPoly> {
        if !self.same_twist(other) {
            return Err(Error::TwistMismatch);
        }
        let twist = self.merged_twist(other);
        if self.is_zero() || other.is_zero() {
            return Ok(SkewPoly {
                coeffs: vec![],
                twist,
            });
        }
        if twist.is_none() {
            // T central: plain convolution of left coefficients.
            let mut coeffs =
                vec![Quaternion::default(); self.coeffs.len() + other.coeffs.len() - 1];
            for (m, &p) in self.coeffs.iter().enumerate() {
                for (n, &q) in other.coeffs.iter().enumerate() {
                    coeffs[m + n] = coeffs[m + n] + p * q;
                }
            }
            trim(&mut coeffs);
            return Ok(SkewPoly { coeffs, twist });
        }
        // General case: P * Q = sum_m p_m (T^m Q), building T^m Q iteratively.
        let mut shifted = SkewPoly {
            coeffs: other.coeffs.clone(),
            twist: twist.clone(),
        };
        let mut acc = SkewPoly {
            coeffs: vec![],
            twist: twist.clone(),
        };
        for (m, &p) in self.coeffs.iter().enumerate() {
            if m > 0 {
                shifted = shifted.shift_up();
            }
            acc = acc.add(&shifted.scale_left(p))?;
        }
        Ok(acc)
    }

    /// Evaluation at `a`: the remainder of right division by `T - a`.
    /// Untwisted this is `sum p_m a^m`; twisted it uses the recursion
    /// `N_0 = 1`, `N_{m+1}(a) = sigma(N_m(a)) a + delta(N_m(a))`.
    pub fn eval(&self, a: Quaternion) -> Quaternion {
        match &self.twist {
            None => {
                let mut r = Quaternion::default();
                for &c in self.coeffs.iter().rev() {
                    r = r * a + c;
                }
                r
            }
            Some(t) => {
                let mut nm = ONE;
                let mut r = Quaternion::default();
                for (m, &c) in self.coeffs.iter().enumerate() {
                    if m > 0 {
                        nm = t.sigma(nm) * a + t.delta(nm);
                    }
                    r = r + c * nm;
                }
                r
            }
        }
    }

    /// Right division by the monic linear `T - a`: returns `(Q, r)` with
    /// `P = Q (T - a) + r`. Generic long division, valid in any twist.
    pub fn right_divide(&self, a: Quaternion) -> (SkewPoly, Quaternion) {
        let deg = match self.degree() {
            None | Some(0) => {
                return (
                    SkewPoly {
                        coeffs: vec![],
                        twist: self.twist.clone(),
                    },
                    self.coeff(0),
                )
            }
            Some(d) => d,
        };
        // expansions[j] holds T^j * a as a coefficient vector.
        let mut expansions: Vec<SkewPoly> = Vec::with_capacity(deg);
        let mut e = SkewPoly {
            coeffs: vec![a],
            twist: self.twist.clone(),
        };
        expansions.push(e.clone());
        for _ in 1..deg {
            e = e.shift_up();
            expansions.push(e.clone());
        }
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Quaternion::default(); deg];
        for d in (1..=deg).rev() {
            let c = rem[d];
            quot[d - 1] = c;
            rem[d] = Quaternion::default();
            for (j, &ecoef) in expansions[d - 1].coeffs.iter().enumerate() {
                rem[j] = rem[j] + c * ecoef;
            }
        }
        trim(&mut quot);
        (
            SkewPoly {
                coeffs: quot,
                twist: self.twist.clone(),
            },
            rem[0],
        )
    }

    /// Remainder of right division by the (real, monic, central)
    /// characteristic polynomial of an orbit. Untwisted only.
    pub fn reduce_mod_orbit(&self, orbit: Orbit) -> Result<SkewPoly> {
        if self.twist.is_some() {
            return Err(Error::TwistMismatch);
        }
        if orbit.is_trivial() {
            let (_, r) = self.right_divide(Quaternion::real(orbit.re()));
            return Ok(SkewPoly::new(vec![r]));
        }
        let c = orbit.char_coeffs();
        let (c0, c1) = (c[0], c[1]);
        let mut rem = self.coeffs.clone();
        for d in (2..rem.len()).rev() {
            let lead = rem[d];
            rem[d] = Quaternion::default();
            rem[d - 1] = rem[d - 1] - lead * c1;
            rem[d - 2] = rem[d - 2] - lead * c0;
        }
        rem.truncate(2);
        Ok(SkewPoly::new(rem))
    }

    /// Term-wise derivative `sum m p_m T^(m-1)`. For untwisted polynomials
    /// this is the skew derivative as a function.
    pub fn formal_derivative(&self) -> SkewPoly {
        if self.coeffs.len() <= 1 {
            return SkewPoly {
                coeffs: vec![],
                twist: self.twist.clone(),
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(m, &c)| c * m as f64)
            .collect();
        SkewPoly {
            coeffs,
            twist: self.twist.clone(),
        }
    }

    /// Largest coefficient norm, the scale used by root thresholds.
    pub fn coeff_scale(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.norm()))
    }
}

impl fmt::Debug for SkewPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SkewPoly{:?}", self.coeffs)?;
        if let Some(t) = &self.twist {
            write!(f, " twist {}", t.label())?;
        }
        Ok(())
    }
}

/// Point of the orbit where an untwisted `P` vanishes, if any.
///
/// Reducing `P` modulo the characteristic polynomial leaves `c T + d`; on
/// the orbit `P(p) = c p + d`, so either the remainder is zero (the whole
/// orbit), or the unique candidate `-c^-1 d` must lie on the orbit.
pub fn root_on_orbit(p: &SkewPoly, orbit: Orbit) -> Result<Option<Quaternion>> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let deg = p.degree().unwrap() as i32;
    let scale = p.coeff_scale() * orbit.norm().max(1.0).powi(deg);
    if orbit.is_trivial() {
        let v = p.eval(Quaternion::real(orbit.re()));
        return Ok(if v.norm() <= 1e-9 * scale {
            Some(Quaternion::real(orbit.re()))
        } else {
            None
        });
    }
    let rem = p.reduce_mod_orbit(orbit)?;
    let c = rem.coeff(1);
    let d = rem.coeff(0);
    if c.norm() <= 1e-12 * scale.max(d.norm()) {
        return Ok(if d.norm() <= 1e-12 * scale {
            // P is divisible by the characteristic polynomial.
            Some(orbit.point_in_direction(crate::quat::I))
        } else {
            None
        });
    }
    let candidate = c.inverse() * (-d);
    Ok(if orbit.contains(candidate) {
        Some(candidate)
    } else {
        None
    })
}

pub fn has_root_on_orbit(p: &SkewPoly, orbit: Orbit) -> Result<bool> {
    root_on_orbit(p, orbit).map(|r| r.is_some())
}
