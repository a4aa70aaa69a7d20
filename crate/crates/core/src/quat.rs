//! Quaternion arithmetic over `f64`.
//!
//! `Quaternion` is a plain value type `w + x i + y j + z k` with the Hamilton
//! product (`i j = k`). On top of the ring operations it carries the pieces
//! the rest of the crate leans on: the conjugation action `p q p^-1`, the
//! exponential, and the principal logarithm.

use crate::error::{Error, Result};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Absolute tolerance used for membership and degeneracy checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

impl Quaternion {
    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.w
    }

    /// Imaginary part as a quaternion with zero real component.
    #[inline]
    pub fn imag(&self) -> Quaternion {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn imag_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    #[inline]
    pub fn conj(&self) -> Quaternion {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse. The zero quaternion yields non-finite
    /// components; callers guard where zero is meaningful.
    #[inline]
    pub fn inverse(&self) -> Quaternion {
        let n = self.norm_sqr();
        let c = self.conj();
        Quaternion::new(c.w / n, c.x / n, c.y / n, c.z / n)
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.w == 0.0 && self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.imag_norm() <= tol * (1.0 + self.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// `self` raised to a nonnegative integer power.
    pub fn powi(&self, n: usize) -> Quaternion {
        let mut acc = ONE;
        for _ in 0..n {
            acc = acc * *self;
        }
        acc
    }

    /// Unit imaginary direction `Im(q)/|Im(q)|`, or `None` for real `q`.
    pub fn imag_unit(&self) -> Option<Quaternion> {
        let n = self.imag_norm();
        if n == 0.0 {
            return None;
        }
        Some(Quaternion::new(0.0, self.x / n, self.y / n, self.z / n))
    }

    /// Quaternion exponential, `e^w (cos|v| + (v/|v|) sin|v|)`.
    pub fn exp(&self) -> Quaternion {
        let ew = self.w.exp();
        let v = self.imag_norm();
        if v == 0.0 {
            return Quaternion::real(ew);
        }
        let s = ew * v.sin() / v;
        Quaternion::new(ew * v.cos(), s * self.x, s * self.y, s * self.z)
    }

    /// Principal logarithm. The imaginary angle lies in `(0, pi)` for
    /// non-real inputs; positive reals map to the real log. Points on the
    /// closed negative real axis have no principal value.
    pub fn ln(&self) -> Result<Quaternion> {
        let v = self.imag_norm();
        let n = self.norm();
        if v == 0.0 {
            if self.w <= 0.0 {
                return Err(Error::BranchCut);
            }
            return Ok(Quaternion::real(self.w.ln()));
        }
        let angle = v.atan2(self.w);
        let s = angle / v;
        Ok(Quaternion::new(n.ln(), s * self.x, s * self.y, s * self.z))
    }
}

/// Conjugation action `p q p^-1`. Errors on a zero actor.
pub fn conjugate_action(p: Quaternion, q: Quaternion) -> Result<Quaternion> {
    if p.is_zero() {
        return Err(Error::ZeroActor);
    }
    Ok(p * q * p.inverse())
}

/// Conjugation by the commutator: `(pq - qp) q (pq - qp)^-1`, which equals
/// `conj(q)` whenever `p` and `q` do not commute.
pub fn commutator_conjugate(p: Quaternion, q: Quaternion) -> Result<Quaternion> {
    let c = p * q - q * p;
    let scale = p.norm() * q.norm();
    if c.norm() <= 1e-14 * (1.0 + scale) {
        return Err(Error::Commuting);
    }
    conjugate_action(c, q)
}

/// `|a - b|`, the distance used throughout the tests.
#[inline]
pub fn dist(a: Quaternion, b: Quaternion) -> f64 {
    (a - b).norm()
}

impl Add for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Quaternion;
    #[inline]
    fn div(self, s: f64) -> Quaternion {
        Quaternion::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Quaternion::real(w)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.w)?;
        for (c, unit) in [(self.x, "i"), (self.y, "j"), (self.z, "k")] {
            if c >= 0.0 {
                write!(f, "+{c}{unit}")?;
            } else {
                write!(f, "{c}{unit}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        dist(a, b) <= tol
    }

    #[test]
    fn hamilton_table() {
        assert_eq!(I * J, K);
        assert_eq!(J * K, I);
        assert_eq!(K * I, J);
        assert_eq!(I * I, -ONE);
        assert_eq!(J * J, -ONE);
        assert_eq!(K * K, -ONE);
    }

    #[test]
    fn square_of_one_plus_j() {
        let q = ONE + J;
        assert_eq!(q * q, 2.0 * J);
    }

    #[test]
    fn conjugation_by_j_flips_i() {
        let r = conjugate_action(J, I).unwrap();
        assert!(close(r, -I, 1e-15));
    }

    #[test]
    fn conjugation_rejects_zero_actor() {
        assert_eq!(conjugate_action(ZERO, I), Err(Error::ZeroActor));
    }

    #[test]
    fn conjugation_preserves_re_and_norm() {
        let p = Quaternion::new(0.3, -1.2, 0.7, 2.0);
        let q = Quaternion::new(-0.5, 0.4, 1.1, -0.2);
        let r = conjugate_action(p, q).unwrap();
        assert!((r.re() - q.re()).abs() < 1e-12);
        assert!((r.norm() - q.norm()).abs() < 1e-12);
    }

    #[test]
    fn commutator_conjugate_is_conjugation() {
        let r = commutator_conjugate(K, ONE + I).unwrap();
        assert!(close(r, ONE - I, 1e-14));
        // jij^-1 = -i comes from the same identity via p = j.
        let s = commutator_conjugate(J, I).unwrap();
        assert!(close(s, -I, 1e-14));
    }

    #[test]
    fn commutator_conjugate_rejects_commuting_pairs() {
        assert_eq!(commutator_conjugate(I, I + ONE), Err(Error::Commuting));
        assert_eq!(
            commutator_conjugate(Quaternion::real(2.0), J),
            Err(Error::Commuting)
        );
    }

    #[test]
    fn exp_of_half_pi_i_is_i() {
        assert!(close((FRAC_PI_2 * I).exp(), I, 1e-15));
    }

    #[test]
    fn ln_of_j_is_half_pi_j() {
        assert!(close(J.ln().unwrap(), FRAC_PI_2 * J, 1e-15));
    }

    #[test]
    fn ln_round_trips_inside_principal_strip() {
        let q = Quaternion::new(0.4, -0.3, 0.8, 0.1);
        assert!(close(q.ln().unwrap().exp(), q, 1e-13));
        // angle of the log stays in (0, pi)
        let l = q.ln().unwrap();
        let angle = l.imag_norm();
        assert!(angle > 0.0 && angle < PI);
    }

    #[test]
    fn ln_branch_cut_on_negative_reals() {
        assert_eq!(Quaternion::real(-1.0).ln(), Err(Error::BranchCut));
        assert_eq!(ZERO.ln(), Err(Error::BranchCut));
        assert!(Quaternion::real(2.0).ln().unwrap() == Quaternion::real(2.0_f64.ln()));
    }

    #[test]
    fn exp_intertwines_conjugation() {
        // exp(p q p^-1) = p exp(q) p^-1, the action-preserving property.
        let p = Quaternion::new(1.0, 0.5, -0.7, 0.2);
        let q = Quaternion::new(0.2, 0.9, -0.4, 1.3);
        let lhs = conjugate_action(p, q).unwrap().exp();
        let rhs = conjugate_action(p, q.exp()).unwrap();
        assert!(close(lhs, rhs, 1e-12));
    }
}
