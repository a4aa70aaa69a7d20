//! Conjugation orbits and slice planes.
//!
//! The orbit of `q` under conjugation is the sphere of quaternions sharing
//! `Re(q)` and `|q|`; it degenerates to the single point `q` when `q` is
//! real. An orbit is stored by those two numbers alone. A slice plane is a
//! copy of the complex plane `R + R I` inside the quaternions, fixed by a
//! unit imaginary direction `I`.

use crate::error::{Error, Result};
use crate::quat::{self, Quaternion, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orbit {
    x0: f64,
    y0: f64,
}

impl Orbit {
    /// Orbit with real part `x0` and norm `y0 >= |x0|`. A `y0` within
    /// tolerance below `|x0|` is clamped to exactly `|x0|` (trivial orbit).
    pub fn new(x0: f64, y0: f64) -> Result<Orbit> {
        if y0 < x0.abs() {
            if y0 >= x0.abs() - DEFAULT_TOL * (1.0 + y0.abs()) {
                return Ok(Orbit { x0, y0: x0.abs() });
            }
            return Err(Error::InvalidOrbit { re: x0, norm: y0 });
        }
        Ok(Orbit { x0, y0 })
    }

    pub fn of(q: Quaternion) -> Orbit {
        Orbit {
            x0: q.re(),
            y0: q.norm(),
        }
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.x0
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        self.y0
    }

    /// Radius of the imaginary sphere, `sqrt(y0^2 - x0^2)` clamped at zero.
    pub fn imag_rad(&self) -> f64 {
        let d = self.y0 * self.y0 - self.x0 * self.x0;
        if d <= 0.0 {
            0.0
        } else {
            d.sqrt()
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.imag_rad() == 0.0
    }

    /// Membership test with the shared absolute tolerance scaled by the
    /// orbit size: both `|Re q - x0|` and `||q| - y0|` below
    /// `tol * (1 + y0)`.
    pub fn contains_tol(&self, q: Quaternion, tol: f64) -> bool {
        let s = tol * (1.0 + self.y0);
        (q.re() - self.x0).abs() < s && (q.norm() - self.y0).abs() < s
    }

    pub fn contains(&self, q: Quaternion) -> bool {
        self.contains_tol(q, DEFAULT_TOL)
    }

    /// Coefficients of the characteristic polynomial, constant first:
    /// `[y0^2, -2 x0, 1]` for a sphere, `[-x0, 1]` for a point.
    pub fn char_coeffs(&self) -> Vec<f64> {
        if self.is_trivial() {
            vec![-self.x0, 1.0]
        } else {
            vec![self.y0 * self.y0, -2.0 * self.x0, 1.0]
        }
    }

    /// Characteristic polynomial evaluated at `q`:
    /// `q^2 - 2 x0 q + y0^2`, or `q - x0` on a trivial orbit. Real
    /// coefficients make the value commute with `q`.
    pub fn char_eval(&self, q: Quaternion) -> Quaternion {
        if self.is_trivial() {
            q - Quaternion::real(self.x0)
        } else {
            q * q - 2.0 * self.x0 * q + Quaternion::real(self.y0 * self.y0)
        }
    }

    /// The point of the orbit in direction `j` (a unit imaginary).
    pub fn point_in_direction(&self, j: Quaternion) -> Quaternion {
        Quaternion::real(self.x0) + self.imag_rad() * j
    }

    /// Intersection with a slice plane: the pair `(x0 + r I, x0 - r I)`
    /// with `r = imag_rad()`. Both coincide on a trivial orbit.
    pub fn slice_points(&self, plane: SlicePlane) -> (Quaternion, Quaternion) {
        let r = self.imag_rad();
        let base = Quaternion::real(self.x0);
        (base + r * plane.unit(), base - r * plane.unit())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlicePlane {
    i: Quaternion,
}

impl SlicePlane {
    /// Plane spanned by `1` and the direction of `v`, which must be purely
    /// imaginary up to tolerance and nonzero. The direction is normalized so
    /// that `unit()^2 = -1` holds exactly up to rounding.
    pub fn new(v: Quaternion) -> Result<SlicePlane> {
        let n = v.imag_norm();
        if n == 0.0 || v.re().abs() > 1e-12 * (1.0 + v.norm()) {
            return Err(Error::InvalidSlicePlane);
        }
        Ok(SlicePlane {
            i: Quaternion::new(0.0, v.x / n, v.y / n, v.z / n),
        })
    }

    /// The slice plane through a non-real point.
    pub fn through(q: Quaternion) -> Result<SlicePlane> {
        match q.imag_unit() {
            Some(u) => Ok(SlicePlane { i: u }),
            None => Err(Error::RealPoint),
        }
    }

    #[inline]
    pub fn unit(&self) -> Quaternion {
        self.i
    }

    /// Embed slice coordinates `(x, y)` as the quaternion `x + y I`.
    pub fn embed(&self, x: f64, y: f64) -> Quaternion {
        Quaternion::real(x) + y * self.i
    }

    /// Coordinates of a point of the plane; `None` when `q` is outside it.
    pub fn coords(&self, q: Quaternion, tol: f64) -> Option<(f64, f64)> {
        let y = q.x * self.i.x + q.y * self.i.y + q.z * self.i.z;
        let off = q.imag() - y * self.i;
        if off.norm() > tol * (1.0 + q.norm()) {
            return None;
        }
        Some((q.re(), y))
    }

    pub fn contains(&self, q: Quaternion, tol: f64) -> bool {
        self.coords(q, tol).is_some()
    }
}

impl Default for SlicePlane {
    fn default() -> Self {
        SlicePlane { i: quat::I }
    }
}
