//! Skew analysis over the quaternions.
//!
//! The crate implements a noncommutative function calculus in which the
//! pointwise product is replaced by the skew product
//! `(f * g)(a) = f(g(a) a g(a)^-1) g(a)`. Polynomials evaluated with powers
//! on the right turn this product into the ring product of skew polynomials,
//! and a full derivative theory (orbital and skew derivatives, spherical
//! series, Cauchy-type contour reconstruction) comes with it.
//!
//! Modules build on each other in order: quaternions and orbits, skew
//! polynomials, spherical series, function expressions, the calculus layer,
//! contour integration, and finally the named verification suites consumed
//! by the CLI and the acceptance tests.

pub mod calculus;
pub mod contour;
pub mod error;
pub mod expr;
pub mod json;
pub mod linsolve;
pub mod orbit;
pub mod quat;
pub mod realroots;
pub mod sample;
pub mod series;
pub mod skewpoly;
pub mod verify;

pub use error::{Error, Result};
pub use orbit::{Orbit, SlicePlane};
pub use quat::Quaternion;
pub use skewpoly::SkewPoly;
