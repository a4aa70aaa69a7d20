//! Seeded random sampling of quaternions, orbits and witnesses.
//!
//! Every generator takes an explicit `ChaCha8Rng` so that test suites and
//! the command line produce identical streams for identical seeds.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::orbit::Orbit;
use crate::quat::Quaternion;

/// Deterministic generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform quaternion with every component in `[-bound, bound]`.
pub fn quat_in_box(r: &mut ChaCha8Rng, bound: f64) -> Quaternion {
    Quaternion::new(
        r.gen_range(-bound..=bound),
        r.gen_range(-bound..=bound),
        r.gen_range(-bound..=bound),
        r.gen_range(-bound..=bound),
    )
}

/// Quaternion in the box, rejected until its imaginary part is visibly
/// nonzero, so conjugation orbits through it are nontrivial.
pub fn nonreal_in_box(r: &mut ChaCha8Rng, bound: f64, min_imag: f64) -> Quaternion {
    loop {
        let q = quat_in_box(r, bound);
        if q.imag_norm() > min_imag {
            return q;
        }
    }
}

/// Quaternion in the box bounded away from zero.
pub fn nonzero_in_box(r: &mut ChaCha8Rng, bound: f64, min_norm: f64) -> Quaternion {
    loop {
        let q = quat_in_box(r, bound);
        if q.norm() > min_norm {
            return q;
        }
    }
}

/// Uniform purely imaginary unit quaternion.
pub fn unit_imaginary(r: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let v = Quaternion::new(
            0.0,
            r.gen_range(-1.0..=1.0),
            r.gen_range(-1.0..=1.0),
            r.gen_range(-1.0..=1.0),
        );
        let n = v.norm();
        if n > 0.1 {
            return v * (1.0 / n);
        }
    }
}

/// Uniformly chosen point of an orbit (the center itself when trivial).
pub fn point_on_orbit(r: &mut ChaCha8Rng, orbit: Orbit) -> Quaternion {
    if orbit.is_trivial() {
        return Quaternion::real(orbit.re());
    }
    orbit.point_in_direction(unit_imaginary(r))
}

/// Random nontrivial orbit with `re` in `[-re_bound, re_bound]` and
/// imaginary radius in `[min_rad, max_rad]`.
pub fn orbit_in_range(
    r: &mut ChaCha8Rng,
    re_bound: f64,
    min_rad: f64,
    max_rad: f64,
) -> Orbit {
    let x0 = r.gen_range(-re_bound..=re_bound);
    let rad = r.gen_range(min_rad..=max_rad);
    Orbit::new(x0, (x0 * x0 + rad * rad).sqrt()).expect("norm dominates |re|")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let mut a = rng(7);
        let mut b = rng(7);
        for _ in 0..20 {
            assert_eq!(quat_in_box(&mut a, 2.0), quat_in_box(&mut b, 2.0));
        }
    }

    #[test]
    fn orbit_points_lie_on_the_orbit() {
        let mut r = rng(1);
        for _ in 0..50 {
            let o = orbit_in_range(&mut r, 1.0, 0.2, 2.0);
            let p = point_on_orbit(&mut r, o);
            assert!(o.contains(p));
        }
    }

    #[test]
    fn unit_imaginary_is_unit_and_imaginary() {
        let mut r = rng(3);
        for _ in 0..50 {
            let u = unit_imaginary(&mut r);
            assert!((u.norm() - 1.0).abs() < 1e-12);
            assert_eq!(u.re(), 0.0);
        }
    }
}
