//! Roots of real-coefficient polynomials, reported as conjugation orbits.
//!
//! The zero set of a real polynomial inside the quaternions is a union of
//! orbits: each complex root `x + iy` contributes the sphere with real part
//! `x` and norm `sqrt(x^2 + y^2)`. Roots are located with Durand-Kerner
//! iteration, which is plenty for the moderate degrees handled here.

use crate::error::{Error, Result};
use crate::orbit::Orbit;
use num_complex::Complex64;

/// Complex roots of `sum c_m z^m` (constant first, real coefficients).
pub fn complex_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let mut c: Vec<f64> = coeffs.to_vec();
    let scale = c.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    while c.last().is_some_and(|v| v.abs() <= 1e-14 * scale) {
        c.pop();
    }
    if c.len() <= 1 {
        return Err(Error::ZeroPolynomial);
    }
    let deg = c.len() - 1;
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|&v| Complex64::new(v / lead, 0.0)).collect();
    let eval = |z: Complex64| {
        let mut r = Complex64::new(0.0, 0.0);
        for &cm in monic.iter().rev() {
            r = r * z + cm;
        }
        r
    };
    // standard spiral of starting guesses, never real or conjugate-symmetric
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..500 {
        let mut moved = 0.0_f64;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    Ok(roots)
}

/// Orbits on which the polynomial vanishes, conjugate pairs merged.
pub fn root_orbits(coeffs: &[f64]) -> Result<Vec<Orbit>> {
    let roots = complex_roots(coeffs)?;
    let mut orbits: Vec<Orbit> = Vec::new();
    for r in roots {
        let o = Orbit::new(r.re, r.norm())?;
        if !orbits
            .iter()
            .any(|p| (p.re() - o.re()).abs() < 1e-8 && (p.norm() - o.norm()).abs() < 1e-8)
        {
            orbits.push(o);
        }
    }
    Ok(orbits)
}
