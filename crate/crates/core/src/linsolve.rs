//! Real 4x4 linear solves backing the skew inverse of affine functions.
//!
//! A quaternion equation `a x + b x p = 1` is linear over the reals, so it
//! becomes a dense 4x4 system through the left and right multiplication
//! matrices. Partial pivoting keeps the elimination stable; a determinant
//! far below the row scale signals that the affine function vanishes
//! somewhere on the orbit of `p`.

use crate::error::{Error, Result};
use crate::quat::Quaternion;

/// Matrix of `x -> q x` acting on coefficients `(w, x, y, z)`.
pub fn left_mul_matrix(q: Quaternion) -> [[f64; 4]; 4] {
    [
        [q.w, -q.x, -q.y, -q.z],
        [q.x, q.w, -q.z, q.y],
        [q.y, q.z, q.w, -q.x],
        [q.z, -q.y, q.x, q.w],
    ]
}

/// Matrix of `x -> x p`.
pub fn right_mul_matrix(p: Quaternion) -> [[f64; 4]; 4] {
    [
        [p.w, -p.x, -p.y, -p.z],
        [p.x, p.w, p.z, -p.y],
        [p.y, -p.z, p.w, p.x],
        [p.z, p.y, -p.x, p.w],
    ]
}

/// LU solve with partial pivoting. Rejects systems whose determinant falls
/// below `1e-12` times the product of row sup-norms.
pub fn solve4(mut m: [[f64; 4]; 4], mut rhs: [f64; 4]) -> Result<[f64; 4]> {
    let mut scale = 1.0;
    for row in &m {
        let r = row.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        scale *= r.max(f64::MIN_POSITIVE);
    }
    let mut det = 1.0;
    for col in 0..4 {
        let mut piv = col;
        for r in col + 1..4 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if piv != col {
            m.swap(piv, col);
            rhs.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        if m[col][col] == 0.0 {
            return Err(Error::SingularSystem);
        }
        for r in col + 1..4 {
            let f = m[r][col] / m[col][col];
            for c in col..4 {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    if det.abs() < 1e-12 * scale {
        return Err(Error::SingularSystem);
    }
    let mut x = [0.0; 4];
    for r in (0..4).rev() {
        let mut s = rhs[r];
        for c in r + 1..4 {
            s -= m[r][c] * x[c];
        }
        x[r] = s / m[r][r];
    }
    Ok(x)
}

fn add4(a: [[f64; 4]; 4], b: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = a[r][c] + b[r][c];
        }
    }
    m
}

fn sub4(a: [[f64; 4]; 4], b: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            m[r][c] = a[r][c] - b[r][c];
        }
    }
    m
}

fn to_quat(x: [f64; 4]) -> Quaternion {
    Quaternion::new(x[0], x[1], x[2], x[3])
}

/// Solve `a x + b x p = 1` for `x`. This is the value at `p` of the skew
/// inverse of the affine function `q -> a + b q` on the orbit of `p`;
/// a singular system means the function has a zero on that orbit.
pub fn solve_affine_unit(a: Quaternion, b: Quaternion, p: Quaternion) -> Result<Quaternion> {
    let m = add4(left_mul_matrix(a), mat_mul(left_mul_matrix(b), right_mul_matrix(p)));
    solve4(m, [1.0, 0.0, 0.0, 0.0]).map(to_quat)
}

/// Solve the Sylvester-type equation `x q - q0 x = 1`.
pub fn solve_sylvester_left(q0: Quaternion, q: Quaternion) -> Result<Quaternion> {
    let m = sub4(right_mul_matrix(q), left_mul_matrix(q0));
    solve4(m, [1.0, 0.0, 0.0, 0.0]).map(to_quat)
}

/// Solve `q x - x q0 = 1`.
pub fn solve_sylvester_right(q0: Quaternion, q: Quaternion) -> Result<Quaternion> {
    let m = sub4(left_mul_matrix(q), right_mul_matrix(q0));
    solve4(m, [1.0, 0.0, 0.0, 0.0]).map(to_quat)
}

fn mat_mul(a: [[f64; 4]; 4], b: [[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let mut s = 0.0;
            for k in 0..4 {
                s += a[r][k] * b[k][c];
            }
            m[r][c] = s;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{dist, I, J, ONE};

    #[test]
    fn multiplication_matrices_match_products() {
        let q = Quaternion::new(0.7, -1.1, 0.4, 2.3);
        let p = Quaternion::new(-0.2, 0.9, 1.5, -0.8);
        let lm = left_mul_matrix(q);
        let rm = right_mul_matrix(p);
        let apply = |m: [[f64; 4]; 4], v: Quaternion| {
            let x = [v.w, v.x, v.y, v.z];
            let mut out = [0.0; 4];
            for r in 0..4 {
                for c in 0..4 {
                    out[r] += m[r][c] * x[c];
                }
            }
            Quaternion::new(out[0], out[1], out[2], out[3])
        };
        assert!(dist(apply(lm, p), q * p) < 1e-14);
        assert!(dist(apply(rm, q), q * p) < 1e-14);
    }

    #[test]
    fn affine_unit_example_with_commuting_data() {
        // x(2i) - ix = 1 has the commuting solution x = -i.
        let x = solve_affine_unit(-I, ONE, 2.0 * I).unwrap();
        assert!(dist(x, -I) < 1e-13);
    }

    #[test]
    fn affine_unit_example_off_the_slice() {
        // x(1+j) - ix = 1 is solved by (3 + i - j - 2k)/5.
        let x = solve_affine_unit(-I, ONE, ONE + J).unwrap();
        let expected = Quaternion::new(3.0, 1.0, -1.0, -2.0) / 5.0;
        assert!(dist(x, expected) < 1e-13);
        let residual = x * (ONE + J) - I * x - ONE;
        assert!(residual.norm() < 1e-13);
    }

    #[test]
    fn sylvester_forms_agree_with_affine_solve() {
        let q0 = Quaternion::new(0.3, 0.7, -0.2, 0.4);
        let q = Quaternion::new(-1.1, 0.2, 0.8, 0.6);
        let a = solve_affine_unit(-q0, ONE, q).unwrap();
        let b = solve_sylvester_left(q0, q).unwrap();
        assert!(dist(a, b) < 1e-13);
        let r = solve_sylvester_right(q0, q).unwrap();
        assert!((q * r - r * q0 - ONE).norm() < 1e-12);
    }

    #[test]
    fn singular_when_affine_function_vanishes_on_orbit() {
        // a + bq with a = -b q* vanishes at q*, so the system for p on the
        // orbit of q* must be rejected.
        let b = Quaternion::new(0.5, -0.3, 1.1, 0.2);
        let qstar = Quaternion::new(0.4, 0.8, -0.6, 0.0);
        let a = -(b * qstar);
        assert_eq!(solve_affine_unit(a, b, qstar), Err(Error::SingularSystem));
    }

    #[test]
    fn zero_linear_part_is_plain_reciprocal() {
        let a = Quaternion::new(2.0, 1.0, 0.0, -1.0);
        let x = solve_affine_unit(a, Quaternion::default(), J).unwrap();
        assert!(dist(x, a.inverse()) < 1e-14);
    }
}
