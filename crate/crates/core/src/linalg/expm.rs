use super::{decomp, CMatrix};
use crate::error::{Error, Result};

// Degree-13 Padé coefficients and the matching 1-norm bound theta_13.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// `exp(A t)` by scaling and squaring around a [13/13] Padé approximant.
pub fn mat_exp(a: &CMatrix, t: f64) -> Result<CMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("exponential of a non-square matrix".into()));
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.rows();
    let at = a.scale_re(t);
    let norm = at.norm_one();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let s = at.scale_re(2f64.powi(-squarings));

    let id = CMatrix::identity(n)?;
    let a2 = s * s;
    let a4 = a2 * a2;
    let a6 = a4 * a2;
    let b = &PADE13;
    let poly = |c: [f64; 4], d: [f64; 3]| -> CMatrix {
        let inner = (a6.scale_re(d[0]) + a4.scale_re(d[1])) + a2.scale_re(d[2]);
        let tail = ((a6.scale_re(c[0]) + a4.scale_re(c[1])) + a2.scale_re(c[2]))
            + id.scale_re(c[3]);
        (a6 * inner) + tail
    };
    let u = s * poly([b[7], b[5], b[3], b[1]], [b[13], b[11], b[9]]);
    let v = poly([b[6], b[4], b[2], b[0]], [b[12], b[10], b[8]]);

    let mut r = decomp::solve(&(v - u), &(v + u))?;
    for _ in 0..squarings {
        r = r * r;
        if !r.is_finite() {
            return Err(Error::Overflow);
        }
    }
    if !r.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn zero_and_diagonal() {
        let z = CMatrix::zeros(3, 3).unwrap();
        assert_eq!(mat_exp(&z, 1.0).unwrap(), CMatrix::identity(3).unwrap());
        let d = CMatrix::from_real_rows(&[
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 2.0],
        ])
        .unwrap();
        let e = std::f64::consts::E;
        let want = CMatrix::from_real_rows(&[
            [e, 0.0, 0.0, 0.0],
            [0.0, 1.0 / e, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, 0.0, e * e],
        ])
        .unwrap();
        let got = mat_exp(&d, 1.0).unwrap();
        for i in 0..4 {
            let rel = (got[(i, i)] - want[(i, i)]).norm() / want[(i, i)].norm();
            assert!(rel < 1e-14, "entry {i}: {rel}");
        }
    }

    #[test]
    fn rotation_generator() {
        // exp([[0, 1], [-1, 0]] t) is a rotation by t.
        let g = CMatrix::from_real_rows(&[[0.0, 1.0], [-1.0, 0.0]]).unwrap();
        let t: f64 = 2.5;
        let want = CMatrix::from_real_rows(&[[t.cos(), t.sin()], [-t.sin(), t.cos()]]).unwrap();
        assert!(mat_exp(&g, t).unwrap().approx_eq(&want, 1e-14));
    }

    #[test]
    fn nilpotent_is_exact_polynomial() {
        let n = CMatrix::from_rows(&[
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 3.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)],
        ])
        .unwrap();
        let got = mat_exp(&n, 7.0).unwrap();
        assert!((got[(0, 1)] - Complex64::new(0.0, 21.0)).norm() < 1e-12);
        assert!((got[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn overflow_is_reported() {
        let big = CMatrix::diag(&[Complex64::new(1.0, 0.0)]).unwrap();
        assert!(matches!(mat_exp(&big, 1000.0), Err(Error::Overflow)));
    }
}
