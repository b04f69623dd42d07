use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

/// Kronecker product; block `(i, j)` of the result is `a[(i, j)] * b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let mut out = CMatrix::zeros(rows, cols)?;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let s = a[(i, j)];
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out[(i * b.rows() + k, j * b.cols() + l)] = s * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

fn check_square_pair(a: &CMatrix, b: &CMatrix) -> Result<()> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::DimensionMismatch(format!(
            "need two square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// `AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_square_pair(a, b)?;
    Ok((a * b) - (b * a))
}

/// `AB + BA`.
pub fn anticommutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    check_square_pair(a, b)?;
    Ok((a * b) + (b * a))
}

/// Antilinear in the first argument.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_max_abs_diff(u: &[Complex64], v: &[Complex64]) -> f64 {
    if u.len() != v.len() {
        return f64::INFINITY;
    }
    u.iter().zip(v).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
}

/// `|u><v|`, i.e. the map `f -> <v, f> u`.
pub fn outer(u: &[Complex64], v: &[Complex64]) -> Result<CMatrix> {
    let mut m = CMatrix::zeros(u.len(), v.len())?;
    for (i, a) in u.iter().enumerate() {
        for (j, b) in v.iter().enumerate() {
            m[(i, j)] = a * b.conj();
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn kron_dimension_cap() {
        let a = CMatrix::identity(4).unwrap();
        let b = CMatrix::identity(4).unwrap();
        assert!(matches!(kron(&a, &b), Err(Error::DimensionOverflow { .. })));
        let two = CMatrix::identity(2).unwrap();
        assert_eq!(kron(&two, &a).unwrap().rows(), 8);
    }

    #[test]
    fn kron_identities_and_blocks() {
        let i2 = CMatrix::identity(2).unwrap();
        assert_eq!(kron(&i2, &i2).unwrap(), CMatrix::identity(4).unwrap());
        let x = CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let x1 = kron(&x, &i2).unwrap();
        for (i, j) in [(0, 2), (1, 3), (2, 0), (3, 1)] {
            assert_eq!(x1[(i, j)], c(1.0, 0.0));
        }
        assert_eq!(x1.entries().iter().filter(|z| z.norm() > 0.0).count(), 4);

        let y = CMatrix::from_rows(&[[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        let z = CMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]).unwrap();
        let yz = kron(&y, &z).unwrap();
        assert_eq!(yz[(0, 2)], c(0.0, -1.0));
        assert_eq!(yz[(1, 3)], c(0.0, 1.0));
        assert_eq!(yz[(2, 0)], c(0.0, 1.0));
        assert_eq!(yz[(3, 1)], c(0.0, -1.0));
    }

    #[test]
    fn commutator_of_x_and_y() {
        let x = CMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]).unwrap();
        let y = CMatrix::from_rows(&[[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]).unwrap();
        let two_i_z = CMatrix::diag(&[c(0.0, 2.0), c(0.0, -2.0)]).unwrap();
        assert_eq!(commutator(&x, &y).unwrap(), two_i_z);
        assert_eq!(commutator(&x, &x).unwrap(), CMatrix::zeros(2, 2).unwrap());
        assert_eq!(
            anticommutator(&x, &x).unwrap(),
            CMatrix::identity(2).unwrap().scale_re(2.0)
        );
        let i2 = CMatrix::identity(2).unwrap();
        assert_eq!(anticommutator(&i2, &y).unwrap(), y.scale_re(2.0));
        assert!(commutator(&x, &CMatrix::identity(3).unwrap()).is_err());
    }

    #[test]
    fn inner_is_antilinear_in_first_slot() {
        let u = [c(0.0, 1.0), c(0.0, 0.0)];
        let v = [c(1.0, 0.0), c(0.0, 0.0)];
        assert_eq!(inner(&u, &v), c(0.0, -1.0));
    }
}
