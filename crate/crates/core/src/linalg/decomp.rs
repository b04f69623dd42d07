//! Factorisations: LU with partial pivoting, pivoted Householder QR for least squares,
//! and a Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};

/// Eigenvalue floor below which a Hermitian matrix is not treated as positive definite.
pub const EIGEN_FLOOR: f64 = 1e-12;
/// Allowed `max |S - S*|` for matrices passed as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

struct Lu {
    n: usize,
    lu: CMatrix,
    perm: [usize; super::MAX_DIM],
    sign: f64,
}

fn lu(a: &CMatrix) -> Result<Lu> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("LU of a non-square matrix".into()));
    }
    let n = a.rows();
    let mut lu = *a;
    let mut perm = [0usize; super::MAX_DIM];
    for (i, p) in perm.iter_mut().enumerate().take(n) {
        *p = i;
    }
    let mut sign = 1.0;
    let scale = a.max_abs();
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| lu[(i, k)].norm().total_cmp(&lu[(j, k)].norm()))
            .expect("non-empty range");
        if lu[(p, k)].norm() <= f64::EPSILON * scale * n as f64 || lu[(p, k)].norm() == 0.0 {
            return Err(Error::Singular);
        }
        if p != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = t;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / pivot;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= f * t;
            }
        }
    }
    Ok(Lu { n, lu, perm, sign })
}

impl Lu {
    fn solve_matrix(&self, b: &CMatrix) -> Result<CMatrix> {
        let n = self.n;
        if b.rows() != n {
            return Err(Error::DimensionMismatch("right-hand side rows".into()));
        }
        let mut x = CMatrix::zeros(n, b.cols())?;
        for c in 0..b.cols() {
            let mut y = [Complex64::new(0.0, 0.0); super::MAX_DIM];
            for i in 0..n {
                let mut s = b[(self.perm[i], c)];
                for (j, yj) in y.iter().enumerate().take(i) {
                    s -= self.lu[(i, j)] * yj;
                }
                y[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = y[i];
                for j in i + 1..n {
                    s -= self.lu[(i, j)] * x[(j, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }
}

/// Solves `A X = B`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    lu(a)?.solve_matrix(b)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let f = lu(a)?;
    f.solve_matrix(&CMatrix::identity(f.n)?)
}

pub fn determinant(a: &CMatrix) -> Result<Complex64> {
    match lu(a) {
        Ok(f) => Ok((0..f.n).map(|i| f.lu[(i, i)]).product::<Complex64>() * f.sign),
        Err(Error::Singular) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

/// Eigenvalues of a 2×2 matrix from the characteristic polynomial, ordered by real part.
pub fn eigenvalues_2x2(a: &CMatrix) -> Result<[Complex64; 2]> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::DimensionMismatch("expected a 2x2 matrix".into()));
    }
    let half_tr = a.trace() / 2.0;
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let disc = (half_tr * half_tr - det).sqrt();
    let mut ev = [half_tr - disc, half_tr + disc];
    if ev[0].re > ev[1].re {
        ev.swap(0, 1);
    }
    Ok(ev)
}

/// Real symmetric eigendecomposition by cyclic Jacobi rotations. `a` is row-major n×n.
/// Returns eigenvalues (ascending) and eigenvectors as the columns of a row-major matrix.
fn jacobi_symmetric(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        let total: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-32 * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let mut vecs = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[k * n + new] = v[k * n + old];
        }
    }
    (values, vecs)
}

/// Embeds Hermitian `H = A + iB` as the real symmetric `[[A, -B], [B, A]]`.
fn real_embedding(h: &CMatrix) -> Vec<f64> {
    let n = h.rows();
    let m = 2 * n;
    let mut out = vec![0.0; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            out[i * m + j] = z.re;
            out[(i + n) * m + (j + n)] = z.re;
            out[i * m + (j + n)] = -z.im;
            out[(i + n) * m + j] = z.im;
        }
    }
    out
}

fn check_hermitian(s: &CMatrix) -> Result<()> {
    if !s.is_square() {
        return Err(Error::DimensionMismatch("expected a square matrix".into()));
    }
    let defect = s.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Result<Vec<f64>> {
    check_hermitian(h)?;
    let n = h.rows();
    // Each eigenvalue of H appears twice in the real embedding.
    let (vals, _) = jacobi_symmetric(real_embedding(h), 2 * n);
    Ok(vals.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

/// Spectral norm, the largest singular value.
pub fn spectral_norm(a: &CMatrix) -> Result<f64> {
    let gram = &a.adjoint() * a;
    let ev = hermitian_eigenvalues(&gram)?;
    Ok(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Principal square root of a Hermitian positive-definite matrix.
///
/// 2×2 inputs use the closed form `(S + sqrt(det S) I) / sqrt(tr S + 2 sqrt(det S))`;
/// larger ones go through a spectral decomposition.
pub fn psd_sqrt(s: &CMatrix) -> Result<CMatrix> {
    check_hermitian(s)?;
    let ev = hermitian_eigenvalues(s)?;
    if ev[0] <= EIGEN_FLOOR {
        return Err(Error::NotPositiveDefinite(ev[0]));
    }
    // Symmetrise so the result is exactly Hermitian.
    let s = (s + &s.adjoint()).scale_re(0.5);
    if s.rows() == 2 {
        let det = (s[(0, 0)] * s[(1, 1)] - s[(0, 1)] * s[(1, 0)]).re;
        let root_det = det.sqrt();
        let denom = (s.trace().re + 2.0 * root_det).sqrt();
        let shifted = s + CMatrix::identity(2)?.scale_re(root_det);
        return Ok(shifted.scale_re(1.0 / denom));
    }
    Ok(psd_sqrt_spectral(&s))
}

/// Spectral route for any size; exposed so the closed form can be cross-checked.
pub fn psd_sqrt_spectral(s: &CMatrix) -> CMatrix {
    let n = s.rows();
    let m = 2 * n;
    let (vals, vecs) = jacobi_symmetric(real_embedding(s), m);
    let mut root = vec![0.0; m * m];
    for (k, &lam) in vals.iter().enumerate() {
        let r = lam.max(0.0).sqrt();
        for i in 0..m {
            for j in 0..m {
                root[i * m + j] += r * vecs[i * m + k] * vecs[j * m + k];
            }
        }
    }
    let mut out = CMatrix::zeros(n, n).expect("dims from a valid matrix");
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = Complex64::new(root[i * m + j], root[(i + n) * m + j]);
        }
    }
    out
}

/// Dense complex matrix of arbitrary shape, column-major, used for least squares.
pub(crate) struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl Dense {
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.rows + i]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Complex64 {
        &mut self.data[j * self.rows + i]
    }
}

/// Minimum-residual solution of `A x ≈ b` by Householder QR with column pivoting.
/// Columns judged dependent get a zero coefficient.
pub(crate) fn least_squares(mut a: Dense, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let (m, n) = (a.rows, a.cols);
    let mut perm: Vec<usize> = (0..n).collect();
    let col_norm = |a: &Dense, j: usize, from: usize| -> f64 {
        (from..m).map(|i| a.at(i, j).norm_sqr()).sum::<f64>().sqrt()
    };
    let max_norm = (0..n).map(|j| col_norm(&a, j, 0)).fold(0.0, f64::max);
    let tol = max_norm * 1e-12 * m.max(n) as f64;
    let mut rank = 0;
    for k in 0..m.min(n) {
        let (p, pnorm) = (k..n)
            .map(|j| (j, col_norm(&a, j, k)))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("non-empty");
        if pnorm <= tol || pnorm == 0.0 {
            break;
        }
        if p != k {
            for i in 0..m {
                a.data.swap(k * m + i, p * m + i);
            }
            perm.swap(k, p);
        }
        let x0 = a.at(k, k);
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let alpha = -phase * pnorm;
        let mut v: Vec<Complex64> = (k..m).map(|i| a.at(i, k)).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm > 0.0 {
            for z in v.iter_mut() {
                *z /= vnorm;
            }
            for j in k..n {
                let dot: Complex64 = (k..m).map(|i| v[i - k].conj() * a.at(i, j)).sum();
                for i in k..m {
                    let vi = v[i - k];
                    *a.at_mut(i, j) -= 2.0 * vi * dot;
                }
            }
            let dot: Complex64 = (k..m).map(|i| v[i - k].conj() * b[i]).sum();
            for i in k..m {
                b[i] -= 2.0 * v[i - k] * dot;
            }
        }
        rank += 1;
    }
    let mut y = vec![Complex64::new(0.0, 0.0); n];
    for i in (0..rank).rev() {
        let mut s = b[i];
        for j in i + 1..rank {
            s -= a.at(i, j) * y[j];
        }
        y[i] = s / a.at(i, i);
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for (k, &col) in perm.iter().enumerate() {
        x[col] = y[k];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inverse_and_determinant() {
        let a = CMatrix::from_rows(&[[c(2.0, 0.0), c(0.0, 1.0)], [c(1.0, -1.0), c(3.0, 0.0)]]).unwrap();
        let inv = inverse(&a).unwrap();
        assert!((a * inv).approx_eq(&CMatrix::identity(2).unwrap(), 1e-14));
        let det = determinant(&a).unwrap();
        assert!((det - (c(6.0, 0.0) - c(0.0, 1.0) * c(1.0, -1.0))).norm() < 1e-14);
        let singular = CMatrix::from_real_rows(&[[1.0, 2.0], [2.0, 4.0]]).unwrap();
        assert!(matches!(inverse(&singular), Err(Error::Singular)));
        assert_eq!(determinant(&singular).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn hermitian_spectrum() {
        let h = CMatrix::from_rows(&[[c(2.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(2.0, 0.0)]]).unwrap();
        let ev = hermitian_eigenvalues(&h).unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        let not_h = CMatrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&not_h), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn psd_sqrt_basics() {
        let i2 = CMatrix::identity(2).unwrap();
        assert!(psd_sqrt(&i2).unwrap().approx_eq(&i2, 1e-15));
        let four = i2.scale_re(4.0);
        assert!(psd_sqrt(&four).unwrap().approx_eq(&i2.scale_re(2.0), 1e-15));
        let indefinite = CMatrix::from_real_rows(&[[1.0, 0.0], [0.0, -1.0]]).unwrap();
        assert!(matches!(psd_sqrt(&indefinite), Err(Error::NotPositiveDefinite(_))));
        let skew = CMatrix::from_real_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(matches!(psd_sqrt(&skew), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn closed_form_root_matches_spectral_route() {
        let s = CMatrix::from_rows(&[[c(2.0, 0.0), c(0.3, -0.7)], [c(0.3, 0.7), c(1.5, 0.0)]]).unwrap();
        let a = psd_sqrt(&s).unwrap();
        let b = psd_sqrt_spectral(&s);
        assert!(a.approx_eq(&b, 1e-13));
        assert!((a * a).approx_eq(&s, 1e-13));
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let d = CMatrix::diag(&[c(0.0, 3.0), c(-1.0, 0.0), c(0.5, 0.5)]).unwrap();
        assert!((spectral_norm(&d).unwrap() - 3.0).abs() < 1e-13);
    }

    #[test]
    fn least_squares_drops_dependent_columns() {
        // columns (1,0,0), (2,0,0), (0,1,0); target (3,4,5)
        let a = Dense {
            rows: 3,
            cols: 3,
            data: vec![
                c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0),
                c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0),
            ],
        };
        let x = least_squares(a, vec![c(3.0, 0.0), c(4.0, 0.0), c(5.0, 0.0)]);
        let fitted = [x[0] + 2.0 * x[1], x[2]];
        assert!((fitted[0] - c(3.0, 0.0)).norm() < 1e-14);
        assert!((fitted[1] - c(4.0, 0.0)).norm() < 1e-14);
        assert!(x[0] == c(0.0, 0.0) || x[1] == c(0.0, 0.0));
    }
}
