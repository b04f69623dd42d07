//! Small dense complex linear algebra (at most 8×8) plus exact Gaussian-rational
//! elimination.

mod decomp;
mod exact;
mod expm;
mod matrix;
mod ops;

use num_complex::Complex64;

pub use decomp::{
    determinant, eigenvalues_2x2, hermitian_eigenvalues, inverse, psd_sqrt, psd_sqrt_spectral,
    solve, spectral_norm, EIGEN_FLOOR, HERMITIAN_TOL,
};
pub use exact::{apply as exact_apply, null_space, rank as exact_rank, ExactComplex};
pub use expm::mat_exp;
pub use matrix::{CMatrix, ENTRY_TOL, MAX_DIM};
pub use ops::{anticommutator, commutator, inner, kron, outer, vec_max_abs_diff, vec_norm};

use crate::error::{Error, Result};

/// Least-squares expansion of a matrix in the span of `basis`.
#[derive(Clone, Debug)]
pub struct SpanDecomposition {
    pub coefficients: Vec<Complex64>,
    /// Frobenius norm of `sum c_k B_k - target`.
    pub residual: f64,
}

impl SpanDecomposition {
    /// Slots (0-based) whose coefficient modulus exceeds `tol`.
    pub fn nonzero_slots(&self, tol: f64) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(k, _)| k)
            .collect()
    }
}

/// `sum_k c_k B_k`.
pub fn linear_combination(basis: &[CMatrix], coefficients: &[Complex64]) -> Result<CMatrix> {
    let first = basis
        .first()
        .ok_or_else(|| Error::DimensionMismatch("empty basis".into()))?;
    if basis.len() != coefficients.len() {
        return Err(Error::DimensionMismatch("coefficient count".into()));
    }
    let mut acc = CMatrix::zeros(first.rows(), first.cols())?;
    for (b, c) in basis.iter().zip(coefficients) {
        acc = acc.try_add(&b.scale(*c))?;
    }
    Ok(acc)
}

/// Coefficients minimising `||sum c_k B_k - target||_F`, with the attained residual.
pub fn span_decompose(basis: &[CMatrix], target: &CMatrix) -> Result<SpanDecomposition> {
    if basis.is_empty() {
        return Err(Error::DimensionMismatch("empty basis".into()));
    }
    if basis
        .iter()
        .any(|b| b.rows() != target.rows() || b.cols() != target.cols())
    {
        return Err(Error::DimensionMismatch(
            "basis and target shapes differ".into(),
        ));
    }
    let m = target.rows() * target.cols();
    let system = decomp::Dense {
        rows: m,
        cols: basis.len(),
        data: basis.iter().flat_map(|b| b.vec()).collect(),
    };
    let coefficients = decomp::least_squares(system, target.vec());
    let fitted = linear_combination(basis, &coefficients)?;
    let residual = fitted.try_sub(target)?.norm_fro();
    Ok(SpanDecomposition {
        coefficients,
        residual,
    })
}
