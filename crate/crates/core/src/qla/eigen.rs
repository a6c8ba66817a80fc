use nalgebra::linalg::SymmetricEigen;

use super::{CMatrix, ZERO};
use crate::error::{Error, Result};

/// Elementwise Hermiticity tolerance, relative to `max(1, max|M_ij|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues in non-increasing order with optional orthonormal eigenvectors
/// stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Option<CMatrix>,
}

impl Spectrum {
    /// `V diag(values) V^H`; `None` when no vectors were computed.
    pub fn reconstruct(&self) -> Option<CMatrix> {
        let v = self.vectors.as_ref()?;
        let n = self.values.len();
        let scaled = CMatrix::from_fn(n, n, |i, j| v[(i, j)] * self.values[j]);
        Some(&scaled * &v.adjoint())
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }
}

fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: "square matrix".into(),
            actual: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    let asymmetry = m.hermitian_residual();
    if asymmetry > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

fn decompose(m: &CMatrix, with_vectors: bool) -> Result<Spectrum> {
    check_hermitian(m)?;
    let n = m.rows();
    let eig = SymmetricEigen::try_new(m.hermitian_part().to_nalgebra(), f64::EPSILON, 0).ok_or(Error::NoConvergence)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = with_vectors.then(|| {
        let raw = CMatrix::from_nalgebra(&eig.eigenvectors);
        CMatrix::from_fn(n, n, |i, j| raw[(i, order[j])])
    });
    Ok(Spectrum { values, vectors })
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(m: &CMatrix) -> Result<Spectrum> {
    decompose(m, true)
}

pub fn eigvals_hermitian(m: &CMatrix) -> Result<Vec<f64>> {
    decompose(m, false).map(|s| s.values)
}

/// Principal square root of a positive semidefinite Hermitian matrix.
///
/// Eigenvalues in `[-tol, 0)` are treated as zero; anything lower is rejected.
pub fn sqrt_psd(m: &CMatrix, tol: f64) -> Result<CMatrix> {
    let spec = eig_hermitian(m)?;
    let lowest = spec.min();
    if lowest < -tol {
        return Err(Error::NegativeEigenvalue { value: lowest, tol });
    }
    let v = spec.vectors.expect("vectors requested");
    let n = spec.values.len();
    let roots: Vec<f64> = spec.values.iter().map(|&x| x.max(0.0).sqrt()).collect();
    let mut out = CMatrix::zeros(n, n);
    for k in 0..n {
        if roots[k] == 0.0 {
            continue;
        }
        for i in 0..n {
            let a = v[(i, k)] * roots[k];
            if a == ZERO {
                continue;
            }
            for j in 0..n {
                out[(i, j)] += a * v[(j, k)].conj();
            }
        }
    }
    Ok(out.hermitian_part())
}
