//! Dense complex matrix helpers.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{c, C64};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest entry of `|m - m^dagger|`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    u.is_square() && (u.adjoint() * u - identity(u.nrows())).iter().all(|z| z.norm() <= tol)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// The input is symmetrized before solving, so defects below `tol` do not
/// leak into the spectrum.
pub fn hermitian_eigen(m: &CMatrix, tol: f64) -> Result<(Vec<f64>, CMatrix)> {
    let defect = hermitian_defect(m);
    if defect > tol {
        return Err(Error::NotHermitian(defect));
    }
    let sym = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, k| eig.eigenvectors[(r, order[k])]);
    Ok((values, vectors))
}

pub fn hermitian_eigenvalues(m: &CMatrix, tol: f64) -> Result<Vec<f64>> {
    hermitian_eigen(m, tol).map(|(v, _)| v)
}

/// Orthogonal projector onto the span of eigenvectors of `m` with eigenvalue
/// strictly above `threshold`.
pub fn positive_projector(m: &CMatrix, threshold: f64) -> Result<CMatrix> {
    let (values, vectors) = hermitian_eigen(m, 1e-8)?;
    let dim = m.nrows();
    let mut proj = CMatrix::zeros(dim, dim);
    for (k, v) in values.iter().enumerate() {
        if *v > threshold {
            let col = vectors.column(k);
            proj += &col * col.adjoint();
        }
    }
    Ok(proj)
}

/// Re-orthonormalizes the columns of a square matrix (QR, phases fixed so
/// the diagonal of R is positive).
pub fn orthonormalize(m: &CMatrix) -> CMatrix {
    let qr = m.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..q.ncols() {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Single-qubit unitary embedded on `qubit` of an `n`-qubit register.
pub fn embed_single(u: &CMatrix, qubit: usize, n: usize) -> CMatrix {
    let mut out = identity(1);
    for q in 0..n {
        out = if q == qubit { kron(&out, u) } else { kron(&out, &identity(2)) };
    }
    out
}
