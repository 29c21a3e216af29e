//! Dense complex linear-algebra helpers shared by the space and operator code.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{LabError, Result};

pub type CMatrix = DMatrix<Complex64>;

/// `(A + A*)/2`.
pub fn hermitian_part(a: &CMatrix) -> CMatrix {
    let mut h = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    for i in 0..h.nrows() {
        h[(i, i)].im = 0.0;
    }
    h
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let eig = hermitian_part(a).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = hermitian_part(a).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Singular values in descending order.
pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut values: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    values.sort_by(|x, y| y.total_cmp(x));
    values
}

pub fn spectral_norm(a: &CMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Solves `A X = B` with a fully pivoted LU factorization.
pub fn lu_solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.clone()
        .full_piv_lu()
        .solve(b)
        .ok_or_else(|| LabError::Solve("matrix is numerically singular".into()))
}

pub fn max_abs_entry(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖A* A − I‖` entrywise maximum deviation for `A` with Gram form `g`:
/// returns `max |(A* G A − I)_{jk}|`.
pub fn orthonormality_residual(b: &CMatrix, g: &CMatrix) -> f64 {
    let q = b.adjoint() * g * b;
    let mut worst = 0.0f64;
    for j in 0..q.nrows() {
        for k in 0..q.ncols() {
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((q[(j, k)] - target).norm());
        }
    }
    worst
}

/// Default numerical-rank threshold `n·ε·max(scale, 1)`.
pub fn default_rank_threshold(n: usize, scale: f64) -> f64 {
    n.max(1) as f64 * f64::EPSILON * scale.max(1.0)
}
