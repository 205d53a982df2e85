//! Thin bridge between the crate's `nalgebra` matrix types and the dense
//! numerical kernels: general complex (non-Hermitian) eigendecomposition via
//! `faer`, singular values / nullspaces / Hermitian eigen via `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

/// Eigenvalues and right eigenvectors (columns) of a general complex matrix.
///
/// Pairs are returned in the backend's order; callers impose their own sort.
pub fn eigen(m: &DMatrix<C64>) -> (Vec<C64>, DMatrix<C64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigen: matrix must be square");
    let fm = faer::Mat::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = fm.eigen().expect("dense eigendecomposition failed");
    let s = evd.S();
    let u = evd.U();
    let vals: Vec<C64> = (0..n).map(|i| s[i]).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    (vals, vecs)
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<C64>) -> Vec<f64> {
    let svd = m.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Right singular vector belonging to the smallest singular value — the best
/// numerical nullspace direction of `m`.
pub fn nullspace_vector(m: &DMatrix<C64>) -> DVector<C64> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("non-empty singular values");
    // Row idx of V^H is the conjugated singular vector; undo the conjugation.
    DVector::from_fn(m.ncols(), |c, _| v_t[(idx, c)].conj())
}

/// Numerical rank: number of singular values above `rel_tol · σ_max`.
pub fn rank_with_threshold(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    let Some(&smax) = sv.first() else { return 0 };
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues ascending with
/// matching orthonormal eigenvectors.
pub fn hermitian_eigen(m: &DMatrix<C64>) -> Vec<(f64, DVector<C64>)> {
    let se = nalgebra::SymmetricEigen::new(m.clone());
    let n = m.nrows();
    let mut pairs: Vec<(f64, DVector<C64>)> = (0..n)
        .map(|i| (se.eigenvalues[i], se.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    pairs
}
