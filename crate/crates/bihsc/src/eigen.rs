//! Dense Hermitian eigenvalue machinery.
//!
//! The primary path wraps nalgebra's QR-based `SymmetricEigen`. Because
//! the singular/nonsingular dichotomy of the observability Gramian is the
//! load-bearing conclusion of this crate, a second, independent method is
//! provided: bisection on the inertia count of the shifted `LDL^H`
//! factorization (Sylvester's law). Acceptance scenarios cross-check the
//! two to 1e-8.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// All eigenvalues of a Hermitian matrix, ascending (primary method).
pub fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = a
        .clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    ev
}

/// Eigen decomposition `(values, vectors)` of a Hermitian matrix; column
/// `j` of `vectors` belongs to `values[j]` (unsorted, as produced).
pub fn hermitian_eigen(a: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let decomp = a.clone().symmetric_eigen();
    (
        decomp.eigenvalues.iter().copied().collect(),
        decomp.eigenvectors,
    )
}

/// Number of eigenvalues of the Hermitian matrix strictly below `mu`,
/// obtained as the count of negative pivots in the `LDL^H` elimination of
/// `A - mu*I`. Vanishing pivots are nudged to keep the elimination alive.
pub fn inertia_below(a: &DMatrix<Complex64>, mu: f64) -> usize {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] -= Complex64::new(mu, 0.0);
    }
    let mut count = 0;
    for k in 0..n {
        let mut pivot = m[(k, k)].re;
        if pivot.abs() < 1e-300 {
            pivot = if pivot < 0.0 { -1e-300 } else { 1e-300 };
        }
        if pivot < 0.0 {
            count += 1;
        }
        for i in (k + 1)..n {
            let lik = m[(i, k)] / pivot;
            for j in (k + 1)..n {
                let update = lik * m[(k, j)];
                m[(i, j)] -= update;
            }
        }
    }
    count
}

/// All eigenvalues by inertia-count bisection inside Gershgorin bounds,
/// ascending (validation method, independent of the QR path).
pub fn hermitian_eigenvalues_bisect(a: &DMatrix<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let center = a[(i, i)].re;
        let radius: f64 = (0..n).filter(|&j| j != i).map(|j| a[(i, j)].norm()).sum();
        lo = lo.min(center - radius);
        hi = hi.max(center + radius);
    }
    let pad = 1e-8 * (hi - lo).abs().max(1.0);
    lo -= pad;
    hi += pad;

    (0..n)
        .map(|k| {
            let (mut a_k, mut b_k) = (lo, hi);
            for _ in 0..120 {
                let mid = 0.5 * (a_k + b_k);
                if (b_k - a_k) <= 1e-14 * mid.abs().max(1.0) {
                    break;
                }
                if inertia_below(a, mid) <= k {
                    a_k = mid;
                } else {
                    b_k = mid;
                }
            }
            0.5 * (a_k + b_k)
        })
        .collect()
}
