//! Dense complex kernels shared by the propagators.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;

use crate::C64;

/// Below this size a single thread wins.
const PAR_MIN_ROWS: usize = 256;

/// `y = A x`. Rows are reduced sequentially in index order, so the result is
/// bit-identical regardless of how many threads share the rows.
pub fn matvec(a: ArrayView2<'_, C64>, x: ArrayView1<'_, C64>) -> Array1<C64> {
    let (rows, cols) = a.dim();
    assert_eq!(cols, x.len(), "matvec dimension mismatch");
    let x = x.to_vec();
    let row_dot = |row: ArrayView1<'_, C64>| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (aij, xj) in row.iter().zip(&x) {
            acc += aij * xj;
        }
        acc
    };
    if rows >= PAR_MIN_ROWS {
        let out: Vec<C64> = (0..rows)
            .into_par_iter()
            .map(|i| row_dot(a.row(i)))
            .collect();
        Array1::from(out)
    } else {
        a.rows().into_iter().map(row_dot).collect()
    }
}

/// Dense `A B` through faer's blocked kernels.
pub fn matmul(a: ArrayView2<'_, C64>, b: ArrayView2<'_, C64>) -> Array2<C64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul dimension mismatch");
    let fa = to_faer(a);
    let fb = to_faer(b);
    let prod = &fa * &fb;
    from_faer(prod.as_ref())
}

/// Conjugate transpose.
pub fn adjoint(a: ArrayView2<'_, C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

pub fn to_faer(a: ArrayView2<'_, C64>) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub fn from_faer(a: faer::MatRef<'_, C64>) -> Array2<C64> {
    Array2::from_shape_fn((a.nrows(), a.ncols()), |(i, j)| a[(i, j)])
}

/// Largest entry-wise modulus.
pub fn max_abs(a: ArrayView2<'_, C64>) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

/// Largest modulus of the entry-wise difference.
pub fn max_abs_diff(a: ArrayView2<'_, C64>, b: ArrayView2<'_, C64>) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()))
}

pub fn max_abs_diff_vec(a: ArrayView1<'_, C64>, b: ArrayView1<'_, C64>) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()))
}

/// `Σ |x_j|²`.
pub fn norm_sqr(x: ArrayView1<'_, C64>) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// `⟨x|y⟩ = Σ conj(x_j) y_j`.
pub fn inner(x: ArrayView1<'_, C64>, y: ArrayView1<'_, C64>) -> C64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Maximum absolute column sum.
pub fn one_norm(a: ArrayView2<'_, C64>) -> f64 {
    a.columns()
        .into_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}
