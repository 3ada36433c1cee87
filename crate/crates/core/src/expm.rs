//! Dense complex matrix exponential by scaling and squaring with a truncated
//! Taylor core.
//!
//! This is a verification oracle for the propagators. It shares no code with
//! them: its own triple-loop product, no eigendecomposition, no RK stages.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::C64;

/// Scaled norm bound for the Taylor core.
const SCALED_NORM: f64 = 0.5;
/// Beyond this many squarings the result is not worth trusting.
const MAX_SQUARINGS: u32 = 60;
const MAX_TERMS: usize = 40;

fn product(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let mut out = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for k in 0..n {
            let aik = a[[i, k]];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..n {
                out[[i, j]] += aik * b[[k, j]];
            }
        }
    }
    out
}

fn one_norm(a: &Array2<C64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(A)`.
pub fn expm(a: &Array2<C64>) -> Result<Array2<C64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("matrix exponential input"));
    }
    let norm = one_norm(a);
    let squarings = if norm > SCALED_NORM {
        (norm / SCALED_NORM).log2().ceil() as u32
    } else {
        0
    };
    if squarings > MAX_SQUARINGS {
        return Err(Error::Range(format!(
            "1-norm {norm:.3e} needs {squarings} squarings"
        )));
    }
    let scaled = a.mapv(|z| z / 2f64.powi(squarings as i32));

    // Taylor series until the next term is negligible against the sum.
    let mut result = Array2::<C64>::eye(n);
    let mut term = Array2::<C64>::eye(n);
    for k in 1..=MAX_TERMS {
        term = product(&term, &scaled).mapv(|z| z / k as f64);
        result += &term;
        if one_norm(&term) <= f64::EPSILON * 1e-3 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = product(&result, &result);
    }
    if result.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Range("result overflowed".into()));
    }
    Ok(result)
}
