//! Thin dense linear-algebra helpers over nalgebra.
//!
//! Everything here works on small matrices (polynomial-sector dimensions, a
//! handful of rows per fit), so numerical robustness matters more than speed:
//! columns are equilibrated before least squares, and eigenvectors come from
//! inverse iteration with a deterministic normalization so repeated runs give
//! byte-identical output.

use crate::error::{Error, Result};
use crate::num;
use alloc::format;
use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

/// Eigenvalues of a real square matrix as `(re, im)` pairs, sorted by real
/// part then imaginary part.
pub(crate) fn complex_eigenvalues(a: &DMatrix<f64>) -> Vec<(f64, f64)> {
    let mut vals: Vec<(f64, f64)> = a
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| (z.re, z.im))
        .collect();
    vals.sort_by(|p, q| {
        p.0.partial_cmp(&q.0)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(p.1.partial_cmp(&q.1).unwrap_or(core::cmp::Ordering::Equal))
    });
    vals
}

/// Right eigenvector of `a` for the (real) eigenvalue `lambda`, by inverse
/// iteration on the shifted matrix. The result is normalized so its largest
/// entry in magnitude equals one exactly, which pins the overall sign.
pub(crate) fn real_eigenvector(a: &DMatrix<f64>, lambda: f64) -> Result<DVector<f64>> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::numerics("eigenvector of an empty or non-square matrix".into()));
    }
    let scale = a.iter().fold(1.0f64, |m, v| m.max(num::abs(*v))).max(num::abs(lambda));
    // Small shift keeps the factorization usable when lambda is (near) exact.
    let mut shift = lambda;
    let eye = DMatrix::<f64>::identity(n, n);
    let mut v = DVector::<f64>::from_element(n, 1.0 / (n as f64));
    for attempt in 0..3 {
        let lu = (a - &eye * shift).lu();
        let mut ok = true;
        for _ in 0..64 {
            match lu.solve(&v) {
                Some(w) => {
                    let norm = w.norm();
                    if !norm.is_finite() || norm == 0.0 {
                        ok = false;
                        break;
                    }
                    v = w / norm;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            // Residual check against the unshifted eigenvalue.
            let resid = (a * &v - &v * lambda).norm();
            if resid <= 1e-8 * (1.0 + scale) {
                return Ok(pin_normalization(v));
            }
        }
        shift = lambda + scale * 1e-10 * num::powi(10.0, attempt);
    }
    Err(Error::numerics(format!(
        "inverse iteration failed to converge for eigenvalue {lambda}"
    )))
}

fn pin_normalization(v: DVector<f64>) -> DVector<f64> {
    let mut idx = 0;
    let mut best = 0.0;
    for (i, &x) in v.iter().enumerate() {
        if num::abs(x) > best {
            best = num::abs(x);
            idx = i;
        }
    }
    let pivot = v[idx];
    v / pivot
}

/// Least squares `min ||a x - b||` via QR with column equilibration. Errors
/// out when a column is identically zero or the triangular solve breaks down,
/// which is how callers detect an ill-conditioned sample set.
pub(crate) fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let (rows, cols) = a.shape();
    if rows < cols {
        return Err(Error::numerics("least squares needs at least as many rows as unknowns".into()));
    }
    let mut scaled = a.clone();
    let mut col_scale = Vec::with_capacity(cols);
    for j in 0..cols {
        let m = scaled.column(j).iter().fold(0.0f64, |m, v| m.max(num::abs(*v)));
        if m == 0.0 || !m.is_finite() {
            return Err(Error::numerics(format!("least squares column {j} is degenerate")));
        }
        col_scale.push(m);
        for i in 0..rows {
            scaled[(i, j)] /= m;
        }
    }
    let qr = scaled.qr();
    let qtb = qr.q().transpose() * b;
    let r = qr.r();
    // Back substitution with an explicit conditioning guard on the diagonal.
    let mut x = DVector::<f64>::zeros(cols);
    let diag_max = (0..cols).fold(0.0f64, |m, i| m.max(num::abs(r[(i, i)])));
    for i in (0..cols).rev() {
        let mut s = qtb[i];
        for j in (i + 1)..cols {
            s -= r[(i, j)] * x[j];
        }
        let d = r[(i, i)];
        if num::abs(d) <= 1e-12 * diag_max {
            return Err(Error::numerics("least squares system is rank deficient".into()));
        }
        x[i] = s / d;
    }
    for j in 0..cols {
        x[j] /= col_scale[j];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_companion_matrix() {
        // Companion of (z-1)(z-2)(z-3)
        let a = DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 6.0, 1.0, 0.0, -11.0, 0.0, 1.0, 6.0]);
        let vals = complex_eigenvalues(&a);
        let expect = [1.0, 2.0, 3.0];
        for (v, e) in vals.iter().zip(expect) {
            assert!((v.0 - e).abs() < 1e-10 && v.1.abs() < 1e-10, "{v:?}");
        }
    }

    #[test]
    fn inverse_iteration_recovers_known_eigenvector() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let v = real_eigenvector(&a, 3.0).unwrap();
        // Eigenvector of eigenvalue 3 is (1, 1); pinned so max entry is 1.
        assert!((v[0] - 1.0).abs() < 1e-10);
        assert!((v[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn least_squares_fits_exactly_determined_system() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let b = DVector::from_row_slice(&[1.0, 3.0, 5.0]);
        let x = least_squares(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn least_squares_flags_dependent_columns() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 1.0, 2.0, 1.0, 2.0]);
        let b = DVector::from_row_slice(&[1.0, 1.0, 1.0]);
        assert!(least_squares(&a, &b).is_err());
    }

    #[test]
    fn badly_scaled_columns_are_equilibrated() {
        // Columns twelve orders of magnitude apart; both contributions to b
        // are O(1) so the solution is recoverable when scaling is handled.
        let a = DMatrix::from_row_slice(3, 2, &[1.0e-6, 1.0e6, 2.0e-6, 1.0e6, 3.0e-6, 2.0e6]);
        let b = DVector::from_row_slice(&[5.0, 7.0, 12.0]);
        let x = least_squares(&a, &b).unwrap();
        assert!((x[0] - 2.0e6).abs() < 1e-4, "{x:?}");
        assert!((x[1] - 3.0e-6).abs() < 1e-16, "{x:?}");
    }
}
