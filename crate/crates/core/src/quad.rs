//! Adaptive quadrature and scalar root finding.
//!
//! The integrator is adaptive Simpson with the usual Richardson correction
//! term. It is used to evaluate antiderivative nodes in the function algebra,
//! so the error control runs on both absolute and relative scales and the
//! recursion depth is capped instead of looping forever on a singular
//! integrand.

use crate::error::{Error, Result};
use crate::num;

/// Default tolerance for antiderivative evaluation. Tight enough that
/// quadrature error stays below the verification thresholds used elsewhere.
pub const DEFAULT_QUAD_TOL: f64 = 1.0e-12;

const MAX_DEPTH: u32 = 52;

/// Integrate `f` over `[a, b]` with adaptive Simpson, to absolute-or-relative
/// tolerance `tol`. Orientation is honoured: swapping the endpoints flips the
/// sign of the result.
pub fn integrate<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::numerics("integration endpoint is not finite".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return Ok(-integrate(f, b, a, tol)?);
    }
    let tol = if tol > 0.0 { tol } else { DEFAULT_QUAD_TOL };
    let m = 0.5 * (a + b);
    let fa = f(a)?;
    let fm = f(m)?;
    let fb = f(b)?;
    let whole = simpson(a, b, fa, fm, fb);
    let v = adapt(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::numerics("integral did not evaluate to a finite value".into()))
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm)?;
    let frm = f(rm)?;
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    let scale = num::abs(left + right);
    if depth == 0 || num::abs(err) <= 15.0 * tol * (1.0 + scale) {
        // Simpson error cancels at fourth order between the halved and whole
        // estimates; err/15 is the standard correction.
        return Ok(left + right + err / 15.0);
    }
    let half = 0.5 * tol;
    Ok(adapt(f, a, m, fa, flm, fm, left, half, depth - 1)?
        + adapt(f, m, b, fm, frm, fb, right, half, depth - 1)?)
}

/// Cumulative trapezoid values of samples `ys` on the (sorted) grid `xs`,
/// anchored at zero at the first node. Used where a cheap consistent
/// antiderivative on a grid is all that is needed.
pub fn cumulative_trapezoid(xs: &[f64], ys: &[f64]) -> alloc::vec::Vec<f64> {
    debug_assert_eq!(xs.len(), ys.len());
    let mut out = alloc::vec::Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..xs.len() {
        acc += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
        out.push(acc);
    }
    out
}

/// Solve `f(x) = target` on the bracket `[lo, hi]` for continuous monotone
/// `f`. Bisection with a Newton-style secant acceleration; always keeps the
/// bracket, so it cannot diverge. Used to invert change-of-variable maps.
pub fn invert_monotone<F>(f: &F, target: f64, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + ?Sized,
{
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::numerics("invalid bracket for inversion".into()));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a)? - target;
    let mut fb = f(b)? - target;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa * fb > 0.0 {
        return Err(Error::numerics("bracket does not contain the target value".into()));
    }
    // Illinois-style false position: when the same endpoint survives twice in
    // a row its function value is halved, which breaks the stall that plain
    // false position hits on convex functions and keeps the bracket shrinking.
    let mut side = 0i8;
    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let denom = fb - fa;
        x = if denom != 0.0 { (a * fb - b * fa) / denom } else { 0.5 * (a + b) };
        if !x.is_finite() || x <= a || x >= b {
            x = 0.5 * (a + b);
        }
        let fx = f(x)? - target;
        if fx == 0.0 || (b - a) < tol * (1.0 + num::abs(x)) {
            return Ok(x);
        }
        if fa * fx < 0.0 {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_integrated_exactly() {
        let f = |x: f64| Ok(3.0 * x * x);
        let v = integrate(&f, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn orientation_flips_sign() {
        let f = |x: f64| Ok(x.exp());
        let fwd = integrate(&f, 0.0, 1.0, 1e-12).unwrap();
        let bwd = integrate(&f, 1.0, 0.0, 1e-12).unwrap();
        assert!((fwd + bwd).abs() < 1e-13);
        assert!((fwd - (core::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integrand_meets_tolerance() {
        let f = |x: f64| Ok((10.0 * x).sin());
        let v = integrate(&f, 0.0, 3.0, 1e-12).unwrap();
        let exact = (1.0 - (30.0f64).cos()) / 10.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn integrand_errors_propagate() {
        let f = |x: f64| {
            if x > 0.5 {
                Err(Error::Domain { op: "log", at: x })
            } else {
                Ok(x)
            }
        };
        assert!(integrate(&f, 0.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn cumulative_trapezoid_matches_closed_form_on_linear_data() {
        let xs = [0.0, 0.5, 1.0, 2.0];
        let ys: alloc::vec::Vec<f64> = xs.iter().map(|&x| 2.0 * x).collect();
        let cum = cumulative_trapezoid(&xs, &ys);
        for (x, c) in xs.iter().zip(&cum) {
            assert!((c - x * x).abs() < 1e-15, "at {x}: {c}");
        }
    }

    #[test]
    fn monotone_inversion_recovers_sinh() {
        let f = |x: f64| Ok(x.sinh());
        let y = 1.0f64;
        let x = invert_monotone(&f, y, -5.0, 5.0, 1e-14).unwrap();
        assert!((x - y.asinh()).abs() < 1e-12);
    }

    #[test]
    fn inversion_rejects_bad_bracket() {
        let f = |x: f64| Ok(x);
        assert!(invert_monotone(&f, 10.0, 0.0, 1.0, 1e-12).is_err());
    }
}
