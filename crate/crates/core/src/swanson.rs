//! Model parameters and Hamiltonian assembly.
//!
//! The model is fixed by five real numbers (omega, alpha, beta, gamma,
//! delta) and a first-order operator eta = a d + b:
//!
//! ```text
//!     H = omega (eta* eta + 1/2) + alpha eta^2 + beta eta*^2
//!         + gamma eta + delta eta*
//! ```
//!
//! Expanding gives a second-order operator in divergence form,
//!
//! ```text
//!     H = -wt d a^2 d + b1 d + c2,     wt = omega - alpha - beta,
//! ```
//!
//! and everything downstream (the similarity transformation, the effective
//! potential, the quasi-solvability constants) is phrased in terms of wt and
//! a handful of derived combinations. Those are computed once, eagerly, when
//! the parameters are constructed, and never recomputed mid-run.

use crate::error::{Error, Result};
use crate::func::Func;
use crate::num;
use crate::opalg::{DiffOp, FirstOrderOp};
use alloc::format;
use alloc::vec;

/// The five model parameters with their derived constants attached.
#[derive(Clone, Debug)]
pub struct SwansonParams {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    consts: DerivedConstants,
}

/// Combinations of the parameters that appear throughout the reduced
/// problem. `a3` and `a4` exist only for `omega_tilde > 0` because they
/// carry a factor 1/sqrt(2 omega_tilde).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedConstants {
    /// omega - alpha - beta; every similarity transform divides by it.
    pub omega_tilde: f64,
    /// omega^2 - 4 alpha beta, the squared frequency of the equivalent
    /// harmonic problem.
    pub big_omega_sq: f64,
    /// (alpha-beta)^2/wt + wt + 2 alpha + 2 beta.
    pub a1: f64,
    /// (alpha-beta)(gamma-delta)/wt + gamma + delta.
    pub a2: f64,
    /// (gamma-delta)^2 / (4 wt), the constant shift from the linear terms.
    pub lambda: f64,
    /// -(wt + alpha + beta)/sqrt(2 wt); requires wt > 0.
    pub a3: Option<f64>,
    /// lambda + (wt + alpha + beta)/2; kept alongside a3.
    pub a4: Option<f64>,
}

/// Compute the derived constants for one parameter set. Fails only for
/// `omega_tilde = 0`; a negative `omega_tilde` yields a partial result with
/// `a3`/`a4` absent, since pure operator algebra still makes sense there.
pub fn derive_constants(
    omega: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    delta: f64,
) -> Result<DerivedConstants> {
    for (name, v) in [
        ("omega", omega),
        ("alpha", alpha),
        ("beta", beta),
        ("gamma", gamma),
        ("delta", delta),
    ] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
        }
    }
    let wt = omega - alpha - beta;
    if wt == 0.0 {
        return Err(Error::InvalidParameter(
            "omega - alpha - beta must be nonzero".into(),
        ));
    }
    let diff_ab = alpha - beta;
    let diff_gd = gamma - delta;
    let (a3, a4) = if wt > 0.0 {
        let lam = diff_gd * diff_gd / (4.0 * wt);
        (
            Some(-(wt + alpha + beta) / num::sqrt(2.0 * wt)),
            Some(lam + (wt + alpha + beta) / 2.0),
        )
    } else {
        (None, None)
    };
    Ok(DerivedConstants {
        omega_tilde: wt,
        big_omega_sq: omega * omega - 4.0 * alpha * beta,
        a1: diff_ab * diff_ab / wt + wt + 2.0 * alpha + 2.0 * beta,
        a2: diff_ab * diff_gd / wt + gamma + delta,
        lambda: diff_gd * diff_gd / (4.0 * wt),
        a3,
        a4,
    })
}

impl SwansonParams {
    pub fn new(omega: f64, alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let consts = derive_constants(omega, alpha, beta, gamma, delta)?;
        Ok(SwansonParams { omega, alpha, beta, gamma, delta, consts })
    }

    /// The constants derived at construction time.
    pub fn constants(&self) -> &DerivedConstants {
        &self.consts
    }

    pub fn omega_tilde(&self) -> f64 {
        self.consts.omega_tilde
    }

    /// `a3`, failing with a diagnostic when `omega_tilde <= 0`.
    pub fn a3(&self) -> Result<f64> {
        self.consts.a3.ok_or_else(|| {
            Error::InvalidParameter(
                "a3 requires omega - alpha - beta > 0".into(),
            )
        })
    }

    pub fn a4(&self) -> Result<f64> {
        self.consts.a4.ok_or_else(|| {
            Error::InvalidParameter(
                "a4 requires omega - alpha - beta > 0".into(),
            )
        })
    }

    /// True when the Hamiltonian is Hermitian by inspection: equal
    /// quadratic weights and equal linear weights.
    pub fn hermitian_limit(&self) -> bool {
        self.alpha == self.beta && self.gamma == self.delta
    }
}

/// Whether the model commutes with the combined parity/time-reversal
/// operation that sends `eta -> -eta` and `eta* -> -eta*`. The quadratic
/// terms always survive it; the linear terms flip sign, so the test is an
/// exact structural zero test, with no tolerance involved.
pub fn is_pt_symmetric(p: &SwansonParams) -> bool {
    p.gamma == 0.0 && p.delta == 0.0
}

/// Expand the Hamiltonian through operator algebra:
/// `omega (eta* eta + 1/2) + alpha eta^2 + beta eta*^2 + gamma eta + delta eta*`.
pub fn build_hamiltonian(p: &SwansonParams, eta: &FirstOrderOp) -> Result<DiffOp> {
    let var = eta.var();
    let e = eta.to_diff_op();
    let ed = eta.adjoint().to_diff_op();
    let mut h = ed.compose(&e)?;
    h = h + DiffOp::multiplication(Func::constant(var, 0.5));
    let mut acc = scale_op(h, p.omega);
    if p.alpha != 0.0 {
        acc = acc + scale_op(e.compose(&e)?, p.alpha);
    }
    if p.beta != 0.0 {
        acc = acc + scale_op(ed.compose(&ed)?, p.beta);
    }
    if p.gamma != 0.0 {
        acc = acc + scale_op(e, p.gamma);
    }
    if p.delta != 0.0 {
        acc = acc + scale_op(ed, p.delta);
    }
    Ok(acc)
}

fn scale_op(op: DiffOp, c: f64) -> DiffOp {
    let var = op.var();
    DiffOp::new(
        var,
        op.coeffs().iter().map(|f| f.clone().scale(c)).collect(),
    )
}

/// The first-order coefficient of the divergence form,
/// `b1 = (alpha - beta) a (2b - a') + (gamma - delta) a`.
pub fn closed_form_b1(p: &SwansonParams, eta: &FirstOrderOp) -> Func {
    let a = eta.a().clone();
    let b = eta.b().clone();
    let ap = a.derivative();
    let two_b_minus_ap = b.scale(2.0) - ap;
    (a.clone() * two_b_minus_ap).scale(p.alpha - p.beta) + a.scale(p.gamma - p.delta)
}

/// The multiplicative coefficient of the divergence form,
/// assembled term by term from the expansion of the quadratic ladder
/// products:
///
/// ```text
///     c2 = (wt + 2a + 2b) b^2 - (wt + alpha + 3 beta) a' b
///          - (wt + 2 beta) a b' + beta (a a'' + a'^2)
///          + (gamma + delta) b - delta a' + (wt + alpha + beta)/2
/// ```
pub fn closed_form_c2(p: &SwansonParams, eta: &FirstOrderOp) -> Func {
    let wt = p.omega_tilde();
    let var = eta.var();
    let a = eta.a().clone();
    let b = eta.b().clone();
    let ap = a.derivative();
    let app = ap.derivative();
    let bp = b.derivative();
    let mut c2 = (b.clone() * b.clone()).scale(wt + 2.0 * p.alpha + 2.0 * p.beta);
    c2 = c2 - (ap.clone() * b.clone()).scale(wt + p.alpha + 3.0 * p.beta);
    c2 = c2 - (a.clone() * bp).scale(wt + 2.0 * p.beta);
    c2 = c2 + (a.clone() * app + ap.clone() * ap.clone()).scale(p.beta);
    c2 = c2 + b.scale(p.gamma + p.delta);
    c2 = c2 - ap.scale(p.delta);
    c2 + Func::constant(var, (wt + p.alpha + p.beta) / 2.0)
}

/// The Hamiltonian assembled from its closed-form divergence shape,
/// `-wt d a^2 d + b1 d + c2`, re-expanded into left-normal form. Used as an
/// independent check against [`build_hamiltonian`], which goes through the
/// ladder products instead.
pub fn hamiltonian_closed_form(p: &SwansonParams, eta: &FirstOrderOp) -> DiffOp {
    let var = eta.var();
    let a = eta.a().clone();
    let w = (a.clone() * a).scale(p.omega_tilde());
    let div = DiffOp::divergence_form(w);
    let first = DiffOp::new(
        var,
        vec![Func::constant(var, 0.0), closed_form_b1(p, eta)],
    );
    let zeroth = DiffOp::multiplication(closed_form_c2(p, eta));
    div + first + zeroth
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Var;
    use crate::{Interval, Tol};

    fn f(text: &str) -> Func {
        Func::parse(text, Var::X).unwrap()
    }

    fn iv() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    #[test]
    fn constants_for_the_reference_parameter_set() {
        let c = derive_constants(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        assert!((c.omega_tilde - 1.25).abs() < 1e-15);
        assert!((c.big_omega_sq - 3.5).abs() < 1e-15);
        assert!((c.a1 - 2.8).abs() < 1e-13);
        assert!((c.a2 - 1.2).abs() < 1e-13);
        assert!((c.lambda - 0.2).abs() < 1e-15);
        assert!((c.a3.unwrap() + 1.264911).abs() < 1e-6);
        assert!((c.a4.unwrap() - 1.2).abs() < 1e-13);
    }

    #[test]
    fn symmetric_parameters_collapse_the_difference_terms() {
        let (al, ga) = (0.3, 0.7);
        let c = derive_constants(2.0, al, al, ga, ga).unwrap();
        let wt = 2.0 - 2.0 * al;
        assert_eq!(c.lambda, 0.0);
        assert!((c.a2 - 2.0 * ga).abs() < 1e-15);
        assert!((c.a1 - (wt + 4.0 * al)).abs() < 1e-15);
    }

    #[test]
    fn vanishing_product_of_quadratic_weights_balances_a1_and_a3() {
        let c = derive_constants(2.0, 0.0, 0.5, 0.0, 0.0).unwrap();
        assert!((c.a1 - 8.0 / 3.0).abs() < 1e-14);
        let a3 = c.a3.unwrap();
        assert!((a3 * a3 - 4.0 / 3.0).abs() < 1e-14);
        assert!((c.a1 - 2.0 * a3 * a3).abs() < 1e-14);
    }

    #[test]
    fn omega_tilde_zero_is_rejected() {
        assert!(derive_constants(1.0, 0.5, 0.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn negative_omega_tilde_gives_a_partial_result() {
        let c = derive_constants(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(c.omega_tilde, -1.0);
        assert!(c.a3.is_none() && c.a4.is_none());
        let p = SwansonParams::new(1.0, 1.0, 1.0, 0.0, 0.0).unwrap();
        assert!(p.a3().is_err());
    }

    #[test]
    fn unit_frequency_ladder_gives_the_harmonic_oscillator() {
        let p = SwansonParams::new(1.0, 0.0, 0.0, 0.0, 0.0).unwrap();
        let eta = FirstOrderOp::new(f("1/sqrt(2)"), f("x/sqrt(2)")).unwrap();
        let h = build_hamiltonian(&p, &eta).unwrap();
        let expect = DiffOp::new(Var::X, alloc::vec![f("x^2/2"), f("0"), f("-1/2")]);
        assert!(h.pointwise_eq(&expect, iv(), Tol::default()).unwrap());
    }

    #[test]
    fn ladder_expansion_matches_the_divergence_closed_form() {
        let p = SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        let eta = FirstOrderOp::new(f("1+x^2/4"), f("sin(x)/2+x")).unwrap();
        let built = build_hamiltonian(&p, &eta).unwrap();
        let closed = hamiltonian_closed_form(&p, &eta);
        let dev = built.max_deviation(&closed, iv(), 101).unwrap();
        assert!(dev < 1e-10, "max coefficient deviation {dev}");
    }

    #[test]
    fn equal_weights_make_the_hamiltonian_self_adjoint() {
        let p = SwansonParams::new(2.0, 0.3, 0.3, 0.6, 0.6).unwrap();
        assert!(p.hermitian_limit());
        let eta = FirstOrderOp::new(f("1+x^2/8"), f("x+cos(x)/4")).unwrap();
        let h = build_hamiltonian(&p, &eta).unwrap();
        let dev = h.max_deviation(&h.formal_adjoint(), iv(), 101).unwrap();
        assert!(dev < 1e-10, "self-adjoint deviation {dev}");
    }

    #[test]
    fn swapping_weights_transposes_the_hamiltonian() {
        let p = SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        let q = SwansonParams::new(2.0, 0.25, 0.5, 0.0, 1.0).unwrap();
        let eta = FirstOrderOp::new(f("1+x^2/4"), f("x/2")).unwrap();
        let h = build_hamiltonian(&p, &eta).unwrap();
        let ht = build_hamiltonian(&q, &eta).unwrap();
        let dev = h.formal_adjoint().max_deviation(&ht, iv(), 101).unwrap();
        assert!(dev < 1e-10, "transpose deviation {dev}");
    }

    #[test]
    fn pt_symmetry_is_an_exact_zero_test() {
        assert!(is_pt_symmetric(&SwansonParams::new(2.0, 0.5, 0.25, 0.0, 0.0).unwrap()));
        assert!(!is_pt_symmetric(&SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0).unwrap()));
        assert!(!is_pt_symmetric(&SwansonParams::new(1.0, 0.0, 0.0, 0.0, 1e-12).unwrap()));
    }

    #[test]
    fn derived_identities_hold_for_the_reference_set() {
        let c = derive_constants(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        assert!((c.omega_tilde * c.a1 - c.big_omega_sq).abs() < 1e-13);
        let a3 = c.a3.unwrap();
        let lhs = c.a1 - 2.0 * a3 * a3;
        let rhs = -4.0 * 0.5 * 0.25 / c.omega_tilde;
        assert!((lhs - rhs).abs() < 1e-13);
    }
}
