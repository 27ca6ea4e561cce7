//! Similarity transformation to Hermitian form.
//!
//! The non-Hermitian Hamiltonian `H = -wt d a^2 d + b1 d + c2` becomes
//! formally self-adjoint after conjugation by a positive weight `rho`:
//! `h = rho H rho^{-1}`. Only the logarithmic derivative of the weight is
//! ever needed,
//!
//! ```text
//!     sigma = (log rho)' = -b1 / (2 wt a^2),
//! ```
//!
//! and with that choice the gauged operator's first-order coefficient is
//! exactly the derivative of the kinetic weight `w = wt a^2`, so
//! `h = -d w d + V_eff` in divergence form. `rho` itself is generally a
//! non-elementary integral, so it is never materialized here; where its
//! values are needed on a grid (the isospectrality residual), a cumulative
//! quadrature of `sigma` does the job.
//!
//! `V_eff` also has a closed form directly in `a`, `b` and the model
//! constants; [`effective_potential_closed_form`] transcribes it and the
//! tests hold the two routes against each other pointwise.

use crate::error::{Error, Result};
use crate::func::Func;
use crate::num;
use crate::opalg::{DiffOp, FirstOrderOp};
use crate::swanson::{closed_form_b1, SwansonParams};
use crate::{Interval, Tol, DEFAULT_SAMPLES};
use alloc::format;

/// Result of the similarity transformation: the self-adjoint operator, its
/// divergence-form pieces, and the gauge function that produced it.
#[derive(Clone, Debug)]
pub struct HermitizedModel {
    h: DiffOp,
    sigma: Func,
    v_eff: Func,
    weight: Func,
    first_order_residual: f64,
}

impl HermitizedModel {
    /// The transformed operator in left-normal form.
    pub fn operator(&self) -> &DiffOp {
        &self.h
    }

    /// Logarithmic derivative of the similarity weight.
    pub fn sigma(&self) -> &Func {
        &self.sigma
    }

    /// Zeroth-order coefficient of the divergence form.
    pub fn v_eff(&self) -> &Func {
        &self.v_eff
    }

    /// Kinetic weight `w = wt a^2`, positive on the working domain.
    pub fn weight(&self) -> &Func {
        &self.weight
    }

    /// Sup-norm of the first-order coefficient left over after writing `h`
    /// in divergence form. Zero up to roundoff when `sigma` matches the
    /// Hamiltonian it is applied to.
    pub fn first_order_residual(&self) -> f64 {
        self.first_order_residual
    }
}

/// The gauge function `sigma = -b1 / (2 wt a^2)`. Zeros of `a` inside the
/// working domain surface as domain errors at evaluation time; in the
/// Hermitian limit (`alpha = beta`, `gamma = delta`) the numerator vanishes
/// identically and the result is the literal zero function.
pub fn gauge_log_derivative(p: &SwansonParams, eta: &FirstOrderOp) -> Func {
    let a = eta.a().clone();
    let b1 = closed_form_b1(p, eta);
    let denom = (a.clone() * a).scale(2.0 * p.omega_tilde());
    b1.scale(-1.0) / denom
}

/// Conjugate `h_op` by the weight with logarithmic derivative `sigma` and
/// split the result into divergence form. Fails when the leftover
/// first-order coefficient exceeds `tol` on `interval`, which means `sigma`
/// does not belong to this operator, or when the kinetic weight fails to be
/// positive there.
pub fn hermitize(
    h_op: &DiffOp,
    sigma: &Func,
    interval: Interval,
    tol: Tol,
) -> Result<HermitizedModel> {
    if h_op.order() != 2 {
        return Err(Error::InvalidParameter(format!(
            "hermitization expects a second-order operator, got order {}",
            h_op.order()
        )));
    }
    let gauged = h_op.gauge_conjugate(sigma);
    let weight = gauged.coeff(2).scale(-1.0);
    let v_eff = gauged.coeff(0);

    let xs = interval.chebyshev(DEFAULT_SAMPLES);
    let w_vals = weight.eval_on(&xs)?;
    if let Some((i, _)) = w_vals.iter().enumerate().find(|(_, w)| **w <= 0.0) {
        return Err(Error::numerics(format!(
            "kinetic weight is not positive at x = {}",
            xs[i]
        )));
    }
    // In divergence form the first-order coefficient must be exactly -w'.
    let leftover = gauged.coeff(1) + weight.derivative();
    let vals = leftover.eval_on(&xs)?;
    let resid = vals.iter().fold(0.0f64, |m, v| m.max(num::abs(*v)));
    if resid > tol.abs {
        return Err(Error::numerics(format!(
            "gauge function does not hermitize this operator \
             (first-order residual {resid:.3e})"
        )));
    }
    Ok(HermitizedModel {
        h: gauged,
        sigma: sigma.clone(),
        v_eff,
        weight,
        first_order_residual: resid,
    })
}

/// Build, gauge, and split in one step from the model data.
pub fn hermitize_swanson(
    p: &SwansonParams,
    eta: &FirstOrderOp,
    interval: Interval,
    tol: Tol,
) -> Result<HermitizedModel> {
    let h = crate::swanson::build_hamiltonian(p, eta)?;
    let sigma = gauge_log_derivative(p, eta);
    hermitize(&h, &sigma, interval, tol)
}

/// The effective potential written directly in `a`, `b` and the model
/// constants:
///
/// ```text
///     V_eff = a1 b (b - a') - (wt + alpha + beta) a b'
///             + (alpha + beta)/2 a a'' + (a1 - wt)/4 a'^2
///             + a2 (b - a'/2) + lambda + (wt + alpha + beta)/2
/// ```
///
/// Independent of the gauge expansion; used as its oracle.
pub fn effective_potential_closed_form(p: &SwansonParams, eta: &FirstOrderOp) -> Func {
    let c = p.constants();
    let var = eta.var();
    let a = eta.a().clone();
    let b = eta.b().clone();
    let ap = a.derivative();
    let app = ap.derivative();
    let bp = b.derivative();
    let omega = c.omega_tilde + p.alpha + p.beta;

    let mut v = (b.clone() * (b.clone() - ap.clone())).scale(c.a1);
    v = v - (a.clone() * bp).scale(omega);
    v = v + (a * app).scale((p.alpha + p.beta) / 2.0);
    v = v + (ap.clone() * ap.clone()).scale((c.a1 - c.omega_tilde) / 4.0);
    v = v + (b - ap.scale(0.5)).scale(c.a2);
    v + Func::constant(var, c.lambda + omega / 2.0)
}
