//! Linearization of the sector condition and closed-form solutions.
//!
//! With `B2 = 1/2` fixed, the one remaining condition `F0 = V` is a Riccati
//! equation for `B0`. Substituting `phi = a3 B0` gives
//!
//! ```text
//!     phi' = -(a1/a3^2) phi^2 - (a2/a3) phi + V - a4,
//! ```
//!
//! and the standard logarithmic substitution `phi = (a3^2/a1) psi'/psi`
//! turns it into a linear second-order problem. Peeling off the drift
//! factor, `psi = e^{-a2 u/(2 a3)} psi_hat`, lands on a Schrodinger
//! equation at zero energy:
//!
//! ```text
//!     [ -1/2 d^2/du^2 + (a1/(2 a3^2)) V - a1 a4/(2 a3^2) + a2^2/(8 a3^2) ] psi_hat = 0.
//! ```
//!
//! The potential is multiplied by `a1/(2 a3^2)`, which equals one exactly
//! when `alpha beta = 0`. In that canonical case a sector state
//! `P(f) e^{-W}` with energy `eps` solves the zero-energy problem once the
//! constant `R` inside `V` is retuned to `eps - a4 + a2^2/(8 a3^2)`, and
//! the whole chain inverts in closed form:
//!
//! ```text
//!     B0 = (a3/a1) ( f' P'(f)/P(f) - W' ) - a2/(2 a1).
//! ```
//!
//! Away from the canonical case the factor cannot be waved off; for
//! `deg Q <= 1` it can be absorbed by rescaling the sector data (see the
//! `scaling` sibling), while for `deg Q = 2` no same-family rescaling
//! exists and the solver refuses.

use super::invariance::{find_invariant_sector, sector_solutions};
use super::{nfold_condition_residual, f_class_eval, SectorSign, TypeAData};
use crate::error::{Error, Result};
use crate::func::Func;
use crate::num;
use crate::quad::DEFAULT_QUAD_TOL;
use crate::swanson::SwansonParams;
use crate::expr::Var;
use alloc::format;
use alloc::vec::Vec;

/// The substitution chain from the sector condition to a zero-energy
/// Schrodinger problem, with every leg invertible.
#[derive(Clone, Copy, Debug)]
pub struct SchrodingerReduction {
    a1: f64,
    a2: f64,
    a3: f64,
    /// `a1/(2 a3^2)`: the factor the reduction puts in front of `V`.
    pub multiplier: f64,
    /// Additive constant of the reduced potential.
    pub constant: f64,
    /// True when the multiplier is one (exactly the case `alpha beta = 0`)
    /// so sector data feeds the reduced equation unchanged.
    pub is_canonical: bool,
}

impl SchrodingerReduction {
    pub fn new(p: &SwansonParams) -> Result<Self> {
        let c = *p.constants();
        let a3 = p.a3()?;
        let a4 = p.a4()?;
        if a3 == 0.0 {
            return Err(Error::InvalidParameter(
                "the linearization divides by a3 = -(omega_tilde + alpha + beta)/sqrt(2 omega_tilde), \
                 which vanishes here"
                    .into(),
            ));
        }
        let multiplier = c.a1 / (2.0 * a3 * a3);
        let constant = -multiplier * a4 + c.a2 * c.a2 / (8.0 * a3 * a3);
        Ok(SchrodingerReduction {
            a1: c.a1,
            a2: c.a2,
            a3,
            multiplier,
            constant,
            is_canonical: num::abs(multiplier - 1.0) < 1e-12,
        })
    }

    pub fn phi_from_b0(&self, b0: &Func) -> Func {
        b0.clone().scale(self.a3)
    }

    pub fn b0_from_phi(&self, phi: &Func) -> Func {
        phi.clone().scale(1.0 / self.a3)
    }

    /// `psi = exp( (a1/a3^2) integral of phi )`, anchored at `anchor`.
    pub fn psi_from_phi(&self, phi: &Func, anchor: f64) -> Func {
        let scaled = phi.clone().scale(self.a1 / (self.a3 * self.a3));
        Func::antiderivative(scaled, anchor, DEFAULT_QUAD_TOL).exp()
    }

    pub fn phi_from_psi(&self, psi: &Func) -> Func {
        (psi.derivative() / psi.clone()).scale(self.a3 * self.a3 / self.a1)
    }

    /// Strip the drift factor: `psi_hat = e^{a2 u/(2 a3)} psi`.
    pub fn psi_hat_from_psi(&self, psi: &Func) -> Func {
        psi.clone() * self.drift(1.0)
    }

    pub fn psi_from_psi_hat(&self, psi_hat: &Func) -> Func {
        psi_hat.clone() * self.drift(-1.0)
    }

    pub fn b0_from_psi_hat(&self, psi_hat: &Func) -> Func {
        (psi_hat.derivative() / psi_hat.clone()).scale(self.a3 / self.a1)
            + Func::constant(Var::U, -self.a2 / (2.0 * self.a1))
    }

    /// The reduced potential `multiplier * V + constant`, whose zero-energy
    /// solutions generate `B0`.
    pub fn reduced_potential(&self, v: &Func) -> Func {
        v.clone().scale(self.multiplier) + Func::constant(Var::U, self.constant)
    }

    /// Sup-norm of the Riccati defect
    /// `phi' + (a1/a3^2) phi^2 + (a2/a3) phi - V + a4` over `samples`.
    pub fn riccati_residual(&self, phi: &Func, v: &Func, a4: f64, samples: &[f64]) -> Result<f64> {
        let defect = phi.derivative()
            + (phi.clone() * phi.clone()).scale(self.a1 / (self.a3 * self.a3))
            + phi.clone().scale(self.a2 / self.a3)
            - v.clone()
            + Func::constant(Var::U, a4);
        let vals = defect.eval_on(samples)?;
        Ok(vals.iter().fold(0.0f64, |m, x| m.max(num::abs(*x))))
    }

    fn drift(&self, direction: f64) -> Func {
        Func::identity(Var::U)
            .scale(direction * self.a2 / (2.0 * self.a3))
            .exp()
    }
}

/// A solved sector condition: the ansatz slope `B0`, the retuned constant,
/// and the certificates that come with it.
#[derive(Clone, Debug)]
pub struct NfoldSolution {
    pub b0: Func,
    /// Input data with `R` replaced by the tuned value.
    pub tuned: TypeAData,
    /// Sector energy the tuning used (eigenvalue of the sector matrix at
    /// `R = 0`).
    pub energy: f64,
    /// Coefficients of `P(z)`, constant term first.
    pub poly: Vec<f64>,
    pub sign: SectorSign,
    pub w_prime: Func,
    /// Zeros of `P(f(u))` inside the working domain. `B0` has simple poles
    /// there; the residual certificate excludes a small window around each.
    pub poles: Vec<f64>,
    /// Sup-norm of `F0 - V` on the pole-free part of the working domain.
    pub residual_sup: f64,
    /// Number of sector eigenvalues discarded for being complex.
    pub complex_skipped: usize,
}

/// Solve the sector condition for `B0` through the `j`-th sector state
/// (states sorted by energy). Requires `alpha beta = 0`; any other
/// parameter point scales the reduced potential and leaves the family.
pub fn solve_nfold_b0(
    p: &SwansonParams,
    data: &TypeAData,
    j: usize,
) -> Result<NfoldSolution> {
    let reduction = SchrodingerReduction::new(p)?;
    if !reduction.is_canonical {
        return Err(Error::InvalidParameter(format!(
            "the reduced problem scales the potential by a1/(2 a3^2) = {}; \
             closed-form tuning needs alpha*beta = 0. For deg Q <= 1 the factor \
             can be absorbed into rescaled sector data first (absorb_scaling)",
            reduction.multiplier
        )));
    }
    let a4 = p.a4()?;
    let c = *p.constants();

    let base = data.with_r(0.0);
    let fit = find_invariant_sector(&base, 1e-9)?;
    if !fit.converged {
        return Err(Error::numerics(format!(
            "sector data is not quasi-solvable: best invariance remainder {}",
            fit.remainder
        )));
    }
    let (sols, complex_skipped) = sector_solutions(&fit)?;
    if j >= sols.len() {
        return Err(Error::OutOfRange {
            what: "sector state index",
            value: j as f64,
            lo: 0.0,
            hi: sols.len() as f64 - 1.0,
        });
    }
    let energy = sols[j].energy;
    let poly = sols[j].poly.clone();
    let tuned_r = energy - a4 + c.a2 * c.a2 / (8.0 * reduction.a3 * reduction.a3);
    let tuned = data.with_r(tuned_r);

    // P(f) and P'(f) as functions of u.
    let ft = f_class_eval(&tuned)?;
    let mut p_of_f = Func::constant(Var::U, 0.0);
    let mut dp_of_f = Func::constant(Var::U, 0.0);
    for (k, &vk) in poly.iter().enumerate() {
        p_of_f = p_of_f + ft.f.powi(k as u32).scale(vk);
        if k >= 1 {
            dp_of_f = dp_of_f + ft.f.powi(k as u32 - 1).scale(vk * k as f64);
        }
    }

    let log_deriv = ft.f1.clone() * dp_of_f / p_of_f.clone() - fit.w_prime.clone();
    let b0 = log_deriv.scale(reduction.a3 / reduction.a1)
        + Func::constant(Var::U, -c.a2 / (2.0 * reduction.a1));

    let domain = tuned.default_domain();
    let poles = locate_zeros(&p_of_f, domain.lo, domain.hi);
    let guard = 0.02 * domain.length();
    let samples: Vec<f64> = domain
        .chebyshev(201)
        .into_iter()
        .filter(|u| poles.iter().all(|pole| num::abs(u - pole) > guard))
        .collect();
    let (_, residual_sup) = nfold_condition_residual(p, &b0, &tuned, fit.sign, &samples)?;

    Ok(NfoldSolution {
        b0,
        tuned,
        energy,
        poly,
        sign: fit.sign,
        w_prime: fit.w_prime,
        poles,
        residual_sup,
        complex_skipped,
    })
}

/// Sign-change scan plus bisection. Tolerant of evaluation failures at
/// isolated points (they end the current bracket).
fn locate_zeros(f: &Func, lo: f64, hi: f64) -> Vec<f64> {
    let n = 1024;
    let mut zeros = Vec::new();
    let h = (hi - lo) / n as f64;
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=n {
        let x = lo + i as f64 * h;
        let y = match f.value(x) {
            Ok(y) => y,
            Err(_) => {
                prev = None;
                continue;
            }
        };
        if y == 0.0 {
            zeros.push(x);
            prev = None;
            continue;
        }
        if let Some((px, py)) = prev {
            if py.signum() != y.signum() {
                let (mut a, mut b) = (px, x);
                let mut fa = py;
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    match f.value(m) {
                        Ok(fm) if fm != 0.0 => {
                            if fm.signum() == fa.signum() {
                                a = m;
                                fa = fm;
                            } else {
                                b = m;
                            }
                        }
                        _ => break,
                    }
                }
                zeros.push(0.5 * (a + b));
            }
        }
        prev = Some((x, y));
    }
    zeros
}
