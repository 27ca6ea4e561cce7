//! Position-dependent mass realization of the constant-commutator branch.
//!
//! Choosing `b = integral dx/(2a) + a'/2` makes `[eta, eta*] = 1`, and the
//! whole model then maps onto a Schrodinger problem with a coordinate-
//! dependent mass through
//!
//! ```text
//!     a(x) = 1 / sqrt(2 wt m(x)),      u(x) = integral sqrt(m) dx,
//! ```
//!
//! with the Hermitized operator taking the form
//!
//! ```text
//!     h = -d (1/2m) d + (wt/2) a1 u^2 + sqrt(wt/2) a2 u
//!         + m''/(8 m^2) - 7 m'^2/(32 m^3) + lambda.
//! ```
//!
//! The quantum correction terms in `m` are exactly `-(wt/4)(2 a a'' + a'^2)`
//! rewritten through the mass; the equivalence of this operator with the
//! gauge-transformed Hamiltonian is computed, not assumed, and reported as a
//! sup-norm deviation.
//!
//! `u` is built by adaptive quadrature and may have bounded range (for
//! example `m = (1+x^2)^{-2}` gives `u = arctan x`); downstream spectral
//! code then works on the finite `u`-interval. The inverse map `x(u)` is a
//! bracketed root find on the strictly increasing `u`.

use crate::error::{Error, Result};
use crate::func::Func;
use crate::hermitize::hermitize_swanson;
use crate::num;
use crate::opalg::{DiffOp, FirstOrderOp};
use crate::quad;
use crate::swanson::SwansonParams;
use crate::{Interval, Tol, DEFAULT_SAMPLES};
use alloc::format;
use alloc::vec;

const U_QUAD_TOL: f64 = 1.0e-10;

/// A positive, twice-differentiable mass function on a working interval.
#[derive(Clone, Debug)]
pub struct MassProfile {
    m: Func,
    domain: Interval,
}

impl MassProfile {
    /// Validates positivity and second-derivative evaluability on a
    /// Chebyshev sample of the domain.
    pub fn new(m: Func, domain: Interval) -> Result<Self> {
        let xs = domain.chebyshev(DEFAULT_SAMPLES);
        let vals = m.eval_on(&xs)?;
        if let Some((i, _)) = vals.iter().enumerate().find(|(_, v)| **v <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be positive on the domain; m({}) = {}",
                xs[i], vals[i]
            )));
        }
        // Smoothness to order two: evaluating the exact second derivative
        // must succeed everywhere we sample.
        m.derivative_n(2).eval_on(&xs)?;
        Ok(MassProfile { m, domain })
    }

    pub fn mass(&self) -> &Func {
        &self.m
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// The quantum correction terms `m''/(8m^2) - 7 m'^2/(32 m^3)`.
    pub fn correction(&self) -> Func {
        let m = self.m.clone();
        let m1 = m.derivative();
        let m2 = m1.derivative();
        let m_sq = m.clone() * m.clone();
        let m_cu = m_sq.clone() * m;
        m2.scale(0.125) / m_sq - (m1.clone() * m1).scale(7.0 / 32.0) / m_cu
    }
}

/// The coordinate change `u(x) = integral_x0^x sqrt(m) dt` together with its
/// root-finding inverse. `u` is strictly increasing because `sqrt(m) > 0`.
#[derive(Clone, Debug)]
pub struct ChangeOfVariable {
    u: Func,
    du_dx: Func,
    domain: Interval,
}

impl ChangeOfVariable {
    pub fn new(profile: &MassProfile, x0: f64) -> Result<Self> {
        let domain = profile.domain();
        if !domain.contains(x0) {
            return Err(Error::OutOfRange {
                what: "anchor x0",
                value: x0,
                lo: domain.lo,
                hi: domain.hi,
            });
        }
        let du_dx = Func::from_expr(
            crate::expr::ScalarExpr::parse("sqrt(x)", crate::expr::Var::X).unwrap(),
            crate::expr::Var::X,
            crate::expr::Bindings::none(),
        );
        // sqrt of the mass, composed rather than re-parsed so an opaque mass
        // still works.
        let du_dx = Func::compose(du_dx, profile.mass().clone());
        let u = Func::antiderivative(du_dx.clone(), x0, U_QUAD_TOL);
        Ok(ChangeOfVariable { u, du_dx, domain })
    }

    /// The map `u(x)` as a function object.
    pub fn u(&self) -> &Func {
        &self.u
    }

    /// `du/dx = sqrt(m)`.
    pub fn du_dx(&self) -> &Func {
        &self.du_dx
    }

    pub fn u_of_x(&self, x: f64) -> Result<f64> {
        self.u.value(x)
    }

    /// Invert `u` by a bracketed root find over the working domain.
    pub fn x_of_u(&self, target: f64) -> Result<f64> {
        quad::invert_monotone(
            &|x| self.u.value(x),
            target,
            self.domain.lo,
            self.domain.hi,
            1e-12,
        )
    }

    /// Image of the working domain, `(u(x_min), u(x_max))`. Finite even when
    /// the untruncated range would be bounded (arctan-like maps); spectral
    /// consumers put their walls here.
    pub fn u_range(&self) -> Result<(f64, f64)> {
        Ok((self.u.value(self.domain.lo)?, self.u.value(self.domain.hi)?))
    }
}

/// `a = 1/sqrt(2 wt m)`; needs `wt > 0`.
pub fn a_from_mass(profile: &MassProfile, p: &SwansonParams) -> Result<Func> {
    let wt = p.omega_tilde();
    if wt <= 0.0 {
        return Err(Error::InvalidParameter(
            "mass map requires omega - alpha - beta > 0".into(),
        ));
    }
    let sqrt_expr = Func::parse("1/sqrt(x)", crate::expr::Var::X).unwrap();
    Ok(Func::compose(sqrt_expr, profile.mass().clone().scale(2.0 * wt)))
}

/// `m = 1/(2 wt a^2)`, the inverse map, validated on the same domain.
pub fn mass_from_a(a: &Func, p: &SwansonParams, domain: Interval) -> Result<MassProfile> {
    let wt = p.omega_tilde();
    if wt <= 0.0 {
        return Err(Error::InvalidParameter(
            "mass map requires omega - alpha - beta > 0".into(),
        ));
    }
    let var = a.var();
    let m = Func::constant(var, 1.0) / (a.clone() * a.clone()).scale(2.0 * wt);
    MassProfile::new(m, domain)
}

/// The constant-commutator choice `b = integral_x0^x dt/(2a) + a'/2`. The
/// resulting `eta = a d + b` satisfies `[eta, eta*] = 1` identically; the
/// integral term equals `sqrt(wt/2) u(x)` under the mass map.
pub fn b_constant_commutator(a: &Func, x0: f64) -> Func {
    let var = a.var();
    let integrand = Func::constant(var, 1.0) / a.clone().scale(2.0);
    Func::antiderivative(integrand, x0, U_QUAD_TOL) + a.derivative().scale(0.5)
}

/// The PDM operator together with its cross-validation against the
/// gauge-transformation route.
#[derive(Clone, Debug)]
pub struct PdmModel {
    op: DiffOp,
    potential: Func,
    /// Sup-norm distance between this operator and
    /// `hermitize(build_hamiltonian(...))` on the working domain.
    equivalence_deviation: f64,
}

impl PdmModel {
    pub fn operator(&self) -> &DiffOp {
        &self.op
    }

    pub fn potential(&self) -> &Func {
        &self.potential
    }

    pub fn equivalence_deviation(&self) -> f64 {
        self.equivalence_deviation
    }
}

/// Assemble `-d (1/2m) d + V(x)` and measure its pointwise distance from the
/// Hermitized ladder construction with the same mass, anchored at `x0`.
pub fn pdm_hamiltonian(
    p: &SwansonParams,
    profile: &MassProfile,
    cv: &ChangeOfVariable,
    x0: f64,
) -> Result<PdmModel> {
    let c = *p.constants();
    let wt = c.omega_tilde;
    if wt <= 0.0 {
        return Err(Error::InvalidParameter(
            "PDM construction requires omega - alpha - beta > 0".into(),
        ));
    }
    let var = profile.mass().var();
    let u = cv.u().clone();
    let mut v = (u.clone() * u.clone()).scale(wt / 2.0 * c.a1);
    v = v + u.scale(num::sqrt(wt / 2.0) * c.a2);
    v = v + profile.correction();
    v = v + Func::constant(var, c.lambda);

    let half_inv_m = Func::constant(var, 0.5) / profile.mass().clone();
    let op = DiffOp::divergence_form(half_inv_m)
        + DiffOp::new(var, vec![v.clone()]);

    // Independent route: eta with the constant-commutator b, expanded and
    // gauge-transformed. The two operators must agree pointwise.
    let a = a_from_mass(profile, p)?;
    let b = b_constant_commutator(&a, x0);
    let eta = FirstOrderOp::new(a, b)?;
    let hm = hermitize_swanson(p, &eta, profile.domain(), Tol::default())?;
    let deviation = op.max_deviation(hm.operator(), profile.domain(), DEFAULT_SAMPLES)?;

    Ok(PdmModel { op, potential: v, equivalence_deviation: deviation })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Var;

    fn f(text: &str) -> Func {
        Func::parse(text, Var::X).unwrap()
    }

    fn lorentz_mass(domain: Interval) -> MassProfile {
        MassProfile::new(f("1/(1+x^2)"), domain).unwrap()
    }

    #[test]
    fn constant_ladder_coefficient_gives_linear_b() {
        // a = 1/sqrt(2): integral dx/(2a) = x/sqrt(2), a' = 0.
        let a = f("1/sqrt(2)");
        let b = b_constant_commutator(&a, 0.0);
        for &t in &[-1.0, 0.3, 2.0] {
            assert!((b.value(t).unwrap() - t / core::f64::consts::SQRT_2).abs() < 1e-10);
        }
    }

    #[test]
    fn commutator_is_unity_for_a_nonconstant_coefficient() {
        let p = SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        let domain = Interval::new(-2.0, 2.0).unwrap();
        let profile = lorentz_mass(domain);
        let a = a_from_mass(&profile, &p).unwrap();
        let b = b_constant_commutator(&a, 0.0);
        let eta = FirstOrderOp::new(a, b).unwrap();
        let comm = eta
            .to_diff_op()
            .commutator(&eta.adjoint().to_diff_op())
            .unwrap();
        let xs = domain.chebyshev(41);
        let c0 = comm.coeff(0).eval_on(&xs).unwrap();
        for (x, v) in xs.iter().zip(&c0) {
            assert!((v - 1.0).abs() < 1e-10, "commutator at {x}: {v}");
        }
        for k in 1..=comm.order() {
            let ck = comm.coeff(k).eval_on(&xs).unwrap();
            for (x, v) in xs.iter().zip(&ck) {
                assert!(v.abs() < 1e-10, "order-{k} coefficient at {x}: {v}");
            }
        }
    }

    #[test]
    fn change_of_variable_matches_the_inverse_hyperbolic_sine() {
        let domain = Interval::new(-3.0, 3.0).unwrap();
        let cv = ChangeOfVariable::new(&lorentz_mass(domain), 0.0).unwrap();
        assert!((cv.u_of_x(1.0).unwrap() - 0.881373587019543).abs() < 1e-9);
        assert!((cv.u_of_x(-2.0).unwrap() - (-2.0f64).asinh()).abs() < 1e-9);
    }

    #[test]
    fn bounded_range_mass_maps_to_arctangent() {
        let domain = Interval::new(-8.0, 8.0).unwrap();
        let profile = MassProfile::new(f("1/(1+x^2)^2"), domain).unwrap();
        let cv = ChangeOfVariable::new(&profile, 0.0).unwrap();
        assert!((cv.u_of_x(1.0).unwrap() - core::f64::consts::FRAC_PI_4).abs() < 1e-8);
        let (lo, hi) = cv.u_range().unwrap();
        assert!(lo > -core::f64::consts::FRAC_PI_2 && hi < core::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn inverse_map_round_trips() {
        let domain = Interval::new(-3.0, 3.0).unwrap();
        let cv = ChangeOfVariable::new(&lorentz_mass(domain), 0.0).unwrap();
        for &x in &[-2.5, -0.4, 0.0, 1.7] {
            let u = cv.u_of_x(x).unwrap();
            let back = cv.x_of_u(u).unwrap();
            assert!((back - x).abs() < 1e-10, "round trip at {x} gave {back}");
        }
    }

    #[test]
    fn derivative_of_u_is_sqrt_mass() {
        let domain = Interval::new(-3.0, 3.0).unwrap();
        let cv = ChangeOfVariable::new(&lorentz_mass(domain), 0.0).unwrap();
        let du = cv.u().derivative();
        let h = 1e-5;
        for &x in &[-1.0, 0.5, 2.0] {
            let numeric = (cv.u_of_x(x + h).unwrap() - cv.u_of_x(x - h).unwrap()) / (2.0 * h);
            assert!((du.value(x).unwrap() - numeric).abs() < 1e-8);
            let expect = 1.0 / (1.0 + x * x).sqrt();
            assert!((du.value(x).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_maps_are_mutually_inverse() {
        let p = SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        let domain = Interval::new(-3.0, 3.0).unwrap();
        let profile = lorentz_mass(domain);
        let a = a_from_mass(&profile, &p).unwrap();
        // a = sqrt((1+x^2)/2.5) at x = 2
        assert!((a.value(2.0).unwrap() - (5.0f64 / 2.5).sqrt()).abs() < 1e-14);
        let back = mass_from_a(&a, &p, domain).unwrap();
        let diff = back.mass().value(2.0).unwrap() - 1.0 / 5.0;
        assert!(diff.abs() < 1e-14);
    }

    #[test]
    fn constant_mass_limit_has_constant_ladder_coefficient() {
        let p = SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        let domain = Interval::new(-2.0, 2.0).unwrap();
        let profile = MassProfile::new(f("1"), domain).unwrap();
        let a = a_from_mass(&profile, &p).unwrap();
        let expect = 1.0 / (2.0 * p.omega_tilde()).sqrt();
        assert!((a.value(1.3).unwrap() - expect).abs() < 1e-14);
    }

    #[test]
    fn correction_term_value_at_the_origin() {
        // m = (1+x^2)^{-1}: m(0)=1, m'(0)=0, m''(0)=-2, correction -1/4.
        let domain = Interval::new(-2.0, 2.0).unwrap();
        let corr = lorentz_mass(domain).correction();
        assert!((corr.value(0.0).unwrap() + 0.25).abs() < 1e-12);
    }

    #[test]
    fn correction_equals_its_ladder_form() {
        // m''/(8m^2) - 7m'^2/(32m^3) must equal -(wt/4)(2 a a'' + a'^2)
        // under a = 1/sqrt(2 wt m).
        let p = SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        let domain = Interval::new(-2.0, 2.0).unwrap();
        let profile = lorentz_mass(domain);
        let a = a_from_mass(&profile, &p).unwrap();
        let ap = a.derivative();
        let app = ap.derivative();
        let wt = p.omega_tilde();
        let ladder =
            (a.clone() * app.scale(2.0) + ap.clone() * ap).scale(-wt / 4.0);
        let corr = profile.correction();
        for &x in &[-1.5, -0.3, 0.0, 0.8, 1.9] {
            let lhs = corr.value(x).unwrap();
            let rhs = ladder.value(x).unwrap();
            assert!((lhs - rhs).abs() < 1e-11, "at {x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn constant_mass_operator_is_the_shifted_harmonic_oscillator() {
        let p = SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        let domain = Interval::new(-2.0, 2.0).unwrap();
        let profile = MassProfile::new(f("1"), domain).unwrap();
        let cv = ChangeOfVariable::new(&profile, 0.0).unwrap();
        let model = pdm_hamiltonian(&p, &profile, &cv, 0.0).unwrap();
        let c = p.constants();
        // V = (Omega^2/2) x^2 + sqrt(wt/2) a2 x + lambda, kinetic -1/2 d^2.
        for &x in &[-1.0, 0.0, 0.5, 1.5] {
            let expect = 0.5 * c.big_omega_sq * x * x
                + (c.omega_tilde / 2.0).sqrt() * c.a2 * x
                + c.lambda;
            let got = model.potential().value(x).unwrap();
            assert!((got - expect).abs() < 1e-9, "potential at {x}: {got} vs {expect}");
        }
        assert!(model.equivalence_deviation() < 1e-9);
    }

    #[test]
    fn variable_mass_operator_matches_the_gauge_route() {
        let p = SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0).unwrap();
        let domain = Interval::new(-2.0, 2.0).unwrap();
        let profile = lorentz_mass(domain);
        let cv = ChangeOfVariable::new(&profile, 0.0).unwrap();
        let model = pdm_hamiltonian(&p, &profile, &cv, 0.0).unwrap();
        assert!(
            model.equivalence_deviation() < 1e-9,
            "deviation {}",
            model.equivalence_deviation()
        );
    }

    #[test]
    fn nonpositive_mass_is_rejected() {
        let domain = Interval::new(-2.0, 2.0).unwrap();
        assert!(MassProfile::new(f("x"), domain).is_err());
        assert!(MassProfile::new(f("1-x^2"), domain).is_err());
    }
}
