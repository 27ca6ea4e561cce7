//! The acceptance suite behind `swankit verify`: ten numbered checks with
//! fixed tolerances, each summarized in a single pass/fail line.
//!
//! The checks exercise the full toolkit end to end. Operator expansion
//! against closed forms, the gauge transformation, the constant-commutator
//! and PDM branches, a grid spectrum against the completed-square formula,
//! the structure-function reduction, sector invariance for every
//! characteristic-function class, the Riccati substitution chain, and the
//! scaling maps. Tolerances are stated next to every number and never
//! loosened at runtime; a stated runtime budget is part of the check.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::time::Instant;

use swankit_core::hermitize::{effective_potential_closed_form, hermitize_swanson};
use swankit_core::opalg::FirstOrderOp;
use swankit_core::pdm::{
    a_from_mass, b_constant_commutator, pdm_hamiltonian, ChangeOfVariable, MassProfile,
};
use swankit_core::spectral::{isospectral_report, solve_spectrum, Grid};
use swankit_core::swanson::{build_hamiltonian, hamiltonian_closed_form, SwansonParams};
use swankit_core::typea::{
    absorb_scaling, f_functions, find_invariant_sector, generalized_commutator_check,
    sector_solutions, solve_nfold_b0, typea_potential, FClass, GeneralizedAnsatz,
    SchrodingerReduction, SectorSign, TypeAData,
};
use swankit_core::{Bindings, Func, Interval, ScalarExpr, Tol, Var};

use crate::parallel::{self, Job};

/// Outcome of one acceptance check.
#[derive(Debug, Clone)]
pub struct Criterion {
    pub index: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

pub const COUNT: usize = 10;

const NAMES: [&str; COUNT] = [
    "expansion identity",
    "hermitization",
    "constant-commutator branch",
    "PDM equivalence",
    "constant-mass spectrum",
    "structure-function reduction",
    "generalized commutator",
    "quasi-solvable sectors",
    "Riccati chain",
    "sector scaling",
];

/// Wall-clock budgets, where one is part of the contract.
const BUDGETS: [Option<f64>; COUNT] = [
    Some(5.0),
    None,
    None,
    None,
    Some(20.0),
    None,
    None,
    Some(30.0),
    None,
    None,
];

/// Run one criterion by 1-based index.
pub fn run(index: usize) -> Criterion {
    assert!((1..=COUNT).contains(&index), "criterion index out of range");
    let name = NAMES[index - 1];
    let start = Instant::now();
    let outcome = match index {
        1 => expansion_identity(),
        2 => hermitization(),
        3 => constant_commutator_branch(),
        4 => pdm_equivalence(),
        5 => constant_mass_spectrum(),
        6 => structure_function_reduction(),
        7 => generalized_commutator(),
        8 => quasi_solvable_sectors(),
        9 => riccati_chain(),
        _ => sector_scaling(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let (mut pass, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(budget) = BUDGETS[index - 1] {
        if seconds > budget {
            pass = false;
            detail = format!("{detail}; ran {seconds:.1}s, over the {budget:.0}s budget");
        }
    }
    Criterion { index, name, pass, detail, seconds }
}

/// Run the whole suite in order.
pub fn run_all() -> Vec<Criterion> {
    (1..=COUNT).map(run).collect()
}

pub fn render_line(c: &Criterion) -> String {
    let status = if c.pass { "pass" } else { "FAIL" };
    format!(
        "criterion {:2} {status}  {}: {} [{:.2}s]",
        c.index, c.name, c.detail, c.seconds
    )
}

fn lift<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn parse_u(text: &str) -> Result<Func, String> {
    lift(Func::parse(text, Var::U))
}

fn parse_x(text: &str) -> Result<Func, String> {
    lift(Func::parse(text, Var::X))
}

fn sup_on(f: &Func, xs: &[f64]) -> Result<f64, String> {
    let vals = lift(f.eval_on(xs))?;
    Ok(vals.iter().fold(0.0f64, |m, v| m.max(v.abs())))
}

fn sup_diff(f: &Func, g: &Func, xs: &[f64]) -> Result<f64, String> {
    let a = lift(f.eval_on(xs))?;
    let b = lift(g.eval_on(xs))?;
    Ok(a.iter().zip(&b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())))
}

fn reference_params() -> Result<SwansonParams, String> {
    lift(SwansonParams::new(2.0, 0.5, 0.25, 1.0, 0.0))
}

/// Sup-norm distance of `[eta, eta*]` from the identity over `xs`.
fn unity_commutator_deviation(eta: &FirstOrderOp, xs: &[f64]) -> Result<f64, String> {
    let comm = lift(eta.to_diff_op().commutator(&eta.adjoint().to_diff_op()))?;
    let zeroth = lift(comm.coeff(0).eval_on(xs))?;
    let mut worst = zeroth.iter().fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
    for k in 1..=comm.order() {
        worst = worst.max(sup_on(&comm.coeff(k), xs)?);
    }
    Ok(worst)
}

/// The effective potential written solely in `a(x)` for the unity-commutator
/// branch: `a1 I^2 + a2 I - (wt/4)(2 a a'' + a'^2) + lambda` with
/// `I = integral dx/(2a)` anchored where `b` is.
fn a_only_potential(p: &SwansonParams, a: &Func, anchor: f64) -> Func {
    let c = *p.constants();
    let var = a.var();
    let integrand = Func::constant(var, 1.0) / a.clone().scale(2.0);
    let i = Func::antiderivative(integrand, anchor, 1e-12);
    (i.clone() * i.clone()).scale(c.a1)
        + i.scale(c.a2)
        + (a.clone() * a.derivative_n(2)).scale(-c.omega_tilde / 2.0)
        + (a.derivative() * a.derivative()).scale(-c.omega_tilde / 4.0)
        + Func::constant(var, c.lambda)
}

/// 1. Operator expansion of the Hamiltonian matches the closed-form
///    coefficients for random parameters and profiles.
fn expansion_identity() -> Result<String, String> {
    let interval = lift(Interval::new(-1.5, 1.5))?;
    let mut rng = StdRng::seed_from_u64(42);
    let a_shapes = [
        "1 + c*x^2/8",
        "1/sqrt(1 + c*x^2/4)",
        "exp(c*x/6)",
        "1 + x^2/10 + c*x/8",
    ];
    let b_shapes = ["c*x", "sin(c*x)/2", "c*x/(1 + x^2)", "c/2 + x/3"];

    let mut worst = 0.0f64;
    for draw in 0..20 {
        let p = loop {
            let candidate = SwansonParams::new(
                rng.gen_range(0.8..3.0),
                rng.gen_range(-0.4..0.6),
                rng.gen_range(-0.4..0.6),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if let Ok(p) = candidate {
                break p;
            }
        };
        let bind = Bindings::new().with("c", rng.gen_range(0.2..1.0));
        let a_expr = lift(ScalarExpr::parse(a_shapes[draw % a_shapes.len()], Var::X))?;
        let b_expr = lift(ScalarExpr::parse(b_shapes[(draw / 4) % b_shapes.len()], Var::X))?;
        let a = Func::from_expr(a_expr, Var::X, bind.clone());
        let b = Func::from_expr(b_expr, Var::X, bind);
        let eta = lift(FirstOrderOp::new(a, b))?;

        let expanded = lift(build_hamiltonian(&p, &eta))?;
        let closed = hamiltonian_closed_form(&p, &eta);
        worst = worst.max(lift(expanded.max_deviation(&closed, interval, 101))?);
    }

    if worst <= 1e-10 {
        Ok(format!(
            "20 random draws, worst coefficient deviation {worst:.1e} (tol 1e-10, 101 points)"
        ))
    } else {
        Err(format!(
            "worst coefficient deviation {worst:.1e} exceeds 1e-10"
        ))
    }
}

/// 2. The gauge transformation produces a divergence-form operator: no
///    first-order term, self-adjoint, zeroth order equal to the closed form.
fn hermitization() -> Result<String, String> {
    let interval = lift(Interval::new(-1.2, 1.2))?;
    let tol = Tol::of(1e-10);

    let p_ref = reference_params()?;
    let mut cases: Vec<(SwansonParams, FirstOrderOp)> = Vec::new();

    let a = Func::constant(Var::X, 1.0);
    let b = b_constant_commutator(&a, 0.0);
    cases.push((p_ref.clone(), lift(FirstOrderOp::new(a, b))?));

    let profile = lift(MassProfile::new(parse_x("1/(1+x^2)")?, interval))?;
    let a = lift(a_from_mass(&profile, &p_ref))?;
    let b = b_constant_commutator(&a, 0.0);
    cases.push((p_ref, lift(FirstOrderOp::new(a, b))?));

    let p_free = lift(SwansonParams::new(1.6, 0.3, -0.2, 0.4, -0.5))?;
    let a = parse_x("1/(1 + x^2/4)")?;
    let b = parse_x("x/2 + 1/5")?;
    cases.push((p_free, lift(FirstOrderOp::new(a, b))?));

    let xs = interval.chebyshev(101);
    let mut first_order = 0.0f64;
    let mut adjoint = 0.0f64;
    let mut potential = 0.0f64;
    for (p, eta) in &cases {
        let hm = lift(hermitize_swanson(p, eta, interval, tol))?;
        first_order = first_order.max(hm.first_order_residual());
        let adj = hm.operator().formal_adjoint();
        adjoint = adjoint.max(lift(hm.operator().max_deviation(&adj, interval, 101))?);
        let closed = effective_potential_closed_form(p, eta);
        potential = potential.max(sup_diff(hm.v_eff(), &closed, &xs)?);
    }

    if first_order <= 1e-10 && adjoint <= 1e-10 && potential <= 1e-10 {
        Ok(format!(
            "3 models: first-order sup {first_order:.1e}, adjoint deviation {adjoint:.1e}, \
             potential vs closed form {potential:.1e} (all tol 1e-10)"
        ))
    } else {
        Err(format!(
            "first-order sup {first_order:.1e}, adjoint deviation {adjoint:.1e}, \
             potential deviation {potential:.1e} (tol 1e-10)"
        ))
    }
}

/// 3. The unity-commutator choice of `b` works: the commutator is exactly
///    one and the potential collapses to its `a`-only form.
fn constant_commutator_branch() -> Result<String, String> {
    let p = reference_params()?;
    let domain = lift(Interval::new(-1.5, 1.5))?;
    let xs = domain.chebyshev(101);

    let mut comm_dev = 0.0f64;
    let mut pot_dev = 0.0f64;
    for mass_text in ["1", "1/(1+x^2)"] {
        let profile = lift(MassProfile::new(parse_x(mass_text)?, domain))?;
        let a = lift(a_from_mass(&profile, &p))?;
        let b = b_constant_commutator(&a, 0.0);
        let eta = lift(FirstOrderOp::new(a.clone(), b))?;

        comm_dev = comm_dev.max(unity_commutator_deviation(&eta, &xs)?);
        let general = effective_potential_closed_form(&p, &eta);
        let a_only = a_only_potential(&p, &a, 0.0);
        pot_dev = pot_dev.max(sup_diff(&general, &a_only, &xs)?);
    }

    if comm_dev <= 1e-10 && pot_dev <= 1e-9 {
        Ok(format!(
            "2 masses: |[eta,eta*] - 1| <= {comm_dev:.1e} (tol 1e-10), \
             potential vs a-only form {pot_dev:.1e} (tol 1e-9)"
        ))
    } else {
        Err(format!(
            "commutator deviation {comm_dev:.1e} (tol 1e-10), \
             potential deviation {pot_dev:.1e} (tol 1e-9)"
        ))
    }
}

/// 4. The PDM operator equals the Hermitized ladder operator pointwise.
fn pdm_equivalence() -> Result<String, String> {
    let p = reference_params()?;
    let domain = lift(Interval::new(-1.5, 1.5))?;

    let mut worst = 0.0f64;
    for mass_text in ["1", "1/(1+x^2)"] {
        let profile = lift(MassProfile::new(parse_x(mass_text)?, domain))?;
        let cv = lift(ChangeOfVariable::new(&profile, 0.0))?;
        let model = lift(pdm_hamiltonian(&p, &profile, &cv, 0.0))?;
        worst = worst.max(model.equivalence_deviation());
    }

    if worst <= 1e-9 {
        Ok(format!(
            "m = 1 and m = (1+x^2)^-1: operator deviation {worst:.1e} (tol 1e-9)"
        ))
    } else {
        Err(format!("operator deviation {worst:.1e} exceeds 1e-9"))
    }
}

/// 5. Grid spectrum of the constant-mass model against the completed-square
///    eigenvalue formula, with isospectrality residuals and positivity.
fn constant_mass_spectrum() -> Result<String, String> {
    let p = reference_params()?;
    let domain = lift(Interval::new(-14.0, 14.0))?;
    let profile = lift(MassProfile::new(Func::constant(Var::X, 1.0), domain))?;
    let a = lift(a_from_mass(&profile, &p))?;
    let b = b_constant_commutator(&a, 0.0);
    let eta = lift(FirstOrderOp::new(a, b))?;
    let grid = lift(Grid::new(-14.0, 14.0, 3000))?;

    let rep = lift(isospectral_report(&p, &eta, &grid, 5, false))?;

    let c = *p.constants();
    let big_omega = c.big_omega_sq.sqrt();
    let shift = c.lambda - c.omega_tilde * c.a2 * c.a2 / (4.0 * c.big_omega_sq);
    let mut energy_dev = 0.0f64;
    for (n, &e) in rep.spectrum.eigenvalues().iter().enumerate() {
        energy_dev = energy_dev.max((e - (big_omega * (n as f64 + 0.5) + shift)).abs());
    }
    let residual = rep.residuals.iter().fold(0.0f64, |m, r| m.max(*r));

    if energy_dev <= 1e-4 && residual <= 1e-5 && rep.all_positive {
        Ok(format!(
            "5 eigenvalues within {energy_dev:.1e} of the closed form (tol 1e-4, \
             E0 = {:.6}), mapped-eigenvector residuals <= {residual:.1e} (tol 1e-5), all positive",
            rep.spectrum.eigenvalues()[0]
        ))
    } else {
        Err(format!(
            "energy deviation {energy_dev:.1e} (tol 1e-4), residual {residual:.1e} (tol 1e-5), \
             all positive: {}",
            rep.all_positive
        ))
    }
}

/// 6. With `B2 = 1/2` the structure functions collapse to constants, and
///    with a general ansatz they decompose the effective potential exactly.
fn structure_function_reduction() -> Result<String, String> {
    let p = reference_params()?;
    let wt = p.omega_tilde();
    let u_domain = lift(Interval::new(-3.0, 3.0))?;
    let us = u_domain.chebyshev(101);

    let half = lift(GeneralizedAnsatz::with_half_b2(parse_u("u/3 + sin(u)/5")?))?;
    let f = lift(f_functions(&p, &half))?;
    let f1_sup = sup_on(&f.f1, &us)?;
    let f2_vals = lift(f.f2.eval_on(&us))?;
    let f2_dev = f2_vals.iter().fold(0.0f64, |m, v| m.max((v + wt / 2.0).abs()));
    let f3_vals = lift(f.f3.eval_on(&us))?;
    let f3_dev = f3_vals.iter().fold(0.0f64, |m, v| m.max((v + wt / 4.0).abs()));
    let constants_ok = f1_sup <= 1e-12 && f2_dev <= 1e-12 && f3_dev <= 1e-12;

    let ansatz = lift(GeneralizedAnsatz::new(
        parse_u("u/2 + sin(u)/4")?,
        parse_u("1/2 + u^2/10")?,
    ))?;
    let domain = lift(Interval::new(-1.2, 1.2))?;
    let profile = lift(MassProfile::new(parse_x("1/(1+x^2)")?, domain))?;
    let cv = lift(ChangeOfVariable::new(&profile, 0.0))?;
    let a = lift(a_from_mass(&profile, &p))?;
    let eta = lift(FirstOrderOp::new(a.clone(), ansatz.b_of_x(&a, &cv)))?;

    let v = effective_potential_closed_form(&p, &eta);
    let fg = lift(f_functions(&p, &ansatz))?;
    let u = cv.u().clone();
    let da = a.derivative();
    let reconstructed = Func::compose(fg.f0, u.clone())
        + Func::compose(fg.f1, u.clone()) * da.clone()
        + Func::compose(fg.f2, u.clone()) * a.clone() * a.derivative_n(2)
        + Func::compose(fg.f3, u) * da.clone() * da;
    let decomposition = sup_diff(&v, &reconstructed, &domain.chebyshev(101))?;

    if constants_ok && decomposition <= 1e-9 {
        Ok(format!(
            "half-B2 constants within {:.1e} (tol 1e-12), general decomposition \
             deviation {decomposition:.1e} (tol 1e-9)",
            f1_sup.max(f2_dev).max(f3_dev)
        ))
    } else {
        Err(format!(
            "F1 sup {f1_sup:.1e}, F2 dev {f2_dev:.1e}, F3 dev {f3_dev:.1e} (tol 1e-12); \
             decomposition deviation {decomposition:.1e} (tol 1e-9)"
        ))
    }
}

/// 7. The ladder commutator tracks the ansatz slope, and the linear slope
///    reproduces the unity-commutator branch.
fn generalized_commutator() -> Result<String, String> {
    let p = reference_params()?;
    let domain = lift(Interval::new(-1.5, 1.5))?;
    let xs = domain.chebyshev(101);
    let profile = lift(MassProfile::new(parse_x("1/(1+x^2)")?, domain))?;
    let a = lift(a_from_mass(&profile, &p))?;
    let cv = lift(ChangeOfVariable::new(&profile, 0.0))?;

    let wt = p.omega_tilde();
    let linear = Func::identity(Var::U).scale((wt / 2.0).sqrt());
    let slopes = [linear.clone(), parse_u("sin(u)/2")?, parse_u("u/(1 + u^2)")?];
    let mut tracking = 0.0f64;
    for b0 in &slopes {
        tracking = tracking.max(lift(generalized_commutator_check(&p, &a, b0, &cv, domain))?);
    }

    // The linear slope must collapse to the unity-commutator construction.
    let b_general = lift(GeneralizedAnsatz::with_half_b2(linear))?.b_of_x(&a, &cv);
    let b_constant = b_constant_commutator(&a, 0.0);
    let b_dev = sup_diff(&b_general, &b_constant, &xs)?;
    let eta = lift(FirstOrderOp::new(a.clone(), b_general))?;
    let comm_dev = unity_commutator_deviation(&eta, &xs)?;
    let pot_dev = sup_diff(
        &effective_potential_closed_form(&p, &eta),
        &a_only_potential(&p, &a, 0.0),
        &xs,
    )?;

    if tracking <= 1e-9 && b_dev <= 1e-10 && comm_dev <= 1e-10 && pot_dev <= 1e-9 {
        Ok(format!(
            "3 slopes track the commutator within {tracking:.1e} (tol 1e-9); linear slope \
             reproduces the unity branch: b deviation {b_dev:.1e}, commutator {comm_dev:.1e} \
             (tol 1e-10), potential {pot_dev:.1e} (tol 1e-9)"
        ))
    } else {
        Err(format!(
            "tracking {tracking:.1e} (tol 1e-9), b deviation {b_dev:.1e} (tol 1e-10), \
             commutator {comm_dev:.1e} (tol 1e-10), potential {pot_dev:.1e} (tol 1e-9)"
        ))
    }
}

fn class_one_ladder_job(n: u32) -> Result<(f64, String), String> {
    let data = lift(TypeAData::new(n, [0.0, 1.0, 0.0], 0.0, FClass::I, 1.0))?;
    let fit = lift(find_invariant_sector(&data, 1e-9))?;
    if !fit.converged || fit.remainder > 1e-9 {
        return Err(format!(
            "class I N={n} did not certify: remainder {:.1e} (tol 1e-9)",
            fit.remainder
        ));
    }
    let (sols, _) = lift(sector_solutions(&fit))?;

    if n == 2 {
        let want = [-0.5, 0.5];
        if sols.len() != 2 {
            return Err(format!("class I N=2 produced {} real energies", sols.len()));
        }
        for (s, w) in sols.iter().zip(want) {
            if (s.energy - w).abs() > 1e-9 {
                return Err(format!(
                    "class I N=2 energy {} is not {w} (tol 1e-9)",
                    s.energy
                ));
            }
        }
    }

    // Cross-check every algebraic energy against a grid diagonalization of
    // the sector potential.
    let v = lift(typea_potential(&data, SectorSign::Minus))?;
    let weight = Func::constant(Var::U, 0.5);
    let grid = lift(Grid::new(-8.0, 8.0, 801))?;
    let spectrum = lift(solve_spectrum(&weight, &v, &grid, n as usize + 2, false))?;
    let mut grid_dev = 0.0f64;
    for sol in &sols {
        let nearest = spectrum
            .eigenvalues()
            .iter()
            .fold(f64::INFINITY, |m, e| m.min((e - sol.energy).abs()));
        grid_dev = grid_dev.max(nearest);
    }
    if grid_dev > 1e-3 {
        return Err(format!(
            "class I N={n}: sector energy misses the grid spectrum by {grid_dev:.1e} (tol 1e-3)"
        ));
    }
    Ok((fit.remainder, format!("I N={n} grid dev {grid_dev:.1e}")))
}

fn sector_battery_job(
    class: FClass,
    n: u32,
    q: [f64; 3],
    nu: f64,
    label: &'static str,
) -> Result<(f64, String), String> {
    let data = lift(TypeAData::new(n, q, 0.0, class, nu))?;
    let fit = lift(find_invariant_sector(&data, 1e-9))?;
    if !fit.converged || fit.remainder > 1e-9 {
        return Err(format!(
            "{label} did not certify: remainder {:.1e} (tol 1e-9)",
            fit.remainder
        ));
    }
    Ok((fit.remainder, label.to_string()))
}

/// 8. Subspace invariance certifies across the class list, the N=2 ladder
///    matrix has the hand-computed energies, and the algebraic energies sit
///    in the grid spectrum of the sector potential.
fn quasi_solvable_sectors() -> Result<String, String> {
    let mut jobs: Vec<Job<'static, Result<(f64, String), String>>> = Vec::new();
    for n in [1u32, 2, 4] {
        jobs.push(Box::new(move || class_one_ladder_job(n)));
    }
    let battery: [(FClass, u32, [f64; 3], f64, &'static str); 6] = [
        (FClass::II, 4, [1.0, 0.5, 0.0], 1.0, "II N=4 deg 1"),
        (FClass::II, 3, [0.8, 0.3, 0.15], 1.0, "II N=3 deg 2"),
        (FClass::III, 2, [0.6, 0.4, 0.0], 0.8, "III N=2 deg 1"),
        (FClass::III, 4, [0.5, 1.0, 0.25], 1.5, "III N=4 deg 2"),
        (FClass::IV, 4, [0.5, 1.0, 0.0], 0.6, "IV N=4 deg 1"),
        (FClass::IV, 2, [0.3, 0.8, 0.1], 0.7, "IV N=2 deg 2"),
    ];
    for (class, n, q, nu, label) in battery {
        jobs.push(Box::new(move || sector_battery_job(class, n, q, nu, label)));
    }

    let mut worst = 0.0f64;
    let mut count = 0usize;
    for outcome in parallel::run_all(jobs) {
        let (remainder, _) = outcome?;
        worst = worst.max(remainder);
        count += 1;
    }
    Ok(format!(
        "{count} sector fits certified, worst invariance remainder {worst:.1e} (tol 1e-9); \
         class I ladder energies match hand values (tol 1e-9) and the grid spectrum (tol 1e-3)"
    ))
}

/// 9. The substitution chain solves the sector condition and round-trips.
fn riccati_chain() -> Result<String, String> {
    let p = lift(SwansonParams::new(2.0, 0.0, 0.5, 0.0, 0.0))?;
    let data = lift(TypeAData::new(2, [0.0, 1.0, 0.0], 0.0, FClass::I, 1.0))?;

    let mut residual = 0.0f64;
    let mut ground = None;
    for j in [0usize, 1] {
        let sol = lift(solve_nfold_b0(&p, &data, j))?;
        if sol.residual_sup > 1e-8 {
            return Err(format!(
                "state {j}: condition residual {:.1e} exceeds 1e-8",
                sol.residual_sup
            ));
        }
        residual = residual.max(sol.residual_sup);
        if j == 0 {
            ground = Some(sol);
        }
    }
    let ground = ground.expect("state 0 solved");
    if !ground.poles.is_empty() {
        return Err("ground-state slope unexpectedly has poles".into());
    }

    // Round-trip the pole-free slope through the linearization and back.
    let reduction = lift(SchrodingerReduction::new(&p))?;
    let phi = reduction.phi_from_b0(&ground.b0);
    let psi = reduction.psi_from_phi(&phi, 0.0);
    let psi_hat = reduction.psi_hat_from_psi(&psi);
    let back = reduction.b0_from_psi_hat(&psi_hat);
    let us = ground.tuned.default_domain().chebyshev(61);
    let round_trip = sup_diff(&ground.b0, &back, &us)?;

    if round_trip <= 1e-9 {
        Ok(format!(
            "states 0 and 1 solved with condition residual <= {residual:.1e} (tol 1e-8, \
             poles excluded); substitution round-trip deviation {round_trip:.1e} (tol 1e-9)"
        ))
    } else {
        Err(format!(
            "substitution round-trip deviation {round_trip:.1e} exceeds 1e-9"
        ))
    }
}

/// 10. Scaling is absorbed for linear sector polynomials (checked
///     spectrally) and refused for quadratic ones.
fn sector_scaling() -> Result<String, String> {
    let data = lift(TypeAData::new(1, [0.0, 1.0, 0.0], 0.0, FClass::I, 1.0))?;
    let scaled = lift(absorb_scaling(&data, 4.0, SectorSign::Minus))?;
    if (scaled.energy_scale - 2.0).abs() > 1e-12 {
        return Err(format!(
            "energy scale for r=4 is {}, expected 2",
            scaled.energy_scale
        ));
    }

    // The absorption statement is r V(t) = e V~(s t) + const, so the level
    // gaps of the r-scaled original must be e times the gaps of the
    // representative's potential.
    let weight = Func::constant(Var::U, 0.5);
    let grid = lift(Grid::new(-10.0, 10.0, 801))?;
    let v_big = lift(typea_potential(&data, SectorSign::Minus))?.scale(4.0);
    let v_rep = lift(typea_potential(&scaled.data, SectorSign::Minus))?;
    let e_big = lift(solve_spectrum(&weight, &v_big, &grid, 3, false))?;
    let e_rep = lift(solve_spectrum(&weight, &v_rep, &grid, 3, false))?;

    let mut gap_dev = 0.0f64;
    for i in 0..2 {
        let gap_big = e_big.eigenvalues()[i + 1] - e_big.eigenvalues()[i];
        let gap_rep = e_rep.eigenvalues()[i + 1] - e_rep.eigenvalues()[i];
        gap_dev = gap_dev.max((gap_big - 2.0 * gap_rep).abs());
    }
    if gap_dev > 1e-4 {
        return Err(format!(
            "rescaled level gaps are off by {gap_dev:.1e} from the factor 2 (tol 1e-4)"
        ));
    }

    let quadratic = lift(TypeAData::new(2, [0.0, 0.3, 0.4], 0.0, FClass::I, 1.0))?;
    match absorb_scaling(&quadratic, 2.0, SectorSign::Minus) {
        Ok(_) => Err("degree-2 scaling was accepted; it must be refused".into()),
        Err(e) => {
            let msg = e.to_string();
            if !msg.contains("quasi-solvable") {
                return Err(format!("refusal diagnostic does not explain itself: {msg}"));
            }
            Ok(format!(
                "level gaps doubled within {gap_dev:.1e} (tol 1e-4) under r=4; \
                 degree-2 data refused with a diagnostic"
            ))
        }
    }
}
