//! Subcommand implementations, kept free of terminal concerns so the
//! integration tests can call them directly. Each returns a [`Report`] of
//! tolerance-stamped checks plus the table the command emits; the binary
//! decides where both go.

use serde_json::json;

use swankit_core::hermitize::{effective_potential_closed_form, hermitize_swanson};
use swankit_core::pdm::pdm_hamiltonian;
use swankit_core::spectral::{isospectral_report, Grid};
use swankit_core::typea::{
    f_functions, find_invariant_sector, nfold_condition_residual, sector_solutions,
    solve_nfold_b0, verify_necessary_condition, SectorSign,
};
use swankit_core::DEFAULT_SAMPLES;

use crate::config::{BMode, ModelConfig};
use crate::report::{Check, Report, Table};
use crate::{CliError, CliResult};

fn sign_name(sign: SectorSign) -> &'static str {
    match sign {
        SectorSign::Minus => "minus",
        SectorSign::Plus => "plus",
    }
}

/// Gauge-transform the configured model and tabulate the effective
/// potential and the gauge log-derivative.
pub fn hermitize(
    cfg: &ModelConfig,
    samples: usize,
    tol_override: Option<f64>,
) -> CliResult<(Report, Table)> {
    let model = cfg.build_model()?;
    let tol = cfg.tol(tol_override);
    let hm = hermitize_swanson(&model.params, &model.eta, model.domain, tol)?;

    let mut report = Report::new("hermitize");
    report.check(Check::sup(
        "first_order_sup",
        hm.first_order_residual(),
        tol.abs,
    ));
    let adjoint_dev = hm.operator().max_deviation(
        &hm.operator().formal_adjoint(),
        model.domain,
        DEFAULT_SAMPLES,
    )?;
    report.check(Check::sup("formal_adjoint_deviation", adjoint_dev, tol.abs));

    let closed = effective_potential_closed_form(&model.params, &model.eta);
    let xs_check = model.domain.chebyshev(DEFAULT_SAMPLES);
    let got = hm.v_eff().eval_on(&xs_check)?;
    let want = closed.eval_on(&xs_check)?;
    let potential_dev = got
        .iter()
        .zip(&want)
        .fold(0.0f64, |m, (g, w)| m.max((g - w).abs()));
    report.check(Check::sup(
        "closed_form_potential_deviation",
        potential_dev,
        tol.abs,
    ));

    let xs = model.domain.uniform(samples.max(2));
    let v = hm.v_eff().eval_on(&xs)?;
    let s = hm.sigma().eval_on(&xs)?;
    let mut table = Table::new(vec!["x", "V_eff", "sigma"]);
    for ((x, v), s) in xs.iter().zip(&v).zip(&s) {
        table.push(vec![*x, *v, *s]);
    }
    Ok((report, table))
}

/// Emit the position-dependent-mass form: the mass profile, the transformed
/// coordinate, and the PDM potential, cross-checked against the gauge route.
pub fn pdm(
    cfg: &ModelConfig,
    samples: usize,
    tol_override: Option<f64>,
) -> CliResult<(Report, Table)> {
    let model = cfg.build_model()?;
    let pdm = pdm_hamiltonian(&model.params, &model.profile, &model.cv, model.x0)?;

    let mut report = Report::new("pdm");
    let tol = tol_override.unwrap_or(1e-9);
    report.check(Check::sup(
        "ladder_route_deviation",
        pdm.equivalence_deviation(),
        tol,
    ));
    if cfg.b_mode == Some(BMode::Generalized) {
        report.note("the PDM form fixes b to the constant-commutator choice; b_mode was ignored");
    }

    let xs = model.domain.uniform(samples.max(2));
    let m = model.profile.mass().eval_on(&xs)?;
    let u = model.cv.u().eval_on(&xs)?;
    let v = pdm.potential().eval_on(&xs)?;
    let mut table = Table::new(vec!["x", "m", "u", "V"]);
    for i in 0..xs.len() {
        table.push(vec![xs[i], m[i], u[i], v[i]]);
    }
    Ok((report, table))
}

/// Check the reduction conditions for the configured ansatz, the sector
/// condition residual, and the subspace-invariance fit.
pub fn typea_check(
    cfg: &ModelConfig,
    samples: usize,
    tol_override: Option<f64>,
) -> CliResult<(Report, Option<Table>)> {
    let p = cfg.swanson_params()?;
    let data = cfg.typea_data()?;
    let ansatz = cfg.ansatz()?;
    let domain = data.default_domain();

    let mut report = Report::new("typea-check");

    let condition_tol = tol_override.unwrap_or(1e-10);
    let f = f_functions(&p, &ansatz)?;
    let nc = verify_necessary_condition(&f, p.omega_tilde(), domain, condition_tol)?;
    report.check(Check::sup("reduction_f1_sup", nc.f1_sup, condition_tol));
    report.check(Check::sup("reduction_f2_deviation", nc.f2_sup, condition_tol));
    report.check(Check::sup("reduction_f3_deviation", nc.f3_sup, condition_tol));

    let fit_tol = tol_override.unwrap_or(1e-9);
    let fit = find_invariant_sector(&data, fit_tol)?;
    report.check(Check::sup("invariance_remainder", fit.remainder, fit_tol));

    let us = domain.chebyshev(samples.max(2));
    let (_, residual) = nfold_condition_residual(&p, ansatz.b0(), &data, fit.sign, &us)?;
    report.check(Check::sup(
        "condition_residual_sup",
        residual,
        tol_override.unwrap_or(1e-8),
    ));

    let n = data.n() as usize;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| fit.matrix[(i, j)]).collect())
        .collect();
    report.extra("sector_sign", json!(sign_name(fit.sign)));
    report.extra("closure_constant", json!(fit.c));
    report.extra("invariance_matrix", json!(rows));
    if fit.converged {
        match sector_solutions(&fit) {
            Ok((sols, complex_skipped)) => {
                let energies: Vec<f64> = sols.iter().map(|s| s.energy).collect();
                report.extra("sector_energies", json!(energies));
                report.extra("complex_skipped", json!(complex_skipped));
            }
            Err(e) => report.note(format!("sector energies unavailable: {e}")),
        }
    } else {
        report.note("invariance fit did not certify; the matrix shown is the best candidate");
    }

    Ok((report, None))
}

/// Solve the sector condition for the ansatz slope through one sector state
/// and tabulate it.
pub fn riccati(
    cfg: &ModelConfig,
    state: usize,
    samples: usize,
    tol_override: Option<f64>,
) -> CliResult<(Report, Table)> {
    let p = cfg.swanson_params()?;
    let data = cfg.typea_data()?;
    let sol = solve_nfold_b0(&p, &data, state)?;

    let mut report = Report::new("riccati");
    report.check(Check::sup(
        "condition_residual_sup",
        sol.residual_sup,
        tol_override.unwrap_or(1e-8),
    ));
    report.extra("state", json!(state));
    report.extra("energy", json!(sol.energy));
    report.extra("tuned_R", json!(sol.tuned.r()));
    report.extra("sector_sign", json!(sign_name(sol.sign)));
    report.extra("polynomial", json!(sol.poly));
    report.extra("poles", json!(sol.poles));
    if sol.complex_skipped > 0 {
        report.note(format!(
            "{} sector eigenvalues were complex and skipped",
            sol.complex_skipped
        ));
    }

    let domain = sol.tuned.default_domain();
    let guard = 0.02 * domain.length();
    let mut table = Table::new(vec!["u", "B0"]);
    for u in domain.uniform(samples.max(2)) {
        if sol.poles.iter().any(|pole| (u - pole).abs() <= guard) {
            continue;
        }
        table.push(vec![u, sol.b0.value(u)?]);
    }
    if !sol.poles.is_empty() {
        report.note(format!(
            "B0 has poles at the zeros of the sector polynomial; rows within {guard:.3} of one are omitted"
        ));
    }
    Ok((report, table))
}

/// Eigenvalues of the Hermitized model plus the residuals certifying that
/// the original non-Hermitian operator shares them.
pub fn spectrum(
    cfg: &ModelConfig,
    k: usize,
    grid_override: Option<(f64, f64, usize)>,
    tol_override: Option<f64>,
) -> CliResult<(Report, Table)> {
    let model = cfg.build_model()?;
    let grid = match grid_override {
        Some((lo, hi, n)) => {
            Grid::new(lo, hi, n).map_err(|e| CliError::Config(format!("`--grid`: {e}")))?
        }
        None => cfg.grid()?,
    };
    let k = k.max(1);
    let rep = isospectral_report(&model.params, &model.eta, &grid, k, true)?;

    let mut report = Report::new("spectrum");
    let residual_tol = tol_override.unwrap_or(1e-4);
    let worst = rep.residuals.iter().fold(0.0f64, |m, r| m.max(*r));
    report.check(Check::sup("eigenvector_residual_max", worst, residual_tol));
    report.extra("eigenvalues", json!(rep.spectrum.eigenvalues()));
    report.extra("grid", json!({ "x_min": grid.x_min(), "x_max": grid.x_max(), "n": grid.len() }));
    if rep.all_positive {
        report.note("all reported eigenvalues are positive");
    } else {
        report.note("some reported eigenvalues are not positive");
    }
    if let Some(drift) = rep.domain_drift {
        if drift >= 1e-6 {
            report.note(format!(
                "warning: eigenvalues moved {drift:.2e} under a 1.5x domain stretch; \
                 the Dirichlet walls may be too close"
            ));
        } else {
            report.note(format!(
                "domain check: eigenvalues moved {drift:.2e} under a 1.5x stretch (< 1e-6)"
            ));
        }
    }

    let mut table = Table::new(vec!["n", "energy", "error_estimate", "residual"]);
    for (i, &e) in rep.spectrum.eigenvalues().iter().enumerate() {
        table.push(vec![
            i as f64,
            e,
            rep.spectrum.error_estimate()[i],
            rep.residuals[i],
        ]);
    }
    Ok((report, table))
}
