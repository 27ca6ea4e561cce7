//! JSON model configuration: one self-describing file per experiment.
//!
//! Field names are part of the interface and never change. Expression
//! values (`a_expr`, `m_expr`, `B0_expr`, `B2_expr`) are DSL strings over
//! `x` for profile functions and over `u` for the transformed-variable
//! ansatz. Exactly one of `a_expr` and `m_expr` must be present; the other
//! profile is derived through the mass map.
//!
//! Loading reports JSON syntax errors with line and column, and every
//! validation error names the offending field.

use serde::Deserialize;
use std::fs;
use std::path::Path;

use swankit_core::opalg::FirstOrderOp;
use swankit_core::pdm::{
    a_from_mass, b_constant_commutator, mass_from_a, ChangeOfVariable, MassProfile,
};
use swankit_core::spectral::Grid;
use swankit_core::swanson::SwansonParams;
use swankit_core::typea::{FClass, GeneralizedAnsatz, TypeAData};
use swankit_core::{Func, Interval, Tol, Var};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub params: Params,
    #[serde(default)]
    pub a_expr: Option<String>,
    #[serde(default)]
    pub m_expr: Option<String>,
    #[serde(default)]
    pub b_mode: Option<BMode>,
    #[serde(default, rename = "B0_expr")]
    pub b0_expr: Option<String>,
    #[serde(default, rename = "B2_expr")]
    pub b2_expr: Option<String>,
    pub domain: DomainSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub typea: Option<TypeASpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// How the ladder coefficient `b(x)` is built from the profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BMode {
    /// `b = integral dx/(2a) + a'/2`, making `[eta, eta*] = 1`.
    ConstantCommutator,
    /// `b = B0(u) + B2(u) a'` from the `B0_expr`/`B2_expr` fields.
    Generalized,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub x_min: f64,
    pub x_max: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Node count of the discretization grid, endpoints included.
    pub n: usize,
}

/// Sector data for the type-A commands.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeASpec {
    #[serde(rename = "N")]
    pub n: u32,
    /// Coefficients of the sector polynomial, constant term first.
    #[serde(rename = "Q")]
    pub q: [f64; 3],
    #[serde(rename = "R")]
    pub r: f64,
    /// Characteristic-function class: "I", "II", "III", or "IV".
    pub f_class: String,
    /// Frequency parameter; required for classes III and IV.
    #[serde(default)]
    pub nu: Option<f64>,
}

/// Check tolerances. Absent fields fall back to defaults; present fields
/// must be positive.
#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default)]
    pub abs: Option<f64>,
    #[serde(default)]
    pub rel: Option<f64>,
}

impl Tolerances {
    pub fn resolve(&self) -> Tol {
        Tol {
            abs: self.abs.unwrap_or(1e-10),
            rel: self.rel.unwrap_or(1e-10),
        }
    }
}

fn bad(msg: String) -> CliError {
    CliError::Config(msg)
}

/// Read and parse a config file. Syntax errors come back with the line and
/// column; schema errors (unknown or missing fields) name the field.
pub fn load(path: &Path) -> CliResult<ModelConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| bad(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: ModelConfig = serde_json::from_str(&text)
        .map_err(|e| bad(format!("config {}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ModelConfig {
    /// Field-level consistency checks, run once at load time.
    pub fn validate(&self) -> CliResult<()> {
        match (&self.a_expr, &self.m_expr) {
            (Some(_), Some(_)) => {
                return Err(bad(
                    "set exactly one of `a_expr` and `m_expr`; this config has both".into(),
                ));
            }
            (None, None) => {
                return Err(bad(
                    "set exactly one of `a_expr` and `m_expr`; this config has neither".into(),
                ));
            }
            _ => {}
        }
        if self.b_mode == Some(BMode::Generalized) && self.b0_expr.is_none() {
            return Err(bad(
                "`b_mode` is \"generalized\" but `B0_expr` is missing".into(),
            ));
        }
        let d = &self.domain;
        if !(d.x_min.is_finite() && d.x_max.is_finite() && d.x_min < d.x_max) {
            return Err(bad(format!(
                "`domain` needs finite x_min < x_max, got [{}, {}]",
                d.x_min, d.x_max
            )));
        }
        if self.grid.n < 3 {
            return Err(bad(format!(
                "`grid.n` must be at least 3, got {}",
                self.grid.n
            )));
        }
        for (name, value) in [
            ("tolerances.abs", self.tolerances.abs),
            ("tolerances.rel", self.tolerances.rel),
        ] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(bad(format!("`{name}` must be positive, got {v}")));
                }
            }
        }
        if let Some(t) = &self.typea {
            t.f_class()?;
        }
        Ok(())
    }

    pub fn swanson_params(&self) -> CliResult<SwansonParams> {
        let p = &self.params;
        SwansonParams::new(p.omega, p.alpha, p.beta, p.gamma, p.delta)
            .map_err(|e| bad(format!("`params`: {e}")))
    }

    pub fn interval(&self) -> CliResult<Interval> {
        Interval::new(self.domain.x_min, self.domain.x_max).map_err(|e| bad(format!("`domain`: {e}")))
    }

    pub fn grid(&self) -> CliResult<Grid> {
        Grid::new(self.domain.x_min, self.domain.x_max, self.grid.n)
            .map_err(|e| bad(format!("`grid`: {e}")))
    }

    /// Config tolerances, with an optional command-line override that wins
    /// over both components.
    pub fn tol(&self, override_tol: Option<f64>) -> Tol {
        match override_tol {
            Some(t) => Tol::of(t),
            None => self.tolerances.resolve(),
        }
    }

    /// Anchor for the integrals defining `u(x)` and `b(x)`: the origin when
    /// the domain contains it, the midpoint otherwise.
    pub fn anchor(&self) -> f64 {
        let iv = Interval::new(self.domain.x_min, self.domain.x_max);
        match iv {
            Ok(iv) if iv.contains(0.0) => 0.0,
            Ok(iv) => iv.mid(),
            Err(_) => self.domain.x_min,
        }
    }

    pub fn typea_data(&self) -> CliResult<TypeAData> {
        let t = self
            .typea
            .as_ref()
            .ok_or_else(|| bad("this command needs the `typea` config section".into()))?;
        let class = t.f_class()?;
        let nu = match (class.needs_nu(), t.nu) {
            (true, None) => {
                return Err(bad(format!(
                    "`typea.nu` is required for f_class {}",
                    t.f_class
                )));
            }
            (_, Some(v)) => v,
            (false, None) => 1.0,
        };
        TypeAData::new(t.n, t.q, t.r, class, nu).map_err(|e| bad(format!("`typea`: {e}")))
    }

    /// The transformed-variable ansatz from `B0_expr` and `B2_expr`;
    /// `B2` defaults to the constant 1/2.
    pub fn ansatz(&self) -> CliResult<GeneralizedAnsatz> {
        let b0_text = self
            .b0_expr
            .as_ref()
            .ok_or_else(|| bad("this command needs the `B0_expr` config field".into()))?;
        let b0 = Func::parse(b0_text, Var::U).map_err(|e| bad(format!("`B0_expr`: {e}")))?;
        let ansatz = match &self.b2_expr {
            Some(text) => {
                let b2 = Func::parse(text, Var::U).map_err(|e| bad(format!("`B2_expr`: {e}")))?;
                GeneralizedAnsatz::new(b0, b2)
            }
            None => GeneralizedAnsatz::with_half_b2(b0),
        };
        ansatz.map_err(|e| bad(format!("`B0_expr`/`B2_expr`: {e}")))
    }

    /// Assemble the ladder model: both profiles, the change of variable,
    /// and `eta` with `b` built per `b_mode`.
    pub fn build_model(&self) -> CliResult<BuiltModel> {
        let params = self.swanson_params()?;
        let domain = self.interval()?;
        let x0 = self.anchor();

        let (a, profile) = if let Some(text) = &self.a_expr {
            let a = Func::parse(text, Var::X).map_err(|e| bad(format!("`a_expr`: {e}")))?;
            let profile =
                mass_from_a(&a, &params, domain).map_err(|e| bad(format!("`a_expr`: {e}")))?;
            (a, profile)
        } else {
            let text = self.m_expr.as_ref().expect("validate ensures one profile");
            let m = Func::parse(text, Var::X).map_err(|e| bad(format!("`m_expr`: {e}")))?;
            let profile =
                MassProfile::new(m, domain).map_err(|e| bad(format!("`m_expr`: {e}")))?;
            let a = a_from_mass(&profile, &params)?;
            (a, profile)
        };

        let cv = ChangeOfVariable::new(&profile, x0)?;
        let b = match self.b_mode.unwrap_or(BMode::ConstantCommutator) {
            BMode::ConstantCommutator => b_constant_commutator(&a, x0),
            BMode::Generalized => self.ansatz()?.b_of_x(&a, &cv),
        };
        let eta = FirstOrderOp::new(a.clone(), b)?;

        Ok(BuiltModel {
            params,
            domain,
            x0,
            a,
            profile,
            cv,
            eta,
        })
    }
}

impl TypeASpec {
    pub fn f_class(&self) -> CliResult<FClass> {
        match self.f_class.as_str() {
            "I" => Ok(FClass::I),
            "II" => Ok(FClass::II),
            "III" => Ok(FClass::III),
            "IV" => Ok(FClass::IV),
            "V" => Err(bad(
                "`typea.f_class`: class V (elliptic) is not supported; \
                 choose I, II, III, or IV"
                    .into(),
            )),
            other => Err(bad(format!(
                "`typea.f_class`: unknown class \"{other}\"; choose I, II, III, or IV"
            ))),
        }
    }
}

/// Everything the per-model commands need, built once from a config.
pub struct BuiltModel {
    pub params: SwansonParams,
    pub domain: Interval,
    pub x0: f64,
    pub a: Func,
    pub profile: MassProfile,
    pub cv: ChangeOfVariable,
    pub eta: FirstOrderOp,
}
