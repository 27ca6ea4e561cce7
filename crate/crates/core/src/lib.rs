//! Symbolic-numeric toolkit for generalized Swanson oscillators.
//!
//! The crate builds non-Hermitian oscillator Hamiltonians of the form
//! `H = omega (eta' eta + 1/2) + alpha eta^2 + beta eta'^2 + gamma eta + delta eta'`
//! from a first-order operator `eta = a(x) d/dx + b(x)`, transforms them to
//! equivalent Hermitian Sturm-Liouville and position-dependent-mass (PDM)
//! forms, checks type-A N-fold supersymmetry conditions on the transformed
//! problem, and verifies every algebraic identity pointwise on sample grids.
//!
//! Module map:
//!
//! * [`expr`], [`func`]: exact expression trees, the DSL parser, and
//!   quadrature-backed function objects closed under differentiation.
//! * [`opalg`]: differential-operator algebra with composition, formal
//!   adjoint, commutators, and gauge conjugation.
//! * [`swanson`]: model parameters, derived constants, Hamiltonian assembly.
//! * [`hermitize`]: the similarity transformation to Hermitian form and the
//!   closed-form effective potential.
//! * [`pdm`]: constant-commutator branch, mass profiles, the change of
//!   variable `u(x)`, and the PDM Hamiltonian.
//! * [`typea`]: type-A N-fold SUSY potentials, the generalized ansatz
//!   `b = B0(u) + B2(u) a'`, quasi-solvability machinery.
//! * [`spectral`]: finite-difference discretization, Sturm-sequence
//!   eigensolver, isospectrality reports.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the default `std`
//! feature only switches float math to the platform libm. Everything here is
//! an immutable value after construction and safe to share across threads.

#![cfg_attr(all(not(feature = "std"), not(test)), no_std)]

extern crate alloc;

pub mod error;
pub mod expr;
pub mod func;
pub mod hermitize;
mod linalg;
pub(crate) mod num;
pub mod opalg;
pub mod pdm;
pub mod quad;
pub mod spectral;
pub mod swanson;
pub mod typea;

pub use error::{Error, Result};
pub use expr::{Bindings, ScalarExpr, Var};
pub use func::Func;

use alloc::vec::Vec;

/// Pointwise comparison tolerance: `|x - y| <= abs + rel * max(|x|, |y|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tol {
    fn default() -> Self {
        Tol { abs: 1e-10, rel: 1e-10 }
    }
}

impl Tol {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Tol { abs, rel }
    }

    /// Uniform absolute-and-relative tolerance.
    pub const fn of(eps: f64) -> Self {
        Tol { abs: eps, rel: eps }
    }

    pub fn admits(&self, x: f64, y: f64) -> bool {
        let scale = num::abs(x).max(num::abs(y));
        num::abs(x - y) <= self.abs + self.rel * scale
    }
}

/// Closed interval on the real line.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(alloc::format!(
                "interval bounds must be finite with lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Chebyshev-Lobatto sample points, sorted ascending. Clusters samples
    /// near the endpoints, where identity violations tend to show first.
    pub fn chebyshev(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let (m, h) = (self.mid(), 0.5 * self.length());
        (0..n)
            .map(|j| {
                let theta = core::f64::consts::PI * j as f64 / (n - 1) as f64;
                m - h * num::cos(theta)
            })
            .collect()
    }

    /// Uniformly spaced sample points including both endpoints.
    pub fn uniform(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        let h = self.length() / (n - 1) as f64;
        (0..n).map(|j| self.lo + h * j as f64).collect()
    }
}

/// Number of sample points used by default for pointwise identity checks.
pub const DEFAULT_SAMPLES: usize = 101;
