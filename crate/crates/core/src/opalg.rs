//! Linear differential operators in one variable.
//!
//! An operator is stored in normal form, coefficients to the left of the
//! derivatives:
//!
//! ```text
//!     A = c_K(x) d^K + ... + c_1(x) d + c_0(x)
//! ```
//!
//! Divergence forms like -d a^2 d are expanded into this shape on
//! construction. Composition is the Leibniz expansion, the formal adjoint is
//! the real L2 adjoint (c_k d^k)* = (-1)^k d^k c_k, and gauge conjugation
//! substitutes d -> d - s without ever constructing the similarity factor
//! itself, only its logarithmic derivative s is needed.
//!
//! Operator equality is deliberately pointwise, coefficient against
//! coefficient on a sample set, rather than structural: two coefficient
//! trees that print differently but agree as functions are the same
//! operator.

use crate::error::{Error, Result};
use crate::expr::{Bindings, ScalarExpr, Var};
use crate::func::Func;
use crate::num;
use crate::{Interval, Tol, DEFAULT_SAMPLES};
use alloc::vec;
use alloc::vec::Vec;

/// A linear differential operator with function coefficients.
#[derive(Clone, Debug)]
pub struct DiffOp {
    var: Var,
    /// `coeffs[k]` multiplies the k-th derivative.
    coeffs: Vec<Func>,
}

impl DiffOp {
    /// Build from a coefficient list, lowest order first. Trailing literal
    /// zeros are trimmed so the leading coefficient of a nonzero operator is
    /// never the zero function.
    pub fn new(var: Var, mut coeffs: Vec<Func>) -> Self {
        for c in &coeffs {
            assert_eq!(c.var(), var, "coefficient variable mismatch");
        }
        while coeffs.len() > 1 && coeffs.last().is_some_and(Func::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Func::constant(var, 0.0));
        }
        DiffOp { var, coeffs }
    }

    pub fn from_exprs(var: Var, exprs: Vec<ScalarExpr>, bindings: &Bindings) -> Self {
        let coeffs = exprs
            .into_iter()
            .map(|e| Func::from_expr(e, var, bindings.clone()))
            .collect();
        DiffOp::new(var, coeffs)
    }

    /// The zero operator.
    pub fn zero(var: Var) -> Self {
        DiffOp::new(var, vec![Func::constant(var, 0.0)])
    }

    /// Multiplication by a function, as an order-zero operator.
    pub fn multiplication(f: Func) -> Self {
        let var = f.var();
        DiffOp::new(var, vec![f])
    }

    /// The derivative operator d/d(var).
    pub fn derivative(var: Var) -> Self {
        DiffOp::new(var, vec![Func::constant(var, 0.0), Func::constant(var, 1.0)])
    }

    /// The exact expansion of `-d w d`, the divergence-form second-order
    /// operator with weight `w`: `-w d^2 - w' d`.
    pub fn divergence_form(w: Func) -> Self {
        let var = w.var();
        DiffOp::new(
            var,
            vec![Func::constant(var, 0.0), -w.derivative(), -w],
        )
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// Operator order (degree in d). The zero operator reports order 0.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of the k-th derivative; literal zero beyond the order.
    pub fn coeff(&self, k: usize) -> Func {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| Func::constant(self.var, 0.0))
    }

    pub fn coeffs(&self) -> &[Func] {
        &self.coeffs
    }

    fn check_var(&self, other: &DiffOp) -> Result<()> {
        if self.var == other.var {
            Ok(())
        } else {
            Err(Error::VariableMismatch { expected: self.var, found: other.var })
        }
    }

    /// Operator composition `self . rhs` by the Leibniz rule:
    /// `d^i (b f) = sum_k C(i,k) b^(i-k) f^(k)`.
    pub fn compose(&self, rhs: &DiffOp) -> Result<DiffOp> {
        self.check_var(rhs)?;
        let var = self.var;
        let n = self.order() + rhs.order() + 1;
        let mut out = vec![Func::constant(var, 0.0); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                // a d^i applied past b d^j: derivatives of b distribute.
                let mut b_deriv = b.clone();
                for k in (0..=i).rev() {
                    // term a * C(i,k) * b^((i-k)) at order k + j
                    let c = binomial(i, k);
                    let term = a.clone() * b_deriv.clone().scale(c);
                    out[k + j] = core::mem::replace(&mut out[k + j], Func::constant(var, 0.0))
                        + term;
                    if k > 0 {
                        b_deriv = b_deriv.derivative();
                    }
                }
            }
        }
        Ok(DiffOp::new(var, out))
    }

    /// Formal adjoint for real coefficients: `(c_k d^k)* = (-1)^k d^k c_k`,
    /// re-expanded into normal form.
    pub fn formal_adjoint(&self) -> DiffOp {
        let var = self.var;
        let n = self.coeffs.len();
        let mut out = vec![Func::constant(var, 0.0); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let mut c_deriv = c.clone();
            for i in (0..=k).rev() {
                // contribution (-1)^k C(k,i) c^((k-i)) d^i
                let term = c_deriv.clone().scale(sign * binomial(k, i));
                out[i] = core::mem::replace(&mut out[i], Func::constant(var, 0.0)) + term;
                if i > 0 {
                    c_deriv = c_deriv.derivative();
                }
            }
        }
        DiffOp::new(var, out)
    }

    /// `[self, rhs] = self rhs - rhs self`.
    pub fn commutator(&self, rhs: &DiffOp) -> Result<DiffOp> {
        let ab = self.compose(rhs)?;
        let ba = rhs.compose(self)?;
        Ok(ab - ba)
    }

    /// Conjugation by the weight whose logarithmic derivative is `s`:
    /// every `d` becomes `d - s`. The leading coefficient is untouched.
    pub fn gauge_conjugate(&self, s: &Func) -> DiffOp {
        let var = self.var;
        // Powers of (d - s) built iteratively in normal form:
        // (d - s) (sum p_j d^j) = sum (p_{j-1} + p_j' - s p_j) d^j.
        let mut result = DiffOp::multiplication(self.coeff(0));
        let mut power = vec![Func::constant(var, 1.0)]; // (d-s)^0
        for k in 1..=self.order() {
            let mut next = vec![Func::constant(var, 0.0); power.len() + 1];
            for (j, p) in power.iter().enumerate() {
                next[j + 1] = core::mem::replace(&mut next[j + 1], Func::constant(var, 0.0))
                    + p.clone();
                let drift = p.derivative() - s.clone() * p.clone();
                next[j] = core::mem::replace(&mut next[j], Func::constant(var, 0.0)) + drift;
            }
            power = next;
            let ck = self.coeff(k);
            if !ck.is_zero() {
                let term = DiffOp::new(
                    var,
                    power.iter().map(|p| ck.clone() * p.clone()).collect(),
                );
                result = result + term;
            }
        }
        result
    }

    /// Apply the operator to a function: `A f = sum c_k f^(k)`.
    pub fn apply(&self, f: &Func) -> Result<Func> {
        if f.var() != self.var {
            return Err(Error::VariableMismatch { expected: self.var, found: f.var() });
        }
        let mut acc = Func::constant(self.var, 0.0);
        let mut fk = f.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                acc = acc + c.clone() * fk.clone();
            }
            if k < self.order() {
                fk = fk.derivative();
            }
        }
        Ok(acc)
    }

    /// Largest pointwise coefficient deviation between two operators over a
    /// Chebyshev-spaced sample of `interval`.
    pub fn max_deviation(&self, rhs: &DiffOp, interval: Interval, samples: usize) -> Result<f64> {
        self.check_var(rhs)?;
        let xs = interval.chebyshev(samples.max(2));
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut worst = 0.0f64;
        for k in 0..n {
            let a = self.coeff(k).eval_on(&xs)?;
            let b = rhs.coeff(k).eval_on(&xs)?;
            for (x, y) in a.iter().zip(&b) {
                let d = num::abs(x - y);
                if d > worst {
                    worst = d;
                }
            }
        }
        Ok(worst)
    }

    /// Pointwise operator equality at the default sample density.
    pub fn pointwise_eq(&self, rhs: &DiffOp, interval: Interval, tol: Tol) -> Result<bool> {
        Ok(self.max_deviation(rhs, interval, DEFAULT_SAMPLES)? <= tol.abs)
    }
}

impl core::ops::Add for DiffOp {
    type Output = DiffOp;
    fn add(self, rhs: DiffOp) -> DiffOp {
        assert_eq!(self.var, rhs.var, "operator variable mismatch");
        let var = self.var;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) + rhs.coeff(k));
        }
        DiffOp::new(var, out)
    }
}

impl core::ops::Sub for DiffOp {
    type Output = DiffOp;
    fn sub(self, rhs: DiffOp) -> DiffOp {
        assert_eq!(self.var, rhs.var, "operator variable mismatch");
        let var = self.var;
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            out.push(self.coeff(k) - rhs.coeff(k));
        }
        DiffOp::new(var, out)
    }
}

impl core::ops::Neg for DiffOp {
    type Output = DiffOp;
    fn neg(self) -> DiffOp {
        let var = self.var;
        DiffOp::new(var, self.coeffs.into_iter().map(|c| c.scale(-1.0)).collect())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * ((n - i) as f64) / ((i + 1) as f64);
    }
    acc
}

/// A first-order operator `a(x) d + b(x)`, the building block of the ladder
/// construction. Kept as its own type because its adjoint has the tidy
/// closed form `-a d + (b - a')`.
#[derive(Clone, Debug)]
pub struct FirstOrderOp {
    a: Func,
    b: Func,
}

impl FirstOrderOp {
    pub fn new(a: Func, b: Func) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::InvalidParameter(
                "first-order operator needs a nonzero derivative coefficient".into(),
            ));
        }
        if a.var() != b.var() {
            return Err(Error::VariableMismatch { expected: a.var(), found: b.var() });
        }
        Ok(FirstOrderOp { a, b })
    }

    pub fn a(&self) -> &Func {
        &self.a
    }

    pub fn b(&self) -> &Func {
        &self.b
    }

    pub fn var(&self) -> Var {
        self.a.var()
    }

    /// `(a d + b)* = -a d + (b - a')`.
    pub fn adjoint(&self) -> FirstOrderOp {
        FirstOrderOp {
            a: self.a.clone().scale(-1.0),
            b: self.b.clone() - self.a.derivative(),
        }
    }

    pub fn to_diff_op(&self) -> DiffOp {
        DiffOp::new(self.var(), vec![self.b.clone(), self.a.clone()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    fn f(text: &str) -> Func {
        Func::parse(text, Var::X).unwrap()
    }

    #[test]
    fn derivative_past_multiplication_picks_up_the_commutator_term() {
        // d . x = x d + 1
        let d = DiffOp::derivative(Var::X);
        let mx = DiffOp::multiplication(f("x"));
        let c = d.compose(&mx).unwrap();
        assert_eq!(c.order(), 1);
        let expect = DiffOp::new(Var::X, vec![f("1"), f("x")]);
        assert!(c.pointwise_eq(&expect, iv(), Tol::default()).unwrap());
    }

    #[test]
    fn composing_derivatives_raises_the_order() {
        let d = DiffOp::derivative(Var::X);
        let d2 = d.compose(&d).unwrap();
        assert_eq!(d2.order(), 2);
        assert!(d2.coeff(0).is_zero());
        assert!(d2.coeff(1).is_zero());
        assert!((d2.coeff(2).value(0.3).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn commutator_of_d_and_x_is_one() {
        let d = DiffOp::derivative(Var::X);
        let mx = DiffOp::multiplication(f("x"));
        let c = d.commutator(&mx).unwrap();
        assert_eq!(c.order(), 0, "higher coefficients should cancel structurally");
        assert!((c.coeff(0).value(0.7).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn first_order_adjoint_matches_integration_by_parts() {
        // (a d + b)* = -a d + (b - a')
        let eta = FirstOrderOp::new(f("1+x^2"), f("sin(x)")).unwrap();
        let adj = eta.adjoint();
        let expect_b = f("sin(x)-2*x");
        let dev = (adj.b().clone() - expect_b).value(0.4).unwrap();
        assert!(dev.abs() < 1e-15);
        assert!((adj.a().value(0.4).unwrap() + 1.16).abs() < 1e-12);
    }

    #[test]
    fn adjoint_is_an_involution_on_second_order_operators() {
        let a = DiffOp::new(Var::X, vec![f("sin(x)"), f("x^2"), f("cosh(x)")]);
        let back = a.formal_adjoint().formal_adjoint();
        assert!(a.pointwise_eq(&back, iv(), Tol::default()).unwrap());
    }

    #[test]
    fn adjoint_of_plain_second_derivative_is_itself() {
        let d = DiffOp::derivative(Var::X);
        let d2 = d.compose(&d).unwrap();
        assert!(d2.formal_adjoint().pointwise_eq(&d2, iv(), Tol::default()).unwrap());
    }

    #[test]
    fn divergence_form_expands_exactly() {
        // -d w d = -w d^2 - w' d with w = 1 + x^2
        let a = DiffOp::divergence_form(f("1+x^2"));
        let expect = DiffOp::new(Var::X, vec![f("0"), f("-2*x"), f("-(1+x^2)")]);
        assert!(a.pointwise_eq(&expect, iv(), Tol::default()).unwrap());
    }

    #[test]
    fn composition_agrees_with_nested_application() {
        // Ladder pair at unit frequency: eta = (d + x)/sqrt(2).
        let eta = FirstOrderOp::new(f("1/sqrt(2)"), f("x/sqrt(2)")).unwrap();
        let num_op = eta.adjoint().to_diff_op().compose(&eta.to_diff_op()).unwrap();
        let test = f("exp(-x^2)");
        let composed = num_op.apply(&test).unwrap();
        let nested = eta
            .adjoint()
            .to_diff_op()
            .apply(&eta.to_diff_op().apply(&test).unwrap())
            .unwrap();
        for &t in &[-1.5, -0.2, 0.0, 0.9, 1.4] {
            let lhs = composed.value(t).unwrap();
            let rhs = nested.value(t).unwrap();
            assert!((lhs - rhs).abs() < 1e-10, "at {t}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn gauge_of_first_derivative_shifts_by_sigma() {
        let d = DiffOp::derivative(Var::X);
        let g = d.gauge_conjugate(&f("3"));
        let expect = DiffOp::new(Var::X, vec![f("-3"), f("1")]);
        assert!(g.pointwise_eq(&expect, iv(), Tol::default()).unwrap());
    }

    #[test]
    fn gauge_of_second_derivative_produces_sigma_squared_minus_derivative() {
        // (d - s)^2 = d^2 - 2 s d + s^2 - s'
        let s = f("sin(x)");
        let d = DiffOp::derivative(Var::X);
        let d2 = d.compose(&d).unwrap();
        let g = d2.gauge_conjugate(&s);
        let expect = DiffOp::new(
            Var::X,
            vec![f("sin(x)^2-cos(x)"), f("-2*sin(x)"), f("1")],
        );
        assert!(g.pointwise_eq(&expect, iv(), Tol::default()).unwrap());
    }

    #[test]
    fn gauge_keeps_the_leading_coefficient() {
        let h = DiffOp::new(Var::X, vec![f("x"), f("x^2"), f("-(1+x^2)")]);
        let g = h.gauge_conjugate(&f("tanh(x)"));
        assert_eq!(g.order(), 2);
        let dev = (g.coeff(2) - h.coeff(2)).value(0.6).unwrap();
        assert!(dev.abs() < 1e-15);
    }

    #[test]
    fn variable_mismatch_is_rejected() {
        let dx = DiffOp::derivative(Var::X);
        let du = DiffOp::derivative(Var::U);
        assert!(matches!(
            dx.compose(&du),
            Err(Error::VariableMismatch { .. })
        ));
    }

    #[test]
    fn zero_operator_normalizes_to_order_zero() {
        let z = DiffOp::new(Var::X, vec![Func::constant(Var::X, 0.0), Func::constant(Var::X, 0.0)]);
        assert_eq!(z.order(), 0);
        assert!(z.coeff(0).is_zero());
    }
}
