//! Opaque function objects over one variable.
//!
//! `Func` closes the expression language under antiderivatives and
//! composition. An expression-backed function evaluates symbolically; an
//! antiderivative node evaluates by adaptive quadrature from its anchor
//! point; everything built on top (sums, products, quotients, exponentials,
//! compositions) combines those pointwise. The algebra is closed under
//! differentiation, so code that needs `f'` never differentiates numerically:
//!
//! * the derivative of an antiderivative node is its integrand,
//! * compositions use the chain rule,
//! * products, quotients and exponentials use the usual calculus rules.
//!
//! Values are immutable and cheaply cloneable (`Arc`-shared), with no
//! interior caches, so concurrent reads from several threads are safe.
//! Batched evaluation over a sorted grid integrates incrementally between
//! neighbouring nodes instead of restarting at the anchor, which keeps grid
//! workloads linear in the grid size.

use crate::error::{Error, Result};
use crate::expr::{Bindings, ScalarExpr, Var};
use crate::num;
use crate::quad::{self, DEFAULT_QUAD_TOL};
use alloc::sync::Arc;
use alloc::vec::Vec;

/// A real-valued function of a single variable.
#[derive(Clone, Debug)]
pub struct Func {
    var: Var,
    node: Arc<Node>,
}

#[derive(Debug)]
enum Node {
    /// Symbolic expression with its parameter bindings captured.
    Expr(ScalarExpr, Bindings),
    /// `x -> anchor..x integral of the integrand`, evaluated by quadrature.
    Antideriv { integrand: Func, anchor: f64, tol: f64 },
    /// `outer(inner(x))`; `inner` maps this function's variable into the
    /// variable of `outer`.
    Compose { outer: Func, inner: Func },
    Add(Func, Func),
    Mul(Func, Func),
    Div(Func, Func),
    Scale(f64, Func),
    Exp(Func),
}

impl Func {
    /// Wrap a symbolic expression. The expression is simplified once here so
    /// that derivative trees stay small.
    pub fn from_expr(expr: ScalarExpr, var: Var, bindings: Bindings) -> Self {
        Func {
            var,
            node: Arc::new(Node::Expr(expr.simplify(), bindings)),
        }
    }

    /// Parse `text` in variable `var` with no parameters bound.
    pub fn parse(text: &str, var: Var) -> Result<Self> {
        Ok(Func::from_expr(ScalarExpr::parse(text, var)?, var, Bindings::none()))
    }

    pub fn constant(var: Var, value: f64) -> Self {
        Func::from_expr(ScalarExpr::Const(value), var, Bindings::none())
    }

    pub fn identity(var: Var) -> Self {
        Func::from_expr(ScalarExpr::Var(var), var, Bindings::none())
    }

    /// The antiderivative of `integrand` anchored at `anchor` (where the
    /// result is zero), evaluated by adaptive quadrature to tolerance `tol`.
    pub fn antiderivative(integrand: Func, anchor: f64, tol: f64) -> Self {
        let var = integrand.var;
        Func {
            var,
            node: Arc::new(Node::Antideriv {
                integrand,
                anchor,
                tol: if tol > 0.0 { tol } else { DEFAULT_QUAD_TOL },
            }),
        }
    }

    /// `outer(inner(.))`. The composed function lives in `inner`'s variable.
    /// When both sides are expression-backed the composition is performed
    /// symbolically by substitution, so derivative trees stay expressions.
    pub fn compose(outer: Func, inner: Func) -> Self {
        let var = inner.var;
        if let (Node::Expr(oe, ob), Node::Expr(ie, ib)) = (&*outer.node, &*inner.node) {
            if let Some(b) = merge_bindings(ob, ib) {
                return Func::from_expr(oe.substitute(outer.var, ie), var, b);
            }
        }
        Func {
            var,
            node: Arc::new(Node::Compose { outer, inner }),
        }
    }

    /// `exp(f)`, kept as its own node so the chain rule stays exact.
    pub fn exp(self) -> Self {
        let var = self.var;
        if let Node::Expr(e, b) = &*self.node {
            return Func::from_expr(e.clone().exp(), var, b.clone());
        }
        Func {
            var,
            node: Arc::new(Node::Exp(self)),
        }
    }

    pub fn scale(self, c: f64) -> Self {
        if c == 1.0 {
            return self;
        }
        if c == 0.0 || self.is_zero() {
            return Func::constant(self.var, 0.0);
        }
        let var = self.var;
        if let Node::Expr(e, b) = &*self.node {
            return Func::from_expr(ScalarExpr::Const(c) * e.clone(), var, b.clone());
        }
        Func {
            var,
            node: Arc::new(Node::Scale(c, self)),
        }
    }

    /// Integer power by repeated multiplication; `n` is expected small.
    pub fn powi(&self, n: u32) -> Self {
        match n {
            0 => Func::constant(self.var, 1.0),
            _ => {
                let mut acc = self.clone();
                for _ in 1..n {
                    acc = acc * self.clone();
                }
                acc
            }
        }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    /// True only for a function that is literally the zero constant. Used to
    /// drop vanishing terms when assembling operators, never as a numeric
    /// test.
    pub fn is_zero(&self) -> bool {
        match &*self.node {
            Node::Expr(e, _) => e.is_const(0.0),
            Node::Scale(c, _) => *c == 0.0,
            _ => false,
        }
    }

    fn is_one(&self) -> bool {
        match &*self.node {
            Node::Expr(e, _) => e.is_const(1.0),
            _ => false,
        }
    }

    /// The derivative, built symbolically node by node.
    pub fn derivative(&self) -> Func {
        let var = self.var;
        match &*self.node {
            Node::Expr(e, b) => Func::from_expr(e.diff(), var, b.clone()),
            Node::Antideriv { integrand, .. } => integrand.clone(),
            Node::Compose { outer, inner } => {
                Func::compose(outer.derivative(), inner.clone()) * inner.derivative()
            }
            Node::Add(f, g) => f.derivative() + g.derivative(),
            Node::Mul(f, g) => f.derivative() * g.clone() + f.clone() * g.derivative(),
            Node::Div(f, g) => {
                let num = f.derivative() * g.clone() - f.clone() * g.derivative();
                num / (g.clone() * g.clone())
            }
            Node::Scale(c, f) => f.derivative().scale(*c),
            Node::Exp(f) => f.derivative() * self.clone(),
        }
    }

    /// `n`-th derivative.
    pub fn derivative_n(&self, n: u32) -> Func {
        let mut acc = self.clone();
        for _ in 0..n {
            acc = acc.derivative();
        }
        acc
    }

    /// Evaluate at a point.
    pub fn value(&self, x: f64) -> Result<f64> {
        match &*self.node {
            Node::Expr(e, b) => e.eval(x, b),
            Node::Antideriv { integrand, anchor, tol } => {
                quad::integrate(&|t| integrand.value(t), *anchor, x, *tol)
            }
            Node::Compose { outer, inner } => outer.value(inner.value(x)?),
            Node::Add(f, g) => Ok(f.value(x)? + g.value(x)?),
            Node::Mul(f, g) => Ok(f.value(x)? * g.value(x)?),
            Node::Div(f, g) => {
                let d = g.value(x)?;
                if d == 0.0 {
                    return Err(Error::Domain { op: "divide", at: x });
                }
                let v = f.value(x)? / d;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Domain { op: "divide", at: x })
                }
            }
            Node::Scale(c, f) => Ok(c * f.value(x)?),
            Node::Exp(f) => {
                let v = num::exp(f.value(x)?);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Domain { op: "exp", at: x })
                }
            }
        }
    }

    /// Evaluate on an ascending grid. Antiderivative nodes integrate segment
    /// by segment instead of re-integrating from the anchor for every node,
    /// and all composite nodes batch their children, so the total quadrature
    /// work is proportional to the grid length.
    pub fn eval_on(&self, xs: &[f64]) -> Result<Vec<f64>> {
        debug_assert!(xs.windows(2).all(|w| w[0] <= w[1]), "grid must be ascending");
        match &*self.node {
            Node::Expr(e, b) => xs.iter().map(|&x| e.eval(x, b)).collect(),
            Node::Antideriv { integrand, anchor, tol } => {
                if xs.is_empty() {
                    return Ok(Vec::new());
                }
                let g = |t: f64| integrand.value(t);
                let mut out = Vec::with_capacity(xs.len());
                let mut acc = quad::integrate(&g, *anchor, xs[0], *tol)?;
                out.push(acc);
                for w in xs.windows(2) {
                    acc += quad::integrate(&g, w[0], w[1], *tol)?;
                    out.push(acc);
                }
                Ok(out)
            }
            Node::Compose { outer, inner } => {
                let ys = inner.eval_on(xs)?;
                if ys.windows(2).all(|w| w[0] <= w[1]) {
                    outer.eval_on(&ys)
                } else if ys.windows(2).all(|w| w[0] >= w[1]) {
                    let mut rev = ys.clone();
                    rev.reverse();
                    let mut vals = outer.eval_on(&rev)?;
                    vals.reverse();
                    Ok(vals)
                } else {
                    ys.iter().map(|&y| outer.value(y)).collect()
                }
            }
            Node::Add(f, g) => {
                let (a, b) = (f.eval_on(xs)?, g.eval_on(xs)?);
                Ok(a.iter().zip(&b).map(|(x, y)| x + y).collect())
            }
            Node::Mul(f, g) => {
                let (a, b) = (f.eval_on(xs)?, g.eval_on(xs)?);
                Ok(a.iter().zip(&b).map(|(x, y)| x * y).collect())
            }
            Node::Div(f, g) => {
                let (a, b) = (f.eval_on(xs)?, g.eval_on(xs)?);
                a.iter()
                    .zip(b.iter().zip(xs))
                    .map(|(x, (y, &at))| {
                        let v = x / y;
                        if *y != 0.0 && v.is_finite() {
                            Ok(v)
                        } else {
                            Err(Error::Domain { op: "divide", at })
                        }
                    })
                    .collect()
            }
            Node::Scale(c, f) => Ok(f.eval_on(xs)?.iter().map(|v| c * v).collect()),
            Node::Exp(f) => f
                .eval_on(xs)?
                .iter()
                .zip(xs)
                .map(|(v, &at)| {
                    let e = num::exp(*v);
                    if e.is_finite() {
                        Ok(e)
                    } else {
                        Err(Error::Domain { op: "exp", at })
                    }
                })
                .collect(),
        }
    }

    fn check_var(&self, other: &Func) -> Var {
        assert_eq!(
            self.var, other.var,
            "cannot combine functions of {} and {}",
            self.var, other.var
        );
        self.var
    }

    /// Fold two expression-backed operands into one expression node, when the
    /// parameter bindings allow it. Keeps sums and products of symbolic
    /// coefficients symbolic, which is what lets structurally cancelling
    /// terms (like the ones a commutator produces) simplify away to literal
    /// zero instead of lingering as opaque trees.
    fn fold_expr(
        &self,
        other: &Func,
        op: impl FnOnce(ScalarExpr, ScalarExpr) -> ScalarExpr,
    ) -> Option<Func> {
        if let (Node::Expr(e1, b1), Node::Expr(e2, b2)) = (&*self.node, &*other.node) {
            if let Some(b) = merge_bindings(b1, b2) {
                return Some(Func::from_expr(op(e1.clone(), e2.clone()), self.var, b));
            }
        }
        None
    }
}

fn merge_bindings(a: &Bindings, b: &Bindings) -> Option<Bindings> {
    if a == b || b.is_empty() {
        Some(a.clone())
    } else if a.is_empty() {
        Some(b.clone())
    } else {
        None
    }
}

impl core::ops::Add for Func {
    type Output = Func;
    fn add(self, rhs: Func) -> Func {
        let var = self.check_var(&rhs);
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        if let Some(f) = self.fold_expr(&rhs, |a, b| a + b) {
            return f;
        }
        Func { var, node: Arc::new(Node::Add(self, rhs)) }
    }
}

impl core::ops::Sub for Func {
    type Output = Func;
    fn sub(self, rhs: Func) -> Func {
        self.check_var(&rhs);
        if let Some(f) = self.fold_expr(&rhs, |a, b| a - b) {
            return f;
        }
        self + rhs.scale(-1.0)
    }
}

impl core::ops::Mul for Func {
    type Output = Func;
    fn mul(self, rhs: Func) -> Func {
        let var = self.check_var(&rhs);
        if self.is_zero() || rhs.is_zero() {
            return Func::constant(var, 0.0);
        }
        if self.is_one() {
            return rhs;
        }
        if rhs.is_one() {
            return self;
        }
        if let Some(f) = self.fold_expr(&rhs, |a, b| a * b) {
            return f;
        }
        Func { var, node: Arc::new(Node::Mul(self, rhs)) }
    }
}

impl core::ops::Div for Func {
    type Output = Func;
    fn div(self, rhs: Func) -> Func {
        let var = self.check_var(&rhs);
        if rhs.is_one() {
            return self;
        }
        if self.is_zero() {
            return Func::constant(var, 0.0);
        }
        if let Some(f) = self.fold_expr(&rhs, |a, b| a / b) {
            return f;
        }
        Func { var, node: Arc::new(Node::Div(self, rhs)) }
    }
}

impl core::ops::Neg for Func {
    type Output = Func;
    fn neg(self) -> Func {
        self.scale(-1.0)
    }
}
