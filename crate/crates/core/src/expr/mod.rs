//! Exact expression trees for scalar functions of one variable.
//!
//! `ScalarExpr` is the symbolic substrate of the crate: coefficient functions
//! `a(x)`, `b(x)`, mass profiles `m(x)`, gauge functions `f(u)`, polynomials
//! `Q(z)`, and every effective potential are stored as immutable trees.
//! Differentiation is closed and exact; evaluation reports domain violations
//! instead of letting NaN propagate. There is deliberately no general
//! simplifier beyond constant folding and the obvious unit laws: identities
//! are checked pointwise on sample grids, never by canonical form.

mod parse;

use crate::error::{Error, Result};
use crate::num;
use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use core::fmt;

/// Variable tag. Expressions in the physical coordinate use `x`, expressions
/// after the change of variable use `u`, and polynomial data like `Q` and the
/// gauge-transformed potentials live in `z = f(u)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    X,
    U,
    Z,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::U => "u",
            Var::Z => "z",
        }
    }

    fn from_name(s: &str) -> Option<Var> {
        match s {
            "x" => Some(Var::X),
            "u" => Some(Var::U),
            "z" => Some(Var::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "neg",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Sinh => "sinh",
            UnaryOp::Cosh => "cosh",
            UnaryOp::Tanh => "tanh",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Immutable expression tree. Nodes are shared through `Arc`, so clones and
/// derivatives are cheap even for the large trees produced by operator
/// composition.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarExpr {
    Const(f64),
    Var(Var),
    Param(Arc<str>),
    Unary(UnaryOp, Arc<ScalarExpr>),
    Binary(BinaryOp, Arc<ScalarExpr>, Arc<ScalarExpr>),
}

/// Name-to-value map for named parameters appearing in expressions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Bindings {
    map: BTreeMap<String, f64>,
}

impl Bindings {
    pub const fn none() -> Self {
        Bindings { map: BTreeMap::new() }
    }

    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.map.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: f64) {
        self.map.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.map.get(name).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

fn ensure_finite(v: f64, op: &'static str, at: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain { op, at })
    }
}

fn eval_pow(base: f64, expo: f64, at: f64) -> Result<f64> {
    if base == 0.0 {
        return if expo > 0.0 {
            Ok(0.0)
        } else if expo == 0.0 {
            Ok(1.0)
        } else {
            Err(Error::Domain { op: "pow (zero base, negative exponent)", at })
        };
    }
    if base < 0.0 {
        // Negative bases only support integer exponents; the sign comes from
        // the exponent's parity.
        let is_integral = num::abs(expo) < 9.0e15 && expo == (expo as i64) as f64;
        if is_integral {
            let mag = num::powf(-base, expo);
            let v = if (expo as i64) % 2 == 0 { mag } else { -mag };
            return ensure_finite(v, "pow", at);
        }
        return Err(Error::Domain { op: "pow (negative base, fractional exponent)", at });
    }
    ensure_finite(num::powf(base, expo), "pow", at)
}

impl ScalarExpr {
    pub fn constant(c: f64) -> Self {
        ScalarExpr::Const(c)
    }

    pub fn var(v: Var) -> Self {
        ScalarExpr::Var(v)
    }

    pub fn param(name: &str) -> Self {
        ScalarExpr::Param(Arc::from(name))
    }

    /// Parse `text` as an expression over the single variable `var`.
    /// See the crate DSL grammar; `^` is right-associative.
    pub fn parse(text: &str, var: Var) -> Result<Self> {
        parse::parse(text, var)
    }

    fn unary(op: UnaryOp, e: ScalarExpr) -> Self {
        ScalarExpr::Unary(op, Arc::new(e))
    }

    fn binary(op: BinaryOp, l: ScalarExpr, r: ScalarExpr) -> Self {
        ScalarExpr::Binary(op, Arc::new(l), Arc::new(r))
    }

    pub fn exp(self) -> Self {
        Self::unary(UnaryOp::Exp, self)
    }

    pub fn log(self) -> Self {
        Self::unary(UnaryOp::Log, self)
    }

    pub fn sqrt(self) -> Self {
        Self::unary(UnaryOp::Sqrt, self)
    }

    pub fn sin(self) -> Self {
        Self::unary(UnaryOp::Sin, self)
    }

    pub fn cos(self) -> Self {
        Self::unary(UnaryOp::Cos, self)
    }

    pub fn sinh(self) -> Self {
        Self::unary(UnaryOp::Sinh, self)
    }

    pub fn cosh(self) -> Self {
        Self::unary(UnaryOp::Cosh, self)
    }

    pub fn tanh(self) -> Self {
        Self::unary(UnaryOp::Tanh, self)
    }

    pub fn pow(self, e: ScalarExpr) -> Self {
        Self::binary(BinaryOp::Pow, self, e)
    }

    pub fn powc(self, c: f64) -> Self {
        self.pow(ScalarExpr::Const(c))
    }

    pub fn powi(self, n: i32) -> Self {
        self.powc(n as f64)
    }

    /// The variable this tree is over, if it mentions one at all.
    /// Well-formed trees mention at most one; construction through the parser
    /// and the public combinators guarantees it.
    pub fn variable(&self) -> Option<Var> {
        match self {
            ScalarExpr::Const(_) | ScalarExpr::Param(_) => None,
            ScalarExpr::Var(v) => Some(*v),
            ScalarExpr::Unary(_, e) => e.variable(),
            ScalarExpr::Binary(_, l, r) => l.variable().or_else(|| r.variable()),
        }
    }

    pub fn is_const(&self, c: f64) -> bool {
        matches!(self, ScalarExpr::Const(v) if *v == c)
    }

    /// Replace every occurrence of `var` with `replacement`, which may be a
    /// tree over a different variable. This is symbolic composition: if
    /// `self` is g(u) and `replacement` is f(x), the result is g(f(x)).
    pub fn substitute(&self, var: Var, replacement: &ScalarExpr) -> ScalarExpr {
        match self {
            ScalarExpr::Const(_) | ScalarExpr::Param(_) => self.clone(),
            ScalarExpr::Var(v) => {
                if *v == var {
                    replacement.clone()
                } else {
                    self.clone()
                }
            }
            ScalarExpr::Unary(op, e) => {
                ScalarExpr::Unary(*op, Arc::new(e.substitute(var, replacement)))
            }
            ScalarExpr::Binary(op, l, r) => ScalarExpr::Binary(
                *op,
                Arc::new(l.substitute(var, replacement)),
                Arc::new(r.substitute(var, replacement)),
            ),
        }
    }

    /// Evaluate at `point` with named parameters taken from `bind`.
    ///
    /// Every intermediate value is checked: a non-finite result or an argument
    /// outside a function's domain is reported as [`Error::Domain`], never
    /// returned as NaN or infinity.
    pub fn eval(&self, point: f64, bind: &Bindings) -> Result<f64> {
        match self {
            ScalarExpr::Const(c) => Ok(*c),
            ScalarExpr::Var(_) => Ok(point),
            ScalarExpr::Param(name) => bind
                .get(name)
                .ok_or_else(|| Error::UnboundParameter { name: name.to_string() }),
            ScalarExpr::Unary(op, e) => {
                let v = e.eval(point, bind)?;
                let r = match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Exp => num::exp(v),
                    UnaryOp::Log => {
                        if v <= 0.0 {
                            return Err(Error::Domain { op: "log", at: point });
                        }
                        num::ln(v)
                    }
                    UnaryOp::Sqrt => {
                        if v < 0.0 {
                            return Err(Error::Domain { op: "sqrt", at: point });
                        }
                        num::sqrt(v)
                    }
                    UnaryOp::Sin => num::sin(v),
                    UnaryOp::Cos => num::cos(v),
                    UnaryOp::Sinh => num::sinh(v),
                    UnaryOp::Cosh => num::cosh(v),
                    UnaryOp::Tanh => num::tanh(v),
                };
                ensure_finite(r, op.name(), point)
            }
            ScalarExpr::Binary(op, l, r) => {
                let a = l.eval(point, bind)?;
                let b = r.eval(point, bind)?;
                match op {
                    BinaryOp::Add => ensure_finite(a + b, "add", point),
                    BinaryOp::Sub => ensure_finite(a - b, "sub", point),
                    BinaryOp::Mul => ensure_finite(a * b, "mul", point),
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(Error::Domain { op: "div", at: point });
                        }
                        ensure_finite(a / b, "div", point)
                    }
                    BinaryOp::Pow => eval_pow(a, b, point),
                }
            }
        }
    }

    /// Exact symbolic derivative with respect to the tree's variable.
    /// Named parameters are treated as constants.
    pub fn diff(&self) -> ScalarExpr {
        match self {
            ScalarExpr::Const(_) | ScalarExpr::Param(_) => ScalarExpr::Const(0.0),
            ScalarExpr::Var(_) => ScalarExpr::Const(1.0),
            ScalarExpr::Unary(op, e) => {
                let inner = ScalarExpr::clone(e);
                let d = e.diff();
                match op {
                    UnaryOp::Neg => -d,
                    UnaryOp::Exp => d * inner.exp(),
                    UnaryOp::Log => d / inner,
                    UnaryOp::Sqrt => d / (ScalarExpr::Const(2.0) * inner.sqrt()),
                    UnaryOp::Sin => d * inner.cos(),
                    UnaryOp::Cos => -(d * inner.sin()),
                    UnaryOp::Sinh => d * inner.cosh(),
                    UnaryOp::Cosh => d * inner.sinh(),
                    UnaryOp::Tanh => {
                        // 1 - tanh^2
                        d * (ScalarExpr::Const(1.0) - inner.tanh().powi(2))
                    }
                }
            }
            ScalarExpr::Binary(op, l, r) => {
                let (fl, fr) = (ScalarExpr::clone(l), ScalarExpr::clone(r));
                let (dl, dr) = (l.diff(), r.diff());
                match op {
                    BinaryOp::Add => dl + dr,
                    BinaryOp::Sub => dl - dr,
                    BinaryOp::Mul => dl * fr + fl * dr,
                    BinaryOp::Div => (dl * fr.clone() - fl * dr) / fr.powi(2),
                    BinaryOp::Pow => match &**r {
                        // f^c: the power rule avoids log(f) and its domain.
                        ScalarExpr::Const(c) => {
                            ScalarExpr::Const(*c) * fl.powc(c - 1.0) * dl
                        }
                        _ => {
                            let fl2 = fl.clone();
                            fl.clone().pow(fr.clone())
                                * (dr * fl.log() + fr * dl / fl2)
                        }
                    },
                }
            }
        }
    }

    /// n-th derivative.
    pub fn diff_n(&self, n: usize) -> ScalarExpr {
        let mut e = self.clone();
        for _ in 0..n {
            e = e.diff().simplify();
        }
        e
    }

    /// Structural simplification: constant folding plus unit laws
    /// (`x+0`, `x*1`, `x*0`, `x^1`, `x^0`, double negation, `x-x`).
    /// Preserves pointwise values wherever the original is defined.
    pub fn simplify(&self) -> ScalarExpr {
        match self {
            ScalarExpr::Const(_) | ScalarExpr::Var(_) | ScalarExpr::Param(_) => self.clone(),
            ScalarExpr::Unary(op, e) => {
                let e = e.simplify();
                match (op, &e) {
                    (UnaryOp::Neg, ScalarExpr::Const(c)) => ScalarExpr::Const(-c),
                    (UnaryOp::Neg, ScalarExpr::Unary(UnaryOp::Neg, inner)) => {
                        ScalarExpr::clone(inner)
                    }
                    (_, ScalarExpr::Const(c)) => {
                        // Fold through the evaluator so domain rules stay in
                        // one place; keep the node if folding is not legal.
                        let probe = ScalarExpr::unary(*op, ScalarExpr::Const(*c));
                        match probe.eval(0.0, &Bindings::none()) {
                            Ok(v) => ScalarExpr::Const(v),
                            Err(_) => probe,
                        }
                    }
                    _ => ScalarExpr::unary(*op, e),
                }
            }
            ScalarExpr::Binary(op, l, r) => {
                let l = l.simplify();
                let r = r.simplify();
                if let (ScalarExpr::Const(a), ScalarExpr::Const(b)) = (&l, &r) {
                    let probe = ScalarExpr::binary(*op, l.clone(), r.clone());
                    let folded = match op {
                        BinaryOp::Add => Some(a + b),
                        BinaryOp::Sub => Some(a - b),
                        BinaryOp::Mul => Some(a * b),
                        BinaryOp::Div if *b != 0.0 => Some(a / b),
                        BinaryOp::Pow => eval_pow(*a, *b, 0.0).ok(),
                        _ => None,
                    };
                    return match folded {
                        Some(v) if v.is_finite() => ScalarExpr::Const(v),
                        _ => probe,
                    };
                }
                match op {
                    BinaryOp::Add => {
                        if l.is_const(0.0) {
                            r
                        } else if r.is_const(0.0) {
                            l
                        } else {
                            ScalarExpr::binary(*op, l, r)
                        }
                    }
                    BinaryOp::Sub => {
                        if r.is_const(0.0) {
                            l
                        } else if l.is_const(0.0) {
                            -r
                        } else if l == r {
                            ScalarExpr::Const(0.0)
                        } else {
                            ScalarExpr::binary(*op, l, r)
                        }
                    }
                    BinaryOp::Mul => {
                        if l.is_const(0.0) || r.is_const(0.0) {
                            ScalarExpr::Const(0.0)
                        } else if l.is_const(1.0) {
                            r
                        } else if r.is_const(1.0) {
                            l
                        } else {
                            ScalarExpr::binary(*op, l, r)
                        }
                    }
                    BinaryOp::Div => {
                        if r.is_const(1.0) {
                            l
                        } else {
                            ScalarExpr::binary(*op, l, r)
                        }
                    }
                    BinaryOp::Pow => {
                        if r.is_const(1.0) {
                            l
                        } else if r.is_const(0.0) {
                            ScalarExpr::Const(1.0)
                        } else {
                            ScalarExpr::binary(*op, l, r)
                        }
                    }
                }
            }
        }
    }
}

impl core::ops::Add for ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::binary(BinaryOp::Add, self, rhs)
    }
}

impl core::ops::Sub for ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::binary(BinaryOp::Sub, self, rhs)
    }
}

impl core::ops::Mul for ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::binary(BinaryOp::Mul, self, rhs)
    }
}

impl core::ops::Div for ScalarExpr {
    type Output = ScalarExpr;
    fn div(self, rhs: ScalarExpr) -> ScalarExpr {
        ScalarExpr::binary(BinaryOp::Div, self, rhs)
    }
}

impl core::ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr::unary(UnaryOp::Neg, self)
    }
}

// Printing uses the same precedence levels the parser implements, so
// `parse(print(e))` is pointwise equal to `e`. Note the grammar binds unary
// minus tighter than `^` (`-x^2` parses as `(-x)^2`), which the precedence
// numbers below reflect.
const PREC_ADD: u8 = 1;
const PREC_MUL: u8 = 2;
const PREC_POW: u8 = 3;
const PREC_NEG: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(e: &ScalarExpr) -> u8 {
    match e {
        ScalarExpr::Const(c) if *c < 0.0 => PREC_NEG,
        ScalarExpr::Const(_) | ScalarExpr::Var(_) | ScalarExpr::Param(_) => PREC_ATOM,
        ScalarExpr::Unary(UnaryOp::Neg, _) => PREC_NEG,
        ScalarExpr::Unary(_, _) => PREC_ATOM,
        ScalarExpr::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => PREC_ADD,
        ScalarExpr::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => PREC_MUL,
        ScalarExpr::Binary(BinaryOp::Pow, _, _) => PREC_POW,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &ScalarExpr, min: u8) -> fmt::Result {
    if precedence(e) < min {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarExpr::Const(c) => write!(f, "{c}"),
            ScalarExpr::Var(v) => f.write_str(v.name()),
            ScalarExpr::Param(p) => f.write_str(p),
            ScalarExpr::Unary(UnaryOp::Neg, e) => {
                f.write_str("-")?;
                write_child(f, e, PREC_NEG)
            }
            ScalarExpr::Unary(op, e) => write!(f, "{}({e})", op.name()),
            ScalarExpr::Binary(op, l, r) => {
                let (sym, lp, rp) = match op {
                    BinaryOp::Add => ("+", PREC_ADD, PREC_ADD + 1),
                    BinaryOp::Sub => ("-", PREC_ADD, PREC_ADD + 1),
                    BinaryOp::Mul => ("*", PREC_MUL, PREC_MUL + 1),
                    BinaryOp::Div => ("/", PREC_MUL, PREC_MUL + 1),
                    // right-associative
                    BinaryOp::Pow => ("^", PREC_POW + 1, PREC_POW),
                };
                write_child(f, l, lp)?;
                f.write_str(sym)?;
                write_child(f, r, rp)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex(text: &str) -> ScalarExpr {
        ScalarExpr::parse(text, Var::X).unwrap()
    }

    fn at(e: &ScalarExpr, x: f64) -> f64 {
        e.eval(x, &Bindings::none()).unwrap()
    }

    #[test]
    fn first_derivatives_of_each_operation() {
        let cases = [
            ("x^2+1", 2.0, 4.0),
            ("x*sin(x)", 1.1, 1.1f64.cos() * 1.1 + 1.1f64.sin()),
            ("1/x", 2.0, -0.25),
            ("exp(2*x)", 0.3, 2.0 * 0.6f64.exp()),
            ("log(x)", 3.0, 1.0 / 3.0),
            ("sqrt(x)", 4.0, 0.25),
            ("tanh(x)", 0.5, 1.0 - 0.5f64.tanh().powi(2)),
            ("cosh(x)", 0.5, 0.5f64.sinh()),
        ];
        for (text, x, want) in cases {
            let d = ex(text).diff();
            assert!((at(&d, x) - want).abs() < 1e-12, "{text}");
        }
    }

    #[test]
    fn third_derivative_of_the_growing_exponential() {
        // d^3/du^3 exp(2 sqrt(nu) u) = 8 nu^(3/2) exp(2 sqrt(nu) u),
        // cross-checked against central differences of the second
        // derivative at u = 0.3 with nu = 2.
        let e = ScalarExpr::parse("exp(2*sqrt(nu)*u)", Var::U).unwrap();
        let b = Bindings::new().with("nu", 2.0);
        let d3 = e.diff_n(3);
        let u = 0.3;
        let nu: f64 = 2.0;
        let closed = 8.0 * nu.powf(1.5) * (2.0 * nu.sqrt() * u).exp();
        assert!((d3.eval(u, &b).unwrap() - closed).abs() < 1e-10 * closed.abs());

        let h = 1e-4;
        let d2 = e.diff_n(2);
        let fd = (d2.eval(u + h, &b).unwrap() - d2.eval(u - h, &b).unwrap()) / (2.0 * h);
        assert!((d3.eval(u, &b).unwrap() - fd).abs() < 1e-6 * closed.abs().max(1.0));
    }

    #[test]
    fn inverse_hyperbolic_identity_value() {
        // log(x + sqrt(1+x^2)) at 1 is asinh(1) = 0.881373587019543.
        let e = ex("log(x+sqrt(1+x^2))");
        assert!((at(&e, 1.0) - 0.881373587019543).abs() < 1e-15);
    }

    #[test]
    fn zero_to_the_zero_is_one() {
        assert_eq!(at(&ex("x^x"), 0.0), 1.0);
        assert_eq!(at(&ex("0^0"), 5.0), 1.0);
    }

    #[test]
    fn integer_exponents_allow_negative_bases() {
        assert_eq!(at(&ex("x^3"), -2.0), -8.0);
        assert_eq!(at(&ex("x^2"), -2.0), 4.0);
        // Fractional exponent of a negative base is a domain error.
        assert!(matches!(
            ex("x^0.5").eval(-2.0, &Bindings::none()),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn domain_violations_are_reported_not_propagated_as_nan() {
        assert!(matches!(at_err("1/x", 0.0), Error::Domain { op: "div", .. }));
        assert!(matches!(at_err("log(x)", 0.0), Error::Domain { op: "log", .. }));
        assert!(matches!(at_err("log(x)", -1.0), Error::Domain { op: "log", .. }));
        assert!(matches!(at_err("sqrt(x)", -1e-9), Error::Domain { op: "sqrt", .. }));
        // Overflow to infinity is caught rather than returned.
        assert!(matches!(at_err("exp(x)", 1e9), Error::Domain { .. }));
    }

    fn at_err(text: &str, x: f64) -> Error {
        ex(text).eval(x, &Bindings::none()).unwrap_err()
    }

    #[test]
    fn unbound_parameter_is_an_error_and_binding_fixes_it() {
        let e = ex("k*x");
        assert!(matches!(
            e.eval(2.0, &Bindings::none()),
            Err(Error::UnboundParameter { name }) if name == "k"
        ));
        assert_eq!(e.eval(2.0, &Bindings::new().with("k", 3.0)).unwrap(), 6.0);
    }

    #[test]
    fn simplify_preserves_values() {
        let texts = [
            "x^2+0*x+1",
            "(x-x)*exp(x)+x",
            "1*x*1",
            "x^1",
            "x/1",
            "0/x + x*(1+0)",
            "sin(x)-sin(x)",
        ];
        for text in texts {
            let e = ex(text);
            let s = e.simplify();
            for &x in &[-2.0, -0.5, 0.7, 3.0] {
                let a = at(&e, x);
                let b = at(&s, x);
                assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0), "{text} at {x}");
            }
        }
    }

    #[test]
    fn simplify_collapses_structural_zeros() {
        assert!(ex("x-x").simplify().is_const(0.0));
        assert!(ex("0*sin(x)").simplify().is_const(0.0));
        assert!(ex("x^0").simplify().is_const(1.0));
    }

    #[test]
    fn display_round_trips_through_the_parser() {
        let texts = [
            "x^2+1",
            "-x^2",
            "(x+1)*(x-2)",
            "2^3^2",
            "x/(1+x^2)",
            "exp(-(x^2)/2)",
            "x-(x-1)",
            "-(x+1)",
            "1/(2*sqrt(x))",
        ];
        for text in texts {
            let e = ex(text);
            let printed = alloc::format!("{e}");
            let back = ScalarExpr::parse(&printed, Var::X).unwrap();
            for &x in &[0.3, 1.7, 2.9] {
                let a = at(&e, x);
                let b = at(&back, x);
                assert!(
                    (a - b).abs() <= 1e-14 * a.abs().max(1.0),
                    "{text} printed as {printed}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn substitute_composes_symbolically() {
        // (x^2+1) with x -> sin(x): value matches manual composition.
        let outer = ex("x^2+1");
        let inner = ex("sin(x)");
        let composed = outer.substitute(Var::X, &inner);
        for &x in &[0.2f64, 1.4] {
            let want = x.sin() * x.sin() + 1.0;
            assert!((at(&composed, x) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_of_a_parameterized_family_keeps_the_parameter() {
        let e = ScalarExpr::parse("exp(nu*u)", Var::U).unwrap();
        let d = e.diff();
        let b = Bindings::new().with("nu", 3.0);
        assert!((d.eval(0.5, &b).unwrap() - 3.0 * 1.5f64.exp()).abs() < 1e-12);
    }
}
