//! Recursive-descent parser for the expression DSL.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' factor)?            (right-associative)
//! base   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' base
//! ```
//!
//! Identifiers are the active variable (`x`, `u`, or `z`), one of the
//! function names `exp log sqrt sin cos sinh cosh tanh`, or otherwise a named
//! parameter. Using one of the two inactive variable names is an error, so a
//! stray `u` inside an `x`-expression cannot silently become a parameter.

use super::{ScalarExpr, UnaryOp, Var};
use crate::error::{Error, Result};
use alloc::format;
use alloc::string::ToString;

pub fn parse(text: &str, var: Var) -> Result<ScalarExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, var };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err(format!("unexpected `{}`", p.peek_char())));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    var: Var,
}

impl<'a> Parser<'a> {
    fn err(&self, message: alloc::string::String) -> Error {
        Error::Parse { offset: self.pos, message }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn peek_char(&self) -> char {
        self.peek().map(char::from).unwrap_or('\0')
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, byte: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.term()?;
            } else if self.eat(b'-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.factor()?;
            } else if self.eat(b'/') {
                acc = acc / self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr> {
        let base = self.base()?;
        if self.eat(b'^') {
            Ok(base.pow(self.factor()?))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<ScalarExpr> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.err("unexpected end of input".to_string())),
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.base()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`".to_string()));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(self.err(format!("unexpected `{}`", char::from(c)))),
        }
    }

    fn number(&mut self) -> Result<ScalarExpr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // `2e` followed by something else: the `e` was not an exponent.
                self.pos = mark;
            }
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(ScalarExpr::Const(v)),
            _ => Err(Error::Parse {
                offset: start,
                message: format!("malformed number `{text}`"),
            }),
        }
    }

    fn ident(&mut self) -> Result<ScalarExpr> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii ident");
        let func = match name {
            "exp" => Some(UnaryOp::Exp),
            "log" => Some(UnaryOp::Log),
            "sqrt" => Some(UnaryOp::Sqrt),
            "sin" => Some(UnaryOp::Sin),
            "cos" => Some(UnaryOp::Cos),
            "sinh" => Some(UnaryOp::Sinh),
            "cosh" => Some(UnaryOp::Cosh),
            "tanh" => Some(UnaryOp::Tanh),
            _ => None,
        };
        let calls = {
            let save = self.pos;
            let is_call = self.eat(b'(');
            self.pos = save;
            is_call
        };
        if calls {
            let Some(op) = func else {
                return Err(Error::UnknownIdentifier {
                    offset: start,
                    name: name.to_string(),
                });
            };
            self.eat(b'(');
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.err("expected `)`".to_string()));
            }
            return Ok(ScalarExpr::Unary(op, alloc::sync::Arc::new(arg)));
        }
        if func.is_some() {
            return Err(Error::Parse {
                offset: start,
                message: format!("function `{name}` must be called with `(`"),
            });
        }
        if let Some(v) = Var::from_name(name) {
            if v != self.var {
                return Err(Error::WrongVariable {
                    offset: start,
                    expected: self.var,
                    found: v,
                });
            }
            return Ok(ScalarExpr::Var(v));
        }
        Ok(ScalarExpr::param(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Bindings;

    fn eval_x(text: &str, x: f64) -> f64 {
        parse(text, Var::X).unwrap().eval(x, &Bindings::none()).unwrap()
    }

    #[test]
    fn polynomial_evaluation() {
        assert_eq!(eval_x("x^2+1", 2.0), 5.0);
        assert_eq!(eval_x("2*x^3 - x/2", 2.0), 15.0);
    }

    #[test]
    fn function_calls_and_parameters() {
        let e = parse("exp(2*sqrt(nu)*u)", Var::U).unwrap();
        let b = Bindings::new().with("nu", 1.0);
        assert!((e.eval(0.0, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!((e.eval(0.5, &b).unwrap() - 1f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn exponent_is_right_associative() {
        // 2^3^2 = 2^(3^2) = 512, not (2^3)^2 = 64.
        assert_eq!(eval_x("2^3^2", 0.0), 512.0);
    }

    #[test]
    fn unary_minus_binds_tighter_than_the_exponent() {
        assert_eq!(eval_x("-x^2", 3.0), 9.0);
        assert_eq!(eval_x("0 - x^2", 3.0), -9.0);
    }

    #[test]
    fn scientific_numbers_and_the_trailing_e_fallback() {
        assert_eq!(eval_x("1.5e2", 0.0), 150.0);
        assert_eq!(eval_x("2.5e-3", 0.0), 0.0025);
        assert_eq!(eval_x("2e+3", 0.0), 2000.0);
        // `2e` not followed by exponent digits: the `e` is given back, and
        // with no implicit multiplication the leftover is a clean syntax
        // error at the `e`, not a malformed-number complaint.
        match parse("2e", Var::X) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("expected Parse error, got {other:?}"),
        }
        match parse("2e+x", Var::X) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 1),
            other => panic!("expected Parse error, got {other:?}"),
        }
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(eval_x("  x ^ 2   +   1 ", 2.0), eval_x("x^2+1", 2.0));
    }

    #[test]
    fn wrong_variable_is_flagged_with_its_position() {
        match parse("x + u", Var::X) {
            Err(Error::WrongVariable { offset, expected, found }) => {
                assert_eq!(offset, 4);
                assert_eq!(expected, Var::X);
                assert_eq!(found, Var::U);
            }
            other => panic!("expected WrongVariable, got {other:?}"),
        }
    }

    #[test]
    fn unknown_function_name_is_flagged() {
        match parse("foo(x)", Var::X) {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 0);
            }
            other => panic!("expected UnknownIdentifier, got {other:?}"),
        }
    }

    #[test]
    fn bare_known_function_name_does_not_pass_as_a_parameter() {
        assert!(matches!(parse("exp + 1", Var::X), Err(Error::Parse { .. })));
    }

    #[test]
    fn syntax_errors_carry_byte_offsets() {
        match parse("x + * 2", Var::X) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 4),
            other => panic!("expected Parse error, got {other:?}"),
        }
        match parse("(x + 1", Var::X) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("expected Parse error, got {other:?}"),
        }
        match parse("x + 1) * 2", Var::X) {
            Err(Error::Parse { offset, .. }) => assert_eq!(offset, 5),
            other => panic!("expected Parse error, got {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_a_parse_error() {
        assert!(matches!(parse("", Var::X), Err(Error::Parse { .. })));
        assert!(matches!(parse("   ", Var::X), Err(Error::Parse { .. })));
    }

    #[test]
    fn unary_chain_parses() {
        assert_eq!(eval_x("--x", 3.0), 3.0);
        assert_eq!(eval_x("-(-(x))", 3.0), 3.0);
    }

    #[test]
    fn all_advertised_functions_parse_and_evaluate() {
        type Unary = fn(f64) -> f64;
        let cases: [(&str, Unary); 8] = [
            ("exp", f64::exp),
            ("log", f64::ln),
            ("sqrt", f64::sqrt),
            ("sin", f64::sin),
            ("cos", f64::cos),
            ("sinh", f64::sinh),
            ("cosh", f64::cosh),
            ("tanh", f64::tanh),
        ];
        for (name, f) in cases {
            let got = eval_x(&alloc::format!("{name}(x)"), 0.7);
            assert!((got - f(0.7)).abs() < 1e-15, "{name}");
        }
    }
}
