//! Small arithmetic expression language for user-defined coefficients.
//!
//! Grammar (usual precedence, `^` binds tighter than unary minus and is right
//! associative):
//!
//! ```text
//! sum     = product (("+" | "-") product)*
//! product = unary (("*" | "/") unary)*
//! unary   = "-" unary | "+" unary | power
//! power   = atom ("^" unary)?
//! atom    = number | name | name "(" sum ")" | "(" sum ")"
//! ```
//!
//! Names are bound to variable slots at parse time; `pi` and `e` are constants.
//! Functions: `sin cos tan exp ln log sqrt abs`.

use std::fmt;

/// Parse failure with a 1-based character column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for ExprError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Exp => v.exp(),
            Func::Ln => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates with `vars[k]` bound to the k-th parse-time name.
    pub fn eval(&self, vars: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(k) => vars[*k],
            Expr::Neg(a) => -a.eval(vars),
            Expr::Call(f, a) => f.apply(a.eval(vars)),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(vars), b.eval(vars));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => pow(a, b),
                }
            }
        }
    }
}

/// Integer exponents use repeated multiplication so `x^2` is exactly `x*x`.
fn pow(a: f64, b: f64) -> f64 {
    if b.fract() == 0.0 && b.abs() <= 64.0 {
        a.powi(b as i32)
    } else {
        a.powf(b)
    }
}

/// Parses `src`, binding each name in `vars` to its index.
pub fn parse(src: &str, vars: &[&str]) -> Result<Expr, ExprError> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
        vars,
    };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(format!("unexpected '{}'", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => Err(self.error("unexpected end of expression")),
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.name(),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.chars.get(p.pos).is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            digits(self);
        }
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                digits(self);
            } else {
                self.pos = save;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>().map(Expr::Num).map_err(|_| ExprError {
            column: start + 1,
            message: format!("bad number '{text}'"),
        })
    }

    fn name(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if let Some(k) = self.vars.iter().position(|v| *v == name) {
            return Ok(Expr::Var(k));
        }
        if let Some(f) = Func::lookup(&name) {
            if !self.eat('(') {
                return Err(self.error(format!("expected '(' after {name}")));
            }
            let arg = self.sum()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        match name.as_str() {
            "pi" => Ok(Expr::Num(std::f64::consts::PI)),
            "e" => Ok(Expr::Num(std::f64::consts::E)),
            _ => Err(ExprError {
                column: start + 1,
                message: format!("unknown name '{name}'"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, vars: &[&str], vals: &[f64]) -> f64 {
        parse(src, vars).unwrap().eval(vals)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", &[], &[]), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2", &[], &[]), 512.0);
        assert_eq!(ev("-x^2", &["x"], &[3.0]), -9.0);
        assert_eq!(ev("(1 - 2) - 3", &[], &[]), -4.0);
        assert_eq!(ev("8 / 4 / 2", &[], &[]), 1.0);
        assert_eq!(ev("2*-3", &[], &[]), -6.0);
    }

    #[test]
    fn functions_constants_variables() {
        let v = ev(
            "K*sin(phi) + cos(pi) + 1.5e1 + x",
            &["x", "K", "phi"],
            &[1.0, 2.0, 0.0],
        );
        assert_eq!(v, -1.0 + 15.0 + 1.0);
        assert!((ev("ln(e)", &[], &[]) - 1.0).abs() < 1e-15);
        assert_eq!(ev("x^2", &["x"], &[0.1]), 0.1 * 0.1);
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse("sin(", &[]).unwrap_err();
        assert_eq!(e.column, 5);
        let e = parse("1 + q", &["x"]).unwrap_err();
        assert_eq!((e.column, e.message.as_str()), (5, "unknown name 'q'"));
        assert!(parse("1 2", &[]).is_err());
        assert!(parse("", &[]).is_err());
        assert!(parse("sin x", &["x"]).is_err());
        assert!(parse("(1", &[]).is_err());
    }
}
