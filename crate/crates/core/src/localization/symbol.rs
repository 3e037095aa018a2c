//! Symbols `a(u, ξ)` on `[0,1]^{2d}` and a small expression language for them.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := number | var | func '(' expr ')' | '(' expr ')' | '-' factor
//! func   := sin | cos | exp | step          step(t) = 1 if t ≥ 0 else 0
//! var    := x1 .. xd | xi1 .. xid
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::C64;
use crate::quadrature::unit_cube_points;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Step,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Ast {
    Num(f64),
    /// `x_{axis+1}` when `time`, else `xi_{axis+1}`.
    Var {
        time: bool,
        axis: usize,
    },
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Call(Func, Box<Ast>),
}

impl Ast {
    pub fn eval(&self, x: &[f64], xi: &[f64]) -> f64 {
        match self {
            Ast::Num(v) => *v,
            Ast::Var { time: true, axis } => x[*axis],
            Ast::Var { time: false, axis } => xi[*axis],
            Ast::Neg(a) => -a.eval(x, xi),
            Ast::Add(a, b) => a.eval(x, xi) + b.eval(x, xi),
            Ast::Sub(a, b) => a.eval(x, xi) - b.eval(x, xi),
            Ast::Mul(a, b) => a.eval(x, xi) * b.eval(x, xi),
            Ast::Div(a, b) => a.eval(x, xi) / b.eval(x, xi),
            Ast::Call(f, a) => {
                let t = a.eval(x, xi);
                match f {
                    Func::Sin => t.sin(),
                    Func::Cos => t.cos(),
                    Func::Exp => t.exp(),
                    Func::Step => {
                        if t >= 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    }
                }
            }
        }
    }

    fn has_step(&self) -> bool {
        match self {
            Ast::Num(_) | Ast::Var { .. } => false,
            Ast::Neg(a) => a.has_step(),
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) => a.has_step() || b.has_step(),
            Ast::Call(f, a) => *f == Func::Step || a.has_step(),
        }
    }

    fn constant_value(&self) -> Option<f64> {
        self.is_closed().then(|| self.eval(&[], &[]))
    }

    fn is_closed(&self) -> bool {
        match self {
            Ast::Num(_) => true,
            Ast::Var { .. } => false,
            Ast::Neg(a) | Ast::Call(_, a) => a.is_closed(),
            Ast::Add(a, b) | Ast::Sub(a, b) | Ast::Mul(a, b) | Ast::Div(a, b) => a.is_closed() && b.is_closed(),
        }
    }
}

/// One term `c · exp(2πi (pᵀu + qᵀξ))` of a trigonometric polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub p: Vec<i32>,
    pub q: Vec<i32>,
    pub coef: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SymbolFn {
    Constant(f64),
    /// Indicator of `Π [lo_i, hi_i)`, time axes first.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    TrigPoly {
        d: usize,
        terms: Vec<TrigTerm>,
    },
    Expr {
        d: usize,
        text: String,
        ast: Ast,
    },
}

impl SymbolFn {
    /// Indicator of `[x_lo, x_hi) × [xi_lo, xi_hi)` per axis.
    pub fn box_indicator(x: &[(f64, f64)], xi: &[(f64, f64)]) -> Self {
        let lo = x.iter().chain(xi).map(|r| r.0).collect();
        let hi = x.iter().chain(xi).map(|r| r.1).collect();
        SymbolFn::Box { lo, hi }
    }

    /// Evaluate at scaled time `u ∈ [0,1)^d` and frequency `ξ ∈ [0,1)^d`.
    pub fn eval(&self, u: &[f64], xi: &[f64]) -> C64 {
        match self {
            SymbolFn::Constant(c) => C64::new(*c, 0.0),
            SymbolFn::Box { lo, hi } => {
                let d = u.len();
                let inside = (0..d).all(|i| u[i] >= lo[i] && u[i] < hi[i])
                    && (0..d).all(|i| xi[i] >= lo[d + i] && xi[i] < hi[d + i]);
                C64::new(if inside { 1.0 } else { 0.0 }, 0.0)
            }
            SymbolFn::TrigPoly { terms, .. } => terms
                .iter()
                .map(|t| {
                    let ph: f64 = t.p.iter().zip(u).map(|(a, b)| *a as f64 * b).sum::<f64>()
                        + t.q.iter().zip(xi).map(|(a, b)| *a as f64 * b).sum::<f64>();
                    t.coef * C64::from_polar(1.0, 2.0 * PI * ph)
                })
                .sum(),
            SymbolFn::Expr { ast, .. } => C64::new(ast.eval(u, xi), 0.0),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            SymbolFn::TrigPoly { terms, .. } => terms.iter().all(|t| {
                let conj_coef: C64 = terms
                    .iter()
                    .filter(|s| {
                        s.p.iter().zip(&t.p).all(|(a, b)| *a == -b) && s.q.iter().zip(&t.q).all(|(a, b)| *a == -b)
                    })
                    .map(|s| s.coef)
                    .sum();
                let own: C64 = terms.iter().filter(|s| s.p == t.p && s.q == t.q).map(|s| s.coef).sum();
                (own - conj_coef.conj()).norm() <= 1e-14 * (1.0 + own.norm())
            }),
            _ => true,
        }
    }

    /// Discontinuous symbols get a looser quadrature tolerance.
    pub fn is_discontinuous(&self) -> bool {
        match self {
            SymbolFn::Box { .. } => true,
            SymbolFn::Expr { ast, .. } => ast.has_step(),
            _ => false,
        }
    }

    /// Dimension the symbol was built for; `None` for constants.
    pub fn dim(&self) -> Option<usize> {
        match self {
            SymbolFn::Constant(_) => None,
            SymbolFn::Box { lo, .. } => Some(lo.len() / 2),
            SymbolFn::TrigPoly { d, .. } | SymbolFn::Expr { d, .. } => Some(*d),
        }
    }

    /// `(inf, sup)` of the real part, exact for builtins and sampled on a
    /// midpoint grid for expressions.
    pub fn range(&self, d: usize) -> (f64, f64) {
        match self {
            SymbolFn::Constant(c) => (*c, *c),
            SymbolFn::Box { .. } => (0.0, 1.0),
            SymbolFn::TrigPoly { terms, .. } => {
                let s: f64 = terms.iter().map(|t| t.coef.norm()).sum();
                let (lo, hi) = sampled_range(self, d, 64);
                (lo.max(-s), hi.min(s))
            }
            SymbolFn::Expr { .. } => sampled_range(self, d, 64),
        }
    }

    /// Check finiteness on a sampling grid and return the sup of `|a|`.
    pub fn check_bounded(&self, d: usize) -> Result<f64> {
        let m = if d == 1 { 256 } else { 16 };
        let mut sup = 0.0_f64;
        for p in unit_cube_points(2 * d, m) {
            let v = self.eval(&p[..d], &p[d..]);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::UnboundedSymbol(format!("non-finite value at {p:?}")));
            }
            sup = sup.max(v.norm());
        }
        Ok(sup)
    }
}

fn sampled_range(s: &SymbolFn, d: usize, m1: usize) -> (f64, f64) {
    let m = if d == 1 { m1 * 4 } else { 16 };
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in unit_cube_points(2 * d, m) {
        let v = s.eval(&p[..d], &p[d..]).re;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    d: usize,
    tok: Tok,
    tok_start: usize,
}

fn variable_names(d: usize) -> Vec<String> {
    (1..=d).map(|i| format!("x{i}")).chain((1..=d).map(|i| format!("xi{i}"))).collect()
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, d: usize) -> Result<Self> {
        let mut p = Parser { src, pos: 0, d, tok: Tok::End, tok_start: 0 };
        p.advance()?;
        Ok(p)
    }

    fn err<T>(&self, expected: &[&str]) -> Result<T> {
        Err(Error::Parse { offset: self.tok_start, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn advance(&mut self) -> Result<()> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos >= bytes.len() {
            self.tok = Tok::End;
            return Ok(());
        }
        let c = bytes[self.pos];
        if c.is_ascii_digit() || c == b'.' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
                self.pos += 1;
            }
            if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
                let save = self.pos;
                self.pos += 1;
                if self.pos < bytes.len() && (bytes[self.pos] == b'+' || bytes[self.pos] == b'-') {
                    self.pos += 1;
                }
                if self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                    while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                        self.pos += 1;
                    }
                } else {
                    self.pos = save;
                }
            }
            let text = &self.src[start..self.pos];
            match text.parse::<f64>() {
                Ok(v) => self.tok = Tok::Num(v),
                Err(_) => return self.err(&["number"]),
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            self.tok = Tok::Ident(self.src[start..self.pos].to_string());
        } else if b"+-*/()".contains(&c) {
            self.pos += 1;
            self.tok = Tok::Op(c as char);
        } else {
            return self.err(&["number", "variable", "function", "(", "-"]);
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Op('+') => {
                    self.advance()?;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Op('-') => {
                    self.advance()?;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.factor()?;
        loop {
            match self.tok {
                Tok::Op('*') => {
                    self.advance()?;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Op('/') => {
                    self.advance()?;
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Ast> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Ast::Num(v))
            }
            Tok::Op('-') => {
                self.advance()?;
                Ok(Ast::Neg(Box::new(self.factor()?)))
            }
            Tok::Op('(') => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_close()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    "step" => Some(Func::Step),
                    _ => None,
                };
                if let Some(f) = func {
                    self.advance()?;
                    if self.tok != Tok::Op('(') {
                        return self.err(&["("]);
                    }
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect_close()?;
                    return Ok(Ast::Call(f, Box::new(arg)));
                }
                let var = self.variable(&name)?;
                self.advance()?;
                Ok(var)
            }
            _ => self.err(&["number", "variable", "function", "(", "-"]),
        }
    }

    fn variable(&self, name: &str) -> Result<Ast> {
        let parse_axis =
            |rest: &str| rest.parse::<usize>().ok().filter(|&i| i >= 1 && i <= self.d && !rest.starts_with('0'));
        let found = if let Some(rest) = name.strip_prefix("xi") {
            parse_axis(rest).map(|i| Ast::Var { time: false, axis: i - 1 })
        } else if let Some(rest) = name.strip_prefix('x') {
            parse_axis(rest).map(|i| Ast::Var { time: true, axis: i - 1 })
        } else {
            None
        };
        found.ok_or_else(|| Error::UnknownVariable { name: name.to_string(), valid: variable_names(self.d) })
    }

    fn expect_close(&mut self) -> Result<()> {
        if self.tok != Tok::Op(')') {
            return self.err(&[")"]);
        }
        self.advance()
    }
}

/// Parse a symbol expression over `x1..xd`, `xi1..xid`. Closed expressions
/// collapse to [`SymbolFn::Constant`].
pub fn parse_symbol(text: &str, d: usize) -> Result<SymbolFn> {
    let mut p = Parser::new(text, d)?;
    let ast = p.expr()?;
    if p.tok != Tok::End {
        return p.err(&["+", "-", "*", "/", "end of input"]);
    }
    if let Some(c) = ast.constant_value() {
        return Ok(SymbolFn::Constant(c));
    }
    Ok(SymbolFn::Expr { d, text: text.to_string(), ast })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants() {
        assert_eq!(parse_symbol("1", 1).unwrap(), SymbolFn::Constant(1.0));
        assert_eq!(parse_symbol(" 2 * (3 - 1.5e0) ", 2).unwrap(), SymbolFn::Constant(3.0));
        assert_eq!(parse_symbol("--2", 1).unwrap(), SymbolFn::Constant(2.0));
    }

    #[test]
    fn trig_product() {
        let s = parse_symbol("sin(6.283185307*x1)*sin(6.283185307*xi1)", 1).unwrap();
        match &s {
            SymbolFn::Expr { ast: Ast::Mul(a, b), .. } => {
                assert!(matches!(**a, Ast::Call(Func::Sin, _)));
                assert!(matches!(**b, Ast::Call(Func::Sin, _)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let v = s.eval(&[0.25], &[0.25]).re;
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn step_box() {
        let s = parse_symbol("step(0.5 - x1)*step(0.5 - xi1)", 1).unwrap();
        assert!(s.is_discontinuous());
        assert_eq!(s.eval(&[0.2], &[0.4]).re, 1.0);
        assert_eq!(s.eval(&[0.2], &[0.6]).re, 0.0);
        assert_eq!(s.eval(&[0.5], &[0.5]).re, 1.0);
    }

    #[test]
    fn errors() {
        match parse_symbol("sin(x1", 1) {
            Err(Error::Parse { offset, expected }) => {
                assert_eq!(offset, 6);
                assert_eq!(expected, vec![")".to_string()]);
            }
            other => panic!("{other:?}"),
        }
        match parse_symbol("x2 + 1", 1) {
            Err(Error::UnknownVariable { name, valid }) => {
                assert_eq!(name, "x2");
                assert_eq!(valid, vec!["x1", "xi1"]);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_symbol("1 +", 1), Err(Error::Parse { offset: 3, .. })));
        assert!(matches!(parse_symbol("1 $", 1), Err(Error::Parse { offset: 2, .. })));
        assert!(matches!(parse_symbol("1 2", 1), Err(Error::Parse { offset: 2, .. })));
    }

    #[test]
    fn unbounded_detected() {
        let s = parse_symbol("1/(x1 - x1)", 1).unwrap();
        assert!(matches!(s.check_bounded(1), Err(Error::UnboundedSymbol(_))));
        assert!(parse_symbol("cos(x1)", 1).unwrap().check_bounded(1).unwrap() <= 1.0);
    }

    #[test]
    fn trig_poly_reality() {
        let real = SymbolFn::TrigPoly {
            d: 1,
            terms: vec![
                TrigTerm { p: vec![1], q: vec![0], coef: C64::new(0.5, 0.25) },
                TrigTerm { p: vec![-1], q: vec![0], coef: C64::new(0.5, -0.25) },
            ],
        };
        assert!(real.is_real());
        assert!(real.eval(&[0.3], &[0.7]).im.abs() < 1e-15);
        let complex =
            SymbolFn::TrigPoly { d: 1, terms: vec![TrigTerm { p: vec![1], q: vec![0], coef: C64::new(1.0, 0.0) }] };
        assert!(!complex.is_real());
    }
}
