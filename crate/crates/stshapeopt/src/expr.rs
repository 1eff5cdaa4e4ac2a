//! A small expression language for sources and objective integrands.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | name | name '(' expr ')' | '(' expr ')'
//! names   := t | x | xi | u | pi        functions := sqrt sin cos exp ln abs
//! ```
//!
//! `x` is the physical abscissa, `xi = φ_t⁻¹(x)` the reference one, `u` the
//! state (objective integrands only). Expressions are evaluated with dual
//! numbers, giving `∂/∂x` (through `xi` as well) and `∂/∂u` exactly.

use std::fmt;
use std::sync::Arc;

use crate::functions::{Integrand, ScalarField};
use crate::motion::{Motion, Motion1D};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    /// 1-based character column of the problem.
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
pub enum Var {
    T,
    X,
    Xi,
    U,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sqrt,
    Sin,
    Cos,
    Exp,
    Ln,
    Abs,
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// Value with derivatives along `x` and `u`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub v: f64,
    pub dx: f64,
    pub du: f64,
}

impl Dual {
    fn constant(v: f64) -> Self {
        Self { v, dx: 0.0, du: 0.0 }
    }

    /// Chain rule for a scalar function with value `v` and slope `d`.
    fn chain(self, v: f64, d: f64) -> Self {
        Self { v, dx: d * self.dx, du: d * self.du }
    }
}

/// Point of evaluation. `dxi_dx` is `1/∇φ_t(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Env {
    pub t: f64,
    pub x: f64,
    pub xi: f64,
    pub dxi_dx: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    text: String,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Self, ExprError> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0, len: text.chars().count() };
        let root = p.expr()?;
        if let Some((col, tok)) = p.tokens.get(p.pos) {
            return Err(ExprError { column: *col, message: format!("unexpected {tok:?}") });
        }
        Ok(Self { root, text: text.trim().to_string() })
    }

    pub fn uses(&self, var: Var) -> bool {
        fn walk(n: &Node, var: Var) -> bool {
            match n {
                Node::Num(_) => false,
                Node::Var(v) => *v == var,
                Node::Neg(a) | Node::Call(_, a) => walk(a, var),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) | Node::Pow(a, b) => {
                    walk(a, var) || walk(b, var)
                }
            }
        }
        walk(&self.root, var)
    }

    /// True for an expression that is literally the number zero.
    pub fn is_zero_literal(&self) -> bool {
        self.root == Node::Num(0.0)
    }

    pub fn eval(&self, env: &Env) -> Dual {
        eval(&self.root, env)
    }
}

fn eval(n: &Node, env: &Env) -> Dual {
    match n {
        Node::Num(v) => Dual::constant(*v),
        Node::Var(Var::T) => Dual::constant(env.t),
        Node::Var(Var::X) => Dual { v: env.x, dx: 1.0, du: 0.0 },
        Node::Var(Var::Xi) => Dual { v: env.xi, dx: env.dxi_dx, du: 0.0 },
        Node::Var(Var::U) => Dual { v: env.u, dx: 0.0, du: 1.0 },
        Node::Neg(a) => {
            let a = eval(a, env);
            Dual { v: -a.v, dx: -a.dx, du: -a.du }
        }
        Node::Add(a, b) => {
            let (a, b) = (eval(a, env), eval(b, env));
            Dual { v: a.v + b.v, dx: a.dx + b.dx, du: a.du + b.du }
        }
        Node::Sub(a, b) => {
            let (a, b) = (eval(a, env), eval(b, env));
            Dual { v: a.v - b.v, dx: a.dx - b.dx, du: a.du - b.du }
        }
        Node::Mul(a, b) => {
            let (a, b) = (eval(a, env), eval(b, env));
            Dual { v: a.v * b.v, dx: a.dx * b.v + a.v * b.dx, du: a.du * b.v + a.v * b.du }
        }
        Node::Div(a, b) => {
            let (a, b) = (eval(a, env), eval(b, env));
            let q = a.v / b.v;
            Dual { v: q, dx: (a.dx - q * b.dx) / b.v, du: (a.du - q * b.du) / b.v }
        }
        Node::Pow(a, b) => {
            let (a, b) = (eval(a, env), eval(b, env));
            let v = a.v.powf(b.v);
            if b.dx == 0.0 && b.du == 0.0 {
                // Constant exponent: valid for negative bases too.
                let d = if b.v == 0.0 { 0.0 } else { b.v * a.v.powf(b.v - 1.0) };
                a.chain(v, d)
            } else {
                let ln = a.v.ln();
                Dual {
                    v,
                    dx: v * (b.dx * ln + b.v * a.dx / a.v),
                    du: v * (b.du * ln + b.v * a.du / a.v),
                }
            }
        }
        Node::Call(f, a) => {
            let a = eval(a, env);
            match f {
                Func::Sqrt => {
                    let s = a.v.sqrt();
                    a.chain(s, 0.5 / s)
                }
                Func::Sin => a.chain(a.v.sin(), a.v.cos()),
                Func::Cos => a.chain(a.v.cos(), -a.v.sin()),
                Func::Exp => {
                    let e = a.v.exp();
                    a.chain(e, e)
                }
                Func::Ln => a.chain(a.v.ln(), 1.0 / a.v),
                Func::Abs => a.chain(a.v.abs(), if a.v < 0.0 { -1.0 } else { 1.0 }),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Op(char),
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut k = i + 1;
                if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                    k += 1;
                }
                if k < chars.len() && chars[k].is_ascii_digit() {
                    i = k;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s
                .parse::<f64>()
                .map_err(|_| ExprError { column: col, message: format!("bad number `{s}`") })?;
            out.push((col, Tok::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((col, Tok::Name(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((col, Tok::Op(c)));
            i += 1;
        } else {
            return Err(ExprError { column: col, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some((_, Tok::Op(c))) => Some(*c),
            _ => None,
        }
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len + 1, |t| t.0)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { column: self.column(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' { Node::Add(lhs.into(), rhs.into()) } else { Node::Sub(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' { Node::Mul(lhs.into(), rhs.into()) } else { Node::Div(lhs.into(), rhs.into()) };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Node::Neg(self.unary()?.into()));
        }
        if self.peek_op() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(base.into(), exp.into()));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        let Some((_, tok)) = self.tokens.get(self.pos).cloned() else {
            return self.error("unexpected end of expression");
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return self.error("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Tok::Name(name) => {
                let func = match name.as_str() {
                    "sqrt" => Some(Func::Sqrt),
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    "ln" => Some(Func::Ln),
                    "abs" => Some(Func::Abs),
                    _ => None,
                };
                if let Some(func) = func {
                    self.pos += 1;
                    if self.peek_op() != Some('(') {
                        return self.error(format!("expected `(` after `{name}`"));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    if self.peek_op() != Some(')') {
                        return self.error("expected `)`");
                    }
                    self.pos += 1;
                    return Ok(Node::Call(func, arg.into()));
                }
                let node = match name.as_str() {
                    "t" => Node::Var(Var::T),
                    "x" => Node::Var(Var::X),
                    "xi" => Node::Var(Var::Xi),
                    "u" => Node::Var(Var::U),
                    "pi" => Node::Num(std::f64::consts::PI),
                    _ => return self.error(format!("unknown name `{name}`")),
                };
                self.pos += 1;
                Ok(node)
            }
            Tok::Op(c) => self.error(format!("unexpected `{c}`")),
        }
    }
}

fn env(motion: &dyn Motion<1>, t: f64, x: f64, u: f64, needs_xi: bool) -> Env {
    if needs_xi {
        let xi = motion.inverse1(t, x).unwrap_or(f64::NAN);
        Env { t, x, xi, dxi_dx: 1.0 / motion.grad1(t, xi), u }
    } else {
        Env { t, x, xi: x, dxi_dx: 1.0, u }
    }
}

/// A source term `f(t, x)` given by an expression without `u`.
#[derive(Clone)]
pub struct ExprField {
    expr: Expr,
    motion: Arc<dyn Motion<1>>,
    needs_xi: bool,
}

impl ExprField {
    pub fn new(expr: Expr, motion: Arc<dyn Motion<1>>) -> Result<Self, ExprError> {
        if expr.uses(Var::U) {
            return Err(ExprError { column: 1, message: "a source cannot depend on `u`".into() });
        }
        let needs_xi = expr.uses(Var::Xi);
        Ok(Self { expr, motion, needs_xi })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl ScalarField for ExprField {
    fn value(&self, t: f64, x: f64) -> f64 {
        self.expr.eval(&env(&*self.motion, t, x, 0.0, self.needs_xi)).v
    }
    fn grad_x(&self, t: f64, x: f64) -> f64 {
        self.expr.eval(&env(&*self.motion, t, x, 0.0, self.needs_xi)).dx
    }
}

/// An objective integrand `j(t, x, u)` given by an expression.
#[derive(Clone)]
pub struct ExprIntegrand {
    expr: Expr,
    motion: Arc<dyn Motion<1>>,
    needs_xi: bool,
}

impl ExprIntegrand {
    pub fn new(expr: Expr, motion: Arc<dyn Motion<1>>) -> Self {
        let needs_xi = expr.uses(Var::Xi);
        Self { expr, motion, needs_xi }
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }
}

impl Integrand for ExprIntegrand {
    fn value(&self, t: f64, x: f64, u: f64) -> f64 {
        self.expr.eval(&env(&*self.motion, t, x, u, self.needs_xi)).v
    }
    fn du(&self, t: f64, x: f64, u: f64) -> f64 {
        self.expr.eval(&env(&*self.motion, t, x, u, self.needs_xi)).du
    }
    fn dx(&self, t: f64, x: f64, u: f64) -> f64 {
        self.expr.eval(&env(&*self.motion, t, x, u, self.needs_xi)).dx
    }
}
