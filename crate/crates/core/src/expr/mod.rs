//! Expression trees over chart coordinates.
//!
//! An [`Expr`] is an immutable, reference-counted tree. Constructors fold
//! constants and drop additive zeros and multiplicative ones; nothing else is
//! simplified. Zero tests are done by sampling (see [`crate::sampling`]).

mod parse;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use thiserror::Error;

pub use parse::{parse, parse_with_names, ParseError};

/// Unary functions recognised by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, v: f64) -> Option<f64> {
        match self {
            Func::Exp => Some(v.exp()),
            Func::Ln if v > 0.0 => Some(v.ln()),
            Func::Sqrt if v >= 0.0 => Some(v.sqrt()),
            Func::Sin => Some(v.sin()),
            Func::Cos => Some(v.cos()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, i32),
    Neg(Expr),
    Apply(Func, Expr),
}

#[derive(Clone, PartialEq)]
pub struct Expr(Arc<Inner>);

/// A node with the size of its expanded tree, saturating.
#[derive(PartialEq)]
struct Inner {
    node: Node,
    tree_size: u64,
}

/// Trees at least this large evaluate with shared subterms cached.
const MEMO_THRESHOLD: u64 = 1 << 12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("division by zero in `{subterm}`")]
    DivisionByZero { subterm: String },
    #[error("{func} of out-of-domain argument {arg} in `{subterm}`")]
    Domain {
        func: &'static str,
        arg: f64,
        subterm: String,
    },
    #[error("variable x{index} is not bound by a point of dimension {dim}")]
    Unbound { index: usize, dim: usize },
}

impl Expr {
    fn new(node: Node) -> Expr {
        let tree_size = match &node {
            Node::Const(_) | Node::Var(_) => 1,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => 1u64
                .saturating_add(a.0.tree_size)
                .saturating_add(b.0.tree_size),
            Node::Pow(a, _) | Node::Neg(a) | Node::Apply(_, a) => a.0.tree_size.saturating_add(1),
        };
        Expr(Arc::new(Inner { node, tree_size }))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn constant(c: f64) -> Expr {
        Expr::new(Node::Const(c))
    }

    pub fn zero() -> Expr {
        Expr::constant(0.0)
    }

    pub fn one() -> Expr {
        Expr::constant(1.0)
    }

    pub fn var(i: usize) -> Expr {
        Expr::new(Node::Var(i))
    }

    pub fn as_const(&self) -> Option<f64> {
        match self.0.node {
            Node::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_const_zero(&self) -> bool {
        self.as_const() == Some(0.0)
    }

    pub fn add(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if (x + y).is_finite() => Expr::constant(x + y),
            (Some(x), _) if x == 0.0 => b.clone(),
            (_, Some(y)) if y == 0.0 => a.clone(),
            _ => Expr::new(Node::Add(a.clone(), b.clone())),
        }
    }

    pub fn sub(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if (x - y).is_finite() => Expr::constant(x - y),
            (Some(x), _) if x == 0.0 => Expr::neg(b),
            (_, Some(y)) if y == 0.0 => a.clone(),
            _ => Expr::new(Node::Sub(a.clone(), b.clone())),
        }
    }

    pub fn mul(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if (x * y).is_finite() => Expr::constant(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Expr::zero(),
            (Some(x), _) if x == 1.0 => b.clone(),
            (_, Some(y)) if y == 1.0 => a.clone(),
            (Some(x), _) if x == -1.0 => Expr::neg(b),
            (_, Some(y)) if y == -1.0 => Expr::neg(a),
            _ => Expr::new(Node::Mul(a.clone(), b.clone())),
        }
    }

    pub fn div(a: &Expr, b: &Expr) -> Expr {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y != 0.0 && (x / y).is_finite() => Expr::constant(x / y),
            (Some(x), _) if x == 0.0 && !b.is_const_zero() => Expr::zero(),
            (_, Some(y)) if y == 1.0 => a.clone(),
            _ => Expr::new(Node::Div(a.clone(), b.clone())),
        }
    }

    pub fn powi(a: &Expr, k: i32) -> Expr {
        match (a.as_const(), k) {
            (_, 0) => Expr::one(),
            (_, 1) => a.clone(),
            (Some(x), _) if x.powi(k).is_finite() => Expr::constant(x.powi(k)),
            _ => Expr::new(Node::Pow(a.clone(), k)),
        }
    }

    pub fn neg(a: &Expr) -> Expr {
        match a.node() {
            Node::Const(c) => Expr::constant(-c),
            Node::Neg(inner) => inner.clone(),
            _ => Expr::new(Node::Neg(a.clone())),
        }
    }

    pub fn apply(f: Func, a: &Expr) -> Expr {
        if let Some(v) = a.as_const().and_then(|c| f.apply(c)) {
            if v.is_finite() {
                return Expr::constant(v);
            }
        }
        Expr::new(Node::Apply(f, a.clone()))
    }

    pub fn exp(&self) -> Expr {
        Expr::apply(Func::Exp, self)
    }

    pub fn ln(&self) -> Expr {
        Expr::apply(Func::Ln, self)
    }

    pub fn sin(&self) -> Expr {
        Expr::apply(Func::Sin, self)
    }

    pub fn cos(&self) -> Expr {
        Expr::apply(Func::Cos, self)
    }

    pub fn sqrt(&self) -> Expr {
        Expr::apply(Func::Sqrt, self)
    }

    pub fn pow(&self, k: i32) -> Expr {
        Expr::powi(self, k)
    }

    pub fn scale(&self, c: f64) -> Expr {
        Expr::mul(&Expr::constant(c), self)
    }

    /// Sum of a sequence; the empty sum is zero.
    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        terms
            .into_iter()
            .fold(Expr::zero(), |acc, t| Expr::add(&acc, &t))
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self.node() {
            Node::Const(_) => None,
            Node::Var(i) => Some(*i),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, y) => x.or(y),
                }
            }
            Node::Pow(a, _) | Node::Neg(a) | Node::Apply(_, a) => a.max_var(),
        }
    }

    /// Exact partial derivative with respect to variable `i`.
    pub fn diff(&self, i: usize) -> Expr {
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(j) => {
                if *j == i {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Add(a, b) => Expr::add(&a.diff(i), &b.diff(i)),
            Node::Sub(a, b) => Expr::sub(&a.diff(i), &b.diff(i)),
            Node::Mul(a, b) => Expr::add(&Expr::mul(&a.diff(i), b), &Expr::mul(a, &b.diff(i))),
            Node::Div(a, b) => {
                let da = a.diff(i);
                let db = b.diff(i);
                let first = Expr::div(&da, b);
                let second = Expr::div(&Expr::mul(a, &db), &Expr::powi(b, 2));
                Expr::sub(&first, &second)
            }
            Node::Pow(a, k) => {
                let outer = Expr::mul(&Expr::constant(*k as f64), &Expr::powi(a, k - 1));
                Expr::mul(&outer, &a.diff(i))
            }
            Node::Neg(a) => Expr::neg(&a.diff(i)),
            Node::Apply(f, a) => {
                let da = a.diff(i);
                if da.is_const_zero() {
                    return Expr::zero();
                }
                let outer = match f {
                    Func::Exp => self.clone(),
                    Func::Ln => Expr::div(&Expr::one(), a),
                    Func::Sin => a.cos(),
                    Func::Cos => Expr::neg(&a.sin()),
                    Func::Sqrt => Expr::div(&Expr::constant(0.5), self),
                };
                Expr::mul(&outer, &da)
            }
        }
    }

    /// Evaluates at `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        let mut scale = 0.0;
        self.eval_with(x, &mut scale)
    }

    /// Evaluates at `x` and returns the value together with the largest
    /// absolute value taken by any subterm (leaves included).
    pub fn eval_scaled(&self, x: &[f64]) -> Result<(f64, f64), EvalError> {
        let mut scale = 0.0;
        let v = self.eval_with(x, &mut scale)?;
        Ok((v, scale))
    }

    fn eval_with(&self, x: &[f64], scale: &mut f64) -> Result<f64, EvalError> {
        let mut memo = (self.0.tree_size >= MEMO_THRESHOLD).then(HashMap::new);
        self.eval_inner(x, scale, &mut memo)
    }

    /// Shared subterms are evaluated once per call.
    fn eval_inner(
        &self,
        x: &[f64],
        scale: &mut f64,
        memo: &mut Option<HashMap<*const Inner, f64>>,
    ) -> Result<f64, EvalError> {
        let key = Arc::as_ptr(&self.0);
        let shared = memo.is_some() && Arc::strong_count(&self.0) > 1;
        if shared {
            if let Some(&v) = memo.as_ref().and_then(|m| m.get(&key)) {
                return Ok(v);
            }
        }
        let mut ev = |e: &Expr| e.eval_inner(x, scale, memo);
        let v = match self.node() {
            Node::Const(c) => *c,
            Node::Var(i) => *x.get(*i).ok_or(EvalError::Unbound {
                index: i + 1,
                dim: x.len(),
            })?,
            Node::Add(a, b) => ev(a)? + ev(b)?,
            Node::Sub(a, b) => ev(a)? - ev(b)?,
            Node::Mul(a, b) => ev(a)? * ev(b)?,
            Node::Div(a, b) => {
                let num = ev(a)?;
                let den = ev(b)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero {
                        subterm: self.to_string(),
                    });
                }
                num / den
            }
            Node::Pow(a, k) => {
                let base = ev(a)?;
                if base == 0.0 && *k < 0 {
                    return Err(EvalError::DivisionByZero {
                        subterm: self.to_string(),
                    });
                }
                base.powi(*k)
            }
            Node::Neg(a) => -ev(a)?,
            Node::Apply(f, a) => {
                let arg = ev(a)?;
                f.apply(arg).ok_or_else(|| EvalError::Domain {
                    func: f.name(),
                    arg,
                    subterm: self.to_string(),
                })?
            }
        };
        let m = v.abs();
        if m > *scale || m.is_nan() {
            *scale = m;
        }
        if let (true, Some(m)) = (shared, memo.as_mut()) {
            m.insert(key, v);
        }
        Ok(v)
    }

    /// Renders with the given coordinate names (index `i` prints as
    /// `names[i]`, falling back to `x{i+1}`).
    pub fn display<'a>(&'a self, names: &'a [String]) -> Display<'a> {
        Display { expr: self, names }
    }

    /// Replaces every variable `i` by `subs[i]`.
    pub fn substitute(&self, subs: &[Expr]) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(i) => subs.get(*i).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(a, b) => Expr::add(&a.substitute(subs), &b.substitute(subs)),
            Node::Sub(a, b) => Expr::sub(&a.substitute(subs), &b.substitute(subs)),
            Node::Mul(a, b) => Expr::mul(&a.substitute(subs), &b.substitute(subs)),
            Node::Div(a, b) => Expr::div(&a.substitute(subs), &b.substitute(subs)),
            Node::Pow(a, k) => Expr::powi(&a.substitute(subs), *k),
            Node::Neg(a) => Expr::neg(&a.substitute(subs)),
            Node::Apply(f, a) => Expr::apply(*f, &a.substitute(subs)),
        }
    }
}

pub struct Display<'a> {
    expr: &'a Expr,
    names: &'a [String],
}

/// Grammar levels, loosest first.
#[derive(Clone, Copy, PartialEq, PartialOrd)]
enum Level {
    Sum,
    Term,
    Factor,
    Base,
}

impl Display<'_> {
    /// Writes `e` so that it parses back at `ctx`, adding parentheses only
    /// when the node binds more loosely. Left-associative chains stay flat.
    fn write(&self, e: &Expr, ctx: Level, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let own = match e.node() {
            Node::Add(..) | Node::Sub(..) => Level::Sum,
            Node::Mul(..) | Node::Div(..) => Level::Term,
            Node::Pow(..) => Level::Factor,
            _ => Level::Base,
        };
        if own < ctx {
            f.write_str("(")?;
            self.write(e, Level::Sum, f)?;
            return f.write_str(")");
        }
        match e.node() {
            Node::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => {
                write!(f, "-{:?}", -c)
            }
            Node::Const(c) => write!(f, "{c:?}"),
            Node::Var(i) => match self.names.get(*i) {
                Some(name) => f.write_str(name),
                None => write!(f, "x{}", i + 1),
            },
            Node::Add(a, b) => self.binary(a, " + ", b, Level::Sum, f),
            Node::Sub(a, b) => self.binary(a, " - ", b, Level::Sum, f),
            Node::Mul(a, b) => self.binary(a, "*", b, Level::Term, f),
            Node::Div(a, b) => self.binary(a, "/", b, Level::Term, f),
            Node::Pow(a, k) => {
                self.write(a, Level::Base, f)?;
                write!(f, "^{k}")
            }
            Node::Neg(a) => {
                f.write_str("-")?;
                self.write(a, Level::Base, f)
            }
            Node::Apply(func, a) => {
                write!(f, "{}(", func.name())?;
                self.write(a, Level::Sum, f)?;
                f.write_str(")")
            }
        }
    }

    fn binary(
        &self,
        a: &Expr,
        op: &str,
        b: &Expr,
        level: Level,
        f: &mut fmt::Formatter<'_>,
    ) -> fmt::Result {
        let right = if level == Level::Sum {
            Level::Term
        } else {
            Level::Factor
        };
        self.write(a, level, f)?;
        f.write_str(op)?;
        self.write(b, right, f)
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.expr, Level::Sum, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display {
            expr: self,
            names: &[],
        }
        .fmt(f)
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<f64> for Expr {
    fn from(c: f64) -> Expr {
        Expr::constant(c)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $ctor:path) => {
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $ctor(self, rhs)
            }
        }
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $ctor(&self, &rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $ctor(&self, rhs)
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $ctor(self, &rhs)
            }
        }
        impl $tr<f64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $ctor(self, &Expr::constant(rhs))
            }
        }
        impl $tr<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                $ctor(&self, &Expr::constant(rhs))
            }
        }
    };
}

binop!(Add, add, Expr::add);
binop!(Sub, sub, Expr::sub);
binop!(Mul, mul, Expr::mul);
binop!(Div, div, Expr::div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(&self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FieldError {
    #[error("variable x{index} out of range for arity {arity}")]
    VarOutOfRange { index: usize, arity: usize },
    #[error("point has {got} coordinates, field expects {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// An expression bound to a fixed number of chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    expr: Expr,
    arity: usize,
}

impl ScalarField {
    pub fn new(expr: Expr, arity: usize) -> Result<ScalarField, FieldError> {
        match expr.max_var() {
            Some(i) if i >= arity => Err(FieldError::VarOutOfRange {
                index: i + 1,
                arity,
            }),
            _ => Ok(ScalarField { expr, arity }),
        }
    }

    pub fn constant(c: f64, arity: usize) -> ScalarField {
        ScalarField {
            expr: Expr::constant(c),
            arity,
        }
    }

    pub fn coordinate(i: usize, arity: usize) -> Result<ScalarField, FieldError> {
        ScalarField::new(Expr::var(i), arity)
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn into_expr(self) -> Expr {
        self.expr
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64, FieldError> {
        if x.len() != self.arity {
            return Err(FieldError::PointDimension {
                expected: self.arity,
                got: x.len(),
            });
        }
        Ok(self.expr.eval(x)?)
    }

    pub fn differentiate(&self, i: usize) -> Result<ScalarField, FieldError> {
        if i >= self.arity {
            return Err(FieldError::VarOutOfRange {
                index: i + 1,
                arity: self.arity,
            });
        }
        Ok(ScalarField {
            expr: self.expr.diff(i),
            arity: self.arity,
        })
    }
}

/// True iff `|f(x)| <= tol * (1 + scale(x))` at every sample, where
/// `scale(x)` is the largest subterm magnitude of `f` at `x`.
pub fn is_zero_field(f: &ScalarField, samples: &[Vec<f64>], tol: f64) -> Result<bool, FieldError> {
    for x in samples {
        if x.len() != f.arity {
            return Err(FieldError::PointDimension {
                expected: f.arity,
                got: x.len(),
            });
        }
        let (v, scale) = f.expr.eval_scaled(x)?;
        if !(v.abs() <= tol * (1.0 + scale)) {
            return Ok(false);
        }
    }
    Ok(true)
}
