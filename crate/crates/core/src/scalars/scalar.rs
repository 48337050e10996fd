//! `Scalar`: an exact rational function or a numeric expression tree.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_traits::One;
use thiserror::Error;

use super::poly::{Var, Q};
use super::ratfunc::{RatEvalError, RatFunc};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Arctan,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Arctan => "arctan",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "arctan" => Func::Arctan,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// Expression tree whose leaves are exact rational functions.
#[derive(Clone, PartialEq)]
pub enum Expr {
    Leaf(RatFunc),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Neg(Arc<Expr>),
    Pow(Arc<Expr>, i32),
    Call(Func, Arc<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("denominator vanishes at the point")]
    DenominatorVanishes,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numeric scalar cannot be evaluated exactly")]
    NotExact,
    #[error("variable `{0}` not bound at the point")]
    MissingVariable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation needs an exact scalar")]
    UnsupportedMode,
}

impl From<RatEvalError> for EvalError {
    fn from(e: RatEvalError) -> Self {
        match e {
            RatEvalError::DenominatorVanishes => EvalError::DenominatorVanishes,
            RatEvalError::MissingVariable => EvalError::MissingVariable(String::new()),
        }
    }
}

#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(RatFunc),
    Numeric(Arc<Expr>),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<RatFunc> for Scalar {
    fn from(r: RatFunc) -> Self {
        Scalar::Exact(r)
    }
}

impl From<Q> for Scalar {
    fn from(c: Q) -> Self {
        Scalar::constant(c)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::constant(super::poly::q(n))
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(RatFunc::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(RatFunc::one())
    }

    pub fn constant(c: Q) -> Self {
        Scalar::Exact(RatFunc::constant(c))
    }

    pub fn var(v: &Var) -> Self {
        Scalar::Exact(RatFunc::var(v))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&RatFunc> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Numeric(_) => None,
        }
    }

    /// True only for an exact zero; numeric scalars are never decided.
    pub fn is_zero(&self) -> bool {
        matches!(self, Scalar::Exact(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Exact(r) if r.as_constant().is_some_and(|c| c.is_one()))
    }

    /// Exact zero test; `None` for numeric scalars.
    pub fn decide_zero(&self) -> Option<bool> {
        self.as_exact().map(|r| r.is_zero())
    }

    pub fn normalize(&self) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Exact(_) => Ok(self.clone()),
            Scalar::Numeric(_) => Err(ScalarError::UnsupportedMode),
        }
    }

    fn tree(&self) -> Arc<Expr> {
        match self {
            Scalar::Exact(r) => Arc::new(Expr::Leaf(r.clone())),
            Scalar::Numeric(e) => e.clone(),
        }
    }

    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.add(b)),
            _ if self.is_zero() => other.clone(),
            _ if other.is_zero() => self.clone(),
            _ => Scalar::Numeric(Arc::new(Expr::Add(self.tree(), other.tree()))),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.sub(b)),
            _ if other.is_zero() => self.clone(),
            _ if self.is_zero() => other.neg(),
            _ => Scalar::Numeric(Arc::new(Expr::Sub(self.tree(), other.tree()))),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.mul(b)),
            _ if self.is_zero() || other.is_zero() => Scalar::zero(),
            _ if self.is_one() => other.clone(),
            _ if other.is_one() => self.clone(),
            _ => Scalar::Numeric(Arc::new(Expr::Mul(self.tree(), other.tree()))),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(a.neg()),
            Scalar::Numeric(e) => Scalar::Numeric(Arc::new(Expr::Neg(e.clone()))),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.div(b).unwrap()),
            _ if self.is_zero() => Scalar::zero(),
            _ if other.is_one() => self.clone(),
            _ => Scalar::Numeric(Arc::new(Expr::Div(self.tree(), other.tree()))),
        })
    }

    pub fn scale(&self, c: &Q) -> Scalar {
        self.mul(&Scalar::constant(c.clone()))
    }

    pub fn powi(&self, e: i32) -> Result<Scalar, ScalarError> {
        match self {
            Scalar::Exact(a) => a
                .powi(e)
                .map(Scalar::Exact)
                .ok_or(ScalarError::DivisionByZero),
            Scalar::Numeric(t) => Ok(match e {
                0 => Scalar::one(),
                1 => self.clone(),
                _ => Scalar::Numeric(Arc::new(Expr::Pow(t.clone(), e))),
            }),
        }
    }

    pub fn call(f: Func, arg: &Scalar) -> Scalar {
        Scalar::Numeric(Arc::new(Expr::Call(f, arg.tree())))
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        match self {
            Scalar::Exact(r) => r.vars(),
            Scalar::Numeric(e) => {
                let mut out = BTreeSet::new();
                e.collect_vars(&mut out);
                out
            }
        }
    }

    pub fn differentiate(&self, v: &Var) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.derivative(v)),
            Scalar::Numeric(e) => e.derivative(v),
        }
    }

    pub fn eval_q(&self, point: &dyn Fn(&Var) -> Option<Q>) -> Result<Q, EvalError> {
        match self {
            Scalar::Exact(r) => r.eval_q(point).map_err(|e| match e {
                RatEvalError::MissingVariable => {
                    let missing = r
                        .vars()
                        .into_iter()
                        .find(|v| point(v).is_none())
                        .map(|v| v.name().to_string())
                        .unwrap_or_default();
                    EvalError::MissingVariable(missing)
                }
                RatEvalError::DenominatorVanishes => EvalError::DenominatorVanishes,
            }),
            Scalar::Numeric(_) => Err(EvalError::NotExact),
        }
    }

    pub fn eval_f64(&self, point: &dyn Fn(&Var) -> Option<f64>) -> Result<f64, EvalError> {
        match self {
            Scalar::Exact(r) => Ok(r.eval_f64(point)?),
            Scalar::Numeric(e) => e.eval(point),
        }
    }

    /// Replaces variables by scalars; unmapped variables stay.
    pub fn substitute(&self, map: &HashMap<Var, Scalar>) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                let mut cache: HashMap<(Var, u32), Scalar> = HashMap::new();
                let mut power = |v: &Var, e: u32| -> Scalar {
                    if let Some(s) = cache.get(&(v.clone(), e)) {
                        return s.clone();
                    }
                    let base = map.get(v).cloned().unwrap_or_else(|| Scalar::var(v));
                    let s = base.powi(e as i32).expect("nonnegative power");
                    cache.insert((v.clone(), e), s.clone());
                    s
                };
                let num = sub_poly(r.numer(), &mut power);
                let den = sub_poly(r.denom(), &mut power);
                num.checked_div(&den).unwrap_or_else(|_| {
                    // The substituted denominator is identically zero.
                    Scalar::Numeric(Arc::new(Expr::Div(num.tree(), den.tree())))
                })
            }
            Scalar::Numeric(e) => e.substitute(map),
        }
    }

    /// Number of non-leaf nodes in the numeric tree (0 for exact scalars).
    pub fn internal_nodes(&self) -> usize {
        match self {
            Scalar::Exact(_) => 0,
            Scalar::Numeric(e) => e.internal_nodes(),
        }
    }
}

fn sub_poly(p: &super::poly::Poly, power: &mut dyn FnMut(&Var, u32) -> Scalar) -> Scalar {
    let mut acc = Scalar::zero();
    for (m, c) in p.terms() {
        let mut t = Scalar::constant(c.clone());
        for (v, e) in m.factors() {
            t = t.mul(&power(v, *e));
        }
        acc = acc.add(&t);
    }
    acc
}

impl Expr {
    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Leaf(r) => out.extend(r.vars()),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_vars(out),
        }
    }

    fn internal_nodes(&self) -> usize {
        match self {
            Expr::Leaf(_) => 0,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.internal_nodes() + b.internal_nodes()
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.internal_nodes(),
        }
    }

    fn scalar(self: &Arc<Self>) -> Scalar {
        match &**self {
            Expr::Leaf(r) => Scalar::Exact(r.clone()),
            _ => Scalar::Numeric(self.clone()),
        }
    }

    fn derivative(self: &Arc<Self>, v: &Var) -> Scalar {
        match &**self {
            Expr::Leaf(r) => Scalar::Exact(r.derivative(v)),
            Expr::Add(a, b) => a.derivative(v).add(&b.derivative(v)),
            Expr::Sub(a, b) => a.derivative(v).sub(&b.derivative(v)),
            Expr::Mul(a, b) => {
                let (sa, sb) = (a.scalar(), b.scalar());
                a.derivative(v).mul(&sb).add(&sa.mul(&b.derivative(v)))
            }
            Expr::Div(a, b) => {
                let (sa, sb) = (a.scalar(), b.scalar());
                let num = a.derivative(v).mul(&sb).sub(&sa.mul(&b.derivative(v)));
                num.checked_div(&sb.mul(&sb))
                    .expect("denominator of a numeric quotient is not an exact zero")
            }
            Expr::Neg(a) => a.derivative(v).neg(),
            Expr::Pow(a, k) => {
                let sa = a.scalar();
                let lower = sa.powi(k - 1).expect("nonzero base");
                Scalar::from(*k as i64).mul(&lower).mul(&a.derivative(v))
            }
            Expr::Call(f, a) => {
                let da = a.derivative(v);
                if da.is_zero() {
                    return Scalar::zero();
                }
                let sa = a.scalar();
                let outer = match f {
                    Func::Exp => Scalar::call(Func::Exp, &sa),
                    Func::Sin => Scalar::call(Func::Cos, &sa),
                    Func::Cos => Scalar::call(Func::Sin, &sa).neg(),
                    Func::Arctan => Scalar::one()
                        .checked_div(&Scalar::one().add(&sa.mul(&sa)))
                        .expect("1 + a² is not an exact zero"),
                    Func::Sqrt => Scalar::one()
                        .checked_div(&Scalar::from(2).mul(&Scalar::call(Func::Sqrt, &sa)))
                        .expect("numeric denominator"),
                };
                outer.mul(&da)
            }
        }
    }

    fn eval(&self, point: &dyn Fn(&Var) -> Option<f64>) -> Result<f64, EvalError> {
        let x = match self {
            Expr::Leaf(r) => r.eval_f64(point)?,
            Expr::Add(a, b) => a.eval(point)? + b.eval(point)?,
            Expr::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            Expr::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            Expr::Div(a, b) => {
                let d = b.eval(point)?;
                if d == 0.0 {
                    return Err(EvalError::Domain("division by zero".into()));
                }
                a.eval(point)? / d
            }
            Expr::Neg(a) => -a.eval(point)?,
            Expr::Pow(a, k) => {
                let b = a.eval(point)?;
                if b == 0.0 && *k < 0 {
                    return Err(EvalError::Domain("negative power of zero".into()));
                }
                b.powi(*k)
            }
            Expr::Call(f, a) => {
                let y = a.eval(point)?;
                match f {
                    Func::Exp => y.exp(),
                    Func::Sin => y.sin(),
                    Func::Cos => y.cos(),
                    Func::Arctan => y.atan(),
                    Func::Sqrt => {
                        if y < 0.0 {
                            return Err(EvalError::Domain("sqrt of a negative number".into()));
                        }
                        y.sqrt()
                    }
                }
            }
        };
        if x.is_finite() {
            Ok(x)
        } else {
            Err(EvalError::Domain("non-finite value".into()))
        }
    }

    fn substitute(self: &Arc<Self>, map: &HashMap<Var, Scalar>) -> Scalar {
        match &**self {
            Expr::Leaf(r) => Scalar::Exact(r.clone()).substitute(map),
            Expr::Add(a, b) => a.substitute(map).add(&b.substitute(map)),
            Expr::Sub(a, b) => a.substitute(map).sub(&b.substitute(map)),
            Expr::Mul(a, b) => a.substitute(map).mul(&b.substitute(map)),
            Expr::Div(a, b) => {
                let (sa, sb) = (a.substitute(map), b.substitute(map));
                sa.checked_div(&sb)
                    .unwrap_or_else(|_| Scalar::Numeric(Arc::new(Expr::Div(sa.tree(), sb.tree()))))
            }
            Expr::Neg(a) => a.substitute(map).neg(),
            Expr::Pow(a, k) => {
                let sa = a.substitute(map);
                sa.powi(*k)
                    .unwrap_or_else(|_| Scalar::Numeric(Arc::new(Expr::Pow(sa.tree(), *k))))
            }
            Expr::Call(f, a) => Scalar::call(*f, &a.substitute(map)),
        }
    }
}

fn leaf_text(r: &RatFunc) -> String {
    let simple = r.is_polynomial()
        && r.numer().len() <= 1
        && !r.numer().terms().any(|(m, c)| {
            use num_traits::Signed;
            c.is_negative() || (!m.is_one() && !c.is_one()) || !c.is_integer()
        });
    if simple {
        r.to_string()
    } else {
        format!("({r})")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Leaf(r) => f.write_str(&leaf_text(r)),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Pow(a, k) => write!(f, "{a}^{k}"),
            Expr::Call(g, a) => {
                let inner = a.to_string();
                if inner.starts_with('(') && inner.ends_with(')') && balanced_outer(&inner) {
                    write!(f, "{}{inner}", g.name())
                } else {
                    write!(f, "{}({inner})", g.name())
                }
            }
        }
    }
}

/// True when the first parenthesis closes at the last character.
fn balanced_outer(s: &str) -> bool {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 && i != s.len() - 1 {
                    return false;
                }
            }
            _ => {}
        }
    }
    depth == 0
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Numeric(e) => write!(f, "{e}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $call:ident) => {
        impl std::ops::$tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$call(rhs)
            }
        }
        impl std::ops::$tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$call(&rhs)
            }
        }
    };
}

scalar_binop!(Add, add, add);
scalar_binop!(Sub, sub, sub);
scalar_binop!(Mul, mul, mul);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

impl std::ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(&self)
    }
}
