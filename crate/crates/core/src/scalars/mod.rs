//! Exact rational functions, numeric expression trees, charts, points and sample grids.

mod grid;
mod parse;
mod poly;
mod ratfunc;
mod scalar;

pub use grid::{default_grid, halton, product_grid, GridError, DEFAULT_GRID_CAP, DEFAULT_GRID_PER_DIM};
pub use parse::{parse, parse_in, ParseError};
pub use poly::{gcd, q, q_frac, Monomial, Poly, Var, Q};
pub use ratfunc::{q_to_f64, RatFunc};
pub use scalar::{EvalError, Expr, Func, Scalar, ScalarError};

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChartError {
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("duplicate variable `{0}`")]
    Duplicate(String),
}

/// Ordered coordinate list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    vars: Arc<[Var]>,
}

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Chart, ChartError> {
        let mut vars: Vec<Var> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            if !Var::is_valid_name(n) {
                return Err(ChartError::InvalidName(n.to_string()));
            }
            let v = Var::new(n);
            if vars.contains(&v) {
                return Err(ChartError::Duplicate(n.to_string()));
            }
            vars.push(v);
        }
        Ok(Chart { vars: vars.into() })
    }

    /// Panics on invalid names; for literals in code and tests.
    pub fn of(names: &[&str]) -> Chart {
        Chart::new(names).expect("valid chart")
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn var(&self, i: usize) -> &Var {
        &self.vars[i]
    }

    pub fn coord(&self, i: usize) -> Scalar {
        Scalar::var(&self.vars[i])
    }

    pub fn index_of(&self, v: &Var) -> Option<usize> {
        self.vars.iter().position(|w| w == v)
    }

    pub fn index_of_name(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|w| w.name() == name)
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart{:?}", &self.vars[..])
    }
}

/// Coordinate values a scalar can be evaluated at: `Q` exactly, `f64` numerically.
pub trait Coord: Clone + Send + Sync + 'static {
    fn eval(s: &Scalar, chart: &Chart, coords: &[Self]) -> Result<Self, EvalError>;
    fn from_q(c: &Q) -> Self;
    fn to_f64(&self) -> f64;
    fn label(&self) -> String;
}

impl Coord for Q {
    fn eval(s: &Scalar, chart: &Chart, coords: &[Q]) -> Result<Q, EvalError> {
        s.eval_q(&|v| chart.index_of(v).map(|i| coords[i].clone()))
    }
    fn from_q(c: &Q) -> Q {
        c.clone()
    }
    fn to_f64(&self) -> f64 {
        q_to_f64(self)
    }
    fn label(&self) -> String {
        self.to_string()
    }
}

impl Coord for f64 {
    fn eval(s: &Scalar, chart: &Chart, coords: &[f64]) -> Result<f64, EvalError> {
        s.eval_f64(&|v| chart.index_of(v).map(|i| coords[i]))
    }
    fn from_q(c: &Q) -> f64 {
        q_to_f64(c)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn label(&self) -> String {
        format!("{self}")
    }
}

/// Point of a chart with rational or floating coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<F> {
    pub chart: Chart,
    pub coords: Vec<F>,
}

impl<F: Coord> Point<F> {
    pub fn new(chart: &Chart, coords: Vec<F>) -> Point<F> {
        assert_eq!(chart.dim(), coords.len(), "point arity must match chart");
        Point {
            chart: chart.clone(),
            coords,
        }
    }

    pub fn eval(&self, s: &Scalar) -> Result<F, EvalError> {
        F::eval(s, &self.chart, &self.coords)
    }

    pub fn labels(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.label()).collect()
    }

    pub fn to_f64(&self) -> Point<f64> {
        Point {
            chart: self.chart.clone(),
            coords: self.coords.iter().map(|c| c.to_f64()).collect(),
        }
    }
}

impl Point<Q> {
    pub fn from_ints(chart: &Chart, coords: &[i64]) -> Point<Q> {
        Point::new(chart, coords.iter().map(|&c| q(c)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_rejects_duplicates_and_bad_names() {
        assert!(Chart::new(&["x", "x"]).is_err());
        assert!(Chart::new(&["1x"]).is_err());
        assert_eq!(Chart::of(&["t", "s"]).dim(), 2);
    }

    #[test]
    fn evaluate_examples() {
        let c = Chart::of(&["x1", "x2"]);
        let s = parse("x1*x2").unwrap();
        let p = Point::new(&c, vec![q(3), q_frac(1, 2)]);
        assert_eq!(p.eval(&s).unwrap(), q_frac(3, 2));

        let c = Chart::of(&["t", "s"]);
        let s = parse("((t^2+s^2)^2-t^2)/(2*t^2+2*s^2)").unwrap();
        assert_eq!(Point::from_ints(&c, &[1, 0]).eval(&s).unwrap(), q(0));
        assert_eq!(Point::from_ints(&c, &[1, 1]).eval(&s).unwrap(), q_frac(3, 4));

        let c = Chart::of(&["x"]);
        let s = parse("1/x").unwrap();
        assert_eq!(
            Point::from_ints(&c, &[0]).eval(&s),
            Err(EvalError::DenominatorVanishes)
        );
        let n = parse("exp(1/x)").unwrap();
        assert!(Point::new(&c, vec![0.0]).eval(&n).is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(parse("(2*x)/(2)").unwrap(), parse("x").unwrap());
        assert_eq!(parse("(x^2*y - x*y^2)/(x - y)").unwrap(), parse("x*y").unwrap());
        let s = parse("((t^2+s^2)^2-t^2)/(2*t^2+2*s^2)").unwrap();
        let r = s.as_exact().unwrap();
        assert!(gcd(r.numer(), r.denom()).is_one());
        assert_eq!(r.denom().total_degree(), 2);
        assert!(parse("exp(x)").unwrap().normalize().is_err());
    }

    #[test]
    fn derivative_examples() {
        let x = Var::new("x");
        assert_eq!(
            parse("x^2*y").unwrap().differentiate(&x),
            parse("2*x*y").unwrap()
        );
        assert_eq!(
            parse("1+z^2").unwrap().differentiate(&Var::new("z")),
            parse("2*z").unwrap()
        );
        assert!(parse("y^3").unwrap().differentiate(&x).is_zero());
    }
}
