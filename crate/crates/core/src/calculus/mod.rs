//! Multivector fields and differential forms on a single coordinate chart.
//!
//! A degree-k element stores one coefficient per strictly increasing index tuple.
//! Bivectors follow π = Σ_{i<j} π^{ij} ∂i∧∂j with (π^♯ξ)^j = Σ_i π^{ij} ξ_i, so that
//! π(ξ,η) = ⟨η, π^♯ξ⟩.

mod map;

pub use map::{MapError, SmoothMap};

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use thiserror::Error;

use crate::linalg::{Field, Matrix};
use crate::scalars::{Chart, Coord, EvalError, Point, RatFunc, Scalar, Q};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalculusError {
    #[error("index {index} out of range for a chart of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("index tuple {got:?} has length {len}, expected degree {degree}")]
    Degree {
        got: Vec<usize>,
        len: usize,
        degree: usize,
    },
    #[error("expected {expected} components, got {got}")]
    Arity { expected: usize, got: usize },
}

pub trait Kind: Clone + Copy + PartialEq + fmt::Debug + Send + Sync + 'static {
    const BASIS: &'static str;
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Vect;
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Covect;

impl Kind for Vect {
    const BASIS: &'static str = "∂";
}
impl Kind for Covect {
    const BASIS: &'static str = "dx";
}

/// Graded antisymmetric coefficient table; zero coefficients are omitted.
#[derive(Clone, PartialEq)]
pub struct Alt<K: Kind> {
    chart: Chart,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, Scalar>,
    _kind: PhantomData<K>,
}

pub type Multivector = Alt<Vect>;
pub type Form = Alt<Covect>;

/// Sorts `idx` in place and returns the permutation sign, or `None` on a repeated index.
pub fn sort_sign(idx: &mut [usize]) -> Option<i32> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

fn signed(s: &Scalar, sign: i32) -> Scalar {
    if sign < 0 {
        s.neg()
    } else {
        s.clone()
    }
}

impl<K: Kind> Alt<K> {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Alt {
            chart: chart.clone(),
            degree,
            coeffs: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    /// Degree-0 element.
    pub fn function(chart: &Chart, f: Scalar) -> Self {
        let mut a = Alt::zero(chart, 0);
        a.insert(Vec::new(), f);
        a
    }

    /// Wedge of basis elements with 0-based indices, in the given order.
    pub fn basis(chart: &Chart, idx: &[usize]) -> Self {
        Alt::from_terms(chart, idx.len(), [(idx.to_vec(), Scalar::one())])
            .expect("basis indices in range")
    }

    /// Builds from index tuples in any order; repeated indices contribute nothing.
    pub fn from_terms<I>(chart: &Chart, degree: usize, terms: I) -> Result<Self, CalculusError>
    where
        I: IntoIterator<Item = (Vec<usize>, Scalar)>,
    {
        let mut a = Alt::zero(chart, degree);
        for (mut idx, c) in terms {
            if idx.len() != degree {
                return Err(CalculusError::Degree {
                    len: idx.len(),
                    got: idx,
                    degree,
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= chart.dim()) {
                return Err(CalculusError::IndexOutOfRange {
                    index: bad,
                    dim: chart.dim(),
                });
            }
            if let Some(sign) = sort_sign(&mut idx) {
                a.accumulate(idx, signed(&c, sign));
            }
        }
        Ok(a)
    }

    /// Degree-1 element from one component per coordinate.
    pub fn from_components(chart: &Chart, comps: Vec<Scalar>) -> Result<Self, CalculusError> {
        if comps.len() != chart.dim() {
            return Err(CalculusError::Arity {
                expected: chart.dim(),
                got: comps.len(),
            });
        }
        Alt::from_terms(
            chart,
            1,
            comps.into_iter().enumerate().map(|(i, c)| (vec![i], c)),
        )
    }

    fn insert(&mut self, idx: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, c);
        }
    }

    fn accumulate(&mut self, idx: Vec<usize>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let v = match self.coeffs.get(&idx) {
            Some(old) => old.add(&c),
            None => c,
        };
        self.insert(idx, v);
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient of the basis element with the given indices in any order.
    pub fn coeff(&self, idx: &[usize]) -> Scalar {
        let mut idx = idx.to_vec();
        match sort_sign(&mut idx) {
            Some(sign) => self
                .coeffs
                .get(&idx)
                .map(|c| signed(c, sign))
                .unwrap_or_else(Scalar::zero),
            None => Scalar::zero(),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact zero: no stored coefficients. Numeric coefficients are never treated as zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.values().all(|c| c.is_exact())
    }

    /// Components of a degree-1 element.
    pub fn components(&self) -> Vec<Scalar> {
        assert_eq!(self.degree, 1, "components of a degree-1 element");
        (0..self.chart.dim()).map(|i| self.coeff(&[i])).collect()
    }

    fn check_chart(&self, other: &Chart) {
        assert_eq!(&self.chart, other, "elements live on different charts");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_chart(&other.chart);
        assert_eq!(self.degree, other.degree, "degree mismatch in sum");
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            out.accumulate(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn mul_scalar(&self, f: &Scalar) -> Self {
        self.map_coeffs(|c| c.mul(f))
    }

    pub fn scale(&self, c: &Q) -> Self {
        self.map_coeffs(|x| x.scale(c))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut out = Alt::zero(&self.chart, self.degree);
        for (k, c) in &self.coeffs {
            out.insert(k.clone(), f(c));
        }
        out
    }

    pub fn differentiate(&self, i: usize) -> Self {
        let v = self.chart.var(i).clone();
        self.map_coeffs(|c| c.differentiate(&v))
    }

    /// Exterior product; the product of basis elements sharing an index vanishes.
    pub fn wedge(&self, other: &Self) -> Self {
        self.check_chart(&other.chart);
        let mut out = Alt::zero(&self.chart, self.degree + other.degree);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let mut idx: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
                if let Some(sign) = sort_sign(&mut idx) {
                    out.accumulate(idx, signed(&ca.mul(cb), sign));
                }
            }
        }
        out
    }

    /// Removes index `i` after moving it to the right end.
    fn right_derivative(&self, i: usize) -> Self {
        assert!(self.degree > 0);
        let k = self.degree;
        let mut out = Alt::zero(&self.chart, k - 1);
        for (idx, c) in &self.coeffs {
            if let Some(j) = idx.iter().position(|&x| x == i) {
                let mut rest = idx.clone();
                rest.remove(j);
                let sign = if (k - 1 - j) % 2 == 0 { 1 } else { -1 };
                out.accumulate(rest, signed(c, sign));
            }
        }
        out
    }

    /// Removes index `i` after moving it to the left end.
    fn left_derivative(&self, i: usize) -> Self {
        assert!(self.degree > 0);
        let mut out = Alt::zero(&self.chart, self.degree - 1);
        for (idx, c) in &self.coeffs {
            if let Some(j) = idx.iter().position(|&x| x == i) {
                let mut rest = idx.clone();
                rest.remove(j);
                let sign = if j % 2 == 0 { 1 } else { -1 };
                out.accumulate(rest, signed(c, sign));
            }
        }
        out
    }

    pub fn substitute(&self, map: &std::collections::HashMap<crate::scalars::Var, Scalar>) -> Self {
        self.map_coeffs(|c| c.substitute(map))
    }

    /// Coefficients at a point, keyed by sorted index tuples.
    pub fn eval<F: Coord>(&self, p: &Point<F>) -> Result<BTreeMap<Vec<usize>, F>, EvalError> {
        self.coeffs
            .iter()
            .map(|(k, c)| Ok((k.clone(), p.eval(c)?)))
            .collect()
    }

    /// Components of a degree-1 element at a point.
    pub fn eval_vector<F: Coord + Field>(&self, p: &Point<F>) -> Result<Vec<F>, EvalError> {
        assert_eq!(self.degree, 1);
        let mut v = vec![F::zero(); self.chart.dim()];
        for (k, c) in &self.coeffs {
            v[k[0]] = p.eval(c)?;
        }
        Ok(v)
    }

    /// Full antisymmetric matrix of a degree-2 element at a point.
    pub fn eval_matrix<F: Coord + Field>(&self, p: &Point<F>) -> Result<Matrix<F>, EvalError> {
        assert_eq!(self.degree, 2);
        let n = self.chart.dim();
        let mut m = Matrix::zeros(n, n);
        for (k, c) in &self.coeffs {
            let v = p.eval(c)?;
            m.set(k[1], k[0], v.neg());
            m.set(k[0], k[1], v);
        }
        Ok(m)
    }

    /// Full antisymmetric matrix of a degree-2 element.
    pub fn matrix(&self) -> Vec<Vec<Scalar>> {
        assert_eq!(self.degree, 2);
        let n = self.chart.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.coeff(&[i, j])).collect())
            .collect()
    }

    /// Same as [`Alt::matrix`] over the function field; `None` with numeric coefficients.
    pub fn ratfunc_matrix(&self) -> Option<Matrix<RatFunc>> {
        let rows = self
            .matrix()
            .into_iter()
            .map(|r| r.into_iter().map(|c| c.as_exact().cloned()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(Matrix::from_rows(rows))
    }

    /// Builds a degree-2 element from the upper triangle of a matrix.
    pub fn from_matrix(chart: &Chart, m: &[Vec<Scalar>]) -> Self {
        let n = chart.dim();
        let mut out = Alt::zero(chart, 2);
        for i in 0..n {
            for j in i + 1..n {
                out.insert(vec![i, j], m[i][j].clone());
            }
        }
        out
    }

    pub fn from_ratfunc_matrix(chart: &Chart, m: &Matrix<RatFunc>) -> Self {
        let rows: Vec<Vec<Scalar>> = (0..m.rows())
            .map(|i| m.row(i).into_iter().map(Scalar::Exact).collect())
            .collect();
        Alt::from_matrix(chart, &rows)
    }

    /// Moves the element to another chart with the same dimension, keeping indices.
    pub fn rechart(&self, chart: &Chart) -> Self {
        assert_eq!(chart.dim(), self.chart.dim());
        Alt {
            chart: chart.clone(),
            ..self.clone()
        }
    }
}

impl Multivector {
    /// Vector field with the given components.
    pub fn vector(chart: &Chart, comps: Vec<Scalar>) -> Multivector {
        Alt::from_components(chart, comps).expect("component count matches chart")
    }

    /// Coordinate vector field ∂i.
    pub fn partial(chart: &Chart, i: usize) -> Multivector {
        Alt::basis(chart, &[i])
    }

    /// Euler field x∂x + y∂y for the coordinate pair (x, y) = (i, j).
    pub fn euler(chart: &Chart, i: usize, j: usize) -> Multivector {
        Multivector::partial(chart, i)
            .mul_scalar(&chart.coord(i))
            .add(&Multivector::partial(chart, j).mul_scalar(&chart.coord(j)))
    }

    /// Rotation field x∂y − y∂x for the coordinate pair (x, y) = (i, j).
    pub fn rotation(chart: &Chart, i: usize, j: usize) -> Multivector {
        Multivector::partial(chart, j)
            .mul_scalar(&chart.coord(i))
            .sub(&Multivector::partial(chart, i).mul_scalar(&chart.coord(j)))
    }

    /// Schouten–Nijenhuis bracket, written with odd coordinates θi standing for ∂i:
    /// [P,Q] = Σ_i ∂P/∂θi · ∂Q/∂xi − (−1)^{(p−1)(q−1)} ∂Q/∂θi · ∂P/∂xi (right θ-derivatives).
    pub fn schouten(&self, other: &Multivector) -> Multivector {
        self.check_chart(&other.chart);
        let (p, q) = (self.degree, other.degree);
        if p + q == 0 {
            return Alt::zero(&self.chart, 0);
        }
        let mut out = Alt::zero(&self.chart, p + q - 1);
        let sign = if p > 0 && q > 0 && ((p - 1) * (q - 1)) % 2 == 1 { -1 } else { 1 };
        for i in 0..self.chart.dim() {
            if p > 0 {
                out = out.add(&self.right_derivative(i).wedge(&other.differentiate(i)));
            }
            if q > 0 {
                let t = other.right_derivative(i).wedge(&self.differentiate(i));
                out = if sign > 0 { out.sub(&t) } else { out.add(&t) };
            }
        }
        out
    }

    /// Lie derivative along a vector field: [X, T].
    pub fn lie_derivative(x: &Multivector, t: &Multivector) -> Multivector {
        assert_eq!(x.degree, 1);
        x.schouten(t)
    }

    /// Derivative of a function along a vector field.
    pub fn apply(&self, f: &Scalar) -> Scalar {
        assert_eq!(self.degree, 1);
        let mut acc = Scalar::zero();
        for (k, c) in &self.coeffs {
            acc = acc.add(&c.mul(&f.differentiate(self.chart.var(k[0]))));
        }
        acc
    }

    /// π^♯ξ for a bivector π and a 1-form ξ.
    pub fn sharp(&self, xi: &Form) -> Multivector {
        assert_eq!((self.degree, xi.degree), (2, 1));
        self.check_chart(&xi.chart);
        let mut out = Alt::zero(&self.chart, 1);
        for (k, c) in &self.coeffs {
            let (i, j) = (k[0], k[1]);
            // π^{ij} contributes ξ_i to component j and −ξ_j to component i.
            let xi_i = xi.coeff(&[i]);
            let xi_j = xi.coeff(&[j]);
            out.accumulate(vec![j], c.mul(&xi_i));
            out.accumulate(vec![i], c.mul(&xi_j).neg());
        }
        out
    }

    /// π(ξ, η) = ⟨η, π^♯ξ⟩.
    pub fn pair(&self, xi: &Form, eta: &Form) -> Scalar {
        self.sharp(xi).contract(eta)
    }

    /// ⟨ξ, X⟩ for a vector field X and a 1-form ξ.
    pub fn contract(&self, xi: &Form) -> Scalar {
        assert_eq!((self.degree, xi.degree), (1, 1));
        let mut acc = Scalar::zero();
        for (k, c) in &self.coeffs {
            acc = acc.add(&c.mul(&xi.coeff(k)));
        }
        acc
    }

    /// Hamiltonian vector field π^♯(df).
    pub fn hamiltonian(&self, f: &Scalar) -> Multivector {
        self.sharp(&Form::exact(&self.chart, f))
    }

    /// Poisson bracket {f, g} = H_f g.
    pub fn poisson_bracket(&self, f: &Scalar, g: &Scalar) -> Scalar {
        self.hamiltonian(f).apply(g)
    }

    /// [π,π] = 0, decided exactly; numeric coefficients give `NotDetermined`.
    pub fn is_poisson(&self) -> Verdict {
        assert_eq!(self.degree, 2);
        let b = self.schouten(self);
        if b.is_zero() {
            Verdict::Holds
        } else if b.is_exact() {
            Verdict::Fails
        } else {
            Verdict::NotDetermined
        }
    }

    /// Largest absolute coefficient of [π,π] over sample points where it can be evaluated.
    pub fn jacobiator_residual(&self, points: &[Point<f64>]) -> f64 {
        let b = self.schouten(self);
        points
            .iter()
            .filter_map(|p| b.eval(p).ok())
            .flat_map(|m| m.into_values())
            .fold(0.0, |acc, v: f64| acc.max(v.abs()))
    }
}

impl Form {
    /// 1-form with the given components.
    pub fn covector(chart: &Chart, comps: Vec<Scalar>) -> Form {
        Alt::from_components(chart, comps).expect("component count matches chart")
    }

    /// Coordinate 1-form dxi.
    pub fn dx(chart: &Chart, i: usize) -> Form {
        Alt::basis(chart, &[i])
    }

    /// df.
    pub fn exact(chart: &Chart, f: &Scalar) -> Form {
        Form::function(chart, f.clone()).d()
    }

    /// Exterior derivative.
    pub fn d(&self) -> Form {
        let mut out = Alt::zero(&self.chart, self.degree + 1);
        for i in 0..self.chart.dim() {
            let di = self.differentiate(i);
            if di.is_zero() {
                continue;
            }
            out = out.add(&Form::dx(&self.chart, i).wedge(&di));
        }
        out
    }

    /// Contraction ι_X ω into the first slot.
    pub fn interior(&self, x: &Multivector) -> Form {
        assert_eq!(x.degree, 1);
        self.check_chart(&x.chart);
        if self.degree == 0 {
            return Alt::zero(&self.chart, 0);
        }
        let mut out = Alt::zero(&self.chart, self.degree - 1);
        for (k, c) in &x.coeffs {
            out = out.add(&self.left_derivative(k[0]).mul_scalar(c));
        }
        out
    }

    /// Cartan formula ℒ_X = d ι_X + ι_X d.
    pub fn lie_derivative(&self, x: &Multivector) -> Form {
        let a = self.interior(x).d();
        let b = self.d().interior(x);
        if self.degree == 0 {
            b
        } else {
            a.add(&b)
        }
    }

    /// ω(X1, …, Xk).
    pub fn evaluate_on(&self, fields: &[Multivector]) -> Scalar {
        assert_eq!(fields.len(), self.degree);
        let mut w = self.clone();
        for x in fields {
            w = w.interior(x);
        }
        w.coeff(&[])
    }

    /// Antisymmetric matrix of a 2-form: entry (i, j) is ω(∂i, ∂j).
    pub fn form_matrix(&self) -> Vec<Vec<Scalar>> {
        self.matrix()
    }
}

impl<K: Kind> fmt::Display for Alt<K> {
    /// `{[1,2]: x1, [3,4]: x3}` with 1-based indices.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, (k, c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            let idx: Vec<String> = k.iter().map(|i| (i + 1).to_string()).collect();
            write!(f, "[{}]: {}", idx.join(","), c)?;
        }
        write!(f, "}}")
    }
}

impl<K: Kind> fmt::Debug for Alt<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", K::BASIS, self.degree, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{parse, q, q_frac};

    fn s(t: &str) -> Scalar {
        parse(t).unwrap()
    }

    fn bivector(chart: &Chart, terms: &[(usize, usize, &str)]) -> Multivector {
        Alt::from_terms(chart, 2, terms.iter().map(|&(i, j, c)| (vec![i, j], s(c)))).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let c = Chart::of(&["x1", "x2"]);
        let w = Multivector::partial(&c, 0).wedge(&Multivector::partial(&c, 1));
        assert_eq!(w, Alt::basis(&c, &[0, 1]));
        let a = Multivector::partial(&c, 0).mul_scalar(&s("x1"));
        assert!(a.wedge(&Multivector::partial(&c, 0)).is_zero());

        let c = Chart::of(&["x", "y"]);
        let e = Multivector::euler(&c, 0, 1);
        let v = Multivector::rotation(&c, 0, 1);
        assert_eq!(e.wedge(&v), bivector(&c, &[(0, 1, "x^2+y^2")]));
    }

    #[test]
    fn schouten_examples() {
        let c = Chart::of(&["x1", "x2"]);
        let d1 = Multivector::partial(&c, 0);
        let x1d2 = Multivector::partial(&c, 1).mul_scalar(&s("x1"));
        assert_eq!(d1.schouten(&x1d2), Multivector::partial(&c, 1));

        let c = Chart::of(&["x1", "x2", "x3", "x4"]);
        let pi = bivector(&c, &[(0, 1, "1"), (2, 3, "x3")]);
        assert!(pi.is_poisson().holds());

        let c = Chart::of(&["x1", "x2", "x3"]);
        let pi = bivector(&c, &[(1, 2, "x1"), (2, 0, "x2"), (0, 1, "x3")]);
        assert!(pi.is_poisson().holds());
        assert!(Multivector::zero(&c, 2).is_poisson().holds());
    }

    #[test]
    fn sharp_examples() {
        let c = Chart::of(&["x1", "x2"]);
        let pi = bivector(&c, &[(0, 1, "x1")]);
        let r = pi.sharp(&Form::dx(&c, 1));
        assert_eq!(r, Multivector::partial(&c, 0).mul_scalar(&s("-x1")));

        let c = Chart::of(&["x", "y", "z"]);
        let pi = bivector(&c, &[(0, 1, "1"), (2, 1, "1+z^2")]);
        let r = pi.sharp(&Form::dx(&c, 1));
        assert_eq!(r, Multivector::vector(&c, vec![s("-1"), s("0"), s("-1-z^2")]));
        assert!(pi.sharp(&Form::zero(&c, 1)).is_zero());
        assert_eq!(pi.pair(&Form::dx(&c, 0), &Form::dx(&c, 1)), s("1"));
    }

    #[test]
    fn forms() {
        let c = Chart::of(&["x", "y"]);
        let w = Form::dx(&c, 1).mul_scalar(&s("x"));
        assert_eq!(w.d(), Alt::basis(&c, &[0, 1]));
        let f = s("x^3*y - 2*x*y^2 + 5");
        assert!(Form::exact(&c, &f).d().is_zero());
        assert_eq!(w.lie_derivative(&Multivector::partial(&c, 0)), Form::dx(&c, 1));
    }

    #[test]
    fn eval_matrix_is_antisymmetric() {
        let c = Chart::of(&["x1", "x2"]);
        let pi = bivector(&c, &[(0, 1, "x1")]);
        let p = Point::new(&c, vec![q(2), q_frac(1, 3)]);
        let m = pi.eval_matrix(&p).unwrap();
        assert_eq!(m.get(0, 1), &q(2));
        assert_eq!(m.get(1, 0), &q(-2));
    }
}
