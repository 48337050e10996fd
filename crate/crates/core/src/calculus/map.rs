use std::collections::HashMap;

use thiserror::Error;

use super::{Alt, Form, Multivector};
use crate::linalg::{Field, Matrix};
use crate::scalars::{Chart, Coord, EvalError, Point, Scalar, Var};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("map to a chart of dimension {expected} needs {expected} components, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("component uses variable `{0}` outside the source chart")]
    ForeignVariable(String),
}

/// Smooth map between charts, given by one component per target coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMap {
    source: Chart,
    target: Chart,
    comps: Vec<Scalar>,
}

impl SmoothMap {
    pub fn new(source: &Chart, target: &Chart, comps: Vec<Scalar>) -> Result<SmoothMap, MapError> {
        if comps.len() != target.dim() {
            return Err(MapError::Arity {
                expected: target.dim(),
                got: comps.len(),
            });
        }
        for c in &comps {
            if let Some(v) = c.vars().into_iter().find(|v| source.index_of(v).is_none()) {
                return Err(MapError::ForeignVariable(v.name().to_string()));
            }
        }
        Ok(SmoothMap {
            source: source.clone(),
            target: target.clone(),
            comps,
        })
    }

    pub fn identity(chart: &Chart) -> SmoothMap {
        SmoothMap {
            source: chart.clone(),
            target: chart.clone(),
            comps: (0..chart.dim()).map(|i| chart.coord(i)).collect(),
        }
    }

    /// Map onto the listed source coordinates.
    pub fn projection(source: &Chart, target: &Chart, coords: &[usize]) -> SmoothMap {
        SmoothMap::new(
            source,
            target,
            coords.iter().map(|&i| source.coord(i)).collect(),
        )
        .expect("projection onto existing coordinates")
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn components(&self) -> &[Scalar] {
        &self.comps
    }

    pub fn is_exact(&self) -> bool {
        self.comps.iter().all(|c| c.is_exact())
    }

    fn substitution(&self) -> HashMap<Var, Scalar> {
        self.target
            .vars()
            .iter()
            .cloned()
            .zip(self.comps.iter().cloned())
            .collect()
    }

    /// f∘φ for a function on the target.
    pub fn pull_scalar(&self, f: &Scalar) -> Scalar {
        f.substitute(&self.substitution())
    }

    /// ψ∘φ where `self` = φ and `next` = ψ.
    pub fn then(&self, next: &SmoothMap) -> SmoothMap {
        assert_eq!(self.target, next.source, "composable charts");
        let comps = next.comps.iter().map(|c| self.pull_scalar(c)).collect();
        SmoothMap {
            source: self.source.clone(),
            target: next.target.clone(),
            comps,
        }
    }

    /// Jacobian with rows indexed by target and columns by source coordinates.
    pub fn jacobian(&self) -> Vec<Vec<Scalar>> {
        self.comps
            .iter()
            .map(|c| self.source.vars().iter().map(|v| c.differentiate(v)).collect())
            .collect()
    }

    pub fn jacobian_at<F: Coord + Field>(&self, p: &Point<F>) -> Result<Matrix<F>, EvalError> {
        let rows = self
            .jacobian()
            .iter()
            .map(|r| r.iter().map(|c| p.eval(c)).collect::<Result<Vec<F>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        if rows.is_empty() {
            return Ok(Matrix::zeros(0, self.source.dim()));
        }
        Ok(Matrix::from_rows(rows))
    }

    pub fn image<F: Coord>(&self, p: &Point<F>) -> Result<Point<F>, EvalError> {
        let coords = self.comps.iter().map(|c| p.eval(c)).collect::<Result<_, _>>()?;
        Ok(Point::new(&self.target, coords))
    }

    /// d(y_a∘φ) as a 1-form on the source.
    pub fn component_differential(&self, a: usize) -> Form {
        Form::exact(&self.source, &self.comps[a])
    }

    /// φ*ω.
    pub fn pullback_form(&self, w: &Form) -> Form {
        assert_eq!(w.chart(), &self.target);
        let dys: Vec<Form> = (0..self.target.dim())
            .map(|a| self.component_differential(a))
            .collect();
        let mut out = Form::zero(&self.source, w.degree());
        for (idx, c) in w.terms() {
            let mut t = Form::function(&self.source, self.pull_scalar(c));
            for &a in idx {
                t = t.wedge(&dys[a]);
            }
            out = out.add(&t);
        }
        out
    }

    /// φ_*P for a diffeomorphism φ with inverse `inv`.
    pub fn pushforward(&self, inv: &SmoothMap, p: &Multivector) -> Multivector {
        assert_eq!(p.chart(), &self.source);
        assert_eq!(inv.source, self.target);
        let jac = self.jacobian();
        let images: Vec<Multivector> = (0..self.source.dim())
            .map(|i| {
                let comps = (0..self.target.dim())
                    .map(|a| inv.pull_scalar(&jac[a][i]))
                    .collect();
                Multivector::vector(&self.target, comps)
            })
            .collect();
        let mut out = Multivector::zero(&self.target, p.degree());
        for (idx, c) in p.terms() {
            let mut t = Multivector::function(&self.target, inv.pull_scalar(c));
            for &i in idx {
                t = t.wedge(&images[i]);
            }
            out = out.add(&t);
        }
        out
    }

    /// Residuals π_src(d(y_a∘φ), d(y_b∘φ)) − π_tgt^{ab}∘φ for a < b.
    pub fn relatedness_residuals(&self, src: &Multivector, tgt: &Multivector) -> Vec<Scalar> {
        assert_eq!(src.chart(), &self.source);
        assert_eq!(tgt.chart(), &self.target);
        let dys: Vec<Form> = (0..self.target.dim())
            .map(|a| self.component_differential(a))
            .collect();
        let n = self.target.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let lhs = src.pair(&dys[a], &dys[b]);
                let rhs = self.pull_scalar(&tgt.coeff(&[a, b]));
                out.push(lhs.sub(&rhs));
            }
        }
        out
    }

    /// Whether φ relates the two bivectors; numeric data is sampled at `points` within `tol`
    /// and a passing sample gives `NotDetermined`.
    pub fn map_related(
        &self,
        src: &Multivector,
        tgt: &Multivector,
        points: &[Point<f64>],
        tol: f64,
    ) -> Verdict {
        let res = self.relatedness_residuals(src, tgt);
        if res.iter().all(|r| r.is_exact()) {
            return Verdict::from_bool(res.iter().all(|r| r.is_zero()));
        }
        for p in points {
            for r in &res {
                if let Ok(v) = p.eval(r) {
                    if v.abs() > tol {
                        return Verdict::Fails;
                    }
                }
            }
        }
        Verdict::NotDetermined
    }
}

impl<K: super::Kind> Alt<K> {
    /// Replaces coordinate functions via a map into this chart, keeping the basis (used for
    /// evaluating along embeddings).
    pub fn compose_coeffs(&self, phi: &SmoothMap) -> Self {
        assert_eq!(phi.target(), self.chart());
        let sub = phi.substitution();
        self.map_coeffs(|c| c.substitute(&sub))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{parse, q};

    fn s(t: &str) -> Scalar {
        parse(t).unwrap()
    }

    #[test]
    fn pullback_examples() {
        let x = Chart::of(&["t", "s"]);
        let m = Chart::of(&["x1", "x2", "x3", "x4"]);
        let i = SmoothMap::new(&x, &m, vec![s("t"), s("s"), s("t"), s("t*s")]).unwrap();
        assert_eq!(i.pullback_form(&Form::dx(&m, 2)), Form::dx(&x, 0));
        let expect = Form::covector(&x, vec![s("s"), s("t")]);
        assert_eq!(i.pullback_form(&Form::dx(&m, 3)), expect);
    }

    #[test]
    fn numeric_pullback_matches_jacobian() {
        let x = Chart::of(&["x", "y"]);
        let m = Chart::of(&["a", "b", "c", "d"]);
        let f = s("exp(-1/x^2)*(y - sin(1/x))");
        let i = SmoothMap::new(&x, &m, vec![s("x"), s("y"), f.clone(), f]).unwrap();
        let w = i.pullback_form(&Alt::basis(&m, &[0, 1]));
        let p = Point::new(&x, vec![0.7, -0.3]);
        let v = w.eval(&p).unwrap();
        assert!((v[&vec![0, 1]] - 1.0).abs() < 1e-12);
        let w = i.pullback_form(&Alt::basis(&m, &[2, 3]));
        assert!(w.eval(&p).unwrap().values().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn related_examples() {
        let sig = Chart::of(&["x", "y", "z"]);
        let m = Chart::of(&["x", "y"]);
        let p = SmoothMap::projection(&sig, &m, &[0, 1]);
        let pi_s = Alt::from_terms(&sig, 2, [(vec![0, 1], s("1")), (vec![2, 1], s("1+z^2"))])
            .unwrap();
        let pi_m = Alt::basis(&m, &[0, 1]);
        assert!(p.map_related(&pi_s, &pi_m, &[], 1e-9).holds());
        let id = SmoothMap::identity(&sig);
        assert!(id.map_related(&pi_s, &pi_s, &[], 1e-9).holds());
        assert!(p.map_related(&pi_s, &pi_m.scale(&q(2)), &[], 1e-9).fails());
    }
}
