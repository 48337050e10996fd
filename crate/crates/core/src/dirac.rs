//! Linear Dirac geometry on V ⊕ V*: Lagrangian subspaces, graphs, gauge transforms and
//! pullbacks, plus rank scans of pulled-back families over sample grids.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{Form, Multivector, SmoothMap};
use crate::linalg::{Field, Matrix};
use crate::scalars::{Coord, EvalError, Point};

/// u + ξ ∈ V ⊕ V*.
#[derive(Clone, Debug, PartialEq)]
pub struct GTElement<F> {
    pub u: Vec<F>,
    pub xi: Vec<F>,
}

impl<F: Field> GTElement<F> {
    pub fn new(u: Vec<F>, xi: Vec<F>) -> Self {
        assert_eq!(u.len(), xi.len(), "vector and covector parts must have equal length");
        GTElement { u, xi }
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    fn stacked(&self) -> Vec<F> {
        self.u.iter().chain(self.xi.iter()).cloned().collect()
    }
}

fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// ⟨u+ξ, v+η⟩ = ξ(v) + η(u).
pub fn pairing<F: Field>(e: &GTElement<F>, f: &GTElement<F>) -> F {
    assert_eq!(e.dim(), f.dim());
    dot(&e.xi, &f.u).add(&dot(&f.xi, &e.u))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LagrangianKind {
    /// Graph of a bivector: meets V trivially.
    Bivector,
    /// Graph of a 2-form: meets V* trivially.
    Form,
    /// Both, i.e. graph of a nondegenerate bivector.
    Nondegenerate,
    Neither,
}

/// Isotropic subspace of V ⊕ V*, stored as a 2n×k basis in reduced column echelon form.
#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianSubspace<F> {
    n: usize,
    basis: Matrix<F>,
}

impl<F: Field> LagrangianSubspace<F> {
    /// Span of the given 2n-row generator columns.
    pub fn from_generators(n: usize, gens: &Matrix<F>) -> Self {
        assert_eq!(gens.rows(), 2 * n);
        let basis = if F::is_exact() {
            gens.column_echelon()
        } else {
            gens.column_basis().column_echelon()
        };
        LagrangianSubspace { n, basis }
    }

    pub fn from_elements(n: usize, elems: &[GTElement<F>]) -> Self {
        let cols: Vec<Vec<F>> = elems.iter().map(|e| e.stacked()).collect();
        LagrangianSubspace::from_generators(n, &Matrix::from_cols(2 * n, &cols))
    }

    /// V ⊕ 0.
    pub fn tangent(n: usize) -> Self {
        let gens = Matrix::identity(n).vstack(&Matrix::zeros(n, n));
        LagrangianSubspace::from_generators(n, &gens)
    }

    /// 0 ⊕ V*.
    pub fn cotangent(n: usize) -> Self {
        let gens = Matrix::zeros(n, n).vstack(&Matrix::identity(n));
        LagrangianSubspace::from_generators(n, &gens)
    }

    /// {π^♯ξ + ξ} for an antisymmetric matrix π.
    pub fn graph_bivector(pi: &Matrix<F>) -> Self {
        let n = pi.rows();
        // π^♯ acts on ξ as πᵀ.
        let gens = pi.transpose().vstack(&Matrix::identity(n));
        LagrangianSubspace::from_generators(n, &gens)
    }

    /// {u + ι_uω} for an antisymmetric matrix ω.
    pub fn graph_form(omega: &Matrix<F>) -> Self {
        let n = omega.rows();
        let gens = Matrix::identity(n).vstack(&omega.transpose());
        LagrangianSubspace::from_generators(n, &gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &Matrix<F> {
        &self.basis
    }

    /// Vector parts of the basis (n×k).
    pub fn vector_block(&self) -> Matrix<F> {
        self.basis.select_rows(&(0..self.n).collect::<Vec<_>>())
    }

    /// Covector parts of the basis (n×k).
    pub fn covector_block(&self) -> Matrix<F> {
        self.basis.select_rows(&(self.n..2 * self.n).collect::<Vec<_>>())
    }

    pub fn elements(&self) -> Vec<GTElement<F>> {
        self.basis
            .columns()
            .into_iter()
            .map(|c| GTElement::new(c[..self.n].to_vec(), c[self.n..].to_vec()))
            .collect()
    }

    /// Largest |⟨e_a, e_b⟩| over basis pairs; zero for isotropic subspaces.
    pub fn isotropy_defect(&self) -> f64 {
        let els = self.elements();
        let mut worst: f64 = 0.0;
        for a in &els {
            for b in &els {
                let p = pairing(a, b);
                if !p.is_zero() {
                    worst = worst.max(p.magnitude().max(if F::is_exact() { 1.0 } else { 0.0 }));
                }
            }
        }
        worst
    }

    pub fn is_isotropic(&self) -> bool {
        let d = self.isotropy_defect();
        if F::is_exact() {
            d == 0.0
        } else {
            d <= 1e-9 * self.basis.max_magnitude().max(1.0).powi(2)
        }
    }

    pub fn is_lagrangian(&self) -> bool {
        self.dim() == self.n && self.is_isotropic()
    }

    /// dim(L ∩ (V ⊕ 0)).
    pub fn dim_cap_v(&self) -> usize {
        self.dim() - self.covector_block().rank()
    }

    /// dim(L ∩ (0 ⊕ V*)).
    pub fn dim_cap_vstar(&self) -> usize {
        self.dim() - self.vector_block().rank()
    }

    pub fn kind(&self) -> LagrangianKind {
        match (self.dim_cap_v() == 0, self.dim_cap_vstar() == 0) {
            (true, true) => LagrangianKind::Nondegenerate,
            (true, false) => LagrangianKind::Bivector,
            (false, true) => LagrangianKind::Form,
            (false, false) => LagrangianKind::Neither,
        }
    }

    /// π with L = Gr(π), when L meets V trivially and is Lagrangian.
    pub fn as_bivector(&self) -> Option<Matrix<F>> {
        if self.dim() != self.n || self.dim_cap_v() != 0 {
            return None;
        }
        let binv = self.covector_block().inverse()?;
        Some(self.vector_block().mul(&binv).transpose())
    }

    /// ω with L = Gr(ω), when L meets V* trivially and is Lagrangian.
    pub fn as_form(&self) -> Option<Matrix<F>> {
        if self.dim() != self.n || self.dim_cap_vstar() != 0 {
            return None;
        }
        let ainv = self.vector_block().inverse()?;
        Some(self.covector_block().mul(&ainv).transpose())
    }

    /// Projection of L to V, as a canonical column basis.
    pub fn vector_projection(&self) -> Matrix<F> {
        let a = self.vector_block();
        if F::is_exact() {
            a.column_echelon()
        } else {
            a.column_basis().column_echelon()
        }
    }

    /// {u + ξ + ι_uω : u + ξ ∈ L}.
    pub fn gauge(&self, omega: &Matrix<F>) -> Self {
        let a = self.vector_block();
        let b = self.covector_block().add(&omega.transpose().mul(&a));
        LagrangianSubspace::from_generators(self.n, &a.vstack(&b))
    }

    /// {u + Jᵀη : Ju + η ∈ L} for J: source → target (n×m).
    pub fn pullback(&self, j: &Matrix<F>) -> Self {
        let (n, m) = (j.rows(), j.cols());
        assert_eq!(n, self.n, "Jacobian rows must match the ambient dimension");
        let a = self.vector_block();
        let b = self.covector_block();
        let k = self.dim();
        let system = j.hstack(&a.neg());
        let ker = system.nullspace();
        let jt_b = j.transpose().mul(&b);
        let cols: Vec<Vec<F>> = ker
            .iter()
            .map(|v| {
                let u = v[..m].to_vec();
                let c = &v[m..m + k];
                let xi = jt_b.mul_vec(c);
                u.into_iter().chain(xi).collect()
            })
            .collect();
        LagrangianSubspace::from_generators(m, &Matrix::from_cols(2 * m, &cols))
    }

    /// Equality as subspaces; floating subspaces compare by rank of the joint span.
    pub fn same_as(&self, other: &Self) -> bool {
        if self.n != other.n || self.dim() != other.dim() {
            return false;
        }
        if F::is_exact() {
            self.basis == other.basis
        } else {
            self.basis.hstack(&other.basis).rank() == self.dim()
        }
    }
}

/// Lagrangian family given by a symbolic rule, evaluable at points.
#[derive(Clone, Debug)]
pub enum LagrangianFamily {
    GraphBivector(Multivector),
    GraphForm(Form),
    Gauge(Box<LagrangianFamily>, Form),
    Pullback(Box<LagrangianFamily>, SmoothMap),
}

impl LagrangianFamily {
    pub fn pullback(self, map: &SmoothMap) -> LagrangianFamily {
        LagrangianFamily::Pullback(Box::new(self), map.clone())
    }

    pub fn gauge(self, omega: &Form) -> LagrangianFamily {
        LagrangianFamily::Gauge(Box::new(self), omega.clone())
    }

    pub fn dim(&self) -> usize {
        match self {
            LagrangianFamily::GraphBivector(p) => p.chart().dim(),
            LagrangianFamily::GraphForm(w) => w.chart().dim(),
            LagrangianFamily::Gauge(f, _) => f.dim(),
            LagrangianFamily::Pullback(_, m) => m.source().dim(),
        }
    }

    pub fn eval<F: Coord + Field>(&self, p: &Point<F>) -> Result<LagrangianSubspace<F>, EvalError> {
        Ok(match self {
            LagrangianFamily::GraphBivector(pi) => {
                LagrangianSubspace::graph_bivector(&pi.eval_matrix(p)?)
            }
            LagrangianFamily::GraphForm(w) => LagrangianSubspace::graph_form(&w.eval_matrix(p)?),
            LagrangianFamily::Gauge(f, w) => f.eval(p)?.gauge(&w.eval_matrix(p)?),
            LagrangianFamily::Pullback(f, map) => {
                let image = map.image(p)?;
                f.eval(&image)?.pullback(&map.jacobian_at(p)?)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub coords: Vec<String>,
    pub dim_cap_v: usize,
    pub dim_cap_vstar: usize,
    pub kind: LagrangianKind,
}

impl ScanPoint {
    fn profile(&self) -> (usize, usize, LagrangianKind) {
        (self.dim_cap_v, self.dim_cap_vstar, self.kind)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileCount {
    pub dim_cap_v: usize,
    pub dim_cap_vstar: usize,
    pub kind: LagrangianKind,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub points: Vec<ScanPoint>,
    /// Points where the family could not be evaluated.
    pub singular: Vec<Vec<String>>,
    pub rank_profile: Vec<ProfileCount>,
    /// Index pairs into `points` of grid neighbours with different profiles.
    pub witnesses: Vec<(usize, usize)>,
}

impl ScanReport {
    pub fn is_constant(&self) -> bool {
        self.rank_profile.len() <= 1
    }
}

/// Pairs of points that are adjacent along one coordinate axis of the sample set.
pub fn grid_neighbours<F: Coord>(points: &[Point<F>]) -> Vec<(usize, usize)> {
    let Some(first) = points.first() else {
        return Vec::new();
    };
    let m = first.coords.len();
    let keys: Vec<Vec<String>> = points.iter().map(|p| p.labels()).collect();
    let mut pairs = Vec::new();
    for axis in 0..m {
        let mut lines: BTreeMap<Vec<String>, Vec<usize>> = BTreeMap::new();
        for (i, k) in keys.iter().enumerate() {
            let mut rest = k.clone();
            rest.remove(axis);
            lines.entry(rest).or_default().push(i);
        }
        for idx in lines.values_mut() {
            idx.sort_by(|&a, &b| {
                points[a].coords[axis]
                    .to_f64()
                    .partial_cmp(&points[b].coords[axis].to_f64())
                    .unwrap()
            });
            for w in idx.windows(2) {
                pairs.push((w[0].min(w[1]), w[0].max(w[1])));
            }
        }
    }
    pairs.sort();
    pairs.dedup();
    pairs
}

/// Evaluates the family on every grid point and summarizes the intersection profile.
pub fn family_scan<F: Coord + Field>(family: &LagrangianFamily, grid: &[Point<F>]) -> ScanReport {
    let evals: Vec<Result<LagrangianSubspace<F>, EvalError>> =
        grid.par_iter().map(|p| family.eval(p)).collect();
    let mut points = Vec::new();
    let mut kept = Vec::new();
    let mut singular = Vec::new();
    for (p, e) in grid.iter().zip(evals) {
        match e {
            Ok(l) => {
                debug_assert!(l.is_lagrangian());
                points.push(ScanPoint {
                    coords: p.labels(),
                    dim_cap_v: l.dim_cap_v(),
                    dim_cap_vstar: l.dim_cap_vstar(),
                    kind: l.kind(),
                });
                kept.push(p.clone());
            }
            Err(_) => singular.push(p.labels()),
        }
    }
    let mut counts: BTreeMap<(usize, usize, LagrangianKind), usize> = BTreeMap::new();
    for p in &points {
        *counts.entry(p.profile()).or_default() += 1;
    }
    let rank_profile = counts
        .into_iter()
        .map(|((v, vs, kind), count)| ProfileCount {
            dim_cap_v: v,
            dim_cap_vstar: vs,
            kind,
            count,
        })
        .collect();
    let witnesses = grid_neighbours(&kept)
        .into_iter()
        .filter(|&(a, b)| points[a].profile() != points[b].profile())
        .collect();
    ScanReport {
        points,
        singular,
        rank_profile,
        witnesses,
    }
}
