//! Finite-dimensional Lie theory: structure constants, Manin triples, the standard triples of
//! sl(2,ℂ) and sl(3,ℂ) with their compact real forms, quotient conditions, positive bivectors,
//! bivectors induced by actions and Weyl group orders.

use std::str::FromStr;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::Multivector;
use crate::linalg::{intersection_basis, is_positive_definite, Matrix};
use crate::scalars::{q, q_to_f64, Q};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("structure constants need {expected} entries, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("bracket index ({0}, {1}) out of range")]
    Index(usize, usize),
    #[error("invalid rational `{0}`")]
    Rational(String),
    #[error("malformed Lie algebra input: {0}")]
    Input(String),
    #[error("sample {0} is not unitary")]
    NotUnitary(usize),
    #[error("sample {0} has the wrong size")]
    SampleSize(usize),
    #[error("J does not square to −1")]
    NotComplex,
    #[error("no Weyl group for type {0}{1}")]
    WeylType(char, usize),
    #[error("subspace is not contained in the algebra")]
    Subspace,
}

/// Real Lie algebra given by structure constants [e_i, e_j] = Σ_k c^k_{ij} e_k.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    c: Vec<Q>,
    labels: Vec<String>,
}

impl LieAlgebra {
    pub fn new(dim: usize, c: Vec<Q>, labels: Option<Vec<String>>) -> Result<Self, LieError> {
        if c.len() != dim * dim * dim {
            return Err(LieError::Arity {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        let labels = labels.unwrap_or_else(|| (1..=dim).map(|i| format!("e{i}")).collect());
        Ok(LieAlgebra { dim, c, labels })
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra::new(dim, vec![Q::zero(); dim * dim * dim], None).expect("sizes match")
    }

    /// so(3) with [e_i, e_j] = ε_{ijk} e_k.
    pub fn so3() -> Self {
        let mut c = vec![Q::zero(); 27];
        for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
            c[(i * 3 + j) * 3 + k] = q(1);
            c[(j * 3 + i) * 3 + k] = q(-1);
        }
        LieAlgebra::new(3, c, None).expect("sizes match")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Q {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    pub fn set_constant(&mut self, i: usize, j: usize, k: usize, v: Q) {
        let d = self.dim;
        self.c[(i * d + j) * d + k] = v;
    }

    pub fn bracket(&self, u: &[Q], v: &[Q]) -> Vec<Q> {
        let d = self.dim;
        let mut out = vec![Q::zero(); d];
        for i in 0..d {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..d {
                if v[j].is_zero() {
                    continue;
                }
                let uv = &u[i] * &v[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        *o += &uv * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of ad(v) on coordinate vectors.
    pub fn ad(&self, v: &[Q]) -> Matrix<Q> {
        let cols: Vec<Vec<Q>> = (0..self.dim).map(|j| self.bracket(v, &unit(self.dim, j))).collect();
        Matrix::from_cols(self.dim, &cols)
    }

    /// Parses `{"dim": d, "brackets": [[i, j, [c_1, …, c_d]], …], "pairing": [[…]]}` with
    /// 0-based indices; coefficients are integers or strings like "3/5". Unlisted brackets
    /// with i < j vanish and antisymmetry fills in j > i.
    pub fn from_json(text: &str) -> Result<(LieAlgebra, Option<Matrix<Q>>), LieError> {
        #[derive(Deserialize)]
        struct Input {
            dim: usize,
            #[serde(default)]
            brackets: Vec<(usize, usize, Vec<serde_json::Value>)>,
            #[serde(default)]
            pairing: Option<Vec<Vec<serde_json::Value>>>,
            #[serde(default)]
            labels: Option<Vec<String>>,
        }
        let input: Input = serde_json::from_str(text).map_err(|e| LieError::Input(e.to_string()))?;
        let d = input.dim;
        let mut alg = LieAlgebra::new(d, vec![Q::zero(); d * d * d], input.labels)?;
        for (i, j, coeffs) in input.brackets {
            if i >= d || j >= d {
                return Err(LieError::Index(i, j));
            }
            if coeffs.len() != d {
                return Err(LieError::Arity {
                    expected: d,
                    got: coeffs.len(),
                });
            }
            for (k, v) in coeffs.iter().enumerate() {
                let c = json_rational(v)?;
                alg.set_constant(j, i, k, -c.clone());
                alg.set_constant(i, j, k, c);
            }
        }
        let pairing = match input.pairing {
            Some(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(LieError::Input("pairing must be dim × dim".into()));
                }
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(json_rational).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                Some(Matrix::from_rows(rows))
            }
            None => None,
        };
        Ok((alg, pairing))
    }
}

fn json_rational(v: &serde_json::Value) -> Result<Q, LieError> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(q)
            .ok_or_else(|| LieError::Rational(n.to_string())),
        serde_json::Value::String(s) => Q::from_str(s.trim()).map_err(|_| LieError::Rational(s.clone())),
        other => Err(LieError::Rational(other.to_string())),
    }
}

fn unit(d: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); d];
    v[i] = Q::one();
    v
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlgebraCheck {
    pub valid: bool,
    /// Nonzero residuals, named by the basis elements involved.
    pub residuals: Vec<String>,
}

/// Antisymmetry and Jacobi identity of the structure constants.
pub fn validate_algebra(alg: &LieAlgebra) -> AlgebraCheck {
    let d = alg.dim;
    let l = &alg.labels;
    let mut residuals = Vec::new();
    for i in 0..d {
        for j in i..d {
            for k in 0..d {
                let r = alg.constant(i, j, k) + alg.constant(j, i, k);
                if !r.is_zero() {
                    residuals.push(format!("antisymmetry([{},{}])[{}] = {r}", l[i], l[j], l[k]));
                }
            }
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            for k in j + 1..d {
                let (ei, ej, ek) = (unit(d, i), unit(d, j), unit(d, k));
                let a = alg.bracket(&alg.bracket(&ei, &ej), &ek);
                let b = alg.bracket(&alg.bracket(&ej, &ek), &ei);
                let c = alg.bracket(&alg.bracket(&ek, &ei), &ej);
                for m in 0..d {
                    let r = &a[m] + &b[m] + &c[m];
                    if !r.is_zero() {
                        residuals.push(format!("jacobi({},{},{})[{}] = {r}", l[i], l[j], l[k], l[m]));
                    }
                }
            }
        }
    }
    AlgebraCheck {
        valid: residuals.is_empty(),
        residuals,
    }
}

/// Subspace of a Lie algebra spanned by independent columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    basis: Matrix<Q>,
}

impl Subspace {
    /// Reduces the spanning columns to an echelon basis.
    pub fn new(dim: usize, spanning: &[Vec<Q>]) -> Subspace {
        if spanning.is_empty() {
            return Subspace::zero(dim);
        }
        let m = Matrix::from_cols(dim, spanning);
        let (r, pivots) = m.transpose().rref();
        let rows: Vec<Vec<Q>> = (0..pivots.len()).map(|i| r.row(i)).collect();
        Subspace {
            basis: Matrix::from_cols(dim, &rows),
        }
    }

    pub fn zero(dim: usize) -> Subspace {
        Subspace {
            basis: Matrix::zeros(dim, 0),
        }
    }

    pub fn full(dim: usize) -> Subspace {
        Subspace::new(dim, &(0..dim).map(|i| unit(dim, i)).collect::<Vec<_>>())
    }

    pub fn from_matrix(m: &Matrix<Q>) -> Subspace {
        Subspace::new(m.rows(), &m.columns())
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix<Q> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<Q>> {
        self.basis.columns()
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        if v.iter().all(Zero::is_zero) {
            return true;
        }
        if self.dim() == 0 {
            return false;
        }
        let m = self.basis.hstack(&Matrix::from_cols(self.ambient_dim(), &[v.to_vec()]));
        m.rank() == self.dim()
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.vectors().iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut vs = self.vectors();
        vs.extend(other.vectors());
        Subspace::new(self.ambient_dim(), &vs)
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient_dim());
        }
        let b = intersection_basis(&self.basis, &other.basis);
        Subspace::from_matrix(&b)
    }

    pub fn map(&self, m: &Matrix<Q>) -> Subspace {
        if self.dim() == 0 {
            return Subspace::zero(m.rows());
        }
        Subspace::from_matrix(&m.mul(&self.basis))
    }

    /// Elements of `self` pairing to zero with all of `other`.
    pub fn annihilator_in(&self, other: &Subspace, pairing: &Matrix<Q>) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return self.clone();
        }
        let g = other.basis.transpose().mul(pairing).mul(&self.basis);
        let coeffs = g.nullspace();
        let vs: Vec<Vec<Q>> = coeffs.iter().map(|c| self.basis.mul_vec(c)).collect();
        Subspace::new(self.ambient_dim(), &vs)
    }
}

fn brackets_within(alg: &LieAlgebra, a: &Subspace, b: &Subspace, target: &Subspace) -> bool {
    a.vectors()
        .iter()
        .all(|u| b.vectors().iter().all(|v| target.contains(&alg.bracket(u, v))))
}

fn pair(p: &Matrix<Q>, u: &[Q], v: &[Q]) -> Q {
    let pv = p.mul_vec(v);
    u.iter().zip(&pv).fold(Q::zero(), |acc, (a, b)| acc + a * b)
}

#[derive(Clone, Debug)]
pub struct ManinTriple {
    pub algebra: LieAlgebra,
    pub pairing: Matrix<Q>,
    pub g: Subspace,
    pub h: Subspace,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManinReport {
    pub algebra_valid: bool,
    pub g_subalgebra: bool,
    pub h_subalgebra: bool,
    pub g_isotropic: bool,
    pub h_isotropic: bool,
    pub g_lagrangian: bool,
    pub h_lagrangian: bool,
    pub transversal: bool,
    pub pairing_symmetric: bool,
    pub pairing_invariant: bool,
    pub pairing_nondegenerate: bool,
}

impl ManinReport {
    pub fn passes(&self) -> bool {
        self.algebra_valid
            && self.g_subalgebra
            && self.h_subalgebra
            && self.g_lagrangian
            && self.h_lagrangian
            && self.transversal
            && self.pairing_symmetric
            && self.pairing_invariant
            && self.pairing_nondegenerate
    }
}

fn isotropic(p: &Matrix<Q>, s: &Subspace) -> bool {
    s.dim() == 0 || s.basis.transpose().mul(p).mul(&s.basis).is_zero()
}

pub fn manin_check(t: &ManinTriple) -> ManinReport {
    let alg = &t.algebra;
    let d = alg.dim();
    let p = &t.pairing;
    let g_iso = isotropic(p, &t.g);
    let h_iso = isotropic(p, &t.h);
    let pairing_invariant = (0..d).all(|i| {
        let ei = unit(d, i);
        (0..d).all(|j| {
            let ej = unit(d, j);
            let bij = alg.bracket(&ei, &ej);
            (0..d).all(|k| {
                let ek = unit(d, k);
                (pair(p, &bij, &ek) + pair(p, &ej, &alg.bracket(&ei, &ek))).is_zero()
            })
        })
    });
    ManinReport {
        algebra_valid: validate_algebra(alg).valid,
        g_subalgebra: brackets_within(alg, &t.g, &t.g, &t.g),
        h_subalgebra: brackets_within(alg, &t.h, &t.h, &t.h),
        g_isotropic: g_iso,
        h_isotropic: h_iso,
        g_lagrangian: g_iso && 2 * t.g.dim() == d,
        h_lagrangian: h_iso && 2 * t.h.dim() == d,
        transversal: t.g.dim() + t.h.dim() == d && t.g.sum(&t.h).dim() == d,
        pairing_symmetric: *p == p.transpose(),
        pairing_invariant,
        pairing_nondegenerate: !p.determinant().is_zero(),
    }
}

/// Square complex matrix with Gaussian-rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    n: usize,
    re: Vec<Q>,
    im: Vec<Q>,
}

impl CMat {
    pub fn zero(n: usize) -> CMat {
        CMat {
            n,
            re: vec![Q::zero(); n * n],
            im: vec![Q::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> CMat {
        let mut m = CMat::zero(n);
        for i in 0..n {
            m.re[i * n + i] = Q::one();
        }
        m
    }

    /// Entries given as (real, imaginary) pairs, row by row.
    pub fn from_entries(n: usize, entries: &[(Q, Q)]) -> CMat {
        assert_eq!(entries.len(), n * n);
        CMat {
            n,
            re: entries.iter().map(|e| e.0.clone()).collect(),
            im: entries.iter().map(|e| e.1.clone()).collect(),
        }
    }

    pub fn unit(n: usize, i: usize, j: usize) -> CMat {
        let mut m = CMat::zero(n);
        m.re[i * n + j] = Q::one();
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> (Q, Q) {
        (self.re[i * self.n + j].clone(), self.im[i * self.n + j].clone())
    }

    pub fn add(&self, o: &CMat) -> CMat {
        CMat {
            n: self.n,
            re: self.re.iter().zip(&o.re).map(|(a, b)| a + b).collect(),
            im: self.im.iter().zip(&o.im).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &CMat) -> CMat {
        self.add(&o.scale_real(&q(-1)))
    }

    pub fn scale_real(&self, c: &Q) -> CMat {
        CMat {
            n: self.n,
            re: self.re.iter().map(|a| a * c).collect(),
            im: self.im.iter().map(|a| a * c).collect(),
        }
    }

    /// Multiplication by i.
    pub fn times_i(&self) -> CMat {
        CMat {
            n: self.n,
            re: self.im.iter().map(|a| -a).collect(),
            im: self.re.clone(),
        }
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        let n = self.n;
        let mut out = CMat::zero(n);
        for i in 0..n {
            for k in 0..n {
                let (ar, ai) = (&self.re[i * n + k], &self.im[i * n + k]);
                if ar.is_zero() && ai.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let (br, bi) = (&o.re[k * n + j], &o.im[k * n + j]);
                    out.re[i * n + j] += ar * br - ai * bi;
                    out.im[i * n + j] += ar * bi + ai * br;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        let mut out = CMat::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.re[j * n + i] = self.re[i * n + j].clone();
                out.im[j * n + i] = -self.im[i * n + j].clone();
            }
        }
        out
    }

    pub fn trace(&self) -> (Q, Q) {
        let n = self.n;
        (0..n).fold((Q::zero(), Q::zero()), |(r, i), k| {
            (r + &self.re[k * n + k], i + &self.im[k * n + k])
        })
    }

    pub fn is_unitary(&self) -> bool {
        self.mul(&self.adjoint()) == CMat::identity(self.n)
    }
}

/// sl(n,ℂ) as a real Lie algebra with basis H_k, iH_k (H_k = E_kk − E_{k+1,k+1}) followed by
/// E_ij, iE_ij for i ≠ j.
#[derive(Clone, Debug)]
pub struct SlRealification {
    n: usize,
    basis: Vec<CMat>,
    labels: Vec<String>,
}

impl SlRealification {
    pub fn new(n: usize) -> Self {
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        for k in 0..n - 1 {
            let h = CMat::unit(n, k, k).sub(&CMat::unit(n, k + 1, k + 1));
            labels.push(format!("H{}", k + 1));
            labels.push(format!("iH{}", k + 1));
            basis.push(h.clone());
            basis.push(h.times_i());
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let e = CMat::unit(n, i, j);
                    labels.push(format!("E{}{}", i + 1, j + 1));
                    labels.push(format!("iE{}{}", i + 1, j + 1));
                    basis.push(e.clone());
                    basis.push(e.times_i());
                }
            }
        }
        SlRealification { n, basis, labels }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn element(&self, coords: &[Q]) -> CMat {
        self.basis
            .iter()
            .zip(coords)
            .fold(CMat::zero(self.n), |acc, (b, c)| acc.add(&b.scale_real(c)))
    }

    /// Coordinates of a traceless matrix.
    pub fn coords(&self, m: &CMat) -> Vec<Q> {
        let n = self.n;
        let mut out = Vec::with_capacity(self.dim());
        let (mut tr, mut ti) = (Q::zero(), Q::zero());
        for k in 0..n - 1 {
            let (r, i) = m.entry(k, k);
            tr += r;
            ti += i;
            out.push(tr.clone());
            out.push(ti.clone());
        }
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (r, im) = m.entry(i, j);
                    out.push(r);
                    out.push(im);
                }
            }
        }
        out
    }

    pub fn algebra(&self) -> LieAlgebra {
        let d = self.dim();
        let mut c = Vec::with_capacity(d * d * d);
        for a in &self.basis {
            for b in &self.basis {
                let br = a.mul(b).sub(&b.mul(a));
                c.extend(self.coords(&br));
            }
        }
        LieAlgebra::new(d, c, Some(self.labels.clone())).expect("sizes match")
    }

    /// ⟨u, v⟩ = Im B(u, v) with B(u, v) = 2n tr(uv) the Killing form of sl(n,ℂ).
    pub fn im_killing(&self) -> Matrix<Q> {
        let d = self.dim();
        let scale = q(2 * self.n as i64);
        let mut m = Matrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                m.set(a, b, self.basis[a].mul(&self.basis[b]).trace().1 * &scale);
            }
        }
        m
    }

    /// Re B, for contrast with the imaginary part.
    pub fn re_killing(&self) -> Matrix<Q> {
        let d = self.dim();
        let scale = q(2 * self.n as i64);
        let mut m = Matrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                m.set(a, b, self.basis[a].mul(&self.basis[b]).trace().0 * &scale);
            }
        }
        m
    }

    /// Matrix of Ad_g on coordinates.
    pub fn adjoint(&self, g: &CMat) -> Matrix<Q> {
        let gi = g.adjoint();
        let cols: Vec<Vec<Q>> = self.basis.iter().map(|b| self.coords(&g.mul(b).mul(&gi))).collect();
        Matrix::from_cols(self.dim(), &cols)
    }

    fn span(&self, mats: &[CMat]) -> Subspace {
        let vs: Vec<Vec<Q>> = mats.iter().map(|m| self.coords(m)).collect();
        Subspace::new(self.dim(), &vs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootType {
    A1,
    A2,
}

impl RootType {
    pub fn rank(self) -> usize {
        match self {
            RootType::A1 => 1,
            RootType::A2 => 2,
        }
    }
}

/// Standard Manin triple (sl(n,ℂ), Im B, su(n), 𝔞 ⊕ 𝔫₊) with the splittings of the Borel part.
#[derive(Clone, Debug)]
pub struct StandardTriple {
    pub kind: RootType,
    pub real: SlRealification,
    pub triple: ManinTriple,
    pub t: Subspace,
    pub a: Subspace,
    pub n_plus: Subspace,
    pub n_minus: Subspace,
}

pub fn standard_triple(kind: RootType) -> StandardTriple {
    let n = kind.rank() + 1;
    let real = SlRealification::new(n);
    let hs: Vec<CMat> = (0..n - 1)
        .map(|k| CMat::unit(n, k, k).sub(&CMat::unit(n, k + 1, k + 1)))
        .collect();
    let t = real.span(&hs.iter().map(|h| h.times_i()).collect::<Vec<_>>());
    let a = real.span(&hs);
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let mut compact = hs.iter().map(|h| h.times_i()).collect::<Vec<_>>();
    for i in 0..n {
        for j in 0..n {
            let e = CMat::unit(n, i, j);
            if i < j {
                upper.push(e.clone());
                upper.push(e.times_i());
                let et = CMat::unit(n, j, i);
                compact.push(e.sub(&et));
                compact.push(e.add(&et).times_i());
            } else if i > j {
                lower.push(e.clone());
                lower.push(e.times_i());
            }
        }
    }
    let n_plus = real.span(&upper);
    let n_minus = real.span(&lower);
    let g = real.span(&compact);
    let h = a.sum(&n_plus);
    let triple = ManinTriple {
        algebra: real.algebra(),
        pairing: real.im_killing(),
        g,
        h,
    };
    StandardTriple {
        kind,
        real,
        triple,
        t,
        a,
        n_plus,
        n_minus,
    }
}

/// Exact unitary samples of SU(2) or SU(3): the identity, a diagonal phase, a rational point
/// of S³ and (for SU(3)) a cyclic permutation and a product.
pub fn standard_samples(kind: RootType) -> Vec<CMat> {
    let (c, s) = (crate::scalars::q_frac(3, 5), crate::scalars::q_frac(4, 5));
    let h = crate::scalars::q_frac(1, 2);
    let z = Q::zero();
    let o = Q::one();
    match kind {
        RootType::A1 => vec![
            CMat::identity(2),
            CMat::from_entries(2, &[(c.clone(), s.clone()), (z.clone(), z.clone()), (z.clone(), z.clone()), (c, -s)]),
            quaternion(&h, &h, &h, &h),
        ],
        RootType::A2 => {
            let phase = CMat::from_entries(
                3,
                &[
                    (c.clone(), s.clone()), (z.clone(), z.clone()), (z.clone(), z.clone()),
                    (z.clone(), z.clone()), (c.clone(), -s.clone()), (z.clone(), z.clone()),
                    (z.clone(), z.clone()), (z.clone(), z.clone()), (o.clone(), z.clone()),
                ],
            );
            let cyclic = CMat::from_entries(
                3,
                &[
                    (z.clone(), z.clone()), (o.clone(), z.clone()), (z.clone(), z.clone()),
                    (z.clone(), z.clone()), (z.clone(), z.clone()), (o.clone(), z.clone()),
                    (o.clone(), z.clone()), (z.clone(), z.clone()), (z.clone(), z.clone()),
                ],
            );
            let q2 = quaternion(&h, &h, &h, &h);
            let mut block = CMat::identity(3);
            for i in 0..2 {
                for j in 0..2 {
                    let (r, im) = q2.entry(i, j);
                    block.re[i * 3 + j] = r;
                    block.im[i * 3 + j] = im;
                }
            }
            let product = block.mul(&cyclic).mul(&phase);
            vec![CMat::identity(3), phase, block, cyclic, product]
        }
    }
}

/// The SU(2) element [[a+bi, c+di], [−c+di, a−bi]].
pub fn quaternion(a: &Q, b: &Q, c: &Q, d: &Q) -> CMat {
    CMat::from_entries(
        2,
        &[(a.clone(), b.clone()), (c.clone(), d.clone()), (-c.clone(), d.clone()), (a.clone(), -b.clone())],
    )
}

/// A check that is only ever sampled: it can fail on a sample but never holds globally.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCheck {
    pub holds_on_samples: bool,
    pub samples: usize,
    pub failing_samples: Vec<usize>,
}

impl SampledCheck {
    pub fn verdict(&self) -> Verdict {
        if self.holds_on_samples {
            Verdict::NotDetermined
        } else {
            Verdict::Fails
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientConditions {
    /// [𝔨, 𝔥] ⊆ 𝔥.
    pub a: bool,
    /// 𝔨° ⊆ 𝔥 is an ideal.
    pub b: bool,
    /// [𝔨, 𝔨°] ⊆ 𝔥, equivalent to `b` by invariance.
    pub b_alt: bool,
    /// 𝔨° ⊆ 𝔥 is a subalgebra.
    pub c: bool,
    pub k_annihilator_dim: usize,
    /// Ad_g(𝔥) ∩ (𝔨 ⊕ 𝔨°) ⊆ 𝔨°.
    pub d_pd: SampledCheck,
    /// Ad_g(𝔥) ∩ (𝔨 ⊕ 𝔥) ⊆ 𝔥.
    pub d_trivial: SampledCheck,
}

pub fn quotient_conditions(st: &StandardTriple, k: &Subspace, samples: &[CMat]) -> Result<QuotientConditions, LieError> {
    let t = &st.triple;
    if !t.g.contains_space(k) {
        return Err(LieError::Subspace);
    }
    for (i, g) in samples.iter().enumerate() {
        if g.n() != st.real.n {
            return Err(LieError::SampleSize(i));
        }
        if !g.is_unitary() {
            return Err(LieError::NotUnitary(i));
        }
    }
    let alg = &t.algebra;
    let h = &t.h;
    let ko = h.annihilator_in(k, &t.pairing);
    let k_plus_ko = k.sum(&ko);
    let k_plus_h = k.sum(h);
    let mut pd_fail = Vec::new();
    let mut triv_fail = Vec::new();
    for (i, g) in samples.iter().enumerate() {
        let adh = h.map(&st.real.adjoint(g));
        if !ko.contains_space(&adh.intersect(&k_plus_ko)) {
            pd_fail.push(i);
        }
        if !h.contains_space(&adh.intersect(&k_plus_h)) {
            triv_fail.push(i);
        }
    }
    Ok(QuotientConditions {
        a: brackets_within(alg, k, h, h),
        b: brackets_within(alg, h, &ko, &ko),
        b_alt: brackets_within(alg, k, &ko, h),
        c: brackets_within(alg, &ko, &ko, &ko),
        k_annihilator_dim: ko.dim(),
        d_pd: SampledCheck {
            holds_on_samples: pd_fail.is_empty(),
            samples: samples.len(),
            failing_samples: pd_fail,
        },
        d_trivial: SampledCheck {
            holds_on_samples: triv_fail.is_empty(),
            samples: samples.len(),
            failing_samples: triv_fail,
        },
    })
}

/// Largest |Re λ| over the eigenvalues of ad(v); a heuristic floating-point check.
pub fn ad_spectrum_real_part(alg: &LieAlgebra, v: &[Q]) -> f64 {
    let ad = alg.ad(v);
    let d = alg.dim();
    let m = DMatrix::from_fn(d, d, |i, j| q_to_f64(ad.get(i, j)));
    m.complex_eigenvalues().iter().fold(0.0, |acc, z| acc.max(z.re.abs()))
}

/// Complex structure on ℝ^{2m}.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructure {
    j: Matrix<Q>,
}

impl ComplexStructure {
    pub fn new(j: Matrix<Q>) -> Result<Self, LieError> {
        let n = j.rows();
        if j.cols() != n || n % 2 == 1 || j.mul(&j) != Matrix::identity(n).neg() {
            return Err(LieError::NotComplex);
        }
        Ok(ComplexStructure { j })
    }

    /// J∂x_k = ∂y_k on coordinates ordered (x1, y1, x2, y2, …).
    pub fn standard(m: usize) -> Self {
        let mut j = Matrix::zeros(2 * m, 2 * m);
        for k in 0..m {
            j.set(2 * k + 1, 2 * k, q(1));
            j.set(2 * k, 2 * k + 1, q(-1));
        }
        ComplexStructure { j }
    }

    pub fn matrix(&self) -> &Matrix<Q> {
        &self.j
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PositivityReport {
    pub positive: bool,
    pub leaf_dim: usize,
    pub j_invariant: bool,
    pub omega_j_invariant: bool,
    pub metric_symmetric: bool,
    pub metric_definite: bool,
    /// A vector u of the leaf with g(u, u) ≤ 0, when the metric is not positive.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<String>>,
}

/// Leaves of the constant bivector π (antisymmetric matrix, π^♯ = πᵀ) are Kähler for J:
/// S = im π^♯ is J-invariant, ω_S(π^♯ξ, π^♯η) = π(ξ, η) is J-invariant and
/// g_S(u, v) = ω_S(u, Jv) is positive definite.
pub fn positivity(j: &ComplexStructure, pi: &Matrix<Q>) -> PositivityReport {
    let sharp = pi.transpose();
    let (_, pivots) = sharp.rref();
    let s = sharp.select_cols(&pivots);
    let r = pivots.len();
    if r == 0 {
        return PositivityReport {
            positive: true,
            leaf_dim: 0,
            j_invariant: true,
            omega_j_invariant: true,
            metric_symmetric: true,
            metric_definite: true,
            witness: None,
        };
    }
    // ω_S in the basis s_k = π^♯(e_{pivot k}).
    let omega = pi.select_rows(&pivots).select_cols(&pivots);
    let js = j.j.mul(&s);
    let t_cols: Option<Vec<Vec<Q>>> = (0..r).map(|l| s.solve(&js.col(l))).collect();
    let Some(t_cols) = t_cols else {
        return PositivityReport {
            positive: false,
            leaf_dim: r,
            j_invariant: false,
            omega_j_invariant: false,
            metric_symmetric: false,
            metric_definite: false,
            witness: None,
        };
    };
    let t = Matrix::from_cols(r, &t_cols);
    let omega_j_invariant = t.transpose().mul(&omega).mul(&t) == omega;
    let g = omega.mul(&t);
    let metric_symmetric = g == g.transpose();
    let metric_definite = metric_symmetric && is_positive_definite(&g);
    let positive = omega_j_invariant && metric_definite;
    let witness = if positive {
        None
    } else {
        let n = pi.rows();
        let norm = |c: &[Q]| pair(&g, c, c);
        let from_coords = (0..n).filter_map(|i| s.solve(&unit(n, i))).find(|c| !norm(c).is_positive());
        let c = from_coords.or_else(|| (0..r).map(|k| unit(r, k)).find(|c| !norm(c).is_positive()));
        c.map(|c| s.mul_vec(&c).iter().map(|x| x.to_string()).collect())
    };
    PositivityReport {
        positive,
        leaf_dim: r,
        j_invariant: true,
        omega_j_invariant,
        metric_symmetric,
        metric_definite,
        witness,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionBivector {
    pub bivector: Multivector,
    pub commuting: bool,
    pub poisson: Verdict,
    /// ℒ_{ρ(e_i)} π_M = 0 for every generator.
    pub invariant: Verdict,
}

/// ∧²ρ(π_A) = Σ_{i<j} π_A^{ij} ρ(e_i)∧ρ(e_j).
pub fn induced_from_action(pi_a: &Matrix<Q>, rho: &[Multivector]) -> ActionBivector {
    assert!(!rho.is_empty());
    let chart = rho[0].chart().clone();
    let mut out = Multivector::zero(&chart, 2);
    for i in 0..rho.len() {
        for j in i + 1..rho.len() {
            let c = pi_a.get(i, j);
            if !c.is_zero() {
                out = out.add(&rho[i].wedge(&rho[j]).scale(c));
            }
        }
    }
    let commuting = (0..rho.len()).all(|i| (i + 1..rho.len()).all(|j| rho[i].schouten(&rho[j]).is_zero()));
    let invariant = rho
        .iter()
        .map(|x| {
            let l = Multivector::lie_derivative(x, &out);
            if l.is_zero() {
                Verdict::Holds
            } else if l.is_exact() {
                Verdict::Fails
            } else {
                Verdict::NotDetermined
            }
        })
        .fold(Verdict::Holds, Verdict::and);
    ActionBivector {
        poisson: out.is_poisson(),
        bivector: out,
        commuting,
        invariant,
    }
}

/// Order of the Weyl group of type A_r, B_r, C_r or D_r.
pub fn weyl_order(kind: char, rank: usize) -> Result<u128, LieError> {
    let fact = |n: usize| (1..=n as u128).product::<u128>();
    match (kind.to_ascii_uppercase(), rank) {
        ('A', r) if r >= 1 => Ok(fact(r + 1)),
        ('B', r) | ('C', r) if r >= 1 => Ok((1u128 << r) * fact(r)),
        ('D', r) if r >= 2 => Ok((1u128 << (r - 1)) * fact(r)),
        _ => Err(LieError::WeylType(kind, rank)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Alt;
    use crate::scalars::{parse, Chart};

    #[test]
    fn so3_and_abelian_are_valid() {
        assert!(validate_algebra(&LieAlgebra::so3()).valid);
        assert!(validate_algebra(&LieAlgebra::abelian(4)).valid);
        let mut bad = LieAlgebra::so3();
        bad.set_constant(0, 1, 0, q(1));
        bad.set_constant(1, 0, 0, q(-1));
        let chk = validate_algebra(&bad);
        assert!(!chk.valid);
        assert_eq!(chk.residuals, vec!["jacobi(e1,e2,e3)[e2] = -1".to_string()]);
    }

    #[test]
    fn json_input() {
        let text = r#"{"dim": 3, "brackets": [[0,1,[0,0,1]], [1,2,[1,0,0]], [2,0,[0,1,0]]]}"#;
        let (alg, pairing) = LieAlgebra::from_json(text).unwrap();
        assert_eq!(alg, LieAlgebra::so3());
        assert!(pairing.is_none());
    }

    #[test]
    fn standard_triples() {
        let a1 = standard_triple(RootType::A1);
        assert_eq!(a1.triple.algebra.dim(), 6);
        assert_eq!((a1.triple.h.dim(), a1.t.dim(), a1.a.dim(), a1.n_plus.dim()), (3, 1, 1, 2));
        assert!(manin_check(&a1.triple).passes());
        assert!(brackets_within(&a1.triple.algebra, &a1.t, &a1.triple.h, &a1.triple.h));

        let swapped = ManinTriple {
            h: a1.triple.g.clone(),
            ..a1.triple.clone()
        };
        assert!(!manin_check(&swapped).transversal);
        let real = ManinTriple {
            pairing: a1.real.re_killing(),
            ..a1.triple.clone()
        };
        assert!(!manin_check(&real).g_isotropic);

        let a2 = standard_triple(RootType::A2);
        assert_eq!(a2.triple.algebra.dim(), 16);
        assert_eq!((a2.n_plus.dim(), a2.t.dim(), a2.a.dim()), (6, 2, 2));
        assert!(manin_check(&a2.triple).passes());
    }

    #[test]
    fn torus_quotient_conditions() {
        for kind in [RootType::A1, RootType::A2] {
            let st = standard_triple(kind);
            let samples = standard_samples(kind);
            let qc = quotient_conditions(&st, &st.t, &samples).unwrap();
            assert!(qc.a && qc.b && qc.b_alt && qc.c, "{kind:?}");
            assert!(qc.d_pd.holds_on_samples && qc.d_trivial.holds_on_samples);
            assert_eq!(qc.k_annihilator_dim, st.n_plus.dim());
            let zero = quotient_conditions(&st, &Subspace::zero(st.triple.algebra.dim()), &samples).unwrap();
            assert!(zero.a && zero.b && zero.c && zero.d_pd.holds_on_samples);
        }
    }

    #[test]
    fn non_unitary_sample_rejected() {
        let st = standard_triple(RootType::A1);
        let bad = CMat::identity(2).scale_real(&q(2));
        assert_eq!(quotient_conditions(&st, &st.t, &[bad]), Err(LieError::NotUnitary(0)).map(|_: ()| unreachable!()));
    }

    #[test]
    fn spectra_of_compact_borel_part() {
        let st = standard_triple(RootType::A1);
        let v: Vec<Q> = st.t.vectors()[0].iter().zip(&st.n_plus.vectors()[0]).map(|(a, b)| a + b).collect();
        assert!(ad_spectrum_real_part(&st.triple.algebra, &v) < 1e-9);
        let a = &st.a.vectors()[0];
        assert!(ad_spectrum_real_part(&st.triple.algebra, a) > 0.5);
    }

    #[test]
    fn positivity_examples() {
        let j = ComplexStructure::standard(1);
        let pi = Matrix::from_rows(vec![vec![q(0), q(1)], vec![q(-1), q(0)]]);
        assert!(positivity(&j, &pi).positive);
        let neg = positivity(&j, &pi.neg());
        assert!(!neg.positive);
        assert_eq!(neg.witness, Some(vec!["1".to_string(), "0".to_string()]));
        assert!(positivity(&j, &Matrix::zeros(2, 2)).positive);
    }

    #[test]
    fn action_bivectors() {
        let c = Chart::of(&["x", "y"]);
        let pi_a = Matrix::from_rows(vec![vec![q(0), q(1)], vec![q(-1), q(0)]]);
        let rho = vec![Multivector::euler(&c, 0, 1), Multivector::rotation(&c, 0, 1)];
        let out = induced_from_action(&pi_a, &rho);
        let expect = Alt::from_terms(&c, 2, [(vec![0, 1], parse("x^2+y^2").unwrap())]).unwrap();
        assert_eq!(out.bivector, expect);
        assert!(out.commuting && out.poisson.holds() && out.invariant.holds());
        let tr = induced_from_action(&pi_a, &[Multivector::partial(&c, 0), Multivector::partial(&c, 1)]);
        assert_eq!(tr.bivector, Alt::basis(&c, &[0, 1]));
        assert!(induced_from_action(&Matrix::zeros(2, 2), &rho).bivector.is_zero());
    }

    #[test]
    fn weyl_orders() {
        assert_eq!(weyl_order('A', 1).unwrap(), 2);
        assert_eq!(weyl_order('A', 2).unwrap(), 6);
        assert_eq!(weyl_order('B', 2).unwrap(), 8);
        assert_eq!(weyl_order('D', 4).unwrap(), 192);
        assert!(weyl_order('E', 6).is_err());
    }
}
