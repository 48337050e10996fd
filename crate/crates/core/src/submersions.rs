//! Poisson submersions p: (Σ, π_Σ) → (M, π_M): fibrewise Poisson-Dirac and coupling checks,
//! orthogonal pencils, coupling data, horizontal generators and Hamiltonian flows.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::calculus::{Form, Multivector, SmoothMap};
use crate::linalg::{Field, Matrix};
use crate::scalars::{Chart, Coord, EvalError, Point, RatFunc, Scalar, Q};
use crate::submanifolds::{
    intersection_dim, pointwise_induce, ratfunc_jacobian, solve_induced, Frames, SubmanifoldSpec,
};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubmersionError {
    #[error("bivectors must live on the source and target charts of the map")]
    ChartMismatch,
    #[error("map is not a submersion at {point:?}: Jacobian rank {rank} < {dim}")]
    NotSubmersion {
        point: Vec<String>,
        rank: usize,
        dim: usize,
    },
    #[error("map does not relate the two bivectors")]
    NotPoissonMap,
    #[error("empty sample grid")]
    EmptyGrid,
    #[error("exact data required")]
    NeedsExact,
    #[error("horizontal fields are not complementary to the fibres at {point:?}")]
    NotComplementary { point: Vec<String> },
}

#[derive(Clone, Debug)]
pub struct SubmersionSpec {
    pub map: SmoothMap,
    pub pi_sigma: Multivector,
    pub pi_m: Multivector,
}

impl SubmersionSpec {
    pub fn new(map: SmoothMap, pi_sigma: Multivector, pi_m: Multivector) -> Result<Self, SubmersionError> {
        if pi_sigma.chart() != map.source() || pi_m.chart() != map.target() {
            return Err(SubmersionError::ChartMismatch);
        }
        Ok(SubmersionSpec { map, pi_sigma, pi_m })
    }

    pub fn total(&self) -> &Chart {
        self.map.source()
    }

    pub fn base(&self) -> &Chart {
        self.map.target()
    }

    pub fn fiber_dim(&self) -> usize {
        self.total().dim() - self.base().dim()
    }

    pub fn is_exact(&self) -> bool {
        self.map.is_exact() && self.pi_sigma.is_exact() && self.pi_m.is_exact()
    }

    /// p relates π_Σ to π_M; numeric data is sampled.
    pub fn poisson_map(&self, points: &[Point<f64>], tol: f64) -> Verdict {
        self.map.map_related(&self.pi_sigma, &self.pi_m, points, tol)
    }

    /// π_Σ^♯(d(y_a∘p)) for the base coordinates y_a.
    pub fn horizontal_fields(&self) -> Vec<Multivector> {
        (0..self.base().dim())
            .map(|a| self.pi_sigma.sharp(&self.map.component_differential(a)))
            .collect()
    }
}

/// Kernel of dp with rational-function entries, as columns.
pub fn vertical_frame_symbolic(spec: &SubmersionSpec) -> Option<Matrix<RatFunc>> {
    let j = ratfunc_jacobian(&spec.map)?;
    let n = spec.total().dim();
    let ker = j.nullspace();
    if ker.len() != spec.fiber_dim() {
        return None;
    }
    Some(Matrix::from_cols(n, &ker))
}

/// Pointwise frames: V = ker dp as `tangent`, V° spanned by the rows of dp as `conormal`.
pub fn vertical_frame_at<F: Coord + Field>(
    spec: &SubmersionSpec,
    p: &Point<F>,
) -> Result<Result<Frames<F>, SubmersionError>, EvalError> {
    let j = spec.map.jacobian_at(p)?;
    let rank = j.rank();
    let m = spec.base().dim();
    if rank < m {
        return Ok(Err(SubmersionError::NotSubmersion {
            point: p.labels(),
            rank,
            dim: m,
        }));
    }
    let n = spec.total().dim();
    let ker = j.nullspace();
    let tangent = if ker.is_empty() {
        Matrix::zeros(n, 0)
    } else {
        Matrix::from_cols(n, &ker)
    };
    Ok(Ok(Frames {
        tangent,
        conormal: j.transpose(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FiberKind {
    Trivial,
    Symplectic,
    Degenerate,
}

impl FiberKind {
    pub fn from_rank(rank: usize, fiber_dim: usize) -> FiberKind {
        if rank == 0 {
            FiberKind::Trivial
        } else if rank == fiber_dim {
            FiberKind::Symplectic
        } else {
            FiberKind::Degenerate
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberSample {
    pub coords: Vec<String>,
    pub fiber_pd: bool,
    /// Rank of π_Σ^♯ on V°.
    pub fiber_rank: usize,
    pub coupling: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fiber_bivector_rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fiber_kind: Option<FiberKind>,
    /// Rank of π_M at p(x).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base_rank: Option<usize>,
    /// π_Σ^♯(V°) lies in the tangent space of the leaf through the point.
    pub leaf_containment: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiberReport {
    pub mode: &'static str,
    pub samples: Vec<FiberSample>,
    pub singular: Vec<Vec<String>>,
    pub fiber_pd: Verdict,
    pub coupling: Verdict,
    pub fiber_ranks: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generic_fiber_rank: Option<usize>,
    pub coregular: Verdict,
    pub coregular_witnesses: Vec<Vec<String>>,
    pub fiber_kinds: BTreeMap<FiberKind, usize>,
}

struct FiberPoint<F> {
    sample: FiberSample,
    vertical_bivector: Option<Matrix<F>>,
}

fn fiber_point<F: Coord + Field>(
    spec: &SubmersionSpec,
    p: &Point<F>,
) -> Result<Option<FiberPoint<F>>, SubmersionError> {
    let fr = match vertical_frame_at(spec, p) {
        Ok(r) => r?,
        Err(_) => return Ok(None),
    };
    let Ok(pim) = spec.pi_sigma.eval_matrix(p) else {
        return Ok(None);
    };
    let n = spec.total().dim();
    let sharp = pim.transpose();
    let img = sharp.mul(&fr.conormal);
    let fiber_pd = intersection_dim(&img, &fr.tangent) == 0;
    let fiber_rank = img.rank();
    let coupling = fr.tangent.hstack(&img).rank() == n;
    let induced = if fiber_pd { pointwise_induce(&pim, &fr) } else { None };
    let fiber_bivector_rank = induced.as_ref().map(|m| m.rank());
    let base_rank = spec
        .map
        .image(p)
        .ok()
        .and_then(|y| spec.pi_m.eval_matrix(&y).ok())
        .map(|m| m.rank());
    let vertical_bivector = induced.map(|m| fr.tangent.mul(&m).mul(&fr.tangent.transpose()));
    Ok(Some(FiberPoint {
        sample: FiberSample {
            coords: p.labels(),
            fiber_pd,
            fiber_rank,
            coupling,
            fiber_bivector_rank,
            fiber_kind: fiber_bivector_rank.map(|r| FiberKind::from_rank(r, spec.fiber_dim())),
            base_rank,
            leaf_containment: sharp.hstack(&img).rank() == sharp.rank(),
        },
        vertical_bivector,
    }))
}

fn generic_fiber_rank(spec: &SubmersionSpec) -> Option<usize> {
    let j = ratfunc_jacobian(&spec.map)?;
    let pim = spec.pi_sigma.ratfunc_matrix()?;
    Some(pim.transpose().mul(&j.transpose()).rank())
}

/// Fibrewise analysis on the grid. Each fibre is coregular when π_Σ^♯(V°) meets V trivially
/// and has constant rank along it; for a Poisson map that rank equals the rank of π_M at p(x),
/// so the per-fibre constancy is checked as agreement with the base rank at every sample.
pub fn fiber_report(spec: &SubmersionSpec, grid: &[Point<Q>]) -> Result<FiberReport, SubmersionError> {
    if grid.is_empty() {
        return Err(SubmersionError::EmptyGrid);
    }
    let exact = spec.is_exact();
    let results: Vec<(Vec<String>, Option<FiberSample>)> = if exact {
        grid.par_iter()
            .map(|p| fiber_point(spec, p).map(|r| (p.labels(), r.map(|f| f.sample))))
            .collect::<Result<_, _>>()?
    } else {
        grid.par_iter()
            .map(|p| {
                let pf = p.to_f64();
                fiber_point(spec, &pf).map(|r| (pf.labels(), r.map(|f| f.sample)))
            })
            .collect::<Result<_, _>>()?
    };
    let mut samples = Vec::new();
    let mut singular = Vec::new();
    for (labels, r) in results {
        match r {
            Some(s) => samples.push(s),
            None => singular.push(labels),
        }
    }
    if samples.is_empty() {
        return Err(SubmersionError::EmptyGrid);
    }
    let fiber_pd = Verdict::from_bool(samples.iter().all(|s| s.fiber_pd));
    let coupling = Verdict::from_bool(samples.iter().all(|s| s.coupling));
    let fiber_ranks: Vec<usize> = samples
        .iter()
        .map(|s| s.fiber_rank)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let generic = if exact { generic_fiber_rank(spec) } else { None };
    let off_fibre = |s: &FiberSample| !s.fiber_pd || s.base_rank != Some(s.fiber_rank);
    let coregular_witnesses: Vec<Vec<String>> =
        samples.iter().filter(|s| off_fibre(s)).map(|s| s.coords.clone()).collect();
    let coregular = if !coregular_witnesses.is_empty() {
        Verdict::Fails
    } else if exact {
        Verdict::Holds
    } else {
        Verdict::NotDetermined
    };
    let mut fiber_kinds = BTreeMap::new();
    for s in &samples {
        if let Some(k) = s.fiber_kind {
            *fiber_kinds.entry(k).or_insert(0) += 1;
        }
    }
    Ok(FiberReport {
        mode: if exact { "exact" } else { "numeric" },
        samples,
        singular,
        fiber_pd,
        coupling,
        fiber_ranks,
        generic_fiber_rank: generic,
        coregular,
        coregular_witnesses,
        fiber_kinds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PencilDecomposition {
    pub pi_v: String,
    pub pi_h: String,
    #[serde(skip)]
    pub vertical: Multivector,
    #[serde(skip)]
    pub horizontal: Multivector,
    /// [π_V,π_V], [π_V,π_H], [π_H,π_H].
    pub brackets_zero: [bool; 3],
    /// π_V^♯ kills every d(y_a∘p).
    pub vertical_certificate: bool,
    /// π_H^♯(T*Σ) ∩ V = 0 at every sample.
    pub horizontal_meets_vertical_trivially: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankWitness {
    pub coords: Vec<String>,
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PencilObstruction {
    pub reason: String,
    /// Distinct ranks of the fibre bivectors over the grid.
    pub ranks: Vec<usize>,
    /// One sample per rank, then every point where the fibre structures do not assemble.
    pub witnesses: Vec<RankWitness>,
    pub mismatches: Vec<RankWitness>,
}

impl PencilObstruction {
    fn simple(reason: &str) -> Self {
        PencilObstruction {
            reason: reason.to_string(),
            ranks: Vec::new(),
            witnesses: Vec::new(),
            mismatches: Vec::new(),
        }
    }
}

/// π_V with rational coefficients inducing the fibre structures, or `None` if the
/// fibrewise solve is inconsistent over the function field.
pub fn vertical_bivector_symbolic(spec: &SubmersionSpec) -> Option<Multivector> {
    let k = vertical_frame_symbolic(spec)?;
    let pim = spec.pi_sigma.ratfunc_matrix()?;
    let j = ratfunc_jacobian(&spec.map)?;
    let img = pim.transpose().mul(&j.transpose());
    if k.cols() > 0 && intersection_dim(&img, &k) != 0 {
        return None;
    }
    let pv = if k.cols() == 0 {
        Matrix::zeros(spec.total().dim(), spec.total().dim())
    } else {
        let pf = solve_induced(&pim, &k, false)?;
        k.mul(&pf).mul(&k.transpose())
    };
    Some(Multivector::from_ratfunc_matrix(spec.total(), &pv))
}

/// Splits π_Σ = π_V + π_H when the fibre structures assemble into a smooth vertical bivector.
pub fn pencil_decompose(
    spec: &SubmersionSpec,
    grid: &[Point<Q>],
) -> Result<Result<PencilDecomposition, PencilObstruction>, SubmersionError> {
    if !spec.is_exact() {
        return Err(SubmersionError::NeedsExact);
    }
    if grid.is_empty() {
        return Err(SubmersionError::EmptyGrid);
    }
    let points: Vec<(Point<Q>, FiberPoint<Q>)> = grid
        .par_iter()
        .map(|p| fiber_point(spec, p).map(|r| r.map(|f| (p.clone(), f))))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .flatten()
        .collect();
    if points.is_empty() {
        return Err(SubmersionError::EmptyGrid);
    }
    if points.iter().any(|(_, f)| !f.sample.fiber_pd) {
        let mut ob = PencilObstruction::simple("fibres are not Poisson-Dirac");
        ob.witnesses = points
            .iter()
            .filter(|(_, f)| !f.sample.fiber_pd)
            .map(|(p, f)| RankWitness {
                coords: p.labels(),
                rank: f.sample.fiber_rank,
            })
            .collect();
        return Ok(Err(ob));
    }
    let rank_of = |f: &FiberPoint<Q>| f.sample.fiber_bivector_rank.unwrap_or(0);
    let mut first_of_rank: BTreeMap<usize, RankWitness> = BTreeMap::new();
    for (p, f) in &points {
        first_of_rank.entry(rank_of(f)).or_insert_with(|| RankWitness {
            coords: p.labels(),
            rank: rank_of(f),
        });
    }
    let ranks: Vec<usize> = first_of_rank.keys().copied().collect();
    let Some(pi_v) = vertical_bivector_symbolic(spec) else {
        let mut ob = PencilObstruction::simple("fibrewise solve is inconsistent");
        ob.ranks = ranks;
        ob.witnesses = first_of_rank.into_values().collect();
        return Ok(Err(ob));
    };
    let mismatches: Vec<RankWitness> = points
        .iter()
        .filter(|(p, f)| pi_v.eval_matrix(p).ok().as_ref() != f.vertical_bivector.as_ref())
        .map(|(p, f)| RankWitness {
            coords: p.labels(),
            rank: rank_of(f),
        })
        .collect();
    if !mismatches.is_empty() {
        let reason = if ranks.len() > 1 {
            "rank jump: fibre structures do not assemble into a smooth vertical bivector"
        } else {
            "fibre structures do not assemble into a smooth vertical bivector"
        };
        let mut ob = PencilObstruction::simple(reason);
        ob.ranks = ranks;
        ob.witnesses = first_of_rank.into_values().collect();
        ob.mismatches = mismatches;
        return Ok(Err(ob));
    }
    let pi_h = spec.pi_sigma.sub(&pi_v);
    let brackets_zero = [
        pi_v.schouten(&pi_v).is_zero(),
        pi_v.schouten(&pi_h).is_zero(),
        pi_h.schouten(&pi_h).is_zero(),
    ];
    let vertical_certificate =
        (0..spec.base().dim()).all(|a| pi_v.sharp(&spec.map.component_differential(a)).is_zero());
    let meets = points.iter().all(|(p, f)| {
        let Ok(h) = pi_h.eval_matrix(p) else { return false };
        let v = f.vertical_bivector.as_ref().map(|_| ()).and_then(|_| {
            vertical_frame_at(spec, p).ok().and_then(|r| r.ok())
        });
        match v {
            Some(fr) if fr.tangent.cols() > 0 => intersection_dim(&h.transpose(), &fr.tangent) == 0,
            Some(_) => true,
            None => false,
        }
    });
    if !brackets_zero.iter().all(|&b| b) || !vertical_certificate || !meets {
        let mut ob = PencilObstruction::simple("pencil certificates fail");
        ob.ranks = ranks;
        return Ok(Err(ob));
    }
    Ok(Ok(PencilDecomposition {
        pi_v: pi_v.to_string(),
        pi_h: pi_h.to_string(),
        vertical: pi_v,
        horizontal: pi_h,
        brackets_zero,
        vertical_certificate,
        horizontal_meets_vertical_trivially: Verdict::from_bool(meets),
    }))
}

/// Compares π_V at each point with the bivector induced pointwise on the fibre through it.
pub fn pencil_cross_check(spec: &SubmersionSpec, pi_v: &Multivector, points: &[Point<Q>]) -> Vec<bool> {
    points
        .iter()
        .map(|p| match fiber_point(spec, p) {
            Ok(Some(f)) => pi_v.eval_matrix(p).ok() == f.vertical_bivector,
            _ => false,
        })
        .collect()
}

/// Ehresmann connection (lifts h(∂_a) of the base coordinate fields), vertical bivector and
/// a 2-form vanishing on vertical vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingData {
    pub horizontal: Vec<Multivector>,
    pub vertical: Multivector,
    pub omega: Form,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingVerdicts {
    /// [π,π] = 0.
    pub a: Verdict,
    /// ℒ_{h(u)} π = 0.
    pub b: Verdict,
    /// dω on horizontal triples.
    pub c: Verdict,
    /// Curvature identity.
    pub d: Verdict,
}

impl CouplingVerdicts {
    pub fn all(&self) -> Verdict {
        self.a.and(self.b).and(self.c).and(self.d)
    }
}

fn zero_verdict<K: crate::calculus::Kind>(x: &crate::calculus::Alt<K>) -> Verdict {
    if x.is_zero() {
        Verdict::Holds
    } else if x.is_exact() {
        Verdict::Fails
    } else {
        Verdict::NotDetermined
    }
}

fn scalar_zero_verdict(s: &Scalar) -> Verdict {
    match s.decide_zero() {
        Some(b) => Verdict::from_bool(b),
        None => Verdict::NotDetermined,
    }
}

/// Coupling data read off from π_Σ when π_M is nondegenerate: h(∂_a) = Σ_b W_ab π_Σ^♯ d(y_b∘p)
/// and ω = Σ_{a<b} W_ab d(y_a∘p)∧d(y_b∘p) with W = (π_M∘p)⁻¹, π = π_Σ − Σ π_M^{ab} h_a∧h_b.
pub fn canonical_coupling_data(spec: &SubmersionSpec) -> Option<CouplingData> {
    let m = spec.base().dim();
    let p = spec.pi_m.compose_coeffs(&spec.map).ratfunc_matrix()?;
    let w = p.inverse()?;
    let gens = spec.horizontal_fields();
    let dys: Vec<Form> = (0..m).map(|a| spec.map.component_differential(a)).collect();
    let sigma = spec.total();
    let horizontal: Vec<Multivector> = (0..m)
        .map(|a| {
            (0..m).fold(Multivector::zero(sigma, 1), |acc, b| {
                acc.add(&gens[b].mul_scalar(&Scalar::Exact(w.get(a, b).clone())))
            })
        })
        .collect();
    let mut omega = Form::zero(sigma, 2);
    let mut pi_h = Multivector::zero(sigma, 2);
    for a in 0..m {
        for b in a + 1..m {
            omega = omega.add(&dys[a].wedge(&dys[b]).mul_scalar(&Scalar::Exact(w.get(a, b).clone())));
            pi_h = pi_h.add(
                &horizontal[a]
                    .wedge(&horizontal[b])
                    .mul_scalar(&Scalar::Exact(p.get(a, b).clone())),
            );
        }
    }
    Some(CouplingData {
        horizontal,
        vertical: spec.pi_sigma.sub(&pi_h),
        omega,
    })
}

/// Checks the four conditions making (H, π, ω) the data of a Poisson structure.
/// Complementarity of H to the fibres is checked on the grid first.
pub fn coupling_data_verify(
    cd: &CouplingData,
    spec: &SubmersionSpec,
    grid: &[Point<Q>],
) -> Result<CouplingVerdicts, SubmersionError> {
    let n = spec.total().dim();
    for p in grid {
        let Ok(Ok(fr)) = vertical_frame_at(spec, p) else { continue };
        let cols: Option<Vec<Vec<Q>>> = cd.horizontal.iter().map(|h| h.eval_vector(p).ok()).collect();
        let Some(cols) = cols else { continue };
        let h = Matrix::from_cols(n, &cols);
        if fr.tangent.hstack(&h).rank() != n {
            return Err(SubmersionError::NotComplementary { point: p.labels() });
        }
    }
    let pi = &cd.vertical;
    let a = zero_verdict(&pi.schouten(pi));
    let b = cd
        .horizontal
        .iter()
        .map(|h| zero_verdict(&Multivector::lie_derivative(h, pi)))
        .fold(Verdict::Holds, Verdict::and);
    let dw = cd.omega.d();
    let hs = &cd.horizontal;
    let m = hs.len();
    let mut c = Verdict::Holds;
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let v = dw.evaluate_on(&[hs[i].clone(), hs[j].clone(), hs[k].clone()]);
                c = c.and(scalar_zero_verdict(&v));
            }
        }
    }
    let mut d = Verdict::Holds;
    for i in 0..m {
        for j in i + 1..m {
            // curv(∂i, ∂j) = −[h_i, h_j] since coordinate fields commute.
            let curv = hs[i].schouten(&hs[j]).neg();
            let xi = dw.interior(&hs[j]).interior(&hs[i]);
            d = d.and(zero_verdict(&curv.sub(&pi.sharp(&xi))));
        }
    }
    Ok(CouplingVerdicts { a, b, c, d })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorReport {
    pub generators: Vec<String>,
    #[serde(skip)]
    pub fields: Vec<Multivector>,
    /// [H_{y_a∘p}, H_{y_b∘p}] = H_{{y_a,y_b}∘p}.
    pub closed: Verdict,
    pub ranks: Vec<RankWitness>,
    pub rank_profile: Vec<usize>,
}

/// Generators π_Σ^♯(d(y_a∘p)) of the horizontal foliation with their rank on the grid.
pub fn horizontal_generators(spec: &SubmersionSpec, grid: &[Point<Q>]) -> GeneratorReport {
    let fields = spec.horizontal_fields();
    let m = spec.base().dim();
    let mut closed = Verdict::Holds;
    for a in 0..m {
        for b in a + 1..m {
            let bracket = spec.map.pull_scalar(&spec.pi_m.coeff(&[a, b]));
            let rhs = spec.pi_sigma.hamiltonian(&bracket);
            closed = closed.and(zero_verdict(&fields[a].schouten(&fields[b]).sub(&rhs)));
        }
    }
    let n = spec.total().dim();
    let ranks: Vec<RankWitness> = grid
        .iter()
        .filter_map(|p| {
            let cols: Option<Vec<Vec<Q>>> = fields.iter().map(|f| f.eval_vector(p).ok()).collect();
            cols.map(|c| RankWitness {
                coords: p.labels(),
                rank: if c.is_empty() { 0 } else { Matrix::from_cols(n, &c).rank() },
            })
        })
        .collect();
    let rank_profile = ranks
        .iter()
        .map(|r| r.rank)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    GeneratorReport {
        generators: fields.iter().map(|f| f.to_string()).collect(),
        fields,
        closed,
        ranks,
        rank_profile,
    }
}

/// Preimage of a submanifold Y ⊂ M under a coordinate projection, parametrised by the
/// coordinates of Y followed by the remaining coordinates of Σ. Returns the preimage spec and
/// the restricted projection onto Y.
pub fn preimage_spec(spec: &SubmersionSpec, y: &SubmanifoldSpec) -> Option<(SubmanifoldSpec, SmoothMap)> {
    let sigma = spec.total();
    let mut proj = Vec::new();
    for c in spec.map.components() {
        let idx = sigma.vars().iter().position(|v| *c == Scalar::var(v))?;
        if proj.contains(&idx) {
            return None;
        }
        proj.push(idx);
    }
    if y.ambient() != spec.base() {
        return None;
    }
    let rest: Vec<usize> = (0..sigma.dim()).filter(|i| !proj.contains(i)).collect();
    let mut names: Vec<String> = y.source().vars().iter().map(|v| v.name().to_string()).collect();
    names.extend(rest.iter().map(|&i| sigma.var(i).name().to_string()));
    let x = Chart::new(&names).ok()?;
    let comps: Vec<Scalar> = (0..sigma.dim())
        .map(|i| match proj.iter().position(|&k| k == i) {
            Some(a) => y.embedding.components()[a].clone(),
            None => Scalar::var(sigma.var(i)),
        })
        .collect();
    let embedding = SmoothMap::new(&x, sigma, comps).ok()?;
    let restricted = SmoothMap::projection(&x, y.source(), &(0..y.source().dim()).collect::<Vec<_>>());
    Some((SubmanifoldSpec::new(embedding), restricted))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    /// Largest step-doubling estimate of the local error, (y_h − y_{h/2})/15.
    pub max_error_estimate: f64,
    /// max |f(x_t) − f(x_0)|.
    pub conservation_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aborted: Option<String>,
}

#[derive(Debug, Clone, Copy)]
pub struct FlowOptions {
    pub step: f64,
    /// Local error bound; a larger step-doubling estimate rejects the step and stops.
    pub error_bound: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            step: 1e-3,
            error_bound: 1e-8,
        }
    }
}

fn rk4_step(field: &dyn Fn(&[f64]) -> Option<Vec<f64>>, x: &[f64], h: f64) -> Option<Vec<f64>> {
    let axpy = |a: &[f64], s: f64, b: &[f64]| a.iter().zip(b).map(|(u, v)| u + s * v).collect::<Vec<_>>();
    let k1 = field(x)?;
    let k2 = field(&axpy(x, h / 2.0, &k1))?;
    let k3 = field(&axpy(x, h / 2.0, &k2))?;
    let k4 = field(&axpy(x, h, &k3))?;
    Some(
        (0..x.len())
            .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
            .collect(),
    )
}

/// Fixed-step RK4 integration of H_f = π^♯(df) from `x0` up to time `t_end`.
pub fn ham_flow(pi: &Multivector, f: &Scalar, x0: &[f64], t_end: f64, opts: FlowOptions) -> Trajectory {
    let chart = pi.chart().clone();
    let hf = pi.hamiltonian(f);
    let field = |x: &[f64]| -> Option<Vec<f64>> {
        let p = Point::new(&chart, x.to_vec());
        let v = hf.eval_vector(&p).ok()?;
        v.iter().all(|c| c.is_finite()).then_some(v)
    };
    let energy = |x: &[f64]| Point::new(&chart, x.to_vec()).eval(f).ok();
    let f0 = energy(x0);
    let steps = (t_end / opts.step).round().max(0.0) as usize;
    let h = if steps > 0 { t_end / steps as f64 } else { 0.0 };
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![x0.to_vec()],
        max_error_estimate: 0.0,
        conservation_error: 0.0,
        aborted: None,
    };
    let mut x = x0.to_vec();
    for k in 0..steps {
        let full = rk4_step(&field, &x, h);
        let half = rk4_step(&field, &x, h / 2.0).and_then(|y| rk4_step(&field, &y, h / 2.0));
        let (Some(full), Some(half)) = (full, half) else {
            traj.aborted = Some(format!("singular evaluation at t = {}", k as f64 * h));
            break;
        };
        let est = full
            .iter()
            .zip(&half)
            .map(|(a, b)| (a - b).abs() / 15.0)
            .fold(0.0, f64::max);
        traj.max_error_estimate = traj.max_error_estimate.max(est);
        if est > opts.error_bound {
            traj.aborted = Some(format!("step rejected at t = {}: error estimate {est:e}", k as f64 * h));
            break;
        }
        x = full;
        if let (Some(a), Some(b)) = (f0, energy(&x)) {
            traj.conservation_error = traj.conservation_error.max((a - b).abs());
        }
        traj.times.push((k + 1) as f64 * h);
        traj.states.push(x.clone());
    }
    traj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Alt;
    use crate::scalars::{default_grid, parse, q};

    fn s(t: &str) -> Scalar {
        parse(t).unwrap()
    }

    fn leaves_example() -> SubmersionSpec {
        let sig = Chart::of(&["x", "y", "z"]);
        let m = Chart::of(&["x", "y"]);
        let pi = Alt::from_terms(&sig, 2, [(vec![0, 1], s("1")), (vec![2, 1], s("1+z^2"))]).unwrap();
        SubmersionSpec::new(SmoothMap::projection(&sig, &m, &[0, 1]), pi, Alt::basis(&m, &[0, 1])).unwrap()
    }

    #[test]
    fn vertical_frames() {
        let spec = leaves_example();
        let k = vertical_frame_symbolic(&spec).unwrap();
        assert_eq!(k.cols(), 1);
        assert!(k.get(0, 0).is_zero() && k.get(1, 0).is_zero() && !k.get(2, 0).is_zero());
    }

    #[test]
    fn coupling_over_leaves() {
        let spec = leaves_example();
        let grid = default_grid(spec.total(), 0, 3, 27);
        let rep = fiber_report(&spec, &grid).unwrap();
        assert!(rep.fiber_pd.holds());
        assert!(rep.coupling.holds());
        assert_eq!(rep.fiber_ranks, vec![2]);
        assert!(rep.coregular.holds());
        let cd = canonical_coupling_data(&spec).unwrap();
        assert!(cd.vertical.is_zero());
        assert_eq!(cd.horizontal[1], Multivector::partial(spec.total(), 1));
        assert_eq!(
            cd.horizontal[0],
            Multivector::vector(spec.total(), vec![s("1"), s("0"), s("1+z^2")])
        );
        assert!(coupling_data_verify(&cd, &spec, &grid).unwrap().all().holds());
        let gens = horizontal_generators(&spec, &grid);
        assert!(gens.closed.holds());
        assert_eq!(gens.rank_profile, vec![2]);
    }

    #[test]
    fn non_closed_omega_fails_condition_c() {
        let sig = Chart::of(&["x", "y", "z", "u", "v"]);
        let m = Chart::of(&["x", "y", "z"]);
        let spec = SubmersionSpec::new(
            SmoothMap::projection(&sig, &m, &[0, 1, 2]),
            Alt::basis(&sig, &[3, 4]),
            Multivector::zero(&m, 2),
        )
        .unwrap();
        let flat = CouplingData {
            horizontal: (0..3).map(|i| Multivector::partial(&sig, i)).collect(),
            vertical: Alt::basis(&sig, &[3, 4]),
            omega: Form::zero(&sig, 2),
        };
        let grid = default_grid(&sig, 0, 2, 32);
        assert!(coupling_data_verify(&flat, &spec, &grid).unwrap().all().holds());
        let mut bad = flat.clone();
        bad.omega = Form::dx(&sig, 1).wedge(&Form::dx(&sig, 2)).mul_scalar(&s("x"));
        let v = coupling_data_verify(&bad, &spec, &grid).unwrap();
        assert!(v.c.fails());
        assert!(v.a.holds() && v.b.holds());
    }

    #[test]
    fn flow_follows_arctan_graph() {
        let spec = leaves_example();
        let f = s("y");
        let t = ham_flow(&spec.pi_sigma, &f, &[0.0, 0.0, 0.0], 1.3, FlowOptions::default());
        assert!(t.aborted.is_none());
        for st in &t.states {
            assert!((st[0] - st[2].atan()).abs() < 1e-6);
            assert!(st[0].abs() < std::f64::consts::FRAC_PI_2);
        }
        assert!(t.conservation_error < 1e-12);
    }

    #[test]
    fn cotangent_fibres_are_not_pd() {
        let sig = Chart::of(&["q", "p"]);
        let m = Chart::of(&["q"]);
        let spec = SubmersionSpec::new(
            SmoothMap::projection(&sig, &m, &[0]),
            Alt::basis(&sig, &[0, 1]),
            Multivector::zero(&m, 2),
        )
        .unwrap();
        assert!(spec.poisson_map(&[], 0.0).holds());
        let rep = fiber_report(&spec, &default_grid(&sig, 0, 3, 9)).unwrap();
        assert!(rep.samples.iter().all(|s| !s.fiber_pd));
        assert!(matches!(pencil_decompose(&spec, &[Point::from_ints(&sig, &[0, 0])]), Ok(Err(_))));
    }

    #[test]
    fn vertical_structure_is_its_own_pencil() {
        let sig = Chart::of(&["x", "y", "z"]);
        let m = Chart::of(&["z"]);
        let pi = Alt::from_terms(&sig, 2, [(vec![0, 1], s("1+z^2"))]).unwrap();
        let spec = SubmersionSpec::new(SmoothMap::projection(&sig, &m, &[2]), pi.clone(), Multivector::zero(&m, 2))
            .unwrap();
        let grid = default_grid(&sig, 0, 3, 27);
        let dec = pencil_decompose(&spec, &grid).unwrap().unwrap();
        assert_eq!(dec.vertical, pi);
        assert!(dec.horizontal.is_zero());
        assert!(horizontal_generators(&spec, &grid).fields.iter().all(|f| f.is_zero()));
        let y = SubmanifoldSpec::new(SmoothMap::new(&Chart::of(&["u"]), &m, vec![s("u")]).unwrap());
        let pt = SubmanifoldSpec::new(SmoothMap::new(&Chart::new::<&str>(&[]).unwrap(), &m, vec![Scalar::from(q(1))]).unwrap());
        assert!(preimage_spec(&spec, &y).is_some());
        let (x, r) = preimage_spec(&spec, &pt).unwrap();
        assert_eq!(x.source().dim(), 2);
        assert_eq!(r.target().dim(), 0);
    }
}
