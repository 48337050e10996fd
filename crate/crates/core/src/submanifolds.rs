//! Where a submanifold of a Poisson manifold sits among Poisson-Dirac, coregular,
//! coisotropic, Poisson-submanifold and Poisson-transversal, checked pointwise on a grid and,
//! in exact mode, symbolically over the function field of the submanifold.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::calculus::{Multivector, SmoothMap};
use crate::linalg::{intersection_dim_kernel, intersection_dim_rank, Field, Matrix};
use crate::scalars::{Chart, Coord, EvalError, Point, RatFunc, Scalar, Var, Q};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SubmanifoldError {
    #[error("embedding is not an immersion at {point:?}: Jacobian rank {rank} < {dim}")]
    ImmersionFailure {
        point: Vec<String>,
        rank: usize,
        dim: usize,
    },
    #[error("level functions are not constant along the embedding at {point:?}")]
    LevelMismatch { point: Vec<String> },
    #[error("empty sample grid")]
    EmptyGrid,
    #[error("ambient bivector lives on a different chart than the embedding target")]
    ChartMismatch,
}

/// Embedded submanifold i: X → M, optionally cut out by level functions on M.
#[derive(Clone, Debug)]
pub struct SubmanifoldSpec {
    pub embedding: SmoothMap,
    pub levels: Vec<Scalar>,
}

impl SubmanifoldSpec {
    pub fn new(embedding: SmoothMap) -> Self {
        SubmanifoldSpec {
            embedding,
            levels: Vec::new(),
        }
    }

    pub fn with_levels(mut self, levels: Vec<Scalar>) -> Self {
        self.levels = levels;
        self
    }

    pub fn source(&self) -> &Chart {
        self.embedding.source()
    }

    pub fn ambient(&self) -> &Chart {
        self.embedding.target()
    }

    pub fn is_exact(&self) -> bool {
        self.embedding.is_exact() && self.levels.iter().all(|l| l.is_exact())
    }
}

/// TX as Jacobian columns and N*X as covector columns, both in ambient coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Frames<F> {
    pub tangent: Matrix<F>,
    pub conormal: Matrix<F>,
}

fn covector_columns<F: Field>(n: usize, vs: Vec<Vec<F>>) -> Matrix<F> {
    Matrix::from_cols(n, &vs)
}

pub fn frames<F: Coord + Field>(
    spec: &SubmanifoldSpec,
    p: &Point<F>,
) -> Result<Result<Frames<F>, SubmanifoldError>, EvalError> {
    let j = spec.embedding.jacobian_at(p)?;
    let m = spec.source().dim();
    let n = spec.ambient().dim();
    let rank = j.rank();
    if rank < m {
        return Ok(Err(SubmanifoldError::ImmersionFailure {
            point: p.labels(),
            rank,
            dim: m,
        }));
    }
    if !spec.levels.is_empty() {
        let image = spec.embedding.image(p)?;
        let rows = spec
            .levels
            .iter()
            .map(|h| {
                spec.ambient()
                    .vars()
                    .iter()
                    .map(|v| image.eval(&h.differentiate(v)))
                    .collect::<Result<Vec<F>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let dh = Matrix::from_rows(rows);
        let along = dh.mul(&j);
        let scale = along.max_magnitude().max(1.0);
        let flat = (0..along.rows()).all(|i| (0..along.cols()).all(|k| along.get(i, k).negligible(scale.max(1.0) * 1e3)));
        if !flat || dh.rank() + m != n {
            return Ok(Err(SubmanifoldError::LevelMismatch { point: p.labels() }));
        }
    }
    let conormal = covector_columns(n, j.left_nullspace());
    Ok(Ok(Frames { tangent: j, conormal }))
}

/// π^♯(N*X) as columns, for the full antisymmetric matrix π at i(x).
pub fn conormal_image<F: Field>(pi: &Matrix<F>, fr: &Frames<F>) -> Matrix<F> {
    pi.transpose().mul(&fr.conormal)
}

/// dim(A ∩ B) by the stacked kernel and by dim A + dim B − dim(A+B); panics if they disagree.
pub fn intersection_dim<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> usize {
    let (ab, bb) = (a.column_basis(), b.column_basis());
    let k = intersection_dim_kernel(&ab, &bb);
    let r = intersection_dim_rank(a, b);
    assert_eq!(k, r, "intersection dimension methods disagree");
    k
}

pub(crate) fn solve_induced<F: Field>(pi: &Matrix<F>, j: &Matrix<F>, shift: bool) -> Option<Matrix<F>> {
    let (n, m) = (j.rows(), j.cols());
    // Unknowns (ξ̃, u): Jᵀξ̃ = e_a, π^♯ξ̃ − J u = 0.
    let top = j.transpose().hstack(&Matrix::zeros(m, m));
    let bottom = pi.transpose().hstack(&j.neg());
    let system = top.vstack(&bottom);
    let ker = if shift { system.nullspace() } else { Vec::new() };
    let mut out = Matrix::zeros(m, m);
    for a in 0..m {
        let mut rhs = vec![F::zero(); m + n];
        rhs[a] = F::one();
        let mut sol = system.solve(&rhs)?;
        for v in &ker {
            for (s, x) in sol.iter_mut().zip(v) {
                *s = s.add(x);
            }
        }
        for b in 0..m {
            out.set(a, b, sol[n + b].clone());
        }
    }
    Some(out)
}

/// Induced bivector on T_xX (as an m×m antisymmetric matrix) when π^♯(N*X) ∩ TX = 0.
/// The extension ξ̃ is chosen in two different ways and the results must agree.
pub fn pointwise_induce<F: Field>(pi: &Matrix<F>, fr: &Frames<F>) -> Option<Matrix<F>> {
    if intersection_dim(&conormal_image(pi, fr), &fr.tangent) != 0 {
        return None;
    }
    let a = solve_induced(pi, &fr.tangent, false)?;
    let b = solve_induced(pi, &fr.tangent, true)?;
    if F::is_exact() {
        assert_eq!(a, b, "induced bivector depends on the extension");
    } else {
        let scale = a.max_magnitude().max(1.0);
        assert!(a.sub(&b).max_magnitude() <= 1e-6 * scale, "induced bivector depends on the extension");
    }
    Some(a)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PointAnalysis<F> {
    pub pointwise_pd: bool,
    pub q_rank: usize,
    pub coisotropic: bool,
    pub poisson_submanifold: bool,
    pub poisson_transversal: bool,
    /// T(leaf of π_X) = TX ∩ T(leaf of π_M), a necessary condition for cleanness.
    pub clean_tangent: Option<bool>,
    pub induced: Option<Matrix<F>>,
}

pub fn analyze_point<F: Field>(pi: &Matrix<F>, fr: &Frames<F>) -> PointAnalysis<F> {
    let n = pi.rows();
    let m = fr.tangent.cols();
    let img = conormal_image(pi, fr);
    let meet = intersection_dim(&img, &fr.tangent);
    let sum_rank = fr.tangent.hstack(&img).rank();
    let induced = if meet == 0 { pointwise_induce(pi, fr) } else { None };
    let clean_tangent = induced.as_ref().map(|px| {
        // Image of π_X^♯ pushed into M versus TX ∩ im π^♯.
        let leaf_x = fr.tangent.mul(&px.transpose());
        let r = leaf_x.rank();
        r == intersection_dim(&fr.tangent, &pi.transpose()) && r == intersection_dim(&leaf_x, &pi.transpose())
    });
    PointAnalysis {
        pointwise_pd: meet == 0,
        q_rank: sum_rank - m,
        coisotropic: sum_rank == m,
        poisson_submanifold: img.rank() == 0,
        poisson_transversal: meet == 0 && sum_rank == n,
        clean_tangent,
        induced,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleReport {
    pub coords: Vec<String>,
    pub pointwise_pd: bool,
    pub q_rank: usize,
    pub coisotropic: bool,
    pub poisson_submanifold: bool,
    pub poisson_transversal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clean_tangent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonal_splitting: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisLimit {
    pub axis: String,
    /// `None` when the restriction blows up.
    pub value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleReport {
    pub coefficient: String,
    pub point: Vec<String>,
    pub limits: Vec<AxisLimit>,
    pub continuous_extension: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InducedReport {
    /// Coefficients keyed by 1-based index pairs, e.g. "[1,2]".
    pub coefficients: BTreeMap<String, String>,
    pub is_poisson: Verdict,
    pub poles: Vec<PoleReport>,
    /// Grid points where the symbolic and pointwise bivectors differ or the former is undefined.
    pub mismatches: Vec<Vec<String>>,
    pub smooth_on_grid: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HierarchyReport {
    pub mode: &'static str,
    pub samples: Vec<SampleReport>,
    pub singular: Vec<Vec<String>>,
    pub pointwise_pd: Verdict,
    pub q_ranks: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generic_q_rank: Option<usize>,
    pub coregular: Verdict,
    pub coregular_witnesses: Vec<Vec<String>>,
    pub coisotropic: Verdict,
    pub poisson_submanifold: Verdict,
    pub poisson_transversal: Verdict,
    /// Verdict on the user-supplied complement, when one was given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orthogonal_splitting: Option<Verdict>,
    /// Coregular submanifolds are split.
    pub split: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub induced_bivector: Option<InducedReport>,
}

#[derive(Clone, Debug, Default)]
pub struct ClassifyOptions {
    /// Candidate complement E along X, one vector field per column, in X coordinates.
    pub splitting: Option<Vec<Vec<Scalar>>>,
}

/// Whether π|_X lies in ∧²TX ⊕ ∧²E for the complement spanned by `e` (n×(n−m)).
fn splitting_is_orthogonal<F: Field>(pi: &Matrix<F>, tangent: &Matrix<F>, e: &Matrix<F>) -> bool {
    let b = tangent.hstack(e);
    let Some(binv) = b.inverse() else {
        return false;
    };
    let coeffs = binv.mul(pi).mul(&binv.transpose());
    let m = tangent.cols();
    let n = b.cols();
    (0..m).all(|i| (m..n).all(|k| coeffs.get(i, k).negligible(coeffs.max_magnitude().max(1.0))))
}

struct Evaluated {
    sample: SampleReport,
}

fn evaluate_sample<F: Coord + Field>(
    spec: &SubmanifoldSpec,
    pi: &Multivector,
    opts: &ClassifyOptions,
    p: &Point<F>,
) -> Result<Option<Evaluated>, SubmanifoldError> {
    let fr = match frames(spec, p) {
        Ok(r) => r?,
        Err(_) => return Ok(None),
    };
    let image = match spec.embedding.image(p) {
        Ok(x) => x,
        Err(_) => return Ok(None),
    };
    let pim = match pi.eval_matrix(&image) {
        Ok(m) => m,
        Err(_) => return Ok(None),
    };
    let a = analyze_point(&pim, &fr);
    let orthogonal_splitting = match &opts.splitting {
        Some(cols) => {
            let n = spec.ambient().dim();
            let vals: Result<Vec<Vec<F>>, _> = cols
                .iter()
                .map(|c| c.iter().map(|s| p.eval(s)).collect())
                .collect();
            match vals {
                Ok(v) => Some(splitting_is_orthogonal(&pim, &fr.tangent, &Matrix::from_cols(n, &v))),
                Err(_) => None,
            }
        }
        None => None,
    };
    Ok(Some(Evaluated {
        sample: SampleReport {
            coords: p.labels(),
            pointwise_pd: a.pointwise_pd,
            q_rank: a.q_rank,
            coisotropic: a.coisotropic,
            poisson_submanifold: a.poisson_submanifold,
            poisson_transversal: a.poisson_transversal,
            clean_tangent: a.clean_tangent,
            orthogonal_splitting,
        },
    }))
}

fn all_of(samples: &[SampleReport], f: impl Fn(&SampleReport) -> bool) -> Verdict {
    Verdict::from_bool(samples.iter().all(f))
}

/// Symbolic Q_X rank over the function field of X.
fn generic_q_rank(spec: &SubmanifoldSpec, pi: &Multivector) -> Option<usize> {
    let j = ratfunc_jacobian(&spec.embedding)?;
    let pim = pi.compose_coeffs(&spec.embedding).ratfunc_matrix()?;
    let n = spec.ambient().dim();
    let conormal = Matrix::from_cols(n, &j.left_nullspace());
    let img = pim.transpose().mul(&conormal);
    Some(j.hstack(&img).rank() - j.cols())
}

pub(crate) fn ratfunc_jacobian(map: &SmoothMap) -> Option<Matrix<RatFunc>> {
    let rows = map
        .jacobian()
        .into_iter()
        .map(|r| r.into_iter().map(|c| c.as_exact().cloned()).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    if rows.is_empty() {
        return Some(Matrix::zeros(0, map.source().dim()));
    }
    Some(Matrix::from_rows(rows))
}

/// Classifies X on the grid. Exact data is evaluated at rational points; anything numeric is
/// evaluated in floating point at the same points.
pub fn classify(
    spec: &SubmanifoldSpec,
    pi: &Multivector,
    grid: &[Point<Q>],
    opts: &ClassifyOptions,
) -> Result<HierarchyReport, SubmanifoldError> {
    if grid.is_empty() {
        return Err(SubmanifoldError::EmptyGrid);
    }
    if pi.chart() != spec.ambient() {
        return Err(SubmanifoldError::ChartMismatch);
    }
    let exact = spec.is_exact()
        && pi.is_exact()
        && opts
            .splitting
            .as_ref()
            .is_none_or(|cols| cols.iter().flatten().all(|s| s.is_exact()));
    if exact {
        let results: Vec<_> = grid
            .par_iter()
            .map(|p| evaluate_sample(spec, pi, opts, p))
            .collect();
        let mut rep = summarize(grid, results, "exact")?;
        rep.generic_q_rank = generic_q_rank(spec, pi);
        rep.coregular = coregular_verdict(&rep, true);
        if rep.pointwise_pd.holds() {
            rep.induced_bivector = induced_bivector_symbolic(spec, pi, grid);
        }
        finish(&mut rep);
        Ok(rep)
    } else {
        let fgrid: Vec<Point<f64>> = grid.iter().map(|p| p.to_f64()).collect();
        let results: Vec<_> = fgrid
            .par_iter()
            .map(|p| evaluate_sample(spec, pi, opts, p))
            .collect();
        let mut rep = summarize(&fgrid, results, "numeric")?;
        rep.coregular = coregular_verdict(&rep, false);
        finish(&mut rep);
        Ok(rep)
    }
}

fn summarize<F: Coord + Field>(
    grid: &[Point<F>],
    results: Vec<Result<Option<Evaluated>, SubmanifoldError>>,
    mode: &'static str,
) -> Result<HierarchyReport, SubmanifoldError> {
    let mut samples = Vec::new();
    let mut singular = Vec::new();
    for (p, r) in grid.iter().zip(results) {
        match r? {
            Some(e) => samples.push(e.sample),
            None => singular.push(p.labels()),
        }
    }
    if samples.is_empty() {
        return Err(SubmanifoldError::EmptyGrid);
    }
    let q_ranks: BTreeSet<usize> = samples.iter().map(|s| s.q_rank).collect();
    let orthogonal_splitting = if samples.iter().any(|s| s.orthogonal_splitting.is_some()) {
        Some(
            samples
                .iter()
                .map(|s| match s.orthogonal_splitting {
                    Some(b) => Verdict::from_bool(b),
                    None => Verdict::NotDetermined,
                })
                .fold(Verdict::Holds, Verdict::and),
        )
    } else {
        None
    };
    Ok(HierarchyReport {
        mode,
        pointwise_pd: all_of(&samples, |s| s.pointwise_pd),
        coisotropic: all_of(&samples, |s| s.coisotropic),
        poisson_submanifold: all_of(&samples, |s| s.poisson_submanifold),
        poisson_transversal: all_of(&samples, |s| s.poisson_transversal),
        q_ranks: q_ranks.into_iter().collect(),
        generic_q_rank: None,
        coregular: Verdict::NotDetermined,
        coregular_witnesses: Vec::new(),
        orthogonal_splitting,
        split: Verdict::NotDetermined,
        induced_bivector: None,
        samples,
        singular,
    })
}

fn coregular_verdict(rep: &HierarchyReport, exact: bool) -> Verdict {
    if !rep.pointwise_pd.holds() {
        return Verdict::Fails;
    }
    if rep.q_ranks.len() > 1 {
        return Verdict::Fails;
    }
    if !exact {
        return Verdict::NotDetermined;
    }
    match rep.generic_q_rank {
        Some(g) if rep.q_ranks == [g] => Verdict::Holds,
        _ => Verdict::NotDetermined,
    }
}

fn finish(rep: &mut HierarchyReport) {
    if rep.coregular.fails() {
        let reference = rep
            .generic_q_rank
            .or_else(|| rep.q_ranks.last().copied())
            .unwrap_or(0);
        rep.coregular_witnesses = rep
            .samples
            .iter()
            .filter(|s| !s.pointwise_pd || s.q_rank != reference)
            .map(|s| s.coords.clone())
            .collect();
    }
    rep.split = if rep.coregular.holds() || rep.orthogonal_splitting == Some(Verdict::Holds) {
        Verdict::Holds
    } else {
        Verdict::NotDetermined
    };
}

/// Solves for the induced bivector over the function field of X. Returns the m×m matrix.
pub fn induced_matrix_symbolic(spec: &SubmanifoldSpec, pi: &Multivector) -> Option<Matrix<RatFunc>> {
    let j = ratfunc_jacobian(&spec.embedding)?;
    let pim = pi.compose_coeffs(&spec.embedding).ratfunc_matrix()?;
    let n = spec.ambient().dim();
    let conormal = Matrix::from_cols(n, &j.left_nullspace());
    let img = pim.transpose().mul(&conormal);
    if intersection_dim(&img, &j) != 0 {
        return None;
    }
    solve_induced(&pim, &j, false)
}

/// Induced bivector with rational-function coefficients, its poles on the grid with
/// axis-restricted limits, and a comparison with pointwise induction.
pub fn induced_bivector_symbolic(
    spec: &SubmanifoldSpec,
    pi: &Multivector,
    grid: &[Point<Q>],
) -> Option<InducedReport> {
    let mat = induced_matrix_symbolic(spec, pi)?;
    let x = spec.source();
    let bivector = Multivector::from_ratfunc_matrix(x, &mat);
    let coefficients = bivector
        .terms()
        .map(|(k, c)| {
            let idx: Vec<String> = k.iter().map(|i| (i + 1).to_string()).collect();
            (format!("[{}]", idx.join(",")), c.to_string())
        })
        .collect();
    let mut poles = Vec::new();
    let mut mismatches = Vec::new();
    for p in grid {
        let sym = bivector.eval_matrix(p);
        let pointwise = frames(spec, p)
            .ok()
            .and_then(|r| r.ok())
            .and_then(|fr| {
                let image = spec.embedding.image(p).ok()?;
                let pim = pi.eval_matrix(&image).ok()?;
                pointwise_induce(&pim, &fr)
            });
        match sym {
            Ok(s) => {
                if pointwise.as_ref() != Some(&s) {
                    mismatches.push(p.labels());
                }
            }
            Err(_) => {
                mismatches.push(p.labels());
                for (k, c) in bivector.terms() {
                    let Some(r) = c.as_exact() else { continue };
                    if p.eval(&Scalar::Exact(RatFunc::from_poly(r.denom().clone())))
                        .is_ok_and(|d| !Field::is_zero(&d))
                    {
                        continue;
                    }
                    let limits: Vec<AxisLimit> = (0..x.dim())
                        .map(|axis| AxisLimit {
                            axis: x.var(axis).name().to_string(),
                            value: axis_limit(r, x, p, axis).map(|v| v.to_string()),
                        })
                        .collect();
                    let first = limits.first().and_then(|l| l.value.clone());
                    let continuous_extension =
                        first.is_some() && limits.iter().all(|l| l.value == first);
                    let idx: Vec<String> = k.iter().map(|i| (i + 1).to_string()).collect();
                    poles.push(PoleReport {
                        coefficient: format!("[{}]", idx.join(",")),
                        point: p.labels(),
                        limits,
                        continuous_extension,
                    });
                }
            }
        }
    }
    let smooth_on_grid = if poles.iter().any(|pr| !pr.continuous_extension) {
        Verdict::Fails
    } else if mismatches.is_empty() {
        Verdict::Holds
    } else {
        Verdict::NotDetermined
    };
    Some(InducedReport {
        coefficients,
        is_poisson: bivector.is_poisson(),
        poles,
        mismatches,
        smooth_on_grid,
    })
}

/// Limit of r along the coordinate line through p in direction `axis`, or `None` if infinite.
pub fn axis_limit(r: &RatFunc, chart: &Chart, p: &Point<Q>, axis: usize) -> Option<Q> {
    let h = Var::new("__h");
    let mut sub: HashMap<Var, Scalar> = HashMap::new();
    for (i, v) in chart.vars().iter().enumerate() {
        let c = Scalar::constant(p.coords[i].clone());
        let val = if i == axis { c.add(&Scalar::var(&h)) } else { c };
        sub.insert(v.clone(), val);
    }
    let restricted = Scalar::Exact(r.clone()).substitute(&sub);
    let rr = restricted.as_exact()?;
    let at0 = |poly: &crate::scalars::Poly| poly.eval_q(&|_| Some(<Q as Field>::zero())).unwrap_or_else(<Q as Field>::zero);
    let den = at0(rr.denom());
    if Field::is_zero(&den) {
        return None;
    }
    Some(at0(rr.numer()) / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Alt;
    use crate::scalars::{default_grid, parse, product_grid, q, q_frac};

    fn s(t: &str) -> Scalar {
        parse(t).unwrap()
    }

    fn so3() -> (Chart, Multivector) {
        let m = Chart::of(&["x1", "x2", "x3"]);
        let pi = Alt::from_terms(
            &m,
            2,
            [(vec![1, 2], s("x1")), (vec![2, 0], s("x2")), (vec![0, 1], s("x3"))],
        )
        .unwrap();
        (m, pi)
    }

    #[test]
    fn frames_examples() {
        let (m, _) = so3();
        let x = Chart::of(&["t"]);
        let spec = SubmanifoldSpec::new(SmoothMap::new(&x, &m, vec![s("t"), s("0"), s("0")]).unwrap());
        let fr = frames(&spec, &Point::from_ints(&x, &[1])).unwrap().unwrap();
        assert_eq!(fr.tangent.col(0), vec![q(1), q(0), q(0)]);
        assert_eq!(fr.conormal.cols(), 2);
        assert!(fr.conormal.row(0).iter().all(Field::is_zero));

        let m4 = Chart::of(&["x1", "x2", "x3", "x4"]);
        let x2 = Chart::of(&["t", "s"]);
        let spec = SubmanifoldSpec::new(
            SmoothMap::new(&x2, &m4, vec![s("t^2"), s("0"), s("t"), s("s")]).unwrap(),
        );
        let fr = frames(&spec, &Point::from_ints(&x2, &[1, 0])).unwrap().unwrap();
        assert_eq!(fr.tangent.col(0), vec![q(2), q(0), q(1), q(0)]);
        assert_eq!(fr.tangent.col(1), vec![q(0), q(0), q(0), q(1)]);
    }

    #[test]
    fn so3_axis_is_not_coregular() {
        let (m, pi) = so3();
        let x = Chart::of(&["t"]);
        let spec = SubmanifoldSpec::new(SmoothMap::new(&x, &m, vec![s("t"), s("0"), s("0")]).unwrap());
        let axis: Vec<Q> = [-2, -1, 0, 1, 2].iter().map(|&k| q_frac(k, 2)).collect();
        let grid = product_grid(&x, &[axis]).unwrap();
        let opts = ClassifyOptions {
            splitting: Some(vec![
                vec![s("0"), s("1"), s("0")],
                vec![s("0"), s("0"), s("1")],
            ]),
        };
        let rep = classify(&spec, &pi, &grid, &opts).unwrap();
        assert!(rep.pointwise_pd.holds());
        let ranks: Vec<usize> = rep.samples.iter().map(|s| s.q_rank).collect();
        assert_eq!(ranks, vec![2, 2, 0, 2, 2]);
        assert!(rep.coregular.fails());
        assert_eq!(rep.coregular_witnesses, vec![vec!["0".to_string()]]);
        assert_eq!(rep.orthogonal_splitting, Some(Verdict::Holds));
        assert_eq!(rep.split, Verdict::Holds);
        let ind = rep.induced_bivector.unwrap();
        assert!(ind.coefficients.is_empty());
    }

    #[test]
    fn symplectic_line_has_no_induced_structure() {
        let m = Chart::of(&["x1", "x2"]);
        let x = Chart::of(&["t"]);
        let pi: Multivector = Alt::basis(&m, &[0, 1]);
        let spec = SubmanifoldSpec::new(SmoothMap::new(&x, &m, vec![s("t"), s("0")]).unwrap());
        let fr = frames(&spec, &Point::from_ints(&x, &[0])).unwrap().unwrap();
        let pim = pi.eval_matrix(&Point::from_ints(&m, &[0, 0])).unwrap();
        assert!(pointwise_induce(&pim, &fr).is_none());
        let id = SubmanifoldSpec::new(SmoothMap::identity(&m));
        let fr = frames(&id, &Point::from_ints(&m, &[1, 2])).unwrap().unwrap();
        assert_eq!(pointwise_induce(&pim, &fr).unwrap(), pim);
    }

    #[test]
    fn diagonal_disk_pole() {
        let m = Chart::of(&["x1", "x2", "x3", "x4"]);
        let x = Chart::of(&["t", "s"]);
        let pi = Alt::from_terms(
            &m,
            2,
            [(vec![0, 1], s("x1^2+x2^2+x1")), (vec![2, 3], s("x3^2+x4^2-x3"))],
        )
        .unwrap();
        let spec = SubmanifoldSpec::new(
            SmoothMap::new(&x, &m, vec![s("t"), s("s"), s("t"), s("s")]).unwrap(),
        );
        let grid = default_grid(&x, 0, 5, 625);
        let rep = induced_bivector_symbolic(&spec, &pi, &grid).unwrap();
        let expect = s("((t^2+s^2)^2-t^2)/(2*t^2+2*s^2)").to_string();
        assert_eq!(rep.coefficients["[1,2]"], expect);
        assert_eq!(rep.poles.len(), 1);
        let pole = &rep.poles[0];
        assert_eq!(pole.limits[0].axis, "t");
        assert_eq!(pole.limits[0].value.as_deref(), Some("-1/2"));
        assert_eq!(pole.limits[1].value.as_deref(), Some("0"));
        assert!(!pole.continuous_extension);
        assert!(rep.smooth_on_grid.fails());
    }
}
