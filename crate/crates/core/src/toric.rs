//! Delzant polytopes and toric leaf counting: vertices, the Delzant condition, the kernel
//! lattice of the torus quotient, faces, moment maps, pointwise coregularity of the GIT
//! quotient map and associated-bundle leaf counts.

use std::collections::{BTreeSet, HashSet};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{Multivector, SmoothMap};
use crate::lie::{induced_from_action, positivity, ComplexStructure};
use crate::linalg::{intersection_dim_kernel, intersection_dim_rank, Matrix};
use crate::scalars::{Chart, Point, Scalar, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ToricError {
    #[error("facet {0} has a zero or wrongly sized normal")]
    BadNormal(usize),
    #[error("facet {0} has a non-primitive normal")]
    NotPrimitive(usize),
    #[error("polytope is empty")]
    Empty,
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("facet {0} is redundant")]
    NotEssential(usize),
    #[error("polytope is not simple at vertex {0:?}")]
    NotSimple(Vec<String>),
    #[error("polytope too large for exact elimination (d ≤ 12, n ≤ 4)")]
    TooLarge,
    #[error("point is not in the stratum set: its zero set {0:?} is not a face")]
    NotInStrata(Vec<usize>),
    #[error("bivector on ℂ^d must be a 2d × 2d antisymmetric matrix")]
    BivectorShape,
    #[error("bivector is not positive")]
    NotPositive,
    #[error("malformed polytope input: {0}")]
    Input(String),
    #[error("leaf counts must be positive")]
    ZeroCount,
    #[error("associated-bundle count needs a hypothesis tag")]
    MissingHypothesis,
}

/// {ξ ∈ ℝⁿ : ⟨ξ, u_i⟩ ≥ c_i} with primitive integer normals.
#[derive(Clone, Debug, PartialEq)]
pub struct DelzantPolytope {
    rank: usize,
    normals: Vec<Vec<i64>>,
    constants: Vec<Q>,
}

impl DelzantPolytope {
    /// Checks normals and shape: nonempty, bounded, full-dimensional, all facets essential.
    pub fn new(rank: usize, facets: Vec<(Vec<i64>, Q)>) -> Result<Self, ToricError> {
        if facets.len() > 12 || rank > 4 {
            return Err(ToricError::TooLarge);
        }
        for (i, (u, _)) in facets.iter().enumerate() {
            if u.len() != rank || u.iter().all(|&x| x == 0) {
                return Err(ToricError::BadNormal(i));
            }
            if u.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
                return Err(ToricError::NotPrimitive(i));
            }
        }
        let (normals, constants) = facets.into_iter().unzip();
        let p = DelzantPolytope {
            rank,
            normals,
            constants,
        };
        if !p.face_feasible(&[], false) {
            return Err(ToricError::Empty);
        }
        if !p.bounded() {
            return Err(ToricError::Unbounded);
        }
        if !p.face_feasible(&[], true) {
            return Err(ToricError::NotFullDimensional);
        }
        if let Some(i) = (0..p.facets()).find(|&i| !p.face_feasible(&[i], true)) {
            return Err(ToricError::NotEssential(i));
        }
        Ok(p)
    }

    /// `{"rank": n, "facets": [{"u": [ints], "c": "rational"}, …]}`.
    pub fn from_json(text: &str) -> Result<Self, ToricError> {
        #[derive(Deserialize)]
        struct Facet {
            u: Vec<i64>,
            c: serde_json::Value,
        }
        #[derive(Deserialize)]
        struct Input {
            rank: usize,
            facets: Vec<Facet>,
        }
        let input: Input = serde_json::from_str(text).map_err(|e| ToricError::Input(e.to_string()))?;
        let facets = input
            .facets
            .into_iter()
            .map(|f| {
                let c = match &f.c {
                    serde_json::Value::Number(n) => n.as_i64().map(crate::scalars::q),
                    serde_json::Value::String(s) => Q::from_str(s.trim()).ok(),
                    _ => None,
                }
                .ok_or_else(|| ToricError::Input(format!("bad constant {}", f.c)))?;
                Ok((f.u, c))
            })
            .collect::<Result<Vec<_>, ToricError>>()?;
        DelzantPolytope::new(input.rank, facets)
    }

    pub fn interval() -> Self {
        DelzantPolytope::new(1, vec![(vec![1], Q::zero()), (vec![-1], -Q::one())]).expect("valid")
    }

    pub fn triangle() -> Self {
        DelzantPolytope::new(
            2,
            vec![(vec![1, 0], Q::zero()), (vec![0, 1], Q::zero()), (vec![-1, -1], -Q::one())],
        )
        .expect("valid")
    }

    pub fn square() -> Self {
        DelzantPolytope::new(
            2,
            vec![
                (vec![1, 0], Q::zero()),
                (vec![-1, 0], -Q::one()),
                (vec![0, 1], Q::zero()),
                (vec![0, -1], -Q::one()),
            ],
        )
        .expect("valid")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn facets(&self) -> usize {
        self.normals.len()
    }

    pub fn normal(&self, i: usize) -> &[i64] {
        &self.normals[i]
    }

    pub fn constant(&self, i: usize) -> &Q {
        &self.constants[i]
    }

    fn row(&self, i: usize) -> Vec<Q> {
        self.normals[i].iter().map(|&x| Q::from_integer(x.into())).collect()
    }

    fn bounded(&self) -> bool {
        // The recession cone {d : ⟨d, u_i⟩ ≥ 0} must be {0}.
        (0..self.rank).all(|k| {
            [1i64, -1].iter().all(|&s| {
                let mut sys: Vec<Ineq> = (0..self.facets())
                    .map(|i| Ineq {
                        a: self.row(i),
                        b: Q::zero(),
                        strict: false,
                    })
                    .collect();
                let mut a = vec![Q::zero(); self.rank];
                a[k] = Q::from_integer(s.into());
                sys.push(Ineq {
                    a,
                    b: Q::zero(),
                    strict: true,
                });
                !fourier_motzkin(sys, self.rank)
            })
        })
    }

    /// Whether F_I is nonempty: ⟨ξ, u_i⟩ = c_i for i ∈ I and > c_i otherwise. With
    /// `strict_rest = false` the other facets are only required to be ≥.
    pub fn face_feasible(&self, eq: &[usize], strict_rest: bool) -> bool {
        // Solve the equalities first: ξ = ξ0 + Σ t_k v_k, then eliminate over t.
        let (x0, dirs) = if eq.is_empty() {
            let unit = |k: usize| (0..self.rank).map(|j| if j == k { Q::one() } else { Q::zero() }).collect();
            (vec![Q::zero(); self.rank], (0..self.rank).map(unit).collect::<Vec<Vec<Q>>>())
        } else {
            let a = Matrix::from_rows(eq.iter().map(|&i| self.row(i)).collect());
            let b: Vec<Q> = eq.iter().map(|&i| self.constants[i].clone()).collect();
            let Some(x0) = a.solve(&b) else {
                return false;
            };
            (x0, a.nullspace())
        };
        let dot = |a: &[Q], b: &[Q]| a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y);
        let sys = (0..self.facets())
            .filter(|i| !eq.contains(i))
            .map(|i| {
                let u = self.row(i);
                Ineq {
                    a: dirs.iter().map(|v| dot(&u, v)).collect(),
                    b: &self.constants[i] - dot(&u, &x0),
                    strict: strict_rest,
                }
            })
            .collect();
        fourier_motzkin(sys, dirs.len())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Ineq {
    a: Vec<Q>,
    b: Q,
    strict: bool,
}

impl Ineq {
    fn normalized(mut self) -> Ineq {
        if let Some(s) = self.a.iter().find(|x| !x.is_zero()).map(|x| x.abs()) {
            self.a.iter_mut().for_each(|x| *x /= &s);
            self.b /= &s;
        }
        self
    }
}

/// Feasibility of a·x ≥ b (or > b) over ℚ by exact Fourier–Motzkin elimination.
fn fourier_motzkin(sys: Vec<Ineq>, vars: usize) -> bool {
    let mut sys: Vec<Ineq> = sys
        .into_iter()
        .map(Ineq::normalized)
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    for k in 0..vars {
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for c in sys {
            if c.a[k].is_positive() {
                pos.push(c);
            } else if c.a[k].is_negative() {
                neg.push(c);
            } else {
                rest.push(c);
            }
        }
        let mut next: HashSet<Ineq> = rest.into_iter().collect();
        for p in &pos {
            for n in &neg {
                let (sp, sn) = (-n.a[k].clone(), p.a[k].clone());
                let a: Vec<Q> = p.a.iter().zip(&n.a).map(|(x, y)| x * &sp + y * &sn).collect();
                let b = &p.b * &sp + &n.b * &sn;
                next.insert(
                    Ineq {
                        a,
                        b,
                        strict: p.strict || n.strict,
                    }
                    .normalized(),
                );
            }
        }
        sys = next.into_iter().collect();
    }
    sys.iter()
        .all(|c| if c.strict { c.b.is_negative() } else { !c.b.is_positive() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Vertex {
    pub coords: Vec<String>,
    pub active: Vec<usize>,
    #[serde(skip)]
    pub point: Vec<Q>,
}

fn subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices as solutions of n facet equalities feasible for all facets; errors if some
/// vertex has more than n active facets.
pub fn vertices(p: &DelzantPolytope) -> Result<Vec<Vertex>, ToricError> {
    let n = p.rank;
    let mut seen: BTreeSet<Vec<Q>> = BTreeSet::new();
    let mut out = Vec::new();
    for idx in subsets(p.facets(), n) {
        let m = Matrix::from_rows(idx.iter().map(|&i| p.row(i)).collect());
        let rhs: Vec<Q> = idx.iter().map(|&i| p.constants[i].clone()).collect();
        if m.rank() < n {
            continue;
        }
        let Some(x) = m.solve(&rhs) else { continue };
        let value = |i: usize| p.row(i).iter().zip(&x).fold(Q::zero(), |acc, (a, b)| acc + a * b);
        if (0..p.facets()).any(|i| value(i) < p.constants[i]) {
            continue;
        }
        if !seen.insert(x.clone()) {
            continue;
        }
        let active: Vec<usize> = (0..p.facets()).filter(|&i| value(i) == p.constants[i]).collect();
        let coords: Vec<String> = x.iter().map(|c| c.to_string()).collect();
        if active.len() != n {
            return Err(ToricError::NotSimple(coords));
        }
        out.push(Vertex {
            coords,
            active,
            point: x,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelzantCheck {
    pub delzant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_vertex: Option<Vertex>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant: Option<String>,
}

/// At every vertex the active normals form a ℤ-basis (determinant ±1).
pub fn is_delzant(p: &DelzantPolytope) -> Result<DelzantCheck, ToricError> {
    for v in vertices(p)? {
        let m = Matrix::from_rows(v.active.iter().map(|&i| p.row(i)).collect());
        let det = m.determinant();
        if det.abs() != Q::one() {
            return Ok(DelzantCheck {
                delzant: false,
                failing_vertex: Some(v),
                determinant: Some(det.to_string()),
            });
        }
    }
    Ok(DelzantCheck {
        delzant: true,
        failing_vertex: None,
        determinant: None,
    })
}

/// Integer matrix helpers over BigInt.
type IMat = Vec<Vec<BigInt>>;

/// Column reduction U·V = [H | 0] with V unimodular; returns (V, rank).
fn column_hermite(u: &IMat, cols: usize) -> (IMat, usize) {
    let rows = u.len();
    let mut a = u.clone();
    let mut v: IMat = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let col_op = |m: &mut IMat, c1: usize, c2: usize, x: &BigInt, y: &BigInt, z: &BigInt, w: &BigInt| {
        // (col c1, col c2) ← (x·c1 + y·c2, z·c1 + w·c2)
        for row in m.iter_mut() {
            let (p, q) = (row[c1].clone(), row[c2].clone());
            row[c1] = x * &p + y * &q;
            row[c2] = z * &p + w * &q;
        }
    };
    let mut r = 0;
    for i in 0..rows {
        if r == cols {
            break;
        }
        for j in r + 1..cols {
            if a[i][j].is_zero() {
                continue;
            }
            let (p, q) = (a[i][r].clone(), a[i][j].clone());
            let e = p.extended_gcd(&q);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (z, w) = (-(&q / &g), &p / &g);
            col_op(&mut a, r, j, &x, &y, &z, &w);
            col_op(&mut v, r, j, &x, &y, &z, &w);
        }
        if !a[i][r].is_zero() {
            r += 1;
        }
    }
    (v, r)
}

/// Diagonal of the Smith normal form.
pub fn smith_diagonal(m: &[Vec<i64>]) -> Vec<BigInt> {
    let mut a: IMat = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut diag = Vec::new();
    for t in 0..rows.min(cols) {
        loop {
            let pivot = (t..rows)
                .flat_map(|i| (t..cols).map(move |j| (i, j)))
                .filter(|&(i, j)| !a[i][j].is_zero())
                .min_by_key(|&(i, j)| a[i][j].abs());
            let Some((pi, pj)) = pivot else {
                return diag;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..rows {
                let f = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let s = &f * &a[t][j];
                    a[i][j] -= s;
                }
                clean &= a[i][t].is_zero();
            }
            for j in t + 1..cols {
                let f = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let s = &f * &a[i][t];
                    a[i][j] -= s;
                }
                clean &= a[t][j].is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[i][j].is_multiple_of(&a[t][t]));
            match bad {
                Some((i, _)) => {
                    for j in t..cols {
                        let s = a[i][j].clone();
                        a[t][j] += s;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag
}

/// Row Hermite normal form of a list of integer vectors (nonzero rows only).
fn row_hermite(vs: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let mut a = vs;
    let cols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        loop {
            let piv = (r..a.len()).filter(|&i| !a[i][c].is_zero()).min_by_key(|&i| a[i][c].abs());
            let Some(pi) = piv else { break };
            a.swap(r, pi);
            let mut done = true;
            for i in r + 1..a.len() {
                if a[i][c].is_zero() {
                    continue;
                }
                let f = a[i][c].div_floor(&a[r][c]);
                for j in 0..cols {
                    let s = &f * &a[r][j];
                    a[i][j] -= s;
                }
                done &= a[i][c].is_zero();
            }
            if done {
                break;
            }
        }
        if r < a.len() && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                a[r].iter_mut().for_each(|x| *x = -x.clone());
            }
            for i in 0..r {
                let f = a[i][c].div_floor(&a[r][c]);
                for j in 0..cols {
                    let s = &f * &a[r][j];
                    a[i][j] -= s;
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KernelLattice {
    /// ℤ-basis of ker(ℤ^d → ℤⁿ, e_i ↦ u_i), rows in Hermite normal form.
    pub basis: Vec<Vec<i64>>,
    pub smith_diagonal: Vec<String>,
    /// All Smith invariants are 1: the map is onto ℤⁿ and N is connected.
    pub surjective: bool,
}

pub fn kernel_lattice(p: &DelzantPolytope) -> KernelLattice {
    let n = p.rank;
    let d = p.facets();
    let u: IMat = (0..n)
        .map(|k| (0..d).map(|i| BigInt::from(p.normals[i][k])).collect())
        .collect();
    let (v, r) = column_hermite(&u, d);
    let ker: Vec<Vec<BigInt>> = (r..d).map(|j| (0..d).map(|i| v[i][j].clone()).collect()).collect();
    let basis = row_hermite(ker)
        .into_iter()
        .map(|row| row.iter().map(|x| x.to_i64().expect("small kernel entries")).collect())
        .collect();
    let rows: Vec<Vec<i64>> = (0..n).map(|k| (0..d).map(|i| p.normals[i][k]).collect()).collect();
    let diag = smith_diagonal(&rows);
    KernelLattice {
        surjective: diag.len() == n && diag.iter().all(|x| x.is_one()),
        smith_diagonal: diag.iter().map(|x| x.to_string()).collect(),
        basis,
    }
}

/// Faces F_I ≠ ∅ of a simple polytope: all subsets of the active sets at vertices.
pub fn faces(p: &DelzantPolytope) -> Result<Vec<Vec<usize>>, ToricError> {
    let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
    for v in vertices(p)? {
        let k = v.active.len();
        for mask in 0u32..(1 << k) {
            out.insert((0..k).filter(|b| mask >> b & 1 == 1).map(|b| v.active[b]).collect());
        }
    }
    Ok(out.into_iter().collect())
}

/// Brute force over all 2^d index sets by exact feasibility of F_I.
pub fn faces_brute_force(p: &DelzantPolytope) -> Vec<Vec<usize>> {
    let d = p.facets();
    let mut out: Vec<Vec<usize>> = (0u32..(1 << d))
        .map(|mask| (0..d).filter(|b| mask >> b & 1 == 1).collect::<Vec<_>>())
        .filter(|idx| p.face_feasible(idx, true))
        .collect();
    out.sort();
    out
}

/// Number of symplectic leaves of the toric Poisson manifold: one per nonempty face.
pub fn leaf_count_toric(p: &DelzantPolytope) -> Result<usize, ToricError> {
    Ok(faces(p)?.len())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentValue {
    pub mu: Vec<String>,
    pub mu_n: Vec<String>,
}

/// μ(z) = Σ(|z_i|²/2 + c_i)e^i and its restriction to Lie N, from the squared moduli |z_i|².
pub fn moment_map(p: &DelzantPolytope, abs_sq: &[Q]) -> MomentValue {
    let mu: Vec<Q> = abs_sq
        .iter()
        .zip(&p.constants)
        .map(|(z, c)| z / Q::from_integer(2.into()) + c)
        .collect();
    let ker = kernel_lattice(p);
    let mu_n = ker
        .basis
        .iter()
        .map(|k| {
            k.iter()
                .zip(&mu)
                .fold(Q::zero(), |acc, (a, m)| acc + Q::from_integer((*a).into()) * m)
        })
        .collect::<Vec<Q>>();
    MomentValue {
        mu: mu.iter().map(|x| x.to_string()).collect(),
        mu_n: mu_n.iter().map(|x| x.to_string()).collect(),
    }
}

/// Real chart (x1, y1, …, xd, yd) on ℂ^d.
pub fn complex_chart(d: usize) -> Chart {
    let names: Vec<String> = (1..=d).flat_map(|i| [format!("x{i}"), format!("y{i}")]).collect();
    Chart::new(&names).expect("valid names")
}

/// 𝓔_i and 𝓥_i on the chart of [`complex_chart`].
pub fn torus_generators(d: usize) -> Vec<Multivector> {
    let c = complex_chart(d);
    (0..d)
        .flat_map(|i| [Multivector::euler(&c, 2 * i, 2 * i + 1), Multivector::rotation(&c, 2 * i, 2 * i + 1)])
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GitSample {
    pub zero_set: Vec<usize>,
    pub orbit_dim: usize,
    /// Π^♯(W°) ∩ W = 0 for the complexified N-orbit tangent W.
    pub poisson_dirac: bool,
}

/// Pointwise Poisson-Dirac check of the N_ℂ-orbit through z = (x1 + i y1, …) for the bivector
/// ∧²ρ(π_A) induced by the standard torus action.
pub fn git_coregular_sample(p: &DelzantPolytope, pi_a: &Matrix<Q>, z: &[(Q, Q)]) -> Result<GitSample, ToricError> {
    let d = p.facets();
    if pi_a.rows() != 2 * d || pi_a.cols() != 2 * d || !pi_a.is_antisymmetric() || z.len() != d {
        return Err(ToricError::BivectorShape);
    }
    if !positivity(&ComplexStructure::standard(d), pi_a).positive {
        return Err(ToricError::NotPositive);
    }
    let zero_set: Vec<usize> = (0..d).filter(|&i| z[i].0.is_zero() && z[i].1.is_zero()).collect();
    if !p.face_feasible(&zero_set, true) {
        return Err(ToricError::NotInStrata(zero_set));
    }
    let rho = torus_generators(d);
    let big = induced_from_action(pi_a, &rho).bivector;
    let chart = complex_chart(d);
    let coords: Vec<Q> = z.iter().flat_map(|(x, y)| [x.clone(), y.clone()]).collect();
    let pt = Point::new(&chart, coords);
    let pim = big.eval_matrix(&pt).expect("polynomial bivector");
    let ker = kernel_lattice(p);
    let mut w_cols = Vec::new();
    for k in &ker.basis {
        let mut e = Multivector::zero(&chart, 1);
        let mut v = Multivector::zero(&chart, 1);
        for (i, &c) in k.iter().enumerate() {
            let c = Q::from_integer(c.into());
            e = e.add(&rho[2 * i].scale(&c));
            v = v.add(&rho[2 * i + 1].scale(&c));
        }
        w_cols.push(e.eval_vector(&pt).expect("polynomial field"));
        w_cols.push(v.eval_vector(&pt).expect("polynomial field"));
    }
    let w = Matrix::from_cols(2 * d, &w_cols);
    let wb = w.column_basis();
    let orbit_dim = wb.cols();
    let poisson_dirac = if orbit_dim == 0 {
        true
    } else {
        let ann = Matrix::from_cols(2 * d, &wb.left_nullspace());
        let img = if ann.cols() == 0 { Matrix::zeros(2 * d, 0) } else { pim.transpose().mul(&ann) };
        let k = intersection_dim_kernel(&img.column_basis(), &wb);
        assert_eq!(k, intersection_dim_rank(&img, &wb), "intersection dimension methods disagree");
        k == 0
    };
    Ok(GitSample {
        zero_set,
        orbit_dim,
        poisson_dirac,
    })
}

/// c_*π = −π for complex conjugation c(x, y) = (x, −y) in every factor.
pub fn totally_real(pi: &Multivector) -> bool {
    let chart = pi.chart();
    let comps: Vec<Scalar> = (0..chart.dim())
        .map(|i| if i % 2 == 1 { chart.coord(i).neg() } else { chart.coord(i) })
        .collect();
    let c = SmoothMap::new(chart, chart, comps).expect("conjugation on the same chart");
    c.pushforward(&c, pi).add(pi).is_zero()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    PrincipalFibersZero,
    IsotropicOrbits,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociatedLeafSpec {
    pub base_count: u64,
    pub fiber_count: u64,
    pub hypothesis: Option<Hypothesis>,
}

/// Leaf count of an associated bundle as base × fibre; the hypothesis is recorded, not checked.
pub fn associated_leaf_count(spec: &AssociatedLeafSpec) -> Result<u64, ToricError> {
    if spec.hypothesis.is_none() {
        return Err(ToricError::MissingHypothesis);
    }
    if spec.base_count == 0 || spec.fiber_count == 0 {
        return Err(ToricError::ZeroCount);
    }
    Ok(spec.base_count * spec.fiber_count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::{q, q_frac};

    fn standard_pi(d: usize) -> Matrix<Q> {
        let mut m = Matrix::zeros(2 * d, 2 * d);
        for i in 0..d {
            m.set(2 * i, 2 * i + 1, q(1));
            m.set(2 * i + 1, 2 * i, q(-1));
        }
        m
    }

    #[test]
    fn vertices_and_delzant() {
        let iv = vertices(&DelzantPolytope::interval()).unwrap();
        let pts: Vec<Vec<String>> = iv.iter().map(|v| v.coords.clone()).collect();
        assert_eq!(pts.len(), 2);
        assert!(pts.contains(&vec!["0".to_string()]) && pts.contains(&vec!["1".to_string()]));
        assert_eq!(vertices(&DelzantPolytope::triangle()).unwrap().len(), 3);
        assert!(is_delzant(&DelzantPolytope::interval()).unwrap().delzant);
        assert!(is_delzant(&DelzantPolytope::triangle()).unwrap().delzant);
        let bad = DelzantPolytope::new(
            2,
            vec![(vec![1, 0], q(0)), (vec![0, 1], q(0)), (vec![-2, -1], q(-1))],
        )
        .unwrap();
        let chk = is_delzant(&bad).unwrap();
        assert!(!chk.delzant);
        let v = chk.failing_vertex.unwrap();
        assert_eq!(v.coords, vec!["1/2".to_string(), "0".to_string()]);
        assert_eq!(v.active, vec![1, 2]);
        assert_eq!(chk.determinant.as_deref(), Some("2"));
    }

    #[test]
    fn shape_errors() {
        assert_eq!(DelzantPolytope::new(1, vec![(vec![1], q(0))]), Err(ToricError::Unbounded));
        assert_eq!(
            DelzantPolytope::new(1, vec![(vec![1], q(1)), (vec![-1], q(0))]),
            Err(ToricError::Empty)
        );
        assert_eq!(
            DelzantPolytope::new(1, vec![(vec![1], q(0)), (vec![-1], q(0))]),
            Err(ToricError::NotFullDimensional)
        );
        assert_eq!(DelzantPolytope::new(1, vec![(vec![2], q(0))]), Err(ToricError::NotPrimitive(0)));
    }

    #[test]
    fn kernels() {
        assert_eq!(kernel_lattice(&DelzantPolytope::interval()).basis, vec![vec![1, 1]]);
        let tri = kernel_lattice(&DelzantPolytope::triangle());
        assert_eq!(tri.basis, vec![vec![1, 1, 1]]);
        assert!(tri.surjective);
        let sq = kernel_lattice(&DelzantPolytope::square());
        assert_eq!(sq.basis, vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]]);
        assert_eq!(smith_diagonal(&[vec![2, 0], vec![0, 3]]), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn leaf_counts() {
        let iv = DelzantPolytope::interval();
        assert_eq!(faces(&iv).unwrap(), vec![vec![], vec![0], vec![1]]);
        assert_eq!(leaf_count_toric(&iv).unwrap(), 3);
        assert_eq!(leaf_count_toric(&DelzantPolytope::triangle()).unwrap(), 7);
        assert_eq!(leaf_count_toric(&DelzantPolytope::square()).unwrap(), 9);
        for p in [iv, DelzantPolytope::triangle(), DelzantPolytope::square()] {
            assert_eq!(faces(&p).unwrap(), faces_brute_force(&p));
        }
    }

    #[test]
    fn moment_values() {
        let iv = DelzantPolytope::interval();
        let m = moment_map(&iv, &[q(2), q(0)]);
        assert_eq!(m.mu, vec!["1", "-1"]);
        assert_eq!(m.mu_n, vec!["0"]);
        assert_eq!(moment_map(&iv, &[q(0), q(0)]).mu, vec!["0", "-1"]);
    }

    #[test]
    fn git_samples() {
        let iv = DelzantPolytope::interval();
        let pi = standard_pi(2);
        let one = (q(1), q(0));
        let zero = (q(0), q(0));
        assert!(git_coregular_sample(&iv, &pi, &[one.clone(), one.clone()]).unwrap().poisson_dirac);
        assert!(git_coregular_sample(&iv, &pi, &[one, zero.clone()]).unwrap().poisson_dirac);
        assert_eq!(
            git_coregular_sample(&iv, &pi, &[zero.clone(), zero]),
            Err(ToricError::NotInStrata(vec![0, 1]))
        );
        let z = [(q_frac(1, 2), q(1)), (q(-1), q_frac(2, 3))];
        assert!(git_coregular_sample(&iv, &pi, &z).unwrap().poisson_dirac);
    }

    #[test]
    fn conjugation() {
        let c = complex_chart(1);
        assert!(totally_real(&crate::calculus::Alt::basis(&c, &[0, 1])));
        let g = torus_generators(1);
        assert!(totally_real(&g[0].wedge(&g[1])));
        let g2 = torus_generators(2);
        let mixed = g2[0].wedge(&g2[3]).add(&g2[1].wedge(&g2[2]));
        assert!(totally_real(&mixed));
        assert!(!totally_real(&g2[0].wedge(&g2[2])));
    }

    #[test]
    fn associated_counts() {
        let spec = |b, f| AssociatedLeafSpec {
            base_count: b,
            fiber_count: f,
            hypothesis: Some(Hypothesis::IsotropicOrbits),
        };
        assert_eq!(associated_leaf_count(&spec(2, 2)).unwrap(), 4);
        assert_eq!(associated_leaf_count(&spec(2, 3)).unwrap(), 6);
        assert_eq!(associated_leaf_count(&spec(3, 3)).unwrap(), 9);
        let mut missing = spec(2, 2);
        missing.hypothesis = None;
        assert_eq!(associated_leaf_count(&missing), Err(ToricError::MissingHypothesis));
    }
}
