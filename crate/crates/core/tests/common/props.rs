//! Property bodies shared by the proptest suites and the acceptance run.

use num_traits::Zero;
use poisson_kit::calculus::{Multivector, SmoothMap};
use poisson_kit::dirac::{LagrangianFamily, LagrangianSubspace};
use poisson_kit::linalg::{intersection_dim_kernel, intersection_dim_rank, Matrix};
use poisson_kit::scalars::{q, Chart, Func, Point, Scalar, Q};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

use super::oracles::schouten_oracle;
use super::{alt_terms, chart, mv, poly, poly_terms};

pub type Terms = Vec<(Vec<usize>, Vec<(Vec<u32>, i64)>)>;
pub type PolyTerms = Vec<(Vec<u32>, i64)>;

/// Runs `body` on `cases` inputs drawn from `strategy` with a fixed ChaCha seed.
pub fn run_seeded<S: Strategy>(
    cases: u32,
    seed: u8,
    strategy: S,
    body: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]);
    let mut runner = TestRunner::new_with_rng(config, rng);
    runner.run(&strategy, body).map_err(|e| match e {
        TestError::Fail(why, v) => format!("{why} for {v:?}"),
        TestError::Abort(why) => format!("aborted: {why}"),
    })
}

fn sign(e: usize) -> bool {
    e % 2 == 0
}

pub fn schouten_case() -> impl Strategy<Value = (usize, usize, usize, Terms, Terms)> {
    (2usize..=4, 1usize..=3, 1usize..=3, alt_terms(4, 3, 2), alt_terms(4, 3, 2))
}

/// The odd-variable Schouten bracket equals the expansion over decomposable factors.
pub fn schouten_agrees((n, p, q, a, b): (usize, usize, usize, Terms, Terms)) -> Result<(), TestCaseError> {
    let c = chart(n);
    let trim = |t: &Terms, k: usize| -> Terms {
        t.iter()
            .map(|(i, f)| {
                (
                    i.iter().take(k).map(|x| x % n).collect(),
                    f.iter().map(|(e, c)| (e[..n].to_vec(), *c)).collect(),
                )
            })
            .collect()
    };
    let pp = mv(&c, p, &trim(&a, p));
    let qq = mv(&c, q, &trim(&b, q));
    prop_assert_eq!(pp.schouten(&qq), schouten_oracle(&pp, &qq));
    Ok(())
}

pub fn jacobi_case() -> impl Strategy<Value = (Terms, Terms, Terms)> {
    (alt_terms(4, 2, 1), alt_terms(4, 2, 1), alt_terms(4, 1, 2))
}

/// [P,[Q,R]] = [[P,Q],R] + (−1)^{(p−1)(q−1)} [Q,[P,R]] for bivectors P, Q and a vector field R.
pub fn graded_jacobi((x, y, z): (Terms, Terms, Terms)) -> Result<(), TestCaseError> {
    let c = chart(4);
    let (p, q, r) = (mv(&c, 2, &x), mv(&c, 2, &y), mv(&c, 1, &z));
    jacobi(&p, &q, &r)
}

pub fn jacobi(p: &Multivector, q: &Multivector, r: &Multivector) -> Result<(), TestCaseError> {
    let lhs = p.schouten(&q.schouten(r));
    let t = q.schouten(&p.schouten(r));
    let t = if sign((p.degree() - 1) * (q.degree() - 1)) { t } else { t.neg() };
    let rhs = p.schouten(q).schouten(r).add(&t);
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

/// Antisymmetric n×n matrix from its upper-triangular entries.
pub fn antisym(n: usize, entries: &[i64]) -> Matrix<Q> {
    let mut m = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let v = q(entries[k % entries.len()]);
            m.set(i, j, v.clone());
            m.set(j, i, -v);
            k += 1;
        }
    }
    m
}

pub fn gauge_case() -> impl Strategy<Value = (u8, Vec<i64>, Vec<i64>, Vec<i64>)> {
    let e = || prop::collection::vec(-3i64..=3, 6);
    (0u8..4, e(), e(), e())
}

/// Gauge transformations form an abelian group acting on Lagrangian subspaces of ℝ⁴ ⊕ ℝ⁴*.
pub fn gauge_group_law((kind, base, a, b): (u8, Vec<i64>, Vec<i64>, Vec<i64>)) -> Result<(), TestCaseError> {
    let n = 4;
    let l = match kind {
        0 => LagrangianSubspace::graph_bivector(&antisym(n, &base)),
        1 => LagrangianSubspace::graph_form(&antisym(n, &base)),
        2 => LagrangianSubspace::tangent(n),
        _ => LagrangianSubspace::cotangent(n),
    };
    let (w1, w2) = (antisym(n, &a), antisym(n, &b));
    prop_assert!(l.gauge(&w1).is_lagrangian());
    prop_assert!(l.gauge(&w1).gauge(&w2).same_as(&l.gauge(&w1.add(&w2))));
    prop_assert!(l.gauge(&w1).gauge(&w2).same_as(&l.gauge(&w2).gauge(&w1)));
    prop_assert!(l.gauge(&Matrix::zeros(n, n)).same_as(&l));
    prop_assert!(l.gauge(&w1).gauge(&w1.neg()).same_as(&l));
    Ok(())
}

pub fn chain_case() -> impl Strategy<Value = (Terms, Vec<PolyTerms>, Vec<PolyTerms>, (i64, i64))> {
    (
        alt_terms(4, 2, 1),
        prop::collection::vec(poly_terms(2, 2), 3),
        prop::collection::vec(poly_terms(3, 2), 4),
        (-3i64..=3, -3i64..=3),
    )
}

/// (g∘f)^! L = f^! g^! L for the graph of a bivector on ℝ⁴ and polynomial maps ℝ² → ℝ³ → ℝ⁴.
pub fn pullback_functorial(
    (pi, f, g, (s, t)): (Terms, Vec<PolyTerms>, Vec<PolyTerms>, (i64, i64)),
) -> Result<(), TestCaseError> {
    let x = Chart::of(&["s", "t"]);
    let y = Chart::of(&["y1", "y2", "y3"]);
    let m = chart(4);
    let f = SmoothMap::new(&x, &y, f.iter().map(|p| poly(&x, p)).collect()).unwrap();
    let g = SmoothMap::new(&y, &m, g.iter().map(|p| poly(&y, p)).collect()).unwrap();
    let fam = LagrangianFamily::GraphBivector(mv(&m, 2, &pi));
    let p = Point::new(&x, vec![Q::new(s.into(), 2.into()), Q::new(t.into(), 3.into())]);
    let stepwise = fam.clone().pullback(&g).pullback(&f).eval(&p).unwrap();
    let composite = fam.pullback(&f.then(&g)).eval(&p).unwrap();
    prop_assert!(stepwise.is_lagrangian());
    prop_assert!(stepwise.same_as(&composite));
    Ok(())
}

pub fn derivative_case() -> impl Strategy<Value = (PolyTerms, u8, usize, Vec<i64>)> {
    (poly_terms(3, 3), 0u8..4, 0usize..3, prop::collection::vec(-8i64..=8, 3))
}

/// Symbolic derivatives agree with a fourth-order central difference to 1e-6 relative.
pub fn derivative_matches_difference((p, f, v, at): (PolyTerms, u8, usize, Vec<i64>)) -> Result<(), TestCaseError> {
    let c = chart(3);
    let base = poly(&c, &p).scale(&Q::new(1.into(), 4.into()));
    let s = match f {
        0 => base,
        1 => Scalar::call(Func::Sin, &base),
        2 => Scalar::call(Func::Exp, &base),
        _ => Scalar::call(Func::Arctan, &base),
    };
    let x0: Vec<f64> = at.iter().map(|&k| k as f64 / 8.0).collect();
    let eval = |s: &Scalar, x: &[f64]| s.eval_f64(&|var| c.vars().iter().position(|w| w == var).map(|i| x[i])).unwrap();
    let exact = eval(&s.differentiate(c.var(v)), &x0);
    let h = 1e-3;
    let shifted = |k: f64| {
        let mut x = x0.clone();
        x[v] += k * h;
        eval(&s, &x)
    };
    let fd = (8.0 * (shifted(1.0) - shifted(-1.0)) - (shifted(2.0) - shifted(-2.0))) / (12.0 * h);
    prop_assert!(
        (exact - fd).abs() <= 1e-6 * exact.abs().max(1.0),
        "d/d{} = {exact}, difference {fd}",
        c.var(v).name()
    );
    Ok(())
}

pub fn subspace_case() -> impl Strategy<Value = (usize, usize, usize, Vec<i64>, Vec<i64>, bool)> {
    (1usize..=6)
        .prop_flat_map(|n| (Just(n), 0..=n, 0..=n))
        .prop_flat_map(|(n, k1, k2)| {
            (
                Just(n),
                Just(k1),
                Just(k2),
                prop::collection::vec(-2i64..=2, n * k1),
                prop::collection::vec(-2i64..=2, n * k2),
                any::<bool>(),
            )
        })
}

fn columns(n: usize, k: usize, e: &[i64]) -> Vec<Vec<Q>> {
    (0..k).map(|j| (0..n).map(|i| q(e[j * n + i])).collect()).collect()
}

/// dim(A ∩ B) from the kernel of [A | −B] on column bases agrees with
/// rank A + rank B − rank [A | B] on the raw spanning sets.
pub fn intersection_methods_agree(
    (n, k1, k2, a, b, share): (usize, usize, usize, Vec<i64>, Vec<i64>, bool),
) -> Result<(), TestCaseError> {
    let ca = columns(n, k1, &a);
    let mut cb = columns(n, k2, &b);
    if share && k1 > 0 && k2 > 0 {
        // force a common direction
        cb[0] = ca[0].iter().zip(&ca[k1 - 1]).map(|(x, y)| x + y).collect();
    }
    let (ma, mb) = (Matrix::from_cols(n, &ca), Matrix::from_cols(n, &cb));
    let kernel = intersection_dim_kernel(&ma.column_basis(), &mb.column_basis());
    let rank = intersection_dim_rank(&ma, &mb);
    prop_assert_eq!(kernel, rank);
    prop_assert!(kernel <= ma.rank().min(mb.rank()));
    if share && k1 > 0 && k2 > 0 && !cb[0].iter().all(Zero::is_zero) {
        prop_assert!(kernel >= 1);
    }
    Ok(())
}
