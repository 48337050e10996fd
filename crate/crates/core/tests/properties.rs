mod common;

use common::props::{self, antisym};
use num_traits::Zero;
use poisson_kit::lie::{positivity, ComplexStructure};
use poisson_kit::linalg::Matrix;
use poisson_kit::scalars::{q, Q};
use poisson_kit::toric::{
    faces, faces_brute_force, git_coregular_sample, is_delzant, kernel_lattice, DelzantPolytope,
};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn gauge_transformations_form_a_group(case in props::gauge_case()) {
        props::gauge_group_law(case)?;
    }

    #[test]
    fn pullback_is_functorial(case in props::chain_case()) {
        props::pullback_functorial(case)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 100, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn derivative_matches_central_difference(case in props::derivative_case()) {
        props::derivative_matches_difference(case)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn intersection_dimension_two_ways(case in props::subspace_case()) {
        props::intersection_methods_agree(case)?;
    }
}

/// Realification of a complex m×m matrix on coordinates (x1, y1, …); commutes with the standard J.
fn realify(m: usize, entries: &[(i64, i64)]) -> Matrix<Q> {
    let mut a = Matrix::zeros(2 * m, 2 * m);
    for k in 0..m {
        for l in 0..m {
            let (re, im) = entries[k * m + l];
            a.set(2 * k, 2 * l, q(re));
            a.set(2 * k, 2 * l + 1, q(-im));
            a.set(2 * k + 1, 2 * l, q(im));
            a.set(2 * k + 1, 2 * l + 1, q(re));
        }
    }
    a
}

/// Standard positive bivector of rank 2k on ℂ^m.
fn kahler(m: usize, k: usize) -> Matrix<Q> {
    let mut p = Matrix::zeros(2 * m, 2 * m);
    for i in 0..k {
        p.set(2 * i, 2 * i + 1, q(1));
        p.set(2 * i + 1, 2 * i, q(-1));
    }
    p
}

fn complex_entries(m: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-2i64..=2, -2i64..=2), m * m)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn holomorphic_pushforward_keeps_positivity(k in 0usize..=2, a in complex_entries(2)) {
        let j = ComplexStructure::standard(2);
        let a = realify(2, &a);
        prop_assert!(a.mul(j.matrix()) == j.matrix().mul(&a));
        let pushed = a.mul(&kahler(2, k)).mul(&a.transpose());
        let r = positivity(&j, &pushed);
        prop_assert!(r.positive, "{:?}", r);
        if !pushed.is_zero() {
            prop_assert!(!positivity(&j, &pushed.neg()).positive);
        }
    }

    #[test]
    fn positivity_is_invariant_under_complex_automorphisms(
        e in prop::collection::vec(-2i64..=2, 6),
        a in complex_entries(2),
    ) {
        let j = ComplexStructure::standard(2);
        let a = realify(2, &a);
        prop_assume!(!a.determinant().is_zero());
        let pi = antisym(4, &e);
        let moved = a.mul(&pi).mul(&a.transpose());
        prop_assert_eq!(positivity(&j, &pi).positive, positivity(&j, &moved).positive);
    }
}

fn standard_polytopes() -> Vec<DelzantPolytope> {
    let cube = DelzantPolytope::new(
        3,
        vec![
            (vec![1, 0, 0], q(0)),
            (vec![0, 1, 0], q(0)),
            (vec![0, 0, 1], q(0)),
            (vec![-1, 0, 0], q(-1)),
            (vec![0, -1, 0], q(-1)),
            (vec![0, 0, -1], q(-1)),
        ],
    )
    .unwrap();
    let hirzebruch = DelzantPolytope::new(
        2,
        vec![(vec![1, 0], q(0)), (vec![0, 1], q(0)), (vec![-1, -1], q(-3)), (vec![0, -1], q(-2))],
    )
    .unwrap();
    vec![DelzantPolytope::interval(), DelzantPolytope::triangle(), DelzantPolytope::square(), hirzebruch, cube]
}

/// Unimodular n×n matrix from a word in elementary row operations.
fn unimodular(n: usize, word: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for &(i, j, c) in word {
        let (i, j) = (i % n, j % n);
        if i == j {
            m.swap(0, i);
            continue;
        }
        for k in 0..n {
            m[i][k] += c * m[j][k];
        }
    }
    m
}

fn transformed(p: &DelzantPolytope, m: &[Vec<i64>], shift: &[i64]) -> DelzantPolytope {
    let n = p.rank();
    let facets = (0..p.facets())
        .map(|i| {
            let u = p.normal(i);
            let v: Vec<i64> = (0..n).map(|r| (0..n).map(|c| m[r][c] * u[c]).sum()).collect();
            let c = p.constant(i) + q((0..n).map(|r| v[r] * shift[r]).sum());
            (v, c)
        })
        .collect();
    DelzantPolytope::new(n, facets).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 30, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn toric_data_is_lattice_invariant(
        which in 0usize..5,
        word in prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 0..5),
        shift in prop::collection::vec(-2i64..=2, 3),
        moduli in prop::collection::vec((-2i64..=2, 1i64..=3), 6),
    ) {
        let base = &standard_polytopes()[which];
        let p = transformed(base, &unimodular(base.rank(), &word), &shift);
        prop_assert!(is_delzant(&p).unwrap().delzant);
        let fs = faces(&p).unwrap();
        prop_assert_eq!(&fs, &faces(base).unwrap());
        prop_assert_eq!(&fs, &faces_brute_force(&p));
        // faces are closed under taking subsets of their facet sets
        for face in &fs {
            for drop in face {
                let smaller: Vec<usize> = face.iter().copied().filter(|i| i != drop).collect();
                prop_assert!(fs.contains(&smaller), "{:?} lacks {:?}", face, smaller);
            }
        }

        let ker = kernel_lattice(&p);
        prop_assert!(ker.surjective);
        prop_assert_eq!(ker.basis.len(), p.facets() - p.rank());
        for k in &ker.basis {
            for r in 0..p.rank() {
                prop_assert_eq!((0..p.facets()).map(|i| k[i] * p.normal(i)[r]).sum::<i64>(), 0);
            }
        }

        // a point of every stratum, with random nonzero coordinates off the face
        if p.facets() <= 4 {
            let d = p.facets();
            let pi = kahler(d, d);
            for face in &fs {
                let z: Vec<(Q, Q)> = (0..d)
                    .map(|i| if face.contains(&i) { (q(0), q(0)) } else { (q(moduli[i].0), q(moduli[i].1)) })
                    .collect();
                let s = git_coregular_sample(&p, &pi, &z).unwrap();
                prop_assert!(s.poisson_dirac, "face {:?}", face);
            }
        }
    }
}
