#![allow(dead_code)]

pub mod oracles;
pub mod props;

use poisson_kit::calculus::{Alt, Form, Kind, Multivector};
use poisson_kit::scalars::{q, Chart, Scalar, Var};
use proptest::prelude::*;

pub fn chart(n: usize) -> Chart {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    Chart::new(&names).unwrap()
}

/// Polynomial from (exponent vector, coefficient) terms.
pub fn poly(chart: &Chart, terms: &[(Vec<u32>, i64)]) -> Scalar {
    let mut acc = Scalar::zero();
    for (exps, c) in terms {
        let mut t = Scalar::constant(q(*c));
        for (i, &e) in exps.iter().enumerate() {
            t = t.mul(&Scalar::var(chart.var(i)).powi(e as i32).unwrap());
        }
        acc = acc.add(&t);
    }
    acc
}

/// Terms of a random polynomial with total degree ≤ `deg` in `n` variables.
pub fn poly_terms(n: usize, deg: u32) -> impl Strategy<Value = Vec<(Vec<u32>, i64)>> {
    prop::collection::vec(
        (prop::collection::vec(0..=deg, n), -3i64..=3).prop_filter_map("degree bound", move |(e, c)| {
            let total: u32 = e.iter().sum();
            (total <= deg).then_some((e, c))
        }),
        0..4,
    )
}

/// Random element of degree `k` on `chart(n)`, coefficients of degree ≤ `deg`.
pub fn alt_terms(n: usize, k: usize, deg: u32) -> impl Strategy<Value = Vec<(Vec<usize>, Vec<(Vec<u32>, i64)>)>> {
    prop::collection::vec((prop::collection::vec(0..n, k), poly_terms(n, deg)), 0..4)
}

pub fn build<K: Kind>(c: &Chart, k: usize, terms: &[(Vec<usize>, Vec<(Vec<u32>, i64)>)]) -> Alt<K> {
    Alt::from_terms(c, k, terms.iter().map(|(idx, p)| (idx.clone(), poly(c, p)))).unwrap()
}

pub fn mv(c: &Chart, k: usize, terms: &[(Vec<usize>, Vec<(Vec<u32>, i64)>)]) -> Multivector {
    build(c, k, terms)
}

pub fn form(c: &Chart, k: usize, terms: &[(Vec<usize>, Vec<(Vec<u32>, i64)>)]) -> Form {
    build(c, k, terms)
}

pub fn var(c: &Chart, i: usize) -> Var {
    c.var(i).clone()
}
