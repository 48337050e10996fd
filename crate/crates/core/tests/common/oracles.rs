//! Independent constructions used as oracles by the property suites.

use poisson_kit::calculus::Multivector;
use poisson_kit::scalars::{Chart, Scalar};

/// Lie bracket of vector fields from components.
pub fn lie_bracket(c: &Chart, x: &Multivector, y: &Multivector) -> Multivector {
    let xs = x.components();
    let ys = y.components();
    let comps = (0..c.dim())
        .map(|k| {
            let mut acc = Scalar::zero();
            for i in 0..c.dim() {
                let v = c.var(i);
                acc = acc.add(&xs[i].mul(&ys[k].differentiate(v)));
                acc = acc.sub(&ys[i].mul(&xs[k].differentiate(v)));
            }
            acc
        })
        .collect();
    Multivector::vector(c, comps)
}

pub fn wedge_all(c: &Chart, fields: &[Multivector]) -> Multivector {
    fields
        .iter()
        .fold(Multivector::function(c, Scalar::one()), |acc, f| acc.wedge(f))
}

/// Decomposes each term f ∂_I as (f∂_{i1}) ∧ ∂_{i2} ∧ … .
pub fn factors(p: &Multivector) -> Vec<Vec<Multivector>> {
    let c = p.chart();
    p.terms()
        .map(|(idx, f)| {
            idx.iter()
                .enumerate()
                .map(|(a, &i)| {
                    let d = Multivector::partial(c, i);
                    if a == 0 { d.mul_scalar(f) } else { d }
                })
                .collect()
        })
        .collect()
}

/// [X1∧…∧Xp, Y1∧…∧Yq] = Σ (−1)^{a+b} [Xa,Yb] ∧ X1…X̂a…Xp ∧ Y1…Ŷb…Yq, summed over terms.
pub fn schouten_oracle(p: &Multivector, q: &Multivector) -> Multivector {
    let c = p.chart();
    let mut out = Multivector::zero(c, p.degree() + q.degree() - 1);
    for xs in factors(p) {
        for ys in factors(q) {
            for a in 0..xs.len() {
                for b in 0..ys.len() {
                    let mut rest = vec![lie_bracket(c, &xs[a], &ys[b])];
                    rest.extend(xs.iter().enumerate().filter(|&(i, _)| i != a).map(|(_, x)| x.clone()));
                    rest.extend(ys.iter().enumerate().filter(|&(j, _)| j != b).map(|(_, y)| y.clone()));
                    let t = wedge_all(c, &rest);
                    out = if (a + b) % 2 == 0 { out.add(&t) } else { out.sub(&t) };
                }
            }
        }
    }
    out
}
