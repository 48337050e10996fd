//! Deterministic rational sample grids.

use num_traits::Zero;
use thiserror::Error;

use super::poly::{q, q_frac, Q};
use super::{Chart, Point};

pub const DEFAULT_GRID_PER_DIM: usize = 5;
pub const DEFAULT_GRID_CAP: usize = 625;

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("grid has {got} value lists for a chart of dimension {dim}")]
    Arity { got: usize, dim: usize },
    #[error("empty value list for coordinate {0}")]
    EmptyAxis(usize),
}

/// Radical inverse of `i` in `base`, an exact rational in [0,1).
pub fn halton(mut i: u64, base: u64) -> Q {
    let mut result = Q::zero();
    let mut factor = q_frac(1, base as i64);
    while i > 0 {
        result += &factor * q((i % base) as i64);
        factor /= q(base as i64);
        i /= base;
    }
    result
}

/// Cartesian product of per-coordinate value lists, first coordinate slowest.
pub fn product_grid(chart: &Chart, axes: &[Vec<Q>]) -> Result<Vec<Point<Q>>, GridError> {
    if axes.len() != chart.dim() {
        return Err(GridError::Arity {
            got: axes.len(),
            dim: chart.dim(),
        });
    }
    if let Some(i) = axes.iter().position(|a| a.is_empty()) {
        return Err(GridError::EmptyAxis(i));
    }
    let mut points: Vec<Vec<Q>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(points.len() * axis.len());
        for p in &points {
            for v in axis {
                let mut p2 = p.clone();
                p2.push(v.clone());
                next.push(p2);
            }
        }
        points = next;
    }
    Ok(points.into_iter().map(|c| Point::new(chart, c)).collect())
}

/// `per_dim` values per coordinate in [−1, 1], shifted by a seed-dependent rational offset;
/// beyond `cap` points a Halton sequence of length `cap` is used instead.
pub fn default_grid(chart: &Chart, seed: u64, per_dim: usize, cap: usize) -> Vec<Point<Q>> {
    let m = chart.dim();
    let offsets: Vec<Q> = (0..m)
        .map(|j| halton(seed, PRIMES[j % PRIMES.len()]) / q(8))
        .collect();
    let base: Vec<Q> = if per_dim <= 1 {
        vec![q(0)]
    } else {
        (0..per_dim)
            .map(|k| q(-1) + q_frac(2 * k as i64, per_dim as i64 - 1))
            .collect()
    };
    let full = (per_dim as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if full <= cap as u128 {
        let axes: Vec<Vec<Q>> = offsets
            .iter()
            .map(|o| base.iter().map(|b| b + o).collect())
            .collect();
        return product_grid(chart, &axes).expect("axes match chart");
    }
    (0..cap as u64)
        .map(|i| {
            let coords = (0..m)
                .map(|j| {
                    let h = halton(i + 1, PRIMES[j % PRIMES.len()]);
                    q(2) * h - q(1) + &offsets[j]
                })
                .collect();
            Point::new(chart, coords)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halton_values() {
        assert_eq!(halton(1, 2), q_frac(1, 2));
        assert_eq!(halton(2, 2), q_frac(1, 4));
        assert_eq!(halton(3, 2), q_frac(3, 4));
        assert_eq!(halton(5, 3), q_frac(7, 9));
        assert_eq!(halton(0, 5), q(0));
    }

    #[test]
    fn default_grid_shape() {
        let c = Chart::of(&["t"]);
        let g = default_grid(&c, 0, 5, 625);
        let ts: Vec<Q> = g.iter().map(|p| p.coords[0].clone()).collect();
        assert_eq!(ts, vec![q(-1), q_frac(-1, 2), q(0), q_frac(1, 2), q(1)]);
        let c5 = Chart::of(&["a", "b", "c", "d", "e"]);
        assert_eq!(default_grid(&c5, 0, 5, 625).len(), 625);
        let shifted = default_grid(&c, 1, 5, 625);
        assert_ne!(shifted[0].coords[0], q(-1));
    }
}
