//! Dense matrices over exact and floating fields.

use std::fmt;

use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};

use crate::scalars::{RatFunc, Q};

/// Relative singular-value threshold for floating ranks.
pub const NUMERIC_RANK_TOL: f64 = 1e-9;

pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    /// Panics on division by an exact zero.
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// Whether `self` is treated as zero during elimination of a matrix with entries up to `scale`.
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
    fn magnitude(&self) -> f64 {
        0.0
    }
    /// Pivot preference during elimination; larger is better.
    fn pivot_weight(&self) -> f64 {
        0.0
    }
    fn rank(m: &Matrix<Self>) -> usize {
        m.rref().1.len()
    }
    fn nullspace(m: &Matrix<Self>) -> Vec<Vec<Self>> {
        m.rref_nullspace()
    }
    fn column_basis(m: &Matrix<Self>) -> Matrix<Self> {
        let (_, pivots) = m.rref();
        m.select_cols(&pivots)
    }
    fn is_exact() -> bool {
        true
    }
}

impl Field for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn pivot_weight(&self) -> f64 {
        let bits = self.numer().bits() + self.denom().bits();
        -(bits as f64)
    }
}

impl Field for RatFunc {
    fn zero() -> Self {
        RatFunc::zero()
    }
    fn one() -> Self {
        RatFunc::one()
    }
    fn add(&self, o: &Self) -> Self {
        RatFunc::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        RatFunc::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        RatFunc::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        RatFunc::div(self, o).expect("division by zero rational function")
    }
    fn neg(&self) -> Self {
        RatFunc::neg(self)
    }
    fn is_zero(&self) -> bool {
        RatFunc::is_zero(self)
    }
    fn pivot_weight(&self) -> f64 {
        let size = self.numer().len() + self.denom().len();
        let deg = self.numer().total_degree() + self.denom().total_degree();
        let constant = if self.as_constant().is_some() { 1000.0 } else { 0.0 };
        constant - (size as f64) - (deg as f64)
    }
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= NUMERIC_RANK_TOL * scale.max(f64::MIN_POSITIVE)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn pivot_weight(&self) -> f64 {
        self.abs()
    }
    fn rank(m: &Matrix<f64>) -> usize {
        svd_rank(m, NUMERIC_RANK_TOL)
    }
    fn nullspace(m: &Matrix<f64>) -> Vec<Vec<f64>> {
        svd_nullspace(m, NUMERIC_RANK_TOL)
    }
    fn column_basis(m: &Matrix<f64>) -> Matrix<f64> {
        let (_, pivots) = m.rref();
        let sub = m.select_cols(&pivots);
        if svd_rank(&sub, NUMERIC_RANK_TOL) == pivots.len() {
            sub
        } else {
            svd_column_basis(m)
        }
    }
    fn is_exact() -> bool {
        false
    }
}

#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, F::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds from columns; `rows` fixes the height when there are no columns.
    pub fn from_cols(rows: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, o.rows, "shape mismatch");
        let mut m: Matrix<F> = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).add(&a.mul(b));
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        acc = acc.add(&self.get(i, j).mul(x));
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.neg()).collect(),
        }
    }

    pub fn hstack(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.rows, o.rows, "hstack height");
        let mut m = Matrix::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).clone());
            }
            for j in 0..o.cols {
                m.set(i, self.cols + j, o.get(i, j).clone());
            }
        }
        m
    }

    pub fn vstack(&self, o: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, o.cols, "vstack width");
        let mut data = self.data.clone();
        data.extend(o.data.iter().cloned());
        Matrix {
            rows: self.rows + o.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix<F> {
        let cols: Vec<Vec<F>> = idx.iter().map(|&j| self.col(j)).collect();
        Matrix::from_cols(self.rows, &cols)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix<F> {
        let mut m = Matrix::zeros(idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m.set(r, j, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn max_magnitude(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G) -> Matrix<G> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix<F>, Vec<usize>) {
        let mut m = self.clone();
        let scale = self.max_magnitude();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let mut best: Option<usize> = None;
            for i in r..m.rows {
                let x = m.get(i, c);
                if x.negligible(scale) {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) if x.pivot_weight() > m.get(b, c).pivot_weight() => best = Some(i),
                    _ => {}
                }
            }
            let Some(p) = best else {
                for i in r..m.rows {
                    m.set(i, c, F::zero());
                }
                continue;
            };
            if p != r {
                for j in 0..m.cols {
                    m.data.swap(p * m.cols + j, r * m.cols + j);
                }
            }
            let inv = F::one().div(m.get(r, c));
            for j in 0..m.cols {
                let v = m.get(r, j).mul(&inv);
                m.set(r, j, v);
            }
            m.set(r, c, F::one());
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..m.cols {
                    let rj = m.get(r, j).clone();
                    if rj.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j).sub(&f.mul(&rj));
                    m.set(i, j, v);
                }
                m.set(i, c, F::zero());
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        F::rank(self)
    }

    /// Basis of the kernel, as vectors.
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        F::nullspace(self)
    }

    fn rref_nullspace(&self) -> Vec<Vec<F>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (k, &p) in pivots.iter().enumerate() {
                    v[p] = r.get(k, f).neg();
                }
                v
            })
            .collect()
    }

    /// Kernel of the transpose: row vectors `y` with `yᵀ A = 0`.
    pub fn left_nullspace(&self) -> Vec<Vec<F>> {
        self.transpose().nullspace()
    }

    /// Independent columns spanning the column space.
    pub fn column_basis(&self) -> Matrix<F> {
        F::column_basis(self)
    }

    /// Canonical basis of the column space: reduced column echelon form without zero columns.
    pub fn column_echelon(&self) -> Matrix<F> {
        let (r, pivots) = self.transpose().rref();
        r.select_rows(&(0..pivots.len()).collect::<Vec<_>>()).transpose_or_empty(self.rows)
    }

    fn transpose_or_empty(&self, rows: usize) -> Matrix<F> {
        if self.rows == 0 {
            Matrix::zeros(rows, 0)
        } else {
            self.transpose()
        }
    }

    /// One solution of `A x = b` with free variables set to zero.
    pub fn solve(&self, b: &[F]) -> Option<Vec<F>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Matrix::from_cols(self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![F::zero(); self.cols];
        for (k, &p) in pivots.iter().enumerate() {
            x[p] = r.get(k, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix<F>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(n));
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(r.select_cols(&(n..2 * n).collect::<Vec<_>>()))
    }

    pub fn determinant(&self) -> F {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = F::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return F::zero();
            };
            if p != c {
                for j in 0..n {
                    m.data.swap(p * n + j, c * n + j);
                }
                det = det.neg();
            }
            let piv = m.get(c, c).clone();
            det = det.mul(&piv);
            for i in c + 1..n {
                let f = m.get(i, c).div(&piv);
                if f.is_zero() {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j).sub(&f.mul(m.get(c, j)));
                    m.set(i, j, v);
                }
            }
        }
        det
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j).add(self.get(j, i)).is_zero())
            })
    }
}

impl<F: fmt::Debug> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[i * self.cols..(i + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

fn to_dmatrix(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows, m.cols, |i, j| *m.get(i, j))
}

fn singular_threshold(sv: &[f64], tol: f64) -> f64 {
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    tol * smax.max(f64::MIN_POSITIVE)
}

pub fn svd_rank(m: &Matrix<f64>, tol: f64) -> usize {
    if m.rows == 0 || m.cols == 0 {
        return 0;
    }
    let svd = to_dmatrix(m).svd(false, false);
    let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    if sv.iter().all(|&s| s == 0.0) {
        return 0;
    }
    let thr = singular_threshold(&sv, tol);
    sv.iter().filter(|&&s| s > thr).count()
}

pub fn svd_nullspace(m: &Matrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let n = m.cols;
    if n == 0 {
        return Vec::new();
    }
    if m.rows == 0 || m.data.iter().all(|&x| x == 0.0) {
        return (0..n)
            .map(|k| (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect())
            .collect();
    }
    // Pad to at least n rows so V is square.
    let mut padded = to_dmatrix(m);
    if m.rows < n {
        padded = padded.resize_vertically(n, 0.0);
    }
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    let thr = singular_threshold(&sv, tol);
    (0..n)
        .filter(|&k| sv[k] <= thr)
        .map(|k| (0..n).map(|i| v_t[(k, i)]).collect())
        .collect()
}

fn svd_column_basis(m: &Matrix<f64>) -> Matrix<f64> {
    let r = svd_rank(m, NUMERIC_RANK_TOL);
    let svd = to_dmatrix(m).svd(true, false);
    let u = svd.u.expect("requested U");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let cols: Vec<Vec<f64>> = order[..r]
        .iter()
        .map(|&k| (0..m.rows).map(|i| u[(i, k)]).collect())
        .collect();
    Matrix::from_cols(m.rows, &cols)
}

/// dim(span A ∩ span B) for matrices with independent columns, from the kernel of [A | −B].
pub fn intersection_dim_kernel<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> usize {
    let stacked = a.hstack(&b.neg());
    stacked.nullspace().len()
}

/// dim A + dim B − dim(A+B) for arbitrary spanning sets.
pub fn intersection_dim_rank<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> usize {
    a.rank() + b.rank() - a.hstack(b).rank()
}

/// Basis of span A ∩ span B (columns), A and B with independent columns.
pub fn intersection_basis<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let ker = a.hstack(&b.neg()).nullspace();
    let cols: Vec<Vec<F>> = ker
        .iter()
        .map(|v| a.mul_vec(&v[..a.cols()]))
        .collect();
    Matrix::from_cols(a.rows(), &cols).column_basis()
}

/// Leading principal minors positive (Sylvester's criterion).
pub fn is_positive_definite(m: &Matrix<Q>) -> bool {
    (1..=m.rows()).all(|k| {
        let idx: Vec<usize> = (0..k).collect();
        m.select_rows(&idx).select_cols(&idx).determinant().is_positive()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::q;

    fn qm(rows: &[&[i64]]) -> Matrix<Q> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect())
    }

    #[test]
    fn rank_and_nullspace() {
        let m = qm(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(|x| Field::is_zero(x)));
    }

    #[test]
    fn float_rank_via_svd() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0 + 1e-14]]);
        assert_eq!(m.rank(), 1);
        assert_eq!(m.nullspace().len(), 1);
    }

    #[test]
    fn echelon_is_canonical() {
        let a = qm(&[&[1, 0], &[1, 1], &[0, 1]]);
        let b = qm(&[&[1, 1], &[2, 1], &[1, 0]]);
        assert_eq!(a.column_echelon(), b.column_echelon());
    }

    #[test]
    fn determinant_and_inverse() {
        let m = qm(&[&[2, 1], &[1, 1]]);
        assert_eq!(m.determinant(), q(1));
        assert_eq!(m.mul(&m.inverse().unwrap()), Matrix::identity(2));
        assert!(qm(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }

    #[test]
    fn intersections_agree() {
        let a = qm(&[&[1, 0], &[0, 1], &[0, 0]]);
        let b = qm(&[&[1], &[1], &[0]]);
        assert_eq!(intersection_dim_kernel(&a, &b), 1);
        assert_eq!(intersection_dim_rank(&a, &b), 1);
    }
}
