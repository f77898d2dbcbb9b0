//! Dense complex matrices and state vectors.
//!
//! `ComplexMatrix` stands in for a bounded operator on a finite-dimensional
//! Hilbert space. Storage is row-major: entry `(i, j)` lives at `data[i * dim + j]`.

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Power iterations used by [`ComplexMatrix::op_norm`].
pub const OP_NORM_ITERATIONS: usize = 300;

/// Square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<R> {
    dim: usize,
    data: Vec<Complex<R>>,
}

impl<R: Real> ComplexMatrix<R> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Complex::zero(); dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex::one();
        }
        m
    }

    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_vec(dim: usize, data: Vec<Complex<R>>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::NotSquare { len: data.len() });
        }
        let m = Self { dim, data };
        m.ensure_finite("matrix entries")?;
        Ok(m)
    }

    /// Builds a matrix from row-major real entries.
    pub fn from_real(dim: usize, entries: &[R]) -> Result<Self> {
        Self::from_vec(dim, entries.iter().map(|&x| Complex::new(x, R::zero())).collect())
    }

    /// Builds a matrix from nested rows.
    ///
    /// Panics if the rows do not form a square array.
    pub fn from_rows(rows: &[Vec<Complex<R>>]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must form a square array");
        Self { dim, data: rows.iter().flatten().copied().collect() }
    }

    /// Convenience constructor from real rows of `f64` literals.
    pub fn from_f64_rows(rows: &[&[f64]]) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "rows must form a square array");
        let data = rows.iter().flat_map(|r| r.iter().map(|&x| Complex::new(R::lit(x), R::zero()))).collect();
        Self { dim, data }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex<R>) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    pub fn diag(entries: &[Complex<R>]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(entries: &[R]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = Complex::new(x, R::zero());
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<R>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex<R>] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn ensure_finite(&self, context: &str) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite { context: context.to_string() })
        }
    }

    pub fn ensure_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, got: other.dim })
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    /// `(A + A*) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let half = R::lit(0.5);
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()).scale(half))
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z * c).collect() }
    }

    pub fn scale_real(&self, c: R) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|&z| z.scale(c)).collect() }
    }

    pub fn trace(&self) -> Complex<R> {
        (0..self.dim).map(|i| self[(i, i)]).fold(Complex::zero(), |acc, z| acc + z)
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: Complex<R>, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// `self += c * other` for a real coefficient.
    pub fn axpy_real(&mut self, c: R, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += b.scale(c);
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex::zero(); n * n];
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let out_row = &mut out[i * n..(i + 1) * n];
            for (k, &a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// Checked product, reporting a dimension mismatch instead of panicking.
    pub fn try_matmul(&self, other: &Self) -> Result<Self> {
        self.ensure_same_dim(other)?;
        Ok(self.matmul(other))
    }

    pub fn mul_vec(&self, v: &StateVector<R>) -> StateVector<R> {
        assert_eq!(self.dim, v.dim(), "matrix-vector dimension mismatch");
        let n = self.dim;
        let data = (0..n)
            .map(|i| {
                self.data[i * n..(i + 1) * n]
                    .iter()
                    .zip(v.as_slice())
                    .fold(Complex::zero(), |acc, (&a, &x)| acc + a * x)
            })
            .collect();
        StateVector::from_vec(data)
    }

    /// `A^k` by repeated squaring.
    pub fn powi(&self, mut k: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.matmul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.matmul(&base);
            }
        }
        acc
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }

    pub fn norm_fro(&self) -> R {
        self.data.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm_1(&self) -> R {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.data[i * n + j].norm()).sum::<R>())
            .fold(R::zero(), R::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> R {
        let n = self.dim;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().map(|z| z.norm()).sum::<R>())
            .fold(R::zero(), R::max)
    }

    pub fn max_abs(&self) -> R {
        self.data.iter().map(|z| z.norm()).fold(R::zero(), R::max)
    }

    /// Largest singular value, by power iteration on `A* A` from a fixed start vector.
    ///
    /// The iteration count is capped at [`OP_NORM_ITERATIONS`]; it stops early once the
    /// Rayleigh quotient stagnates, so the result is a deterministic function of `A`.
    pub fn op_norm(&self) -> R {
        let n = self.dim;
        if n == 1 {
            return self.data[0].norm();
        }
        let scale = self.max_abs();
        if scale.is_zero() {
            return R::zero();
        }
        let a = self.scale_real(scale.recip());
        let ah = a.adjoint();
        // Distinct, non-symmetric start entries avoid orthogonality to structured singular vectors.
        let mut v = StateVector::from_vec(
            (0..n)
                .map(|i| {
                    let k = R::count(i + 1);
                    Complex::new(R::one() + R::lit(0.3819660112501051) * k, R::lit(0.1) * k.sqrt())
                })
                .collect(),
        );
        v = v.normalized();
        let mut sigma2 = R::zero();
        for _ in 0..OP_NORM_ITERATIONS {
            let w = ah.mul_vec(&a.mul_vec(&v));
            let nw = w.norm();
            if nw.is_zero() {
                return R::zero();
            }
            let converged = (nw - sigma2).abs() <= R::epsilon() * nw;
            sigma2 = nw;
            v = w.scale_real(nw.recip());
            if converged {
                break;
            }
        }
        sigma2.sqrt() * scale
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> R {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| (*a - *b).norm()).fold(R::zero(), R::max)
    }

    /// Hermitian up to an absolute tolerance on entries.
    pub fn is_hermitian(&self, tol: R) -> bool {
        let n = self.dim;
        (0..n).all(|i| (i..n).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Converts to another scalar precision.
    pub fn cast<S: Real>(&self) -> ComplexMatrix<S> {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| Complex::new(S::lit(z.re.as_f64()), S::lit(z.im.as_f64()))).collect(),
        }
    }

    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            dim: self.dim,
            re: self.data.iter().map(|z| z.re.as_f64()).collect(),
            im: self.data.iter().map(|z| z.im.as_f64()).collect(),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        let n2 = json.dim * json.dim;
        if json.dim == 0 || json.re.len() != n2 {
            return Err(Error::Serialization(format!(
                "matrix of dim {} needs {} real parts, got {}",
                json.dim,
                n2,
                json.re.len()
            )));
        }
        if !json.im.is_empty() && json.im.len() != n2 {
            return Err(Error::Serialization(format!(
                "matrix of dim {} needs {} imaginary parts (or none), got {}",
                json.dim,
                n2,
                json.im.len()
            )));
        }
        let data = (0..n2)
            .map(|k| Complex::new(R::lit(json.re[k]), R::lit(json.im.get(k).copied().unwrap_or(0.0))))
            .collect();
        Self::from_vec(json.dim, data)
    }
}

/// Wire form of a matrix literal: `{"dim": n, "re": [...], "im": [...]}`, row-major.
///
/// `im` may be omitted (or empty) for real matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl<R: Real> Serialize for ComplexMatrix<R> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de, R: Real> Deserialize<'de> for ComplexMatrix<R> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let json = MatrixJson::deserialize(deserializer)?;
        Self::from_json(&json).map_err(serde::de::Error::custom)
    }
}

impl<R: Real> Index<(usize, usize)> for ComplexMatrix<R> {
    type Output = Complex<R>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex<R> {
        &self.data[i * self.dim + j]
    }
}

impl<R: Real> IndexMut<(usize, usize)> for ComplexMatrix<R> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<R> {
        &mut self.data[i * self.dim + j]
    }
}

impl<'a, R: Real> Add<&'a ComplexMatrix<R>> for &'a ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;
    fn add(self, rhs: &'a ComplexMatrix<R>) -> ComplexMatrix<R> {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl<'a, R: Real> Sub<&'a ComplexMatrix<R>> for &'a ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;
    fn sub(self, rhs: &'a ComplexMatrix<R>) -> ComplexMatrix<R> {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        ComplexMatrix { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

impl<'a, R: Real> Mul<&'a ComplexMatrix<R>> for &'a ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;
    fn mul(self, rhs: &'a ComplexMatrix<R>) -> ComplexMatrix<R> {
        self.matmul(rhs)
    }
}

impl<R: Real> Add for ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;
    fn add(mut self, rhs: Self) -> Self {
        self += &rhs;
        self
    }
}

impl<R: Real> Sub for ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;
    fn sub(mut self, rhs: Self) -> Self {
        self -= &rhs;
        self
    }
}

impl<R: Real> Mul for ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;
    fn mul(self, rhs: Self) -> Self {
        self.matmul(&rhs)
    }
}

impl<R: Real> Neg for ComplexMatrix<R> {
    type Output = ComplexMatrix<R>;
    fn neg(self) -> Self {
        ComplexMatrix { dim: self.dim, data: self.data.into_iter().map(|z| -z).collect() }
    }
}

impl<R: Real> AddAssign<&ComplexMatrix<R>> for ComplexMatrix<R> {
    fn add_assign(&mut self, rhs: &ComplexMatrix<R>) {
        assert_eq!(self.dim, rhs.dim, "add dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl<R: Real> SubAssign<&ComplexMatrix<R>> for ComplexMatrix<R> {
    fn sub_assign(&mut self, rhs: &ComplexMatrix<R>) {
        assert_eq!(self.dim, rhs.dim, "sub dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

/// Column state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<R> {
    data: Vec<Complex<R>>,
}

impl<R: Real> StateVector<R> {
    pub fn from_vec(data: Vec<Complex<R>>) -> Self {
        Self { data }
    }

    pub fn from_real(entries: &[R]) -> Self {
        Self { data: entries.iter().map(|&x| Complex::new(x, R::zero())).collect() }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { data: vec![Complex::zero(); dim] }
    }

    /// Standard basis vector `e_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[i] = Complex::one();
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[Complex<R>] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [Complex<R>] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn norm(&self) -> R {
        self.data.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale_real(n.recip())
    }

    /// `<self, other> = sum_i self_i * conj(other_i)`, linear in the first slot.
    pub fn inner(&self, other: &Self) -> Complex<R> {
        self.data.iter().zip(&other.data).fold(Complex::zero(), |acc, (&a, &b)| acc + a * b.conj())
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        Self { data: self.data.iter().map(|&z| z * c).collect() }
    }

    pub fn scale_real(&self, c: R) -> Self {
        Self { data: self.data.iter().map(|&z| z.scale(c)).collect() }
    }

    pub fn axpy(&mut self, c: Complex<R>, other: &Self) {
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> R {
        self.data.iter().zip(&other.data).map(|(a, b)| (*a - *b).norm()).fold(R::zero(), R::max)
    }
}

impl<R: Real> Index<usize> for StateVector<R> {
    type Output = Complex<R>;
    fn index(&self, i: usize) -> &Complex<R> {
        &self.data[i]
    }
}

impl<R: Real> IndexMut<usize> for StateVector<R> {
    fn index_mut(&mut self, i: usize) -> &mut Complex<R> {
        &mut self.data[i]
    }
}

impl<'a, R: Real> Add<&'a StateVector<R>> for &'a StateVector<R> {
    type Output = StateVector<R>;
    fn add(self, rhs: &'a StateVector<R>) -> StateVector<R> {
        StateVector { data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect() }
    }
}

impl<'a, R: Real> Sub<&'a StateVector<R>> for &'a StateVector<R> {
    type Output = StateVector<R>;
    fn sub(self, rhs: &'a StateVector<R>) -> StateVector<R> {
        StateVector { data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn product_and_adjoint() {
        let a = M::from_f64_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = M::from_f64_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ab = &a * &b;
        assert_eq!(ab, M::from_f64_rows(&[&[2.0, 1.0], &[4.0, 3.0]]));
        let c = a.scale(Complex::new(0.0, 1.0));
        assert_eq!(c.adjoint()[(0, 1)], Complex::new(0.0, -3.0));
    }

    #[test]
    fn op_norm_matches_known_values() {
        let d = M::diag_real(&[1.0, -3.0, 2.0]);
        assert!((d.op_norm() - 3.0).abs() < 1e-12);
        // [[1,1],[0,1]] has largest singular value golden ratio.
        let j = M::from_f64_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((j.op_norm() - phi).abs() < 1e-12);
        assert_eq!(M::zeros(3).op_norm(), 0.0);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let a = M::from_f64_rows(&[&[0.5, 1.0], &[-0.25, 0.1]]);
        let p = a.powi(5);
        let q = &(&(&(&a * &a) * &a) * &a) * &a;
        assert!(p.max_abs_diff(&q) < 1e-15);
    }

    #[test]
    fn json_round_trip_and_shape_check() {
        let a = M::from_fn(2, |i, j| Complex::new(i as f64, j as f64 - 0.5));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"dim":2,"re":[0.0,0.0,1.0,1.0],"im":[-0.5,0.5,-0.5,0.5]}"#);
        let back: M = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<M>(r#"{"dim":2,"re":[1,2,3]}"#).is_err());
        let real: M = serde_json::from_str(r#"{"dim":1,"re":[2.5]}"#).unwrap();
        assert_eq!(real[(0, 0)], Complex::new(2.5, 0.0));
    }

    #[test]
    fn rejects_non_finite_entries() {
        assert!(M::from_real(1, &[f64::NAN]).is_err());
        assert!(matches!(M::from_real(2, &[1.0]), Err(Error::NotSquare { len: 1 })));
    }

    #[test]
    fn inner_product_convention() {
        let x = StateVector::<f64>::from_vec(vec![Complex::new(0.0, 1.0), Complex::new(1.0, 0.0)]);
        let y = StateVector::<f64>::from_vec(vec![Complex::new(1.0, 0.0), Complex::new(0.0, 1.0)]);
        // <x, y> = i*1 + 1*(-i) = 0
        assert_eq!(x.inner(&y), Complex::new(0.0, 0.0));
        assert!((x.inner(&x).re - 2.0).abs() < 1e-15);
    }
}
