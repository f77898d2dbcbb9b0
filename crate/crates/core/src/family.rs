//! Operator-valued families `t ↦ A(t)` on a compact interval.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

type EvalFn<R> = dyn Fn(R) -> Result<ComplexMatrix<R>> + Send + Sync;

/// Regularity declared by the family's constructor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuityClass {
    Constant,
    Smooth,
    Piecewise,
    Tabulated,
}

/// A generator family on `[a, b]` with a fixed matrix dimension.
#[derive(Clone)]
pub struct GeneratorFamily<R> {
    a: R,
    b: R,
    dim: usize,
    class: ContinuityClass,
    discontinuities: Vec<R>,
    eval: Arc<EvalFn<R>>,
}

impl<R: Real> fmt::Debug for GeneratorFamily<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorFamily")
            .field("a", &self.a)
            .field("b", &self.b)
            .field("dim", &self.dim)
            .field("class", &self.class)
            .field("discontinuities", &self.discontinuities)
            .finish()
    }
}

fn check_interval<R: Real>(a: R, b: R) -> Result<()> {
    if a.is_finite() && b.is_finite() && a < b {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("family interval needs a < b, got [{a}, {b}]")))
    }
}

impl<R: Real> GeneratorFamily<R> {
    /// Wraps a fallible evaluator.
    pub fn try_from_fn<F>(a: R, b: R, dim: usize, class: ContinuityClass, f: F) -> Result<Self>
    where
        F: Fn(R) -> Result<ComplexMatrix<R>> + Send + Sync + 'static,
    {
        check_interval(a, b)?;
        Ok(Self { a, b, dim, class, discontinuities: Vec::new(), eval: Arc::new(f) })
    }

    /// Wraps an infallible evaluator.
    pub fn from_fn<F>(a: R, b: R, dim: usize, class: ContinuityClass, f: F) -> Result<Self>
    where
        F: Fn(R) -> ComplexMatrix<R> + Send + Sync + 'static,
    {
        Self::try_from_fn(a, b, dim, class, move |t| Ok(f(t)))
    }

    pub fn constant(a: R, b: R, m: ComplexMatrix<R>) -> Result<Self> {
        m.ensure_finite("constant family")?;
        let dim = m.dim();
        Self::from_fn(a, b, dim, ContinuityClass::Constant, move |_| m.clone())
    }

    /// Right-continuous step family: `pieces[k]` on `[breaks[k-1], breaks[k])`.
    ///
    /// `breaks` are the interior jump points, strictly increasing inside `(a, b)`.
    pub fn piecewise_constant(a: R, b: R, breaks: Vec<R>, pieces: Vec<ComplexMatrix<R>>) -> Result<Self> {
        check_interval(a, b)?;
        if pieces.len() != breaks.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breaks need {} pieces, got {}",
                breaks.len(),
                breaks.len() + 1,
                pieces.len()
            )));
        }
        if breaks.iter().any(|&x| !(x > a && x < b)) || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("breaks must increase strictly inside (a, b)".into()));
        }
        let dim = pieces[0].dim();
        for p in &pieces {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
            }
            p.ensure_finite("piecewise family")?;
        }
        let table = breaks.clone();
        let mut fam = Self::from_fn(a, b, dim, ContinuityClass::Piecewise, move |t| {
            let k = table.partition_point(|&x| x <= t);
            pieces[k].clone()
        })?;
        fam.discontinuities = breaks;
        Ok(fam)
    }

    /// Piecewise-linear interpolation of samples at strictly increasing `times`.
    pub fn tabulated(times: Vec<R>, samples: Vec<ComplexMatrix<R>>) -> Result<Self> {
        if times.len() < 2 || times.len() != samples.len() {
            return Err(Error::InvalidArgument("tabulated family needs ≥ 2 matching times and samples".into()));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("tabulated times must increase strictly".into()));
        }
        let dim = samples[0].dim();
        for s in &samples {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.dim() });
            }
            s.ensure_finite("tabulated family")?;
        }
        let (a, b) = (times[0], times[times.len() - 1]);
        Self::from_fn(a, b, dim, ContinuityClass::Tabulated, move |t| {
            let k = times.partition_point(|&x| x <= t).clamp(1, times.len() - 1);
            let (t0, t1) = (times[k - 1], times[k]);
            let w = (t - t0) / (t1 - t0);
            let mut m = samples[k - 1].scale_real(R::one() - w);
            m.axpy_real(w, &samples[k]);
            m
        })
    }

    #[inline]
    pub fn a(&self) -> R {
        self.a
    }

    #[inline]
    pub fn b(&self) -> R {
        self.b
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn class(&self) -> ContinuityClass {
        self.class
    }

    pub fn discontinuities(&self) -> &[R] {
        &self.discontinuities
    }

    pub fn with_class(mut self, class: ContinuityClass) -> Self {
        self.class = class;
        self
    }

    pub fn with_discontinuities(mut self, mut points: Vec<R>) -> Self {
        points.sort_by(|x, y| x.partial_cmp(y).expect("finite discontinuities"));
        points.dedup();
        self.discontinuities = points;
        self
    }

    /// `A(t)`, checked for domain, shape and finiteness.
    pub fn eval(&self, t: R) -> Result<ComplexMatrix<R>> {
        if !(t >= self.a && t <= self.b) {
            return Err(Error::Evaluation {
                t: t.as_f64(),
                reason: format!("outside [{}, {}]", self.a, self.b),
            });
        }
        let m = (self.eval)(t).map_err(|e| match e {
            e @ Error::Evaluation { .. } => e,
            other => Error::Evaluation { t: t.as_f64(), reason: other.to_string() },
        })?;
        if m.dim() != self.dim {
            return Err(Error::Evaluation {
                t: t.as_f64(),
                reason: format!("dimension {} differs from declared {}", m.dim(), self.dim),
            });
        }
        if !m.is_finite() {
            return Err(Error::Evaluation { t: t.as_f64(), reason: "non-finite entries".into() });
        }
        Ok(m)
    }

    /// `c · A(t)`.
    pub fn scaled(&self, c: R) -> Self {
        self.scaled_complex(Complex::new(c, R::zero()))
    }

    /// `c · A(t)` for a complex factor.
    pub fn scaled_complex(&self, c: Complex<R>) -> Self {
        let inner = self.eval.clone();
        Self {
            eval: Arc::new(move |t| Ok(inner(t)?.scale(c))),
            ..self.clone()
        }
    }

    /// Pointwise sum on the common interval.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        if self.a != other.a || self.b != other.b {
            return Err(Error::InvalidArgument(format!(
                "families live on [{}, {}] and [{}, {}]",
                self.a, self.b, other.a, other.b
            )));
        }
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let class = match (self.class, other.class) {
            (ContinuityClass::Constant, ContinuityClass::Constant) => ContinuityClass::Constant,
            (ContinuityClass::Piecewise, _) | (_, ContinuityClass::Piecewise) => ContinuityClass::Piecewise,
            (ContinuityClass::Tabulated, _) | (_, ContinuityClass::Tabulated) => ContinuityClass::Tabulated,
            _ => ContinuityClass::Smooth,
        };
        let mut disc = self.discontinuities.clone();
        disc.extend_from_slice(&other.discontinuities);
        Ok(Self {
            a: self.a,
            b: self.b,
            dim: self.dim,
            class,
            discontinuities: Vec::new(),
            eval: Arc::new(move |t| Ok(&f(t)? + &g(t)?)),
        }
        .with_discontinuities(disc))
    }

    /// Applies a fallible matrix map to every value, keeping interval and class.
    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(R, ComplexMatrix<R>) -> Result<ComplexMatrix<R>> + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        Self {
            eval: Arc::new(move |t| f(t, inner(t)?)),
            ..self.clone()
        }
    }

    /// Zero family of the same shape and interval.
    pub fn zero_like(&self) -> Self {
        let dim = self.dim;
        Self::from_fn(self.a, self.b, dim, ContinuityClass::Constant, move |_| ComplexMatrix::zeros(dim))
            .expect("interval already validated")
    }

    /// Largest commutator norm `‖[A(s), A(s')]‖` over `samples` equispaced points (all pairs),
    /// relative to `max(1, ‖A(s)‖‖A(s')‖)`.
    pub fn commutativity_defect(&self, samples: usize) -> Result<R> {
        let n = samples.max(2);
        let pts: Vec<ComplexMatrix<R>> = (0..n)
            .map(|k| self.eval(self.a + (self.b - self.a) * R::count(k) / R::count(n - 1)))
            .collect::<Result<_>>()?;
        let norms: Vec<R> = pts.iter().map(|m| m.op_norm()).collect();
        let mut worst = R::zero();
        for i in 0..n {
            for j in i + 1..n {
                let c = pts[i].commutator(&pts[j]).op_norm();
                worst = worst.max(c / (norms[i] * norms[j]).max(R::one()));
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    #[test]
    fn piecewise_is_right_continuous() {
        let f = GeneratorFamily::piecewise_constant(
            0.0,
            1.0,
            vec![0.5],
            vec![M::diag_real(&[1.0]), M::diag_real(&[2.0])],
        )
        .unwrap();
        assert_eq!(f.eval(0.25).unwrap()[(0, 0)].re, 1.0);
        assert_eq!(f.eval(0.5).unwrap()[(0, 0)].re, 2.0);
        assert_eq!(f.eval(1.0).unwrap()[(0, 0)].re, 2.0);
        assert_eq!(f.discontinuities(), &[0.5]);
    }

    #[test]
    fn evaluation_outside_interval_names_time() {
        let f = GeneratorFamily::constant(0.0, 1.0, M::identity(2)).unwrap();
        match f.eval(1.5) {
            Err(Error::Evaluation { t, .. }) => assert_eq!(t, 1.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tabulated_interpolates_linearly() {
        let f = GeneratorFamily::tabulated(vec![0.0, 1.0, 3.0], vec![M::diag_real(&[0.0]), M::diag_real(&[2.0]), M::diag_real(&[0.0])])
            .unwrap();
        assert!((f.eval(0.5).unwrap()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((f.eval(2.0).unwrap()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert_eq!(f.eval(3.0).unwrap()[(0, 0)].re, 0.0);
    }

    #[test]
    fn non_finite_values_are_rejected() {
        let f = GeneratorFamily::from_fn(0.0, 1.0, 1, ContinuityClass::Smooth, |t: f64| M::diag_real(&[1.0 / t])).unwrap();
        assert!(matches!(f.eval(0.0), Err(Error::Evaluation { .. })));
        assert!(f.eval(0.5).is_ok());
    }
}
