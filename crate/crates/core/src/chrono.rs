//! Finite time-ordered operator algebra.
//!
//! An expression is a formal sum of weighted words; each word holds at most one matrix
//! per time tag, stored in ascending time. Factors at distinct times commute by
//! construction, and [`TimeOrderedExpr::disentangle`] turns a word back into an ordinary
//! product with the latest factor leftmost.

use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::expm;
use crate::matrix::{ComplexMatrix, MatrixJson};
use crate::quadrature::{simplex_integral, GaussLegendre};
use crate::scalar::Real;

/// A matrix acting at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFactor<R> {
    pub time: R,
    pub matrix: ComplexMatrix<R>,
}

/// `coeff · ∏ factors`, factors sorted by ascending time with unique times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeOrderedTerm<R> {
    pub coeff: Complex<R>,
    pub factors: Vec<TimeFactor<R>>,
}

/// Formal sum of time-ordered terms over a fixed time domain `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeOrderedExpr<R> {
    dim: usize,
    domain: (R, R),
    terms: Vec<TimeOrderedTerm<R>>,
}

fn positive_zero<R: Real>(x: R) -> R {
    if x.is_zero() {
        R::zero()
    } else {
        x
    }
}

fn clean_complex<R: Real>(z: Complex<R>) -> Complex<R> {
    Complex::new(positive_zero(z.re), positive_zero(z.im))
}

fn clean_matrix<R: Real>(m: &ComplexMatrix<R>) -> ComplexMatrix<R> {
    let mut out = m.clone();
    for z in out.as_mut_slice() {
        *z = clean_complex(*z);
    }
    out
}

fn cmp_complex<R: Real>(x: &Complex<R>, y: &Complex<R>) -> Ordering {
    x.re.partial_cmp(&y.re).unwrap_or(Ordering::Equal).then(x.im.partial_cmp(&y.im).unwrap_or(Ordering::Equal))
}

fn cmp_words<R: Real>(x: &[TimeFactor<R>], y: &[TimeFactor<R>]) -> Ordering {
    x.len().cmp(&y.len()).then_with(|| {
        for (f, g) in x.iter().zip(y) {
            let o = f.time.partial_cmp(&g.time).unwrap_or(Ordering::Equal);
            if o != Ordering::Equal {
                return o;
            }
            for (a, b) in f.matrix.as_slice().iter().zip(g.matrix.as_slice()) {
                let o = cmp_complex(a, b);
                if o != Ordering::Equal {
                    return o;
                }
            }
        }
        Ordering::Equal
    })
}

fn same_word<R: Real>(x: &[TimeFactor<R>], y: &[TimeFactor<R>]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(f, g)| f.time == g.time && f.matrix == g.matrix)
}

/// Merges two ascending words; equal-time factors multiply as `x`-factor then `y`-factor.
fn merge_words<R: Real>(x: &[TimeFactor<R>], y: &[TimeFactor<R>]) -> Vec<TimeFactor<R>> {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        if j == y.len() || (i < x.len() && x[i].time < y[j].time) {
            out.push(x[i].clone());
            i += 1;
        } else if i == x.len() || y[j].time < x[i].time {
            out.push(y[j].clone());
            j += 1;
        } else {
            out.push(TimeFactor { time: x[i].time, matrix: x[i].matrix.matmul(&y[j].matrix) });
            i += 1;
            j += 1;
        }
    }
    out
}

impl<R: Real> TimeOrderedExpr<R> {
    fn check_domain(domain: (R, R)) -> Result<()> {
        if domain.0.is_finite() && domain.1.is_finite() && domain.0 <= domain.1 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("time domain [{}, {}] is invalid", domain.0, domain.1)))
        }
    }

    fn check_time(&self, t: R) -> Result<()> {
        if t >= self.domain.0 && t <= self.domain.1 {
            Ok(())
        } else {
            Err(Error::Domain(format!("time {t} outside [{}, {}]", self.domain.0, self.domain.1)))
        }
    }

    /// The empty sum.
    pub fn zero(dim: usize, domain: (R, R)) -> Result<Self> {
        Self::check_domain(domain)?;
        Ok(Self { dim, domain, terms: Vec::new() })
    }

    /// The unit: one term with coefficient 1 and no factors.
    pub fn identity(dim: usize, domain: (R, R)) -> Result<Self> {
        let mut e = Self::zero(dim, domain)?;
        e.terms.push(TimeOrderedTerm { coeff: Complex::one(), factors: Vec::new() });
        Ok(e)
    }

    /// `A` placed at time `t`.
    pub fn lift(domain: (R, R), t: R, a: &ComplexMatrix<R>) -> Result<Self> {
        let mut e = Self::zero(a.dim(), domain)?;
        e.check_time(t)?;
        a.ensure_finite("lifted matrix")?;
        e.terms.push(TimeOrderedTerm { coeff: Complex::one(), factors: vec![TimeFactor { time: t, matrix: a.clone() }] });
        Ok(e.canonical())
    }

    /// Builds an expression from raw terms; factors are sorted and equal times merged in list order.
    pub fn from_terms(dim: usize, domain: (R, R), terms: Vec<TimeOrderedTerm<R>>) -> Result<Self> {
        let mut e = Self::zero(dim, domain)?;
        for term in terms {
            let mut word: Vec<TimeFactor<R>> = Vec::new();
            for f in term.factors {
                if f.matrix.dim() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: f.matrix.dim() });
                }
                e.check_time(f.time)?;
                f.matrix.ensure_finite("factor matrix")?;
                word = merge_words(&word, &[f]);
            }
            e.terms.push(TimeOrderedTerm { coeff: term.coeff, factors: word });
        }
        Ok(e.canonical())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> (R, R) {
        self.domain
    }

    pub fn terms(&self) -> &[TimeOrderedTerm<R>] {
        &self.terms
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: other.dim });
        }
        if self.domain != other.domain {
            return Err(Error::Domain(format!(
                "time domains [{}, {}] and [{}, {}] differ",
                self.domain.0, self.domain.1, other.domain.0, other.domain.1
            )));
        }
        Ok(())
    }

    /// Canonical form: identity factors dropped, like words combined, zero terms dropped,
    /// signed zeros normalized, terms sorted.
    fn canonical(mut self) -> Self {
        let id = ComplexMatrix::identity(self.dim);
        let mut terms: Vec<TimeOrderedTerm<R>> = Vec::with_capacity(self.terms.len());
        for mut t in self.terms.drain(..) {
            t.factors.retain(|f| f.matrix != id);
            for f in &mut t.factors {
                f.matrix = clean_matrix(&f.matrix);
                f.time = positive_zero(f.time);
            }
            terms.push(t);
        }
        terms.sort_by(|x, y| cmp_words(&x.factors, &y.factors));
        let mut merged: Vec<TimeOrderedTerm<R>> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if same_word(&last.factors, &t.factors) => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero() && t.factors.iter().all(|f| !f.matrix.as_slice().iter().all(|z| z.is_zero())));
        for t in &mut merged {
            t.coeff = clean_complex(t.coeff);
        }
        self.terms = merged;
        self
    }

    /// Product `X · Y`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for x in &self.terms {
            for y in &other.terms {
                terms.push(TimeOrderedTerm { coeff: x.coeff * y.coeff, factors: merge_words(&x.factors, &y.factors) });
            }
        }
        Ok(Self { dim: self.dim, domain: self.domain, terms }.canonical())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(Self { dim: self.dim, domain: self.domain, terms }.canonical())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-Complex::<R>::one()))
    }

    pub fn scale(&self, c: Complex<R>) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| TimeOrderedTerm { coeff: t.coeff * c, factors: t.factors.clone() })
            .collect();
        Self { dim: self.dim, domain: self.domain, terms }.canonical()
    }

    /// Exchange `E[t, t2]`: swaps the time tags `t ↔ t2` on every factor.
    pub fn exchange(&self, t: R, t2: R) -> Result<Self> {
        self.check_time(t)?;
        self.check_time(t2)?;
        let terms = self
            .terms
            .iter()
            .map(|term| {
                let mut factors: Vec<TimeFactor<R>> = term
                    .factors
                    .iter()
                    .map(|f| {
                        let time = if f.time == t {
                            t2
                        } else if f.time == t2 {
                            t
                        } else {
                            f.time
                        };
                        TimeFactor { time, matrix: f.matrix.clone() }
                    })
                    .collect();
                factors.sort_by(|x, y| x.time.partial_cmp(&y.time).expect("finite times"));
                TimeOrderedTerm { coeff: term.coeff, factors }
            })
            .collect();
        Ok(Self { dim: self.dim, domain: self.domain, terms }.canonical())
    }

    /// `dT`: each word multiplied with the latest time leftmost, weighted and summed.
    pub fn disentangle(&self) -> ComplexMatrix<R> {
        let mut acc = ComplexMatrix::zeros(self.dim);
        for term in &self.terms {
            let mut p = ComplexMatrix::identity(self.dim);
            for f in term.factors.iter().rev() {
                p = p.matmul(&f.matrix);
            }
            acc.axpy(term.coeff, &p);
        }
        acc
    }

    /// Sorted set of times carried by any factor.
    pub fn times(&self) -> Vec<R> {
        let mut ts: Vec<R> = self.terms.iter().flat_map(|t| t.factors.iter().map(|f| f.time)).collect();
        ts.sort_by(|x, y| x.partial_cmp(y).expect("finite times"));
        ts.dedup();
        ts
    }

    pub fn to_json(&self) -> ExprJson {
        ExprJson {
            dim: self.dim,
            domain: Some([self.domain.0.as_f64(), self.domain.1.as_f64()]),
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    coeff: [t.coeff.re.as_f64(), t.coeff.im.as_f64()],
                    factors: t.factors.iter().map(|f| FactorJson { t: f.time.as_f64(), matrix: f.matrix.to_json() }).collect(),
                })
                .collect(),
        }
    }

    /// Parses the wire form; a missing domain defaults to the hull of the factor times.
    pub fn from_json(json: &ExprJson) -> Result<Self> {
        let times = json.terms.iter().flat_map(|t| t.factors.iter().map(|f| f.t));
        let domain = match json.domain {
            Some([a, b]) => (a, b),
            None => times.fold((0.0f64, 0.0f64), |(lo, hi), t| (lo.min(t), hi.max(t))),
        };
        let terms = json
            .terms
            .iter()
            .map(|t| {
                Ok(TimeOrderedTerm {
                    coeff: Complex::new(R::lit(t.coeff[0]), R::lit(t.coeff[1])),
                    factors: t
                        .factors
                        .iter()
                        .map(|f| Ok(TimeFactor { time: R::lit(f.t), matrix: ComplexMatrix::from_json(&f.matrix)? }))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Self::from_terms(json.dim, (R::lit(domain.0), R::lit(domain.1)), terms)
    }
}

/// Wire form of a time-ordered expression.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExprJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: [f64; 2],
    pub factors: Vec<FactorJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorJson {
    pub t: f64,
    pub matrix: MatrixJson,
}

/// Value of a truncated expansional with a quadrature error estimate.
#[derive(Debug, Clone)]
pub struct ExpansionalResult<R> {
    pub value: ComplexMatrix<R>,
    /// Difference to the same sum evaluated with half the nodes per axis.
    pub est_error: R,
}

/// Highest order accepted by [`expansional_expand`].
pub const MAX_EXPANSIONAL_ORDER: usize = 3;

/// `e^{A+B}` expanded to `order` in `B`:
/// `Σ_{k ≤ order} ∫_{0<s_k<…<s₁<1} e^{(1−s₁)A} B e^{(s₁−s₂)A} B ⋯ B e^{s_k A} ds`.
pub fn expansional_expand<R: Real>(
    a: &ComplexMatrix<R>,
    b: &ComplexMatrix<R>,
    order: usize,
    quad_nodes: usize,
) -> Result<ExpansionalResult<R>> {
    a.ensure_same_dim(b)?;
    if order > MAX_EXPANSIONAL_ORDER {
        return Err(Error::InvalidArgument(format!("expansional order {order} exceeds {MAX_EXPANSIONAL_ORDER}")));
    }
    if quad_nodes < 8 {
        return Err(Error::InvalidArgument(format!("expansional needs ≥ 8 nodes, got {quad_nodes}")));
    }
    let fine = expansional_sum(a, b, order, quad_nodes)?;
    let coarse = expansional_sum(a, b, order, quad_nodes.div_ceil(2))?;
    let est_error = (&fine - &coarse).op_norm();
    Ok(ExpansionalResult { value: fine, est_error })
}

fn expansional_sum<R: Real>(a: &ComplexMatrix<R>, b: &ComplexMatrix<R>, order: usize, nodes: usize) -> Result<ComplexMatrix<R>> {
    let mut total = expm(a)?;
    if order == 0 || b.max_abs().is_zero() {
        return Ok(total);
    }
    let rule = GaussLegendre::new(nodes)?;
    let dim = a.dim();
    for k in 1..=order {
        let mut integrand = |s: &[R]| -> Result<ComplexMatrix<R>> {
            // s[0] = s₁ > s[1] > … > s[k−1]
            let mut p = expm(&a.scale_real(R::one() - s[0]))?;
            for j in 0..k {
                let next = if j + 1 < k { s[j + 1] } else { R::zero() };
                p = p.matmul(b).matmul(&expm(&a.scale_real(s[j] - next))?);
            }
            Ok(p)
        };
        let term = simplex_integral(&rule, k, R::zero(), R::one(), dim, &mut integrand)?;
        total += &term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;
    type X = TimeOrderedExpr<f64>;

    const D: (f64, f64) = (0.0, 1.0);

    fn ab() -> (M, M) {
        (
            M::from_f64_rows(&[&[1.0, 2.0], &[0.0, -1.0]]),
            M::from_f64_rows(&[&[0.0, 1.0], &[3.0, 0.5]]),
        )
    }

    #[test]
    fn distinct_times_commute() {
        let (a, b) = ab();
        let x = X::lift(D, 0.3, &a).unwrap();
        let y = X::lift(D, 0.7, &b).unwrap();
        assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
    }

    #[test]
    fn equal_times_keep_operand_order() {
        let (a, b) = ab();
        let x = X::lift(D, 0.5, &a).unwrap();
        let y = X::lift(D, 0.5, &b).unwrap();
        assert_eq!(x.mul(&y).unwrap().disentangle(), a.matmul(&b));
        assert_eq!(y.mul(&x).unwrap().disentangle(), b.matmul(&a));
    }

    #[test]
    fn lift_identity_is_unit_and_domain_checked() {
        let (a, _) = ab();
        let x = X::lift(D, 0.2, &a).unwrap();
        let e = X::lift(D, 0.9, &M::identity(2)).unwrap();
        assert_eq!(x.mul(&e).unwrap(), x);
        assert!(matches!(X::lift(D, 1.5, &a), Err(Error::Domain(_))));
    }

    #[test]
    fn like_terms_combine_and_cancel() {
        let (a, _) = ab();
        let x = X::lift(D, 0.2, &a).unwrap();
        assert!(x.sub(&x).unwrap().terms().is_empty());
        let two = x.add(&x).unwrap();
        assert_eq!(two.terms().len(), 1);
        assert_eq!(two.terms()[0].coeff, Complex::new(2.0, 0.0));
    }

    #[test]
    fn json_round_trip() {
        let (a, b) = ab();
        let x = X::lift(D, 0.25, &a).unwrap().mul(&X::lift(D, 0.75, &b).unwrap()).unwrap();
        let s = serde_json::to_string(&x.to_json()).unwrap();
        let back = X::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn expansional_trivial_orders() {
        let (a, b) = ab();
        let a = a.scale_real(0.3);
        let e = expm(&a).unwrap();
        assert_eq!(expansional_expand(&a, &b, 0, 8).unwrap().value, e);
        assert_eq!(expansional_expand(&a, &M::zeros(2), 3, 8).unwrap().value, e);
        assert!(expansional_expand(&a, &b, 4, 8).is_err());
        assert!(expansional_expand(&a, &b, 1, 4).is_err());
    }
}
