//! Henstock–Kurzweil integration of matrix-valued families.
//!
//! A gauge `δ` on `[a, b]` decides how fine a tagged partition must be around each tag.
//! [`cousin`] builds a δ-fine partition by midpoint bisection and [`hk_integrate`] drives a
//! halving sequence of constant gauges until successive Riemann sums agree.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::family::GeneratorFamily;
use crate::matrix::{ComplexMatrix, StateVector};
use crate::scalar::Real;

/// Default bisection depth for [`cousin`].
pub const DEFAULT_MAX_DEPTH: usize = 40;

/// A strictly positive function on `[a, b]`.
#[derive(Clone)]
pub struct Gauge<R> {
    a: R,
    b: R,
    delta: Arc<dyn Fn(R) -> R + Send + Sync>,
}

impl<R: Real> fmt::Debug for Gauge<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gauge").field("a", &self.a).field("b", &self.b).finish_non_exhaustive()
    }
}

impl<R: Real> Gauge<R> {
    pub fn new<F>(a: R, b: R, delta: F) -> Result<Self>
    where
        F: Fn(R) -> R + Send + Sync + 'static,
    {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidArgument(format!("gauge interval needs a < b, got [{a}, {b}]")));
        }
        Ok(Self { a, b, delta: Arc::new(delta) })
    }

    pub fn constant(a: R, b: R, delta: R) -> Result<Self> {
        Self::new(a, b, move |_| delta)
    }

    pub fn a(&self) -> R {
        self.a
    }

    pub fn b(&self) -> R {
        self.b
    }

    /// `δ(t)`, failing if the value is not a positive finite number.
    pub fn delta(&self, t: R) -> Result<R> {
        let d = (self.delta)(t);
        if d > R::zero() && d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Domain(format!("gauge value δ({t}) = {d} is not positive")))
        }
    }

    /// `δ / 2`.
    pub fn halved(&self) -> Self {
        let inner = self.delta.clone();
        let half = R::lit(0.5);
        Self { a: self.a, b: self.b, delta: Arc::new(move |t| inner(t) * half) }
    }
}

/// Endpoints `t₀ < … < tₙ` with tags `t_{i−1} ≤ τᵢ ≤ tᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaggedPartition<R> {
    points: Vec<R>,
    tags: Vec<R>,
}

impl<R: Real> TaggedPartition<R> {
    pub fn new(points: Vec<R>, tags: Vec<R>) -> Result<Self> {
        if points.len() < 2 || tags.len() + 1 != points.len() {
            return Err(Error::InvalidArgument(format!(
                "partition with {} points needs {} tags, got {}",
                points.len(),
                points.len().saturating_sub(1),
                tags.len()
            )));
        }
        if points.iter().chain(&tags).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { context: "partition".into() });
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidArgument("partition points must increase strictly".into()));
        }
        for (i, &tau) in tags.iter().enumerate() {
            if !(points[i] <= tau && tau <= points[i + 1]) {
                return Err(Error::InvalidArgument(format!(
                    "tag {tau} outside [{}, {}]",
                    points[i],
                    points[i + 1]
                )));
            }
        }
        Ok(Self { points, tags })
    }

    /// `n` equal subintervals of `[a, b]` with midpoint tags.
    pub fn uniform(a: R, b: R, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("uniform partition needs n ≥ 1".into()));
        }
        let h = (b - a) / R::count(n);
        let mut points: Vec<R> = (0..=n).map(|k| a + h * R::count(k)).collect();
        points[n] = b;
        let tags = points.windows(2).map(|w| (w[0] + w[1]) * R::lit(0.5)).collect();
        Self::new(points, tags)
    }

    pub fn points(&self) -> &[R] {
        &self.points
    }

    pub fn tags(&self) -> &[R] {
        &self.tags
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn a(&self) -> R {
        self.points[0]
    }

    pub fn b(&self) -> R {
        self.points[self.points.len() - 1]
    }

    /// Largest subinterval length, recomputed from the endpoints.
    pub fn mesh(&self) -> R {
        self.points.windows(2).map(|w| w[1] - w[0]).fold(R::zero(), R::max)
    }

    /// `(t_{i−1}, τᵢ, tᵢ)` triples.
    pub fn cells(&self) -> impl Iterator<Item = (R, R, R)> + '_ {
        self.points.windows(2).zip(&self.tags).map(|(w, &tau)| (w[0], tau, w[1]))
    }
}

fn accepted<R: Real>(u: R, tau: R, v: R, delta: R) -> bool {
    u > tau - delta && v < tau + delta
}

/// δ-fineness: both endpoints of every cell lie in `(τ − δ(τ), τ + δ(τ))`.
///
/// A gauge failing to produce a positive value counts as not fine.
pub fn is_fine<R: Real>(p: &TaggedPartition<R>, g: &Gauge<R>) -> bool {
    p.cells().all(|(u, tau, v)| matches!(g.delta(tau), Ok(d) if accepted(u, tau, v, d)))
}

/// Constructive Cousin lemma by midpoint bisection.
pub fn cousin<R: Real>(g: &Gauge<R>, max_depth: usize) -> Result<TaggedPartition<R>> {
    cousin_with_breaks(g, &[], max_depth)
}

/// Like [`cousin`], but every point of `breaks` inside `(a, b)` is forced to be a partition point.
pub fn cousin_with_breaks<R: Real>(g: &Gauge<R>, breaks: &[R], max_depth: usize) -> Result<TaggedPartition<R>> {
    let mut anchors = vec![g.a];
    anchors.extend(breaks.iter().copied().filter(|&x| x > g.a && x < g.b));
    anchors.push(g.b);
    anchors.sort_by(|x, y| x.partial_cmp(y).expect("finite breaks"));
    anchors.dedup();

    let mut points = vec![g.a];
    let mut tags = Vec::new();
    let half = R::lit(0.5);
    for w in anchors.windows(2) {
        // Depth-first, left half first, so cells come out in order.
        let mut stack = vec![(w[0], w[1], 0usize)];
        while let Some((u, v, depth)) = stack.pop() {
            let tau = (u + v) * half;
            let d = g.delta(tau)?;
            if accepted(u, tau, v, d) {
                tags.push(tau);
                points.push(v);
            } else if depth >= max_depth || !(u < tau && tau < v) {
                return Err(Error::DepthExhausted { lo: u.as_f64(), hi: v.as_f64(), depth });
            } else {
                stack.push((tau, v, depth + 1));
                stack.push((u, tau, depth + 1));
            }
        }
    }
    let p = TaggedPartition::new(points, tags)?;
    debug_assert!(is_fine(&p, g));
    Ok(p)
}

/// Shifts tags that sit on a declared discontinuity by `1e-13 (b − a)` toward the cell centre.
fn nudged_tag<R: Real>(f: &GeneratorFamily<R>, u: R, tau: R, v: R) -> R {
    if !f.discontinuities().iter().any(|&d| d == tau) {
        return tau;
    }
    let eps = R::lit(1e-13) * (f.b() - f.a());
    let mid = (u + v) * R::lit(0.5);
    if tau < mid {
        (tau + eps).min(v)
    } else {
        (tau - eps).max(u)
    }
}

/// `Σᵢ Δtᵢ F(τᵢ)`, summed in index order.
pub fn riemann_sum<R: Real>(f: &GeneratorFamily<R>, p: &TaggedPartition<R>) -> Result<ComplexMatrix<R>> {
    let mut acc = ComplexMatrix::zeros(f.dim());
    for (u, tau, v) in p.cells() {
        let m = f.eval(nudged_tag(f, u, tau, v))?;
        acc.axpy_real(v - u, &m);
    }
    Ok(acc)
}

/// Outcome of [`hk_integrate`].
#[derive(Debug, Clone)]
pub struct GaugeIntegralResult<R> {
    pub value: ComplexMatrix<R>,
    pub partitions_used: usize,
    pub final_mesh: R,
    /// Operator norm of the difference between the last two Riemann sums.
    pub est_error: R,
}

/// Controls for [`hk_integrate_with`].
#[derive(Debug, Clone, Copy)]
pub struct HkOptions {
    /// Number of gauges tried before giving up.
    pub max_iterations: usize,
    pub max_depth: usize,
}

impl Default for HkOptions {
    fn default() -> Self {
        Self { max_iterations: 22, max_depth: DEFAULT_MAX_DEPTH }
    }
}

/// Gauge integral `∫_a^b F` with default options.
pub fn hk_integrate<R: Real>(f: &GeneratorFamily<R>, a: R, b: R, tol: R) -> Result<GaugeIntegralResult<R>> {
    hk_integrate_with(f, a, b, tol, &HkOptions::default())
}

/// Gauge integral `∫_a^b F`.
///
/// Starts from `δ₀ ≡ (b − a)/4` and halves the gauge until two successive Riemann sums
/// differ by less than `tol` in operator norm. Declared discontinuities are forced to be
/// partition points, which makes step families integrate exactly.
pub fn hk_integrate_with<R: Real>(
    f: &GeneratorFamily<R>,
    a: R,
    b: R,
    tol: R,
    opts: &HkOptions,
) -> Result<GaugeIntegralResult<R>> {
    if !(tol > R::zero()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if a == b {
        return Ok(GaugeIntegralResult {
            value: ComplexMatrix::zeros(f.dim()),
            partitions_used: 0,
            final_mesh: R::zero(),
            est_error: R::zero(),
        });
    }
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("integration needs a < b, got [{a}, {b}]")));
    }
    let mut gauge = Gauge::constant(a, b, (b - a) * R::lit(0.25))?;
    let mut previous: Option<ComplexMatrix<R>> = None;
    let mut history = Vec::new();
    for iter in 0..opts.max_iterations {
        let p = cousin_with_breaks(&gauge, f.discontinuities(), opts.max_depth)?;
        let sum = riemann_sum(f, &p)?;
        if let Some(prev) = previous.take() {
            let diff = (&sum - &prev).op_norm();
            history.push(diff.as_f64());
            if diff < tol {
                return Ok(GaugeIntegralResult {
                    value: sum,
                    partitions_used: iter + 1,
                    final_mesh: p.mesh(),
                    est_error: diff,
                });
            }
        }
        previous = Some(sum);
        gauge = gauge.halved();
    }
    Err(Error::NonConvergence { iterations: opts.max_iterations, history })
}

/// `Σₖ Δtₖ ‖A(τₖ)x − ⟨A(τₖ)x, x⟩x‖²` for a unit vector `x`.
pub fn strong_continuity_defect<R: Real>(
    f: &GeneratorFamily<R>,
    x: &StateVector<R>,
    p: &TaggedPartition<R>,
) -> Result<R> {
    if x.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.dim() });
    }
    let mut acc = R::zero();
    for (u, tau, v) in p.cells() {
        let ax = f.eval(tau)?.mul_vec(x);
        let c: Complex<R> = ax.inner(x);
        let mut r = ax;
        r.axpy(-c, x);
        let n = r.norm();
        acc += (v - u) * n * n;
    }
    Ok(acc)
}
