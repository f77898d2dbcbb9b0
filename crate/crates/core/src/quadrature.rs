//! Gauss–Legendre rules and nested simplex quadrature.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::Real;

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<R> {
    pub nodes: Vec<R>,
    pub weights: Vec<R>,
}

impl<R: Real> GaussLegendre<R> {
    /// `n`-point rule; nodes ascending. Roots are polished by Newton's method in `f64`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Gauss–Legendre needs at least one node".into()));
        }
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi's initial guess for the i-th largest root.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            nodes[i] = -x;
            weights[n - 1 - i] = w;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self {
            nodes: nodes.into_iter().map(R::lit).collect(),
            weights: weights.into_iter().map(R::lit).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[lo, hi]`.
    pub fn on_interval(&self, lo: R, hi: R) -> impl Iterator<Item = (R, R)> + '_ {
        let half = (hi - lo) * R::lit(0.5);
        let mid = (hi + lo) * R::lit(0.5);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }

    /// `∫_lo^hi f` for a scalar integrand.
    pub fn integrate(&self, lo: R, hi: R, mut f: impl FnMut(R) -> R) -> R {
        self.on_interval(lo, hi).map(|(x, w)| w * f(x)).sum()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integral of a matrix-valued `f(s₁, …, s_k)` over the simplex `lo < s_k < … < s₁ < hi`.
///
/// Each axis uses the same Gauss–Legendre rule mapped onto `[lo, s_{j-1}]`, so the cost is
/// `nodes^k` evaluations. Terms are accumulated in a fixed nested order.
pub fn simplex_integral<R: Real>(
    rule: &GaussLegendre<R>,
    k: usize,
    lo: R,
    hi: R,
    dim: usize,
    f: &mut dyn FnMut(&[R]) -> Result<ComplexMatrix<R>>,
) -> Result<ComplexMatrix<R>> {
    let mut acc = ComplexMatrix::zeros(dim);
    let mut point = vec![R::zero(); k];
    nest(rule, 0, lo, hi, R::one(), &mut point, &mut acc, f)?;
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn nest<R: Real>(
    rule: &GaussLegendre<R>,
    level: usize,
    lo: R,
    hi: R,
    weight: R,
    point: &mut Vec<R>,
    acc: &mut ComplexMatrix<R>,
    f: &mut dyn FnMut(&[R]) -> Result<ComplexMatrix<R>>,
) -> Result<()> {
    if level == point.len() {
        let v = f(point)?;
        acc.axpy_real(weight, &v);
        return Ok(());
    }
    for (x, w) in rule.on_interval(lo, hi) {
        point[level] = x;
        nest(rule, level + 1, lo, x, weight * w, point, acc, f)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_is_exact_for_polynomials() {
        let g = GaussLegendre::<f64>::new(8).unwrap();
        // degree 15 is the exactness limit for 8 nodes
        let v = g.integrate(0.0, 2.0, |x| x.powi(15));
        assert!((v - 2f64.powi(16) / 16.0).abs() < 1e-10);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn odd_rule_has_center_node() {
        let g = GaussLegendre::<f64>::new(5).unwrap();
        assert_eq!(g.nodes[2], 0.0);
        assert!((g.weights[2] - 128.0 / 225.0).abs() < 1e-15);
    }

    #[test]
    fn simplex_volume() {
        let g = GaussLegendre::<f64>::new(6).unwrap();
        let mut one = |_: &[f64]| Ok(ComplexMatrix::identity(1));
        let v = simplex_integral(&g, 3, 0.0, 2.0, 1, &mut one).unwrap();
        assert!((v[(0, 0)].re - 8.0 / 6.0).abs() < 1e-13);
    }
}
