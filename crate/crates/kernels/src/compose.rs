use crate::{Grid1D, KernelError, KernelFunction, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposeOptions {
    /// Probe points x, y are taken from |x| ≤ interior·L so the z-integral is not cut off.
    pub interior: f64,
    /// Upper bound on probe points per axis; the grid is strided to meet it.
    pub max_probes: usize,
    /// Number of window strengths ε₀, 2ε₀, … used to extrapolate the window away.
    pub window_nodes: usize,
    /// The weakest window is e^{−edge_damping} at the distance (1 − interior)·L.
    pub edge_damping: f64,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        Self { interior: 0.25, max_probes: 33, window_nodes: 4, edge_damping: 20.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositionReport {
    /// max |∫K(x,t;z,τ)K(z,τ;y,s)dz − K(x,t;y,s)| over the probes
    pub defect: f64,
    /// Same with the weakest window and no extrapolation.
    pub raw_defect: f64,
    /// max |Q_{ε₀} − Q_0| for oscillatory kernels, None otherwise.
    pub window_bias: Option<f64>,
    pub probes: usize,
    pub interior_half_width: f64,
}

/// Lagrange weights for extrapolating values at ε = k ε₀ (k = 1..=n) to ε = 0.
fn extrapolation_weights(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| (1..=n).filter(|&j| j != k).map(|j| j as f64 / (j as f64 - k as f64)).product())
        .collect()
}

pub fn compose(kernel: &KernelFunction, t: f64, tau: f64, s: f64, grid: &Grid1D) -> Result<CompositionReport> {
    compose_with(kernel, t, tau, s, grid, &ComposeOptions::default())
}

/// Reproducing-property defect of a one-dimensional kernel with trapezoid weights in z.
///
/// Oscillatory kernels get a Gaussian window e^{−ε(z − z_c)²} centred on the straight
/// line z_c = y + (x − y)(τ − s)/(t − s). The quadrature is repeated for several ε and
/// extrapolated to ε = 0; the removed window bias is reported alongside.
pub fn compose_with(
    kernel: &KernelFunction,
    t: f64,
    tau: f64,
    s: f64,
    grid: &Grid1D,
    opts: &ComposeOptions,
) -> Result<CompositionReport> {
    if matches!(kernel, KernelFunction::SqrtRelativistic { .. }) {
        return Err(KernelError::Domain("compose works on one-dimensional kernels; the square-root kernel lives in ℝ³".into()));
    }
    if kernel.is_one_sided() && !(s < tau && tau < t) {
        return Err(KernelError::Domain(format!("one-sided kernel needs s < τ < t (s={s}, τ={tau}, t={t})")));
    }
    if !(opts.interior > 0.0 && opts.interior < 1.0) || opts.max_probes == 0 || opts.window_nodes == 0 {
        return Err(KernelError::Domain("compose options out of range".into()));
    }
    for (a, b) in [(t, tau), (tau, s), (t, s)] {
        kernel.eval1(0.0, a, 0.0, b)?;
    }

    let pts = grid.points();
    let w = grid.trapezoid_weights();
    let half = grid.half_width();
    let inner = opts.interior * half;
    let candidates: Vec<f64> = pts.iter().copied().filter(|x| x.abs() <= inner + 1e-12 * half).collect();
    if candidates.is_empty() {
        return Err(KernelError::Domain("no grid points inside the probe region".into()));
    }
    let stride = candidates.len().div_ceil(opts.max_probes);
    let probes: Vec<f64> = candidates.iter().copied().step_by(stride).collect();

    let left: Vec<Vec<C64>> = probes
        .iter()
        .map(|&x| pts.iter().zip(&w).map(|(&z, &wz)| kernel.eval1(x, t, z, tau).map(|k| k * wz)).collect())
        .collect::<Result<_>>()?;
    let right: Vec<Vec<C64>> = probes
        .iter()
        .map(|&y| pts.iter().map(|&z| kernel.eval1(z, tau, y, s)).collect())
        .collect::<Result<_>>()?;

    let oscillatory = kernel.is_oscillatory();
    let nodes = if oscillatory { opts.window_nodes } else { 1 };
    let eps0 = opts.edge_damping / ((half - inner) * (half - inner));
    let lagrange = extrapolation_weights(nodes);
    let frac = (tau - s) / (t - s);

    let mut report = CompositionReport {
        defect: 0.0,
        raw_defect: 0.0,
        window_bias: oscillatory.then_some(0.0),
        probes: probes.len() * probes.len(),
        interior_half_width: inner,
    };
    let mut q = vec![C64::new(0.0, 0.0); nodes];
    for (xi, &x) in probes.iter().enumerate() {
        for (yi, &y) in probes.iter().enumerate() {
            let target = kernel.eval1(x, t, y, s)?;
            q.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            let zc = y + (x - y) * frac;
            for (zi, &z) in pts.iter().enumerate() {
                let prod = left[xi][zi] * right[yi][zi];
                if oscillatory {
                    let base = (-eps0 * (z - zc) * (z - zc)).exp();
                    let mut win = base;
                    for v in q.iter_mut() {
                        *v += prod * win;
                        win *= base;
                    }
                } else {
                    q[0] += prod;
                }
            }
            let extrapolated: C64 = q.iter().zip(&lagrange).map(|(v, c)| v * c).sum();
            report.defect = report.defect.max((extrapolated - target).norm());
            report.raw_defect = report.raw_defect.max((q[0] - target).norm());
            if let Some(b) = report.window_bias.as_mut() {
                *b = b.max((q[0] - extrapolated).norm());
            }
        }
    }
    Ok(report)
}

/// ψ(x_i, t) = Σ_j w_j K(x_i, t; y_j, s) ψ(y_j, s) with trapezoid weights.
pub fn propagate_on_grid(kernel: &KernelFunction, t: f64, s: f64, grid: &Grid1D, psi: &[C64]) -> Result<Vec<C64>> {
    if psi.len() != grid.len() {
        return Err(KernelError::Domain(format!("state has {} samples, grid has {}", psi.len(), grid.len())));
    }
    let pts = grid.points();
    let w = grid.trapezoid_weights();
    pts.iter()
        .map(|&x| {
            let mut acc = C64::new(0.0, 0.0);
            for ((&y, &wy), &p) in pts.iter().zip(&w).zip(psi) {
                acc += kernel.eval1(x, t, y, s)? * (p * wy);
            }
            Ok(acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extrapolation_weights_reproduce_polynomials() {
        let c = extrapolation_weights(4);
        // p(ε) = 1 + ε − 2ε² + ε³ on ε = 1..4 extrapolates to p(0) = 1
        let p = |e: f64| 1.0 + e - 2.0 * e * e + e * e * e;
        let v: f64 = c.iter().enumerate().map(|(k, ck)| ck * p((k + 1) as f64)).sum();
        assert!((v - 1.0).abs() < 1e-12);
        assert_eq!(extrapolation_weights(1), vec![1.0]);
    }
}
