use crate::{Grid1D, KernelError, KernelTable, Result, C64};
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolOptions {
    /// ε in the damping factor e^{−εη²} applied to the propagator symbol; 0 disables it.
    pub damping: f64,
    /// Tail estimate above which a warning is attached.
    pub tail_tolerance: f64,
}

impl Default for SymbolOptions {
    fn default() -> Self {
        Self { damping: 0.0, tail_tolerance: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolKernel {
    pub table: KernelTable,
    /// Largest |e^{−(i/ħ)t a(x, η)}| at the edge of the η-grid.
    pub tail_estimate: f64,
    pub warning: Option<String>,
}

/// Kernel samples K(x_i, t; y_j, 0) = (1/2π) ∫ e^{i(x_i − y_j)η} e^{−(i/ħ) t a(x_i, η)} dη.
///
/// The η-grid has 2n points with spacing π/(n h), so every difference x_i − y_j is
/// resolved without wrap-around; one FFT per row.
pub fn symbol_to_kernel<A>(a: A, t: f64, hbar: f64, grid: &Grid1D) -> Result<SymbolKernel>
where
    A: Fn(f64, f64) -> C64,
{
    symbol_to_kernel_with(a, t, hbar, grid, &SymbolOptions::default())
}

pub fn symbol_to_kernel_with<A>(a: A, t: f64, hbar: f64, grid: &Grid1D, opts: &SymbolOptions) -> Result<SymbolKernel>
where
    A: Fn(f64, f64) -> C64,
{
    if !(hbar > 0.0) || !t.is_finite() || !(opts.damping >= 0.0) {
        return Err(KernelError::Domain(format!("symbol_to_kernel needs ħ > 0, finite t, ε ≥ 0 (ħ={hbar}, t={t}, ε={})", opts.damping)));
    }
    let n = grid.len();
    let m = 2 * n;
    let h = grid.spacing();
    let deta = 2.0 * PI / (m as f64 * h);
    let etas: Vec<f64> = (0..m).map(|k| (k as f64 - n as f64) * deta).collect();
    let fft = FftPlanner::new().plan_fft_inverse(m);
    let phase = C64::new(0.0, -t / hbar);
    let scale = deta / (2.0 * PI);

    let mut values = vec![C64::new(0.0, 0.0); n * n];
    let mut buf = vec![C64::new(0.0, 0.0); m];
    let mut tail: f64 = 0.0;
    for (i, &x) in grid.points().iter().enumerate() {
        for (b, &eta) in buf.iter_mut().zip(&etas) {
            *b = (phase * a(x, eta)).exp() * (-opts.damping * eta * eta).exp();
        }
        tail = tail.max(buf[0].norm()).max(buf[m - 1].norm());
        if buf.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::Range(format!("propagator symbol overflows at x = {x}")));
        }
        fft.process(&mut buf);
        // e^{i d h η_k} = e^{2πi d k / m} (−1)^d with d = i − j
        for j in 0..n {
            let d = i as isize - j as isize;
            let v = buf[d.rem_euclid(m as isize) as usize] * scale;
            values[i * n + j] = if d % 2 == 0 { v } else { -v };
        }
    }
    let warning = (tail > opts.tail_tolerance).then(|| {
        format!("symbol does not decay on the η-grid (|η| ≤ {:.3e}): tail estimate {tail:.3e}", PI / h)
    });
    Ok(SymbolKernel { table: KernelTable { grid: grid.clone(), t, values }, tail_estimate: tail, warning })
}

/// Declared symbol class S^m_{ξ,δ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolClass {
    pub m: f64,
    pub xi: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymbolCheck {
    pub passed: bool,
    /// max |a(x, η)| / (C (1 + |η|)^m) over the samples
    pub worst_ratio: f64,
    pub worst_x: f64,
    pub worst_eta: f64,
    pub samples: usize,
}

/// Sampled check of |a(x, η)| ≤ C(1 + |η|)^m, the zeroth-derivative case of the class
/// bound. A sanity gate, not a proof of membership.
pub fn validate_symbol<A>(a: A, class: &SymbolClass, c: f64, xs: &[f64], etas: &[f64]) -> Result<SymbolCheck>
where
    A: Fn(f64, f64) -> C64,
{
    if !(0.0 <= class.delta && class.delta < class.xi) {
        return Err(KernelError::Domain(format!("symbol class needs 0 ≤ δ < ξ (ξ={}, δ={})", class.xi, class.delta)));
    }
    if !(c > 0.0) || xs.is_empty() || etas.is_empty() {
        return Err(KernelError::Domain("validate_symbol needs C > 0 and nonempty samples".into()));
    }
    let mut check = SymbolCheck { passed: true, worst_ratio: 0.0, worst_x: xs[0], worst_eta: etas[0], samples: 0 };
    for &x in xs {
        for &eta in etas {
            let ratio = a(x, eta).norm() / (c * (1.0 + eta.abs()).powf(class.m));
            check.samples += 1;
            if !(ratio <= check.worst_ratio) {
                check.worst_ratio = ratio;
                check.worst_x = x;
                check.worst_eta = eta;
            }
        }
    }
    check.passed = check.worst_ratio <= 1.0;
    Ok(check)
}
