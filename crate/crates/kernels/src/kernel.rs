use crate::bessel::{bessel_k2, hankel_h2_1, hankel_h2_2};
use crate::{KernelError, Result, C64};
use std::f64::consts::PI;

/// Closed-form propagator kernels K(x, t; y, s).
///
/// Heat, free Schrödinger and Mehler kernels act in any dimension as products of
/// one-dimensional factors. The square-root kernel depends on ‖x − y‖ only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelFunction {
    Heat { kappa: f64 },
    FreeSchrodinger { mass: f64, hbar: f64 },
    Mehler { mass: f64, omega: f64, hbar: f64 },
    /// μ = mc/ħ. The β matrix is not multiplied in, see [`KernelFunction::beta_factor`].
    SqrtRelativistic { mu: f64, c: f64 },
}

/// Region of (x − y, t − s) relative to the light cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LightConeRegion {
    Spacelike,
    TimelikeFuture,
    TimelikePast,
}

/// Standard Dirac β = diag(1, 1, −1, −1).
pub fn beta_matrix() -> [[f64; 4]; 4] {
    let mut b = [[0.0; 4]; 4];
    for (i, row) in b.iter_mut().enumerate() {
        row[i] = if i < 2 { 1.0 } else { -1.0 };
    }
    b
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(KernelError::Domain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn sq_dist(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.is_empty() {
        return Err(KernelError::Domain(format!("point dimensions differ or are empty ({} vs {})", x.len(), y.len())));
    }
    Ok(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum())
}

impl KernelFunction {
    pub fn heat(kappa: f64) -> Result<Self> {
        positive("κ", kappa)?;
        Ok(Self::Heat { kappa })
    }

    pub fn free_schrodinger(mass: f64, hbar: f64) -> Result<Self> {
        positive("m", mass)?;
        positive("ħ", hbar)?;
        Ok(Self::FreeSchrodinger { mass, hbar })
    }

    pub fn mehler(mass: f64, omega: f64, hbar: f64) -> Result<Self> {
        positive("m", mass)?;
        positive("Ω", omega)?;
        positive("ħ", hbar)?;
        Ok(Self::Mehler { mass, omega, hbar })
    }

    pub fn sqrt_relativistic(mu: f64, c: f64) -> Result<Self> {
        positive("μ", mu)?;
        positive("c", c)?;
        Ok(Self::SqrtRelativistic { mu, c })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Heat { .. } => "heat",
            Self::FreeSchrodinger { .. } => "free_schrodinger",
            Self::Mehler { .. } => "mehler",
            Self::SqrtRelativistic { .. } => "sqrt_relativistic",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Self::Heat { kappa } => vec![("kappa", kappa)],
            Self::FreeSchrodinger { mass, hbar } => vec![("mass", mass), ("hbar", hbar)],
            Self::Mehler { mass, omega, hbar } => vec![("mass", mass), ("omega", omega), ("hbar", hbar)],
            Self::SqrtRelativistic { mu, c } => vec![("mu", mu), ("c", c)],
        }
    }

    pub fn singular_set(&self) -> &'static str {
        match self {
            Self::Heat { .. } => "t ≤ s",
            Self::FreeSchrodinger { .. } => "t = s",
            Self::Mehler { .. } => "sin Ω(t − s) = 0 (caustics t − s = kπ/Ω)",
            Self::SqrtRelativistic { .. } => "light cone c²(t − s)² = ‖x − y‖²",
        }
    }

    pub fn branch_rule(&self) -> &'static str {
        match self {
            Self::Heat { .. } => "real, one-sided",
            Self::FreeSchrodinger { .. } | Self::Mehler { .. } => "principal square root of the prefactor",
            Self::SqrtRelativistic { .. } => {
                "spacelike c|t − s| < ‖x − y‖ → K₂; timelike t > s → H₂⁽²⁾; timelike t < s → −H₂⁽¹⁾"
            }
        }
    }

    /// Heat kernels only propagate forward in time.
    pub fn is_one_sided(&self) -> bool {
        matches!(self, Self::Heat { .. })
    }

    /// Kernels of unit modulus-scale whose composition integrals converge only conditionally.
    pub fn is_oscillatory(&self) -> bool {
        !matches!(self, Self::Heat { .. })
    }

    pub fn beta_factor(&self) -> Option<[[f64; 4]; 4]> {
        matches!(self, Self::SqrtRelativistic { .. }).then(beta_matrix)
    }

    /// Light-cone region of the separation; the cone itself is a singularity error.
    pub fn region(c: f64, dt: f64, r: f64) -> Result<LightConeRegion> {
        let ct2 = c * c * dt * dt;
        let r2 = r * r;
        if (ct2 - r2).abs() <= 1e-14 * ct2.max(r2) {
            return Err(KernelError::Singular(format!("light cone: c|t − s| = ‖x − y‖ = {r}")));
        }
        Ok(if ct2 < r2 {
            LightConeRegion::Spacelike
        } else if dt > 0.0 {
            LightConeRegion::TimelikeFuture
        } else {
            LightConeRegion::TimelikePast
        })
    }

    pub fn eval(&self, x: &[f64], t: f64, y: &[f64], s: f64) -> Result<C64> {
        let d2 = sq_dist(x, y)?;
        let dim = x.len() as i32;
        let tau = t - s;
        match *self {
            Self::Heat { kappa } => {
                if !(tau > 0.0) {
                    return Err(KernelError::Domain(format!("heat kernel needs t > s (t − s = {tau})")));
                }
                let norm = (4.0 * PI * kappa * tau).powf(-0.5 * dim as f64);
                Ok(C64::new(norm * (-d2 / (4.0 * kappa * tau)).exp(), 0.0))
            }
            Self::FreeSchrodinger { mass, hbar } => {
                if tau == 0.0 {
                    return Err(KernelError::Singular("free Schrödinger kernel at t = s".into()));
                }
                let pre = C64::new(0.0, -mass / (2.0 * PI * hbar * tau)).sqrt().powi(dim);
                Ok(pre * C64::new(0.0, mass * d2 / (2.0 * hbar * tau)).exp())
            }
            Self::Mehler { mass, omega, hbar } => {
                let sn = (omega * tau).sin();
                if sn.abs() < 1e-12 {
                    return Err(KernelError::Singular(format!("Mehler caustic at t − s = {tau} (Ω = {omega})")));
                }
                // (x² + y²)cos Ωτ − 2xy = (x − y)² − 2(x² + y²)sin²(Ωτ/2)
                let h = (0.5 * omega * tau).sin();
                let r2: f64 = x.iter().zip(y).map(|(a, b)| a * a + b * b).sum();
                let quad = d2 - 2.0 * r2 * h * h;
                let pre = C64::new(0.0, -mass * omega / (2.0 * PI * hbar * sn)).sqrt().powi(dim);
                Ok(pre * C64::new(0.0, mass * omega * quad / (2.0 * hbar * sn)).exp())
            }
            Self::SqrtRelativistic { mu, c } => {
                let r = d2.sqrt();
                let pre = c * tau * mu * mu / (4.0 * PI);
                let gap = (c * tau).powi(2) - d2;
                let v = match Self::region(c, tau, r)? {
                    LightConeRegion::Spacelike => {
                        let k2 = bessel_k2(mu * (-gap).sqrt())?;
                        C64::new(0.0, -2.0 * k2 / (PI * -gap))
                    }
                    LightConeRegion::TimelikeFuture => hankel_h2_2(mu * gap.sqrt())? / gap,
                    LightConeRegion::TimelikePast => -hankel_h2_1(mu * gap.sqrt())? / gap,
                };
                Ok(v * pre)
            }
        }
    }

    pub fn eval1(&self, x: f64, t: f64, y: f64, s: f64) -> Result<C64> {
        self.eval(&[x], t, &[y], s)
    }

    /// Samples K(x_i, t; y_j, s) on the grid.
    pub fn sample(&self, t: f64, s: f64, grid: &crate::Grid1D) -> Result<crate::KernelTable> {
        let pts = grid.points();
        let mut values = Vec::with_capacity(pts.len() * pts.len());
        for &x in pts {
            for &y in pts {
                values.push(self.eval1(x, t, y, s)?);
            }
        }
        Ok(crate::KernelTable { grid: grid.clone(), t: t - s, values })
    }
}
