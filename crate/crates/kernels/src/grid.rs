use crate::{KernelError, Result, C64};
use std::io::{self, Write};

/// Uniform grid on [−L, L] with `count` points, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    half_width: f64,
    points: Vec<f64>,
}

impl Grid1D {
    pub fn new(half_width: f64, count: usize) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) || count < 2 {
            return Err(KernelError::Domain(format!("grid needs L > 0 and at least 2 points (L={half_width}, n={count})")));
        }
        let h = 2.0 * half_width / (count - 1) as f64;
        let mut points: Vec<f64> = (0..count).map(|i| -half_width + i as f64 * h).collect();
        points[count - 1] = half_width;
        Ok(Self { half_width, points })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.len() - 1) as f64
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.spacing();
        let mut w = vec![h; self.len()];
        w[0] = 0.5 * h;
        *w.last_mut().unwrap() = 0.5 * h;
        w
    }

    /// Trapezoid integral of samples on the grid.
    pub fn integrate(&self, f: &[C64]) -> C64 {
        self.trapezoid_weights().iter().zip(f).map(|(w, v)| v * w).sum()
    }

    /// Discrete L² norm with trapezoid weights.
    pub fn l2_norm(&self, f: &[C64]) -> f64 {
        self.trapezoid_weights().iter().zip(f).map(|(w, v)| w * v.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Kernel samples K(x_i, t; y_j, s) on a square grid, row-major in (i, j).
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    pub grid: Grid1D,
    pub t: f64,
    pub values: Vec<C64>,
}

impl KernelTable {
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.values[i * self.grid.len() + j]
    }

    pub fn max_abs_diff(&self, other: &KernelTable) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// CSV with header `x,y,t,re,im`, one row per sample, LF line endings.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,t,re,im")?;
        let pts = self.grid.points();
        for (i, x) in pts.iter().enumerate() {
            for (j, y) in pts.iter().enumerate() {
                let v = self.get(i, j);
                writeln!(out, "{x},{y},{},{},{}", self.t, v.re, v.im)?;
            }
        }
        Ok(())
    }
}
