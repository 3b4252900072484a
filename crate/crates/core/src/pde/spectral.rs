//! FFT solve of `(a (-Delta_h) + sigma) x = r` on a periodic grid, used to
//! precondition Newton--MINRES.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

pub(crate) struct ShiftedLaplacian {
    nx: usize,
    ny: usize,
    inv_symbol: Vec<f64>,
    fx: Arc<dyn Fft<f64>>,
    ix: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    iy: Arc<dyn Fft<f64>>,
}

impl ShiftedLaplacian {
    pub(crate) fn new(nx: usize, ny: usize, hx: f64, hy: f64, a: f64, sigma: f64) -> Self {
        let mut planner = FftPlanner::new();
        let sx: Vec<f64> = (0..nx)
            .map(|k| 4.0 / (hx * hx) * (std::f64::consts::PI * k as f64 / nx as f64).sin().powi(2))
            .collect();
        let sy: Vec<f64> = (0..ny)
            .map(|k| 4.0 / (hy * hy) * (std::f64::consts::PI * k as f64 / ny as f64).sin().powi(2))
            .collect();
        // transposed layout: y fastest
        let mut inv_symbol = vec![0.0; nx * ny];
        for kx in 0..nx {
            for ky in 0..ny {
                inv_symbol[ky + ny * kx] = 1.0 / (a * (sx[kx] + sy[ky]) + sigma);
            }
        }
        Self {
            nx,
            ny,
            inv_symbol,
            fx: planner.plan_fft_forward(nx),
            ix: planner.plan_fft_inverse(nx),
            fy: planner.plan_fft_forward(ny),
            iy: planner.plan_fft_inverse(ny),
        }
    }

    fn transpose(src: &[Complex<f64>], rows: usize, cols: usize) -> Vec<Complex<f64>> {
        let mut out = vec![Complex::new(0.0, 0.0); src.len()];
        for r in 0..rows {
            for c in 0..cols {
                out[r + rows * c] = src[c + cols * r];
            }
        }
        out
    }

    pub(crate) fn apply(&self, r: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut buf: Vec<Complex<f64>> = r.iter().map(|v| Complex::new(*v, 0.0)).collect();
        self.fx.process(&mut buf);
        let mut t = Self::transpose(&buf, ny, nx);
        self.fy.process(&mut t);
        for (z, s) in t.iter_mut().zip(&self.inv_symbol) {
            *z *= *s;
        }
        self.iy.process(&mut t);
        let mut buf = Self::transpose(&t, nx, ny);
        self.ix.process(&mut buf);
        let scale = 1.0 / (nx * ny) as f64;
        buf.iter().map(|z| z.re * scale).collect()
    }
}
