//! 2D discrete Fourier machinery for transverse fields.
//!
//! The public spectrum approximates the continuous transform
//! `F(kx, ky) = ∫∫ f(x, y) exp(-i (kx x + ky y)) dx dy` and is stored in
//! centred ordering on the same [`TransverseGrid`] shape, so the zero
//! frequency lands on the centre sample. With that scaling
//! `Σ|f|² dx dy = Σ|F|² / (lx ly)`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::grid::{ComplexField2D, TransverseGrid};

/// Cached FFT plans for one grid shape.
#[derive(Clone)]
pub struct SpectralPlan {
    grid: TransverseGrid,
    fwd_x: Arc<dyn Fft<f64>>,
    inv_x: Arc<dyn Fft<f64>>,
    fwd_y: Arc<dyn Fft<f64>>,
    inv_y: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("grid", &self.grid).finish()
    }
}

impl SpectralPlan {
    pub fn new(grid: TransverseGrid) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            fwd_x: planner.plan_fft_forward(grid.nx()),
            inv_x: planner.plan_fft_inverse(grid.nx()),
            fwd_y: planner.plan_fft_forward(grid.ny()),
            inv_y: planner.plan_fft_inverse(grid.ny()),
        }
    }

    pub fn grid(&self) -> &TransverseGrid {
        &self.grid
    }

    /// Unnormalised forward DFT in natural (unshifted) index order.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fwd_x, &self.fwd_y);
    }

    /// Inverse DFT including the `1/N` factor, natural order.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inv_x, &self.inv_y);
        let norm = 1.0 / self.grid.len() as f64;
        data.iter_mut().for_each(|v| *v *= norm);
    }

    fn transform(&self, data: &mut [Complex64], fx: &Arc<dyn Fft<f64>>, fy: &Arc<dyn Fft<f64>>) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        assert_eq!(data.len(), nx * ny);
        run_rows(data, nx, fx);
        let mut t = transpose(data, nx, ny);
        run_rows(&mut t, ny, fy);
        let back = transpose(&t, ny, nx);
        data.copy_from_slice(&back);
    }

    /// `kx^2 + ky^2` for every sample in natural FFT ordering.
    pub fn wavenumber_sq(&self) -> Vec<f64> {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let kx: Vec<f64> = (0..nx).map(|m| natural_freq(m, nx, self.grid.lx())).collect();
        let ky: Vec<f64> = (0..ny).map(|m| natural_freq(m, ny, self.grid.ly())).collect();
        let mut out = Vec::with_capacity(nx * ny);
        for ky in &ky {
            for kx in &kx {
                out.push(kx * kx + ky * ky);
            }
        }
        out
    }
}

fn natural_freq(m: usize, n: usize, l: f64) -> f64 {
    let signed = if m < n / 2 { m as f64 } else { m as f64 - n as f64 };
    signed * std::f64::consts::TAU / l
}

fn run_rows(data: &mut [Complex64], len: usize, fft: &Arc<dyn Fft<f64>>) {
    let scratch_len = fft.get_inplace_scratch_len();
    data.par_chunks_mut(len).for_each_init(
        || vec![Complex64::default(); scratch_len],
        |scratch, row| fft.process_with_scratch(row, scratch),
    );
}

fn transpose(data: &[Complex64], cols: usize, rows: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

/// Swaps halves along both axes; for even sizes it is its own inverse.
fn shift_halves(data: &[Complex64], nx: usize, ny: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    for j in 0..ny {
        let jj = (j + ny / 2) % ny;
        for i in 0..nx {
            let ii = (i + nx / 2) % nx;
            out[jj * nx + ii] = data[j * nx + i];
        }
    }
    out
}

/// Continuous-transform approximation of a field, centred ordering.
pub fn transverse_spectrum(field: &ComplexField2D) -> ComplexField2D {
    transverse_spectrum_with(&SpectralPlan::new(*field.grid()), field)
}

pub fn transverse_spectrum_with(plan: &SpectralPlan, field: &ComplexField2D) -> ComplexField2D {
    let g = *field.grid();
    let mut data = shift_halves(field.values(), g.nx(), g.ny());
    plan.forward(&mut data);
    let area = g.cell_area();
    let values = shift_halves(&data, g.nx(), g.ny()).into_iter().map(|v| v * area).collect();
    ComplexField2D::from_values(g, values).expect("transform of a finite field is finite")
}

/// Exact inverse of [`transverse_spectrum`].
pub fn inverse_spectrum(spectrum: &ComplexField2D) -> ComplexField2D {
    inverse_spectrum_with(&SpectralPlan::new(*spectrum.grid()), spectrum)
}

pub fn inverse_spectrum_with(plan: &SpectralPlan, spectrum: &ComplexField2D) -> ComplexField2D {
    let g = *spectrum.grid();
    let mut data = shift_halves(spectrum.values(), g.nx(), g.ny());
    plan.inverse(&mut data);
    let inv_area = 1.0 / g.cell_area();
    let values = shift_halves(&data, g.nx(), g.ny()).into_iter().map(|v| v * inv_area).collect();
    ComplexField2D::from_values(g, values).expect("transform of a finite field is finite")
}

/// Parseval counterpart of [`crate::grid::field_power`] for a spectrum.
pub fn spectral_power(spectrum: &ComplexField2D) -> f64 {
    let g = spectrum.grid();
    spectrum.values().iter().map(|v| v.norm_sqr()).sum::<f64>() / (g.lx() * g.ly())
}
