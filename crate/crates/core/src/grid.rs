//! Uniform transverse sampling and complex fields living on it.
//!
//! Lengths are in units of the optical wavelength, so a beam width of `10.0`
//! means ten wavelengths. The sample `(nx/2, ny/2)` sits exactly on the axis.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform Cartesian sampling of the transverse plane, centred on the axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransverseGrid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
}

impl TransverseGrid {
    pub const MIN_SAMPLES: usize = 8;

    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < Self::MIN_SAMPLES || n % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {n}, sample counts must be even and at least {}",
                    Self::MIN_SAMPLES
                )));
            }
        }
        for (name, l) in [("lx", lx), ("ly", ly)] {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "{name} = {l}, extents must be positive"
                )));
            }
        }
        Ok(Self { nx, ny, lx, ly })
    }

    /// Square grid shorthand.
    pub fn square(n: usize, l: f64) -> Result<Self> {
        Self::new(n, n, l, l)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Area element used by every transverse quadrature.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * self.dy()
    }

    /// Row-major flat index; rows run along x.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords_of(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    /// Physical position `(x, y)` of a flat index.
    #[inline]
    pub fn position(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.coords_of(idx);
        (self.x(i), self.y(j))
    }

    /// Index of the on-axis sample.
    pub fn center_index(&self) -> usize {
        self.index(self.nx / 2, self.ny / 2)
    }

    /// Angular spatial frequency of spectral column `i` in centred ordering.
    pub fn kx(&self, i: usize) -> f64 {
        (i as f64 - (self.nx / 2) as f64) * std::f64::consts::TAU / self.lx
    }

    pub fn ky(&self, j: usize) -> f64 {
        (j as f64 - (self.ny / 2) as f64) * std::f64::consts::TAU / self.ly
    }
}

/// Complex scalar amplitude sampled on a [`TransverseGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField2D {
    grid: TransverseGrid,
    values: Vec<Complex64>,
}

impl ComplexField2D {
    pub fn zeros(grid: TransverseGrid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn constant(grid: TransverseGrid, value: Complex64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_values(grid: TransverseGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if let Some(index) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    /// Samples `f(x, y)` at every grid point.
    pub fn from_fn(grid: TransverseGrid, mut f: impl FnMut(f64, f64) -> Complex64) -> Self {
        let values = (0..grid.len())
            .map(|idx| {
                let (x, y) = grid.position(idx);
                f(x, y)
            })
            .collect();
        Self { grid, values }
    }

    /// Samples a real function.
    pub fn from_real_fn(grid: TransverseGrid, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        Self::from_fn(grid, |x, y| Complex64::new(f(x, y), 0.0))
    }

    pub fn grid(&self) -> &TransverseGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            Some(index) => Err(Error::NonFinite { index }),
            None => Ok(()),
        }
    }

    pub fn same_grid(&self, other: &ComplexField2D) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination of two fields on the same grid.
    pub fn zip_map(
        &self,
        other: &ComplexField2D,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|v| v * factor)
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Relative L2 distance `|a - b| / |b|` (absolute when `b` vanishes).
    pub fn relative_l2_distance(&self, reference: &ComplexField2D) -> Result<f64> {
        self.same_grid(reference)?;
        let diff: f64 = self
            .values
            .iter()
            .zip(&reference.values)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        let norm: f64 = reference.values.iter().map(|b| b.norm_sqr()).sum();
        Ok(if norm > 0.0 {
            (diff / norm).sqrt()
        } else {
            diff.sqrt()
        })
    }
}

/// Transverse quadrature of `|field|^2`, i.e. energy per unit pulse length.
pub fn field_power(field: &ComplexField2D) -> f64 {
    field.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * field.grid.cell_area()
}

/// Intensity-weighted centroid and rms radius about it.
pub fn moments(field: &ComplexField2D) -> (f64, f64, f64) {
    let grid = field.grid();
    let (mut w, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (idx, v) in field.values().iter().enumerate() {
        let (x, y) = grid.position(idx);
        let p = v.norm_sqr();
        w += p;
        sx += p * x;
        sy += p * y;
    }
    if w == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let (cx, cy) = (sx / w, sy / w);
    let mut s2 = 0.0;
    for (idx, v) in field.values().iter().enumerate() {
        let (x, y) = grid.position(idx);
        s2 += v.norm_sqr() * ((x - cx).powi(2) + (y - cy).powi(2));
    }
    (cx, cy, (s2 / w).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_centering() {
        let g = TransverseGrid::new(64, 64, 40.0, 40.0).unwrap();
        assert_eq!(g.dx(), 0.625);
        let g = TransverseGrid::square(8, 8.0).unwrap();
        let c = g.center_index();
        assert_eq!(g.position(c), (0.0, 0.0));
        assert_eq!(g.x(0), -4.0);
        assert_eq!(g.x(7), 3.0);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(
            TransverseGrid::new(7, 8, 8.0, 8.0),
            Err(Error::InvalidGrid(_))
        ));
        assert!(TransverseGrid::new(6, 6, 8.0, 8.0).is_err());
        assert!(TransverseGrid::new(8, 8, 0.0, 8.0).is_err());
        assert!(TransverseGrid::new(8, 8, 8.0, -1.0).is_err());
        assert!(TransverseGrid::new(8, 8, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn rejects_non_finite_values() {
        let g = TransverseGrid::square(8, 8.0).unwrap();
        let mut v = vec![Complex64::new(1.0, 0.0); 64];
        v[5] = Complex64::new(f64::NAN, 0.0);
        assert_eq!(
            ComplexField2D::from_values(g, v).unwrap_err(),
            Error::NonFinite { index: 5 }
        );
        assert!(ComplexField2D::from_values(g, vec![Complex64::default(); 3]).is_err());
    }

    #[test]
    fn power_of_simple_fields() {
        let g = TransverseGrid::square(10 * 8, 10.0).unwrap();
        assert_eq!(field_power(&ComplexField2D::zeros(g)), 0.0);
        let one = ComplexField2D::constant(g, Complex64::new(1.0, 0.0));
        assert!((field_power(&one) - 100.0).abs() < 1e-12);
    }

    #[test]
    fn power_of_gaussian() {
        // |E0|^2 * pi * sigma^2 / 2 for E0 exp(-rho^2 / sigma^2)
        let sigma = 3.0;
        let e0 = 1.7;
        let g = TransverseGrid::square(128, 8.0 * sigma).unwrap();
        let f = ComplexField2D::from_real_fn(g, |x, y| e0 * (-(x * x + y * y) / (sigma * sigma)).exp());
        let expected = std::f64::consts::FRAC_PI_2 * e0 * e0 * sigma * sigma;
        assert!((field_power(&f) / expected - 1.0).abs() < 1e-3);
    }

    #[test]
    fn moments_of_shifted_gaussian() {
        let g = TransverseGrid::square(128, 32.0).unwrap();
        let f = ComplexField2D::from_real_fn(g, |x, y| (-((x - 2.0).powi(2) + (y + 1.0).powi(2)) / 9.0).exp());
        let (cx, cy, rms) = moments(&f);
        assert!((cx - 2.0).abs() < 1e-9);
        assert!((cy + 1.0).abs() < 1e-9);
        // <rho^2> = w^2 / 2 for intensity exp(-2 rho^2 / w^2)
        assert!((rms - 3.0 / 2f64.sqrt()).abs() < 1e-9);
    }
}
