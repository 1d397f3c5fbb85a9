use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Uniform periodic sampling grid on the box `[-L/2, L/2)^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    dim: usize,
    samples: usize,
    length: f64,
}

impl GridSpec {
    /// `dim` must be 1 or 2, `samples` a power of two that is at least 16.
    pub fn new(dim: usize, samples: usize, length: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        if samples < 16 || !samples.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "samples per axis {samples} must be a power of two >= 16"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("box length {length} must be positive")));
        }
        Ok(Self { dim, samples, length })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Samples per axis.
    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Box side length.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Total number of samples, `N^n`.
    pub fn len(&self) -> usize {
        self.samples.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        self.length / self.samples as f64
    }

    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Nyquist frequency `pi N / L`.
    pub fn nyquist(&self) -> f64 {
        PI * self.samples as f64 / self.length
    }

    /// Spatial quadrature weight `dx^n`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    /// Spectral quadrature weight `dxi^n`.
    pub fn freq_volume(&self) -> f64 {
        self.dxi().powi(self.dim as i32)
    }

    /// Coordinate of sample `i` along an axis.
    pub fn position(&self, i: usize) -> f64 {
        -0.5 * self.length + i as f64 * self.dx()
    }

    /// Signed frequency index of storage slot `idx` along an axis (FFT order).
    pub fn freq_index(&self, idx: usize) -> i64 {
        let n = self.samples;
        if idx < n / 2 {
            idx as i64
        } else {
            idx as i64 - n as i64
        }
    }

    /// Storage slot of signed frequency index `k`, if representable.
    pub fn freq_slot(&self, k: i64) -> Option<usize> {
        let half = (self.samples / 2) as i64;
        if k < -half || k >= half {
            None
        } else if k >= 0 {
            Some(k as usize)
        } else {
            Some((k + self.samples as i64) as usize)
        }
    }

    /// Angular frequency of storage slot `idx` along an axis.
    pub fn wavenumber(&self, idx: usize) -> f64 {
        self.dxi() * self.freq_index(idx) as f64
    }

    /// Axis indices of a flat (row-major) index.
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        if self.dim == 1 {
            [flat, 0]
        } else {
            [flat / self.samples, flat % self.samples]
        }
    }

    /// `|xi_k|` for every flat spectral index, Euclidean in two dimensions.
    pub fn radial_frequencies(&self) -> Vec<f64> {
        let axis: Vec<f64> = (0..self.samples).map(|i| self.wavenumber(i)).collect();
        match self.dim {
            1 => axis.iter().map(|w| w.abs()).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.len());
                for a in &axis {
                    for b in &axis {
                        out.push(a.hypot(*b));
                    }
                }
                out
            }
        }
    }

    /// Spatial coordinates of every flat sample index.
    pub fn coordinates(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(move |flat| {
            let [a, b] = self.unflatten(flat);
            if self.dim == 1 {
                [self.position(a), 0.0]
            } else {
                [self.position(a), self.position(b)]
            }
        })
    }

    /// Frequency vectors of every flat spectral index.
    pub fn frequencies(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        (0..self.len()).map(move |flat| {
            let [a, b] = self.unflatten(flat);
            if self.dim == 1 {
                [self.wavenumber(a), 0.0]
            } else {
                [self.wavenumber(a), self.wavenumber(b)]
            }
        })
    }
}

/// Samples of a function on the grid; `values[i]` approximates `f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<Complex64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "field has {} samples, grid expects {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Sample `f` at the grid points. In one dimension the second coordinate is 0.
    pub fn from_fn(grid: GridSpec, f: impl FnMut([f64; 2]) -> Complex64) -> Self {
        let values = grid.coordinates().map(f).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
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

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|v| v * alpha).collect() }
    }

    /// Pointwise sum; both fields must live on the same grid.
    pub fn add(&self, other: &Field) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, values })
    }

    pub fn sub(&self, other: &Field) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest `|f(x)|` over samples within 5% of the box boundary, relative to the peak.
    /// Fields are expected to be negligible there so the periodic model matches the line.
    pub fn boundary_leakage(&self) -> f64 {
        let peak = self.max_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let edge = 0.95 * 0.5 * self.grid.length;
        let leak = self
            .grid
            .coordinates()
            .zip(&self.values)
            .filter(|(x, _)| x[0].abs() >= edge || x[1].abs() >= edge)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        leak / peak
    }

    /// Emit a warning when the field does not decay near the box boundary.
    pub fn check_decay(&self) -> bool {
        let leak = self.boundary_leakage();
        if leak >= 1e-12 {
            log::warn!("field not negligible near box boundary (relative leakage {leak:.3e})");
            false
        } else {
            true
        }
    }
}

/// Approximate continuous Fourier transform on the grid frequencies, stored in FFT order:
/// slot `idx` on an axis carries frequency index `k = idx` for `idx < N/2`, `idx - N` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "spectrum has {} coefficients, grid expects {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Sample a function of the frequency vector.
    pub fn from_fn(grid: GridSpec, g: impl FnMut([f64; 2]) -> Complex64) -> Self {
        let coeffs = grid.frequencies().map(g).collect();
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Flat index of the zero frequency.
    pub fn zero_slot(&self) -> usize {
        0
    }

    /// Multiply every coefficient by a real radial multiplier `m(|xi|)`.
    pub fn radial_multiplier(&self, radial: &[f64], m: impl Fn(f64) -> f64) -> Self {
        let coeffs = self.coeffs.iter().zip(radial).map(|(c, &r)| c * m(r)).collect();
        Self { grid: self.grid, coeffs }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
