use num_complex::Complex64;

use super::band::{feasible_band, BandLimits};
use super::fourier::{forward_ft, inverse_ft, inverse_ft_in_place};
use super::grid::{Field, GridSpec, Spectrum};
use super::profile::{gamma_profile, pow2};
use crate::error::{Error, Result};

/// Relative amplitude a field may keep outside the region a dilation maps into the grid.
pub const DILATION_LEAK_TOL: f64 = 1e-8;

/// Precomputed transform of a field, shared by every level of a Littlewood-Paley sweep.
#[derive(Debug, Clone)]
pub struct LpAnalysis {
    spectrum: Spectrum,
    radial: Vec<f64>,
    band: BandLimits,
}

impl LpAnalysis {
    pub fn new(f: &Field) -> Result<Self> {
        Self::from_spectrum(forward_ft(f))
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Result<Self> {
        let band = feasible_band(spectrum.grid())?;
        let radial = spectrum.grid().radial_frequencies();
        Ok(Self { spectrum, radial, band })
    }

    pub fn band(&self) -> BandLimits {
        self.band
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn radial(&self) -> &[f64] {
        &self.radial
    }

    pub fn grid(&self) -> &GridSpec {
        self.spectrum.grid()
    }

    /// Spectrum multiplied by `m(|xi|)`, or `None` when the product vanishes identically.
    pub fn filtered(&self, m: impl Fn(f64) -> f64) -> Option<Spectrum> {
        let mut buf = Vec::new();
        self.filtered_into(m, &mut buf).then(|| Spectrum::new(*self.grid(), buf).expect("length preserved"))
    }

    /// Writes the spectrum multiplied by `m(|xi|)` into `buf`, resizing it to the grid.
    /// Returns `false` when the product vanishes identically.
    pub fn filtered_into(&self, m: impl Fn(f64) -> f64, buf: &mut Vec<Complex64>) -> bool {
        let zero = Complex64::new(0.0, 0.0);
        buf.clear();
        buf.resize(self.spectrum.coeffs().len(), zero);
        let mut any = false;
        for ((out, c), &r) in buf.iter_mut().zip(self.spectrum.coeffs()).zip(&self.radial) {
            if c.re == 0.0 && c.im == 0.0 {
                continue;
            }
            let w = m(r);
            if w != 0.0 {
                any = true;
                *out = c * w;
            }
        }
        any
    }

    /// Samples of the field with multiplier `m(|xi|)` written into `buf`; `false` when it
    /// vanishes identically. Reusing `buf` across levels avoids a large allocation per level.
    pub fn multiplier_into(&self, m: impl Fn(f64) -> f64, buf: &mut Vec<Complex64>) -> bool {
        let any = self.filtered_into(m, buf);
        if any {
            inverse_ft_in_place(buf, self.grid());
        }
        any
    }

    /// Samples of `Q_j f` written into `buf`, as in [`LpAnalysis::multiplier_into`].
    pub fn level_into(&self, j: i32, buf: &mut Vec<Complex64>) -> bool {
        let scale = pow2(-j);
        self.multiplier_into(|r| gamma_profile(scale * r), buf)
    }

    /// `Q_j f` without the band check; `None` when it vanishes identically.
    pub fn level_unchecked(&self, j: i32) -> Option<Field> {
        let mut buf = Vec::new();
        self.level_into(j, &mut buf).then(|| Field::new(*self.grid(), buf).expect("length preserved"))
    }

    /// `Q_j f` for an in-band level.
    pub fn level(&self, j: i32) -> Result<Field> {
        if !self.band.contains(j) {
            return Err(Error::LevelOutOfBand { level: j, j_min: self.band.j_min, j_max: self.band.j_max });
        }
        Ok(self.level_unchecked(j).unwrap_or_else(|| Field::zeros(*self.grid())))
    }
}

/// Littlewood-Paley piece `Q_j f`: multiplier `gamma(2^{-j} |xi|)` on the spectrum.
pub fn lp_project(f: &Field, j: i32) -> Result<Field> {
    let band = feasible_band(f.grid())?;
    if !band.contains(j) {
        return Err(Error::LevelOutOfBand { level: j, j_min: band.j_min, j_max: band.j_max });
    }
    LpAnalysis::new(f)?.level(j)
}

/// Samples of `x -> f(x / 2^m)` on the same grid.
///
/// For `m > 0` the spectrum is read off every `2^m`-th coefficient of `f`, which is exact when
/// `f` vanishes outside the central `1/2^m` of the box. For `m < 0` the field is decimated in
/// space, which is exact when `f` is band-limited to `xi_max / 2^|m|`.
pub fn dyadic_dilate(f: &Field, m: i32) -> Result<Field> {
    let grid = *f.grid();
    if m == 0 {
        return Ok(f.clone());
    }
    let n = grid.samples();
    if m.unsigned_abs() >= n.trailing_zeros() {
        return Err(Error::DilationEscapesGrid(format!("factor 2^{m} exceeds grid size")));
    }
    let factor = 1usize << m.unsigned_abs();
    let peak = f.max_abs();
    if peak == 0.0 {
        return Ok(f.clone());
    }
    if m > 0 {
        // support must fit in |x| < L / 2^{m+1}
        let limit = 0.5 * grid.length() / factor as f64;
        let leak = grid
            .coordinates()
            .zip(f.values())
            .filter(|(x, _)| x[0].abs() >= limit || x[1].abs() >= limit)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        if leak > DILATION_LEAK_TOL * peak {
            return Err(Error::DilationEscapesGrid(format!(
                "support leaves the box after stretching by 2^{m} (relative leakage {:.2e})",
                leak / peak
            )));
        }
        let src = forward_ft(f);
        let weight = (factor as f64).powi(grid.dim() as i32);
        let pick = |idx: usize| grid.freq_slot(grid.freq_index(idx) * factor as i64);
        let mut out = Spectrum::zeros(grid);
        for (flat, c) in out.coeffs_mut().iter_mut().enumerate() {
            let [a, b] = grid.unflatten(flat);
            let slot = match grid.dim() {
                1 => pick(a),
                _ => pick(a).zip(pick(b)).map(|(a, b)| a * n + b),
            };
            if let Some(s) = slot {
                *c = src.coeffs()[s] * weight;
            }
        }
        Ok(inverse_ft(&out))
    } else {
        // spectrum must fit below xi_max / 2^|m|
        let spec = forward_ft(f);
        let limit = grid.nyquist() / factor as f64;
        let spec_peak = spec.max_abs();
        let leak = grid
            .frequencies()
            .zip(spec.coeffs())
            .filter(|(xi, _)| xi[0].abs() >= limit || xi[1].abs() >= limit)
            .map(|(_, v)| v.norm())
            .fold(0.0, f64::max);
        if leak > DILATION_LEAK_TOL * spec_peak {
            return Err(Error::DilationEscapesGrid(format!(
                "spectrum passes Nyquist after compressing by 2^{m} (relative leakage {:.2e})",
                leak / spec_peak
            )));
        }
        // sample i of the result is sample factor*i - (factor-1)N/2 of f
        let offset = (factor - 1) * n / 2;
        let map = |i: usize| (factor * i).checked_sub(offset).filter(|&s| s < n);
        let mut out = Field::zeros(grid);
        for (flat, v) in out.values_mut().iter_mut().enumerate() {
            let [a, b] = grid.unflatten(flat);
            let src = match grid.dim() {
                1 => map(a),
                _ => map(a).zip(map(b)).map(|(a, b)| a * n + b),
            };
            if let Some(s) = src {
                *v = f.values()[s];
            }
        }
        Ok(out)
    }
}

/// Circular shift `(tau_a f)(x) = f(x - a)` for offsets on the sample lattice.
pub fn grid_translate(f: &Field, offset: &[f64]) -> Result<Field> {
    let grid = *f.grid();
    if offset.len() != grid.dim() {
        return Err(Error::InvalidParams(format!(
            "offset has {} components, grid dimension is {}",
            offset.len(),
            grid.dim()
        )));
    }
    let n = grid.samples() as i64;
    let mut shifts = [0usize; 2];
    for (axis, &a) in offset.iter().enumerate() {
        let steps = a / grid.dx();
        let rounded = steps.round();
        if !steps.is_finite() || (steps - rounded).abs() > 1e-9 * rounded.abs().max(1.0) {
            return Err(Error::NonGridShift(a));
        }
        shifts[axis] = (rounded as i64).rem_euclid(n) as usize;
    }
    let n = n as usize;
    let mut out = Field::zeros(grid);
    let src = f.values();
    match grid.dim() {
        1 => {
            for (i, v) in out.values_mut().iter_mut().enumerate() {
                *v = src[(i + n - shifts[0]) % n];
            }
        }
        _ => {
            for (flat, v) in out.values_mut().iter_mut().enumerate() {
                let (a, b) = (flat / n, flat % n);
                *v = src[((a + n - shifts[0]) % n) * n + (b + n - shifts[1]) % n];
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::lp::profile::lowpass_profile;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn grid() -> GridSpec {
        GridSpec::new(1, 4096, 64.0).unwrap()
    }

    /// Smooth field whose spectrum sits inside `[lo, hi]` in |xi|.
    fn shell_field(g: GridSpec, lo: f64, hi: f64) -> Field {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        let s = Spectrum::from_fn(g, |xi| {
            let r = xi[0].hypot(xi[1]);
            c(lowpass_profile(1.0 + 0.5 * ((r - mid) / half).abs()))
        });
        inverse_ft(&s)
    }

    #[test]
    fn plateau_field_sits_in_one_level() {
        let g = grid();
        let j0 = 3;
        let f = shell_field(g, 0.75 * 8.0, 8.0);
        let band = feasible_band(&g).unwrap();
        let scale = f.max_abs();
        for j in band.levels() {
            let q = lp_project(&f, j).unwrap();
            let target = if j == j0 { f.clone() } else { Field::zeros(g) };
            let err = q.sub(&target).unwrap().max_abs();
            assert!(err < 1e-10 * scale, "level {j}: {err}");
        }
    }

    #[test]
    fn zero_field_projects_to_zero() {
        let g = grid();
        for j in 0..=6 {
            assert_eq!(lp_project(&Field::zeros(g), j).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn out_of_band_level_rejected() {
        let f = Field::zeros(grid());
        assert!(matches!(lp_project(&f, 7), Err(Error::LevelOutOfBand { .. })));
        assert!(matches!(lp_project(&f, -1), Err(Error::LevelOutOfBand { .. })));
    }

    #[test]
    fn levels_reconstruct_band_limited_field() {
        let g = grid();
        let f = shell_field(g, 1.0, 50.0);
        let band = feasible_band(&g).unwrap();
        let mut acc = Field::zeros(g);
        for j in band.levels() {
            acc = acc.add(&lp_project(&f, j).unwrap()).unwrap();
        }
        assert!(acc.sub(&f).unwrap().max_abs() < 1e-10 * f.max_abs());
    }

    #[test]
    fn dilation_identity_and_gaussian() {
        let g = grid();
        let f = Field::from_fn(g, |x| c((-x[0] * x[0] / 2.0).exp()));
        assert_eq!(dyadic_dilate(&f, 0).unwrap(), f);
        let d = dyadic_dilate(&f, 1).unwrap();
        let err = g
            .coordinates()
            .zip(d.values())
            .map(|(x, v)| (v - c((-x[0] * x[0] / 8.0).exp())).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
        let back = dyadic_dilate(&d, -1).unwrap();
        assert!(back.sub(&f).unwrap().max_abs() < 1e-8);
    }

    #[test]
    fn dilation_spectrum_relation() {
        // change of variables: F(h_2 f)(xi) = 2^n F(f)(2 xi); checked against the closed form
        let g = grid();
        let f = Field::from_fn(g, |x| c((-x[0] * x[0] / 2.0).exp()));
        let s = forward_ft(&dyadic_dilate(&f, 1).unwrap());
        for (xi, v) in g.frequencies().zip(s.coeffs()) {
            let expect = 2.0 * (2.0 * PI).sqrt() * (-(2.0 * xi[0]).powi(2) / 2.0).exp();
            assert!((v - c(expect)).norm() < 1e-8);
        }
    }

    #[test]
    fn dilation_escape_detected() {
        let g = grid();
        let wide = Field::from_fn(g, |x| c((-x[0] * x[0] / 200.0).exp()));
        assert!(matches!(dyadic_dilate(&wide, 2), Err(Error::DilationEscapesGrid(_))));
        let sharp = Field::from_fn(g, |x| c((-x[0] * x[0] * 20.0).exp()));
        assert!(matches!(dyadic_dilate(&sharp, -3), Err(Error::DilationEscapesGrid(_))));
    }

    #[test]
    fn dilation_2d_gaussian() {
        let g = GridSpec::new(2, 128, 32.0).unwrap();
        let f = Field::from_fn(g, |x| c((-(x[0] * x[0] + x[1] * x[1]) / 2.0).exp()));
        let d = dyadic_dilate(&f, 1).unwrap();
        let err = g
            .coordinates()
            .zip(d.values())
            .map(|(x, v)| (v - c((-(x[0] * x[0] + x[1] * x[1]) / 8.0).exp())).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn dilation_commutes_with_levels() {
        let g = GridSpec::new(1, 1 << 17, 2048.0).unwrap();
        let f = shell_field(g, 6.0, 10.0);
        let band = feasible_band(&g).unwrap();
        let scale = f.max_abs();
        for m in -2i32..=2 {
            let dilated = dyadic_dilate(&f, m).unwrap();
            for j in band.levels().filter(|j| band.contains(j + m)) {
                let lhs = lp_project(&dilated, j).unwrap();
                let piece = lp_project(&f, j + m).unwrap();
                if piece.max_abs() < 1e-12 * scale {
                    // level only touches the edge of the spectrum: both sides are roundoff
                    assert!(lhs.max_abs() < 1e-10 * scale);
                    continue;
                }
                let rhs = dyadic_dilate(&piece, m).unwrap();
                let err = lhs.sub(&rhs).unwrap().max_abs();
                assert!(err < 1e-8 * scale, "m {m} j {j}: {err}");
            }
        }
    }

    #[test]
    fn translation_basics() {
        let g = GridSpec::new(1, 64, 8.0).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x[0].sin(), (2.0 * x[0]).cos()));
        assert_eq!(grid_translate(&f, &[0.0]).unwrap(), f);
        assert_eq!(grid_translate(&f, &[8.0]).unwrap(), f);
        let t = grid_translate(&f, &[3.0 * g.dx()]).unwrap();
        assert_eq!(t.values()[10], f.values()[7]);
        assert!(matches!(grid_translate(&f, &[0.3 * g.dx()]), Err(Error::NonGridShift(_))));
        let (a, b) = (forward_ft(&f), forward_ft(&t));
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert!((x.norm() - y.norm()).abs() < 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn translation_2d() {
        let g = GridSpec::new(2, 16, 4.0).unwrap();
        let f = Field::from_fn(g, |x| Complex64::new(x[0], x[1]));
        let t = grid_translate(&f, &[g.dx(), -2.0 * g.dx()]).unwrap();
        // t(a, b) = f(a - 1, b + 2)
        assert_eq!(t.values()[5 * 16 + 3], f.values()[4 * 16 + 5]);
    }
}
