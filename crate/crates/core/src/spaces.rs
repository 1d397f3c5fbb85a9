//! Besov and Triebel-Lizorkin quasi-norms assembled from Littlewood-Paley pieces.
//!
//! Homogeneous norms sum over the feasible band of the grid and ignore the zero-frequency bin,
//! which is the grid's stand-in for working modulo polynomials. Inhomogeneous norms replace all
//! levels `j <= 0` by the low-pass piece `S_0 f` with multiplier `lowpass_profile(|xi|)`.
//! Exponents below one give quasi-norms; the same formulas are used throughout.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use num_complex::Complex64;

use crate::lp::{band_partition, forward_ft, lowpass_profile, pow2, Field, LpAnalysis};

/// Relative out-of-band spectral energy above which a norm evaluation warns.
pub const OUT_OF_BAND_WARN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Besov scale: `l_q` over levels of `L_r` norms.
    B,
    /// Triebel-Lizorkin scale: `L_r` norm of the pointwise `l_q` sum over levels.
    F,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Homogeneous,
    Inhomogeneous,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::B => "B",
            Family::F => "F",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" | "b" => Ok(Family::B),
            "F" | "f" => Ok(Family::F),
            other => Err(Error::InvalidParams(format!("unknown family {other:?}, expected B or F"))),
        }
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Setting::Homogeneous => "homogeneous",
            Setting::Inhomogeneous => "inhomogeneous",
        })
    }
}

impl FromStr for Setting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "homogeneous" | "hom" => Ok(Setting::Homogeneous),
            "inhomogeneous" | "inhom" => Ok(Setting::Inhomogeneous),
            other => Err(Error::InvalidParams(format!(
                "unknown setting {other:?}, expected homogeneous or inhomogeneous"
            ))),
        }
    }
}

/// Parameters `(s, r, q)` of a function space; `f64::INFINITY` encodes an infinite exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub s: f64,
    pub r: f64,
    pub q: f64,
    pub family: Family,
    pub setting: Setting,
}

impl SpaceParams {
    pub fn new(s: f64, r: f64, q: f64, family: Family, setting: Setting) -> Result<Self> {
        let p = Self { s, r, q, family, setting };
        p.validate()?;
        Ok(p)
    }

    pub fn homogeneous(s: f64, r: f64, q: f64, family: Family) -> Result<Self> {
        Self::new(s, r, q, family, Setting::Homogeneous)
    }

    /// Checks everything a norm evaluation needs, including `r < inf` for the F scale.
    pub fn validate(&self) -> Result<()> {
        self.validate_exponents()?;
        if self.family == Family::F && self.r.is_infinite() {
            return Err(Error::InfiniteRInTriebel);
        }
        Ok(())
    }

    /// Finite `s` and `r, q` in `(0, inf]`; enough for classification.
    pub fn validate_exponents(&self) -> Result<()> {
        if !self.s.is_finite() {
            return Err(Error::InvalidParams(format!("smoothness s = {} must be finite", self.s)));
        }
        for (name, v) in [("r", self.r), ("q", self.q)] {
            if v.is_nan() || v <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} = {v} must lie in (0, inf]")));
            }
        }
        Ok(())
    }
}

/// `(sum_i |f(x_i)|^r dx^n)^{1/r}`, or the sample maximum for `r = inf`.
pub fn lr_quasinorm(f: &Field, r: f64) -> Result<f64> {
    check_exponent(r)?;
    Ok(lr_of_squares(f.values().iter().map(|v| v.norm_sqr()), r, f.grid().cell_volume()))
}

pub(crate) fn check_exponent(r: f64) -> Result<()> {
    if r.is_nan() || r <= 0.0 {
        Err(Error::InvalidExponent(r))
    } else {
        Ok(())
    }
}

/// Riemann-sum `L_r` quasi-norm with cell weight `w`, from squared moduli.
fn lr_of_squares(squares: impl Iterator<Item = f64>, r: f64, w: f64) -> f64 {
    if r.is_infinite() {
        squares.fold(0.0, f64::max).sqrt()
    } else if r == 2.0 {
        (squares.sum::<f64>() * w).sqrt()
    } else if r == 1.0 {
        squares.map(f64::sqrt).sum::<f64>() * w
    } else {
        let half = 0.5 * r;
        let sum: f64 = squares.filter(|&m| m != 0.0).map(|m| m.powf(half)).sum();
        (sum * w).powf(1.0 / r)
    }
}

/// Accumulates an `l_q` quasi-norm term by term in a fixed order.
#[derive(Debug, Clone, Copy)]
struct LqAccumulator {
    q: f64,
    acc: f64,
}

impl LqAccumulator {
    fn new(q: f64) -> Self {
        Self { q, acc: 0.0 }
    }

    fn push(&mut self, term: f64) {
        if self.q.is_infinite() {
            self.acc = self.acc.max(term);
        } else if term != 0.0 {
            self.acc += term.powf(self.q);
        }
    }

    fn finish(self) -> f64 {
        if self.q.is_infinite() {
            self.acc
        } else {
            self.acc.powf(1.0 / self.q)
        }
    }
}

/// Visits the pieces entering a norm in increasing level order as `(weight 2^{js}, samples)`.
/// The inhomogeneous low-pass piece comes first with weight 1; vanishing pieces are skipped.
fn for_each_piece(
    analysis: &LpAnalysis,
    params: &SpaceParams,
    mut visit: impl FnMut(f64, &[Complex64]) -> Result<()>,
) -> Result<()> {
    let band = analysis.band();
    let mut buf = Vec::new();
    let levels = match params.setting {
        Setting::Homogeneous => band.j_min..=band.j_max,
        Setting::Inhomogeneous => {
            if analysis.multiplier_into(lowpass_profile, &mut buf) {
                visit(1.0, &buf)?;
            }
            1..=band.j_max
        }
    };
    for j in levels {
        if analysis.level_into(j, &mut buf) {
            visit(pow2(j).powf(params.s), &buf)?;
        }
    }
    Ok(())
}

/// Fraction of spectral energy the truncated ladder misses (zero bin excluded when homogeneous).
pub fn out_of_band_fraction(analysis: &LpAnalysis, setting: Setting) -> f64 {
    let band = analysis.band();
    let mut total = 0.0;
    let mut missed = 0.0;
    for (idx, (c, &r)) in analysis.spectrum().coeffs().iter().zip(analysis.radial()).enumerate() {
        let e = c.norm_sqr();
        let cover = match setting {
            Setting::Homogeneous => {
                if idx == 0 {
                    continue;
                }
                band_partition(r, band.j_min, band.j_max)
            }
            Setting::Inhomogeneous => lowpass_profile(r * pow2(-band.j_max)),
        };
        total += e;
        missed += e * (1.0 - cover).powi(2);
    }
    if total == 0.0 {
        0.0
    } else {
        missed / total
    }
}

fn warn_out_of_band(analysis: &LpAnalysis, setting: Setting) {
    let frac = out_of_band_fraction(analysis, setting);
    if frac > OUT_OF_BAND_WARN {
        log::warn!("spectral energy outside the resolved band: relative {frac:.3e}");
    }
}

/// Besov quasi-norm `(sum_j (2^{js} ||Q_j f||_r)^q)^{1/q}` over the resolved ladder.
pub fn besov_norm(f: &Field, params: &SpaceParams) -> Result<f64> {
    besov_norm_of(&LpAnalysis::new(f)?, params)
}

pub fn besov_norm_of(analysis: &LpAnalysis, params: &SpaceParams) -> Result<f64> {
    params.validate()?;
    if params.family != Family::B {
        return Err(Error::InvalidParams("besov_norm needs family B".into()));
    }
    warn_out_of_band(analysis, params.setting);
    let mut acc = LqAccumulator::new(params.q);
    let cell = analysis.grid().cell_volume();
    for_each_piece(analysis, params, |weight, piece| {
        acc.push(weight * lr_of_squares(piece.iter().map(|v| v.norm_sqr()), params.r, cell));
        Ok(())
    })?;
    Ok(acc.finish())
}

/// Triebel-Lizorkin quasi-norm `|| (sum_j (2^{js} |Q_j f|)^q)^{1/q} ||_r`.
pub fn triebel_norm(f: &Field, params: &SpaceParams) -> Result<f64> {
    triebel_norm_of(&LpAnalysis::new(f)?, params)
}

pub fn triebel_norm_of(analysis: &LpAnalysis, params: &SpaceParams) -> Result<f64> {
    params.validate()?;
    if params.family != Family::F {
        return Err(Error::InvalidParams("triebel_norm needs family F".into()));
    }
    warn_out_of_band(analysis, params.setting);
    let grid = *analysis.grid();
    let q = params.q;
    let half_q = 0.5 * q;
    // pointwise sums of (2^{js} |Q_j f|)^q, carried through squared moduli
    let mut acc = vec![0.0f64; grid.len()];
    for_each_piece(analysis, params, |weight, piece| {
        let w2 = weight * weight;
        for (a, v) in acc.iter_mut().zip(piece) {
            let sq = w2 * v.norm_sqr();
            if q.is_infinite() {
                *a = a.max(sq);
            } else if q == 2.0 {
                *a += sq;
            } else if sq != 0.0 {
                *a += sq.powf(half_q);
            }
        }
        Ok(())
    })?;
    let squares = acc.into_iter().map(|a| if q.is_infinite() || q == 2.0 { a } else { a.powf(2.0 / q) });
    Ok(lr_of_squares(squares, params.r, grid.cell_volume()))
}

/// Dispatches on the family.
pub fn space_norm(f: &Field, params: &SpaceParams) -> Result<f64> {
    space_norm_of(&LpAnalysis::from_spectrum(forward_ft(f))?, params)
}

pub fn space_norm_of(analysis: &LpAnalysis, params: &SpaceParams) -> Result<f64> {
    match params.family {
        Family::B => besov_norm_of(analysis, params),
        Family::F => triebel_norm_of(analysis, params),
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::lp::{dyadic_dilate, feasible_band, grid_translate, inverse_ft, GridSpec, Spectrum};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn shell(g: GridSpec, lo: f64, hi: f64) -> Field {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        inverse_ft(&Spectrum::from_fn(g, |xi| {
            let r = xi[0].hypot(xi[1]);
            Complex64::from_polar(lowpass_profile(1.0 + 0.5 * ((r - mid) / half).abs()), 0.3 * xi[0])
        }))
    }

    fn hom(s: f64, r: f64, q: f64, fam: Family) -> SpaceParams {
        SpaceParams::homogeneous(s, r, q, fam).unwrap()
    }

    #[test]
    fn lr_basics() {
        let g = GridSpec::new(1, 4096, 64.0).unwrap();
        assert_eq!(lr_quasinorm(&Field::zeros(g), 2.0).unwrap(), 0.0);
        // constant modulus 3 on M = 100 samples
        let mut f = Field::zeros(g);
        for v in f.values_mut().iter_mut().take(100) {
            *v = Complex64::from_polar(3.0, 1.0);
        }
        let expect = 3.0 * (100.0 * g.dx()).sqrt();
        assert!((lr_quasinorm(&f, 2.0).unwrap() - expect).abs() < 1e-12);
        assert_eq!(lr_quasinorm(&f, f64::INFINITY).unwrap(), 3.0);
        assert!(matches!(lr_quasinorm(&f, 0.0), Err(Error::InvalidExponent(_))));
        assert!(matches!(lr_quasinorm(&f, -1.0), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn lr_gaussian() {
        // int e^{-x^2} dx = sqrt(pi)
        let g = GridSpec::new(1, 4096, 64.0).unwrap();
        let f = Field::from_fn(g, |x| c((-x[0] * x[0] / 2.0).exp()));
        let v = lr_quasinorm(&f, 2.0).unwrap();
        assert!((v - std::f64::consts::PI.powf(0.25)).abs() < 1e-6);
    }

    #[test]
    fn params_validation() {
        assert!(SpaceParams::homogeneous(0.0, f64::INFINITY, 1.0, Family::F).is_err());
        assert!(SpaceParams::homogeneous(0.0, f64::INFINITY, 1.0, Family::B).is_ok());
        assert!(SpaceParams::homogeneous(0.0, 0.0, 1.0, Family::B).is_err());
        assert!(SpaceParams::homogeneous(0.0, 1.0, -2.0, Family::B).is_err());
        assert!(SpaceParams::homogeneous(f64::NAN, 1.0, 1.0, Family::B).is_err());
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let g = GridSpec::new(1, 1024, 64.0).unwrap();
        let z = Field::zeros(g);
        assert_eq!(besov_norm(&z, &hom(1.0, 2.0, 2.0, Family::B)).unwrap(), 0.0);
        assert_eq!(triebel_norm(&z, &hom(1.0, 2.0, 2.0, Family::F)).unwrap(), 0.0);
    }

    #[test]
    fn single_band_field() {
        let g = GridSpec::new(1, 4096, 64.0).unwrap();
        let j0 = 4;
        let f = shell(g, 0.75 * 16.0, 16.0);
        for (s, r, q) in [(0.0, 2.0, 2.0), (0.7, 1.0, 3.0), (-1.0, 0.5, 0.5), (2.0, 4.0, f64::INFINITY)] {
            let expect = pow2(j0).powf(s) * lr_quasinorm(&f, r).unwrap();
            let b = besov_norm(&f, &hom(s, r, q, Family::B)).unwrap();
            let t = triebel_norm(&f, &hom(s, r, q, Family::F)).unwrap();
            // exponents below one magnify the FFT roundoff floor of the neighbouring levels
            let tol = if r < 1.0 || q < 1.0 { 1e-5 } else { 1e-10 };
            assert!((b - expect).abs() < tol * expect, "B {s} {r} {q}: {b} vs {expect}");
            assert!((t - expect).abs() < tol * expect, "F {s} {r} {q}: {t} vs {expect}");
        }
    }

    #[test]
    fn triebel_equals_besov_when_q_equals_r() {
        let g = GridSpec::new(1, 4096, 64.0).unwrap();
        let f = shell(g, 1.0, 40.0);
        for (s, r) in [(0.0, 2.0), (0.5, 1.0), (-0.3, 0.7), (1.2, 3.0)] {
            let b = besov_norm(&f, &hom(s, r, r, Family::B)).unwrap();
            let t = triebel_norm(&f, &hom(s, r, r, Family::F)).unwrap();
            assert!((b - t).abs() < 1e-12 * b, "{s} {r}: {b} vs {t}");
        }
    }

    #[test]
    fn family_mismatch_rejected() {
        let g = GridSpec::new(1, 256, 64.0).unwrap();
        let f = Field::zeros(g);
        assert!(besov_norm(&f, &hom(0.0, 2.0, 2.0, Family::F)).is_err());
        assert!(triebel_norm(&f, &hom(0.0, 2.0, 2.0, Family::B)).is_err());
    }

    #[test]
    fn homogeneity_in_scalar() {
        let g = GridSpec::new(1, 2048, 64.0).unwrap();
        let f = shell(g, 2.0, 20.0);
        let alpha = Complex64::new(-2.5, 1.25);
        for p in [hom(0.3, 1.5, 0.8, Family::B), hom(0.3, 1.5, 0.8, Family::F)] {
            let a = space_norm(&f.scale(alpha), &p).unwrap();
            let b = space_norm(&f, &p).unwrap();
            assert!((a - alpha.norm() * b).abs() < 1e-13 * a);
        }
    }

    #[test]
    fn translation_invariance() {
        let g = GridSpec::new(1, 2048, 64.0).unwrap();
        let f = shell(g, 2.0, 20.0);
        let t = grid_translate(&f, &[37.0 * g.dx()]).unwrap();
        for p in [hom(0.3, 1.5, 0.8, Family::B), hom(-0.5, 1.0, 2.0, Family::F)] {
            let a = space_norm(&t, &p).unwrap();
            let b = space_norm(&f, &p).unwrap();
            assert!((a - b).abs() < 1e-10 * b);
        }
    }

    #[test]
    fn dyadic_scaling_law() {
        let g = GridSpec::new(1, 1 << 16, 1024.0).unwrap();
        let f = shell(g, 3.0, 6.0);
        let n = 1.0;
        for p in
            [hom(0.0, 2.0, 2.0, Family::B), hom(0.5, 1.0, 1.5, Family::B), hom(-0.4, 1.5, 3.0, Family::F)]
        {
            let base = space_norm(&f, &p).unwrap();
            for m in -2..=2 {
                let d = dyadic_dilate(&f, m).unwrap();
                let ratio = space_norm(&d, &p).unwrap() / base;
                let expect = pow2(m).powf(n / p.r - p.s);
                assert!((ratio / expect - 1.0).abs() < 1e-3, "{p:?} m {m}: {ratio} vs {expect}");
            }
        }
    }

    #[test]
    fn besov_monotone_in_q() {
        let g = GridSpec::new(1, 4096, 64.0).unwrap();
        let f = shell(g, 1.0, 60.0);
        let mut prev = f64::INFINITY;
        for q in [0.5, 1.0, 2.0, f64::INFINITY] {
            let v = besov_norm(&f, &hom(0.2, 1.5, q, Family::B)).unwrap();
            assert!(v <= prev * (1.0 + 1e-14));
            prev = v;
        }
    }

    #[test]
    fn inhomogeneous_low_pass_plus_levels_is_identity() {
        // S_0 + sum_{j>=1} Q_j reproduces f when f sits below 2^{j_max}
        let g = GridSpec::new(1, 4096, 64.0).unwrap();
        let f = Field::from_fn(g, |x| c((-x[0] * x[0] / 2.0).exp()));
        let an = LpAnalysis::new(&f).unwrap();
        let band = feasible_band(&g).unwrap();
        let mut acc = inverse_ft(&an.filtered(lowpass_profile).unwrap());
        for j in 1..=band.j_max {
            if let Some(q) = an.level_unchecked(j) {
                acc = acc.add(&q).unwrap();
            }
        }
        assert!(acc.sub(&f).unwrap().max_abs() < 1e-12);
        let p = SpaceParams::new(0.0, 2.0, 2.0, Family::B, Setting::Inhomogeneous).unwrap();
        assert!(besov_norm(&f, &p).unwrap() > 0.0);
        assert!(out_of_band_fraction(&an, Setting::Inhomogeneous) < 1e-20);
        // the homogeneous ladder misses the low frequencies of a Gaussian
        assert!(out_of_band_fraction(&an, Setting::Homogeneous) > 1e-3);
    }
}
