//! Partial sums of the standard realization `sigma_0 u = sum_j Q_j u` and the low-frequency
//! Fourier mass that decides whether such sums stay controlled by the space norm.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{band_partition, forward_ft, inverse_ft_owned, Field, LpAnalysis, Spectrum};
use crate::spaces::{besov_norm_of, Family, SpaceParams};
use crate::szasz::{realization_conditions, SzaszQuery};

/// Radii swept by [`realization_sweep`].
pub const DEFAULT_RADII: [f64; 3] = [0.25, 1.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealizationReport {
    /// Truncation half-width: levels `-M..=M`.
    pub m: usize,
    pub radius: f64,
    pub low_mass: f64,
    /// Besov quasi-norm (same `s, r, q`) of the partial sum.
    pub besov: f64,
    pub feasible: bool,
}

/// Levels `-M..=M` clipped to the band; errors when the intersection is empty.
fn clipped_levels(analysis: &LpAnalysis, m: usize) -> Result<(i32, i32)> {
    let band = analysis.band();
    let m = i32::try_from(m).unwrap_or(i32::MAX);
    let lo = (-m).max(band.j_min);
    let hi = m.min(band.j_max);
    if lo > hi {
        let level = if -m > band.j_max { -m } else { m };
        return Err(Error::LevelOutOfBand { level, j_min: band.j_min, j_max: band.j_max });
    }
    Ok((lo, hi))
}

/// Spectrum of `sum_{j=-M}^{M} Q_j f` over in-band levels. The generators telescope, so the
/// whole sum is a single multiplier.
pub fn sigma0_partial_spectrum(analysis: &LpAnalysis, m: usize) -> Result<Spectrum> {
    let (lo, hi) = clipped_levels(analysis, m)?;
    Ok(analysis.filtered(|r| band_partition(r, lo, hi)).unwrap_or_else(|| Spectrum::zeros(*analysis.grid())))
}

/// `sum_{j=-M}^{M} Q_j f` over the levels the grid resolves.
pub fn sigma0_partial(f: &Field, m: usize) -> Result<Field> {
    let analysis = LpAnalysis::new(f)?;
    Ok(inverse_ft_owned(sigma0_partial_spectrum(&analysis, m)?))
}

/// `sum_{0 < |xi_k| <= R} |g_k| dxi^n`, the zero bin excluded.
pub fn low_frequency_mass_of(g: &Spectrum, radius: f64) -> Result<f64> {
    let grid = g.grid();
    if !(radius > grid.dxi()) {
        return Err(Error::RadiusBelowResolution { radius, resolution: grid.dxi() });
    }
    let radial = grid.radial_frequencies();
    let sum: f64 = g
        .coeffs()
        .iter()
        .zip(&radial)
        .enumerate()
        .filter(|&(idx, (_, &r))| idx != g.zero_slot() && r <= radius)
        .map(|(_, (c, _))| c.norm())
        .sum();
    Ok(sum * grid.freq_volume())
}

pub fn low_frequency_mass(f: &Field, radius: f64) -> Result<f64> {
    low_frequency_mass_of(&forward_ft(f), radius)
}

/// Whether the space admits a realization commuting with translations:
/// `s < n/r`, or `s = n/r` with `q <= 1` (B) or `r <= 1` (F).
pub fn realization_feasible(query: &SzaszQuery) -> bool {
    realization_conditions(query, &mut Vec::new())
}

/// Low-frequency mass and Besov norm of the partial sum of order `M` of a field given by its
/// spectrum.
pub fn realization_report_of(
    analysis: &LpAnalysis,
    query: &SzaszQuery,
    m: usize,
    radius: f64,
) -> Result<RealizationReport> {
    query.validate()?;
    let partial = LpAnalysis::from_spectrum(sigma0_partial_spectrum(analysis, m)?)?;
    let low_mass = low_frequency_mass_of(partial.spectrum(), radius)?;
    let params = SpaceParams { family: Family::B, ..query.space };
    let besov = besov_norm_of(&partial, &params)?;
    Ok(RealizationReport { m, radius, low_mass, besov, feasible: realization_feasible(query) })
}

pub fn realization_report(f: &Field, query: &SzaszQuery, m: usize, radius: f64) -> Result<RealizationReport> {
    realization_report_of(&LpAnalysis::new(f)?, query, m, radius)
}

/// Reports at each radius of [`DEFAULT_RADII`]; the bound must hold for every radius.
pub fn realization_sweep(f: &Field, query: &SzaszQuery, m: usize) -> Result<Vec<RealizationReport>> {
    let analysis = LpAnalysis::new(f)?;
    DEFAULT_RADII.iter().map(|&r| realization_report_of(&analysis, query, m, r)).collect()
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::lp::{feasible_band, grid_translate, lp_project, GridSpec};
    use crate::witnesses::{lowfreq_blowup_witness, random_bandlimited};

    fn grid() -> GridSpec {
        GridSpec::new(1, 1 << 14, 1024.0).unwrap()
    }

    #[test]
    fn zero_field() {
        let g = grid();
        assert_eq!(sigma0_partial(&Field::zeros(g), 3).unwrap().max_abs(), 0.0);
        assert_eq!(low_frequency_mass(&Field::zeros(g), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn reproduces_band_limited_fields() {
        let g = grid();
        let band = feasible_band(&g).unwrap();
        let f = random_bandlimited(&g, 4, -2, 3).unwrap();
        let m = band.j_max.max(-band.j_min) as usize;
        assert!(sigma0_partial(&f, m).unwrap().sub(&f).unwrap().max_abs() < 1e-10 * f.max_abs());
        assert!(sigma0_partial(&f, 4).unwrap().sub(&f).unwrap().max_abs() < 1e-10 * f.max_abs());
    }

    #[test]
    fn telescoping_increment() {
        let g = grid();
        let f = random_bandlimited(&g, 9, -3, 4).unwrap();
        for m in 1..3usize {
            let step = sigma0_partial(&f, m + 1).unwrap().sub(&sigma0_partial(&f, m).unwrap()).unwrap();
            let j = m as i32 + 1;
            let expect = lp_project(&f, -j).unwrap().add(&lp_project(&f, j).unwrap()).unwrap();
            assert!(step.sub(&expect).unwrap().max_abs() < 1e-12 * f.max_abs().max(1.0));
        }
    }

    #[test]
    fn empty_level_range_rejected() {
        let g = GridSpec::new(1, 4096, 64.0).unwrap();
        // band 0..=6 always contains level 0, so every M is admissible there
        assert!(sigma0_partial(&Field::zeros(g), 0).is_ok());
        let high = GridSpec::new(1, 1 << 12, 1.0).unwrap();
        let band = feasible_band(&high).unwrap();
        assert!(band.j_min > 1);
        assert!(matches!(sigma0_partial(&Field::zeros(high), 1), Err(Error::LevelOutOfBand { .. })));
    }

    #[test]
    fn commutes_with_translations() {
        let g = grid();
        let f = random_bandlimited(&g, 2, -4, 4).unwrap();
        let a = [123.0 * g.dx()];
        for m in [1usize, 3] {
            let lhs = sigma0_partial(&grid_translate(&f, &a).unwrap(), m).unwrap();
            let rhs = grid_translate(&sigma0_partial(&f, m).unwrap(), &a).unwrap();
            assert!(lhs.sub(&rhs).unwrap().max_abs() < 1e-12 * f.max_abs().max(1.0));
        }
    }

    #[test]
    fn mass_counts_only_the_ball() {
        let g = grid();
        let f = random_bandlimited(&g, 1, 2, 4).unwrap();
        // spectrum starts at 3/4 * 4 = 3
        assert!(low_frequency_mass_of(&forward_ft(&f), 2.5).unwrap() < 1e-12);
        let mut s = Spectrum::zeros(g);
        s.coeffs_mut()[0] = Complex64::new(9.0, 0.0);
        s.coeffs_mut()[3] = Complex64::new(0.0, 2.0);
        s.coeffs_mut()[g.samples() - 3] = Complex64::new(1.0, 0.0);
        let mass = low_frequency_mass_of(&s, 4.0 * g.dxi()).unwrap();
        assert!((mass - 3.0 * g.dxi()).abs() < 1e-15);
        assert!(matches!(low_frequency_mass_of(&s, 0.5 * g.dxi()), Err(Error::RadiusBelowResolution { .. })));
    }

    #[test]
    fn feasibility_conditions() {
        let q = |fam, s, r, qq| SzaszQuery::homogeneous(fam, s, r, 2.0, qq, 1).unwrap();
        assert!(realization_feasible(&q(Family::B, 0.0, 2.0, 2.0)));
        assert!(realization_feasible(&q(Family::B, 0.5, 2.0, 1.0)));
        assert!(!realization_feasible(&q(Family::B, 0.5, 2.0, 1.5)));
        assert!(!realization_feasible(&q(Family::F, 0.5, 2.0, 0.5)));
        assert!(realization_feasible(&q(Family::F, 1.0, 1.0, 7.0)));
        assert!(!realization_feasible(&q(Family::B, 2.0, 2.0, 2.0)));
    }

    #[test]
    fn blowup_mass_grows_while_norm_settles() {
        let g = GridSpec::new(1, 1 << 16, 4096.0).unwrap();
        let q = SzaszQuery::homogeneous(Family::B, 2.0, 2.0, 2.0, 2.0, 1).unwrap();
        let mut prev: Option<RealizationReport> = None;
        let mut first_besov = 0.0;
        let band = feasible_band(&g).unwrap();
        for m in 2..=(-band.j_min) as usize {
            let f = lowfreq_blowup_witness(&g, m, 2.0, 2.0).unwrap();
            let rep = realization_report(&f, &q, 20, 1.0).unwrap();
            assert!(!rep.feasible);
            if let Some(p) = prev {
                assert!(rep.low_mass / p.low_mass >= 1.8, "M {m}: {} -> {}", p.low_mass, rep.low_mass);
            } else {
                first_besov = rep.besov;
            }
            assert!((rep.besov / first_besov - 1.0).abs() < 0.1);
            prev = Some(rep);
        }
        let sweep = realization_sweep(&lowfreq_blowup_witness(&g, 3, 2.0, 2.0).unwrap(), &q, 20).unwrap();
        assert_eq!(sweep.len(), 3);
        assert!(sweep[0].low_mass <= sweep[1].low_mass && sweep[1].low_mass <= sweep[2].low_mass);
    }
}
