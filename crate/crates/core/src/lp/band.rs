use super::grid::GridSpec;
use super::profile::pow2;
use crate::error::{Error, Result};

/// Minimum number of frequency bins spanning the lowest resolvable annulus.
pub const KAPPA: f64 = 4.0;
/// Fraction of the Nyquist frequency the highest annulus may reach.
pub const SAFETY: f64 = 0.9;

/// Dyadic levels `j_min..=j_max` whose annuli `2^{j-1} <= |xi| <= 3 2^{j-1}` the grid resolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandLimits {
    pub j_min: i32,
    pub j_max: i32,
}

impl BandLimits {
    pub fn contains(&self, j: i32) -> bool {
        (self.j_min..=self.j_max).contains(&j)
    }

    pub fn levels(&self) -> impl Iterator<Item = i32> {
        self.j_min..=self.j_max
    }

    pub fn count(&self) -> usize {
        (self.j_max - self.j_min + 1) as usize
    }

    /// Frequencies where the in-band generators sum to exactly one:
    /// `3 2^{j_min - 2} <= |xi| <= 2^{j_max}`.
    pub fn covered(&self) -> (f64, f64) {
        (3.0 * pow2(self.j_min - 2), pow2(self.j_max))
    }

    /// Frequencies touched by some in-band generator.
    pub fn support(&self) -> (f64, f64) {
        (pow2(self.j_min - 1), 3.0 * pow2(self.j_max - 1))
    }
}

/// Largest `j_max` with `3 2^{j_max - 1} <= SAFETY * xi_max` and smallest `j_min` with
/// `2^{j_min - 1} >= KAPPA * dxi`.
pub fn feasible_band(grid: &GridSpec) -> Result<BandLimits> {
    let top = SAFETY * grid.nyquist();
    let bottom = KAPPA * grid.dxi();
    let mut j_max = ((top / 3.0).log2().floor() as i32) + 1;
    // guard against log2 rounding at exact powers of two
    while 3.0 * pow2(j_max - 1) > top {
        j_max -= 1;
    }
    while 3.0 * pow2(j_max) <= top {
        j_max += 1;
    }
    let mut j_min = (bottom.log2().ceil() as i32) + 1;
    while pow2(j_min - 1) < bottom {
        j_min += 1;
    }
    while pow2(j_min - 2) >= bottom {
        j_min -= 1;
    }
    if j_min > j_max {
        return Err(Error::GridTooCoarse(format!(
            "no dyadic level fits between {bottom:.4e} and {top:.4e} (j_min {j_min} > j_max {j_max})"
        )));
    }
    Ok(BandLimits { j_min, j_max })
}
