//! Named one-dimensional grids used by experiments and the command line.
//!
//! | name        | samples | box length | feasible levels | used for                               |
//! |-------------|---------|------------|-----------------|----------------------------------------|
//! | `hi-band`   | 2^23    | 64         | 0..=17          | modulated witnesses up to 16 terms     |
//! | `mid-band`  | 2^21    | 64         | 0..=15          | random band-limited fields, 16 levels  |
//! | `lo-band`   | 2^20    | 2^16       | -10..=4         | low-frequency dilations down to 2^-10  |
//!
//! A modulated term at frequency `2^k` straddles levels `k` and `k + 1`, so 16 terms need level 17.
//! The low-pass bump behind the modulated terms spans 11 frequency bins on the 64-wide boxes.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lp::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridPreset {
    HiBand,
    MidBand,
    LoBand,
}

impl GridPreset {
    pub const ALL: [GridPreset; 3] = [GridPreset::HiBand, GridPreset::MidBand, GridPreset::LoBand];

    pub fn name(self) -> &'static str {
        match self {
            GridPreset::HiBand => "hi-band",
            GridPreset::MidBand => "mid-band",
            GridPreset::LoBand => "lo-band",
        }
    }

    /// `(samples, length)` of the one-dimensional grid.
    pub fn shape(self) -> (usize, f64) {
        match self {
            GridPreset::HiBand => (1 << 23, 64.0),
            GridPreset::MidBand => (1 << 21, 64.0),
            GridPreset::LoBand => (1 << 20, 65536.0),
        }
    }

    pub fn grid(self) -> GridSpec {
        let (n, l) = self.shape();
        GridSpec::new(1, n, l).expect("preset grids are valid")
    }
}

impl fmt::Display for GridPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GridPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GridPreset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            Error::InvalidParams(format!("unknown grid preset {s:?}, expected hi-band, mid-band or lo-band"))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lp::{feasible_band, BandLimits};

    #[test]
    fn documented_bands() {
        let expect = [(0, 17), (0, 15), (-10, 4)];
        for (p, (j_min, j_max)) in GridPreset::ALL.into_iter().zip(expect) {
            assert_eq!(feasible_band(&p.grid()).unwrap(), BandLimits { j_min, j_max }, "{p}");
        }
    }

    #[test]
    fn names_round_trip() {
        for p in GridPreset::ALL {
            assert_eq!(p.name().parse::<GridPreset>().unwrap(), p);
        }
        assert!("wide".parse::<GridPreset>().is_err());
    }
}
