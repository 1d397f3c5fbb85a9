//! Grid model, discrete Fourier transform and the Littlewood-Paley ladder.

mod band;
mod fourier;
mod grid;
mod ops;
mod profile;

pub use band::{feasible_band, BandLimits, KAPPA, SAFETY};
pub use fourier::{forward_ft, inverse_ft, inverse_ft_in_place, inverse_ft_owned};
pub use grid::{Field, GridSpec, Spectrum};
pub use ops::{dyadic_dilate, grid_translate, lp_project, LpAnalysis, DILATION_LEAK_TOL};
pub use profile::{band_partition, gamma_profile, lowpass_profile, pow2};
