//! Numerical workbench for Littlewood-Paley analysis on sampled fields.
//!
//! The crate computes homogeneous and inhomogeneous Besov and Triebel-Lizorkin quasi-norms from
//! dyadic spectral pieces, evaluates the weighted Fourier-side functional
//! `(int |xi|^{theta p} |F u(xi)|^p dxi)^{1/p}`, decides for which parameter systems that
//! functional is bounded by the space quasi-norm, and builds the families of fields that show
//! the boundary cases are sharp.

pub mod cli;
pub mod error;
pub mod lp;
pub mod presets;
pub mod realization;
pub mod spaces;
pub mod szasz;
pub mod witnesses;

pub use error::{Error, Result};
