//! Discrete approximation of `F(f)(xi) = int f(x) e^{-i x.xi} dx` on the periodic grid.
//!
//! With `x_i = -L/2 + i dx` and `xi_k = (2 pi / L) k`, the phase `e^{-i x_i xi_k}` factors as
//! `(-1)^k e^{-2 pi i ik/N}`, so the transform is a plain FFT followed by a sign flip per axis
//! and the quadrature weight `dx^n`. The inverse undoes exactly these steps.

use std::cell::RefCell;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::grid::{Field, GridSpec, Spectrum};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    // the planner caches plans internally; a poisoned lock still holds a usable planner
    let mut guard = planner().lock().unwrap_or_else(|e| e.into_inner());
    guard.plan_fft(len, direction)
}

thread_local! {
    // large transforms need a scratch buffer as long as the data; keep it between calls
    static SCRATCH: RefCell<Vec<Complex64>> = const { RefCell::new(Vec::new()) };
}

/// Unnormalized in-place FFT over every axis of a row-major `N^dim` array.
fn transform_axes(data: &mut [Complex64], grid: &GridSpec, direction: FftDirection) {
    let n = grid.samples();
    let fft = plan(n, direction);
    SCRATCH.with(|cell| {
        let mut scratch = cell.borrow_mut();
        let need = fft.get_inplace_scratch_len();
        if scratch.len() < need {
            scratch.resize(need, Complex64::default());
        }
        // rows (last axis) are contiguous
        fft.process_with_scratch(data, &mut scratch[..need]);
    });
    if grid.dim() == 2 {
        let mut column = vec![Complex64::default(); n];
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        for c in 0..n {
            for r in 0..n {
                column[r] = data[r * n + c];
            }
            fft.process_with_scratch(&mut column, &mut scratch);
            for r in 0..n {
                data[r * n + c] = column[r];
            }
        }
    }
}

/// Multiply by `(-1)^(sum of axis indices)`.
fn alternate_signs(data: &mut [Complex64], grid: &GridSpec) {
    let n = grid.samples();
    match grid.dim() {
        1 => data.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v),
        _ => {
            for (flat, v) in data.iter_mut().enumerate() {
                if ((flat / n) + (flat % n)) % 2 == 1 {
                    *v = -*v;
                }
            }
        }
    }
}

/// `coeffs[k] = dx^n sum_i f(x_i) e^{-i x_i . xi_k}`.
pub fn forward_ft(f: &Field) -> Spectrum {
    let grid = *f.grid();
    let mut data = f.values().to_vec();
    transform_axes(&mut data, &grid, FftDirection::Forward);
    alternate_signs(&mut data, &grid);
    let w = grid.cell_volume();
    data.iter_mut().for_each(|v| *v *= w);
    Spectrum::new(grid, data).expect("length preserved")
}

/// Exact discrete inverse of [`forward_ft`].
pub fn inverse_ft(g: &Spectrum) -> Field {
    inverse_ft_owned(g.clone())
}

/// [`inverse_ft`] reusing the spectrum's storage.
pub fn inverse_ft_owned(g: Spectrum) -> Field {
    let grid = *g.grid();
    let mut data = g.into_coeffs();
    inverse_ft_in_place(&mut data, &grid);
    Field::new(grid, data).expect("length preserved")
}

/// [`inverse_ft`] on raw coefficients laid out as for `grid`, overwritten by the samples.
pub fn inverse_ft_in_place(data: &mut [Complex64], grid: &GridSpec) {
    assert_eq!(data.len(), grid.len(), "buffer does not match the grid");
    alternate_signs(data, grid);
    transform_axes(data, grid, FftDirection::Inverse);
    let w = 1.0 / (grid.len() as f64 * grid.cell_volume());
    data.iter_mut().for_each(|v| *v *= w);
}
