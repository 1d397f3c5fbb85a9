//! Fields that probe the inequality: counterexample families whose ratio diverges when a
//! condition fails, and random band-limited fields for the cases where it holds.
//!
//! Every construction is spectral. Terms live on exact frequency supports (shells
//! `C_k = {3/4 2^k <= |xi| <= 5/4 2^k}` or level plateaus), so norms and the weighted
//! functional can be evaluated from the constructed spectrum without transform roundoff.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{
    feasible_band, inverse_ft, inverse_ft_owned, lowpass_profile, pow2, BandLimits, Field, GridSpec,
    LpAnalysis, Spectrum, KAPPA, SAFETY,
};
use crate::spaces::lr_quasinorm;
use crate::szasz::{ratio_parts, SzaszQuery};

/// Minimum number of bins across the support `|xi| <= 1/2` of the low-pass bump.
pub const MIN_BUMP_BINS: usize = 8;

/// Fraction of `s - n/r` kept as geometric decay of the Besov summands of the low-frequency
/// blow-up witness; the rest drives the growth of the low-frequency mass.
pub const BLOWUP_DECAY_FRACTION: f64 = 13.0 / 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// `sum_k k 2^{-k theta} e^{i 2^k x_1} phi(x)`.
    Modulated,
    /// `sum_k k^{-1/p} 2^{-k theta} e^{i 2^k x_1} phi(x)`.
    ModulatedBorderline,
    /// `sum_k k^{-1/p} 2^{k(s - n/r)} psi(2^{-k} x)`.
    DilatedLow,
    /// Independent random pieces on the top `K` levels of the grid, balanced per level.
    RandomBandlimited,
    /// Low-frequency dilations whose Fourier mass near the origin grows geometrically.
    LowfreqBlowup,
}

impl WitnessKind {
    pub const ALL: [WitnessKind; 5] = [
        WitnessKind::Modulated,
        WitnessKind::ModulatedBorderline,
        WitnessKind::DilatedLow,
        WitnessKind::RandomBandlimited,
        WitnessKind::LowfreqBlowup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::Modulated => "modulated",
            WitnessKind::ModulatedBorderline => "modulated_borderline",
            WitnessKind::DilatedLow => "dilated_low",
            WitnessKind::RandomBandlimited => "random_bandlimited",
            WitnessKind::LowfreqBlowup => "lowfreq_blowup",
        }
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WitnessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        WitnessKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown witness kind {s:?}")))
    }
}

/// Coefficients of the modulated terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weights {
    /// `a_k = k 2^{-k theta}`.
    Linear,
    /// `a_k = k^{-1/p} 2^{-k theta}`.
    InverseRoot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSpec {
    pub kind: WitnessKind,
    /// Number of terms, or of levels for the random kind.
    pub size: usize,
    pub query: SzaszQuery,
    /// Only used by the random kind.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub size: usize,
    pub space_norm: f64,
    pub lhs: f64,
    pub ratio: f64,
}

/// Records for the sizes that succeeded, plus the error that stopped the run, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub records: Vec<ExperimentRecord>,
    pub error: Option<Error>,
}

/// The shell `C_k`.
pub fn shell_bounds(k: i32) -> (f64, f64) {
    (0.75 * pow2(k), 1.25 * pow2(k))
}

/// Nonzero spectral coefficients, kept sparse so that shifted and rescaled copies are cheap.
#[derive(Debug, Clone)]
struct SparseSpectrum {
    grid: GridSpec,
    entries: Vec<(usize, Complex64)>,
}

impl SparseSpectrum {
    /// Only visits the bins inside `|xi| <= radius`.
    fn sample_ball(grid: GridSpec, radius: f64, g: impl Fn([f64; 2]) -> Complex64) -> Self {
        let reach = (radius / grid.dxi()).floor() as i64;
        let axis: Vec<i64> = (-reach..=reach).filter(|&k| grid.freq_slot(k).is_some()).collect();
        let mut entries = Vec::new();
        let cols: &[i64] = if grid.dim() == 1 { &[0] } else { &axis };
        for &a in &axis {
            for &b in cols {
                let xi = [a as f64 * grid.dxi(), b as f64 * grid.dxi()];
                let v = g(xi);
                if v != Complex64::new(0.0, 0.0) {
                    let ia = grid.freq_slot(a).expect("filtered");
                    let flat = if grid.dim() == 1 {
                        ia
                    } else {
                        ia * grid.samples() + grid.freq_slot(b).expect("filtered")
                    };
                    entries.push((flat, v));
                }
            }
        }
        entries.sort_by_key(|e| e.0);
        Self { grid, entries }
    }

    fn energy(&self) -> f64 {
        self.entries.iter().map(|(_, v)| v.norm_sqr()).sum::<f64>() * self.grid.freq_volume()
    }

    fn scale(&mut self, alpha: f64) {
        for (_, v) in &mut self.entries {
            *v *= alpha;
        }
    }

    fn add_into(&self, out: &mut Spectrum, alpha: Complex64) {
        let coeffs = out.coeffs_mut();
        for &(idx, v) in &self.entries {
            coeffs[idx] += alpha * v;
        }
    }

    /// Copy shifted by `bins` frequency bins along the first axis.
    fn shifted(&self, bins: i64) -> Result<Self> {
        let g = self.grid;
        let mut entries = Vec::with_capacity(self.entries.len());
        for &(flat, v) in &self.entries {
            let [a, b] = g.unflatten(flat);
            let k = g.freq_index(a) + bins;
            let slot = g.freq_slot(k).ok_or_else(|| {
                Error::GridTooCoarse(format!("shift by {bins} bins leaves the frequency grid"))
            })?;
            let flat = if g.dim() == 1 { slot } else { slot * g.samples() + b };
            entries.push((flat, v));
        }
        Ok(Self { grid: g, entries })
    }

    fn to_spectrum(&self) -> Spectrum {
        let mut s = Spectrum::zeros(self.grid);
        self.add_into(&mut s, Complex64::new(1.0, 0.0));
        s
    }

    /// Rescale so that the field has unit `L_2` norm, using the discrete Plancherel identity.
    fn normalize_l2(&mut self) {
        let target = (2.0 * PI).powi(self.grid.dim() as i32);
        let e = self.energy();
        if e > 0.0 {
            self.scale((target / e).sqrt());
        }
    }
}

/// Spectrum of the low-pass bump: `lowpass_profile(1 + |xi|)`, one at the origin and zero for
/// `|xi| >= 1/2`, normalized to a unit `L_2` field.
fn phi_sparse(grid: &GridSpec) -> Result<SparseSpectrum> {
    let across = 2 * (0.5 / grid.dxi()).floor() as usize + 1;
    if across < MIN_BUMP_BINS || 0.5 >= grid.nyquist() {
        return Err(Error::GridTooCoarse(format!(
            "|xi| <= 1/2 spans {across} bins, need at least {MIN_BUMP_BINS}"
        )));
    }
    let mut s = SparseSpectrum::sample_ball(*grid, 0.5, |xi| {
        Complex64::new(lowpass_profile(1.0 + xi[0].hypot(xi[1])), 0.0)
    });
    s.normalize_l2();
    Ok(s)
}

/// Spectrum of the annulus bump: `lowpass_profile(6 ||xi| - 1|)`, one for `||xi| - 1| <= 1/6`
/// and zero outside `C_0`, normalized to a unit `L_2` field.
fn psi_sparse(grid: &GridSpec) -> Result<SparseSpectrum> {
    if grid.dxi() > 0.125 || 1.25 >= grid.nyquist() {
        return Err(Error::GridTooCoarse("the shell 3/4 <= |xi| <= 5/4 is not resolved".into()));
    }
    let mut s = SparseSpectrum::sample_ball(*grid, 1.25, |xi| {
        Complex64::new(lowpass_profile(6.0 * (xi[0].hypot(xi[1]) - 1.0).abs()), 0.0)
    });
    s.normalize_l2();
    Ok(s)
}

/// Real bump with spectrum supported in `|xi| <= 1/2` and unit `L_2` norm.
pub fn bump_lowpass_phi(grid: &GridSpec) -> Result<Field> {
    Ok(inverse_ft(&phi_sparse(grid)?.to_spectrum()))
}

/// Real bump with spectrum supported in the shell `C_0` and unit `L_2` norm.
pub fn annulus_psi(grid: &GridSpec) -> Result<Field> {
    Ok(inverse_ft(&psi_sparse(grid)?.to_spectrum()))
}

fn exceeds(size: usize, reason: String) -> Error {
    Error::SizeExceedsBand { size, reason }
}

fn modulated_sparse(grid: &GridSpec, spec: &WitnessSpec, weights: Weights) -> Result<SparseSpectrum> {
    let k_max = spec.size;
    let mut entries = Vec::new();
    if k_max == 0 {
        return Ok(SparseSpectrum { grid: *grid, entries });
    }
    let band = feasible_band(grid)?;
    if band.j_min > 1 {
        return Err(exceeds(
            k_max,
            format!("level 1 is below the resolved band {}..={}", band.j_min, band.j_max),
        ));
    }
    if k_max as i64 + 1 > band.j_max as i64 {
        return Err(exceeds(
            k_max,
            format!("term {k_max} reaches level {} beyond the top level {}", k_max + 1, band.j_max),
        ));
    }
    let phi = phi_sparse(grid)?;
    let theta = spec.query.theta();
    let p = spec.query.p;
    for k in 1..=k_max {
        let kf = k as f64;
        let a = match weights {
            Weights::Linear => kf,
            Weights::InverseRoot => kf.powf(-1.0 / p),
        } * pow2(k as i32).powf(-theta);
        let bins = (pow2(k as i32) / grid.dxi()).round() as i64;
        let term = phi.shifted(bins)?;
        entries.extend(term.entries.into_iter().map(|(i, v)| (i, v * a)));
    }
    Ok(SparseSpectrum { grid: *grid, entries })
}

/// Partial sum `sum_{k=1}^K a_k e^{i nu_k x_1} phi(x)` with `nu_k` the grid frequency nearest
/// to `2^k`; the term `k` has spectrum within `nu_k +- 1/2`.
pub fn modulated_witness(grid: &GridSpec, spec: &WitnessSpec, weights: Weights) -> Result<Field> {
    Ok(inverse_ft(&modulated_sparse(grid, spec, weights)?.to_spectrum()))
}

/// `sum_{k=1}^K c_k psi(2^{-k} x)`: term `k` has spectrum `c_k 2^{kn} psi^(2^k xi)` in `C_{-k}`.
fn dilated_sum(grid: &GridSpec, coeffs: &[f64], what: &str) -> Result<SparseSpectrum> {
    let k_max = coeffs.len();
    let mut entries = Vec::new();
    if k_max == 0 {
        return Ok(SparseSpectrum { grid: *grid, entries });
    }
    let band = feasible_band(grid)?;
    let (lo, _) = shell_bounds(-(k_max as i32));
    if lo < KAPPA * grid.dxi() || -(k_max as i32) < band.j_min {
        return Err(exceeds(
            k_max,
            format!("{what}: shell C_-{k_max} lies below the resolved band {}..={}", band.j_min, band.j_max),
        ));
    }
    if 1.25 > SAFETY * grid.nyquist() || band.j_max < 0 {
        return Err(exceeds(k_max, format!("{what}: shell C_-1 is not below the top of the band")));
    }
    let n = grid.dim() as i32;
    for (i, &c) in coeffs.iter().enumerate() {
        let k = i as i32 + 1;
        let stretch = pow2(k);
        let amp = c * pow2(k * n);
        let term = SparseSpectrum::sample_ball(*grid, 1.25 / stretch, |xi| {
            let r = stretch * xi[0].hypot(xi[1]);
            Complex64::new(lowpass_profile(6.0 * (r - 1.0).abs()), 0.0)
        });
        entries.extend(term.entries.into_iter().map(|(idx, v)| (idx, v * amp)));
    }
    let mut out = SparseSpectrum { grid: *grid, entries };
    // same normalization as the undilated annulus bump
    let unit = psi_sparse(grid)?;
    let raw = SparseSpectrum::sample_ball(*grid, 1.25, |xi| {
        Complex64::new(lowpass_profile(6.0 * (xi[0].hypot(xi[1]) - 1.0).abs()), 0.0)
    });
    out.scale(unit.entries[0].1.re / raw.entries[0].1.re);
    Ok(out)
}

/// Coefficients `c_k = k^{-1/p} 2^{k(s - n/r)}`, which make the Besov summand of term `k`
/// equal to `k^{-1/p}` times that of the undilated bump.
fn dilated_coeffs(spec: &WitnessSpec, n: usize) -> Vec<f64> {
    let sp = &spec.query.space;
    let crit = sp.s - n as f64 / sp.r;
    (1..=spec.size).map(|k| (k as f64).powf(-1.0 / spec.query.p) * 2f64.powf(k as f64 * crit)).collect()
}

pub fn dilated_witness(grid: &GridSpec, spec: &WitnessSpec) -> Result<Field> {
    let c = dilated_coeffs(spec, grid.dim());
    Ok(inverse_ft(&dilated_sum(grid, &c, "dilated")?.to_spectrum()))
}

/// Coefficients `b_k = 2^{k(s - n/r - eps)}` with `eps = BLOWUP_DECAY_FRACTION (s - n/r)`.
fn blowup_coeffs(m: usize, s: f64, r: f64, n: usize) -> Result<Vec<f64>> {
    let excess = s - n as f64 / r;
    if !(excess > 0.0) {
        return Err(Error::InvalidParams(format!(
            "low-frequency blow-up needs s > n/r, got s = {s}, n/r = {}",
            n as f64 / r
        )));
    }
    let rate = (1.0 - BLOWUP_DECAY_FRACTION) * excess;
    Ok((1..=m).map(|k| 2f64.powf(k as f64 * rate)).collect())
}

/// `sum_{k=1}^M b_k psi(2^{-k} x)`. The level `-k` Besov summand decays like
/// `2^{-k eps}` while the Fourier mass in `|xi| <= 1` grows like `2^{k(s - n/r - eps)}`.
pub fn lowfreq_blowup_witness(grid: &GridSpec, m: usize, s: f64, r: f64) -> Result<Field> {
    let b = blowup_coeffs(m, s, r, grid.dim())?;
    Ok(inverse_ft(&dilated_sum(grid, &b, "low-frequency blow-up")?.to_spectrum()))
}

/// Random smooth piece on the plateau `3/4 2^j <= |xi| <= 2^j` of level `j`, where the
/// Littlewood-Paley generator of level `j` is one and all others vanish.
fn random_piece(grid: &GridSpec, seed: u64, j: i32) -> SparseSpectrum {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(j as i64 as u64);
    let amp: f64 = rng.gen_range(0.5..1.5);
    let phase: f64 = rng.gen_range(0.0..2.0 * PI);
    let reach = grid.length() / 16.0;
    let offset = [rng.gen_range(-reach..reach), rng.gen_range(-reach..reach)];
    let wobble: f64 = rng.gen_range(0.0..0.3);
    let wobble_freq: f64 = rng.gen_range(1.0..4.0);
    let wobble_phase: f64 = rng.gen_range(0.0..2.0 * PI);
    let lo = 0.75 * pow2(j);
    let hi = pow2(j);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    SparseSpectrum::sample_ball(*grid, hi, |xi| {
        let r = xi[0].hypot(xi[1]);
        let u = (r - mid) / half;
        let bump = lowpass_profile(1.0 + 0.5 * u.abs());
        if bump == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let shape = 1.0 + wobble * (wobble_freq * PI * u + wobble_phase).sin();
        let shift = -(xi[0] * offset[0] + xi[1] * offset[1]);
        Complex64::from_polar(amp * bump * shape, phase + shift)
    })
}

fn check_levels(band: &BandLimits, j_lo: i32, j_hi: i32) -> Result<()> {
    for j in [j_lo, j_hi] {
        if !band.contains(j) {
            return Err(Error::LevelOutOfBand { level: j, j_min: band.j_min, j_max: band.j_max });
        }
    }
    if j_lo > j_hi {
        return Err(Error::InvalidParams(format!("empty level range {j_lo}..={j_hi}")));
    }
    Ok(())
}

/// Deterministic random field with one smooth piece on the plateau of each level
/// `j_lo..=j_hi`; its spectrum lies in `[3/4 2^{j_lo}, 2^{j_hi}]`.
pub fn random_bandlimited(grid: &GridSpec, seed: u64, j_lo: i32, j_hi: i32) -> Result<Field> {
    check_levels(&feasible_band(grid)?, j_lo, j_hi)?;
    let mut s = Spectrum::zeros(*grid);
    for j in j_lo..=j_hi {
        random_piece(grid, seed, j).add_into(&mut s, Complex64::new(1.0, 0.0));
    }
    Ok(inverse_ft(&s))
}

/// Random pieces on levels `j_lo..=j_hi`, each scaled so that its Besov summand
/// `2^{js} ||Q_j f||_r` equals 1.
struct BalancedLevels {
    grid: GridSpec,
    pieces: Vec<SparseSpectrum>,
}

impl BalancedLevels {
    fn new(grid: &GridSpec, seed: u64, j_lo: i32, j_hi: i32, s: f64, r: f64) -> Result<Self> {
        check_levels(&feasible_band(grid)?, j_lo, j_hi)?;
        let mut pieces = Vec::new();
        for j in j_lo..=j_hi {
            let mut piece = random_piece(grid, seed, j);
            let norm = lr_quasinorm(&inverse_ft_owned(piece.to_spectrum()), r)?;
            piece.scale(pow2(-j).powf(s) / norm);
            pieces.push(piece);
        }
        Ok(Self { grid: *grid, pieces })
    }

    /// Sum of the top `count` levels.
    fn top(&self, count: usize) -> Spectrum {
        let mut out = Spectrum::zeros(self.grid);
        for piece in self.pieces.iter().rev().take(count) {
            piece.add_into(&mut out, Complex64::new(1.0, 0.0));
        }
        out
    }
}

fn random_levels_for(grid: &GridSpec, spec: &WitnessSpec) -> Result<BalancedLevels> {
    let band = feasible_band(grid)?;
    if spec.size > band.count() {
        return Err(exceeds(spec.size, format!("only {} levels are resolved", band.count())));
    }
    let sp = &spec.query.space;
    let j_lo = band.j_max - spec.size.max(1) as i32 + 1;
    BalancedLevels::new(grid, spec.seed, j_lo, band.j_max, sp.s, sp.r)
}

/// Scale `f` to unit quasi-norm in the space of `query`.
pub fn normalized(f: &Field, query: &SzaszQuery) -> Result<Field> {
    let parts = ratio_parts(&LpAnalysis::new(f)?, query)?;
    if !(parts.space_norm > f64::MIN_POSITIVE) {
        return Err(Error::ZeroDenominator);
    }
    Ok(f.scale(Complex64::new(1.0 / parts.space_norm, 0.0)))
}

/// Exact spectrum of the witness described by `spec` on `grid`.
pub fn witness_spectrum(grid: &GridSpec, spec: &WitnessSpec) -> Result<Spectrum> {
    spec.query.validate()?;
    let n = grid.dim();
    match spec.kind {
        WitnessKind::Modulated => Ok(modulated_sparse(grid, spec, Weights::Linear)?.to_spectrum()),
        WitnessKind::ModulatedBorderline => {
            Ok(modulated_sparse(grid, spec, Weights::InverseRoot)?.to_spectrum())
        }
        WitnessKind::DilatedLow => Ok(dilated_sum(grid, &dilated_coeffs(spec, n), "dilated")?.to_spectrum()),
        WitnessKind::LowfreqBlowup => {
            let sp = &spec.query.space;
            let b = blowup_coeffs(spec.size, sp.s, sp.r, n)?;
            Ok(dilated_sum(grid, &b, "low-frequency blow-up")?.to_spectrum())
        }
        WitnessKind::RandomBandlimited => {
            if spec.size == 0 {
                return Ok(Spectrum::zeros(*grid));
            }
            Ok(random_levels_for(grid, spec)?.top(spec.size))
        }
    }
}

/// Witness as a field on `grid`.
pub fn witness_field(grid: &GridSpec, spec: &WitnessSpec) -> Result<Field> {
    Ok(inverse_ft(&witness_spectrum(grid, spec)?))
}

fn record(spectrum: Spectrum, spec: &WitnessSpec) -> Result<ExperimentRecord> {
    let analysis = LpAnalysis::from_spectrum(spectrum)?;
    let parts = ratio_parts(&analysis, &spec.query)?;
    Ok(ExperimentRecord {
        size: spec.size,
        space_norm: parts.space_norm,
        lhs: parts.lhs,
        ratio: parts.ratio()?,
    })
}

/// Functional, space norm and ratio of one witness, evaluated on its exact spectrum.
pub fn evaluate(grid: &GridSpec, spec: &WitnessSpec) -> Result<ExperimentRecord> {
    record(witness_spectrum(grid, spec)?, spec)
}

/// One record per size, in input order. The first failing size stops the run; the records
/// computed so far are kept alongside the error.
pub fn divergence_experiment(
    kind: WitnessKind,
    query: &SzaszQuery,
    sizes: &[usize],
    grid: &GridSpec,
    seed: u64,
) -> ExperimentOutcome {
    let mut records = Vec::with_capacity(sizes.len());
    // random levels do not depend on the size, so build them once for the largest feasible one
    let shared = match (kind, sizes.iter().max()) {
        (WitnessKind::RandomBandlimited, Some(&largest)) => {
            let band_count = feasible_band(grid).map(|b| b.count()).unwrap_or(0);
            let largest = sizes.iter().copied().filter(|&k| k <= band_count).max().unwrap_or(largest);
            let spec = WitnessSpec { kind, size: largest, query: *query, seed };
            query.validate().and_then(|_| random_levels_for(grid, &spec)).ok()
        }
        _ => None,
    };
    for &size in sizes {
        let spec = WitnessSpec { kind, size, query: *query, seed };
        let result = match &shared {
            Some(levels) if size > 0 && size <= levels.pieces.len() => record(levels.top(size), &spec),
            _ => evaluate(grid, &spec),
        };
        match result {
            Ok(rec) => {
                log::info!("{kind} size {size}: ratio {:.6e}", rec.ratio);
                records.push(rec);
            }
            Err(e) => return ExperimentOutcome { records, error: Some(e) },
        }
    }
    ExperimentOutcome { records, error: None }
}
