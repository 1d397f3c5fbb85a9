//! The weighted Fourier-side functional, its critical exponent and the exact classifier.
//!
//! For a space `A^s_{r,q}` on `R^n` and `p > 0` the inequality under study is
//! `(int |xi|^{theta p} |F u(xi)|^p dxi)^{1/p} <= c ||u||_A` with `theta = s + n - n/p - n/r`,
//! the only exponent compatible with dilations. The inhomogeneous version uses the weight
//! `(1 + |xi|)^{theta p}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{forward_ft, Field, LpAnalysis, Spectrum};
use crate::spaces::{check_exponent, space_norm_of, Family, Setting, SpaceParams};

/// Relative tolerance for the equality comparisons `p = r'` and `s = n/r`, which are reached
/// through rounded arithmetic (for instance `r = 4/3` gives `r' = 4.000000000000001`).
pub const EQ_TOL: f64 = 1e-12;

/// A full parameter system `(s, p, q, r, n)` with its family and setting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzaszQuery {
    pub space: SpaceParams,
    pub p: f64,
    pub n: u32,
}

impl SzaszQuery {
    pub fn new(space: SpaceParams, p: f64, n: u32) -> Result<Self> {
        let q = Self { space, p, n };
        q.validate()?;
        Ok(q)
    }

    /// Homogeneous query from bare numbers.
    pub fn homogeneous(family: Family, s: f64, r: f64, p: f64, q: f64, n: u32) -> Result<Self> {
        let space = SpaceParams { s, r, q, family, setting: Setting::Homogeneous };
        Self::new(space, p, n)
    }

    pub fn validate(&self) -> Result<()> {
        self.space.validate_exponents()?;
        if self.p.is_nan() || self.p <= 0.0 {
            return Err(Error::InvalidParams(format!("p = {} must lie in (0, inf]", self.p)));
        }
        if self.n == 0 {
            return Err(Error::InvalidParams("dimension n must be positive".into()));
        }
        Ok(())
    }

    pub fn theta(&self) -> f64 {
        szasz_exponent(self.space.s, self.p, self.space.r, self.n)
    }
}

/// One atomic condition of the classifier and whether it held.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub theta: f64,
    pub weak: bool,
    pub strong: bool,
    pub verdict_trace: Vec<ConditionCheck>,
}

impl ClassificationResult {
    /// Trace rendered as `id:pass;id:fail;...`.
    pub fn trace_string(&self) -> String {
        self.verdict_trace
            .iter()
            .map(|c| format!("{}:{}", c.condition, if c.holds { "pass" } else { "fail" }))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// `r' = r/(r-1)` for `1 < r <= inf` (so `inf' = 1`) and `r' = inf` for `0 < r <= 1`.
pub fn conjugate_exponent(r: f64) -> Result<f64> {
    check_exponent(r)?;
    Ok(if r <= 1.0 {
        f64::INFINITY
    } else if r.is_infinite() {
        1.0
    } else {
        r / (r - 1.0)
    })
}

/// `theta = s + n - n/p - n/r`, with `n/inf = 0`.
pub fn szasz_exponent(s: f64, p: f64, r: f64, n: u32) -> f64 {
    let n = n as f64;
    s + n - n / p - n / r
}

pub(crate) fn approx_eq(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= EQ_TOL * 1f64.max(a.abs()).max(b.abs())
}

pub(crate) fn approx_le(a: f64, b: f64) -> bool {
    a < b || approx_eq(a, b)
}

pub(crate) fn approx_lt(a: f64, b: f64) -> bool {
    a < b && !approx_eq(a, b)
}

fn check(trace: &mut Vec<ConditionCheck>, id: &str, holds: bool) -> bool {
    trace.push(ConditionCheck { condition: id.to_string(), holds });
    holds
}

/// Conditions for a realization commuting with translations: `s < n/r`, or `s = n/r` together
/// with `q <= 1` (B scale) or `r <= 1` (F scale).
pub(crate) fn realization_conditions(query: &SzaszQuery, trace: &mut Vec<ConditionCheck>) -> bool {
    let sp = &query.space;
    let critical = query.n as f64 / sp.r;
    let below = check(trace, "s<n/r", approx_lt(sp.s, critical));
    let at = approx_eq(sp.s, critical);
    let borderline = match sp.family {
        Family::B => check(trace, "s=n/r∧q≤1", at && sp.q <= 1.0),
        Family::F => check(trace, "s=n/r∧r≤1", at && sp.r <= 1.0),
    };
    below || borderline
}

/// Exact verdicts. Weak property: `r <= 2` and `q <= p <= r'` (B) or
/// `r <= p < r'` or `q <= p = r'` (F); the inhomogeneous setting uses the same conditions.
/// Strong property: weak plus the realization conditions.
pub fn classify(query: &SzaszQuery) -> ClassificationResult {
    let sp = &query.space;
    let p = query.p;
    let r_conj = conjugate_exponent(sp.r).unwrap_or(f64::NAN);
    let mut trace = Vec::new();
    let small_r = check(&mut trace, "r≤2", sp.r <= 2.0);
    let range = match sp.family {
        Family::B => check(&mut trace, "q≤p≤r'", sp.q <= p && approx_le(p, r_conj)),
        Family::F => {
            let open = check(&mut trace, "r≤p<r'", sp.r <= p && approx_lt(p, r_conj));
            let closed = check(&mut trace, "q≤p=r'", sp.q <= p && approx_eq(p, r_conj));
            open || closed
        }
    };
    let weak = small_r && range;
    let realizable = realization_conditions(query, &mut trace);
    ClassificationResult { theta: query.theta(), weak, strong: weak && realizable, verdict_trace: trace }
}

/// Weight `|xi|^theta` (homogeneous, zero bin excluded) or `(1 + |xi|)^theta`.
fn weighted_moduli<'a>(
    g: &'a Spectrum,
    radial: &'a [f64],
    theta: f64,
    mode: Setting,
) -> impl Iterator<Item = (f64, f64)> + 'a {
    g.coeffs().iter().zip(radial).enumerate().filter_map(move |(idx, (c, &r))| {
        let m = c.norm();
        match mode {
            Setting::Homogeneous if idx == g.zero_slot() => None,
            _ if m == 0.0 => None,
            Setting::Homogeneous => Some((r, r.powf(theta) * m)),
            Setting::Inhomogeneous => Some((r, (1.0 + r).powf(theta) * m)),
        }
    })
}

/// `(sum_k w(xi_k)^p |g_k|^p dxi^n)^{1/p}`, or the weighted maximum for `p = inf`.
pub fn weighted_lhs(g: &Spectrum, theta: f64, p: f64, mode: Setting) -> Result<f64> {
    weighted_lhs_with(g, &g.grid().radial_frequencies(), theta, p, mode)
}

pub(crate) fn weighted_lhs_with(
    g: &Spectrum,
    radial: &[f64],
    theta: f64,
    p: f64,
    mode: Setting,
) -> Result<f64> {
    check_exponent(p)?;
    let terms = weighted_moduli(g, radial, theta, mode).map(|(_, w)| w);
    Ok(if p.is_infinite() {
        terms.fold(0.0, f64::max)
    } else {
        let sum: f64 = terms.map(|w| w.powf(p)).sum();
        (sum * g.grid().freq_volume()).powf(1.0 / p)
    })
}

/// The `p`-th power of the homogeneous functional restricted to `lo <= |xi| < hi`.
pub fn weighted_lhs_power_on(g: &Spectrum, theta: f64, p: f64, lo: f64, hi: f64) -> Result<f64> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    let radial = g.grid().radial_frequencies();
    let sum: f64 = weighted_moduli(g, &radial, theta, Setting::Homogeneous)
        .filter(|&(r, _)| lo <= r && r < hi)
        .map(|(_, w)| w.powf(p))
        .sum();
    Ok(sum * g.grid().freq_volume())
}

/// Functional and space norm of a field given by its spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioParts {
    pub lhs: f64,
    pub space_norm: f64,
}

impl RatioParts {
    pub fn ratio(&self) -> Result<f64> {
        if !(self.space_norm > f64::MIN_POSITIVE) {
            return Err(Error::ZeroDenominator);
        }
        Ok(self.lhs / self.space_norm)
    }
}

pub fn ratio_parts(analysis: &LpAnalysis, query: &SzaszQuery) -> Result<RatioParts> {
    query.validate()?;
    let lhs = weighted_lhs_with(
        analysis.spectrum(),
        analysis.radial(),
        query.theta(),
        query.p,
        query.space.setting,
    )?;
    let space_norm = space_norm_of(analysis, &query.space)?;
    Ok(RatioParts { lhs, space_norm })
}

/// Empirical constant of the inequality for one field: functional over space quasi-norm.
pub fn szasz_ratio(f: &Field, query: &SzaszQuery) -> Result<f64> {
    ratio_parts(&LpAnalysis::from_spectrum(forward_ft(f))?, query)?.ratio()
}
