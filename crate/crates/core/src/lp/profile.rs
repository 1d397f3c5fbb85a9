//! Smooth radial profiles: the low-pass cut-off and the dyadic generator built from it.
//!
//! `lowpass_profile` is 1 on `|t| <= 1`, 0 on `|t| >= 3/2`, with a C-infinity monotone
//! transition built from the `e^{-1/u}` mollifier ratio. The Littlewood-Paley generator is the
//! telescoping difference `gamma(t) = lowpass(|t|) - lowpass(2|t|)`, supported in
//! `1/2 <= |t| <= 3/2` and equal to 1 on `3/4 <= |t| <= 1`. Since `2 * 2^{-(j+1)} t` and
//! `2^{-j} t` are the same float, sums over consecutive dyadic levels telescope exactly.

/// Smooth step on [0, 1]: 0 at 0, 1 at 1, all derivatives vanish at both ends.
fn smoothstep(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / u).exp();
    let b = (-1.0 / (1.0 - u)).exp();
    a / (a + b)
}

/// Smooth low-pass profile: 1 on `|t| <= 1`, 0 on `|t| >= 3/2`.
pub fn lowpass_profile(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        1.0
    } else if t >= 1.5 {
        0.0
    } else {
        1.0 - smoothstep((t - 1.0) * 2.0)
    }
}

/// Dyadic Littlewood-Paley generator, supported in `1/2 <= |t| <= 3/2`.
pub fn gamma_profile(t: f64) -> f64 {
    let t = t.abs();
    if !(0.5..1.5).contains(&t) {
        return 0.0;
    }
    lowpass_profile(t) - lowpass_profile(2.0 * t)
}

/// Closed form of `sum_{j=lo}^{hi} gamma(2^{-j} t)` via telescoping.
pub fn band_partition(t: f64, lo: i32, hi: i32) -> f64 {
    if lo > hi {
        return 0.0;
    }
    let t = t.abs();
    lowpass_profile(t * pow2(-hi)) - lowpass_profile(t * pow2(1 - lo))
}

/// Exact `2^e` for moderate integer exponents.
pub fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}
