//! The Riemann-Siegel theta function theta(t) = Im ln Gamma(1/4 + it/2)
//! - (t/2) ln pi, plus Gram points theta(g_n) = n*pi.
//!
//! theta is a phase: downstream code needs it mod pi to ~1e-13 even when
//! theta itself is ~5e6, so the asymptotic main terms are carried in
//! double-double. For t >= 20 the asymptotic expansion (five correction
//! terms) is already below 1e-19; below 20 a shifted Stirling evaluation of
//! ln Gamma in complex f64 is used, where |theta| <= 4 and f64 suffices.

use crate::dd::{dd_ln, Dd};
use crate::error::Error;
use crate::Result;
use num_complex::Complex64;

/// Coefficients of t^(1-2k), k = 1..5, in the large-t expansion.
const SERIES: [f64; 5] = [
    1.0 / 48.0,
    7.0 / 5760.0,
    31.0 / 80640.0,
    127.0 / 430080.0,
    511.0 / 1216512.0,
];

/// B_{2k} / ((2k)(2k-1)), k = 1..8, for Stirling's series.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

const SMALL_T_CUTOFF: f64 = 20.0;

/// theta(t) to ~1e-12 absolute. t <= 0 or non-finite is a domain error.
pub fn theta(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("theta requires t > 0, got {t}")));
    }
    Ok(theta_dd(t).to_f64())
}

/// Full double-double theta(t) for phase-critical callers. Requires t > 0.
pub fn theta_dd(t: f64) -> Dd {
    debug_assert!(t > 0.0 && t.is_finite());
    if t >= SMALL_T_CUTOFF {
        theta_series_dd(t)
    } else {
        Dd::from_f64(theta_small(t))
    }
}

fn theta_series_dd(t: f64) -> Dd {
    let half_t = 0.5 * t;
    let main = dd_ln(t)
        .sub(Dd::LN_TWO_PI)
        .mul_f64(half_t)
        .sub_f64(half_t)
        .sub(Dd::FRAC_PI_8);
    let inv2 = 1.0 / (t * t);
    let mut corr = 0.0;
    let mut p = 1.0 / t;
    for c in SERIES {
        corr += c * p;
        p *= inv2;
    }
    main.add_f64(corr)
}

/// Shifted Stirling for Im ln Gamma(1/4 + it/2); plain f64 is enough since
/// every quantity here is O(10).
fn theta_small(t: f64) -> f64 {
    let z = Complex64::new(0.25, 0.5 * t);
    let mut shift_sum = Complex64::new(0.0, 0.0);
    for j in 0..12 {
        shift_sum += (z + j as f64).ln();
    }
    let w = z + 12.0;
    let mut lg = (w - 0.5) * w.ln() - w + 0.5 * Dd::LN_TWO_PI.hi;
    let w2 = w * w;
    let mut wp = w;
    for c in STIRLING {
        lg += c / wp;
        wp *= w2;
    }
    (lg - shift_sum).im - 0.5 * t * std::f64::consts::PI.ln()
}

/// d theta/dt = (1/2) ln(t/2pi) - 1/(48 t^2) - 21/(5760 t^4) + O(t^-6).
/// Adequate for Newton steps and zero-density weights for t >= 6.
pub fn theta_deriv(t: f64) -> f64 {
    let t2 = t * t;
    0.5 * (t / std::f64::consts::TAU).ln() - 1.0 / (48.0 * t2) - 21.0 / (5760.0 * t2 * t2)
}

/// Gram point g_n: the unique t > 2pi with theta(t) = n*pi. Defined for
/// n >= -1 (g_{-1} ~ 9.667, g_0 ~ 17.846).
pub fn gram_point(n: i64) -> Result<f64> {
    if n < -1 {
        return Err(Error::Precondition(format!(
            "gram_point defined for n >= -1, got {n}"
        )));
    }
    let target = Dd::PI.mul_f64(n as f64);
    let tf = target.to_f64();
    // theta is strictly increasing past its minimum at t ~ 2pi, and
    // theta(6.29) ~ -3.530 < -pi <= target for all n >= -1.
    let mut lo = 6.29;
    let mut hi = 32.0;
    while theta_dd(hi).to_f64() < tf {
        lo = hi;
        hi *= 2.0;
        assert!(hi < 1e12, "gram_point bracket runaway");
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = theta_dd(x).sub(target);
        let fx = f.to_f64();
        if fx.abs() <= 1e-12 {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let step = fx / theta_deriv(x);
        let mut next = x - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo) <= 1e-15 * hi.max(1.0) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::Completeness {
        t: x,
        msg: "gram_point iteration failed to converge".into(),
    })
}
