//! Hardy's function Z(t) = e^{i theta(t)} zeta(1/2 + it), real for real t,
//! with |Z(t)| = |zeta(1/2+it)| and sign changes exactly at the ordinates of
//! critical-line zeros.
//!
//! Two regimes, cross-validated against each other at the seam:
//!   t < 2000   Euler-Maclaurin for zeta(1/2+it) (~1e-12 absolute), then
//!              rotate by e^{i theta}. Chosen because the asymptotic formula
//!              below is too coarse near the first zeros.
//!   t >= 2000  Riemann-Siegel main sum plus five correction terms
//!              C0..C4 (error ~ t^{-11/4}, ~1e-9 at the seam and dropping).
//!
//! All large phases (t ln n, theta) are carried in double-double; a plain
//! f64 phase at t ~ 1e5 would lose ~1e-10 of an ulp-radian per term.

use crate::dd::{dd_ln, reduce_mod_2pi, Dd};
use crate::error::Error;
use crate::jets::{jet_deriv, jet_div, jet_sincos, jet_var};
use crate::theta::theta_dd;
use crate::Result;
use num_complex::Complex64;
use std::cell::RefCell;
use std::f64::consts::PI;

const EM_CUTOFF: f64 = 2000.0;

/// B_{2k}/(2k)!, k = 1..12, for the Euler-Maclaurin tail.
const EM_BERNOULLI: [f64; 12] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
    -3617.0 / 10670622842880000.0,
    43867.0 / (798.0 * 6402373705728000.0),
    -174611.0 / (330.0 * 2432902008176640000.0),
    854513.0 / (138.0 * 1124000727777607680000.0),
    -236364091.0 / (2730.0 * 620448401733239439360000.0),
];

thread_local! {
    // ln(n) as double-double, filled on demand; values are identical on
    // every thread so parallel callers stay deterministic.
    static LN_TABLE: RefCell<Vec<Dd>> = const { RefCell::new(Vec::new()) };
}

fn ln_dd_of(n: usize) -> Dd {
    LN_TABLE.with(|t| {
        let mut v = t.borrow_mut();
        while v.len() < n {
            let k = v.len() + 1;
            v.push(dd_ln(k as f64));
        }
        v[n - 1]
    })
}

/// e^{-i t ln n} with the phase reduced in double-double.
fn unit_power(t: f64, n: usize) -> Complex64 {
    let ang = reduce_mod_2pi(ln_dd_of(n).mul_f64(t));
    let (s, c) = ang.sin_cos();
    Complex64::new(c, -s)
}

/// zeta(1/2 + it) by Euler-Maclaurin. Accurate to ~1e-12 absolute; cost
/// grows linearly in t, so this is the small-t workhorse (t up to a few
/// thousand) and the independent cross-check for the Riemann-Siegel path.
pub fn zeta_half_line(t: f64) -> Result<Complex64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!(
            "zeta_half_line requires t > 0, got {t}"
        )));
    }
    if t > 1e6 {
        return Err(Error::Precondition(format!(
            "zeta_half_line is O(t) work; t = {t} exceeds the 1e6 guard"
        )));
    }
    Ok(zeta_em(t))
}

fn zeta_em(t: f64) -> Complex64 {
    let s = Complex64::new(0.5, t);
    let nn = 24usize.max((1.5 * t / PI).ceil() as usize);
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..nn {
        sum += unit_power(t, n) / (n as f64).sqrt();
    }
    let nf = nn as f64;
    let n_pow_minus_s = unit_power(t, nn) / nf.sqrt(); // nn^{-s}
    let n_pow_one_minus_s = unit_power(t, nn) * nf.sqrt(); // nn^{1-s}
    sum += 0.5 * n_pow_minus_s;
    sum += n_pow_one_minus_s / (s - 1.0);
    // tail: sum_k B_{2k}/(2k)! * s(s+1)...(s+2k-2) * nn^{-s-2k+1}
    let mut poch = s; // (s)_{2k-1}, starting at (s)_1
    let mut npow = n_pow_minus_s / nf; // nn^{-s-2k+1}, starting at nn^{-s-1}
    let inv_n2 = 1.0 / (nf * nf);
    for (k, b) in EM_BERNOULLI.iter().enumerate() {
        sum += *b * poch * npow;
        let k2 = 2.0 * (k as f64 + 1.0);
        poch *= (s + (k2 - 1.0)) * (s + k2);
        npow *= inv_n2;
    }
    sum
}

/// Hardy Z(t). Domain t > 0; validated to 1e5 (absolute error ~1e-12 below
/// the seam, <= ~1e-9 above, shrinking like t^{-11/4}).
pub fn hardy_z(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("hardy_z requires t > 0, got {t}")));
    }
    if t < EM_CUTOFF {
        Ok(z_em(t))
    } else {
        Ok(z_rs(t))
    }
}

fn z_em(t: f64) -> f64 {
    let zeta = zeta_em(t);
    let ang = reduce_mod_2pi(theta_dd(t));
    let (s, c) = ang.sin_cos();
    (Complex64::new(c, s) * zeta).re
}

fn z_rs(t: f64) -> f64 {
    let a = Dd::from_f64(t).mul(Dd::FRAC_1_TWO_PI).sqrt();
    let n_dd = a.floor();
    let nn = n_dd.to_f64() as usize;
    let p = a.sub(n_dd).to_f64();
    let th = theta_dd(t);
    let mut main = 0.0;
    for n in 1..=nn {
        let ang = reduce_mod_2pi(th.sub(ln_dd_of(n).mul_f64(t)));
        main += ang.cos() / (n as f64).sqrt();
    }
    let psi = psi_derivs(p);
    let pi2 = PI * PI;
    let pi4 = pi2 * pi2;
    let pi6 = pi4 * pi2;
    let pi8 = pi4 * pi4;
    let c0 = psi[0];
    let c1 = -psi[3] / (96.0 * pi2);
    let c2 = psi[6] / (18432.0 * pi4) + psi[2] / (64.0 * pi2);
    let c3 = -psi[9] / (5308416.0 * pi6) - psi[5] / (3840.0 * pi4) - psi[1] / (64.0 * pi2);
    let c4 = psi[12] / (2038431744.0 * pi8)
        + psi[8] / (5898240.0 * pi6)
        + 19.0 * psi[4] / (24576.0 * pi4)
        + psi[0] / (128.0 * pi2);
    let ainv = 1.0 / a.to_f64();
    let corr = c0 + ainv * (c1 + ainv * (c2 + ainv * (c3 + ainv * c4)));
    let sign = if nn % 2 == 1 { 1.0 } else { -1.0 };
    2.0 * main + sign * ainv.sqrt() * corr
}

/// Derivative values Psi^(k)(p), k = 0..12, of
/// Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p) on [0, 1).
///
/// Both cosines vanish at p = 1/4 and 3/4 (removable). Within 0.09 of
/// those points the quotient jet is rebuilt from a deflated series about
/// the singular point; elsewhere the direct jet division is stable.
fn psi_derivs(p: f64) -> [f64; 13] {
    const R: f64 = 0.09;
    let d1 = (p - 0.25).abs();
    let d2 = (p - 0.75).abs();
    if d1.min(d2) < R {
        let c = if d1 < d2 { 0.25 } else { 0.75 };
        psi_derivs_series(p, c)
    } else {
        psi_derivs_direct(p)
    }
}

fn num_angle_jet(at: f64, len: usize) -> Vec<f64> {
    // 2 pi (u^2 - u - 1/16) expanded at u = at
    let mut f = vec![0.0; len];
    f[0] = std::f64::consts::TAU * (at * at - at - 0.0625);
    if len > 1 {
        f[1] = std::f64::consts::TAU * (2.0 * at - 1.0);
    }
    if len > 2 {
        f[2] = std::f64::consts::TAU;
    }
    f
}

fn den_angle_jet(at: f64, len: usize) -> Vec<f64> {
    let mut g = jet_var(at, len);
    for x in g.iter_mut() {
        *x *= std::f64::consts::TAU;
    }
    g
}

fn psi_derivs_direct(p: f64) -> [f64; 13] {
    const M: usize = 13;
    let (_, cn) = jet_sincos(&num_angle_jet(p, M));
    let (_, cd) = jet_sincos(&den_angle_jet(p, M));
    let q = jet_div(&cn, &cd);
    let mut out = [0.0; 13];
    for (k, o) in out.iter_mut().enumerate() {
        *o = jet_deriv(&q, k);
    }
    out
}

fn psi_derivs_series(p: f64, c: f64) -> [f64; 13] {
    const M: usize = 44;
    let (_, mut cn) = jet_sincos(&num_angle_jet(c, M));
    let (_, mut cd) = jet_sincos(&den_angle_jet(c, M));
    // both cosines vanish identically at c = 1/4, 3/4; force the exact
    // zero so the deflated division sees no rounding residue
    cn[0] = 0.0;
    cd[0] = 0.0;
    let q = jet_div(&cn[1..], &cd[1..]);
    let x = p - c;
    let mut out = [0.0; 13];
    for (k, o) in out.iter_mut().enumerate() {
        // Psi^(k)(p) = sum_j q_j * j!/(j-k)! * x^{j-k}
        let mut acc = 0.0;
        let mut falling = crate::jets::factorial(k); // j!/(j-k)! at j = k
        let mut xp = 1.0;
        for j in k..q.len() {
            if j > k {
                falling *= j as f64 / (j - k) as f64;
                xp *= x;
            }
            acc += q[j] * falling * xp;
        }
        *o = acc;
    }
    out
}
