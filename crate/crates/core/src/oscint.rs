//! The oscillatory integrals behind the zero-side analysis: the twisted
//! Mellin-type integral I(γ) = ∫ e(−uξ) B(u/X) u^{−1/2+iγ} du evaluated two
//! independent ways (adaptive oscillation-aware quadrature, and the
//! stationary-phase main term), the Fresnel tail identity, and the damped
//! linear-phase integral whose X^{−1} decay feeds the archimedean bounds.

use crate::bump::Bump;
use crate::dd::{dd_ln, e_of_turns, reduce_mod_2pi, Dd};
use crate::quad::{oscillatory_integral, PhaseSpec, QuadResult};
use crate::{Error, Result};
use num_complex::Complex64;

const TWO_PI: f64 = std::f64::consts::TAU;

/// Inputs for I(γ): twist frequency ξ > 0, window B, scale X > X_B, and
/// the oscillation height γ ≠ 0.
#[derive(Clone, Debug)]
pub struct OscIntegralSpec {
    pub xi: f64,
    pub bump: Bump,
    pub x: f64,
    pub gamma: f64,
}

impl OscIntegralSpec {
    fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::Domain(format!("twist frequency must be positive, got {}", self.xi)));
        }
        if !(self.gamma != 0.0 && self.gamma.is_finite()) {
            return Err(Error::Domain(format!("oscillation height must be nonzero, got {}", self.gamma)));
        }
        let xb = self.bump.support_constant();
        if !(self.x > xb) {
            return Err(Error::Precondition(format!(
                "scale X = {} must exceed the support constant {xb}",
                self.x
            )));
        }
        Ok(())
    }
}

/// Saddle-admissible band [a⋆, b⋆] around the bump support, and the scaled
/// saddle location γ⋆ = γ/(2πξX).
#[derive(Clone, Copy, Debug)]
pub struct StationaryBand {
    pub a_star: f64,
    pub b_star: f64,
    pub gamma_star: f64,
}

/// a⋆ = (1 + 2a − √(1+4a))/2, b⋆ = (1 + 2b + √(1+4b))/2, γ⋆ = γ/(2πξX).
pub fn star_params(a: f64, b: f64, gamma: f64, xi: f64, x: f64) -> StationaryBand {
    StationaryBand {
        a_star: 0.5 * (1.0 + 2.0 * a - (1.0 + 4.0 * a).sqrt()),
        b_star: 0.5 * (1.0 + 2.0 * b + (1.0 + 4.0 * b).sqrt()),
        gamma_star: gamma / (TWO_PI * xi * x),
    }
}

/// I(γ) over [Xa, Xb] by oscillation-capped panels; amplitude B(u/X)u^{−1/2},
/// phase −2πξu + γ ln u.
pub fn quad_i(spec: &OscIntegralSpec, tol: f64) -> Result<QuadResult> {
    spec.validate()?;
    let (a, b) = spec.bump.support();
    let g = |u: f64| spec.bump.eval(u / spec.x) / u.sqrt();
    oscillatory_integral(
        &g,
        PhaseSpec::LinLog {
            alpha: -TWO_PI * spec.xi,
            beta: spec.gamma,
        },
        spec.x * a,
        spec.x * b,
        tol,
    )
}

/// Stationary-phase main term of I(γ): ξ^{−1/2−iγ} e(θ-law turns + 7/8) B(γ⋆)
/// when the saddle γ⋆ lies in [a⋆, b⋆], else 0. Requires γ > 0.
pub fn sp_i(spec: &OscIntegralSpec) -> Result<Complex64> {
    spec.validate()?;
    if spec.gamma <= 0.0 {
        return Err(Error::Domain(format!(
            "stationary-phase term needs gamma > 0, got {}",
            spec.gamma
        )));
    }
    let (a, b) = spec.bump.support();
    let band = star_params(a, b, spec.gamma, spec.xi, spec.x);
    if band.gamma_star < band.a_star || band.gamma_star > band.b_star {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let amp = spec.bump.eval(band.gamma_star) / spec.xi.sqrt();
    let (c, s) = e_of_turns(sp_turns(spec.gamma, spec.xi));
    Ok(Complex64::new(amp * c, amp * s))
}

// turns of the full stationary phase: γ/(2π)·ln(γ/(2πe)) + 7/8 − γ ln ξ/(2π)
pub(crate) fn sp_turns(gamma: f64, xi: f64) -> Dd {
    let main = dd_ln(gamma)
        .sub(Dd::LN_TWO_PI)
        .sub_f64(1.0)
        .sub(dd_ln(xi))
        .mul_f64(gamma)
        .mul(Dd::FRAC_1_TWO_PI);
    main.add_f64(0.875)
}

/// Both sides of the tail identity for ∫_{|u|>λ} e^{−iu²} du: `direct` is
/// that two-sided integral; `closed` is e^{−iλ²}/(iλ) + i∫_λ^∞ e^{−iu²}u^{−2} du.
/// Integration by parts makes them equal; both are computed independently.
pub fn fresnel_tail(lambda: f64) -> Result<(Complex64, Complex64)> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Domain(format!("tail cutoff must be positive, got {lambda}")));
    }
    let u0 = 12.0f64.max(lambda);
    let one = |_: f64| 1.0;
    let inv2 = |u: f64| 1.0 / (u * u);

    // geometric grading keeps the amplitude variation per call bounded,
    // which matters for the u^{-2} weight when lambda is tiny
    let head = |g: &dyn Fn(f64) -> f64| -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut lo = lambda;
        while lo < u0 {
            let hi = (2.0 * lo).min(u0);
            acc += oscillatory_integral(g, PhaseSpec::NegSquare, lo, hi, 1e-12)?.value;
            lo = hi;
        }
        Ok(acc)
    };
    let direct = 2.0 * (head(&one)? + euler_tail(u0, &one)?);
    let inv2_int = head(&inv2)? + euler_tail(u0, &inv2)?;

    let p = reduce_mod_2pi(Dd::from_f64(lambda).mul_f64(lambda).neg());
    let e_lam = Complex64::new(p.cos(), p.sin());
    let closed = e_lam * Complex64::new(0.0, -1.0 / lambda) + Complex64::new(0.0, 1.0) * inv2_int;
    Ok((closed, direct))
}

// ∫_{u0}^∞ g(u) e^{−iu²} du: half-period segments at u_k = √(u0² + kπ)
// alternate in sign, so repeated averaging of the partial sums converges
// geometrically
fn euler_tail(u0: f64, g: &dyn Fn(f64) -> f64) -> Result<Complex64> {
    const SEGS: usize = 28;
    let mut partials = Vec::with_capacity(SEGS + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    partials.push(acc);
    let edge = |k: usize| (u0 * u0 + k as f64 * std::f64::consts::PI).sqrt();
    for k in 0..SEGS {
        let seg = oscillatory_integral(g, PhaseSpec::NegSquare, edge(k), edge(k + 1), 1e-12)?;
        acc += seg.value;
        partials.push(acc);
    }
    while partials.len() > 1 {
        for i in 0..partials.len() - 1 {
            partials[i] = 0.5 * (partials[i] + partials[i + 1]);
        }
        partials.pop();
    }
    Ok(partials[0])
}

/// ∫ (1 − 1/(u³−u)) e(−uξ) B(u/X) du over X·supp B, to 1e-10 absolute.
/// The precondition X > X_B keeps the poles u ∈ {0, ±1} outside the support.
pub fn mandalorian_integral(xi: f64, bump: &Bump, x: f64) -> Result<Complex64> {
    if !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::Domain(format!("twist frequency must be positive, got {xi}")));
    }
    let xb = bump.support_constant();
    if !(x > xb) {
        return Err(Error::Precondition(format!(
            "scale X = {x} must exceed the support constant {xb} to keep the pole outside"
        )));
    }
    let (a, b) = bump.support();
    let g = |u: f64| (1.0 - 1.0 / (u * u * u - u)) * bump.eval(u / x);
    let r = oscillatory_integral(
        &g,
        PhaseSpec::Linear { alpha: -TWO_PI * xi },
        x * a,
        x * b,
        1e-10,
    )?;
    Ok(r.value)
}
