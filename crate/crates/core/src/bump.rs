//! Smooth compactly supported test functions on (0, infinity) and their
//! derivatives up to order 8.
//!
//! Two shapes:
//!  - canonical: B(u) = exp(-1/((u-a)(b-u))) on (a,b), zero outside. Its
//!    k-th derivative is P_k(u)/w(u)^{2k} * B(u) with w = (u-a)(b-u) and the
//!    polynomials P_k built once per instance from the recurrence
//!    P_{k+1} = P_k' w^2 - 2k P_k w' w + P_k w'.
//!  - plateau: identically 1 on [c,d], smooth monotone ramps on [a,c] and
//!    [d,b] built from s(x) = 1/(1+e^{1/x - 1/(1-x)}); derivatives come
//!    from Taylor jets of that expression, split into e^{-|g|} branches so
//!    nothing overflows near the ramp feet.

use crate::error::Error;
use crate::jets;
use crate::Result;

pub const MAX_DERIV: u32 = 8;

#[derive(Clone, Debug)]
enum Shape {
    Canonical {
        /// P_k coefficients, ascending powers in v = u - mid. The centered
        /// variable keeps Horner evaluation well conditioned; monomials in u
        /// lose all significance by k = 8.
        polys: Vec<Vec<f64>>,
        mid: f64,
    },
    Plateau {
        c: f64,
        d: f64,
    },
}

/// A smooth bump with support [a, b], 0 < a < b.
#[derive(Clone, Debug)]
pub struct Bump {
    a: f64,
    b: f64,
    shape: Shape,
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; p.len() + q.len() - 1];
    for (i, &pi) in p.iter().enumerate() {
        for (j, &qj) in q.iter().enumerate() {
            r[i + j] += pi * qj;
        }
    }
    r
}

fn poly_add_scaled(p: &mut Vec<f64>, q: &[f64], s: f64) {
    if p.len() < q.len() {
        p.resize(q.len(), 0.0);
    }
    for (i, &qi) in q.iter().enumerate() {
        p[i] += s * qi;
    }
}

fn poly_deriv(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    (1..p.len()).map(|i| i as f64 * p[i]).collect()
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

impl Bump {
    pub fn canonical(a: f64, b: f64) -> Result<Bump> {
        if !(0.0 < a && a < b && b.is_finite()) {
            return Err(Error::Precondition(format!(
                "canonical bump requires 0 < a < b, got a={a}, b={b}"
            )));
        }
        let mid = 0.5 * (a + b);
        let h1 = mid - a;
        let h2 = b - mid;
        let w = vec![h1 * h2, h2 - h1, -1.0]; // (u-a)(b-u) in v = u - mid
        let wp = vec![h2 - h1, -2.0];
        let w2 = poly_mul(&w, &w);
        let mut polys = vec![vec![1.0]];
        for k in 0..MAX_DERIV as usize {
            let pk = &polys[k];
            let mut next = poly_mul(&poly_deriv(pk), &w2);
            poly_add_scaled(&mut next, &poly_mul(&poly_mul(pk, &wp), &w), -2.0 * k as f64);
            poly_add_scaled(&mut next, &poly_mul(pk, &wp), 1.0);
            polys.push(next);
        }
        Ok(Bump { a, b, shape: Shape::Canonical { polys, mid } })
    }

    pub fn plateau(a: f64, c: f64, d: f64, b: f64) -> Result<Bump> {
        if !(0.0 < a && a < c && c < d && d < b && b.is_finite()) {
            return Err(Error::Precondition(format!(
                "plateau bump requires 0 < a < c < d < b, got {a}, {c}, {d}, {b}"
            )));
        }
        Ok(Bump { a, b, shape: Shape::Plateau { c, d } })
    }

    /// The default plateau window used by the dyadic assembly experiments.
    pub fn default_plateau() -> Bump {
        Bump::plateau(0.25, 0.5, 1.0, 1.25).expect("static knots are valid")
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn is_plateau(&self) -> bool {
        matches!(self.shape, Shape::Plateau { .. })
    }

    /// The interval where a plateau window is identically 1; None for the
    /// canonical shape.
    pub fn flat_interval(&self) -> Option<(f64, f64)> {
        match self.shape {
            Shape::Plateau { c, d } => Some((c, d)),
            Shape::Canonical { .. } => None,
        }
    }

    /// Scale floor for sums over n ~ X: X above this keeps the support of
    /// u -> B(u/X) inside [2, infinity) and comfortably desk-sized.
    pub fn support_constant(&self) -> f64 {
        10.0f64.max(2.0 / self.a)
    }

    pub fn eval(&self, u: f64) -> f64 {
        if !(u > self.a && u < self.b) {
            return 0.0;
        }
        match &self.shape {
            Shape::Canonical { .. } => {
                let w = (u - self.a) * (self.b - u);
                let inv = 1.0 / w;
                if inv > 700.0 {
                    return 0.0;
                }
                (-inv).exp()
            }
            Shape::Plateau { c, d } => {
                if u >= *c && u <= *d {
                    1.0
                } else if u < *c {
                    ramp_value((u - self.a) / (c - self.a))
                } else {
                    ramp_value((self.b - u) / (self.b - d))
                }
            }
        }
    }

    /// k-th derivative, k <= MAX_DERIV; exactly zero outside (a, b).
    pub fn deriv(&self, u: f64, k: u32) -> Result<f64> {
        if k > MAX_DERIV {
            return Err(Error::UnsupportedOrder { order: k, max: MAX_DERIV });
        }
        if k == 0 {
            return Ok(self.eval(u));
        }
        if !(u > self.a && u < self.b) {
            return Ok(0.0);
        }
        match &self.shape {
            Shape::Canonical { polys, mid } => {
                let w = (u - self.a) * (self.b - u);
                let inv = 1.0 / w;
                if inv > 700.0 {
                    return Ok(0.0);
                }
                let bv = (-inv).exp();
                let mut wpow = 1.0;
                for _ in 0..2 * k {
                    wpow *= w;
                }
                Ok(poly_eval(&polys[k as usize], u - mid) / wpow * bv)
            }
            Shape::Plateau { c, d } => {
                if u >= *c && u <= *d {
                    Ok(0.0)
                } else if u < *c {
                    let slope = 1.0 / (c - self.a);
                    Ok(ramp_jet((u - self.a) * slope, slope, k as usize + 1)[k as usize]
                        * jets::factorial(k as usize))
                } else {
                    let slope = -1.0 / (self.b - d);
                    Ok(ramp_jet((self.b - u) * -slope, slope, k as usize + 1)[k as usize]
                        * jets::factorial(k as usize))
                }
            }
        }
    }
}

fn ramp_value(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let g = 1.0 / x - 1.0 / (1.0 - x);
    if g > 690.0 {
        0.0
    } else if g < -690.0 {
        1.0
    } else {
        1.0 / (1.0 + g.exp())
    }
}

/// Jet of u -> s(x(u)) where x is affine with the given slope and s is the
/// smooth step; x0 must lie strictly in (0, 1).
fn ramp_jet(x0: f64, slope: f64, len: usize) -> Vec<f64> {
    let mut xj = vec![0.0; len];
    xj[0] = x0;
    if len > 1 {
        xj[1] = slope;
    }
    let one_minus = jets::jet_sub(&jets::jet_const(1.0, len), &xj);
    let g = jets::jet_sub(&jets::jet_recip(&xj), &jets::jet_recip(&one_minus));
    if g[0] >= 0.0 {
        // s = e^{-g}/(1+e^{-g}): every jet entry is damped by e^{-g0}
        let f = jets::jet_exp(&jets::jet_scale(&g, -1.0));
        jets::jet_div(&f, &jets::jet_add(&jets::jet_const(1.0, len), &f))
    } else {
        let e = jets::jet_exp(&g);
        jets::jet_recip(&jets::jet_add(&jets::jet_const(1.0, len), &e))
    }
}
