//! Symbolic bookkeeping for the two operators that drive the repeated
//! integration-by-parts estimates:
//!
//!   L: G(u) -> u/(u0-u) * G(u)        (multiply)
//!   D: G(u) -> dG/du                  (differentiate)
//!
//! applied to linear combinations of atoms u^h F^(i)(u) / (u0-u)^j with
//! F(u) = B(u)/sqrt(u) for a bump B. Alongside the exact expansion, each
//! value tracks a class triple (A, B, C): every exponent satisfies h <= A,
//! i <= B, j <= h + B, and the coefficient l1-norm is at most C. The triple
//! transforms as L: (A+1, B, C), D: (A, B+1, (2A+B+1) C), so k rounds of
//! D∘L starting from the unit atom give exactly (k, k, k! 3^k).

use crate::bump::Bump;
use crate::error::Error;
use crate::Result;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct Expansion {
    u0: f64,
    /// (h, i, j) -> coefficient
    terms: BTreeMap<(u32, u32, u32), f64>,
    class: (u32, u32, f64),
}

impl Expansion {
    /// The unit atom F(u) itself, i.e. (h, i, j) = (0, 0, 0).
    pub fn base(u0: f64) -> Expansion {
        let mut terms = BTreeMap::new();
        terms.insert((0, 0, 0), 1.0);
        Expansion { u0, terms, class: (0, 0, 1.0) }
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn class(&self) -> (u32, u32, f64) {
        self.class
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &f64)> {
        self.terms.iter()
    }

    /// Sum of |coefficients|; the class invariant keeps this <= class C.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn apply_l(&self) -> Expansion {
        let mut terms = BTreeMap::new();
        for (&(h, i, j), &c) in &self.terms {
            terms.insert((h + 1, i, j + 1), c);
        }
        let (a, b, cc) = self.class;
        Expansion { u0: self.u0, terms, class: (a + 1, b, cc) }
    }

    pub fn apply_d(&self) -> Expansion {
        let mut terms: BTreeMap<(u32, u32, u32), f64> = BTreeMap::new();
        let mut add = |key: (u32, u32, u32), v: f64| {
            let e = terms.entry(key).or_insert(0.0);
            *e += v;
            if *e == 0.0 {
                terms.remove(&key);
            }
        };
        for (&(h, i, j), &c) in &self.terms {
            if h > 0 {
                add((h - 1, i, j), c * h as f64);
            }
            add((h, i + 1, j), c);
            if j > 0 {
                add((h, i, j + 1), c * j as f64);
            }
        }
        let (a, b, cc) = self.class;
        Expansion {
            u0: self.u0,
            terms,
            class: (a, b + 1, (2 * a + b + 1) as f64 * cc),
        }
    }

    /// Evaluate the expansion at u, with F = B(u)/sqrt(u) and derivatives
    /// by the Leibniz rule. Fails on u <= 0, at the pole u = u0, and when
    /// any F-derivative order exceeds the bump's cap.
    pub fn eval(&self, bump: &Bump, u: f64) -> Result<f64> {
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::Domain(format!("eval requires u > 0, got {u}")));
        }
        if u == self.u0 {
            return Err(Error::Domain(format!("eval at the pole u = u0 = {u}")));
        }
        let max_i = self.terms.keys().map(|k| k.1).max().unwrap_or(0);
        let f_derivs = f_derivatives(bump, u, max_i)?;
        let mut acc = 0.0;
        for (&(h, i, j), &c) in &self.terms {
            let mut v = c * f_derivs[i as usize];
            for _ in 0..h {
                v *= u;
            }
            let d = self.u0 - u;
            for _ in 0..j {
                v /= d;
            }
            acc += v;
        }
        Ok(acc)
    }
}

/// F^(i)(u) for F(u) = B(u)/sqrt(u), i = 0..=max_i.
fn f_derivatives(bump: &Bump, u: f64, max_i: u32) -> Result<Vec<f64>> {
    // d^m/du^m u^{-1/2} = u^{-1/2-m} * prod_{l<m} (-1/2 - l)
    let mut half_pow = Vec::with_capacity(max_i as usize + 1);
    let mut v = 1.0 / u.sqrt();
    let mut coef = 1.0;
    for m in 0..=max_i {
        half_pow.push(v * coef);
        coef *= -0.5 - m as f64;
        v /= u;
    }
    let mut out = Vec::with_capacity(max_i as usize + 1);
    for i in 0..=max_i {
        let mut acc = 0.0;
        let mut binom = 1.0;
        for r in 0..=i {
            if r > 0 {
                binom *= (i - r + 1) as f64 / r as f64;
            }
            acc += binom * bump.deriv(u, r)? * half_pow[(i - r) as usize];
        }
        out.push(acc);
    }
    Ok(out)
}
