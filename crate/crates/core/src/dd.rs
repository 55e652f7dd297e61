//! Double-double arithmetic: an unevaluated sum hi + lo of two f64 with
//! |lo| <= ulp(hi)/2, giving ~32 significant digits. Used on phase-critical
//! paths where an angle like theta(t) or gamma*ln(xi) is huge but must be
//! known mod 2*pi to ~1e-13: plain f64 loses the reduction entirely once the
//! angle passes ~1e4.
//!
//! Algorithms are the classical error-free transformations (two_sum, fma
//! product) plus the usual renormalized add/mul/div; ln is computed from
//! scratch via frexp range reduction and an atanh series so the module has
//! no tables beyond a handful of frozen constant splits.

/// hi + lo, normalized.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Requires |a| >= |b| (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    /// 2*pi
    pub const TWO_PI: Dd = Dd { hi: 6.283185307179586, lo: 2.4492935982947064e-16 };
    /// pi
    pub const PI: Dd = Dd { hi: 3.141592653589793, lo: 1.2246467991473532e-16 };
    /// pi/2
    pub const FRAC_PI_2: Dd = Dd { hi: 1.5707963267948966, lo: 6.123233995736766e-17 };
    /// pi/8
    pub const FRAC_PI_8: Dd = Dd { hi: 0.39269908169872414, lo: 1.5308084989341915e-17 };
    /// ln 2
    pub const LN_2: Dd = Dd { hi: 0.6931471805599453, lo: 2.3190468138462996e-17 };
    /// ln(2*pi)
    pub const LN_TWO_PI: Dd = Dd { hi: 1.8378770664093456, lo: -7.756588316134483e-17 };
    /// 1/(2*pi)
    pub const FRAC_1_TWO_PI: Dd = Dd { hi: 0.15915494309189535, lo: -9.839338337591243e-18 };
    /// 1/pi
    pub const FRAC_1_PI: Dd = Dd { hi: 0.3183098861837907, lo: -1.9678676675182486e-17 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) { self.neg() } else { self }
    }

    pub fn add(self, b: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    pub fn add_f64(self, b: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, b);
        let (hi, lo) = quick_two_sum(s1, s2 + self.lo);
        Dd { hi, lo }
    }

    pub fn sub(self, b: Dd) -> Dd {
        self.add(b.neg())
    }

    pub fn sub_f64(self, b: f64) -> Dd {
        self.add_f64(-b)
    }

    pub fn mul(self, b: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + self.hi * b.lo + self.lo * b.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        Dd { hi, lo }
    }

    /// Exact when b is a power of two.
    #[inline]
    pub fn scale_pow2(self, b: f64) -> Dd {
        Dd { hi: self.hi * b, lo: self.lo * b }
    }

    pub fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self.sub(b.mul_f64(q1));
        let q2 = r.hi / b.hi;
        let r = r.sub(b.mul_f64(q2));
        let q3 = r.hi / b.hi;
        let (s1, s2) = quick_two_sum(q1, q2);
        Dd { hi: s1, lo: s2 }.add_f64(q3)
    }

    pub fn div_f64(self, b: f64) -> Dd {
        self.div(Dd::from_f64(b))
    }

    pub fn recip(self) -> Dd {
        Dd::from_f64(1.0).div(self)
    }

    /// One Newton step on top of the f64 square root: full dd accuracy for
    /// normal positive inputs.
    pub fn sqrt(self) -> Dd {
        if self.hi == 0.0 && self.lo == 0.0 {
            return Dd::ZERO;
        }
        debug_assert!(self.hi > 0.0);
        let y = self.hi.sqrt();
        let y_dd = Dd::from_f64(y);
        let corr = self.sub(y_dd.mul(y_dd)).div_f64(2.0 * y);
        y_dd.add(corr)
    }

    pub fn floor(self) -> Dd {
        let f = self.hi.floor();
        if f == self.hi {
            let (hi, lo) = quick_two_sum(f, self.lo.floor());
            Dd { hi, lo }
        } else {
            Dd { hi: f, lo: 0.0 }
        }
    }

    /// Nearest integer (ties away from zero, inherited from f64::round).
    pub fn round(self) -> Dd {
        let r = self.hi.round();
        if (r - self.hi).abs() == 0.5 {
            // hi sits exactly on a half-integer: lo decides the side.
            let adj = if self.lo > 0.0 && r < self.hi {
                1.0
            } else if self.lo < 0.0 && r > self.hi {
                -1.0
            } else {
                0.0
            };
            Dd { hi: r + adj, lo: 0.0 }
        } else {
            Dd { hi: r, lo: 0.0 }
        }
    }
}

/// Natural log of a positive f64 to full dd accuracy.
///
/// x = m * 2^e with m in [1/sqrt(2), sqrt(2)); ln m = 2*atanh(z) with
/// z = (m-1)/(m+1), |z| <= 0.1716, so ~21 odd-power terms reach 1e-33.
pub fn dd_ln(x: f64) -> Dd {
    assert!(x > 0.0 && x.is_finite(), "dd_ln domain: x = {x}");
    let bits = x.to_bits();
    let mut e = ((bits >> 52) & 0x7ff) as i64 - 1022;
    let mut m = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | (1022u64 << 52));
    debug_assert!((0.5..1.0).contains(&m));
    if m < std::f64::consts::FRAC_1_SQRT_2 {
        m *= 2.0;
        e -= 1;
    }
    // m-1 is exact (Sterbenz); 1+m carries a rounding error captured by two_sum.
    let num = Dd::from_f64(m - 1.0);
    let (dh, dl) = two_sum(1.0, m);
    let z = num.div(Dd { hi: dh, lo: dl });
    let zz = z.mul(z);
    let mut term = z;
    let mut sum = z;
    for k in 1..=24u32 {
        term = term.mul(zz);
        sum = sum.add(term.div_f64((2 * k + 1) as f64));
        if term.hi.abs() < 1e-35 {
            break;
        }
    }
    Dd::LN_2.mul_f64(e as f64).add(sum.scale_pow2(2.0))
}

/// x mod 2*pi, reduced to [-pi, pi] up to rounding, returned as f64.
/// Valid while |x|/(2*pi) stays below ~2^52.
pub fn reduce_mod_2pi(x: Dd) -> f64 {
    let k = x.mul(Dd::FRAC_1_TWO_PI).round();
    debug_assert!(k.hi.abs() < 4.5e15);
    x.sub(Dd::TWO_PI.mul_f64(k.hi)).to_f64()
}

/// x mod 1, reduced to [-1/2, 1/2] up to rounding ("turns").
pub fn reduce_turns(x: Dd) -> f64 {
    let k = x.round();
    debug_assert!(k.hi.abs() < 4.5e15);
    x.sub(k).to_f64()
}

/// e(x) = exp(2*pi*i*x) for x in turns, carried as dd: returns (re, im).
pub fn e_of_turns(x: Dd) -> (f64, f64) {
    let r = reduce_turns(x);
    let ang = std::f64::consts::TAU * r;
    (ang.cos(), ang.sin())
}
