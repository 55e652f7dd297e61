//! Elementary arithmetic functions by trial division with a 6k±1 wheel.
//! Intended range is desk scale (n up to ~1e9), where sqrt-n division is
//! instant and needs no sieve storage.

/// Prime factorization as (prime, exponent) pairs, ascending.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut p = 5u64;
    let mut step = 2u64; // alternates 2, 4: 5, 7, 11, 13, ...
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += step;
        step = 6 - step;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Lambda(n): ln p when n = p^k, else 0.
pub fn von_mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let f = factorize(n);
    if f.len() == 1 {
        (f[0].0 as f64).ln()
    } else {
        0.0
    }
}

/// mu(n): (-1)^omega on squarefree n, else 0. mu(1) = 1.
pub fn mobius(n: u64) -> i64 {
    if n == 0 {
        return 0;
    }
    if n == 1 {
        return 1;
    }
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler's totient. phi(0) = 0 by convention.
pub fn euler_phi(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut out = n;
    for (p, _) in factorize(n) {
        out = out / p * (p - 1);
    }
    out
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Reduced rational m/q strictly between 0 and 1.
///
/// `new` reduces to lowest terms before checking the range, so
/// `ModularTwist::new(2, 4)` is the same value as `new(1, 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModularTwist {
    pub m: u64,
    pub q: u64,
}

impl ModularTwist {
    pub fn new(m: u64, q: u64) -> crate::Result<Self> {
        if q == 0 {
            return Err(crate::Error::Domain("twist denominator must be positive".into()));
        }
        let g = gcd(m, q);
        let (m, q) = (m / g, q / g);
        if m == 0 || m >= q {
            return Err(crate::Error::Domain(format!(
                "twist {m}/{q} is outside (0, 1)"
            )));
        }
        Ok(Self { m, q })
    }

    pub fn as_f64(self) -> f64 {
        self.m as f64 / self.q as f64
    }
}
