//! Dirichlet characters mod q as dense value tables, with Gauss sums,
//! Ramanujan sums, and the finite-Fourier inversion identity for primitive
//! characters.
//!
//! Characters are built from a generator decomposition of the unit group:
//! one generator per odd prime-power factor (a lifted primitive root), and
//! the pair {-1, 3} for the 2-part when 8 | q. Every character value is a
//! root of unity evaluated from an exact reduced rational angle, so values
//! that should be exactly 0, 1, -1, i, or -i are bit-exact, and conjugate
//! characters have bitwise-conjugate tables. Character `index` is the
//! mixed-radix encoding of the exponent tuple (first generator least
//! significant), which fixes a deterministic enumeration with the principal
//! character at index 0.

use crate::arith::{factorize, gcd};
use crate::{Error, Result};
use num_complex::Complex64;

const MODULUS_CAP: u64 = 10_000;

#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    q: u64,
    index: usize,
    // reduced angle in turns per residue class; None on non-units
    angles: Vec<Option<(u32, u32)>>,
    values: Vec<Complex64>,
    parity: i32,
    principal: bool,
    conductor: u64,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.q
    }

    pub fn index(&self) -> usize {
        self.index
    }

    /// chi(n), looked up through n mod q.
    pub fn eval(&self, n: u64) -> Complex64 {
        self.values[(n % self.q) as usize]
    }

    /// Angle of chi(n) in turns as a reduced fraction; None when chi(n) = 0.
    pub fn angle(&self, n: u64) -> Option<(u32, u32)> {
        self.angles[(n % self.q) as usize]
    }

    /// Dense table of chi over residues 0..q.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// chi(-1): +1 for even characters, -1 for odd.
    pub fn parity(&self) -> i32 {
        self.parity
    }

    pub fn is_principal(&self) -> bool {
        self.principal
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.q
    }

    /// tau(chi) = sum over n mod q of chi(n) e(n/q).
    pub fn gauss_sum(&self) -> Complex64 {
        let mut re = CSum::default();
        let mut im = CSum::default();
        for a in 0..self.q {
            let v = self.values[a as usize];
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let r = unit_root(a, self.q);
            let t = v * r;
            re.add(t.re);
            im.add(t.im);
        }
        Complex64::new(re.value(), im.value())
    }
}

/// All phi(q) characters mod q in a deterministic order, principal first.
pub fn characters_mod(q: u64) -> Result<Vec<DirichletCharacter>> {
    if q == 0 || q > MODULUS_CAP {
        return Err(Error::Precondition(format!(
            "character modulus must lie in 1..={MODULUS_CAP}, got {q}"
        )));
    }
    let group = Group::build(q);
    let count: u64 = group.ds.iter().product();
    let divisors: Vec<u64> = (1..=q).filter(|d| q % d == 0).collect();
    let mut out = Vec::with_capacity(count as usize);
    for index in 0..count as usize {
        let mut rem = index as u64;
        let t: Vec<u64> = group
            .ds
            .iter()
            .map(|&d| {
                let digit = rem % d;
                rem /= d;
                digit
            })
            .collect();

        let mut angles: Vec<Option<(u32, u32)>> = Vec::with_capacity(q as usize);
        let mut values = Vec::with_capacity(q as usize);
        for a in 0..q as usize {
            match &group.exps[a] {
                None => {
                    angles.push(None);
                    values.push(Complex64::new(0.0, 0.0));
                }
                Some(xs) => {
                    let mut num = 0u64;
                    for l in 0..group.ds.len() {
                        let w = group.big_l / group.ds[l];
                        num = (num + t[l] * xs[l] % group.big_l * w) % group.big_l;
                    }
                    let g = gcd(num, group.big_l);
                    let (nr, dr) = (num / g, group.big_l / g);
                    angles.push(Some((nr as u32, dr as u32)));
                    values.push(root_from_reduced(nr, dr));
                }
            }
        }

        let parity = match angles[(q - 1) as usize % q as usize] {
            Some((0, _)) => 1,
            Some(_) => -1,
            None => unreachable!("-1 is always a unit"),
        };
        let principal = t.iter().all(|&d| d == 0);
        let conductor = conductor_of(q, &divisors, &angles);
        out.push(DirichletCharacter {
            q,
            index,
            angles,
            values,
            parity,
            principal,
            conductor,
        });
    }
    Ok(out)
}

/// Lowest-index real primitive non-principal character mod q.
pub fn quadratic_character(q: u64) -> Result<DirichletCharacter> {
    let chars = characters_mod(q)?;
    chars
        .into_iter()
        .find(|c| {
            !c.is_principal()
                && c.is_primitive()
                && c.angles.iter().flatten().all(|&(_, den)| den <= 2)
        })
        .ok_or_else(|| Error::Domain(format!("no real primitive character mod {q}")))
}

/// sum over units a mod q of e(-am/q); requires 0 < m < q with gcd(m, q) = 1.
pub fn ramanujan_sum(q: u64, m: u64) -> Result<Complex64> {
    if m == 0 || m >= q {
        return Err(Error::Precondition(format!(
            "ramanujan sum needs 0 < m < q, got m={m}, q={q}"
        )));
    }
    if gcd(m, q) != 1 {
        return Err(Error::Precondition(format!(
            "ramanujan sum needs gcd(m, q) = 1, got m={m}, q={q}"
        )));
    }
    let mut re = CSum::default();
    let mut im = CSum::default();
    for a in 1..q {
        if gcd(a, q) != 1 {
            continue;
        }
        let r = unit_root((q - a * m % q) % q, q);
        re.add(r.re);
        im.add(r.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Both sides of the inversion identity expressing chi(n) through its
/// finite Fourier transform: lhs = chi(n), rhs = (chi(-1) tau(chi) / q) times
/// the sum over m mod q of conj(chi(m)) e(nm/q). Exact for primitive chi.
pub fn char_inversion_check(
    chi: &DirichletCharacter,
    n: u64,
) -> Result<(Complex64, Complex64)> {
    if chi.q == 1 || !chi.is_primitive() {
        return Err(Error::Precondition(format!(
            "inversion identity requires a primitive character mod q > 1 \
             (got q={}, conductor={})",
            chi.q, chi.conductor
        )));
    }
    let q = chi.q;
    let lhs = chi.eval(n);
    let tau = chi.gauss_sum();
    let nr = n % q;
    let mut re = CSum::default();
    let mut im = CSum::default();
    for m in 0..q {
        let v = chi.values[m as usize];
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let t = v.conj() * unit_root(nr * m % q, q);
        re.add(t.re);
        im.add(t.im);
    }
    let s = Complex64::new(re.value(), im.value());
    let rhs = tau * s * (chi.parity as f64 / q as f64);
    Ok((lhs, rhs))
}

/// e(num/den) with the fraction reduced first, so quarter-turn multiples
/// come out bit-exact.
pub(crate) fn unit_root(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    let g = gcd(num, den);
    root_from_reduced(num / g, den / g)
}

fn root_from_reduced(num: u64, den: u64) -> Complex64 {
    match (num, den) {
        (0, _) => Complex64::new(1.0, 0.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (3, 4) => Complex64::new(0.0, -1.0),
        _ => {
            // signed representative keeps conjugate angles bitwise-conjugate
            let r = if 2 * num > den {
                num as f64 - den as f64
            } else {
                num as f64
            };
            let theta = core::f64::consts::TAU * (r / den as f64);
            Complex64::new(theta.cos(), theta.sin())
        }
    }
}

// Unit group of Z/q as a product of cyclic pieces: `ds` holds generator
// orders (components in ascending prime order), `exps[a]` the exponent tuple
// of residue a, `big_l` the lcm of the orders.
struct Group {
    ds: Vec<u64>,
    big_l: u64,
    exps: Vec<Option<Vec<u64>>>,
}

impl Group {
    fn build(q: u64) -> Group {
        let mut comps = Vec::new();
        for (p, e) in factorize(q) {
            comps.push(component(p, e));
        }
        let mut ds = Vec::new();
        for (_, orders, _) in &comps {
            ds.extend_from_slice(orders);
        }
        let big_l = ds.iter().fold(1u64, |acc, &d| acc / gcd(acc, d) * d);
        let mut exps: Vec<Option<Vec<u64>>> = Vec::with_capacity(q as usize);
        for a in 0..q {
            if q > 1 && gcd(a, q) != 1 {
                exps.push(None);
                continue;
            }
            let mut xs = Vec::with_capacity(ds.len());
            for (pe, _, dlog) in &comps {
                xs.extend_from_slice(
                    dlog[(a % pe) as usize]
                        .as_ref()
                        .expect("unit mod q is a unit mod every factor"),
                );
            }
            exps.push(Some(xs));
        }
        Group { ds, big_l, exps }
    }
}

// (p^e, generator orders, discrete-log table over residues mod p^e)
fn component(p: u64, e: u32) -> (u64, Vec<u64>, Vec<Option<Vec<u64>>>) {
    let pe = p.pow(e);
    if p == 2 {
        return match e {
            1 => {
                let mut d = vec![None; 2];
                d[1] = Some(vec![]);
                (2, vec![], d)
            }
            2 => {
                let mut d = vec![None; 4];
                d[1] = Some(vec![0]);
                d[3] = Some(vec![1]);
                (4, vec![2], d)
            }
            _ => {
                let half = pe / 4;
                let mut d = vec![None; pe as usize];
                for a in 0..2u64 {
                    let mut x = if a == 0 { 1 } else { pe - 1 };
                    for b in 0..half {
                        d[x as usize] = Some(vec![a, b]);
                        x = x * 3 % pe;
                    }
                }
                (pe, vec![2, half], d)
            }
        };
    }
    let order = (p - 1) * p.pow(e - 1);
    let mut g = primitive_root(p);
    if e >= 2 && modpow(g, p - 1, p * p) == 1 {
        g += p;
    }
    let mut d = vec![None; pe as usize];
    let mut x = 1u64;
    for k in 0..order {
        d[x as usize] = Some(vec![k]);
        x = x * g % pe;
    }
    (pe, vec![order], d)
}

fn primitive_root(p: u64) -> u64 {
    let reduced: Vec<u64> = factorize(p - 1).iter().map(|&(r, _)| (p - 1) / r).collect();
    (2..p)
        .find(|&g| reduced.iter().all(|&e| modpow(g, e, p) != 1))
        .expect("every odd prime has a primitive root")
}

fn modpow(b: u64, mut e: u64, m: u64) -> u64 {
    let mut base = (b % m) as u128;
    let m = m as u128;
    let mut acc = 1u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        e >>= 1;
    }
    acc as u64
}

// smallest divisor d of q such that chi is trivial on units congruent to
// 1 mod d; angle == 0 is an exact integer test
fn conductor_of(q: u64, divisors: &[u64], angles: &[Option<(u32, u32)>]) -> u64 {
    'outer: for &d in divisors {
        let mut a = 1 + d;
        while a < q {
            if let Some((num, _)) = angles[a as usize] {
                if num != 0 {
                    continue 'outer;
                }
            }
            a += d;
        }
        return d;
    }
    q
}

#[derive(Default)]
struct CSum {
    s: f64,
    c: f64,
}

impl CSum {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.s + y;
        self.c = (t - self.s) - y;
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s
    }
}
