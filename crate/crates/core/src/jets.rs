//! Truncated Taylor series ("jets") in one variable: a jet of length n+1
//! holds coefficients a[k] = f^(k)(x0)/k!. Standard power-series recurrences
//! give exact derivative propagation through products, quotients, exp and
//! sin/cos without symbolic differentiation. All operations require equal
//! input lengths and return that length.

pub fn jet_const(c: f64, len: usize) -> Vec<f64> {
    let mut a = vec![0.0; len];
    a[0] = c;
    a
}

/// Jet of the identity u -> u at x0.
pub fn jet_var(x0: f64, len: usize) -> Vec<f64> {
    let mut a = vec![0.0; len];
    a[0] = x0;
    if len > 1 {
        a[1] = 1.0;
    }
    a
}

pub fn jet_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn jet_sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn jet_scale(a: &[f64], c: f64) -> Vec<f64> {
    a.iter().map(|x| c * x).collect()
}

pub fn jet_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    let mut c = vec![0.0; n];
    for i in 0..n {
        if a[i] == 0.0 {
            continue;
        }
        for j in 0..n - i {
            c[i + j] += a[i] * b[j];
        }
    }
    c
}

/// a/b with b[0] != 0, by the long-division recurrence.
pub fn jet_div(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len());
    assert!(b[0] != 0.0, "jet_div: leading coefficient vanishes");
    let n = a.len();
    let mut c = vec![0.0; n];
    for k in 0..n {
        let mut s = a[k];
        for j in 1..=k {
            s -= b[j] * c[k - j];
        }
        c[k] = s / b[0];
    }
    c
}

pub fn jet_recip(a: &[f64]) -> Vec<f64> {
    jet_div(&jet_const(1.0, a.len()), a)
}

pub fn jet_exp(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut s = vec![0.0; n];
    s[0] = a[0].exp();
    for k in 1..n {
        let mut acc = 0.0;
        for j in 1..=k {
            acc += j as f64 * a[j] * s[k - j];
        }
        s[k] = acc / k as f64;
    }
    s
}

/// (sin(a), cos(a)) jets via the coupled ODE recurrence.
pub fn jet_sincos(a: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = a.len();
    let mut s = vec![0.0; n];
    let mut c = vec![0.0; n];
    let (s0, c0) = a[0].sin_cos();
    s[0] = s0;
    c[0] = c0;
    for k in 1..n {
        let mut sa = 0.0;
        let mut ca = 0.0;
        for j in 1..=k {
            sa += j as f64 * a[j] * c[k - j];
            ca += j as f64 * a[j] * s[k - j];
        }
        s[k] = sa / k as f64;
        c[k] = -ca / k as f64;
    }
    (s, c)
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// k-th derivative value from a jet.
pub fn jet_deriv(a: &[f64], k: usize) -> f64 {
    a[k] * factorial(k)
}
