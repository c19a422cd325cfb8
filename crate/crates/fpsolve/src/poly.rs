//! Three-term recurrences for the polynomial parts of closed-form
//! wavefunctions. Factorial-free formulations keep levels up to ~20 stable.

use statrs::function::gamma::ln_gamma;

/// Normalized Hermite values `h_n(u) = H_n(u)/sqrt(2^n n!)`.
///
/// Returns `(h_n, h_{n-1})`; the second entry feeds `h_n'(u) = sqrt(2n) h_{n-1}(u)`.
pub fn hermite_normalized(n: usize, u: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = std::f64::consts::SQRT_2 * u;
    for k in 1..n {
        let kf = k as f64;
        let next = u * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Associated Legendre with the `(1-t^2)^{m/2}` prefactor stripped:
/// `R_l^m(t) = P_l^m(t) / (1-t^2)^{m/2}`, a degree `l-m` polynomial in `t`.
///
/// Returns `(R_l^m, R_{l-1}^m, R_{l-2}^m)` (entries are 0 when the degree
/// drops below `m`). Condon–Shortley phase included.
pub fn assoc_legendre_reduced(l: u32, m: u32, t: f64) -> (f64, f64, f64) {
    assert!(m >= 1 && l >= m, "need l >= m >= 1");
    // R_m^m = (-1)^m (2m-1)!!
    let mut rmm = 1.0;
    for k in 1..=m {
        rmm *= -((2 * k - 1) as f64);
    }
    if l == m {
        return (rmm, 0.0, 0.0);
    }
    let mut prev2 = 0.0;
    let mut prev = rmm;
    let mut cur = t * (2 * m + 1) as f64 * rmm; // R_{m+1}^m
    for ll in (m + 2)..=l {
        let next = (t * (2 * ll - 1) as f64 * cur - (ll + m - 1) as f64 * prev)
            / (ll - m) as f64;
        prev2 = prev;
        prev = cur;
        cur = next;
    }
    (cur, prev, prev2)
}

/// Generalized Laguerre `L_n^{(alpha)}(z)`.
pub fn laguerre(n: usize, alpha: f64, z: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - z) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn ln_factorial(n: usize) -> f64 {
    ln_gamma(n as f64 + 1.0)
}

pub fn ln_gamma_fn(x: f64) -> f64 {
    ln_gamma(x)
}
