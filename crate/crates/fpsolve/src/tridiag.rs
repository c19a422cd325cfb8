//! Symmetric tridiagonal eigenvalues (QL with implicit shifts), inverse
//! iteration for selected eigenvectors, and tridiagonal linear solves.

use crate::error::{FpError, Result};

const MAX_QL_SWEEPS: usize = 60;

/// All eigenvalues of the symmetric tridiagonal matrix with diagonal `diag`
/// and off-diagonal `off` (`off.len() == diag.len() - 1`), ascending.
pub fn ql_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert_eq!(off.len(), n.saturating_sub(1));
    let mut d = diag.to_vec();
    if n <= 1 {
        return Ok(d);
    }
    let mut e = off.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(FpError::ConvergenceFailure(format!(
                    "QL iteration exceeded {MAX_QL_SWEEPS} sweeps at index {l}"
                )));
            }
            // implicit shift from the 2x2 at l
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                let t = (d[i] - g) * s + 2.0 * c * b;
                p = s * t;
                d[i + 1] = g + p;
                g = c * t - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Solve a general tridiagonal system with partial pivoting (stable for the
/// nearly singular shifts used by inverse iteration).
///
/// `sub[i]` couples row i to column i-1 (sub[0] unused), `sup[i]` row i to
/// column i+1 (sup[n-1] unused).
fn solve_pivoted(
    sub: &[f64],
    diag: &[f64],
    sup: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut b = diag.to_vec();
    let mut c = sup.to_vec();
    let mut a = sub.to_vec();
    let mut d2 = vec![0.0; n]; // fill-in second superdiagonal
    let mut y = rhs.to_vec();

    for i in 0..n - 1 {
        if a[i + 1].abs() > b[i].abs() {
            // swap full rows i and i+1 over columns i, i+1, i+2
            let (bi, ci, di) = (b[i], c[i], d2[i]);
            b[i] = a[i + 1];
            c[i] = b[i + 1];
            d2[i] = if i + 2 < n { c[i + 1] } else { 0.0 };
            a[i + 1] = bi;
            b[i + 1] = ci;
            if i + 2 < n {
                c[i + 1] = di;
            }
            y.swap(i, i + 1);
        }
        if b[i] == 0.0 {
            return Err(FpError::ConvergenceFailure(
                "singular pivot in tridiagonal solve".into(),
            ));
        }
        let factor = a[i + 1] / b[i];
        b[i + 1] -= factor * c[i];
        if i + 2 < n {
            c[i + 1] -= factor * d2[i];
        }
        y[i + 1] -= factor * y[i];
        a[i + 1] = 0.0;
    }
    if b[n - 1] == 0.0 {
        return Err(FpError::ConvergenceFailure(
            "singular pivot in tridiagonal solve".into(),
        ));
    }
    // back substitution
    let mut x = vec![0.0; n];
    x[n - 1] = y[n - 1] / b[n - 1];
    if n >= 2 {
        x[n - 2] = (y[n - 2] - c[n - 2] * x[n - 1]) / b[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (y[i] - c[i] * x[i + 1] - d2[i] * x[i + 2]) / b[i];
    }
    Ok(x)
}

/// Classic Thomas solve for a diagonally dominant tridiagonal system.
pub fn thomas_solve(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        if i < n - 1 {
            c[i] = sup[i] / m;
        }
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let xi = x[i] - c[i] * x[i + 1];
        x[i] = xi;
    }
    x
}

/// Eigenvector for a converged eigenvalue by inverse iteration, orthogonalized
/// against previously found vectors. Deterministic start vector.
pub fn inverse_iteration(
    diag: &[f64],
    off: &[f64],
    lambda: f64,
    previous: &[Vec<f64>],
) -> Result<Vec<f64>> {
    let n = diag.len();
    let scale = diag
        .iter()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max)
        .max(off.iter().map(|v| v.abs()).fold(0.0f64, f64::max))
        .max(1.0);
    let shifted = lambda + 1e-11 * scale;
    let mut sub = vec![0.0; n];
    let mut sup = vec![0.0; n];
    sub[1..n].copy_from_slice(off);
    sup[..n - 1].copy_from_slice(off);
    let d: Vec<f64> = diag.iter().map(|v| v - shifted).collect();

    // deterministic pseudo-random start
    let mut seed = 0x9e3779b97f4a7c15u64;
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
        .collect();
    normalize(&mut v);

    for _ in 0..8 {
        let mut w = solve_pivoted(&sub, &d, &sup, &v)?;
        for prev in previous {
            let dot: f64 = w.iter().zip(prev).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(prev).for_each(|(a, b)| *a -= dot * b);
        }
        normalize(&mut w);
        // residual ||T w - lambda w||_inf
        let mut res: f64 = 0.0;
        for i in 0..n {
            let mut t = diag[i] * w[i] - lambda * w[i];
            if i > 0 {
                t += off[i - 1] * w[i - 1];
            }
            if i + 1 < n {
                t += off[i] * w[i + 1];
            }
            res = res.max(t.abs());
        }
        v = w;
        if res <= 1e-10 * scale {
            return Ok(v);
        }
    }
    Err(FpError::ConvergenceFailure(
        "inverse iteration did not converge".into(),
    ))
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}
