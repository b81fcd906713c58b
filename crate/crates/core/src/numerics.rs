//! One-dimensional numerical building blocks on uniform grids.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Fourth-order first derivative of uniformly sampled `f` with spacing `h`.
///
/// Central five-point stencil in the interior; the two samples at each end
/// use the one-sided fourth-order stencils.
pub fn fd4(f: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = f.len();
    if n < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            found: n,
        });
    }
    let c = 1.0 / (12.0 * h);
    let mut d = vec![0.0; n];
    d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for i in 2..n - 2 {
        d[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]);
    }
    d[n - 2] =
        -c * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
    d[n - 1] = -c
        * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]);
    Ok(d)
}

/// Like [`fd4`], but treats `f` as the restriction of an even function to
/// `[0, ∞)`: the left end uses mirrored samples, so `d[0] = 0`.
pub fn fd4_even(f: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut d = fd4(f, h)?;
    let c = 1.0 / (12.0 * h);
    d[0] = 0.0;
    // f[-1] = f[1]
    d[1] = c * (f[1] - 8.0 * f[0] + 8.0 * f[2] - f[3]);
    Ok(d)
}

/// Weights of the cubic Lagrange interpolant through nodes -1, 0, 1, 2
/// evaluated at fractional offset `t` from node 0.
#[inline]
pub fn lagrange4(t: f64) -> [f64; 4] {
    let tm1 = t - 1.0;
    let tm2 = t - 2.0;
    let tp1 = t + 1.0;
    [
        -t * tm1 * tm2 / 6.0,
        tp1 * tm1 * tm2 / 2.0,
        -tp1 * t * tm2 / 2.0,
        tp1 * t * tm1 / 6.0,
    ]
}

/// Parity used to fill the stencil on the left of sample 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
    /// No mirroring: the stencil is shifted right instead.
    None,
}

/// Four-point Lagrange lookup of uniformly sampled `f` (spacing `h`, first
/// sample at 0) at `x >= 0`. Returns 0 beyond the last sample. Near the
/// right end the stencil is shifted left.
#[inline]
pub fn interp4(f: &[f64], h: f64, x: f64, parity: Parity) -> f64 {
    let n = f.len();
    let u = x / h;
    let i = u as usize;
    if i + 1 >= n {
        if i + 1 == n && u <= (n - 1) as f64 {
            return f[n - 1];
        }
        return 0.0;
    }
    let (base, t) = if i + 2 >= n {
        (n as isize - 4, u - (n - 4) as f64)
    } else {
        (i as isize - 1, u - i as f64 + 1.0)
    };
    // t is measured from node `base`; shift to the [-1, 0, 1, 2] convention.
    let w = lagrange4(t - 1.0);
    let mut s = 0.0;
    for k in 0..4 {
        let j = base + k as isize;
        let v = if j >= 0 {
            f[j as usize]
        } else {
            match parity {
                Parity::Even => f[(-j) as usize],
                Parity::Odd => -f[(-j) as usize],
                Parity::None => {
                    return interp4_shifted(f, u);
                }
            }
        };
        s += w[k] * v;
    }
    s
}

fn interp4_shifted(f: &[f64], u: f64) -> f64 {
    let w = lagrange4(u - 1.0);
    w[0] * f[0] + w[1] * f[1] + w[2] * f[2] + w[3] * f[3]
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` panels of the
/// given reference rule.
pub fn composite_gl(
    a: f64,
    b: f64,
    panels: usize,
    rule: &(Vec<f64>, Vec<f64>),
    mut f: impl FnMut(f64) -> f64,
) -> f64 {
    let hp = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * hp;
        let mid = lo + 0.5 * hp;
        let mut s = 0.0;
        for (xi, wi) in rule.0.iter().zip(&rule.1) {
            s += wi * f(mid + 0.5 * hp * xi);
        }
        total += 0.5 * hp * s;
    }
    total
}

/// Running trapezoid integral, `out[0] = 0`.
pub fn cumulative_trapezoid(f: &[f64], h: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    for i in 1..f.len() {
        out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    }
    out
}
