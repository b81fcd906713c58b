//! Radix-2 complex FFT and FFT-based linear convolution.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

/// In-place iterative radix-2 FFT. `inverse` applies the conjugate
/// transform and the `1/n` scaling. Panics if the length is not a power of
/// two.
pub fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    let n = buf.len();
    assert!(n.is_power_of_two(), "fft length {n} is not a power of two");
    if n <= 1 {
        return;
    }
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * PI / len as f64;
        let half = len / 2;
        let tw: Vec<Complex64> = (0..half)
            .map(|k| Complex64::new(libm::cos(ang * k as f64), libm::sin(ang * k as f64)))
            .collect();
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let u = buf[start + k];
                let v = buf[start + k + half] * tw[k];
                buf[start + k] = u + v;
                buf[start + k + half] = u - v;
            }
        }
        len <<= 1;
    }
    if inverse {
        let s = 1.0 / n as f64;
        for z in buf.iter_mut() {
            *z *= s;
        }
    }
}

/// Linear convolution plan for a fixed real kernel.
///
/// The kernel is indexed by lag `k ∈ [-(m-1), m-1]` and stored as
/// `kernel[k + m - 1]`; `apply` returns `out[i] = Σ_j x[j] kernel[i - j]`
/// for `i` in `0..m`, computed with zero padding to avoid wrap-around.
pub struct Convolver {
    m: usize,
    size: usize,
    spectrum: Vec<Complex64>,
}

impl Convolver {
    pub fn new(kernel: &[f64]) -> Self {
        assert!(kernel.len() % 2 == 1, "kernel must have odd length");
        let m = kernel.len().div_ceil(2);
        let size = (3 * m).next_power_of_two();
        let mut spectrum = vec![Complex64::new(0.0, 0.0); size];
        for (idx, &v) in kernel.iter().enumerate() {
            let lag = idx as isize - (m as isize - 1);
            let slot = lag.rem_euclid(size as isize) as usize;
            spectrum[slot] = Complex64::new(v, 0.0);
        }
        fft_in_place(&mut spectrum, false);
        Convolver { m, size, spectrum }
    }

    pub fn len(&self) -> usize {
        self.m
    }

    pub fn is_empty(&self) -> bool {
        self.m == 0
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.m);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.size];
        for (b, &v) in buf.iter_mut().zip(x) {
            *b = Complex64::new(v, 0.0);
        }
        fft_in_place(&mut buf, false);
        for (b, s) in buf.iter_mut().zip(&self.spectrum) {
            *b *= s;
        }
        fft_in_place(&mut buf, true);
        buf[..self.m].iter().map(|z| z.re).collect()
    }
}
