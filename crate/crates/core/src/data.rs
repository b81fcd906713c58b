//! Boundary datasets and the conversions between means and wave data.
//!
//! In 3D the solution of the wave equation on the boundary and the
//! spherical means are related by the Kirchhoff formula
//! `P(y, t) = ∂t (t M(y, t))`. In 2D the circular means and the wave data
//! form an Abel pair:
//!
//! * `P(y, t) = t ∫₀^{π/2} ∂r m(y, t sin θ) dθ`
//! * `m(y, r) = (2/π) ∫₀^{π/2} P(y, r sin θ) dθ`
//!
//! Both are the usual Abel integrals after the substitution `r = t sin θ`,
//! which removes the endpoint singularity.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::geometry::Domain;
use crate::numerics::{
    composite_gl, cumulative_trapezoid, fd4, fd4_even, gauss_legendre, interp4, Parity,
};
use crate::phantom::Phantom;

/// `count` samples uniformly spaced on `[0, max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadialGrid {
    pub count: usize,
    pub max: f64,
}

impl RadialGrid {
    pub fn new(count: usize, max: f64) -> Result<Self> {
        if count < 2 {
            return Err(Error::TooFewSamples {
                needed: 2,
                found: count,
            });
        }
        if !(max.is_finite() && max > 0.0) {
            return Err(Error::DegenerateSize {
                what: "radial range",
                value: max,
            });
        }
        Ok(RadialGrid { count, max })
    }

    pub fn step(&self) -> f64 {
        self.max / (self.count - 1) as f64
    }

    pub fn value(&self, k: usize) -> f64 {
        self.max * k as f64 / (self.count - 1) as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Quantity {
    /// Circular (2D) or spherical (3D) means.
    Means,
    /// Boundary values of the wave solution.
    Wave,
}

/// Per-detector radial profiles, detector-major: the profile of detector
/// `i` (global storage order of [`Domain::detectors`]) occupies
/// `values[i * count .. (i + 1) * count]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Samples {
    pub domain: Domain,
    pub grid: RadialGrid,
    pub values: Vec<f64>,
}

impl Samples {
    pub fn new(domain: Domain, grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        let expected = domain.detector_count() * grid.count;
        if values.len() != expected {
            return Err(Error::ShapeMismatch {
                left: values.len(),
                right: expected,
            });
        }
        Ok(Samples {
            domain,
            grid,
            values,
        })
    }

    pub fn zeros(domain: Domain, grid: RadialGrid) -> Self {
        let n = domain.detector_count() * grid.count;
        Samples {
            domain,
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn detector_count(&self) -> usize {
        self.domain.detector_count()
    }

    pub fn row(&self, det: usize) -> &[f64] {
        &self.values[det * self.grid.count..(det + 1) * self.grid.count]
    }

    /// Largest magnitude at the last radius relative to the largest
    /// magnitude overall (0 for an all-zero dataset).
    pub fn support_violation(&self) -> f64 {
        let n = self.grid.count;
        let peak = self.values.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        let tail = self
            .values
            .chunks(n)
            .fold(0.0f64, |m, r| m.max(r[n - 1].abs()));
        tail / peak
    }

    fn map_rows(
        &self,
        exec: &dyn Executor,
        f: &(dyn Fn(&[f64], &mut [f64]) + Sync),
    ) -> Result<Self> {
        let mut out = vec![0.0; self.values.len()];
        let n = self.grid.count;
        exec.run_rows(&mut out, n, &|i, row| f(self.row(i), row));
        Ok(Samples {
            domain: self.domain.clone(),
            grid: self.grid,
            values: out,
        })
    }
}

/// Means `m(y, r)` (2D) or `M(y, t)` (3D).
#[derive(Clone, Debug, PartialEq)]
pub struct MeansDataset(pub Samples);

/// Wave data `P(y, t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveDataset(pub Samples);

impl core::ops::Deref for MeansDataset {
    type Target = Samples;
    fn deref(&self) -> &Samples {
        &self.0
    }
}

impl core::ops::Deref for WaveDataset {
    type Target = Samples;
    fn deref(&self) -> &Samples {
        &self.0
    }
}

/// Samples the exact means of `phantom` at every detector.
pub fn forward_means(
    phantom: &Phantom,
    domain: &Domain,
    grid: RadialGrid,
    exec: &dyn Executor,
) -> Result<MeansDataset> {
    if phantom.dim != domain.dim {
        return Err(Error::DimensionMismatch {
            expected: domain.dim,
            found: phantom.dim,
        });
    }
    let dets: Vec<_> = domain.detectors().map(|d| d.pos).collect();
    let mut values = vec![0.0; dets.len() * grid.count];
    exec.run_rows(&mut values, grid.count, &|i, row| {
        for (k, out) in row.iter_mut().enumerate() {
            *out = phantom.mean(dets[i], grid.value(k));
        }
    });
    Ok(MeansDataset(Samples::new(domain.clone(), grid, values)?))
}

fn need_dim(s: &Samples, dim: usize) -> Result<()> {
    if s.domain.dim != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.domain.dim,
        });
    }
    Ok(())
}

fn need_samples(s: &Samples, n: usize) -> Result<()> {
    if s.grid.count < n {
        return Err(Error::TooFewSamples {
            needed: n,
            found: s.grid.count,
        });
    }
    Ok(())
}

/// `P = ∂t (t M)` by fourth-order differences.
pub fn means_to_wave_3d(m: &MeansDataset, exec: &dyn Executor) -> Result<WaveDataset> {
    need_dim(m, 3)?;
    need_samples(m, 5)?;
    let g = m.grid;
    let dt = g.step();
    let out = m.map_rows(exec, &|src, dst| {
        let tm: Vec<f64> = src
            .iter()
            .enumerate()
            .map(|(k, x)| g.value(k) * x)
            .collect();
        let d = fd4(&tm, dt).expect("length checked");
        dst.copy_from_slice(&d);
    })?;
    Ok(WaveDataset(out))
}

/// `M = (1/t) ∫₀ᵗ P` by the trapezoid rule; `M(0)` by quadratic
/// extrapolation from the next three samples.
pub fn wave_to_means_3d(p: &WaveDataset, exec: &dyn Executor) -> Result<MeansDataset> {
    need_dim(p, 3)?;
    need_samples(p, 4)?;
    let g = p.grid;
    let dt = g.step();
    let out = p.map_rows(exec, &|src, dst| {
        let c = cumulative_trapezoid(src, dt);
        for k in 1..dst.len() {
            dst[k] = c[k] / g.value(k);
        }
        dst[0] = 3.0 * dst[1] - 3.0 * dst[2] + dst[3];
    })?;
    Ok(MeansDataset(out))
}

/// Gauss points per θ-panel in the Abel quadratures.
const ABEL_ORDER: usize = 4;

/// `P(t) = t ∫₀^{π/2} m'(t sin θ) dθ` with `m'` from fourth-order
/// differences of the even extension and cubic lookup of its odd
/// extension.
pub fn means_to_wave_2d(m: &MeansDataset, exec: &dyn Executor) -> Result<WaveDataset> {
    need_dim(m, 2)?;
    need_samples(m, 5)?;
    let g = m.grid;
    let dr = g.step();
    let rule = gauss_legendre(ABEL_ORDER);
    let out = m.map_rows(exec, &|src, dst| {
        let dm = fd4_even(src, dr).expect("length checked");
        for k in 0..dst.len() {
            let t = g.value(k);
            let panels = k.max(1);
            let integral = composite_gl(0.0, FRAC_PI_2, panels, &rule, |th| {
                interp4(&dm, dr, t * libm::sin(th), Parity::Odd)
            });
            dst[k] = t * integral;
        }
    })?;
    Ok(WaveDataset(out))
}

/// `m(r) = (2/π) ∫₀^{π/2} P(r sin θ) dθ` with cubic lookup of the even
/// extension of `P`.
pub fn wave_to_means_2d(p: &WaveDataset, exec: &dyn Executor) -> Result<MeansDataset> {
    need_dim(p, 2)?;
    need_samples(p, 4)?;
    let g = p.grid;
    let dr = g.step();
    let rule = gauss_legendre(ABEL_ORDER);
    let out = p.map_rows(exec, &|src, dst| {
        for k in 0..dst.len() {
            let r = g.value(k);
            let panels = k.max(1);
            let integral = composite_gl(0.0, FRAC_PI_2, panels, &rule, |th| {
                interp4(src, dr, r * libm::sin(th), Parity::Even)
            });
            dst[k] = integral / FRAC_PI_2;
        }
    })?;
    Ok(MeansDataset(out))
}
