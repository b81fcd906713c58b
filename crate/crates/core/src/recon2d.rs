//! Reconstruction from circular means on a polygon boundary.
//!
//! ```text
//! f(x) = (1/π) Σ_j ∫_{Φ_j} n_j·(x - y)/|x - y| Q_j(y, |x - y|) dl(y)
//! Q(y, s) = ∂s PV ∫₀^R r m(y, r) / (r² - s²) dr
//! ```
//!
//! `Φ_j` are the replicated boundary lines carrying the odd extension of
//! the data of side `j`, truncated to a disk. With the split
//! `r/(r² - s²) = ½/(r - s) + ½/(r + s)` the inner integral is a Hilbert
//! transform of the odd extension `m_o` of `m`:
//! `H(s) = ½ PV ∫_{-R}^{R} m_o(r)/(r - s) dr`. On the radius lattice it
//! is evaluated with the alternating rule, which only pairs samples of
//! opposite index parity: `H_i = Σ_{k - i odd} m_o[k] / (k - i)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::data::{wave_to_means_2d, MeansDataset, WaveDataset};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::fft::Convolver;
use crate::geometry::Domain;
use crate::grid::{GridSpec, ImageGrid};
use crate::numerics::{fd4_even, interp4, Parity};
use crate::replication::{skeleton_faces, tiles_within};
use crate::vector::{self as v, Vec3};

/// `Q(y_i, s)` per physical detector on the lattice `s_k = k·ds`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredProfiles2D {
    pub ds: f64,
    pub count: usize,
    /// Detector-major, `count` values per detector.
    pub values: Vec<f64>,
}

impl FilteredProfiles2D {
    pub fn row(&self, det: usize) -> &[f64] {
        &self.values[det * self.count..(det + 1) * self.count]
    }

    /// Largest `s` that can be looked up.
    pub fn s_max(&self) -> f64 {
        (self.count - 1) as f64 * self.ds
    }

    #[inline]
    pub fn lookup(&self, det: usize, s: f64) -> f64 {
        interp4(self.row(det), self.ds, s, Parity::Odd)
    }
}

/// Samples in the `s` lattice needed to reach `s_max`, with room for the
/// difference and interpolation stencils.
fn s_count(ds: f64, n_s: usize, s_max: f64) -> usize {
    let need = libm::ceil(s_max / ds) as usize + 4;
    n_s.max(need)
}

/// Hilbert filter plan for `n` radii and `n_s` output samples.
pub struct PvFilter {
    n: usize,
    n_s: usize,
    conv: Convolver,
}

impl PvFilter {
    pub fn new(n: usize, n_s: usize) -> Self {
        let m = (2 * n - 1).max(n - 1 + n_s);
        // kern[p] at lag p - (m - 1): 1/lag for odd lags
        let kern: Vec<f64> = (0..2 * m - 1)
            .map(|p| {
                let lag = p as i64 - (m as i64 - 1);
                if lag.rem_euclid(2) == 1 {
                    1.0 / lag as f64
                } else {
                    0.0
                }
            })
            .collect();
        PvFilter {
            n,
            n_s,
            conv: Convolver::new(&kern),
        }
    }

    /// `H_i` for `i < n_s` from the radius profile `m`.
    pub fn hilbert(&self, m: &[f64]) -> Vec<f64> {
        assert_eq!(m.len(), self.n);
        let n = self.n;
        let mut x = vec![0.0; self.conv.len()];
        // x[j] = m_o[j - (n - 1)]
        for k in 1..n {
            x[n - 1 + k] = m[k];
            x[n - 1 - k] = -m[k];
        }
        let y = self.conv.apply(&x);
        // H_i = Σ_k m_o[k] K(k - i) = -Σ_k m_o[k] K(i - k)
        (0..self.n_s).map(|i| -y[i + n - 1]).collect()
    }
}

/// PV filtering of every detector's means followed by `∂s`.
///
/// The `s` lattice shares the radius spacing; it has `max(n_s, ⌈s_max/Δr⌉
/// + 4)` samples so that every lookup up to `s_max` is covered.
pub fn filter_2d(
    m: &MeansDataset,
    n_s: usize,
    s_max: f64,
    exec: &dyn Executor,
) -> Result<FilteredProfiles2D> {
    if m.domain.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: m.domain.dim,
        });
    }
    if m.grid.count < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            found: m.grid.count,
        });
    }
    if !(s_max.is_finite() && s_max > 0.0) {
        return Err(Error::DegenerateSize {
            what: "filter range",
            value: s_max,
        });
    }
    let ds = m.grid.step();
    let count = s_count(ds, n_s, s_max);
    let plan = PvFilter::new(m.grid.count, count);
    let mut values = vec![0.0; m.detector_count() * count];
    exec.run_rows(&mut values, count, &|i, row| {
        let h = plan.hilbert(m.row(i));
        let q = fd4_even(&h, ds).expect("count >= 5");
        row.copy_from_slice(&q);
    });
    Ok(FilteredProfiles2D { ds, count, values })
}

/// One replicated detector: a quadrature node of the line integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Copy2 {
    pub pos: Vec3,
    pub normal: Vec3,
    /// Replication sign times the quadrature weight.
    pub weight: f64,
    /// Global index of the physical detector.
    pub src: usize,
}

/// All replicated detectors inside the disk of radius `r_trunc` about the
/// vertex centroid, in a fixed order.
pub fn copies_2d(domain: &Domain, r_trunc: f64) -> Result<Vec<Copy2>> {
    if domain.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: domain.dim,
        });
    }
    let center = domain.vertex_centroid();
    let tiles = tiles_within(domain, center, r_trunc)?;
    let offsets = domain.detector_offsets();
    let mut out = Vec::new();
    for sf in skeleton_faces(domain, &tiles) {
        let tile = &tiles[sf.tile];
        let face = &domain.faces[sf.face];
        for (j, det) in face.detectors.iter().enumerate() {
            let pos = tile.apply(det.pos);
            if v::dist(pos, center) <= r_trunc {
                out.push(Copy2 {
                    pos,
                    normal: sf.normal,
                    weight: sf.sign as f64 * det.weight,
                    src: offsets[sf.face] + j,
                });
            }
        }
    }
    Ok(out)
}

/// Largest distance between a grid node and a copy.
fn max_reach(grid: &GridSpec, pts: impl Iterator<Item = Vec3>) -> f64 {
    let mut corners = Vec::new();
    for k in 0..8usize {
        let mut c = [0.0; 3];
        for a in 0..3 {
            c[a] = if k >> a & 1 == 0 {
                grid.lo[a]
            } else {
                grid.hi[a]
            };
        }
        corners.push(c);
    }
    let mut best = 0.0f64;
    for p in pts {
        for c in &corners {
            best = best.max(v::dist(*c, p));
        }
    }
    best
}

/// Evaluates the backprojection on the grid nodes.
pub fn backproject_2d(
    profiles: &FilteredProfiles2D,
    copies: &[Copy2],
    grid: &GridSpec,
    exec: &dyn Executor,
) -> Result<ImageGrid> {
    if grid.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: grid.dim,
        });
    }
    let reach = max_reach(grid, copies.iter().map(|c| c.pos));
    if reach > profiles.s_max() {
        return Err(Error::OutOfRange {
            what: "distance",
            value: reach,
            limit: profiles.s_max(),
        });
    }
    let mut values = vec![0.0; grid.len()];
    let n1 = grid.n[1];
    exec.run_rows(&mut values, n1, &|i0, row| {
        for (i1, out) in row.iter_mut().enumerate() {
            let x = grid.point([i0, i1, 0]);
            let mut acc = 0.0;
            for c in copies {
                let dx = x[0] - c.pos[0];
                let dy = x[1] - c.pos[1];
                let s = libm::sqrt(dx * dx + dy * dy);
                if s < 1e-300 {
                    continue;
                }
                let cos = (c.normal[0] * dx + c.normal[1] * dy) / s;
                acc += c.weight * cos * profiles.lookup(c.src, s);
            }
            *out = acc / PI;
        }
    });
    Ok(ImageGrid {
        spec: *grid,
        values,
    })
}

/// Reconstruction parameters shared by the means and wave entry points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params2D {
    pub grid: GridSpec,
    pub r_trunc: f64,
}

impl Params2D {
    /// Grid with `n` nodes per axis over the domain's bounding box, and the
    /// default truncation radius.
    pub fn for_domain(domain: &Domain, n: usize) -> Result<Self> {
        let (lo, hi) = domain.bounds();
        Ok(Params2D {
            grid: GridSpec::fit(2, n, lo, hi)?,
            r_trunc: domain.default_rtrunc(),
        })
    }
}

pub fn invert_means_2d(
    m: &MeansDataset,
    params: &Params2D,
    exec: &dyn Executor,
) -> Result<ImageGrid> {
    let copies = copies_2d(&m.domain, params.r_trunc)?;
    let reach = max_reach(&params.grid, copies.iter().map(|c| c.pos));
    let profiles = filter_2d(m, 0, reach.max(m.grid.max), exec)?;
    backproject_2d(&profiles, &copies, &params.grid, exec)
}

/// Wave data enters through the inverse Abel transform.
pub fn invert_wave_2d(
    p: &WaveDataset,
    params: &Params2D,
    exec: &dyn Executor,
) -> Result<ImageGrid> {
    let m = wave_to_means_2d(p, exec)?;
    invert_means_2d(&m, params, exec)
}
