//! Reconstruction from spherical means on a polyhedron boundary.
//!
//! ```text
//! f(x) = (1/2π) div Σ_j ∫_{Π_j ∩ B(x,T)} n_j g_j(y, |x - y|) dA(y)
//! g(y, t) = (1/t) ∂t (t M(y, t))
//! ```
//!
//! `Π_j` are the replicated face planes carrying the odd extension of the
//! data of face `j`. With wave data `P = ∂t(tM)` the filter is `P/t`.
//!
//! The backprojection scatters every replicated detector into the image
//! slab by slab. Copies whose planes share a normal direction (up to sign)
//! accumulate into one scalar field; the vector field is assembled from
//! those and differentiated by fourth-order differences.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::data::{MeansDataset, Samples, WaveDataset};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::geometry::Domain;
use crate::grid::{GridSpec, ImageGrid};
use crate::numerics::fd4;
use crate::replication::{skeleton_faces, tiles_within};
use crate::vector::{self as v, Vec3};

/// `g(y_i, t)` per physical detector on the time lattice of the dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredProfiles3D {
    pub dt: f64,
    pub count: usize,
    /// Detector-major, `count` values per detector.
    pub values: Vec<f64>,
}

impl FilteredProfiles3D {
    pub fn row(&self, det: usize) -> &[f64] {
        &self.values[det * self.count..(det + 1) * self.count]
    }

    pub fn t_max(&self) -> f64 {
        (self.count - 1) as f64 * self.dt
    }
}

fn check_3d(s: &Samples) -> Result<()> {
    if s.domain.dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: s.domain.dim,
        });
    }
    if s.grid.count < 5 {
        return Err(Error::TooFewSamples {
            needed: 5,
            found: s.grid.count,
        });
    }
    Ok(())
}

/// `g = (1/t) ∂t(tM)` with fourth-order differences; `g(0) = 0`.
pub fn filter_3d(m: &MeansDataset, exec: &dyn Executor) -> Result<FilteredProfiles3D> {
    check_3d(m)?;
    let g = m.grid;
    let dt = g.step();
    let mut values = vec![0.0; m.values.len()];
    exec.run_rows(&mut values, g.count, &|i, row| {
        let tm: Vec<f64> = m
            .row(i)
            .iter()
            .enumerate()
            .map(|(k, x)| g.value(k) * x)
            .collect();
        let d = fd4(&tm, dt).expect("count >= 5");
        row[0] = 0.0;
        for k in 1..row.len() {
            row[k] = d[k] / g.value(k);
        }
    });
    Ok(FilteredProfiles3D {
        dt,
        count: g.count,
        values,
    })
}

/// `g = P/t`; `g(0) = 0`.
pub fn filter_wave_3d(p: &WaveDataset, exec: &dyn Executor) -> Result<FilteredProfiles3D> {
    check_3d(p)?;
    let g = p.grid;
    let mut values = vec![0.0; p.values.len()];
    exec.run_rows(&mut values, g.count, &|i, row| {
        let src = p.row(i);
        row[0] = 0.0;
        for k in 1..row.len() {
            row[k] = src[k] / g.value(k);
        }
    });
    Ok(FilteredProfiles3D {
        dt: g.step(),
        count: g.count,
        values,
    })
}

/// Monomial coefficients of the cubic through `(q[m], y[m])`.
fn cubic_through(q: [f64; 4], y: [f64; 4]) -> [f64; 4] {
    // Newton divided differences, then expand the nested products.
    let mut d = y;
    for lvl in 1..4 {
        for m in (lvl..4).rev() {
            d[m] = (d[m] - d[m - 1]) / (q[m] - q[m - lvl]);
        }
    }
    let mut c = [d[3], 0.0, 0.0, 0.0];
    for (deg, m) in (0..3).rev().enumerate() {
        // c <- c·(f - q[m]) + d[m]
        let mut nc = [0.0; 4];
        for k in 0..=deg {
            nc[k + 1] += c[k];
            nc[k] -= q[m] * c[k];
        }
        nc[0] += d[m];
        c = nc;
    }
    c
}

/// Piecewise cubic form of the 4-point interpolant of one profile.
///
/// Interval `k` covers `[k dt, (k+1) dt)` and evaluates `c0 + f(c1 + f(c2 +
/// f c3))` with `f` the fractional offset. Stencils are centered where
/// possible and shifted inward at both ends, which reproduces
/// [`interp4`](crate::numerics::interp4) with [`Parity::None`](crate::numerics::Parity).
#[derive(Clone, Debug)]
struct CubicTable {
    coef: Vec<[f64; 4]>,
    /// Intervals `first..end` hold all nonzero pieces.
    first: usize,
    end: usize,
}

impl CubicTable {
    fn new(f: &[f64]) -> Self {
        let n = f.len();
        let mut coef = Vec::with_capacity(n - 1);
        let mut first = usize::MAX;
        let mut end = 0;
        for k in 0..n - 1 {
            let base = if k == 0 {
                0
            } else if k + 2 >= n {
                n - 4
            } else {
                k - 1
            };
            let q = [0, 1, 2, 3].map(|m| (base + m) as f64 - k as f64);
            let y = [0, 1, 2, 3].map(|m| f[base + m]);
            let c = if y.iter().all(|&x| x == 0.0) {
                [0.0; 4]
            } else {
                first = first.min(k);
                end = k + 1;
                cubic_through(q, y)
            };
            coef.push(c);
        }
        if end == 0 {
            first = 0;
        }
        CubicTable { coef, first, end }
    }

    #[inline(always)]
    fn eval(&self, u: f64) -> f64 {
        let k = u as usize;
        let f = u - k as f64;
        match self.coef.get(k) {
            Some(c) => c[0] + f * (c[1] + f * (c[2] + f * c[3])),
            None => 0.0,
        }
    }
}

/// One replicated detector: a node of the surface quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Copy3 {
    pub pos: Vec3,
    /// Index into [`CopySet3::normals`].
    pub group: usize,
    /// Replication sign times the quadrature weight, oriented along the
    /// group normal.
    pub weight: f64,
    pub src: usize,
}

/// Replicated detectors grouped by plane normal direction.
#[derive(Clone, Debug, PartialEq)]
pub struct CopySet3 {
    pub normals: Vec<Vec3>,
    pub copies: Vec<Copy3>,
}

fn canonical(n: Vec3) -> (Vec3, f64) {
    for &c in &n {
        if c.abs() > 1e-9 {
            return if c > 0.0 {
                (n, 1.0)
            } else {
                (v::scale(n, -1.0), -1.0)
            };
        }
    }
    (n, 1.0)
}

fn box_distance(lo: Vec3, hi: Vec3, p: Vec3) -> f64 {
    let mut s = 0.0;
    for k in 0..3 {
        let d = (lo[k] - p[k]).max(p[k] - hi[k]).max(0.0);
        s += d * d;
    }
    libm::sqrt(s)
}

/// Every replicated detector closer than `t` to the grid's bounding box.
pub fn copies_3d(domain: &Domain, grid: &GridSpec, t: f64) -> Result<CopySet3> {
    if domain.dim != 3 || grid.dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: if domain.dim != 3 {
                domain.dim
            } else {
                grid.dim
            },
        });
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::DegenerateSize {
            what: "T",
            value: t,
        });
    }
    let center = v::scale(v::add(grid.lo, grid.hi), 0.5);
    let half_diag = 0.5 * v::dist(grid.lo, grid.hi);
    let tiles = tiles_within(domain, center, t + half_diag)?;
    let offsets = domain.detector_offsets();
    let mut normals: Vec<Vec3> = Vec::new();
    let mut keys: BTreeMap<[i64; 3], usize> = BTreeMap::new();
    let mut copies = Vec::new();
    for sf in skeleton_faces(domain, &tiles) {
        let tile = &tiles[sf.tile];
        let face = &domain.faces[sf.face];
        let (n, flip) = canonical(sf.normal);
        let key = n.map(|c| libm::round(c * 1e9) as i64);
        let group = *keys.entry(key).or_insert_with(|| {
            normals.push(n);
            normals.len() - 1
        });
        for (j, det) in face.detectors.iter().enumerate() {
            let pos = tile.apply(det.pos);
            if box_distance(grid.lo, grid.hi, pos) < t {
                copies.push(Copy3 {
                    pos,
                    group,
                    weight: flip * sf.sign as f64 * det.weight,
                    src: offsets[sf.face] + j,
                });
            }
        }
    }
    Ok(CopySet3 { normals, copies })
}

/// Components `V_k` on the grid, each in [`GridSpec`] storage order.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub spec: GridSpec,
    pub comps: [Vec<f64>; 3],
}

/// `V(x) = (1/2π) Σ_copies n w g(src, |x - y|)` over copies with
/// `|x - y| < t`.
pub fn backproject_3d(
    profiles: &FilteredProfiles3D,
    set: &CopySet3,
    grid: &GridSpec,
    t: f64,
    exec: &dyn Executor,
) -> Result<VectorField> {
    if grid.dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: grid.dim,
        });
    }
    if t > profiles.t_max() * (1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            what: "T",
            value: t,
            limit: profiles.t_max(),
        });
    }
    let dets = profiles.values.len() / profiles.count;
    let tables: Vec<CubicTable> = (0..dets)
        .map(|i| CubicTable::new(profiles.row(i)))
        .collect();
    let inv_dt = 1.0 / profiles.dt;
    // annulus of nonzero contributions per detector
    let shells: Vec<(f64, f64)> = tables
        .iter()
        .map(|tb| {
            let lo = tb.first as f64 * profiles.dt;
            let hi = (tb.end as f64 * profiles.dt).min(t);
            (lo, hi)
        })
        .collect();
    let [n0, n1, n2] = grid.n;
    let xs: [Vec<f64>; 3] = [0, 1, 2].map(|a| (0..grid.n[a]).map(|i| grid.coord(a, i)).collect());
    let h = grid.spacing();
    let groups = set.normals.len();
    let slab = n1 * n2;
    let mut buf = vec![0.0; n0 * 3 * slab];
    let t2 = t * t;
    exec.run_rows(&mut buf, 3 * slab, &|i0, out| {
        let x0 = xs[0][i0];
        let mut acc = vec![0.0; groups * slab];
        for c in &set.copies {
            let (lo, hi) = shells[c.src];
            if hi <= lo {
                continue;
            }
            let hi2 = (hi * hi).min(t2);
            let lo2 = lo * lo;
            let d0 = x0 - c.pos[0];
            let c0 = d0 * d0;
            if c0 >= hi2 {
                continue;
            }
            let tb = &tables[c.src];
            let w = c.weight;
            let a = &mut acc[c.group * slab..(c.group + 1) * slab];
            let r1 = libm::sqrt(hi2 - c0);
            let (j1a, j1b) = index_range(grid.lo[1], h[1], n1, c.pos[1] - r1, c.pos[1] + r1);
            for i1 in j1a..j1b {
                let d1 = xs[1][i1] - c.pos[1];
                let c1 = c0 + d1 * d1;
                if c1 >= hi2 {
                    continue;
                }
                let r2 = libm::sqrt(hi2 - c1);
                let (j2a, j2b) = index_range(grid.lo[2], h[2], n2, c.pos[2] - r2, c.pos[2] + r2);
                // skip the inner hole of the annulus, conservatively
                let (ha, hb) = if lo2 > c1 {
                    let rh = libm::sqrt(lo2 - c1);
                    let (a, b) = index_range(grid.lo[2], h[2], n2, c.pos[2] - rh, c.pos[2] + rh);
                    (a.saturating_add(1).min(b), b.saturating_sub(1).max(a))
                } else {
                    (j2a, j2a)
                };
                let row = &mut a[i1 * n2..(i1 + 1) * n2];
                let mut add = |i2: usize| {
                    let d2 = xs[2][i2] - c.pos[2];
                    let s2 = c1 + d2 * d2;
                    if s2 < hi2 {
                        row[i2] += w * tb.eval(libm::sqrt(s2) * inv_dt);
                    }
                };
                let (ha, hb) = (ha.clamp(j2a, j2b), hb.clamp(j2a, j2b));
                if ha < hb {
                    (j2a..ha).for_each(&mut add);
                    (hb..j2b).for_each(&mut add);
                } else {
                    (j2a..j2b).for_each(&mut add);
                }
            }
        }
        let scale = 1.0 / (2.0 * PI);
        for (g, n) in set.normals.iter().enumerate() {
            let a = &acc[g * slab..(g + 1) * slab];
            for k in 0..3 {
                if n[k] == 0.0 {
                    continue;
                }
                let o = &mut out[k * slab..(k + 1) * slab];
                for (dst, &src) in o.iter_mut().zip(a) {
                    *dst += scale * n[k] * src;
                }
            }
        }
    });
    let mut comps = [
        vec![0.0; grid.len()],
        vec![0.0; grid.len()],
        vec![0.0; grid.len()],
    ];
    for i0 in 0..n0 {
        for k in 0..3 {
            let src = &buf[(i0 * 3 + k) * slab..(i0 * 3 + k + 1) * slab];
            comps[k][i0 * slab..(i0 + 1) * slab].copy_from_slice(src);
        }
    }
    Ok(VectorField { spec: *grid, comps })
}

/// Grid indices `i` with `a <= lo + i h <= b`, as a half-open range, widened
/// by one node on each side against rounding.
fn index_range(lo: f64, h: f64, n: usize, a: f64, b: f64) -> (usize, usize) {
    let ia = libm::floor((a - lo) / h) as i64;
    let ib = libm::ceil((b - lo) / h) as i64 + 1;
    (
        ia.clamp(0, n as i64) as usize,
        ib.clamp(0, n as i64) as usize,
    )
}

/// `Σ_k ∂_k V_k` by fourth-order differences, one-sided next to the
/// boundary.
pub fn divergence(field: &VectorField, exec: &dyn Executor) -> Result<ImageGrid> {
    let spec = field.spec;
    if spec.dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: spec.dim,
        });
    }
    if spec.n.iter().any(|&n| n < 5) {
        return Err(Error::TooFewSamples {
            needed: 5,
            found: spec.n.iter().copied().min().unwrap_or(0),
        });
    }
    let h = spec.spacing();
    let [n0, n1, n2] = spec.n;
    let slab = n1 * n2;
    let mut values = vec![0.0; spec.len()];
    exec.run_rows(&mut values, slab, &|i0, out| {
        let mut line0 = vec![0.0; n0];
        let mut line1 = vec![0.0; n1];
        for i1 in 0..n1 {
            for i2 in 0..n2 {
                for (i, x) in line0.iter_mut().enumerate() {
                    *x = field.comps[0][spec.index([i, i1, i2])];
                }
                // the full line is differentiated for each point; cheap next
                // to the backprojection and keeps slabs independent
                out[i1 * n2 + i2] += fd4_at(&line0, h[0], i0);
            }
        }
        for i2 in 0..n2 {
            for (i, x) in line1.iter_mut().enumerate() {
                *x = field.comps[1][spec.index([i0, i, i2])];
            }
            let d = fd4(&line1, h[1]).expect("n >= 5");
            for i1 in 0..n1 {
                out[i1 * n2 + i2] += d[i1];
            }
        }
        for i1 in 0..n1 {
            let base = spec.index([i0, i1, 0]);
            let d = fd4(&field.comps[2][base..base + n2], h[2]).expect("n >= 5");
            for i2 in 0..n2 {
                out[i1 * n2 + i2] += d[i2];
            }
        }
    });
    Ok(ImageGrid { spec, values })
}

/// Entry `i` of [`fd4`]`(f, h)` without forming the whole derivative.
fn fd4_at(f: &[f64], h: f64, i: usize) -> f64 {
    let n = f.len();
    let c = 1.0 / (12.0 * h);
    match i {
        0 => c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]),
        1 => c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]),
        _ if i == n - 2 => {
            -c * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5])
        }
        _ if i == n - 1 => {
            -c * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4]
                - 3.0 * f[n - 5])
        }
        _ => c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]),
    }
}

/// Reconstruction grid and integration radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params3D {
    pub grid: GridSpec,
    pub t: f64,
}

impl Params3D {
    /// `n³` grid over the domain's bounding box and `T = diam Ω`.
    pub fn for_domain(domain: &Domain, n: usize) -> Result<Self> {
        let (lo, hi) = domain.bounds();
        Ok(Params3D {
            grid: GridSpec::fit(3, n, lo, hi)?,
            t: domain.diam,
        })
    }
}

fn invert_filtered(
    domain: &Domain,
    profiles: &FilteredProfiles3D,
    params: &Params3D,
    exec: &dyn Executor,
) -> Result<ImageGrid> {
    let set = copies_3d(domain, &params.grid, params.t)?;
    let field = backproject_3d(profiles, &set, &params.grid, params.t, exec)?;
    divergence(&field, exec)
}

pub fn invert_means_3d(
    m: &MeansDataset,
    params: &Params3D,
    exec: &dyn Executor,
) -> Result<ImageGrid> {
    let q = filter_3d(m, exec)?;
    invert_filtered(&m.domain, &q, params, exec)
}

pub fn invert_wave_3d(
    p: &WaveDataset,
    params: &Params3D,
    exec: &dyn Executor,
) -> Result<ImageGrid> {
    let q = filter_wave_3d(p, exec)?;
    invert_filtered(&p.domain, &q, params, exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{forward_means, means_to_wave_3d, RadialGrid};
    use crate::exec::Serial;
    use crate::geometry::{build_domain, DomainSpec, TriangleKind};
    use crate::numerics::{interp4, Parity};
    use crate::phantom::{Component, Phantom};
    use crate::replication::replicate_2d;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::vec;

    #[test]
    fn cubic_table_reproduces_interp4() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f: Vec<f64> = (0..40).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tb = CubicTable::new(&f);
        let h = 0.3;
        for _ in 0..5000 {
            let x = rng.gen_range(0.0..39.0 * h);
            let a = tb.eval(x / h);
            let b = interp4(&f, h, x, Parity::None);
            assert!((a - b).abs() < 1e-12, "{x}: {a} {b}");
        }
        assert_eq!(tb.eval(39.5), 0.0);
    }

    #[test]
    fn cubic_table_support() {
        let mut f = vec![0.0; 30];
        f[12] = 1.0;
        let tb = CubicTable::new(&f);
        assert_eq!((tb.first, tb.end), (10, 14));
        for k in 0..29 {
            let nz = tb.coef[k].iter().any(|&c| c != 0.0);
            assert_eq!(nz, (10..14).contains(&k));
        }
    }

    fn cube_dataset(p: &Phantom, n_det: usize, nt: usize) -> MeansDataset {
        let d = build_domain(&DomainSpec::cube(1.0, n_det)).unwrap();
        let g = RadialGrid::new(nt, d.diam).unwrap();
        forward_means(p, &d, g, &Serial).unwrap()
    }

    #[test]
    fn filter_examples() {
        let d = build_domain(&DomainSpec::cube(1.0, 2)).unwrap();
        let g = RadialGrid::new(33, 2.0).unwrap();
        let n = d.detector_count();
        let vals =
            |f: &dyn Fn(f64) -> f64| (0..n * 33).map(|i| f(g.value(i % 33))).collect::<Vec<_>>();
        let m = MeansDataset(Samples::new(d.clone(), g, vals(&|t| t * t)).unwrap());
        let q = filter_3d(&m, &Serial).unwrap();
        for k in 1..33 {
            assert!((q.row(3)[k] - 3.0 * g.value(k)).abs() < 1e-11);
        }
        let m = MeansDataset(Samples::new(d.clone(), g, vals(&|_| 2.0)).unwrap());
        let q = filter_3d(&m, &Serial).unwrap();
        for k in 1..33 {
            assert!((q.row(0)[k] - 2.0 / g.value(k)).abs() < 1e-11);
        }
        assert_eq!(q.row(0)[0], 0.0);
        let z = MeansDataset(Samples::zeros(d, g));
        assert!(filter_3d(&z, &Serial)
            .unwrap()
            .values
            .iter()
            .all(|&x| x == 0.0));
    }

    #[test]
    fn filter_matches_kirchhoff_derivative() {
        // ball indicator: ∂t(tM) = (d - t)/(2d)·... on the overlap range;
        // compare through the wave conversion, which shares the stencil
        let p = Phantom::new(3, vec![Component::bump([0.1, 0.0, 0.2], 0.5, 1.0)]);
        let m = cube_dataset(&p, 3, 257);
        let q = filter_3d(&m, &Serial).unwrap();
        let w = means_to_wave_3d(&m, &Serial).unwrap();
        let qw = filter_wave_3d(&w, &Serial).unwrap();
        for (a, b) in q.values.iter().zip(&qw.values) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn divergence_examples() {
        let g = GridSpec::cube(21, -1.0, 1.0).unwrap();
        let mk = |f: [&dyn Fn(Vec3) -> f64; 3]| VectorField {
            spec: g,
            comps: f.map(|c| ImageGrid::from_fn(g, c).values),
        };
        let c = mk([&|_| 1.0, &|_| -2.0, &|_| 0.5]);
        assert!(divergence(&c, &Serial)
            .unwrap()
            .values
            .iter()
            .all(|x| x.abs() < 1e-10));
        let id = mk([&|p| p[0], &|p| p[1], &|p| p[2]]);
        assert!(divergence(&id, &Serial)
            .unwrap()
            .values
            .iter()
            .all(|x| (x - 3.0).abs() < 1e-10));
        // O(h⁴): halving h cuts the error by ~16
        let err = |n: usize| {
            let g = GridSpec::cube(n, -1.0, 1.0).unwrap();
            let f = VectorField {
                spec: g,
                comps: [
                    ImageGrid::from_fn(g, |p| libm::sin(2.0 * p[0])).values,
                    vec![0.0; g.len()],
                    vec![0.0; g.len()],
                ],
            };
            let d = divergence(&f, &Serial).unwrap();
            (0..g.len())
                .map(|i| (d.values[i] - 2.0 * libm::cos(2.0 * g.point(g.unindex(i))[0])).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(17), err(33));
        assert!(e1 / e2 > 12.0, "{e1} {e2}");
        assert!(e2 < 1e-4);
    }

    #[test]
    fn copies_on_the_cube_follow_the_closed_form() {
        // planes x_k = ±1 + 4m, in-plane lattice replicated by E^2D
        let n = 4;
        let d = build_domain(&DomainSpec::cube(1.0, n)).unwrap();
        let grid = GridSpec::cube(5, -1.0, 1.0).unwrap();
        let t = d.diam;
        let set = copies_3d(&d, &grid, t).unwrap();
        assert_eq!(set.normals.len(), 3);
        let h = 2.0 / n as f64;
        let mut expected = 0;
        for face in 0..6usize {
            let axis = face / 2;
            let s = if face % 2 == 0 { 1.0 } else { -1.0 };
            let (u, w) = ((axis + 1) % 3, (axis + 2) % 3);
            let (u, w) = (u.min(w), u.max(w));
            for m in -3i64..=3 {
                let off = s + 4.0 * m as f64;
                for i in -12i64..12 + n as i64 {
                    for j in -12i64..12 + n as i64 {
                        let mut pos = [0.0; 3];
                        pos[axis] = off;
                        pos[u] = -1.0 + (i as f64 + 0.5) * h;
                        pos[w] = -1.0 + (j as f64 + 0.5) * h;
                        if box_distance(grid.lo, grid.hi, pos) >= t {
                            continue;
                        }
                        expected += 1;
                        let (loc, sign) = replicate_2d(1.0, 1.0, [pos[u], pos[w]]);
                        let c = set
                            .copies
                            .iter()
                            .find(|c| v::dist(c.pos, pos) < 1e-12)
                            .expect("copy present");
                        let nrm = set.normals[c.group];
                        assert!((nrm[axis] - 1.0).abs() < 1e-12);
                        assert!(
                            (c.weight - s * sign as f64 * h * h).abs() < 1e-12,
                            "{pos:?}"
                        );
                        let f = &d.faces[face];
                        let det = &f.detectors[c.src - face * n * n];
                        let mut want = [0.0; 3];
                        want[axis] = s;
                        want[u] = loc[0];
                        want[w] = loc[1];
                        assert!(v::dist(det.pos, want) < 1e-12);
                    }
                }
            }
        }
        assert_eq!(set.copies.len(), expected);
    }

    #[test]
    fn zero_data_and_range_checks() {
        let d = build_domain(&DomainSpec::cube(1.0, 4)).unwrap();
        let g = RadialGrid::new(40, d.diam).unwrap();
        let z = MeansDataset(Samples::zeros(d.clone(), g));
        let params = Params3D::for_domain(&d, 7).unwrap();
        let img = invert_means_3d(&z, &params, &Serial).unwrap();
        assert!(img.values.iter().all(|&x| x == 0.0));
        let q = filter_3d(&z, &Serial).unwrap();
        let set = copies_3d(&d, &params.grid, d.diam).unwrap();
        let r = backproject_3d(&q, &set, &params.grid, 2.0 * d.diam, &Serial);
        assert!(matches!(r, Err(Error::OutOfRange { .. })));
        let d2 = build_domain(&DomainSpec::square(1.0, 4)).unwrap();
        assert!(copies_3d(&d2, &params.grid, 1.0).is_err());
    }

    #[test]
    fn centered_symmetric_phantom_gives_odd_field() {
        let p = Phantom::new(3, vec![Component::bump([0.0; 3], 0.6, 1.0)]);
        let m = cube_dataset(&p, 12, 97);
        let q = filter_3d(&m, &Serial).unwrap();
        let grid = GridSpec::cube(9, -1.0, 1.0).unwrap();
        let set = copies_3d(&m.domain, &grid, m.domain.diam).unwrap();
        let f = backproject_3d(&q, &set, &grid, m.domain.diam, &Serial).unwrap();
        let peak = f
            .comps
            .iter()
            .flatten()
            .fold(0.0f64, |a, &b| a.max(b.abs()));
        for i in 0..grid.len() {
            let [a, b, c] = grid.unindex(i);
            let j = grid.index([8 - a, 8 - b, 8 - c]);
            for k in 0..3 {
                assert!((f.comps[k][i] + f.comps[k][j]).abs() < 1e-9 * peak);
            }
        }
    }

    fn rel_errors(img: &ImageGrid, p: &Phantom, d: &Domain) -> (f64, f64) {
        let (mut linf, mut tinf, mut l2, mut t2) = (0.0f64, 0.0f64, 0.0, 0.0);
        for i in 0..img.spec.len() {
            let x = img.spec.point(img.spec.unindex(i));
            if !d.contains(x, 1e-12) {
                continue;
            }
            let t = p.eval(x);
            let e = img.values[i] - t;
            linf = linf.max(e.abs());
            tinf = tinf.max(t.abs());
            l2 += e * e;
            t2 += t * t;
        }
        (linf / tinf, libm::sqrt(l2 / t2))
    }

    #[test]
    fn coarse_cube_reconstruction() {
        let p = Phantom::new(
            3,
            vec![
                Component::bump([0.1, -0.15, 0.05], 0.6, 1.0),
                Component::bump([-0.35, 0.3, -0.2], 0.35, 0.6),
            ],
        );
        let m = cube_dataset(&p, 17, 129);
        let params = Params3D::for_domain(&m.domain, 17).unwrap();
        let img = invert_means_3d(&m, &params, &Serial).unwrap();
        let (linf, l2) = rel_errors(&img, &p, &m.domain);
        assert!(linf < 0.15 && l2 < 0.05, "{linf} {l2}");
    }

    #[test]
    fn coarse_prism_and_pyramid_reconstruction() {
        let cases = [
            (
                DomainSpec::prism(TriangleKind::RightIsosceles, 2.0, 2.0, 16, 16),
                Component::bump([0.55, 0.55, 1.0], 0.4, 1.0),
            ),
            (
                DomainSpec::pyramid(2.0, 16),
                Component::bump([1.0, 0.45, 1.6], 0.35, 1.0),
            ),
        ];
        for (spec, bump) in cases {
            let d = build_domain(&spec).unwrap();
            let p = Phantom::new(3, vec![bump]);
            let g = RadialGrid::new(129, d.diam).unwrap();
            let m = forward_means(&p, &d, g, &Serial).unwrap();
            let params = Params3D::for_domain(&d, 25).unwrap();
            let img = invert_means_3d(&m, &params, &Serial).unwrap();
            let (_, l2) = rel_errors(&img, &p, &d);
            assert!(l2 <= 1e-1, "{:?}: {l2}", d.kind);
        }
    }
}
