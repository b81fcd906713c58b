//! Parameter sweeps: truncation radius (2D) and resolution (2D and 3D).

use std::time::Instant;

use polymean_core::data::forward_means;
use polymean_core::{
    build_domain, invert_means_2d, invert_means_3d, DomainSpec, Executor, ImageGrid, Params2D,
    Params3D, Phantom, RadialGrid,
};

use crate::error::{Error, Result};
use crate::metrics::{metrics_where, Metrics};

/// Relative errors of `img` against the phantom at the nodes inside the
/// domain.
pub fn errors_inside(img: &ImageGrid, phantom: &Phantom, spec: &DomainSpec) -> Result<Metrics> {
    let d = build_domain(spec)?;
    let truth = ImageGrid::from_fn(img.spec, |x| phantom.eval(x));
    let tol = d.tolerance();
    metrics_where(img, &truth, |x| d.contains(x, tol))
}

#[derive(Clone, Copy, Debug)]
pub struct TruncationRow {
    pub rtrunc: f64,
    pub metrics: Metrics,
    pub seconds: f64,
}

/// Reconstructs the same 2D dataset for each truncation radius.
pub fn truncation(
    spec: &DomainSpec,
    phantom: &Phantom,
    nr: usize,
    grid: usize,
    radii: &[f64],
    exec: &dyn Executor,
) -> Result<Vec<TruncationRow>> {
    let d = build_domain(spec)?;
    if d.dim != 2 {
        return Err(Error::Dimension("the truncation study is 2D".into()));
    }
    let m = forward_means(phantom, &d, RadialGrid::new(nr, d.diam)?, exec)?;
    let base = Params2D::for_domain(&d, grid)?;
    radii
        .iter()
        .map(|&r| {
            let t0 = Instant::now();
            let img = invert_means_2d(&m, &Params2D { r_trunc: r, ..base }, exec)?;
            Ok(TruncationRow {
                rtrunc: r,
                metrics: errors_inside(&img, phantom, spec)?,
                seconds: t0.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct ConvergenceRow {
    pub detectors: usize,
    pub grid: usize,
    pub radii: usize,
    pub metrics: Metrics,
    pub seconds: f64,
}

/// One forward/inverse run per level `n`: `n` detectors per edge and `n`
/// grid nodes per axis, with `nr` radii on `[0, diam]`.
pub fn convergence(
    spec: &DomainSpec,
    phantom: &Phantom,
    levels: &[usize],
    nr: usize,
    exec: &dyn Executor,
) -> Result<Vec<ConvergenceRow>> {
    levels
        .iter()
        .map(|&n| {
            let mut s = spec.clone();
            for c in s.detectors.iter_mut() {
                *c = n;
            }
            let d = build_domain(&s)?;
            let t0 = Instant::now();
            let m = forward_means(phantom, &d, RadialGrid::new(nr, d.diam)?, exec)?;
            let img = if d.dim == 2 {
                invert_means_2d(&m, &Params2D::for_domain(&d, n)?, exec)?
            } else {
                invert_means_3d(&m, &Params3D::for_domain(&d, n)?, exec)?
            };
            Ok(ConvergenceRow {
                detectors: n,
                grid: n,
                radii: nr,
                metrics: errors_inside(&img, phantom, &s)?,
                seconds: t0.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

pub fn truncation_csv(rows: &[TruncationRow]) -> String {
    let mut s = String::from("rtrunc,linf_rel,l2_rel,max_abs,seconds\n");
    for r in rows {
        s.push_str(&format!(
            "{},{:e},{:e},{:e},{:.3}\n",
            r.rtrunc, r.metrics.linf, r.metrics.l2, r.metrics.max_abs, r.seconds
        ));
    }
    s
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from("detectors,grid,radii,linf_rel,l2_rel,max_abs,seconds\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{:e},{:e},{:e},{:.3}\n",
            r.detectors,
            r.grid,
            r.radii,
            r.metrics.linf,
            r.metrics.l2,
            r.metrics.max_abs,
            r.seconds
        ));
    }
    s
}
