//! Error metrics between two images on the same grid.

use polymean_core::{ImageGrid, Vec3};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Metrics {
    /// `‖A - B‖∞ / ‖B‖∞`, or `‖A - B‖∞` when `B` vanishes.
    pub linf: f64,
    /// `‖A - B‖₂ / ‖B‖₂`, or the absolute norm when `B` vanishes.
    pub l2: f64,
    /// Largest `|A - B|` and where it occurs.
    pub max_abs: f64,
    pub max_at: [usize; 3],
    /// False when `B` is identically zero and absolute norms are reported.
    pub relative: bool,
    /// Nodes compared.
    pub count: usize,
}

/// Metrics over all nodes.
pub fn metrics(a: &ImageGrid, b: &ImageGrid) -> Result<Metrics> {
    metrics_where(a, b, |_| true)
}

/// Metrics over the nodes where `keep` holds.
pub fn metrics_where(a: &ImageGrid, b: &ImageGrid, keep: impl Fn(Vec3) -> bool) -> Result<Metrics> {
    if a.spec.dim != b.spec.dim || a.spec.n != b.spec.n {
        return Err(Error::Dimension(format!(
            "grids {:?} and {:?} differ",
            &a.spec.n[..a.spec.dim],
            &b.spec.n[..b.spec.dim]
        )));
    }
    let mut m = Metrics {
        linf: 0.0,
        l2: 0.0,
        max_abs: 0.0,
        max_at: [0; 3],
        relative: true,
        count: 0,
    };
    let (mut binf, mut d2, mut b2) = (0.0f64, 0.0, 0.0);
    for i in 0..a.spec.len() {
        let idx = a.spec.unindex(i);
        if !keep(a.spec.point(idx)) {
            continue;
        }
        let d = a.values[i] - b.values[i];
        if d.abs() > m.max_abs {
            m.max_abs = d.abs();
            m.max_at = idx;
        }
        binf = binf.max(b.values[i].abs());
        d2 += d * d;
        b2 += b.values[i] * b.values[i];
        m.count += 1;
    }
    if binf == 0.0 {
        m.relative = false;
        m.linf = m.max_abs;
        m.l2 = d2.sqrt();
    } else {
        m.linf = m.max_abs / binf;
        m.l2 = (d2 / b2).sqrt();
    }
    Ok(m)
}
