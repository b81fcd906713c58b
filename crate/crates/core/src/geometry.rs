//! Supported domains, their faces and detector lattices, and the replicated
//! integration sets used by the backprojection.
//!
//! Every supported domain is the fundamental cell of a reflection group, so
//! the walls of the domain are exactly its faces and odd reflection in them
//! tiles the plane or space (see [`crate::replication`]).

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::replication::{skeleton_faces, tiles_within, SkeletonFace, Tile};
use crate::vector::{self as v, Vec3};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TriangleKind {
    #[cfg_attr(feature = "serde", serde(rename = "tri_equilateral"))]
    Equilateral,
    #[cfg_attr(feature = "serde", serde(rename = "tri_right_isosceles"))]
    RightIsosceles,
    #[cfg_attr(feature = "serde", serde(rename = "tri_30_60_90"))]
    ThirtySixty,
}

impl TriangleKind {
    /// Counter-clockwise vertices for side length `s`.
    pub fn vertices(self, s: f64) -> [Vec3; 3] {
        match self {
            TriangleKind::Equilateral => [
                [0.0, 0.0, 0.0],
                [s, 0.0, 0.0],
                [0.5 * s, 0.5 * s * libm::sqrt(3.0), 0.0],
            ],
            TriangleKind::RightIsosceles => [[0.0, 0.0, 0.0], [s, 0.0, 0.0], [0.0, s, 0.0]],
            TriangleKind::ThirtySixty => [
                [0.0, 0.0, 0.0],
                [s, 0.0, 0.0],
                [0.0, s / libm::sqrt(3.0), 0.0],
            ],
        }
    }

    pub fn diameter(self, s: f64) -> f64 {
        match self {
            TriangleKind::Equilateral => s,
            TriangleKind::RightIsosceles => s * libm::sqrt(2.0),
            TriangleKind::ThirtySixty => 2.0 * s / libm::sqrt(3.0),
        }
    }
}

/// Kind tag as it appears in a serialized [`DomainSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SpecKind {
    Square,
    Rectangle,
    TriEquilateral,
    TriRightIsosceles,
    #[cfg_attr(feature = "serde", serde(rename = "tri_30_60_90"))]
    Tri306090,
    Cube,
    Cuboid,
    Prism,
    Pyramid,
}

/// Serializable description of a domain.
///
/// | kind | sizes | detectors |
/// |---|---|---|
/// | square | `[a]` half-width | `[n]` per side |
/// | rectangle | `[a1, a2]` half-widths | `[n]` or `[n1, n2]` per axis |
/// | tri_* | `[s]` leg / side length | `[n]` per side |
/// | cube | `[a]` | `[n]` per face axis |
/// | cuboid | `[a1, a2, a3]` | `[n]` or `[n1, n2, n3]` |
/// | prism | `[s, h]`, needs `base` | `[n_base, n_z]` |
/// | pyramid | `[a]` | `[n]`, face subdivision |
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DomainSpec {
    pub kind: SpecKind,
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub base: Option<TriangleKind>,
    pub sizes: Vec<f64>,
    pub detectors: Vec<usize>,
}

impl DomainSpec {
    pub fn square(a: f64, n: usize) -> Self {
        Self::simple(SpecKind::Square, vec![a], vec![n])
    }

    pub fn rectangle(a1: f64, a2: f64, n: usize) -> Self {
        Self::simple(SpecKind::Rectangle, vec![a1, a2], vec![n])
    }

    pub fn triangle(kind: TriangleKind, s: f64, n: usize) -> Self {
        let k = match kind {
            TriangleKind::Equilateral => SpecKind::TriEquilateral,
            TriangleKind::RightIsosceles => SpecKind::TriRightIsosceles,
            TriangleKind::ThirtySixty => SpecKind::Tri306090,
        };
        Self::simple(k, vec![s], vec![n])
    }

    pub fn cube(a: f64, n: usize) -> Self {
        Self::simple(SpecKind::Cube, vec![a], vec![n])
    }

    pub fn cuboid(a: [f64; 3], n: usize) -> Self {
        Self::simple(SpecKind::Cuboid, a.to_vec(), vec![n])
    }

    pub fn prism(base: TriangleKind, s: f64, h: f64, n_base: usize, n_z: usize) -> Self {
        DomainSpec {
            kind: SpecKind::Prism,
            base: Some(base),
            sizes: vec![s, h],
            detectors: vec![n_base, n_z],
        }
    }

    pub fn pyramid(a: f64, n: usize) -> Self {
        Self::simple(SpecKind::Pyramid, vec![a], vec![n])
    }

    fn simple(kind: SpecKind, sizes: Vec<f64>, detectors: Vec<usize>) -> Self {
        DomainSpec {
            kind,
            base: None,
            sizes,
            detectors,
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            SpecKind::Square
            | SpecKind::Rectangle
            | SpecKind::TriEquilateral
            | SpecKind::TriRightIsosceles
            | SpecKind::Tri306090 => 2,
            _ => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DomainKind {
    Square {
        a: f64,
    },
    Rectangle {
        a: [f64; 2],
    },
    Triangle {
        kind: TriangleKind,
        side: f64,
    },
    Cube {
        a: f64,
    },
    Cuboid {
        a: [f64; 3],
    },
    Prism {
        base: TriangleKind,
        side: f64,
        height: f64,
    },
    Pyramid {
        a: f64,
    },
}

impl DomainKind {
    /// Half-widths along each axis for the axis-aligned boxes.
    pub fn half_widths(&self) -> Option<[f64; 3]> {
        match *self {
            DomainKind::Square { a } => Some([a, a, 0.0]),
            DomainKind::Rectangle { a } => Some([a[0], a[1], 0.0]),
            DomainKind::Cube { a } => Some([a; 3]),
            DomainKind::Cuboid { a } => Some(a),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FaceShape {
    Segment {
        len: f64,
    },
    Rect {
        len: [f64; 2],
    },
    /// Vertices in in-face coordinates.
    Triangle {
        verts: [[f64; 2]; 3],
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Detector {
    pub pos: Vec3,
    /// In-face coordinates relative to the face origin.
    pub coords: [f64; 2],
    /// Quadrature weight (length in 2D, area in 3D).
    pub weight: f64,
}

/// A flat face `{x : n·x = offset}` of the domain boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct Face {
    pub id: usize,
    /// Exterior unit normal.
    pub normal: Vec3,
    pub offset: f64,
    pub origin: Vec3,
    /// Orthonormal in-face axes. The second is zero in 2D.
    pub axes: [Vec3; 2],
    pub shape: FaceShape,
    /// Cells along each in-face axis; for triangular faces `[n, n]` means
    /// an `n²` subdivision into congruent sub-triangles.
    pub lattice: [usize; 2],
    pub vertices: Vec<Vec3>,
    pub detectors: Vec<Detector>,
}

impl Face {
    pub fn to_world(&self, c: [f64; 2]) -> Vec3 {
        v::axpy(v::axpy(self.origin, c[0], self.axes[0]), c[1], self.axes[1])
    }

    pub fn to_coords(&self, p: Vec3) -> [f64; 2] {
        let d = v::sub(p, self.origin);
        [v::dot(d, self.axes[0]), v::dot(d, self.axes[1])]
    }

    /// Signed distance of `p` from the face plane, positive outside.
    #[inline]
    pub fn height(&self, p: Vec3) -> f64 {
        v::dot(self.normal, p) - self.offset
    }

    pub fn centroid(&self) -> Vec3 {
        let k = self.vertices.len() as f64;
        let s = self
            .vertices
            .iter()
            .fold([0.0; 3], |acc, &p| v::add(acc, p));
        v::scale(s, 1.0 / k)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub spec: DomainSpec,
    pub kind: DomainKind,
    pub dim: usize,
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Face>,
    pub diam: f64,
    /// Length scale used for geometric tolerances.
    pub scale: f64,
}

impl Domain {
    pub fn detector_count(&self) -> usize {
        self.faces.iter().map(|f| f.detectors.len()).sum()
    }

    /// Global index of the first detector of each face.
    pub fn detector_offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.faces.len());
        let mut acc = 0;
        for f in &self.faces {
            out.push(acc);
            acc += f.detectors.len();
        }
        out
    }

    /// All detectors in storage order.
    pub fn detectors(&self) -> impl Iterator<Item = &Detector> {
        self.faces.iter().flat_map(|f| f.detectors.iter())
    }

    pub fn vertex_centroid(&self) -> Vec3 {
        let s = self
            .vertices
            .iter()
            .fold([0.0; 3], |acc, &p| v::add(acc, p));
        v::scale(s, 1.0 / self.vertices.len() as f64)
    }

    /// Largest vertex distance from the vertex centroid.
    pub fn circumradius(&self) -> f64 {
        let c = self.vertex_centroid();
        self.vertices
            .iter()
            .map(|&p| v::dist(p, c))
            .fold(0.0, f64::max)
    }

    pub fn tolerance(&self) -> f64 {
        1e-12 * self.scale
    }

    pub fn contains(&self, p: Vec3, tol: f64) -> bool {
        self.faces.iter().all(|f| f.height(p) <= tol)
    }

    /// Distance from `p` to the closed domain.
    pub fn distance(&self, p: Vec3) -> f64 {
        if self.contains(p, 0.0) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for f in &self.faces {
            let h = f.height(p);
            if h <= 0.0 {
                continue;
            }
            let q = v::axpy(p, -h, f.normal);
            best = best.min(v::dist(p, closest_on_face(f, q)));
        }
        best
    }

    /// Axis-aligned bounding box of the vertices.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Default truncation radius for the 2D integration set: every
    /// replicated detector within `diam` of the domain lies inside it.
    pub fn default_rtrunc(&self) -> f64 {
        self.circumradius() + self.diam
    }
}

/// Closest point of the (convex) face to `q`, assumed in its plane.
fn closest_on_face(f: &Face, q: Vec3) -> Vec3 {
    let c = f.to_coords(q);
    let poly: Vec<[f64; 2]> = f.vertices.iter().map(|&p| f.to_coords(p)).collect();
    let r = closest_in_polygon(&poly, c);
    f.to_world(r)
}

/// Closest point of a convex polygon (or segment, when it has two
/// vertices) to `p`.
pub(crate) fn closest_in_polygon(poly: &[[f64; 2]], p: [f64; 2]) -> [f64; 2] {
    let n = poly.len();
    if n >= 3 {
        let mut inside = true;
        let orient = cross2(sub2(poly[1], poly[0]), sub2(poly[2], poly[0])).signum();
        for i in 0..n {
            let a = poly[i];
            let b = poly[(i + 1) % n];
            if orient * cross2(sub2(b, a), sub2(p, a)) < 0.0 {
                inside = false;
                break;
            }
        }
        if inside {
            return p;
        }
    }
    let mut best = poly[0];
    let mut bd = f64::INFINITY;
    let edges = if n == 2 { 1 } else { n };
    for i in 0..edges {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let ab = sub2(b, a);
        let l2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if l2 > 0.0 {
            ((p[0] - a[0]) * ab[0] + (p[1] - a[1]) * ab[1]) / l2
        } else {
            0.0
        };
        let t = t.clamp(0.0, 1.0);
        let q = [a[0] + t * ab[0], a[1] + t * ab[1]];
        let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
        let d = dx * dx + dy * dy;
        if d < bd {
            bd = d;
            best = q;
        }
    }
    best
}

fn sub2(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross2(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn check_size(what: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::DegenerateSize { what, value: x })
    }
}

fn check_detectors(d: &[usize], allowed: &[usize]) -> Result<()> {
    if !allowed.contains(&d.len()) {
        return Err(Error::ParameterCount {
            what: "detector counts",
            expected: allowed[allowed.len() - 1],
            found: d.len(),
        });
    }
    for &n in d {
        if n < 2 {
            return Err(Error::TooFewDetectors { found: n });
        }
    }
    Ok(())
}

fn check_sizes(s: &[f64], expected: usize) -> Result<()> {
    if s.len() != expected {
        return Err(Error::ParameterCount {
            what: "size parameters",
            expected,
            found: s.len(),
        });
    }
    Ok(())
}

pub fn build_domain(spec: &DomainSpec) -> Result<Domain> {
    let d = &spec.detectors;
    let s = &spec.sizes;
    let (kind, vertices, faces) = match spec.kind {
        SpecKind::Square => {
            check_sizes(s, 1)?;
            check_detectors(d, &[1])?;
            let a = check_size("half-width", s[0])?;
            let (vs, fs) = box_2d([a, a], [d[0], d[0]]);
            (DomainKind::Square { a }, vs, fs)
        }
        SpecKind::Rectangle => {
            check_sizes(s, 2)?;
            check_detectors(d, &[1, 2])?;
            let a = [
                check_size("half-width", s[0])?,
                check_size("half-width", s[1])?,
            ];
            let n = if d.len() == 1 {
                [d[0], d[0]]
            } else {
                [d[0], d[1]]
            };
            let (vs, fs) = box_2d(a, n);
            (DomainKind::Rectangle { a }, vs, fs)
        }
        SpecKind::TriEquilateral | SpecKind::TriRightIsosceles | SpecKind::Tri306090 => {
            check_sizes(s, 1)?;
            check_detectors(d, &[1])?;
            let side = check_size("side", s[0])?;
            let kind = match spec.kind {
                SpecKind::TriEquilateral => TriangleKind::Equilateral,
                SpecKind::TriRightIsosceles => TriangleKind::RightIsosceles,
                _ => TriangleKind::ThirtySixty,
            };
            let vs = kind.vertices(side).to_vec();
            let fs = polygon_faces(&vs, d[0]);
            (DomainKind::Triangle { kind, side }, vs, fs)
        }
        SpecKind::Cube => {
            check_sizes(s, 1)?;
            check_detectors(d, &[1])?;
            let a = check_size("half-width", s[0])?;
            let (vs, fs) = box_3d([a; 3], [d[0]; 3]);
            (DomainKind::Cube { a }, vs, fs)
        }
        SpecKind::Cuboid => {
            check_sizes(s, 3)?;
            check_detectors(d, &[1, 3])?;
            let a = [
                check_size("half-width", s[0])?,
                check_size("half-width", s[1])?,
                check_size("half-width", s[2])?,
            ];
            let n = if d.len() == 1 {
                [d[0]; 3]
            } else {
                [d[0], d[1], d[2]]
            };
            let (vs, fs) = box_3d(a, n);
            (DomainKind::Cuboid { a }, vs, fs)
        }
        SpecKind::Prism => {
            check_sizes(s, 2)?;
            check_detectors(d, &[2])?;
            let base = spec
                .base
                .ok_or_else(|| Error::Unsupported("prism without a base triangle kind".into()))?;
            let side = check_size("side", s[0])?;
            let height = check_size("height", s[1])?;
            let (vs, fs) = prism(base, side, height, d[0], d[1]);
            (DomainKind::Prism { base, side, height }, vs, fs)
        }
        SpecKind::Pyramid => {
            check_sizes(s, 1)?;
            check_detectors(d, &[1])?;
            let a = check_size("size", s[0])?;
            let (vs, fs) = pyramid(a, d[0]);
            (DomainKind::Pyramid { a }, vs, fs)
        }
    };
    let diam = diameter(&kind);
    let scale = vertices
        .iter()
        .flat_map(|p| p.iter())
        .fold(diam, |m, &x| m.max(x.abs()));
    Ok(Domain {
        spec: spec.clone(),
        kind,
        dim: spec.dim(),
        vertices,
        faces,
        diam,
        scale,
    })
}

/// Diameter from the size parameters.
pub fn diameter(kind: &DomainKind) -> f64 {
    match *kind {
        DomainKind::Square { a } => 2.0 * libm::sqrt(2.0) * a,
        DomainKind::Rectangle { a } => 2.0 * libm::hypot(a[0], a[1]),
        DomainKind::Triangle { kind, side } => kind.diameter(side),
        DomainKind::Cube { a } => 2.0 * libm::sqrt(3.0) * a,
        DomainKind::Cuboid { a } => 2.0 * v::norm(a),
        DomainKind::Prism { base, side, height } => libm::hypot(base.diameter(side), height),
        DomainKind::Pyramid { a } => libm::sqrt(3.0) * a,
    }
}

fn unit(k: usize, s: f64) -> Vec3 {
    let mut e = [0.0; 3];
    e[k] = s;
    e
}

fn cell_centers(len: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = len / n as f64;
    (0..n).map(move |i| (i as f64 + 0.5) * h)
}

/// Faces ordered `+x1, -x1, +x2, -x2`; the in-face axis runs along the
/// other coordinate from `-a` to `+a`.
fn box_2d(a: [f64; 2], n: [usize; 2]) -> (Vec<Vec3>, Vec<Face>) {
    let vs = vec![
        [-a[0], -a[1], 0.0],
        [a[0], -a[1], 0.0],
        [a[0], a[1], 0.0],
        [-a[0], a[1], 0.0],
    ];
    let mut faces = Vec::new();
    for axis in 0..2 {
        let other = 1 - axis;
        for s in [1.0, -1.0] {
            let mut origin = [0.0; 3];
            origin[axis] = s * a[axis];
            origin[other] = -a[other];
            let len = 2.0 * a[other];
            let m = n[other];
            let u = unit(other, 1.0);
            let h = len / m as f64;
            let detectors = cell_centers(len, m)
                .map(|c| Detector {
                    pos: v::axpy(origin, c, u),
                    coords: [c, 0.0],
                    weight: h,
                })
                .collect();
            let mut end = origin;
            end[other] = a[other];
            faces.push(Face {
                id: faces.len(),
                normal: unit(axis, s),
                offset: a[axis],
                origin,
                axes: [u, [0.0; 3]],
                shape: FaceShape::Segment { len },
                lattice: [m, 1],
                vertices: vec![origin, end],
                detectors,
            });
        }
    }
    (vs, faces)
}

/// Faces ordered `+x1, -x1, +x2, -x2, +x3, -x3`; in-face axes are the other
/// two coordinates in increasing order, origin at the low corner,
/// detectors row-major.
fn box_3d(a: [f64; 3], n: [usize; 3]) -> (Vec<Vec3>, Vec<Face>) {
    let mut vs = Vec::new();
    for k in 0..8 {
        vs.push([
            if k & 1 == 0 { -a[0] } else { a[0] },
            if k & 2 == 0 { -a[1] } else { a[1] },
            if k & 4 == 0 { -a[2] } else { a[2] },
        ]);
    }
    let mut faces = Vec::new();
    for axis in 0..3 {
        let (p, q) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        for s in [1.0, -1.0] {
            let mut origin = [0.0; 3];
            origin[axis] = s * a[axis];
            origin[p] = -a[p];
            origin[q] = -a[q];
            let len = [2.0 * a[p], 2.0 * a[q]];
            let (u, w) = (unit(p, 1.0), unit(q, 1.0));
            let hp = len[0] / n[p] as f64;
            let hq = len[1] / n[q] as f64;
            let mut detectors = Vec::with_capacity(n[p] * n[q]);
            for cu in cell_centers(len[0], n[p]) {
                for cw in cell_centers(len[1], n[q]) {
                    detectors.push(Detector {
                        pos: v::axpy(v::axpy(origin, cu, u), cw, w),
                        coords: [cu, cw],
                        weight: hp * hq,
                    });
                }
            }
            let corners = vec![
                origin,
                v::axpy(origin, len[0], u),
                v::axpy(v::axpy(origin, len[0], u), len[1], w),
                v::axpy(origin, len[1], w),
            ];
            faces.push(Face {
                id: faces.len(),
                normal: unit(axis, s),
                offset: a[axis],
                origin,
                axes: [u, w],
                shape: FaceShape::Rect { len },
                lattice: [n[p], n[q]],
                vertices: corners,
                detectors,
            });
        }
    }
    (vs, faces)
}

/// Edges of a counter-clockwise planar polygon, edge `k` from vertex `k`
/// to vertex `k+1`, each with `n` cell-centered detectors.
fn polygon_faces(vs: &[Vec3], n: usize) -> Vec<Face> {
    let m = vs.len();
    (0..m)
        .map(|k| {
            let a = vs[k];
            let b = vs[(k + 1) % m];
            let len = v::dist(a, b);
            let u = v::normalize(v::sub(b, a));
            let normal = [u[1], -u[0], 0.0];
            let h = len / n as f64;
            let detectors = cell_centers(len, n)
                .map(|c| Detector {
                    pos: v::axpy(a, c, u),
                    coords: [c, 0.0],
                    weight: h,
                })
                .collect();
            Face {
                id: k,
                normal,
                offset: v::dot(normal, a),
                origin: a,
                axes: [u, [0.0; 3]],
                shape: FaceShape::Segment { len },
                lattice: [n, 1],
                vertices: vec![a, b],
                detectors,
            }
        })
        .collect()
}

/// Triangular face `abc` with outward normal `normal` and an `n²`
/// subdivision into congruent sub-triangles, one detector at each
/// sub-triangle centroid.
fn triangle_face(id: usize, a: Vec3, b: Vec3, c: Vec3, normal: Vec3, n: usize) -> Face {
    let ab = v::sub(b, a);
    let ac = v::sub(c, a);
    let u = v::normalize(ab);
    let w = v::cross(normal, u);
    let area = 0.5 * v::norm(v::cross(ab, ac));
    let weight = area / (n * n) as f64;
    let nf = n as f64;
    let mut detectors = Vec::with_capacity(n * n);
    let at = |s: f64, t: f64| v::axpy(v::axpy(a, s / nf, ab), t / nf, ac);
    for i in 0..n {
        for j in 0..n - i {
            detectors.push(at(i as f64 + 1.0 / 3.0, j as f64 + 1.0 / 3.0));
            if i + j + 1 < n {
                detectors.push(at(i as f64 + 2.0 / 3.0, j as f64 + 2.0 / 3.0));
            }
        }
    }
    let to_c = |p: Vec3| {
        let d = v::sub(p, a);
        [v::dot(d, u), v::dot(d, w)]
    };
    let detectors = detectors
        .into_iter()
        .map(|p| Detector {
            pos: p,
            coords: to_c(p),
            weight,
        })
        .collect();
    Face {
        id,
        normal,
        offset: v::dot(normal, a),
        origin: a,
        axes: [u, w],
        shape: FaceShape::Triangle {
            verts: [to_c(a), to_c(b), to_c(c)],
        },
        lattice: [n, n],
        vertices: vec![a, b, c],
        detectors,
    }
}

/// Right prism over a triangle: three rectangular side faces (edge order of
/// the base), then the top `z = h` and the bottom `z = 0`.
fn prism(
    base: TriangleKind,
    side: f64,
    h: f64,
    n_base: usize,
    n_z: usize,
) -> (Vec<Vec3>, Vec<Face>) {
    let tri = base.vertices(side);
    let mut vs: Vec<Vec3> = tri.to_vec();
    vs.extend(tri.iter().map(|p| [p[0], p[1], h]));
    let mut faces = Vec::new();
    for k in 0..3 {
        let a = tri[k];
        let b = tri[(k + 1) % 3];
        let len = v::dist(a, b);
        let u = v::normalize(v::sub(b, a));
        let normal = [u[1], -u[0], 0.0];
        let ez = [0.0, 0.0, 1.0];
        let hu = len / n_base as f64;
        let hz = h / n_z as f64;
        let mut detectors = Vec::with_capacity(n_base * n_z);
        for cu in cell_centers(len, n_base) {
            for cz in cell_centers(h, n_z) {
                detectors.push(Detector {
                    pos: v::axpy(v::axpy(a, cu, u), cz, ez),
                    coords: [cu, cz],
                    weight: hu * hz,
                });
            }
        }
        faces.push(Face {
            id: k,
            normal,
            offset: v::dot(normal, a),
            origin: a,
            axes: [u, ez],
            shape: FaceShape::Rect { len: [len, h] },
            lattice: [n_base, n_z],
            vertices: vec![a, b, [b[0], b[1], h], [a[0], a[1], h]],
            detectors,
        });
    }
    let top = tri.map(|p| [p[0], p[1], h]);
    faces.push(triangle_face(
        3,
        top[0],
        top[1],
        top[2],
        [0.0, 0.0, 1.0],
        n_base,
    ));
    faces.push(triangle_face(
        4,
        tri[0],
        tri[2],
        tri[1],
        [0.0, 0.0, -1.0],
        n_base,
    ));
    (vs, faces)
}

/// The orthoscheme `{0 <= y <= x <= z <= a}` of the cube `[-a, a]³`.
///
/// Faces: `y = 0`, `y = x`, `x = z`, `z = a`.
fn pyramid(a: f64, n: usize) -> (Vec<Vec3>, Vec<Face>) {
    let p0 = [0.0, 0.0, 0.0];
    let p1 = [0.0, 0.0, a];
    let p2 = [a, 0.0, a];
    let p3 = [a, a, a];
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let walls: [(Vec3, [Vec3; 3]); 4] = [
        ([0.0, -1.0, 0.0], [p0, p1, p2]),
        ([-r, r, 0.0], [p0, p3, p1]),
        ([r, 0.0, -r], [p0, p2, p3]),
        ([0.0, 0.0, 1.0], [p1, p3, p2]),
    ];
    let faces = walls
        .iter()
        .enumerate()
        .map(|(id, (nrm, t))| {
            // Order the vertices so the in-face frame is right-handed about
            // the outward normal.
            let [pa, pb, pc] = *t;
            let c = v::cross(v::sub(pb, pa), v::sub(pc, pa));
            if v::dot(c, *nrm) > 0.0 {
                triangle_face(id, pa, pb, pc, *nrm, n)
            } else {
                triangle_face(id, pa, pc, pb, *nrm, n)
            }
        })
        .collect();
    (vec![p0, p1, p2, p3], faces)
}

/// A piece of a replicated boundary line inside the truncation disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    /// Physical face whose data the segment carries.
    pub face: usize,
    /// Image of the face origin.
    pub origin: Vec3,
    pub tangent: Vec3,
    /// Oriented normal; the data density is taken from the side `-normal`.
    pub normal: Vec3,
    /// Arc-parameter interval inside the disk.
    pub interval: (f64, f64),
    pub sign: i8,
    pub tile: Tile,
}

/// The truncated 2D integration set: all tile edges of the replicated
/// tessellation, clipped to the disk of radius `r_trunc` about the vertex
/// centroid of the domain.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationSet2D {
    pub center: Vec3,
    pub r_trunc: f64,
    pub segments: Vec<Segment>,
}

impl IntegrationSet2D {
    /// Offsets `n·y` of the distinct lines carrying data of `face` with
    /// that face's own normal orientation.
    pub fn line_offsets(&self, domain: &Domain, face: usize) -> Vec<f64> {
        let n = domain.faces[face].normal;
        let mut out: Vec<f64> = Vec::new();
        for s in &self.segments {
            if s.face != face || v::dot(s.normal, n) < 1.0 - 1e-9 {
                continue;
            }
            let c = v::dot(n, s.origin);
            if !out
                .iter()
                .any(|&o| (o - c).abs() < domain.tolerance() * 1e3)
            {
                out.push(c);
            }
        }
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }

    pub fn total_length(&self) -> f64 {
        self.segments
            .iter()
            .map(|s| s.interval.1 - s.interval.0)
            .sum()
    }
}

pub fn integration_set_2d(domain: &Domain, r_trunc: f64) -> Result<IntegrationSet2D> {
    if domain.dim != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: domain.dim,
        });
    }
    check_size("truncation radius", r_trunc)?;
    let center = domain.vertex_centroid();
    let tiles = tiles_within(domain, center, r_trunc)?;
    let mut segments = Vec::new();
    for sf in skeleton_faces(domain, &tiles) {
        let face = &domain.faces[sf.face];
        let len = match face.shape {
            FaceShape::Segment { len } => len,
            _ => unreachable!("2D faces are segments"),
        };
        let tile = &tiles[sf.tile];
        let origin = tile.apply(face.origin);
        let tangent = tile.apply_linear(face.axes[0]);
        // |origin + t·tangent - center|² <= r²
        let d = v::sub(origin, center);
        let b = v::dot(d, tangent);
        let c = v::dot(d, d) - r_trunc * r_trunc;
        let disc = b * b - c;
        if disc <= 0.0 {
            continue;
        }
        let sq = libm::sqrt(disc);
        let t0 = (-b - sq).max(0.0);
        let t1 = (-b + sq).min(len);
        if t1 <= t0 {
            continue;
        }
        segments.push(Segment {
            face: sf.face,
            origin,
            tangent,
            normal: sf.normal,
            interval: (t0, t1),
            sign: sf.sign,
            tile: *tile,
        });
    }
    Ok(IntegrationSet2D {
        center,
        r_trunc,
        segments,
    })
}

/// A replicated face meeting the footprint of `B(x, T)` on its plane.
#[derive(Clone, Debug, PartialEq)]
pub struct FootprintFace {
    pub face: usize,
    pub sign: i8,
    pub tile: Tile,
}

/// Disk `B(x, T) ∩ plane` together with the replicated faces it touches.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneFootprint {
    /// Oriented unit normal.
    pub normal: Vec3,
    /// Plane is `{y : normal·y = offset}`.
    pub offset: f64,
    pub center: Vec3,
    pub radius: f64,
    pub faces: Vec<FootprintFace>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationSet3D {
    pub x: Vec3,
    pub t: f64,
    pub planes: Vec<PlaneFootprint>,
}

impl IntegrationSet3D {
    /// Footprints on planes parallel to `normal` (same orientation) at the
    /// given offset, if any.
    pub fn plane(&self, normal: Vec3, offset: f64) -> Option<&PlaneFootprint> {
        self.planes
            .iter()
            .find(|p| v::dot(p.normal, normal) > 1.0 - 1e-9 && (p.offset - offset).abs() < 1e-9)
    }
}

pub fn integration_set_3d(domain: &Domain, x: Vec3, t: f64) -> Result<IntegrationSet3D> {
    if domain.dim != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: domain.dim,
        });
    }
    check_size("time", t)?;
    let tiles = tiles_within(domain, x, t)?;
    let mut planes: Vec<PlaneFootprint> = Vec::new();
    for sf in skeleton_faces(domain, &tiles) {
        let d = v::dot(sf.normal, x) - sf.offset;
        if d.abs() >= t {
            continue;
        }
        let radius = libm::sqrt(t * t - d * d);
        let center = v::axpy(x, -d, sf.normal);
        if !face_meets_disk(domain, &tiles[sf.tile], &sf, center, radius) {
            continue;
        }
        let entry = FootprintFace {
            face: sf.face,
            sign: sf.sign,
            tile: tiles[sf.tile],
        };
        let tol = 1e-9 * domain.scale;
        match planes.iter_mut().find(|p| {
            v::dot(p.normal, sf.normal) > 1.0 - 1e-9 && (p.offset - sf.offset).abs() < tol
        }) {
            Some(p) => p.faces.push(entry),
            None => planes.push(PlaneFootprint {
                normal: sf.normal,
                offset: sf.offset,
                center,
                radius,
                faces: vec![entry],
            }),
        }
    }
    Ok(IntegrationSet3D { x, t, planes })
}

fn face_meets_disk(
    domain: &Domain,
    tile: &Tile,
    sf: &SkeletonFace,
    center: Vec3,
    radius: f64,
) -> bool {
    let face = &domain.faces[sf.face];
    let u = tile.apply_linear(face.axes[0]);
    let w = tile.apply_linear(face.axes[1]);
    let o = tile.apply(face.origin);
    let to2 = |p: Vec3| {
        let d = v::sub(p, o);
        [v::dot(d, u), v::dot(d, w)]
    };
    let poly: Vec<[f64; 2]> = face.vertices.iter().map(|&p| to2(tile.apply(p))).collect();
    let c = to2(center);
    let q = closest_in_polygon(&poly, c);
    libm::hypot(q[0] - c[0], q[1] - c[1]) < radius
}
