//! Odd-reflection extension of boundary data.
//!
//! Closed forms for intervals and rectangles ([`replicate_1d`],
//! [`replicate_2d`]), plus a generic machinery for any domain whose faces
//! generate a reflection tiling: tiles are affine images of the domain
//! carrying the parity of the number of reflections used to reach them, and
//! [`fold`] maps any point back into the domain.

use alloc::collections::BTreeMap;
use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::vector::{self as v, Mat3, Vec3};

/// Skeleton points are detected within `1e-12` of the length scale.
const REL_TOL: f64 = 1e-12;

/// Upper bound on reflections in [`fold`].
pub const FOLD_CAP: usize = 1 << 20;

/// Odd extension of a function on `(-a, a)`: returns the source coordinate
/// and the sign. The sign is 0 on the reflection points `(2m+1)a`.
pub fn replicate_1d(a: f64, x: f64) -> (f64, i8) {
    let n = libm::round(x / (2.0 * a));
    let mut r = x - 2.0 * n * a;
    if (r.abs() - a).abs() <= REL_TOL * a.max(x.abs()) {
        return (r.clamp(-a, a), 0);
    }
    // rounding can leave |r| marginally above a for huge x
    let mut n = n as i64;
    if r > a {
        r -= 2.0 * a;
        n += 1;
    } else if r < -a {
        r += 2.0 * a;
        n -= 1;
    }
    if n.rem_euclid(2) == 0 {
        (r, 1)
    } else {
        (-r, -1)
    }
}

/// Tensor product of [`replicate_1d`] on two axes.
pub fn replicate_2d(a2: f64, a3: f64, x: [f64; 2]) -> ([f64; 2], i8) {
    let (s2, g2) = replicate_1d(a2, x[0]);
    let (s3, g3) = replicate_1d(a3, x[1]);
    ([s2, s3], g2 * g3)
}

/// Lattice form of [`replicate_1d`] for `n` cell-centered samples on
/// `(-a, a)`: replicated cell `i ∈ ℤ` carries sample `local` with sign.
pub fn replicate_index(n: usize, i: i64) -> (usize, i8) {
    let n = n as i64;
    let tile = i.div_euclid(n);
    let local = i.rem_euclid(n);
    if tile.rem_euclid(2) == 0 {
        (local as usize, 1)
    } else {
        ((n - 1 - local) as usize, -1)
    }
}

/// Where a replicated point takes its value from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceRef {
    /// Physical face, for queries on the replicated boundary.
    pub face: Option<usize>,
    /// In-face coordinates of `point` when `face` is set.
    pub coords: [f64; 2],
    /// Folded point in the closed domain.
    pub point: Vec3,
    /// Reflection parity, or 0 on the skeleton.
    pub sign: i8,
}

/// An isometry `x ↦ lin·x + shift` mapping the domain onto one tile, with
/// the parity of the reflections composing it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tile {
    pub lin: Mat3,
    pub shift: Vec3,
    pub sign: i8,
}

impl Tile {
    pub const IDENTITY: Tile = Tile {
        lin: v::IDENTITY,
        shift: [0.0; 3],
        sign: 1,
    };

    #[inline]
    pub fn apply(&self, x: Vec3) -> Vec3 {
        v::add(v::mat_vec(&self.lin, x), self.shift)
    }

    #[inline]
    pub fn apply_linear(&self, x: Vec3) -> Vec3 {
        v::mat_vec(&self.lin, x)
    }

    /// `self ∘ R` where `R` reflects in the plane `n·x = c`.
    pub fn then_reflect(&self, n: Vec3, c: f64) -> Tile {
        let h = v::reflector(n);
        Tile {
            lin: v::mat_mul(&self.lin, &h),
            shift: v::add(v::mat_vec(&self.lin, v::scale(n, 2.0 * c)), self.shift),
            sign: -self.sign,
        }
    }
}

#[inline]
fn reflect(p: Vec3, n: Vec3, c: f64) -> Vec3 {
    v::axpy(p, -2.0 * (v::dot(n, p) - c), n)
}

fn key(p: Vec3, q: f64) -> [i64; 3] {
    p.map(|x| libm::round(x / q) as i64)
}

fn quantum(domain: &Domain) -> f64 {
    domain.scale * libm::ldexp(1.0, -20)
}

/// All tiles of the reflection tiling whose closure may meet the ball of
/// `radius` about `center`, in breadth-first order from the tile holding
/// `center`.
/// Every tile meeting the ball is returned; a few extra ones may be.
pub fn tiles_within(domain: &Domain, center: Vec3, radius: f64) -> Result<Vec<Tile>> {
    let vc = domain.vertex_centroid();
    let reach = radius + domain.circumradius() * (1.0 + 1e-9);
    let q = quantum(domain);
    let mut seen: BTreeMap<[i64; 3], ()> = BTreeMap::new();
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    // Start from the tile containing the center so the search never has to
    // cross empty space.
    let start = tile_containing(domain, center)?;
    seen.insert(key(start.apply(vc), q), ());
    queue.push_back(start);
    while let Some(t) = queue.pop_front() {
        out.push(t);
        if out.len() > 50_000_000 {
            return Err(Error::FoldDidNotTerminate { steps: out.len() });
        }
        for f in &domain.faces {
            let nt = t.then_reflect(f.normal, f.offset);
            let c = nt.apply(vc);
            if v::dist(c, center) > reach {
                continue;
            }
            let k = key(c, q);
            if seen.insert(k, ()).is_none() {
                queue.push_back(nt);
            }
        }
    }
    Ok(out)
}

/// The tile containing `x`, i.e. the inverse of the folding map.
pub fn tile_containing(domain: &Domain, x: Vec3) -> Result<Tile> {
    let tol = REL_TOL * domain.scale;
    let mut t = Tile::IDENTITY;
    let mut p = x;
    let mut steps = 0;
    while let Some(f) = domain.faces.iter().find(|f| f.height(p) > tol) {
        p = reflect(p, f.normal, f.offset);
        t = t.then_reflect(f.normal, f.offset);
        steps += 1;
        if steps > FOLD_CAP {
            return Err(Error::FoldDidNotTerminate { steps });
        }
    }
    Ok(t)
}

/// A face of the tiling skeleton: the image of a domain face under a tile.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SkeletonFace {
    /// Index into the tile list.
    pub tile: usize,
    pub face: usize,
    /// Image of the face's outward normal under the tile.
    pub normal: Vec3,
    pub offset: f64,
    pub sign: i8,
}

/// Distinct skeleton faces among the given tiles.
///
/// A skeleton face is shared by two tiles whose contributions agree (normal
/// and sign both flip). One is kept, preferring the tile that maps the
/// face's normal to itself so that plane families keep the orientation of
/// their physical face.
pub fn skeleton_faces(domain: &Domain, tiles: &[Tile]) -> Vec<SkeletonFace> {
    let q = quantum(domain);
    let mut index: BTreeMap<[i64; 3], usize> = BTreeMap::new();
    let mut out: Vec<SkeletonFace> = Vec::new();
    let centroids: Vec<Vec3> = domain.faces.iter().map(|f| f.centroid()).collect();
    for (ti, t) in tiles.iter().enumerate() {
        for (fi, f) in domain.faces.iter().enumerate() {
            let c = t.apply(centroids[fi]);
            let normal = t.apply_linear(f.normal);
            let sf = SkeletonFace {
                tile: ti,
                face: fi,
                normal,
                offset: v::dot(normal, c),
                sign: t.sign,
            };
            let preferred = v::dot(normal, f.normal) > 1.0 - 1e-9;
            match index.get(&key(c, q)) {
                Some(&j) => {
                    let old = &out[j];
                    let old_pref = v::dot(old.normal, domain.faces[old.face].normal) > 1.0 - 1e-9;
                    if preferred && !old_pref {
                        out[j] = sf;
                    }
                }
                None => {
                    index.insert(key(c, q), out.len());
                    out.push(sf);
                }
            }
        }
    }
    out
}

/// Folds `x` into the closed domain by reflecting across the first
/// violated wall (in face order) until none is violated.
pub fn fold(domain: &Domain, x: Vec3) -> Result<SourceRef> {
    fold_by(domain, x, |_| 0)
}

/// Like [`fold`], but `pick` chooses which of the currently violated walls
/// (given as face indices) to reflect in.
pub fn fold_by(
    domain: &Domain,
    x: Vec3,
    mut pick: impl FnMut(&[usize]) -> usize,
) -> Result<SourceRef> {
    let tol = REL_TOL * domain.scale.max(v::norm(x));
    let mut p = x;
    let mut sign: i8 = 1;
    let mut violated = Vec::with_capacity(domain.faces.len());
    let mut steps = 0;
    loop {
        violated.clear();
        violated.extend(
            domain
                .faces
                .iter()
                .filter(|f| f.height(p) > tol)
                .map(|f| f.id),
        );
        if violated.is_empty() {
            break;
        }
        let f = &domain.faces[violated[pick(&violated) % violated.len()]];
        p = reflect(p, f.normal, f.offset);
        sign = -sign;
        steps += 1;
        if steps > FOLD_CAP {
            return Err(Error::FoldDidNotTerminate { steps });
        }
    }
    let on_wall = domain.faces.iter().any(|f| f.height(p).abs() <= tol);
    Ok(SourceRef {
        face: None,
        coords: [0.0; 2],
        point: p,
        sign: if on_wall { 0 } else { sign },
    })
}

/// Source of the replicated boundary data at a skeleton point `y`, for the
/// family oriented by the unit normal `n`: the value is the limit taken
/// from the `-n` side. The sign is 0 when `y` sits on a lower-dimensional
/// part of the skeleton (edges, corners) or when `n` is not normal to the
/// skeleton at `y`.
pub fn trace(domain: &Domain, y: Vec3, n: Vec3) -> Result<SourceRef> {
    let tol = REL_TOL * domain.scale.max(v::norm(y));
    let mut p = y;
    let mut dir = n;
    let mut sign: i8 = 1;
    let mut steps = 0;
    loop {
        // The probe point is p - ε·dir.
        let hit = domain.faces.iter().find(|f| {
            let h = f.height(p);
            h > tol || (h.abs() <= tol && v::dot(f.normal, dir) < -1e-9)
        });
        let Some(f) = hit else { break };
        p = reflect(p, f.normal, f.offset);
        dir = v::sub(dir, v::scale(f.normal, 2.0 * v::dot(f.normal, dir)));
        sign = -sign;
        steps += 1;
        if steps > FOLD_CAP {
            return Err(Error::FoldDidNotTerminate { steps });
        }
    }
    let tight: Vec<usize> = domain
        .faces
        .iter()
        .filter(|f| f.height(p).abs() <= tol)
        .map(|f| f.id)
        .collect();
    let face = domain
        .faces
        .iter()
        .find(|f| f.height(p).abs() <= tol && v::dot(f.normal, dir) > 1.0 - 1e-9);
    match face {
        Some(f) => Ok(SourceRef {
            face: Some(f.id),
            coords: f.to_coords(p),
            point: p,
            sign: if tight.len() == 1 { sign } else { 0 },
        }),
        None => Ok(SourceRef {
            face: None,
            coords: [0.0; 2],
            point: p,
            sign: 0,
        }),
    }
}
