//! Named domains and the declared test phantoms.

use std::path::Path;

use polymean_core::vector as v;
use polymean_core::{Component, DomainSpec, Phantom, TriangleKind, Vec3};

use crate::error::{Error, Result};
use crate::format;

fn triangle_kind(s: &str) -> Option<TriangleKind> {
    match s {
        "tri_equilateral" => Some(TriangleKind::Equilateral),
        "tri_right_isosceles" => Some(TriangleKind::RightIsosceles),
        "tri_30_60_90" => Some(TriangleKind::ThirtySixty),
        _ => None,
    }
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("bad number {x:?} in domain")))
        })
        .collect()
}

/// Parses `KIND[:SIZES]`, `prism:BASE[:SIDE,HEIGHT]` or a path to a JSON
/// domain spec. `detectors` lists the per-edge counts (prisms take base and
/// height counts); missing values default to 64.
///
/// Default sizes: square half-width 1, rectangle 1×0.5, triangles and
/// prisms side 2 (prism height 2), cube half-width 1, cuboid 1×0.75×0.5,
/// pyramid edge 2.
pub fn parse_domain(text: &str, detectors: &[usize]) -> Result<DomainSpec> {
    if text.ends_with(".json") {
        return format::read_domain(Path::new(text));
    }
    let n = |i: usize| {
        detectors
            .get(i)
            .or(detectors.first())
            .copied()
            .unwrap_or(64)
    };
    let mut parts = text.splitn(3, ':');
    let kind = parts.next().unwrap_or_default();
    let rest: Vec<&str> = parts.collect();
    let sizes = |k: usize, default: &[f64]| -> Result<Vec<f64>> {
        match rest.get(k) {
            Some(s) => numbers(s),
            None => Ok(default.to_vec()),
        }
    };
    let want = |got: Vec<f64>, len: usize| -> Result<Vec<f64>> {
        if got.len() == len {
            Ok(got)
        } else {
            Err(Error::Usage(format!(
                "{kind} takes {len} size(s), got {}",
                got.len()
            )))
        }
    };
    let spec = match kind {
        "square" => DomainSpec::square(want(sizes(0, &[1.0])?, 1)?[0], n(0)),
        "rectangle" => {
            let s = want(sizes(0, &[1.0, 0.5])?, 2)?;
            DomainSpec::rectangle(s[0], s[1], n(0))
        }
        "cube" => DomainSpec::cube(want(sizes(0, &[1.0])?, 1)?[0], n(0)),
        "cuboid" => {
            let s = want(sizes(0, &[1.0, 0.75, 0.5])?, 3)?;
            DomainSpec::cuboid([s[0], s[1], s[2]], n(0))
        }
        "pyramid" => DomainSpec::pyramid(want(sizes(0, &[2.0])?, 1)?[0], n(0)),
        "prism" => {
            let base = rest.first().and_then(|b| triangle_kind(b)).ok_or_else(|| {
                Error::Usage("prism needs a base, e.g. prism:tri_equilateral".into())
            })?;
            let s = want(sizes(1, &[2.0, 2.0])?, 2)?;
            DomainSpec::prism(base, s[0], s[1], n(0), n(1))
        }
        k => match triangle_kind(k) {
            Some(t) => DomainSpec::triangle(t, want(sizes(0, &[2.0])?, 1)?[0], n(0)),
            None => return Err(Error::Usage(format!("unknown domain {k:?}"))),
        },
    };
    Ok(spec)
}

/// Incenter and inradius of a triangle.
fn incircle(p: [Vec3; 3]) -> (Vec3, f64) {
    let a = v::dist(p[1], p[2]);
    let b = v::dist(p[2], p[0]);
    let c = v::dist(p[0], p[1]);
    let per = a + b + c;
    let center = v::scale(
        v::add(
            v::add(v::scale(p[0], a), v::scale(p[1], b)),
            v::scale(p[2], c),
        ),
        1.0 / per,
    );
    let s = 0.5 * per;
    let area = (s * (s - a) * (s - b) * (s - c)).sqrt();
    (center, area / s)
}

pub const PHANTOM_NAMES: &[&str] = &[
    "smooth2d",
    "smooth3d",
    "balls25",
    "exterior",
    "smooth3d_exterior",
    "incircle",
    "prism",
    "pyramid",
];

pub fn smooth2d() -> Phantom {
    Phantom::new(
        2,
        vec![
            Component::bump([0.15, -0.1, 0.0], 0.55, 1.0),
            Component::bump([-0.35, 0.3, 0.0], 0.35, 0.7),
            Component::bump([0.35, 0.45, 0.0], 0.25, 0.5),
        ],
    )
}

pub fn smooth3d() -> Phantom {
    Phantom::new(
        3,
        vec![
            Component::bump([0.1, -0.15, 0.05], 0.6, 1.0),
            Component::bump([-0.35, 0.3, -0.2], 0.35, 0.6),
            Component::bump([0.3, 0.35, 0.4], 0.3, 0.5),
        ],
    )
}

/// Indicator balls of radii 0.08 to 0.14 on a 5×5 layout in the plane
/// `x3 = 0` of the unit cube.
pub fn balls25() -> Phantom {
    let pos = [-0.6, -0.3, 0.0, 0.3, 0.6];
    let mut cs = Vec::new();
    for (i, &x) in pos.iter().enumerate() {
        for (j, &y) in pos.iter().enumerate() {
            let r = 0.08 + 0.015 * ((i + 2 * j) % 5) as f64;
            cs.push(Component::indicator([x, y, 0.0], r, 1.0));
        }
    }
    Phantom::new(3, cs)
}

/// The indicator ball of radius 0.08 centered at `(1.1, 0, 0)`, outside
/// the unit cube.
pub fn exterior() -> Phantom {
    Phantom::new(3, vec![Component::indicator([1.1, 0.0, 0.0], 0.08, 1.0)])
}

/// Smooth bump at the incenter, of radius 0.75 inradius (any triangle).
pub fn incircle_bump(spec: &DomainSpec) -> Result<Phantom> {
    let d = polymean_core::build_domain(spec)?;
    if d.dim != 2 || d.vertices.len() != 3 {
        return Err(Error::Usage("the incircle phantom needs a triangle".into()));
    }
    let (c, r) = incircle([d.vertices[0], d.vertices[1], d.vertices[2]]);
    Ok(Phantom::new(2, vec![Component::bump(c, 0.75 * r, 1.0)]))
}

/// Declared phantom by name (see [`PHANTOM_NAMES`]) or from a JSON file.
pub fn phantom(name: &str, domain: &DomainSpec) -> Result<Phantom> {
    let p = match name {
        "smooth2d" => smooth2d(),
        "smooth3d" => smooth3d(),
        "balls25" => balls25(),
        "exterior" => exterior(),
        "smooth3d_exterior" => {
            let mut p = smooth3d();
            p.components.extend(exterior().components);
            p
        }
        "incircle" => incircle_bump(domain)?,
        "prism" => {
            let d = polymean_core::build_domain(domain)?;
            let tri: Vec<Vec3> = d.vertices.iter().filter(|p| p[2] == 0.0).copied().collect();
            if d.dim != 3 || tri.len() != 3 {
                return Err(Error::Usage("the prism phantom needs a prism".into()));
            }
            let (c, r) = incircle([tri[0], tri[1], tri[2]]);
            let h = d.bounds().1[2];
            Phantom::new(
                3,
                vec![Component::bump(
                    [c[0], c[1], 0.5 * h],
                    0.75 * r.min(0.5 * h),
                    1.0,
                )],
            )
        }
        "pyramid" => {
            // fits {0 <= y <= x <= z <= a} for a = 2; scaled with a
            let d = polymean_core::build_domain(domain)?;
            let a = 0.5 * d.bounds().1[2];
            Phantom::new(
                3,
                vec![Component::bump([a, 0.45 * a, 1.6 * a], 0.35 * a, 1.0)],
            )
        }
        path if path.ends_with(".json") => format::read_phantom(Path::new(path))?,
        other => {
            return Err(Error::Usage(format!(
                "unknown phantom {other:?}; use one of {} or a .json file",
                PHANTOM_NAMES.join(", ")
            )))
        }
    };
    if p.dim != domain.dim() {
        return Err(Error::Dimension(format!(
            "phantom is {}D, domain is {}D",
            p.dim,
            domain.dim()
        )));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use polymean_core::build_domain;

    #[test]
    fn parses_domains() {
        assert_eq!(
            parse_domain("square", &[8]).unwrap(),
            DomainSpec::square(1.0, 8)
        );
        assert_eq!(
            parse_domain("cube:2", &[4]).unwrap(),
            DomainSpec::cube(2.0, 4)
        );
        assert_eq!(
            parse_domain("prism:tri_30_60_90:3,1", &[5, 7]).unwrap(),
            DomainSpec::prism(TriangleKind::ThirtySixty, 3.0, 1.0, 5, 7)
        );
        assert_eq!(
            parse_domain("tri_equilateral", &[]).unwrap(),
            DomainSpec::triangle(TriangleKind::Equilateral, 2.0, 64)
        );
        assert!(parse_domain("circle", &[8]).is_err());
        assert!(parse_domain("rectangle:1", &[8]).is_err());
        assert!(parse_domain("prism", &[8]).is_err());
    }

    #[test]
    fn declared_phantoms_sit_inside_their_domains() {
        let cases = [
            ("smooth2d", "square"),
            ("smooth3d", "cube"),
            ("balls25", "cube"),
            ("incircle", "tri_right_isosceles"),
            ("incircle", "tri_equilateral"),
            ("incircle", "tri_30_60_90"),
            ("prism", "prism:tri_equilateral"),
            ("pyramid", "pyramid"),
        ];
        for (name, dom) in cases {
            let spec = parse_domain(dom, &[4]).unwrap();
            let d = build_domain(&spec).unwrap();
            for c in phantom(name, &spec).unwrap().components {
                assert!(d.contains(c.center, 0.0), "{name} in {dom}");
                let depth = d
                    .faces
                    .iter()
                    .map(|f| -f.height(c.center))
                    .fold(f64::INFINITY, f64::min);
                assert!(depth >= c.radius, "{name} in {dom}");
            }
        }
        let d = build_domain(&DomainSpec::cube(1.0, 2)).unwrap();
        let e = &exterior().components[0];
        assert!(!d.contains(e.center, 0.0) && d.distance(e.center) > e.radius);
    }

    #[test]
    fn right_isosceles_incircle() {
        let p = incircle_bump(&DomainSpec::triangle(TriangleKind::RightIsosceles, 2.0, 4)).unwrap();
        let c = &p.components[0];
        let r = 2.0 - 2f64.sqrt();
        assert!((c.center[0] - r).abs() < 1e-12 && (c.center[1] - r).abs() < 1e-12);
        assert!((c.radius - 0.75 * r).abs() < 1e-12);
    }

    #[test]
    fn dimension_checked() {
        assert!(matches!(
            phantom("smooth3d", &DomainSpec::square(1.0, 4)),
            Err(Error::Dimension(_))
        ));
    }
}
