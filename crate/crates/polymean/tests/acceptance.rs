//! Acceptance criteria, one line of output each.
//!
//! Everything runs inside a single test so the expensive reconstructions
//! are shared and timings are not distorted by concurrent tests. Run with
//! `cargo test -p polymean --test acceptance -- --nocapture` to see the
//! report.

use std::f64::consts::PI;
use std::time::Instant;

use polymean::metrics::{metrics_where, Metrics};
use polymean::setup;
use polymean::Threads;
use polymean_core::data::{
    forward_means, means_to_wave_2d, means_to_wave_3d, wave_to_means_2d, wave_to_means_3d,
};
use polymean_core::recon2d::PvFilter;
use polymean_core::recon3d::{divergence, VectorField};
use polymean_core::replication::{fold_by, skeleton_faces, tiles_within};
use polymean_core::vector as v;
use polymean_core::{
    build_domain, fold, invert_means_2d, invert_means_3d, invert_wave_2d, invert_wave_3d,
    replicate_1d, Component, Domain, DomainSpec, Executor, GridSpec, ImageGrid, MeansDataset,
    Params2D, Params3D, Phantom, RadialGrid, Serial, TriangleKind, Vec3,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// criterion 1
const C1_LINF: f64 = 2e-2;
const C1_TRUNC_RATIO: f64 = 1.5;
const C1_SECONDS: f64 = 120.0;
// criterion 2
const C2_LINF: f64 = 5e-2;
const C2_REFINEMENT_GAIN: f64 = 1.5;
const C2_SECONDS: f64 = 600.0;
const C2_THREADS: usize = 8;
// criterion 3
const C3_LINF: f64 = 0.10;
// criterion 4
const C4_LINF_DIFF: f64 = 1e-3;
// criterion 5
const C5_MEAN_ABS: f64 = 1e-6;
const C5_MC_SIGMAS: f64 = 3.0;
const C5_ROUND_TRIP_L2: f64 = 1e-3;
const C5_PV_L2: f64 = 1e-6;
const C5_DIV_ORDER: f64 = 3.5;
// criterion 6
const C6_POINTS: usize = 10_000;
// criterion 7
const C7_LINF: f64 = 5e-2;
const C7_L2: f64 = 1e-1;

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        println!(
            "criterion {id}: {} | {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failures.push(id.to_string());
        }
    }
}

/// Nodes of the open domain.
fn interior(d: &Domain) -> impl Fn(Vec3) -> bool + '_ {
    let tol = d.tolerance();
    move |x| d.faces.iter().all(|f| f.height(x) < -tol)
}

fn truth(grid: GridSpec, p: &Phantom) -> ImageGrid {
    ImageGrid::from_fn(grid, |x| p.eval(x))
}

fn errors(img: &ImageGrid, p: &Phantom, d: &Domain) -> Metrics {
    metrics_where(img, &truth(img.spec, p), interior(d)).unwrap()
}

fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

fn max_abs_diff(a: &ImageGrid, b: &ImageGrid, keep: impl Fn(Vec3) -> bool) -> f64 {
    let mut m = 0.0f64;
    for i in 0..a.spec.len() {
        if keep(a.spec.point(a.spec.unindex(i))) {
            m = m.max((a.values[i] - b.values[i]).abs());
        }
    }
    m
}

struct Cube {
    n: usize,
    domain: Domain,
    means: MeansDataset,
    image: ImageGrid,
    seconds: f64,
}

fn cube_run(n: usize, p: &Phantom, exec: &dyn Executor) -> Cube {
    let t0 = Instant::now();
    let domain = build_domain(&DomainSpec::cube(1.0, n)).unwrap();
    let means =
        forward_means(p, &domain, RadialGrid::new(257, domain.diam).unwrap(), exec).unwrap();
    let image = invert_means_3d(&means, &Params3D::for_domain(&domain, n).unwrap(), exec).unwrap();
    Cube {
        n,
        domain,
        means,
        image,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

fn criterion_1(r: &mut Report) -> (MeansDataset, Params2D) {
    let p = setup::smooth2d();
    let d = build_domain(&DomainSpec::square(1.0, 256)).unwrap();
    let t0 = Instant::now();
    let m = forward_means(
        &p,
        &d,
        RadialGrid::new(1024, 2.0 * 2f64.sqrt()).unwrap(),
        &Serial,
    )
    .unwrap();
    let params = Params2D {
        r_trunc: 3.0 * 2f64.sqrt(),
        ..Params2D::for_domain(&d, 129).unwrap()
    };
    let img = invert_means_2d(&m, &params, &Serial).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let e = errors(&img, &p, &d);
    let far = invert_means_2d(
        &m,
        &Params2D {
            r_trunc: 6.0,
            ..params
        },
        &Serial,
    )
    .unwrap();
    let e6 = errors(&far, &p, &d);
    let ratio = e.linf / e6.linf;
    r.line(
        "1",
        e.linf <= C1_LINF && ratio <= C1_TRUNC_RATIO && secs <= C1_SECONDS,
        format!(
            "2D square rel Linf {:.3e} (<= {C1_LINF:e}); Linf(R=3√2)/Linf(R=6) = {:.3e}/{:.3e} = {ratio:.2} (<= {C1_TRUNC_RATIO}); {secs:.1}s single-threaded (<= {C1_SECONDS}s)",
            e.linf, e.linf, e6.linf
        ),
    );
    (m, params)
}

fn criterion_2(r: &mut Report, exec: &Threads) -> (Cube, Cube) {
    let p = setup::smooth3d();
    let coarse = cube_run(33, &p, exec);
    let fine = cube_run(65, &p, exec);
    let ec = errors(&coarse.image, &p, &coarse.domain);
    let ef = errors(&fine.image, &p, &fine.domain);
    let gain = ec.linf / ef.linf;
    r.line(
        "2",
        ef.linf <= C2_LINF && gain >= C2_REFINEMENT_GAIN && fine.seconds <= C2_SECONDS,
        format!(
            "3D cube rel Linf {:.3e} at 65^3 (<= {C2_LINF:e}); {:.3e} at 33^3, gain {gain:.2} (>= {C2_REFINEMENT_GAIN}); 65^3 run {:.1}s on {} threads (<= {C2_SECONDS}s)",
            ef.linf,
            ec.linf,
            fine.seconds,
            exec.threads()
        ),
    );
    (coarse, fine)
}

fn criterion_3(r: &mut Report, exec: &Threads, runs: &[&Cube]) {
    // The pipeline is linear, so rec(with) - rec(without) = rec(exterior).
    let ext = setup::exterior();
    let mut rel = Vec::new();
    for c in runs {
        let m = forward_means(&ext, &c.domain, c.means.grid, exec).unwrap();
        let diff =
            invert_means_3d(&m, &Params3D::for_domain(&c.domain, c.n).unwrap(), exec).unwrap();
        let keep = interior(&c.domain);
        let base = c
            .image
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(c.image.spec.point(c.image.spec.unindex(*i))))
            .fold(0.0f64, |a, (_, x)| a.max(x.abs()));
        rel.push((
            c.n,
            max_abs_diff(&diff, &ImageGrid::zeros(diff.spec), &keep) / base,
        ));
    }
    let (n0, e0) = rel[0];
    let (n1, e1) = rel[1];
    r.line(
        "3",
        e1 <= C3_LINF && e1 < e0,
        format!("exterior ball changes the interior by rel Linf {e1:.3e} at {n1}^3 (<= {C3_LINF}) and {e0:.3e} at {n0}^3 (must be larger)"),
    );
}

fn criterion_4(r: &mut Report, exec: &Threads, m2: &MeansDataset, p2: &Params2D, cube: &Cube) {
    let img_m = invert_means_2d(m2, p2, exec).unwrap();
    let w2 = means_to_wave_2d(m2, exec).unwrap();
    let img_w = invert_wave_2d(&w2, p2, exec).unwrap();
    let d2 = max_abs_diff(&img_m, &img_w, interior(&m2.domain));

    let params = Params3D::for_domain(&cube.domain, cube.n).unwrap();
    let w3 = means_to_wave_3d(&cube.means, exec).unwrap();
    let img_w3 = invert_wave_3d(&w3, &params, exec).unwrap();
    let d3 = max_abs_diff(&cube.image, &img_w3, interior(&cube.domain));
    // Not part of the criterion: wave data against its own conversion back
    // to means, which adds the trapezoid error of the Kirchhoff integral.
    let back = wave_to_means_3d(&w3, exec).unwrap();
    let img_b3 = invert_means_3d(&back, &params, exec).unwrap();
    let d3b = max_abs_diff(&img_w3, &img_b3, interior(&cube.domain));
    r.line(
        "4",
        d2 <= C4_LINF_DIFF && d3 <= C4_LINF_DIFF,
        format!(
            "Linf |invert_wave(means_to_wave(M)) - invert_means(M)|: 2D {d2:.3e}, 3D {d3:.3e} at {}^3 (each <= {C4_LINF_DIFF:e}); info: 3D invert_wave(P) vs invert_means(wave_to_means(P)) {d3b:.3e}",
            cube.n
        ),
    );
}

/// Midpoint rule over `n` angles.
fn brute_circular(c: &Component, y: Vec3, r: f64, n: usize) -> f64 {
    let p = Phantom::new(2, vec![*c]);
    (0..n)
        .map(|k| {
            let th = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            p.eval([y[0] + r * th.cos(), y[1] + r * th.sin(), 0.0])
        })
        .sum::<f64>()
        / n as f64
}

fn criterion_5(r: &mut Report, exec: &Threads, m2: &MeansDataset, cube: &Cube) {
    let mut parts = Vec::new();
    let mut ok = true;

    // (a) disk at d = 2R, r = 2R against a million-angle brute force and
    // the arccos closed form; smooth bump against the brute force
    let disk = Component::indicator([0.0; 3], 0.5, 1.0);
    let y = [1.0, 0.0, 0.0];
    let exact = (1.0 / PI) * ((1.0f64 + 1.0 - 0.25) / 2.0).acos();
    let a1 = (disk.circular_mean(y, 1.0) - brute_circular(&disk, y, 1.0, 1 << 20)).abs();
    let a2 = (disk.circular_mean(y, 1.0) - exact).abs();
    let bump = Component::bump([0.1, -0.2, 0.0], 0.6, 1.0);
    let mut a3 = 0.0f64;
    for k in 1..40 {
        let rr = 0.03 * k as f64;
        a3 = a3.max(
            (bump.circular_mean([0.7, 0.4, 0.0], rr)
                - brute_circular(&bump, [0.7, 0.4, 0.0], rr, 1 << 16))
            .abs(),
        );
    }
    // ball d = 1, R = 0.5, r = 1.2 against 10⁷ uniform sphere samples
    let ball = Component::indicator([0.0; 3], 0.5, 1.0);
    let yb = [1.0, 0.0, 0.0];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n_mc = 10_000_000usize;
    let mut hits = 0usize;
    for _ in 0..n_mc {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).sqrt();
        let q = [
            yb[0] + 1.2 * s * phi.cos(),
            yb[1] + 1.2 * s * phi.sin(),
            yb[2] + 1.2 * z,
        ];
        if v::norm(q) < 0.5 {
            hits += 1;
        }
    }
    let pm = hits as f64 / n_mc as f64;
    let sigma = (pm * (1.0 - pm) / n_mc as f64).sqrt();
    let mc_dev = (ball.spherical_mean(yb, 1.2) - pm).abs() / sigma;
    let ok_a = a1.max(a2).max(a3) <= C5_MEAN_ABS && mc_dev <= C5_MC_SIGMAS;
    ok &= ok_a;
    parts.push(format!(
        "(a) disk |closed - brute| {:.1e}, |closed - arccos| {a2:.1e}, bump {a3:.1e} (<= {C5_MEAN_ABS:e}); ball MC {mc_dev:.2} sigma (<= {C5_MC_SIGMAS})",
        a1
    ));

    // (b) round trips on the acceptance datasets
    let ab = wave_to_means_2d(&means_to_wave_2d(m2, exec).unwrap(), exec).unwrap();
    let kb = wave_to_means_3d(&means_to_wave_3d(&cube.means, exec).unwrap(), exec).unwrap();
    let eb2 = rel_l2(&ab.values, &m2.values);
    let eb3 = rel_l2(&kb.values, &cube.means.values);
    ok &= eb2 <= C5_ROUND_TRIP_L2 && eb3 <= C5_ROUND_TRIP_L2;
    parts.push(format!(
        "(b) Abel {eb2:.2e}, Kirchhoff {eb3:.2e} rel L2 (<= {C5_ROUND_TRIP_L2:e})"
    ));

    // (c) PV filter against the direct alternating sum
    // H_i = Σ_{k ≥ 1, k - i odd} 2k m_k / (k² - i²)
    let mut worst = 0.0f64;
    for det in [0, 300, 777] {
        let m = m2.row(det);
        let n_s = 2 * m.len();
        let h = PvFilter::new(m.len(), n_s).hilbert(m);
        let direct: Vec<f64> = (0..n_s)
            .map(|i| {
                (1..m.len())
                    .filter(|k| (k + i) % 2 == 1)
                    .map(|k| {
                        let (kf, fi) = (k as f64, i as f64);
                        2.0 * kf * m[k] / (kf * kf - fi * fi)
                    })
                    .sum()
            })
            .collect();
        worst = worst.max(rel_l2(&h, &direct));
    }
    ok &= worst <= C5_PV_L2;
    parts.push(format!(
        "(c) PV vs direct sum {worst:.2e} rel L2 (<= {C5_PV_L2:e})"
    ));

    // (d) divergence of (sin 2x₁, cos x₂, x₃²) on three grids
    let err = |n: usize| {
        let g = GridSpec::cube(n, -1.0, 1.0).unwrap();
        let f = VectorField {
            spec: g,
            comps: [
                ImageGrid::from_fn(g, |p| (2.0 * p[0]).sin()).values,
                ImageGrid::from_fn(g, |p| p[1].cos()).values,
                ImageGrid::from_fn(g, |p| p[2] * p[2]).values,
            ],
        };
        let d = divergence(&f, &Serial).unwrap();
        (0..g.len())
            .map(|i| {
                let p = g.point(g.unindex(i));
                (d.values[i] - (2.0 * (2.0 * p[0]).cos() - p[1].sin() + 2.0 * p[2])).abs()
            })
            .fold(0.0, f64::max)
    };
    // The one-sided boundary stencils are still pre-asymptotic on coarse
    // grids, so the order is read off the finest pair.
    let (e1, e2, e3) = (err(33), err(65), err(129));
    let (o1, o2) = ((e1 / e2).log2(), (e2 / e3).log2());
    ok &= o2 >= C5_DIV_ORDER;
    parts.push(format!(
        "(d) divergence orders {o1:.2} (33->65), {o2:.2} (65->129, >= {C5_DIV_ORDER})"
    ));

    r.line("5", ok, parts.join("; "));
}

fn replication_domains() -> Vec<(&'static str, Domain)> {
    let mut out = vec![
        ("square", DomainSpec::square(1.0, 4)),
        ("rectangle", DomainSpec::rectangle(1.0, 0.6, 4)),
        ("cube", DomainSpec::cube(1.0, 2)),
        ("cuboid", DomainSpec::cuboid([1.0, 0.7, 0.4], 2)),
        ("pyramid", DomainSpec::pyramid(1.0, 2)),
    ];
    for (name, k) in [
        ("equilateral", TriangleKind::Equilateral),
        ("right isosceles", TriangleKind::RightIsosceles),
        ("30-60-90", TriangleKind::ThirtySixty),
    ] {
        out.push((name, DomainSpec::triangle(k, 1.3, 4)));
        out.push((
            match k {
                TriangleKind::Equilateral => "prism equilateral",
                TriangleKind::RightIsosceles => "prism right isosceles",
                TriangleKind::ThirtySixty => "prism 30-60-90",
            },
            DomainSpec::prism(k, 1.3, 0.8, 2, 2),
        ));
    }
    out.into_iter()
        .map(|(n, s)| (n, build_domain(&s).unwrap()))
        .collect()
}

/// Failures of oddness, path independence and (boxes) the closed form.
fn replication_failures(d: &Domain, rng: &mut ChaCha8Rng) -> [usize; 3] {
    let mut bad = [0; 3];
    let tol = 1e-9 * d.scale;
    let random = |rng: &mut ChaCha8Rng, spread: f64| {
        let mut x = [0.0; 3];
        for c in x.iter_mut().take(d.dim) {
            *c = rng.gen_range(-spread..spread) * d.diam;
        }
        x
    };
    let tiles = tiles_within(d, d.vertex_centroid(), 2.0 * d.diam).unwrap();
    let walls = skeleton_faces(d, &tiles);
    for _ in 0..C6_POINTS {
        let x = random(rng, 1.5);
        let w = walls[rng.gen_range(0..walls.len())];
        let y = v::axpy(x, -2.0 * (v::dot(w.normal, x) - w.offset), w.normal);
        let (a, b) = (fold(d, x).unwrap(), fold(d, y).unwrap());
        if v::dist(a.point, b.point) > tol || a.sign != -b.sign {
            bad[0] += 1;
        }
    }
    for _ in 0..C6_POINTS {
        let x = random(rng, 3.0);
        let a = fold(d, x).unwrap();
        let mut r2 = ChaCha8Rng::seed_from_u64(rng.gen());
        let b = fold_by(d, x, |c| r2.gen_range(0..c.len())).unwrap();
        if v::dist(a.point, b.point) > tol || a.sign != b.sign {
            bad[1] += 1;
        }
    }
    if let Some(h) = d.kind.half_widths() {
        for _ in 0..C6_POINTS {
            let x = random(rng, 3.0);
            let mut src = [0.0; 3];
            let mut sign = 1;
            for k in 0..d.dim {
                let (s, g) = replicate_1d(h[k], x[k]);
                src[k] = s;
                sign *= g;
            }
            let a = fold(d, x).unwrap();
            if v::dist(a.point, src) > tol || a.sign != sign {
                bad[2] += 1;
            }
        }
    }
    bad
}

fn criterion_6(r: &mut Report) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, d) in replication_domains() {
        let bad = replication_failures(&d, &mut rng);
        ok &= bad == [0, 0, 0];
        parts.push(format!("{name} {}/{}/{}", bad[0], bad[1], bad[2]));
    }
    r.line(
        "6",
        ok,
        format!(
            "failures of oddness/path independence/closed form per {C6_POINTS} points: {}",
            parts.join(", ")
        ),
    );
}

fn criterion_7(r: &mut Report, exec: &Threads) {
    let spec = DomainSpec::triangle(TriangleKind::RightIsosceles, 2.0, 256);
    let d = build_domain(&spec).unwrap();
    let p = setup::incircle_bump(&spec).unwrap();
    let m = forward_means(&p, &d, RadialGrid::new(1024, d.diam).unwrap(), exec).unwrap();
    let img = invert_means_2d(&m, &Params2D::for_domain(&d, 129).unwrap(), exec).unwrap();
    let e = errors(&img, &p, &d);
    let mut ok = e.linf <= C7_LINF;
    let mut parts = vec![format!(
        "right isosceles rel Linf {:.3e} (<= {C7_LINF:e})",
        e.linf
    )];
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (name, k) in [
        ("equilateral", TriangleKind::Equilateral),
        ("30-60-90", TriangleKind::ThirtySixty),
    ] {
        let spec = DomainSpec::triangle(k, 2.0, 128);
        let d = build_domain(&spec).unwrap();
        let bad = replication_failures(&d, &mut rng);
        let p = setup::incircle_bump(&spec).unwrap();
        let m = forward_means(&p, &d, RadialGrid::new(512, d.diam).unwrap(), exec).unwrap();
        let img = invert_means_2d(&m, &Params2D::for_domain(&d, 65).unwrap(), exec).unwrap();
        let e = errors(&img, &p, &d);
        ok &= bad == [0, 0, 0] && e.l2 <= C7_L2;
        parts.push(format!(
            "{name} invariant failures {}/{}, rel L2 {:.3e} (<= {C7_L2:e})",
            bad[0], bad[1], e.l2
        ));
    }
    r.line("7", ok, parts.join("; "));
}

#[test]
fn acceptance() {
    let exec = Threads::new(C2_THREADS);
    let mut r = Report {
        failures: Vec::new(),
    };
    criterion_6(&mut r);
    let (m2, p2) = criterion_1(&mut r);
    let (coarse, fine) = criterion_2(&mut r, &exec);
    criterion_3(&mut r, &exec, &[&coarse, &fine]);
    criterion_4(&mut r, &exec, &m2, &p2, &coarse);
    criterion_5(&mut r, &exec, &m2, &coarse);
    criterion_7(&mut r, &exec);
    assert!(r.failures.is_empty(), "failed criteria: {:?}", r.failures);
}
