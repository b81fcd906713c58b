use polymean_core::data::{forward_means, RadialGrid};
use polymean_core::recon3d::{invert_means_3d, Params3D};
use polymean_core::*;
fn main() {
    let a: Vec<usize> = std::env::args()
        .skip(1)
        .map(|x| x.parse().unwrap())
        .collect();
    let (nd, nt, ng) = (a[0], a[1], a[2]);
    let d = build_domain(&DomainSpec::cube(1.0, nd)).unwrap();
    let p = phantom::Phantom::new(
        3,
        vec![
            phantom::Component::bump([0.1, -0.15, 0.05], 0.6, 1.0),
            phantom::Component::bump([-0.35, 0.3, -0.2], 0.35, 0.6),
            phantom::Component::bump([0.3, 0.35, 0.4], 0.3, 0.5),
        ],
    );
    let t0 = std::time::Instant::now();
    let m = forward_means(&p, &d, RadialGrid::new(nt, d.diam).unwrap(), &Serial).unwrap();
    let t1 = t0.elapsed();
    let img = invert_means_3d(&m, &Params3D::for_domain(&d, ng).unwrap(), &Serial).unwrap();
    let t2 = t0.elapsed();
    let (mut e, mut tm) = (0.0f64, 0.0f64);
    for i in 0..img.spec.len() {
        let x = img.spec.point(img.spec.unindex(i));
        let t = p.eval(x);
        e = e.max((img.values[i] - t).abs());
        tm = tm.max(t.abs());
    }
    println!("forward {:?} total {:?} relLinf {}", t1, t2, e / tm);
}
