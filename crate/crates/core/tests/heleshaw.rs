use std::f64::consts::PI;
use std::time::Instant;

use qdlab::heleshaw::{
    build_potential, chain, droplet_from_coincidence, obstacle_solve, obstacle_solve_source, perturb_to_nonsingular,
    polynomial_hull, Source,
};
use qdlab::numerics::{c64, Polynomial, RationalFunction, C64};
use qdlab::scenario::{
    cubic_function, cubic_setup, disc_complement, hypotrochoid, hypotrochoid_alpha, two_disc_droplet, two_disc_holes,
    Disc,
};
use qdlab::topology::{audit_droplet, curvature_peaks, extract_ovals, label_components, Connectivity};
use qdlab::transforms::{
    complement_cauchy_samples, fill_polylines, fit_rational, verify_equilibrium, Grid, RasterDroplet,
};

fn unit_disc(h: f64) -> RasterDroplet {
    RasterDroplet::from_fn(Grid::centered(c64(0.0, 0.0), 1.1, h), |z| z.norm() <= 1.0)
}

fn zero() -> RationalFunction {
    RationalFunction::from_poly(Polynomial::zero())
}

fn area_law(k: &RasterDroplet, t: f64) -> bool {
    (k.area() - PI * t).abs() <= 4.0 * k.h() * k.perimeter()
}

fn fitted_poles(k: &RasterDroplet) -> Vec<C64> {
    let fit = fit_rational(&complement_cauchy_samples(k, 4.0, 3), 4).unwrap();
    let mut p: Vec<C64> = fit.qd.finite_nodes().filter_map(|n| n.at.finite()).collect();
    p.sort_by(|a, b| a.re.total_cmp(&b.re));
    p
}

#[test]
fn disc_droplets_match_the_oracle() {
    let h = 1.0 / 256.0;
    let p = build_potential(&zero(), &unit_disc(h)).unwrap();
    for t in [0.1, 0.25, 0.5] {
        let start = Instant::now();
        let sol = obstacle_solve(&p, &p.k0, t).unwrap();
        let kt = droplet_from_coincidence(&sol.coincidence);
        let exact = RasterDroplet::from_fn(p.grid, |z| z.norm() <= t.sqrt());
        let haus = kt.hausdorff(&exact);
        println!(
            "t={t}: hausdorff {:.2}h, area err {:.2e}, sweeps {}, {:.1}s",
            haus / h,
            (kt.area() - PI * t).abs(),
            sol.sweeps,
            start.elapsed().as_secs_f64()
        );
        assert!(haus <= 2.0 * h);
        assert!(area_law(&kt, t));
        assert!((sol.mass - t).abs() <= 0.01 * t);
        let eq = verify_equilibrium(&kt, &p.q);
        assert!(eq.deviation <= 10.0 * h, "{}", eq.deviation);
    }
}

#[test]
fn concentric_chain_and_manifest() {
    let h = 1.0 / 128.0;
    let p = build_potential(&zero(), &unit_disc(h)).unwrap();
    let times = [0.1, 0.2, 0.3];
    let rec = chain(&p, &p.k0, &times, Source::Infinity).unwrap();
    for (k, &t) in rec.droplets.iter().zip(&times) {
        let exact = RasterDroplet::from_fn(p.grid, |z| z.norm() <= t.sqrt());
        assert!(k.hausdorff(&exact) <= 2.0 * h);
        assert!(area_law(k, t));
    }
    assert_eq!(rec.components, vec![1, 1, 1]);
    assert_eq!(rec.singular, vec![false, false, false]);
    assert!(rec.monotonicity_violations.iter().all(|&n| n == 0), "{:?}", rec.monotonicity_violations);
    assert!(rec.droplets.windows(2).all(|w| w[0].is_subset_of(&w[1])));
    for (k, ks) in rec.droplets.iter().zip(&rec.coincidence) {
        assert!(k.is_subset_of(ks));
    }
    let dir = tempfile::tempdir().unwrap();
    rec.write_dir(dir.path()).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["times"].as_array().unwrap().len(), 3);
    assert_eq!(manifest["components"][2], 1);
    let back = RasterDroplet::load(dir.path(), "K_001").unwrap();
    assert_eq!(back, rec.droplets[1]);
}

/// B(0, √(t + Σρ²)) minus the two holes, on the given grid.
fn two_disc_oracle(g: Grid, t: f64, hole1: f64) -> RasterDroplet {
    let holes = two_disc_holes();
    let r = (t + holes.iter().map(|d| d.radius * d.radius).sum::<f64>()).sqrt();
    RasterDroplet::from_fn(g, |z| {
        z.norm() <= r && (z - holes[0].center).norm() >= hole1 && (z - holes[1].center).norm() >= holes[1].radius
    })
}

#[test]
fn two_disc_chain_keeps_its_quadrature_function() {
    let h = 1.0 / 128.0;
    let s = two_disc_droplet(0.8, h);
    let p = build_potential(&s.h, &s.k0).unwrap();
    let t0 = p.t0();
    let times = [0.4, 0.76, 0.79, t0];
    let rec = chain(&p, &p.k0, &times, Source::Infinity).unwrap();
    let holes = two_disc_holes();
    for (k, &t) in rec.droplets.iter().zip(&times) {
        let haus = k.hausdorff(&two_disc_oracle(p.grid, t, holes[0].radius));
        let eq = verify_equilibrium(k, &p.q);
        println!("t={t:.3}: hausdorff {:.2}h, equilibrium {:.2e}", haus / h, eq.deviation);
        assert!(haus <= 2.0 * h);
        assert!(area_law(k, t));
        assert!(eq.deviation <= 10.0 * h);
        let audit = audit_droplet(k, &s.h).unwrap();
        assert!(audit.pass, "{audit:?}");
    }
    assert!(rec.monotonicity_violations.iter().all(|&n| n == 0));

    // Poles of the complement's quadrature function at t and t/2.
    let (a, b) = (fitted_poles(&rec.droplets[0]), fitted_poles(&rec.droplets[3]));
    println!("poles {a:?} / {b:?}");
    assert_eq!(a.len(), 2);
    assert_eq!(b.len(), 2);
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).norm() <= 5.0 * h);
    }
    for d in &holes {
        assert!(a.iter().any(|x| (x - d.center).norm() <= 5.0 * h));
    }

    // Strong monotonicity on hulls.
    assert!(polynomial_hull(&rec.droplets[0]).is_subset_of(&polynomial_hull(&rec.droplets[3]).eroded()));

    // Left continuity: Hausdorff distance to K_{t0} within √δ.
    for i in 1..3 {
        let delta = t0 - times[i];
        let d = rec.droplets[i].hausdorff(&rec.droplets[3]);
        println!("δ={delta:.3}: distance {d:.4}, C = {:.3}", d / delta.sqrt());
        assert!(d <= delta.sqrt());
    }
}

#[test]
fn finite_source_grows_the_hole_around_it() {
    let h = 1.0 / 128.0;
    let s = two_disc_droplet(0.8, h);
    let p = build_potential(&s.h, &s.k0).unwrap();
    let holes = two_disc_holes();
    let t = 0.7;
    let sol = obstacle_solve_source(&p, &p.k0, t, Source::Point(holes[0].center)).unwrap();
    let k = droplet_from_coincidence(&sol.coincidence);
    let r1 = (holes[0].radius.powi(2) + p.t0() - t).sqrt();
    // The outer boundary stays put; only the hole containing the source grows.
    let haus = k.hausdorff(&two_disc_oracle(p.grid, 0.8, r1));
    println!("finite source: hausdorff {:.2}h, mass {:.4}", haus / h, sol.mass);
    assert!(haus <= 2.0 * h);
    assert!(area_law(&k, t));
}

#[test]
fn cubic_chain_shrinks_hypotrochoids() {
    let h = 1.0 / 128.0;
    let s = cubic_setup(h);
    let p = build_potential(&s.h, &s.k0).unwrap();
    let t0 = p.t0();
    let times = [0.015, 0.03, 0.045, t0];
    let rec = chain(&p, &p.k0, &times, Source::Infinity).unwrap();
    assert!(rec.components.iter().all(|&n| n == 1), "{:?}", rec.components);
    for (k, &t) in rec.droplets.iter().zip(&times).take(3) {
        let alpha = hypotrochoid_alpha(t).unwrap();
        let exact = fill_polylines(p.grid, &[hypotrochoid(alpha, 4096)]);
        let haus = k.hausdorff(&exact);
        println!("t={t}: hausdorff {:.2}h", haus / h);
        assert!(haus <= 2.0 * h);
        assert!(area_law(k, t));
        assert!(audit_droplet(k, &s.h).unwrap().pass);
    }
    let ovals = extract_ovals(rec.droplets.last().unwrap()).unwrap();
    assert_eq!(ovals.len(), 1);
    let peaks = curvature_peaks(&ovals[0].points, 6, PI / 2.0);
    println!("terminal peaks {peaks:?}");
    assert_eq!(peaks.len(), 3);
    // Earlier droplets are smooth.
    let early = extract_ovals(&rec.droplets[0]).unwrap();
    assert!(curvature_peaks(&early[0].points, 6, PI / 2.0).is_empty());
}

#[test]
fn two_localizations_give_the_same_droplet() {
    let h = 1.0 / 128.0;
    let common = Grid::centered(c64(0.0, 0.0), 0.55, h);
    let deltoid = cubic_setup(h);
    let disc = RasterDroplet::from_fn(common, |z| z.norm() <= 0.45);
    let t = 0.03;
    let mut out = Vec::new();
    for k0 in [&deltoid.k0, &disc] {
        let p = build_potential(&cubic_function(), k0).unwrap();
        let sol = obstacle_solve(&p, &p.k0, t).unwrap();
        out.push(droplet_from_coincidence(&sol.coincidence).regrid(common));
    }
    assert_ne!(deltoid.k0.regrid(common), disc);
    let haus = out[0].hausdorff(&out[1]);
    println!("uniqueness: hausdorff {:.2}h", haus / h);
    assert!(haus <= 2.0 * h);
}

#[test]
fn tangent_discs_split_at_the_contact() {
    let h = 1.0 / 128.0;
    let holes = [Disc::new(c64(-0.5, 0.0), 0.5), Disc::new(c64(0.5, 0.0), 0.5)];
    let s = disc_complement(Disc::new(c64(0.0, 0.0), 1.0), &holes, h);
    let p = build_potential(&s.h, &s.k0).unwrap();
    let before = label_components(&p.k0, Connectivity::Four).count;
    let k = perturb_to_nonsingular(&p, &p.k0, None).unwrap();
    let after = label_components(&k, Connectivity::Four).count;
    assert_eq!(after, 2);
    assert!(after >= before);
    assert!(k.is_subset_of(&p.k0));
    assert!(audit_droplet(&k, &s.h).unwrap().pass);
}
