use std::f64::consts::PI;
use std::time::Instant;

use qdlab::domains::{quadrature_data, DomainSpec};
use qdlab::numerics::{c64, Polynomial, RationalFunction, C64};
use qdlab::transforms::*;

fn poly3() -> DomainSpec {
    let k = 2.0 * 2f64.sqrt() / 3.0;
    DomainSpec::RiemannMap {
        phi: RationalFunction::from_poly(Polynomial::new(vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(-k, 0.0), c64(1.0 / 3.0, 0.0)])),
        unbounded: false,
    }
}

#[test]
fn schwarz_identity_residuals() {
    let specs = [
        DomainSpec::Disc { center: c64(0.0, 0.0), radius: 1.0 },
        DomainSpec::ExteriorDisc { center: c64(0.0, 0.0), radius: 1.0 },
        DomainSpec::ExteriorDisc { center: c64(0.3, -0.2), radius: 1.0 },
        DomainSpec::Cardioid { scale: 1.0 },
        poly3(),
    ];
    for spec in specs {
        let t = Instant::now();
        let k = ComplementRaster::from_spec(&spec, 1.0 / 256.0).unwrap();
        let r = quadrature_data(&spec).unwrap();
        let res = verify_schwarz_identity(&spec, &k, &r, 512).unwrap();
        println!("{} {:?} {:?}", spec.name(), res, t.elapsed());
        assert!(res.max_regular <= 5e-3, "{}: {:?}", spec.name(), res);
        assert!(res.max_near_cusp <= 2e-2, "{}: {:?}", spec.name(), res);
    }
}

#[test]
fn cauchy_raster_examples() {
    let g = Grid::centered(c64(0.0, 0.0), 1.1, 1.0 / 128.0);
    let disc = RasterDroplet::from_fn(g, |z| z.norm() < 1.0);
    assert!((cauchy_raster(&disc, c64(2.0, 0.0)) - c64(0.5, 0.0)).norm() < 5e-3);
    assert!(cauchy_raster(&RasterDroplet::empty(g), c64(2.0, 0.0)).norm() == 0.0);
    let g2 = Grid::centered(c64(0.0, 0.0), 2.1, 1.0 / 64.0);
    let ann = RasterDroplet::from_fn(g2, |z| (1.0..2.0).contains(&z.norm()));
    assert!(cauchy_raster(&ann, c64(0.0, 0.0)).norm() < 1e-12);
    assert!((log_potential_raster(&disc, c64(2.0, 0.0)) + 2.0 * 2f64.ln()).abs() < 1e-2);
    assert!((log_potential_raster(&disc, c64(0.0, 0.0)) - 1.0).abs() < 1e-2);
}

#[test]
fn cauchy_raster_converges_linearly() {
    use rand::{Rng, SeedableRng};
    let z = c64(1.7, 0.4);
    let rms = |h: f64| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 32;
        let s: f64 = (0..n)
            .map(|_| {
                let a = c64(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)) * h;
                let g = Grid::centered(c64(0.0, 0.0), 1.1, h);
                let d = RasterDroplet::from_fn(g, |w| (w - a).norm() < 1.0);
                (cauchy_raster(&d, z) - cauchy_disc(a, 1.0, z)).norm_sqr()
            })
            .sum();
        (s / n as f64).sqrt()
    };
    let e: Vec<f64> = [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0].iter().map(|&h| rms(h)).collect();
    let ratios: Vec<f64> = e.windows(2).map(|w| w[1] / w[0]).collect();
    println!("{e:?} {ratios:?}");
    // Boundary errors partly cancel, so halving h gains at least the linear factor.
    assert!(ratios.iter().all(|&r| r <= 0.8), "{ratios:?}");
}

#[test]
fn fit_disc_complement() {
    let s: Vec<(C64, C64)> = (0..64)
        .map(|k| {
            let z = C64::from_polar(1.5 + 0.5 * (k % 4) as f64, k as f64 * 0.37);
            (z, 1.0 / z)
        })
        .collect();
    let qd = fit_quadrature_function(&s, 3).unwrap();
    assert_eq!(qd.nodes.len(), 1);
    let n = &qd.nodes[0];
    assert!(n.at.finite().unwrap().norm() < 1e-8);
    assert_eq!(n.terms.len(), 1);
    assert_eq!(n.terms[0].m, 0);
    assert!((n.terms[0].c - c64(PI, 0.0)).norm() < 1e-8);
}

#[test]
fn fit_constant() {
    let a = c64(0.3, 0.2);
    let s: Vec<(C64, C64)> = (0..40).map(|k| (C64::from_polar(0.5, k as f64), a.conj())).collect();
    let qd = fit_quadrature_function(&s, 2).unwrap();
    assert_eq!(qd.degree(), 0);
    assert!((qd.to_rational().value(c64(0.1, 0.0)) - a.conj()).norm() < 1e-10);
}

#[test]
fn fit_two_discs_from_raster() {
    let (a1, a2) = (c64(-0.6, 0.1), c64(0.5, -0.2));
    let g = Grid::centered(c64(0.0, 0.0), 2.2, 1.0 / 64.0);
    // K = big disc minus two small discs; samples live in K.
    let k = RasterDroplet::from_fn(g, |z| z.norm() < 2.0 && (z - a1).norm() > 0.3 && (z - a2).norm() > 0.25);
    let s = complement_cauchy_samples(&k, 4.0, 4);
    let fit = fit_rational(&s, 4).unwrap();
    println!("{:?} err {}", fit.qd, fit.holdout_error);
    let poles: Vec<C64> = fit.qd.finite_nodes().map(|n| n.at.finite().unwrap()).collect();
    assert_eq!(poles.len(), 2, "{poles:?}");
    for a in [a1, a2] {
        assert!(poles.iter().any(|p| (p - a).norm() < 1e-3 * 10.0), "{a} {poles:?}");
    }
}

#[test]
fn equilibrium_of_disc_and_square() {
    let h = 1.0 / 64.0;
    let g = Grid::centered(c64(0.0, 0.0), 1.0, h);
    let t: f64 = 0.5;
    let k = RasterDroplet::from_fn(g, |z| z.norm() < t.sqrt());
    let q: Vec<f64> = (0..g.len()).map(|i| g.center_of(i).norm_sqr()).collect();
    let e = verify_equilibrium(&k, &q);
    assert!(e.deviation <= 10.0 * h, "{e:?}");
    let sq = RasterDroplet::from_fn(g, |z| z.re.abs() < 0.9 && z.im.abs() < 0.2);
    let e2 = verify_equilibrium(&sq, &q);
    println!("disc {} square {}", e.deviation, e2.deviation);
    assert!(e2.deviation > 10.0 * h);
}
