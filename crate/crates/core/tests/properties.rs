use std::f64::consts::PI;

use proptest::prelude::*;
use qdlab::domains::{self, DomainSpec};
use qdlab::dynamics::{critical_orbit_audit, find_fixed_points, model_map, random_rational, FixedClass};
use qdlab::heleshaw::{build_potential, chain, Source};
use qdlab::numerics::{c64, partial_fractions, Polynomial, PrincipalPart, RationalFunction, C64};
use qdlab::quadcheck::{admissible, lhs_area_integral, rhs_quadrature, TestFunction};
use qdlab::topology::{check_ovals_bound, check_theorem_a, extract_ovals, topology_report, QdKind};
use qdlab::transforms::{cauchy_disc, cauchy_raster, fill_polylines, Grid, RasterDroplet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| c64(a, b))
}

fn polar(r_lo: f64, r_hi: f64) -> impl Strategy<Value = C64> {
    (r_lo..r_hi, 0.0..2.0 * PI).prop_map(|(r, t)| C64::from_polar(r, t))
}

fn rational(d: usize) -> impl Strategy<Value = RationalFunction> {
    (prop::collection::vec(complex(1.0), d + 1), prop::collection::vec(complex(1.0), d + 1))
        .prop_filter_map("degenerate", move |(n, m)| {
            RationalFunction::new(Polynomial::new(n), Polynomial::new(m)).ok().filter(|f| f.degree() == d)
        })
}

fn seeded_map(d: usize, seed: u64) -> RationalFunction {
    random_rational(d, &mut ChaCha8Rng::seed_from_u64(seed))
}

// ---- numerics ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn critical_multiplicity_is_2d_minus_2(r in (2usize..=4).prop_flat_map(rational)) {
        let total: usize = r.critical_points().unwrap().iter().map(|c| c.1).sum();
        prop_assert_eq!(total, 2 * r.degree() - 2);
    }

    #[test]
    fn partial_fractions_roundtrip(
        poles in prop::collection::vec((complex(1.0), prop::collection::vec(complex(1.0), 1..=3)), 1..=3),
        poly in prop::collection::vec(complex(1.0), 0..=3),
        probe in complex(2.0),
    ) {
        for (i, a) in poles.iter().enumerate() {
            for b in &poles[i + 1..] {
                prop_assume!((a.0 - b.0).norm() > 0.2);
            }
            prop_assume!((a.0 - probe).norm() > 0.2);
        }
        let parts: Vec<PrincipalPart> = poles.iter().map(|(p, c)| PrincipalPart { pole: *p, coeffs: c.clone() }).collect();
        let r = RationalFunction::from_parts(&Polynomial::new(poly), &parts);
        let back = partial_fractions(&r).unwrap().to_rational();
        let (a, b) = (r.value(probe), back.value(probe));
        prop_assert!((a - b).norm() <= 1e-10 * a.norm().max(1.0), "{} vs {}", a, b);
    }

    #[test]
    fn second_derivative_matches_differences(r in (1usize..=3).prop_flat_map(rational), z in complex(1.5)) {
        prop_assume!(r.poles().iter().all(|p| (p.0 - z).norm() > 0.3));
        let (d1, d2) = (r.derivative(), r.nth_derivative(2));
        let s = 1e-5;
        let fd = (d1.value(z + s) - d1.value(z - s)) / (2.0 * s);
        let exact = d2.value(z);
        prop_assert!((fd - exact).norm() <= 1e-6 * (exact.norm() + d1.value(z).norm()).max(1.0), "{} vs {}", fd, exact);
    }
}

// ---- domains ----

fn limacon() -> impl Strategy<Value = DomainSpec> {
    polar(0.0, 0.45).prop_map(|beta| DomainSpec::Limacon { alpha: c64(1.0, 0.0), beta })
}

fn neumann() -> impl Strategy<Value = DomainSpec> {
    (0.5..1.5f64, polar(0.05, 0.6)).prop_map(|(a, b)| DomainSpec::NeumannOval { a: c64(a, 0.0), b })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schwarz_function_reflects_the_boundary(spec in prop_oneof![limacon(), neumann()]) {
        let b = domains::boundary(&spec, 256).unwrap();
        for z in b.all_points() {
            let s = domains::schwarz_eval(&spec, z).unwrap();
            prop_assert!((s - z.conj()).norm() <= 1e-6, "{}: {}", spec.name(), (s - z.conj()).norm());
        }
    }

    #[test]
    fn disc_schwarz_function_is_exact(center in complex(2.0), radius in 0.1..3.0f64, outside in prop::bool::ANY) {
        let spec = if outside { DomainSpec::ExteriorDisc { center, radius } } else { DomainSpec::Disc { center, radius } };
        for z in domains::boundary(&spec, 64).unwrap().all_points() {
            prop_assert!((domains::schwarz_eval(&spec, z).unwrap() - z.conj()).norm() <= 1e-9);
        }
    }

    #[test]
    fn area_matches_the_raster(spec in prop_oneof![limacon(), neumann()]) {
        let h = 1.0 / 64.0;
        let b = domains::boundary(&spec, 1024).unwrap();
        let curves: Vec<Vec<C64>> = b.curves.iter().map(|c| c.points.clone()).collect();
        let pts = &curves[0];
        let (lo, hi) = pts.iter().fold((pts[0], pts[0]), |(lo, hi), z| {
            (c64(lo.re.min(z.re), lo.im.min(z.im)), c64(hi.re.max(z.re), hi.im.max(z.im)))
        });
        let grid = Grid::covering(lo - c64(4.0 * h, 4.0 * h), hi + c64(4.0 * h, 4.0 * h), h);
        let raster = fill_polylines(grid, &curves);
        let perimeter: f64 = pts.windows(2).map(|w| (w[1] - w[0]).norm()).sum();
        let a = domains::area(&spec).unwrap();
        prop_assert!((a - raster.area()).abs() <= 3.0 * h * perimeter, "{} vs {}", a, raster.area());
    }
}

// ---- transforms ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn raster_cauchy_transform_approaches_the_disc(a in complex(0.3), rho in 0.3..0.8f64, dir in polar(1.0, 1.0001), gap in 0.1..1.0f64) {
        let h = 1.0 / 64.0;
        let k = RasterDroplet::from_fn(Grid::centered(a, rho + 4.0 * h, h), |z| (z - a).norm() <= rho);
        let z = a + (rho + gap) * dir;
        let err = (cauchy_raster(&k, z) - cauchy_disc(a, rho, z)).norm();
        prop_assert!(err <= 10.0 * h, "{}", err);
    }
}

// ---- quadcheck ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identity_is_linear(center in complex(1.0), radius in 0.2..1.5f64, coef in prop::collection::vec(complex(2.0), 4), w in polar(1.5, 3.0)) {
        let spec = DomainSpec::Disc { center, radius };
        let qd = domains::quadrature_data(&spec).unwrap();
        let members = [
            TestFunction::Monomial(0),
            TestFunction::Monomial(1),
            TestFunction::Monomial(2),
            TestFunction::Cauchy(center + radius * w),
        ];
        let mut combo = RationalFunction::from_poly(Polynomial::zero());
        let mut budget = 1e-10;
        for (f, c) in members.iter().zip(&coef) {
            combo = combo.add(&f.to_rational().scale(*c));
            budget += c.norm() * (lhs_area_integral(&spec, f).unwrap() - rhs_quadrature(&qd, f)).norm();
        }
        let f = TestFunction::Rational(combo);
        let err = (lhs_area_integral(&spec, &f).unwrap() - rhs_quadrature(&qd, &f)).norm();
        prop_assert!(err <= budget + 1e-9 * (1.0 + center.norm() + radius).powi(3), "{} > {}", err, budget);
    }

    #[test]
    fn unbounded_domains_reject_constants(center in complex(1.0), a in 0.3..2.0f64, b in 0.3..2.0f64) {
        for spec in [DomainSpec::ExteriorDisc { center, radius: a }, DomainSpec::EllipseExterior { center, a, b }] {
            prop_assert!(admissible(&spec, &TestFunction::Monomial(0)).is_err());
            prop_assert!(admissible(&spec, &TestFunction::Cauchy(center)).is_ok());
        }
    }
}

// ---- dynamics ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fatou_counts(d in 2usize..=5, seed in any::<u64>()) {
        let r = seeded_map(d, seed);
        let audit = critical_orbit_audit(&r, 2000).unwrap();
        prop_assert_eq!(audit.critical_multiplicity, 2 * d - 2);
        prop_assert!(audit.attracting <= 2 * d - 2);
        let attracting = find_fixed_points(&r).unwrap().iter().filter(|f| f.class == FixedClass::Attracting).count();
        prop_assert_eq!(attracting, audit.attracting);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn model_degrees_recover_nu(nu in prop::collection::vec(1usize..=3, 1..=3)) {
        let mm = model_map(&nu).unwrap();
        let mut want = nu.clone();
        want.sort_unstable();
        prop_assert_eq!(mm.sorted_degrees(), want);
        prop_assert_eq!(mm.connectivity, nu.len());
    }
}

// ---- heleshaw ----

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn chains_are_monotone_and_keep_the_area_law(r in 0.6..1.0f64, f1 in 0.15..0.45f64, f2 in 0.55..0.95f64) {
        let h = 1.0 / 48.0;
        let k0 = RasterDroplet::from_fn(Grid::centered(c64(0.0, 0.0), r + 4.0 * h, h), |z| z.norm() <= r);
        let p = build_potential(&RationalFunction::from_poly(Polynomial::zero()), &k0).unwrap();
        let t0 = p.t0();
        let rec = chain(&p, &p.k0, &[f1 * t0, f2 * t0], Source::Infinity).unwrap();
        prop_assert!(rec.droplets[0].is_subset_of(&rec.droplets[1]));
        for (k, t) in rec.droplets.iter().zip(&rec.times) {
            prop_assert!((k.area() - PI * t).abs() <= 4.0 * h * k.perimeter());
        }
    }
}

// ---- topology ----

/// Disjoint annuli (inner radius 0 gives a disc) on a common grid.
fn annuli() -> impl Strategy<Value = Vec<(C64, f64, f64)>> {
    prop::collection::vec((complex(1.0), 0.15..0.4f64, 0.0..0.7f64), 1..=4).prop_map(|v| {
        let mut out: Vec<(C64, f64, f64)> = Vec::new();
        for (c, r, frac) in v {
            if out.iter().all(|&(d, s, _)| (c - d).norm() > r + s + 0.1) {
                out.push((c, r, if frac < 0.2 { 0.0 } else { frac * r }));
            }
        }
        out
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ovals_count_complement_connectivity(rings in annuli()) {
        let k = RasterDroplet::from_fn(Grid::centered(c64(0.0, 0.0), 1.5, 1.0 / 48.0), |z| {
            rings.iter().any(|&(c, r, inner)| {
                let d = (z - c).norm();
                d <= r && d >= inner
            })
        });
        let report = topology_report(&k).unwrap();
        let ovals = extract_ovals(&k).unwrap();
        let sum: usize = report.q_hist.iter().map(|(j, q)| j * q).sum();
        prop_assert_eq!(report.ovals, ovals.len());
        prop_assert_eq!(report.ovals, sum);
        let holes = rings.iter().filter(|r| r.2 > 0.0).count();
        prop_assert_eq!(report.ovals, rings.len() + holes);
        prop_assert_eq!(report.k_components, rings.len());
        // The oval inequality only gets easier as d grows.
        let lo = check_ovals_bound(&report, 1);
        prop_assert!(!lo.pass || check_ovals_bound(&report, 2).pass);
    }

    #[test]
    fn connectivity_bounds_are_monotone(d in 0usize..8, n in 1usize..9, conn in 1usize..12, kind in 0usize..4) {
        prop_assume!(n <= d + 1 && d > 0);
        let kind = [QdKind::Uqd, QdKind::UqdNodeAtInfinity, QdKind::Bqd, QdKind::BqdNoTripleNodes][kind];
        let v = check_theorem_a(d, n, kind, conn).unwrap();
        prop_assert_eq!(v.pass, conn as i64 <= v.bound);
        if v.pass && conn > 1 {
            prop_assert!(check_theorem_a(d, n, kind, conn - 1).unwrap().pass);
        }
        prop_assert!(check_theorem_a(d, n, kind, 1).unwrap().pass);
    }
}
