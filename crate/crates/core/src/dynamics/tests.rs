use rand::SeedableRng;

use super::*;

fn z2() -> RationalFunction {
    RationalFunction::from_poly(Polynomial::monomial(2))
}

#[test]
fn step_examples() {
    assert_eq!(antiholo_step(&z2(), c64(0.0, 2.0).into()), ExtComplex::Finite(c64(-4.0, 0.0)));
    assert_eq!(antiholo_step(&z2(), c64(0.0, 0.0).into()), ExtComplex::Finite(c64(0.0, 0.0)));
    let a = c64(0.3, 0.4);
    let r = RationalFunction::constant(a);
    assert_eq!(antiholo_step(&r, c64(5.0, 1.0).into()), ExtComplex::Finite(a.conj()));
    let fp = find_fixed_points(&r).unwrap();
    assert_eq!(fp.len(), 1);
    assert_eq!(fp[0].class, FixedClass::Attracting);
}

#[test]
fn fixed_points_of_square() {
    let fp = find_fixed_points(&z2()).unwrap();
    let finite: Vec<&FixedPointRecord> = fp.iter().filter(|f| !f.location.is_infinite()).collect();
    assert_eq!(finite.len(), 4);
    for want in [c64(0.0, 0.0), c64(1.0, 0.0), C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0), C64::from_polar(1.0, -2.0 * std::f64::consts::PI / 3.0)] {
        let f = finite.iter().find(|f| (f.location.finite().unwrap() - want).norm() < 1e-10).unwrap();
        let expect = if want.norm() < 0.5 { FixedClass::Attracting } else { FixedClass::Repelling };
        assert_eq!(f.class, expect);
    }
    assert!(fp.iter().any(|f| f.location.is_infinite() && f.class == FixedClass::Attracting));
}

#[test]
fn square_critical_orbits() {
    let a = critical_orbit_audit(&z2(), 10_000).unwrap();
    assert_eq!(a.critical_multiplicity, 2);
    assert_eq!(a.attracting, 2);
    assert!(a.passes());
}

#[test]
fn random_maps_audit() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for trial in 0..40 {
        let d = 2 + trial % 4;
        let r = random_rational(d, &mut rng);
        let a = critical_orbit_audit(&r, 10_000).unwrap();
        assert_eq!(a.critical_multiplicity, 2 * d - 2);
        assert!(a.attracting <= 2 * d - 2);
        assert!(a.passes(), "trial {trial}: {a:?}");
    }
}

#[test]
fn disc_reflection_orbits() {
    let spec = DomainSpec::Disc { center: c64(0.0, 0.0), radius: 1.0 };
    let o = schwarz_dynamics(&spec, &[c64(0.5, 0.0), c64(1.0, 0.0)], 10).unwrap();
    assert_eq!(o[0].verdict, OrbitVerdict::Escaped { step: 1 });
    assert_eq!(o[0].trajectory[1], ExtComplex::Finite(c64(2.0, 0.0)));
    assert_eq!(o[1].verdict, OrbitVerdict::Cycle { period: 1 });
    let card = DomainSpec::Cardioid { scale: 1.0 };
    let o = schwarz_dynamics(&card, &[c64(0.01, 0.01)], 10).unwrap();
    assert!(matches!(o[0].verdict, OrbitVerdict::Escaped { .. }));
}

#[test]
fn model_maps() {
    for nu in [vec![1], vec![1, 1], vec![2, 3], vec![1, 1, 1]] {
        let mm = model_map(&nu).unwrap();
        let mut want = nu.clone();
        want.sort_unstable();
        assert_eq!(mm.connectivity, nu.len(), "{nu:?}");
        assert_eq!(mm.sorted_degrees(), want, "{nu:?}");
        assert!(mm.max_on_v < mm.eps);
        let samples: Vec<C64> = mm.coarse.grid.map(|z| z).into_iter().step_by(97).collect();
        assert!(model_orbits_converge(&mm, &samples, 200), "{nu:?}");
    }
}
