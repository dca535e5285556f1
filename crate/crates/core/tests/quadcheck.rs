use std::f64::consts::PI;

use qdlab::domains::{boundary, quadrature_data, DomainSpec};
use qdlab::numerics::{c64, Polynomial, RationalFunction};
use qdlab::quadcheck::*;

fn poly3() -> DomainSpec {
    let k = 2.0 * 2f64.sqrt() / 3.0;
    DomainSpec::RiemannMap {
        phi: RationalFunction::from_poly(Polynomial::new(vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(-k, 0.0), c64(1.0 / 3.0, 0.0)])),
        unbounded: false,
    }
}

#[test]
fn disc_battery() {
    for (a, rho) in [(c64(0.0, 0.0), 1.0), (c64(2.0, 1.0), 0.7)] {
        let spec = DomainSpec::Disc { center: a, radius: rho };
        let qd = quadrature_data(&spec).unwrap();
        let ws = [a + 1.5 * rho, a + c64(0.0, -2.0 * rho), a + c64(-1.2, 1.3) * rho];
        let mut battery = vec![TestFunction::Monomial(0), TestFunction::Monomial(1), TestFunction::Monomial(2)];
        battery.extend(ws.iter().map(|&w| TestFunction::Cauchy(w)));
        let rep = check_identity(&spec, &qd, &battery).unwrap();
        assert!(rep.max_error <= 1e-8, "{rep:?}");
    }
    let spec = DomainSpec::Disc { center: c64(0.0, 0.0), radius: 1.0 };
    assert!((lhs_area_integral(&spec, &TestFunction::Monomial(0)).unwrap() - c64(PI, 0.0)).norm() < 1e-12);
    let w = c64(3.0, 1.0);
    let qd = quadrature_data(&spec).unwrap();
    assert!((rhs_quadrature(&qd, &TestFunction::Cauchy(w)) - PI / (-w)).norm() < 1e-14);
}

#[test]
fn cardioid_battery() {
    let spec = DomainSpec::Cardioid { scale: 1.0 };
    let qd = quadrature_data(&spec).unwrap();
    for j in 0..=5 {
        let want = match j {
            0 => 1.5 * PI,
            1 => 0.5 * PI,
            _ => 0.0,
        };
        let l = lhs_area_integral(&spec, &TestFunction::Monomial(j)).unwrap();
        assert!((l - c64(want, 0.0)).norm() <= 1e-7, "j={j} {l}");
    }
    let battery: Vec<TestFunction> = (0..=5).map(TestFunction::Monomial).collect();
    assert!(check_identity(&spec, &qd, &battery).unwrap().max_error <= 1e-7);
}

#[test]
fn poly3_self_consistency() {
    let spec = poly3();
    let qd = quadrature_data(&spec).unwrap();
    let battery: Vec<TestFunction> = (0..=6).map(TestFunction::Monomial).collect();
    let rep = check_identity(&spec, &qd, &battery).unwrap();
    assert!(rep.max_error <= 1e-6, "{rep:?}");
}

#[test]
fn unbounded_domains() {
    let a = c64(0.3, -0.4);
    let spec = DomainSpec::ExteriorDisc { center: a, radius: 1.0 };
    assert!(matches!(
        lhs_area_integral(&spec, &TestFunction::Monomial(0)),
        Err(QuadError::InadmissibleTest { .. })
    ));
    let qd = quadrature_data(&spec).unwrap();
    let b = a + c64(0.2, 0.1);
    let f = TestFunction::Cauchy(b);
    // (1/2i)∮ f·(ā + 1/(z−a)) dz around the clockwise circle: −π ā.
    let l = lhs_area_integral(&spec, &f).unwrap();
    assert!((l + PI * a.conj()).norm() < 1e-10, "{l}");
    assert!((rhs_quadrature(&qd, &f) - l).norm() < 1e-10);
    let battery = vec![
        TestFunction::Cauchy(b),
        TestFunction::Cauchy(a),
        TestFunction::Rational(RationalFunction::new(Polynomial::one(), &Polynomial::linear(a) * &Polynomial::linear(b)).unwrap()),
    ];
    assert!(check_identity(&spec, &qd, &battery).unwrap().max_error < 1e-9);
    let ell = DomainSpec::EllipseExterior { center: c64(0.0, 0.0), a: 2.0, b: 1.0 };
    let qd = quadrature_data(&ell).unwrap();
    let battery: Vec<TestFunction> = [c64(0.1, 0.0), c64(0.5, 0.3), c64(-1.0, 0.2)].map(TestFunction::Cauchy).into();
    assert!(check_identity(&ell, &qd, &battery).unwrap().max_error < 1e-8);
}

#[test]
fn presets_pass() {
    let specs = [
        DomainSpec::Limacon { alpha: c64(1.0, 0.0), beta: c64(0.3, 0.1) },
        DomainSpec::NeumannOval { a: c64(1.0, 0.0), b: c64(0.4, 0.0) },
        DomainSpec::JoukowskyAirfoilExterior { c: c64(-0.1, 0.05) },
    ];
    for spec in specs {
        let qd = quadrature_data(&spec).unwrap();
        let far = c64(100.0, 0.0);
        let battery: Vec<TestFunction> = if spec.is_unbounded() {
            // Kernel poles midway between the upper and lower surfaces, i.e. inside the airfoil.
            let pts: Vec<_> = boundary(&spec, 64).unwrap().all_points().collect();
            [8, 20, 28].map(|k| TestFunction::Cauchy(0.5 * (pts[k] + pts[64 - k]))).into()
        } else {
            let mut b: Vec<TestFunction> = (0..4).map(TestFunction::Monomial).collect();
            b.push(TestFunction::Cauchy(far));
            b
        };
        let rep = check_identity(&spec, &qd, &battery).unwrap();
        assert!(rep.max_error <= 1e-6, "{} {rep:?}", spec.name());
    }
}
