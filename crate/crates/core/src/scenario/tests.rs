use super::*;
use crate::domains::winding_number;
use crate::topology::{label_components, Connectivity};

fn shoelace(p: &[C64]) -> f64 {
    (0..p.len()).map(|k| (p[k].conj() * p[(k + 1) % p.len()]).im).sum::<f64>() / 2.0
}

#[test]
fn packing_discs_are_tangent_and_disjoint() {
    let discs = apollonian_packing(9);
    assert_eq!(discs.len(), 9);
    let mut tangencies = 0;
    for (i, a) in discs.iter().enumerate() {
        assert!(a.center.norm() + a.radius <= 1.0 + 1e-12);
        if (a.center.norm() + a.radius - 1.0).abs() < 1e-9 {
            tangencies += 1;
        }
        for b in &discs[i + 1..] {
            let gap = (a.center - b.center).norm() - a.radius - b.radius;
            assert!(gap > -1e-12);
            if gap.abs() < 1e-9 {
                tangencies += 1;
            }
        }
    }
    // Each Descartes insertion adds three contacts to the initial six.
    assert_eq!(tangencies, 6 + 3 * 6);
}

#[test]
fn hypotrochoid_area_is_pi_t() {
    for t in [0.01, 0.03, DELTOID_MASS] {
        let a = hypotrochoid_alpha(t).unwrap();
        assert!((shoelace(&hypotrochoid(a, 20000)) - PI * t).abs() < 1e-6);
    }
    assert!((hypotrochoid_alpha(DELTOID_MASS).unwrap() - 1.0 / 3.0).abs() < 1e-7);
    assert!(hypotrochoid_alpha(0.06).is_none());
}

#[test]
fn cardioid_touches_the_ellipse_from_inside() {
    let e = cardioid_ellipse(CARDIOID_CONTACT);
    assert!((e.center.re - 0.3224).abs() < 1e-3 && (e.b - 1.4226).abs() < 1e-3);
    let mut min_gap = f64::INFINITY;
    for k in 0..4000 {
        let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / 4000.0);
        let z = w + w * w / 2.0;
        let d = z - e.center;
        let s = ((d.re / e.a).powi(2) + (d.im / e.b).powi(2)).sqrt();
        assert!(s <= 1.0 + 1e-9, "{z}");
        min_gap = min_gap.min(1.0 - s);
    }
    assert!(min_gap.abs() < 1e-6);
    // The tight ellipse through the highest points degenerates to a = 5/4.
    assert!((cardioid_ellipse(PI / 3.0).a - 1.25).abs() < 1e-9);
    assert!(in_cardioid(c64(0.5, 0.0)) && !in_cardioid(c64(-0.6, 0.0)) && !in_cardioid(c64(1.2, 1.0)));
}

#[test]
fn setups_have_expected_components() {
    let s = cardioid_in_ellipse(1.0 / 128.0);
    assert_eq!(s.h.degree(), 3);
    assert_eq!(label_components(&s.k0, Connectivity::Four).count, 3);
    let packing = packing_setup(9, 1.0 / 256.0);
    assert_eq!(label_components(&packing.k0, Connectivity::Four).count, 16);
    let two = two_disc_droplet(0.8, 1.0 / 64.0);
    assert!((two.k0.area() - 0.8 * PI).abs() < 0.02);
    let d = cubic_setup(1.0 / 128.0);
    assert!((d.k0.area() - PI / 18.0).abs() < 0.01);
    assert_eq!(winding_number(&hypotrochoid(1.0 / 3.0, 300), c64(0.0, 0.0)), 1);
}

#[test]
fn order_two_setups() {
    for (name, s, conn) in sharp_uqd_order2(1.0 / 64.0) {
        assert_eq!(s.h.degree(), 2, "{name}");
        // Interior components of the localization equal the target connectivity.
        assert_eq!(label_components(&s.k0, Connectivity::Four).count, conn, "{name}");
    }
}
