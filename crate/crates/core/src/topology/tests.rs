use super::*;
use crate::transforms::Grid;

fn disc(h: f64) -> RasterDroplet {
    RasterDroplet::from_fn(Grid::centered(c64(0.0, 0.0), 1.3, h), |z| z.norm() < 1.0)
}

#[test]
fn disc_has_one_oval() {
    let r = topology_report(&disc(0.05)).unwrap();
    assert_eq!(r.ovals, 1);
    assert_eq!(r.q, 1);
    assert_eq!(r.q_j(1), 1);
    assert_eq!(r.k_components, 1);
    assert_eq!(r.tree_code, "(())");
}

#[test]
fn oval_orientation_keeps_k_on_the_left() {
    let ov = extract_ovals(&disc(0.05)).unwrap();
    assert_eq!(winding_number(&ov[0].points, c64(0.0, 0.0)), 1);
    let b = component_boundary(&disc(0.05), complement_components(&disc(0.05)).unbounded);
    assert_eq!(winding_number(&b[0], c64(0.0, 0.0)), -1);
}

#[test]
fn annulus_connectivity() {
    let k = RasterDroplet::from_fn(Grid::centered(c64(0.0, 0.0), 1.3, 0.04), |z| {
        (0.5..1.0).contains(&z.norm())
    });
    let r = topology_report(&k).unwrap();
    assert_eq!(r.ovals, 2);
    assert_eq!(r.q, 2);
    assert_eq!(r.q_j(1), 2);
}

#[test]
fn diagonal_cells_do_not_pinch() {
    // Two K cells touching at a corner are separate 4-components.
    let g = Grid::new(c64(0.0, 0.0), 1.0, 4, 4);
    let mut k = RasterDroplet::empty(g);
    k.set(1, 1, true);
    k.set(2, 2, true);
    let r = topology_report(&k).unwrap();
    assert_eq!(r.ovals, 2);
    assert_eq!(r.k_components, 2);
    assert_eq!(r.q, 1);
}

#[test]
fn diagonal_hole_pinches() {
    // Complement cells touching diagonally inside K form one 8-component whose boundary
    // passes twice through the saddle.
    let g = Grid::new(c64(0.0, 0.0), 1.0, 6, 6);
    let mut k = RasterDroplet::empty(g);
    for i in 1..5 {
        for j in 1..5 {
            k.set(i, j, true);
        }
    }
    k.set(2, 2, false);
    k.set(3, 3, false);
    assert!(matches!(extract_ovals(&k), Err(TopologyError::PinchDetected { .. })));
}

#[test]
fn concentric_fixtures() {
    let r4 = topology_report(&concentric_circles(4, 0.02, 1.0)).unwrap();
    assert_eq!((r4.ovals, r4.q, r4.q_j(1), r4.q_j(2), r4.q_odd), (4, 3, 2, 1, 2));
    let v = check_ovals_bound(&r4, 4);
    assert_eq!((v.lhs, v.rhs), (10, 10));
    let r5 = topology_report(&concentric_circles(5, 0.02, 1.0)).unwrap();
    assert_eq!((r5.ovals, r5.q, r5.q_j(1), r5.q_j(2), r5.q_odd), (5, 3, 1, 2, 1));
    let v = check_ovals_bound(&r5, 6);
    assert_eq!((v.lhs, v.rhs), (14, 14));
    assert!(v.pass);
}

#[test]
fn theorem_bounds() {
    let v = check_theorem_a(3, 3, QdKind::Uqd, 4).unwrap();
    assert_eq!((v.bound, v.pass), (4, true));
    let v = check_theorem_a(3, 1, QdKind::Bqd, 2).unwrap();
    assert_eq!(v.bound, 2);
    let v = check_theorem_a(3, 1, QdKind::BqdNoTripleNodes, 2).unwrap();
    assert_eq!(v.bound, 1);
    let v = check_theorem_a(1, 1, QdKind::Uqd, 2).unwrap();
    assert_eq!((v.bound, v.pass, v.binding.as_str()), (1, false, "simply-connected"));
    assert!(check_theorem_a(2, 0, QdKind::Uqd, 1).is_err());
}

#[test]
fn packing_bounds() {
    let p = packing_check(Packing::DiscsInDisc(9), 16);
    assert!(p.pass && p.equality);
    let p = packing_check(Packing::CardioidsInEllipse(1), 3);
    assert!(p.pass && p.equality);
    assert_eq!((p.d, p.n), (3, 2));
}

#[test]
fn corners_of_square_and_disc() {
    let g = Grid::centered(c64(0.0, 0.0), 1.3, 0.02);
    let sq = RasterDroplet::from_fn(g, |z| z.re.abs() < 0.7 && z.im.abs() < 0.7);
    let o = extract_ovals(&sq).unwrap();
    assert_eq!(curvature_peaks(&o[0].points, 6, 1.0).len(), 4);
    let o = extract_ovals(&disc(0.02)).unwrap();
    assert!(curvature_peaks(&o[0].points, 6, 1.0).is_empty());
}
