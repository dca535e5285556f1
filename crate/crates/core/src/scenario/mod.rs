//! Geometric setups for droplet scenarios: disc complements and packings, the cubic-potential
//! hypotrochoid family, and a cardioid inscribed in an ellipse.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::heleshaw::droplet_from_coincidence;
use crate::numerics::{c64, pair, Polynomial, PrincipalPart, RationalFunction, C64};
use crate::topology::{label_components, Connectivity};
use crate::transforms::{fill_polylines, Grid, RasterDroplet};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Disc {
    #[serde(with = "pair")]
    pub center: C64,
    pub radius: f64,
}

impl Disc {
    pub fn new(center: C64, radius: f64) -> Self {
        Disc { center, radius }
    }

    pub fn curvature(&self) -> f64 {
        1.0 / self.radius
    }
}

/// A droplet K0 together with its quadrature function h.
#[derive(Clone, Debug)]
pub struct Setup {
    pub h: RationalFunction,
    pub k0: RasterDroplet,
}

/// Smallest raster component kept in a localization (a 4×4 block).
pub const MIN_COMPONENT_CELLS: usize = 16;

/// Raster localization of a closed set: 2×2 opening, then components of fewer than
/// MIN_COMPONENT_CELLS cells dropped. Near tangential contacts the raw raster breaks into
/// isolated cells and blobs that no longer belong to any resolved component.
pub fn clean_localization(raw: &RasterDroplet) -> RasterDroplet {
    let mut k = droplet_from_coincidence(raw);
    let l = label_components(&k, Connectivity::Four);
    for (cell, label) in k.mask.iter_mut().zip(&l.labels) {
        if label.is_some_and(|c| l.sizes[c] < MIN_COMPONENT_CELLS) {
            *cell = false;
        }
    }
    k
}

/// Σ ρ²/(z − a) over the removed discs.
pub fn disc_holes_function(holes: &[Disc]) -> RationalFunction {
    let parts: Vec<PrincipalPart> = holes
        .iter()
        .map(|d| PrincipalPart { pole: d.center, coeffs: vec![c64(d.radius * d.radius, 0.0)] })
        .collect();
    RationalFunction::from_parts(&Polynomial::zero(), &parts)
}

/// Closed outer disc minus the open holes, on a grid with a 10% margin.
pub fn disc_complement(outer: Disc, holes: &[Disc], h: f64) -> Setup {
    let grid = Grid::centered(outer.center, 1.1 * outer.radius, h);
    let k0 = clean_localization(&RasterDroplet::from_fn(grid, |z| {
        (z - outer.center).norm() <= outer.radius && holes.iter().all(|d| (z - d.center).norm() >= d.radius)
    }));
    Setup { h: disc_holes_function(holes), k0 }
}

pub const TWO_DISC_HOLES: [(f64, f64, f64); 2] = [(-0.4, 0.0, 0.2), (0.0, 0.45, 0.15)];

pub fn two_disc_holes() -> Vec<Disc> {
    TWO_DISC_HOLES.iter().map(|&(x, y, r)| Disc::new(c64(x, y), r)).collect()
}

/// Droplet of mass t for h = Σ ρ²/(z − a): the disc B(0, √(t + Σρ²)) minus the holes.
pub fn two_disc_droplet(t: f64, h: f64) -> Setup {
    let holes = two_disc_holes();
    let r2 = t + holes.iter().map(|d| d.radius * d.radius).sum::<f64>();
    disc_complement(Disc::new(c64(0.0, 0.0), r2.sqrt()), &holes, h)
}

/// h = 1.5 z², i.e. Q = |z|² − Re z³.
pub fn cubic_function() -> RationalFunction {
    RationalFunction::from_poly(Polynomial::new(vec![c64(0.0, 0.0), c64(0.0, 0.0), c64(1.5, 0.0)]))
}

/// Parameter α of the droplet of mass t, on the branch ending at the deltoid α = 1/3.
pub fn hypotrochoid_alpha(t: f64) -> Option<f64> {
    let disc = 1.0 - 18.0 * t;
    (t > 0.0 && disc >= -1e-15).then(|| ((1.0 - disc.max(0.0).sqrt()) / 9.0).sqrt())
}

/// Deltoid mass 1/18.
pub const DELTOID_MASS: f64 = 1.0 / 18.0;

/// Boundary of the cubic droplet αe^{iθ} + 1.5α² e^{−2iθ}, counter-clockwise, n samples.
pub fn hypotrochoid(alpha: f64, n: usize) -> Vec<C64> {
    let beta = 1.5 * alpha * alpha;
    (0..n)
        .map(|k| {
            let w = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            alpha * w + beta / (w * w)
        })
        .collect()
}

/// Raster of the cubic droplet of mass t on the grid centered at 0 with half-width 0.55.
pub fn cubic_droplet(t: f64, h: f64) -> Option<RasterDroplet> {
    let alpha = hypotrochoid_alpha(t)?;
    Some(fill_polylines(Grid::centered(c64(0.0, 0.0), 0.55, h), &[hypotrochoid(alpha, 4096)]))
}

/// Deltoid localization of the cubic potential.
pub fn cubic_setup(h: f64) -> Setup {
    let raw = cubic_droplet(DELTOID_MASS, h).expect("deltoid mass is admissible");
    Setup { h: cubic_function(), k0: clean_localization(&raw) }
}

/// Circle tangent to three mutually tangent circles (signed curvatures, the outer one
/// negative), inside the curvilinear triangle they bound.
pub fn descartes_inner(c: [(C64, f64); 3]) -> Disc {
    let [(z1, k1), (z2, k2), (z3, k3)] = c;
    let k4 = k1 + k2 + k3 + 2.0 * (k1 * k2 + k2 * k3 + k3 * k1).max(0.0).sqrt();
    let s = k1 * z1 + k2 * z2 + k3 * z3;
    let root = (k1 * k2 * z1 * z2 + k2 * k3 * z2 * z3 + k3 * k1 * z3 * z1).sqrt();
    let r4 = 1.0 / k4;
    let err = |z: C64| {
        c.iter()
            .map(|&(zi, ki)| {
                let want = if ki < 0.0 { -1.0 / ki - r4 } else { 1.0 / ki + r4 };
                ((z - zi).norm() - want).abs()
            })
            .sum::<f64>()
    };
    let (za, zb) = ((s + 2.0 * root) / k4, (s - 2.0 * root) / k4);
    Disc::new(if err(za) <= err(zb) { za } else { zb }, r4)
}

/// Apollonian packing of the unit disc with m inner discs: three equal discs, then repeated
/// Descartes insertions into the gap admitting the largest disc (first such gap on ties).
/// Gives 2m − 2 gaps; m ≥ 3.
pub fn apollonian_packing(m: usize) -> Vec<Disc> {
    assert!(m >= 3, "packing starts from three discs");
    let r = 2.0 * 3f64.sqrt() - 3.0;
    let mut discs: Vec<(C64, f64)> = vec![(c64(0.0, 0.0), -1.0)];
    for k in 0..3 {
        let a = PI / 2.0 + 2.0 * PI * k as f64 / 3.0;
        discs.push((C64::from_polar(1.0 - r, a), 1.0 / r));
    }
    let mut gaps: Vec<[usize; 3]> = vec![[1, 2, 3], [0, 1, 2], [0, 2, 3], [0, 1, 3]];
    while discs.len() - 1 < m {
        let cands: Vec<Disc> = gaps.iter().map(|g| descartes_inner(g.map(|i| discs[i]))).collect();
        let mut best = 0;
        for (i, c) in cands.iter().enumerate() {
            if c.radius > cands[best].radius * (1.0 + 1e-9) {
                best = i;
            }
        }
        let [a, b, c] = gaps.remove(best);
        let new = discs.len();
        discs.push((cands[best].center, cands[best].curvature()));
        gaps.splice(best..best, [[a, b, new], [a, c, new], [b, c, new]]);
    }
    discs[1..].iter().map(|&(z, k)| Disc::new(z, 1.0 / k)).collect()
}

/// Unit disc minus an m-disc Apollonian packing.
pub fn packing_setup(m: usize, h: f64) -> Setup {
    disc_complement(Disc::new(c64(0.0, 0.0), 1.0), &apollonian_packing(m), h)
}

/// Axis-parallel ellipse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ellipse {
    #[serde(with = "pair")]
    pub center: C64,
    pub a: f64,
    pub b: f64,
}

impl Ellipse {
    pub fn contains(&self, z: C64) -> bool {
        let d = z - self.center;
        (d.re / self.a).powi(2) + (d.im / self.b).powi(2) <= 1.0
    }

    /// Holomorphic part of the Schwarz function: conj(center) + κ(z − center), κ = (a−b)/(a+b).
    pub fn schwarz_linear(&self) -> Polynomial {
        let kappa = (self.a - self.b) / (self.a + self.b);
        Polynomial::new(vec![self.center.conj() - kappa * self.center, c64(kappa, 0.0)])
    }
}

/// Axis-parallel ellipse containing the cardioid w + w²/2 and touching it at its rightmost
/// point 3/2 and at the symmetric pair of points w = e^{±iθ}, for θ ∈ (π/3, 2π/3).
pub fn cardioid_ellipse(theta: f64) -> Ellipse {
    let w = C64::from_polar(1.0, theta);
    let p = w + w * w / 2.0;
    let tan = C64::new(0.0, 1.0) * w * (1.0 + w);
    // With u = p.x − c and a = 3/2 − c, tangency at p reduces to u(u − p.y t.x/t.y) = a².
    let k = 1.5 - p.re;
    let u = k * k / (-p.im * tan.re / tan.im - 2.0 * k);
    let c = p.re - u;
    let a = 1.5 - c;
    let b = (-p.im * a * a * tan.im / (u * tan.re)).sqrt();
    Ellipse { center: c64(c, 0.0), a, b }
}

/// Contact angle used for the inscribed-cardioid scenario.
pub const CARDIOID_CONTACT: f64 = 5.0 * PI / 9.0;

/// Inside of the cardioid w + w²/2 (image of the closed unit disc).
fn in_cardioid(z: C64) -> bool {
    // z = w + w²/2 ⇔ (w + 1)² = 2z + 1; the univalent branch has |w| ≤ 1 with w = √(2z+1) − 1
    // for the principal root.
    let w = (2.0 * z + 1.0).sqrt() - 1.0;
    w.norm() < 1.0
}

/// Closed ellipse minus the open cardioid; h = conj(z0) + κ(z − z0) + 3/(2z) + 1/(2z²).
pub fn cardioid_in_ellipse(h: f64) -> Setup {
    let e = cardioid_ellipse(CARDIOID_CONTACT);
    let grid = Grid::centered(e.center, 1.1 * e.a.max(e.b), h);
    let k0 = clean_localization(&RasterDroplet::from_fn(grid, |z| e.contains(z) && !in_cardioid(z)));
    let part = PrincipalPart { pole: c64(0.0, 0.0), coeffs: vec![c64(1.5, 0.0), c64(0.5, 0.0)] };
    Setup { h: RationalFunction::from_parts(&e.schwarz_linear(), &[part]), k0 }
}

/// Closed disc B(1/2, √2) minus the open cardioid; the circle touches the cardioid at
/// −1/2 ± i. h = 1/2 + 3/(2z) + 1/(2z²).
pub fn cardioid_in_disc(h: f64) -> Setup {
    let (c, r) = (c64(0.5, 0.0), 2f64.sqrt());
    let grid = Grid::centered(c, 1.1 * r, h);
    let k0 = clean_localization(&RasterDroplet::from_fn(grid, |z| (z - c).norm() <= r && !in_cardioid(z)));
    let part = PrincipalPart { pole: c64(0.0, 0.0), coeffs: vec![c64(1.5, 0.0), c64(0.5, 0.0)] };
    Setup { h: RationalFunction::from_parts(&Polynomial::constant(c.conj()), &[part]), k0 }
}

/// Closed ellipse x² + (y/0.6)² ≤ 1 minus the open disc B(0, 0.6) touching it at ±0.6i.
pub fn disc_in_ellipse(h: f64) -> Setup {
    let e = Ellipse { center: c64(0.0, 0.0), a: 1.0, b: 0.6 };
    let grid = Grid::centered(e.center, 1.1, h);
    let k0 = clean_localization(&RasterDroplet::from_fn(grid, |z| e.contains(z) && z.norm() >= e.b));
    let hole = disc_holes_function(&[Disc::new(e.center, e.b)]);
    Setup { h: hole.add(&RationalFunction::from_poly(e.schwarz_linear())), k0 }
}

/// Unit disc minus B(±1/2, 1/2).
pub fn tangent_discs(h: f64) -> Setup {
    let holes = [Disc::new(c64(-0.5, 0.0), 0.5), Disc::new(c64(0.5, 0.0), 0.5)];
    disc_complement(Disc::new(c64(0.0, 0.0), 1.0), &holes, h)
}

/// One droplet per case of unbounded quadrature domains of order 2: (i) one finite double
/// node, (ii) two finite simple nodes, (iii) a double node at ∞, (iv) one finite node and ∞.
/// Each entry carries the connectivity of the complement reached after perturbation.
pub fn sharp_uqd_order2(h: f64) -> Vec<(&'static str, Setup, usize)> {
    vec![
        ("i", cardioid_in_disc(h), 2),
        ("ii", tangent_discs(h), 2),
        ("iii", cubic_setup(h), 1),
        ("iv", disc_in_ellipse(h), 2),
    ]
}

#[cfg(test)]
mod tests;
