//! Quadrature domains given by presets, univalent rational maps, or complement components of
//! raster droplets: boundaries, areas, Schwarz functions, quadrature data and moments.

mod map;

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use map::{reflect, ConformalMap, Inverter, SEED_COUNT};

use crate::numerics::{
    c64, factorial, pair, ExtComplex, NumericsError, Polynomial, QuadratureData, QuadratureNode, QuadratureTerm,
    RationalFunction, C64,
};
use crate::transforms::RasterDroplet;

/// Default number of boundary nodes for contour integrals.
pub const BOUNDARY_NODES: usize = 4096;
/// Extracted poles closer than this are reported as one node.
pub const NODE_MERGE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum DomainError {
    #[error("map has a pole at {pole} in the closed reference domain")]
    PoleOnDisc { pole: C64 },
    #[error("Newton inversion of the map failed at z = {z}")]
    InversionFailure { z: C64 },
    #[error("residue contour cannot separate pole {pole} (radius {radius:e})")]
    ResidueIllConditioned { pole: C64, radius: f64 },
    #[error("the origin lies in the closure of the domain")]
    OriginInDomain,
    #[error("map is not univalent (clearance {clearance:e})")]
    NotUnivalent { clearance: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation not available for this domain kind: {0}")]
    Unsupported(&'static str),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// A quadrature domain description. JSON: `{"kind": "...", params...}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DomainSpec {
    Disc {
        #[serde(with = "pair")]
        center: C64,
        radius: f64,
    },
    ExteriorDisc {
        #[serde(with = "pair")]
        center: C64,
        radius: f64,
    },
    /// Exterior of the ellipse with semi-axes `a` (along x) and `b` (along y).
    EllipseExterior {
        #[serde(with = "pair")]
        center: C64,
        a: f64,
        b: f64,
    },
    /// Image of the disc under scale·(w + w²/2).
    Cardioid { scale: f64 },
    /// Image of the disc under αw + βw²; univalent for |β| ≤ |α|/2.
    Limacon {
        #[serde(with = "pair")]
        alpha: C64,
        #[serde(with = "pair")]
        beta: C64,
    },
    /// Image of the disc under a·w/(1 − b·w²), |b| < 1: two simple nodes.
    NeumannOval {
        #[serde(with = "pair")]
        a: C64,
        #[serde(with = "pair")]
        b: C64,
    },
    /// Exterior of the Joukowsky image J(c + ρw), ρ = |1 − c|, J(ζ) = ζ + 1/ζ.
    JoukowskyAirfoilExterior {
        #[serde(with = "pair")]
        c: C64,
    },
    RiemannMap { phi: RationalFunction, unbounded: bool },
    /// Component `component` (a label from `topology::complement_components`) of the
    /// complement of a raster droplet.
    RasterComplement { droplet: Box<RasterDroplet>, component: usize },
}

impl DomainSpec {
    pub fn name(&self) -> &'static str {
        match self {
            DomainSpec::Disc { .. } => "disc",
            DomainSpec::ExteriorDisc { .. } => "exterior-disc",
            DomainSpec::EllipseExterior { .. } => "ellipse-exterior",
            DomainSpec::Cardioid { .. } => "cardioid",
            DomainSpec::Limacon { .. } => "limacon",
            DomainSpec::NeumannOval { .. } => "neumann-oval",
            DomainSpec::JoukowskyAirfoilExterior { .. } => "airfoil-exterior",
            DomainSpec::RiemannMap { .. } => "riemann-map",
            DomainSpec::RasterComplement { .. } => "raster-complement",
        }
    }

    pub fn is_unbounded(&self) -> bool {
        match self {
            DomainSpec::ExteriorDisc { .. }
            | DomainSpec::EllipseExterior { .. }
            | DomainSpec::JoukowskyAirfoilExterior { .. } => true,
            DomainSpec::RiemannMap { unbounded, .. } => *unbounded,
            DomainSpec::RasterComplement { droplet, component } => {
                crate::topology::complement_components(droplet).unbounded == *component
            }
            _ => false,
        }
    }

    /// The Riemann map of a map-based kind.
    pub fn conformal_map(&self) -> Result<ConformalMap, DomainError> {
        let poly = |c: Vec<C64>| RationalFunction::from_poly(Polynomial::new(c));
        let z0 = c64(0.0, 0.0);
        let (phi, unbounded) = match self {
            DomainSpec::Disc { center, radius } | DomainSpec::ExteriorDisc { center, radius } => {
                if !(*radius > 0.0) {
                    return Err(DomainError::InvalidParameter("radius must be positive".into()));
                }
                (poly(vec![*center, c64(*radius, 0.0)]), matches!(self, DomainSpec::ExteriorDisc { .. }))
            }
            DomainSpec::EllipseExterior { center, a, b } => {
                if !(*a > 0.0 && *b > 0.0) {
                    return Err(DomainError::InvalidParameter("semi-axes must be positive".into()));
                }
                let (p, q) = ((a + b) / 2.0, (a - b) / 2.0);
                // center + p·w + q/w = (q + center·w + p·w²)/w
                let num = Polynomial::new(vec![c64(q, 0.0), *center, c64(p, 0.0)]);
                (RationalFunction::new(num, Polynomial::monomial(1))?, true)
            }
            DomainSpec::Cardioid { scale } => {
                if !(*scale > 0.0) {
                    return Err(DomainError::InvalidParameter("scale must be positive".into()));
                }
                (poly(vec![z0, c64(*scale, 0.0), c64(scale / 2.0, 0.0)]), false)
            }
            DomainSpec::Limacon { alpha, beta } => {
                if alpha.norm() == 0.0 || beta.norm() > alpha.norm() / 2.0 + 1e-15 {
                    return Err(DomainError::InvalidParameter("limaçon needs 0 < 2|β| ≤ |α|".into()));
                }
                (poly(vec![z0, *alpha, *beta]), false)
            }
            DomainSpec::NeumannOval { a, b } => {
                if a.norm() == 0.0 || b.norm() >= 1.0 {
                    return Err(DomainError::InvalidParameter("Neumann oval needs a ≠ 0, |b| < 1".into()));
                }
                let num = Polynomial::new(vec![z0, *a]);
                let den = Polynomial::new(vec![c64(1.0, 0.0), z0, -*b]);
                (RationalFunction::new(num, den)?, false)
            }
            DomainSpec::JoukowskyAirfoilExterior { c } => {
                let rho = (c64(1.0, 0.0) - c).norm();
                if c.norm() >= rho {
                    return Err(DomainError::InvalidParameter("airfoil needs |c| < |1 − c|".into()));
                }
                // ζ + 1/ζ with ζ = c + ρw: (ζ² + 1)/ζ
                let zeta = Polynomial::new(vec![*c, c64(rho, 0.0)]);
                let num = &(&zeta * &zeta) + &Polynomial::one();
                (RationalFunction::new(num, zeta)?, true)
            }
            DomainSpec::RiemannMap { phi, unbounded } => (phi.clone(), *unbounded),
            DomainSpec::RasterComplement { .. } => {
                return Err(DomainError::Unsupported("raster complements have no Riemann map"))
            }
        };
        ConformalMap::new(phi, unbounded)
    }

    /// Map-based domain with its inversion table.
    pub fn prepare(&self) -> Result<PreparedDomain, DomainError> {
        let map = self.conformal_map()?;
        let inverter = Inverter::new(&map);
        Ok(PreparedDomain { spec: self.clone(), map, inverter })
    }
}

/// A map-based domain ready for repeated Schwarz-function evaluation.
#[derive(Clone, Debug)]
pub struct PreparedDomain {
    pub spec: DomainSpec,
    pub map: ConformalMap,
    inverter: Inverter,
}

impl PreparedDomain {
    pub fn schwarz(&self, z: C64) -> Result<C64, DomainError> {
        if let DomainSpec::Disc { center, radius } | DomainSpec::ExteriorDisc { center, radius } = self.spec {
            return Ok(center.conj() + radius * radius / (z - center));
        }
        let w = self.inverter.invert(&self.map, z)?;
        Ok(self.map.schwarz_w(w))
    }

    /// Preimage of z in the reference domain.
    pub fn preimage(&self, z: C64) -> Result<C64, DomainError> {
        self.inverter.invert(&self.map, z)
    }

    /// Point-in-closure test via the preimage.
    pub fn contains(&self, z: C64) -> bool {
        self.preimage(z).is_ok_and(|w| self.map.in_reference(w, 0.0) && (self.map.eval(w) - z).norm() < 1e-8)
    }
}

/// Oriented closed boundary curves; the last point repeats the first.
#[derive(Clone, Debug, Default, Serialize)]
pub struct BoundarySample {
    pub curves: Vec<BoundaryCurve>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCurve {
    pub id: usize,
    #[serde(with = "pair::vec")]
    pub points: Vec<C64>,
    #[serde(with = "pair::vec")]
    pub tangents: Vec<C64>,
}

impl BoundarySample {
    /// CSV with header `curve_id,x,y`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "curve_id,x,y")?;
        for c in &self.curves {
            for p in &c.points {
                writeln!(w, "{},{:.10},{:.10}", c.id, p.re, p.im)?;
            }
        }
        Ok(())
    }

    pub fn all_points(&self) -> impl Iterator<Item = C64> + '_ {
        self.curves.iter().flat_map(|c| c.points.iter().copied())
    }
}

/// Univalence verdict for a rational map on the closed reference domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Univalence {
    pub univalent: bool,
    /// Nearest approach of boundary arcs at least 1/16 turn apart in the parameter.
    pub clearance: f64,
    pub interior_critical_point: bool,
    pub crossings: usize,
}

/// Univalence on the closed unit disc (or closed exterior when `unbounded`): no critical
/// point inside and no transversal self-crossing of the sampled boundary image.
pub fn univalence_check(phi: &RationalFunction, unbounded: bool, n: usize) -> Result<Univalence, DomainError> {
    for &(p, _) in phi.poles() {
        let inside = if unbounded { p.norm() >= 1.0 - 1e-12 } else { p.norm() <= 1.0 + 1e-12 };
        if inside {
            return Err(DomainError::PoleOnDisc { pole: p });
        }
    }
    let map = ConformalMap::new(phi.clone(), unbounded)?;
    let mut interior_critical_point = map
        .critical_points()?
        .iter()
        .any(|&w| map.in_reference(w, 1e-9));
    if unbounded && phi.local_degree_at_infinity() != 1 {
        interior_critical_point = true;
    }
    let n = n.max(64);
    let pts: Vec<C64> = (0..n).map(|k| map.eval(map.boundary_w(k, n))).collect();
    let scale = pts.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let crossings = count_crossings(&pts, 1e-12 * scale * scale);
    let gap = (n / 16).max(2);
    let mut clearance = f64::INFINITY;
    for i in 0..n {
        for j in i + gap..n {
            if n - (j - i) < gap {
                continue;
            }
            clearance = clearance.min((pts[i] - pts[j]).norm());
        }
    }
    Ok(Univalence {
        univalent: !interior_critical_point && crossings == 0,
        clearance,
        interior_critical_point,
        crossings,
    })
}

fn orient(a: C64, b: C64, c: C64) -> f64 {
    let (u, v) = (b - a, c - a);
    u.re * v.im - u.im * v.re
}

/// Proper crossings between non-adjacent edges of a closed polyline; orientation values
/// within `eps` of zero count as touching, not crossing.
pub fn count_crossings(pts: &[C64], eps: f64) -> usize {
    let n = pts.len();
    let lo: Vec<C64> = (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            c64(a.re.min(b.re), a.im.min(b.im))
        })
        .collect();
    let hi: Vec<C64> = (0..n)
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % n]);
            c64(a.re.max(b.re), a.im.max(b.im))
        })
        .collect();
    let mut count = 0;
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if lo[i].re > hi[j].re || lo[j].re > hi[i].re || lo[i].im > hi[j].im || lo[j].im > hi[i].im {
                continue;
            }
            let (p1, p2, q1, q2) = (pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]);
            let (o1, o2) = (orient(p1, p2, q1), orient(p1, p2, q2));
            let (o3, o4) = (orient(q1, q2, p1), orient(q1, q2, p2));
            let strict = |a: f64, b: f64| (a > eps && b < -eps) || (a < -eps && b > eps);
            if strict(o1, o2) && strict(o3, o4) {
                count += 1;
            }
        }
    }
    count
}

/// Closed oriented boundary curves with n points each (Ω on the left).
pub fn boundary(spec: &DomainSpec, n: usize) -> Result<BoundarySample, DomainError> {
    if let DomainSpec::RasterComplement { droplet, component } = spec {
        let curves = crate::topology::component_boundary(droplet, *component)
            .into_iter()
            .enumerate()
            .map(|(id, mut points)| {
                let m = points.len();
                let tangents = (0..m).map(|k| points[(k + 1) % m] - points[(k + m - 1) % m]).collect::<Vec<_>>();
                let mut tangents = tangents;
                points.push(points[0]);
                tangents.push(tangents[0]);
                BoundaryCurve { id, points, tangents }
            })
            .collect();
        return Ok(BoundarySample { curves });
    }
    let map = spec.conformal_map()?;
    let (mut points, mut tangents) = map.boundary(n);
    points.push(points[0]);
    tangents.push(tangents[0]);
    Ok(BoundarySample { curves: vec![BoundaryCurve { id: 0, points, tangents }] })
}

/// Richardson step for a trapezoid estimate at n and 2n nodes.
fn richardson(a_n: f64, a_2n: f64) -> f64 {
    a_2n + (a_2n - a_n) / 3.0
}

/// Area of Ω for bounded Ω, area of the complement for unbounded Ω.
pub fn area(spec: &DomainSpec) -> Result<f64, DomainError> {
    if let DomainSpec::RasterComplement { droplet, component } = spec {
        let comps = crate::topology::complement_components(droplet);
        let cells = comps.labels.iter().filter(|&&l| l == Some(*component)).count();
        let cells = if comps.unbounded == *component { droplet.grid.len() - cells } else { cells };
        return Ok(cells as f64 * droplet.grid.cell_area());
    }
    let map = spec.conformal_map()?;
    let a = |n| map.circle_integral(n, |z| z.conj()).re;
    Ok(richardson(a(BOUNDARY_NODES), a(2 * BOUNDARY_NODES)))
}

/// Schwarz function S at z (closed form for discs, Newton inversion of φ otherwise).
pub fn schwarz_eval(spec: &DomainSpec, z: C64) -> Result<C64, DomainError> {
    spec.prepare()?.schwarz(z)
}

/// Singular boundary points (Sakai's taxonomy).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type")]
pub enum SingularPoint {
    Cusp {
        #[serde(with = "pair")]
        at: C64,
    },
    DoublePoint {
        #[serde(with = "pair")]
        at: C64,
    },
}

impl SingularPoint {
    pub fn location(&self) -> C64 {
        match *self {
            SingularPoint::Cusp { at } | SingularPoint::DoublePoint { at } => at,
        }
    }
}

/// Cusps (zeros of φ′ on the unit circle) and double points (distinct boundary parameters
/// with equal images) of a map-based domain.
pub fn singular_points(spec: &DomainSpec) -> Result<Vec<SingularPoint>, DomainError> {
    let map = spec.conformal_map()?;
    let mut out = Vec::new();
    for w in map.critical_points()? {
        if (w.norm() - 1.0).abs() < 1e-6 {
            out.push(SingularPoint::Cusp { at: map.eval(w / w.norm()) });
        }
    }
    let n = 2048;
    let pts: Vec<C64> = (0..n).map(|k| map.eval(map.boundary_w(k, n))).collect();
    let seg = (0..n).map(|k| (pts[(k + 1) % n] - pts[k]).norm()).fold(0.0, f64::max);
    let gap = n / 32;
    let mut found: Vec<C64> = Vec::new();
    for i in 0..n {
        for j in i + gap..n {
            if n - (j - i) < gap || (pts[i] - pts[j]).norm() > 2.0 * seg {
                continue;
            }
            let th = |k: usize| 2.0 * PI * k as f64 / n as f64;
            if let Some((a, b)) = refine_double_point(&map, th(i), th(j)) {
                let z = map.eval(C64::from_polar(1.0, a));
                let sep = ((a - b).rem_euclid(2.0 * PI)).min((b - a).rem_euclid(2.0 * PI));
                if sep > 1e-3 && !found.iter().any(|f| (f - z).norm() < 1e-6) {
                    found.push(z);
                }
            }
        }
    }
    out.extend(found.into_iter().map(|at| SingularPoint::DoublePoint { at }));
    Ok(out)
}

/// Newton on g(a, b) = φ(e^{ia}) − φ(e^{ib}) = 0 (two real unknowns, two equations).
fn refine_double_point(map: &ConformalMap, mut a: f64, mut b: f64) -> Option<(f64, f64)> {
    for _ in 0..40 {
        let (wa, wb) = (C64::from_polar(1.0, a), C64::from_polar(1.0, b));
        let g = map.eval(wa) - map.eval(wb);
        if g.norm() < 1e-13 {
            return Some((a, b));
        }
        let ga = map.deriv(wa) * C64::i() * wa;
        let gb = -map.deriv(wb) * C64::i() * wb;
        let det = ga.re * gb.im - ga.im * gb.re;
        if det.abs() < 1e-300 {
            return None;
        }
        let da = (g.re * gb.im - g.im * gb.re) / det;
        let db = (ga.re * g.im - ga.im * g.re) / det;
        a -= da;
        b -= db;
    }
    None
}

/// Quadrature data of a map-based domain from contour integrals of S around its poles in Ω.
pub fn quadrature_data(spec: &DomainSpec) -> Result<QuadratureData, DomainError> {
    match *spec {
        DomainSpec::Disc { center, radius } => {
            return Ok(QuadratureData {
                nodes: vec![QuadratureNode {
                    at: center.into(),
                    terms: vec![QuadratureTerm { m: 0, c: c64(PI * radius * radius, 0.0) }],
                }],
            })
        }
        DomainSpec::ExteriorDisc { center, .. } => {
            let nodes = if center.norm() == 0.0 {
                vec![]
            } else {
                vec![QuadratureNode {
                    at: ExtComplex::Infinity,
                    terms: vec![QuadratureTerm { m: 1, c: -PI * center.conj() }],
                }]
            };
            return Ok(QuadratureData { nodes });
        }
        DomainSpec::RasterComplement { .. } => {
            return Err(DomainError::Unsupported("use transforms::fit_quadrature_function for rasters"))
        }
        _ => {}
    }
    let map = spec.conformal_map()?;
    let mut poles = map.schwarz_poles()?;
    if map.unbounded && !poles.iter().any(|p| p.0.is_none()) {
        // S is bounded at ∞; the constant term of r is its value there.
        poles.push((None, 0));
    }
    let mut singular: Vec<C64> = map.t.poles().iter().map(|p| p.0).collect();
    singular.extend(map.phi.poles().iter().map(|p| p.0));
    singular.extend(map.critical_points()?);

    let mut parts: Vec<(C64, Vec<C64>)> = Vec::new();
    let mut poly: Vec<C64> = Vec::new();
    let nodes = 256;
    for (w0, k) in poles {
        match w0 {
            Some(w0) => {
                let d = singular
                    .iter()
                    .map(|s| (s - w0).norm())
                    .filter(|&d| d > 1e-12)
                    .fold(f64::INFINITY, f64::min);
                let delta = (0.5 * d).min(0.5);
                if !(delta > 1e-6) {
                    return Err(DomainError::ResidueIllConditioned { pole: w0, radius: delta });
                }
                let z0 = map.eval(w0);
                let b: Vec<C64> = (1..=k)
                    .map(|j| {
                        contour(nodes, w0, delta, |w| {
                            map.schwarz_w(w) * (map.eval(w) - z0).powu(j as u32 - 1) * map.deriv(w)
                        })
                    })
                    .collect();
                parts.push((z0, b));
            }
            None => {
                let rmax = singular.iter().map(|s| s.norm()).fold(1.0, f64::max);
                let r = 4.0 * rmax;
                poly = (0..=k)
                    .map(|j| {
                        contour(4 * nodes, c64(0.0, 0.0), r, |w| {
                            map.schwarz_w(w) * map.eval(w).powi(-(j as i32) - 1) * map.deriv(w)
                        })
                    })
                    .collect();
            }
        }
    }
    Ok(qdata_from_parts(&parts, &poly))
}

/// (1/2πi)∮_{|w − c| = r} g(w) dw by the trapezoid rule.
fn contour(n: usize, c: C64, r: f64, g: impl Fn(C64) -> C64) -> C64 {
    let mut s = c64(0.0, 0.0);
    for k in 0..n {
        let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
        s += g(c + r * e) * r * e;
    }
    s / n as f64
}

/// Principal parts Σ b_j/(z − a)^j and polynomial coefficients → quadrature data, merging
/// nodes within `NODE_MERGE_TOL` and dropping negligible coefficients.
pub(crate) fn qdata_from_parts(parts: &[(C64, Vec<C64>)], poly: &[C64]) -> QuadratureData {
    let scale = parts
        .iter()
        .flat_map(|(_, b)| b.iter())
        .chain(poly.iter())
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let tol = 1e-11 * scale.max(1e-300);
    let mut nodes = Vec::new();
    for (a, b) in parts {
        let terms = b
            .iter()
            .enumerate()
            .filter(|(_, b)| b.norm() > tol)
            .map(|(m, &bm)| QuadratureTerm { m, c: bm * PI / factorial(m) })
            .collect::<Vec<_>>();
        if !terms.is_empty() {
            nodes.push(QuadratureNode { at: (*a).into(), terms });
        }
    }
    let terms: Vec<QuadratureTerm> = poly
        .iter()
        .enumerate()
        .filter(|(_, p)| p.norm() > tol)
        .map(|(j, &p)| QuadratureTerm { m: j + 1, c: -p * PI / factorial(j + 1) })
        .collect();
    if !terms.is_empty() {
        nodes.push(QuadratureNode { at: ExtComplex::Infinity, terms });
    }
    QuadratureData { nodes }.merged(NODE_MERGE_TOL)
}

/// m_0 = A(Ω^c), m_k = ∫_Ω z^{−k} dA (principal value) for unbounded Ω with 0 ∉ clos Ω.
pub fn moments(spec: &DomainSpec, kmax: usize) -> Result<Vec<C64>, DomainError> {
    if !spec.is_unbounded() {
        return Err(DomainError::Unsupported("moments are defined for unbounded domains"));
    }
    let map = spec.conformal_map()?;
    let n = BOUNDARY_NODES;
    let pts: Vec<C64> = (0..n).map(|k| map.eval(map.boundary_w(k, n))).collect();
    let seg = (0..n).map(|k| (pts[(k + 1) % n] - pts[k]).norm()).fold(0.0, f64::max);
    let dist = pts.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if dist <= 2.0 * seg || winding_number(&pts, c64(0.0, 0.0)) == 0 {
        return Err(DomainError::OriginInDomain);
    }
    let mut out = vec![c64(area(spec)?, 0.0)];
    for k in 1..=kmax {
        // Ω lies to the right of the counterclockwise complement boundary.
        let m = |n| -map.circle_integral(n, |z| z.conj() * z.powi(-(k as i32)));
        let (a, b) = (m(n), m(2 * n));
        out.push(c64(richardson(a.re, b.re), richardson(a.im, b.im)));
    }
    Ok(out)
}

/// Winding number of a closed polyline around p.
pub fn winding_number(pts: &[C64], p: C64) -> i64 {
    let n = pts.len();
    let mut total = 0.0;
    for k in 0..n {
        let (a, b) = (pts[k] - p, pts[(k + 1) % n] - p);
        total += (b / a).arg();
    }
    (total / (2.0 * PI)).round() as i64
}

/// Circular inversion z ↦ 1/z̄ of a map-based domain: φ̃(w) = 1/φ*(1/w).
pub fn invert(spec: &DomainSpec) -> Result<DomainSpec, DomainError> {
    let map = spec.conformal_map()?;
    if !map.unbounded && map.eval(c64(0.0, 0.0)).norm() > 1e-12 {
        return Err(DomainError::InvalidParameter("bounded domain must have φ(0) = 0".into()));
    }
    if map.unbounded {
        let pts: Vec<C64> = (0..1024).map(|k| map.eval(map.boundary_w(k, 1024))).collect();
        if winding_number(&pts, c64(0.0, 0.0)) == 0 {
            return Err(DomainError::OriginInDomain);
        }
    }
    let phi = RationalFunction::new(map.t.den().clone(), map.t.num().clone())?;
    Ok(DomainSpec::RiemannMap { phi, unbounded: !map.unbounded })
}
