//! Anti-holomorphic dynamics z ↦ conj(R(z)): fixed points, critical orbits, Schwarz
//! reflection orbits, and the model maps f = ε² z^{ν_m}[1 + Σ 1/(z − k)^{ν_k}].

use std::io::{self, Write};

use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domains::{self, DomainError, DomainSpec};
use crate::numerics::{c64, pair, ExtComplex, NumericsError, Polynomial, RationalFunction, C64};
use crate::topology::{self, Connectivity};
use crate::transforms::{Grid, RasterDroplet};

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error("seed grid found {found} fixed points with index sum {found_index}, expected index sum {expected}")]
    SeedGridExhausted { found: usize, found_index: i64, expected: i64 },
    #[error("no ε ≥ {last:e} gave the required model configuration")]
    EpsilonTooLarge { last: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// |R′| within this band of 1 counts as neutral.
pub const NEUTRAL_BAND: f64 = 1e-8;
const MERGE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FixedClass {
    Attracting,
    Repelling,
    Neutral,
}

#[derive(Clone, Debug, Serialize)]
pub struct FixedPointRecord {
    pub location: ExtComplex,
    pub multiplier_modulus: f64,
    pub class: FixedClass,
}

fn classify(m: f64) -> FixedClass {
    if (m - 1.0).abs() <= NEUTRAL_BAND {
        FixedClass::Neutral
    } else if m < 1.0 {
        FixedClass::Attracting
    } else {
        FixedClass::Repelling
    }
}

/// conj(R(z)).
pub fn antiholo_step(r: &RationalFunction, z: ExtComplex) -> ExtComplex {
    r.eval(z).conj()
}

/// Seeds per side of the fixed-point search grid.
pub const SEED_SIDE: usize = 64;

/// Solutions of R(z) = z̄ on the sphere, with |R′| at each.
pub fn find_fixed_points(r: &RationalFunction) -> Result<Vec<FixedPointRecord>, DynamicsError> {
    if r.degree() < 1 {
        // Constant map: the unique fixed point is conj(c).
        let c = r.at_infinity().finite().unwrap_or(c64(0.0, 0.0));
        return Ok(vec![FixedPointRecord { location: c.conj().into(), multiplier_modulus: 0.0, class: FixedClass::Attracting }]);
    }
    let mut last = None;
    for (side, inflate) in [(SEED_SIDE, 3.0), (2 * SEED_SIDE, 6.0), (4 * SEED_SIDE, 3.0)] {
        let pts = newton_search(r, side, inflate);
        let recs = records(r, &pts);
        match index_check(r, &recs) {
            Ok(()) => return Ok(recs),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap())
}

fn records(r: &RationalFunction, pts: &[C64]) -> Vec<FixedPointRecord> {
    let dr = r.derivative();
    let mut out: Vec<FixedPointRecord> = pts
        .iter()
        .map(|&z| {
            let m = dr.value(z).norm();
            FixedPointRecord { location: z.into(), multiplier_modulus: m, class: classify(m) }
        })
        .collect();
    // ∞ is fixed iff R(∞) = ∞.
    if r.at_infinity().is_infinite() {
        let (a, b) = (r.num().degree(), r.den().degree());
        let m = if a >= b + 2 { 0.0 } else { (r.den().leading() / r.num().leading()).norm() };
        out.push(FixedPointRecord { location: ExtComplex::Infinity, multiplier_modulus: m, class: classify(m) });
    }
    out
}

/// Index of z̄ − R(z) along a large circle plus the finite pole count equals the sum of
/// sign(|R′|² − 1) over finite solutions.
fn index_check(r: &RationalFunction, recs: &[FixedPointRecord]) -> Result<(), DynamicsError> {
    let (a, b) = (r.num().degree() as i64, r.den().degree() as i64);
    let w_inf = if a - b >= 2 {
        a - b
    } else if a - b == 1 {
        let s = (r.num().leading() / r.den().leading()).norm();
        if (s - 1.0).abs() < 1e-9 {
            return Ok(());
        }
        if s > 1.0 {
            1
        } else {
            -1
        }
    } else {
        -1
    };
    let poles: i64 = r.poles().iter().map(|p| p.1 as i64).sum();
    let expected = w_inf + poles;
    let finite: Vec<&FixedPointRecord> = recs.iter().filter(|f| !f.location.is_infinite()).collect();
    if finite.iter().any(|f| f.class == FixedClass::Neutral) {
        return Ok(());
    }
    let found: i64 = finite.iter().map(|f| if f.class == FixedClass::Repelling { 1 } else { -1 }).sum();
    if found == expected {
        Ok(())
    } else {
        Err(DynamicsError::SeedGridExhausted { found: finite.len(), found_index: found, expected })
    }
}

fn search_box(r: &RationalFunction, inflate: f64) -> (C64, f64) {
    let mut pts: Vec<C64> = r.poles().iter().map(|p| p.0).collect();
    if let Ok(cp) = r.critical_points() {
        pts.extend(cp.iter().filter_map(|c| c.0.finite()));
    }
    pts.push(c64(0.0, 0.0));
    let (mut lo, mut hi) = (c64(f64::INFINITY, f64::INFINITY), c64(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in &pts {
        lo = c64(lo.re.min(p.re), lo.im.min(p.im));
        hi = c64(hi.re.max(p.re), hi.im.max(p.im));
    }
    let center = 0.5 * (lo + hi);
    let mut half = 0.5 * (hi.re - lo.re).max(hi.im - lo.im);
    // For polynomial-like growth, solutions of |R(z)| = |z| lie within a Cauchy-type radius.
    let (a, b) = (r.num().degree(), r.den().degree());
    if a >= b + 2 {
        let q = r.polynomial_part();
        let lead = q.leading().norm();
        let bound = 1.0 + (0..q.coeffs().len() - 1).map(|k| q.coeff(k).norm()).sum::<f64>() / lead + 1.0 / lead;
        half = half.max(bound);
    }
    (center, inflate * half.max(1.0))
}

fn newton_search(r: &RationalFunction, side: usize, inflate: f64) -> Vec<C64> {
    let (center, half) = search_box(r, inflate);
    let dr = r.derivative();
    let seeds: Vec<C64> = (0..side * side)
        .map(|k| {
            let (i, j) = (k % side, k / side);
            center + c64(-half + (i as f64 + 0.5) * 2.0 * half / side as f64, -half + (j as f64 + 0.5) * 2.0 * half / side as f64)
        })
        .collect();
    let found: Vec<C64> = seeds
        .par_iter()
        .filter_map(|&s| {
            let mut z = s;
            for _ in 0..80 {
                let f = r.value(z) - z.conj();
                if !f.is_finite() {
                    return None;
                }
                let a = dr.value(z);
                let den = a.norm_sqr() - 1.0;
                if den.abs() < 1e-300 || !a.is_finite() {
                    return None;
                }
                let d = -(f.conj() + a.conj() * f) / den;
                z += d;
                if d.norm() <= 1e-15 * z.norm().max(1.0) {
                    break;
                }
                if z.norm() > 1e12 {
                    return None;
                }
            }
            let res = (r.value(z) - z.conj()).norm();
            (res <= 1e-9 * z.norm().max(1.0)).then_some(z)
        })
        .collect();
    let mut out: Vec<C64> = Vec::new();
    for z in found {
        if !out.iter().any(|w| (w - z).norm() <= MERGE_TOL * z.norm().max(1.0)) {
            out.push(z);
        }
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OrbitVerdict {
    Converged { fixed_point: usize },
    /// Left the region of interest at the given step.
    Escaped { step: usize },
    Cycle { period: usize },
    BudgetExhausted,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub seed: ExtComplex,
    pub trajectory: Vec<ExtComplex>,
    pub verdict: OrbitVerdict,
}

const CAPTURE: f64 = 1e-7;
const SLOW_CAPTURE: f64 = 1e-3;

/// Iterates conj∘R from `seed` until it lands within a small chordal distance of an
/// attracting fixed point, or the budget runs out. Trajectories are thinned to ≤ 256 points.
pub fn orbit(r: &RationalFunction, seed: ExtComplex, attracting: &[(usize, ExtComplex)], budget: usize) -> OrbitRecord {
    let mut z = seed;
    let mut traj = vec![z];
    let mut hist: Vec<ExtComplex> = Vec::with_capacity(budget + 1);
    hist.push(z);
    let keep_every = (budget / 256).max(1);
    for step in 1..=budget {
        z = antiholo_step(r, z);
        hist.push(z);
        if step % keep_every == 0 {
            traj.push(z);
        }
        if let Some(&(id, _)) = attracting.iter().find(|(_, p)| p.chordal_distance(z) < CAPTURE) {
            traj.push(z);
            return OrbitRecord { seed, trajectory: traj, verdict: OrbitVerdict::Converged { fixed_point: id } };
        }
    }
    // Slowly converging orbits: near an attracting point and still approaching it.
    if let Some(&(id, p)) = attracting.iter().find(|(_, p)| p.chordal_distance(z) < SLOW_CAPTURE) {
        let earlier = hist[hist.len().saturating_sub(101)];
        if p.chordal_distance(z) < p.chordal_distance(earlier) {
            return OrbitRecord { seed, trajectory: traj, verdict: OrbitVerdict::Converged { fixed_point: id } };
        }
    }
    for period in 1..=8 {
        let n = hist.len();
        if n > period && hist[n - 1].chordal_distance(hist[n - 1 - period]) < 1e-9 {
            return OrbitRecord { seed, trajectory: traj, verdict: OrbitVerdict::Cycle { period } };
        }
    }
    OrbitRecord { seed, trajectory: traj, verdict: OrbitVerdict::BudgetExhausted }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriticalAudit {
    pub fixed_points: Vec<FixedPointRecord>,
    /// Critical points with multiplicity and orbit verdict.
    pub critical: Vec<(ExtComplex, usize, OrbitVerdict)>,
    pub critical_multiplicity: usize,
    pub attracting: usize,
    /// Attracting fixed points no critical orbit converges to.
    pub violations: Vec<usize>,
    pub budget_exhausted: usize,
}

impl CriticalAudit {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Every attracting fixed point of conj∘R should attract some critical orbit.
pub fn critical_orbit_audit(r: &RationalFunction, budget: usize) -> Result<CriticalAudit, DynamicsError> {
    let d = r.degree();
    if d < 2 {
        return Err(DynamicsError::InvalidInput(format!("degree {d} < 2")));
    }
    let fixed = find_fixed_points(r)?;
    let crit = r.critical_points()?;
    let attracting: Vec<(usize, ExtComplex)> = fixed
        .iter()
        .enumerate()
        .filter(|(_, f)| f.class == FixedClass::Attracting)
        .map(|(i, f)| (i, f.location))
        .collect();
    let orbits: Vec<OrbitRecord> = crit.par_iter().map(|&(c, _)| orbit(r, c, &attracting, budget)).collect();
    let hit: Vec<usize> = orbits
        .iter()
        .filter_map(|o| match o.verdict {
            OrbitVerdict::Converged { fixed_point } => Some(fixed_point),
            _ => None,
        })
        .collect();
    let violations = attracting.iter().map(|a| a.0).filter(|i| !hit.contains(i)).collect();
    Ok(CriticalAudit {
        critical_multiplicity: crit.iter().map(|c| c.1).sum(),
        attracting: attracting.len(),
        budget_exhausted: orbits.iter().filter(|o| o.verdict == OrbitVerdict::BudgetExhausted).count(),
        critical: crit.iter().zip(orbits).map(|(c, o)| (c.0, c.1, o.verdict)).collect(),
        fixed_points: fixed,
        violations,
    })
}

/// Random rational map of exact degree d with standard Gaussian complex coefficients.
pub fn random_rational(d: usize, rng: &mut impl rand::Rng) -> RationalFunction {
    loop {
        let mut coeffs = |n: usize| {
            Polynomial::new((0..=n).map(|_| c64(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect())
        };
        let num = coeffs(d);
        let den = coeffs(d);
        if let Ok(f) = RationalFunction::new(num, den) {
            if f.degree() == d {
                return f;
            }
        }
    }
}

/// Orbits of conj∘S from seeds in Ω; stops at the first step landing outside Ω (in K).
pub fn schwarz_dynamics(spec: &DomainSpec, seeds: &[C64], budget: usize) -> Result<Vec<OrbitRecord>, DynamicsError> {
    let prep = spec.prepare()?;
    let inside = |z: C64| -> bool {
        match spec {
            DomainSpec::Disc { center, radius } => (z - center).norm() <= radius * (1.0 + 1e-12),
            DomainSpec::ExteriorDisc { center, radius } => (z - center).norm() >= radius * (1.0 - 1e-12),
            _ => prep.contains(z),
        }
    };
    seeds
        .par_iter()
        .map(|&s| {
            let mut traj = vec![ExtComplex::Finite(s)];
            if !inside(s) {
                return Ok(OrbitRecord { seed: s.into(), trajectory: traj, verdict: OrbitVerdict::Escaped { step: 0 } });
            }
            let mut z = s;
            for step in 1..=budget {
                let w = prep.schwarz(z)?.conj();
                if !w.is_finite() {
                    traj.push(ExtComplex::Infinity);
                    let v = if spec.is_unbounded() { OrbitVerdict::BudgetExhausted } else { OrbitVerdict::Escaped { step } };
                    return Ok(OrbitRecord { seed: s.into(), trajectory: traj, verdict: v });
                }
                traj.push(w.into());
                if !inside(w) {
                    return Ok(OrbitRecord { seed: s.into(), trajectory: traj, verdict: OrbitVerdict::Escaped { step } });
                }
                if (w - z).norm() < 1e-12 * z.norm().max(1.0) {
                    return Ok(OrbitRecord { seed: s.into(), trajectory: traj, verdict: OrbitVerdict::Cycle { period: 1 } });
                }
                z = w;
            }
            Ok(OrbitRecord { seed: s.into(), trajectory: traj, verdict: OrbitVerdict::BudgetExhausted })
        })
        .collect()
}

/// CSV rows `seed,step,x,y,region` (region: omega/k/inf).
pub fn write_orbits_csv<W: Write>(w: &mut W, orbits: &[OrbitRecord], region: impl Fn(ExtComplex) -> &'static str) -> io::Result<()> {
    writeln!(w, "seed,step,x,y,region")?;
    for (id, o) in orbits.iter().enumerate() {
        for (k, z) in o.trajectory.iter().enumerate() {
            match z {
                ExtComplex::Finite(z) => writeln!(w, "{id},{k},{:.10},{:.10},{}", z.re, z.im, region(ExtComplex::Finite(*z)))?,
                ExtComplex::Infinity => writeln!(w, "{id},{k},inf,inf,inf")?,
            }
        }
    }
    Ok(())
}

/// Basin labels on a grid: index of the attracting fixed point captured, or None.
pub fn basins(r: &RationalFunction, fixed: &[FixedPointRecord], grid: Grid, budget: usize) -> Vec<Option<usize>> {
    let attracting: Vec<(usize, ExtComplex)> = fixed
        .iter()
        .enumerate()
        .filter(|(_, f)| f.class == FixedClass::Attracting)
        .map(|(i, f)| (i, f.location))
        .collect();
    grid.map(|z| match orbit(r, z.into(), &attracting, budget).verdict {
        OrbitVerdict::Converged { fixed_point } => Some(fixed_point),
        _ => None,
    })
}

/// The model map f = ε² z^{ν_m}[1 + Σ_{k<m} 1/(z − k)^{ν_k}] with U = {|f| < ε}, V = {|z| < ε}.
#[derive(Clone, Debug, Serialize)]
pub struct ModelMap {
    #[serde(skip)]
    pub f: RationalFunction,
    pub nu: Vec<usize>,
    pub eps: f64,
    pub halvings: usize,
    /// U on a coarse grid, with small windows around the poles treated as belonging to U.
    #[serde(skip)]
    pub coarse: RasterDroplet,
    /// Fine rasters of U around each pole 1..m−1.
    #[serde(skip)]
    pub windows: Vec<RasterDroplet>,
    pub connectivity: usize,
    /// Covering degree of f on each boundary component of U (outer first, then pole k = 1, 2, ...).
    pub degrees: Vec<usize>,
    pub v_radius: f64,
    /// max |f| on clos V, which must be < ε.
    pub max_on_v: f64,
    #[serde(with = "pair::vec")]
    pub poles: Vec<C64>,
}

impl ModelMap {
    /// Degrees as a sorted list, for comparison with ν up to reordering.
    pub fn sorted_degrees(&self) -> Vec<usize> {
        let mut d = self.degrees.clone();
        d.sort_unstable();
        d
    }

    pub fn in_u(&self, z: C64) -> bool {
        self.f.value(z).norm() < self.eps
    }
}

pub fn model_function(nu: &[usize], eps: f64) -> Result<RationalFunction, DynamicsError> {
    let m = nu.len();
    if m == 0 || nu.contains(&0) {
        return Err(DynamicsError::InvalidInput("ν must be a nonempty list of positive integers".into()));
    }
    // g = z^{ν_m} (P + Σ_k P/(z − k)^{ν_k}) / P with P = Π (z − k)^{ν_k}.
    let roots: Vec<(C64, usize)> = (1..m).map(|k| (c64(k as f64, 0.0), nu[k - 1])).collect();
    let p = Polynomial::from_roots(c64(1.0, 0.0), &roots);
    let mut num = p.clone();
    for k in 1..m {
        let others: Vec<(C64, usize)> = roots.iter().copied().filter(|r| r.0 != c64(k as f64, 0.0)).collect();
        num = &num + &Polynomial::from_roots(c64(1.0, 0.0), &others);
    }
    let num = (&num * &Polynomial::monomial(nu[m - 1])).scale(c64(eps * eps, 0.0));
    Ok(RationalFunction::new(num, p)?)
}

/// Builds the model map with the ε schedule ε₀ = 1/(10·Σν·m), halving up to 20 times until
/// U has connectivity m, the boundary degrees are ν, and clos V ⊂ U.
pub fn model_map(nu: &[usize]) -> Result<ModelMap, DynamicsError> {
    let m = nu.len();
    let total: usize = nu.iter().sum();
    let mut eps = 1.0 / (10.0 * total as f64 * m as f64);
    for halvings in 0..=20 {
        if let Some(mm) = try_model(nu, eps, halvings)? {
            let mut want = nu.to_vec();
            want.sort_unstable();
            if mm.connectivity == m && mm.sorted_degrees() == want && mm.max_on_v < eps {
                return Ok(mm);
            }
        }
        eps /= 2.0;
    }
    Err(DynamicsError::EpsilonTooLarge { last: 2.0 * eps })
}

/// Distance from `c` along a ray to the level set |f| = ε, by bisection between `lo` and `hi`.
fn level_radius(f: &RationalFunction, c: C64, eps: f64, lo: f64, hi: f64, outside_is_small: bool) -> f64 {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..100 {
        let mid = 0.5 * (a + b);
        let small = f.value(c + mid).norm() < eps;
        if small == outside_is_small {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

fn try_model(nu: &[usize], eps: f64, halvings: usize) -> Result<Option<ModelMap>, DynamicsError> {
    let m = nu.len();
    let f = model_function(nu, eps)?;
    let poles: Vec<C64> = (1..m).map(|k| c64(k as f64, 0.0)).collect();
    // Outer radius: |f| ≈ ε² |z|^{ν_m} = ε.
    let r_out = eps.powf(-1.0 / nu[m - 1] as f64);
    let side = 512usize;
    let half = 1.25 * r_out.max(m as f64);
    let hc = 2.0 * half / side as f64;
    let gc = Grid::new(c64(-half, -half), hc, side, side);
    let mut windows_geom = Vec::new();
    for &p in &poles {
        // Hole radius: |f| drops below ε at distance r_k from the pole.
        let rk = level_radius(&f, p, eps, 1e-12, 0.5, false);
        let w = (8.0 * rk).min(0.45);
        windows_geom.push((p, w));
    }
    let in_window = |z: C64| windows_geom.iter().any(|&(p, w)| (z.re - p.re).abs() < w && (z.im - p.im).abs() < w);
    let coarse = RasterDroplet::from_fn(gc, |z| in_window(z) || f.value(z).norm() < eps);
    let mut windows = Vec::new();
    for &(p, w) in &windows_geom {
        let hw = w / 128.0;
        let g = Grid::new(p - c64(w, w), hw, 256, 256);
        windows.push(RasterDroplet::from_fn(g, |z| f.value(z).norm() < eps));
    }
    // Components of Ĉ∖U: from the coarse grid (cells off-grid join the outer one) plus
    // holes inside windows that stay clear of the window border.
    let cc = topology::complement_components(&coarse);
    let mut holes = 0;
    let mut degrees = Vec::new();
    let mut ok = true;
    // Outer boundary degree from the coarse contour.
    let outer: Vec<Vec<C64>> = topology::component_boundary(&coarse, cc.unbounded);
    if outer.len() != 1 {
        ok = false;
    } else {
        degrees.push(winding_of(&f, &outer[0]));
    }
    for win in &windows {
        let l = topology::label_cells(win, false, Connectivity::Eight);
        let g = win.grid;
        let mut border = std::collections::BTreeSet::new();
        for k in 0..g.len() {
            let (i, j) = g.coords(k);
            if i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1 {
                if let Some(c) = l.labels[k] {
                    border.insert(c);
                }
            }
        }
        if !border.is_empty() {
            ok = false;
        }
        holes += l.count;
        let cw = topology::complement_components(win);
        for c in 0..cw.count {
            for curve in topology::component_boundary(win, c) {
                degrees.push(winding_of(&f, &curve));
            }
        }
    }
    let connectivity = cc.count + holes;
    // clos V ⊂ U: |f| < ε on the closed disc |z| ≤ ε.
    let mut max_on_v: f64 = 0.0;
    for i in 0..=32 {
        for k in 0..64 {
            let z = C64::from_polar(eps * i as f64 / 32.0, 2.0 * std::f64::consts::PI * k as f64 / 64.0);
            max_on_v = max_on_v.max(f.value(z).norm());
        }
    }
    if !ok {
        return Ok(None);
    }
    Ok(Some(ModelMap { f, nu: nu.to_vec(), eps, halvings, coarse, windows, connectivity, degrees, v_radius: eps, max_on_v, poles }))
}

/// |winding number of f(z) around 0| along a closed polyline.
fn winding_of(f: &RationalFunction, curve: &[C64]) -> usize {
    let vals: Vec<C64> = curve.iter().map(|&z| f.value(z)).collect();
    domains::winding_number(&vals, c64(0.0, 0.0)).unsigned_abs() as usize
}

/// Orbits of conj∘f from sample points of U; true if all converge to 0.
pub fn model_orbits_converge(mm: &ModelMap, samples: &[C64], budget: usize) -> bool {
    samples.par_iter().filter(|&&z| mm.in_u(z)).all(|&z| {
        let mut w = z;
        for _ in 0..budget {
            w = mm.f.value(w).conj();
            if w.norm() < 1e-12 {
                return true;
            }
            if !w.is_finite() {
                return false;
            }
        }
        w.norm() < 1e-6
    })
}

#[cfg(test)]
mod tests;
