//! Backward Hele-Shaw chains of algebraic droplets, computed through the obstacle problem
//!
//!   V_t = sup{ v subharmonic : v ≤ Q on K, v(z) ≤ t log|z|² + O(1) }.
//!
//! Normalizations: Δ = ∂²ₓ + ∂²ᵧ, so ΔQ = 4 for Q = |z|² − H and the droplet measure is
//! ΔV/(4π) dA; U^μ(z) = ∫ log(1/|z − w|²) dμ(w).
//!
//! The solve box is small (a quarter diameter of margin around K). Off the coincidence set V
//! equals c − U^μ with μ the droplet measure, so the ring of the box carries exactly that
//! data, with μ taken from the previous iterate and c calibrated so that the mass is t.

mod solver;

use std::collections::VecDeque;
use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::numerics::{pair, RationalFunction, C64};
use crate::topology::{complement_components, label_components, Connectivity};
use crate::transforms::{Density, Grid, RasterDroplet};
use solver::{optimal_omega, prolong, restrict, stencil, Checkerboard};

#[derive(Debug, Error)]
pub enum HeleShawError {
    #[error("period Re∮h dζ = {period:e} around a hole of the droplet")]
    PeriodNonzero { period: f64 },
    #[error("pole of h at {pole} lies in the droplet")]
    PoleInDroplet { pole: C64 },
    #[error("obstacle solver did not converge ({stage}, residual {residual:e})")]
    NonConvergence { stage: &'static str, residual: f64 },
    #[error("coincidence set reaches the edge of the solve box")]
    BoxTooSmall,
    #[error("time {t} outside (0, {t_max}]")]
    InvalidTime { t: f64, t_max: f64 },
    #[error("empty localization")]
    EmptyDomain,
}

/// Where the fluid is withdrawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Source {
    Infinity,
    Point(#[serde(with = "pair")] C64),
}

/// Q = |z|² − H on the cells of the localization K0, +∞ elsewhere.
#[derive(Clone, Debug)]
pub struct PotentialField {
    pub grid: Grid,
    pub q: Vec<f64>,
    pub k0: RasterDroplet,
    pub h_rat: RationalFunction,
    /// Additive constant of H on each 4-connected component of K0.
    pub constants: Vec<f64>,
    pub component: Vec<Option<usize>>,
}

impl PotentialField {
    pub fn t0(&self) -> f64 {
        self.k0.area() / PI
    }

    /// max |Δ_h Q − 4| over K0 cells whose stencil lies in K0 and which are at least
    /// `pole_distance` from every pole of h.
    pub fn laplacian_defect(&self, pole_distance: f64) -> f64 {
        let g = self.grid;
        let h2 = g.h * g.h;
        let mut worst = 0.0f64;
        for (i, j) in self.k0.cells() {
            if i == 0 || j == 0 || i + 1 == g.nx || j + 1 == g.ny {
                continue;
            }
            let z = g.center(i, j);
            if self.h_rat.poles().iter().any(|&(a, _)| (z - a).norm() < pole_distance) {
                continue;
            }
            let k = g.index(i, j);
            let s = self.q[k - 1] + self.q[k + 1] + self.q[k - g.nx] + self.q[k + g.nx] - 4.0 * self.q[k];
            if s.is_finite() {
                worst = worst.max((s / h2 - 4.0).abs());
            }
        }
        worst
    }
}

fn bounding_cells(k: &RasterDroplet) -> Option<(usize, usize, usize, usize)> {
    let mut b: Option<(usize, usize, usize, usize)> = None;
    for (i, j) in k.cells() {
        b = Some(match b {
            None => (i, i, j, j),
            Some((a, c, d, e)) => (a.min(i), c.max(i), d.min(j), e.max(j)),
        });
    }
    b
}

/// Box around K with a quarter-diameter margin (at least 8 cells), sides multiples of 16.
fn solve_grid(k: &RasterDroplet) -> Option<Grid> {
    let (i0, i1, j0, j1) = bounding_cells(k)?;
    let (w, hgt) = (i1 - i0 + 1, j1 - j0 + 1);
    let m = ((w.max(hgt) as f64 * 0.25).ceil() as usize).max(8);
    let round = |n: usize| n.div_ceil(16) * 16;
    let (nx, ny) = (round(w + 2 * m), round(hgt + 2 * m));
    let (ox, oy) = (i0 as isize - ((nx - w) / 2) as isize, j0 as isize - ((ny - hgt) / 2) as isize);
    let g = k.grid;
    Some(Grid::new(g.origin + C64::new(ox as f64 * g.h, oy as f64 * g.h), g.h, nx, ny))
}

/// H = 2 Re ∫h dζ at z, without the multivalued Im(residue)·arg terms.
fn harmonic_single_valued(h: &RationalFunction, z: C64) -> f64 {
    let p = h.polynomial_part();
    let mut s = C64::new(0.0, 0.0);
    for (k, &c) in p.coeffs().iter().enumerate() {
        s += c * z.powu(k as u32 + 1) / (k as f64 + 1.0);
    }
    let mut out = 2.0 * s.re;
    for part in h.principal_parts() {
        let d = z - part.pole;
        out += 2.0 * part.coeffs[0].re * d.norm().ln();
        for (j, &b) in part.coeffs.iter().enumerate().skip(1) {
            // ∫ b (z − a)^{−(j+1)} = b (z − a)^{−j} / (−j)
            out += 2.0 * (b * d.powi(-(j as i32)) / -(j as f64)).re;
        }
    }
    out
}

/// −2 Σ Im(b₁) arg(z − a) unwrapped along 4-paths through K0; errors if a loop has a
/// nonzero period.
fn arg_terms(h: &RationalFunction, k0: &RasterDroplet) -> Result<Vec<f64>, HeleShawError> {
    let g = k0.grid;
    let weights: Vec<(C64, f64)> =
        h.principal_parts().iter().map(|p| (p.pole, -2.0 * p.coeffs[0].im)).filter(|(_, w)| *w != 0.0).collect();
    let mut phi = vec![f64::NAN; g.len()];
    if weights.is_empty() {
        return Ok(phi.iter().map(|_| 0.0).collect());
    }
    let step = |from: C64, to: C64| -> f64 { weights.iter().map(|&(a, w)| w * ((to - a) / (from - a)).arg()).sum() };
    let nbrs = [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)];
    let mut queue = VecDeque::new();
    for start in 0..g.len() {
        if !k0.mask[start] || !phi[start].is_nan() {
            continue;
        }
        let z = g.center_of(start);
        phi[start] = weights.iter().map(|&(a, w)| w * (z - a).arg()).sum();
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            let (i, j) = g.coords(k);
            for (di, dj) in nbrs {
                let (a, b) = (i as isize + di, j as isize + dj);
                if !k0.get_signed(a, b) {
                    continue;
                }
                let kk = g.index(a as usize, b as usize);
                if phi[kk].is_nan() {
                    phi[kk] = phi[k] + step(g.center_of(k), g.center_of(kk));
                    queue.push_back(kk);
                }
            }
        }
    }
    for k in 0..g.len() {
        if !k0.mask[k] {
            continue;
        }
        let (i, j) = g.coords(k);
        for (di, dj) in [(1isize, 0isize), (0, 1)] {
            let (a, b) = (i as isize + di, j as isize + dj);
            if k0.get_signed(a, b) {
                let kk = g.index(a as usize, b as usize);
                let period = phi[kk] - phi[k] - step(g.center_of(k), g.center_of(kk));
                if period.abs() > 1e-6 {
                    return Err(HeleShawError::PeriodNonzero { period });
                }
            }
        }
    }
    Ok(phi.into_iter().map(|x| if x.is_nan() { 0.0 } else { x }).collect())
}

/// Q = |z|² − H with ∂H = h, constants per component of K0 fixed by |z|² − H + U^{K0} = 0.
pub fn build_potential(h_rat: &RationalFunction, k0: &RasterDroplet) -> Result<PotentialField, HeleShawError> {
    let grid = solve_grid(k0).ok_or(HeleShawError::EmptyDomain)?;
    let k0 = k0.regrid(grid);
    for &(a, _) in h_rat.poles() {
        let i = ((a.re - grid.origin.re) / grid.h).floor() as isize;
        let j = ((a.im - grid.origin.im) / grid.h).floor() as isize;
        let hit = (-1..=1).any(|di| (-1..=1).any(|dj| k0.get_signed(i + di, j + dj)));
        if hit {
            return Err(HeleShawError::PoleInDroplet { pole: a });
        }
    }
    let phi = arg_terms(h_rat, &k0)?;
    let mut hvals = vec![f64::NAN; grid.len()];
    for k in 0..grid.len() {
        if k0.mask[k] {
            hvals[k] = harmonic_single_valued(h_rat, grid.center_of(k)) + phi[k];
        }
    }
    let u = Density::from_mask(&k0).log_potential_grid();
    let labels = label_components(&k0, Connectivity::Four);
    let mut per: Vec<Vec<f64>> = vec![Vec::new(); labels.count];
    for k in 0..grid.len() {
        if let Some(l) = labels.labels[k] {
            per[l].push(grid.center_of(k).norm_sqr() - hvals[k] + u[k]);
        }
    }
    let constants: Vec<f64> = per
        .into_iter()
        .map(|mut v| {
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        })
        .collect();
    let q = (0..grid.len())
        .map(|k| match labels.labels[k] {
            Some(l) => grid.center_of(k).norm_sqr() - hvals[k] - constants[l],
            None => f64::INFINITY,
        })
        .collect();
    Ok(PotentialField { grid, q, k0, h_rat: h_rat.clone(), constants, component: labels.labels })
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstacleSolution {
    pub t: f64,
    #[serde(skip)]
    pub v: Vec<f64>,
    /// K*_t = {V = obstacle}.
    #[serde(skip)]
    pub coincidence: RasterDroplet,
    /// Constant of the ring data c − U^μ.
    pub c: f64,
    /// (1/4π)∫ΔV dA.
    pub mass: f64,
    pub sweeps: usize,
    /// max |ΔV| off K*_t.
    pub harmonic_residual: f64,
    /// max (−ΔV)⁺ on K*_t.
    pub subharmonic_defect: f64,
}

/// Obstacle solve with source at ∞.
pub fn obstacle_solve(p: &PotentialField, k: &RasterDroplet, t: f64) -> Result<ObstacleSolution, HeleShawError> {
    obstacle_solve_source(p, k, t, Source::Infinity)
}

struct Level {
    nx: usize,
    ny: usize,
    psi: Vec<f64>,
    u: Vec<f64>,
}

impl Level {
    fn is_ring(&self, k: usize) -> bool {
        let (i, j) = (k % self.nx, k / self.nx);
        i == 0 || j == 0 || i + 1 == self.nx || j + 1 == self.ny
    }

    /// Moves the ring constant from `from` to `to`, shifting the interior along.
    fn recalibrate(&self, v: &mut [f64], from: f64, to: f64) {
        for (k, x) in v.iter_mut().enumerate() {
            *x = if self.is_ring(k) { to - self.u[k] } else { (*x + to - from).min(self.psi[k]) };
        }
    }

    fn mass(&self, v: &[f64]) -> f64 {
        stencil(v, self.nx, self.ny).iter().sum::<f64>() / (4.0 * PI)
    }

    fn relax(&self, v: &mut Vec<f64>, tol: f64) -> Result<usize, HeleShawError> {
        let mut cb = Checkerboard::new(v, &self.psi, self.nx, self.ny);
        let cap = 60 * self.nx.max(self.ny) + 2000;
        let n = cb
            .solve(optimal_omega(self.nx, self.ny), tol, cap)
            .ok_or(HeleShawError::NonConvergence { stage: "relaxation", residual: tol })?;
        *v = cb.full();
        Ok(n)
    }
}

struct Calibration {
    c: f64,
    slope: f64,
    sweeps: usize,
}

/// Finds c with mass(c) = t (mass is nondecreasing in c): secant steps until bracketed, then
/// Illinois.
fn calibrate(
    lvl: &Level,
    v: &mut Vec<f64>,
    c0: f64,
    slope0: f64,
    t: f64,
    mtol: f64,
    vtol: f64,
) -> Result<Calibration, HeleShawError> {
    let mut cur = c0;
    let mut sweeps = 0;
    let eval = |c: f64, v: &mut Vec<f64>, cur: &mut f64, sweeps: &mut usize| -> Result<f64, HeleShawError> {
        lvl.recalibrate(v, *cur, c);
        *cur = c;
        *sweeps += lvl.relax(v, vtol)?;
        Ok(lvl.mass(v) - t)
    };
    let f0 = eval(c0, v, &mut cur, &mut sweeps)?;
    if f0.abs() <= mtol {
        return Ok(Calibration { c: c0, slope: slope0, sweeps });
    }
    let mut slope = slope0.max(1e-6);
    let dir = -f0.signum();
    let (mut a, mut fa) = (c0, f0);
    let mut step = f0.abs() / slope * 1.2;
    let (mut b, mut fb);
    let mut tries = 0;
    loop {
        tries += 1;
        if tries > 60 {
            return Err(HeleShawError::NonConvergence { stage: "mass bracket", residual: fa });
        }
        let c1 = a + dir * step;
        let f1 = eval(c1, v, &mut cur, &mut sweeps)?;
        if f1.abs() <= mtol {
            let s = (f1 - fa) / (c1 - a);
            return Ok(Calibration { c: c1, slope: if s > 0.0 { s } else { slope }, sweeps });
        }
        if f1.signum() != fa.signum() {
            (b, fb) = (c1, f1);
            break;
        }
        let s = (f1 - fa) / (c1 - a);
        if s > 0.0 {
            slope = s;
        }
        (a, fa) = (c1, f1);
        step = (f1.abs() / slope * 1.2).clamp(step * 0.25, step * 4.0);
    }
    slope = ((fb - fa) / (b - a)).max(1e-6);
    let mut side = 0;
    for _ in 0..80 {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = eval(c, v, &mut cur, &mut sweeps)?;
        if fc.abs() <= mtol || (b - a).abs() < 1e-13 * (1.0 + c.abs()) {
            return Ok(Calibration { c, slope, sweeps });
        }
        if fc.signum() == fb.signum() {
            (b, fb) = (c, fc);
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            (a, fa) = (c, fc);
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Err(HeleShawError::NonConvergence { stage: "mass calibration", residual: fa.abs().min(fb.abs()) })
}

/// Oscillation over the ring of the change in U^μ (a constant shift is absorbed by c).
fn ring_change(l: &Level, u_new: &[f64]) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, (a, b)) in u_new.iter().zip(&l.u).enumerate() {
        if l.is_ring(k) {
            lo = lo.min(a - b);
            hi = hi.max(a - b);
        }
    }
    hi - lo
}

/// Installs U^μ on the finest level and its restrictions; returns the ring change.
fn set_ring_potential(levels: &mut [Level], u: Vec<f64>) -> f64 {
    let change = ring_change(&levels[0], &u);
    levels[0].u = u;
    for l in 1..levels.len() {
        let (nx, ny) = (levels[l - 1].nx, levels[l - 1].ny);
        levels[l].u = restrict(&levels[l - 1].u, nx, ny, false);
    }
    change
}

/// Obstacle solve for Q localized to `k`, with the extra (t0 − t) log(1/|z − a|²) term for a
/// finite source a.
pub fn obstacle_solve_source(
    p: &PotentialField,
    k: &RasterDroplet,
    t: f64,
    source: Source,
) -> Result<ObstacleSolution, HeleShawError> {
    assert_eq!(p.grid, k.grid, "localization must live on the potential's grid");
    let g = p.grid;
    let t0 = k.area() / PI;
    if !(t > 0.0 && t <= t0 * (1.0 + 1e-9)) {
        return Err(HeleShawError::InvalidTime { t, t_max: t0 });
    }
    let psi: Vec<f64> = (0..g.len())
        .map(|i| {
            if !(k.mask[i] && p.q[i].is_finite()) {
                return f64::INFINITY;
            }
            match source {
                Source::Infinity => p.q[i],
                Source::Point(a) => p.q[i] - (t0 - t) * (g.center_of(i) - a).norm_sqr().ln(),
            }
        })
        .collect();
    let finite: Vec<f64> = psi.iter().copied().filter(|x| x.is_finite()).collect();
    if finite.is_empty() {
        return Err(HeleShawError::EmptyDomain);
    }
    let (lo, hi) = finite.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let scale = (hi - lo).max(lo.abs()).max(hi.abs()).max(1.0);
    let (mtol, vtol_coarse, vtol) = (1e-4 * t, 1e-8 * scale, 1e-10 * scale);

    // Uniform measure of mass t on K as the first guess for μ.
    let w0: Vec<f64> = k.mask.iter().map(|&b| if b { t / t0 } else { 0.0 }).collect();
    let u = Density { grid: g, w: w0 }.log_potential_grid();
    let mut sup: Vec<f64> = (0..g.len()).filter(|&i| psi[i].is_finite()).map(|i| psi[i] + u[i]).collect();
    sup.sort_by(f64::total_cmp);
    let mut c = sup[sup.len() / 2];

    let mut levels = vec![Level { nx: g.nx, ny: g.ny, psi, u }];
    loop {
        let l = levels.last().unwrap();
        if l.nx % 4 != 0 || l.ny % 4 != 0 || l.nx.min(l.ny) < 48 {
            break;
        }
        let coarse = Level {
            nx: l.nx / 2,
            ny: l.ny / 2,
            psi: restrict(&l.psi, l.nx, l.ny, true),
            u: restrict(&l.u, l.nx, l.ny, false),
        };
        levels.push(coarse);
    }
    let top = levels.len() - 1;
    // The measure behind the ring data is refined on a level of at most ~160 cells across.
    let mu_level = (0..=top).find(|&l| levels[l].nx.max(levels[l].ny) <= 160).unwrap_or(top);
    let mut sweeps = 0;
    let mut slope = 0.5;
    let mut v: Vec<f64> = {
        let l = &levels[top];
        (0..l.nx * l.ny).map(|i| if l.is_ring(i) { c - l.u[i] } else { (c - l.u[i]).min(l.psi[i]) }).collect()
    };
    let mut start = top;
    for _ in 0..8 {
        for li in (mu_level..=start).rev() {
            let lvl = &levels[li];
            if li != start {
                let up = &levels[li + 1];
                v = prolong(&v, up.nx, up.ny);
            }
            lvl.recalibrate(&mut v, c, c);
            let cal = calibrate(lvl, &mut v, c, slope, t, mtol, vtol_coarse)?;
            (c, slope) = (cal.c, cal.slope);
            sweeps += cal.sweeps;
        }
        start = mu_level;
        let lvl = &levels[mu_level];
        let f = 1usize << mu_level;
        let hc = g.h * f as f64;
        let sc = stencil(&v, lvl.nx, lvl.ny);
        let w: Vec<f64> = (0..g.len())
            .map(|k| {
                let (i, j) = g.coords(k);
                sc[(j / f) * lvl.nx + i / f] / (4.0 * hc * hc)
            })
            .collect();
        let change = set_ring_potential(&mut levels, Density { grid: g, w }.log_potential_grid());
        if change < 1e-6 * scale {
            break;
        }
    }
    for li in (0..mu_level).rev() {
        let lvl = &levels[li];
        let up = &levels[li + 1];
        v = prolong(&v, up.nx, up.ny);
        lvl.recalibrate(&mut v, c, c);
        let cal = calibrate(lvl, &mut v, c, slope, t, mtol, vtol_coarse)?;
        (c, slope) = (cal.c, cal.slope);
        sweeps += cal.sweeps;
    }
    let fine = &levels[0];
    sweeps += fine.relax(&mut v, vtol)?;
    if (fine.mass(&v) - t).abs() > mtol {
        let cal = calibrate(fine, &mut v, c, slope, t, mtol, vtol)?;
        c = cal.c;
        sweeps += cal.sweeps;
    }
    let fine = levels.swap_remove(0);
    let h2 = g.h * g.h;

    let ctol = 1e-9 * scale;
    let mask: Vec<bool> = (0..g.len()).map(|i| fine.psi[i].is_finite() && v[i] >= fine.psi[i] - ctol).collect();
    let coincidence = RasterDroplet::new(g, mask);
    for (i, j) in coincidence.cells() {
        if i < 3 || j < 3 || i + 3 >= g.nx || j + 3 >= g.ny {
            return Err(HeleShawError::BoxTooSmall);
        }
    }
    let s = stencil(&v, g.nx, g.ny);
    let (mut harm, mut sub) = (0.0f64, 0.0f64);
    for kk in 0..g.len() {
        if fine.is_ring(kk) {
            continue;
        }
        let lap = s[kk] / h2;
        if coincidence.mask[kk] {
            sub = sub.max(-lap);
        } else {
            harm = harm.max(lap.abs());
        }
    }
    Ok(ObstacleSolution {
        t,
        mass: fine.mass(&v),
        v,
        coincidence,
        c,
        sweeps,
        harmonic_residual: harm,
        subharmonic_defect: sub,
    })
}

/// Support of the area measure on K*: cells lying in some 2×2 block of K*. Drops isolated
/// cells and one-cell filaments.
pub fn droplet_from_coincidence(kstar: &RasterDroplet) -> RasterDroplet {
    let g = kstar.grid;
    let mut out = RasterDroplet::empty(g);
    for j in 0..g.ny.saturating_sub(1) {
        for i in 0..g.nx.saturating_sub(1) {
            if kstar.get(i, j) && kstar.get(i + 1, j) && kstar.get(i, j + 1) && kstar.get(i + 1, j + 1) {
                out.set(i, j, true);
                out.set(i + 1, j, true);
                out.set(i, j + 1, true);
                out.set(i + 1, j + 1, true);
            }
        }
    }
    out
}

/// K with its bounded complement components filled in.
pub fn polynomial_hull(k: &RasterDroplet) -> RasterDroplet {
    let cc = complement_components(k);
    let mask = (0..k.grid.len()).map(|i| k.mask[i] || cc.labels[i] != Some(cc.unbounded)).collect();
    RasterDroplet::new(k.grid, mask)
}

pub fn component_count(k: &RasterDroplet) -> usize {
    label_components(k, Connectivity::Four).count
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainRecord {
    pub source: Source,
    pub grid: Grid,
    pub times: Vec<f64>,
    pub areas: Vec<f64>,
    pub components: Vec<usize>,
    /// Component count differs from the previous time.
    pub singular: Vec<bool>,
    /// #(K*_t ∖ K_t) per time.
    pub extra_cells: Vec<usize>,
    /// Cells of K_{t_i} missing from K_{t_{i+1}}.
    pub monotonicity_violations: Vec<usize>,
    #[serde(skip)]
    pub droplets: Vec<RasterDroplet>,
    #[serde(skip)]
    pub coincidence: Vec<RasterDroplet>,
}

impl ChainRecord {
    /// Masks as K_###/Kstar_### (PGM + JSON header) and manifest.json.
    pub fn write_dir(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        for (i, (k, ks)) in self.droplets.iter().zip(&self.coincidence).enumerate() {
            k.save(dir, &format!("K_{i:03}"))?;
            ks.save(dir, &format!("Kstar_{i:03}"))?;
        }
        let json = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        fs::write(dir.join("manifest.json"), json + "\n")
    }
}

/// Droplets K_t for ascending `times`, each from its own obstacle solve.
pub fn chain(p: &PotentialField, k: &RasterDroplet, times: &[f64], source: Source) -> Result<ChainRecord, HeleShawError> {
    let t_max = k.area() / PI;
    for (i, &t) in times.iter().enumerate() {
        if t <= 0.0 || t > t_max * (1.0 + 1e-9) || (i > 0 && t <= times[i - 1]) {
            return Err(HeleShawError::InvalidTime { t, t_max });
        }
    }
    let mut rec = ChainRecord {
        source,
        grid: p.grid,
        times: times.to_vec(),
        areas: Vec::new(),
        components: Vec::new(),
        singular: Vec::new(),
        extra_cells: Vec::new(),
        monotonicity_violations: Vec::new(),
        droplets: Vec::new(),
        coincidence: Vec::new(),
    };
    for &t in times {
        let sol = obstacle_solve_source(p, k, t, source)?;
        let kt = droplet_from_coincidence(&sol.coincidence);
        let n = component_count(&kt);
        rec.singular.push(rec.components.last().is_some_and(|&m| m != n));
        rec.components.push(n);
        rec.areas.push(kt.area());
        rec.extra_cells.push(sol.coincidence.difference_count(&kt));
        if let Some(prev) = rec.droplets.last() {
            rec.monotonicity_violations.push(prev.difference_count(&kt));
        }
        rec.droplets.push(kt);
        rec.coincidence.push(sol.coincidence);
    }
    Ok(rec)
}

/// K_{t0 − δt}: backs the chain up by δt (default: 20 cell areas / π).
pub fn perturb_to_nonsingular(
    p: &PotentialField,
    k: &RasterDroplet,
    dt: Option<f64>,
) -> Result<RasterDroplet, HeleShawError> {
    let dt = dt.unwrap_or(20.0 * p.grid.cell_area() / PI);
    let sol = obstacle_solve(p, k, k.area() / PI - dt)?;
    Ok(droplet_from_coincidence(&sol.coincidence))
}
