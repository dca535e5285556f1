use nalgebra::DMatrix;
use serde::Serialize;
use thiserror::Error;

use super::kernels::Density;
use super::raster::{coverage_weights, distance_transform, Grid, RasterDroplet};
use crate::domains::{self, DomainError, DomainSpec, SingularPoint};
use crate::numerics::{c64, poly_roots, NumericsError, Polynomial, QuadratureData, C64};

#[derive(Debug, Error)]
pub enum TransformError {
    #[error("{samples} samples cannot determine {unknowns} unknowns")]
    RankDeficient { samples: usize, unknowns: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Raster data for C^{Ω^c}: either the weights of a compact Ω^c, or the weights of a bounded Ω
/// (then C^{Ω^c} = z̄ − C^Ω in the principal-value sense).
#[derive(Clone, Debug)]
pub enum ComplementRaster {
    Compact(Density),
    CoBounded(Density),
}

const SUBSAMPLE: usize = 16;

impl ComplementRaster {
    /// Cell coverage fractions of Ω^c (or of Ω when Ω is bounded) at cell size h.
    pub fn from_spec(spec: &DomainSpec, h: f64) -> Result<Self, TransformError> {
        let n = boundary_nodes(spec, h)?;
        let curves: Vec<Vec<C64>> = domains::boundary(spec, n)?.curves.into_iter().map(|c| c.points).collect();
        let (mut lo, mut hi) = (c64(f64::INFINITY, f64::INFINITY), c64(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for z in curves.iter().flatten() {
            lo = c64(lo.re.min(z.re), lo.im.min(z.im));
            hi = c64(hi.re.max(z.re), hi.im.max(z.im));
        }
        let pad = c64(4.0 * h, 4.0 * h);
        let grid = Grid::covering(lo - pad, hi + pad, h);
        let d = Density { grid, w: coverage_weights(grid, &curves, SUBSAMPLE) };
        Ok(if spec.is_unbounded() { ComplementRaster::Compact(d) } else { ComplementRaster::CoBounded(d) })
    }

    pub fn density(&self) -> &Density {
        match self {
            ComplementRaster::Compact(d) | ComplementRaster::CoBounded(d) => d,
        }
    }

    /// C^{Ω^c} at the given points.
    pub fn cauchy_complement(&self, zs: &[C64]) -> Vec<C64> {
        match self {
            ComplementRaster::Compact(d) => d.cauchy_many(zs),
            ComplementRaster::CoBounded(d) => {
                d.cauchy_many(zs).into_iter().zip(zs).map(|(c, z)| z.conj() - c).collect()
            }
        }
    }
}

fn boundary_nodes(spec: &DomainSpec, h: f64) -> Result<usize, DomainError> {
    // Enough nodes that polygon chords sit far below the cell size.
    let coarse = domains::boundary(spec, 256)?;
    let len: f64 = coarse
        .curves
        .iter()
        .map(|c| (0..c.points.len()).map(|k| (c.points[(k + 1) % c.points.len()] - c.points[k]).norm()).sum::<f64>())
        .sum();
    Ok(((16.0 * len / h) as usize).next_power_of_two().clamp(1024, 1 << 18))
}

#[derive(Clone, Debug, Serialize)]
pub struct SchwarzResidual {
    pub max: f64,
    /// Max over samples farther than 5h from every cusp.
    pub max_regular: f64,
    /// Max over samples within 5h of a cusp (0 if none).
    pub max_near_cusp: f64,
    pub samples: usize,
    pub h: f64,
}

/// max |z̄ − r(z) − C^{Ω^c}(z)| over `n` boundary samples.
pub fn verify_schwarz_identity(
    spec: &DomainSpec,
    k: &ComplementRaster,
    r: &QuadratureData,
    n: usize,
) -> Result<SchwarzResidual, TransformError> {
    let h = k.density().grid.h;
    let zs: Vec<C64> = domains::boundary(spec, n)?.all_points().collect();
    let cusps: Vec<C64> = domains::singular_points(spec)?
        .into_iter()
        .filter_map(|p| match p {
            SingularPoint::Cusp { at } => Some(at),
            _ => None,
        })
        .collect();
    let rf = r.to_rational();
    let cc = k.cauchy_complement(&zs);
    let (mut reg, mut near) = (0.0f64, 0.0f64);
    for (z, c) in zs.iter().zip(&cc) {
        let e = (z.conj() - rf.value(*z) - c).norm();
        if cusps.iter().any(|p| (p - z).norm() <= 5.0 * h) {
            near = near.max(e);
        } else {
            reg = reg.max(e);
        }
    }
    Ok(SchwarzResidual { max: reg.max(near), max_regular: reg, max_near_cusp: near, samples: zs.len(), h })
}

/// Samples (ζ, ζ̄ − C^K(ζ)) at cell centers at least `depth` cells inside K, every `stride` cells.
pub fn complement_cauchy_samples(k: &RasterDroplet, depth: f64, stride: usize) -> Vec<(C64, C64)> {
    let c = Density::from_mask(k).cauchy_grid();
    let dist = distance_transform(&k.complement());
    let g = k.grid;
    (0..g.len())
        .filter(|&idx| {
            let (i, j) = g.coords(idx);
            i % stride == 0 && j % stride == 0 && k.mask[idx] && dist[idx] >= depth * depth
        })
        .map(|idx| {
            let z = g.center_of(idx);
            (z, z.conj() - c[idx])
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct RationalFit {
    pub qd: QuadratureData,
    /// Max error at held-out samples relative to the sample scale.
    pub holdout_error: f64,
    pub poles: usize,
    pub poly_degree: Option<usize>,
}

/// Fits r ≈ samples with at most `budget` = (number of finite poles + polynomial degree),
/// choosing the simplest model whose held-out error is within 1.5× of the best.
pub fn fit_quadrature_function(samples: &[(C64, C64)], budget: usize) -> Result<QuadratureData, TransformError> {
    Ok(fit_rational(samples, budget)?.qd)
}

pub fn fit_rational(samples: &[(C64, C64)], budget: usize) -> Result<RationalFit, TransformError> {
    let need = 2 * budget + 2;
    if samples.len() < 2 * need {
        return Err(TransformError::RankDeficient { samples: samples.len(), unknowns: need });
    }
    let m = samples.len() as f64;
    let center = samples.iter().map(|s| s.0).sum::<C64>() / m;
    let radius = samples.iter().map(|s| (s.0 - center).norm()).fold(0.0, f64::max).max(1e-12);
    let fscale = samples.iter().map(|s| s.1.norm()).fold(0.0, f64::max).max(1e-300);
    let (train, hold): (Vec<_>, Vec<_>) = samples.iter().enumerate().partition(|(i, _)| i % 4 != 3);
    let train: Vec<(C64, C64)> = train.into_iter().map(|(_, s)| *s).collect();
    let hold: Vec<(C64, C64)> = hold.into_iter().map(|(_, s)| *s).collect();

    let mut cands = Vec::new();
    for n in 0..=budget {
        for k in -1..=(budget - n) as isize {
            if n == 0 && k < 0 {
                continue;
            }
            let poly = (k >= 0).then_some(k as usize);
            if let Ok(f) = fit_model(&train, &hold, n, poly, center, radius, fscale) {
                cands.push(f);
            }
        }
    }
    let best = cands.iter().map(|c| c.holdout_error).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return Err(TransformError::RankDeficient { samples: samples.len(), unknowns: need });
    }
    let pick = cands
        .into_iter()
        .filter(|c| c.holdout_error <= 1.5 * best + 1e-13)
        .min_by_key(|c| (c.poles + c.poly_degree.map_or(0, |d| d + 1), c.poles))
        .unwrap();
    Ok(pick)
}

fn powers(u: C64, n: usize) -> Vec<C64> {
    let mut v = Vec::with_capacity(n + 1);
    let mut p = c64(1.0, 0.0);
    for _ in 0..=n {
        v.push(p);
        p *= u;
    }
    v
}

fn smallest_right_singular(a: DMatrix<C64>) -> Option<Vec<C64>> {
    let svd = a.svd(false, true);
    let vt = svd.v_t?;
    let (k, _) = svd.singular_values.iter().enumerate().min_by(|x, y| x.1.total_cmp(y.1))?;
    Some(vt.row(k).iter().map(|x| x.conj()).collect())
}

#[allow(clippy::too_many_arguments)]
fn fit_model(
    train: &[(C64, C64)],
    hold: &[(C64, C64)],
    n: usize,
    poly: Option<usize>,
    center: C64,
    radius: f64,
    fscale: f64,
) -> Result<RationalFit, TransformError> {
    let u = |z: C64| (z - center) / radius;
    let poles_u: Vec<(C64, usize)> = if n == 0 {
        Vec::new()
    } else {
        // Linearized N − fQ = 0 with deg N = n + poly, deg Q = n, then one reweighted pass.
        let dn = match poly {
            Some(k) => n + k,
            None => n - 1,
        };
        let cols = dn + 1 + n + 1;
        if train.len() < cols {
            return Err(TransformError::RankDeficient { samples: train.len(), unknowns: cols });
        }
        let mut weights = vec![1.0; train.len()];
        let mut q = Vec::new();
        for _pass in 0..2 {
            let mut a = DMatrix::<C64>::zeros(train.len(), cols);
            for (r, &(z, f)) in train.iter().enumerate() {
                let p = powers(u(z), dn.max(n));
                let f = f / fscale;
                for c in 0..=dn {
                    a[(r, c)] = p[c] * weights[r];
                }
                for c in 0..=n {
                    a[(r, dn + 1 + c)] = -f * p[c] * weights[r];
                }
            }
            let x = smallest_right_singular(a).ok_or(TransformError::RankDeficient { samples: train.len(), unknowns: cols })?;
            q = x[dn + 1..].to_vec();
            let qp = Polynomial::new(q.clone());
            for (r, &(z, _)) in train.iter().enumerate() {
                weights[r] = 1.0 / qp.eval(u(z)).norm().max(1e-300);
            }
        }
        let qp = Polynomial::new(q).trimmed(1e-10);
        if qp.degree() == 0 {
            return Err(TransformError::RankDeficient { samples: train.len(), unknowns: cols });
        }
        poly_roots(&qp)?
    };
    let poles: Vec<(C64, usize)> = poles_u.iter().map(|&(p, m)| (center + radius * p, m)).collect();
    let (parts, pcoef) = residues(train, &poles, poly, center, radius)?;
    let eval = |z: C64| -> C64 {
        let mut s = c64(0.0, 0.0);
        for ((a, _), b) in poles.iter().zip(&parts) {
            let d = 1.0 / (z - a);
            let mut p = d;
            for bj in b {
                s += bj * p;
                p *= d;
            }
        }
        let uz = u(z);
        let mut p = c64(1.0, 0.0);
        for c in &pcoef {
            s += c * p;
            p *= uz;
        }
        s
    };
    let err = hold.iter().map(|&(z, f)| (eval(z) - f).norm()).fold(0.0, f64::max) / fscale;

    // Drop poles carrying negligible residue mass.
    let mass = |b: &Vec<C64>| b.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let near = train.iter().map(|s| s.1.norm()).fold(0.0, f64::max);
    let keep: Vec<usize> = (0..poles.len()).filter(|&i| mass(&parts[i]) > 1e-3 * near * radius.powi(poles[i].1 as i32)).collect();
    if keep.len() < poles.len() {
        return Err(TransformError::RankDeficient { samples: train.len(), unknowns: poles.len() });
    }

    // Polynomial coefficients in z from those in u = (z − c)/R.
    let pz: Vec<C64> = if pcoef.is_empty() {
        Vec::new()
    } else {
        let mut acc = Polynomial::zero();
        let lin = Polynomial::new(vec![-center / radius, c64(1.0 / radius, 0.0)]);
        for (k, c) in pcoef.iter().enumerate() {
            acc = &acc + &lin.pow(k).scale(*c);
        }
        (0..pcoef.len()).map(|k| acc.coeff(k)).collect()
    };
    let raw: Vec<(C64, Vec<C64>)> = poles.iter().map(|p| p.0).zip(parts).collect();
    Ok(RationalFit {
        qd: domains::qdata_from_parts(&raw, &pz),
        holdout_error: err,
        poles: poles.iter().map(|p| p.1).sum(),
        poly_degree: poly,
    })
}

type Residues = (Vec<Vec<C64>>, Vec<C64>);

/// Least-squares principal-part and polynomial coefficients for fixed poles.
fn residues(
    samples: &[(C64, C64)],
    poles: &[(C64, usize)],
    poly: Option<usize>,
    center: C64,
    radius: f64,
) -> Result<Residues, TransformError> {
    let np = poly.map_or(0, |k| k + 1);
    let cols = poles.iter().map(|p| p.1).sum::<usize>() + np;
    if samples.len() < cols {
        return Err(TransformError::RankDeficient { samples: samples.len(), unknowns: cols });
    }
    let mut a = DMatrix::<C64>::zeros(samples.len(), cols);
    let mut b = DMatrix::<C64>::zeros(samples.len(), 1);
    // Columns scaled by radius^j to keep the system balanced.
    for (r, &(z, f)) in samples.iter().enumerate() {
        let mut c = 0;
        for &(p, m) in poles {
            let d = radius / (z - p);
            let mut pw = d;
            for _ in 0..m {
                a[(r, c)] = pw;
                pw *= d;
                c += 1;
            }
        }
        let uz = (z - center) / radius;
        let mut pw = c64(1.0, 0.0);
        for _ in 0..np {
            a[(r, c)] = pw;
            pw *= uz;
            c += 1;
        }
        b[(r, 0)] = f;
    }
    let x = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|_| TransformError::RankDeficient { samples: samples.len(), unknowns: cols })?;
    let mut c = 0;
    let mut parts = Vec::new();
    for &(_, m) in poles {
        parts.push((1..=m).map(|j| { c += 1; x[(c - 1, 0)] * radius.powi(j as i32) }).collect());
    }
    let pcoef = (0..np).map(|k| x[(c + k, 0)]).collect();
    Ok((parts, pcoef))
}

#[derive(Clone, Debug, Serialize)]
pub struct Equilibrium {
    pub gamma: f64,
    /// max |U^K + Q − γ| over K cells at least two cells from ∂K.
    pub deviation: f64,
    pub cells: usize,
}

/// U^K + Q ≈ γ on K; `q` holds Q at every cell center of K's grid.
pub fn verify_equilibrium(k: &RasterDroplet, q: &[f64]) -> Equilibrium {
    let u = Density::from_mask(k).log_potential_grid();
    let dist = distance_transform(&k.complement());
    let mut vals: Vec<f64> = (0..k.grid.len()).filter(|&i| k.mask[i] && dist[i] >= 4.0).map(|i| u[i] + q[i]).collect();
    if vals.is_empty() {
        return Equilibrium { gamma: f64::NAN, deviation: f64::INFINITY, cells: 0 };
    }
    vals.sort_by(f64::total_cmp);
    let gamma = vals[vals.len() / 2];
    let deviation = vals.iter().map(|v| (v - gamma).abs()).fold(0.0, f64::max);
    Equilibrium { gamma, deviation, cells: vals.len() }
}
