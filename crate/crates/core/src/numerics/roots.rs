use nalgebra::DMatrix;

use super::point::C64;
use super::poly::Polynomial;
use super::NumericsError;

const MAX_ABERTH_ITERS: usize = 500;

/// Roots of a polynomial, grouped by multiplicity.
///
/// Aberth–Ehrlich simultaneous iteration with a companion-matrix fallback, Newton polishing
/// and clustering of numerically multiple roots.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<(C64, usize)>, NumericsError> {
    if p.is_zero() || p.degree() == 0 {
        return Err(NumericsError::DegreeTooLow { degree: p.degree(), required: 1 });
    }
    let c = p.coeffs();
    let zeros = c.iter().take_while(|a| a.norm() == 0.0).count();
    let reduced = Polynomial::new(c[zeros..].to_vec());

    let mut out = Vec::new();
    if zeros > 0 {
        out.push((C64::new(0.0, 0.0), zeros));
    }
    if reduced.degree() == 0 {
        return Ok(out);
    }
    let simple = match aberth(&reduced) {
        Some(r) => r,
        None => companion_roots(&reduced)?,
    };
    let polished: Vec<C64> = simple.iter().map(|&z| polish(&reduced, z)).collect();
    out.extend(cluster(&reduced, &polished));

    let scale = root_scale(&out);
    let residuals: Vec<f64> = out
        .iter()
        .map(|&(z, _)| p.eval(z).norm() / p.eval_abs(z).max(f64::MIN_POSITIVE))
        .collect();
    // A relative backward error this large means the iteration never settled.
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if !(worst <= 1e-6 * scale) {
        return Err(NumericsError::NonConvergence { iterations: MAX_ABERTH_ITERS, residuals });
    }
    Ok(out)
}

fn root_scale(roots: &[(C64, usize)]) -> f64 {
    roots.iter().map(|(z, _)| z.norm()).fold(1.0, f64::max)
}

fn aberth(p: &Polynomial) -> Option<Vec<C64>> {
    let n = p.degree();
    if n == 1 {
        return Some(vec![-p.coeff(0) / p.coeff(1)]);
    }
    let dp = p.derivative();
    let lead = p.leading().norm();
    // Initial radius: geometric mean of root moduli, perturbed off any symmetry axis.
    let r0 = (p.coeff(0).norm() / lead).powf(1.0 / n as f64).max(1e-3);
    let shift = -p.coeff(n - 1) / (p.leading() * n as f64);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            shift + C64::from_polar(r0, th)
        })
        .collect();
    for _ in 0..MAX_ABERTH_ITERS {
        let mut moved = 0.0f64;
        for i in 0..n {
            let pv = p.eval(z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dp.eval(z[i]);
            let mut s = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (C64::new(1.0, 0.0) - ratio * s);
            if !w.is_finite() {
                return None;
            }
            z[i] -= w;
            moved = moved.max(w.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            return Some(z);
        }
        // Settled to rounding: corrections stop shrinking but residuals are at noise level.
        let settled = z
            .iter()
            .all(|&zi| p.eval(zi).norm() <= 64.0 * f64::EPSILON * p.eval_abs(zi));
        if settled {
            return Some(z);
        }
    }
    None
}

fn companion_roots(p: &Polynomial) -> Result<Vec<C64>, NumericsError> {
    let n = p.degree();
    let lead = p.leading();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeff(i) / lead;
    }
    m.schur()
        .eigenvalues()
        .map(|v| v.iter().cloned().collect())
        .ok_or(NumericsError::NonConvergence { iterations: 0, residuals: vec![] })
}

/// A few Newton steps, kept only while the residual decreases.
fn polish(p: &Polynomial, z0: C64) -> C64 {
    let dp = p.derivative();
    let mut z = z0;
    let mut r = p.eval(z).norm();
    for _ in 0..5 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let zn = z - p.eval(z) / d;
        let rn = p.eval(zn).norm();
        if !(rn < r) {
            break;
        }
        z = zn;
        r = rn;
    }
    z
}

/// Numerical multiplicity at `c`: index of the first Taylor coefficient that is clearly nonzero,
/// and the radius within which rounding can scatter a root of that multiplicity.
fn cluster_radius(p: &Polynomial, c: C64) -> f64 {
    let t = p.taylor_shift(c);
    let a = p.eval_abs(c);
    let floor = f64::EPSILON.sqrt() * a;
    for (k, tk) in t.iter().enumerate().skip(1) {
        if tk.norm() > floor {
            return (64.0 * f64::EPSILON * a / tk.norm()).powf(1.0 / k as f64);
        }
    }
    f64::INFINITY
}

fn cluster(p: &Polynomial, roots: &[C64]) -> Vec<(C64, usize)> {
    let n = roots.len();
    let scale = roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (roots[i] - roots[j]).norm();
            let tau = 1e-7 * scale;
            let merge = d <= tau || {
                let mid = (roots[i] + roots[j]) * 0.5;
                d <= 2.0 * cluster_radius(p, mid)
            };
            if merge {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, C64, usize)> = Vec::new();
    for i in 0..n {
        let g = find(&mut parent, i);
        match groups.iter_mut().find(|(id, _, _)| *id == g) {
            Some(e) => {
                e.1 += roots[i];
                e.2 += 1;
            }
            None => groups.push((g, roots[i], 1)),
        }
    }
    groups
        .into_iter()
        .map(|(_, s, k)| (s / k as f64, k))
        .collect()
}
