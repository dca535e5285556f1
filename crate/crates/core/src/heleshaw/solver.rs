//! Red-black projected SOR for min(ψ − V, −ΔV) = 0 with Dirichlet data on the outer ring of
//! cells, plus a coarse-to-fine pyramid used for initial guesses.

use rayon::prelude::*;

/// Cells split by colour: colour c holds cells with (i + j + c) even, i = 2k + (j + c) mod 2.
pub(crate) struct Checkerboard {
    pub nx: usize,
    pub ny: usize,
    pub v: [Vec<f64>; 2],
    pub psi: [Vec<f64>; 2],
}

fn split(full: &[f64], nx: usize, ny: usize) -> [Vec<f64>; 2] {
    let half = nx / 2;
    let mut out = [vec![0.0; half * ny], vec![0.0; half * ny]];
    for (c, o) in out.iter_mut().enumerate() {
        for j in 0..ny {
            let off = (j + c) % 2;
            for k in 0..half {
                o[j * half + k] = full[j * nx + 2 * k + off];
            }
        }
    }
    out
}

impl Checkerboard {
    pub fn new(v: &[f64], psi: &[f64], nx: usize, ny: usize) -> Self {
        assert!(nx % 2 == 0 && ny >= 3 && nx >= 4, "grid must have even width");
        Checkerboard { nx, ny, v: split(v, nx, ny), psi: split(psi, nx, ny) }
    }

    pub fn full(&self) -> Vec<f64> {
        let (nx, ny, half) = (self.nx, self.ny, self.nx / 2);
        let mut out = vec![0.0; nx * ny];
        for c in 0..2 {
            for j in 0..ny {
                let off = (j + c) % 2;
                for k in 0..half {
                    out[j * nx + 2 * k + off] = self.v[c][j * half + k];
                }
            }
        }
        out
    }

    fn sweep_colour(&mut self, c: usize, omega: f64) -> f64 {
        let (ny, half) = (self.ny, self.nx / 2);
        let [v0, v1] = &mut self.v;
        let (a, b): (&mut Vec<f64>, &Vec<f64>) = if c == 0 { (v0, v1) } else { (v1, v0) };
        let psi = &self.psi[c];
        a.par_chunks_mut(half)
            .enumerate()
            .map(|(j, row)| {
                if j == 0 || j == ny - 1 {
                    return 0.0;
                }
                // Interior slots: i = 2k + off with 0 < i < nx − 1.
                let off = (j + c) % 2;
                let (k0, k1) = if off == 0 { (1, half) } else { (0, half - 1) };
                let mid = &b[j * half..(j + 1) * half];
                let left = &mid[k0 + off - 1..k1 + off - 1];
                let right = &mid[k0 + off..k1 + off];
                let up = &b[(j + 1) * half + k0..(j + 1) * half + k1];
                let down = &b[(j - 1) * half + k0..(j - 1) * half + k1];
                let p = &psi[j * half + k0..j * half + k1];
                let mut m = 0.0f64;
                for (((((x, &l), &r), &u), &d), &q) in
                    row[k0..k1].iter_mut().zip(left).zip(right).zip(up).zip(down).zip(p)
                {
                    let old = *x;
                    let new = (old + omega * ((l + r + u + d) * 0.25 - old)).min(q);
                    *x = new;
                    m = m.max((new - old).abs());
                }
                m
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Sweeps until the largest update falls below `tol`; returns the sweep count, or None at
    /// the cap.
    pub fn solve(&mut self, omega: f64, tol: f64, cap: usize) -> Option<usize> {
        for s in 1..=cap {
            let m = self.sweep_colour(0, omega).max(self.sweep_colour(1, omega));
            if m < tol {
                return Some(s);
            }
        }
        None
    }
}

/// ω = 2/(1 + √(1 − ρ²)) with ρ the Jacobi spectral radius of the rectangle.
pub(crate) fn optimal_omega(nx: usize, ny: usize) -> f64 {
    let rho = 0.5 * ((std::f64::consts::PI / nx as f64).cos() + (std::f64::consts::PI / ny as f64).cos());
    2.0 / (1.0 + (1.0 - rho * rho).sqrt())
}

/// Σ over interior cells of the 5-point stencil (neighbours − 4V), i.e. ∫ΔV dA.
pub(crate) fn stencil(v: &[f64], nx: usize, ny: usize) -> Vec<f64> {
    let mut out = vec![0.0; nx * ny];
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let k = j * nx + i;
            out[k] = v[k - 1] + v[k + 1] + v[k - nx] + v[k + nx] - 4.0 * v[k];
        }
    }
    out
}

/// Averages 2×2 blocks; an obstacle block is finite when at least two children are.
pub(crate) fn restrict(a: &[f64], nx: usize, ny: usize, obstacle: bool) -> Vec<f64> {
    let (cx, cy) = (nx / 2, ny / 2);
    let mut out = vec![0.0; cx * cy];
    for j in 0..cy {
        for i in 0..cx {
            let kids = [
                a[2 * j * nx + 2 * i],
                a[2 * j * nx + 2 * i + 1],
                a[(2 * j + 1) * nx + 2 * i],
                a[(2 * j + 1) * nx + 2 * i + 1],
            ];
            let finite: Vec<f64> = kids.iter().copied().filter(|x| x.is_finite()).collect();
            out[j * cx + i] = if obstacle && finite.len() < 2 {
                f64::INFINITY
            } else if finite.is_empty() {
                f64::INFINITY
            } else {
                finite.iter().sum::<f64>() / finite.len() as f64
            };
        }
    }
    out
}

/// Bilinear interpolation between cell centers, clamped at the edges.
pub(crate) fn prolong(a: &[f64], cx: usize, cy: usize) -> Vec<f64> {
    let (nx, ny) = (2 * cx, 2 * cy);
    let weights = |i: usize, n: usize| -> (usize, usize, f64) {
        // Fine center i sits at coarse coordinate (i − 1/2)/2.
        let x = ((i as f64 - 0.5) / 2.0).clamp(0.0, (n - 1) as f64);
        let i0 = (x.floor() as usize).min(n - 1);
        let i1 = (i0 + 1).min(n - 1);
        (i0, i1, x - i0 as f64)
    };
    let mut out = vec![0.0; nx * ny];
    for j in 0..ny {
        let (j0, j1, fy) = weights(j, cy);
        for i in 0..nx {
            let (i0, i1, fx) = weights(i, cx);
            let a00 = a[j0 * cx + i0];
            let a10 = a[j0 * cx + i1];
            let a01 = a[j1 * cx + i0];
            let a11 = a[j1 * cx + i1];
            out[j * nx + i] = (1.0 - fy) * ((1.0 - fx) * a00 + fx * a10) + fy * ((1.0 - fx) * a01 + fx * a11);
        }
    }
    out
}
