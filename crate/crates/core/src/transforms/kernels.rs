//! Cauchy transforms C^E(z) = (1/π)∫_E dA(w)/(z − w) and logarithmic potentials
//! U^E(z) = (1/π)∫_E log(1/|z − w|²) dA(w) of area measures.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;

use super::raster::{Grid, RasterDroplet};
use crate::numerics::C64;

/// Cells within this Chebyshev distance of the evaluation point are integrated exactly.
const NEAR: isize = 6;

/// C^B for the disc B(a, ρ).
pub fn cauchy_disc(a: C64, rho: f64, z: C64) -> C64 {
    let d = z - a;
    if d.norm() >= rho {
        rho * rho / d
    } else {
        d.conj()
    }
}

/// U^B for the disc B(a, ρ).
pub fn log_potential_disc(a: C64, rho: f64, z: C64) -> f64 {
    let s2 = (z - a).norm_sqr();
    let r2 = rho * rho;
    if s2 >= r2 {
        -r2 * s2.ln()
    } else {
        r2 * (1.0 - r2.ln()) - s2
    }
}

/// ∫∫_{[x1,x2]×[y1,y2]} dx dy / (x + iy), for x1 ≥ 0.
fn inv_rect_right(x1: f64, x2: f64, y1: f64, y2: f64) -> C64 {
    // Antiderivative −i·u·log u of 1/u in the sense ∂x∂y; continuous for Re u ≥ 0.
    let f = |x: f64, y: f64| {
        let u = C64::new(x, y);
        if u.norm() == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            -C64::i() * u * u.ln()
        }
    };
    f(x2, y2) - f(x1, y2) - f(x2, y1) + f(x1, y1)
}

/// ∫∫_rect dx dy / (x + iy) for an arbitrary rectangle.
fn inv_rect(x1: f64, x2: f64, y1: f64, y2: f64) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    if x2 > 0.0 {
        s += inv_rect_right(x1.max(0.0), x2, y1, y2);
    }
    if x1 < 0.0 {
        // x ↦ −x turns 1/(x+iy) into −conj(1/(x+iy)).
        s -= inv_rect_right((-x2).max(0.0), -x1, y1, y2).conj();
    }
    s
}

/// ∫∫_rect log(x² + y²) dx dy.
fn log_rect(x1: f64, x2: f64, y1: f64, y2: f64) -> f64 {
    let f = |x: f64, y: f64| {
        let r2 = x * x + y * y;
        if r2 == 0.0 {
            return 0.0;
        }
        let mut v = x * y * (r2.ln() - 3.0);
        if x != 0.0 {
            v += x * x * (y / x).atan();
        }
        if y != 0.0 {
            v += y * y * (x / y).atan();
        }
        v
    };
    f(x2, y2) - f(x1, y2) - f(x2, y1) + f(x1, y1)
}

/// (1/π)∫_cell dA(w)/(z − w) for the square cell of side h centered at c.
pub fn cauchy_cell(c: C64, h: f64, z: C64) -> C64 {
    let d = c - z;
    let hh = h / 2.0;
    -inv_rect(d.re - hh, d.re + hh, d.im - hh, d.im + hh) / PI
}

/// (1/π)∫_cell log(1/|z − w|²) dA(w) for the square cell of side h centered at c.
pub fn log_cell(c: C64, h: f64, z: C64) -> f64 {
    let d = c - z;
    let hh = h / 2.0;
    -log_rect(d.re - hh, d.re + hh, d.im - hh, d.im + hh) / PI
}

/// Cell weights in [0, 1]: 0/1 for a mask, coverage fractions for a sub-sampled set.
#[derive(Clone, Debug)]
pub struct Density {
    pub grid: Grid,
    pub w: Vec<f64>,
}

impl Density {
    pub fn from_mask(k: &RasterDroplet) -> Self {
        Density { grid: k.grid, w: k.mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect() }
    }

    pub fn mass(&self) -> f64 {
        self.w.iter().sum::<f64>() * self.grid.cell_area()
    }

    fn support(&self) -> Vec<(usize, C64, f64)> {
        self.w
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != 0.0)
            .map(|(k, &w)| (k, self.grid.center_of(k), w))
            .collect()
    }

    /// C^E at an arbitrary point: midpoint rule, exact integrals for nearby cells.
    pub fn cauchy_at(&self, z: C64) -> C64 {
        let g = self.grid;
        let h2 = g.cell_area() / PI;
        let (zi, zj) = cell_coords(g, z);
        let mut s = C64::new(0.0, 0.0);
        for (k, c, w) in self.support() {
            let (i, j) = g.coords(k);
            if (i as isize - zi).abs() <= NEAR && (j as isize - zj).abs() <= NEAR {
                s += cauchy_cell(c, g.h, z) * w;
            } else {
                s += h2 * w / (z - c);
            }
        }
        s
    }

    pub fn log_potential_at(&self, z: C64) -> f64 {
        let g = self.grid;
        let h2 = g.cell_area() / PI;
        let (zi, zj) = cell_coords(g, z);
        let mut s = 0.0;
        for (k, c, w) in self.support() {
            let (i, j) = g.coords(k);
            if (i as isize - zi).abs() <= NEAR && (j as isize - zj).abs() <= NEAR {
                s += log_cell(c, g.h, z) * w;
            } else {
                s -= h2 * w * (z - c).norm_sqr().ln();
            }
        }
        s
    }

    /// C^E at many points, parallel over points.
    pub fn cauchy_many(&self, zs: &[C64]) -> Vec<C64> {
        let g = self.grid;
        let h2 = g.cell_area() / PI;
        let sup = self.support();
        zs.par_iter()
            .map(|&z| {
                let (zi, zj) = cell_coords(g, z);
                let mut s = C64::new(0.0, 0.0);
                for &(k, c, w) in &sup {
                    let (i, j) = g.coords(k);
                    if (i as isize - zi).abs() <= NEAR && (j as isize - zj).abs() <= NEAR {
                        s += cauchy_cell(c, g.h, z) * w;
                    } else {
                        s += h2 * w / (z - c);
                    }
                }
                s
            })
            .collect()
    }

    pub fn log_potential_many(&self, zs: &[C64]) -> Vec<f64> {
        zs.par_iter().map(|&z| self.log_potential_at(z)).collect()
    }

    /// C^E at every cell center, by FFT convolution.
    pub fn cauchy_grid(&self) -> Vec<C64> {
        let h = self.grid.h;
        convolve(self.grid, &self.w, |di, dj| {
            let d = C64::new(di as f64 * h, dj as f64 * h);
            if di.abs() <= NEAR && dj.abs() <= NEAR {
                cauchy_cell(C64::new(0.0, 0.0), h, d)
            } else {
                h * h / (PI * d)
            }
        })
    }

    /// U^E at every cell center, by FFT convolution.
    pub fn log_potential_grid(&self) -> Vec<f64> {
        let h = self.grid.h;
        convolve(self.grid, &self.w, |di, dj| {
            let d = C64::new(di as f64 * h, dj as f64 * h);
            let v = if di.abs() <= NEAR && dj.abs() <= NEAR {
                log_cell(C64::new(0.0, 0.0), h, d)
            } else {
                -h * h / PI * d.norm_sqr().ln()
            };
            C64::new(v, 0.0)
        })
        .into_iter()
        .map(|c| c.re)
        .collect()
    }
}

fn cell_coords(g: Grid, z: C64) -> (isize, isize) {
    (
        ((z.re - g.origin.re) / g.h).floor() as isize,
        ((z.im - g.origin.im) / g.h).floor() as isize,
    )
}

/// out[i,j] = Σ w[i',j'] · kernel(i − i', j − j'), zero-padded linear convolution.
fn convolve(g: Grid, w: &[f64], kernel: impl Fn(isize, isize) -> C64 + Sync) -> Vec<C64> {
    let (nx, ny) = (g.nx, g.ny);
    let (px, py) = (2 * nx, 2 * ny);
    let mut a = vec![C64::new(0.0, 0.0); px * py];
    for j in 0..ny {
        for i in 0..nx {
            a[j * px + i] = C64::new(w[j * nx + i], 0.0);
        }
    }
    let mut k: Vec<C64> = (0..px * py)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = ((idx % px) as isize, (idx / px) as isize);
            let di = if i < nx as isize { i } else { i - px as isize };
            let dj = if j < ny as isize { j } else { j - py as isize };
            if di.unsigned_abs() >= nx || dj.unsigned_abs() >= ny {
                C64::new(0.0, 0.0)
            } else {
                kernel(di, dj)
            }
        })
        .collect();
    fft2(&mut a, px, py, false);
    fft2(&mut k, px, py, false);
    a.par_iter_mut().zip(&k).for_each(|(x, y)| *x *= y);
    fft2(&mut a, px, py, true);
    let scale = 1.0 / (px * py) as f64;
    let mut out = vec![C64::new(0.0, 0.0); nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            out[j * nx + i] = a[j * px + i] * scale;
        }
    }
    out
}

fn fft2(data: &mut [C64], nx: usize, ny: usize, inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let row = if inverse { planner.plan_fft_inverse(nx) } else { planner.plan_fft_forward(nx) };
    data.par_chunks_mut(nx).for_each(|r| row.process(r));
    let col = if inverse { planner.plan_fft_inverse(ny) } else { planner.plan_fft_forward(ny) };
    let mut t = vec![C64::new(0.0, 0.0); nx * ny];
    transpose(data, &mut t, nx, ny);
    t.par_chunks_mut(ny).for_each(|c| col.process(c));
    transpose(&t, data, ny, nx);
}

fn transpose(src: &[C64], dst: &mut [C64], nx: usize, ny: usize) {
    for j in 0..ny {
        for i in 0..nx {
            dst[i * ny + j] = src[j * nx + i];
        }
    }
}

/// C^K(z) for a raster set.
pub fn cauchy_raster(k: &RasterDroplet, z: C64) -> C64 {
    Density::from_mask(k).cauchy_at(z)
}

/// U^K(z) for a raster set.
pub fn log_potential_raster(k: &RasterDroplet, z: C64) -> f64 {
    Density::from_mask(k).log_potential_at(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_cell_is_zero() {
        let v = cauchy_cell(C64::new(0.3, 0.2), 0.1, C64::new(0.3, 0.2));
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn cell_integrals_match_subdivision() {
        let h = 0.1;
        let c = C64::new(0.013, -0.021);
        for z in [C64::new(0.0, 0.0), C64::new(0.05, 0.0), C64::new(0.2, 0.13), C64::new(-0.07, 0.04)] {
            let n = 400;
            let (mut sc, mut sl) = (C64::new(0.0, 0.0), 0.0);
            let dh = h / n as f64;
            for a in 0..n {
                for b in 0..n {
                    let w = c + C64::new((a as f64 + 0.5) * dh - h / 2.0, (b as f64 + 0.5) * dh - h / 2.0);
                    sc += dh * dh / (PI * (z - w));
                    sl -= dh * dh / PI * (z - w).norm_sqr().ln();
                }
            }
            assert!((cauchy_cell(c, h, z) - sc).norm() < 2e-4 * h, "{z}");
            assert!((log_cell(c, h, z) - sl).abs() < 1e-5 * h, "{z}");
        }
    }

    #[test]
    fn fft_grid_matches_direct_sum() {
        let g = Grid::centered(C64::new(0.0, 0.0), 0.6, 1.0 / 32.0);
        let k = RasterDroplet::from_fn(g, |z| (z - C64::new(0.1, 0.0)).norm() < 0.4 || z.re > 0.45);
        let d = Density::from_mask(&k);
        let cg = d.cauchy_grid();
        let ug = d.log_potential_grid();
        for idx in [0, 77, 500, g.len() / 2 + 3, g.len() - 1] {
            let z = g.center_of(idx);
            assert!((cg[idx] - d.cauchy_at(z)).norm() < 1e-12);
            assert!((ug[idx] - d.log_potential_at(z)).abs() < 1e-12);
        }
    }
}
