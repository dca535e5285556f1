use std::fs;
use std::io::{self, BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numerics::{pair, C64};

/// Uniform cell grid. Cell (i, j) has lower-left corner `origin + h·(i + i·j)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(with = "pair")]
    pub origin: C64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(origin: C64, h: f64, nx: usize, ny: usize) -> Self {
        assert!(h > 0.0 && nx > 0 && ny > 0, "degenerate grid");
        Grid { origin, h, nx, ny }
    }

    /// Grid covering [lo, hi] (corners) with cell size h, rounded outward.
    pub fn covering(lo: C64, hi: C64, h: f64) -> Self {
        let nx = ((hi.re - lo.re) / h).ceil().max(1.0) as usize;
        let ny = ((hi.im - lo.im) / h).ceil().max(1.0) as usize;
        Grid::new(lo, h, nx, ny)
    }

    /// Square grid centered at `c` with half-width `r`, cell size snapped so that the center
    /// falls on a cell corner.
    pub fn centered(c: C64, r: f64, h: f64) -> Self {
        let half = (r / h).ceil() as usize;
        Grid::new(c - C64::new(half as f64 * h, half as f64 * h), h, 2 * half, 2 * half)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, k: usize) -> (usize, usize) {
        (k % self.nx, k / self.nx)
    }

    pub fn center(&self, i: usize, j: usize) -> C64 {
        self.origin + C64::new((i as f64 + 0.5) * self.h, (j as f64 + 0.5) * self.h)
    }

    pub fn center_of(&self, k: usize) -> C64 {
        let (i, j) = self.coords(k);
        self.center(i, j)
    }

    /// Cell containing z, if inside the grid.
    pub fn locate(&self, z: C64) -> Option<(usize, usize)> {
        let x = (z.re - self.origin.re) / self.h;
        let y = (z.im - self.origin.im) / self.h;
        if x < 0.0 || y < 0.0 {
            return None;
        }
        let (i, j) = (x.floor() as usize, y.floor() as usize);
        (i < self.nx && j < self.ny).then_some((i, j))
    }

    pub fn upper_corner(&self) -> C64 {
        self.origin + C64::new(self.nx as f64 * self.h, self.ny as f64 * self.h)
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }

    pub fn map<T: Send>(&self, f: impl Fn(C64) -> T + Sync) -> Vec<T> {
        (0..self.len()).into_par_iter().map(|k| f(self.center_of(k))).collect()
    }
}

/// Boolean cell mask of a compact set K.
#[derive(Clone, Debug, PartialEq)]
pub struct RasterDroplet {
    pub grid: Grid,
    pub mask: Vec<bool>,
}

impl RasterDroplet {
    pub fn new(grid: Grid, mask: Vec<bool>) -> Self {
        assert_eq!(mask.len(), grid.len(), "mask size does not match grid");
        RasterDroplet { grid, mask }
    }

    pub fn empty(grid: Grid) -> Self {
        RasterDroplet { grid, mask: vec![false; grid.len()] }
    }

    /// Cells whose centers satisfy the predicate.
    pub fn from_fn(grid: Grid, inside: impl Fn(C64) -> bool + Sync) -> Self {
        RasterDroplet { mask: grid.map(inside), grid }
    }

    pub fn h(&self) -> f64 {
        self.grid.h
    }

    pub fn nx(&self) -> usize {
        self.grid.nx
    }

    pub fn ny(&self) -> usize {
        self.grid.ny
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.mask[self.grid.index(i, j)]
    }

    /// Same as `get` but false outside the grid.
    pub fn get_signed(&self, i: isize, j: isize) -> bool {
        if i < 0 || j < 0 || i as usize >= self.grid.nx || j as usize >= self.grid.ny {
            return false;
        }
        self.get(i as usize, j as usize)
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let k = self.grid.index(i, j);
        self.mask[k] = v;
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.grid.cell_area()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    /// True if no set cell touches the outer ring of the grid.
    pub fn has_margin(&self) -> bool {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        (0..nx).all(|i| !self.get(i, 0) && !self.get(i, ny - 1))
            && (0..ny).all(|j| !self.get(0, j) && !self.get(nx - 1, j))
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(k, _)| self.grid.coords(k))
    }

    pub fn centers(&self) -> impl Iterator<Item = C64> + '_ {
        self.cells().map(|(i, j)| self.grid.center(i, j))
    }

    /// Cell-count perimeter: number of set/unset edge adjacencies times h.
    pub fn perimeter(&self) -> f64 {
        let mut edges = 0usize;
        for (i, j) in self.cells() {
            let (i, j) = (i as isize, j as isize);
            for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                if !self.get_signed(i + di, j + dj) {
                    edges += 1;
                }
            }
        }
        // Staircase edges overcount a smooth curve's length by up to 4/π; report the
        // isotropic estimate.
        edges as f64 * self.grid.h * std::f64::consts::PI / 4.0
    }

    pub fn complement(&self) -> RasterDroplet {
        RasterDroplet { grid: self.grid, mask: self.mask.iter().map(|b| !b).collect() }
    }

    pub fn zip(&self, other: &RasterDroplet, f: impl Fn(bool, bool) -> bool) -> RasterDroplet {
        assert_eq!(self.grid, other.grid, "grids differ");
        let mask = self.mask.iter().zip(&other.mask).map(|(&a, &b)| f(a, b)).collect();
        RasterDroplet { grid: self.grid, mask }
    }

    pub fn is_subset_of(&self, other: &RasterDroplet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    /// Cells of self not in other.
    pub fn difference_count(&self, other: &RasterDroplet) -> usize {
        self.mask.iter().zip(&other.mask).filter(|(&a, &b)| a && !b).count()
    }

    /// 4-neighbour erosion.
    pub fn eroded(&self) -> RasterDroplet {
        let g = self.grid;
        let mut out = self.clone();
        for j in 0..g.ny {
            for i in 0..g.nx {
                let (a, b) = (i as isize, j as isize);
                if self.get(i, j)
                    && !(self.get_signed(a + 1, b)
                        && self.get_signed(a - 1, b)
                        && self.get_signed(a, b + 1)
                        && self.get_signed(a, b - 1))
                {
                    out.set(i, j, false);
                }
            }
        }
        out
    }

    /// Copy of this mask on a larger or shifted grid with the same cell size and aligned cells.
    pub fn regrid(&self, target: Grid) -> RasterDroplet {
        assert!((target.h - self.grid.h).abs() <= 1e-12 * self.grid.h, "cell sizes differ");
        let di = ((self.grid.origin.re - target.origin.re) / target.h).round() as isize;
        let dj = ((self.grid.origin.im - target.origin.im) / target.h).round() as isize;
        let mut out = RasterDroplet::empty(target);
        for (i, j) in self.cells() {
            let (ti, tj) = (i as isize + di, j as isize + dj);
            if ti >= 0 && tj >= 0 && (ti as usize) < target.nx && (tj as usize) < target.ny {
                out.set(ti as usize, tj as usize, true);
            }
        }
        out
    }

    /// Symmetric Hausdorff distance between the cell-center sets of two masks on one grid.
    pub fn hausdorff(&self, other: &RasterDroplet) -> f64 {
        assert_eq!(self.grid, other.grid, "grids differ");
        if self.is_empty() || other.is_empty() {
            return if self.is_empty() && other.is_empty() { 0.0 } else { f64::INFINITY };
        }
        let da = distance_transform(other);
        let db = distance_transform(self);
        let mut worst = 0.0f64;
        for k in 0..self.mask.len() {
            if self.mask[k] {
                worst = worst.max(da[k]);
            }
            if other.mask[k] {
                worst = worst.max(db[k]);
            }
        }
        worst.sqrt() * self.grid.h
    }

    /// Header as JSON plus mask as a binary-valued PGM (255 = in K).
    pub fn save(&self, dir: &Path, stem: &str) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        let header = serde_json::to_string_pretty(&self.grid).map_err(io::Error::other)?;
        fs::write(dir.join(format!("{stem}.json")), header + "\n")?;
        let mut f = io::BufWriter::new(fs::File::create(dir.join(format!("{stem}.pgm")))?);
        write_pgm(&mut f, self.grid.nx, self.grid.ny, |i, j| if self.get(i, j) { 255 } else { 0 })?;
        f.flush()
    }

    pub fn load(dir: &Path, stem: &str) -> io::Result<RasterDroplet> {
        let grid: Grid = serde_json::from_str(&fs::read_to_string(dir.join(format!("{stem}.json")))?)
            .map_err(io::Error::other)?;
        let (nx, ny, px) = read_pgm(&mut io::BufReader::new(fs::File::open(dir.join(format!("{stem}.pgm")))?))?;
        if nx != grid.nx || ny != grid.ny {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "PGM size does not match header"));
        }
        let mut r = RasterDroplet::empty(grid);
        for j in 0..ny {
            for i in 0..nx {
                // PGM rows run top to bottom.
                r.set(i, j, px[(ny - 1 - j) * nx + i] > 127);
            }
        }
        Ok(r)
    }
}

/// Writes a binary PGM with row 0 at the top (grid row ny−1).
pub fn write_pgm<W: Write>(w: &mut W, nx: usize, ny: usize, px: impl Fn(usize, usize) -> u8) -> io::Result<()> {
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    let mut row = vec![0u8; nx];
    for j in (0..ny).rev() {
        for (i, p) in row.iter_mut().enumerate() {
            *p = px(i, j);
        }
        w.write_all(&row)?;
    }
    Ok(())
}

fn read_pgm<R: BufRead>(r: &mut R) -> io::Result<(usize, usize, Vec<u8>)> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut tokens = Vec::new();
    let mut line = String::new();
    while tokens.len() < 4 {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(bad("truncated PGM header"));
        }
        let content = line.split('#').next().unwrap_or("");
        tokens.extend(content.split_whitespace().map(str::to_string));
    }
    if tokens[0] != "P5" {
        return Err(bad("not a binary PGM"));
    }
    let nx: usize = tokens[1].parse().map_err(|_| bad("bad width"))?;
    let ny: usize = tokens[2].parse().map_err(|_| bad("bad height"))?;
    let mut px = vec![0u8; nx * ny];
    r.read_exact(&mut px)?;
    Ok((nx, ny, px))
}

/// Mask JSON: header fields plus rows of '#'/'.' from the top row down.
impl Serialize for RasterDroplet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            grid: &'a Grid,
            rows: Vec<String>,
        }
        let rows = (0..self.grid.ny)
            .rev()
            .map(|j| (0..self.grid.nx).map(|i| if self.get(i, j) { '#' } else { '.' }).collect())
            .collect();
        Out { grid: &self.grid, rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RasterDroplet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct In {
            #[serde(flatten)]
            grid: Grid,
            rows: Vec<String>,
        }
        let raw = In::deserialize(d)?;
        let g = raw.grid;
        if raw.rows.len() != g.ny || raw.rows.iter().any(|r| r.chars().count() != g.nx) {
            return Err(serde::de::Error::custom("mask rows do not match nx × ny"));
        }
        let mut out = RasterDroplet::empty(g);
        for (r, row) in raw.rows.iter().enumerate() {
            for (i, ch) in row.chars().enumerate() {
                out.set(i, g.ny - 1 - r, ch == '#');
            }
        }
        Ok(out)
    }
}

/// Squared Euclidean distance (in cells) from every cell center to the nearest set cell.
pub fn distance_transform(mask: &RasterDroplet) -> Vec<f64> {
    let (nx, ny) = (mask.grid.nx, mask.grid.ny);
    let inf = 1e30;
    let mut d: Vec<f64> = mask.mask.iter().map(|&b| if b { 0.0 } else { inf }).collect();
    // Columns then rows, each by the lower envelope of parabolas.
    let mut buf = vec![0.0; nx.max(ny)];
    for i in 0..nx {
        for j in 0..ny {
            buf[j] = d[j * nx + i];
        }
        let out = edt_1d(&buf[..ny]);
        for j in 0..ny {
            d[j * nx + i] = out[j];
        }
    }
    for j in 0..ny {
        let row = &mut d[j * nx..(j + 1) * nx];
        let out = edt_1d(row);
        row.copy_from_slice(&out);
    }
    d
}

fn edt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0usize;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    let key = |q: usize| f[q] + (q * q) as f64;
    for q in 1..n {
        let mut s = (key(q) - key(v[k])) / (2.0 * (q - v[k]) as f64);
        while s <= z[k] {
            k -= 1;
            s = (key(q) - key(v[k])) / (2.0 * (q - v[k]) as f64);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    (0..n)
        .map(|q| {
            while z[k + 1] < q as f64 {
                k += 1;
            }
            let dq = q as f64 - v[k] as f64;
            dq * dq + f[v[k]]
        })
        .collect()
}

/// Scanline fill of the cells whose centers have nonzero winding number with respect to
/// the given closed polylines.
pub fn fill_polylines(grid: Grid, curves: &[Vec<C64>]) -> RasterDroplet {
    let rows: Vec<Vec<bool>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let y = grid.origin.im + (j as f64 + 0.5) * grid.h;
            let mut xs: Vec<(f64, i32)> = Vec::new();
            for c in curves {
                let n = c.len();
                for k in 0..n {
                    let (a, b) = (c[k], c[(k + 1) % n]);
                    if (a.im <= y) != (b.im <= y) {
                        let t = (y - a.im) / (b.im - a.im);
                        let x = a.re + t * (b.re - a.re);
                        xs.push((x, if b.im > a.im { 1 } else { -1 }));
                    }
                }
            }
            xs.sort_by(|p, q| p.0.total_cmp(&q.0));
            let mut row = vec![false; grid.nx];
            let mut w = 0;
            let mut idx = 0;
            for (i, cell) in row.iter_mut().enumerate() {
                let x = grid.origin.re + (i as f64 + 0.5) * grid.h;
                while idx < xs.len() && xs[idx].0 < x {
                    w += xs[idx].1;
                    idx += 1;
                }
                *cell = w != 0;
            }
            row
        })
        .collect();
    let mut out = RasterDroplet::empty(grid);
    for (j, row) in rows.into_iter().enumerate() {
        for (i, b) in row.into_iter().enumerate() {
            out.set(i, j, b);
        }
    }
    out
}

/// Fraction of every cell covered by the nonzero-winding region of the closed polylines:
/// `sub` scanlines per row, exact interval lengths along each scanline.
pub fn coverage_weights(grid: Grid, curves: &[Vec<C64>], sub: usize) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = (0..grid.ny)
        .into_par_iter()
        .map(|j| {
            let mut row = vec![0.0; grid.nx];
            for s in 0..sub {
                let y = grid.origin.im + (j as f64 + (s as f64 + 0.5) / sub as f64) * grid.h;
                let mut xs: Vec<(f64, i32)> = Vec::new();
                for c in curves {
                    let n = c.len();
                    for k in 0..n {
                        let (a, b) = (c[k], c[(k + 1) % n]);
                        if (a.im <= y) != (b.im <= y) {
                            let t = (y - a.im) / (b.im - a.im);
                            xs.push((a.re + t * (b.re - a.re), if b.im > a.im { 1 } else { -1 }));
                        }
                    }
                }
                xs.sort_by(|p, q| p.0.total_cmp(&q.0));
                let mut w = 0;
                for k in 0..xs.len() {
                    w += xs[k].1;
                    if w != 0 && k + 1 < xs.len() {
                        add_interval(&mut row, grid, xs[k].0, xs[k + 1].0, 1.0 / sub as f64);
                    }
                }
            }
            row
        })
        .collect();
    rows.concat()
}

fn add_interval(row: &mut [f64], g: Grid, x0: f64, x1: f64, wt: f64) {
    let u0 = ((x0 - g.origin.re) / g.h).max(0.0);
    let u1 = ((x1 - g.origin.re) / g.h).min(g.nx as f64);
    if u1 <= u0 {
        return;
    }
    let (i0, i1) = (u0.floor() as usize, (u1.ceil() as usize).min(g.nx));
    for (i, cell) in row.iter_mut().enumerate().take(i1).skip(i0) {
        let len = (u1.min(i as f64 + 1.0) - u0.max(i as f64)).max(0.0);
        *cell += wt * len;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(grid: Grid, c: C64, r: f64) -> RasterDroplet {
        RasterDroplet::from_fn(grid, |z| (z - c).norm() < r)
    }

    #[test]
    fn disc_area_and_margin() {
        let g = Grid::centered(C64::new(0.0, 0.0), 1.2, 1.0 / 128.0);
        let d = disc(g, C64::new(0.0, 0.0), 1.0);
        assert!((d.area() - std::f64::consts::PI).abs() < 0.01);
        assert!(d.has_margin());
        assert!((d.perimeter() - 2.0 * std::f64::consts::PI).abs() < 0.05);
    }

    #[test]
    fn hausdorff_of_concentric_discs() {
        let g = Grid::centered(C64::new(0.0, 0.0), 1.2, 1.0 / 64.0);
        let a = disc(g, C64::new(0.0, 0.0), 1.0);
        let b = disc(g, C64::new(0.0, 0.0), 0.75);
        let hd = a.hausdorff(&b);
        assert!((hd - 0.25).abs() < 2.0 / 64.0, "{hd}");
        assert_eq!(a.hausdorff(&a), 0.0);
    }

    #[test]
    fn distance_transform_single_cell() {
        let g = Grid::new(C64::new(0.0, 0.0), 1.0, 5, 4);
        let mut m = RasterDroplet::empty(g);
        m.set(1, 1, true);
        let d = distance_transform(&m);
        assert_eq!(d[g.index(4, 3)], 9.0 + 4.0);
        assert_eq!(d[g.index(1, 1)], 0.0);
    }

    #[test]
    fn polygon_fill_matches_predicate() {
        let g = Grid::centered(C64::new(0.0, 0.0), 1.5, 1.0 / 64.0);
        let poly: Vec<C64> = (0..2000)
            .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 2000.0))
            .collect();
        let filled = fill_polylines(g, &[poly]);
        let direct = disc(g, C64::new(0.0, 0.0), 1.0);
        assert!(filled.difference_count(&direct) + direct.difference_count(&filled) < 10);
    }

    #[test]
    fn pgm_and_json_roundtrip() {
        let g = Grid::new(C64::new(-1.0, 0.5), 0.25, 7, 5);
        let mut m = RasterDroplet::empty(g);
        m.set(2, 1, true);
        m.set(3, 4, true);
        let dir = std::env::temp_dir().join(format!("qdlab-raster-{}", std::process::id()));
        m.save(&dir, "k").unwrap();
        assert_eq!(RasterDroplet::load(&dir, "k").unwrap(), m);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<RasterDroplet>(&s).unwrap(), m);
        fs::remove_dir_all(dir).ok();
    }
}
