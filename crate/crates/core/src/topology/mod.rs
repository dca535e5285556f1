//! Raster topology: component labeling, oval extraction, complement connectivity, and the
//! connectivity and oval-count bound checkers.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::domains::winding_number;
use crate::numerics::{c64, pair, RationalFunction, C64};
use crate::transforms::{Grid, RasterDroplet};

#[derive(Debug, Error, PartialEq)]
pub enum TopologyError {
    #[error("contour touches itself near {at}")]
    PinchDetected { at: C64 },
    #[error("inconsistent inputs: {0}")]
    KindDomainMismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Connectivity {
    Four,
    Eight,
}

/// Component labels for the cells with a given mask value.
#[derive(Clone, Debug)]
pub struct Labels {
    pub labels: Vec<Option<usize>>,
    pub count: usize,
    /// Cells per component.
    pub sizes: Vec<usize>,
}

/// Labels connected components of cells whose value equals `value`.
pub fn label_cells(mask: &RasterDroplet, value: bool, conn: Connectivity) -> Labels {
    let g = mask.grid;
    let mut labels = vec![None; g.len()];
    let mut sizes = Vec::new();
    let nbrs: &[(isize, isize)] = match conn {
        Connectivity::Four => &[(1, 0), (-1, 0), (0, 1), (0, -1)],
        Connectivity::Eight => &[(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)],
    };
    let mut queue = VecDeque::new();
    for start in 0..g.len() {
        if mask.mask[start] != value || labels[start].is_some() {
            continue;
        }
        let id = sizes.len();
        let mut size = 0;
        labels[start] = Some(id);
        queue.push_back(start);
        while let Some(k) = queue.pop_front() {
            size += 1;
            let (i, j) = g.coords(k);
            for &(di, dj) in nbrs {
                let (a, b) = (i as isize + di, j as isize + dj);
                if a < 0 || b < 0 || a as usize >= g.nx || b as usize >= g.ny {
                    continue;
                }
                let kk = g.index(a as usize, b as usize);
                if mask.mask[kk] == value && labels[kk].is_none() {
                    labels[kk] = Some(id);
                    queue.push_back(kk);
                }
            }
        }
        sizes.push(size);
    }
    Labels { labels, count: sizes.len(), sizes }
}

/// Components of the set K (4-connectivity) or of its complement (8-connectivity).
pub fn label_components(mask: &RasterDroplet, conn: Connectivity) -> Labels {
    match conn {
        Connectivity::Four => label_cells(mask, true, Connectivity::Four),
        Connectivity::Eight => label_cells(mask, false, Connectivity::Eight),
    }
}

/// Complement components with the one touching the grid border marked as unbounded.
#[derive(Clone, Debug)]
pub struct ComplementComponents {
    pub labels: Vec<Option<usize>>,
    pub count: usize,
    pub unbounded: usize,
}

pub fn complement_components(k: &RasterDroplet) -> ComplementComponents {
    let l = label_cells(k, false, Connectivity::Eight);
    let g = k.grid;
    let border = (0..g.nx)
        .flat_map(|i| [g.index(i, 0), g.index(i, g.ny - 1)])
        .chain((0..g.ny).flat_map(|j| [g.index(0, j), g.index(g.nx - 1, j)]))
        .find_map(|c| l.labels[c]);
    ComplementComponents { labels: l.labels, count: l.count, unbounded: border.unwrap_or(usize::MAX) }
}

/// A closed marching-squares contour with K on its left.
#[derive(Clone, Debug, Serialize)]
pub struct Oval {
    #[serde(with = "pair::vec")]
    pub points: Vec<C64>,
    /// Label of the K component (4-connected) on the left.
    pub k_component: usize,
    /// Label of the complement component (8-connected) on the right.
    pub complement_component: usize,
}

struct Segment {
    from: u64,
    to: u64,
    from_pt: C64,
    /// Cell indices of the K corner and the complement corner of the `from` edge.
    k_cell: usize,
    c_cell: usize,
    saddle: Option<usize>,
}

fn edge_key(horizontal: bool, i: isize, j: isize) -> u64 {
    // Corners range over −1..=n; shift to non-negative.
    let (a, b) = ((i + 2) as u64, (j + 2) as u64);
    (a << 33) | (b << 1) | horizontal as u64
}

/// Contours of K at the half level between cell centers, separating diagonal K corners
/// (K is 4-connected). Errors if a contour passes twice through one saddle.
pub fn extract_ovals(k: &RasterDroplet) -> Result<Vec<Oval>, TopologyError> {
    let (ovals, pinch) = trace(k);
    match pinch {
        Some(at) => Err(TopologyError::PinchDetected { at }),
        None => Ok(ovals),
    }
}

fn trace(k: &RasterDroplet) -> (Vec<Oval>, Option<C64>) {
    let g = k.grid;
    let kl = label_cells(k, true, Connectivity::Four);
    let cl = complement_components(k);
    let val = |i: isize, j: isize| k.get_signed(i, j);
    let cell = |i: isize, j: isize| -> usize {
        // Corners outside the grid belong to the unbounded complement; clamp to the border cell.
        let a = i.clamp(0, g.nx as isize - 1) as usize;
        let b = j.clamp(0, g.ny as isize - 1) as usize;
        g.index(a, b)
    };
    let pt = |x: f64, y: f64| g.origin + c64((x + 0.5) * g.h, (y + 0.5) * g.h);

    let mut segs: Vec<Segment> = Vec::new();
    let mut saddle_count = 0usize;
    for j in -1..g.ny as isize {
        for i in -1..g.nx as isize {
            // Corners in counterclockwise order and the edge leaving each one.
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let v: Vec<bool> = corners.iter().map(|&(a, b)| val(a, b)).collect();
            if v.iter().all(|&x| x) || v.iter().all(|&x| !x) {
                continue;
            }
            let edges = [
                (edge_key(true, i, j), pt(i as f64 + 0.5, j as f64)),
                (edge_key(false, i + 1, j), pt(i as f64 + 1.0, j as f64 + 0.5)),
                (edge_key(true, i, j + 1), pt(i as f64 + 0.5, j as f64 + 1.0)),
                (edge_key(false, i, j), pt(i as f64, j as f64 + 0.5)),
            ];
            let saddle = (v[0] == v[2] && v[1] == v[3] && v[0] != v[1]).then(|| {
                saddle_count += 1;
                saddle_count - 1
            });
            // Each exit (K → not K along the walk) links to the previous entry.
            for e in 0..4 {
                let (a, b) = (v[e], v[(e + 1) % 4]);
                if a && !b {
                    let mut p = (e + 3) % 4;
                    while !(!v[p] && v[(p + 1) % 4]) {
                        p = (p + 3) % 4;
                    }
                    let (ka, kb) = (corners[e], corners[(e + 1) % 4]);
                    segs.push(Segment {
                        from: edges[e].0,
                        to: edges[p].0,
                        from_pt: edges[e].1,
                        k_cell: cell(ka.0, ka.1),
                        c_cell: if kb.0 < 0 || kb.1 < 0 || kb.0 >= g.nx as isize || kb.1 >= g.ny as isize {
                            usize::MAX
                        } else {
                            cell(kb.0, kb.1)
                        },
                        saddle,
                    });
                }
            }
        }
    }
    let by_start: HashMap<u64, usize> = segs.iter().enumerate().map(|(n, s)| (s.from, n)).collect();
    let mut used = vec![false; segs.len()];
    let mut ovals = Vec::new();
    let mut saddle_owner: HashMap<usize, usize> = HashMap::new();
    let mut pinch = None;
    for s0 in 0..segs.len() {
        if used[s0] {
            continue;
        }
        let id = ovals.len();
        let mut points = Vec::new();
        let mut s = s0;
        let mut c_label = None;
        while !used[s] {
            used[s] = true;
            points.push(segs[s].from_pt);
            if c_label.is_none() && segs[s].c_cell != usize::MAX {
                c_label = cl.labels[segs[s].c_cell];
            }
            if let Some(sd) = segs[s].saddle {
                if let Some(&owner) = saddle_owner.get(&sd) {
                    if owner == id && pinch.is_none() {
                        pinch = Some(segs[s].from_pt);
                    }
                } else {
                    saddle_owner.insert(sd, id);
                }
            }
            s = by_start[&segs[s].to];
        }
        ovals.push(Oval {
            points,
            k_component: kl.labels[segs[s0].k_cell].unwrap_or(0),
            complement_component: c_label.unwrap_or(cl.unbounded),
        });
    }
    (ovals, pinch)
}

/// Boundary curves of one complement component, oriented with that component on the left.
pub fn component_boundary(k: &RasterDroplet, component: usize) -> Vec<Vec<C64>> {
    trace(k)
        .0
        .into_iter()
        .filter(|o| o.complement_component == component)
        .map(|o| {
            let mut p = o.points;
            p.reverse();
            p
        })
        .collect()
}

/// Connectivity of one complement component U: the number of components of the sphere
/// minus U, counted as 4-connected components of the grid minus U.
pub fn component_connectivity(labels: &[Option<usize>], grid: Grid, component: usize, unbounded: bool) -> usize {
    let others = RasterDroplet::new(grid, labels.iter().map(|&l| l != Some(component)).collect());
    let n = label_cells(&others, true, Connectivity::Four);
    if unbounded {
        n.count
    } else {
        // Cells off the grid join whichever component touches the border.
        let g = grid;
        let mut border = std::collections::BTreeSet::new();
        for i in 0..g.nx {
            for j in [0, g.ny - 1] {
                if let Some(l) = n.labels[g.index(i, j)] {
                    border.insert(l);
                }
            }
        }
        for j in 0..g.ny {
            for i in [0, g.nx - 1] {
                if let Some(l) = n.labels[g.index(i, j)] {
                    border.insert(l);
                }
            }
        }
        n.count + 1 - border.len()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TopologyReport {
    pub ovals: usize,
    #[serde(skip)]
    pub polylines: Vec<Vec<C64>>,
    /// Components of the complement, including the unbounded one.
    pub q: usize,
    /// q_j: number of complement components of connectivity j.
    pub q_hist: BTreeMap<usize, usize>,
    pub q_odd: usize,
    /// Connectivity per complement component label.
    pub conn: Vec<usize>,
    pub unbounded_component: usize,
    pub k_components: usize,
    /// Nesting tree of the ovals as a canonical parenthesis string.
    pub tree_code: String,
}

impl TopologyReport {
    pub fn q_j(&self, j: usize) -> usize {
        self.q_hist.get(&j).copied().unwrap_or(0)
    }

    /// Connectivity of the unbounded complement component.
    pub fn unbounded_conn(&self) -> usize {
        self.conn.get(self.unbounded_component).copied().unwrap_or(0)
    }

    /// Oval polylines as CSV rows `oval_id,x,y`.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "oval_id,x,y")?;
        for (id, p) in self.polylines.iter().enumerate() {
            for z in p {
                writeln!(w, "{id},{:.6},{:.6}", z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Full topology report for a pinch-free mask with a one-cell margin.
pub fn topology_report(k: &RasterDroplet) -> Result<TopologyReport, TopologyError> {
    let ovals = extract_ovals(k)?;
    let cc = complement_components(k);
    let kc = label_cells(k, true, Connectivity::Four);
    let conn: Vec<usize> = (0..cc.count)
        .map(|c| component_connectivity(&cc.labels, k.grid, c, c == cc.unbounded))
        .collect();
    let mut q_hist = BTreeMap::new();
    for &j in &conn {
        *q_hist.entry(j).or_insert(0) += 1;
    }
    let q_odd = q_hist.iter().filter(|(j, _)| *j % 2 == 1).map(|(_, n)| n).sum();
    let polylines: Vec<Vec<C64>> = ovals.iter().map(|o| o.points.clone()).collect();
    Ok(TopologyReport {
        ovals: ovals.len(),
        tree_code: nesting_code(&polylines),
        polylines,
        q: cc.count,
        q_hist,
        q_odd,
        conn,
        unbounded_component: cc.unbounded,
        k_components: kc.count,
    })
}

/// Canonical encoding of the oval nesting tree (root = the point at ∞).
pub fn nesting_code(ovals: &[Vec<C64>]) -> String {
    let n = ovals.len();
    let inside = |a: usize, b: usize| winding_number(&ovals[b], ovals[a][0]) != 0;
    let parent: Vec<Option<usize>> = (0..n)
        .map(|a| {
            (0..n)
                .filter(|&b| b != a && inside(a, b))
                .min_by(|&x, &y| poly_area(&ovals[x]).total_cmp(&poly_area(&ovals[y])))
        })
        .collect();
    fn code(node: Option<usize>, parent: &[Option<usize>]) -> String {
        let mut kids: Vec<String> = (0..parent.len())
            .filter(|&c| parent[c] == node)
            .map(|c| code(Some(c), parent))
            .collect();
        kids.sort();
        let mut s = String::from("(");
        for k in kids {
            s.push_str(&k);
        }
        s.push(')');
        s
    }
    code(None, &parent)
}

fn poly_area(p: &[C64]) -> f64 {
    let n = p.len();
    (0..n)
        .map(|k| {
            let (a, b) = (p[k], p[(k + 1) % n]);
            a.re * b.im - a.im * b.re
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

/// Kind of quadrature domain for the connectivity theorem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum QdKind {
    /// Unbounded, all nodes finite.
    Uqd,
    /// Unbounded with a node at ∞.
    UqdNodeAtInfinity,
    Bqd,
    /// Bounded, every node of multiplicity at most 2.
    BqdNoTripleNodes,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub pass: bool,
    pub value: i64,
    pub bound: i64,
    /// Name of the binding bound.
    pub binding: String,
}

/// Connectivity bound check in terms of the order d and the number n of distinct nodes.
/// Below the order thresholds (d < 2 unbounded, d < 3 bounded) the domain must be simply
/// connected and that bound is returned.
pub fn check_theorem_a(d: usize, n: usize, kind: QdKind, conn: usize) -> Result<Verdict, TopologyError> {
    let (d, n_i) = (d as i64, n as i64);
    if n_i > d + 1 || (n == 0 && d > 0) {
        return Err(TopologyError::KindDomainMismatch(format!("n = {n} is inconsistent with d = {d}")));
    }
    let bounded = matches!(kind, QdKind::Bqd | QdKind::BqdNoTripleNodes);
    let threshold = if bounded { 3 } else { 2 };
    let mut cands: Vec<(i64, String)> = Vec::new();
    if d < threshold {
        cands.push((1, "simply-connected".into()));
    } else {
        match kind {
            QdKind::Uqd => {
                cands.push((d + n_i - 1, "d+n-1".into()));
                cands.push((2 * d - 2, "2d-2".into()));
            }
            QdKind::UqdNodeAtInfinity => {
                cands.push((d + n_i - 1, "d+n-1".into()));
                cands.push((2 * d - 2, "2d-2".into()));
                cands.push((d + n_i - 2, "d+n-2".into()));
            }
            QdKind::Bqd => {
                cands.push((d + n_i - 2, "d+n-2".into()));
                cands.push((2 * d - 4, "2d-4".into()));
            }
            QdKind::BqdNoTripleNodes => {
                cands.push((d + n_i - 3, "d+n-3".into()));
                cands.push((2 * d - 4, "2d-4".into()));
            }
        }
        // Single node: polynomial quadrature function or a one-node bounded domain.
        let single = n == 1 && (bounded || kind == QdKind::UqdNodeAtInfinity);
        if single {
            cands.push((d - 1, "d-1".into()));
        }
    }
    let (bound, binding) = cands.into_iter().min_by_key(|c| c.0).unwrap();
    Ok(Verdict { pass: conn as i64 <= bound, value: conn as i64, bound, binding })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OvalsVerdict {
    pub lhs: i64,
    pub rhs: i64,
    pub slack: i64,
    pub pass: bool,
    /// #ovals ≤ 2d − 2, applicable for d ≥ 3.
    pub ovals_bound: Option<Verdict>,
}

/// #ovals + q_odd + 4(q − q_1) ≤ 2d + 2, and #ovals ≤ 2d − 2 when d ≥ 3.
pub fn check_ovals_bound(report: &TopologyReport, d: usize) -> OvalsVerdict {
    let lhs = report.ovals as i64 + report.q_odd as i64 + 4 * (report.q as i64 - report.q_j(1) as i64);
    let rhs = 2 * d as i64 + 2;
    let ovals_bound = (d >= 3).then(|| {
        let b = 2 * d as i64 - 2;
        Verdict { pass: report.ovals as i64 <= b, value: report.ovals as i64, bound: b, binding: "2d-2".into() }
    });
    OvalsVerdict { lhs, rhs, slack: rhs - lhs, pass: lhs <= rhs, ovals_bound }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum Packing {
    /// m disjoint discs inside a disc: c ≤ 2m − 2.
    DiscsInDisc(usize),
    /// m disjoint cardioids inside an ellipse: c ≤ 3m.
    CardioidsInEllipse(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PackingVerdict {
    pub c: usize,
    pub bound: usize,
    pub pass: bool,
    pub equality: bool,
    /// Order and node count of the droplet's quadrature function.
    pub d: usize,
    pub n: usize,
}

pub fn packing_check(scenario: Packing, c: usize) -> PackingVerdict {
    let (bound, d, n) = match scenario {
        Packing::DiscsInDisc(m) => ((2 * m).saturating_sub(2), m, m),
        Packing::CardioidsInEllipse(m) => (3 * m, 1 + 2 * m, m + 1),
    };
    PackingVerdict { c, bound, pass: c <= bound, equality: c == bound, d, n }
}

/// k concentric circles of radii 1..k (scaled by `scale`); the annular bands alternate with
/// the outermost band in K.
pub fn concentric_circles(k: usize, h: f64, scale: f64) -> RasterDroplet {
    let r_max = scale * k as f64;
    let g = Grid::centered(c64(0.0, 0.0), r_max + 4.0 * h, h);
    RasterDroplet::from_fn(g, |z| {
        let r = z.norm() / scale;
        if r >= k as f64 {
            return false;
        }
        // Band index counted from the outside: band 0 lies between circles k−1 and k.
        let band = k - 1 - r.floor() as usize;
        band % 2 == 0
    })
}

/// Corners of a closed polyline: maximal runs of vertices whose turning angle between the
/// chords to the vertices `window` steps back and ahead is at least `threshold`; one
/// (index, angle) per run, at the run's largest angle.
pub fn curvature_peaks(points: &[C64], window: usize, threshold: f64) -> Vec<(usize, f64)> {
    let mut pts = points;
    if pts.len() > 1 && pts[0] == pts[pts.len() - 1] {
        pts = &pts[..pts.len() - 1];
    }
    let n = pts.len();
    if n < 2 * window + 1 || window == 0 {
        return Vec::new();
    }
    let angle: Vec<f64> = (0..n)
        .map(|i| {
            let a = pts[i] - pts[(i + n - window) % n];
            let b = pts[(i + window) % n] - pts[i];
            (b / a).arg().abs()
        })
        .collect();
    let hot: Vec<bool> = angle.iter().map(|&a| a >= threshold).collect();
    let Some(start) = (0..n).find(|&i| !hot[i]) else {
        return Vec::new();
    };
    let mut peaks = Vec::new();
    let mut best: Option<(usize, f64)> = None;
    for s in 1..=n {
        let i = (start + s) % n;
        if hot[i] {
            if best.is_none_or(|(_, a)| angle[i] > a) {
                best = Some((i, angle[i]));
            }
        } else if let Some(b) = best.take() {
            peaks.push(b);
        }
    }
    peaks
}

/// Quadrature data of one complement component, read off from the poles of the droplet's
/// quadrature function that lie in it (plus ∞ for the unbounded one when h has a
/// non-constant polynomial part).
#[derive(Clone, Debug, Serialize)]
pub struct ComponentAudit {
    pub component: usize,
    pub bounded: bool,
    pub d: usize,
    pub n: usize,
    pub kind: QdKind,
    pub conn: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct DropletAudit {
    pub report: TopologyReport,
    pub d: usize,
    pub ovals: OvalsVerdict,
    pub components: Vec<ComponentAudit>,
    pub pass: bool,
}

/// Runs the oval inequality with d = deg h and the connectivity bound on every complement
/// component of K.
pub fn audit_droplet(k: &RasterDroplet, h: &RationalFunction) -> Result<DropletAudit, TopologyError> {
    let report = topology_report(k)?;
    let cc = complement_components(k);
    let mut d_of = vec![0usize; cc.count];
    let mut n_of = vec![0usize; cc.count];
    let mut triple = vec![false; cc.count];
    for &(a, m) in h.poles() {
        let label = match k.grid.locate(a) {
            Some((i, j)) => match cc.labels[k.grid.index(i, j)] {
                Some(l) => l,
                None => {
                    return Err(TopologyError::KindDomainMismatch(format!("pole {a} lies in the droplet")));
                }
            },
            None => cc.unbounded,
        };
        if label < cc.count {
            d_of[label] += m;
            n_of[label] += 1;
            triple[label] |= m >= 3;
        }
    }
    let poly_deg = h.polynomial_part().degree();
    let at_infinity = poly_deg >= 1 && !h.polynomial_part().is_zero();
    if at_infinity && cc.unbounded < cc.count {
        d_of[cc.unbounded] += poly_deg;
        n_of[cc.unbounded] += 1;
    }
    let mut components = Vec::new();
    for c in 0..cc.count {
        let bounded = c != cc.unbounded;
        let kind = match (bounded, at_infinity, triple[c]) {
            (true, _, false) => QdKind::BqdNoTripleNodes,
            (true, _, true) => QdKind::Bqd,
            (false, true, _) => QdKind::UqdNodeAtInfinity,
            (false, false, _) => QdKind::Uqd,
        };
        let conn = report.conn[c];
        let verdict = check_theorem_a(d_of[c], n_of[c], kind, conn)?;
        components.push(ComponentAudit { component: c, bounded, d: d_of[c], n: n_of[c], kind, conn, verdict });
    }
    let d = h.degree();
    let ovals = check_ovals_bound(&report, d);
    let pass = ovals.pass
        && ovals.ovals_bound.as_ref().is_none_or(|v| v.pass)
        && components.iter().all(|c| c.verdict.pass);
    Ok(DropletAudit { report, d, ovals, components, pass })
}

/// SVG path data for closed polylines, coordinates at 1e-4 precision with y flipped.
pub fn svg_path(polys: &[Vec<C64>]) -> String {
    let mut s = String::new();
    for p in polys {
        for (n, z) in p.iter().enumerate() {
            let _ = write!(s, "{}{:.4},{:.4} ", if n == 0 { "M" } else { "L" }, z.re, -z.im);
        }
        s.push_str("Z ");
    }
    s.trim_end().to_string()
}

#[cfg(test)]
mod tests;
