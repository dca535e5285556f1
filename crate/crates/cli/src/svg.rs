//! Deterministic SVG output: items are emitted in the given order, coordinates at 1e-4
//! precision with y pointing up.

use std::fmt::Write;

use qdlab::numerics::C64;
use qdlab::topology::{extract_ovals, svg_path, TopologyError};
use qdlab::transforms::RasterDroplet;

#[derive(Clone, Debug)]
pub enum Item {
    /// Closed polylines filled with the even-odd rule, as a single path.
    Region { polys: Vec<Vec<C64>>, fill: String },
    /// Closed polylines, stroked; a label puts them in their own titled layer.
    Contour { polys: Vec<Vec<C64>>, stroke: String, label: Option<String> },
    /// Open polyline.
    Orbit { points: Vec<C64>, stroke: String },
    Node { at: C64, label: String },
}

#[derive(Clone, Debug, Default)]
pub struct Figure {
    pub title: String,
    pub items: Vec<Item>,
}

impl Figure {
    pub fn new(title: impl Into<String>) -> Self {
        Figure { title: title.into(), items: Vec::new() }
    }

    pub fn push(&mut self, item: Item) -> &mut Self {
        self.items.push(item);
        self
    }
}

/// Boundary contours of a mask (K on the left of each).
pub fn mask_polys(k: &RasterDroplet) -> Result<Vec<Vec<C64>>, TopologyError> {
    Ok(extract_ovals(k)?.into_iter().map(|o| o.points).collect())
}

fn points(item: &Item) -> Box<dyn Iterator<Item = C64> + '_> {
    match item {
        Item::Region { polys, .. } | Item::Contour { polys, .. } => Box::new(polys.iter().flatten().copied()),
        Item::Orbit { points, .. } => Box::new(points.iter().copied()),
        Item::Node { at, .. } => Box::new(std::iter::once(*at)),
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

pub fn render_svg(fig: &Figure) -> String {
    let (mut lo, mut hi) = (C64::new(f64::INFINITY, f64::INFINITY), C64::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for z in fig.items.iter().flat_map(points).filter(|z| z.re.is_finite() && z.im.is_finite()) {
        lo = C64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = C64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let mut s = String::new();
    let ns = "http://www.w3.org/2000/svg";
    if !lo.re.is_finite() {
        let _ = writeln!(s, r#"<svg xmlns="{ns}" viewBox="0 0 1 1" width="1" height="1">"#);
        let _ = writeln!(s, "<title>{}</title>", escape(&fig.title));
        s.push_str("</svg>\n");
        return s;
    }
    let extent = (hi.re - lo.re).max(hi.im - lo.im).max(1e-3);
    let margin = 0.05 * extent;
    let (x0, y0) = (lo.re - margin, -hi.im - margin);
    let (w, h) = (hi.re - lo.re + 2.0 * margin, hi.im - lo.im + 2.0 * margin);
    let stroke = 0.003 * extent;
    let font = 0.03 * extent;
    let _ = writeln!(
        s,
        r#"<svg xmlns="{ns}" viewBox="{x0:.4} {y0:.4} {w:.4} {h:.4}" width="{:.0}" height="{:.0}">"#,
        600.0 * w / w.max(h),
        600.0 * h / w.max(h)
    );
    let _ = writeln!(s, "<title>{}</title>", escape(&fig.title));
    for (n, item) in fig.items.iter().enumerate() {
        match item {
            Item::Region { polys, fill } => {
                let _ = writeln!(s, r#"<path d="{}" fill="{fill}" fill-rule="evenodd" stroke="none"/>"#, svg_path(polys));
            }
            Item::Contour { polys, stroke: colour, label } => {
                let path = format!(r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="{stroke:.4}"/>"#, svg_path(polys));
                match label {
                    Some(l) => {
                        let _ = writeln!(s, r#"<g id="layer-{n}"><title>{}</title>"#, escape(l));
                        let _ = writeln!(s, "{path}");
                        if let Some(z) = polys.iter().flatten().max_by(|a, b| a.re.total_cmp(&b.re)) {
                            let _ = writeln!(
                                s,
                                r#"<text x="{:.4}" y="{:.4}" font-size="{font:.4}" fill="{colour}">{}</text>"#,
                                z.re + 0.5 * font,
                                -z.im,
                                escape(l)
                            );
                        }
                        s.push_str("</g>\n");
                    }
                    None => {
                        let _ = writeln!(s, "{path}");
                    }
                }
            }
            Item::Orbit { points, stroke: colour } => {
                let mut d = String::new();
                for (k, z) in points.iter().filter(|z| z.re.is_finite() && z.im.is_finite()).enumerate() {
                    let _ = write!(d, "{}{:.4},{:.4} ", if k == 0 { "M" } else { "L" }, z.re, -z.im);
                }
                let _ = writeln!(
                    s,
                    r#"<path d="{}" fill="none" stroke="{colour}" stroke-width="{:.4}"/>"#,
                    d.trim_end(),
                    0.5 * stroke
                );
            }
            Item::Node { at, label } => {
                let _ = writeln!(
                    s,
                    r#"<circle cx="{:.4}" cy="{:.4}" r="{:.4}" fill="black"><title>{}</title></circle>"#,
                    at.re,
                    -at.im,
                    2.0 * stroke,
                    escape(label)
                );
            }
        }
    }
    s.push_str("</svg>\n");
    s
}
