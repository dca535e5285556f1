//! Subcommand execution: each command runs the steps a preset supports and records verdicts.

use std::f64::consts::PI;
use std::path::Path;

use anyhow::{bail, Context, Result};
use qdlab::domains::{self, DomainSpec};
use qdlab::dynamics::{
    basins, critical_orbit_audit, find_fixed_points, model_map, model_orbits_converge, orbit, random_rational,
    write_orbits_csv, FixedClass, OrbitRecord,
};
use qdlab::heleshaw::{
    build_potential, chain, component_count, droplet_from_coincidence, obstacle_solve, perturb_to_nonsingular, Source,
};
use qdlab::numerics::{c64, ExtComplex, Polynomial, RationalFunction, C64};
use qdlab::quadcheck::{admissible, check_identity, TestFunction};
use qdlab::scenario::{
    cardioid_in_ellipse, cubic_function, cubic_setup, hypotrochoid, hypotrochoid_alpha, packing_setup,
    sharp_uqd_order2, tangent_discs, Setup,
};
use qdlab::topology::{
    audit_droplet, check_ovals_bound, check_theorem_a, concentric_circles, curvature_peaks,
    extract_ovals, packing_check, topology_report, Packing, QdKind,
};
use qdlab::transforms::{fill_polylines, verify_schwarz_identity, write_pgm, ComplementRaster, Grid, RasterDroplet};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::json;

use crate::report::{Manifest, Output};
use crate::scenario::{DynamicsParams, Preset, Scenario};
use crate::svg::{mask_polys, Figure, Item};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Domain,
    Check,
    Chain,
    Topo,
    Dyn,
    Render,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Domain => "domain",
            Command::Check => "check",
            Command::Chain => "chain",
            Command::Topo => "topo",
            Command::Dyn => "dyn",
            Command::Render => "render",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Settings {
    /// Cells per unit length: h = 1/grid.
    pub grid: usize,
    pub tol: f64,
    pub seed: u64,
}

pub const DEFAULT_GRID: usize = 128;
pub const DEFAULT_TOL: f64 = 1e-6;

impl Settings {
    pub fn resolve(sc: &Scenario, grid: Option<usize>, tol: Option<f64>, seed: Option<u64>) -> Result<Settings> {
        let s = Settings {
            grid: grid.or(sc.grid).unwrap_or(DEFAULT_GRID),
            tol: tol.or(sc.tol).unwrap_or(DEFAULT_TOL),
            seed: seed.or(sc.seed).unwrap_or(0),
        };
        if s.grid < 16 {
            bail!("grid must be at least 16, got {}", s.grid);
        }
        if !(s.tol > 0.0) {
            bail!("tol must be positive, got {}", s.tol);
        }
        Ok(s)
    }

    fn h(&self) -> f64 {
        1.0 / self.grid as f64
    }
}

pub fn execute(cmd: Command, sc: &Scenario, s: Settings, out: &Path) -> Result<Manifest> {
    let mut o = Output::new(out)?;
    let p = &sc.preset;
    match cmd {
        Command::Domain => match (domain_list(p), droplet_jobs(p, s.h())?) {
            (Some(ds), _) => domain_step(&mut o, &ds)?,
            (None, Some(jobs)) => localization_step(&mut o, &jobs)?,
            _ => return unsupported(cmd, p),
        },
        Command::Check => match domain_list(p) {
            Some(ds) => check_step(&mut o, &ds, s)?,
            None => return unsupported(cmd, p),
        },
        Command::Chain => match p {
            Preset::CubicChain { times } => cubic_chain_step(&mut o, times.as_deref(), s)?,
            _ => match droplet_jobs(p, s.h())? {
                Some(jobs) => droplet_step(&mut o, &jobs, true)?,
                None => return unsupported(cmd, p),
            },
        },
        Command::Topo => match p {
            Preset::CubicChain { .. } => cubic_topo_step(&mut o, s)?,
            Preset::ConcentricCircles { k } => concentric_step(&mut o, *k, s)?,
            Preset::SharpBqdOrder3 => {
                order3_arithmetic(&mut o)?;
                theorem_a_step(&mut o, &domain_list(p).unwrap_or_default())?;
            }
            _ => match (domain_list(p), droplet_jobs(p, s.h())?) {
                (Some(ds), _) => theorem_a_step(&mut o, &ds)?,
                (None, Some(jobs)) => droplet_step(&mut o, &jobs, false)?,
                _ => return unsupported(cmd, p),
            },
        },
        Command::Dyn => match p {
            Preset::Dynamics(params) => dynamics_step(&mut o, params, s)?,
            _ => return unsupported(cmd, p),
        },
        Command::Render => match p {
            Preset::CubicChain { times } => {
                let (_, rec_fig) = run_cubic_chain(times.as_deref(), s)?;
                o.write_svg("chain.svg", &rec_fig)?;
            }
            Preset::ConcentricCircles { k } => {
                let mask = concentric_mask(*k, s);
                let mut fig = Figure::new(format!("concentric circles k={k}"));
                fig.push(Item::Region { polys: mask_polys(&mask)?, fill: "#4a7ab5".into() });
                o.write_svg("concentric.svg", &fig)?;
            }
            _ => match (domain_list(p), droplet_jobs(p, s.h())?) {
                (Some(ds), _) => {
                    for (name, spec) in &ds {
                        o.write_svg(&format!("{name}.svg"), &domain_figure(name, spec)?)?;
                    }
                }
                (None, Some(jobs)) => {
                    for job in &jobs {
                        let k = perturbed(&job.setup)?;
                        o.write_svg(&format!("{}.svg", job.label), &droplet_figure(&job.label, &job.setup.k0, &k)?)?;
                    }
                }
                _ => return unsupported(cmd, p),
            },
        },
    }
    o.finish(cmd.name(), &sc.name(), p.tag(), s.grid, s.tol, s.seed)
}

fn unsupported(cmd: Command, p: &Preset) -> Result<Manifest> {
    bail!("preset {} has no {} step", p.tag(), cmd.name())
}

// ---- domains -------------------------------------------------------------------------------

fn poly3() -> DomainSpec {
    let k = 2.0 * 2f64.sqrt() / 3.0;
    let phi = Polynomial::new(vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(-k, 0.0), c64(1.0 / 3.0, 0.0)]);
    DomainSpec::RiemannMap { phi: RationalFunction::from_poly(phi), unbounded: false }
}

fn domain_list(p: &Preset) -> Option<Vec<(String, DomainSpec)>> {
    let z0 = c64(0.0, 0.0);
    match p {
        Preset::Fig1Gallery => Some(vec![
            ("cardioid".into(), DomainSpec::Cardioid { scale: 1.0 }),
            ("neumann-oval".into(), DomainSpec::NeumannOval { a: c64(1.0, 0.0), b: c64(0.3, 0.0) }),
            ("ellipse-exterior".into(), DomainSpec::EllipseExterior { center: z0, a: 2.0, b: 1.0 }),
            ("airfoil-exterior".into(), DomainSpec::JoukowskyAirfoilExterior { c: c64(-0.1, 0.05) }),
        ]),
        Preset::SharpBqdOrder3 => Some(vec![("poly3".into(), poly3())]),
        Preset::Domains { domains } => Some(domains.iter().map(|d| (d.name.clone(), d.spec.clone())).collect()),
        _ => None,
    }
}

fn domain_step(o: &mut Output, ds: &[(String, DomainSpec)]) -> Result<()> {
    for (name, spec) in ds {
        let b = domains::boundary(spec, 1024).with_context(|| format!("domain {name}"))?;
        o.write_with(&format!("{name}/boundary.csv"), |w| b.write_csv(w))?;
        let qd = domains::quadrature_data(spec).with_context(|| format!("domain {name}"))?;
        let singular = domains::singular_points(spec).unwrap_or_default();
        let univalence = match spec.conformal_map() {
            Ok(map) => Some(domains::univalence_check(&map.phi, map.unbounded, 2048)?),
            Err(_) => None,
        };
        if let Some(u) = &univalence {
            o.verdict(format!("{name}/univalent"), u.univalent, u);
        }
        o.verdict(format!("{name}/quadrature-data"), qd.degree() >= 1, json!({ "d": qd.degree(), "n": qd.node_count() }));
        o.write_json(
            &format!("{name}/domain.json"),
            &json!({
                "name": name,
                "spec": spec,
                "unbounded": spec.is_unbounded(),
                "area": domains::area(spec).ok(),
                "quadrature": qd,
                "d": qd.degree(),
                "n": qd.node_count(),
                "singular_points": singular,
                "univalence": univalence,
            }),
        )?;
    }
    Ok(())
}

/// Monomials and far kernels for bounded domains; inverse monomials and kernels with poles
/// inside the complement for unbounded ones. Inadmissible candidates are dropped.
fn battery(spec: &DomainSpec) -> Result<Vec<TestFunction>> {
    let b = domains::boundary(spec, 64)?;
    let pts = &b.curves[0].points;
    let scale = b.all_points().map(|z| z.norm()).fold(1.0, f64::max);
    let mut cands = Vec::new();
    if spec.is_unbounded() {
        cands.extend((1..=3).map(TestFunction::InverseMonomial));
        cands.extend([8, 20, 28].map(|k| TestFunction::Cauchy(0.5 * (pts[k] + pts[64 - k]))));
    } else {
        cands.extend((0..=3).map(TestFunction::Monomial));
        cands.extend([c64(2.0, 0.0), c64(0.0, 2.0), c64(-2.0, 0.5)].map(|w| TestFunction::Cauchy(scale * w)));
    }
    Ok(cands.into_iter().filter(|f| admissible(spec, f).is_ok()).collect())
}

/// Schwarz residual tolerances at cell size h: 5e-3 (2e-2 near cusps) at h = 1/256, linear in h.
fn schwarz_tolerances(h: f64) -> (f64, f64) {
    let f = (256.0 * h).max(1.0);
    (5e-3 * f, 2e-2 * f)
}

fn check_step(o: &mut Output, ds: &[(String, DomainSpec)], s: Settings) -> Result<()> {
    let mut reports = Vec::new();
    for (name, spec) in ds {
        let qd = domains::quadrature_data(spec).with_context(|| format!("domain {name}"))?;
        let bat = battery(spec)?;
        let rep = check_identity(spec, &qd, &bat)?;
        o.verdict(format!("{name}/identity"), !bat.is_empty() && rep.max_error <= s.tol, json!({ "max_error": rep.max_error, "tol": s.tol }));
        let cr = ComplementRaster::from_spec(spec, s.h())?;
        let res = verify_schwarz_identity(spec, &cr, &qd, 512)?;
        let (tol_reg, tol_cusp) = schwarz_tolerances(s.h());
        o.verdict(
            format!("{name}/schwarz"),
            res.max_regular <= tol_reg && res.max_near_cusp <= tol_cusp,
            json!({ "residual": res, "tol_regular": tol_reg, "tol_near_cusp": tol_cusp }),
        );
        o.write_svg(&format!("{name}.svg"), &domain_figure(name, spec)?)?;
        reports.push(json!({ "name": name, "identity": rep, "schwarz": res }));
    }
    o.write_json("identity_report.json", &reports)
}

fn domain_kind(qd: &qdlab::numerics::QuadratureData, unbounded: bool) -> QdKind {
    match (unbounded, qd.has_pole_at_infinity(), qd.nodes.iter().any(|n| n.pole_order() >= 3)) {
        (true, true, _) => QdKind::UqdNodeAtInfinity,
        (true, false, _) => QdKind::Uqd,
        (false, _, true) => QdKind::Bqd,
        (false, _, false) => QdKind::BqdNoTripleNodes,
    }
}

fn theorem_a_step(o: &mut Output, ds: &[(String, DomainSpec)]) -> Result<()> {
    for (name, spec) in ds {
        let qd = domains::quadrature_data(spec)?;
        let conn = match spec {
            DomainSpec::RasterComplement { droplet, component } => topology_report(droplet)?.conn[*component],
            _ => 1,
        };
        let kind = domain_kind(&qd, spec.is_unbounded());
        let v = check_theorem_a(qd.degree(), qd.node_count(), kind, conn)?;
        o.verdict(
            format!("{name}/connectivity-bound"),
            v.pass,
            json!({ "d": qd.degree(), "n": qd.node_count(), "kind": kind, "verdict": v }),
        );
    }
    Ok(())
}

/// Bounded order-3 domains: every node partition of 3 allows connectivity 2 and no more.
fn order3_arithmetic(o: &mut Output) -> Result<()> {
    for (label, n, kind) in [("3", 1, QdKind::Bqd), ("2+1", 2, QdKind::BqdNoTripleNodes), ("1+1+1", 3, QdKind::BqdNoTripleNodes)] {
        let two = check_theorem_a(3, n, kind, 2)?;
        let three = check_theorem_a(3, n, kind, 3)?;
        o.verdict(
            format!("order3/partition-{label}"),
            two.pass && !three.pass && two.bound == 2,
            json!({ "n": n, "kind": kind, "bound": two.bound, "binding": two.binding }),
        );
    }
    Ok(())
}

fn domain_figure(name: &str, spec: &DomainSpec) -> Result<Figure> {
    let b = domains::boundary(spec, 1024)?;
    let polys: Vec<Vec<C64>> = b.curves.iter().map(|c| c.points.clone()).collect();
    let mut fig = Figure::new(name);
    let fill = if spec.is_unbounded() { "#bbbbbb" } else { "#4a7ab5" };
    fig.push(Item::Region { polys: polys.clone(), fill: fill.into() });
    fig.push(Item::Contour { polys, stroke: "black".into(), label: None });
    if let Ok(qd) = domains::quadrature_data(spec) {
        for (k, node) in qd.finite_nodes().enumerate() {
            if let ExtComplex::Finite(a) = node.at {
                fig.push(Item::Node { at: a, label: format!("node {k} order {}", node.pole_order()) });
            }
        }
    }
    Ok(fig)
}

// ---- droplets ------------------------------------------------------------------------------

enum Expect {
    Packing(Packing),
    Components(usize),
    UnboundedConn(usize),
}

struct Job {
    label: String,
    setup: Setup,
    expect: Expect,
}

fn droplet_jobs(p: &Preset, h: f64) -> Result<Option<Vec<Job>>> {
    let job = |label: &str, setup, expect| Job { label: label.into(), setup, expect };
    Ok(Some(match p {
        Preset::SharpUqdOrder2 => sharp_uqd_order2(h)
            .into_iter()
            .map(|(case, setup, c)| job(&format!("case-{case}"), setup, Expect::UnboundedConn(c)))
            .collect(),
        Preset::PackingDiscs { m } => {
            if *m < 1 {
                bail!("packing-discs needs m ≥ 1");
            }
            vec![job(&format!("discs-m{m}"), packing_setup(*m, h), Expect::Packing(Packing::DiscsInDisc(*m)))]
        }
        Preset::PackingCardioids { m } => {
            if *m != 1 {
                bail!("packing-cardioids is constructed for m = 1 only, got m = {m}");
            }
            vec![job("cardioids-m1", cardioid_in_ellipse(h), Expect::Packing(Packing::CardioidsInEllipse(1)))]
        }
        Preset::ApollonianSetups => vec![
            job("tangent-discs", tangent_discs(h), Expect::Components(2)),
            job("cardioid-in-ellipse", cardioid_in_ellipse(h), Expect::Components(3)),
        ],
        _ => return Ok(None),
    }))
}

fn perturbed(setup: &Setup) -> Result<RasterDroplet> {
    let p = build_potential(&setup.h, &setup.k0)?;
    Ok(perturb_to_nonsingular(&p, &p.k0, None)?)
}

fn localization_step(o: &mut Output, jobs: &[Job]) -> Result<()> {
    for job in jobs {
        let dir = o.root().join(&job.label);
        job.setup.k0.save(&dir, "K0")?;
        o.adopt_dir(&job.label)?;
        o.verdict(format!("{}/localization", job.label), !job.setup.k0.is_empty(), json!({ "cells": job.setup.k0.count() }));
    }
    Ok(())
}

/// Backs each localization off its singular end time, then audits the droplet.
fn droplet_step(o: &mut Output, jobs: &[Job], write_masks: bool) -> Result<()> {
    for job in jobs {
        let k = perturbed(&job.setup).with_context(|| job.label.clone())?;
        let c = component_count(&k);
        let audit = audit_droplet(&k, &job.setup.h)?;
        let name = &job.label;
        match job.expect {
            Expect::Packing(pk) => {
                let v = packing_check(pk, c);
                o.verdict(format!("{name}/packing-bound"), v.pass, &v);
            }
            Expect::Components(n) => o.verdict(format!("{name}/components"), c == n, json!({ "found": c, "expected": n })),
            Expect::UnboundedConn(n) => {
                let got = audit.report.unbounded_conn();
                o.verdict(format!("{name}/unbounded-connectivity"), got == n, json!({ "found": got, "expected": n }));
            }
        }
        o.verdict(format!("{name}/topology-audit"), audit.pass, json!({ "d": audit.d, "ovals": audit.ovals, "components": audit.components }));
        if write_masks {
            let dir = o.root().join(name);
            job.setup.k0.save(&dir, "K0")?;
            k.save(&dir, "K")?;
            o.adopt_dir(name)?;
        } else {
            o.write_json(&format!("{name}/topology.json"), &audit)?;
            o.write_with(&format!("{name}/ovals.csv"), |w| audit.report.write_csv(w))?;
        }
    }
    Ok(())
}

fn droplet_figure(label: &str, k0: &RasterDroplet, k: &RasterDroplet) -> Result<Figure> {
    let mut fig = Figure::new(label);
    fig.push(Item::Region { polys: mask_polys(k)?, fill: "#4a7ab5".into() });
    fig.push(Item::Contour { polys: mask_polys(k0)?, stroke: "#888888".into(), label: None });
    Ok(fig)
}

// ---- cubic chain ---------------------------------------------------------------------------

const PEAK_WINDOW: usize = 6;
const PEAK_THRESHOLD: f64 = PI / 2.0;

struct CubicChain {
    setup: Setup,
    rec: qdlab::heleshaw::ChainRecord,
}

fn run_cubic_chain(times: Option<&[f64]>, s: Settings) -> Result<(CubicChain, Figure)> {
    let setup = cubic_setup(s.h());
    let p = build_potential(&setup.h, &setup.k0)?;
    let t0 = p.t0();
    let times: Vec<f64> = match times {
        Some(t) => t.to_vec(),
        None => vec![0.27 * t0, 0.54 * t0, 0.81 * t0, t0],
    };
    let rec = chain(&p, &p.k0, &times, Source::Infinity)?;
    let mut fig = Figure::new("cubic chain");
    let palette = ["#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02"];
    for (i, (k, t)) in rec.droplets.iter().zip(&rec.times).enumerate().rev() {
        fig.push(Item::Contour {
            polys: mask_polys(k)?,
            stroke: palette[i % palette.len()].into(),
            label: Some(format!("t={t:.4}")),
        });
    }
    Ok((CubicChain { setup, rec }, fig))
}

fn cubic_chain_step(o: &mut Output, times: Option<&[f64]>, s: Settings) -> Result<()> {
    let (cc, fig) = run_cubic_chain(times, s)?;
    let rec = &cc.rec;
    rec.write_dir(&o.root().join("chain"))?;
    o.adopt_dir("chain")?;
    o.write_svg("chain.svg", &fig)?;
    let h = s.h();
    o.verdict("components", rec.components.iter().all(|&n| n == 1), &rec.components);
    let area_ok: Vec<bool> = rec
        .droplets
        .iter()
        .zip(&rec.times)
        .map(|(k, t)| (k.area() - PI * t).abs() <= 4.0 * h * k.perimeter())
        .collect();
    o.verdict("area-law", area_ok.iter().all(|&b| b), &area_ok);
    o.verdict("monotone", rec.monotonicity_violations.iter().all(|&n| n == 0), &rec.monotonicity_violations);
    // Hypotrochoid oracle for the times before the cusps form.
    let mut haus = Vec::new();
    for (k, &t) in rec.droplets.iter().zip(&rec.times) {
        if let Some(alpha) = hypotrochoid_alpha(t).filter(|_| t < rec.times[rec.times.len() - 1]) {
            let exact = fill_polylines(k.grid, &[hypotrochoid(alpha, 4096)]);
            haus.push(json!({ "t": t, "hausdorff_cells": k.hausdorff(&exact) / h }));
        }
    }
    let haus_ok = haus.iter().all(|v| v["hausdorff_cells"].as_f64().is_some_and(|x| x <= 2.0));
    o.verdict("hypotrochoid-oracle", haus_ok, &haus);
    let last = rec.droplets.last().context("empty chain")?;
    let peaks = terminal_peaks(last)?;
    o.verdict("terminal-cusps", peaks.len() == 3, json!({ "peaks": peaks.len(), "window": PEAK_WINDOW, "threshold": PEAK_THRESHOLD }));
    for (i, k) in rec.droplets.iter().enumerate() {
        let audit = audit_droplet(k, &cc.setup.h)?;
        o.verdict(format!("topology-audit/{i:03}"), audit.pass, json!({ "t": rec.times[i], "ovals": audit.ovals }));
    }
    // A second localization with the same quadrature function gives the same droplet.
    let common = Grid::centered(c64(0.0, 0.0), 0.55, h);
    let disc = RasterDroplet::from_fn(common, |z| z.norm() <= 0.45);
    let t = rec.times[rec.times.len() / 2];
    let p2 = build_potential(&cubic_function(), &disc)?;
    let k2 = droplet_from_coincidence(&obstacle_solve(&p2, &p2.k0, t)?.coincidence).regrid(common);
    let k1 = rec.droplets[rec.times.len() / 2].regrid(common);
    let d = k1.hausdorff(&k2) / h;
    o.verdict("uniqueness", d <= 2.0, json!({ "t": t, "hausdorff_cells": d }));
    Ok(())
}

fn terminal_peaks(k: &RasterDroplet) -> Result<Vec<(usize, f64)>> {
    let ovals = extract_ovals(k)?;
    Ok(match ovals.as_slice() {
        [one] => curvature_peaks(&one.points, PEAK_WINDOW, PEAK_THRESHOLD),
        _ => Vec::new(),
    })
}

fn cubic_topo_step(o: &mut Output, s: Settings) -> Result<()> {
    let setup = cubic_setup(s.h());
    let p = build_potential(&setup.h, &setup.k0)?;
    let k = droplet_from_coincidence(&obstacle_solve(&p, &p.k0, p.t0())?.coincidence);
    let audit = audit_droplet(&k, &setup.h)?;
    o.verdict("topology-audit", audit.pass, json!({ "d": audit.d, "ovals": audit.ovals, "components": audit.components }));
    let peaks = terminal_peaks(&k)?;
    o.verdict("terminal-cusps", peaks.len() == 3, json!({ "peaks": peaks.len() }));
    o.write_json("topology.json", &audit)?;
    o.write_with("ovals.csv", |w| audit.report.write_csv(w))
}

// ---- concentric circles --------------------------------------------------------------------

fn concentric_mask(k: usize, s: Settings) -> RasterDroplet {
    // Bands of width 1/k in the unit disc.
    concentric_circles(k, s.h(), 1.0 / k as f64)
}

fn concentric_step(o: &mut Output, k: usize, s: Settings) -> Result<()> {
    if k == 0 {
        bail!("concentric-circles needs k ≥ 1");
    }
    let mask = concentric_mask(k, s);
    let report = topology_report(&mask)?;
    let lhs = report.ovals as i64 + report.q_odd as i64 + 4 * (report.q as i64 - report.q_j(1) as i64);
    // Smallest order d with lhs ≤ 2d + 2.
    let d_min = ((lhs - 2).max(0) as usize).div_ceil(2);
    let expected = match k {
        4 => Some(10),
        5 => Some(14),
        _ => None,
    };
    let bound = check_ovals_bound(&report, d_min);
    o.verdict(
        "lhs",
        expected.is_none_or(|e| e == lhs) && bound.pass,
        json!({ "lhs": lhs, "expected": expected, "implied_min_d": d_min, "ovals": report.ovals, "q": report.q, "q_odd": report.q_odd }),
    );
    o.write_json("topology.json", &report)?;
    o.write_with("ovals.csv", |w| report.write_csv(w))
}

// ---- dynamics ------------------------------------------------------------------------------

fn random_quadratic(rng: &mut ChaCha8Rng) -> RationalFunction {
    use rand::Rng;
    let mut c = || c64(rng.sample(StandardNormal), rng.sample(StandardNormal));
    RationalFunction::from_poly(Polynomial::new(vec![c(), c(), c()]))
}

fn dynamics_step(o: &mut Output, params: &DynamicsParams, s: Settings) -> Result<()> {
    if params.degrees.iter().any(|&d| d < 2) || params.degrees.is_empty() {
        bail!("dynamics degrees must be ≥ 2");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut rows = String::from("map,degree,critical_multiplicity,attracting,violations,budget_exhausted\n");
    let (mut mult_bad, mut fatou_bad, mut pairing_bad) = (0, 0, 0);
    let mut first = None;
    for i in 0..params.maps {
        let d = params.degrees[i % params.degrees.len()];
        let r = random_rational(d, &mut rng);
        let a = critical_orbit_audit(&r, params.budget)?;
        mult_bad += usize::from(a.critical_multiplicity != 2 * d - 2);
        fatou_bad += usize::from(a.attracting > 2 * d - 2);
        pairing_bad += usize::from(!a.passes());
        rows += &format!("{i},{d},{},{},{},{}\n", a.critical_multiplicity, a.attracting, a.violations.len(), a.budget_exhausted);
        if first.is_none() {
            first = Some(r);
        }
    }
    o.write("random_maps.csv", rows)?;
    o.verdict("critical-multiplicity", mult_bad == 0, json!({ "maps": params.maps, "failures": mult_bad }));
    o.verdict("attracting-bound", fatou_bad == 0, json!({ "maps": params.maps, "failures": fatou_bad }));
    o.verdict("critical-orbit-pairing", pairing_bad == 0, json!({ "maps": params.maps, "failures": pairing_bad }));

    let mut worst = 0;
    for _ in 0..params.quadratics {
        let h = random_quadratic(&mut rng);
        let fixed = find_fixed_points(&h)?;
        let n = fixed.iter().filter(|f| !f.location.is_infinite() && f.class != FixedClass::Repelling).count();
        worst = worst.max(n);
    }
    o.verdict("quadratic-non-repelling", worst <= 1, json!({ "maps": params.quadratics, "max_non_repelling": worst }));

    for nu in &params.nu {
        let tag = nu.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("-");
        let mm = model_map(nu)?;
        let samples: Vec<C64> = mm.coarse.grid.map(|z| z).into_iter().step_by(97).collect();
        let converge = model_orbits_converge(&mm, &samples, 200);
        let mut want = nu.clone();
        want.sort_unstable();
        let pass = mm.connectivity == nu.len() && mm.sorted_degrees() == want && mm.max_on_v < mm.eps && converge;
        o.verdict(format!("model/{tag}"), pass, json!({ "model": mm, "orbits_converge": converge }));
    }

    if let Some(r) = first {
        let fixed = find_fixed_points(&r)?;
        let attracting: Vec<(usize, ExtComplex)> = fixed
            .iter()
            .enumerate()
            .filter(|(_, f)| f.class == FixedClass::Attracting)
            .map(|(i, f)| (i, f.location))
            .collect();
        let orbits: Vec<OrbitRecord> =
            r.critical_points()?.iter().map(|&(c, _)| orbit(&r, c, &attracting, params.budget)).collect();
        o.write_with("critical_orbits.csv", |w| {
            write_orbits_csv(w, &orbits, |z| if z.is_infinite() { "inf" } else { "plane" })
        })?;
        let grid = Grid::centered(c64(0.0, 0.0), 2.0, 1.0 / 64.0);
        let labels = basins(&r, &fixed, grid, 200);
        let n = fixed.len().max(1);
        o.write_with("basins.pgm", |w| {
            write_pgm(w, grid.nx, grid.ny, |i, j| match labels[grid.index(i, j)] {
                Some(b) => (40 + 215 * b / n) as u8,
                None => 0,
            })
        })?;
    }
    Ok(())
}
