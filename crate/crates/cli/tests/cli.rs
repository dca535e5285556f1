use std::fs;
use std::path::Path;
use std::process::Command;

use qdlab::numerics::{c64, C64};
use qdlab::transforms::{Grid, RasterDroplet};
use qdlab_cli::scenario::{Preset, Scenario};
use qdlab_cli::svg::{mask_polys, render_svg, Figure, Item};

fn qdlab(args: &[&str], out: &Path) -> (i32, String, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_qdlab")).args(args).arg("--out").arg(out).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into(), String::from_utf8_lossy(&o.stderr).into())
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn circle(c: C64, r: f64, n: usize) -> Vec<C64> {
    (0..=n).map(|k| c + C64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect()
}

#[test]
fn empty_figure_is_a_valid_svg() {
    let s = render_svg(&Figure::new("empty"));
    assert!(s.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(s.trim_end().ends_with("</svg>"));
    assert!(!s.contains("<path"));
}

#[test]
fn disc_mask_is_one_path() {
    let k = RasterDroplet::from_fn(Grid::centered(c64(0.0, 0.0), 1.2, 1.0 / 32.0), |z| z.norm() <= 1.0);
    let mut fig = Figure::new("disc");
    fig.push(Item::Region { polys: mask_polys(&k).unwrap(), fill: "blue".into() });
    let s = render_svg(&fig);
    assert_eq!(s.matches("<path").count(), 1);
    // Coordinates carry exactly four decimals.
    let d = s.split("d=\"").nth(1).unwrap().split('"').next().unwrap();
    for tok in d.split([' ', ',']).map(|t| t.trim_start_matches(['M', 'L'])).filter(|t| !t.is_empty() && *t != "Z") {
        assert_eq!(tok.split('.').nth(1).map(str::len), Some(4), "{tok}");
    }
    assert_eq!(s, render_svg(&fig));
}

#[test]
fn chain_layers_are_labelled_in_order() {
    let mut fig = Figure::new("chain");
    for (i, r) in [0.3, 0.5, 0.7].iter().enumerate() {
        fig.push(Item::Contour { polys: vec![circle(c64(0.0, 0.0), *r, 64)], stroke: "black".into(), label: Some(format!("t={i}")) });
    }
    let s = render_svg(&fig);
    assert_eq!(s.matches("<g id=\"layer-").count(), 3);
    let pos: Vec<usize> = (0..3).map(|i| s.find(&format!("<title>t={i}</title>")).unwrap()).collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn scenario_errors_carry_line_and_column() {
    let text = "{\n  \"schema\": 1,\n  \"preset\": \"packing-discs\",\n  \"m\": \"nine\"\n}";
    let e = Scenario::from_json(text, "bad.json").unwrap_err().to_string();
    assert!(e.starts_with("bad.json:"), "{e}");
    let loc: Vec<&str> = e.split(':').collect();
    assert!(loc[1].parse::<usize>().is_ok() && loc[2].parse::<usize>().is_ok(), "{e}");

    let e = Scenario::from_json("{\"schema\": 1,\n \"preset\": \"fig1-gallery\",", "cut.json").unwrap_err().to_string();
    assert!(e.starts_with("cut.json:2:"), "{e}");

    let e = Scenario::from_json(r#"{"schema": 2, "preset": "fig1-gallery"}"#, "v2.json").unwrap_err().to_string();
    assert!(e.contains("unsupported schema 2"), "{e}");
}

#[test]
fn presets_parse_with_parameters() {
    match Scenario::from_preset("packing-discs:5").unwrap().preset {
        Preset::PackingDiscs { m } => assert_eq!(m, 5),
        p => panic!("{p:?}"),
    }
    match Scenario::from_preset("concentric-circles").unwrap().preset {
        Preset::ConcentricCircles { k } => assert_eq!(k, 4),
        p => panic!("{p:?}"),
    }
    assert!(Scenario::from_preset("fig1-gallery:3").is_err());
    assert!(Scenario::from_preset("no-such-preset").is_err());
    let sc = Scenario::from_json(r#"{"schema": 1, "preset": "dynamics", "maps": 4, "seed": 9}"#, "x").unwrap();
    let back = Scenario::from_json(&serde_json::to_string(&sc).unwrap(), "y").unwrap();
    assert_eq!(back.seed, Some(9));
    match back.preset {
        Preset::Dynamics(p) => assert_eq!((p.maps, p.budget), (4, 10_000)),
        p => panic!("{p:?}"),
    }
}

#[test]
fn concentric_topology_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c5");
    let (code, stdout, _) = qdlab(&["topo", "--preset", "concentric-circles:5", "--grid", "64"], &out);
    assert_eq!(code, 0, "{stdout}");
    let m = manifest(&out);
    assert_eq!(m["schema"], 1);
    assert_eq!(m["pass"], true);
    assert_eq!(m["verdicts"][0]["detail"]["lhs"], 14);
    let arts: Vec<&str> = m["artifacts"].as_array().unwrap().iter().map(|a| a.as_str().unwrap()).collect();
    assert!(arts.windows(2).all(|w| w[0] < w[1]));
    assert!(arts.contains(&"ovals.csv") && arts.contains(&"topology.json"));
}

#[test]
fn runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("dyn.json");
    fs::write(&scenario, r#"{"schema": 1, "preset": "dynamics", "maps": 8, "quadratics": 8, "nu": [[1, 1]], "seed": 3}"#).unwrap();
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let (code, stdout, stderr) = qdlab(&["dyn", "--scenario", scenario.to_str().unwrap()], &out);
        assert_eq!(code, 0, "{stdout}{stderr}");
        let (_, _, _) = qdlab(&["render", "--preset", "sharp-bqd-order3"], &out.join("render"));
        let mut files: Vec<(String, Vec<u8>)> = Vec::new();
        for name in ["manifest.json", "random_maps.csv", "critical_orbits.csv", "basins.pgm", "render/poly3.svg"] {
            files.push((name.into(), fs::read(out.join(name)).unwrap()));
        }
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn exit_codes_follow_the_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("disc.json");
    fs::write(
        &scenario,
        r#"{"schema": 1, "preset": "domains", "grid": 64,
            "domains": [{"name": "unit", "kind": "Disc", "center": [0, 0], "radius": 1}]}"#,
    )
    .unwrap();
    let s = scenario.to_str().unwrap();
    let (ok, stdout, _) = qdlab(&["check", "--scenario", s], &dir.path().join("ok"));
    assert_eq!(ok, 0, "{stdout}");
    assert!(dir.path().join("ok/unit.svg").exists());
    // An unreachable tolerance turns the identity verdict into a failure.
    let (fail, stdout, _) = qdlab(&["check", "--scenario", s, "--tol", "1e-300"], &dir.path().join("fail"));
    assert_eq!(fail, 1, "{stdout}");
    assert_eq!(manifest(&dir.path().join("fail"))["pass"], false);
    let (bad, _, stderr) = qdlab(&["chain", "--preset", "no-such-preset"], &dir.path().join("bad"));
    assert_eq!(bad, 2);
    assert!(stderr.contains("unknown preset"), "{stderr}");
    let (unsupported, _, stderr) = qdlab(&["dyn", "--preset", "fig1-gallery"], &dir.path().join("bad"));
    assert_eq!(unsupported, 2);
    assert!(stderr.contains("no dyn step"), "{stderr}");
}

#[test]
fn packing_run_reaches_equality() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("pk");
    let (code, stdout, stderr) = qdlab(&["topo", "--preset", "packing-discs:9"], &out);
    assert_eq!(code, 0, "{stdout}{stderr}");
    let v = &manifest(&out)["verdicts"][0];
    assert_eq!(v["name"], "discs-m9/packing-bound");
    assert_eq!(v["detail"]["c"], 16);
    assert_eq!(v["detail"]["equality"], true);
}
