//! Scenario files: `{"schema": 1, "preset": "<name>", ...params, "grid": N, "tol": X, "seed": N}`.

use std::path::Path;

use anyhow::{anyhow, bail, Result};
use qdlab::domains::DomainSpec;
use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(flatten)]
    pub preset: Preset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NamedDomain {
    pub name: String,
    #[serde(flatten)]
    pub spec: DomainSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case")]
pub enum Preset {
    /// Cardioid, Neumann oval, ellipse exterior and airfoil exterior.
    Fig1Gallery,
    CubicChain {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        times: Option<Vec<f64>>,
    },
    SharpUqdOrder2,
    /// The cubic map domain plus connectivity bounds for order 3.
    SharpBqdOrder3,
    PackingDiscs {
        #[serde(default = "nine")]
        m: usize,
    },
    PackingCardioids {
        #[serde(default = "one")]
        m: usize,
    },
    ApollonianSetups,
    ConcentricCircles {
        #[serde(default = "four")]
        k: usize,
    },
    Domains {
        domains: Vec<NamedDomain>,
    },
    Dynamics(DynamicsParams),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DynamicsParams {
    #[serde(default = "maps")]
    pub maps: usize,
    #[serde(default = "degrees")]
    pub degrees: Vec<usize>,
    /// Random quadratic polynomials h for the non-repelling fixed point count.
    #[serde(default = "maps")]
    pub quadratics: usize,
    #[serde(default = "nus")]
    pub nu: Vec<Vec<usize>>,
    #[serde(default = "budget")]
    pub budget: usize,
}

fn one() -> usize {
    1
}
fn four() -> usize {
    4
}
fn nine() -> usize {
    9
}
fn maps() -> usize {
    200
}
fn budget() -> usize {
    10_000
}
fn degrees() -> Vec<usize> {
    vec![2, 3, 4, 5]
}
fn nus() -> Vec<Vec<usize>> {
    vec![vec![1], vec![1, 1], vec![2, 3], vec![1, 1, 1]]
}

impl Preset {
    pub fn tag(&self) -> &'static str {
        match self {
            Preset::Fig1Gallery => "fig1-gallery",
            Preset::CubicChain { .. } => "cubic-chain",
            Preset::SharpUqdOrder2 => "sharp-uqd-order2",
            Preset::SharpBqdOrder3 => "sharp-bqd-order3",
            Preset::PackingDiscs { .. } => "packing-discs",
            Preset::PackingCardioids { .. } => "packing-cardioids",
            Preset::ApollonianSetups => "apollonian-setups",
            Preset::ConcentricCircles { .. } => "concentric-circles",
            Preset::Domains { .. } => "domains",
            Preset::Dynamics(_) => "dynamics",
        }
    }
}

pub const PRESETS: [&str; 10] = [
    "fig1-gallery",
    "cubic-chain",
    "sharp-uqd-order2",
    "sharp-bqd-order3",
    "packing-discs[:m]",
    "packing-cardioids[:m]",
    "apollonian-setups",
    "concentric-circles[:k]",
    "dynamics[:maps]",
    "domains (scenario file only)",
];

impl Scenario {
    pub fn from_json(text: &str, origin: &str) -> Result<Scenario> {
        let sc: Scenario = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            let msg = msg.rsplit_once(" at line ").map_or(msg.as_str(), |(m, _)| m).to_string();
            anyhow!("{origin}:{}:{}: {msg}", e.line(), e.column())
        })?;
        if sc.schema != SCHEMA {
            bail!("{origin}: unsupported schema {} (expected {SCHEMA})", sc.schema);
        }
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).map_err(|e| anyhow!("{}: {e}", path.display()))?;
        Scenario::from_json(&text, &path.display().to_string())
    }

    /// `name` or `name:param`, where the parameter is m, k or maps depending on the preset.
    pub fn from_preset(arg: &str) -> Result<Scenario> {
        let (name, param) = match arg.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (arg, None),
        };
        let mut obj = serde_json::json!({ "schema": SCHEMA, "preset": name });
        if let Some(p) = param {
            let key = match name {
                "packing-discs" | "packing-cardioids" => "m",
                "concentric-circles" => "k",
                "dynamics" => "maps",
                _ => bail!("preset {name} takes no parameter"),
            };
            let v: usize = p.parse().map_err(|_| anyhow!("preset parameter {key} must be a positive integer, got {p:?}"))?;
            obj[key] = v.into();
        }
        serde_json::from_value(obj).map_err(|e| {
            if e.to_string().starts_with("unknown variant") {
                anyhow!("unknown preset {name:?}; available: {}", PRESETS.join(", "))
            } else {
                anyhow!("preset {name}: {e}")
            }
        })
    }

    pub fn name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.preset.tag().to_string())
    }
}
