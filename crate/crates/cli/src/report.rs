//! Output directory bookkeeping and manifest.json.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::svg::{render_svg, Figure};

#[derive(Clone, Debug, Serialize)]
pub struct VerdictEntry {
    pub name: String,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub schema: u32,
    pub command: String,
    pub scenario: String,
    pub preset: String,
    pub grid: usize,
    pub tol: f64,
    pub seed: u64,
    pub pass: bool,
    pub verdicts: Vec<VerdictEntry>,
    pub artifacts: Vec<String>,
}

pub struct Output {
    root: PathBuf,
    artifacts: BTreeSet<String>,
    verdicts: Vec<VerdictEntry>,
}

impl Output {
    pub fn new(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Output { root: root.to_path_buf(), artifacts: BTreeSet::new(), verdicts: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn verdict(&mut self, name: impl Into<String>, pass: bool, detail: impl Serialize) {
        let detail = serde_json::to_value(detail).unwrap_or(Value::Null);
        self.verdicts.push(VerdictEntry { name: name.into(), pass, detail });
    }

    pub fn write_with(&mut self, rel: &str, f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(rel, buf)
    }

    pub fn write(&mut self, rel: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let path = self.root.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.artifacts.insert(rel.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, rel: &str, value: &impl Serialize) -> Result<()> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        self.write(rel, text)
    }

    pub fn write_svg(&mut self, rel: &str, fig: &Figure) -> Result<()> {
        self.write(rel, render_svg(fig))
    }

    /// Records every file under `rel` (written by a library routine) as an artifact.
    pub fn adopt_dir(&mut self, rel: &str) -> Result<()> {
        let mut stack = vec![self.root.join(rel)];
        while let Some(dir) = stack.pop() {
            for entry in fs::read_dir(&dir)? {
                let path = entry?.path();
                if path.is_dir() {
                    stack.push(path);
                } else if let Ok(r) = path.strip_prefix(&self.root) {
                    self.artifacts.insert(r.to_string_lossy().replace('\\', "/"));
                }
            }
        }
        Ok(())
    }

    pub fn pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    pub fn finish(self, command: &str, scenario: &str, preset: &str, grid: usize, tol: f64, seed: u64) -> Result<Manifest> {
        let m = Manifest {
            schema: crate::scenario::SCHEMA,
            command: command.into(),
            scenario: scenario.into(),
            preset: preset.into(),
            grid,
            tol,
            seed,
            pass: self.pass(),
            verdicts: self.verdicts,
            artifacts: self.artifacts.into_iter().collect(),
        };
        let text = serde_json::to_string_pretty(&m)? + "\n";
        fs::write(self.root.join("manifest.json"), text)?;
        Ok(m)
    }
}
