//! Scenario runner for qdlab: presets, subcommand steps, manifests and SVG output.

pub mod report;
pub mod run;
pub mod scenario;
pub mod svg;
