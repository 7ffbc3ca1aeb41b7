use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lindstedt: Option<LindstedtBlock>,
    pub compare: Option<CompareBlock>,
    pub parametric: Option<ParametricBlock>,
    pub example: Option<ExampleBlock>,
    pub background: Option<BackgroundBlock>,
    pub output: Option<OutputBlock>,
}

/// Shared by `dispersion`, `fig1` and `lindstedt-table`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct LindstedtBlock {
    #[serde(rename = "N")]
    pub order: Option<usize>,
    #[serde(rename = "Nlist")]
    pub orders: Option<Vec<usize>>,
    pub eps: Option<Vec<f64>>,
    pub eps_max: Option<f64>,
    pub steps: Option<usize>,
    pub grid: Option<PhaseGrid>,
    pub max_order: Option<usize>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseGrid {
    pub nx: usize,
    pub nt: usize,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub x0: f64,
    pub x1: f64,
    pub nx: usize,
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareBlock {
    #[serde(rename = "N")]
    pub order: Option<usize>,
    #[serde(rename = "A")]
    pub amplitude: Option<f64>,
    pub k: Option<f64>,
    pub b: Option<f64>,
    pub grid: Option<PhaseGrid>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct ParametricBlock {
    #[serde(rename = "L")]
    pub half_period: Option<f64>,
    /// `[harmonic, coefficient]` pairs of `sin(nπx/L)`.
    pub displacement: Option<Vec<(u32, f64)>>,
    pub velocity: Option<Vec<(u32, f64)>>,
    #[serde(rename = "B")]
    pub field: Option<f64>,
    pub b: Option<f64>,
    pub quad: Option<QuadBlock>,
    pub grid: Option<Grid>,
    pub h: Option<f64>,
    pub symmetry_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct QuadBlock {
    pub panels: Option<usize>,
    pub nodes: Option<usize>,
    pub tolerance: Option<f64>,
    pub max_panels: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleBlock {
    #[serde(rename = "A")]
    pub amplitude: Option<f64>,
    pub grid: Option<Grid>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundBlock {
    #[serde(rename = "B")]
    pub field: Option<f64>,
    #[serde(rename = "A")]
    pub amplitude: Option<f64>,
    pub k: Option<f64>,
    pub b: Option<f64>,
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub path: Option<String>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        // serde_json's message already carries line and column
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}
