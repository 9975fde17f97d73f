// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a TOML file, optionally overridden by command-line
//! flags, validated into concrete problem and solver settings.
//!
//! ```toml
//! output = "out/case1"
//!
//! [problem]
//! benchmark = "slab-case-1"
//!
//! [grid]
//! cells = 50
//!
//! [quadrature]
//! kind = "uniform"
//! order = 16
//! ```

use std::path::Path;

use randord_core::analysis::NeumannConfig;
use randord_core::quadrature::Geometry;
use randord_core::slab::{SlabScheme, SolverOptions};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::registry::{self, Benchmark, ResolvedProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Directory for every file a run writes.
    #[serde(default = "default_output")]
    pub output: String,
    pub problem: ProblemConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub ensemble: EnsembleSection,
    #[serde(default)]
    pub reference: ReferenceConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
}

fn default_output() -> String {
    "out".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GeometryTag {
    Slab,
    Xy,
}

impl From<GeometryTag> for Geometry {
    fn from(g: GeometryTag) -> Self {
        match g {
            GeometryTag::Slab => Geometry::Slab,
            GeometryTag::Xy => Geometry::Xy,
        }
    }
}

/// A constant or a polynomial in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeffs {
    Constant(f64),
    Polynomial(Vec<f64>),
}

/// `a + b mu` on an interval of direction cosines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceConfig {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceBox {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub value: f64,
}

/// Either a named benchmark (with an optional anisotropy override) or an
/// inline problem.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benchmark: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometry: Option<GeometryTag>,
    /// Linear anisotropy factor `g`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    /// `[x_left, x_right]` (slab) or `[x_left, x_right, y_bottom, y_top]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_t: Option<Coeffs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_s: Option<Coeffs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<Coeffs>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_box: Option<SourceBox>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_value: Option<f64>,
    /// Slab inflow for `mu > 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<Vec<PieceConfig>>,
    /// Slab inflow for `mu < 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<Vec<PieceConfig>>,
    /// X-Y edge inflow `[left, right, bottom, top]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inflow: Option<[f64; 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// Slab cell count `I`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum QuadKind {
    #[default]
    Uniform,
    Gauss,
    Rom,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default)]
    pub kind: QuadKind,
    /// `M` (slab DOM), `N` (X-Y) or the cell count `n` (slab ROM).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Velocity truncation for random ordinates.
    #[serde(default)]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeTag {
    Diamond,
    #[default]
    Characteristic,
}

impl From<SchemeTag> for SlabScheme {
    fn from(s: SchemeTag) -> Self {
        match s {
            SchemeTag::Diamond => SlabScheme::Diamond,
            SchemeTag::Characteristic => SlabScheme::Characteristic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub slab_scheme: SchemeTag,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iters() -> usize {
    10_000
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iters: default_max_iters(),
            slab_scheme: SchemeTag::default(),
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iters: self.max_iters,
            slab_scheme: self.slab_scheme.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Worker threads; unset means the `RANDORD_JOBS` variable or all cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default = "default_batch")]
    pub batch: usize,
}

fn default_samples() -> usize {
    100
}

fn default_seed() -> u64 {
    1
}

fn default_batch() -> usize {
    256
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            seed: default_seed(),
            jobs: None,
            batch: default_batch(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DomKind {
    Uniform,
    Gauss,
}

/// Where reference solutions come from: a file written by `solve`, or a
/// fine DOM solve (uniform `M = 1280` in slab geometry and Gauss `N = 12`
/// in X-Y geometry unless set).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<DomKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_oracle_delta")]
    pub delta: f64,
    #[serde(default = "default_panels")]
    pub panels: usize,
    #[serde(default = "default_mu_order")]
    pub mu_order: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mu_breaks: Vec<f64>,
    #[serde(default = "default_oracle_tol")]
    pub tol: f64,
    #[serde(default = "default_max_terms")]
    pub max_terms: usize,
}

fn default_oracle_delta() -> f64 {
    NeumannConfig::default().delta
}

fn default_panels() -> usize {
    NeumannConfig::default().panels
}

fn default_mu_order() -> usize {
    NeumannConfig::default().mu_order
}

fn default_oracle_tol() -> f64 {
    NeumannConfig::default().tol
}

fn default_max_terms() -> usize {
    NeumannConfig::default().max_terms
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            delta: default_oracle_delta(),
            panels: default_panels(),
            mu_order: default_mu_order(),
            mu_breaks: Vec::new(),
            tol: default_oracle_tol(),
            max_terms: default_max_terms(),
        }
    }
}

impl OracleConfig {
    pub fn neumann(&self) -> NeumannConfig {
        NeumannConfig {
            delta: self.delta,
            panels: self.panels,
            mu_order: self.mu_order,
            mu_breaks: self.mu_breaks.clone(),
            tol: self.tol,
            max_terms: self.max_terms,
        }
    }
}

/// 1-based line of the first `key = ...` assignment in `source`.
fn line_of(source: &str, key: &str) -> Option<usize> {
    source.lines().position(|line| {
        let line = line.trim_start();
        line.strip_prefix(key)
            .is_some_and(|rest| rest.trim_start().starts_with('='))
    })
    .map(|i| i + 1)
}

/// Builds a config error naming `key` (a dotted path) and, when the source
/// text is known, the line that sets it.
pub fn key_error(source: Option<&str>, key: &str, reason: impl std::fmt::Display) -> CliError {
    let leaf = key.rsplit('.').next().unwrap_or(key);
    match source.and_then(|s| line_of(s, leaf)) {
        Some(line) => CliError::Config(format!("`{key}` (line {line}): {reason}")),
        None => CliError::Config(format!("`{key}`: {reason}")),
    }
}

impl RunConfig {
    /// Default settings for a named benchmark.
    pub fn for_benchmark(name: &str) -> CliResult<Self> {
        let bench: Benchmark = name.parse().map_err(CliError::Config)?;
        let (grid, order) = match bench {
            Benchmark::SlabCase(_) => (
                GridConfig {
                    cells: Some(50),
                    ..GridConfig::default()
                },
                16,
            ),
            Benchmark::CenterSource => (
                GridConfig {
                    nx: Some(100),
                    ny: Some(100),
                    ..GridConfig::default()
                },
                2,
            ),
            Benchmark::Lattice => (
                GridConfig {
                    nx: Some(50),
                    ny: Some(50),
                    ..GridConfig::default()
                },
                2,
            ),
        };
        Ok(Self {
            output: default_output(),
            problem: ProblemConfig {
                benchmark: Some(name.to_string()),
                ..ProblemConfig::default()
            },
            grid,
            quadrature: QuadratureConfig {
                order: Some(order),
                ..QuadratureConfig::default()
            },
            solver: SolverConfig::default(),
            ensemble: EnsembleSection::default(),
            reference: ReferenceConfig::default(),
            oracle: OracleConfig::default(),
        })
    }

    /// Parses TOML text without validating the problem.
    pub fn from_toml(source: &str) -> CliResult<Self> {
        toml::from_str(source).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads and parses a config file. Returns the config and its text,
    /// which later validation uses to point at offending lines.
    pub fn load(path: &Path) -> CliResult<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config = Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        Ok((config, text))
    }

    pub fn geometry(&self) -> CliResult<Geometry> {
        match (&self.problem.benchmark, self.problem.geometry) {
            (Some(name), _) => Ok(name.parse::<Benchmark>().map_err(CliError::Config)?.geometry()),
            (None, Some(g)) => Ok(g.into()),
            (None, None) => Err(CliError::Config(
                "`problem`: set either `benchmark` or `geometry`".into(),
            )),
        }
    }

    /// Velocity resolution, with a per-geometry default.
    pub fn order(&self) -> usize {
        self.quadrature.order.unwrap_or(match self.geometry() {
            Ok(Geometry::Xy) => 2,
            _ => 16,
        })
    }

    /// Worker count: the config, then `RANDORD_JOBS`, then all cores.
    pub fn jobs(&self) -> CliResult<usize> {
        if let Some(j) = self.ensemble.jobs {
            return Ok(j);
        }
        match std::env::var("RANDORD_JOBS") {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&j| j > 0)
                .ok_or_else(|| CliError::Config(format!("RANDORD_JOBS: expected a positive integer, got {v:?}"))),
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }

    /// Checks every constraint and builds the problem. `source` is the
    /// config text, if any, used to report line numbers.
    pub fn validate(&self, source: Option<&str>) -> CliResult<ResolvedProblem> {
        let s = &self.solver;
        if !(s.tol > 0.0) {
            return Err(key_error(source, "solver.tol", "must be positive"));
        }
        if s.max_iters == 0 {
            return Err(key_error(source, "solver.max_iters", "must be at least 1"));
        }
        let q = &self.quadrature;
        if !(0.0..1.0).contains(&q.delta) {
            return Err(key_error(source, "quadrature.delta", "must lie in [0, 1)"));
        }
        if q.order == Some(0) {
            return Err(key_error(source, "quadrature.order", "must be positive"));
        }
        let e = &self.ensemble;
        if e.samples == 0 {
            return Err(key_error(source, "ensemble.samples", "must be at least 1"));
        }
        if e.batch == 0 {
            return Err(key_error(source, "ensemble.batch", "must be at least 1"));
        }
        if e.jobs == Some(0) {
            return Err(key_error(source, "ensemble.jobs", "must be at least 1"));
        }
        if self.reference.order == Some(0) {
            return Err(key_error(source, "reference.order", "must be positive"));
        }
        let resolved = registry::resolve(self, source)?;
        if resolved.geometry() == Geometry::Slab && q.kind == QuadKind::Rom && self.order() % 2 != 0 {
            return Err(key_error(source, "quadrature.order", "slab random ordinates need an even cell count"));
        }
        Ok(resolved)
    }
}
