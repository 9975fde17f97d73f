// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Named benchmarks, mask files, and turning a config into a problem.

use std::path::Path;
use std::str::FromStr;

use randord_core::ensemble::GridProblem;
use randord_core::problem::{
    benchmark_center_source, benchmark_lattice, benchmark_slab_case, check_mask_fits, slab_scattering_ratio,
    xy_scattering_ratio, AngularPiece, AngularProfile, EdgeInflow, Profile1D, Profile2D, Rect, ScatteringKernel,
    SlabGrid, SlabSpec, SourceMask, XyGrid, XySpec,
};
use randord_core::quadrature::Geometry;

use crate::config::{key_error, Coeffs, GeometryTag, PieceConfig, RunConfig};
use crate::error::{CliError, CliResult};

/// Mask used by the lattice benchmark unless the config names another.
pub const DEFAULT_MASK: &str = include_str!("../data/lattice.mask");

pub const BENCHMARK_NAMES: [&str; 5] = ["slab-case-1", "slab-case-2", "slab-case-3", "center-source", "lattice"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Benchmark {
    SlabCase(u8),
    CenterSource,
    Lattice,
}

impl Benchmark {
    pub fn geometry(&self) -> Geometry {
        match self {
            Benchmark::SlabCase(_) => Geometry::Slab,
            _ => Geometry::Xy,
        }
    }
}

impl FromStr for Benchmark {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "slab-case-1" => Ok(Benchmark::SlabCase(1)),
            "slab-case-2" => Ok(Benchmark::SlabCase(2)),
            "slab-case-3" => Ok(Benchmark::SlabCase(3)),
            "center-source" => Ok(Benchmark::CenterSource),
            "lattice" => Ok(Benchmark::Lattice),
            _ => Err(format!(
                "unknown benchmark `{s}`, expected one of {}",
                BENCHMARK_NAMES.join(", ")
            )),
        }
    }
}

/// A validated problem and its spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub enum ResolvedProblem {
    Slab { spec: SlabSpec, grid: SlabGrid },
    Xy { spec: XySpec, grid: XyGrid },
}

impl ResolvedProblem {
    pub fn geometry(&self) -> Geometry {
        match self {
            ResolvedProblem::Slab { .. } => Geometry::Slab,
            ResolvedProblem::Xy { .. } => Geometry::Xy,
        }
    }

    pub fn grid_problem(&self) -> GridProblem<'_> {
        match self {
            ResolvedProblem::Slab { spec, grid } => GridProblem::Slab { problem: spec, grid: *grid },
            ResolvedProblem::Xy { spec, grid } => GridProblem::Xy { problem: spec, grid: *grid },
        }
    }
}

/// Parses a mask file: a `rows cols` header, then `rows` lines of `cols`
/// zeros and ones. The first data line is the bottom row. Blank lines and
/// `#` comments are ignored.
pub fn parse_mask(text: &str) -> Result<SourceMask, String> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or("empty mask file")?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("line {hline}: expected `rows cols`"))?;
    let [rows, cols] = dims[..] else {
        return Err(format!("line {hline}: expected `rows cols`"));
    };
    let mut cells = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (n, line) = lines.next().ok_or_else(|| format!("expected {rows} mask rows"))?;
        let row: Vec<bool> = line
            .split_whitespace()
            .map(|t| match t {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(format!("line {n}: mask entries must be 0 or 1, got `{t}`")),
            })
            .collect::<Result<_, _>>()?;
        if row.len() != cols {
            return Err(format!("line {n}: expected {cols} entries, got {}", row.len()));
        }
        cells.extend(row);
    }
    if let Some((n, _)) = lines.next() {
        return Err(format!("line {n}: more than {rows} mask rows"));
    }
    SourceMask::new(rows, cols, cells).map_err(|e| e.to_string())
}

pub fn load_mask(path: &Path) -> CliResult<SourceMask> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_mask(&text).map_err(|message| CliError::Data {
        path: path.into(),
        message,
    })
}

fn kernel(config: &RunConfig, source: Option<&str>) -> CliResult<ScatteringKernel> {
    ScatteringKernel::new(config.problem.g.unwrap_or(0.0)).map_err(|e| key_error(source, "problem.g", e))
}

fn profile_1d(c: &Coeffs) -> Profile1D {
    match c {
        Coeffs::Constant(v) => Profile1D::Constant(*v),
        Coeffs::Polynomial(p) => Profile1D::Polynomial(p.clone()),
    }
}

fn constant(c: &Coeffs, key: &str, source: Option<&str>) -> CliResult<f64> {
    match c {
        Coeffs::Constant(v) => Ok(*v),
        Coeffs::Polynomial(_) => Err(key_error(source, key, "X-Y problems take constant coefficients")),
    }
}

fn angular(pieces: &[PieceConfig], key: &str, source: Option<&str>) -> CliResult<AngularProfile> {
    let mut out = Vec::with_capacity(pieces.len());
    for p in pieces {
        if !(p.lo <= p.hi) || p.lo < -1.0 || p.hi > 1.0 {
            return Err(key_error(source, key, format!("piece [{}, {}] is not inside [-1, 1]", p.lo, p.hi)));
        }
        out.push(AngularPiece {
            lo: p.lo,
            hi: p.hi,
            lo_closed: p.lo_closed,
            hi_closed: p.hi_closed,
            a: p.a,
            b: p.b,
        });
    }
    Ok(AngularProfile { pieces: out })
}

fn mask_from_config(config: &RunConfig) -> CliResult<SourceMask> {
    match &config.problem.mask_file {
        Some(path) => load_mask(Path::new(path)),
        None => parse_mask(DEFAULT_MASK).map_err(CliError::Config),
    }
}

fn slab_grid(config: &RunConfig, x_left: f64, x_right: f64, source: Option<&str>) -> CliResult<SlabGrid> {
    SlabGrid::new(x_left, x_right, config.grid.cells.unwrap_or(50)).map_err(|e| key_error(source, "grid.cells", e))
}

fn xy_grid(config: &RunConfig, domain: Rect, default: usize, source: Option<&str>) -> CliResult<XyGrid> {
    let nx = config.grid.nx.unwrap_or(default);
    let ny = config.grid.ny.unwrap_or(nx);
    XyGrid::new(domain, nx, ny).map_err(|e| key_error(source, "grid.nx", e))
}

fn check_slab(spec: SlabSpec, grid: SlabGrid, source: Option<&str>) -> CliResult<ResolvedProblem> {
    slab_scattering_ratio(&spec, &grid).map_err(|e| key_error(source, "problem.sigma_s", e))?;
    Ok(ResolvedProblem::Slab { spec, grid })
}

fn check_xy(spec: XySpec, grid: XyGrid, source: Option<&str>) -> CliResult<ResolvedProblem> {
    xy_scattering_ratio(&spec, &grid).map_err(|e| key_error(source, "problem.sigma_s", e))?;
    if let Profile2D::Mask { mask, .. } = &spec.source {
        check_mask_fits(mask, &grid).map_err(|e| key_error(source, "grid.nx", e))?;
    }
    Ok(ResolvedProblem::Xy { spec, grid })
}

/// Builds the problem a config describes.
pub fn resolve(config: &RunConfig, source: Option<&str>) -> CliResult<ResolvedProblem> {
    let p = &config.problem;
    let kernel = kernel(config, source)?;
    if let Some(name) = &p.benchmark {
        let bench: Benchmark = name.parse().map_err(|e| key_error(source, "problem.benchmark", e))?;
        let inline = [
            ("geometry", p.geometry.is_some()),
            ("domain", p.domain.is_some()),
            ("sigma_t", p.sigma_t.is_some()),
            ("sigma_s", p.sigma_s.is_some()),
            ("source", p.source.is_some()),
            ("source_box", p.source_box.is_some()),
            ("left", p.left.is_some()),
            ("right", p.right.is_some()),
            ("inflow", p.inflow.is_some()),
            ("mask_file", p.mask_file.is_some() && bench != Benchmark::Lattice),
            ("mask_value", p.mask_value.is_some()),
        ];
        if let Some((key, _)) = inline.iter().find(|(_, set)| *set) {
            return Err(key_error(
                source,
                &format!("problem.{key}"),
                format!("cannot be combined with benchmark `{name}`"),
            ));
        }
        return match bench {
            Benchmark::SlabCase(case) => {
                let mut spec = benchmark_slab_case(case)?;
                spec.kernel = kernel;
                let grid = slab_grid(config, spec.x_left, spec.x_right, source)?;
                check_slab(spec, grid, source)
            }
            Benchmark::CenterSource => {
                let spec = benchmark_center_source(kernel);
                let grid = xy_grid(config, spec.domain, 100, source)?;
                check_xy(spec, grid, source)
            }
            Benchmark::Lattice => {
                let spec = benchmark_lattice(mask_from_config(config)?, kernel);
                let grid = xy_grid(config, spec.domain, 50, source)?;
                check_xy(spec, grid, source)
            }
        };
    }
    let geometry = p
        .geometry
        .ok_or_else(|| key_error(source, "problem.geometry", "set either `benchmark` or `geometry`"))?;
    let sigma_t = p
        .sigma_t
        .as_ref()
        .ok_or_else(|| key_error(source, "problem.sigma_t", "required for an inline problem"))?;
    let zero = Coeffs::Constant(0.0);
    let sigma_s = p.sigma_s.as_ref().unwrap_or(&zero);
    match geometry {
        GeometryTag::Slab => {
            for (key, set) in [
                ("source_box", p.source_box.is_some()),
                ("mask_file", p.mask_file.is_some()),
                ("mask_value", p.mask_value.is_some()),
                ("inflow", p.inflow.is_some()),
            ] {
                if set {
                    return Err(key_error(source, &format!("problem.{key}"), "only applies to X-Y problems"));
                }
            }
            let (x_left, x_right) = match p.domain.as_deref() {
                None => (0.0, 1.0),
                Some(&[a, b]) => (a, b),
                Some(_) => return Err(key_error(source, "problem.domain", "expected [x_left, x_right]")),
            };
            let spec = SlabSpec {
                x_left,
                x_right,
                sigma_t: profile_1d(sigma_t),
                sigma_s: profile_1d(sigma_s),
                source: profile_1d(p.source.as_ref().unwrap_or(&zero)),
                left: angular(p.left.as_deref().unwrap_or(&[]), "problem.left", source)?,
                right: angular(p.right.as_deref().unwrap_or(&[]), "problem.right", source)?,
                kernel,
            };
            let grid = slab_grid(config, x_left, x_right, source)?;
            check_slab(spec, grid, source)
        }
        GeometryTag::Xy => {
            for (key, set) in [("left", p.left.is_some()), ("right", p.right.is_some())] {
                if set {
                    return Err(key_error(source, &format!("problem.{key}"), "only applies to slab problems"));
                }
            }
            let domain = match p.domain.as_deref() {
                None => Rect::UNIT,
                Some(&[x_left, x_right, y_bottom, y_top]) => Rect {
                    x_left,
                    x_right,
                    y_bottom,
                    y_top,
                },
                Some(_) => {
                    return Err(key_error(
                        source,
                        "problem.domain",
                        "expected [x_left, x_right, y_bottom, y_top]",
                    ))
                }
            };
            let sources = [p.source.is_some(), p.source_box.is_some(), p.mask_file.is_some()];
            if sources.iter().filter(|s| **s).count() > 1 {
                return Err(key_error(
                    source,
                    "problem.source",
                    "set at most one of `source`, `source_box` and `mask_file`",
                ));
            }
            let q = if let Some(b) = &p.source_box {
                Profile2D::Box {
                    region: Rect {
                        x_left: b.x[0],
                        x_right: b.x[1],
                        y_bottom: b.y[0],
                        y_top: b.y[1],
                    },
                    inside: b.value,
                    outside: 0.0,
                }
            } else if p.mask_file.is_some() {
                Profile2D::Mask {
                    mask: mask_from_config(config)?,
                    domain,
                    value: p.mask_value.unwrap_or(1.0),
                }
            } else {
                Profile2D::Constant(constant(p.source.as_ref().unwrap_or(&zero), "problem.source", source)?)
            };
            let [left, right, bottom, top] = p.inflow.unwrap_or_default();
            let spec = XySpec {
                domain,
                sigma_t: Profile2D::Constant(constant(sigma_t, "problem.sigma_t", source)?),
                sigma_s: Profile2D::Constant(constant(sigma_s, "problem.sigma_s", source)?),
                source: q,
                inflow: EdgeInflow {
                    left,
                    right,
                    bottom,
                    top,
                },
                kernel,
            };
            let grid = xy_grid(config, domain, 50, source)?;
            check_xy(spec, grid, source)
        }
    }
}
