// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Subcommand implementations. Each writes its files into the configured
//! output directory, finishing with `manifest.json`, and returns the
//! manifest.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use randord_core::analysis::{convergence_study, neumann_phi_slab, Method, Reference};
use randord_core::ensemble::{l2_error, run_ensemble_with, EnsembleConfig};
use randord_core::quadrature::{partition_velocity, sample_rom, Geometry, Quadrature};
use randord_core::slab::{source_iteration_slab, SolverOptions};
use randord_core::xy::{relative_variation, source_iteration_xy, ScalarFlux2D};
use serde_json::json;

use crate::config::{DomKind, QuadKind, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{
    append_metrics, ensure_dir, fmt, read_field, write_field, write_heatmap, write_pgm, write_slab_field,
    write_table, FieldGrid, Manifest, MetricsRow,
};
use crate::parallel::RayonExecutor;
use crate::registry::{Benchmark, ResolvedProblem};

/// Circle along which an X-Y flux is sampled: `cx,cy,r,K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub cx: f64,
    pub cy: f64,
    pub r: f64,
    pub points: usize,
}

impl Circle {
    /// Radius 0.35 around the center of the unit square, 360 points.
    pub const DEFAULT: Circle = Circle {
        cx: 0.5,
        cy: 0.5,
        r: 0.35,
        points: 360,
    };
}

impl FromStr for Circle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || format!("expected `cx,cy,r,K`, got `{s}`");
        let [cx, cy, r, k] = parts[..] else {
            return Err(bad());
        };
        let f = |v: &str| v.parse::<f64>().map_err(|_| bad());
        let c = Circle {
            cx: f(cx)?,
            cy: f(cy)?,
            r: f(r)?,
            points: k.parse().map_err(|_| bad())?,
        };
        if !(c.r > 0.0) || c.points == 0 {
            return Err(format!("circle needs r > 0 and K > 0, got `{s}`"));
        }
        Ok(c)
    }
}

fn field_grid(problem: &ResolvedProblem) -> FieldGrid {
    match problem {
        ResolvedProblem::Slab { grid, .. } => FieldGrid::Slab(*grid),
        ResolvedProblem::Xy { grid, .. } => FieldGrid::Xy(*grid),
    }
}

fn output_dir(config: &RunConfig) -> CliResult<PathBuf> {
    let dir = PathBuf::from(&config.output);
    ensure_dir(&dir)?;
    Ok(dir)
}

fn finish(mut manifest: Manifest, dir: &Path, started: Instant) -> CliResult<Manifest> {
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    manifest.write(dir)?;
    Ok(manifest)
}

fn dom_method(kind: DomKind) -> Method {
    match kind {
        DomKind::Uniform => Method::DomUniform,
        DomKind::Gauss => Method::DomGauss,
    }
}

/// Quadrature set for a single solve. Random ordinates use sample 0 of the
/// configured seed.
pub fn build_quadrature(config: &RunConfig, geometry: Geometry) -> CliResult<Quadrature> {
    let order = config.order();
    match config.quadrature.kind {
        QuadKind::Uniform => Ok(Method::DomUniform.quadrature(geometry, order)?),
        QuadKind::Gauss => Ok(Method::DomGauss.quadrature(geometry, order)?),
        QuadKind::Rom => {
            let partition = partition_velocity(geometry, order, config.quadrature.delta)?;
            let key = EnsembleConfig::new(1, config.ensemble.seed).key(&partition, 0);
            Ok(sample_rom(&partition, key).quadrature)
        }
    }
}

/// Reference solution for error metrics and its provenance.
pub fn load_reference(config: &RunConfig, problem: &ResolvedProblem) -> CliResult<(Reference, String)> {
    let geometry = problem.geometry();
    if let Some(file) = &config.reference.file {
        let phi = read_field(Path::new(file), &field_grid(problem))?;
        // Treated as arbitrarily fine; resolution checks are the caller's job.
        let reference = Reference {
            method: Method::DomUniform,
            resolution: 0,
            phi,
        };
        return Ok((reference, format!("file {file}")));
    }
    let (kind, default_order) = match geometry {
        Geometry::Slab => (DomKind::Uniform, 1280),
        Geometry::Xy => (DomKind::Gauss, 12),
    };
    let kind = config.reference.kind.unwrap_or(kind);
    let order = config.reference.order.unwrap_or(default_order);
    let reference = Reference::compute(&problem.grid_problem(), dom_method(kind), order, &config.solver.options())?;
    let name = match kind {
        DomKind::Uniform => "uniform",
        DomKind::Gauss => "gauss",
    };
    let symbol = if geometry == Geometry::Slab { "M" } else { "N" };
    Ok((reference, format!("{name} DOM, {symbol} = {order}")))
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOutputs {
    /// Slab only: also write `psi.csv`.
    pub angular: bool,
    /// X-Y only: also write `phi.pgm`.
    pub pgm: bool,
    /// X-Y only: sample the flux along a circle into `profile.csv`.
    pub profile: Option<Circle>,
}

fn write_profile(dir: &Path, phi: &ScalarFlux2D, circle: &Circle, outputs: &mut Vec<PathBuf>) -> CliResult<f64> {
    let profile = phi.circle_profile(circle.cx, circle.cy, circle.r, circle.points);
    let path = dir.join("profile.csv");
    write_table(&path, &["angle", "phi"], profile.iter().map(|(a, p)| vec![fmt(*a), fmt(*p)]))?;
    outputs.push(path);
    Ok(relative_variation(&profile))
}

/// One deterministic (or single random-ordinate) solve.
pub fn solve(config: &RunConfig, source: Option<&str>, extra: SolveOutputs) -> CliResult<Manifest> {
    let started = Instant::now();
    let problem = config.validate(source)?;
    let geometry = problem.geometry();
    if geometry == Geometry::Xy && extra.angular {
        return Err(CliError::Config("angular output is only available for slab problems".into()));
    }
    if geometry == Geometry::Slab && (extra.pgm || extra.profile.is_some()) {
        return Err(CliError::Config("images and circle profiles need an X-Y problem".into()));
    }
    let dir = output_dir(config)?;
    let quadrature = build_quadrature(config, geometry)?;
    let options = config.solver.options();
    let mut manifest = Manifest::new("solve", config.to_toml()?);
    if config.quadrature.kind == QuadKind::Rom {
        manifest.seed = Some(config.ensemble.seed);
    }
    let phi_path = dir.join("phi.csv");
    let summary = match (&problem, &quadrature) {
        (ResolvedProblem::Slab { spec, grid }, Quadrature::Slab(q)) => {
            let sol = source_iteration_slab(spec, grid, q, &options)?;
            write_slab_field(&phi_path, grid, &sol.scalar.values)?;
            manifest.outputs.push(phi_path);
            if extra.angular {
                let path = dir.join("psi.csv");
                let nodes = grid.nodes();
                let rows = q.nodes().iter().enumerate().flat_map(|(l, mu)| {
                    let psi = sol.angular.ordinate(l);
                    nodes
                        .iter()
                        .zip(psi)
                        .map(move |(x, p)| vec![fmt(*x), fmt(*mu), fmt(*p)])
                        .collect::<Vec<_>>()
                });
                write_table(&path, &["x", "mu", "psi"], rows)?;
                manifest.outputs.push(path);
            }
            manifest.iterations.push(sol.report.iterations);
            json!({
                "residual": sol.report.residual,
                "negative_count": sol.report.negative_count,
            })
        }
        (ResolvedProblem::Xy { spec, grid }, Quadrature::Xy(q)) => {
            let sol = source_iteration_xy(spec, grid, q, &options)?;
            write_heatmap(&phi_path, grid, &sol.scalar.values)?;
            manifest.outputs.push(phi_path);
            if extra.pgm {
                let path = dir.join("phi.pgm");
                write_pgm(&path, grid, &sol.scalar.values)?;
                manifest.outputs.push(path);
            }
            let variation = match &extra.profile {
                Some(c) => Some(write_profile(&dir, &sol.scalar, c, &mut manifest.outputs)?),
                None => None,
            };
            manifest.iterations.push(sol.report.iterations);
            json!({
                "residual": sol.report.residual,
                "negative_count": sol.report.negative_count,
                "profile_variation": variation,
            })
        }
        _ => unreachable!("quadrature is built for the problem geometry"),
    };
    manifest.summary = summary;
    finish(manifest, &dir, started)
}

/// Random-ordinate ensemble: writes `mean.csv` and appends to `metrics.csv`.
pub fn ensemble(config: &RunConfig, source: Option<&str>, extra: SolveOutputs) -> CliResult<Manifest> {
    let started = Instant::now();
    let mut config = config.clone();
    config.quadrature.kind = QuadKind::Rom;
    let problem = config.validate(source)?;
    let geometry = problem.geometry();
    if geometry == Geometry::Slab && (extra.pgm || extra.profile.is_some()) {
        return Err(CliError::Config("images and circle profiles need an X-Y problem".into()));
    }
    let dir = output_dir(&config)?;
    let (reference, provenance) = load_reference(&config, &problem)?;
    let n = config.order();
    let partition = partition_velocity(geometry, n, config.quadrature.delta)?;
    let e = &config.ensemble;
    let mut ens = EnsembleConfig::new(e.samples, e.seed);
    ens.options = config.solver.options();
    ens.batch = e.batch;
    let executor = RayonExecutor::new(config.jobs()?)?;
    let gp = problem.grid_problem();
    let (result, metrics) = run_ensemble_with(&gp, &partition, &ens, &reference.phi, &executor)?;

    let mut manifest = Manifest::new("ensemble", config.to_toml()?);
    manifest.seed = Some(e.seed);
    manifest.reference = Some(provenance);
    let grid = field_grid(&problem);
    let mean_path = dir.join("mean.csv");
    write_field(&mean_path, &grid, &result.mean)?;
    manifest.outputs.push(mean_path);
    let metrics_path = dir.join("metrics.csv");
    append_metrics(
        &metrics_path,
        &MetricsRow {
            t: e.samples,
            n,
            error: metrics.error,
            bias: metrics.bias,
            mean_variance: metrics.mean_variance,
        },
    )?;
    manifest.outputs.push(metrics_path);
    let mut variation = None;
    if let (ResolvedProblem::Xy { grid, .. }, FieldGrid::Xy(_)) = (&problem, grid) {
        let mean = ScalarFlux2D {
            grid: *grid,
            values: result.mean.clone(),
        };
        if extra.pgm {
            let path = dir.join("mean.pgm");
            write_pgm(&path, grid, &result.mean)?;
            manifest.outputs.push(path);
        }
        if let Some(c) = &extra.profile {
            variation = Some(write_profile(&dir, &mean, c, &mut manifest.outputs)?);
        }
    }
    manifest.summary = json!({
        "samples": e.samples,
        "cells": n,
        "jobs": executor.jobs(),
        "error": metrics.error,
        "bias": metrics.bias,
        "mean_variance": metrics.mean_variance,
        "profile_variation": variation,
    });
    finish(manifest, &dir, started)
}

/// Neumann-series reference for a slab problem, written on the grid nodes
/// as `oracle.csv`. When the config names a DOM quadrature, the RMS
/// difference of that solve from the oracle is reported too.
pub fn oracle(config: &RunConfig, source: Option<&str>) -> CliResult<Manifest> {
    let started = Instant::now();
    let problem = config.validate(source)?;
    let ResolvedProblem::Slab { spec, grid } = &problem else {
        return Err(CliError::Config("the oracle is only available for slab problems".into()));
    };
    let neumann = config.oracle.neumann();
    let dir = output_dir(config)?;
    let sol = neumann_phi_slab(spec, &neumann)?;
    let phi = sol.on_grid(grid);
    let path = dir.join("oracle.csv");
    write_slab_field(&path, grid, &phi)?;
    let mut manifest = Manifest::new("oracle", config.to_toml()?);
    manifest.outputs.push(path);
    let mut dom_difference = None;
    if config.quadrature.kind != QuadKind::Rom {
        let q = build_quadrature(config, Geometry::Slab)?;
        let (dom, iterations) = problem.grid_problem().solve(&q, &config.solver.options())?;
        manifest.iterations.push(iterations);
        dom_difference = Some(l2_error(&dom, &phi)?);
    }
    manifest.summary = json!({
        "terms": sol.term_norms.len(),
        "tail_bound": sol.tail_bound,
        "lambda": sol.lambda,
        "dom_l2_difference": dom_difference,
    });
    finish(manifest, &dir, started)
}

/// Error (and bias) against a reference over increasing resolutions,
/// written as `convergence.csv`.
pub fn convergence(config: &RunConfig, source: Option<&str>, resolutions: &[usize]) -> CliResult<Manifest> {
    let started = Instant::now();
    let problem = config.validate(source)?;
    if config.reference.file.is_some() {
        return Err(CliError::Config(
            "convergence studies compute their own reference; set `reference.kind` and `reference.order`".into(),
        ));
    }
    if config.quadrature.kind == QuadKind::Rom && problem.geometry() == Geometry::Slab {
        if let Some(n) = resolutions.iter().find(|n| *n % 2 != 0) {
            return Err(CliError::Config(format!("slab random ordinates need even cell counts, got {n}")));
        }
    }
    let dir = output_dir(config)?;
    let (reference, provenance) = load_reference(config, &problem)?;
    let method = match config.quadrature.kind {
        QuadKind::Uniform => Method::DomUniform,
        QuadKind::Gauss => Method::DomGauss,
        QuadKind::Rom => Method::Rom {
            samples: config.ensemble.samples,
            seed: config.ensemble.seed,
        },
    };
    let executor = RayonExecutor::new(config.jobs()?)?;
    let options: SolverOptions = config.solver.options();
    let table = convergence_study(&problem.grid_problem(), method, resolutions, &reference, &options, &executor)?;

    let path = dir.join("convergence.csv");
    let fit = &table.error_fit;
    let rows = table.rows.iter().map(|r| {
        vec![
            r.resolution.to_string(),
            fmt(r.error),
            r.bias.map(fmt).unwrap_or_default(),
            fmt(fit.slope),
            fmt(fit.endpoint_slope),
        ]
    });
    write_table(&path, &["resolution", "error", "bias", "order_fit", "order_endpoint"], rows)?;
    let mut manifest = Manifest::new("convergence", config.to_toml()?);
    if let Method::Rom { seed, .. } = method {
        manifest.seed = Some(seed);
    }
    manifest.reference = Some(provenance);
    manifest.outputs.push(path);
    let bias = table.bias_fit.as_ref().map(|b| {
        json!({
            "order_fit": b.slope,
            "order_endpoint": b.endpoint_slope,
            "residual": b.residual,
        })
    });
    manifest.summary = json!({
        "h": table.rows.iter().map(|r| r.h).collect::<Vec<_>>(),
        "mean_variance": table.rows.iter().map(|r| r.mean_variance).collect::<Vec<_>>(),
        "error": {
            "order_fit": fit.slope,
            "order_endpoint": fit.endpoint_slope,
            "residual": fit.residual,
        },
        "bias": bias,
    });
    finish(manifest, &dir, started)
}

/// Resolutions a benchmark convergence study uses unless given.
pub fn default_resolutions(geometry: Geometry, kind: QuadKind) -> Vec<usize> {
    match (geometry, kind) {
        (Geometry::Slab, QuadKind::Rom) => vec![2, 4, 8, 16],
        (Geometry::Slab, _) => vec![10, 20, 40, 80],
        (Geometry::Xy, QuadKind::Rom) => vec![1, 2, 3],
        (Geometry::Xy, _) => vec![2, 3, 4, 5],
    }
}

#[derive(Debug, Clone, Default)]
pub struct BenchmarkRequest {
    pub rom: bool,
    pub convergence: bool,
    pub resolutions: Option<Vec<usize>>,
    pub outputs: SolveOutputs,
}

/// Runs a named benchmark: a single solve, an ensemble (`rom`), or a
/// convergence study. X-Y runs sample the default circle unless told
/// otherwise.
pub fn benchmark(config: &RunConfig, request: &BenchmarkRequest) -> CliResult<Manifest> {
    let mut config = config.clone();
    let name = config
        .problem
        .benchmark
        .clone()
        .ok_or_else(|| CliError::Config("no benchmark named".into()))?;
    let bench: Benchmark = name.parse().map_err(CliError::Config)?;
    let geometry = bench.geometry();
    if request.rom {
        config.quadrature.kind = QuadKind::Rom;
    }
    let mut outputs = request.outputs;
    if geometry == Geometry::Xy && outputs.profile.is_none() && !request.convergence {
        outputs.profile = Some(Circle::DEFAULT);
    }
    if request.convergence {
        if geometry == Geometry::Xy && !request.rom && config.reference.order.is_none() {
            config.reference.order = Some(20);
        }
        let resolutions = request
            .resolutions
            .clone()
            .unwrap_or_else(|| default_resolutions(geometry, config.quadrature.kind));
        convergence(&config, None, &resolutions)
    } else if request.rom {
        ensemble(&config, None, outputs)
    } else {
        solve(&config, None, outputs)
    }
}

/// Writes a quadrature table: `index,mu_or_c,s,zeta,theta,weight`. Slab
/// rows leave the X-Y columns empty.
pub fn write_quadrature(out: &mut dyn Write, quadrature: &Quadrature) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(["index", "mu_or_c", "s", "zeta", "theta", "weight"])?;
    match quadrature {
        Quadrature::Slab(q) => {
            for (l, (mu, wt)) in q.nodes().iter().zip(q.weights()).enumerate() {
                w.write_record([l.to_string(), fmt(*mu), String::new(), String::new(), String::new(), fmt(*wt)])?;
            }
        }
        Quadrature::Xy(q) => {
            for (l, (o, wt)) in q.ordinates().iter().zip(q.weights()).enumerate() {
                w.write_record([l.to_string(), fmt(o.c), fmt(o.s), fmt(o.zeta), fmt(o.theta), fmt(*wt)])?;
            }
        }
    }
    w.flush().map_err(|e| CliError::io("<output>", e))
}
