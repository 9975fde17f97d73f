// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use randord::commands::{self, BenchmarkRequest, Circle, SolveOutputs};
use randord::config::{DomKind, GeometryTag, QuadKind, SchemeTag};
use randord::output::Manifest;
use randord::{CliError, CliResult, RunConfig};
use randord_core::analysis::Method;
use randord_core::ensemble::EnsembleConfig;
use randord_core::quadrature::{partition_velocity, sample_rom, Geometry};

/// Discrete and random ordinate solvers for linear radiative transport.
#[derive(Parser)]
#[command(name = "randord", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a quadrature set as CSV.
    Quad(QuadArgs),
    /// Solve a problem once and write the scalar flux.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        extra: ExtraOutputs,
        /// Also write the angular flux (slab only).
        #[arg(long)]
        angular: bool,
    },
    /// Run a random-ordinate ensemble.
    Ensemble {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        extra: ExtraOutputs,
        /// Velocity cells `n` (slab) or level `N` (X-Y).
        #[arg(long)]
        cells: Option<usize>,
    },
    /// Neumann-series reference for a slab problem.
    Oracle {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        panels: Option<usize>,
        #[arg(long)]
        mu_order: Option<usize>,
        /// Velocity truncation of the oracle (the quadrature has its own `--delta`).
        #[arg(long)]
        oracle_delta: Option<f64>,
    },
    /// Error against a reference over a list of velocity resolutions.
    Convergence {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated, strictly increasing.
        #[arg(long, value_delimiter = ',', required = true)]
        resolutions: Vec<usize>,
    },
    /// Run a named benchmark with its default settings.
    Benchmark {
        /// slab-case-1, slab-case-2, slab-case-3, center-source or lattice.
        name: String,
        #[command(flatten)]
        overrides: Overrides,
        #[command(flatten)]
        extra: ExtraOutputs,
        /// Use random ordinates (an ensemble) instead of a fixed quadrature.
        #[arg(long)]
        rom: bool,
        /// Run a convergence study instead of a single solve.
        #[arg(long)]
        convergence: bool,
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<usize>>,
    },
}

#[derive(Args)]
struct QuadArgs {
    #[arg(long, value_enum, default_value = "slab")]
    geometry: GeometryTag,
    #[arg(long, value_enum, default_value = "uniform")]
    kind: QuadKind,
    /// `M`, `N`, or the cell count for random ordinates.
    #[arg(long, alias = "N")]
    order: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Sample index for random ordinates.
    #[arg(long, default_value_t = 0)]
    index: u64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProblemArgs {
    /// TOML run configuration.
    #[arg(long, conflicts_with = "benchmark")]
    config: Option<PathBuf>,
    /// Start from a named benchmark's defaults instead of a file.
    #[arg(long)]
    benchmark: Option<String>,
}

/// Flags that override configuration values.
#[derive(Args)]
struct Overrides {
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Slab cells `I`, or `NXxNY` for X-Y grids.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, value_enum)]
    quadrature: Option<QuadKind>,
    /// Velocity resolution (`M` or `N`).
    #[arg(long, alias = "N")]
    order: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Linear anisotropy factor.
    #[arg(long, allow_negative_numbers = true)]
    g: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Worker threads (default: `RANDORD_JOBS`, then all cores).
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, value_enum)]
    slab_scheme: Option<SchemeTag>,
    /// Reference field file written by `solve`.
    #[arg(long)]
    reference: Option<String>,
    #[arg(long, value_enum)]
    reference_kind: Option<DomKind>,
    #[arg(long)]
    reference_order: Option<usize>,
}

#[derive(Args)]
struct ExtraOutputs {
    /// Write a grayscale image of the X-Y field.
    #[arg(long)]
    pgm: bool,
    /// Sample the X-Y field along a circle: `cx,cy,r,K`.
    #[arg(long)]
    profile_circle: Option<Circle>,
}

impl ExtraOutputs {
    fn outputs(&self, angular: bool) -> SolveOutputs {
        SolveOutputs {
            angular,
            pgm: self.pgm,
            profile: self.profile_circle,
        }
    }
}

fn parse_grid(s: &str, config: &mut RunConfig) -> CliResult<()> {
    let bad = || CliError::Config(format!("--grid: expected `I` or `NXxNY`, got `{s}`"));
    match s.split_once('x') {
        Some((nx, ny)) => {
            config.grid.nx = Some(nx.trim().parse().map_err(|_| bad())?);
            config.grid.ny = Some(ny.trim().parse().map_err(|_| bad())?);
        }
        None => {
            let n: usize = s.trim().parse().map_err(|_| bad())?;
            if config.geometry()? == Geometry::Slab {
                config.grid.cells = Some(n);
            } else {
                config.grid.nx = Some(n);
                config.grid.ny = Some(n);
            }
        }
    }
    Ok(())
}

impl Overrides {
    fn apply(&self, c: &mut RunConfig) -> CliResult<()> {
        if let Some(v) = &self.out {
            c.output = v.clone();
        }
        if let Some(v) = &self.grid {
            parse_grid(v, c)?;
        }
        if let Some(v) = self.quadrature {
            c.quadrature.kind = v;
        }
        if let Some(v) = self.order {
            c.quadrature.order = Some(v);
        }
        if let Some(v) = self.delta {
            c.quadrature.delta = v;
        }
        if let Some(v) = self.g {
            c.problem.g = Some(v);
        }
        if let Some(v) = self.seed {
            c.ensemble.seed = v;
        }
        if let Some(v) = self.samples {
            c.ensemble.samples = v;
        }
        if let Some(v) = self.jobs {
            c.ensemble.jobs = Some(v);
        }
        if let Some(v) = self.tol {
            c.solver.tol = v;
        }
        if let Some(v) = self.max_iters {
            c.solver.max_iters = v;
        }
        if let Some(v) = self.slab_scheme {
            c.solver.slab_scheme = v;
        }
        if let Some(v) = &self.reference {
            c.reference.file = Some(v.clone());
        }
        if let Some(v) = self.reference_kind {
            c.reference.kind = Some(v);
        }
        if let Some(v) = self.reference_order {
            c.reference.order = Some(v);
        }
        Ok(())
    }
}

/// Loads the base config and applies flag overrides. Returns the config
/// text too, when it came from a file.
fn load(problem: &ProblemArgs, overrides: &Overrides) -> CliResult<(RunConfig, Option<String>)> {
    let (mut config, text) = match (&problem.config, &problem.benchmark) {
        (Some(path), _) => {
            let (c, t) = RunConfig::load(path)?;
            (c, Some(t))
        }
        (None, Some(name)) => (RunConfig::for_benchmark(name)?, None),
        (None, None) => return Err(CliError::Config("pass --config <file> or --benchmark <name>".into())),
    };
    overrides.apply(&mut config)?;
    Ok((config, text))
}

fn quad(args: &QuadArgs) -> CliResult<()> {
    let geometry: Geometry = args.geometry.into();
    let quadrature = match args.kind {
        QuadKind::Uniform => Method::DomUniform.quadrature(geometry, args.order)?,
        QuadKind::Gauss => Method::DomGauss.quadrature(geometry, args.order)?,
        QuadKind::Rom => {
            if geometry == Geometry::Slab && args.order % 2 != 0 {
                return Err(CliError::Config("--order: slab random ordinates need an even cell count".into()));
            }
            let partition = partition_velocity(geometry, args.order, args.delta)?;
            let key = EnsembleConfig::new(1, args.seed).key(&partition, args.index);
            sample_rom(&partition, key).quadrature
        }
    };
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(path, e))?;
            let mut w = BufWriter::new(file);
            commands::write_quadrature(&mut w, &quadrature)?;
            w.flush().map_err(|e| CliError::io(path, e))
        }
        None => commands::write_quadrature(&mut io::stdout().lock(), &quadrature),
    }
}

fn report(manifest: &Manifest) {
    for path in &manifest.outputs {
        println!("wrote {}", path.display());
    }
    if !manifest.summary.is_null() {
        println!("{}", manifest.summary);
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let manifest = match cli.command {
        Command::Quad(args) => return quad(&args),
        Command::Solve {
            problem,
            overrides,
            extra,
            angular,
        } => {
            let (config, text) = load(&problem, &overrides)?;
            commands::solve(&config, text.as_deref(), extra.outputs(angular))?
        }
        Command::Ensemble {
            problem,
            overrides,
            extra,
            cells,
        } => {
            let (mut config, text) = load(&problem, &overrides)?;
            if let Some(n) = cells {
                config.quadrature.order = Some(n);
            }
            commands::ensemble(&config, text.as_deref(), extra.outputs(false))?
        }
        Command::Oracle {
            problem,
            overrides,
            panels,
            mu_order,
            oracle_delta,
        } => {
            let (mut config, text) = load(&problem, &overrides)?;
            if let Some(v) = panels {
                config.oracle.panels = v;
            }
            if let Some(v) = mu_order {
                config.oracle.mu_order = v;
            }
            if let Some(v) = oracle_delta {
                config.oracle.delta = v;
            }
            commands::oracle(&config, text.as_deref())?
        }
        Command::Convergence {
            problem,
            overrides,
            resolutions,
        } => {
            let (config, text) = load(&problem, &overrides)?;
            commands::convergence(&config, text.as_deref(), &resolutions)?
        }
        Command::Benchmark {
            name,
            overrides,
            extra,
            rom,
            convergence,
            resolutions,
        } => {
            let mut config = RunConfig::for_benchmark(&name)?;
            if overrides.out.is_none() {
                config.output = format!("out/{name}");
            }
            overrides.apply(&mut config)?;
            let request = BenchmarkRequest {
                rom,
                convergence,
                resolutions,
                outputs: extra.outputs(false),
            };
            commands::benchmark(&config, &request)?
        }
    };
    report(&manifest);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
