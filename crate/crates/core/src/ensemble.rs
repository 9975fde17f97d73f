// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Ensembles of random-ordinate solves and their error statistics.
//!
//! Samples may be computed in any order or concurrently (see
//! [`SampleExecutor`]) but are always folded into the statistics in
//! ascending sample index, so results do not depend on scheduling.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::problem::{SlabGrid, SlabProblem, XyGrid, XyProblem};
use crate::quadrature::{sample_rom, Geometry, Quadrature, VelocityPartition};
use crate::rng::{derive_seed, SampleKey};
use crate::slab::{source_iteration_slab, SolverOptions};
use crate::xy::source_iteration_xy;
use crate::{Error, Result};

/// A problem together with the spatial grid it is solved on.
#[derive(Clone, Copy)]
pub enum GridProblem<'a> {
    Slab {
        problem: &'a (dyn SlabProblem + Sync),
        grid: SlabGrid,
    },
    Xy {
        problem: &'a (dyn XyProblem + Sync),
        grid: XyGrid,
    },
}

impl GridProblem<'_> {
    pub fn geometry(&self) -> Geometry {
        match self {
            GridProblem::Slab { .. } => Geometry::Slab,
            GridProblem::Xy { .. } => Geometry::Xy,
        }
    }

    /// Length of a scalar-flux field on this grid.
    pub fn field_len(&self) -> usize {
        match self {
            GridProblem::Slab { grid, .. } => grid.node_count(),
            GridProblem::Xy { grid, .. } => grid.cell_count(),
        }
    }

    /// Deterministic solve with a fixed quadrature; returns `phi` and the
    /// iteration count.
    pub fn solve(&self, quadrature: &Quadrature, options: &SolverOptions) -> Result<(Vec<f64>, usize)> {
        match (self, quadrature) {
            (GridProblem::Slab { problem, grid }, Quadrature::Slab(q)) => {
                let sol = source_iteration_slab(*problem, grid, q, options)?;
                Ok((sol.scalar.values, sol.report.iterations))
            }
            (GridProblem::Xy { problem, grid }, Quadrature::Xy(q)) => {
                let sol = source_iteration_xy(*problem, grid, q, options)?;
                Ok((sol.scalar.values, sol.report.iterations))
            }
            _ => Err(Error::invalid("quadrature", "geometry does not match the problem")),
        }
    }
}

/// Draws sample `key` from `partition` and solves with it.
///
/// Errors are tagged with the sample index.
pub fn run_sample(
    problem: &GridProblem<'_>,
    partition: &VelocityPartition,
    key: SampleKey,
    options: &SolverOptions,
) -> Result<Vec<f64>> {
    if partition.geometry() != problem.geometry() {
        return Err(Error::invalid("partition", "geometry does not match the problem"));
    }
    let sample = sample_rom(partition, key);
    problem
        .solve(&sample.quadrature, options)
        .map(|(phi, _)| phi)
        .map_err(|e| Error::Sample {
            index: key.index,
            source: Box::new(e),
        })
}

/// Root mean square of `phi - reference` over all points.
pub fn l2_error(phi: &[f64], reference: &[f64]) -> Result<f64> {
    if phi.len() != reference.len() {
        return Err(Error::invalid(
            "reference",
            alloc::format!("field has {} points, reference has {}", phi.len(), reference.len()),
        ));
    }
    if phi.is_empty() {
        return Err(Error::invalid("reference", "empty field"));
    }
    let sum: f64 = phi.iter().zip(reference).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(libm::sqrt(sum / phi.len() as f64))
}

/// Error, bias and spread of an ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    /// Mean over samples of the single-run RMS error.
    pub error: f64,
    /// RMS error of the ensemble mean.
    pub bias: f64,
    /// Point-averaged unbiased sample variance (zero for one sample).
    pub mean_variance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub samples: usize,
    pub mean: Vec<f64>,
    /// Sum of squared deviations from the running mean, per point.
    pub m2: Vec<f64>,
    /// Single-run errors in sample order.
    pub errors: Vec<f64>,
    /// Every sample field, when retention was requested.
    pub retained: Option<Vec<Vec<f64>>>,
}

impl EnsembleResult {
    pub fn variance(&self) -> Vec<f64> {
        if self.samples < 2 {
            return vec![0.0; self.mean.len()];
        }
        let d = (self.samples - 1) as f64;
        self.m2.iter().map(|v| v / d).collect()
    }
}

/// Streaming mean/M2 accumulation (Welford) plus per-sample errors.
#[derive(Debug, Clone)]
pub struct EnsembleAccumulator<'r> {
    reference: &'r [f64],
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
    errors: Vec<f64>,
    retained: Option<Vec<Vec<f64>>>,
}

impl<'r> EnsembleAccumulator<'r> {
    pub fn new(reference: &'r [f64], retain: bool) -> Self {
        Self {
            reference,
            count: 0,
            mean: vec![0.0; reference.len()],
            m2: vec![0.0; reference.len()],
            errors: Vec::new(),
            retained: retain.then(Vec::new),
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Folds in the next sample.
    pub fn push(&mut self, phi: Vec<f64>) -> Result<()> {
        self.errors.push(l2_error(&phi, self.reference)?);
        self.count += 1;
        let n = self.count as f64;
        for ((m, s), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(&phi) {
            let delta = x - *m;
            *m += delta / n;
            *s += delta * (x - *m);
        }
        if let Some(r) = self.retained.as_mut() {
            r.push(phi);
        }
        Ok(())
    }

    /// Final statistics. Panics if the bias exceeds the error, which the
    /// triangle inequality rules out.
    pub fn finish(self) -> Result<(EnsembleResult, MetricReport)> {
        if self.count == 0 {
            return Err(Error::invalid("samples", "ensemble is empty"));
        }
        let error = self.errors.iter().sum::<f64>() / self.count as f64;
        let bias = l2_error(&self.mean, self.reference)?;
        assert!(
            bias <= error + 1e-12 * (1.0 + error),
            "ensemble bias {bias:e} exceeds mean error {error:e}"
        );
        let result = EnsembleResult {
            samples: self.count,
            mean: self.mean,
            m2: self.m2,
            errors: self.errors,
            retained: self.retained,
        };
        let variance = result.variance();
        let mean_variance = variance.iter().sum::<f64>() / variance.len() as f64;
        Ok((
            result,
            MetricReport {
                error,
                bias,
                mean_variance,
            },
        ))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleConfig {
    /// Sample count `t`.
    pub samples: usize,
    /// Global seed; each partition level uses its own derived seed.
    pub seed: u64,
    pub options: SolverOptions,
    /// Samples computed before each in-order fold; bounds memory.
    pub batch: usize,
    /// Keep every sample field in the result.
    pub retain_samples: bool,
}

impl EnsembleConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            options: SolverOptions::default(),
            batch: 256,
            retain_samples: false,
        }
    }

    /// Key of sample `index` on `partition`. Seeds are derived per
    /// resolution so that studies over several partitions use independent
    /// draws.
    pub fn key(&self, partition: &VelocityPartition, index: u64) -> SampleKey {
        SampleKey::new(derive_seed(self.seed, partition.len() as u64), index)
    }
}

/// Runs a batch of independent sample jobs; results must come back in
/// index order.
pub trait SampleExecutor {
    fn run_batch(&self, indices: Range<u64>, job: &(dyn Fn(u64) -> Result<Vec<f64>> + Sync)) -> Vec<Result<Vec<f64>>>;
}

/// Runs jobs one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl SampleExecutor for Sequential {
    fn run_batch(&self, indices: Range<u64>, job: &(dyn Fn(u64) -> Result<Vec<f64>> + Sync)) -> Vec<Result<Vec<f64>>> {
        indices.map(job).collect()
    }
}

/// Sequential ensemble of samples `0..t`.
pub fn run_ensemble(
    problem: &GridProblem<'_>,
    partition: &VelocityPartition,
    config: &EnsembleConfig,
    reference: &[f64],
) -> Result<(EnsembleResult, MetricReport)> {
    run_ensemble_with(problem, partition, config, reference, &Sequential)
}

/// Ensemble of samples `0..t` with a caller-supplied executor. The first
/// failing sample (in index order) aborts the run.
pub fn run_ensemble_with(
    problem: &GridProblem<'_>,
    partition: &VelocityPartition,
    config: &EnsembleConfig,
    reference: &[f64],
    executor: &dyn SampleExecutor,
) -> Result<(EnsembleResult, MetricReport)> {
    if config.samples == 0 {
        return Err(Error::invalid("samples", "need at least one sample"));
    }
    if config.batch == 0 {
        return Err(Error::invalid("batch", "batch size must be positive"));
    }
    if reference.len() != problem.field_len() {
        return Err(Error::invalid("reference", "reference is not on the problem grid"));
    }
    let mut acc = EnsembleAccumulator::new(reference, config.retain_samples);
    let job = |index: u64| run_sample(problem, partition, config.key(partition, index), &config.options);
    let total = config.samples as u64;
    let mut start = 0;
    while start < total {
        let end = (start + config.batch as u64).min(total);
        for phi in executor.run_batch(start..end, &job) {
            acc.push(phi?)?;
        }
        start = end;
    }
    acc.finish()
}
