// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Thread-pool sample executor.

use std::ops::Range;

use randord_core::ensemble::SampleExecutor;
use randord_core::Result;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Runs each batch on a dedicated pool. Results are collected in index
/// order, so ensemble statistics do not depend on the worker count.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    pub fn new(jobs: usize) -> CliResult<Self> {
        if jobs == 0 {
            return Err(CliError::Config("`jobs` must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Config(format!("cannot start {jobs} worker threads: {e}")))?;
        Ok(Self { pool })
    }

    pub fn jobs(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl SampleExecutor for RayonExecutor {
    fn run_batch(&self, indices: Range<u64>, job: &(dyn Fn(u64) -> Result<Vec<f64>> + Sync)) -> Vec<Result<Vec<f64>>> {
        self.pool.install(|| indices.into_par_iter().map(job).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use randord_core::ensemble::Sequential;

    #[test]
    fn matches_sequential_order() {
        let job = |i: u64| -> Result<Vec<f64>> { Ok(vec![i as f64, (i * i) as f64]) };
        let seq = Sequential.run_batch(3..40, &job);
        for jobs in [1, 4] {
            assert_eq!(RayonExecutor::new(jobs).unwrap().run_batch(3..40, &job), seq);
        }
        assert!(RayonExecutor::new(0).is_err());
    }
}
