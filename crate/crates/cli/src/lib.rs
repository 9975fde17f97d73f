// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Command-line driver for `randord-core`: configuration, benchmark
//! registry, file formats, a thread-pool sample executor and the
//! subcommands built from them.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod parallel;
pub mod registry;

pub use config::RunConfig;
pub use error::{CliError, CliResult};
