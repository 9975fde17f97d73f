// Copyright 2026 The randord Authors
// SPDX-License-Identifier: Apache-2.0

//! Steady radiative transport in slab and X-Y geometry with deterministic
//! (DOM) and randomly sampled (ROM) ordinate sets.
//!
//! The crate is `no_std` and only needs `alloc`. Elementary functions come
//! from `libm`, so results are bitwise reproducible across targets. File IO,
//! the command line front end and thread-parallel ensembles live in the
//! companion `randord` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod ensemble;
mod error;
pub mod problem;
pub mod quadrature;
pub mod rng;
pub mod slab;
pub mod xy;

pub use error::{Error, Result};
