//! Probabilistic spiking network engine.
//!
//! GLM neurons with sigmoid spiking, raised-cosine synaptic/somatic filters,
//! multi-sample online learning rules (GEM, mini-batch, importance-weighted)
//! and multi-sample inference (majority voting, uncertainty, calibration).
//!
//! The crate is `no_std`-compatible (`alloc` required); file IO and the
//! experiment harness live in the companion `msnn-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod filters;
pub mod inference;
pub mod learners;
pub mod math;
pub mod metrics;
pub mod network;
pub mod objectives;
pub mod raster;
pub mod rng;

pub use network::{ModelParams, Topology};
pub use raster::{LabeledExample, SpikeRaster};
