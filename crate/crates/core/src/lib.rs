//! Monte-Carlo system simulator for overlay device-to-device (D2D)
//! communications in a sectored multi-cell downlink.
//!
//! A drop places devices uniformly in a hexagonal layout, computes every
//! BS→device and device→device gain, runs a discovery phase where each
//! device measures SINR to its peers, greedily pairs devices into one-relay
//! links, and evaluates throughput, radiated energy and energy efficiency
//! against a no-D2D baseline.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod communication;
pub mod discovery;
pub mod energy;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod propagation;
pub mod units;

pub use error::{Error, Result};
