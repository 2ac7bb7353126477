//! Sampling-based docking control for a fully actuated surface vessel.
//!
//! The crate is organised bottom-up:
//!
//! - [`vessel`]: 3-DOF rigid-body model, thrust allocation and RK4 integration.
//! - [`world`]: U-shaped dock geometry, 2D LiDAR raycasting and collision checks.
//! - [`perception`]: LiDAR scan to dock estimate (DBSCAN, GMM, RANSAC, geometry).
//! - [`cost`]: the six-term docking stage cost.
//! - [`mppi`]: the path-integral optimizer that rolls out sampled thrust sequences.
//! - [`scenario`]: closed-loop episodes, suites, logs and SVG plots.
//!
//! Rollouts, LiDAR beams and suite episodes run on rayon when the `parallel`
//! feature is enabled (the default). Every random draw comes from a ChaCha
//! substream keyed by its work item, so results do not depend on the worker
//! count.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cost;
pub mod error;
pub mod geom;
pub mod mppi;
pub mod par;
pub mod perception;
pub mod rng;
pub mod scenario;
pub mod vessel;
pub mod world;

pub use error::{Error, Result};
