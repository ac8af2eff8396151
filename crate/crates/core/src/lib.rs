//! Randomized strictly convex chains through Poisson pseudo-lattices.
//!
//! A chain `gamma_n` inscribed in an outer chain `gamma_n'` is refined one
//! point at a time. The point inserted at step `n` is taken from a Poisson
//! layer of intensity `w_{q_n}` whenever that layer has a point in the
//! admissible region, which keeps the generalized affine length bounded
//! below while the chances of a hit improve with `n`.
//!
//! Modules, bottom up:
//! - [`pseudolattice`]: prime powers and layer intensities.
//! - [`geometry`]: planar primitives and affine maps.
//! - [`chain`]: inscribed chain pairs and insertion.
//! - [`admissible`]: the parabola-band admissible regions.
//! - [`sampler`]: seeded generators and Poisson sampling.
//! - [`construction`]: the step loop and the multi-wedge assembly.
//! - [`experiments`]: configs, verification suite, CSV/JSON/SVG outputs.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod admissible;
pub mod chain;
pub mod construction;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod pseudolattice;
pub mod sampler;

pub use chain::{initial_pair, InscribedChainPair, PairRecord, Wedge};
pub use construction::{run, RunConfig, RunSummary, StepRecord};
pub use error::*;
pub use geometry::{Point, Triangle};
