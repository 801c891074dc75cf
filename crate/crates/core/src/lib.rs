//! Person re-identification toolkit.
//!
//! The crate bundles the pieces needed to train and compare ReID models
//! without the network itself:
//!
//! - [`imaging`]: random rectangle and random polygon erasing, occlusion
//!   injection and image I/O.
//! - [`losses`]: cross-entropy, batch-hard triplet, online instance matching
//!   and reconstruction losses with analytic gradients.
//! - [`descriptor`]: branch layout of the hierarchical descriptor, REIDFEAT
//!   feature files and distance matrices.
//! - [`eval`]: CMC / mAP under the cross-camera protocol and the occlusion
//!   robustness benchmark.
//! - [`efficiency`]: the efficiency score used to rank models by speed,
//!   size, feature dimension and accuracy.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! pin the common instantiations.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod descriptor;
pub mod efficiency;
pub mod error;
pub mod eval;
pub mod gradcheck;
pub mod imaging;
pub mod losses;
pub mod matrix;
pub mod rng;
pub mod scalar;
#[cfg(test)]
mod test_util;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use rng::{RandomSource, SplitMix64};
pub use scalar::Real;

pub type Matrix32 = matrix::Matrix<f32>;
pub type Matrix64 = matrix::Matrix<f64>;
pub type FeatureSet32 = descriptor::FeatureSet<f32>;
pub type FeatureSet64 = descriptor::FeatureSet<f64>;
pub type LossReport64 = losses::LossReport<f64>;
pub type OimState64 = losses::OimState<f64>;
pub type RankingResult64 = eval::RankingResult<f64>;
pub type ModelProfile64 = efficiency::ModelProfile<f64>;
