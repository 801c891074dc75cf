//! Supervision losses with analytic gradients.
//!
//! Every loss returns a [`LossReport`] holding the reduced value, the
//! per-sample terms it was reduced from, and the gradient with respect to the
//! differentiated input. With [`Reduction::Sum`] the value is the sum of the
//! per-sample terms; with [`Reduction::Mean`] it is that sum divided by the
//! number of samples (rows).

mod batch;
mod branch;
mod ce;
mod mse;
mod oim;
mod triplet;

pub use self::batch::{sample_pk_batch, LabeledBatch, OimBatch};
pub use self::branch::{branch_loss, Branch, BranchConfig, BranchInputs, BranchReport};
pub use self::ce::{ce_loss, softmax};
pub use self::mse::mse_loss;
pub use self::oim::{oim_forward, oim_step, OimConfig, OimForward, OimState};
pub use self::triplet::{triplet_loss, TripletConfig};

use serde::{Deserialize, Serialize};

use crate::matrix::Matrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    #[default]
    Sum,
    Mean,
}

impl Reduction {
    pub(crate) fn factor<T: Real>(self, n: usize) -> T {
        match self {
            Reduction::Sum => T::one(),
            Reduction::Mean if n == 0 => T::zero(),
            Reduction::Mean => T::one() / T::from_usize_lossy(n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossReport<T> {
    pub value: T,
    pub per_sample: Vec<T>,
    /// Gradient of `value` with respect to the differentiated input.
    pub grad: Matrix<T>,
    /// Gradient with respect to classifier weights, when the loss has any.
    pub grad_weights: Option<Matrix<T>>,
}
