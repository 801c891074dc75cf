//! Per-branch loss combinations: global features are supervised by triplet
//! and CE, partial features by OIM and CE, recovery features by
//! reconstruction and CE.

use serde::{Deserialize, Serialize};

use super::{
    ce_loss, mse_loss, oim_step, triplet_loss, LabeledBatch, OimBatch, OimState, Reduction,
    TripletConfig,
};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Global,
    Partial,
    Recovery,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchConfig<T> {
    /// Weight of the branch-specific loss (triplet, OIM or reconstruction).
    pub aux_weight: T,
    pub ce_weight: T,
    pub ce_reduction: Reduction,
}

impl<T: Real> Default for BranchConfig<T> {
    fn default() -> Self {
        Self {
            aux_weight: T::one(),
            ce_weight: T::one(),
            ce_reduction: Reduction::Sum,
        }
    }
}

pub enum BranchInputs<'a, T> {
    Global {
        batch: &'a LabeledBatch<T>,
        classifier: &'a Matrix<T>,
        triplet: TripletConfig<T>,
    },
    /// CE covers only the labeled rows; the OIM step mutates `state`.
    Partial {
        batch: &'a OimBatch<T>,
        classifier: &'a Matrix<T>,
        state: &'a mut OimState<T>,
    },
    Recovery {
        batch: &'a LabeledBatch<T>,
        classifier: &'a Matrix<T>,
        reconstructed: &'a Matrix<T>,
        target: &'a Matrix<T>,
        reconstruction_reduction: Reduction,
    },
}

impl<T> BranchInputs<'_, T> {
    pub fn branch(&self) -> Branch {
        match self {
            BranchInputs::Global { .. } => Branch::Global,
            BranchInputs::Partial { .. } => Branch::Partial,
            BranchInputs::Recovery { .. } => Branch::Recovery,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchReport<T> {
    pub branch: Branch,
    pub value: T,
    /// Unweighted constituent values, e.g. `[("triplet", ..), ("ce", ..)]`.
    pub terms: Vec<(&'static str, T)>,
    pub grad_features: Matrix<T>,
    pub grad_classifier: Matrix<T>,
    /// Only for the recovery branch.
    pub grad_reconstruction: Option<Matrix<T>>,
}

pub fn branch_loss<T: Real>(
    inputs: BranchInputs<'_, T>,
    cfg: &BranchConfig<T>,
) -> Result<BranchReport<T>> {
    let branch = inputs.branch();
    match inputs {
        BranchInputs::Global {
            batch,
            classifier,
            triplet,
        } => {
            let tri = triplet_loss(batch, &triplet)?;
            let ce = ce_loss(batch, classifier, cfg.ce_reduction)?;
            let mut grad = tri.grad;
            grad.scale(cfg.aux_weight);
            grad.add_scaled(&ce.grad, cfg.ce_weight)?;
            Ok(BranchReport {
                branch,
                value: cfg.aux_weight * tri.value + cfg.ce_weight * ce.value,
                terms: vec![("triplet", tri.value), ("ce", ce.value)],
                grad_features: grad,
                grad_classifier: scaled(ce.grad_weights.expect("ce has weights"), cfg.ce_weight),
                grad_reconstruction: None,
            })
        }
        BranchInputs::Partial {
            batch,
            classifier,
            state,
        } => {
            let labeled: Vec<usize> = (0..batch.labels.len())
                .filter(|&i| batch.labels[i].is_some())
                .collect();
            let dim = batch.features.cols();
            let rows: Vec<Vec<T>> = labeled
                .iter()
                .map(|&i| batch.features.row(i).to_vec())
                .collect();
            let sub = if rows.is_empty() {
                Matrix::zeros(0, dim)
            } else {
                Matrix::from_rows(&rows)?
            };
            let sub_labels = labeled.iter().map(|&i| batch.labels[i].unwrap()).collect();
            let ce = ce_loss(
                &LabeledBatch::new(sub, sub_labels)?,
                classifier,
                cfg.ce_reduction,
            )?;
            let oim = oim_step(state, batch)?;

            let mut grad = oim.grad;
            grad.scale(cfg.aux_weight);
            for (k, &i) in labeled.iter().enumerate() {
                for (g, &c) in grad.row_mut(i).iter_mut().zip(ce.grad.row(k)) {
                    *g += cfg.ce_weight * c;
                }
            }
            Ok(BranchReport {
                branch,
                value: cfg.aux_weight * oim.value + cfg.ce_weight * ce.value,
                terms: vec![("oim", oim.value), ("ce", ce.value)],
                grad_features: grad,
                grad_classifier: scaled(ce.grad_weights.expect("ce has weights"), cfg.ce_weight),
                grad_reconstruction: None,
            })
        }
        BranchInputs::Recovery {
            batch,
            classifier,
            reconstructed,
            target,
            reconstruction_reduction,
        } => {
            if reconstructed.rows() != batch.len() {
                return Err(Error::DimensionMismatch {
                    expected: batch.len(),
                    got: reconstructed.rows(),
                });
            }
            let rec = mse_loss(reconstructed, target, reconstruction_reduction)?;
            let ce = ce_loss(batch, classifier, cfg.ce_reduction)?;
            Ok(BranchReport {
                branch,
                value: cfg.aux_weight * rec.value + cfg.ce_weight * ce.value,
                terms: vec![("reconstruction", rec.value), ("ce", ce.value)],
                grad_features: scaled(ce.grad, cfg.ce_weight),
                grad_classifier: scaled(ce.grad_weights.expect("ce has weights"), cfg.ce_weight),
                grad_reconstruction: Some(scaled(rec.grad, cfg.aux_weight)),
            })
        }
    }
}

fn scaled<T: Real>(mut m: Matrix<T>, s: T) -> Matrix<T> {
    if s != T::one() {
        m.scale(s);
    }
    m
}
