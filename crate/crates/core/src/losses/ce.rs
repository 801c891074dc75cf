use super::{LabeledBatch, LossReport, Reduction};
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::scalar::Real;

/// Max-shifted softmax.
pub fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Softmax cross-entropy of a bias-free linear classifier `weights` (C x D)
/// applied to each feature row. Gradients cover both features and weights.
pub fn ce_loss<T: Real>(
    batch: &LabeledBatch<T>,
    weights: &Matrix<T>,
    reduction: Reduction,
) -> Result<LossReport<T>> {
    let (classes, dim) = weights.shape();
    if dim != batch.dim() {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: batch.dim(),
        });
    }
    if classes < 2 {
        return Err(Error::InvalidConfig(format!(
            "classifier needs at least 2 classes, got {classes}"
        )));
    }
    if let Some(&label) = batch.labels.iter().find(|&&l| l >= classes) {
        return Err(Error::LabelOutOfRange { label, classes });
    }
    weights.ensure_finite()?;

    let n = batch.len();
    let scale: T = reduction.factor(n);
    let mut per_sample = Vec::with_capacity(n);
    let mut grad = Matrix::zeros(n, dim);
    let mut grad_w = Matrix::zeros(classes, dim);

    for (i, (f, &y)) in batch.features.iter_rows().zip(&batch.labels).enumerate() {
        let logits: Vec<T> = weights.iter_rows().map(|w| dot(w, f)).collect();
        let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
        let lse = max + logits.iter().map(|&z| (z - max).exp()).sum::<T>().ln();
        per_sample.push(lse - logits[y]);

        let mut g = softmax(&logits);
        g[y] -= T::one();
        for (j, &gj) in g.iter().enumerate() {
            let gj = gj * scale;
            let w = weights.row(j);
            for (d, gf) in grad.row_mut(i).iter_mut().enumerate() {
                *gf += gj * w[d];
            }
            for (gw, &fd) in grad_w.row_mut(j).iter_mut().zip(f) {
                *gw += gj * fd;
            }
        }
    }

    let value = per_sample.iter().copied().sum::<T>() * scale;
    Ok(LossReport {
        value,
        per_sample,
        grad,
        grad_weights: Some(grad_w),
    })
}
