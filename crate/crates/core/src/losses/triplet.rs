use serde::{Deserialize, Serialize};

use super::{LabeledBatch, LossReport, Reduction};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripletConfig<T> {
    pub margin: T,
    pub reduction: Reduction,
}

impl<T: Real> Default for TripletConfig<T> {
    fn default() -> Self {
        Self {
            margin: T::lit(0.3),
            reduction: Reduction::Sum,
        }
    }
}

fn euclidean<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

/// Batch-hard triplet loss: for each anchor, hinge on margin plus its
/// farthest same-class distance minus its nearest other-class distance.
/// Distances are plain Euclidean. Ties pick the lowest index; the hinge is
/// inactive (zero subgradient) when its argument is not positive.
pub fn triplet_loss<T: Real>(
    batch: &LabeledBatch<T>,
    cfg: &TripletConfig<T>,
) -> Result<LossReport<T>> {
    if !(cfg.margin >= T::zero()) {
        return Err(Error::InvalidConfig(format!(
            "margin {} must be >= 0",
            cfg.margin
        )));
    }
    let classes = batch.distinct_labels();
    if classes < 2 {
        return Err(Error::InsufficientClasses(classes));
    }
    let n = batch.len();
    let x = &batch.features;
    let mut dist = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(x.row(i), x.row(j));
            dist.set(i, j, d);
            dist.set(j, i, d);
        }
    }

    let scale: T = cfg.reduction.factor(n);
    let mut per_sample = Vec::with_capacity(n);
    let mut grad = Matrix::zeros(n, batch.dim());
    for a in 0..n {
        let mut pos = (a, T::neg_infinity());
        let mut neg = (usize::MAX, T::infinity());
        for j in 0..n {
            let d = dist.get(a, j);
            if batch.labels[j] == batch.labels[a] {
                if d > pos.1 {
                    pos = (j, d);
                }
            } else if d < neg.1 {
                neg = (j, d);
            }
        }
        let term = cfg.margin + pos.1 - neg.1;
        if term > T::zero() {
            per_sample.push(term);
            // d||a - p|| / da = (a - p) / ||a - p||, zero subgradient at 0.
            add_distance_grad(&mut grad, x, a, pos.0, pos.1, scale);
            add_distance_grad(&mut grad, x, a, neg.0, neg.1, -scale);
        } else {
            per_sample.push(T::zero());
        }
    }
    let value = per_sample.iter().copied().sum::<T>() * scale;
    Ok(LossReport {
        value,
        per_sample,
        grad,
        grad_weights: None,
    })
}

fn add_distance_grad<T: Real>(
    grad: &mut Matrix<T>,
    x: &Matrix<T>,
    a: usize,
    b: usize,
    d: T,
    scale: T,
) {
    if d <= T::zero() {
        return;
    }
    let coef = scale / d;
    for k in 0..x.cols() {
        let g = coef * (x.get(a, k) - x.get(b, k));
        let ga = grad.get(a, k);
        grad.set(a, k, ga + g);
        let gb = grad.get(b, k);
        grad.set(b, k, gb - g);
    }
}
