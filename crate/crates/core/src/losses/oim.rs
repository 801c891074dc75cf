//! Online instance matching.
//!
//! Each labeled feature is scored against a lookup table of class prototypes
//! (one unit-norm row per class) and a circular queue of recent unlabeled
//! features; the loss is the negative log of the softmax probability of the
//! true class, temperature-scaled, with the queue entries in the denominator.
//! The table and queue are not trained by gradient: after each step the
//! labeled rows are blended into their prototypes by momentum and unlabeled
//! rows are pushed into the queue, evicting the oldest.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::ce::softmax;
use super::{LossReport, OimBatch};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm, Matrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OimConfig<T> {
    pub temperature: T,
    /// Weight kept by the old prototype in `v <- normalize(mu v + (1 - mu) x)`.
    pub momentum: T,
    pub queue_size: usize,
    /// L2-normalize inputs before taking similarities.
    pub normalize_inputs: bool,
}

impl<T: Real> Default for OimConfig<T> {
    fn default() -> Self {
        Self {
            temperature: T::lit(0.1),
            momentum: T::lit(0.5),
            queue_size: 32,
            normalize_inputs: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OimState<T> {
    lut: Matrix<T>,
    queue: VecDeque<Vec<T>>,
    cfg: OimConfig<T>,
}

impl<T: Real> OimState<T> {
    /// Builds a state from initial prototypes; rows are normalized here.
    pub fn new(lut: Matrix<T>, cfg: OimConfig<T>) -> Result<Self> {
        if !(cfg.temperature > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "temperature {} must be positive",
                cfg.temperature
            )));
        }
        if !(cfg.momentum >= T::zero() && cfg.momentum <= T::one()) {
            return Err(Error::InvalidConfig(format!(
                "momentum {} outside [0, 1]",
                cfg.momentum
            )));
        }
        lut.ensure_finite()?;
        let mut lut = lut;
        for i in 0..lut.rows() {
            normalize_in_place(lut.row_mut(i))?;
        }
        Ok(Self {
            lut,
            queue: VecDeque::with_capacity(cfg.queue_size),
            cfg,
        })
    }

    pub fn config(&self) -> &OimConfig<T> {
        &self.cfg
    }

    pub fn lut(&self) -> &Matrix<T> {
        &self.lut
    }

    pub fn classes(&self) -> usize {
        self.lut.rows()
    }

    pub fn dim(&self) -> usize {
        self.lut.cols()
    }

    /// Queue contents, oldest first.
    pub fn queue(&self) -> impl Iterator<Item = &[T]> {
        self.queue.iter().map(Vec::as_slice)
    }

    pub fn queue_len(&self) -> usize {
        self.queue.len()
    }

    /// Appends an (already prepared) unlabeled feature, evicting the oldest.
    pub fn push_unlabeled(&mut self, x: &[T]) -> Result<()> {
        self.check_dim(x.len())?;
        if self.cfg.queue_size == 0 {
            return Ok(());
        }
        if self.queue.len() == self.cfg.queue_size {
            self.queue.pop_front();
        }
        self.queue.push_back(self.prepare(x)?.0);
        Ok(())
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: d,
            });
        }
        Ok(())
    }

    /// The vector similarities are taken with, plus its original norm.
    fn prepare(&self, x: &[T]) -> Result<(Vec<T>, T)> {
        if !self.cfg.normalize_inputs {
            return Ok((x.to_vec(), T::one()));
        }
        let n = norm(x);
        if n <= T::zero() {
            return Err(Error::ZeroVector);
        }
        Ok((x.iter().map(|&v| v / n).collect(), n))
    }

    fn update_prototype(&mut self, class: usize, xhat: &[T]) {
        let mu = self.cfg.momentum;
        let row = self.lut.row_mut(class);
        let old = row.to_vec();
        for (v, &x) in row.iter_mut().zip(xhat) {
            *v = mu * *v + (T::one() - mu) * x;
        }
        if normalize_in_place(row).is_err() {
            // The blend cancelled out exactly; keep the old prototype.
            row.copy_from_slice(&old);
        }
    }
}

fn normalize_in_place<T: Real>(v: &mut [T]) -> Result<()> {
    let n = norm(v);
    if !(n > T::zero()) {
        return Err(Error::ZeroVector);
    }
    for x in v {
        *x /= n;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OimForward<T> {
    /// Probabilities over LUT classes followed by queue entries; sums to 1.
    pub probs: Vec<T>,
    /// `-log p_label` for labeled inputs.
    pub loss: Option<T>,
    /// Gradient of `loss` with respect to the raw input.
    pub grad: Option<Vec<T>>,
}

impl<T: Real> OimForward<T> {
    /// Probabilities of the LUT classes only.
    pub fn class_probs(&self, classes: usize) -> &[T] {
        &self.probs[..classes]
    }
}

/// Scores one feature against the frozen state.
pub fn oim_forward<T: Real>(
    state: &OimState<T>,
    x: &[T],
    label: Option<usize>,
) -> Result<OimForward<T>> {
    state.check_dim(x.len())?;
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if let Some(label) = label {
        if label >= state.classes() {
            return Err(Error::LabelOutOfRange {
                label,
                classes: state.classes(),
            });
        }
    }
    let tau = state.cfg.temperature;
    let (xhat, xnorm) = state.prepare(x)?;
    let entries: Vec<&[T]> = state.lut.iter_rows().chain(state.queue()).collect();
    let logits: Vec<T> = entries.iter().map(|e| dot(e, &xhat) / tau).collect();
    let probs = softmax(&logits);

    let Some(label) = label else {
        return Ok(OimForward {
            probs,
            loss: None,
            grad: None,
        });
    };
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let lse = max + logits.iter().map(|&z| (z - max).exp()).sum::<T>().ln();
    let loss = lse - logits[label];

    // dL/dxhat = (sum_i p_i e_i - v_label) / tau
    let mut g = vec![T::zero(); x.len()];
    for (e, &p) in entries.iter().zip(&probs) {
        for (gk, &ek) in g.iter_mut().zip(*e) {
            *gk += p * ek;
        }
    }
    for (gk, &vk) in g.iter_mut().zip(state.lut.row(label)) {
        *gk = (*gk - vk) / tau;
    }
    if state.cfg.normalize_inputs {
        // Through x / |x|: (g - xhat (xhat . g)) / |x|
        let proj = dot(&xhat, &g);
        for (gk, &hk) in g.iter_mut().zip(&xhat) {
            *gk = (*gk - hk * proj) / xnorm;
        }
    }
    Ok(OimForward {
        probs,
        loss: Some(loss),
        grad: Some(g),
    })
}

/// One training step: mean loss over labeled rows and its gradient against
/// the state as it was on entry, then prototype updates and queue pushes in
/// row order.
pub fn oim_step<T: Real>(state: &mut OimState<T>, batch: &OimBatch<T>) -> Result<LossReport<T>> {
    state.check_dim(batch.features.cols())?;
    let n = batch.features.rows();
    let labeled = batch.labeled_count();
    let scale = if labeled == 0 {
        T::zero()
    } else {
        T::one() / T::from_usize_lossy(labeled)
    };

    let mut per_sample = Vec::with_capacity(n);
    let mut grad = Matrix::zeros(n, state.dim());
    for (i, (x, label)) in batch.features.iter_rows().zip(&batch.labels).enumerate() {
        let out = oim_forward(state, x, *label)?;
        per_sample.push(out.loss.unwrap_or_else(T::zero));
        if let Some(g) = out.grad {
            for (dst, &src) in grad.row_mut(i).iter_mut().zip(&g) {
                *dst = src * scale;
            }
        }
    }

    for (x, label) in batch.features.iter_rows().zip(&batch.labels) {
        match label {
            Some(c) => {
                let (xhat, _) = state.prepare(x)?;
                state.update_prototype(*c, &xhat);
            }
            None => state.push_unlabeled(x)?,
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
