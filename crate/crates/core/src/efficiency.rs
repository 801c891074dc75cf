//! Efficiency score: ranks models by accuracy, feature dimension, size and
//! speed relative to two reference models taken from the compared set.
//!
//! For a metric `M` (R1 or mAP) the per-metric score of a candidate `c` is
//!
//! ```text
//!             V_c * S_c^2 * (M_c - M_ref2 + thr)^3 / FD_c
//! score_M = -----------------------------------------------
//!           V_ref1 * S_ref1^2 * (M_ref1 - M_ref2 + thr)^3 / FD_ref1
//! ```
//!
//! where `ref1` is the largest model and `ref2` the model with the lowest
//! value of `M`. The final score blends the two metrics:
//! `ES = (score_R1 + lambda * score_mAP) / (1 + lambda)`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelProfile<T> {
    pub name: String,
    /// Rank-1 accuracy, percent.
    pub r1: T,
    /// Mean average precision, percent.
    pub map: T,
    /// Feature dimension.
    pub fd: T,
    /// Model size in MB.
    pub v: T,
    /// Forward speed in frames per second.
    pub s: T,
}

impl<T: Real> ModelProfile<T> {
    pub fn validate(&self) -> Result<()> {
        let hundred = T::lit(100.0);
        let positive = [self.r1, self.map, self.fd, self.v, self.s]
            .iter()
            .all(|&x| x > T::zero() && x.is_finite());
        if !positive || self.r1 > hundred || self.map > hundred {
            return Err(Error::InvalidConfig(format!(
                "model '{}' needs positive fields and accuracies in (0, 100]",
                self.name
            )));
        }
        Ok(())
    }

    pub fn metric(&self, m: EsMetric) -> T {
        match m {
            EsMetric::R1 => self.r1,
            EsMetric::Map => self.map,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EsMetric {
    R1,
    Map,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EsConfig<T> {
    pub thr: T,
    pub lambda: T,
}

impl<T: Real> Default for EsConfig<T> {
    fn default() -> Self {
        Self {
            thr: T::lit(30.0),
            lambda: T::one(),
        }
    }
}

impl<T: Real> EsConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.thr > T::zero()) || !(self.lambda >= T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "thr {} must be > 0 and lambda {} >= 0",
                self.thr, self.lambda
            )));
        }
        Ok(())
    }
}

/// Indices of the largest model and of the model with the lowest `metric`;
/// ties go to the first listed.
pub fn select_references<T: Real>(
    models: &[ModelProfile<T>],
    metric: EsMetric,
) -> Result<(usize, usize)> {
    if models.len() < 2 {
        return Err(Error::EmptyModelList(models.len()));
    }
    let mut largest = 0;
    let mut weakest = 0;
    for (i, m) in models.iter().enumerate().skip(1) {
        if m.v > models[largest].v {
            largest = i;
        }
        if m.metric(metric) < models[weakest].metric(metric) {
            weakest = i;
        }
    }
    Ok((largest, weakest))
}

fn monomial<T: Real>(m: &ModelProfile<T>, metric: EsMetric, floor: T, thr: T) -> T {
    let margin = m.metric(metric) - floor + thr;
    m.v * m.s * m.s * margin * margin * margin / m.fd
}

/// Per-metric score of `model` against references `largest` and `weakest`.
pub fn score<T: Real>(
    model: &ModelProfile<T>,
    largest: &ModelProfile<T>,
    weakest: &ModelProfile<T>,
    metric: EsMetric,
    cfg: &EsConfig<T>,
) -> Result<T> {
    let floor = weakest.metric(metric);
    let denom = monomial(largest, metric, floor, cfg.thr);
    if !(denom > T::zero()) {
        return Err(Error::NonPositiveDenominator(denom.to_f64_lossy()));
    }
    Ok(monomial(model, metric, floor, cfg.thr) / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsRow<T> {
    pub name: String,
    pub score_r1: T,
    pub score_map: T,
    pub es: T,
}

/// Efficiency score of `model`, with references drawn from `models`.
pub fn efficiency_score<T: Real>(
    model: &ModelProfile<T>,
    models: &[ModelProfile<T>],
    cfg: &EsConfig<T>,
) -> Result<EsRow<T>> {
    cfg.validate()?;
    model.validate()?;
    let mut scores = [T::zero(); 2];
    for (slot, metric) in scores.iter_mut().zip([EsMetric::R1, EsMetric::Map]) {
        let (largest, weakest) = select_references(models, metric)?;
        *slot = score(model, &models[largest], &models[weakest], metric, cfg)?;
    }
    let [score_r1, score_map] = scores;
    Ok(EsRow {
        name: model.name.clone(),
        score_r1,
        score_map,
        es: (score_r1 + cfg.lambda * score_map) / (T::one() + cfg.lambda),
    })
}

/// Scores every model in the list against references from the same list.
pub fn es_table<T: Real>(models: &[ModelProfile<T>], cfg: &EsConfig<T>) -> Result<Vec<EsRow<T>>> {
    let mut seen = HashSet::new();
    for m in models {
        m.validate()?;
        if !seen.insert(m.name.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "duplicate model name '{}'",
                m.name
            )));
        }
    }
    models
        .iter()
        .map(|m| efficiency_score(m, models, cfg))
        .collect()
}
