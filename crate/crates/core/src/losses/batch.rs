use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::rng::RandomSource;
use crate::scalar::Real;

/// Embeddings with one class label per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledBatch<T> {
    pub features: Matrix<T>,
    pub labels: Vec<usize>,
}

impl<T: Real> LabeledBatch<T> {
    pub fn new(features: Matrix<T>, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                got: labels.len(),
            });
        }
        features.ensure_finite()?;
        Ok(Self { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn distinct_labels(&self) -> usize {
        let mut l = self.labels.clone();
        l.sort_unstable();
        l.dedup();
        l.len()
    }

    /// `(P, K)` when every one of the P labels appears exactly K times.
    pub fn pk_layout(&self) -> Option<(usize, usize)> {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &l in &self.labels {
            *counts.entry(l).or_default() += 1;
        }
        let k = *counts.values().next()?;
        counts
            .values()
            .all(|&c| c == k)
            .then_some((counts.len(), k))
    }
}

/// OIM input: labeled rows carry a LUT class, unlabeled rows `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct OimBatch<T> {
    pub features: Matrix<T>,
    pub labels: Vec<Option<usize>>,
}

impl<T: Real> OimBatch<T> {
    pub fn new(features: Matrix<T>, labels: Vec<Option<usize>>) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                got: labels.len(),
            });
        }
        features.ensure_finite()?;
        Ok(Self { features, labels })
    }

    pub fn labeled_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }
}

/// Draws a P x K batch: `p` distinct classes, then `k` samples of each.
/// Classes with fewer than `k` samples are sampled with replacement.
/// Returns indices into `labels`, grouped by class.
pub fn sample_pk_batch<R: RandomSource>(
    labels: &[usize],
    p: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if p == 0 || k == 0 {
        return Err(Error::InvalidConfig("P and K must be positive".into()));
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    if by_class.len() < p {
        return Err(Error::InsufficientClasses(by_class.len()));
    }
    let mut classes: Vec<&Vec<usize>> = by_class.values().collect();
    partial_shuffle(&mut classes, p, rng);

    let mut out = Vec::with_capacity(p * k);
    for members in &classes[..p] {
        if members.len() >= k {
            let mut pool: Vec<usize> = members.to_vec();
            partial_shuffle(&mut pool, k, rng);
            out.extend_from_slice(&pool[..k]);
        } else {
            out.extend((0..k).map(|_| members[rng.below(members.len())]));
        }
    }
    Ok(out)
}

fn partial_shuffle<V, R: RandomSource>(v: &mut [V], count: usize, rng: &mut R) {
    for i in 0..count.min(v.len()) {
        let j = i + rng.below(v.len() - i);
        v.swap(i, j);
    }
}
