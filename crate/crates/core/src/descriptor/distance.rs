use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::FeatureSet;
use crate::error::{Error, Result};
use crate::matrix::{dot, norm, Matrix};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Non-squared Euclidean distance.
    #[default]
    Euclidean,
    /// `1 - cos(a, b)`, in `[0, 2]`.
    Cosine,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Cosine => "cosine",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(Metric::Euclidean),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::InvalidConfig(format!("unknown metric '{other}'"))),
        }
    }
}

pub fn l2_normalize<T: Real>(v: &[T]) -> Result<Vec<T>> {
    let n = norm(v);
    if !(n > T::zero()) {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|&x| x / n).collect())
}

/// `Nq x Ng` distances, rows computed in parallel. Each entry is a
/// sequential sum over the feature dimension, so results do not depend on
/// how rows are scheduled.
pub fn distance_matrix<T: Real>(
    queries: &FeatureSet<T>,
    gallery: &FeatureSet<T>,
    metric: Metric,
) -> Result<Matrix<T>> {
    if queries.dim() != gallery.dim() {
        return Err(Error::DimensionMismatch {
            expected: queries.dim(),
            got: gallery.dim(),
        });
    }
    let (nq, ng) = (queries.len(), gallery.len());
    let mut out = Matrix::zeros(nq, ng);
    if nq == 0 || ng == 0 {
        return Ok(out);
    }
    match metric {
        Metric::Euclidean => {
            out.as_mut_slice()
                .par_chunks_mut(ng)
                .enumerate()
                .for_each(|(i, row)| {
                    let q = queries.features.row(i);
                    for (j, d) in row.iter_mut().enumerate() {
                        *d = euclidean(q, gallery.features.row(j));
                    }
                });
        }
        Metric::Cosine => {
            let qn = row_norms(&queries.features)?;
            let gn = row_norms(&gallery.features)?;
            out.as_mut_slice()
                .par_chunks_mut(ng)
                .enumerate()
                .for_each(|(i, row)| {
                    let q = queries.features.row(i);
                    for (j, d) in row.iter_mut().enumerate() {
                        let cos = dot(q, gallery.features.row(j)) / (qn[i] * gn[j]);
                        *d = (T::one() - cos).max(T::zero()).min(T::lit(2.0));
                    }
                });
        }
    }
    Ok(out)
}

fn euclidean<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        let d = x - y;
        acc += d * d;
    }
    acc.sqrt()
}

fn row_norms<T: Real>(m: &Matrix<T>) -> Result<Vec<T>> {
    m.iter_rows()
        .map(|r| {
            let n = norm(r);
            if n > T::zero() {
                Ok(n)
            } else {
                Err(Error::ZeroVector)
            }
        })
        .collect()
}
