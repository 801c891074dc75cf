//! Hierarchical descriptor layout, feature sets and distance matrices.

mod distance;
mod feature_file;
mod layout;

pub use self::distance::{distance_matrix, l2_normalize, Metric};
pub use self::feature_file::{
    read_features, read_layout_sidecar, write_features, write_layout_sidecar, MAGIC,
};
pub use self::layout::{compose_descriptor, split_descriptor, BranchSpec, DescriptorLayout};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

/// Feature rows with person and camera ids.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet<T> {
    pub features: Matrix<T>,
    pub person_ids: Vec<i32>,
    pub camera_ids: Vec<i32>,
    pub layout: Option<DescriptorLayout>,
}

impl<T: Real> FeatureSet<T> {
    pub fn new(features: Matrix<T>, person_ids: Vec<i32>, camera_ids: Vec<i32>) -> Result<Self> {
        for ids in [&person_ids, &camera_ids] {
            if ids.len() != features.rows() {
                return Err(Error::DimensionMismatch {
                    expected: features.rows(),
                    got: ids.len(),
                });
            }
        }
        features.ensure_finite()?;
        Ok(Self {
            features,
            person_ids,
            camera_ids,
            layout: None,
        })
    }

    pub fn with_layout(mut self, layout: DescriptorLayout) -> Result<Self> {
        if layout.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: layout.dim(),
                got: self.dim(),
            });
        }
        self.layout = Some(layout);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.person_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.person_ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    /// Copy with every row scaled to unit length.
    pub fn normalized(&self) -> Result<Self> {
        let mut out = self.clone();
        for i in 0..out.len() {
            let unit = l2_normalize(out.features.row(i))?;
            out.features.row_mut(i).copy_from_slice(&unit);
        }
        Ok(out)
    }

    pub fn cast<U: Real>(&self) -> FeatureSet<U> {
        FeatureSet {
            features: self.features.map(|v| U::from(v).expect("finite cast")),
            person_ids: self.person_ids.clone(),
            camera_ids: self.camera_ids.clone(),
            layout: self.layout.clone(),
        }
    }
}
