use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// One branch of the hierarchical descriptor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum BranchSpec {
    /// Global feature of the single-stripe branch.
    G1,
    /// Global feature of the four-stripe branch.
    G4,
    /// Stripe `j` (1..=4) of the four-stripe branch.
    P4(u8),
    /// Recovery feature.
    R,
}

impl BranchSpec {
    pub fn dim(self) -> usize {
        match self {
            BranchSpec::G1 | BranchSpec::G4 | BranchSpec::R => 512,
            BranchSpec::P4(_) => 256,
        }
    }

    /// Position in the canonical order G1, G4, P4_1..P4_4, R.
    fn rank(self) -> u8 {
        match self {
            BranchSpec::G1 => 0,
            BranchSpec::G4 => 1,
            BranchSpec::P4(j) => 1 + j,
            BranchSpec::R => 6,
        }
    }
}

impl fmt::Display for BranchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BranchSpec::G1 => f.write_str("G1"),
            BranchSpec::G4 => f.write_str("G4"),
            BranchSpec::P4(j) => write!(f, "P4_{j}"),
            BranchSpec::R => f.write_str("R"),
        }
    }
}

impl FromStr for BranchSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "G1" => Ok(BranchSpec::G1),
            "G4" => Ok(BranchSpec::G4),
            "R" => Ok(BranchSpec::R),
            _ => s
                .strip_prefix("P4_")
                .and_then(|j| j.parse::<u8>().ok())
                .filter(|j| (1..=4).contains(j))
                .map(BranchSpec::P4)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown branch '{s}'"))),
        }
    }
}

impl TryFrom<String> for BranchSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BranchSpec> for String {
    fn from(b: BranchSpec) -> String {
        b.to_string()
    }
}

/// Ordered branch list describing how a descriptor is laid out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescriptorLayout {
    pub branches: Vec<BranchSpec>,
}

impl DescriptorLayout {
    /// Global and partial branches: 2048 dims.
    pub fn base() -> Self {
        Self {
            branches: vec![
                BranchSpec::G1,
                BranchSpec::G4,
                BranchSpec::P4(1),
                BranchSpec::P4(2),
                BranchSpec::P4(3),
                BranchSpec::P4(4),
            ],
        }
    }

    /// Base plus the recovery branch: 2560 dims.
    pub fn full() -> Self {
        let mut l = Self::base();
        l.branches.push(BranchSpec::R);
        l
    }

    pub fn dim(&self) -> usize {
        self.branches.iter().map(|b| b.dim()).sum()
    }

    /// Canonically ordered layout for a set of branches; rejects duplicates.
    pub fn canonical(branches: impl IntoIterator<Item = BranchSpec>) -> Result<Self> {
        let mut branches: Vec<BranchSpec> = branches.into_iter().collect();
        branches.sort_by_key(|b| b.rank());
        if let Some(w) = branches.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateBranch(w[0].to_string()));
        }
        Ok(Self { branches })
    }
}

/// Concatenates branch features in canonical order.
pub fn compose_descriptor<T: Real>(
    parts: &[(BranchSpec, &[T])],
) -> Result<(DescriptorLayout, Vec<T>)> {
    for (spec, v) in parts {
        if v.len() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: spec.dim(),
                got: v.len(),
            });
        }
    }
    let layout = DescriptorLayout::canonical(parts.iter().map(|(b, _)| *b))?;
    let mut out = Vec::with_capacity(layout.dim());
    for b in &layout.branches {
        let (_, v) = parts.iter().find(|(s, _)| s == b).expect("branch present");
        out.extend_from_slice(v);
    }
    Ok((layout, out))
}

/// Inverse of [`compose_descriptor`].
pub fn split_descriptor<T: Real>(
    layout: &DescriptorLayout,
    v: &[T],
) -> Result<Vec<(BranchSpec, Vec<T>)>> {
    if v.len() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            got: v.len(),
        });
    }
    let mut offset = 0;
    Ok(layout
        .branches
        .iter()
        .map(|&b| {
            let part = v[offset..offset + b.dim()].to_vec();
            offset += b.dim();
            (b, part)
        })
        .collect())
}
