//! Test-time occlusion at a fixed erased-area ratio.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::erase::{erase_polygon_unchecked, erase_rect_unchecked, EraseConfig, EraseStatus};
use super::{Image, PolygonMask};
use crate::error::{Error, Result};
use crate::rng::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OcclusionMode {
    Re,
    Rpe,
    /// Rectangle then polygon, each with its own region.
    Both,
}

impl OcclusionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OcclusionMode::Re => "re",
            OcclusionMode::Rpe => "rpe",
            OcclusionMode::Both => "both",
        }
    }
}

impl fmt::Display for OcclusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OcclusionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "re" => Ok(Self::Re),
            "rpe" => Ok(Self::Rpe),
            "both" | "re+rpe" => Ok(Self::Both),
            other => Err(Error::InvalidConfig(format!(
                "unknown occlusion mode '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OcclusionOutcome {
    pub image: Image,
    pub masks: Vec<PolygonMask>,
    /// Some eraser could not place its region and was skipped.
    pub no_fit: bool,
}

/// Occludes `img` with erased-area ratio `level` using the default aspect
/// bound and vertex count.
pub fn inject_occlusion<R: RandomSource>(
    img: &Image,
    level: f64,
    mode: OcclusionMode,
    rng: &mut R,
) -> Result<OcclusionOutcome> {
    inject_occlusion_with(img, level, mode, &EraseConfig::default(), rng)
}

/// As [`inject_occlusion`], taking aspect, vertex count, attempts and fill
/// from `base`. Probability and area range are overridden.
pub fn inject_occlusion_with<R: RandomSource>(
    img: &Image,
    level: f64,
    mode: OcclusionMode,
    base: &EraseConfig,
    rng: &mut R,
) -> Result<OcclusionOutcome> {
    if !(0.0..=1.0).contains(&level) {
        return Err(Error::InvalidLevel(level));
    }
    if level == 0.0 {
        return Ok(OcclusionOutcome {
            image: img.clone(),
            masks: Vec::new(),
            no_fit: false,
        });
    }
    let cfg = EraseConfig {
        probability: 1.0,
        area_min: level,
        area_max: level,
        ..base.clone()
    };
    cfg.check(true)?;

    let mut image = img.clone();
    let mut masks = Vec::new();
    let mut no_fit = false;
    let steps: &[bool] = match mode {
        OcclusionMode::Re => &[false],
        OcclusionMode::Rpe => &[true],
        OcclusionMode::Both => &[false, true],
    };
    for &polygon in steps {
        let out = if polygon {
            erase_polygon_unchecked(&image, &cfg, rng)
        } else {
            erase_rect_unchecked(&image, &cfg, rng)
        };
        no_fit |= out.status == EraseStatus::NoFit;
        image = out.image;
        masks.extend(out.mask);
    }
    Ok(OcclusionOutcome {
        image,
        masks,
        no_fit,
    })
}
