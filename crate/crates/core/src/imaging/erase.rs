//! Random rectangle erasing (RE) and random polygon erasing (RPE).
//!
//! Both share the same region sampler: an area ratio `s_e` in `[s_l, s_h]`
//! and aspect ratio `r_e` in `[r, 1/r]` give a `W_e x H_e` box with
//! `W_e = sqrt(S s_e / r_e)` and `H_e = sqrt(S s_e r_e)`, redrawn until it
//! fits. RE erases the whole box; RPE scatters `n` points in it and erases
//! their convex hull.
//!
//! Random draws happen in a fixed order (gate, then per attempt `s_e`,
//! `r_e`, and on success the two center coordinates, then the polygon
//! points, then fill values) so a seed fully determines the output.

use serde::{Deserialize, Serialize};

use super::geometry::{convex_hull, polygon_area, Point, PolygonMask};
use super::Image;
use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// How erased pixels are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FillMode {
    /// Independent random byte per pixel and channel.
    #[default]
    PerPixel,
    /// One random byte shared by the whole region.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EraseConfig {
    /// Probability that an image is erased at all.
    pub probability: f64,
    pub area_min: f64,
    pub area_max: f64,
    /// Lower aspect bound `r`; the aspect is drawn from `[r, 1/r]`.
    pub aspect: f64,
    pub vertices: usize,
    pub max_attempts: usize,
    pub fill: FillMode,
}

impl Default for EraseConfig {
    fn default() -> Self {
        Self {
            probability: 0.5,
            area_min: 0.02,
            area_max: 0.45,
            aspect: 0.35,
            vertices: 20,
            max_attempts: 100,
            fill: FillMode::PerPixel,
        }
    }
}

impl EraseConfig {
    pub fn validate(&self) -> Result<()> {
        self.check(false)
    }

    /// `allow_full` admits `area_max == 1`, used by occlusion injection.
    pub(crate) fn check(&self, allow_full: bool) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(0.0..=1.0).contains(&self.probability) {
            return bad(format!("probability {} outside [0, 1]", self.probability));
        }
        let area_ok = if allow_full {
            self.area_max <= 1.0
        } else {
            self.area_max < 1.0
        };
        if !(self.area_min > 0.0 && self.area_min <= self.area_max && area_ok) {
            return bad(format!(
                "area range [{}, {}] must satisfy 0 < s_l <= s_h < 1",
                self.area_min, self.area_max
            ));
        }
        if !(self.aspect > 0.0 && self.aspect < 1.0) {
            return bad(format!("aspect bound {} outside (0, 1)", self.aspect));
        }
        if self.vertices < 3 {
            return bad(format!("need at least 3 vertices, got {}", self.vertices));
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive".into());
        }
        Ok(())
    }
}

/// A sized and placed erase box inside an image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EraseRegion {
    pub image_width: usize,
    pub image_height: usize,
    pub width: f64,
    pub height: f64,
    pub center: Point,
    pub area_ratio: f64,
    pub aspect: f64,
}

impl EraseRegion {
    /// Box around the center clamped to the image: `(x0, x1, y0, y1)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let (w, h) = (self.image_width as f64, self.image_height as f64);
        (
            (self.center.x - self.width / 2.0).max(0.0),
            (self.center.x + self.width / 2.0).min(w),
            (self.center.y - self.height / 2.0).max(0.0),
            (self.center.y + self.height / 2.0).min(h),
        )
    }

    pub(crate) fn full_image(width: usize, height: usize) -> Self {
        let (w, h) = (width as f64, height as f64);
        Self {
            image_width: width,
            image_height: height,
            width: w,
            height: h,
            center: Point::new(w / 2.0, h / 2.0),
            area_ratio: 1.0,
            aspect: h / w,
        }
    }
}

pub fn sample_erase_region<R: RandomSource>(
    cfg: &EraseConfig,
    img_w: usize,
    img_h: usize,
    rng: &mut R,
) -> Result<EraseRegion> {
    cfg.validate()?;
    sample_region(cfg, img_w, img_h, rng)
}

pub(crate) fn sample_region<R: RandomSource>(
    cfg: &EraseConfig,
    img_w: usize,
    img_h: usize,
    rng: &mut R,
) -> Result<EraseRegion> {
    if img_w == 0 || img_h == 0 {
        return Err(Error::InvalidConfig(
            "image dimensions must be positive".into(),
        ));
    }
    let (w, h) = (img_w as f64, img_h as f64);
    let s = w * h;
    for _ in 0..cfg.max_attempts {
        let area_ratio = rng.uniform(cfg.area_min, cfg.area_max);
        let aspect = rng.uniform(cfg.aspect, 1.0 / cfg.aspect);
        let width = (s * area_ratio / aspect).sqrt();
        let height = (s * area_ratio * aspect).sqrt();
        if width <= w && height <= h {
            let cx = rng.uniform(width / 2.0, w - width / 2.0);
            let cy = rng.uniform(height / 2.0, h - height / 2.0);
            return Ok(EraseRegion {
                image_width: img_w,
                image_height: img_h,
                width,
                height,
                center: Point::new(cx, cy),
                area_ratio,
                aspect,
            });
        }
    }
    Err(Error::NoFit {
        width: img_w,
        height: img_h,
        attempts: cfg.max_attempts,
    })
}

/// Scatters `n` points in the region's clamped box and rasterizes their
/// convex hull. Degenerate hulls are redrawn up to `attempts` times, after
/// which the mask falls back to the full box.
pub fn build_polygon_mask<R: RandomSource>(
    region: &EraseRegion,
    n: usize,
    attempts: usize,
    rng: &mut R,
) -> PolygonMask {
    let bounds @ (x0, x1, y0, y1) = region.bounds();
    let mut points = Vec::with_capacity(n);
    for _ in 0..attempts.max(1) {
        points.clear();
        for _ in 0..n {
            let x = rng.uniform(x0, x1);
            let y = rng.uniform(y0, y1);
            points.push(Point::new(x, y));
        }
        let hull = convex_hull(&points);
        if hull.len() >= 3 && polygon_area(&hull) > 0.0 {
            return PolygonMask::rasterize(
                hull,
                bounds,
                region.image_width,
                region.image_height,
                false,
            );
        }
    }
    let mut mask = rectangle_mask(region);
    mask.fallback = true;
    mask
}

/// The region's full clamped box as a mask.
pub fn rectangle_mask(region: &EraseRegion) -> PolygonMask {
    let bounds @ (x0, x1, y0, y1) = region.bounds();
    let corners = vec![
        Point::new(x0, y0),
        Point::new(x1, y0),
        Point::new(x1, y1),
        Point::new(x0, y1),
    ];
    PolygonMask::rasterize(
        corners,
        bounds,
        region.image_width,
        region.image_height,
        false,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EraseStatus {
    /// The probability gate kept the image.
    Skipped,
    /// No region fit within the attempt budget; the image is unchanged.
    NoFit,
    Erased,
}

#[derive(Debug, Clone)]
pub struct EraseOutcome {
    pub image: Image,
    pub status: EraseStatus,
    pub mask: Option<PolygonMask>,
}

impl EraseOutcome {
    /// Fraction of image pixels covered by the mask.
    pub fn erased_ratio(&self) -> f64 {
        self.mask
            .as_ref()
            .map_or(0.0, |m| m.area() as f64 / self.image.area() as f64)
    }
}

#[derive(Clone, Copy)]
enum Shape {
    Rectangle,
    Polygon,
}

pub fn rpe_erase<R: RandomSource>(
    img: &Image,
    cfg: &EraseConfig,
    rng: &mut R,
) -> Result<EraseOutcome> {
    cfg.validate()?;
    Ok(erase_with(img, cfg, Shape::Polygon, rng))
}

pub fn re_erase<R: RandomSource>(
    img: &Image,
    cfg: &EraseConfig,
    rng: &mut R,
) -> Result<EraseOutcome> {
    cfg.validate()?;
    Ok(erase_with(img, cfg, Shape::Rectangle, rng))
}

pub(crate) fn erase_rect_unchecked<R: RandomSource>(
    img: &Image,
    cfg: &EraseConfig,
    rng: &mut R,
) -> EraseOutcome {
    erase_with(img, cfg, Shape::Rectangle, rng)
}

pub(crate) fn erase_polygon_unchecked<R: RandomSource>(
    img: &Image,
    cfg: &EraseConfig,
    rng: &mut R,
) -> EraseOutcome {
    erase_with(img, cfg, Shape::Polygon, rng)
}

fn erase_with<R: RandomSource>(
    img: &Image,
    cfg: &EraseConfig,
    shape: Shape,
    rng: &mut R,
) -> EraseOutcome {
    let unchanged = |status| EraseOutcome {
        image: img.clone(),
        status,
        mask: None,
    };
    if rng.next_f64() >= cfg.probability {
        return unchanged(EraseStatus::Skipped);
    }
    let region = if cfg.area_min >= 1.0 {
        EraseRegion::full_image(img.width(), img.height())
    } else {
        match sample_region(cfg, img.width(), img.height(), rng) {
            Ok(r) => r,
            Err(_) => {
                log::debug!(
                    "no erase region fits {}x{} image; leaving it unchanged",
                    img.width(),
                    img.height()
                );
                return unchanged(EraseStatus::NoFit);
            }
        }
    };
    let mask = match shape {
        Shape::Rectangle => rectangle_mask(&region),
        Shape::Polygon => build_polygon_mask(&region, cfg.vertices, cfg.max_attempts, rng),
    };
    let mut image = img.clone();
    fill_mask(&mut image, &mask, cfg.fill, rng);
    EraseOutcome {
        image,
        status: EraseStatus::Erased,
        mask: Some(mask),
    }
}

fn fill_mask<R: RandomSource>(img: &mut Image, mask: &PolygonMask, fill: FillMode, rng: &mut R) {
    let shared = match fill {
        FillMode::Constant => Some(rng.next_byte()),
        FillMode::PerPixel => None,
    };
    for (x, y) in mask.pixels() {
        for v in img.pixel_mut(x, y) {
            *v = shared.unwrap_or_else(|| rng.next_byte());
        }
    }
}
