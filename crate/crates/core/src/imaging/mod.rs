//! Images, random erasing and occlusion injection.

mod erase;
mod geometry;
mod image;
mod io;
mod occlusion;

pub use self::erase::{
    build_polygon_mask, re_erase, rectangle_mask, rpe_erase, sample_erase_region, EraseConfig,
    EraseOutcome, EraseRegion, EraseStatus, FillMode,
};
pub use self::geometry::{convex_hull, cross, is_convex, point_in_convex, Point, PolygonMask};
pub use self::image::Image;
pub use self::io::{decode_pnm, encode_pnm, load_image, save_image, save_mask_pgm};
pub use self::occlusion::{
    inject_occlusion, inject_occlusion_with, OcclusionMode, OcclusionOutcome,
};
