//! Convex hulls and pixel-center rasterization.
//!
//! Coordinates are continuous with pixel `(px, py)` spanning
//! `[px, px + 1) x [py, py + 1)`. A pixel is covered when its center
//! `(px + 0.5, py + 0.5)` lies inside or on the boundary of the polygon.

use std::cmp::Ordering;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// z-component of `(b - a) x (p - a)`.
pub fn cross(a: Point, b: Point, p: Point) -> f64 {
    (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x)
}

/// Convex hull by Andrew's monotone chain. Vertices come back with positive
/// turn orientation and without collinear points; fewer than three vertices
/// means the input was degenerate.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| match a.x.total_cmp(&b.x) {
        Ordering::Equal => a.y.total_cmp(&b.y),
        o => o,
    });
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }

    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for &p in &pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// All consecutive edge pairs turn the same way (strictly).
pub fn is_convex(hull: &[Point]) -> bool {
    let n = hull.len();
    if n < 3 {
        return false;
    }
    let mut sign = 0.0f64;
    for i in 0..n {
        let c = cross(hull[i], hull[(i + 1) % n], hull[(i + 2) % n]);
        if c == 0.0 {
            return false;
        }
        if sign == 0.0 {
            sign = c.signum();
        } else if c.signum() != sign {
            return false;
        }
    }
    true
}

/// Inside-or-on test for a hull produced by [`convex_hull`].
pub fn point_in_convex(hull: &[Point], p: Point) -> bool {
    let n = hull.len();
    (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= 0.0)
}

pub(crate) fn polygon_area(hull: &[Point]) -> f64 {
    let n = hull.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    twice.abs() / 2.0
}

/// Rasterized erase region.
#[derive(Debug, Clone, PartialEq)]
pub struct PolygonMask {
    /// Pixel bounding box, half-open: columns `x_min..x_max`, rows `y_min..y_max`.
    pub x_min: usize,
    pub y_min: usize,
    pub x_max: usize,
    pub y_max: usize,
    pub hull: Vec<Point>,
    /// Row-major coverage over the bounding box.
    pub covered: Vec<bool>,
    /// True when the hull was replaced by the bounding rectangle.
    pub fallback: bool,
}

impl PolygonMask {
    /// Rasterizes `hull` over the pixels whose centers fall in the continuous
    /// box `[x0, x1] x [y0, y1]`, clipped to a `width x height` image.
    pub(crate) fn rasterize(
        hull: Vec<Point>,
        (x0, x1, y0, y1): (f64, f64, f64, f64),
        width: usize,
        height: usize,
        fallback: bool,
    ) -> Self {
        let (x_min, x_max) = center_range(x0, x1, width);
        let (y_min, y_max) = center_range(y0, y1, height);
        let bw = x_max - x_min;
        let mut covered = vec![false; bw * (y_max - y_min)];

        for py in y_min..y_max {
            let cy = py as f64 + 0.5;
            let Some((xl, xr)) = row_span(&hull, cy) else {
                continue;
            };
            let inside = |px: usize| point_in_convex(&hull, Point::new(px as f64 + 0.5, cy));

            // Interpolated span, then snap both ends to the exact predicate.
            let mut lo = ((xl - 0.5).ceil().max(x_min as f64) as usize).min(x_max);
            let mut hi = ((xr - 0.5).floor() + 1.0).clamp(x_min as f64, x_max as f64) as usize;
            while lo > x_min && inside(lo - 1) {
                lo -= 1;
            }
            while lo < x_max && !inside(lo) {
                lo += 1;
            }
            while hi < x_max && inside(hi) {
                hi += 1;
            }
            while hi > lo && !inside(hi - 1) {
                hi -= 1;
            }
            let row = (py - y_min) * bw;
            for px in lo..hi {
                covered[row + px - x_min] = true;
            }
        }

        Self {
            x_min,
            y_min,
            x_max,
            y_max,
            hull,
            covered,
            fallback,
        }
    }

    pub fn bbox_width(&self) -> usize {
        self.x_max - self.x_min
    }

    pub fn bbox_height(&self) -> usize {
        self.y_max - self.y_min
    }

    /// Number of covered pixels.
    pub fn area(&self) -> usize {
        self.covered.iter().filter(|&&c| c).count()
    }

    /// Coverage of image pixel `(x, y)`; false outside the bounding box.
    pub fn contains(&self, x: usize, y: usize) -> bool {
        if x < self.x_min || x >= self.x_max || y < self.y_min || y >= self.y_max {
            return false;
        }
        self.covered[(y - self.y_min) * self.bbox_width() + (x - self.x_min)]
    }

    /// Covered pixels in row-major order.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let bw = self.bbox_width();
        self.covered
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(i, _)| (self.x_min + i % bw, self.y_min + i / bw))
    }
}

/// Pixel indices whose centers lie in `[lo, hi]`, clipped to `[0, len)`.
fn center_range(lo: f64, hi: f64, len: usize) -> (usize, usize) {
    let start = (lo - 0.5).ceil().clamp(0.0, len as f64) as usize;
    let end = ((hi - 0.5).floor() + 1.0).clamp(0.0, len as f64) as usize;
    (start, end.max(start))
}

/// x-extent of the intersection between the horizontal line `y` and the polygon.
fn row_span(hull: &[Point], y: f64) -> Option<(f64, f64)> {
    let n = hull.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let (a, b) = (hull[i], hull[(i + 1) % n]);
        if (y < a.y && y < b.y) || (y > a.y && y > b.y) {
            continue;
        }
        if a.y == b.y {
            lo = lo.min(a.x.min(b.x));
            hi = hi.max(a.x.max(b.x));
        } else {
            let x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
            lo = lo.min(x);
            hi = hi.max(x);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let hull = convex_hull(&pts(&[
            (0.0, 0.0),
            (2.0, 0.0),
            (1.0, 0.0),
            (2.0, 2.0),
            (0.0, 2.0),
            (1.0, 1.0),
        ]));
        assert_eq!(hull.len(), 4);
        assert!(is_convex(&hull));
        assert_eq!(polygon_area(&hull), 4.0);
    }

    #[test]
    fn collinear_input_is_degenerate() {
        let hull = convex_hull(&pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]));
        assert!(hull.len() < 3);
        assert!(!is_convex(&hull));
    }

    #[test]
    fn boundary_points_count_as_inside() {
        let hull = convex_hull(&pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]));
        assert!(point_in_convex(&hull, Point::new(0.0, 2.0)));
        assert!(point_in_convex(&hull, Point::new(4.0, 4.0)));
        assert!(!point_in_convex(&hull, Point::new(4.0001, 2.0)));
    }

    #[test]
    fn rectangle_rasterizes_to_center_grid() {
        let hull = convex_hull(&pts(&[(1.0, 1.0), (5.0, 1.0), (5.0, 3.0), (1.0, 3.0)]));
        let m = PolygonMask::rasterize(hull, (1.0, 5.0, 1.0, 3.0), 10, 10, false);
        assert_eq!((m.x_min, m.x_max, m.y_min, m.y_max), (1, 5, 1, 3));
        assert_eq!(m.area(), 8);
        assert!(m.contains(1, 1) && m.contains(4, 2));
        assert!(!m.contains(5, 2));
    }

    #[test]
    fn triangle_matches_brute_force() {
        let hull = convex_hull(&pts(&[(0.3, 0.2), (9.7, 3.1), (4.2, 8.9)]));
        let m = PolygonMask::rasterize(hull.clone(), (0.0, 10.0, 0.0, 10.0), 10, 10, false);
        for y in 0..10 {
            for x in 0..10 {
                let c = Point::new(x as f64 + 0.5, y as f64 + 0.5);
                assert_eq!(m.contains(x, y), point_in_convex(&hull, c), "({x},{y})");
            }
        }
    }
}
