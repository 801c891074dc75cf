//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use reidkit::imaging::Point;
use reidkit::{Matrix, RandomSource, SplitMix64};

pub struct Side {
    pub features: Vec<Vec<f64>>,
    pub pids: Vec<i32>,
    pub cams: Vec<i32>,
}

impl Side {
    pub fn matrix(&self) -> Matrix<f64> {
        Matrix::from_rows(&self.features).unwrap()
    }
}

#[derive(Debug)]
pub struct BruteScores {
    /// CMC at ranks `1..=Ng`.
    pub cmc: Vec<f64>,
    pub map: f64,
    pub valid_queries: usize,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        s += (a[i] - b[i]) * (a[i] - b[i]);
    }
    s.sqrt()
}

/// Naive scorer: every rank is found by counting the valid gallery entries
/// that sort strictly before it. `None` when no query has a valid match.
pub fn brute_force(q: &Side, g: &Side) -> Option<BruteScores> {
    let ng = g.pids.len();
    let mut firsts = Vec::new();
    let mut aps = Vec::new();
    for qi in 0..q.pids.len() {
        let d: Vec<f64> = g
            .features
            .iter()
            .map(|f| euclid(&q.features[qi], f))
            .collect();
        let valid =
            |j: usize| g.pids[j] != -1 && !(g.pids[j] == q.pids[qi] && g.cams[j] == q.cams[qi]);
        let before = |i: usize, j: usize| {
            (d[i], g.pids[i], g.cams[i], i)
                .partial_cmp(&(d[j], g.pids[j], g.cams[j], j))
                .unwrap()
                .is_lt()
        };
        let rank = |j: usize| 1 + (0..ng).filter(|&i| valid(i) && before(i, j)).count();
        let matches: Vec<usize> = (0..ng)
            .filter(|&j| valid(j) && g.pids[j] == q.pids[qi])
            .collect();
        if matches.is_empty() {
            continue;
        }
        let ranks: Vec<usize> = matches.iter().map(|&j| rank(j)).collect();
        let mut ap = 0.0;
        for &r in &ranks {
            let hits = ranks.iter().filter(|&&s| s <= r).count();
            ap += hits as f64 / r as f64;
        }
        aps.push(ap / matches.len() as f64);
        firsts.push(*ranks.iter().min().unwrap());
    }
    if aps.is_empty() {
        return None;
    }
    let nv = aps.len();
    let cmc = (1..=ng)
        .map(|k| firsts.iter().filter(|&&f| f <= k).count() as f64 / nv as f64)
        .collect();
    Some(BruteScores {
        cmc,
        map: aps.iter().sum::<f64>() / nv as f64,
        valid_queries: nv,
    })
}

/// Random retrieval instance: up to `max_q` queries and `max_g` gallery
/// rows, small id and camera ranges so matches and junk are common.
pub fn random_instance(seed: u64, max_q: usize, max_g: usize) -> (Side, Side) {
    let mut rng = SplitMix64::new(seed);
    let dim = 1 + rng.below(8);
    let nq = 1 + rng.below(max_q);
    let ng = 1 + rng.below(max_g);
    let side = |n: usize, junk: bool, rng: &mut SplitMix64| Side {
        features: (0..n)
            .map(|_| (0..dim).map(|_| rng.uniform(-1.0, 1.0)).collect())
            .collect(),
        pids: (0..n)
            .map(|_| {
                if junk && rng.next_f64() < 0.1 {
                    -1
                } else {
                    rng.below(6) as i32
                }
            })
            .collect(),
        cams: (0..n).map(|_| rng.below(3) as i32).collect(),
    };
    let q = side(nq, false, &mut rng);
    let g = side(ng, true, &mut rng);
    (q, g)
}

/// Pixel-center test against every edge of a counter-clockwise hull
/// (y axis down, so "counter-clockwise" is in the mathematical frame).
pub fn inside_hull(hull: &[Point], x: usize, y: usize) -> bool {
    let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
    let n = hull.len();
    for i in 0..n {
        let (a, b) = (hull[i], hull[(i + 1) % n]);
        let c = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
        if c < 0.0 {
            return false;
        }
    }
    true
}

pub mod rpe {
    use super::inside_hull;
    use reidkit::imaging::{rpe_erase, sample_erase_region, EraseConfig, EraseStatus, Image};
    use reidkit::{RandomSource, SplitMix64};

    pub fn random_image(rng: &mut SplitMix64) -> Image {
        let w = 16 + rng.below(113);
        let h = 32 + rng.below(225);
        let data = (0..w * h * 3).map(|_| rng.next_byte()).collect();
        Image::new(w, h, 3, data).unwrap()
    }

    /// One erasing run on a random image with seed `seed`; checks every
    /// geometric property of the emitted mask. Returns whether the polygon
    /// path (as opposed to the rectangle fallback) produced it.
    pub fn check_invocation(seed: u64, cfg: &EraseConfig) -> Result<bool, String> {
        let mut img_rng = SplitMix64::new(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let img = random_image(&mut img_rng);
        let (w, h) = (img.width(), img.height());
        let mut rng = SplitMix64::new(seed);
        let mut replay = rng.clone();
        let out = rpe_erase(&img, cfg, &mut rng).map_err(|e| e.to_string())?;
        if out.status != EraseStatus::Erased {
            return Err(format!("seed {seed}: status {:?}", out.status));
        }
        let mask = out.mask.as_ref().unwrap();
        replay.next_f64();
        let region = sample_erase_region(cfg, w, h, &mut replay).map_err(|e| e.to_string())?;
        let (x0, x1, y0, y1) = region.bounds();

        let hull = &mask.hull;
        let n = hull.len();
        if n < 3 {
            return Err(format!("seed {seed}: hull has {n} vertices"));
        }
        for i in 0..n {
            let (a, b, c) = (hull[i], hull[(i + 1) % n], hull[(i + 2) % n]);
            if (b.x - a.x) * (c.y - b.y) - (b.y - a.y) * (c.x - b.x) <= 0.0 {
                return Err(format!(
                    "seed {seed}: hull not strictly convex at vertex {i}"
                ));
            }
        }
        for p in hull {
            if p.x < x0 || p.x > x1 || p.y < y0 || p.y > y1 {
                return Err(format!("seed {seed}: vertex {p:?} outside region box"));
            }
        }
        let area_cap = 0.45 * (w * h) as f64;
        if mask.area() as f64 > area_cap {
            return Err(format!(
                "seed {seed}: area {} > 0.45 S = {area_cap}",
                mask.area()
            ));
        }
        for y in 0..h {
            for x in 0..w {
                let cx = x as f64 + 0.5;
                let cy = y as f64 + 0.5;
                let inside = inside_hull(hull, x, y);
                if mask.contains(x, y) != inside {
                    return Err(format!(
                        "seed {seed}: pixel ({x},{y}) mask {} oracle {inside}",
                        !inside
                    ));
                }
                if inside && (cx < x0 || cx > x1 || cy < y0 || cy > y1) {
                    return Err(format!(
                        "seed {seed}: covered pixel ({x},{y}) outside region box"
                    ));
                }
                if !inside && out.image.pixel(x, y) != img.pixel(x, y) {
                    return Err(format!(
                        "seed {seed}: pixel ({x},{y}) changed outside the mask"
                    ));
                }
            }
        }
        Ok(!mask.fallback)
    }

    /// Share of `trials` invocations with the default gate that erase.
    pub fn gate_rate(trials: u64) -> f64 {
        let img = Image::filled(8, 16, 3, 0).unwrap();
        let cfg = EraseConfig::default();
        let fired = (0..trials)
            .filter(|&t| {
                let mut rng = SplitMix64::new(t);
                rpe_erase(&img, &cfg, &mut rng).unwrap().status != EraseStatus::Skipped
            })
            .count();
        fired as f64 / trials as f64
    }
}
