//! Ranking evaluation under the cross-camera ReID protocol.
//!
//! For each query the gallery is sorted by ascending distance. Gallery rows
//! sharing the query's person id and camera id, and rows with person id
//! `-1`, are junk: they are skipped when ranks are counted. Average
//! precision is non-interpolated over the remaining list; CMC@k is the share
//! of scorable queries whose first true match sits at rank `k` or better.

mod bench;

pub use self::bench::{
    extract_pixel_hash_dir, pixel_hash_features, read_annotations, run_occlusion_bench, Annotation,
    BenchMetrics, BenchRow, BenchSpec, CommandExtractor, ExtractorHook, OcclusionBenchReport,
    PixelHashExtractor,
};

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptor::{distance_matrix, FeatureSet, Metric};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;

pub const JUNK_PERSON_ID: i32 = -1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GalleryStatus {
    /// Junk for this query; never counted.
    Excluded,
    ValidMatch,
    ValidNonMatch,
}

/// Classifies every gallery row relative to one query.
pub fn protocol_filter(
    query: (i32, i32),
    gallery_pids: &[i32],
    gallery_cams: &[i32],
) -> Vec<GalleryStatus> {
    let (qpid, qcam) = query;
    gallery_pids
        .iter()
        .zip(gallery_cams)
        .map(|(&pid, &cam)| {
            if pid == JUNK_PERSON_ID || (pid == qpid && cam == qcam) {
                GalleryStatus::Excluded
            } else if pid == qpid {
                GalleryStatus::ValidMatch
            } else {
                GalleryStatus::ValidNonMatch
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalOptions {
    pub metric: Metric,
    pub ranks: Vec<usize>,
    /// L2-normalize both sides before computing distances.
    pub normalize: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            metric: Metric::Euclidean,
            ranks: vec![1, 5, 10],
            normalize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankingResult<T> {
    pub distances: Matrix<T>,
    /// Gallery indices per query, best first (junk included).
    pub orders: Vec<Vec<usize>>,
    /// Per query, status of each gallery index.
    pub status: Vec<Vec<GalleryStatus>>,
    /// Per query AP; `None` when the query has no valid match.
    pub ap: Vec<Option<f64>>,
    /// CMC at ranks `1..=Ng`.
    pub cmc: Vec<f64>,
    pub map: f64,
    pub valid_queries: usize,
    /// Requested `(rank, CMC@rank)` pairs.
    pub cmc_at: Vec<(usize, f64)>,
}

impl<T> RankingResult<T> {
    pub fn cmc_at_rank(&self, k: usize) -> f64 {
        self.cmc[k.min(self.cmc.len()) - 1]
    }
}

pub fn evaluate<T: Real>(
    queries: &FeatureSet<T>,
    gallery: &FeatureSet<T>,
    opts: &EvalOptions,
) -> Result<RankingResult<T>> {
    let dist = if opts.normalize {
        distance_matrix(&queries.normalized()?, &gallery.normalized()?, opts.metric)?
    } else {
        distance_matrix(queries, gallery, opts.metric)?
    };
    evaluate_distances(
        dist,
        (&queries.person_ids, &queries.camera_ids),
        (&gallery.person_ids, &gallery.camera_ids),
        &opts.ranks,
    )
}

/// Order, statuses, AP and first-match rank of one query.
type QueryScore = (Vec<usize>, Vec<GalleryStatus>, Option<f64>, Option<usize>);

/// Scores a precomputed `Nq x Ng` distance matrix.
pub fn evaluate_distances<T: Real>(
    dist: Matrix<T>,
    (qpids, qcams): (&[i32], &[i32]),
    (gpids, gcams): (&[i32], &[i32]),
    ranks: &[usize],
) -> Result<RankingResult<T>> {
    let (nq, ng) = dist.shape();
    if qpids.len() != nq || gpids.len() != ng {
        return Err(Error::DimensionMismatch {
            expected: nq * ng,
            got: qpids.len() * gpids.len(),
        });
    }
    if let Some(&rank) = ranks.iter().find(|&&r| r == 0 || r > ng) {
        return Err(Error::InvalidRank { rank, gallery: ng });
    }
    if let Some(i) = dist.first_non_finite() {
        return Err(Error::NonFinite(i));
    }

    let per_query: Vec<QueryScore> = (0..nq)
        .into_par_iter()
        .map(|q| {
            let status = protocol_filter((qpids[q], qcams[q]), gpids, gcams);
            let row = dist.row(q);
            let mut order: Vec<usize> = (0..ng).collect();
            // Ties: (pid, camid, index) gives an order that depends only on content.
            order.sort_by(|&a, &b| {
                row[a]
                    .partial_cmp(&row[b])
                    .unwrap_or(Ordering::Equal)
                    .then(gpids[a].cmp(&gpids[b]))
                    .then(gcams[a].cmp(&gcams[b]))
                    .then(a.cmp(&b))
            });
            let (ap, first) = score_order(&order, &status);
            (order, status, ap, first)
        })
        .collect();

    let mut hist = vec![0usize; ng + 1];
    let mut ap_sum = 0.0;
    let mut valid = 0usize;
    for (_, _, ap, first) in &per_query {
        if let (Some(ap), Some(first)) = (ap, first) {
            ap_sum += ap;
            valid += 1;
            hist[*first] += 1;
        }
    }
    if valid == 0 {
        return Err(Error::NoValidQuery);
    }
    let mut cmc = Vec::with_capacity(ng);
    let mut acc = 0usize;
    for count in &hist[1..] {
        acc += count;
        cmc.push(acc as f64 / valid as f64);
    }
    let cmc_at = ranks.iter().map(|&k| (k, cmc[k - 1])).collect();

    let mut orders = Vec::with_capacity(nq);
    let mut statuses = Vec::with_capacity(nq);
    let mut aps = Vec::with_capacity(nq);
    for (o, s, ap, _) in per_query {
        orders.push(o);
        statuses.push(s);
        aps.push(ap);
    }
    Ok(RankingResult {
        distances: dist,
        orders,
        status: statuses,
        ap: aps,
        cmc,
        map: ap_sum / valid as f64,
        valid_queries: valid,
        cmc_at,
    })
}

/// AP and 1-based filtered rank of the first match.
fn score_order(order: &[usize], status: &[GalleryStatus]) -> (Option<f64>, Option<usize>) {
    let relevant = status
        .iter()
        .filter(|&&s| s == GalleryStatus::ValidMatch)
        .count();
    if relevant == 0 {
        return (None, None);
    }
    let mut rank = 0usize;
    let mut hits = 0usize;
    let mut first = None;
    let mut precision_sum = 0.0;
    for &g in order {
        match status[g] {
            GalleryStatus::Excluded => continue,
            GalleryStatus::ValidNonMatch => rank += 1,
            GalleryStatus::ValidMatch => {
                rank += 1;
                hits += 1;
                first.get_or_insert(rank);
                precision_sum += hits as f64 / rank as f64;
            }
        }
    }
    (Some(precision_sum / relevant as f64), first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    use GalleryStatus::*;

    #[test]
    fn filter_rules() {
        assert_eq!(
            protocol_filter((5, 1), &[5, 5, 7], &[1, 2, 1]),
            vec![Excluded, ValidMatch, ValidNonMatch]
        );
        assert_eq!(
            protocol_filter((5, 1), &[5, 5], &[1, 1]),
            vec![Excluded, Excluded]
        );
        assert_eq!(
            protocol_filter((5, 1), &[-1, -1], &[2, 1]),
            vec![Excluded, Excluded]
        );
    }

    #[test]
    fn ap_of_hits_at_ranks_one_and_three() {
        // Gallery already in distance order: match, miss, match, miss.
        let dist = Matrix::from_rows(&[vec![0.1f64, 0.2, 0.3, 0.4]]).unwrap();
        let r =
            evaluate_distances(dist, (&[1], &[0]), (&[1, 2, 1, 3], &[1, 1, 1, 1]), &[1]).unwrap();
        assert!((r.map - (1.0 + 2.0 / 3.0) / 2.0).abs() < 1e-15);
        assert_eq!(r.cmc_at, vec![(1, 1.0)]);
    }

    #[test]
    fn junk_is_skipped_in_rank_counting() {
        // Junk (same cam) at the top, then a miss, then the match.
        let dist = Matrix::from_rows(&[vec![0.0f64, 0.1, 0.2, 0.3]]).unwrap();
        let r = evaluate_distances(dist, (&[4], &[0]), (&[4, -1, 9, 4], &[0, 2, 1, 1]), &[1, 2])
            .unwrap();
        assert_eq!(r.ap[0], Some(0.5));
        assert_eq!(r.cmc_at, vec![(1, 0.0), (2, 1.0)]);
    }

    #[test]
    fn queries_without_matches_are_dropped() {
        let dist = Matrix::from_rows(&[vec![0.1f64, 0.2], vec![0.3, 0.4]]).unwrap();
        let r =
            evaluate_distances(dist.clone(), (&[1, 2], &[0, 0]), (&[1, 1], &[1, 0]), &[1]).unwrap();
        assert_eq!(r.valid_queries, 1);
        assert_eq!(r.ap[1], None);
        assert!(matches!(
            evaluate_distances(dist, (&[1, 2], &[0, 0]), (&[1, 1], &[0, 0]), &[1]),
            Err(Error::NoValidQuery)
        ));
    }

    #[test]
    fn rank_bounds() {
        let dist = Matrix::from_rows(&[vec![0.1f64, 0.2]]).unwrap();
        for bad in [0, 3] {
            assert!(matches!(
                evaluate_distances(dist.clone(), (&[1], &[0]), (&[1, 2], &[1, 1]), &[bad]),
                Err(Error::InvalidRank { .. })
            ));
        }
    }

    #[test]
    fn perfect_features_score_one() {
        let mut rows = Vec::new();
        let (mut pids, mut cams) = (Vec::new(), Vec::new());
        for pid in 0..4 {
            for cam in 0..3 {
                let mut v = vec![0.0f64; 4];
                v[pid as usize] = 1.0;
                rows.push(v);
                pids.push(pid);
                cams.push(cam);
            }
        }
        let set = FeatureSet::new(Matrix::from_rows(&rows).unwrap(), pids, cams).unwrap();
        let r = evaluate(&set, &set, &EvalOptions::default()).unwrap();
        assert_eq!(r.map, 1.0);
        assert_eq!(r.cmc_at_rank(1), 1.0);
        assert!(r.cmc.windows(2).all(|w| w[0] <= w[1]));
    }
}
