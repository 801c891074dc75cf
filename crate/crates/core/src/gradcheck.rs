//! Finite-difference verification of the analytic loss gradients.
//!
//! Each trial draws a seeded random instance, evaluates the analytic
//! gradient once, and compares it against central differences of the loss
//! value, `(L(x + h e_i) - L(x - h e_i)) / 2h`. The error per coordinate is
//! `|a - n| / max(|a|, |n|, 1)`: relative for components of magnitude above
//! one, absolute below, so round-off in near-zero components cannot
//! dominate.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{
    ce_loss, mse_loss, oim_step, triplet_loss, LabeledBatch, OimBatch, OimConfig, OimState,
    Reduction, TripletConfig,
};
use crate::matrix::Matrix;
use crate::rng::{RandomSource, SplitMix64};

pub const DEFAULT_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    Ce,
    Triplet,
    Oim,
    Mse,
}

impl LossKind {
    pub const ALL: [LossKind; 4] = [
        LossKind::Ce,
        LossKind::Triplet,
        LossKind::Oim,
        LossKind::Mse,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LossKind::Ce => "ce",
            LossKind::Triplet => "triplet",
            LossKind::Oim => "oim",
            LossKind::Mse => "mse",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown loss '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstPoint {
    pub trial: usize,
    /// Flat index into the differentiated input (features, then weights for CE).
    pub coordinate: usize,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradcheckReport {
    pub loss: LossKind,
    /// Loss value of the last trial.
    pub value: f64,
    pub max_rel_err: f64,
    pub mean_rel_err: f64,
    pub points_checked: usize,
    pub seed: u64,
    pub trials: usize,
    pub worst: Option<WorstPoint>,
}

impl GradcheckReport {
    pub fn passed(&self, threshold: f64) -> bool {
        self.max_rel_err < threshold
    }
}

pub fn central_diff(x: &[f64], h: f64, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
    let mut p = x.to_vec();
    (0..x.len())
        .map(|i| {
            p[i] = x[i] + h;
            let up = f(&p);
            p[i] = x[i] - h;
            let down = f(&p);
            p[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

pub fn rel_err(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1.0)
}

fn random_matrix<R: RandomSource>(rows: usize, cols: usize, rng: &mut R) -> Matrix<f64> {
    let data = (0..rows * cols).map(|_| rng.uniform(-1.0, 1.0)).collect();
    Matrix::from_vec(rows, cols, data).expect("shape")
}

type LossFn = Box<dyn Fn(&[f64]) -> f64>;

/// Analytic gradient, flat input, and a closure evaluating the loss value.
struct Instance {
    value: f64,
    x: Vec<f64>,
    analytic: Vec<f64>,
    eval: LossFn,
}

fn ce_instance(rng: &mut SplitMix64) -> Result<Instance> {
    let (n, d, c) = (4, 8, 5);
    let f = random_matrix(n, d, rng);
    let w = random_matrix(c, d, rng);
    let labels: Vec<usize> = (0..n).map(|_| rng.below(c)).collect();
    let r = ce_loss(
        &LabeledBatch::new(f.clone(), labels.clone())?,
        &w,
        Reduction::Sum,
    )?;
    let mut x = f.into_vec();
    x.extend_from_slice(w.as_slice());
    let mut analytic = r.grad.into_vec();
    analytic.extend_from_slice(r.grad_weights.expect("weights").as_slice());
    Ok(Instance {
        value: r.value,
        x,
        analytic,
        eval: Box::new(move |v| {
            let f = Matrix::from_vec(n, d, v[..n * d].to_vec()).expect("shape");
            let w = Matrix::from_vec(c, d, v[n * d..].to_vec()).expect("shape");
            let b = LabeledBatch::new(f, labels.clone()).expect("finite");
            ce_loss(&b, &w, Reduction::Sum).expect("valid").value
        }),
    })
}

/// Smallest distance between any hinge argument and zero, or between the
/// chosen hardest positive/negative and the runner-up.
fn triplet_clearance(x: &Matrix<f64>, labels: &[usize], margin: f64) -> f64 {
    let n = labels.len();
    let d = |a: usize, b: usize| {
        x.row(a)
            .iter()
            .zip(x.row(b))
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt()
    };
    let mut clearance = f64::INFINITY;
    for a in 0..n {
        let mut pos: Vec<f64> = (0..n)
            .filter(|&j| labels[j] == labels[a])
            .map(|j| d(a, j))
            .collect();
        let mut neg: Vec<f64> = (0..n)
            .filter(|&j| labels[j] != labels[a])
            .map(|j| d(a, j))
            .collect();
        pos.sort_by(|p, q| q.total_cmp(p));
        neg.sort_by(f64::total_cmp);
        if pos.len() > 1 {
            clearance = clearance.min(pos[0] - pos[1]);
        }
        if neg.len() > 1 {
            clearance = clearance.min(neg[1] - neg[0]);
        }
        clearance = clearance.min((margin + pos[0] - neg[0]).abs());
    }
    clearance
}

fn triplet_instance(rng: &mut SplitMix64) -> Result<Instance> {
    let (p, k, d) = (4, 4, 8);
    let labels: Vec<usize> = (0..p * k).map(|i| i / k).collect();
    let cfg = TripletConfig::default();
    // Redraw until every max/min choice and hinge is well clear of a kink.
    let f = loop {
        let f = random_matrix(p * k, d, rng);
        if triplet_clearance(&f, &labels, cfg.margin) > 1e-3 {
            break f;
        }
    };
    let r = triplet_loss(&LabeledBatch::new(f.clone(), labels.clone())?, &cfg)?;
    Ok(Instance {
        value: r.value,
        x: f.into_vec(),
        analytic: r.grad.into_vec(),
        eval: Box::new(move |v| {
            let b = LabeledBatch::new(
                Matrix::from_vec(p * k, d, v.to_vec()).expect("shape"),
                labels.clone(),
            )
            .expect("finite");
            triplet_loss(&b, &cfg).expect("valid").value
        }),
    })
}

fn oim_instance(rng: &mut SplitMix64) -> Result<Instance> {
    let (classes, d, n) = (6, 5, 5);
    let mut state = OimState::new(random_matrix(classes, d, rng), OimConfig::default())?;
    for _ in 0..4 {
        state.push_unlabeled(random_matrix(1, d, rng).row(0))?;
    }
    let x = random_matrix(n, d, rng);
    let labels: Vec<Option<usize>> = (0..n)
        .map(|i| (i != 2).then(|| rng.below(classes)))
        .collect();
    let frozen = state.clone();
    let r = oim_step(&mut state, &OimBatch::new(x.clone(), labels.clone())?)?;
    Ok(Instance {
        value: r.value,
        x: x.into_vec(),
        analytic: r.grad.into_vec(),
        eval: Box::new(move |v| {
            let mut s = frozen.clone();
            let b = OimBatch::new(
                Matrix::from_vec(n, d, v.to_vec()).expect("shape"),
                labels.clone(),
            )
            .expect("finite");
            oim_step(&mut s, &b).expect("valid").value
        }),
    })
}

fn mse_instance(rng: &mut SplitMix64) -> Result<Instance> {
    let recon = random_matrix(1, 16, rng);
    let target = random_matrix(1, 16, rng);
    let r = mse_loss(&recon, &target, Reduction::Sum)?;
    Ok(Instance {
        value: r.value,
        x: recon.into_vec(),
        analytic: r.grad.into_vec(),
        eval: Box::new(move |v| {
            let m = Matrix::from_vec(1, 16, v.to_vec()).expect("shape");
            mse_loss(&m, &target, Reduction::Sum).expect("valid").value
        }),
    })
}

/// Runs `trials` seeded instances of one loss. Trial `t` draws from the
/// stream `seed ^ t`.
pub fn run_gradcheck(kind: LossKind, seed: u64, trials: usize, h: f64) -> Result<GradcheckReport> {
    let mut max_err = 0.0f64;
    let mut sum_err = 0.0;
    let mut points = 0usize;
    let mut worst = None;
    let mut value = 0.0;
    for trial in 0..trials {
        let mut rng = SplitMix64::for_item(seed, trial as u64);
        let inst = match kind {
            LossKind::Ce => ce_instance(&mut rng)?,
            LossKind::Triplet => triplet_instance(&mut rng)?,
            LossKind::Oim => oim_instance(&mut rng)?,
            LossKind::Mse => mse_instance(&mut rng)?,
        };
        value = inst.value;
        let numeric = central_diff(&inst.x, h, &inst.eval);
        for (i, (&a, &n)) in inst.analytic.iter().zip(&numeric).enumerate() {
            let e = rel_err(a, n);
            sum_err += e;
            points += 1;
            if e > max_err || worst.is_none() {
                max_err = max_err.max(e);
                worst = Some(WorstPoint {
                    trial,
                    coordinate: i,
                    analytic: a,
                    numeric: n,
                });
            }
        }
    }
    Ok(GradcheckReport {
        loss: kind,
        value,
        max_rel_err: max_err,
        mean_rel_err: if points == 0 {
            0.0
        } else {
            sum_err / points as f64
        },
        points_checked: points,
        seed,
        trials,
        worst,
    })
}
