use reidkit::gradcheck::{run_gradcheck, LossKind, DEFAULT_STEP};
use reidkit::losses::{triplet_loss, LabeledBatch, TripletConfig};
use reidkit::{Matrix, RandomSource, SplitMix64};

#[test]
fn gradients_match_finite_differences() {
    for kind in LossKind::ALL {
        let r = run_gradcheck(kind, 7, 10, DEFAULT_STEP).unwrap();
        assert!(r.max_rel_err < 1e-4, "{kind}: {r:?}");
    }
    let mse = run_gradcheck(LossKind::Mse, 7, 10, DEFAULT_STEP).unwrap();
    assert!(mse.max_rel_err < 1e-8, "{}", mse.max_rel_err);
}

#[test]
fn triplet_translation_invariance() {
    let mut rng = SplitMix64::new(5);
    let x: Vec<f64> = (0..12 * 4).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let labels: Vec<usize> = (0..12).map(|i| i / 3).collect();
    let shift: Vec<f64> = (0..4).map(|_| rng.uniform(-5.0, 5.0)).collect();
    let moved: Vec<f64> = x
        .iter()
        .enumerate()
        .map(|(i, v)| v + shift[i % 4])
        .collect();
    let cfg = TripletConfig::default();
    let a = triplet_loss(
        &LabeledBatch::new(Matrix::from_vec(12, 4, x).unwrap(), labels.clone()).unwrap(),
        &cfg,
    )
    .unwrap();
    let b = triplet_loss(
        &LabeledBatch::new(Matrix::from_vec(12, 4, moved).unwrap(), labels).unwrap(),
        &cfg,
    )
    .unwrap();
    assert!((a.value - b.value).abs() < 1e-12);
}
