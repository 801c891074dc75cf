mod common;

use common::rpe::{check_invocation, gate_rate};
use reidkit::imaging::{rpe_erase, EraseConfig, EraseStatus, Image};
use reidkit::SplitMix64;

fn always() -> EraseConfig {
    EraseConfig {
        probability: 1.0,
        ..EraseConfig::default()
    }
}

#[test]
fn masks_pass_geometry_checks() {
    let cfg = always();
    let mut polygons = 0;
    for seed in 0..500 {
        if check_invocation(seed, &cfg).unwrap() {
            polygons += 1;
        }
    }
    assert!(polygons > 490, "only {polygons} polygon masks");
}

#[test]
fn few_vertices_still_convex() {
    let cfg = EraseConfig {
        vertices: 3,
        ..always()
    };
    for seed in 0..100 {
        check_invocation(seed, &cfg).unwrap();
    }
}

#[test]
fn gate_rate_near_half() {
    let rate = gate_rate(10_000);
    assert!((0.47..=0.53).contains(&rate), "{rate}");
}

#[test]
fn probability_zero_is_identity() {
    let img = Image::filled(20, 40, 3, 9).unwrap();
    let cfg = EraseConfig {
        probability: 0.0,
        ..EraseConfig::default()
    };
    for seed in 0..50 {
        let out = rpe_erase(&img, &cfg, &mut SplitMix64::new(seed)).unwrap();
        assert_eq!(out.status, EraseStatus::Skipped);
        assert_eq!(out.image, img);
    }
}

#[test]
fn same_seed_same_output() {
    let img = Image::filled(30, 60, 1, 0).unwrap();
    let cfg = always();
    let a = rpe_erase(&img, &cfg, &mut SplitMix64::new(11)).unwrap();
    let b = rpe_erase(&img, &cfg, &mut SplitMix64::new(11)).unwrap();
    assert_eq!(a.image, b.image);
}
