use reidkit::descriptor::{
    compose_descriptor, read_features, split_descriptor, write_features, BranchSpec,
    DescriptorLayout, FeatureSet,
};
use reidkit::{Matrix, RandomSource, SplitMix64};

/// Finite f32 values drawn from raw bit patterns, so subnormals, signed
/// zeros and extreme exponents all show up.
fn awkward_values(n: usize, seed: u64) -> Vec<f32> {
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let v = f32::from_bits(rng.next_u64() as u32);
        if v.is_finite() {
            out.push(v);
        }
    }
    out[0] = -0.0;
    out[1] = f32::from_bits(1);
    out
}

fn set_with(layout: DescriptorLayout, n: usize, seed: u64) -> FeatureSet<f32> {
    let d = layout.dim();
    FeatureSet::new(
        Matrix::from_vec(n, d, awkward_values(n * d, seed)).unwrap(),
        (0..n as i32).map(|i| i * 7 - 3).collect(),
        (0..n as i32).map(|i| i % 6).collect(),
    )
    .unwrap()
    .with_layout(layout)
    .unwrap()
}

fn bits(s: &FeatureSet<f32>) -> Vec<u32> {
    s.features.as_slice().iter().map(|v| v.to_bits()).collect()
}

#[test]
fn descriptor_dimensions() {
    assert_eq!(DescriptorLayout::base().dim(), 2048);
    assert_eq!(DescriptorLayout::full().dim(), 2560);
}

#[test]
fn round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    for (i, layout) in [DescriptorLayout::base(), DescriptorLayout::full()]
        .into_iter()
        .enumerate()
    {
        let set = set_with(layout.clone(), 5, i as u64);
        let path = dir.path().join(format!("f{i}.reidfeat"));
        write_features(&path, &set).unwrap();
        let back = read_features(&path).unwrap();
        assert_eq!(bits(&back), bits(&set));
        assert_eq!(back.person_ids, set.person_ids);
        assert_eq!(back.camera_ids, set.camera_ids);
        assert_eq!(back.layout, Some(layout));
        let raw = std::fs::read(&path).unwrap();
        write_features(&path, &back).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), raw);
    }
}

#[test]
fn byte_layout_matches_hand_encoding() {
    let set = FeatureSet::new(
        Matrix::from_vec(2, 2, vec![1.0f32, -2.5, 0.0, 3.25]).unwrap(),
        vec![4, -1],
        vec![2, 0],
    )
    .unwrap();
    let mut want = b"REIDFT01".to_vec();
    for v in [2u32, 2, 0] {
        want.extend(v.to_le_bytes());
    }
    for (pid, cam, vals) in [(4i32, 2i32, [1.0f32, -2.5]), (-1, 0, [0.0, 3.25])] {
        want.extend(pid.to_le_bytes());
        want.extend(cam.to_le_bytes());
        for v in vals {
            want.extend(v.to_le_bytes());
        }
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.reidfeat");
    write_features(&path, &set).unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), want);
}

#[test]
fn truncated_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.reidfeat");
    let set = FeatureSet::new(
        Matrix::from_vec(1, 3, vec![1.0f32, 2.0, 3.0]).unwrap(),
        vec![0],
        vec![0],
    )
    .unwrap();
    write_features(&path, &set).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 1]).unwrap();
    assert!(read_features(&path).is_err());
}

#[test]
fn compose_then_split() {
    let g1 = vec![1.0f64; 512];
    let p2 = vec![2.0f64; 256];
    let r = vec![3.0f64; 512];
    let (layout, v) = compose_descriptor(&[
        (BranchSpec::R, &r[..]),
        (BranchSpec::P4(2), &p2),
        (BranchSpec::G1, &g1),
    ])
    .unwrap();
    assert_eq!(
        layout.branches,
        vec![BranchSpec::G1, BranchSpec::P4(2), BranchSpec::R]
    );
    assert_eq!(v.len(), 1280);
    let parts = split_descriptor(&layout, &v).unwrap();
    assert_eq!(parts[1], (BranchSpec::P4(2), p2));
}
