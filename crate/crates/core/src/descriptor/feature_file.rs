//! REIDFEAT v1 feature files.
//!
//! ```text
//! magic   8 bytes  "REIDFT01"
//! n       u32 LE   record count
//! d       u32 LE   feature dimension
//! flags   u32 LE   bit 0: a layout sidecar `<file>.json` accompanies the file
//! n x { person_id i32 LE, camera_id i32 LE, d x f32 LE }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use super::{DescriptorLayout, FeatureSet};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const MAGIC: [u8; 8] = *b"REIDFT01";

const FLAG_LAYOUT: u32 = 1;
const HEADER_LEN: usize = 8 + 12;

pub fn encode(set: &FeatureSet<f32>) -> Vec<u8> {
    let (n, d) = (set.len(), set.dim());
    let flags = if set.layout.is_some() { FLAG_LAYOUT } else { 0 };
    let mut out = Vec::with_capacity(HEADER_LEN + n * (8 + 4 * d));
    out.extend_from_slice(&MAGIC);
    for v in [n as u32, d as u32, flags] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for i in 0..n {
        out.extend_from_slice(&set.person_ids[i].to_le_bytes());
        out.extend_from_slice(&set.camera_ids[i].to_le_bytes());
        for v in set.features.row(i) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

/// Parses the binary body; returns the set (without layout) and its flags.
pub fn decode(bytes: &[u8]) -> std::result::Result<(FeatureSet<f32>, u32), String> {
    if bytes.len() < HEADER_LEN || bytes[..8] != MAGIC {
        return Err("missing REIDFT01 header".into());
    }
    let word = |i: usize| u32::from_le_bytes(bytes[8 + 4 * i..12 + 4 * i].try_into().unwrap());
    let (n, d, flags) = (word(0) as usize, word(1) as usize, word(2));
    if flags & !FLAG_LAYOUT != 0 {
        return Err(format!("unknown flag bits {flags:#x}"));
    }
    let record = 8 + 4 * d;
    let expected = n
        .checked_mul(record)
        .and_then(|b| b.checked_add(HEADER_LEN))
        .ok_or("record count overflows")?;
    if bytes.len() != expected {
        return Err(format!("expected {expected} bytes, found {}", bytes.len()));
    }
    let mut pids = Vec::with_capacity(n);
    let mut cams = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n * d);
    for rec in bytes[HEADER_LEN..].chunks_exact(record) {
        pids.push(i32::from_le_bytes(rec[0..4].try_into().unwrap()));
        cams.push(i32::from_le_bytes(rec[4..8].try_into().unwrap()));
        values.extend(
            rec[8..]
                .chunks_exact(4)
                .map(|b| f32::from_le_bytes(b.try_into().unwrap())),
        );
    }
    let features = Matrix::from_vec(n, d, values).map_err(|e| e.to_string())?;
    let set = FeatureSet::new(features, pids, cams).map_err(|e| e.to_string())?;
    Ok((set, flags))
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the feature file, plus its layout sidecar when the set has one.
pub fn write_features(path: impl AsRef<Path>, set: &FeatureSet<f32>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode(set)).map_err(|e| Error::io(path, e))?;
    if let Some(layout) = &set.layout {
        write_layout_sidecar(path, layout)?;
    }
    Ok(())
}

pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureSet<f32>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (set, flags) = decode(&bytes).map_err(|r| Error::corrupt(path, r))?;
    if flags & FLAG_LAYOUT != 0 {
        let layout = read_layout_sidecar(path)?;
        return set
            .with_layout(layout)
            .map_err(|e| Error::corrupt(path, e.to_string()));
    }
    Ok(set)
}

pub fn write_layout_sidecar(path: impl AsRef<Path>, layout: &DescriptorLayout) -> Result<()> {
    let side = sidecar_path(path.as_ref());
    let json = serde_json::to_string_pretty(layout).expect("layout serializes");
    fs::write(&side, json + "\n").map_err(|e| Error::io(&side, e))
}

pub fn read_layout_sidecar(path: impl AsRef<Path>) -> Result<DescriptorLayout> {
    let side = sidecar_path(path.as_ref());
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    serde_json::from_str(&text).map_err(|e| Error::corrupt(&side, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(n: usize, d: usize) -> FeatureSet<f32> {
        let values = (0..n * d).map(|i| i as f32 * 0.25 - 3.0).collect();
        FeatureSet::new(
            Matrix::from_vec(n, d, values).unwrap(),
            (0..n as i32).map(|i| i - 1).collect(),
            (0..n as i32).map(|i| i % 3).collect(),
        )
        .unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = encode(&sample(2, 3));
        assert_eq!(
            &bytes[..8],
            &[0x52, 0x45, 0x49, 0x44, 0x46, 0x54, 0x30, 0x31]
        );
        assert_eq!(&bytes[8..12], &2u32.to_le_bytes());
        assert_eq!(&bytes[12..16], &3u32.to_le_bytes());
        assert_eq!(&bytes[16..20], &0u32.to_le_bytes());
        assert_eq!(&bytes[20..24], &(-1i32).to_le_bytes());
        assert_eq!(bytes.len(), 20 + 2 * (8 + 12));
    }

    #[test]
    fn rejects_malformed_input() {
        let mut bytes = encode(&sample(2, 3));
        assert!(decode(&bytes[..bytes.len() - 1]).is_err());
        bytes[0] = b'X';
        assert!(decode(&bytes).is_err());
        let mut bytes = encode(&sample(1, 1));
        bytes[16] = 0x80;
        assert!(decode(&bytes).is_err());
    }

    #[test]
    fn layout_sidecar_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.reidfeat");
        let set = sample(2, 2048)
            .with_layout(DescriptorLayout::base())
            .unwrap();
        write_features(&p, &set).unwrap();
        assert!(dir.path().join("g.reidfeat.json").exists());
        let back = read_features(&p).unwrap();
        assert_eq!(back, set);

        fs::remove_file(dir.path().join("g.reidfeat.json")).unwrap();
        assert!(read_features(&p).is_err());
    }

    proptest! {
        #[test]
        fn file_round_trip_is_bit_exact(
            n in 0usize..6,
            d in 1usize..5,
            bits in proptest::collection::vec(any::<u32>(), 30),
            ids in proptest::collection::vec(any::<i32>(), 12),
        ) {
            let values: Vec<f32> = (0..n * d)
                .map(|i| {
                    let v = f32::from_bits(bits[i % bits.len()]);
                    if v.is_finite() { v } else { i as f32 }
                })
                .collect();
            let set = FeatureSet::new(
                Matrix::from_vec(n, d, values).unwrap(),
                ids[..n].to_vec(),
                ids[6..6 + n].to_vec(),
            ).unwrap();
            let bytes = encode(&set);
            let (back, flags) = decode(&bytes).unwrap();
            prop_assert_eq!(flags, 0);
            prop_assert_eq!(encode(&back), bytes);
            for (a, b) in set.features.as_slice().iter().zip(back.features.as_slice()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
