#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use reidkit::imaging::{encode_pnm, Image};
use reidkit::{RandomSource, SplitMix64};
use serde_json::Value;
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

pub const BIN: &str = env!("CARGO_BIN_EXE_reidkit");

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("{e}: {}\n{}", self.stdout, self.stderr))
    }
}

pub fn reidkit<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(BIN)
        .args(args)
        .output()
        .expect("spawn reidkit");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8_lossy(&out.stdout).into_owned(),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

/// Reference profiles: name, r1, map, fd, v, s, expected es.
pub const TABLE1: [(&str, f64, f64, f64, f64, f64, f64); 8] = [
    ("AlignedReID", 91.8, 79.3, 2048.0, 100.0, 207.0, 2.55),
    ("PCB", 93.1, 81.0, 1536.0, 102.0, 192.0, 3.45),
    ("HPM", 94.2, 82.7, 3840.0, 356.0, 82.0, 1.00),
    ("MGN", 95.7, 86.9, 2816.0, 263.0, 112.0, 2.42),
    ("Hier(Base)", 92.9, 79.6, 2048.0, 169.0, 160.0, 2.76),
    ("Hier(+RPE)", 93.6, 81.2, 2048.0, 169.0, 160.0, 3.08),
    ("Hier(+Losses)", 95.6, 86.8, 2560.0, 224.0, 138.0, 3.41),
    ("Hier(+Both)", 96.0, 87.2, 2560.0, 224.0, 138.0, 3.52),
];

pub fn write_table1(path: &Path) {
    let models: Vec<Value> = TABLE1
        .iter()
        .map(|&(name, r1, map, fd, v, s, _)| serde_json::json!({"name": name, "r1": r1, "map": map, "fd": fd, "v": v, "s": s}))
        .collect();
    fs::write(path, serde_json::to_string(&models).unwrap()).unwrap();
}

/// `n` noise images of varying size, split over the root and two
/// subdirectories, plus one non-image file.
pub fn write_corpus(dir: &Path, n: usize) {
    let mut rng = SplitMix64::new(2024);
    for sub in ["", "cam1", "cam2/deep"] {
        fs::create_dir_all(dir.join(sub)).unwrap();
    }
    for i in 0..n {
        let (w, h) = (24 + rng.below(40), 48 + rng.below(80));
        let channels = if i % 7 == 0 { 1 } else { 3 };
        let data = (0..w * h * channels).map(|_| rng.next_byte()).collect();
        let img = Image::new(w, h, channels, data).unwrap();
        let sub = ["", "cam1", "cam2/deep"][i % 3];
        let ext = if channels == 1 { "pgm" } else { "ppm" };
        fs::write(
            dir.join(sub).join(format!("img_{i:03}.{ext}")),
            encode_pnm(&img),
        )
        .unwrap();
    }
    fs::write(dir.join("cam1/README.txt"), "not an image\n").unwrap();
}

/// `<sha256>  <relative path>` for every file under `root`, sorted.
pub fn tree_digest(root: &Path) -> String {
    let mut lines: Vec<String> = WalkDir::new(root)
        .sort_by_file_name()
        .into_iter()
        .map(|e| e.unwrap())
        .filter(|e| e.file_type().is_file())
        .map(|e| {
            let rel = e.path().strip_prefix(root).unwrap();
            let rel: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            let hash = Sha256::digest(fs::read(e.path()).unwrap());
            let hex: String = hash.iter().map(|b| format!("{b:02x}")).collect();
            format!("{hex}  {}", rel.join("/"))
        })
        .collect();
    lines.sort();
    lines.join("\n") + "\n"
}

pub struct BenchFixture {
    pub query_dir: PathBuf,
    pub query_csv: PathBuf,
    pub gallery_dir: PathBuf,
    pub gallery_csv: PathBuf,
}

impl BenchFixture {
    pub fn args(&self) -> Vec<String> {
        [
            ("--query-dir", &self.query_dir),
            ("--query-annotations", &self.query_csv),
            ("--gallery-dir", &self.gallery_dir),
            ("--gallery-annotations", &self.gallery_csv),
        ]
        .iter()
        .flat_map(|(f, p)| [f.to_string(), p.display().to_string()])
        .collect()
    }
}

/// `persons` identities, each a shared 16x8 block pattern plus a small
/// per-person offset per block; the query view (camera 0) and gallery view
/// (camera 1) add independent pixel noise.
pub fn bench_fixture(root: &Path, persons: usize) -> BenchFixture {
    let mut rng = SplitMix64::new(77);
    let (w, h) = (32, 64);
    let query_dir = root.join("query");
    let gallery_dir = root.join("gallery");
    fs::create_dir_all(&query_dir).unwrap();
    fs::create_dir_all(&gallery_dir).unwrap();
    let mut qcsv = String::from("filename,person_id,camera_id\n");
    let mut gcsv = qcsv.clone();
    let shared: Vec<i32> = (0..16 * 8).map(|_| 60 + rng.below(136) as i32).collect();
    for p in 0..persons {
        let pattern: Vec<i32> = shared
            .iter()
            .map(|&v| v + rng.below(41) as i32 - 20)
            .collect();
        for (dir, csv, cam) in [(&query_dir, &mut qcsv, 0), (&gallery_dir, &mut gcsv, 1)] {
            let mut data = Vec::with_capacity(w * h * 3);
            for y in 0..h {
                for x in 0..w {
                    let base = pattern[(y / 4) * 8 + x / 4];
                    for _ in 0..3 {
                        let v = base + rng.below(61) as i32 - 30;
                        data.push(v.clamp(0, 255) as u8);
                    }
                }
            }
            let name = format!("p{p:03}_c{cam}.ppm");
            fs::write(
                dir.join(&name),
                encode_pnm(&Image::new(w, h, 3, data).unwrap()),
            )
            .unwrap();
            csv.push_str(&format!("{name},{p},{cam}\n"));
        }
    }
    let query_csv = root.join("query.csv");
    let gallery_csv = root.join("gallery.csv");
    fs::write(&query_csv, qcsv).unwrap();
    fs::write(&gallery_csv, gcsv).unwrap();
    BenchFixture {
        query_dir,
        query_csv,
        gallery_dir,
        gallery_csv,
    }
}
