#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hqfnn::data::{encode_idx_images, encode_idx_labels};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hqfnn"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn hqfnn")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Small IDX pair: digit-like blobs whose position depends on the label.
pub fn idx_fixture(dir: &Path, n: usize, prefix: &str) -> (PathBuf, PathBuf) {
    let mut pixels = vec![0u8; n * 784];
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let label = (i % 10) as u8;
        labels.push(label);
        let (r0, c0) = (4 + 2 * (label as usize % 5), 4 + 8 * (label as usize / 5));
        for r in r0..r0 + 6 {
            for c in c0..c0 + 6 {
                pixels[i * 784 + r * 28 + c] = 200 + (i % 50) as u8;
            }
        }
    }
    let images = dir.join(format!("{prefix}-images.idx"));
    let lab = dir.join(format!("{prefix}-labels.idx"));
    std::fs::write(&images, encode_idx_images(28, 28, &pixels)).unwrap();
    std::fs::write(&lab, encode_idx_labels(&labels)).unwrap();
    (images, lab)
}

pub fn csv_fixture(dir: &Path, n: usize) -> PathBuf {
    let mut s = String::from("label,f0,f1,f2,f3\n");
    for i in 0..n {
        let y = i % 2;
        let b = if y == 0 { -1.0 } else { 1.0 };
        s.push_str(&format!("{y},{},{},{},{}\n", b * 0.5 + 0.01 * i as f64, 0.3 * b, (i % 7) as f64, -b));
    }
    let p = dir.join("features.csv");
    std::fs::write(&p, s).unwrap();
    p
}

/// Labels carry no signal; the features are uniform noise.
pub fn noise_csv_fixture(dir: &Path, n: usize, seed: u64) -> PathBuf {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut s = String::from("label,f0,f1,f2\n");
    for i in 0..n {
        let f: [f64; 3] = rng.gen();
        s.push_str(&format!("{},{},{},{}\n", i % 2, f[0], f[1], f[2]));
    }
    let p = dir.join("noise.csv");
    std::fs::write(&p, s).unwrap();
    p
}

pub fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

pub fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Parse metrics.json and check the fixed schema.
pub fn check_metrics_json(p: &Path) -> serde_json::Value {
    let text = read(p);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let obj = v.as_object().unwrap();
    let mut keys: Vec<&str> = obj.keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(keys, ["accuracy", "macro_f1", "macro_precision", "macro_recall", "n_samples"]);
    for k in ["accuracy", "macro_precision", "macro_recall", "macro_f1"] {
        let x = obj[k].as_f64().unwrap();
        assert!((0.0..=1.0).contains(&x), "{k} = {x}");
        let raw = text.lines().find(|l| l.contains(&format!("\"{k}\""))).unwrap();
        let digits = raw.trim().trim_end_matches(',').rsplit('.').next().unwrap();
        assert_eq!(digits.len(), 6, "{raw}");
    }
    assert!(obj["n_samples"].as_u64().unwrap() > 0);
    v
}

/// Confusion CSV: header of class names, one row per class, counts summing to `n`.
pub fn check_confusion_csv(p: &Path, k: usize, n: u64) {
    let text = read(p);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), k + 1);
    let mut total = 0;
    let mut rows = 0;
    for l in lines {
        let cells: Vec<&str> = l.split(',').collect();
        assert_eq!(cells.len(), k + 1);
        total += cells[1..].iter().map(|c| c.parse::<u64>().unwrap()).sum::<u64>();
        rows += 1;
    }
    assert_eq!(rows, k);
    assert_eq!(total, n);
}
