//! Dataset loading (IDX images, CSV features), noise, splits and batching.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid_arg, io_err, Error, Result};
use crate::nn::{one_hot, RealTensor};
use crate::Real;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataKind {
    Image,
    Feature,
}

/// Samples in `[-1, 1]` with integer labels in `[0, k)`.
///
/// Image inputs have shape `N × 1 × H × W`, feature inputs `N × d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    pub inputs: RealTensor<T>,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    pub kind: DataKind,
}

impl<T: Real> Dataset<T> {
    pub fn new(inputs: RealTensor<T>, labels: Vec<usize>, num_classes: usize, kind: DataKind) -> Result<Self> {
        if inputs.shape().first() != Some(&labels.len()) {
            return Err(Error::Consistency(format!(
                "{} labels for input shape {:?}",
                labels.len(),
                inputs.shape()
            )));
        }
        if let Some((i, l)) = labels.iter().enumerate().find(|(_, &l)| l >= num_classes) {
            return Err(Error::InvalidInput(format!("label {l} of sample {i} outside [0, {num_classes})")));
        }
        Ok(Self { inputs, labels, num_classes, kind })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Shape of one sample, e.g. `[1, 28, 28]` or `[d]`.
    pub fn sample_shape(&self) -> &[usize] {
        &self.inputs.shape()[1..]
    }

    /// Flattened size of one sample.
    pub fn sample_len(&self) -> usize {
        self.sample_shape().iter().product()
    }

    pub fn sample(&self, i: usize) -> &[T] {
        let s = self.sample_len();
        &self.inputs.values()[i * s..(i + 1) * s]
    }

    /// Inputs of the selected samples stacked into one tensor.
    pub fn gather(&self, indices: &[usize]) -> RealTensor<T> {
        let mut values = Vec::with_capacity(indices.len() * self.sample_len());
        for &i in indices {
            values.extend_from_slice(self.sample(i));
        }
        let mut shape = vec![indices.len()];
        shape.extend_from_slice(self.sample_shape());
        RealTensor::new(shape, values).expect("gathered sizes agree")
    }

    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            inputs: self.gather(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
            kind: self.kind,
        }
    }

    /// The first `n` samples (or all of them).
    pub fn take(&self, n: usize) -> Self {
        let idx: Vec<usize> = (0..n.min(self.len())).collect();
        self.subset(&idx)
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.num_classes];
        for &l in &self.labels {
            c[l] += 1;
        }
        c
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| io_err(path, e))
}

fn be_u32(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::Format(format!("{what}: truncated header at byte {offset}")))
}

/// Parse IDX image and label buffers; pixels map to `v / 127.5 − 1`.
pub fn parse_idx<T: Real>(images: &[u8], labels: &[u8], num_classes: usize) -> Result<Dataset<T>> {
    let magic = be_u32(images, 0, "images")?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(Error::Format(format!(
            "image file magic 0x{magic:08x}, expected 0x{IDX_IMAGES_MAGIC:08x}"
        )));
    }
    let magic = be_u32(labels, 0, "labels")?;
    if magic != IDX_LABELS_MAGIC {
        return Err(Error::Format(format!(
            "label file magic 0x{magic:08x}, expected 0x{IDX_LABELS_MAGIC:08x}"
        )));
    }
    let n = be_u32(images, 4, "images")? as usize;
    let rows = be_u32(images, 8, "images")? as usize;
    let cols = be_u32(images, 12, "images")? as usize;
    let nl = be_u32(labels, 4, "labels")? as usize;
    if n != nl {
        return Err(Error::Consistency(format!("{n} images but {nl} labels")));
    }
    let pixels = &images[16..];
    if pixels.len() != n * rows * cols {
        return Err(Error::Format(format!(
            "image payload has {} bytes, header implies {}",
            pixels.len(),
            n * rows * cols
        )));
    }
    let label_bytes = &labels[8..];
    if label_bytes.len() != n {
        return Err(Error::Format(format!("label payload has {} bytes, header implies {n}", label_bytes.len())));
    }
    let scale = T::lit(127.5);
    let values = pixels.iter().map(|&v| T::lit(v as f64) / scale - T::one()).collect();
    let inputs = RealTensor::new(vec![n, 1, rows, cols], values)?;
    Dataset::new(inputs, label_bytes.iter().map(|&l| l as usize).collect(), num_classes, DataKind::Image)
}

/// Load an IDX image/label file pair with 10 classes.
pub fn load_idx<T: Real>(images_path: &Path, labels_path: &Path) -> Result<Dataset<T>> {
    parse_idx(&read_file(images_path)?, &read_file(labels_path)?, 10)
}

/// Encode 8-bit images as an IDX image file.
pub fn encode_idx_images(rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    let n = pixels.len() / (rows * cols);
    let mut out = Vec::with_capacity(16 + pixels.len());
    for v in [IDX_IMAGES_MAGIC, n as u32, rows as u32, cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(pixels);
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&IDX_LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

/// Additive zero-mean Gaussian noise, then clamp to `[-1, 1]`.
pub fn add_gaussian_noise<T: Real>(ds: &Dataset<T>, stddev: f64, seed: u64) -> Result<Dataset<T>> {
    if ds.kind != DataKind::Image {
        return Err(invalid_arg("noise augmentation applies to image datasets"));
    }
    if !(stddev >= 0.0 && stddev.is_finite()) {
        return Err(invalid_arg(format!("noise stddev must be non-negative, got {stddev}")));
    }
    if stddev == 0.0 {
        return Ok(ds.clone());
    }
    let normal = Normal::new(0.0, stddev).map_err(|e| invalid_arg(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ds.clone();
    for v in out.inputs.values_mut() {
        *v = (*v + T::lit(normal.sample(&mut rng))).max(-T::one()).min(T::one());
    }
    Ok(out)
}

/// Per-column min/max taken from training data.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let mut min = vec![f64::INFINITY; d];
        let mut max = vec![f64::NEG_INFINITY; d];
        for r in rows {
            for (c, &v) in r.iter().enumerate() {
                min[c] = min[c].min(v);
                max[c] = max[c].max(v);
            }
        }
        Self { min, max }
    }

    /// Map to `[-1, 1]`; constant columns map to 0, unseen values are clamped.
    pub fn apply(&self, c: usize, v: f64) -> f64 {
        let span = self.max[c] - self.min[c];
        if span == 0.0 {
            0.0
        } else {
            (2.0 * (v - self.min[c]) / span - 1.0).clamp(-1.0, 1.0)
        }
    }
}

/// Parse a `label,f0,f1,…` CSV. Without a scaler the file's own statistics
/// are used; the fitted scaler is returned for reuse on held-out files.
pub fn parse_csv_features<T: Real, R: std::io::Read>(
    reader: R,
    num_classes: usize,
    scaler: Option<&FeatureScaler>,
) -> Result<(Dataset<T>, FeatureScaler)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = rdr.headers().map_err(|e| Error::Format(format!("header: {e}")))?.clone();
    if header.get(0).map(str::trim) != Some("label") || header.len() < 2 {
        return Err(Error::Format("header must be label,f0,f1,…".into()));
    }
    let d = header.len() - 1;
    let mut labels = Vec::new();
    let mut rows = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Format(e.to_string()))?;
        let line = rec.position().map_or(row as u64 + 2, |p| p.line());
        if rec.len() != d + 1 {
            return Err(Error::Format(format!("line {line}: expected {} fields, found {}", d + 1, rec.len())));
        }
        let label: usize = rec[0]
            .trim()
            .parse()
            .map_err(|_| Error::Format(format!("line {line}: label '{}' is not an integer", &rec[0])))?;
        if label >= num_classes {
            return Err(Error::InvalidInput(format!(
                "row {row} (line {line}): label {label} outside [0, {num_classes})"
            )));
        }
        let feats = rec
            .iter()
            .skip(1)
            .enumerate()
            .map(|(c, s)| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Format(format!("line {line}, column {}: '{s}' is not a number", c + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        labels.push(label);
        rows.push(feats);
    }
    let scaler = match scaler {
        Some(s) if s.min.len() == d => s.clone(),
        Some(s) => return Err(Error::Consistency(format!("scaler has {} columns, file has {d}", s.min.len()))),
        None => FeatureScaler::fit(&rows),
    };
    let values = rows
        .iter()
        .flat_map(|r| r.iter().enumerate().map(|(c, &v)| T::lit(scaler.apply(c, v))))
        .collect();
    let inputs = RealTensor::new(vec![rows.len(), d], values)?;
    Ok((Dataset::new(inputs, labels, num_classes, DataKind::Feature)?, scaler))
}

pub fn load_csv_features<T: Real>(path: &Path, num_classes: usize) -> Result<Dataset<T>> {
    load_csv_features_scaled(path, num_classes, None).map(|(ds, _)| ds)
}

pub fn load_csv_features_scaled<T: Real>(
    path: &Path,
    num_classes: usize,
    scaler: Option<&FeatureScaler>,
) -> Result<(Dataset<T>, FeatureScaler)> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    parse_csv_features(file, num_classes, scaler)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SplitMode {
    /// Fraction of samples that go to the first part.
    Fraction(f64),
    /// First `c` shuffled samples of every class go to the first part.
    PerClass(usize),
}

/// Disjoint, exhaustive, seeded split into `(train, held_out)`.
pub fn split<T: Real>(ds: &Dataset<T>, mode: SplitMode, seed: u64) -> Result<(Dataset<T>, Dataset<T>)> {
    let (a, b) = split_indices(&ds.labels, ds.num_classes, mode, seed)?;
    Ok((ds.subset(&a), ds.subset(&b)))
}

pub fn split_indices(labels: &[usize], num_classes: usize, mode: SplitMode, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = labels.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut take = vec![false; n];
    match mode {
        SplitMode::Fraction(f) => {
            if !(f > 0.0 && f < 1.0) {
                return Err(invalid_arg(format!("split fraction must be in (0, 1), got {f}")));
            }
            let cut = (f * n as f64).round() as usize;
            for &i in &order[..cut] {
                take[i] = true;
            }
        }
        SplitMode::PerClass(c) => {
            let mut got = vec![0usize; num_classes];
            for &i in &order {
                if got[labels[i]] < c {
                    got[labels[i]] += 1;
                    take[i] = true;
                }
            }
            if let Some((cls, have)) = got.iter().enumerate().find(|(_, &g)| g < c) {
                return Err(invalid_arg(format!("class {cls} has {have} samples, {c} requested")));
            }
        }
    }
    let a = (0..n).filter(|&i| take[i]).collect();
    let b = (0..n).filter(|&i| !take[i]).collect();
    Ok((a, b))
}

/// Seeded per-epoch shuffling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchPlan {
    pub seed: u64,
    pub batch_size: usize,
}

impl BatchPlan {
    pub fn new(seed: u64, batch_size: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(invalid_arg("batch size must be positive"));
        }
        Ok(Self { seed, batch_size })
    }

    /// The sample order for `epoch`, a permutation of `0..n`.
    pub fn permutation(&self, epoch: usize, n: usize) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(epoch as u64);
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut rng);
        p
    }

    /// Index groups for one epoch; the last may be short.
    pub fn index_batches(&self, epoch: usize, n: usize) -> Vec<Vec<usize>> {
        self.permutation(epoch, n).chunks(self.batch_size).map(<[usize]>::to_vec).collect()
    }
}

#[derive(Clone, Debug)]
pub struct Batch<T> {
    pub indices: Vec<usize>,
    pub inputs: RealTensor<T>,
    pub targets: RealTensor<T>,
    pub labels: Vec<usize>,
}

/// Batches of `(inputs, one-hot targets)` for one epoch.
pub fn batches<'a, T: Real>(ds: &'a Dataset<T>, plan: &BatchPlan, epoch: usize) -> impl Iterator<Item = Batch<T>> + 'a {
    plan.index_batches(epoch, ds.len()).into_iter().map(move |indices| {
        let labels: Vec<usize> = indices.iter().map(|&i| ds.labels[i]).collect();
        Batch {
            inputs: ds.gather(&indices),
            targets: one_hot(&labels, ds.num_classes).expect("labels validated on construction"),
            labels,
            indices,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn fixture(n: usize) -> (Vec<u8>, Vec<u8>) {
        let pixels: Vec<u8> = (0..n * 784).map(|i| (i % 256) as u8).collect();
        let labels: Vec<u8> = (0..n as u8).map(|i| i % 10).collect();
        (encode_idx_images(28, 28, &pixels), encode_idx_labels(&labels))
    }

    fn toy(n: usize, k: usize) -> Dataset<f64> {
        let inputs = RealTensor::new(vec![n, 2], (0..2 * n).map(|i| i as f64 / (2 * n) as f64).collect()).unwrap();
        Dataset::new(inputs, (0..n).map(|i| i % k).collect(), k, DataKind::Feature).unwrap()
    }

    #[test]
    fn idx_fixture_round_trip() {
        let (img, lab) = fixture(4);
        let ds: Dataset<f64> = parse_idx(&img, &lab, 10).unwrap();
        assert_eq!(ds.len(), 4);
        assert_eq!(ds.sample_shape(), &[1, 28, 28]);
        assert_eq!(ds.sample(0)[0], -1.0);
        assert_eq!(ds.sample(0)[255], 1.0);
        assert_eq!(ds.labels, vec![0, 1, 2, 3]);
    }

    #[test]
    fn idx_files_from_disk() {
        let dir = tempfile::tempdir().unwrap();
        let (img, lab) = fixture(3);
        std::fs::write(dir.path().join("i"), img).unwrap();
        std::fs::write(dir.path().join("l"), lab).unwrap();
        let ds: Dataset<f32> = load_idx(&dir.path().join("i"), &dir.path().join("l")).unwrap();
        assert_eq!(ds.len(), 3);
        assert!(matches!(load_idx::<f64>(&dir.path().join("x"), &dir.path().join("l")), Err(Error::Io { .. })));
    }

    #[test]
    fn zero_image_is_all_minus_one() {
        let ds: Dataset<f64> = parse_idx(&encode_idx_images(28, 28, &[0; 784]), &encode_idx_labels(&[3]), 10).unwrap();
        assert!(ds.inputs.values().iter().all(|&v| v == -1.0));
    }

    #[test]
    fn wrong_magic_is_named() {
        let (mut img, lab) = fixture(1);
        img[3] = 0x04;
        match parse_idx::<f64>(&img, &lab, 10) {
            Err(Error::Format(m)) => assert!(m.contains("0x00000804"), "{m}"),
            other => panic!("{other:?}"),
        }
        let (img, mut lab) = fixture(1);
        lab[2] = 0x09;
        assert!(matches!(parse_idx::<f64>(&img, &lab, 10), Err(Error::Format(_))));
    }

    #[test]
    fn count_mismatch_is_consistency_error() {
        let (img, _) = fixture(4);
        let (_, lab) = fixture(3);
        assert!(matches!(parse_idx::<f64>(&img, &lab, 10), Err(Error::Consistency(_))));
    }

    #[test]
    fn truncated_payload_is_format_error() {
        let (img, lab) = fixture(2);
        assert!(matches!(parse_idx::<f64>(&img[..img.len() - 1], &lab, 10), Err(Error::Format(_))));
        assert!(matches!(parse_idx::<f64>(&img[..6], &lab, 10), Err(Error::Format(_))));
    }

    #[test]
    fn zero_noise_is_identity_and_noise_stays_in_range() {
        let (img, lab) = fixture(4);
        let ds: Dataset<f64> = parse_idx(&img, &lab, 10).unwrap();
        assert_eq!(add_gaussian_noise(&ds, 0.0, 1).unwrap(), ds);
        let noisy = add_gaussian_noise(&ds, 0.3, 1).unwrap();
        assert!(noisy.inputs.values().iter().all(|v| (-1.0..=1.0).contains(v)));
        assert_eq!(noisy, add_gaussian_noise(&ds, 0.3, 1).unwrap());
        assert_ne!(noisy, add_gaussian_noise(&ds, 0.3, 2).unwrap());
        assert!(add_gaussian_noise(&toy(3, 2), 0.1, 1).is_err());
    }

    #[test]
    fn noise_stddev_on_interior_pixels() {
        // Mid-grey pixels are far from the clamp at this stddev.
        let n = 1_276;
        let ds: Dataset<f64> = parse_idx(&encode_idx_images(28, 28, &vec![128u8; n * 784]), &encode_idx_labels(&vec![0; n]), 10).unwrap();
        let noisy = add_gaussian_noise(&ds, 0.05, 9).unwrap();
        let diffs: Vec<f64> = noisy.inputs.values().iter().zip(ds.inputs.values()).map(|(a, b)| a - b).collect();
        assert!(diffs.len() >= 1_000_000);
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / diffs.len() as f64).sqrt();
        assert!((sd - 0.05).abs() < 0.002, "sd {sd}");
        assert!(mean.abs() < 1e-3);
    }

    #[test]
    fn csv_fixture_and_degenerate_column() {
        let text = "label,f0,f1\n0,1.0,5\n1,3.0,5\n1,2.0,5\n";
        let (ds, sc) = parse_csv_features::<f64, _>(text.as_bytes(), 2, None).unwrap();
        assert_eq!(ds.len(), 3);
        assert_eq!(ds.sample_shape(), &[2]);
        assert_eq!(ds.inputs.values(), &[-1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert_eq!(sc.min, vec![1.0, 5.0]);
        let (held, _) = parse_csv_features::<f64, _>("label,f0,f1\n0,5.0,1\n".as_bytes(), 2, Some(&sc)).unwrap();
        assert_eq!(held.inputs.values(), &[1.0, 0.0]);
    }

    #[test]
    fn csv_errors() {
        let ragged = parse_csv_features::<f64, _>("label,f0,f1\n0,1,2\n1,3\n".as_bytes(), 2, None);
        match ragged {
            Err(Error::Format(m)) => assert!(m.contains("line 3"), "{m}"),
            other => panic!("{other:?}"),
        }
        let bad = parse_csv_features::<f64, _>("label,f0\n0,abc\n".as_bytes(), 2, None);
        assert!(matches!(bad, Err(Error::Format(m)) if m.contains("abc")));
        let lab = parse_csv_features::<f64, _>("label,f0\n0,1\n7,2\n".as_bytes(), 2, None);
        assert!(matches!(lab, Err(Error::InvalidInput(m)) if m.contains("row 1")));
        assert!(parse_csv_features::<f64, _>("x,f0\n0,1\n".as_bytes(), 2, None).is_err());
    }

    #[test]
    fn csv_from_disk() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "label,f0\n0,1\n1,2\n").unwrap();
        let ds: Dataset<f64> = load_csv_features(f.path(), 2).unwrap();
        assert_eq!(ds.labels, vec![0, 1]);
    }

    #[test]
    fn split_examples() {
        let (a, b) = split(&toy(10, 2), SplitMode::Fraction(0.5), 3).unwrap();
        assert_eq!((a.len(), b.len()), (5, 5));
        let (a, b) = split(&toy(9, 3), SplitMode::PerClass(1), 3).unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(a.class_counts(), vec![1, 1, 1]);
        assert_eq!(b.len(), 6);
        assert!(split(&toy(9, 3), SplitMode::PerClass(4), 3).is_err());
        assert!(split(&toy(9, 3), SplitMode::Fraction(1.0), 3).is_err());
        assert_eq!(split(&toy(10, 2), SplitMode::Fraction(0.3), 8).unwrap(), split(&toy(10, 2), SplitMode::Fraction(0.3), 8).unwrap());
    }

    #[test]
    fn batch_sizes_and_targets() {
        let ds = toy(5, 2);
        let plan = BatchPlan::new(1, 2).unwrap();
        let bs: Vec<_> = batches(&ds, &plan, 0).collect();
        assert_eq!(bs.iter().map(|b| b.labels.len()).collect::<Vec<_>>(), vec![2, 2, 1]);
        for b in &bs {
            for (r, &l) in b.labels.iter().enumerate() {
                assert_eq!(b.targets.row(r)[l], 1.0);
                assert_eq!(b.targets.row(r).iter().sum::<f64>(), 1.0);
                assert_eq!(b.inputs.row(r), ds.sample(b.indices[r]));
            }
        }
        assert!(BatchPlan::new(1, 0).is_err());
    }

    proptest! {
        #[test]
        fn epoch_permutations_are_bijections(n in 1usize..200, bs in 1usize..40, seed in any::<u64>(), epoch in 0usize..20) {
            let plan = BatchPlan::new(seed, bs).unwrap();
            let mut all: Vec<usize> = plan.index_batches(epoch, n).concat();
            prop_assert_eq!(&plan.index_batches(epoch, n).concat(), &all);
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }

        #[test]
        fn splits_are_disjoint_and_exhaustive(n in 2usize..120, f in 0.01..0.99f64, seed in any::<u64>(), per in 0usize..3) {
            let labels: Vec<usize> = (0..n).map(|i| i % 3).collect();
            let mode = if per > 0 && n >= 9 { SplitMode::PerClass(per) } else { SplitMode::Fraction(f) };
            let (mut a, b) = split_indices(&labels, 3, mode, seed).unwrap();
            a.extend(b);
            a.sort_unstable();
            prop_assert_eq!(a, (0..n).collect::<Vec<_>>());
        }
    }
}
