//! Flag definitions, presets and config-file expansion.
//!
//! Precedence, lowest first: built-in defaults, `--preset`, `--config` file,
//! explicit flags. Presets and config files are expanded into ordinary flags
//! placed before the user's own, and the command lets later flags override
//! earlier ones.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "hqfnn", version, about = "Hybrid quantum-fuzzy neural networks: training, evaluation and noise studies")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model and write trace.csv, metrics.json, confusion.csv and model.ckpt.
    #[command(args_override_self = true)]
    Train(TrainArgs),
    /// Evaluate a checkpoint and write metrics.json and confusion.csv.
    #[command(args_override_self = true)]
    Eval(EvalArgs),
    /// Compare analytic gradients with central finite differences.
    #[command(args_override_self = true)]
    Gradcheck(GradcheckArgs),
    /// Sweep membership-circuit fidelity under a noise channel.
    #[command(name = "noise-sweep", args_override_self = true)]
    NoiseSweep(NoiseSweepArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    /// INI file of `key = value` lines named after the flags; flags override it.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Named profile applied before the config file (desk-mnist).
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// Worker threads; 0 uses every core, 1 is the serial reference mode.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
    /// Seed for initialization, shuffling, splits and noise.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset format: idx (MNIST-style images) or csv (label,f0,f1,… features).
    #[arg(long, default_value = "idx")]
    pub dataset: String,
    /// IDX training images.
    #[arg(long, value_name = "FILE")]
    pub images: Option<PathBuf>,
    /// IDX training labels.
    #[arg(long, value_name = "FILE")]
    pub labels: Option<PathBuf>,
    /// IDX test images.
    #[arg(long, value_name = "FILE")]
    pub test_images: Option<PathBuf>,
    /// IDX test labels.
    #[arg(long, value_name = "FILE")]
    pub test_labels: Option<PathBuf>,
    /// Training feature CSV.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
    /// Test feature CSV, scaled with the training columns' ranges.
    #[arg(long, value_name = "FILE")]
    pub test_csv: Option<PathBuf>,
    /// Number of classes.
    #[arg(long, default_value_t = 10)]
    pub classes: usize,
    /// Keep only the first N training samples (0 keeps all).
    #[arg(long, default_value_t = 0)]
    pub train_limit: usize,
    /// Keep only the first N test samples (0 keeps all).
    #[arg(long, default_value_t = 0)]
    pub test_limit: usize,
    /// Standard deviation of Gaussian pixel noise added to image data.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    /// Model kind: hqfnn, fdnn, cnn or dnn.
    #[arg(long, default_value = "hqfnn")]
    pub model: String,
    #[arg(long, default_value_t = 200)]
    pub epochs: usize,
    #[arg(long, default_value_t = 128)]
    pub batch: usize,
    /// Initial learning rate.
    #[arg(long, default_value_t = 0.01)]
    pub lr: f64,
    /// Learning-rate decay factor applied at the milestone.
    #[arg(long, default_value_t = 0.1)]
    pub decay: f64,
    /// Milestone position as a fraction of the epoch count.
    #[arg(long, default_value_t = 0.58)]
    pub milestone_fraction: f64,
    /// Share of the training data held out for validation.
    #[arg(long, default_value_t = 0.1)]
    pub val_fraction: f64,
    /// Width of the neural features (0 picks 128 for images, 256 for features).
    #[arg(long, default_value_t = 0)]
    pub hidden: usize,
    /// Fuzzy sets (0 means one per class).
    #[arg(long, default_value_t = 0)]
    pub fuzzy_sets: usize,
    /// Re-uploading layers per membership circuit.
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    /// Qubits per membership circuit.
    #[arg(long, default_value_t = 1)]
    pub qubits: usize,
    /// Dropout probability in the dense branch.
    #[arg(long, default_value_t = 0.4)]
    pub dropout: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub data: DataArgs,
    /// Checkpoint written by `train`.
    #[arg(long, value_name = "FILE")]
    pub checkpoint: PathBuf,
    /// What to evaluate without test files: all training data, or the
    /// validation hold-out `train` used (same seed and fraction).
    #[arg(long, default_value = "all")]
    pub subset: String,
    /// Validation share used to rebuild the hold-out for `--subset val`.
    #[arg(long, default_value_t = 0.1)]
    pub val_fraction: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    #[command(flatten)]
    pub common: Common,
    /// Random single-qubit circuits to check.
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    /// Largest layer count among the random circuits.
    #[arg(long, default_value_t = 4)]
    pub max_layers: usize,
    /// Circuit-level relative error bound.
    #[arg(long, default_value_t = 1e-5)]
    pub tolerance: f64,
    /// End-to-end model relative error bound.
    #[arg(long, default_value_t = 1e-4)]
    pub e2e_tolerance: f64,
}

#[derive(Debug, Args)]
pub struct NoiseSweepArgs {
    #[command(flatten)]
    pub common: Common,
    /// Channel: ad, dp (listed Kraus set) or mix_dp ((1−γ)ρ + γI/2).
    #[arg(long, default_value = "mix_dp")]
    pub channel: String,
    /// Noise placement: end (end_of_circuit) or each (after_each_gate).
    #[arg(long, default_value = "end")]
    pub placement: String,
    /// Comma-separated noise strengths.
    #[arg(long, default_value = "0.01,0.03,0.05,0.07,0.1")]
    pub gammas: String,
    /// Evenly spaced inputs in [-1, 1].
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Re-uploading layers.
    #[arg(long, default_value_t = 2)]
    pub layers: usize,
    #[arg(long, default_value_t = 1)]
    pub qubits: usize,
    /// Circuit angles: random (seeded) or zero.
    #[arg(long, default_value = "random")]
    pub thetas: String,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Location of the bundled desk-scale MNIST subset.
pub fn desk_data_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("HQFNN_DATA_DIR") {
        return PathBuf::from(dir);
    }
    if let Ok(mut dir) = std::env::current_dir() {
        loop {
            let cand = dir.join("data").join("desk-mnist");
            if cand.is_dir() {
                return cand;
            }
            if !dir.pop() {
                break;
            }
        }
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/desk-mnist")
}

pub fn preset_flags(name: &str, subcommand: &str) -> Result<Vec<String>, String> {
    match name {
        "desk-mnist" => {
            let mut v: Vec<String> = vec!["--seed".into(), "7".into()];
            let mut push = |pairs: &[(&str, &str)]| v.extend(pairs.iter().flat_map(|(k, x)| [k.to_string(), x.to_string()]));
            if subcommand == "train" || subcommand == "eval" {
                let dir = desk_data_dir();
                let p = |f: &str| dir.join(f).display().to_string();
                let (ti, tl, si, sl) = (p("train-images.idx"), p("train-labels.idx"), p("test-images.idx"), p("test-labels.idx"));
                push(&[
                    ("--dataset", "idx"),
                    ("--images", &ti),
                    ("--labels", &tl),
                    ("--test-images", &si),
                    ("--test-labels", &sl),
                    ("--classes", "10"),
                    ("--train-limit", "2000"),
                    ("--test-limit", "500"),
                    ("--noise", "0.05"),
                ]);
            }
            match subcommand {
                "train" => push(&[("--model", "hqfnn"), ("--epochs", "10"), ("--layers", "2"), ("--batch", "128"), ("--lr", "0.05")]),
                "noise-sweep" => push(&[("--layers", "2")]),
                _ => {}
            }
            Ok(v)
        }
        other => Err(format!("unknown preset '{other}' (available: desk-mnist)")),
    }
}

const SUBCOMMANDS: [&str; 4] = ["train", "eval", "gradcheck", "noise-sweep"];

/// Keys before any section apply to every subcommand; a `[train]`,
/// `[eval]`, `[gradcheck]` or `[noise-sweep]` section only to that one.
pub fn config_flags(path: &Path, subcommand: &str) -> Result<Vec<String>, String> {
    let conf = ini::Ini::load_from_file(path).map_err(|e| format!("config {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (section, props) in conf.iter() {
        match section {
            Some(s) if !SUBCOMMANDS.contains(&s) => {
                return Err(format!("config {}: unknown section [{s}] (expected one of {})", path.display(), SUBCOMMANDS.join(", ")));
            }
            Some(s) if s != subcommand => continue,
            _ => {}
        }
        for (k, v) in props.iter() {
            let key = k.trim().replace('_', "-");
            if key == "config" || key == "preset" {
                return Err(format!("config {}: '{key}' cannot be set from a config file", path.display()));
            }
            out.push(format!("--{key}"));
            out.push(v.trim().to_string());
        }
    }
    Ok(out)
}

fn flag_value(args: &[String], name: &str) -> Option<String> {
    let long = format!("--{name}");
    let eq = format!("--{name}=");
    let mut found = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == &long {
            found = it.next().cloned();
        } else if let Some(v) = a.strip_prefix(&eq) {
            found = Some(v.to_string());
        }
    }
    found
}

/// Insert preset and config flags ahead of the user's flags.
pub fn expand(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(sub_pos) = args.iter().skip(1).position(|a| !a.starts_with('-')).map(|p| p + 1) else {
        return Ok(args);
    };
    let user = &args[sub_pos + 1..];
    let mut injected = Vec::new();
    if let Some(p) = flag_value(user, "preset") {
        injected.extend(preset_flags(&p, &args[sub_pos])?);
    }
    if let Some(c) = flag_value(user, "config") {
        let path = PathBuf::from(&c);
        if !path.is_file() {
            return Err(format!("config file not found: {}", path.display()));
        }
        injected.extend(config_flags(&path, &args[sub_pos])?);
    }
    let mut out = args[..=sub_pos].to_vec();
    out.extend(injected);
    out.extend_from_slice(user);
    Ok(out)
}
