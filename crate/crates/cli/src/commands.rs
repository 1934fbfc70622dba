use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hqfnn::data::{self, Dataset};
use hqfnn::metrics::ConfusionMatrix;
use hqfnn::model::gradcheck::{check_circuits, check_model, tiny_specs, CheckResult};
use hqfnn::model::{
    evaluate, holdout_split, load_checkpoint, save_checkpoint, train, Evaluation, InputSpec, Model, ModelKind,
    ModelSpec, TrainConfig,
};
use hqfnn::noiselab::{run_sweep, Placement, SweepConfig, DEFAULT_GAMMAS, REFERENCE_AD, REFERENCE_DP};
use hqfnn::qcore::ChannelKind;
use hqfnn::qnn::MembershipCircuit;
use hqfnn::Error;

use crate::args::{DataArgs, EvalArgs, GradcheckArgs, NoiseSweepArgs, TrainArgs};

/// A failed command: the exit code and a one-line reason.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }

    fn check(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NumericFailure { .. } => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

pub type CmdResult = Result<(), Failure>;

fn require(path: &Option<PathBuf>, flag: &str) -> Result<PathBuf, Failure> {
    let p = path.clone().ok_or_else(|| Failure::usage(format!("--{flag} is required")))?;
    if !p.is_file() {
        return Err(Failure::usage(format!("file not found: {}", p.display())));
    }
    Ok(p)
}

fn optional(path: &Option<PathBuf>) -> Result<Option<PathBuf>, Failure> {
    match path {
        Some(p) if !p.is_file() => Err(Failure::usage(format!("file not found: {}", p.display()))),
        other => Ok(other.clone()),
    }
}

fn limit(ds: Dataset<f64>, n: usize) -> Dataset<f64> {
    if n == 0 {
        ds
    } else {
        ds.take(n)
    }
}

struct Loaded {
    train: Dataset<f64>,
    test: Option<Dataset<f64>>,
    input: InputSpec,
}

fn load_data(a: &DataArgs, seed: u64) -> Result<Loaded, Failure> {
    match a.dataset.as_str() {
        "idx" => {
            let (images, labels) = (require(&a.images, "images")?, require(&a.labels, "labels")?);
            let (ti, tl) = (optional(&a.test_images)?, optional(&a.test_labels)?);
            let load = |i: &Path, l: &Path| -> Result<Dataset<f64>, Failure> {
                let ds = data::load_idx::<f64>(i, l)?;
                if ds.num_classes != a.classes {
                    return Ok(Dataset::new(ds.inputs, ds.labels, a.classes, ds.kind)?);
                }
                Ok(ds)
            };
            let mut train = limit(load(&images, &labels)?, a.train_limit);
            if train.sample_shape() != [1, 28, 28] {
                return Err(Failure::usage(format!("images must be 28×28, got {:?}", train.sample_shape())));
            }
            let mut test = match (ti, tl) {
                (Some(i), Some(l)) => Some(limit(load(&i, &l)?, a.test_limit)),
                (None, None) => None,
                _ => return Err(Failure::usage("--test-images and --test-labels go together")),
            };
            if a.noise > 0.0 {
                train = data::add_gaussian_noise(&train, a.noise, seed)?;
                if let Some(t) = test.take() {
                    test = Some(data::add_gaussian_noise(&t, a.noise, seed.wrapping_add(1))?);
                }
            } else if a.noise < 0.0 {
                return Err(Failure::usage("--noise must be non-negative"));
            }
            Ok(Loaded { train, test, input: InputSpec::Image })
        }
        "csv" => {
            let csv = require(&a.csv, "csv")?;
            let (train, scaler) = data::load_csv_features_scaled::<f64>(&csv, a.classes, None)?;
            let train = limit(train, a.train_limit);
            let test = match optional(&a.test_csv)? {
                Some(p) => Some(limit(data::load_csv_features_scaled::<f64>(&p, a.classes, Some(&scaler))?.0, a.test_limit)),
                None => None,
            };
            let d = train.sample_len();
            Ok(Loaded { train, test, input: InputSpec::Feature(d) })
        }
        other => Err(Failure::usage(format!("unknown dataset format '{other}' (idx|csv)"))),
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Result<(), Failure> {
    let p = dir.join(name);
    fs::write(&p, body).map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))
}

fn out_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::usage(format!("cannot create {}: {e}", dir.display())))
}

pub fn metrics_json(ev: &Evaluation) -> String {
    let m = &ev.metrics;
    format!(
        "{{\n  \"accuracy\": {:.6},\n  \"macro_precision\": {:.6},\n  \"macro_recall\": {:.6},\n  \"macro_f1\": {:.6},\n  \"n_samples\": {}\n}}\n",
        m.accuracy, m.precision, m.recall, m.f1, ev.n_samples
    )
}

fn write_evaluation(dir: &Path, ev: &Evaluation) -> Result<(), Failure> {
    write(dir, "metrics.json", &metrics_json(ev))?;
    write(dir, "confusion.csv", &confusion_csv(&ev.confusion)?)
}

fn confusion_csv(cm: &ConfusionMatrix) -> Result<String, Failure> {
    Ok(cm.to_csv(None)?)
}

fn print_metrics(label: &str, ev: &Evaluation) {
    let m = &ev.metrics;
    println!(
        "{label}: accuracy {:.4}  macro-P {:.4}  macro-R {:.4}  macro-F1 {:.4}  (n = {})",
        m.accuracy, m.precision, m.recall, m.f1, ev.n_samples
    );
}

pub fn cmd_train(a: TrainArgs) -> CmdResult {
    let seed = a.common.seed;
    let kind: ModelKind = a.model.parse()?;
    let loaded = load_data(&a.data, seed)?;
    if loaded.train.is_empty() {
        return Err(Failure::usage("training set is empty"));
    }
    if kind == ModelKind::Cnn && loaded.input != InputSpec::Image || kind == ModelKind::Dnn && loaded.input == InputSpec::Image {
        return Err(Failure::usage(format!("{kind} needs {} input", if kind == ModelKind::Cnn { "image" } else { "feature" })));
    }
    let mut spec = ModelSpec::new(kind, loaded.input, a.data.classes);
    if a.hidden > 0 {
        spec.hidden = a.hidden;
    }
    if a.fuzzy_sets > 0 {
        spec.fuzzy_sets = a.fuzzy_sets;
    }
    spec.qnn_layers = a.layers;
    spec.qnn_qubits = a.qubits;
    spec.dropout_p = a.dropout;
    let cfg = TrainConfig {
        epochs: a.epochs,
        batch: a.batch,
        lr: a.lr,
        decay: a.decay,
        milestone_fraction: a.milestone_fraction,
        seed,
        val_fraction: a.val_fraction,
    };
    cfg.validate()?;
    out_dir(&a.out)?;
    let mut model = Model::<f64>::new(spec.clone(), seed)?;
    println!(
        "training {kind} on {} samples ({} epochs, batch {}, lr {:?})",
        loaded.train.len(),
        cfg.epochs,
        cfg.batch,
        cfg.lr
    );
    let report = train(&mut model, &loaded.train, &cfg)?;
    let mut trace = String::from("epoch,loss,train_acc,val_acc\n");
    for r in &report.trace {
        let _ = writeln!(trace, "{},{:.6},{:.6},{:.6}", r.epoch, r.loss, r.train_acc, r.val_acc);
        println!("epoch {:>3}  loss {:.6}  train_acc {:.4}  val_acc {:.4}", r.epoch, r.loss, r.train_acc, r.val_acc);
    }
    write(&a.out, "trace.csv", &trace)?;
    let (label, ev) = match &loaded.test {
        Some(t) => ("test", evaluate(&model, t)?),
        None => ("validation", evaluate(&model, &report.validation)?),
    };
    print_metrics(label, &ev);
    write_evaluation(&a.out, &ev)?;
    let ckpt = model.to_checkpoint(cfg.epochs, Some(&report.sgd));
    save_checkpoint(&ckpt, &a.out.join("model.ckpt"))?;
    println!("wrote {}", a.out.display());
    Ok(())
}

pub fn cmd_eval(a: EvalArgs) -> CmdResult {
    if !a.checkpoint.is_file() {
        return Err(Failure::usage(format!("checkpoint not found: {}", a.checkpoint.display())));
    }
    let ckpt = load_checkpoint::<f64>(&a.checkpoint)?;
    let model = Model::from_checkpoint(&ckpt)?;
    let loaded = load_data(&a.data, a.common.seed)?;
    if loaded.input != model.spec().input {
        return Err(Failure::usage(format!(
            "checkpoint expects {:?} input, dataset provides {:?}",
            model.spec().input,
            loaded.input
        )));
    }
    if a.data.classes != model.spec().classes {
        return Err(Failure::usage(format!(
            "checkpoint has {} classes, --classes is {}",
            model.spec().classes,
            a.data.classes
        )));
    }
    let (label, ds) = match (&loaded.test, a.subset.as_str()) {
        (Some(t), _) => ("test", t.clone()),
        (None, "all") => ("all", loaded.train.clone()),
        (None, "val") => {
            if loaded.train.len() < 2 {
                return Err(Failure::usage("dataset too small for a validation hold-out"));
            }
            ("validation", holdout_split(&loaded.train, a.val_fraction, a.common.seed).1)
        }
        (None, other) => return Err(Failure::usage(format!("unknown subset '{other}' (all|val)"))),
    };
    if ds.is_empty() {
        return Err(Failure::usage("evaluation dataset is empty"));
    }
    let ev = evaluate(&model, &ds)?;
    out_dir(&a.out)?;
    write_evaluation(&a.out, &ev)?;
    print_metrics(label, &ev);
    Ok(())
}

fn report(r: &CheckResult, tol: f64) -> bool {
    let ok = r.max_rel_err < tol;
    println!(
        "{:<42} checked {:>5}  max rel err {:.3e}  (tol {:.0e})  {}",
        r.name,
        r.checked,
        r.max_rel_err,
        tol,
        if ok { "ok" } else { "FAIL" }
    );
    ok
}

pub fn cmd_gradcheck(a: GradcheckArgs) -> CmdResult {
    if !(a.tolerance > 0.0 && a.e2e_tolerance > 0.0) {
        return Err(Failure::usage("tolerances must be positive"));
    }
    if a.cases == 0 || a.max_layers == 0 {
        return Err(Failure::usage("--cases and --max-layers must be positive"));
    }
    let seed = a.common.seed;
    let mut failures = Vec::new();
    let circ = check_circuits(a.cases, a.max_layers, seed)?;
    if !report(&circ, a.tolerance) {
        failures.push(circ);
    }
    for spec in tiny_specs() {
        let r = check_model(spec, 2, seed, 1)?;
        if !report(&r, a.e2e_tolerance) {
            failures.push(r);
        }
    }
    match failures.into_iter().max_by(|a, b| a.max_rel_err.total_cmp(&b.max_rel_err)) {
        None => Ok(()),
        Some(w) => Err(Failure::check(format!(
            "gradient check failed: {} max rel err {:.3e} at {}",
            w.name, w.max_rel_err, w.worst
        ))),
    }
}

fn parse_gammas(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Failure::usage(format!("bad gamma '{}'", t.trim())))
        })
        .collect()
}

pub fn cmd_noise_sweep(a: NoiseSweepArgs) -> CmdResult {
    let channel: ChannelKind = a.channel.parse()?;
    let placement: Placement = a.placement.parse()?;
    let gammas = parse_gammas(&a.gammas)?;
    let circuit = match a.thetas.as_str() {
        "random" => MembershipCircuit::<f64>::random(a.qubits, a.layers, &mut ChaCha8Rng::seed_from_u64(a.common.seed))?,
        "zero" => MembershipCircuit::<f64>::zeros(a.qubits, a.layers)?,
        other => return Err(Failure::usage(format!("unknown --thetas '{other}' (random|zero)"))),
    };
    let mut cfg = SweepConfig::new(channel, circuit);
    cfg.gammas = gammas;
    cfg.x_samples = a.samples;
    cfg.placement = placement;
    let table = run_sweep(&cfg)?;
    out_dir(&a.out)?;
    write(&a.out, "fidelity_grid.csv", &table.grid_csv())?;
    write(&a.out, "fidelity_summary.csv", &table.summary_csv())?;

    let reference = match channel {
        ChannelKind::AmplitudeDamping => Some(("reference AD", REFERENCE_AD)),
        _ => Some(("reference DP", REFERENCE_DP)),
    }
    .filter(|_| cfg.gammas == DEFAULT_GAMMAS);
    println!(
        "channel {channel}, placement {placement}, {} qubit(s), {} layer(s), {} inputs",
        a.qubits, a.layers, a.samples
    );
    match reference {
        Some((name, vals)) => {
            println!("{:>8}  {:>13}  {:>13}", "gamma", "mean_fidelity", name);
            for ((g, m), r) in cfg.gammas.iter().zip(&table.means).zip(vals) {
                println!("{g:>8.4}  {m:>13.6}  {r:>13.4}");
            }
        }
        None => {
            println!("{:>8}  {:>13}", "gamma", "mean_fidelity");
            for (g, m) in cfg.gammas.iter().zip(&table.means) {
                println!("{g:>8.4}  {m:>13.6}");
            }
        }
    }
    match channel {
        ChannelKind::AmplitudeDamping => println!(
            "note: the reference AD column depends on an undocumented circuit depth and noise placement; it is listed for comparison, not reproduced"
        ),
        _ => println!(
            "note: the reference DP column equals 1 - γ/2, the fidelity of mix_dp ((1-γ)ρ + γI/2) at the end of the circuit; \
             the listed DP Kraus set {{√(1-γ)I, √(γ/3)X, √(γ/3)Y, √(γ/3)Z}} (dp) gives 1 - 2γ/3 there instead"
        ),
    }
    println!("wrote {}", a.out.display());
    Ok(())
}
