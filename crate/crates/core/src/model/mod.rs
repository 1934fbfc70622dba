//! Model assemblies (HQFNN, FDNN, CNN, DNN), training and checkpoints.
//!
//! Hybrid models run a fuzzy branch (membership → product rule → linear
//! `k → h`) beside a neural branch producing `h` features; the two are added
//! and fed to a linear classifier `h → k`. CNN/DNN models drop the fuzzy
//! branch.

mod checkpoint;
pub mod gradcheck;
mod train;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid_arg, Error, Result};
use crate::fuzzy::{rule_forward, FuzzyActivations, GaussianFuzzyLayer, MembershipLayer, QuantumFuzzyLayer};
use crate::nn::{
    init_kaiming_uniform, init_uniform_inverse_sqrt, Conv2d, Dense, Dropout, MaxPool2, Parameterized, RealTensor,
    Relu,
};
use crate::Real;

pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, CHECKPOINT_VERSION};
pub use train::{evaluate, holdout_split, predict_all, train, EpochRecord, Evaluation, TrainConfig, TrainReport};

pub const IMAGE_SIDE: usize = 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    Hqfnn,
    Fdnn,
    Cnn,
    Dnn,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Hqfnn => "hqfnn",
            ModelKind::Fdnn => "fdnn",
            ModelKind::Cnn => "cnn",
            ModelKind::Dnn => "dnn",
        }
    }

    pub fn has_fuzzy_branch(self) -> bool {
        matches!(self, ModelKind::Hqfnn | ModelKind::Fdnn)
    }

    fn code(self) -> u32 {
        self as u32
    }

    fn from_code(c: u32) -> Option<Self> {
        [ModelKind::Hqfnn, ModelKind::Fdnn, ModelKind::Cnn, ModelKind::Dnn].get(c as usize).copied()
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hqfnn" => Ok(ModelKind::Hqfnn),
            "fdnn" => Ok(ModelKind::Fdnn),
            "cnn" => Ok(ModelKind::Cnn),
            "dnn" => Ok(ModelKind::Dnn),
            other => Err(invalid_arg(format!("unknown model kind '{other}' (hqfnn|fdnn|cnn|dnn)"))),
        }
    }
}

/// Images use the CNN branch, feature vectors the DNN branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputSpec {
    /// `1 × 28 × 28`.
    Image,
    Feature(usize),
}

impl InputSpec {
    pub fn flat_len(self) -> usize {
        match self {
            InputSpec::Image => IMAGE_SIDE * IMAGE_SIDE,
            InputSpec::Feature(d) => d,
        }
    }

    pub fn sample_shape(self) -> Vec<usize> {
        match self {
            InputSpec::Image => vec![1, IMAGE_SIDE, IMAGE_SIDE],
            InputSpec::Feature(d) => vec![d],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub input: InputSpec,
    pub classes: usize,
    pub hidden: usize,
    pub fuzzy_sets: usize,
    pub qnn_layers: usize,
    pub qnn_qubits: usize,
    pub dropout_p: f64,
}

impl ModelSpec {
    /// Defaults: hidden 128 (image) or 256 (features), one fuzzy set per
    /// class, two re-uploading layers on one qubit, dropout 0.4.
    pub fn new(kind: ModelKind, input: InputSpec, classes: usize) -> Self {
        Self {
            kind,
            input,
            classes,
            hidden: match input {
                InputSpec::Image => 128,
                InputSpec::Feature(_) => 256,
            },
            fuzzy_sets: classes,
            qnn_layers: 2,
            qnn_qubits: 1,
            dropout_p: 0.4,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(invalid_arg("need at least 2 classes"));
        }
        if self.hidden == 0 {
            return Err(invalid_arg("hidden width must be positive"));
        }
        if let InputSpec::Feature(0) = self.input {
            return Err(invalid_arg("feature dimension must be positive"));
        }
        if !(0.0..1.0).contains(&self.dropout_p) {
            return Err(invalid_arg(format!("dropout {} outside [0, 1)", self.dropout_p)));
        }
        if self.kind.has_fuzzy_branch() {
            if self.fuzzy_sets == 0 {
                return Err(invalid_arg("need at least one fuzzy set"));
            }
            if self.kind == ModelKind::Hqfnn {
                if self.qnn_layers == 0 {
                    return Err(invalid_arg("circuit needs at least one layer"));
                }
                crate::qcore::check_qubits(self.qnn_qubits)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct CnnBranch<T> {
    conv1: Conv2d<T>,
    pool1: MaxPool2,
    relu1: Relu<T>,
    conv2: Conv2d<T>,
    pool2: MaxPool2,
    relu2: Relu<T>,
    fc: Dense<T>,
    relu3: Relu<T>,
}

#[derive(Clone, Debug)]
struct DnnBranch<T> {
    layers: Vec<Dense<T>>,
    relus: Vec<Relu<T>>,
    drops: Vec<Dropout<T>>,
}

#[derive(Clone, Debug)]
enum Neural<T> {
    Cnn(CnnBranch<T>),
    Dnn(DnnBranch<T>),
}

/// The membership layer of a hybrid model.
#[derive(Clone, Debug)]
pub enum FuzzyLayer<T> {
    Quantum(QuantumFuzzyLayer<T>),
    Gaussian(GaussianFuzzyLayer<T>),
}

impl<T: Real> FuzzyLayer<T> {
    fn layer(&self) -> &dyn MembershipLayer<T> {
        match self {
            FuzzyLayer::Quantum(q) => q,
            FuzzyLayer::Gaussian(g) => g,
        }
    }

    fn visit(&mut self, f: &mut dyn FnMut(&str, &mut RealTensor<T>)) {
        match self {
            FuzzyLayer::Quantum(q) => q.visit_params(f),
            FuzzyLayer::Gaussian(g) => g.visit_params(f),
        }
    }

    /// Bring derived state in line with the parameters after an update.
    fn sync(&mut self) {
        match self {
            FuzzyLayer::Quantum(q) => q.refresh(),
            FuzzyLayer::Gaussian(g) => g.project(),
        }
    }
}

#[derive(Clone, Debug)]
struct FuzzyBranch<T> {
    layer: FuzzyLayer<T>,
    fusion: Dense<T>,
    acts: Option<FuzzyActivations<T>>,
}

#[derive(Clone, Debug)]
pub struct Model<T> {
    spec: ModelSpec,
    neural: Neural<T>,
    fuzzy: Option<FuzzyBranch<T>>,
    classifier: Dense<T>,
    rng: ChaCha8Rng,
}

fn dense<T: Real>(i: usize, o: usize, rng: &mut ChaCha8Rng) -> Result<Dense<T>> {
    Ok(Dense::new(i, o, init_uniform_inverse_sqrt(i)?, rng))
}

impl<T: Real> Model<T> {
    /// Fresh model; every initializer draws from one stream seeded by `seed`.
    pub fn new(spec: ModelSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = spec.hidden;
        let neural = match spec.input {
            InputSpec::Image => Neural::Cnn(CnnBranch {
                conv1: Conv2d::new(1, 10, 5, init_kaiming_uniform(25)?, &mut rng),
                pool1: MaxPool2::default(),
                relu1: Relu::default(),
                conv2: Conv2d::new(10, 20, 5, init_kaiming_uniform(250)?, &mut rng),
                pool2: MaxPool2::default(),
                relu2: Relu::default(),
                fc: dense(320, h, &mut rng)?,
                relu3: Relu::default(),
            }),
            InputSpec::Feature(d) => {
                let mut layers = vec![dense(d, h, &mut rng)?];
                for _ in 0..2 {
                    layers.push(dense(h, h, &mut rng)?);
                }
                Neural::Dnn(DnnBranch {
                    relus: vec![Relu::default(); layers.len()],
                    drops: (0..layers.len()).map(|_| Dropout::new(spec.dropout_p)).collect::<Result<_>>()?,
                    layers,
                })
            }
        };
        let d = spec.input.flat_len();
        let fuzzy = match spec.kind {
            ModelKind::Hqfnn => Some(FuzzyLayer::Quantum(QuantumFuzzyLayer::random(
                spec.fuzzy_sets,
                d,
                spec.qnn_qubits,
                spec.qnn_layers,
                &mut rng,
            )?)),
            ModelKind::Fdnn => Some(FuzzyLayer::Gaussian(GaussianFuzzyLayer::random(spec.fuzzy_sets, d, &mut rng)?)),
            _ => None,
        };
        let fuzzy = match fuzzy {
            Some(layer) => Some(FuzzyBranch { layer, fusion: dense(spec.fuzzy_sets, h, &mut rng)?, acts: None }),
            None => None,
        };
        let classifier = dense(h, spec.classes, &mut rng)?;
        Ok(Self { spec, neural, fuzzy, classifier, rng })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn fuzzy_layer(&self) -> Option<&FuzzyLayer<T>> {
        self.fuzzy.as_ref().map(|f| &f.layer)
    }

    /// Every parameter tensor with a dotted path name, in a fixed order.
    pub fn visit_named(&mut self, f: &mut dyn FnMut(&str, &mut RealTensor<T>)) {
        fn with<T>(f: &mut dyn FnMut(&str, &mut RealTensor<T>), prefix: &str, p: &mut dyn Parameterized<T>) {
            p.visit_params(&mut |name, t| f(&format!("{prefix}.{name}"), t));
        }
        match &mut self.neural {
            Neural::Cnn(c) => {
                with(f, "neural.conv1", &mut c.conv1);
                with(f, "neural.conv2", &mut c.conv2);
                with(f, "neural.fc", &mut c.fc);
            }
            Neural::Dnn(d) => {
                for (i, l) in d.layers.iter_mut().enumerate() {
                    with(f, &format!("neural.dense{i}"), l);
                }
            }
        }
        if let Some(fz) = &mut self.fuzzy {
            fz.layer.visit(&mut |name, t| f(&format!("fuzzy.{name}"), t));
            with(f, "fusion", &mut fz.fusion);
        }
        with(f, "classifier", &mut self.classifier);
    }

    pub fn param_count(&mut self) -> usize {
        let mut n = 0;
        self.visit_named(&mut |_, t| n += t.len());
        n
    }

    pub fn zero_grad(&mut self) {
        self.visit_named(&mut |_, t| t.zero_grad());
    }

    /// Call after editing parameters directly.
    pub fn sync_params(&mut self) {
        if let Some(fz) = &mut self.fuzzy {
            fz.layer.sync();
        }
    }

    fn check_input(&self, x: &RealTensor<T>) -> Result<usize> {
        let want = self.spec.input.sample_shape();
        if x.shape().len() != want.len() + 1 || x.shape()[1..] != want[..] || x.shape()[0] == 0 {
            return Err(invalid_arg(format!(
                "model expects batch×{want:?} input, got {:?}",
                x.shape()
            )));
        }
        Ok(x.shape()[0])
    }

    fn flat(&self, x: &RealTensor<T>, b: usize) -> RealTensor<T> {
        RealTensor::new(vec![b, self.spec.input.flat_len()], x.values().to_vec()).expect("sizes agree")
    }

    /// Logits without dropout or caching.
    pub fn infer(&self, x: &RealTensor<T>) -> Result<RealTensor<T>> {
        let b = self.check_input(x)?;
        let mut feat = match &self.neural {
            Neural::Cnn(c) => {
                let y = crate::nn::relu(&c.pool1.infer(&c.conv1.infer(x)?)?);
                let y = crate::nn::relu(&c.pool2.infer(&c.conv2.infer(&y)?)?);
                let y = y.reshape(vec![b, 320])?;
                crate::nn::relu(&c.fc.infer(&y)?)
            }
            Neural::Dnn(d) => {
                let mut y = x.clone();
                for l in &d.layers {
                    y = crate::nn::relu(&l.infer(&y)?);
                }
                y
            }
        };
        if let Some(fz) = &self.fuzzy {
            let acts = rule_forward(fz.layer.layer().membership_forward(&self.flat(x, b))?);
            let fused = fz.fusion.infer(&acts.rule_tensor()?)?;
            add_into(&mut feat, &fused);
        }
        self.classifier.infer(&feat)
    }

    /// Forward pass that caches activations for [`Model::backward`].
    pub fn forward(&mut self, x: &RealTensor<T>, training: bool) -> Result<RealTensor<T>> {
        let b = self.check_input(x)?;
        let flat = self.flat(x, b);
        let rng = &mut self.rng;
        let mut feat = match &mut self.neural {
            Neural::Cnn(c) => {
                let y = c.conv1.forward(x)?;
                let y = c.relu1.forward(&c.pool1.forward(&y)?);
                let y = c.conv2.forward(&y)?;
                let y = c.relu2.forward(&c.pool2.forward(&y)?);
                let y = y.reshape(vec![b, 320])?;
                c.relu3.forward(&c.fc.forward(&y)?)
            }
            Neural::Dnn(d) => {
                let mut y = x.clone();
                for i in 0..d.layers.len() {
                    let z = d.layers[i].forward(&y)?;
                    let z = d.relus[i].forward(&z);
                    y = d.drops[i].forward(&z, training, rng);
                }
                y
            }
        };
        if let Some(fz) = &mut self.fuzzy {
            let acts = rule_forward(fz.layer.layer().membership_forward(&flat)?);
            let fused = fz.fusion.forward(&acts.rule_tensor()?)?;
            fz.acts = Some(acts);
            add_into(&mut feat, &fused);
        }
        self.classifier.forward(&feat)
    }

    /// Accumulate parameter gradients for the cached forward pass.
    pub fn backward(&mut self, grad_logits: &RealTensor<T>) -> Result<()> {
        let g_feat = self.classifier.backward(grad_logits)?;
        if let Some(fz) = &mut self.fuzzy {
            let acts = fz.acts.take().ok_or_else(|| Error::State("model backward without forward".into()))?;
            let g_rule = fz.fusion.backward(&g_feat)?;
            let grads = fz.layer.layer().fuzzy_backward(&acts, &g_rule)?;
            let mut off = 0;
            fz.layer.visit(&mut |_, t| {
                let n = t.len();
                t.accumulate_grad(&grads[off..off + n]).expect("fuzzy gradient layout");
                off += n;
            });
        }
        match &mut self.neural {
            Neural::Cnn(c) => {
                let b = g_feat.rows();
                let g = c.fc.backward(&c.relu3.backward(&g_feat)?)?;
                let g = g.reshape(vec![b, 20, 4, 4])?;
                let g = c.conv2.backward(&c.pool2.backward(&c.relu2.backward(&g)?)?)?;
                c.conv1.backward(&c.pool1.backward(&c.relu1.backward(&g)?)?)?;
            }
            Neural::Dnn(d) => {
                let mut g = g_feat;
                for i in (0..d.layers.len()).rev() {
                    g = d.drops[i].backward(&g)?;
                    g = d.relus[i].backward(&g)?;
                    g = d.layers[i].backward(&g)?;
                }
            }
        }
        Ok(())
    }

    /// Predicted class per row (first maximum wins).
    pub fn predict(&self, x: &RealTensor<T>) -> Result<Vec<usize>> {
        Ok(argmax_rows(&self.infer(x)?))
    }

    pub(crate) fn rng(&self) -> &ChaCha8Rng {
        &self.rng
    }

    pub(crate) fn set_rng(&mut self, rng: ChaCha8Rng) {
        self.rng = rng;
    }
}

fn add_into<T: Real>(acc: &mut RealTensor<T>, other: &RealTensor<T>) {
    for (a, b) in acc.values_mut().iter_mut().zip(other.values()) {
        *a = *a + *b;
    }
}

pub fn argmax_rows<T: Real>(t: &RealTensor<T>) -> Vec<usize> {
    (0..t.rows())
        .map(|r| {
            let row = t.row(r);
            let mut best = 0;
            for (i, v) in row.iter().enumerate() {
                if *v > row[best] {
                    best = i;
                }
            }
            best
        })
        .collect()
}
