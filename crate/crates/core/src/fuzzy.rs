//! Fuzzy membership layers and the product ("AND") rule layer.
//!
//! A membership layer holds `k` fuzzy sets. Set `i` has one membership
//! function, shared by every input node, so `memberships[b, j, i] =
//! f_i(x[b, j])`. The rule layer multiplies memberships over the input-node
//! axis, `rule[b, i] = Π_j memberships[b, j, i]`, computed as a sum of logs
//! with each membership clamped to `[MEMBERSHIP_FLOOR, 1]`.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{invalid_arg, Error, Result};
use crate::nn::{Parameterized, RealTensor};
use crate::qnn::{CompiledQubit, MembershipCircuit};
use crate::Real;

pub const MEMBERSHIP_FLOOR: f64 = 1e-7;

/// Inputs may overshoot `[-1, 1]` by this much.
pub const INPUT_SLACK: f64 = 1e-9;

/// Forward-pass values of a fuzzy block, kept for the backward pass.
#[derive(Clone, Debug, PartialEq)]
pub struct FuzzyActivations<T> {
    pub batch: usize,
    pub input_dim: usize,
    pub num_sets: usize,
    /// `batch × d`.
    pub inputs: Vec<T>,
    /// `batch × d × k`.
    pub memberships: Vec<T>,
    /// `batch × k`, present after [`rule_forward`].
    pub rule_log: Option<Vec<T>>,
    /// `batch × k`, present after [`rule_forward`].
    pub rule: Option<Vec<T>>,
}

impl<T: Real> FuzzyActivations<T> {
    pub fn membership(&self, b: usize, j: usize, i: usize) -> T {
        self.memberships[(b * self.input_dim + j) * self.num_sets + i]
    }

    /// Rule values as a `batch × k` tensor.
    pub fn rule_tensor(&self) -> Result<RealTensor<T>> {
        let rule = self
            .rule
            .as_ref()
            .ok_or_else(|| Error::State("rule layer has not run".into()))?;
        RealTensor::new(vec![self.batch, self.num_sets], rule.clone())
    }
}

/// Product rule over the input-node axis, in the log domain.
pub fn rule_forward<T: Real>(mut acts: FuzzyActivations<T>) -> FuzzyActivations<T> {
    let floor = T::lit(MEMBERSHIP_FLOOR);
    let (d, k) = (acts.input_dim, acts.num_sets);
    let mut logs = vec![T::zero(); acts.batch * k];
    for b in 0..acts.batch {
        for j in 0..d {
            let row = &acts.memberships[(b * d + j) * k..(b * d + j + 1) * k];
            for (i, &m) in row.iter().enumerate() {
                logs[b * k + i] = logs[b * k + i] + m.max(floor).min(T::one()).ln();
            }
        }
    }
    acts.rule = Some(logs.iter().map(|l| l.exp()).collect());
    acts.rule_log = Some(logs);
    acts
}

/// Common surface of the quantum and Gaussian membership layers.
pub trait MembershipLayer<T: Real>: Parameterized<T> + Sync {
    fn num_sets(&self) -> usize;

    fn input_dim(&self) -> usize;

    /// `∂ f_i(x) / ∂ params_i` for one set. Written into `grad` (length
    /// [`Self::params_per_set`]); returns `f_i(x)`.
    fn membership_and_grad(&self, set: usize, x: T, grad: &mut [T]) -> T;

    fn params_per_set(&self) -> usize;

    /// Memberships for a `batch × d` input.
    fn membership_forward(&self, x: &RealTensor<T>) -> Result<FuzzyActivations<T>>;

    /// Gradients of `Σ_{b,i} upstream[b, i] · rule[b, i]` with respect to
    /// every parameter, laid out like the parameter tensors (set-major).
    fn fuzzy_backward(&self, acts: &FuzzyActivations<T>, upstream: &RealTensor<T>) -> Result<Vec<T>> {
        let rule = acts
            .rule
            .as_ref()
            .ok_or_else(|| Error::State("fuzzy backward needs a cached rule forward pass".into()))?;
        let (bsz, d, k) = (acts.batch, acts.input_dim, acts.num_sets);
        if upstream.shape() != [bsz, k] {
            return Err(invalid_arg(format!(
                "upstream shape {:?} does not match batch×sets {bsz}×{k}",
                upstream.shape()
            )));
        }
        let p = self.params_per_set();
        let floor = T::lit(MEMBERSHIP_FLOOR);
        // Per-sample partial sums in parallel, reduced in sample order.
        let partials: Vec<Vec<T>> = (0..bsz)
            .into_par_iter()
            .map(|b| {
                let mut acc = vec![T::zero(); k * p];
                let mut g = vec![T::zero(); p];
                for i in 0..k {
                    let coef = upstream.values()[b * k + i] * rule[b * k + i];
                    if coef == T::zero() {
                        continue;
                    }
                    for j in 0..d {
                        let m = acts.membership(b, j, i);
                        if m < floor || m > T::one() {
                            continue;
                        }
                        self.membership_and_grad(i, acts.inputs[b * d + j], &mut g);
                        let scale = coef / m;
                        for (a, gv) in acc[i * p..(i + 1) * p].iter_mut().zip(&g) {
                            *a = *a + scale * *gv;
                        }
                    }
                }
                acc
            })
            .collect();
        let mut total = vec![T::zero(); k * p];
        for part in partials {
            for (t, v) in total.iter_mut().zip(part) {
                *t = *t + v;
            }
        }
        Ok(total)
    }
}

fn check_inputs<T: Real>(x: &RealTensor<T>, d: usize) -> Result<(usize, usize)> {
    if x.shape().len() != 2 || x.shape()[1] != d {
        return Err(invalid_arg(format!("fuzzy layer expects batch×{d} input, got {:?}", x.shape())));
    }
    let lim = T::one() + T::lit(INPUT_SLACK);
    if let Some(v) = x.values().iter().find(|v| !(v.abs() <= lim)) {
        return Err(Error::InvalidInput(format!("fuzzy input {v} outside [-1, 1]")));
    }
    Ok((x.rows(), d))
}

/// Evaluate `eval(set, x)` for every `(b, j, i)`, parallel over samples.
fn forward_with<T: Real, F>(x: &RealTensor<T>, d: usize, k: usize, eval: F) -> Result<FuzzyActivations<T>>
where
    F: Fn(usize, T) -> T + Sync,
{
    let (batch, d) = check_inputs(x, d)?;
    let rows: Vec<Vec<T>> = (0..batch)
        .into_par_iter()
        .map(|b| {
            let mut out = Vec::with_capacity(d * k);
            for &v in x.row(b) {
                out.extend((0..k).map(|i| eval(i, v)));
            }
            out
        })
        .collect();
    Ok(FuzzyActivations {
        batch,
        input_dim: d,
        num_sets: k,
        inputs: x.values().to_vec(),
        memberships: rows.concat(),
        rule_log: None,
        rule: None,
    })
}

/// Membership functions realized by data re-uploading circuits.
///
/// Angles live in a `k × P` tensor (row `i` = circuit `i`).
#[derive(Clone, Debug)]
pub struct QuantumFuzzyLayer<T> {
    qubits: usize,
    layers: usize,
    input_dim: usize,
    pub angles: RealTensor<T>,
    compiled: Vec<Option<CompiledQubit<T>>>,
}

impl<T: Real> QuantumFuzzyLayer<T> {
    pub fn new(circuits: &[MembershipCircuit<T>], input_dim: usize) -> Result<Self> {
        let first = circuits
            .first()
            .ok_or_else(|| invalid_arg("quantum fuzzy layer needs at least one circuit"))?;
        let (qubits, layers) = (first.qubits(), first.layers());
        if circuits.iter().any(|c| c.qubits() != qubits || c.layers() != layers) {
            return Err(invalid_arg("all membership circuits must share qubit and layer counts"));
        }
        if input_dim == 0 {
            return Err(invalid_arg("input dimension must be positive"));
        }
        let values: Vec<T> = circuits.iter().flat_map(|c| c.thetas().to_vec()).collect();
        let p = first.thetas().len();
        let mut layer = Self {
            qubits,
            layers,
            input_dim,
            angles: RealTensor::new(vec![circuits.len(), p], values)?,
            compiled: Vec::new(),
        };
        layer.refresh();
        Ok(layer)
    }

    /// `k` circuits with angles uniform in `[-π, π)`.
    pub fn random<R: Rng + ?Sized>(
        num_sets: usize,
        input_dim: usize,
        qubits: usize,
        layers: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let circuits = (0..num_sets)
            .map(|_| MembershipCircuit::random(qubits, layers, rng))
            .collect::<Result<Vec<_>>>()?;
        Self::new(&circuits, input_dim)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn circuit(&self, i: usize) -> MembershipCircuit<T> {
        MembershipCircuit::new(self.qubits, self.layers, self.angles.row(i).to_vec())
            .expect("angles validated on construction")
    }

    pub fn circuits(&self) -> Vec<MembershipCircuit<T>> {
        (0..self.num_sets()).map(|i| self.circuit(i)).collect()
    }

    /// Recompile after the angles changed.
    pub fn refresh(&mut self) {
        self.compiled = (0..self.num_sets()).map(|i| self.circuit(i).compile()).collect();
    }

    fn eval_set(&self, i: usize, x: T) -> T {
        match &self.compiled[i] {
            Some(c) => c.eval(x),
            None => self.circuit(i).eval(x).expect("finite input"),
        }
    }
}

impl<T: Real> Parameterized<T> for QuantumFuzzyLayer<T> {
    fn visit_params(&mut self, f: &mut dyn FnMut(&str, &mut RealTensor<T>)) {
        f("angles", &mut self.angles);
    }
}

impl<T: Real> MembershipLayer<T> for QuantumFuzzyLayer<T> {
    fn num_sets(&self) -> usize {
        self.angles.rows()
    }

    fn input_dim(&self) -> usize {
        self.input_dim
    }

    fn params_per_set(&self) -> usize {
        self.angles.row_len()
    }

    fn membership_and_grad(&self, set: usize, x: T, grad: &mut [T]) -> T {
        match &self.compiled[set] {
            Some(c) => c.eval_with_grad(x, grad),
            None => {
                let circ = self.circuit(set);
                grad.copy_from_slice(&circ.param_shift_grad(x).expect("finite input"));
                circ.eval(x).expect("finite input")
            }
        }
    }

    fn membership_forward(&self, x: &RealTensor<T>) -> Result<FuzzyActivations<T>> {
        forward_with(x, self.input_dim, self.num_sets(), |i, v| self.eval_set(i, v))
    }
}

/// Gaussian bells `exp(−(x−μ)² / (2σ²))`, the classical baseline.
#[derive(Clone, Debug)]
pub struct GaussianFuzzyLayer<T> {
    input_dim: usize,
    pub means: RealTensor<T>,
    pub sigmas: RealTensor<T>,
}

/// Smallest width a Gaussian set may be pushed to by the optimizer.
pub const MIN_SIGMA: f64 = 1e-3;

impl<T: Real> GaussianFuzzyLayer<T> {
    pub fn new(means: Vec<T>, sigmas: Vec<T>, input_dim: usize) -> Result<Self> {
        if means.is_empty() || means.len() != sigmas.len() {
            return Err(invalid_arg("need one mean and one sigma per fuzzy set"));
        }
        if sigmas.iter().any(|s| !(*s > T::zero())) {
            return Err(invalid_arg("Gaussian widths must be positive"));
        }
        if input_dim == 0 {
            return Err(invalid_arg("input dimension must be positive"));
        }
        let k = means.len();
        Ok(Self {
            input_dim,
            means: RealTensor::new(vec![k], means)?,
            sigmas: RealTensor::new(vec![k], sigmas)?,
        })
    }

    /// Means uniform in `[-1, 1]`, unit widths.
    pub fn random<R: Rng + ?Sized>(num_sets: usize, input_dim: usize, rng: &mut R) -> Result<Self> {
        let means = (0..num_sets).map(|_| T::lit(rng.gen_range(-1.0..=1.0))).collect();
        Self::new(means, vec![T::one(); num_sets], input_dim)
    }

    /// Keep widths positive after an optimizer step.
    pub fn project(&mut self) {
        let lo = T::lit(MIN_SIGMA);
        for s in self.sigmas.values_mut() {
            *s = s.max(lo);
        }
    }

    fn bell(&self, i: usize, x: T) -> T {
        let (mu, s) = (self.means.values()[i], self.sigmas.values()[i]);
        let z = x - mu;
        (-(z * z) / (T::two() * s * s)).exp()
    }
}

impl<T: Real> Parameterized<T> for GaussianFuzzyLayer<T> {
    fn visit_params(&mut self, f: &mut dyn FnMut(&str, &mut RealTensor<T>)) {
        f("means", &mut self.means);
        f("sigmas", &mut self.sigmas);
    }
}

impl<T: Real> MembershipLayer<T> for GaussianFuzzyLayer<T> {
    fn num_sets(&self) -> usize {
        self.means.len()
    }

    fn input_dim(&self) -> usize {
        self.input_dim
    }

    /// Per set: `[∂/∂μ, ∂/∂σ]`.
    fn params_per_set(&self) -> usize {
        2
    }

    fn membership_and_grad(&self, set: usize, x: T, grad: &mut [T]) -> T {
        let (mu, s) = (self.means.values()[set], self.sigmas.values()[set]);
        let m = self.bell(set, x);
        let z = x - mu;
        grad[0] = m * z / (s * s);
        grad[1] = m * z * z / (s * s * s);
        m
    }

    fn membership_forward(&self, x: &RealTensor<T>) -> Result<FuzzyActivations<T>> {
        forward_with(x, self.input_dim, self.num_sets(), |i, v| self.bell(i, v))
    }

    fn fuzzy_backward(&self, acts: &FuzzyActivations<T>, upstream: &RealTensor<T>) -> Result<Vec<T>> {
        // Same chain rule as the default, regrouped into mean and sigma tensors.
        let rule = acts
            .rule
            .as_ref()
            .ok_or_else(|| Error::State("fuzzy backward needs a cached rule forward pass".into()))?;
        let (bsz, d, k) = (acts.batch, acts.input_dim, acts.num_sets);
        if upstream.shape() != [bsz, k] {
            return Err(invalid_arg("upstream shape does not match batch×sets"));
        }
        let floor = T::lit(MEMBERSHIP_FLOOR);
        let mut gmu = vec![T::zero(); k];
        let mut gsig = vec![T::zero(); k];
        let mut g = [T::zero(); 2];
        for b in 0..bsz {
            for i in 0..k {
                let coef = upstream.values()[b * k + i] * rule[b * k + i];
                if coef == T::zero() {
                    continue;
                }
                for j in 0..d {
                    let m = acts.membership(b, j, i);
                    if m < floor {
                        continue;
                    }
                    self.membership_and_grad(i, acts.inputs[b * d + j], &mut g);
                    gmu[i] = gmu[i] + coef / m * g[0];
                    gsig[i] = gsig[i] + coef / m * g[1];
                }
            }
        }
        gmu.extend(gsig);
        Ok(gmu)
    }
}
