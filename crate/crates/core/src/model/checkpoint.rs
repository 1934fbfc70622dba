//! Binary checkpoints.
//!
//! Layout (little-endian): `"HQFN"`, `u32` version, `u32` record count, then
//! per record: `u32` name length, UTF-8 name, `u32` rank, `u64` dims, `f64`
//! values. Metadata travels as `meta.*` records; the dropout RNG state is
//! stored bit-for-bit inside `f64` slots.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{InputSpec, Model, ModelKind, ModelSpec};
use crate::error::{io_err, Error, Result};
use crate::nn::{RealTensor, SgdState};
use crate::Real;

pub const CHECKPOINT_MAGIC: &[u8; 4] = b"HQFN";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint<T> {
    pub spec: ModelSpec,
    pub params: Vec<(String, RealTensor<T>)>,
    pub epoch: usize,
    pub rng_state: [u64; 7],
    pub sgd: Option<SgdState>,
}

fn rng_words(rng: &ChaCha8Rng) -> [u64; 7] {
    let seed = rng.get_seed();
    let mut w = [0u64; 7];
    for (i, c) in seed.chunks(8).enumerate() {
        w[i] = u64::from_le_bytes(c.try_into().expect("8-byte chunk"));
    }
    w[4] = rng.get_stream();
    let pos = rng.get_word_pos();
    w[5] = pos as u64;
    w[6] = (pos >> 64) as u64;
    w
}

fn rng_from_words(w: &[u64; 7]) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    for i in 0..4 {
        seed[i * 8..(i + 1) * 8].copy_from_slice(&w[i].to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(w[4]);
    rng.set_word_pos(w[5] as u128 | ((w[6] as u128) << 64));
    rng
}

impl<T: Real> Model<T> {
    pub fn to_checkpoint(&self, epoch: usize, sgd: Option<&SgdState>) -> Checkpoint<T> {
        let mut params = Vec::new();
        self.clone().visit_named(&mut |name, t| {
            let mut t = t.clone();
            t.zero_grad();
            params.push((name.to_string(), RealTensor::new(t.shape().to_vec(), t.into_values()).expect("shape")));
        });
        Checkpoint { spec: self.spec.clone(), params, epoch, rng_state: rng_words(self.rng()), sgd: sgd.cloned() }
    }

    pub fn from_checkpoint(ckpt: &Checkpoint<T>) -> Result<Self> {
        let mut model = Model::new(ckpt.spec.clone(), 0)?;
        let mut seen = 0usize;
        let mut err = None;
        model.visit_named(&mut |name, t| match ckpt.params.iter().find(|(n, _)| n == name) {
            Some((_, src)) if src.shape() == t.shape() => {
                t.values_mut().copy_from_slice(src.values());
                seen += 1;
            }
            Some((_, src)) => {
                err.get_or_insert(Error::Consistency(format!(
                    "tensor {name}: checkpoint shape {:?}, model shape {:?}",
                    src.shape(),
                    t.shape()
                )));
            }
            None => {
                err.get_or_insert(Error::Consistency(format!("checkpoint lacks tensor {name}")));
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        if seen != ckpt.params.len() {
            return Err(Error::Consistency("checkpoint holds tensors the model does not have".into()));
        }
        model.sync_params();
        model.set_rng(rng_from_words(&ckpt.rng_state));
        Ok(model)
    }
}

fn spec_record(s: &ModelSpec) -> Vec<f64> {
    let (ik, d) = match s.input {
        InputSpec::Image => (0.0, 0.0),
        InputSpec::Feature(d) => (1.0, d as f64),
    };
    vec![
        s.kind.code() as f64,
        ik,
        d,
        s.classes as f64,
        s.hidden as f64,
        s.fuzzy_sets as f64,
        s.qnn_layers as f64,
        s.qnn_qubits as f64,
        s.dropout_p,
    ]
}

fn spec_from_record(v: &[f64]) -> Option<ModelSpec> {
    if v.len() != 9 || v[..8].iter().any(|x| *x < 0.0 || x.fract() != 0.0) {
        return None;
    }
    let u = |i: usize| v[i] as usize;
    Some(ModelSpec {
        kind: ModelKind::from_code(v[0] as u32)?,
        input: match u(1) {
            0 => InputSpec::Image,
            1 => InputSpec::Feature(u(2)),
            _ => return None,
        },
        classes: u(3),
        hidden: u(4),
        fuzzy_sets: u(5),
        qnn_layers: u(6),
        qnn_qubits: u(7),
        dropout_p: v[8],
    })
}

fn push_record(out: &mut Vec<u8>, name: &str, shape: &[usize], values: impl Iterator<Item = f64>) {
    out.extend_from_slice(&(name.len() as u32).to_le_bytes());
    out.extend_from_slice(name.as_bytes());
    out.extend_from_slice(&(shape.len() as u32).to_le_bytes());
    for &d in shape {
        out.extend_from_slice(&(d as u64).to_le_bytes());
    }
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

impl<T: Real> Checkpoint<T> {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut body = Vec::new();
        let mut count = 0u32;
        let mut rec = |name: &str, shape: &[usize], vals: Vec<f64>| {
            push_record(&mut body, name, shape, vals.into_iter());
            count += 1;
        };
        let spec = spec_record(&self.spec);
        rec("meta.spec", &[spec.len()], spec);
        rec("meta.epoch", &[1], vec![self.epoch as f64]);
        rec("meta.rng", &[7], self.rng_state.iter().map(|w| f64::from_bits(*w)).collect());
        if let Some(s) = &self.sgd {
            let mut v = vec![s.initial_lr, s.decay_factor, s.lr, s.decays_applied() as f64];
            v.extend(s.milestones.iter().map(|&m| m as f64));
            rec("meta.sgd", &[v.len()], v);
        }
        for (name, t) in &self.params {
            rec(name, t.shape(), t.values().iter().map(|v| v.as_f64()).collect());
        }
        let mut out = Vec::with_capacity(12 + body.len());
        out.extend_from_slice(CHECKPOINT_MAGIC);
        out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        out.extend_from_slice(&count.to_le_bytes());
        out.extend_from_slice(&body);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != CHECKPOINT_MAGIC {
            return Err(Error::Parse { offset: 0, reason: "missing HQFN magic".into() });
        }
        let version = r.u32()?;
        if version != CHECKPOINT_VERSION {
            return Err(Error::UnsupportedVersion { found: version, expected: CHECKPOINT_VERSION });
        }
        let count = r.u32()?;
        let mut spec = None;
        let mut epoch = None;
        let mut rng_state = None;
        let mut sgd = None;
        let mut params = Vec::new();
        for _ in 0..count {
            let start = r.pos;
            let (name, shape, vals) = r.record()?;
            let bad = |what: &str| Error::Parse { offset: start, reason: format!("malformed {what} record") };
            match name.as_str() {
                "meta.spec" => spec = Some(spec_from_record(&vals).ok_or_else(|| bad("spec"))?),
                "meta.epoch" => epoch = Some(*vals.first().ok_or_else(|| bad("epoch"))? as usize),
                "meta.rng" => {
                    let w: [u64; 7] = vals.iter().map(|v| v.to_bits()).collect::<Vec<_>>().try_into().map_err(|_| bad("rng"))?;
                    rng_state = Some(w);
                }
                "meta.sgd" => {
                    if vals.len() < 4 {
                        return Err(bad("optimizer"));
                    }
                    let ms = vals[4..].iter().map(|&m| m as usize).collect();
                    sgd = Some(SgdState::restore(vals[0], vals[1], ms, vals[2], vals[3] as usize).map_err(|_| bad("optimizer"))?);
                }
                _ => {
                    let t = RealTensor::new(shape, vals.into_iter().map(T::lit).collect()).map_err(|_| bad("tensor"))?;
                    params.push((name, t));
                }
            }
        }
        if r.pos != bytes.len() {
            return Err(Error::Parse { offset: r.pos, reason: "trailing bytes after last record".into() });
        }
        let missing = |what: &str| Error::Parse { offset: bytes.len(), reason: format!("no {what} record") };
        Ok(Checkpoint {
            spec: spec.ok_or_else(|| missing("meta.spec"))?,
            params,
            epoch: epoch.ok_or_else(|| missing("meta.epoch"))?,
            rng_state: rng_state.ok_or_else(|| missing("meta.rng"))?,
            sgd,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or_else(|| Error::Parse {
            offset: self.pos,
            reason: format!("truncated: wanted {n} bytes, {} left", self.bytes.len() - self.pos),
        })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn record(&mut self) -> Result<(String, Vec<usize>, Vec<f64>)> {
        let at = self.pos;
        let len = self.u32()? as usize;
        let name = std::str::from_utf8(self.take(len)?)
            .map_err(|_| Error::Parse { offset: at + 4, reason: "record name is not UTF-8".into() })?
            .to_string();
        let rank = self.u32()? as usize;
        let mut shape = Vec::with_capacity(rank.min(8));
        let mut n: usize = 1;
        for _ in 0..rank {
            let d = self.u64()? as usize;
            n = n.checked_mul(d).ok_or_else(|| Error::Parse { offset: self.pos, reason: "shape overflows".into() })?;
            shape.push(d);
        }
        let raw = self.take(n.checked_mul(8).ok_or_else(|| Error::Parse { offset: self.pos, reason: "shape overflows".into() })?)?;
        let vals = raw.chunks(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Ok((name, shape, vals))
    }
}

pub fn save_checkpoint<T: Real>(ckpt: &Checkpoint<T>, path: &Path) -> Result<()> {
    std::fs::write(path, ckpt.to_bytes()).map_err(|e| io_err(path, e))
}

pub fn load_checkpoint<T: Real>(path: &Path) -> Result<Checkpoint<T>> {
    Checkpoint::from_bytes(&std::fs::read(path).map_err(|e| io_err(path, e))?)
}
