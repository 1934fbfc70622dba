//! Stateful wrappers around the kernels in `ops`, caching what backward needs.

use rand::Rng;

use super::ops::{self, DropoutSpec, PoolIndices};
use super::{Parameterized, RealTensor, UniformInit};
use crate::error::{Error, Result};
use crate::Real;

fn no_cache(layer: &str) -> Error {
    Error::State(format!("{layer} backward called without a cached forward pass"))
}

#[derive(Clone, Debug)]
pub struct Dense<T> {
    pub weight: RealTensor<T>,
    pub bias: RealTensor<T>,
    input: Option<RealTensor<T>>,
}

impl<T: Real> Dense<T> {
    pub fn new<R: Rng + ?Sized>(inputs: usize, outputs: usize, init: UniformInit, rng: &mut R) -> Self {
        let w = init.sample(rng, inputs * outputs);
        Self {
            weight: RealTensor::new(vec![outputs, inputs], w).expect("shape"),
            bias: RealTensor::zeros(vec![outputs]),
            input: None,
        }
    }

    pub fn inputs(&self) -> usize {
        self.weight.shape()[1]
    }

    pub fn outputs(&self) -> usize {
        self.weight.shape()[0]
    }

    pub fn infer(&self, x: &RealTensor<T>) -> Result<RealTensor<T>> {
        ops::dense_forward(&self.weight, &self.bias, x)
    }

    pub fn forward(&mut self, x: &RealTensor<T>) -> Result<RealTensor<T>> {
        let y = self.infer(x)?;
        self.input = Some(x.clone());
        Ok(y)
    }

    pub fn backward(&mut self, grad_out: &RealTensor<T>) -> Result<RealTensor<T>> {
        let x = self.input.take().ok_or_else(|| no_cache("dense"))?;
        let (gw, gb, gx) = ops::dense_backward(&self.weight, &x, grad_out)?;
        self.weight.accumulate_grad(&gw)?;
        self.bias.accumulate_grad(&gb)?;
        Ok(gx)
    }
}

impl<T: Real> Parameterized<T> for Dense<T> {
    fn visit_params(&mut self, f: &mut dyn FnMut(&str, &mut RealTensor<T>)) {
        f("weight", &mut self.weight);
        f("bias", &mut self.bias);
    }
}

#[derive(Clone, Debug)]
pub struct Conv2d<T> {
    pub kernels: RealTensor<T>,
    pub bias: RealTensor<T>,
    input: Option<RealTensor<T>>,
}

impl<T: Real> Conv2d<T> {
    pub fn new<R: Rng + ?Sized>(
        in_channels: usize,
        out_channels: usize,
        size: usize,
        init: UniformInit,
        rng: &mut R,
    ) -> Self {
        let k = init.sample(rng, out_channels * in_channels * size * size);
        Self {
            kernels: RealTensor::new(vec![out_channels, in_channels, size, size], k).expect("shape"),
            bias: RealTensor::zeros(vec![out_channels]),
            input: None,
        }
    }

    pub fn infer(&self, x: &RealTensor<T>) -> Result<RealTensor<T>> {
        ops::conv2d_forward(&self.kernels, Some(&self.bias), x)
    }

    pub fn forward(&mut self, x: &RealTensor<T>) -> Result<RealTensor<T>> {
        let y = self.infer(x)?;
        self.input = Some(x.clone());
        Ok(y)
    }

    pub fn backward(&mut self, grad_out: &RealTensor<T>) -> Result<RealTensor<T>> {
        let x = self.input.take().ok_or_else(|| no_cache("conv2d"))?;
        let (gk, gb, gx) = ops::conv2d_backward(&self.kernels, &x, grad_out)?;
        self.kernels.accumulate_grad(&gk)?;
        self.bias.accumulate_grad(&gb)?;
        Ok(gx)
    }
}

impl<T: Real> Parameterized<T> for Conv2d<T> {
    fn visit_params(&mut self, f: &mut dyn FnMut(&str, &mut RealTensor<T>)) {
        f("kernels", &mut self.kernels);
        f("bias", &mut self.bias);
    }
}

#[derive(Clone, Debug, Default)]
pub struct MaxPool2 {
    indices: Option<PoolIndices>,
}

impl MaxPool2 {
    pub fn infer<T: Real>(&self, x: &RealTensor<T>) -> Result<RealTensor<T>> {
        Ok(ops::maxpool2(x)?.0)
    }

    pub fn forward<T: Real>(&mut self, x: &RealTensor<T>) -> Result<RealTensor<T>> {
        let (y, idx) = ops::maxpool2(x)?;
        self.indices = Some(idx);
        Ok(y)
    }

    pub fn backward<T: Real>(&mut self, grad_out: &RealTensor<T>) -> Result<RealTensor<T>> {
        let idx = self.indices.take().ok_or_else(|| no_cache("maxpool"))?;
        ops::maxpool2_backward(&idx, grad_out)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Relu<T> {
    input: Option<RealTensor<T>>,
}

impl<T: Real> Relu<T> {
    pub fn forward(&mut self, x: &RealTensor<T>) -> RealTensor<T> {
        self.input = Some(x.clone());
        ops::relu(x)
    }

    pub fn backward(&mut self, grad_out: &RealTensor<T>) -> Result<RealTensor<T>> {
        let x = self.input.take().ok_or_else(|| no_cache("relu"))?;
        ops::relu_backward(&x, grad_out)
    }
}

#[derive(Clone, Debug)]
pub struct Dropout<T> {
    pub p: f64,
    mask: Option<Option<Vec<T>>>,
}

impl<T: Real> Dropout<T> {
    pub fn new(p: f64) -> Result<Self> {
        DropoutSpec::new(p, true)?;
        Ok(Self { p, mask: None })
    }

    pub fn forward<R: Rng + ?Sized>(&mut self, x: &RealTensor<T>, training: bool, rng: &mut R) -> RealTensor<T> {
        let (y, mask) = ops::dropout(x, DropoutSpec { p: self.p, training }, rng);
        self.mask = Some(mask);
        y
    }

    pub fn backward(&mut self, grad_out: &RealTensor<T>) -> Result<RealTensor<T>> {
        match self.mask.take().ok_or_else(|| no_cache("dropout"))? {
            None => Ok(grad_out.clone()),
            Some(m) => {
                let v = grad_out.values().iter().zip(&m).map(|(g, k)| *g * *k).collect();
                RealTensor::new(grad_out.shape().to_vec(), v)
            }
        }
    }
}
