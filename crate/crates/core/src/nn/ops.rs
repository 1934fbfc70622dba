use rand::Rng;

use super::RealTensor;
use crate::error::{invalid_arg, Result};
use crate::Real;

/// `y = x Wᵀ + b` for `w: out×in`, `b: out`, `x: batch×in`.
pub fn dense_forward<T: Real>(
    w: &RealTensor<T>,
    b: &RealTensor<T>,
    x: &RealTensor<T>,
) -> Result<RealTensor<T>> {
    let (out, inp) = dense_dims(w, b)?;
    if x.shape().len() != 2 || x.shape()[1] != inp {
        return Err(invalid_arg(format!(
            "dense input shape {:?} does not match weight {:?}",
            x.shape(),
            w.shape()
        )));
    }
    let batch = x.rows();
    let (wv, bv, xv) = (w.values(), b.values(), x.values());
    let mut y = Vec::with_capacity(batch * out);
    for r in 0..batch {
        let xr = &xv[r * inp..(r + 1) * inp];
        for o in 0..out {
            let wr = &wv[o * inp..(o + 1) * inp];
            let dot = wr.iter().zip(xr).fold(T::zero(), |acc, (a, b)| acc + *a * *b);
            y.push(dot + bv[o]);
        }
    }
    RealTensor::new(vec![batch, out], y)
}

fn dense_dims<T: Real>(w: &RealTensor<T>, b: &RealTensor<T>) -> Result<(usize, usize)> {
    if w.shape().len() != 2 {
        return Err(invalid_arg(format!("dense weight must be 2-D, got {:?}", w.shape())));
    }
    let (out, inp) = (w.shape()[0], w.shape()[1]);
    if b.shape() != [out] {
        return Err(invalid_arg(format!("bias shape {:?} does not match {out} outputs", b.shape())));
    }
    Ok((out, inp))
}

/// Gradients of [`dense_forward`]: `(∂W, ∂b, ∂x)`.
pub fn dense_backward<T: Real>(
    w: &RealTensor<T>,
    x: &RealTensor<T>,
    grad_out: &RealTensor<T>,
) -> Result<(Vec<T>, Vec<T>, RealTensor<T>)> {
    let (out, inp) = (w.shape()[0], w.shape()[1]);
    let batch = x.rows();
    if grad_out.shape() != [batch, out] || x.row_len() != inp {
        return Err(invalid_arg("dense backward shape mismatch"));
    }
    let (wv, xv, gv) = (w.values(), x.values(), grad_out.values());
    let mut gw = vec![T::zero(); out * inp];
    let mut gb = vec![T::zero(); out];
    let mut gx = vec![T::zero(); batch * inp];
    for r in 0..batch {
        let xr = &xv[r * inp..(r + 1) * inp];
        let gxr = &mut gx[r * inp..(r + 1) * inp];
        for o in 0..out {
            let g = gv[r * out + o];
            if g == T::zero() {
                continue;
            }
            gb[o] = gb[o] + g;
            let wr = &wv[o * inp..(o + 1) * inp];
            let gwr = &mut gw[o * inp..(o + 1) * inp];
            for i in 0..inp {
                gwr[i] = gwr[i] + g * xr[i];
                gxr[i] = gxr[i] + g * wr[i];
            }
        }
    }
    Ok((gw, gb, RealTensor::new(vec![batch, inp], gx)?))
}

pub fn relu<T: Real>(x: &RealTensor<T>) -> RealTensor<T> {
    x.map(|v| if v > T::zero() { v } else { T::zero() })
}

/// Passes `upstream` where the forward input was positive.
pub fn relu_backward<T: Real>(x: &RealTensor<T>, upstream: &RealTensor<T>) -> Result<RealTensor<T>> {
    if x.shape() != upstream.shape() {
        return Err(invalid_arg("relu backward shape mismatch"));
    }
    let v = x
        .values()
        .iter()
        .zip(upstream.values())
        .map(|(&a, &g)| if a > T::zero() { g } else { T::zero() })
        .collect();
    RealTensor::new(x.shape().to_vec(), v)
}

fn conv_dims<T: Real>(k: &RealTensor<T>, x: &RealTensor<T>) -> Result<[usize; 8]> {
    if k.shape().len() != 4 || x.shape().len() != 4 {
        return Err(invalid_arg("convolution expects 4-D kernels and inputs"));
    }
    let [oc, ic, kh, kw] = [k.shape()[0], k.shape()[1], k.shape()[2], k.shape()[3]];
    let [b, xc, h, w] = [x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]];
    if xc != ic {
        return Err(invalid_arg(format!("input has {xc} channels, kernel expects {ic}")));
    }
    if h < kh || w < kw {
        return Err(invalid_arg(format!("input {h}×{w} smaller than kernel {kh}×{kw}")));
    }
    Ok([b, oc, ic, kh, kw, h, w, 0])
}

/// Valid cross-correlation, stride 1, no padding.
/// `kernels: outC×inC×kh×kw`, `x: batch×inC×H×W` → `batch×outC×(H−kh+1)×(W−kw+1)`.
pub fn conv2d_forward<T: Real>(
    kernels: &RealTensor<T>,
    bias: Option<&RealTensor<T>>,
    x: &RealTensor<T>,
) -> Result<RealTensor<T>> {
    let [b, oc, ic, kh, kw, h, w, _] = conv_dims(kernels, x)?;
    if let Some(bs) = bias {
        if bs.shape() != [oc] {
            return Err(invalid_arg("convolution bias must have one entry per output channel"));
        }
    }
    let (oh, ow) = (h - kh + 1, w - kw + 1);
    let (kv, xv) = (kernels.values(), x.values());
    let mut out = vec![T::zero(); b * oc * oh * ow];
    for n in 0..b {
        for o in 0..oc {
            let plane = &mut out[(n * oc + o) * oh * ow..(n * oc + o + 1) * oh * ow];
            if let Some(bs) = bias {
                plane.iter_mut().for_each(|v| *v = bs.values()[o]);
            }
            for c in 0..ic {
                let src = &xv[(n * ic + c) * h * w..(n * ic + c + 1) * h * w];
                for ky in 0..kh {
                    for kx in 0..kw {
                        let kval = kv[((o * ic + c) * kh + ky) * kw + kx];
                        for y in 0..oh {
                            let srow = &src[(y + ky) * w + kx..(y + ky) * w + kx + ow];
                            let drow = &mut plane[y * ow..(y + 1) * ow];
                            for (d, s) in drow.iter_mut().zip(srow) {
                                *d = *d + kval * *s;
                            }
                        }
                    }
                }
            }
        }
    }
    RealTensor::new(vec![b, oc, oh, ow], out)
}

/// Gradients of [`conv2d_forward`]: `(∂kernels, ∂bias, ∂x)`.
pub fn conv2d_backward<T: Real>(
    kernels: &RealTensor<T>,
    x: &RealTensor<T>,
    grad_out: &RealTensor<T>,
) -> Result<(Vec<T>, Vec<T>, RealTensor<T>)> {
    let [b, oc, ic, kh, kw, h, w, _] = conv_dims(kernels, x)?;
    let (oh, ow) = (h - kh + 1, w - kw + 1);
    if grad_out.shape() != [b, oc, oh, ow] {
        return Err(invalid_arg("convolution backward shape mismatch"));
    }
    let (kv, xv, gv) = (kernels.values(), x.values(), grad_out.values());
    let mut gk = vec![T::zero(); kv.len()];
    let mut gb = vec![T::zero(); oc];
    let mut gx = vec![T::zero(); xv.len()];
    for n in 0..b {
        for o in 0..oc {
            let gplane = &gv[(n * oc + o) * oh * ow..(n * oc + o + 1) * oh * ow];
            gb[o] = gb[o] + gplane.iter().copied().sum::<T>();
            for c in 0..ic {
                let base = (n * ic + c) * h * w;
                for ky in 0..kh {
                    for kx in 0..kw {
                        let ki = ((o * ic + c) * kh + ky) * kw + kx;
                        let kval = kv[ki];
                        let mut acc = T::zero();
                        for y in 0..oh {
                            let off = base + (y + ky) * w + kx;
                            let grow = &gplane[y * ow..(y + 1) * ow];
                            let srow = &xv[off..off + ow];
                            acc = acc + grow.iter().zip(srow).fold(T::zero(), |a, (g, s)| a + *g * *s);
                            let drow = &mut gx[off..off + ow];
                            for (d, g) in drow.iter_mut().zip(grow) {
                                *d = *d + kval * *g;
                            }
                        }
                        gk[ki] = gk[ki] + acc;
                    }
                }
            }
        }
    }
    Ok((gk, gb, RealTensor::new(x.shape().to_vec(), gx)?))
}

/// Flat index into the pooled input of every output cell's maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct PoolIndices {
    input_shape: Vec<usize>,
    argmax: Vec<usize>,
}

/// 2×2 max pooling with stride 2. Ties go to the first cell in row-major order.
pub fn maxpool2<T: Real>(x: &RealTensor<T>) -> Result<(RealTensor<T>, PoolIndices)> {
    if x.shape().len() != 4 {
        return Err(invalid_arg("max pooling expects batch×C×H×W"));
    }
    let [b, c, h, w] = [x.shape()[0], x.shape()[1], x.shape()[2], x.shape()[3]];
    if h % 2 != 0 || w % 2 != 0 {
        return Err(invalid_arg(format!("max pooling needs even H and W, got {h}×{w}")));
    }
    let (oh, ow) = (h / 2, w / 2);
    let xv = x.values();
    let mut out = Vec::with_capacity(b * c * oh * ow);
    let mut arg = Vec::with_capacity(b * c * oh * ow);
    for plane in 0..b * c {
        let base = plane * h * w;
        for y in 0..oh {
            for xx in 0..ow {
                let cells = [
                    base + 2 * y * w + 2 * xx,
                    base + 2 * y * w + 2 * xx + 1,
                    base + (2 * y + 1) * w + 2 * xx,
                    base + (2 * y + 1) * w + 2 * xx + 1,
                ];
                let mut best = cells[0];
                for &i in &cells[1..] {
                    if xv[i] > xv[best] {
                        best = i;
                    }
                }
                out.push(xv[best]);
                arg.push(best);
            }
        }
    }
    Ok((
        RealTensor::new(vec![b, c, oh, ow], out)?,
        PoolIndices { input_shape: x.shape().to_vec(), argmax: arg },
    ))
}

/// Routes each upstream value to the cell that won the forward max.
pub fn maxpool2_backward<T: Real>(idx: &PoolIndices, upstream: &RealTensor<T>) -> Result<RealTensor<T>> {
    if upstream.len() != idx.argmax.len() {
        return Err(invalid_arg("max pooling backward shape mismatch"));
    }
    let mut gx = RealTensor::zeros(idx.input_shape.clone());
    let gv = gx.values_mut();
    for (&i, &g) in idx.argmax.iter().zip(upstream.values()) {
        gv[i] = gv[i] + g;
    }
    Ok(gx)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DropoutSpec {
    pub p: f64,
    pub training: bool,
}

impl DropoutSpec {
    pub fn new(p: f64, training: bool) -> Result<Self> {
        if !(0.0..1.0).contains(&p) {
            return Err(invalid_arg(format!("dropout probability {p} outside [0, 1)")));
        }
        Ok(Self { p, training })
    }
}

impl Default for DropoutSpec {
    fn default() -> Self {
        Self { p: 0.4, training: true }
    }
}

/// Inverted dropout. Returns the output and the per-element multiplier
/// (`0` or `1/(1−p)`), which is also the backward mask. `None` mask means
/// the call was the identity.
pub fn dropout<T: Real, R: Rng + ?Sized>(
    x: &RealTensor<T>,
    spec: DropoutSpec,
    rng: &mut R,
) -> (RealTensor<T>, Option<Vec<T>>) {
    if !spec.training || spec.p == 0.0 {
        return (x.clone(), None);
    }
    let keep = T::one() / T::lit(1.0 - spec.p);
    let mask: Vec<T> = (0..x.len())
        .map(|_| if rng.gen::<f64>() < spec.p { T::zero() } else { keep })
        .collect();
    let v = x.values().iter().zip(&mask).map(|(a, m)| *a * *m).collect();
    (RealTensor::new(x.shape().to_vec(), v).expect("same shape"), Some(mask))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(shape: Vec<usize>, rng: &mut ChaCha8Rng) -> RealTensor<f64> {
        let n = shape.iter().product();
        RealTensor::new(shape, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-3)
    }

    #[test]
    fn dense_identity_and_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random(vec![3, 4], &mut rng);
        let mut eye = RealTensor::zeros(vec![4, 4]);
        for i in 0..4 {
            eye.values_mut()[i * 4 + i] = 1.0;
        }
        assert_eq!(dense_forward(&eye, &RealTensor::zeros(vec![4]), &x).unwrap().values(), x.values());
        let y = dense_forward(&RealTensor::zeros(vec![2, 4]), &RealTensor::filled(vec![2], 0.7), &x).unwrap();
        assert!(y.values().iter().all(|&v| v == 0.7));
    }

    #[test]
    fn dense_matches_triple_loop() {
        let w = RealTensor::new(vec![2, 3], vec![1.0, -2.0, 0.5, 3.0, 0.0, -1.0]).unwrap();
        let b = RealTensor::new(vec![2], vec![0.1, -0.2]).unwrap();
        let x = RealTensor::new(vec![2, 3], vec![1.0, 2.0, 3.0, -1.0, 0.5, 4.0]).unwrap();
        let y = dense_forward(&w, &b, &x).unwrap();
        let mut expect = vec![0.0f64; 4];
        for r in 0..2 {
            for o in 0..2 {
                let mut s = b.values()[o];
                for i in 0..3 {
                    s += w.values()[o * 3 + i] * x.values()[r * 3 + i];
                }
                expect[r * 2 + o] = s;
            }
        }
        for (a, b) in y.values().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(dense_forward(&w, &b, &RealTensor::zeros(vec![2, 4])).is_err());
    }

    #[test]
    fn dense_backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = random(vec![3, 4], &mut rng);
        let b = random(vec![3], &mut rng);
        let x = random(vec![2, 4], &mut rng);
        let up = random(vec![2, 3], &mut rng);
        let scalar = |w: &RealTensor<f64>, b: &RealTensor<f64>, x: &RealTensor<f64>| -> f64 {
            dense_forward(w, b, x).unwrap().values().iter().zip(up.values()).map(|(a, c)| a * c).sum()
        };
        let (gw, gb, gx) = dense_backward(&w, &x, &up).unwrap();
        let h = 1e-6;
        for i in 0..w.len() {
            let (mut a, mut c) = (w.clone(), w.clone());
            a.values_mut()[i] += h;
            c.values_mut()[i] -= h;
            assert!(rel(gw[i], (scalar(&a, &b, &x) - scalar(&c, &b, &x)) / (2.0 * h)) < 1e-5);
        }
        for i in 0..b.len() {
            let (mut a, mut c) = (b.clone(), b.clone());
            a.values_mut()[i] += h;
            c.values_mut()[i] -= h;
            assert!(rel(gb[i], (scalar(&w, &a, &x) - scalar(&w, &c, &x)) / (2.0 * h)) < 1e-5);
        }
        for i in 0..x.len() {
            let (mut a, mut c) = (x.clone(), x.clone());
            a.values_mut()[i] += h;
            c.values_mut()[i] -= h;
            assert!(rel(gx.values()[i], (scalar(&w, &b, &a) - scalar(&w, &b, &c)) / (2.0 * h)) < 1e-5);
        }
    }

    #[test]
    fn relu_cases() {
        let x = RealTensor::new(vec![3], vec![-1.0, 0.0, 2.0]).unwrap();
        assert_eq!(relu(&x).values(), &[0.0, 0.0, 2.0]);
        let neg = RealTensor::new(vec![3], vec![-1.0, -0.5, -3.0]).unwrap();
        assert!(relu(&neg).values().iter().all(|&v| v == 0.0));
        let up = RealTensor::filled(vec![3], 1.0);
        assert!(relu_backward(&neg, &up).unwrap().values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn relu_backward_matches_finite_differences_away_from_kink() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random(vec![50], &mut rng);
        let up = random(vec![50], &mut rng);
        let g = relu_backward(&x, &up).unwrap();
        let h = 1e-6;
        for i in 0..50 {
            if x.values()[i].abs() <= 1e-3 {
                continue;
            }
            let f = |v: f64| v.max(0.0) * up.values()[i];
            let fd = (f(x.values()[i] + h) - f(x.values()[i] - h)) / (2.0 * h);
            assert_abs_diff_eq!(g.values()[i], fd, epsilon = 1e-6);
        }
    }

    #[test]
    fn lenet_shape_arithmetic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let x = random(vec![1, 1, 28, 28], &mut rng);
        let y = conv2d_forward(&random(vec![10, 1, 5, 5], &mut rng), None, &x).unwrap();
        assert_eq!(y.shape(), &[1, 10, 24, 24]);
        let (y, _) = maxpool2(&y).unwrap();
        assert_eq!(y.shape(), &[1, 10, 12, 12]);
        let y = conv2d_forward(&random(vec![20, 10, 5, 5], &mut rng), None, &y).unwrap();
        assert_eq!(y.shape(), &[1, 20, 8, 8]);
        let (y, _) = maxpool2(&y).unwrap();
        assert_eq!(y.shape(), &[1, 20, 4, 4]);
        assert_eq!(y.len(), 320);
    }

    #[test]
    fn conv_too_small_input() {
        let k = RealTensor::<f64>::zeros(vec![1, 1, 5, 5]);
        assert!(conv2d_forward(&k, None, &RealTensor::zeros(vec![1, 1, 4, 9])).is_err());
        assert!(conv2d_forward(&k, None, &RealTensor::zeros(vec![1, 2, 9, 9])).is_err());
    }

    #[test]
    fn delta_kernel_crops_input() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random(vec![1, 1, 7, 7], &mut rng);
        let mut k = RealTensor::zeros(vec![1, 1, 5, 5]);
        k.values_mut()[2 * 5 + 2] = 1.0;
        let y = conv2d_forward(&k, None, &x).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(y.values()[r * 3 + c], x.values()[(r + 2) * 7 + (c + 2)]);
            }
        }
    }

    #[test]
    fn conv_matches_naive_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let x = random(vec![1, 1, 6, 6], &mut rng);
        let k = random(vec![2, 1, 5, 5], &mut rng);
        let y = conv2d_forward(&k, None, &x).unwrap();
        for o in 0..2 {
            for r in 0..2 {
                for c in 0..2 {
                    let mut s = 0.0;
                    for ky in 0..5 {
                        for kx in 0..5 {
                            s += k.values()[o * 25 + ky * 5 + kx] * x.values()[(r + ky) * 6 + c + kx];
                        }
                    }
                    assert!((y.values()[o * 4 + r * 2 + c] - s).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn conv_backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random(vec![2, 2, 7, 6], &mut rng);
        let k = random(vec![3, 2, 3, 3], &mut rng);
        let b = random(vec![3], &mut rng);
        let up = random(vec![2, 3, 5, 4], &mut rng);
        let scalar = |k: &RealTensor<f64>, b: &RealTensor<f64>, x: &RealTensor<f64>| -> f64 {
            conv2d_forward(k, Some(b), x).unwrap().values().iter().zip(up.values()).map(|(a, c)| a * c).sum()
        };
        let (gk, gb, gx) = conv2d_backward(&k, &x, &up).unwrap();
        let h = 1e-6;
        for i in 0..k.len() {
            let (mut a, mut c) = (k.clone(), k.clone());
            a.values_mut()[i] += h;
            c.values_mut()[i] -= h;
            assert!(rel(gk[i], (scalar(&a, &b, &x) - scalar(&c, &b, &x)) / (2.0 * h)) < 1e-5);
        }
        for i in 0..3 {
            let (mut a, mut c) = (b.clone(), b.clone());
            a.values_mut()[i] += h;
            c.values_mut()[i] -= h;
            assert!(rel(gb[i], (scalar(&k, &a, &x) - scalar(&k, &c, &x)) / (2.0 * h)) < 1e-5);
        }
        for i in 0..x.len() {
            let (mut a, mut c) = (x.clone(), x.clone());
            a.values_mut()[i] += h;
            c.values_mut()[i] -= h;
            assert!(rel(gx.values()[i], (scalar(&k, &b, &a) - scalar(&k, &b, &c)) / (2.0 * h)) < 1e-5);
        }
    }

    #[test]
    fn pooling_cases() {
        let c = RealTensor::filled(vec![1, 1, 4, 4], 0.3);
        assert!(maxpool2(&c).unwrap().0.values().iter().all(|&v| v == 0.3));
        let x = RealTensor::new(vec![1, 1, 2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(maxpool2(&x).unwrap().0.values(), &[4.0]);
        assert!(maxpool2(&RealTensor::<f64>::zeros(vec![1, 1, 3, 4])).is_err());
        // Ties: first cell in row-major order wins.
        let (_, idx) = maxpool2(&RealTensor::<f64>::filled(vec![1, 1, 2, 2], 1.0)).unwrap();
        let g = maxpool2_backward(&idx, &RealTensor::filled(vec![1, 1, 1, 1], 1.0)).unwrap();
        assert_eq!(g.values(), &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn pool_backward_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = random(vec![2, 3, 4, 6], &mut rng);
        let up = random(vec![2, 3, 2, 3], &mut rng);
        let (_, idx) = maxpool2(&x).unwrap();
        let g = maxpool2_backward(&idx, &up).unwrap();
        let scalar = |x: &RealTensor<f64>| -> f64 {
            maxpool2(x).unwrap().0.values().iter().zip(up.values()).map(|(a, c)| a * c).sum()
        };
        let h = 1e-7;
        for i in 0..x.len() {
            let (mut a, mut c) = (x.clone(), x.clone());
            a.values_mut()[i] += h;
            c.values_mut()[i] -= h;
            let fd = (scalar(&a) - scalar(&c)) / (2.0 * h);
            assert!((g.values()[i] - fd).abs() < 1e-6, "{i}");
        }
        // Exactly one nonzero per pooled block carries the full upstream value.
        let nonzero = g.values().iter().filter(|v| **v != 0.0).count();
        assert_eq!(nonzero, up.len());
    }

    #[test]
    fn dropout_identity_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random(vec![100], &mut rng);
        let (y, m) = dropout(&x, DropoutSpec::new(0.0, true).unwrap(), &mut rng);
        assert_eq!(y, x);
        assert!(m.is_none());
        let (y, _) = dropout(&x, DropoutSpec::new(0.9, false).unwrap(), &mut rng);
        assert_eq!(y, x);
        assert!(DropoutSpec::new(1.0, true).is_err());
    }

    #[test]
    fn dropout_rate_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let x = RealTensor::<f64>::filled(vec![100_000], 1.0);
        let (y, _) = dropout(&x, DropoutSpec::new(0.4, true).unwrap(), &mut rng);
        let dropped = y.values().iter().filter(|&&v| v == 0.0).count() as f64 / 1e5;
        assert!((dropped - 0.4).abs() < 0.01, "{dropped}");
        let kept = y.values().iter().find(|&&v| v != 0.0).unwrap();
        assert_abs_diff_eq!(*kept, 1.0 / 0.6, epsilon = 1e-15);
    }
}
