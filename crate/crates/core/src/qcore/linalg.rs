//! Hermitian eigen-decomposition through the real symmetric embedding
//! `H = A + iB  ↦  [[A, −B], [B, A]]`, diagonalized with cyclic Jacobi
//! rotations. Every eigenvalue of `H` appears twice in the embedding, and any
//! matrix function of the embedding is the embedding of that function of `H`.

use num_complex::Complex;

use crate::Real;

fn embed<T: Real>(h: &[Complex<T>], d: usize) -> Vec<T> {
    let n = 2 * d;
    let mut a = vec![T::zero(); n * n];
    for i in 0..d {
        for j in 0..d {
            // Symmetrize on the fly so round-off asymmetry cannot leak in.
            let z = (h[i * d + j] + h[j * d + i].conj()) * T::half();
            a[i * n + j] = z.re;
            a[(i + d) * n + (j + d)] = z.re;
            a[(i + d) * n + j] = z.im;
            a[i * n + (j + d)] = -z.im;
        }
    }
    a
}

/// Cyclic Jacobi on a dense symmetric `n × n` matrix (row-major, destroyed).
/// Returns eigenvalues and, if requested, the eigenvector matrix (columns).
fn jacobi<T: Real>(a: &mut [T], n: usize, vectors: bool) -> (Vec<T>, Vec<T>) {
    let mut v = if vectors {
        let mut v = vec![T::zero(); n * n];
        for i in 0..n {
            v[i * n + i] = T::one();
        }
        v
    } else {
        Vec::new()
    };
    let frob: T = a.iter().map(|x| *x * *x).sum();
    let stop = frob * T::epsilon() * T::epsilon();
    for _sweep in 0..64 {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + a[p * n + q] * a[p * n + q];
            }
        }
        if off <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (T::two() * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k * n + p], a[k * n + q]);
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p * n + k], a[q * n + k]);
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();
                if vectors {
                    for k in 0..n {
                        let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// Eigenvalues of a Hermitian `d × d` matrix, ascending.
pub fn hermitian_eigenvalues<T: Real>(h: &[Complex<T>], d: usize) -> Vec<T> {
    let mut a = embed(h, d);
    let (mut ev, _) = jacobi(&mut a, 2 * d, false);
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    ev.into_iter().step_by(2).collect()
}

/// Eigenvalues whose magnitude is below this fraction of the spectral radius
/// are round-off and are treated as exactly zero before taking roots.
pub(crate) fn eigen_floor<T: Real>(spectral_radius: T) -> T {
    T::epsilon() * T::lit(1e4) * spectral_radius.max(T::one())
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues are clamped at zero.
pub fn hermitian_sqrt<T: Real>(h: &[Complex<T>], d: usize) -> Vec<Complex<T>> {
    let n = 2 * d;
    let mut a = embed(h, d);
    let (ev, v) = jacobi(&mut a, n, true);
    let radius = ev.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    let floor = eigen_floor(radius);
    let roots: Vec<T> = ev
        .iter()
        .map(|&l| if l <= floor { T::zero() } else { l.sqrt() })
        .collect();
    let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
    for i in 0..d {
        for j in 0..d {
            let mut re = T::zero();
            let mut im = T::zero();
            for (k, r) in roots.iter().enumerate() {
                if *r == T::zero() {
                    continue;
                }
                re = re + v[i * n + k] * *r * v[j * n + k];
                im = im + v[(i + d) * n + k] * *r * v[j * n + k];
            }
            out[i * d + j] = Complex::new(re, im);
        }
    }
    out
}
