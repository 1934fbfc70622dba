use num_complex::Complex;

use crate::Real;

/// Row-major 2×2 complex matrix.
pub type Mat2<T> = [[Complex<T>; 2]; 2];

#[inline]
fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

pub fn ry_matrix<T: Real>(theta: T) -> Mat2<T> {
    let (s, co) = (theta * T::half()).sin_cos();
    let z = T::zero();
    [[c(co, z), c(-s, z)], [c(s, z), c(co, z)]]
}

pub fn rz_matrix<T: Real>(theta: T) -> Mat2<T> {
    let (s, co) = (theta * T::half()).sin_cos();
    let z = Complex::new(T::zero(), T::zero());
    [[c(co, -s), z], [z, c(co, s)]]
}

pub fn pauli_x<T: Real>() -> Mat2<T> {
    let (o, z) = (T::one(), T::zero());
    [[c(z, z), c(o, z)], [c(o, z), c(z, z)]]
}

pub fn pauli_y<T: Real>() -> Mat2<T> {
    let (o, z) = (T::one(), T::zero());
    [[c(z, z), c(z, -o)], [c(z, o), c(z, z)]]
}

pub fn pauli_z<T: Real>() -> Mat2<T> {
    let (o, z) = (T::one(), T::zero());
    [[c(o, z), c(z, z)], [c(z, z), c(-o, z)]]
}

pub fn identity<T: Real>() -> Mat2<T> {
    let (o, z) = (T::one(), T::zero());
    [[c(o, z), c(z, z)], [c(z, z), c(o, z)]]
}

pub fn scale<T: Real>(m: &Mat2<T>, k: T) -> Mat2<T> {
    [[m[0][0] * k, m[0][1] * k], [m[1][0] * k, m[1][1] * k]]
}

/// `a · b`.
pub fn mat2_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn dagger<T: Real>(m: &Mat2<T>) -> Mat2<T> {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

#[inline]
pub(crate) fn mat2_apply<T: Real>(m: &Mat2<T>, v: [Complex<T>; 2]) -> [Complex<T>; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// Distance in the basis index between the two halves of a qubit's pair.
#[inline]
pub(crate) fn stride(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

/// Apply a single-qubit operator to an amplitude vector in place.
pub(crate) fn apply_1q<T: Real>(amps: &mut [Complex<T>], n: usize, q: usize, m: &Mat2<T>) {
    let st = stride(n, q);
    for i in 0..amps.len() {
        if i & st == 0 {
            let [a, b] = mat2_apply(m, [amps[i], amps[i | st]]);
            amps[i] = a;
            amps[i | st] = b;
        }
    }
}

pub(crate) fn apply_cnot_raw<T: Real>(amps: &mut [Complex<T>], n: usize, control: usize, target: usize) {
    let cs = stride(n, control);
    let ts = stride(n, target);
    for i in 0..amps.len() {
        if i & cs != 0 && i & ts == 0 {
            amps.swap(i, i | ts);
        }
    }
}

pub(crate) fn expectation_z_raw<T: Real>(amps: &[Complex<T>], n: usize, q: usize) -> T {
    let st = stride(n, q);
    amps.iter()
        .enumerate()
        .map(|(i, a)| if i & st == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}
