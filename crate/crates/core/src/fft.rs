//! Discrete Fourier transforms over any [`Field`].
//!
//! [`dft_naive`] is the O(s^2) reference every other transform is checked
//! against. [`fft`] is a recursive mixed-radix decimation-in-time FFT that
//! splits on the smallest prime factor of the length; each radix-p combine
//! is a direct p-point sum, so a large prime factor degrades to the naive
//! cost on that factor only.

use crate::error::{Error, Result};
use crate::field::Field;

/// A row-major tensor (axis 0 slowest).
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<E> {
    shape: Vec<usize>,
    data: Vec<E>,
}

impl<E: Copy> Tensor<E> {
    pub fn new(shape: Vec<usize>, data: Vec<E>) -> Result<Self> {
        if shape.is_empty() || shape.contains(&0) {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} must be non-empty with positive axes"
            )));
        }
        let size: usize = shape.iter().product();
        if size != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} holds {size} elements, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data })
    }

    pub fn filled(shape: Vec<usize>, value: E) -> Result<Self> {
        let size = shape.iter().product();
        Self::new(shape, vec![value; size])
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[E] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [E] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<E> {
        self.data
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        row_major_offset(&self.shape, index)
    }

    pub fn get(&self, index: &[usize]) -> E {
        self.data[self.offset(index)]
    }
}

pub(crate) fn row_major_offset(shape: &[usize], index: &[usize]) -> usize {
    debug_assert_eq!(shape.len(), index.len());
    index.iter().zip(shape).fold(0, |acc, (&i, &d)| {
        debug_assert!(i < d);
        acc * d + i
    })
}

/// Decomposes a row-major offset into a multi-index.
pub(crate) fn unravel(shape: &[usize], mut offset: usize, out: &mut [usize]) {
    for k in (0..shape.len()).rev() {
        out[k] = offset % shape[k];
        offset /= shape[k];
    }
}

fn smallest_prime_factor(n: usize) -> usize {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

/// Direct evaluation of `X_i = sum_j x_j omega_s^(ij)`.
pub fn dft_naive<F: Field>(field: &F, x: &[F::Elem]) -> Result<Vec<F::Elem>> {
    naive_with_table(field, x, false)
}

fn naive_with_table<F: Field>(field: &F, x: &[F::Elem], inverse: bool) -> Result<Vec<F::Elem>> {
    let s = x.len();
    if s == 0 {
        return Err(Error::ShapeMismatch("empty vector".into()));
    }
    let table = field.roots_table(s, inverse)?;
    Ok((0..s)
        .map(|i| {
            x.iter().enumerate().fold(field.zero(), |acc, (j, &xj)| {
                field.add(acc, field.mul(xj, table[(i * j) % s]))
            })
        })
        .collect())
}

/// Fast DFT; output contract identical to [`dft_naive`].
pub fn fft<F: Field>(field: &F, x: &[F::Elem]) -> Result<Vec<F::Elem>> {
    transform(field, x, false)
}

/// Inverse DFT: the conjugate-root transform scaled by `s^-1`.
pub fn idft<F: Field>(field: &F, x: &[F::Elem]) -> Result<Vec<F::Elem>> {
    let scale = field.inverse_of_len(x.len())?;
    let mut out = transform(field, x, true)?;
    for v in &mut out {
        *v = field.mul(*v, scale);
    }
    Ok(out)
}

fn transform<F: Field>(field: &F, x: &[F::Elem], inverse: bool) -> Result<Vec<F::Elem>> {
    let s = x.len();
    if s == 0 {
        return Err(Error::ShapeMismatch("empty vector".into()));
    }
    let table = field.roots_table(s, inverse)?;
    Ok(fft_rec(field, x, &table))
}

/// Transform with a caller-supplied root table whose length is a multiple
/// of `x.len()`.
pub(crate) fn fft_with_table<F: Field>(
    field: &F,
    x: &[F::Elem],
    table: &[F::Elem],
) -> Vec<F::Elem> {
    debug_assert_eq!(table.len() % x.len(), 0);
    fft_rec(field, x, table)
}

/// `table` holds the powers of the primitive root for the top-level length;
/// a sub-problem of length n uses stride `table.len() / n`.
fn fft_rec<F: Field>(field: &F, x: &[F::Elem], table: &[F::Elem]) -> Vec<F::Elem> {
    let n = x.len();
    if n == 1 {
        return x.to_vec();
    }
    let top = table.len();
    let stride = top / n;
    let root = |e: usize| table[(e % n) * stride];

    let radix = smallest_prime_factor(n);
    if radix == n {
        return (0..n)
            .map(|i| {
                x.iter().enumerate().fold(field.zero(), |acc, (j, &xj)| {
                    field.add(acc, field.mul(xj, root(i * j)))
                })
            })
            .collect();
    }

    let rest = n / radix;
    let subs: Vec<Vec<F::Elem>> = (0..radix)
        .map(|i| {
            let part: Vec<F::Elem> = x.iter().skip(i).step_by(radix).copied().collect();
            fft_rec(field, &part, table)
        })
        .collect();

    let mut out = vec![field.zero(); n];
    if radix == 2 {
        for k in 0..rest {
            let t = field.mul(root(k), subs[1][k]);
            out[k] = field.add(subs[0][k], t);
            out[k + rest] = field.sub(subs[0][k], t);
        }
        return out;
    }

    let mut twiddled = vec![field.zero(); radix];
    for k in 0..rest {
        for (i, sub) in subs.iter().enumerate() {
            twiddled[i] = field.mul(root(i * k), sub[k]);
        }
        // Length-radix DFT of the twiddled column; omega_radix = omega_n^rest.
        for q in 0..radix {
            let mut acc = field.zero();
            for (i, &t) in twiddled.iter().enumerate() {
                acc = field.add(acc, field.mul(t, root(rest * ((i * q) % radix))));
            }
            out[k + rest * q] = acc;
        }
    }
    out
}

/// n-dimensional DFT computed axis by axis with [`fft`].
pub fn dft_nd<F: Field>(field: &F, t: &Tensor<F::Elem>) -> Result<Tensor<F::Elem>> {
    let shape = t.shape().to_vec();
    let mut data = t.data().to_vec();
    let tables = shape
        .iter()
        .map(|&len| field.roots_table(len, false))
        .collect::<Result<Vec<_>>>()?;

    let mut line = Vec::new();
    for (axis, &len) in shape.iter().enumerate() {
        if len == 1 {
            continue;
        }
        let inner: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        for o in 0..outer {
            for i in 0..inner {
                let base = o * len * inner + i;
                line.clear();
                line.extend((0..len).map(|j| data[base + j * inner]));
                let transformed = fft_rec(field, &line, &tables[axis]);
                for (j, v) in transformed.into_iter().enumerate() {
                    data[base + j * inner] = v;
                }
            }
        }
    }
    Tensor::new(shape, data)
}

/// Direct n-fold sum `T_i = sum_j t_j prod_k omega_{s_k}^(i_k j_k)`.
/// O(s^2); the reference for [`dft_nd`].
pub fn dft_nd_naive<F: Field>(field: &F, t: &Tensor<F::Elem>) -> Result<Tensor<F::Elem>> {
    let shape = t.shape();
    let rank = shape.len();
    let tables = shape
        .iter()
        .map(|&len| field.roots_table(len, false))
        .collect::<Result<Vec<_>>>()?;
    let mut out_idx = vec![0usize; rank];
    let mut in_idx = vec![0usize; rank];
    let mut out = Vec::with_capacity(t.len());
    for o in 0..t.len() {
        unravel(shape, o, &mut out_idx);
        let mut acc = field.zero();
        for (j, &v) in t.data().iter().enumerate() {
            unravel(shape, j, &mut in_idx);
            let w = (0..rank).fold(field.one(), |w, k| {
                field.mul(w, tables[k][(out_idx[k] * in_idx[k]) % shape[k]])
            });
            acc = field.add(acc, field.mul(v, w));
        }
        out.push(acc);
    }
    Tensor::new(shape.to_vec(), out)
}
