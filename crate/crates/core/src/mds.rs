//! (N, m) MDS erasure code given by an N x m generator matrix.
//!
//! The code is applied position-wise: `m` message vectors of equal length
//! `L` become `N` shares of length `L`, share `i` being
//! `sum_j G[i][j] * message_j`. Any `m` shares recover the messages by
//! inverting the corresponding `m x m` row submatrix once and applying it to
//! all `L` positions.

use itertools::Itertools;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Field;

/// Exhaustive minor check up to this many row subsets.
const EXHAUSTIVE_MINOR_LIMIT: u128 = 10_000;
/// Random row subsets checked above the exhaustive limit.
const SPOT_CHECK_SUBSETS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    Vandermonde,
    Custom,
}

/// A share stored at (or returned by) one worker.
#[derive(Debug, Clone, PartialEq)]
pub struct Share<E> {
    pub worker_index: usize,
    pub payload: Vec<E>,
}

impl<E> Share<E> {
    pub fn new(worker_index: usize, payload: Vec<E>) -> Self {
        Self {
            worker_index,
            payload,
        }
    }
}

/// Outcome of a redundancy check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Consistency {
    Consistent,
    /// `(worker_index, position)` pairs that disagree with the codeword
    /// decoded from the first `m` shares.
    Corrupt(Vec<(usize, usize)>),
}

/// Which workers a decode used and how well-conditioned their submatrix was.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeReport {
    pub workers: Vec<usize>,
    /// 1-norm condition number of the decoding submatrix (1.0 is perfect;
    /// meaningful only over the complex field).
    pub condition: f64,
}

/// A worker index with a borrowed payload.
type View<'a, E> = (usize, &'a [E]);

#[derive(Debug, Clone, PartialEq)]
pub struct MdsCode<F: Field> {
    field: F,
    n_total: usize,
    k_msg: usize,
    /// Row-major N x m.
    generator: Vec<F::Elem>,
    kind: CodeKind,
}

impl<F: Field> MdsCode<F> {
    /// Reed-Solomon style Vandermonde code with the default evaluation
    /// points: `alpha_i = i` on prime fields, `alpha_i = exp(-2 pi i i/N)` on
    /// the complex field.
    pub fn vandermonde(field: F, n_total: usize, k_msg: usize) -> Result<Self> {
        check_dims(n_total, k_msg)?;
        let points = match field.cardinality() {
            Some(p) => {
                if n_total as u64 > p {
                    return Err(Error::InvalidParameter(format!(
                        "{n_total} distinct evaluation points do not exist in a field of size {p}"
                    )));
                }
                (0..n_total as u64).map(|i| field.from_u64(i)).collect()
            }
            None => field.roots_table(n_total, false)?,
        };
        Self::vandermonde_with_points(field, points, k_msg)
    }

    /// Vandermonde code with rows `(alpha_i^0, ..., alpha_i^(m-1))`.
    pub fn vandermonde_with_points(field: F, points: Vec<F::Elem>, k_msg: usize) -> Result<Self> {
        let n_total = points.len();
        check_dims(n_total, k_msg)?;
        for (i, j) in (0..n_total).tuple_combinations() {
            if field.approx_eq(points[i], points[j]) {
                return Err(Error::DegeneratePoints);
            }
        }
        let mut generator = Vec::with_capacity(n_total * k_msg);
        for &alpha in &points {
            let mut power = field.one();
            for _ in 0..k_msg {
                generator.push(power);
                power = field.mul(power, alpha);
            }
        }
        let code = Self {
            field,
            n_total,
            k_msg,
            generator,
            kind: CodeKind::Vandermonde,
        };
        code.verify_mds()?;
        Ok(code)
    }

    /// A caller-supplied N x m generator, verified to be MDS.
    pub fn custom(field: F, rows: Vec<Vec<F::Elem>>) -> Result<Self> {
        let n_total = rows.len();
        let k_msg = rows.first().map_or(0, Vec::len);
        check_dims(n_total, k_msg)?;
        if rows.iter().any(|r| r.len() != k_msg) {
            return Err(Error::ShapeMismatch("ragged generator matrix".into()));
        }
        let code = Self {
            field,
            n_total,
            k_msg,
            generator: rows.into_iter().flatten().collect(),
            kind: CodeKind::Custom,
        };
        code.verify_mds()?;
        Ok(code)
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    /// N
    pub fn n_total(&self) -> usize {
        self.n_total
    }

    /// m
    pub fn k_msg(&self) -> usize {
        self.k_msg
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn row(&self, i: usize) -> &[F::Elem] {
        &self.generator[i * self.k_msg..(i + 1) * self.k_msg]
    }

    fn submatrix(&self, rows: &[usize]) -> Vec<F::Elem> {
        rows.iter()
            .flat_map(|&r| self.row(r).iter().copied())
            .collect()
    }

    fn verify_mds(&self) -> Result<()> {
        let (n, m) = (self.n_total, self.k_msg);
        if binomial(n, m) <= EXHAUSTIVE_MINOR_LIMIT {
            for rows in (0..n).combinations(m) {
                self.check_minor(&rows)?;
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0x006d_6473_5f63_686b);
            for _ in 0..SPOT_CHECK_SUBSETS {
                let mut rows = sample(&mut rng, n, m).into_vec();
                rows.sort_unstable();
                self.check_minor(&rows)?;
            }
        }
        Ok(())
    }

    fn check_minor(&self, rows: &[usize]) -> Result<()> {
        invert(&self.field, &self.submatrix(rows), self.k_msg)
            .map(|_| ())
            .ok_or_else(|| Error::NotMds {
                rows: rows.to_vec(),
            })
    }

    /// Encodes `m` equal-length messages into `N` shares.
    pub fn encode_shares(&self, messages: &[Vec<F::Elem>]) -> Result<Vec<Share<F::Elem>>> {
        let views: Vec<&[F::Elem]> = messages.iter().map(Vec::as_slice).collect();
        Ok(self
            .encode_views(&views)?
            .into_iter()
            .enumerate()
            .map(|(i, payload)| Share::new(i, payload))
            .collect())
    }

    pub(crate) fn encode_views(&self, messages: &[&[F::Elem]]) -> Result<Vec<Vec<F::Elem>>> {
        if messages.len() != self.k_msg {
            return Err(Error::ShapeMismatch(format!(
                "expected {} messages, got {}",
                self.k_msg,
                messages.len()
            )));
        }
        let len = messages[0].len();
        if messages.iter().any(|msg| msg.len() != len) {
            return Err(Error::ShapeMismatch("messages differ in length".into()));
        }
        Ok((0..self.n_total)
            .map(|i| self.combine(self.row(i), messages, len))
            .collect())
    }

    /// Re-encodes the single share for `worker`.
    pub fn encode_row(&self, worker: usize, messages: &[&[F::Elem]]) -> Result<Vec<F::Elem>> {
        if worker >= self.n_total {
            return Err(Error::WorkerOutOfRange {
                index: worker,
                n: self.n_total,
            });
        }
        if messages.len() != self.k_msg {
            return Err(Error::ShapeMismatch("wrong message count".into()));
        }
        let len = messages[0].len();
        Ok(self.combine(self.row(worker), messages, len))
    }

    fn combine(&self, coeffs: &[F::Elem], vectors: &[&[F::Elem]], len: usize) -> Vec<F::Elem> {
        let f = &self.field;
        let mut out = vec![f.zero(); len];
        for (&c, v) in coeffs.iter().zip(vectors) {
            if f.is_zero(c) {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(v.iter()) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        out
    }

    /// Recovers the `m` messages from at least `m` shares, using the first
    /// `m` by ascending worker index.
    pub fn decode_shares(&self, shares: &[Share<F::Elem>]) -> Result<Vec<Vec<F::Elem>>> {
        let views: Vec<(usize, &[F::Elem])> = shares
            .iter()
            .map(|s| (s.worker_index, s.payload.as_slice()))
            .collect();
        self.decode_views(&views).map(|(msgs, _)| msgs)
    }

    /// As [`decode_shares`](Self::decode_shares), over borrowed payloads, also
    /// returning which workers were used and the submatrix condition.
    pub fn decode_views(
        &self,
        shares: &[(usize, &[F::Elem])],
    ) -> Result<(Vec<Vec<F::Elem>>, DecodeReport)> {
        let chosen = self.select(shares)?;
        let rows: Vec<usize> = chosen.iter().map(|&(i, _)| i).collect();
        let sub = self.submatrix(&rows);
        let inverse =
            invert(&self.field, &sub, self.k_msg).ok_or(Error::NotMds { rows: rows.clone() })?;
        let condition =
            one_norm(&self.field, &sub, self.k_msg) * one_norm(&self.field, &inverse, self.k_msg);
        let len = chosen[0].1.len();
        let payloads: Vec<&[F::Elem]> = chosen.iter().map(|&(_, p)| p).collect();
        let messages = (0..self.k_msg)
            .map(|j| {
                self.combine(
                    &inverse[j * self.k_msg..(j + 1) * self.k_msg],
                    &payloads,
                    len,
                )
            })
            .collect();
        Ok((
            messages,
            DecodeReport {
                workers: rows,
                condition,
            },
        ))
    }

    /// Validates a share set and returns the first `m` by worker index.
    fn select<'a>(&self, shares: &[View<'a, F::Elem>]) -> Result<Vec<View<'a, F::Elem>>> {
        let mut sorted = self.validated(shares)?;
        if sorted.len() < self.k_msg {
            return Err(Error::InsufficientShares {
                needed: self.k_msg,
                got: sorted.len(),
            });
        }
        sorted.truncate(self.k_msg);
        Ok(sorted)
    }

    fn validated<'a>(&self, shares: &[View<'a, F::Elem>]) -> Result<Vec<View<'a, F::Elem>>> {
        let mut sorted = shares.to_vec();
        sorted.sort_by_key(|&(i, _)| i);
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateShare(w[0].0));
            }
        }
        if let Some(&(index, _)) = sorted.iter().find(|&&(i, _)| i >= self.n_total) {
            return Err(Error::WorkerOutOfRange {
                index,
                n: self.n_total,
            });
        }
        if let Some(&(_, first)) = sorted.first() {
            if sorted.iter().any(|(_, p)| p.len() != first.len()) {
                return Err(Error::ShapeMismatch(
                    "share payloads differ in length".into(),
                ));
            }
        }
        Ok(sorted)
    }

    /// Decodes from the first `m` shares, re-encodes and compares the rest.
    pub fn check_consistency(&self, shares: &[Share<F::Elem>]) -> Result<Consistency> {
        let views: Vec<(usize, &[F::Elem])> = shares
            .iter()
            .map(|s| (s.worker_index, s.payload.as_slice()))
            .collect();
        let sorted = self.validated(&views)?;
        if sorted.len() <= self.k_msg {
            return Err(Error::InsufficientShares {
                needed: self.k_msg + 1,
                got: sorted.len(),
            });
        }
        let (messages, _) = self.decode_views(&sorted[..self.k_msg])?;
        let msg_views: Vec<&[F::Elem]> = messages.iter().map(Vec::as_slice).collect();
        let mut bad = Vec::new();
        for &(worker, payload) in &sorted[self.k_msg..] {
            let expect = self.encode_row(worker, &msg_views)?;
            for (pos, (&got, &want)) in payload.iter().zip(&expect).enumerate() {
                if !self.field.approx_eq(got, want) {
                    bad.push((worker, pos));
                }
            }
        }
        Ok(if bad.is_empty() {
            Consistency::Consistent
        } else {
            Consistency::Corrupt(bad)
        })
    }
}

fn check_dims(n_total: usize, k_msg: usize) -> Result<()> {
    if k_msg == 0 || k_msg > n_total {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m <= N, got N={n_total}, m={k_msg}"
        )));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > EXHAUSTIVE_MINOR_LIMIT * 1_000_000 {
            return u128::MAX;
        }
    }
    acc
}

/// Gauss-Jordan inversion of a row-major `n x n` matrix with partial
/// pivoting. `None` when singular: an exactly zero pivot on prime fields, or
/// a pivot below `1e-12 * max|a_ij|` on the complex field.
pub fn invert<F: Field>(field: &F, matrix: &[F::Elem], n: usize) -> Option<Vec<F::Elem>> {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let mut inv = vec![field.zero(); n * n];
    for i in 0..n {
        inv[i * n + i] = field.one();
    }
    let scale = a.iter().map(|&v| field.magnitude(v)).fold(0.0f64, f64::max);
    let floor = if field.tolerance() == 0.0 {
        0.0
    } else {
        1e-12 * scale
    };

    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n).map(|r| (r, field.magnitude(a[r * n + col]))).fold(
            (col, -1.0),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        );
        if pivot_mag <= floor || field.is_zero(a[pivot_row * n + col]) {
            return None;
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
                inv.swap(col * n + k, pivot_row * n + k);
            }
        }
        let p_inv = field.inv(a[col * n + col]).ok()?;
        for k in 0..n {
            a[col * n + k] = field.mul(a[col * n + k], p_inv);
            inv[col * n + k] = field.mul(inv[col * n + k], p_inv);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = a[r * n + col];
            if field.is_zero(factor) {
                continue;
            }
            for k in 0..n {
                a[r * n + k] = field.sub(a[r * n + k], field.mul(factor, a[col * n + k]));
                inv[r * n + k] = field.sub(inv[r * n + k], field.mul(factor, inv[col * n + k]));
            }
        }
    }
    Some(inv)
}

fn one_norm<F: Field>(field: &F, matrix: &[F::Elem], n: usize) -> f64 {
    (0..n)
        .map(|c| {
            (0..n)
                .map(|r| field.magnitude(matrix[r * n + c]))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}
