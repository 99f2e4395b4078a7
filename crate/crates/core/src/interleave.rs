//! Decimation of an input into `m` interleaved sub-problems and the twiddle
//! recombination that rebuilds the full transform from their sub-DFTs.
//!
//! For a vector, part `i` holds `c_{i,j} = x_{i + j m}`. Its length-`s/m`
//! DFT `C_i` uses the root `omega_s^m = omega_{s/m}`, and the full output is
//!
//! ```text
//! X_{i + j s/m} = sum_k C_{k,i} omega_s^{i k} omega_m^{j k}
//! ```
//!
//! i.e. `s/m` length-`m` DFTs of twiddled columns.

use crate::error::{Error, Result};
use crate::fft::{fft, fft_with_table, row_major_offset, unravel, Tensor};
use crate::field::Field;

/// The `m` interleaved parts of a length-`s` vector (or their sub-DFTs).
#[derive(Debug, Clone, PartialEq)]
pub struct InterleavedSet<E> {
    parts: Vec<Vec<E>>,
    s: usize,
    m: usize,
}

impl<E: Copy> InterleavedSet<E> {
    /// Wraps precomputed parts, validating that there are `m` of them and
    /// each has length `s/m`.
    pub fn from_parts(parts: Vec<Vec<E>>, s: usize) -> Result<Self> {
        let m = parts.len();
        if m == 0 || s == 0 || !s.is_multiple_of(m) {
            return Err(Error::ShapeMismatch(format!(
                "{m} parts cannot tile a length-{s} vector"
            )));
        }
        if let Some(bad) = parts.iter().find(|p| p.len() != s / m) {
            return Err(Error::ShapeMismatch(format!(
                "part length {} differs from s/m = {}",
                bad.len(),
                s / m
            )));
        }
        Ok(Self { parts, s, m })
    }

    pub fn parts(&self) -> &[Vec<E>] {
        &self.parts
    }

    pub fn into_parts(self) -> Vec<Vec<E>> {
        self.parts
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn part_len(&self) -> usize {
        self.s / self.m
    }
}

/// Splits `x` into `m` parts with `c_{i,j} = x_{i + j m}`.
pub fn interleave_1d<E: Copy>(x: &[E], m: usize) -> Result<InterleavedSet<E>> {
    let s = x.len();
    if m == 0 || s == 0 || !s.is_multiple_of(m) {
        return Err(Error::IndivisibleLength { len: s, m });
    }
    let parts = (0..m)
        .map(|i| x.iter().skip(i).step_by(m).copied().collect())
        .collect();
    Ok(InterleavedSet { parts, s, m })
}

/// Inverse of [`interleave_1d`].
pub fn deinterleave_1d<E: Copy>(set: &InterleavedSet<E>) -> Vec<E> {
    let mut out = Vec::with_capacity(set.s);
    for j in 0..set.part_len() {
        for part in &set.parts {
            out.push(part[j]);
        }
    }
    out
}

/// Length-`s/m` DFT of every part.
pub fn sub_dft<F: Field>(
    field: &F,
    set: &InterleavedSet<F::Elem>,
) -> Result<InterleavedSet<F::Elem>> {
    let parts = set
        .parts
        .iter()
        .map(|p| fft(field, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(InterleavedSet {
        parts,
        s: set.s,
        m: set.m,
    })
}

/// Rebuilds `X` from the sub-DFTs via `s/m` twiddled length-`m` DFTs.
pub fn recombine_1d<F: Field>(field: &F, set: &InterleavedSet<F::Elem>) -> Result<Vec<F::Elem>> {
    check_set(set)?;
    let (s, m) = (set.s, set.m);
    let rows = s / m;
    if m == 1 {
        return Ok(set.parts[0].clone());
    }
    let twiddles = field.roots_table(s, false)?;
    let small = field.roots_table(m, false)?;
    let mut out = vec![field.zero(); s];
    let mut column = vec![field.zero(); m];
    for i in 0..rows {
        for (k, part) in set.parts.iter().enumerate() {
            column[k] = field.mul(part[i], twiddles[(i * k) % s]);
        }
        let transformed = fft_with_table(field, &column, &small);
        for (j, v) in transformed.into_iter().enumerate() {
            out[i + j * rows] = v;
        }
    }
    Ok(out)
}

/// Literal evaluation of `X_i = sum_j C_{j, i mod s/m} omega_s^{ij}`.
/// O(s m); algebraically the same map as [`recombine_1d`].
pub fn recombine_1d_direct<F: Field>(
    field: &F,
    set: &InterleavedSet<F::Elem>,
) -> Result<Vec<F::Elem>> {
    check_set(set)?;
    let (s, m) = (set.s, set.m);
    let rows = s / m;
    let twiddles = field.roots_table(s, false)?;
    Ok((0..s)
        .map(|i| {
            (0..m).fold(field.zero(), |acc, j| {
                field.add(
                    acc,
                    field.mul(set.parts[j][i % rows], twiddles[(i * j) % s]),
                )
            })
        })
        .collect())
}

fn check_set<E>(set: &InterleavedSet<E>) -> Result<()> {
    if set.m == 0 || set.parts.len() != set.m || !set.s.is_multiple_of(set.m) {
        return Err(Error::ShapeMismatch(format!(
            "{} parts for (s={}, m={})",
            set.parts.len(),
            set.s,
            set.m
        )));
    }
    if set.parts.iter().any(|p| p.len() != set.s / set.m) {
        return Err(Error::ShapeMismatch("part length differs from s/m".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// n-dimensional
// ---------------------------------------------------------------------------

/// Per-axis interleaving factors `m_k` with `prod m_k = m` and `m_k | s_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NdFactors {
    factors: Vec<usize>,
}

impl NdFactors {
    pub fn new(factors: Vec<usize>, shape: &[usize]) -> Result<Self> {
        if factors.len() != shape.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} factors for rank-{} shape",
                factors.len(),
                shape.len()
            )));
        }
        if factors
            .iter()
            .zip(shape)
            .any(|(&f, &s)| f == 0 || s % f != 0)
        {
            return Err(Error::ShapeMismatch(format!(
                "factors {factors:?} do not divide shape {shape:?}"
            )));
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    /// `prod m_k`.
    pub fn product(&self) -> usize {
        self.factors.iter().product()
    }

    /// Shape of each interleaved part, `s_k / m_k`.
    pub fn part_shape(&self, shape: &[usize]) -> Vec<usize> {
        shape
            .iter()
            .zip(&self.factors)
            .map(|(s, m)| s / m)
            .collect()
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Greedy factorization: walking the axes in order, each `m_k` is the
/// largest divisor of `s_k` that divides what is left of `m`.
pub fn choose_factors_nd(shape: &[usize], m: usize) -> Result<NdFactors> {
    let no = || Error::NoFactorization {
        shape: shape.to_vec(),
        m,
    };
    if m == 0 || shape.is_empty() || shape.contains(&0) {
        return Err(no());
    }
    let mut remaining = m;
    let mut factors = Vec::with_capacity(shape.len());
    for &s in shape {
        let take = gcd(s, remaining);
        factors.push(take);
        remaining /= take;
    }
    if remaining != 1 {
        return Err(no());
    }
    Ok(NdFactors { factors })
}

fn check_factors(shape: &[usize], factors: &NdFactors) -> Result<()> {
    NdFactors::new(factors.factors.clone(), shape).map(|_| ())
}

/// Splits `t` into `prod m_k` tensors of shape `s_k / m_k`, ordered by the
/// row-major interleave tuple, with `c_{i,j} = t_{(i_k + j_k m_k)_k}`.
pub fn interleave_nd<E: Copy>(t: &Tensor<E>, factors: &NdFactors) -> Result<Vec<Tensor<E>>> {
    let shape = t.shape();
    check_factors(shape, factors)?;
    let m_k = factors.factors();
    let part_shape = factors.part_shape(shape);
    let part_len: usize = part_shape.iter().product();
    let rank = shape.len();

    let mut tuple = vec![0usize; rank];
    let mut inner = vec![0usize; rank];
    let mut src = vec![0usize; rank];
    let mut out = Vec::with_capacity(factors.product());
    for p in 0..factors.product() {
        unravel(m_k, p, &mut tuple);
        let mut data = Vec::with_capacity(part_len);
        for q in 0..part_len {
            unravel(&part_shape, q, &mut inner);
            for k in 0..rank {
                src[k] = tuple[k] + inner[k] * m_k[k];
            }
            data.push(t.get(&src));
        }
        out.push(Tensor::new(part_shape.clone(), data)?);
    }
    Ok(out)
}

/// Rebuilds the n-D transform from the sub-DFTs of the interleaved parts:
/// `T_i = sum_j C_{j, i mod (s/m)} prod_k omega_{s_k}^{i_k j_k}`.
pub fn recombine_nd<F: Field>(
    field: &F,
    parts: &[Tensor<F::Elem>],
    shape: &[usize],
    factors: &NdFactors,
) -> Result<Tensor<F::Elem>> {
    check_factors(shape, factors)?;
    let m_k = factors.factors();
    let part_shape = factors.part_shape(shape);
    if parts.len() != factors.product() {
        return Err(Error::ShapeMismatch(format!(
            "expected {} parts, got {}",
            factors.product(),
            parts.len()
        )));
    }
    if let Some(bad) = parts.iter().find(|p| p.shape() != &part_shape[..]) {
        return Err(Error::ShapeMismatch(format!(
            "part shape {:?}, expected {part_shape:?}",
            bad.shape()
        )));
    }
    if parts.len() == 1 {
        return Ok(parts[0].clone());
    }

    let rank = shape.len();
    let tables = shape
        .iter()
        .map(|&s| field.roots_table(s, false))
        .collect::<Result<Vec<_>>>()?;
    let total: usize = shape.iter().product();
    let mut out_idx = vec![0usize; rank];
    let mut reduced = vec![0usize; rank];
    let mut tuple = vec![0usize; rank];
    let mut data = Vec::with_capacity(total);
    for o in 0..total {
        unravel(shape, o, &mut out_idx);
        for k in 0..rank {
            reduced[k] = out_idx[k] % part_shape[k];
        }
        let src = row_major_offset(&part_shape, &reduced);
        let mut acc = field.zero();
        for (p, part) in parts.iter().enumerate() {
            unravel(m_k, p, &mut tuple);
            let w = (0..rank).fold(field.one(), |w, k| {
                field.mul(w, tables[k][(out_idx[k] * tuple[k]) % shape[k]])
            });
            acc = field.add(acc, field.mul(part.data()[src], w));
        }
        data.push(acc);
    }
    Tensor::new(shape.to_vec(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fft::{dft_naive, dft_nd, dft_nd_naive};
    use crate::field::{vectors_close, ComplexField, PrimeField};
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn interleave_examples() {
        let set = interleave_1d(&["x0", "x1", "x2", "x3"], 2).unwrap();
        assert_eq!(set.parts(), &[vec!["x0", "x2"], vec!["x1", "x3"]]);

        let set = interleave_1d(&[1, 2, 3, 4, 5, 6], 3).unwrap();
        assert_eq!(set.parts(), &[vec![1, 4], vec![2, 5], vec![3, 6]]);

        let set = interleave_1d(&[7, 8, 9], 1).unwrap();
        assert_eq!(set.parts(), &[vec![7, 8, 9]]);

        assert_eq!(
            interleave_1d(&[1, 2, 3], 2),
            Err(Error::IndivisibleLength { len: 3, m: 2 })
        );
    }

    #[test]
    fn sub_dft_and_recombine_small_example() {
        let f = ComplexField::default();
        let set = InterleavedSet::from_parts(
            vec![vec![c(1., 0.), c(3., 0.)], vec![c(2., 0.), c(4., 0.)]],
            4,
        )
        .unwrap();
        let big = sub_dft(&f, &set).unwrap();
        assert_eq!(
            big.parts(),
            &[vec![c(4., 0.), c(-2., 0.)], vec![c(6., 0.), c(-2., 0.)]]
        );
        let x = recombine_1d(&f, &big).unwrap();
        assert_eq!(x, vec![c(10., 0.), c(-2., 2.), c(-2., 0.), c(-2., -2.)]);
        assert_eq!(recombine_1d_direct(&f, &big).unwrap(), x);
    }

    #[test]
    fn degenerate_m_one() {
        let f = PrimeField::default();
        let x = vec![5u64, 6, 7, 8];
        let set = interleave_1d(&x, 1).unwrap();
        let big = sub_dft(&f, &set).unwrap();
        assert_eq!(big.parts()[0], dft_naive(&f, &x).unwrap());
        assert_eq!(recombine_1d(&f, &big).unwrap(), big.parts()[0]);
    }

    #[test]
    fn zero_parts_stay_zero() {
        let f = PrimeField::default();
        let set = InterleavedSet::from_parts(vec![vec![0u64; 4]; 4], 16).unwrap();
        assert_eq!(sub_dft(&f, &set).unwrap(), set);
        assert_eq!(recombine_1d(&f, &set).unwrap(), vec![0u64; 16]);
    }

    #[test]
    fn inconsistent_metadata_rejected() {
        assert!(InterleavedSet::from_parts(vec![vec![1u64, 2], vec![3]], 4).is_err());
        assert!(InterleavedSet::from_parts(vec![vec![1u64, 2]; 3], 4).is_err());
    }

    #[test]
    fn greedy_factors() {
        assert_eq!(choose_factors_nd(&[4, 4], 4).unwrap().factors(), &[4, 1]);
        assert_eq!(choose_factors_nd(&[4, 4], 1).unwrap().factors(), &[1, 1]);
        assert_eq!(choose_factors_nd(&[2, 3], 6).unwrap().factors(), &[2, 3]);
        assert_eq!(choose_factors_nd(&[2, 4], 8).unwrap().factors(), &[2, 4]);
        assert_eq!(choose_factors_nd(&[6, 4], 8).unwrap().factors(), &[2, 4]);
        assert!(matches!(
            choose_factors_nd(&[4, 4], 3),
            Err(Error::NoFactorization { .. })
        ));
        assert!(choose_factors_nd(&[2, 2], 8).is_err());
    }

    #[test]
    fn interleave_nd_index_formula() {
        let t = Tensor::new(vec![4, 4], (0..16u64).collect()).unwrap();
        let factors = NdFactors::new(vec![2, 2], t.shape()).unwrap();
        let parts = interleave_nd(&t, &factors).unwrap();
        assert_eq!(parts.len(), 4);
        // tuple (1,0) is part 2 in row-major order; entry (1,1) -> t[3][2]
        assert_eq!(parts[2].shape(), &[2, 2]);
        assert_eq!(parts[2].get(&[1, 1]), t.get(&[3, 2]));
        let mut all: Vec<u64> = parts.iter().flat_map(|p| p.data().to_vec()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn interleave_nd_degenerate_axis_matches_1d() {
        let t = Tensor::new(vec![4, 1], vec![1u64, 2, 3, 4]).unwrap();
        let factors = NdFactors::new(vec![2, 1], t.shape()).unwrap();
        let parts = interleave_nd(&t, &factors).unwrap();
        let flat: Vec<Vec<u64>> = parts.iter().map(|p| p.data().to_vec()).collect();
        assert_eq!(
            flat,
            interleave_1d(&[1u64, 2, 3, 4], 2).unwrap().into_parts()
        );

        let f = PrimeField::default();
        let subs: Vec<_> = parts.iter().map(|p| dft_nd(&f, p).unwrap()).collect();
        let nd = recombine_nd(&f, &subs, t.shape(), &factors).unwrap();
        let set = sub_dft(&f, &interleave_1d(&[1u64, 2, 3, 4], 2).unwrap()).unwrap();
        assert_eq!(nd.data(), &recombine_1d(&f, &set).unwrap()[..]);
    }

    #[test]
    fn unit_factors_are_identity() {
        let f = PrimeField::default();
        let t = Tensor::new(vec![2, 4], (10..18u64).collect()).unwrap();
        let factors = NdFactors::new(vec![1, 1], t.shape()).unwrap();
        let parts = interleave_nd(&t, &factors).unwrap();
        assert_eq!(parts, vec![t.clone()]);
        assert_eq!(recombine_nd(&f, &parts, t.shape(), &factors).unwrap(), t);
    }

    fn nd_round_trip(shape: Vec<usize>, factors: Vec<usize>, seed: u64) {
        let f = PrimeField::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = shape.iter().product();
        let t = Tensor::new(
            shape.clone(),
            (0..size).map(|_| f.random(&mut rng)).collect(),
        )
        .unwrap();
        let factors = NdFactors::new(factors, &shape).unwrap();
        let parts = interleave_nd(&t, &factors).unwrap();
        let subs: Vec<_> = parts.iter().map(|p| dft_nd(&f, p).unwrap()).collect();
        let got = recombine_nd(&f, &subs, &shape, &factors).unwrap();
        assert_eq!(
            got,
            dft_nd_naive(&f, &t).unwrap(),
            "shape {shape:?} factors {:?}",
            factors.factors()
        );
    }

    #[test]
    fn nd_pipeline_matches_oracle() {
        nd_round_trip(vec![4, 4], vec![2, 2], 1);
        nd_round_trip(vec![4, 4], vec![4, 1], 2);
        nd_round_trip(vec![4, 4], vec![1, 4], 3);
        nd_round_trip(vec![8, 8], vec![2, 4], 4);
        nd_round_trip(vec![4, 4, 4], vec![2, 1, 2], 5);
        nd_round_trip(vec![2, 8, 16], vec![2, 2, 2], 6);
    }

    #[test]
    fn nd_pipeline_all_factorizations() {
        // every valid factor choice for a few shapes with s <= 256
        for shape in [vec![4, 8], vec![2, 4, 4], vec![16, 16]] {
            let divisors: Vec<Vec<usize>> = shape
                .iter()
                .map(|&s| (1..=s).filter(|d| s % d == 0).collect())
                .collect();
            let mut combos = vec![vec![]];
            for ds in &divisors {
                combos = combos
                    .into_iter()
                    .flat_map(|c: Vec<usize>| {
                        ds.iter().map(move |&d| {
                            let mut c = c.clone();
                            c.push(d);
                            c
                        })
                    })
                    .collect();
            }
            for (i, combo) in combos.into_iter().enumerate() {
                nd_round_trip(shape.clone(), combo, 100 + i as u64);
            }
        }
    }

    proptest! {
        #[test]
        fn recombine_reproduces_dft_prime(
            log_s in 0u32..=9,
            log_m in 0u32..=9,
            seed in any::<u64>(),
        ) {
            prop_assume!(log_m <= log_s);
            let f = PrimeField::default();
            let (s, m) = (1usize << log_s, 1usize << log_m);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<u64> = (0..s).map(|_| f.random(&mut rng)).collect();
            let set = sub_dft(&f, &interleave_1d(&x, m).unwrap()).unwrap();
            let expect = dft_naive(&f, &x).unwrap();
            prop_assert_eq!(&recombine_1d(&f, &set).unwrap(), &expect);
            prop_assert_eq!(&recombine_1d_direct(&f, &set).unwrap(), &expect);
        }

        #[test]
        fn recombine_reproduces_dft_complex(
            s_and_m in (1usize..=96).prop_flat_map(|s| {
                let divisors: Vec<usize> = (1..=s).filter(|d| s % d == 0).collect();
                (Just(s), proptest::sample::select(divisors))
            }),
            seed in any::<u64>(),
        ) {
            let (s, m) = s_and_m;
            let f = ComplexField::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<Complex64> = (0..s).map(|_| f.random(&mut rng)).collect();
            let set = sub_dft(&f, &interleave_1d(&x, m).unwrap()).unwrap();
            let expect = dft_naive(&f, &x).unwrap();
            let fast = recombine_1d(&f, &set).unwrap();
            let direct = recombine_1d_direct(&f, &set).unwrap();
            prop_assert!(vectors_close(&f, &fast, &expect, s as f64));
            prop_assert!(vectors_close(&f, &direct, &fast, s as f64));
        }

        #[test]
        fn interleave_is_bijective(x in proptest::collection::vec(any::<u32>(), 1..200), m in 1usize..10) {
            prop_assume!(x.len() % m == 0);
            let set = interleave_1d(&x, m).unwrap();
            prop_assert_eq!(deinterleave_1d(&set), x.clone());
            for (i, part) in set.parts().iter().enumerate() {
                for (j, &v) in part.iter().enumerate() {
                    prop_assert_eq!(v, x[i + j * m]);
                }
            }
        }
    }
}
