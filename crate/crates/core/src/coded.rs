//! The coded FFT computation strategy.
//!
//! The input is interleaved into `m` parts, the parts are MDS-encoded into
//! `N` shares (one per worker, each `1/m` of the input), every worker
//! Fourier-transforms its share, and the master decodes the sub-DFTs from
//! any `m` results before twiddle-recombining them into the output. DFT
//! linearity is what makes "transform then decode" equal "decode then
//! transform".
//!
//! Three variants share this shape: [`Strategy`] for vectors,
//! [`NdStrategy`] for n-dimensional tensors and [`MultiStrategy`] for a
//! batch of `q` tensors bundled across inputs.

use crate::error::{Error, Result};
use crate::fft::{dft_nd, fft, Tensor};
use crate::field::Field;
use crate::interleave::{
    choose_factors_nd, interleave_1d, interleave_nd, recombine_1d, recombine_nd, InterleavedSet,
    NdFactors,
};
use crate::mds::{DecodeReport, MdsCode, Share};

/// The result `b_i` a worker returns to the master.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkerResult<E> {
    pub worker_index: usize,
    pub payload: Vec<E>,
}

impl<E> WorkerResult<E> {
    pub fn new(worker_index: usize, payload: Vec<E>) -> Self {
        Self {
            worker_index,
            payload,
        }
    }
}

/// Problem parameters: input shape (`[s]` for vectors), storage fraction
/// denominator `m` and worker count `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemConfig<F: Field> {
    pub field: F,
    pub shape: Vec<usize>,
    pub m: usize,
    pub n_workers: usize,
}

impl<F: Field> ProblemConfig<F> {
    pub fn vector(field: F, s: usize, m: usize, n_workers: usize) -> Self {
        Self {
            field,
            shape: vec![s],
            m,
            n_workers,
        }
    }

    pub fn tensor(field: F, shape: Vec<usize>, m: usize, n_workers: usize) -> Self {
        Self {
            field,
            shape,
            m,
            n_workers,
        }
    }

    /// Total input size `s`.
    pub fn s(&self) -> usize {
        self.shape.iter().product()
    }

    fn check_threshold(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be positive".into()));
        }
        if self.m > self.n_workers {
            return Err(Error::InfeasibleThreshold {
                m: self.m,
                n: self.n_workers,
            });
        }
        Ok(())
    }
}

fn check_code<F: Field>(code: &MdsCode<F>, field: &F, n: usize, m: usize) -> Result<()> {
    if code.field() != field {
        return Err(Error::FieldMismatch);
    }
    if code.n_total() != n || code.k_msg() != m {
        return Err(Error::ShapeMismatch(format!(
            "code is ({}, {}), problem needs ({n}, {m})",
            code.n_total(),
            code.k_msg()
        )));
    }
    Ok(())
}

fn result_views<E>(results: &[WorkerResult<E>]) -> Vec<(usize, &[E])> {
    results
        .iter()
        .map(|r| (r.worker_index, r.payload.as_slice()))
        .collect()
}

/// Worker-side computation for vectors: the length-`s/m` DFT of the share.
pub fn worker_compute<F: Field>(
    field: &F,
    share: &Share<F::Elem>,
) -> Result<WorkerResult<F::Elem>> {
    Ok(WorkerResult::new(
        share.worker_index,
        fft(field, &share.payload)?,
    ))
}

// ---------------------------------------------------------------------------
// 1-D
// ---------------------------------------------------------------------------

/// Coded FFT for a length-`s` vector over `N` workers with threshold `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy<F: Field> {
    config: ProblemConfig<F>,
    code: MdsCode<F>,
}

/// Plans a strategy with the default Vandermonde code.
pub fn plan_strategy<F: Field>(config: ProblemConfig<F>) -> Result<Strategy<F>> {
    Strategy::plan(config)
}

impl<F: Field> Strategy<F> {
    pub fn plan(config: ProblemConfig<F>) -> Result<Self> {
        Self::validate(&config)?;
        let code = MdsCode::vandermonde(config.field.clone(), config.n_workers, config.m)?;
        Ok(Self { config, code })
    }

    /// Uses a caller-chosen (N, m) MDS code.
    pub fn with_code(config: ProblemConfig<F>, code: MdsCode<F>) -> Result<Self> {
        Self::validate(&config)?;
        check_code(&code, &config.field, config.n_workers, config.m)?;
        Ok(Self { config, code })
    }

    fn validate(config: &ProblemConfig<F>) -> Result<()> {
        if config.shape.len() != 1 {
            return Err(Error::ShapeMismatch(format!(
                "vector strategy needs a rank-1 shape, got {:?}",
                config.shape
            )));
        }
        config.check_threshold()?;
        let s = config.s();
        if s == 0 || !s.is_multiple_of(config.m) {
            return Err(Error::IndivisibleLength {
                len: s,
                m: config.m,
            });
        }
        // both the full and the per-worker transform need roots of unity
        config.field.root_power(s, 1)?;
        Ok(())
    }

    pub fn config(&self) -> &ProblemConfig<F> {
        &self.config
    }

    pub fn code(&self) -> &MdsCode<F> {
        &self.code
    }

    pub fn field(&self) -> &F {
        &self.config.field
    }

    /// K* = m.
    pub fn recovery_threshold(&self) -> usize {
        self.config.m
    }

    pub fn n_workers(&self) -> usize {
        self.config.n_workers
    }

    /// Elements each worker stores and returns, `s/m`.
    pub fn share_len(&self) -> usize {
        self.config.s() / self.config.m
    }

    /// `a_i = f_i(x)`: interleave, then MDS-encode.
    pub fn encode_input(&self, x: &[F::Elem]) -> Result<Vec<Share<F::Elem>>> {
        if x.len() != self.config.s() {
            return Err(Error::ShapeMismatch(format!(
                "input length {} but strategy expects {}",
                x.len(),
                self.config.s()
            )));
        }
        let set = interleave_1d(x, self.config.m)?;
        self.code.encode_shares(set.parts())
    }

    /// `b_i = g_i(a_i)`.
    pub fn worker_compute(&self, share: &Share<F::Elem>) -> Result<WorkerResult<F::Elem>> {
        if share.payload.len() != self.share_len() {
            return Err(Error::ShapeMismatch(format!(
                "share length {} but expected {}",
                share.payload.len(),
                self.share_len()
            )));
        }
        worker_compute(self.field(), share)
    }

    /// Decodes the sub-DFTs from any `m` results and recombines them.
    pub fn master_decode(&self, results: &[WorkerResult<F::Elem>]) -> Result<Vec<F::Elem>> {
        self.master_decode_with_report(results).map(|(x, _)| x)
    }

    pub fn master_decode_with_report(
        &self,
        results: &[WorkerResult<F::Elem>],
    ) -> Result<(Vec<F::Elem>, DecodeReport)> {
        let (subs, report) = self.code.decode_views(&result_views(results))?;
        if subs[0].len() != self.share_len() {
            return Err(Error::ShapeMismatch(
                "result length differs from s/m".into(),
            ));
        }
        let set = InterleavedSet::from_parts(subs, self.config.s())?;
        Ok((recombine_1d(self.field(), &set)?, report))
    }

    /// Runs the whole pipeline with only `available` workers responding.
    pub fn run(&self, x: &[F::Elem], available: &[usize]) -> Result<Vec<F::Elem>> {
        let shares = self.encode_input(x)?;
        let results = available
            .iter()
            .map(|&i| {
                let share = shares.get(i).ok_or(Error::WorkerOutOfRange {
                    index: i,
                    n: self.n_workers(),
                })?;
                self.worker_compute(share)
            })
            .collect::<Result<Vec<_>>>()?;
        self.master_decode(&results)
    }
}

// ---------------------------------------------------------------------------
// n-D
// ---------------------------------------------------------------------------

/// Coded FFT for an n-dimensional tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct NdStrategy<F: Field> {
    config: ProblemConfig<F>,
    factors: NdFactors,
    code: MdsCode<F>,
}

impl<F: Field> NdStrategy<F> {
    pub fn plan(config: ProblemConfig<F>) -> Result<Self> {
        config.check_threshold()?;
        let factors = choose_factors_nd(&config.shape, config.m)?;
        for &len in &config.shape {
            config.field.root_power(len, 1)?;
        }
        let code = MdsCode::vandermonde(config.field.clone(), config.n_workers, config.m)?;
        Ok(Self {
            config,
            factors,
            code,
        })
    }

    pub fn factors(&self) -> &NdFactors {
        &self.factors
    }

    pub fn code(&self) -> &MdsCode<F> {
        &self.code
    }

    pub fn recovery_threshold(&self) -> usize {
        self.config.m
    }

    pub fn n_workers(&self) -> usize {
        self.config.n_workers
    }

    pub fn part_shape(&self) -> Vec<usize> {
        self.factors.part_shape(&self.config.shape)
    }

    pub fn share_len(&self) -> usize {
        self.config.s() / self.config.m
    }

    /// Interleaves along every axis and encodes the flattened parts.
    pub fn encode_input(&self, t: &Tensor<F::Elem>) -> Result<Vec<Share<F::Elem>>> {
        if t.shape() != &self.config.shape[..] {
            return Err(Error::ShapeMismatch(format!(
                "tensor shape {:?} but strategy expects {:?}",
                t.shape(),
                self.config.shape
            )));
        }
        let parts = interleave_nd(t, &self.factors)?;
        let views: Vec<&[F::Elem]> = parts.iter().map(|p| p.data()).collect();
        Ok(self
            .code
            .encode_views(&views)?
            .into_iter()
            .enumerate()
            .map(|(i, p)| Share::new(i, p))
            .collect())
    }

    /// n-D DFT of the worker's coded tensor.
    pub fn worker_compute(&self, share: &Share<F::Elem>) -> Result<WorkerResult<F::Elem>> {
        let tensor = Tensor::new(self.part_shape(), share.payload.clone())?;
        Ok(WorkerResult::new(
            share.worker_index,
            dft_nd(&self.config.field, &tensor)?.into_data(),
        ))
    }

    pub fn master_decode(&self, results: &[WorkerResult<F::Elem>]) -> Result<Tensor<F::Elem>> {
        let (subs, _) = self.code.decode_views(&result_views(results))?;
        let part_shape = self.part_shape();
        let parts = subs
            .into_iter()
            .map(|d| Tensor::new(part_shape.clone(), d))
            .collect::<Result<Vec<_>>>()?;
        recombine_nd(
            &self.config.field,
            &parts,
            &self.config.shape,
            &self.factors,
        )
    }

    pub fn run(&self, t: &Tensor<F::Elem>, available: &[usize]) -> Result<Tensor<F::Elem>> {
        let shares = self.encode_input(t)?;
        let results = available
            .iter()
            .map(|&i| {
                let share = shares.get(i).ok_or(Error::WorkerOutOfRange {
                    index: i,
                    n: self.n_workers(),
                })?;
                self.worker_compute(share)
            })
            .collect::<Result<Vec<_>>>()?;
        self.master_decode(&results)
    }
}

/// n-dimensional coded FFT end to end, with only `available` workers
/// returning results.
pub fn coded_fft_nd<F: Field>(
    field: &F,
    t: &Tensor<F::Elem>,
    m: usize,
    n_workers: usize,
    available: &[usize],
) -> Result<Tensor<F::Elem>> {
    NdStrategy::plan(ProblemConfig::tensor(
        field.clone(),
        t.shape().to_vec(),
        m,
        n_workers,
    ))?
    .run(t, available)
}

// ---------------------------------------------------------------------------
// Multiple inputs
// ---------------------------------------------------------------------------

/// How `q` inputs are split between cross-input bundling (`m_tilde`) and
/// per-axis interleaving (`nd_factors`), with `m_tilde * prod m_k = m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundlePlan {
    pub m_tilde: usize,
    /// `m_tilde` contiguous, equal-size blocks partitioning `0..q`.
    pub subsets: Vec<Vec<usize>>,
    pub nd_factors: NdFactors,
}

impl BundlePlan {
    pub fn q(&self) -> usize {
        self.subsets.iter().map(Vec::len).sum()
    }

    pub fn m(&self) -> usize {
        self.m_tilde * self.nd_factors.product()
    }
}

/// Picks the largest divisor `m_tilde` of `q` dividing `m` for which the
/// remaining `m / m_tilde` factors over the axes.
pub fn bundle_inputs(q: usize, shape: &[usize], m: usize) -> Result<BundlePlan> {
    let no = || Error::NoFactorization {
        shape: shape.to_vec(),
        m,
    };
    if q == 0 || m == 0 {
        return Err(no());
    }
    for m_tilde in (1..=q)
        .rev()
        .filter(|d| q.is_multiple_of(*d) && m.is_multiple_of(*d))
    {
        if let Ok(nd_factors) = choose_factors_nd(shape, m / m_tilde) {
            let block = q / m_tilde;
            let subsets = (0..m_tilde)
                .map(|g| (g * block..(g + 1) * block).collect())
                .collect();
            return Ok(BundlePlan {
                m_tilde,
                subsets,
                nd_factors,
            });
        }
    }
    Err(no())
}

/// Coded FFT over a batch of `q` same-shape tensors.
///
/// Message symbol `g * P + p` (with `P = prod m_k`) is the concatenation,
/// over `h` in `S_g` ascending, of the `p`-th interleaved part of input `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiStrategy<F: Field> {
    field: F,
    shape: Vec<usize>,
    plan: BundlePlan,
    code: MdsCode<F>,
}

impl<F: Field> MultiStrategy<F> {
    pub fn plan(field: F, shape: Vec<usize>, plan: BundlePlan, n_workers: usize) -> Result<Self> {
        let m = plan.m();
        if plan.subsets.len() != plan.m_tilde
            || plan
                .subsets
                .iter()
                .any(|s| s.len() != plan.q() / plan.m_tilde)
        {
            return Err(Error::ShapeMismatch(
                "bundle subsets are not equal-size".into(),
            ));
        }
        NdFactors::new(plan.nd_factors.factors().to_vec(), &shape)?;
        if m > n_workers {
            return Err(Error::InfeasibleThreshold { m, n: n_workers });
        }
        for &len in &shape {
            field.root_power(len, 1)?;
        }
        let code = MdsCode::vandermonde(field.clone(), n_workers, m)?;
        Ok(Self {
            field,
            shape,
            plan,
            code,
        })
    }

    pub fn bundle_plan(&self) -> &BundlePlan {
        &self.plan
    }

    pub fn code(&self) -> &MdsCode<F> {
        &self.code
    }

    pub fn recovery_threshold(&self) -> usize {
        self.plan.m()
    }

    pub fn n_workers(&self) -> usize {
        self.code.n_total()
    }

    fn part_shape(&self) -> Vec<usize> {
        self.plan.nd_factors.part_shape(&self.shape)
    }

    fn part_len(&self) -> usize {
        self.part_shape().iter().product()
    }

    fn per_subset(&self) -> usize {
        self.plan.q() / self.plan.m_tilde
    }

    /// `q * s / m`.
    pub fn share_len(&self) -> usize {
        self.per_subset() * self.part_len()
    }

    pub fn encode_inputs(&self, inputs: &[Tensor<F::Elem>]) -> Result<Vec<Share<F::Elem>>> {
        if inputs.len() != self.plan.q() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} inputs, got {}",
                self.plan.q(),
                inputs.len()
            )));
        }
        if let Some(bad) = inputs.iter().find(|t| t.shape() != &self.shape[..]) {
            return Err(Error::ShapeMismatch(format!(
                "input shape {:?} but plan expects {:?}",
                bad.shape(),
                self.shape
            )));
        }
        let interleaved = inputs
            .iter()
            .map(|t| interleave_nd(t, &self.plan.nd_factors))
            .collect::<Result<Vec<_>>>()?;
        let parts_per_input = self.plan.nd_factors.product();
        let mut symbols = Vec::with_capacity(self.plan.m());
        for subset in &self.plan.subsets {
            #[allow(clippy::needless_range_loop)]
            for p in 0..parts_per_input {
                let mut symbol = Vec::with_capacity(self.share_len());
                for &h in subset {
                    symbol.extend_from_slice(interleaved[h][p].data());
                }
                symbols.push(symbol);
            }
        }
        self.code.encode_shares(&symbols)
    }

    /// n-D DFT of every coded tensor in the payload.
    pub fn worker_compute(&self, share: &Share<F::Elem>) -> Result<WorkerResult<F::Elem>> {
        if share.payload.len() != self.share_len() {
            return Err(Error::ShapeMismatch(format!(
                "share length {} but expected {}",
                share.payload.len(),
                self.share_len()
            )));
        }
        let part_shape = self.part_shape();
        let mut out = Vec::with_capacity(share.payload.len());
        for chunk in share.payload.chunks(self.part_len()) {
            let t = Tensor::new(part_shape.clone(), chunk.to_vec())?;
            out.extend(dft_nd(&self.field, &t)?.into_data());
        }
        Ok(WorkerResult::new(share.worker_index, out))
    }

    pub fn master_decode(&self, results: &[WorkerResult<F::Elem>]) -> Result<Vec<Tensor<F::Elem>>> {
        let (symbols, _) = self.code.decode_views(&result_views(results))?;
        if symbols[0].len() != self.share_len() {
            return Err(Error::ShapeMismatch(
                "result length differs from q*s/m".into(),
            ));
        }
        let part_shape = self.part_shape();
        let part_len = self.part_len();
        let parts_per_input = self.plan.nd_factors.product();
        let mut outputs: Vec<Option<Tensor<F::Elem>>> = vec![None; self.plan.q()];
        for (g, subset) in self.plan.subsets.iter().enumerate() {
            for (r, &h) in subset.iter().enumerate() {
                let parts = (0..parts_per_input)
                    .map(|p| {
                        let sym = &symbols[g * parts_per_input + p];
                        Tensor::new(
                            part_shape.clone(),
                            sym[r * part_len..(r + 1) * part_len].to_vec(),
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                outputs[h] = Some(recombine_nd(
                    &self.field,
                    &parts,
                    &self.shape,
                    &self.plan.nd_factors,
                )?);
            }
        }
        outputs
            .into_iter()
            .map(|o| {
                o.ok_or_else(|| Error::ShapeMismatch("bundle subsets do not cover 0..q".into()))
            })
            .collect()
    }

    pub fn run(
        &self,
        inputs: &[Tensor<F::Elem>],
        available: &[usize],
    ) -> Result<Vec<Tensor<F::Elem>>> {
        let shares = self.encode_inputs(inputs)?;
        let results = available
            .iter()
            .map(|&i| {
                let share = shares.get(i).ok_or(Error::WorkerOutOfRange {
                    index: i,
                    n: self.n_workers(),
                })?;
                self.worker_compute(share)
            })
            .collect::<Result<Vec<_>>>()?;
        self.master_decode(&results)
    }
}

/// Multi-input coded FFT end to end.
pub fn coded_fft_multi<F: Field>(
    field: &F,
    plan: &BundlePlan,
    inputs: &[Tensor<F::Elem>],
    n_workers: usize,
    available: &[usize],
) -> Result<Vec<Tensor<F::Elem>>> {
    let shape = inputs
        .first()
        .ok_or_else(|| Error::ShapeMismatch("no inputs".into()))?
        .shape()
        .to_vec();
    MultiStrategy::plan(field.clone(), shape, plan.clone(), n_workers)?.run(inputs, available)
}
