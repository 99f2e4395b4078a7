//! C ABI for the coded FFT pipeline.
//!
//! Strategies are opaque handles created with `*_new` and released with
//! `*_free`. Every fallible call returns a [`CfftStatus`]; on failure the
//! message is available from [`cfft_last_error`] until the next failing call
//! on the same thread. Buffers are caller-allocated; lengths are in
//! elements, not bytes.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;

use coded_fft::coded::{ProblemConfig, Strategy, WorkerResult};
use coded_fft::error::Error;
use coded_fft::fft::fft;
use coded_fft::field::{ComplexField, Field, PrimeField};
use coded_fft::mds::Share;
use coded_fft::sim::{baseline_threshold, StrategyKind};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfftStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidField = 3,
    RootUnavailable = 4,
    IndivisibleLength = 5,
    InfeasibleThreshold = 6,
    InsufficientShares = 7,
    DuplicateShare = 8,
    WorkerOutOfRange = 9,
    LengthMismatch = 10,
    InapplicableBaseline = 11,
    NotMds = 12,
    Internal = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CfftStrategyKind {
    Coded = 0,
    ShortDot = 1,
    Repetition = 2,
}

/// Complex number laid out as two doubles, `re` first.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfftComplex {
    pub re: f64,
    pub im: f64,
}

/// Coded strategy over GF(p).
pub struct CfftPrimeStrategy(Strategy<PrimeField>);

/// Coded strategy over the complex numbers.
pub struct CfftComplexStrategy(Strategy<ComplexField>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> CfftStatus {
    match e {
        Error::InvalidField(_) | Error::FieldMismatch => CfftStatus::InvalidField,
        Error::RootUnavailable { .. } => CfftStatus::RootUnavailable,
        Error::IndivisibleLength { .. } => CfftStatus::IndivisibleLength,
        Error::InfeasibleThreshold { .. } => CfftStatus::InfeasibleThreshold,
        Error::InsufficientShares { .. } => CfftStatus::InsufficientShares,
        Error::DuplicateShare(_) => CfftStatus::DuplicateShare,
        Error::WorkerOutOfRange { .. } => CfftStatus::WorkerOutOfRange,
        Error::ShapeMismatch(_) => CfftStatus::LengthMismatch,
        Error::InapplicableBaseline(_) => CfftStatus::InapplicableBaseline,
        Error::NotMds { .. } | Error::DegeneratePoints => CfftStatus::NotMds,
        Error::InvalidParameter(_) | Error::NoFactorization { .. } => CfftStatus::InvalidArgument,
        _ => CfftStatus::Internal,
    }
}

struct Fail(CfftStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult = Result<(), Fail>;

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> FfiResult) -> CfftStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CfftStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CfftStatus::Internal
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(CfftStatus::NullPointer, format!("{what} is null"))
}

fn length(what: &str, got: usize, want: usize) -> Fail {
    Fail(
        CfftStatus::LengthMismatch,
        format!("{what} has {got} elements, expected {want}"),
    )
}

/// # Safety
/// `p` must be null or valid for `len` reads.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or valid for `len` writes.
unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

/// Element conversion between the C and Rust representations.
trait Elem<F: Field>: Copy {
    fn to_field(self, field: &F) -> Result<F::Elem, Fail>;
    fn from_field(e: F::Elem) -> Self;
}

impl Elem<PrimeField> for u64 {
    fn to_field(self, field: &PrimeField) -> Result<u64, Fail> {
        if self >= field.modulus() {
            return Err(Fail(
                CfftStatus::InvalidArgument,
                format!("residue {self} is not below {}", field.modulus()),
            ));
        }
        Ok(self)
    }

    fn from_field(e: u64) -> Self {
        e
    }
}

impl Elem<ComplexField> for CfftComplex {
    fn to_field(self, _: &ComplexField) -> Result<Complex64, Fail> {
        Ok(Complex64::new(self.re, self.im))
    }

    fn from_field(e: Complex64) -> Self {
        CfftComplex { re: e.re, im: e.im }
    }
}

fn convert<F: Field, C: Elem<F>>(field: &F, xs: &[C]) -> Result<Vec<F::Elem>, Fail> {
    xs.iter().map(|&x| x.to_field(field)).collect()
}

fn write_out<F: Field, C: Elem<F>>(src: &[F::Elem], dst: &mut [C]) {
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = C::from_field(s);
    }
}

fn encode<F: Field, C: Elem<F>>(st: &Strategy<F>, x: &[C], out: &mut [C]) -> FfiResult {
    let s = st.config().s();
    if x.len() != s {
        return Err(length("input", x.len(), s));
    }
    let want = st.n_workers() * st.share_len();
    if out.len() != want {
        return Err(length("share buffer", out.len(), want));
    }
    let shares = st.encode_input(&convert(st.field(), x)?)?;
    for (share, chunk) in shares.iter().zip(out.chunks_mut(st.share_len())) {
        write_out(&share.payload, chunk);
    }
    Ok(())
}

fn compute<F: Field, C: Elem<F>>(st: &Strategy<F>, share: &[C], out: &mut [C]) -> FfiResult {
    let len = st.share_len();
    if share.len() != len {
        return Err(length("share", share.len(), len));
    }
    if out.len() != len {
        return Err(length("result buffer", out.len(), len));
    }
    let result = st.worker_compute(&Share::new(0, convert(st.field(), share)?))?;
    write_out(&result.payload, out);
    Ok(())
}

fn decode<F: Field, C: Elem<F>>(
    st: &Strategy<F>,
    workers: &[usize],
    results: &[C],
    out: &mut [C],
) -> FfiResult {
    let len = st.share_len();
    if results.len() != workers.len() * len {
        return Err(length("results", results.len(), workers.len() * len));
    }
    let s = st.config().s();
    if out.len() != s {
        return Err(length("output buffer", out.len(), s));
    }
    let results = workers
        .iter()
        .zip(results.chunks(len.max(1)))
        .map(|(&w, r)| Ok(WorkerResult::new(w, convert(st.field(), r)?)))
        .collect::<Result<Vec<_>, Fail>>()?;
    let x = st.master_decode(&results)?;
    write_out(&x, out);
    Ok(())
}

// ---------------------------------------------------------------------------
// Prime field
// ---------------------------------------------------------------------------

/// Plans a length-`s` transform over GF(`modulus`) split into `m` parts for
/// `n_workers` workers. On success `*out` owns a new handle.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn cfft_prime_strategy_new(
    modulus: u64,
    s: usize,
    m: usize,
    n_workers: usize,
    out: *mut *mut CfftPrimeStrategy,
) -> CfftStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let field = PrimeField::new(modulus)?;
        let st = Strategy::plan(ProblemConfig::vector(field, s, m, n_workers))?;
        *out = Box::into_raw(Box::new(CfftPrimeStrategy(st)));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from `cfft_prime_strategy_new`, and must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cfft_prime_strategy_free(handle: *mut CfftPrimeStrategy) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Number of results needed to decode; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cfft_prime_strategy_threshold(handle: *const CfftPrimeStrategy) -> usize {
    handle.as_ref().map_or(0, |h| h.0.recovery_threshold())
}

/// Elements per share and per worker result; 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cfft_prime_strategy_share_len(handle: *const CfftPrimeStrategy) -> usize {
    handle.as_ref().map_or(0, |h| h.0.share_len())
}

/// Writes `n_workers * share_len` residues, share `i` at offset
/// `i * share_len`.
///
/// # Safety
/// `x` must hold `x_len` readable elements and `shares` `shares_len`
/// writable ones.
#[no_mangle]
pub unsafe extern "C" fn cfft_prime_encode(
    handle: *const CfftPrimeStrategy,
    x: *const u64,
    x_len: usize,
    shares: *mut u64,
    shares_len: usize,
) -> CfftStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        encode(
            &h.0,
            slice(x, x_len, "x")?,
            slice_mut(shares, shares_len, "shares")?,
        )
    })
}

/// Transforms one share of `share_len` residues.
///
/// # Safety
/// `share` and `result` must each hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn cfft_prime_worker_compute(
    handle: *const CfftPrimeStrategy,
    share: *const u64,
    result: *mut u64,
    len: usize,
) -> CfftStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        compute(
            &h.0,
            slice(share, len, "share")?,
            slice_mut(result, len, "result")?,
        )
    })
}

/// Decodes from `count` worker results stored back to back in `results`,
/// where result `i` came from worker `workers[i]`. Writes `s` elements.
///
/// # Safety
/// `workers` must hold `count` elements, `results` `count * share_len`, and
/// `out` `out_len`.
#[no_mangle]
pub unsafe extern "C" fn cfft_prime_decode(
    handle: *const CfftPrimeStrategy,
    workers: *const usize,
    results: *const u64,
    count: usize,
    out: *mut u64,
    out_len: usize,
) -> CfftStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let workers = slice(workers, count, "workers")?;
        let results = slice(results, count * h.0.share_len(), "results")?;
        decode(&h.0, workers, results, slice_mut(out, out_len, "out")?)
    })
}

/// Uncoded reference transform over GF(`modulus`); `x` and `out` hold `len`
/// elements.
///
/// # Safety
/// `x` and `out` must each hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn cfft_prime_dft(
    modulus: u64,
    x: *const u64,
    out: *mut u64,
    len: usize,
) -> CfftStatus {
    guard(|| {
        let field = PrimeField::new(modulus)?;
        let x = convert(&field, slice(x, len, "x")?)?;
        write_out(&fft(&field, &x)?, slice_mut(out, len, "out")?);
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Complex field
// ---------------------------------------------------------------------------

/// Plans a length-`s` complex transform. `tolerance` is the relative
/// equality tolerance used for singularity checks; pass 0 for the default.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn cfft_complex_strategy_new(
    tolerance: f64,
    s: usize,
    m: usize,
    n_workers: usize,
    out: *mut *mut CfftComplexStrategy,
) -> CfftStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let field = if tolerance == 0.0 {
            ComplexField::default()
        } else {
            ComplexField::new(tolerance)?
        };
        let st = Strategy::plan(ProblemConfig::vector(field, s, m, n_workers))?;
        *out = Box::into_raw(Box::new(CfftComplexStrategy(st)));
        Ok(())
    })
}

/// # Safety
/// `handle` must be null or come from `cfft_complex_strategy_new`, and must
/// not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn cfft_complex_strategy_free(handle: *mut CfftComplexStrategy) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cfft_complex_strategy_threshold(
    handle: *const CfftComplexStrategy,
) -> usize {
    handle.as_ref().map_or(0, |h| h.0.recovery_threshold())
}

/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cfft_complex_strategy_share_len(
    handle: *const CfftComplexStrategy,
) -> usize {
    handle.as_ref().map_or(0, |h| h.0.share_len())
}

/// # Safety
/// As for `cfft_prime_encode`.
#[no_mangle]
pub unsafe extern "C" fn cfft_complex_encode(
    handle: *const CfftComplexStrategy,
    x: *const CfftComplex,
    x_len: usize,
    shares: *mut CfftComplex,
    shares_len: usize,
) -> CfftStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        encode(
            &h.0,
            slice(x, x_len, "x")?,
            slice_mut(shares, shares_len, "shares")?,
        )
    })
}

/// # Safety
/// As for `cfft_prime_worker_compute`.
#[no_mangle]
pub unsafe extern "C" fn cfft_complex_worker_compute(
    handle: *const CfftComplexStrategy,
    share: *const CfftComplex,
    result: *mut CfftComplex,
    len: usize,
) -> CfftStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        compute(
            &h.0,
            slice(share, len, "share")?,
            slice_mut(result, len, "result")?,
        )
    })
}

/// # Safety
/// As for `cfft_prime_decode`.
#[no_mangle]
pub unsafe extern "C" fn cfft_complex_decode(
    handle: *const CfftComplexStrategy,
    workers: *const usize,
    results: *const CfftComplex,
    count: usize,
    out: *mut CfftComplex,
    out_len: usize,
) -> CfftStatus {
    guard(|| {
        let h = handle.as_ref().ok_or_else(|| null("handle"))?;
        let workers = slice(workers, count, "workers")?;
        let results = slice(results, count * h.0.share_len(), "results")?;
        decode(&h.0, workers, results, slice_mut(out, out_len, "out")?)
    })
}

/// # Safety
/// `x` and `out` must each hold `len` elements.
#[no_mangle]
pub unsafe extern "C" fn cfft_complex_dft(
    x: *const CfftComplex,
    out: *mut CfftComplex,
    len: usize,
) -> CfftStatus {
    guard(|| {
        let field = ComplexField::default();
        let x = convert(&field, slice(x, len, "x")?)?;
        write_out(&fft(&field, &x)?, slice_mut(out, len, "out")?);
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Misc
// ---------------------------------------------------------------------------

/// Recovery threshold of a strategy family for `n_workers` and `m` parts.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn cfft_baseline_threshold(
    kind: CfftStrategyKind,
    n_workers: usize,
    m: usize,
    out: *mut usize,
) -> CfftStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let kind = match kind {
            CfftStrategyKind::Coded => StrategyKind::Coded,
            CfftStrategyKind::ShortDot => StrategyKind::ShortDot,
            CfftStrategyKind::Repetition => StrategyKind::Repetition,
        };
        *out = baseline_threshold(kind, n_workers, m)?;
        Ok(())
    })
}

/// Message of the last failing call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cfft_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
