//! Virtual-time straggler simulator.
//!
//! Each trial draws one completion time per worker; a strategy that needs
//! `k` results finishes at the k-th order statistic of those times. The
//! coded strategy also runs the real encode / compute / decode pipeline on
//! the `k` fastest workers and checks the output against the reference
//! transform, so no latency is ever reported for a wrong answer.
//!
//! Randomness is derived from `(seed, trial, worker)` alone, so outcomes do
//! not depend on thread scheduling or on how many trials run in parallel.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::coded::{ProblemConfig, Strategy};
use crate::error::{Error, Result};
use crate::fft::fft;
use crate::field::{vectors_close, Field, PrimeField};

/// Header of the per-trial CSV.
pub const TRIALS_CSV_HEADER: &str = "trial,strategy,threshold_k,completion_time_s,comm_elements";
/// Header of the summary CSV.
pub const SUMMARY_CSV_HEADER: &str =
    "strategy,threshold_k,trials,mean_s,median_s,p95_s,comm_elements";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    Coded,
    ShortDot,
    Repetition,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [
        StrategyKind::Coded,
        StrategyKind::ShortDot,
        StrategyKind::Repetition,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Coded => "coded",
            StrategyKind::ShortDot => "shortdot",
            StrategyKind::Repetition => "repetition",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Recovery threshold of each strategy: coded `m`, short-dot `N - N/m + m`,
/// uncoded repetition `N - N/m^2 + 1`.
pub fn baseline_threshold(kind: StrategyKind, n: usize, m: usize) -> Result<usize> {
    if m == 0 || n == 0 {
        return Err(Error::InapplicableBaseline(format!("N={n}, m={m}")));
    }
    match kind {
        StrategyKind::Coded => {
            if m > n {
                return Err(Error::InapplicableBaseline(format!(
                    "coded needs m <= N (N={n}, m={m})"
                )));
            }
            Ok(m)
        }
        StrategyKind::ShortDot => {
            if !n.is_multiple_of(m) || n < m * m {
                return Err(Error::InapplicableBaseline(format!(
                    "short-dot needs m | N and N >= m^2 (N={n}, m={m})"
                )));
            }
            Ok(n - n / m + m)
        }
        StrategyKind::Repetition => {
            if !n.is_multiple_of(m * m) {
                return Err(Error::InapplicableBaseline(format!(
                    "repetition needs m^2 | N (N={n}, m={m})"
                )));
            }
            Ok(n - n / (m * m) + 1)
        }
    }
}

// ---------------------------------------------------------------------------
// Latency
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub enum LatencyModel {
    /// `shift + work * elements + Exp(rate)`.
    ShiftedExponential { shift: f64, rate: f64, work: f64 },
    /// `shift + work * elements`.
    Deterministic { shift: f64, work: f64 },
    /// Recorded per-worker times; trial `t` replays row `t mod rows`.
    Trace { rows: Vec<Vec<f64>> },
}

impl LatencyModel {
    fn validate(&self, n_workers: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            LatencyModel::ShiftedExponential { shift, rate, work } => {
                if !(*shift >= 0.0 && *work >= 0.0 && *rate > 0.0 && rate.is_finite()) {
                    return bad(format!(
                        "need shift >= 0, work >= 0, rate > 0; got {self:?}"
                    ));
                }
            }
            LatencyModel::Deterministic { shift, work } => {
                if !(*shift >= 0.0 && *work >= 0.0) {
                    return bad(format!("need shift >= 0 and work >= 0; got {self:?}"));
                }
            }
            LatencyModel::Trace { rows } => {
                if rows.is_empty() {
                    return bad("latency trace is empty".into());
                }
                if let Some(r) = rows.iter().find(|r| r.len() < n_workers) {
                    return bad(format!(
                        "trace row has {} entries for {n_workers} workers",
                        r.len()
                    ));
                }
                if rows.iter().flatten().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return bad("trace latencies must be finite and non-negative".into());
                }
            }
        }
        Ok(())
    }

    /// Completion time of `worker` in `trial` when it processes `elements`
    /// field elements.
    pub fn sample(&self, seed: u64, trial: u64, worker: usize, elements: usize) -> f64 {
        match self {
            LatencyModel::ShiftedExponential { shift, rate, work } => {
                let mut rng = stream(seed, trial, worker as u64);
                let exp = Exp::new(*rate).expect("validated rate");
                shift + work * elements as f64 + exp.sample(&mut rng)
            }
            LatencyModel::Deterministic { shift, work } => shift + work * elements as f64,
            LatencyModel::Trace { rows } => rows[(trial % rows.len() as u64) as usize][worker],
        }
    }

    /// Parses a trace file: one trial per line, comma-separated per-worker
    /// seconds. Blank lines and `#` comments are skipped.
    pub fn load_trace(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| {
                    Error::MalformedFile(format!("{}:{}: {e}", path.display(), lineno + 1))
                })?;
            rows.push(row);
        }
        Ok(LatencyModel::Trace { rows })
    }
}

impl FromStr for LatencyModel {
    type Err = Error;

    /// `shifted-exp:mu=F,shift=F,work=F`, `deterministic:shift=F,work=F` or
    /// `trace:path=FILE`. Omitted numeric keys default to shift 0, work 0,
    /// mu 1.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let mut kv = HashMap::new();
        for pair in args.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected key=value, got {pair:?}"))
            })?;
            kv.insert(k.trim(), v.trim());
        }
        let num = |key: &str, default: f64| -> Result<f64> {
            kv.get(key).map_or(Ok(default), |v| {
                v.parse()
                    .map_err(|e| Error::InvalidParameter(format!("bad {key}={v}: {e}")))
            })
        };
        let allow = |keys: &[&str]| -> Result<()> {
            match kv.keys().find(|k| !keys.contains(k)) {
                Some(k) => Err(Error::InvalidParameter(format!(
                    "unknown latency key {k:?} for {kind}"
                ))),
                None => Ok(()),
            }
        };
        match kind.trim() {
            "shifted-exp" => {
                allow(&["mu", "shift", "work"])?;
                Ok(LatencyModel::ShiftedExponential {
                    shift: num("shift", 0.0)?,
                    rate: num("mu", 1.0)?,
                    work: num("work", 0.0)?,
                })
            }
            "deterministic" => {
                allow(&["shift", "work"])?;
                Ok(LatencyModel::Deterministic {
                    shift: num("shift", 0.0)?,
                    work: num("work", 0.0)?,
                })
            }
            "trace" => {
                allow(&["path"])?;
                let path = kv
                    .get("path")
                    .ok_or_else(|| Error::InvalidParameter("trace needs path=FILE".into()))?;
                Self::load_trace(Path::new(path))
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown latency model {other:?}"
            ))),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent RNG stream for `(seed, trial, lane)`.
fn stream(seed: u64, trial: u64, lane: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(splitmix64(seed) ^ trial) ^ lane);
    ChaCha8Rng::seed_from_u64(key)
}

/// Lane used for the trial's random input vector.
const INPUT_LANE: u64 = u64::MAX;

// ---------------------------------------------------------------------------
// Trials
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<F: Field> {
    pub problem: ProblemConfig<F>,
    pub latency: LatencyModel,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyOutcome {
    pub kind: StrategyKind,
    pub threshold: usize,
    pub completion_time: f64,
    pub comm_elements: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    /// Per-worker completion times, indexed by worker.
    pub latencies: Vec<f64>,
    /// Coded first, then the applicable baselines.
    pub strategies: Vec<StrategyOutcome>,
    /// Baselines whose threshold is undefined for these parameters.
    pub skipped: Vec<(StrategyKind, String)>,
}

impl TrialOutcome {
    pub fn get(&self, kind: StrategyKind) -> Option<&StrategyOutcome> {
        self.strategies.iter().find(|o| o.kind == kind)
    }

    pub fn coded(&self) -> &StrategyOutcome {
        self.get(StrategyKind::Coded)
            .expect("coded outcome is always recorded")
    }
}

/// Communication delivered to the master by the coded strategy, in field
/// elements: `m` results of `s/m` elements, i.e. exactly `s`.
pub fn comm_load(outcome: &TrialOutcome) -> usize {
    outcome.coded().comm_elements
}

/// A planned simulation campaign.
#[derive(Debug, Clone)]
pub struct Simulator<F: Field> {
    config: SimConfig<F>,
    strategy: Strategy<F>,
    thresholds: Vec<(StrategyKind, Result<usize>)>,
}

impl<F: Field> Simulator<F> {
    pub fn new(config: SimConfig<F>) -> Result<Self> {
        if config.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        config.latency.validate(config.problem.n_workers)?;
        let strategy = Strategy::plan(config.problem.clone())?;
        let (n, m) = (config.problem.n_workers, config.problem.m);
        let thresholds = StrategyKind::ALL
            .iter()
            .map(|&k| (k, baseline_threshold(k, n, m)))
            .collect();
        Ok(Self {
            config,
            strategy,
            thresholds,
        })
    }

    pub fn config(&self) -> &SimConfig<F> {
        &self.config
    }

    /// Baselines skipped for these parameters, with the reason.
    pub fn skipped(&self) -> Vec<(StrategyKind, String)> {
        self.thresholds
            .iter()
            .filter_map(|(k, t)| t.as_ref().err().map(|e| (*k, e.to_string())))
            .collect()
    }

    pub fn run_trial(&self, trial: u64) -> Result<TrialOutcome> {
        let problem = &self.config.problem;
        let share_len = self.strategy.share_len();
        let latencies: Vec<f64> = (0..problem.n_workers)
            .map(|w| {
                self.config
                    .latency
                    .sample(self.config.seed, trial, w, share_len)
            })
            .collect();
        // worker indices by (time, index)
        let mut order: Vec<usize> = (0..problem.n_workers).collect();
        order.sort_by(|&a, &b| latencies[a].total_cmp(&latencies[b]).then(a.cmp(&b)));

        self.verify_pipeline(trial, &order[..self.strategy.recovery_threshold()])?;

        let mut strategies = Vec::new();
        let mut skipped = Vec::new();
        for (kind, threshold) in &self.thresholds {
            match threshold {
                Ok(k) => strategies.push(StrategyOutcome {
                    kind: *kind,
                    threshold: *k,
                    completion_time: latencies[order[k - 1]],
                    comm_elements: k * share_len,
                }),
                Err(e) => skipped.push((*kind, e.to_string())),
            }
        }
        Ok(TrialOutcome {
            trial,
            latencies,
            strategies,
            skipped,
        })
    }

    /// Encodes a random input, lets only `fastest` compute, decodes and
    /// compares against the reference FFT.
    fn verify_pipeline(&self, trial: u64, fastest: &[usize]) -> Result<()> {
        let field = self.strategy.field();
        let mut rng = stream(self.config.seed, trial, INPUT_LANE);
        let x: Vec<F::Elem> = (0..self.config.problem.s())
            .map(|_| field.random(&mut rng))
            .collect();
        let shares = self.strategy.encode_input(&x)?;
        let results = fastest
            .iter()
            .map(|&w| self.strategy.worker_compute(&shares[w]))
            .collect::<Result<Vec<_>>>()?;
        let (decoded, report) = self.strategy.master_decode_with_report(&results)?;
        let reference = fft(field, &x)?;
        let slack = x.len() as f64 * report.condition;
        if !vectors_close(field, &decoded, &reference, slack) {
            return Err(Error::PipelineMismatch);
        }
        Ok(())
    }

    /// All trials, in trial order. Trials are spread over threads; the
    /// result does not depend on the split.
    pub fn run(&self) -> Result<Vec<TrialOutcome>> {
        let trials = self.config.trials;
        let threads = std::thread::available_parallelism()
            .map_or(1, |n| n.get())
            .min(trials as usize)
            .max(1);
        let chunk = trials.div_ceil(threads as u64);
        let mut out: Vec<TrialOutcome> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|t| {
                    let (lo, hi) = (t * chunk, ((t + 1) * chunk).min(trials));
                    scope.spawn(move || {
                        (lo..hi)
                            .map(|i| self.run_trial(i))
                            .collect::<Result<Vec<_>>>()
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("simulation thread panicked"))
                .collect::<Result<Vec<Vec<_>>>>()
        })?
        .into_iter()
        .flatten()
        .collect();
        out.sort_by_key(|o| o.trial);
        Ok(out)
    }
}

/// One trial of `config`, planning the strategy on the fly.
pub fn run_trial<F: Field>(config: &SimConfig<F>, trial: u64) -> Result<TrialOutcome> {
    Simulator::new(config.clone())?.run_trial(trial)
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub kind: StrategyKind,
    pub threshold: usize,
    pub trials: usize,
    pub mean: f64,
    pub median: f64,
    pub p95: f64,
    pub comm_elements: usize,
}

/// Per-strategy mean / median / p95 completion time.
pub fn summarize(outcomes: &[TrialOutcome]) -> Vec<SummaryRow> {
    let mut sorted: Vec<&TrialOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| o.trial);
    let mut rows = Vec::new();
    for kind in StrategyKind::ALL {
        let entries: Vec<&StrategyOutcome> = sorted.iter().filter_map(|o| o.get(kind)).collect();
        let Some(first) = entries.first() else {
            continue;
        };
        let mut times: Vec<f64> = entries.iter().map(|e| e.completion_time).collect();
        let mean = times.iter().sum::<f64>() / times.len() as f64;
        times.sort_by(f64::total_cmp);
        let n = times.len();
        let median = if n % 2 == 1 {
            times[n / 2]
        } else {
            (times[n / 2 - 1] + times[n / 2]) / 2.0
        };
        // nearest-rank percentile
        let rank = ((0.95 * n as f64).ceil() as usize).clamp(1, n);
        rows.push(SummaryRow {
            kind,
            threshold: first.threshold,
            trials: n,
            mean,
            median,
            p95: times[rank - 1],
            comm_elements: first.comm_elements,
        });
    }
    rows
}

/// Per-trial CSV in the `trial,strategy,threshold_k,completion_time_s,comm_elements` schema.
pub fn trials_csv(outcomes: &[TrialOutcome]) -> String {
    let mut out = String::from(TRIALS_CSV_HEADER);
    out.push('\n');
    for o in outcomes {
        for s in &o.strategies {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                o.trial, s.kind, s.threshold, s.completion_time, s.comm_elements
            ));
        }
    }
    out
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from(SUMMARY_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.kind, r.threshold, r.trials, r.mean, r.median, r.p95, r.comm_elements
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Converse
// ---------------------------------------------------------------------------

/// Two distinct inputs the first `m - 1` workers cannot tell apart.
#[derive(Debug, Clone, PartialEq)]
pub struct ConverseWitness {
    pub x: Vec<u64>,
    pub x_prime: Vec<u64>,
    /// Workers whose results coincide.
    pub subset: Vec<usize>,
    /// Their (shared) results.
    pub observed: Vec<Vec<u64>>,
}

/// Largest search space `|F|^s` explored exhaustively.
pub const WITNESS_SEARCH_LIMIT: u64 = 1_000_000;

/// Exhaustively searches `F^s` for two inputs whose results on workers
/// `0..m-1` of the default `(m, m)` strategy coincide. Since the output
/// carries `s log|F|` bits and `m - 1` workers return only
/// `(m - 1) s/m log|F|`, such a pair always exists for `m >= 2`; `None` is
/// returned for the vacuous `m = 1`.
pub fn converse_witness(field: &PrimeField, s: usize, m: usize) -> Result<Option<ConverseWitness>> {
    if m <= 1 {
        return Ok(None);
    }
    let p = field.modulus();
    let space = (0..s).try_fold(1u64, |acc, _| {
        acc.checked_mul(p).filter(|&v| v <= WITNESS_SEARCH_LIMIT)
    });
    let space =
        space.ok_or_else(|| Error::SearchTooLarge(format!("{p}^{s} > {WITNESS_SEARCH_LIMIT}")))?;

    let strategy = Strategy::plan(ProblemConfig::vector(field.clone(), s, m, m))?;
    let subset: Vec<usize> = (0..m - 1).collect();
    let mut seen: HashMap<Vec<Vec<u64>>, Vec<u64>> = HashMap::new();
    let mut x = vec![0u64; s];
    for _ in 0..space {
        let shares = strategy.encode_input(&x)?;
        let observed = subset
            .iter()
            .map(|&w| strategy.worker_compute(&shares[w]).map(|r| r.payload))
            .collect::<Result<Vec<_>>>()?;
        match seen.get(&observed) {
            Some(prev) => {
                debug_assert_ne!(fft(field, prev)?, fft(field, &x)?);
                return Ok(Some(ConverseWitness {
                    x: prev.clone(),
                    x_prime: x,
                    subset,
                    observed,
                }));
            }
            None => {
                seen.insert(observed, x.clone());
            }
        }
        // base-p counter, least significant digit first
        for digit in x.iter_mut() {
            *digit += 1;
            if *digit < p {
                break;
            }
            *digit = 0;
        }
    }
    Err(Error::WitnessNotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ComplexField;

    fn exp_config(n: usize, m: usize, s: usize, trials: u64, seed: u64) -> SimConfig<PrimeField> {
        SimConfig {
            problem: ProblemConfig::vector(PrimeField::default(), s, m, n),
            latency: LatencyModel::ShiftedExponential {
                shift: 0.5,
                rate: 1.0,
                work: 0.0,
            },
            trials,
            seed,
        }
    }

    #[test]
    fn thresholds_at_n12_m2() {
        assert_eq!(
            baseline_threshold(StrategyKind::Repetition, 12, 2).unwrap(),
            10
        );
        assert_eq!(
            baseline_threshold(StrategyKind::ShortDot, 12, 2).unwrap(),
            8
        );
        assert_eq!(baseline_threshold(StrategyKind::Coded, 12, 2).unwrap(), 2);
    }

    #[test]
    fn inapplicable_thresholds() {
        assert!(baseline_threshold(StrategyKind::Repetition, 12, 3).is_err());
        assert!(baseline_threshold(StrategyKind::ShortDot, 10, 4).is_err());
        assert!(baseline_threshold(StrategyKind::ShortDot, 6, 3).is_err());
        assert!(baseline_threshold(StrategyKind::Coded, 3, 4).is_err());
    }

    #[test]
    fn threshold_dominance_up_to_64() {
        let mut checked = 0;
        for m in 2..=8usize {
            for n in (m * m + 1)..=64 {
                if n % (m * m) != 0 {
                    continue;
                }
                let c = baseline_threshold(StrategyKind::Coded, n, m).unwrap();
                let sd = baseline_threshold(StrategyKind::ShortDot, n, m).unwrap();
                let rep = baseline_threshold(StrategyKind::Repetition, n, m).unwrap();
                assert!(c < sd && sd < rep, "N={n} m={m}: {c} {sd} {rep}");
                checked += 1;
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn latency_parsing() {
        let l: LatencyModel = "shifted-exp:mu=2,shift=0.5,work=1e-6".parse().unwrap();
        assert_eq!(
            l,
            LatencyModel::ShiftedExponential {
                shift: 0.5,
                rate: 2.0,
                work: 1e-6
            }
        );
        let d: LatencyModel = "deterministic:shift=1".parse().unwrap();
        assert_eq!(
            d,
            LatencyModel::Deterministic {
                shift: 1.0,
                work: 0.0
            }
        );
        assert!("shifted-exp:lambda=2".parse::<LatencyModel>().is_err());
        assert!("gamma:k=2".parse::<LatencyModel>().is_err());
        assert!("shifted-exp:mu=abc".parse::<LatencyModel>().is_err());
    }

    #[test]
    fn trace_latency() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("trace.csv");
        std::fs::write(&path, "# trial rows\n1,2,3\n\n3,2,1\n").unwrap();
        let model: LatencyModel = format!("trace:path={}", path.display()).parse().unwrap();
        let cfg = SimConfig {
            problem: ProblemConfig::vector(PrimeField::default(), 4, 2, 3),
            latency: model,
            trials: 3,
            seed: 0,
        };
        let sim = Simulator::new(cfg).unwrap();
        let out = sim.run().unwrap();
        assert_eq!(out[0].latencies, vec![1.0, 2.0, 3.0]);
        assert_eq!(out[1].latencies, vec![3.0, 2.0, 1.0]);
        assert_eq!(out[2].latencies, vec![1.0, 2.0, 3.0]);
        assert_eq!(out[0].coded().completion_time, 2.0);

        std::fs::write(&path, "1,2\n").unwrap();
        let short = LatencyModel::load_trace(&path).unwrap();
        let cfg = SimConfig {
            problem: ProblemConfig::vector(PrimeField::default(), 4, 2, 3),
            latency: short,
            trials: 1,
            seed: 0,
        };
        assert!(Simulator::new(cfg).is_err());
    }

    #[test]
    fn deterministic_latency_orders_by_threshold() {
        let cfg = SimConfig {
            problem: ProblemConfig::vector(PrimeField::default(), 64, 2, 12),
            latency: LatencyModel::Deterministic {
                shift: 1.0,
                work: 0.01,
            },
            trials: 1,
            seed: 7,
        };
        let out = run_trial(&cfg, 0).unwrap();
        // equal payloads: every worker finishes at 1 + 0.01 * 32
        for s in &out.strategies {
            assert!((s.completion_time - 1.32).abs() < 1e-12);
        }
        let summary = summarize(std::slice::from_ref(&out));
        for (row, s) in summary.iter().zip(&out.strategies) {
            assert_eq!(
                (row.mean, row.median, row.p95),
                (s.completion_time, s.completion_time, s.completion_time)
            );
            assert_eq!(row.threshold, s.threshold);
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let sim = Simulator::new(exp_config(12, 2, 64, 20, 99)).unwrap();
        let a = sim.run_trial(5).unwrap();
        let b = sim.run_trial(5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sim.run_trial(6).unwrap());
        let all = sim.run().unwrap();
        assert_eq!(all[5], a);
        assert_eq!(
            trials_csv(&all),
            trials_csv(
                &Simulator::new(exp_config(12, 2, 64, 20, 99))
                    .unwrap()
                    .run()
                    .unwrap()
            )
        );
    }

    #[test]
    fn samples_respect_shift() {
        let model = LatencyModel::ShiftedExponential {
            shift: 0.5,
            rate: 3.0,
            work: 0.001,
        };
        for t in 0..200 {
            for w in 0..8 {
                assert!(model.sample(1, t, w, 100) >= 0.6);
            }
        }
    }

    #[test]
    fn monte_carlo_ordering_and_comm() {
        let sim = Simulator::new(exp_config(12, 2, 64, 1000, 42)).unwrap();
        let out = sim.run().unwrap();
        for o in &out {
            assert_eq!(comm_load(o), 64);
            let c = o.coded().completion_time;
            let sd = o.get(StrategyKind::ShortDot).unwrap().completion_time;
            let rep = o.get(StrategyKind::Repetition).unwrap().completion_time;
            assert!(c <= sd && sd <= rep);
        }
        let rows = summarize(&out);
        assert_eq!(rows.len(), 3);
        assert!(rows[0].mean < rows[1].mean && rows[1].mean < rows[2].mean);
        assert_eq!(
            rows.iter().map(|r| r.threshold).collect::<Vec<_>>(),
            vec![2, 8, 10]
        );
    }

    #[test]
    fn inapplicable_baselines_are_skipped() {
        let sim = Simulator::new(exp_config(7, 2, 16, 2, 1)).unwrap();
        let out = sim.run_trial(0).unwrap();
        assert_eq!(out.strategies.len(), 1);
        assert_eq!(out.skipped.len(), 2);
        assert_eq!(sim.skipped().len(), 2);
    }

    #[test]
    fn complex_simulation_runs() {
        let cfg = SimConfig {
            problem: ProblemConfig::vector(ComplexField::default(), 96, 4, 8),
            latency: LatencyModel::ShiftedExponential {
                shift: 0.1,
                rate: 2.0,
                work: 0.0,
            },
            trials: 10,
            seed: 3,
        };
        let out = Simulator::new(cfg).unwrap().run().unwrap();
        assert_eq!(out.len(), 10);
        assert!(out.iter().all(|o| comm_load(o) == 96));
    }

    #[test]
    fn comm_load_is_s() {
        for (s, m) in [(4096, 8), (64, 1), (128, 4), (512, 2)] {
            let cfg = SimConfig {
                problem: ProblemConfig::vector(PrimeField::default(), s, m, m + 1),
                latency: LatencyModel::Deterministic {
                    shift: 0.0,
                    work: 0.0,
                },
                trials: 1,
                seed: 0,
            };
            assert_eq!(comm_load(&run_trial(&cfg, 0).unwrap()), s);
        }
    }

    #[test]
    fn converse_gf5() {
        let f = PrimeField::new(5).unwrap();
        let w = converse_witness(&f, 2, 2).unwrap().unwrap();
        assert_ne!(w.x, w.x_prime);
        assert_eq!(w.subset, vec![0]);
        // worker 0 holds c_0 = x_0 under the alpha = 0 row, so the pair
        // differs only in x_1
        assert_eq!(w.x[0], w.x_prime[0]);
        assert_ne!(fft(&f, &w.x).unwrap(), fft(&f, &w.x_prime).unwrap());
    }

    #[test]
    fn converse_gf3_and_larger() {
        let w = converse_witness(&PrimeField::new(3).unwrap(), 2, 2)
            .unwrap()
            .unwrap();
        assert_ne!(w.x, w.x_prime);
        let w = converse_witness(&PrimeField::new(17).unwrap(), 4, 4)
            .unwrap()
            .unwrap();
        assert_eq!(w.subset, vec![0, 1, 2]);
        assert_ne!(w.x, w.x_prime);
    }

    #[test]
    fn converse_vacuous_and_too_large() {
        assert_eq!(
            converse_witness(&PrimeField::new(5).unwrap(), 2, 1).unwrap(),
            None
        );
        assert!(matches!(
            converse_witness(&PrimeField::default(), 4, 2),
            Err(Error::SearchTooLarge(_))
        ));
    }
}
