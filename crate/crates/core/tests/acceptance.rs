//! Acceptance criteria, one line each. Runs without the libtest harness so
//! every line reaches the terminal; exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coded_fft::coded::{
    bundle_inputs, MultiStrategy, NdStrategy, ProblemConfig, Strategy, WorkerResult,
};
use coded_fft::demo::paper_example;
use coded_fft::error::Error;
use coded_fft::fft::{dft_naive, dft_nd_naive, fft, Tensor};
use coded_fft::field::{relative_error, ComplexField, Field, PrimeField};
use coded_fft::sim::{
    baseline_threshold, comm_load, converse_witness, summarize, LatencyModel, SimConfig, Simulator,
    StrategyKind,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, || {
        format!("took {elapsed:.2?}, limit {limit:?}")
    })
}

fn random_vec<F: Field>(field: &F, len: usize, rng: &mut ChaCha8Rng) -> Vec<F::Elem> {
    (0..len).map(|_| field.random(rng)).collect()
}

fn cfft() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cfft"));
    cmd.env_remove("CFFT_SEED");
    cmd
}

// 1 -------------------------------------------------------------------------

fn worked_example() -> Outcome {
    let start = Instant::now();
    let w = paper_example().map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    check(w.recovered_b0 == w.results[0], || {
        format!("b2 - b1 = {:?}, b0 = {:?}", w.recovered_b0, w.results[0])
    })?;
    check(w.output == w.expected, || {
        format!("X = {:?}, DFT = {:?}", w.output, w.expected)
    })?;
    check(w.passed, || "walkthrough reports FAIL".into())?;
    within(elapsed, Duration::from_secs(1))?;

    let out = cfft()
        .args(["demo", "--paper-example"])
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.code() == Some(0), || {
        format!("demo exited {:?}", out.status.code())
    })?;
    let text = String::from_utf8_lossy(&out.stdout);
    let last = text.lines().last().unwrap_or_default().to_string();
    check(last == "X=[10, -2+2i, -2, -2-2i] PASS", || {
        format!("last line {last:?}")
    })?;
    Ok(format!("b0 = b2 - b1 = [4, -2], X exact, {elapsed:.2?}"))
}

// 2 and 4 -------------------------------------------------------------------

#[derive(Default)]
struct GridStats {
    configs: usize,
    decodes: usize,
    rejected: usize,
    worst_complex: f64,
    comm_checked: usize,
}

fn subsets(n: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let all_count = (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1));
    if all_count <= 100 {
        return (0..n).combinations(k).collect();
    }
    let workers: Vec<usize> = (0..n).collect();
    (0..50)
        .map(|_| {
            let mut pick: Vec<usize> = workers.choose_multiple(rng, k).copied().collect();
            pick.sort_unstable();
            pick
        })
        .collect()
}

fn threshold_grid<F: Field>(
    field: &F,
    stats: &mut GridStats,
    rng: &mut ChaCha8Rng,
) -> Result<(), String> {
    let complex = field.cardinality().is_none();
    for s in [8usize, 64, 512, 4096] {
        let x = random_vec(field, s, rng);
        let expected = dft_naive(field, &x).map_err(|e| e.to_string())?;
        for m in [2usize, 4, 8] {
            for n in m..=12 {
                let ctx = || {
                    format!(
                        "{} s={s} m={m} N={n}",
                        if complex { "C" } else { "GF(65537)" }
                    )
                };
                let strategy = Strategy::plan(ProblemConfig::vector(field.clone(), s, m, n))
                    .map_err(|e| format!("{}: {e}", ctx()))?;
                let shares = strategy.encode_input(&x).map_err(|e| e.to_string())?;
                let results: Vec<WorkerResult<F::Elem>> = shares
                    .iter()
                    .map(|sh| strategy.worker_compute(sh))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                for subset in subsets(n, m, rng) {
                    let picked: Vec<_> = subset.iter().map(|&w| results[w].clone()).collect();
                    let got = strategy
                        .master_decode(&picked)
                        .map_err(|e| format!("{} {subset:?}: {e}", ctx()))?;
                    if complex {
                        let err = relative_error(field, &got, &expected);
                        stats.worst_complex = stats.worst_complex.max(err);
                        check(err <= 1e-8, || {
                            format!("{} {subset:?}: relative error {err:e}", ctx())
                        })?;
                    } else {
                        check(got == expected, || {
                            format!("{} {subset:?}: not exact", ctx())
                        })?;
                    }
                    let comm: usize = picked.iter().map(|r| r.payload.len()).sum();
                    check(comm == s, || {
                        format!("{} {subset:?}: {comm} elements delivered", ctx())
                    })?;
                    stats.comm_checked += 1;
                    stats.decodes += 1;
                }
                for subset in (0..n).combinations(m - 1) {
                    let picked: Vec<_> = subset.iter().map(|&w| results[w].clone()).collect();
                    let got = strategy.master_decode(&picked);
                    check(matches!(got, Err(Error::InsufficientShares { .. })), || {
                        format!(
                            "{} {subset:?}: {:?}",
                            ctx(),
                            got.as_ref().map(|_| "decoded")
                        )
                    })?;
                    stats.rejected += 1;
                }
                stats.configs += 1;
            }
        }
    }
    Ok(())
}

fn recovery_threshold() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut stats = GridStats::default();
    threshold_grid(&PrimeField::default(), &mut stats, &mut rng)?;
    threshold_grid(&ComplexField::default(), &mut stats, &mut rng)?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120))?;
    Ok(format!(
        "{} configs, {} decodes, {} (m-1)-subsets rejected, worst complex error {:.1e}, {elapsed:.2?}",
        stats.configs, stats.decodes, stats.rejected, stats.worst_complex
    ))
}

// 3 -------------------------------------------------------------------------

fn converse() -> Outcome {
    let f = PrimeField::new(5).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let w = converse_witness(&f, 2, 2)
        .map_err(|e| e.to_string())?
        .ok_or("no witness for m = 2")?;
    let elapsed = start.elapsed();
    check(w.x != w.x_prime, || "inputs coincide".into())?;
    check(w.subset.len() == 1, || format!("subset {:?}", w.subset))?;
    // recompute the observation independently
    let strategy =
        Strategy::plan(ProblemConfig::vector(f.clone(), 2, 2, 2)).map_err(|e| e.to_string())?;
    let seen = |x: &[u64]| -> Result<Vec<u64>, String> {
        let shares = strategy.encode_input(x).map_err(|e| e.to_string())?;
        Ok(strategy
            .worker_compute(&shares[w.subset[0]])
            .map_err(|e| e.to_string())?
            .payload)
    };
    check(seen(&w.x)? == seen(&w.x_prime)?, || {
        "worker results differ".into()
    })?;
    let (a, b) = (
        dft_naive(&f, &w.x).unwrap(),
        dft_naive(&f, &w.x_prime).unwrap(),
    );
    check(a != b, || "transforms coincide".into())?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "x={:?}, x'={:?} collide on worker {}, DFTs {a:?} vs {b:?}, {elapsed:.2?}",
        w.x, w.x_prime, w.subset[0]
    ))
}

// 4 -------------------------------------------------------------------------

fn communication() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut stats = GridStats::default();
    threshold_grid(&PrimeField::default(), &mut stats, &mut rng)?;
    let mut sims = 0;
    for (s, m, n) in [
        (8usize, 2usize, 12usize),
        (64, 4, 12),
        (4096, 8, 12),
        (512, 1, 4),
    ] {
        let sim = Simulator::new(SimConfig {
            problem: ProblemConfig::vector(PrimeField::default(), s, m, n),
            latency: LatencyModel::ShiftedExponential {
                shift: 0.5,
                rate: 1.0,
                work: 0.0,
            },
            trials: 5,
            seed: 4,
        })
        .map_err(|e| e.to_string())?;
        for o in sim.run().map_err(|e| e.to_string())? {
            check(comm_load(&o) == s, || {
                format!("s={s} m={m}: comm_load {}", comm_load(&o))
            })?;
            sims += 1;
        }
    }
    let mut nd = 0;
    for (shape, m) in [(vec![8usize, 8], 4usize), (vec![4, 4, 4], 2)] {
        let p = PrimeField::default();
        let strategy = NdStrategy::plan(ProblemConfig::tensor(p.clone(), shape.clone(), m, m + 2))
            .map_err(|e| e.to_string())?;
        let s: usize = shape.iter().product();
        check(
            strategy.recovery_threshold() * strategy.share_len() == s,
            || format!("{shape:?}"),
        )?;
        nd += 1;
    }
    Ok(format!(
        "{} decoded instances, {sims} simulated trials, {nd} tensor plans deliver exactly s elements",
        stats.comm_checked
    ))
}

// 5 -------------------------------------------------------------------------

fn baselines() -> Outcome {
    let t = |k| baseline_threshold(k, 12, 2).map_err(|e| e.to_string());
    let got = (
        t(StrategyKind::Coded)?,
        t(StrategyKind::ShortDot)?,
        t(StrategyKind::Repetition)?,
    );
    check(got == (2, 8, 10), || format!("N=12 m=2 gave {got:?}"))?;

    let mut pairs = 0;
    for m in 2..=64usize {
        for n in (m * m + 1)..=64 {
            let c = baseline_threshold(StrategyKind::Coded, n, m);
            let sd = baseline_threshold(StrategyKind::ShortDot, n, m);
            let rep = baseline_threshold(StrategyKind::Repetition, n, m);
            if let (Ok(c), Ok(sd), Ok(rep)) = (c, sd, rep) {
                check(c < sd && sd < rep, || {
                    format!("N={n} m={m}: {c}, {sd}, {rep}")
                })?;
                pairs += 1;
            }
        }
    }

    let sim = Simulator::new(SimConfig {
        problem: ProblemConfig::vector(PrimeField::default(), 64, 2, 12),
        latency: LatencyModel::ShiftedExponential {
            shift: 0.5,
            rate: 1.0,
            work: 0.0,
        },
        trials: 1000,
        seed: 42,
    })
    .map_err(|e| e.to_string())?;
    let outcomes = sim.run().map_err(|e| e.to_string())?;
    let mut inversions = 0;
    for o in &outcomes {
        let time = |k| o.get(k).map(|s| s.completion_time).unwrap_or(f64::NAN);
        let (c, sd, rep) = (
            time(StrategyKind::Coded),
            time(StrategyKind::ShortDot),
            time(StrategyKind::Repetition),
        );
        if !(c <= sd && sd <= rep) {
            inversions += 1;
        }
    }
    let rows = summarize(&outcomes);
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    check(
        rows.len() == 3 && means[0] < means[1] && means[1] < means[2],
        || format!("means {means:?}"),
    )?;
    check(inversions == 0, || {
        format!("{inversions} per-trial inversions")
    })?;
    Ok(format!(
        "(2, 8, 10); ordering holds on {pairs} applicable (N, m); 1000-trial means {:.3} < {:.3} < {:.3}, 0 inversions",
        means[0], means[1], means[2]
    ))
}

// 6 -------------------------------------------------------------------------

fn n_dimensional() -> Outcome {
    let start = Instant::now();
    let p = PrimeField::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut decodes = 0;
    for shape in [vec![8usize, 8], vec![4, 4, 4]] {
        let len = shape.iter().product();
        let t =
            Tensor::new(shape.clone(), random_vec(&p, len, &mut rng)).map_err(|e| e.to_string())?;
        let expected = dft_nd_naive(&p, &t).map_err(|e| e.to_string())?;
        for m in [2usize, 4] {
            let n = m + 2;
            let strategy = NdStrategy::plan(ProblemConfig::tensor(p.clone(), shape.clone(), m, n))
                .map_err(|e| format!("{shape:?} m={m}: {e}"))?;
            for subset in (0..n).combinations(m) {
                let got = strategy.run(&t, &subset).map_err(|e| e.to_string())?;
                check(got == expected, || {
                    format!("{shape:?} m={m} {subset:?}: mismatch")
                })?;
                decodes += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(30))?;
    Ok(format!("{decodes} subsets decode exactly, {elapsed:.2?}"))
}

// 7 -------------------------------------------------------------------------

fn multi_input() -> Outcome {
    let p = PrimeField::default();
    let plan = bundle_inputs(2, &[4], 4).map_err(|e| e.to_string())?;
    check(
        plan.m_tilde == 2 && plan.nd_factors.factors() == [2],
        || {
            format!(
                "m~={} factors {:?}",
                plan.m_tilde,
                plan.nd_factors.factors()
            )
        },
    )?;
    let strategy = MultiStrategy::plan(p.clone(), vec![4], plan, 6).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let inputs: Vec<Tensor<u64>> = (0..2)
        .map(|_| Tensor::new(vec![4], random_vec(&p, 4, &mut rng)).unwrap())
        .collect();
    let expected: Vec<Vec<u64>> = inputs
        .iter()
        .map(|x| dft_naive(&p, x.data()).unwrap())
        .collect();
    let mut count = 0;
    for subset in (0..6).combinations(4) {
        let out = strategy.run(&inputs, &subset).map_err(|e| e.to_string())?;
        for (o, e) in out.iter().zip(&expected) {
            check(o.data() == &e[..], || format!("{subset:?}: mismatch"))?;
        }
        count += 1;
    }
    check(count == 15, || format!("{count} subsets"))?;
    Ok("m~=2, factors (2,), all 15 subsets recover both transforms".into())
}

// 8 -------------------------------------------------------------------------

fn median_decode_time(s: usize) -> Result<Duration, String> {
    let p = PrimeField::default();
    let strategy =
        Strategy::plan(ProblemConfig::vector(p.clone(), s, 8, 12)).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x = random_vec(&p, s, &mut rng);
    let shares = strategy.encode_input(&x).map_err(|e| e.to_string())?;
    // workers 4..12: all non-systematic rows
    let results: Vec<_> = shares[4..]
        .iter()
        .map(|sh| strategy.worker_compute(sh).unwrap())
        .collect();
    let check_out = strategy
        .master_decode(&results)
        .map_err(|e| e.to_string())?;
    check(check_out == fft(&p, &x).unwrap(), || {
        format!("s={s}: wrong output")
    })?;
    let mut times: Vec<Duration> = (0..20)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(
                strategy
                    .master_decode(std::hint::black_box(&results))
                    .unwrap(),
            );
            t.elapsed()
        })
        .collect();
    times.sort();
    Ok((times[9] + times[10]) / 2)
}

fn linear_decode() -> Outcome {
    median_decode_time(1 << 15)?; // warm-up
    let small = median_decode_time(1 << 15)?;
    let large = median_decode_time(1 << 16)?;
    let ratio = large.as_secs_f64() / small.as_secs_f64();
    check(ratio <= 2.5, || {
        format!("ratio {ratio:.2} ({small:.2?} -> {large:.2?})")
    })?;
    Ok(format!(
        "GF(65537) N=12 m=8: {small:.2?} at 2^15, {large:.2?} at 2^16, ratio {ratio:.2}"
    ))
}

// 9 -------------------------------------------------------------------------

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<Vec<u8>, String> {
        let path = dir.path().join(name);
        let out = cfft()
            .args([
                "simulate", "--n", "12", "--m", "2", "--trials", "1000", "--seed", "42",
            ])
            .args(["--latency", "shifted-exp:mu=1,shift=0.5,work=0", "--csv"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?;
        check(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        })?;
        std::fs::read(&path).map_err(|e| e.to_string())
    };
    let (a, b) = (run("a.csv")?, run("b.csv")?);
    check(a == b, || "CSV differs between runs".into())?;
    Ok(format!("{} bytes identical", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("worked example", worked_example),
        ("recovery threshold K* = m", recovery_threshold),
        ("converse witness", converse),
        ("communication load = s", communication),
        ("baseline dominance", baselines),
        ("n-dimensional coded FFT", n_dimensional),
        ("multi-input coded FFT", multi_input),
        ("linear-in-s decode", linear_decode),
        ("simulation determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
