//! Fast self-check run by `cfft verify`.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coded::{bundle_inputs, MultiStrategy, NdStrategy, ProblemConfig, Strategy};
use crate::demo::paper_example;
use crate::error::{Error, Result};
use crate::fft::{dft_naive, dft_nd_naive, fft, idft, Tensor};
use crate::field::{relative_error, ComplexField, Field, PrimeField};
use crate::io::VectorFile;
use crate::mds::{Consistency, MdsCode, Share};
use crate::sim::{
    baseline_threshold, comm_load, converse_witness, trials_csv, LatencyModel, SimConfig,
    Simulator, StrategyKind,
};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type CheckFn = fn() -> Result<String>;

const CHECKS: &[(&str, CheckFn)] = &[
    ("worked example", check_demo),
    ("fft matches naive dft", check_fft),
    ("any m workers decode", check_threshold),
    ("m-1 workers are insufficient", check_below_threshold),
    ("converse witness", check_converse),
    ("communication equals s", check_comm),
    ("baseline thresholds", check_baselines),
    ("n-dimensional decode", check_nd),
    ("multi-input decode", check_multi),
    ("corrupt share detection", check_consistency),
    ("simulation determinism", check_determinism),
    ("file round trip", check_file),
];

/// Runs every check; a panicking or erroring check counts as failed.
pub fn run_all() -> Vec<Check> {
    CHECKS
        .iter()
        .map(|&(name, f)| {
            let outcome = std::panic::catch_unwind(f)
                .unwrap_or_else(|_| Err(Error::InvalidParameter("panicked".into())));
            match outcome {
                Ok(detail) => Check {
                    name,
                    passed: true,
                    detail,
                },
                Err(e) => Check {
                    name,
                    passed: false,
                    detail: e.to_string(),
                },
            }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}

fn random_vec<F: Field>(field: &F, len: usize, rng: &mut ChaCha8Rng) -> Vec<F::Elem> {
    (0..len).map(|_| field.random(rng)).collect()
}

fn check_demo() -> Result<String> {
    let w = paper_example()?;
    ensure(w.passed, || {
        "walkthrough output differs from the DFT".into()
    })?;
    Ok("X=[10, -2+2i, -2, -2-2i]".into())
}

fn check_fft() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let p = PrimeField::default();
    let c = ComplexField::default();
    let mut n = 0;
    for len in [1usize, 2, 3, 4, 6, 8, 12, 16, 60, 64, 96, 128] {
        let x = random_vec(&c, len, &mut rng);
        let err = relative_error(&c, &fft(&c, &x)?, &dft_naive(&c, &x)?);
        ensure(err <= 1e-10, || {
            format!("complex length {len}: error {err:e}")
        })?;
        let back = idft(&c, &fft(&c, &x)?)?;
        ensure(relative_error(&c, &back, &x) <= 1e-10, || {
            format!("complex inverse {len}")
        })?;
        if 65536 % len == 0 {
            let y = random_vec(&p, len, &mut rng);
            ensure(fft(&p, &y)? == dft_naive(&p, &y)?, || {
                format!("prime length {len}")
            })?;
        }
        n += 1;
    }
    Ok(format!("{n} lengths"))
}

fn check_threshold() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut decodes = 0;
    for (s, m, n) in [(8usize, 2usize, 4usize), (16, 4, 6), (64, 8, 10)] {
        let p = PrimeField::default();
        let strategy = Strategy::plan(ProblemConfig::vector(p.clone(), s, m, n))?;
        let x = random_vec(&p, s, &mut rng);
        let expected = dft_naive(&p, &x)?;
        for subset in (0..n).combinations(m) {
            ensure(strategy.run(&x, &subset)? == expected, || {
                format!("GF(65537) s={s} m={m} {subset:?}")
            })?;
            decodes += 1;
        }
        let c = ComplexField::default();
        let strategy = Strategy::plan(ProblemConfig::vector(c, s, m, n))?;
        let x = random_vec(&c, s, &mut rng);
        let expected = dft_naive(&c, &x)?;
        for subset in (0..n).combinations(m) {
            let err = relative_error(&c, &strategy.run(&x, &subset)?, &expected);
            ensure(err <= 1e-8, || {
                format!("complex s={s} m={m} {subset:?}: {err:e}")
            })?;
            decodes += 1;
        }
    }
    Ok(format!("{decodes} decodes"))
}

fn check_below_threshold() -> Result<String> {
    let p = PrimeField::default();
    let strategy = Strategy::plan(ProblemConfig::vector(p.clone(), 16, 4, 6))?;
    let x = vec![p.one(); 16];
    let mut n = 0;
    for subset in (0..6).combinations(3) {
        let got = strategy.run(&x, &subset);
        ensure(matches!(got, Err(Error::InsufficientShares { .. })), || {
            format!("{subset:?} gave {got:?}")
        })?;
        n += 1;
    }
    Ok(format!("{n} subsets rejected"))
}

fn check_converse() -> Result<String> {
    let f = PrimeField::new(5)?;
    let w = converse_witness(&f, 2, 2)?.ok_or(Error::WitnessNotFound)?;
    ensure(w.x != w.x_prime, || "witness inputs coincide".into())?;
    ensure(fft(&f, &w.x)? != fft(&f, &w.x_prime)?, || {
        "witness transforms coincide".into()
    })?;
    Ok(format!("x={:?} x'={:?}", w.x, w.x_prime))
}

fn sim_config(n: usize, m: usize, s: usize, trials: u64, seed: u64) -> SimConfig<PrimeField> {
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

fn check_comm() -> Result<String> {
    for (s, m, n) in [(64usize, 2usize, 12usize), (256, 8, 12), (16, 1, 3)] {
        let out = Simulator::new(sim_config(n, m, s, 3, 0))?.run()?;
        for o in &out {
            ensure(comm_load(o) == s, || {
                format!("s={s} m={m}: {}", comm_load(o))
            })?;
        }
    }
    Ok("3 configurations".into())
}

fn check_baselines() -> Result<String> {
    let t: Vec<usize> = StrategyKind::ALL
        .iter()
        .map(|&k| baseline_threshold(k, 12, 2))
        .collect::<Result<_>>()?;
    ensure(t == [2, 8, 10], || format!("N=12 m=2 thresholds {t:?}"))?;
    for m in 2..=8usize {
        for n in (m * m + 1)..=64 {
            let (Ok(sd), Ok(rep)) = (
                baseline_threshold(StrategyKind::ShortDot, n, m),
                baseline_threshold(StrategyKind::Repetition, n, m),
            ) else {
                continue;
            };
            ensure(m < sd && sd < rep, || {
                format!("N={n} m={m}: {m} {sd} {rep}")
            })?;
        }
    }
    Ok("(2, 8, 10)".into())
}

fn check_nd() -> Result<String> {
    let p = PrimeField::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut n = 0;
    for (shape, m) in [(vec![4usize, 4], 2usize), (vec![2, 4, 2], 4)] {
        let strategy = NdStrategy::plan(ProblemConfig::tensor(p.clone(), shape.clone(), m, m + 2))?;
        let t = Tensor::new(
            shape.clone(),
            random_vec(&p, shape.iter().product(), &mut rng),
        )?;
        let expected = dft_nd_naive(&p, &t)?;
        for subset in (0..m + 2).combinations(m) {
            ensure(strategy.run(&t, &subset)? == expected, || {
                format!("{shape:?} m={m} {subset:?}")
            })?;
            n += 1;
        }
    }
    Ok(format!("{n} decodes"))
}

fn check_multi() -> Result<String> {
    let p = PrimeField::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let plan = bundle_inputs(2, &[4], 4)?;
    let strategy = MultiStrategy::plan(p.clone(), vec![4], plan, 6)?;
    let inputs: Vec<Tensor<u64>> = (0..2)
        .map(|_| Tensor::new(vec![4], random_vec(&p, 4, &mut rng)))
        .collect::<Result<_>>()?;
    let mut n = 0;
    for subset in (0..6).combinations(4) {
        let out = strategy.run(&inputs, &subset)?;
        for (o, x) in out.iter().zip(&inputs) {
            ensure(o.data() == dft_naive(&p, x.data())?, || {
                format!("{subset:?}")
            })?;
        }
        n += 1;
    }
    Ok(format!("{n} subsets"))
}

fn check_consistency() -> Result<String> {
    let p = PrimeField::default();
    let code = MdsCode::vandermonde(p.clone(), 6, 3)?;
    let msgs: Vec<Vec<u64>> = (0..3)
        .map(|i| (0..5).map(|j| (i * 5 + j) as u64).collect())
        .collect();
    let mut shares: Vec<Share<u64>> = code.encode_shares(&msgs)?;
    ensure(
        code.check_consistency(&shares)? == Consistency::Consistent,
        || "clean shares flagged".into(),
    )?;
    shares[4].payload[2] = p.add(shares[4].payload[2], 1);
    match code.check_consistency(&shares)? {
        Consistency::Corrupt(bad) if bad.contains(&(4, 2)) => Ok("flip at (4, 2) located".into()),
        other => Err(Error::InvalidParameter(format!(
            "flip not located: {other:?}"
        ))),
    }
}

fn check_determinism() -> Result<String> {
    let a = trials_csv(&Simulator::new(sim_config(12, 2, 64, 100, 42))?.run()?);
    let b = trials_csv(&Simulator::new(sim_config(12, 2, 64, 100, 42))?.run()?);
    ensure(a == b, || "CSV differs between runs".into())?;
    Ok(format!("{} bytes", a.len()))
}

fn check_file() -> Result<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = ComplexField::default();
    let f = VectorFile::Complex(Tensor::new(vec![3, 5], random_vec(&c, 15, &mut rng))?);
    let bytes = f.to_bytes();
    ensure(VectorFile::from_bytes(&bytes)?.to_bytes() == bytes, || {
        "complex".into()
    })?;
    let p = PrimeField::default();
    let g = VectorFile::Prime {
        modulus: p.modulus(),
        tensor: Tensor::new(vec![7], random_vec(&p, 7, &mut rng))?,
    };
    ensure(VectorFile::from_bytes(&g.to_bytes())? == g, || {
        "prime".into()
    })?;
    Ok("complex and prime".into())
}
