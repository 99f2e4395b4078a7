use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use coded_fft::coded::{bundle_inputs, MultiStrategy, NdStrategy, ProblemConfig, Strategy};
use coded_fft::demo::paper_example;
use coded_fft::error::{Error, Result};
use coded_fft::fft::Tensor;
use coded_fft::field::{ComplexField, Field, FieldSpec, PrimeField, DEFAULT_PRIME};
use coded_fft::io::VectorFile;
use coded_fft::sim::{summarize, summary_csv, trials_csv, LatencyModel, SimConfig, Simulator};
use coded_fft::verify;

#[derive(Parser)]
#[command(name = "cfft", version, about = "Straggler-tolerant coded FFT")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transform a vector file through the coded pipeline.
    Transform(TransformArgs),
    /// Run a straggler simulation and write per-trial CSV.
    Simulate(SimulateArgs),
    /// Print the four-point worked example.
    Demo {
        #[arg(long)]
        paper_example: bool,
    },
    /// Run the built-in invariant checks.
    Verify,
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Recovery threshold (number of parts).
    #[arg(long)]
    m: usize,
    /// Number of workers N.
    #[arg(long)]
    workers: usize,
    /// Comma-separated indices of workers that never return.
    #[arg(long, default_value = "")]
    straggle: String,
    /// Must agree with the file's field when given.
    #[arg(long)]
    field: Option<FieldSpec>,
    /// Treat axis 0 as a batch of independent inputs.
    #[arg(long)]
    multi: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    /// Input length.
    #[arg(long, default_value_t = 64)]
    s: usize,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// Overridden by CFFT_SEED.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// shifted-exp:mu=F,shift=F,work=F | deterministic:shift=F,work=F | trace:path=FILE
    #[arg(long, default_value = "shifted-exp:mu=1,shift=0.5,work=0")]
    latency: LatencyModel,
    /// Per-trial CSV; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Per-strategy summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long, default_value_t = FieldSpec::prime(DEFAULT_PRIME))]
    field: FieldSpec,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InsufficientShares { .. } => 2,
        Error::MalformedFile(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Transform(args) => transform(&args),
        Command::Simulate(args) => simulate(&args),
        Command::Demo { paper_example } => demo(paper_example),
        Command::Verify => run_verify(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn parse_straggle(list: &str, n: usize) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let w: usize = item
            .parse()
            .map_err(|e| Error::InvalidParameter(format!("bad straggler index {item:?}: {e}")))?;
        if w >= n {
            return Err(Error::WorkerOutOfRange { index: w, n });
        }
        out.push(w);
    }
    Ok(out)
}

struct Transformed<E> {
    shape: Vec<usize>,
    data: Vec<E>,
    threshold: usize,
    used: Vec<usize>,
    comm: usize,
}

/// Workers that did not straggle, ascending. All surviving workers finish
/// together, so the fastest `m` are the lowest indices.
fn survivors(n: usize, stragglers: &[usize], m: usize) -> Result<Vec<usize>> {
    let alive: Vec<usize> = (0..n).filter(|w| !stragglers.contains(w)).collect();
    if alive.len() < m {
        return Err(Error::InsufficientShares {
            needed: m,
            got: alive.len(),
        });
    }
    Ok(alive)
}

fn transform_in<F: Field>(
    field: F,
    tensor: Tensor<F::Elem>,
    args: &TransformArgs,
) -> Result<Transformed<F::Elem>> {
    let (m, n) = (args.m, args.workers);
    let stragglers = parse_straggle(&args.straggle, n)?;
    let shape = tensor.shape().to_vec();

    if args.multi {
        if shape.len() < 2 {
            return Err(Error::ShapeMismatch(
                "--multi needs rank >= 2 (axis 0 indexes inputs)".into(),
            ));
        }
        let q = shape[0];
        let inner = shape[1..].to_vec();
        let plan = bundle_inputs(q, &inner, m)?;
        let strategy = MultiStrategy::plan(field, inner.clone(), plan, n)?;
        let k = strategy.recovery_threshold();
        let alive = survivors(n, &stragglers, k)?;
        let per: usize = inner.iter().product();
        let inputs = tensor
            .data()
            .chunks(per)
            .map(|c| Tensor::new(inner.clone(), c.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let shares = strategy.encode_inputs(&inputs)?;
        let results = alive
            .iter()
            .map(|&w| strategy.worker_compute(&shares[w]))
            .collect::<Result<Vec<_>>>()?;
        let outputs = strategy.master_decode(&results[..k])?;
        return Ok(Transformed {
            shape,
            data: outputs.into_iter().flat_map(Tensor::into_data).collect(),
            threshold: k,
            used: alive[..k].to_vec(),
            comm: k * strategy.share_len(),
        });
    }

    if shape.len() == 1 {
        let strategy = Strategy::plan(ProblemConfig::vector(field, shape[0], m, n))?;
        let k = strategy.recovery_threshold();
        let alive = survivors(n, &stragglers, k)?;
        let shares = strategy.encode_input(tensor.data())?;
        let results = alive
            .iter()
            .map(|&w| strategy.worker_compute(&shares[w]))
            .collect::<Result<Vec<_>>>()?;
        let data = strategy.master_decode(&results[..k])?;
        return Ok(Transformed {
            shape,
            data,
            threshold: k,
            used: alive[..k].to_vec(),
            comm: k * strategy.share_len(),
        });
    }

    let strategy = NdStrategy::plan(ProblemConfig::tensor(field, shape.clone(), m, n))?;
    let k = strategy.recovery_threshold();
    let alive = survivors(n, &stragglers, k)?;
    let shares = strategy.encode_input(&tensor)?;
    let results = alive
        .iter()
        .map(|&w| strategy.worker_compute(&shares[w]))
        .collect::<Result<Vec<_>>>()?;
    let out = strategy.master_decode(&results[..k])?;
    Ok(Transformed {
        shape,
        data: out.into_data(),
        threshold: k,
        used: alive[..k].to_vec(),
        comm: k * strategy.share_len(),
    })
}

fn report<E>(t: &Transformed<E>) {
    let used: Vec<String> = t.used.iter().map(usize::to_string).collect();
    println!("threshold: {}", t.threshold);
    println!("workers used: {}", used.join(","));
    println!("comm elements: {}", t.comm);
}

fn transform(args: &TransformArgs) -> Result<ExitCode> {
    let file = VectorFile::read(&args.input)?;
    let file_field = file.field_spec();
    let field = match args.field {
        None => file_field,
        Some(spec) => {
            let agrees = match (spec, file_field) {
                (FieldSpec::Complex { .. }, FieldSpec::Complex { .. }) => true,
                (FieldSpec::Prime { modulus: a }, FieldSpec::Prime { modulus: b }) => a == b,
                _ => false,
            };
            if !agrees {
                return Err(Error::InvalidField(format!(
                    "--field {spec} but {} holds {file_field}",
                    args.input.display()
                )));
            }
            spec
        }
    };
    let out = match (file, field) {
        (VectorFile::Complex(t), FieldSpec::Complex { tolerance }) => {
            let r = transform_in(ComplexField::new(tolerance)?, t, args)?;
            report(&r);
            VectorFile::Complex(Tensor::new(r.shape, r.data)?)
        }
        (VectorFile::Prime { modulus, tensor }, _) => {
            let r = transform_in(PrimeField::new(modulus)?, tensor, args)?;
            report(&r);
            VectorFile::Prime {
                modulus,
                tensor: Tensor::new(r.shape, r.data)?,
            }
        }
        _ => return Err(Error::FieldMismatch),
    };
    out.write(&args.output)?;
    Ok(ExitCode::SUCCESS)
}

fn simulate_in<F: Field>(field: F, args: &SimulateArgs, seed: u64) -> Result<()> {
    let sim = Simulator::new(SimConfig {
        problem: ProblemConfig::vector(field, args.s, args.m, args.n),
        latency: args.latency.clone(),
        trials: args.trials,
        seed,
    })?;
    for (kind, why) in sim.skipped() {
        eprintln!("note: omitting {kind} baseline: {why}");
    }
    let outcomes = sim.run()?;
    let csv = trials_csv(&outcomes);
    let summary = summary_csv(&summarize(&outcomes));
    match &args.csv {
        Some(path) => {
            std::fs::write(path, csv)?;
            print!("{summary}");
        }
        None => print!("{csv}"),
    }
    if let Some(path) = &args.summary {
        std::fs::write(path, summary)?;
    }
    Ok(())
}

fn simulate(args: &SimulateArgs) -> Result<ExitCode> {
    let seed = match std::env::var("CFFT_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| Error::InvalidParameter(format!("CFFT_SEED={v:?}: {e}")))?,
        Err(_) => args.seed,
    };
    match args.field {
        FieldSpec::Complex { tolerance } => simulate_in(ComplexField::new(tolerance)?, args, seed)?,
        FieldSpec::Prime { modulus } => simulate_in(PrimeField::new(modulus)?, args, seed)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn demo(paper: bool) -> Result<ExitCode> {
    if !paper {
        return Err(Error::InvalidParameter(
            "only --paper-example is available".into(),
        ));
    }
    let w = paper_example()?;
    print!("{}", w.transcript);
    Ok(if w.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_verify() -> Result<ExitCode> {
    let checks = verify::run_all();
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    );
    Ok(if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
