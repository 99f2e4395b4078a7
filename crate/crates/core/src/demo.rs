//! Worked four-point example: three workers, any two suffice.

use num_complex::Complex64;

use crate::coded::{ProblemConfig, Strategy, WorkerResult};
use crate::error::Result;
use crate::fft::dft_naive;
use crate::field::{ComplexField, Field};
use crate::interleave::interleave_1d;
use crate::mds::MdsCode;

/// Values produced along the way, plus the printable transcript.
#[derive(Debug, Clone, PartialEq)]
pub struct Walkthrough {
    pub x: Vec<Complex64>,
    pub parts: Vec<Vec<Complex64>>,
    pub shares: Vec<Vec<Complex64>>,
    pub results: Vec<Vec<Complex64>>,
    /// `b_0` recovered as `b_2 - b_1` without worker 0.
    pub recovered_b0: Vec<Complex64>,
    pub output: Vec<Complex64>,
    pub expected: Vec<Complex64>,
    pub passed: bool,
    pub transcript: String,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Formats integer-valued numbers without a trailing `.0`.
pub fn fmt_complex(z: Complex64) -> String {
    let num = |v: f64| {
        if v.fract() == 0.0 && v.abs() < 1e15 {
            format!("{}", v as i64)
        } else {
            format!("{v}")
        }
    };
    match (z.re == 0.0, z.im == 0.0) {
        (_, true) => num(z.re),
        (true, false) if z.im == 1.0 => "i".into(),
        (true, false) if z.im == -1.0 => "-i".into(),
        (true, false) => format!("{}i", num(z.im)),
        (false, false) => {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            let mag = z.im.abs();
            let im = if mag == 1.0 { String::new() } else { num(mag) };
            format!("{}{sign}{im}i", num(z.re))
        }
    }
}

fn fmt_vec(v: &[Complex64]) -> String {
    let items: Vec<String> = v.iter().map(|&z| fmt_complex(z)).collect();
    format!("[{}]", items.join(", "))
}

/// Runs `x = [1, 2, 3, 4]` through generator `[[1,0],[0,1],[1,1]]` with
/// worker 0 straggling.
pub fn paper_example() -> Result<Walkthrough> {
    let field = ComplexField::default();
    let x: Vec<Complex64> = [1.0, 2.0, 3.0, 4.0].into_iter().map(c).collect();
    let (one, zero) = (field.one(), field.zero());
    let code = MdsCode::custom(
        field,
        vec![vec![one, zero], vec![zero, one], vec![one, one]],
    )?;
    let strategy = Strategy::with_code(ProblemConfig::vector(field, 4, 2, 3), code)?;

    let parts = interleave_1d(&x, 2)?.into_parts();
    let shares = strategy.encode_input(&x)?;
    let results: Vec<WorkerResult<Complex64>> = shares
        .iter()
        .map(|s| strategy.worker_compute(s))
        .collect::<Result<_>>()?;
    let (b1, b2) = (&results[1].payload, &results[2].payload);
    let recovered_b0: Vec<Complex64> = b2.iter().zip(b1).map(|(p, q)| p - q).collect();
    let output = strategy.master_decode(&results[1..])?;
    let expected = dft_naive(&field, &x)?;
    let passed = output == expected && recovered_b0 == results[0].payload;

    let mut t = String::new();
    let mut line = |s: String| {
        t.push_str(&s);
        t.push('\n');
    };
    line(format!("x  = {}", fmt_vec(&x)));
    line(format!("c0 = {}  (x0, x2)", fmt_vec(&parts[0])));
    line(format!("c1 = {}  (x1, x3)", fmt_vec(&parts[1])));
    line("generator [[1,0],[0,1],[1,1]]".into());
    for (i, (label, s)) in ["c0", "c1", "c0 + c1"].iter().zip(&shares).enumerate() {
        line(format!("a{i} = {label} = {}", fmt_vec(&s.payload)));
    }
    line("worker 0 straggles".into());
    line(format!("b1 = DFT(a1) = {}", fmt_vec(b1)));
    line(format!("b2 = DFT(a2) = {}", fmt_vec(b2)));
    line(format!(
        "b0 = b2 - b1 = {} - {} = {}",
        fmt_vec(b2),
        fmt_vec(b1),
        fmt_vec(&recovered_b0)
    ));
    line(format!("X  = {}", fmt_vec(&output)));
    line(format!("DFT(x) = {}", fmt_vec(&expected)));
    line(format!(
        "X={} {}",
        fmt_vec(&output),
        if passed { "PASS" } else { "FAIL" }
    ));

    Ok(Walkthrough {
        x,
        parts,
        shares: shares.into_iter().map(|s| s.payload).collect(),
        results: results.into_iter().map(|r| r.payload).collect(),
        recovered_b0,
        output,
        expected,
        passed,
        transcript: t,
    })
}
