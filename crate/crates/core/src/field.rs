//! Scalar arithmetic over the two supported base fields.
//!
//! Generic code is written against [`Field`]; the two implementations are
//! [`ComplexField`] (double-precision complex numbers, compared with a
//! relative tolerance) and [`PrimeField`] (exact residues modulo a prime
//! `p < 2^32`). [`FieldSpec`] and [`Scalar`] are the runtime-tagged
//! descriptions used at the file, CLI and FFI boundaries.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// Default relative tolerance for complex comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Default prime modulus, 2^16 + 1. Supports every power-of-two length up
/// to 65536.
pub const DEFAULT_PRIME: u64 = 65537;

/// Arithmetic over a field with roots of unity.
pub trait Field: Clone + fmt::Debug + PartialEq + Send + Sync + 'static {
    type Elem: Copy + fmt::Debug + PartialEq + Send + Sync + 'static;

    fn spec(&self) -> FieldSpec;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Embeds a non-negative integer (reduced mod p on prime fields).
    #[allow(clippy::wrong_self_convention)]
    fn from_u64(&self, v: u64) -> Self::Elem;

    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
    fn inv(&self, a: Self::Elem) -> Result<Self::Elem>;

    fn div(&self, a: Self::Elem, b: Self::Elem) -> Result<Self::Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    fn pow(&self, mut base: Self::Elem, mut exp: u64) -> Self::Elem {
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `omega_n^k` for the fixed primitive n-th root `omega_n`.
    fn root_power(&self, n: usize, k: usize) -> Result<Self::Elem>;

    /// The primitive n-th root of unity `omega_n`.
    fn primitive_root_of_unity(&self, n: usize) -> Result<Self::Elem> {
        self.root_power(n, 1)
    }

    /// `[omega_n^0, ..., omega_n^(n-1)]`, or the conjugate powers when
    /// `inverse` is set.
    fn roots_table(&self, n: usize, inverse: bool) -> Result<Vec<Self::Elem>>;

    /// Tolerance-aware equality (exact on prime fields).
    fn approx_eq(&self, a: Self::Elem, b: Self::Elem) -> bool;

    /// Absolute value for complex, 0/1 indicator for prime fields. Used for
    /// pivot selection and error norms.
    fn magnitude(&self, a: Self::Elem) -> f64;

    /// Number of elements, `None` when infinite.
    fn cardinality(&self) -> Option<u64>;

    /// Relative tolerance, zero on exact fields.
    fn tolerance(&self) -> f64;

    /// A uniformly random element (prime) or a point in the unit square
    /// centred at the origin (complex).
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn is_zero(&self, a: Self::Elem) -> bool {
        a == self.zero()
    }

    /// `n^-1` in the field.
    fn inverse_of_len(&self, n: usize) -> Result<Self::Elem> {
        let v = self.from_u64(n as u64);
        if self.is_zero(v) {
            return Err(Error::NotInvertible(n as u64));
        }
        self.inv(v)
    }
}

// ---------------------------------------------------------------------------
// Complex
// ---------------------------------------------------------------------------

/// The complex numbers with a relative comparison tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexField {
    tolerance: f64,
}

impl Default for ComplexField {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

impl ComplexField {
    pub fn new(tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::InvalidField(format!(
                "complex tolerance must be positive, got {tolerance}"
            )));
        }
        Ok(Self { tolerance })
    }

    /// `exp(-2 pi i k / n)`, exact at multiples of a quarter turn.
    fn unit_root(n: usize, k: usize) -> Complex64 {
        let k = k % n;
        if (4 * k).is_multiple_of(n) {
            return match 4 * k / n {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, -1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, 1.0),
            };
        }
        let angle = -2.0 * std::f64::consts::PI * (k as f64) / (n as f64);
        let (sin, cos) = angle.sin_cos();
        Complex64::new(cos, sin)
    }
}

impl Field for ComplexField {
    type Elem = Complex64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Complex {
            tolerance: self.tolerance,
        }
    }

    fn zero(&self) -> Complex64 {
        Complex64::new(0.0, 0.0)
    }

    fn one(&self) -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    fn from_u64(&self, v: u64) -> Complex64 {
        Complex64::new(v as f64, 0.0)
    }

    fn add(&self, a: Complex64, b: Complex64) -> Complex64 {
        a + b
    }

    fn sub(&self, a: Complex64, b: Complex64) -> Complex64 {
        a - b
    }

    fn mul(&self, a: Complex64, b: Complex64) -> Complex64 {
        a * b
    }

    fn neg(&self, a: Complex64) -> Complex64 {
        -a
    }

    fn inv(&self, a: Complex64) -> Result<Complex64> {
        if a.re == 0.0 && a.im == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(a.inv())
    }

    fn root_power(&self, n: usize, k: usize) -> Result<Complex64> {
        if n == 0 {
            return Err(Error::RootUnavailable { n });
        }
        Ok(Self::unit_root(n, k))
    }

    fn roots_table(&self, n: usize, inverse: bool) -> Result<Vec<Complex64>> {
        if n == 0 {
            return Err(Error::RootUnavailable { n });
        }
        Ok((0..n)
            .map(|k| Self::unit_root(n, if inverse { n - k } else { k }))
            .collect())
    }

    fn approx_eq(&self, a: Complex64, b: Complex64) -> bool {
        let scale = 1.0f64.max(a.norm()).max(b.norm());
        (a - b).norm() <= self.tolerance * scale
    }

    fn magnitude(&self, a: Complex64) -> f64 {
        a.norm()
    }

    fn cardinality(&self) -> Option<u64> {
        None
    }

    fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }
}

// ---------------------------------------------------------------------------
// Prime
// ---------------------------------------------------------------------------

/// Integers modulo a prime `p < 2^32`.
///
/// The primitive n-th root is `g^-((p-1)/n)` for the smallest generator `g`,
/// so `omega_s^m = omega_{s/m}` holds across all lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeField {
    modulus: u64,
    /// Smallest generator of the multiplicative group.
    generator: u64,
    generator_inv: u64,
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus >= 1 << 32 {
            return Err(Error::InvalidField(format!(
                "modulus {modulus} exceeds 2^32"
            )));
        }
        if !is_prime(modulus) {
            return Err(Error::InvalidField(format!("{modulus} is not prime")));
        }
        let generator = smallest_primitive_root(modulus);
        let generator_inv = pow_mod(generator, modulus.saturating_sub(2), modulus);
        Ok(Self {
            modulus,
            generator,
            generator_inv,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        Self::new(DEFAULT_PRIME).expect("65537 is prime")
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn smallest_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let order = p - 1;
    let factors = prime_factors(order);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, order / q, p) != 1))
        .expect("every prime field has a primitive root")
}

impl Field for PrimeField {
    type Elem = u64;

    fn spec(&self) -> FieldSpec {
        FieldSpec::Prime {
            modulus: self.modulus,
        }
    }

    fn zero(&self) -> u64 {
        0
    }

    fn one(&self) -> u64 {
        1
    }

    fn from_u64(&self, v: u64) -> u64 {
        v % self.modulus
    }

    #[inline]
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    fn mul(&self, a: u64, b: u64) -> u64 {
        a * b % self.modulus
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.modulus) {
            return Err(Error::DivisionByZero);
        }
        Ok(pow_mod(a, self.modulus - 2, self.modulus))
    }

    fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod(base, exp, self.modulus)
    }

    fn root_power(&self, n: usize, k: usize) -> Result<u64> {
        let n64 = n as u64;
        if n == 0 || !(self.modulus - 1).is_multiple_of(n64) {
            return Err(Error::RootUnavailable { n });
        }
        // omega_n = g^-((p-1)/n), the analogue of exp(-2 pi i / n).
        let omega = pow_mod(self.generator_inv, (self.modulus - 1) / n64, self.modulus);
        Ok(pow_mod(omega, (k % n) as u64, self.modulus))
    }

    fn roots_table(&self, n: usize, inverse: bool) -> Result<Vec<u64>> {
        let omega = self.root_power(n, 1)?;
        let step = if inverse { self.inv(omega)? } else { omega };
        let mut out = Vec::with_capacity(n);
        let mut cur = 1u64;
        for _ in 0..n {
            out.push(cur);
            cur = self.mul(cur, step);
        }
        Ok(out)
    }

    fn approx_eq(&self, a: u64, b: u64) -> bool {
        a % self.modulus == b % self.modulus
    }

    fn magnitude(&self, a: u64) -> f64 {
        if a == 0 {
            0.0
        } else {
            1.0
        }
    }

    fn cardinality(&self) -> Option<u64> {
        Some(self.modulus)
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.modulus)
    }
}

// ---------------------------------------------------------------------------
// Runtime-tagged descriptors
// ---------------------------------------------------------------------------

/// Runtime description of a base field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldSpec {
    Complex { tolerance: f64 },
    Prime { modulus: u64 },
}

impl FieldSpec {
    pub fn complex() -> Self {
        FieldSpec::Complex {
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn prime(modulus: u64) -> Self {
        FieldSpec::Prime { modulus }
    }

    /// `None` for the (infinite) complex field.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            FieldSpec::Complex { .. } => None,
            FieldSpec::Prime { modulus } => Some(*modulus),
        }
    }

    /// Builds the typed field, validating the modulus or tolerance.
    pub fn validate(&self) -> Result<()> {
        match *self {
            FieldSpec::Complex { tolerance } => ComplexField::new(tolerance).map(|_| ()),
            FieldSpec::Prime { modulus } => PrimeField::new(modulus).map(|_| ()),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Complex { .. } => write!(f, "complex"),
            FieldSpec::Prime { modulus } => write!(f, "prime:{modulus}"),
        }
    }
}

impl FromStr for FieldSpec {
    type Err = Error;

    /// Accepts `complex` or `prime:P`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("complex") {
            return Ok(FieldSpec::complex());
        }
        if let Some(p) = s.strip_prefix("prime:") {
            let modulus = p
                .trim()
                .parse::<u64>()
                .map_err(|e| Error::InvalidField(format!("bad modulus {p:?}: {e}")))?;
            let spec = FieldSpec::Prime { modulus };
            spec.validate()?;
            return Ok(spec);
        }
        if s.eq_ignore_ascii_case("prime") {
            return Ok(FieldSpec::prime(DEFAULT_PRIME));
        }
        Err(Error::InvalidField(format!(
            "expected `complex` or `prime:P`, got {s:?}"
        )))
    }
}

/// A field element tagged with its field kind.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scalar {
    Complex(Complex64),
    Prime(u64),
}

/// Compares two tagged scalars under `field`'s equality semantics: exact on
/// prime fields, `|a - b| <= eps * max(1, |a|, |b|)` on complex.
pub fn scalar_eq(a: Scalar, b: Scalar, field: &FieldSpec) -> Result<bool> {
    match (a, b, field) {
        (Scalar::Complex(x), Scalar::Complex(y), FieldSpec::Complex { tolerance }) => {
            Ok(ComplexField::new(*tolerance)?.approx_eq(x, y))
        }
        (Scalar::Prime(x), Scalar::Prime(y), FieldSpec::Prime { modulus }) => {
            if x >= *modulus || y >= *modulus {
                return Err(Error::FieldMismatch);
            }
            Ok(x == y)
        }
        _ => Err(Error::FieldMismatch),
    }
}

/// Returns the tagged primitive n-th root of unity for a runtime field.
pub fn primitive_root_of_unity(field: &FieldSpec, n: usize) -> Result<Scalar> {
    match *field {
        FieldSpec::Complex { tolerance } => Ok(Scalar::Complex(
            ComplexField::new(tolerance)?.primitive_root_of_unity(n)?,
        )),
        FieldSpec::Prime { modulus } => Ok(Scalar::Prime(
            PrimeField::new(modulus)?.primitive_root_of_unity(n)?,
        )),
    }
}

/// Elementwise comparison of two vectors under the field's tolerance,
/// scaled by `slack` (e.g. the transform length for accumulated round-off).
/// Complex vectors are compared in the max norm relative to the larger
/// operand.
pub fn vectors_close<F: Field>(field: &F, a: &[F::Elem], b: &[F::Elem], slack: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    if field.tolerance() == 0.0 {
        return a.iter().zip(b).all(|(&x, &y)| field.approx_eq(x, y));
    }
    let max_mag = a
        .iter()
        .chain(b)
        .map(|&v| field.magnitude(v))
        .fold(1.0f64, f64::max);
    let worst = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| field.magnitude(field.sub(x, y)))
        .fold(0.0f64, f64::max);
    worst <= field.tolerance() * slack.max(1.0) * max_mag
}

/// `||a - b||_2 / ||b||_2` (with the denominator floored at 1e-300).
/// Zero or one per mismatching element count on prime fields.
pub fn relative_error<F: Field>(field: &F, a: &[F::Elem], b: &[F::Elem]) -> f64 {
    assert_eq!(a.len(), b.len());
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| field.magnitude(field.sub(x, y)).powi(2))
        .sum();
    let base: f64 = b.iter().map(|&y| field.magnitude(y).powi(2)).sum();
    diff.sqrt() / base.sqrt().max(1e-300)
}
