use std::io::{self, Write};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::kernel::RoundedStep;
use super::monitor::{run_monitor, Monitor, MonitorOutcome};
use crate::equation::{step_by_lag, Equation, StepError};
use crate::ics::InitialConditions;
use crate::ratio::{bit_size, round_to_bits, Ratio};
use crate::scalar::Scalar;

pub const DEFAULT_STEPS: usize = 5000;
pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    /// Every iterate rounded to `precision_bits` significant bits.
    Float {
        precision_bits: u32,
    },
}

impl Arithmetic {
    pub fn float() -> Self {
        Arithmetic::Float {
            precision_bits: DEFAULT_PRECISION_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub steps: usize,
    pub mode: Arithmetic,
    pub monitors: Vec<Monitor>,
    /// Exact mode falls back to `Float { fallback_precision }` once a
    /// numerator or denominator exceeds this many bits.
    pub bit_budget: u64,
    pub fallback_precision: u32,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            mode: Arithmetic::Exact,
            monitors: Vec::new(),
            bit_budget: DEFAULT_BIT_BUDGET,
            fallback_precision: DEFAULT_PRECISION_BITS,
        }
    }
}

impl SimulationConfig {
    pub fn exact(steps: usize) -> Self {
        Self {
            steps,
            ..Self::default()
        }
    }

    pub fn float(steps: usize, precision_bits: u32) -> Self {
        Self {
            steps,
            mode: Arithmetic::Float { precision_bits },
            ..Self::default()
        }
    }

    pub fn with_monitors(mut self, monitors: Vec<Monitor>) -> Self {
        self.monitors = monitors;
        self
    }

    fn validate(&self) -> Result<(), SimulationError> {
        if self.steps == 0 {
            return Err(SimulationError::InvalidConfig(
                "steps must be positive".into(),
            ));
        }
        match self.mode {
            Arithmetic::Float { precision_bits } if precision_bits < 64 => {
                Err(SimulationError::InvalidConfig(format!(
                    "precision_bits must be at least 64, got {precision_bits}"
                )))
            }
            _ if self.fallback_precision < 64 => Err(SimulationError::InvalidConfig(
                "fallback precision must be at least 64 bits".into(),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulationError {
    #[error("denominator vanishes at step {step}: {source}")]
    ZeroDenominator { step: usize, source: StepError },
    #[error("initial value x_-{index} is negative")]
    NegativeInput { index: usize },
    #[error("expected {expected} initial values, got {got}")]
    WrongLength { expected: usize, got: usize },
    #[error("exact mode admits only rational initial values; use the surd-field simulator or float mode")]
    IrrationalInExactMode,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// An orbit `x_0 .. x_{steps-1}` together with the initial values that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T = Ratio> {
    pub eq: Equation,
    /// `x_{-1}, ..., x_{-k}`.
    pub ics: Vec<T>,
    pub values: Vec<T>,
    pub mode: Arithmetic,
    /// Step at which exact arithmetic exceeded the bit budget and switched to
    /// rounded arithmetic.
    pub switched_to_float_at: Option<usize>,
    pub monitors: Vec<MonitorOutcome>,
}

impl<T> Trajectory<T> {
    pub fn k(&self) -> usize {
        self.ics.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `x_n` for `-k <= n < len`.
    pub fn at(&self, n: isize) -> &T {
        if n < 0 {
            &self.ics[(-n - 1) as usize]
        } else {
            &self.values[n as usize]
        }
    }

    /// `x_{-k}, ..., x_{-1}, x_0, ...`.
    pub fn chronological(&self) -> impl Iterator<Item = &T> {
        self.ics.iter().rev().chain(self.values.iter())
    }

    /// Whether `values[n]` is still exact. The switch to rounding also rounds
    /// the `k` values stored before it.
    pub fn is_exact_at(&self, n: usize) -> bool {
        self.mode == Arithmetic::Exact
            && self.switched_to_float_at.map_or(true, |s| n + self.k() < s)
    }
}

fn check_ics<T: Scalar>(eq: &Equation, ics: &[T]) -> Result<(), SimulationError> {
    if ics.len() != eq.k() {
        return Err(SimulationError::WrongLength {
            expected: eq.k(),
            got: ics.len(),
        });
    }
    if let Some(i) = ics.iter().position(|x| x.sign().is_lt()) {
        return Err(SimulationError::NegativeInput { index: i + 1 });
    }
    Ok(())
}

/// Iterates the recurrence in exact rational arithmetic, or rounded to the
/// configured precision, then runs the configured monitors.
pub fn simulate(
    eq: &Equation,
    ics: &InitialConditions,
    cfg: &SimulationConfig,
) -> Result<Trajectory, SimulationError> {
    cfg.validate()?;
    let start = match (cfg.mode, ics) {
        (Arithmetic::Exact, InitialConditions::Surd(_)) => {
            return Err(SimulationError::IrrationalInExactMode)
        }
        (Arithmetic::Exact, InitialConditions::Rational(v)) => v.clone(),
        (Arithmetic::Float { precision_bits }, ics) => ics
            .approximate(precision_bits + 16)
            .iter()
            .map(|x| round_to_bits(x, precision_bits))
            .collect(),
    };
    check_ics(eq, &start)?;
    let k = eq.k();
    let mut mode = cfg.mode;
    let mut switched = None;
    let mut chrono: Vec<Ratio> = start.iter().rev().cloned().collect();
    chrono.reserve(cfg.steps);

    let mut rounded = match mode {
        Arithmetic::Float { precision_bits } => Some(RoundedStep::new(eq, precision_bits)),
        Arithmetic::Exact => None,
    };
    for n in 0..cfg.steps {
        let top = chrono.len();
        if let Some(kernel) = &rounded {
            let x = kernel
                .apply(|lag| &chrono[top - lag])
                .map_err(|source| SimulationError::ZeroDenominator { step: n, source })?;
            chrono.push(x);
            continue;
        }
        let x = step_by_lag(eq, |lag| &chrono[top - lag])
            .map_err(|source| SimulationError::ZeroDenominator { step: n, source })?;
        let x = match mode {
            Arithmetic::Exact if bit_size(&x) > cfg.bit_budget => {
                log::info!(
                    "exact iterate {n} exceeds {} bits, switching to rounded arithmetic",
                    cfg.bit_budget
                );
                let bits = cfg.fallback_precision;
                mode = Arithmetic::Float {
                    precision_bits: bits,
                };
                switched = Some(n);
                for v in &mut chrono[top.saturating_sub(k)..] {
                    *v = round_to_bits(v, bits);
                }
                rounded = Some(RoundedStep::new(eq, bits));
                round_to_bits(&x, bits)
            }
            Arithmetic::Exact => x,
            Arithmetic::Float { precision_bits } => round_to_bits(&x, precision_bits),
        };
        chrono.push(x);
    }

    let values = chrono.split_off(k);
    chrono.reverse();
    let mut traj = Trajectory {
        eq: eq.clone(),
        ics: start,
        values,
        mode: cfg.mode,
        switched_to_float_at: switched,
        monitors: Vec::new(),
    };
    traj.monitors = cfg.monitors.iter().map(|m| run_monitor(&traj, m)).collect();
    Ok(traj)
}

/// Exact iteration in any [`Scalar`] field, used to certify cycles whose
/// values are quadratic surds.
pub fn simulate_in_field<T: Scalar>(
    eq: &Equation,
    ics: &[T],
    steps: usize,
) -> Result<Trajectory<T>, SimulationError> {
    check_ics(eq, ics)?;
    let k = eq.k();
    let mut chrono: Vec<T> = ics.iter().rev().cloned().collect();
    for n in 0..steps {
        let top = chrono.len();
        let x = step_by_lag(eq, |lag| &chrono[top - lag])
            .map_err(|source| SimulationError::ZeroDenominator { step: n, source })?;
        chrono.push(x);
    }
    let values = chrono.split_off(k);
    Ok(Trajectory {
        eq: eq.clone(),
        ics: ics.to_vec(),
        values,
        mode: Arithmetic::Exact,
        switched_to_float_at: None,
        monitors: Vec::new(),
    })
}

/// Lazily iterated orbit in rounded arithmetic, for searches that stop early.
pub struct Orbit<'e> {
    eq: &'e Equation,
    kernel: RoundedStep<'e>,
    chrono: Vec<Ratio>,
    n: usize,
}

impl<'e> Orbit<'e> {
    pub fn new(
        eq: &'e Equation,
        ics: &InitialConditions,
        precision_bits: u32,
    ) -> Result<Self, SimulationError> {
        let start: Vec<Ratio> = ics
            .approximate(precision_bits + 16)
            .iter()
            .map(|x| round_to_bits(x, precision_bits))
            .collect();
        check_ics(eq, &start)?;
        Ok(Self {
            eq,
            kernel: RoundedStep::new(eq, precision_bits),
            chrono: start.into_iter().rev().collect(),
            n: 0,
        })
    }
}

impl Iterator for Orbit<'_> {
    type Item = Result<Ratio, SimulationError>;

    fn next(&mut self) -> Option<Self::Item> {
        let top = self.chrono.len();
        let x = match self.kernel.apply(|lag| &self.chrono[top - lag]) {
            Ok(x) => x,
            Err(source) => {
                return Some(Err(SimulationError::ZeroDenominator {
                    step: self.n,
                    source,
                }))
            }
        };
        // Only the last k values are ever read again.
        let k = self.eq.k();
        if self.chrono.len() > 4 * k + 64 {
            self.chrono.drain(..self.chrono.len() - k);
        }
        self.chrono.push(x.clone());
        self.n += 1;
        Some(Ok(x))
    }
}

/// `n,x_n` rows; exact values as `p/q`, rounded values in scientific notation
/// with enough digits to recover the stored binary value.
pub fn write_csv<W: Write>(traj: &Trajectory, mut out: W) -> io::Result<()> {
    writeln!(out, "n,x_n")?;
    let bits = match (traj.mode, traj.switched_to_float_at) {
        (Arithmetic::Float { precision_bits }, _) => precision_bits,
        _ => DEFAULT_PRECISION_BITS,
    };
    for (n, x) in traj.values.iter().enumerate() {
        if traj.is_exact_at(n) {
            writeln!(out, "{n},{x}")?;
        } else {
            writeln!(out, "{n},{}", format_scientific(x, digits_for_bits(bits)))?;
        }
    }
    Ok(())
}

/// Decimal digits that round-trip a `bits`-bit binary significand.
pub fn digits_for_bits(bits: u32) -> usize {
    (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1
}

/// `d.ddd…e±x` with `digits` significant digits.
pub fn format_scientific(x: &Ratio, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let sign = if x.is_negative() { "-" } else { "" };
    let x = x.abs();
    let ten = Ratio::from_integer(BigInt::from(10));
    // Decimal exponent estimate from bit lengths, corrected below.
    let est = ((x.numer().bits() as f64 - x.denom().bits() as f64) * std::f64::consts::LOG10_2)
        .floor() as i64;
    let mut exp10 = est;
    let pow = |e: i64| -> Ratio {
        let p = Ratio::from_integer(num_traits::pow(BigInt::from(10), e.unsigned_abs() as usize));
        if e >= 0 {
            p
        } else {
            p.recip()
        }
    };
    loop {
        let scaled = &x / pow(exp10);
        if scaled >= ten {
            exp10 += 1;
        } else if scaled < Ratio::from_integer(BigInt::from(1)) {
            exp10 -= 1;
        } else {
            break;
        }
    }
    let scaled = &x * pow(digits as i64 - 1 - exp10);
    let mut mantissa = scaled.round().to_integer().to_string();
    if mantissa.len() > digits {
        // rounding carried into a new digit
        mantissa.truncate(digits);
        exp10 += 1;
    }
    let (head, tail) = mantissa.split_at(1);
    if tail.is_empty() {
        format!("{sign}{head}e{exp10}")
    } else {
        format!("{sign}{head}.{tail}e{exp10}")
    }
}
