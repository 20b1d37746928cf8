//! Running maxima over back-windows of one residue class. Under the boundary
//! hypotheses of the first two families these sequences are nonincreasing.

use thiserror::Error;

use super::simulate::Trajectory;
use crate::equation::Equation;
use crate::ratio::{self, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("trajectory too short for an envelope with modulus {modulus}")]
    TooShort { modulus: usize },
    #[error("phase {phase} is not below modulus {modulus}")]
    BadPhase { phase: usize, modulus: usize },
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("reciprocal term needs x_{n} > 0")]
    ZeroInReciprocal { n: isize },
    #[error("reciprocal terms need alpha > 0 and a denominator lag")]
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EnvelopeVariant<'e> {
    /// `y_m = max_{l=1..rho} x_{(m-l)g + a}`.
    T1,
    /// As `T1` with modulus `2g`, together with the terms
    /// `alpha / (x_{2g(m-l)+a-g} sum B)` and `alpha / (x_{2gm+a-g} sum B)`.
    T2 { eq: &'e Equation },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Envelope {
    pub phase: usize,
    pub modulus: usize,
    pub rho: usize,
    /// Index `m` of `values[0]`.
    pub first_m: isize,
    pub values: Vec<Ratio>,
}

impl Envelope {
    /// Whether `values[m+1] <= values[m] * (1 + slack)` throughout.
    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.first_increase(slack).is_none()
    }

    /// First `m` (relative to `values`) where the envelope grows by more than
    /// the relative slack.
    pub fn first_increase(&self, slack: f64) -> Option<usize> {
        let factor = ratio::from_f64(slack.max(0.0)).unwrap_or_default() + ratio::int(1);
        self.values.windows(2).position(|w| w[1] > &w[0] * &factor)
    }
}

pub fn rho(k: usize, modulus: usize) -> usize {
    (k / modulus).max(1)
}

pub fn envelope(
    traj: &Trajectory,
    phase: usize,
    modulus: usize,
    variant: EnvelopeVariant<'_>,
) -> Result<Envelope, EnvelopeError> {
    if modulus == 0 {
        return Err(EnvelopeError::ZeroModulus);
    }
    if phase >= modulus {
        return Err(EnvelopeError::BadPhase { phase, modulus });
    }
    let k = traj.k() as isize;
    let len = traj.len() as isize;
    let q = modulus as isize;
    let a = phase as isize;
    let rho = rho(traj.k(), modulus);
    let r = rho as isize;

    let (lookback, recip) = match variant {
        EnvelopeVariant::T1 => (0, None),
        EnvelopeVariant::T2 { eq } => {
            let scale = eq.den_sum();
            if eq.num_const() <= &Ratio::default() || scale <= Ratio::default() {
                return Err(EnvelopeError::Degenerate);
            }
            (q / 2, Some((eq.num_const().clone(), scale)))
        }
    };
    // Smallest m with (m - rho) q + a - lookback >= -k.
    let first_m = div_ceil(-k + lookback - a, q) + r;
    // Largest m with every needed index below len.
    let mut last_m = (len - 1 - a).div_euclid(q) + 1;
    if recip.is_some() {
        last_m = last_m.min((len - 1 - a + q / 2).div_euclid(q));
    }

    let mut values = Vec::new();
    for m in first_m..=last_m {
        let mut y: Option<Ratio> = None;
        let mut push = |v: Ratio| {
            if y.as_ref().map_or(true, |cur| v > *cur) {
                y = Some(v);
            }
        };
        for l in 1..=r {
            let base = (m - l) * q + a;
            push(traj.at(base).clone());
            if let Some((alpha, scale)) = &recip {
                push(reciprocal(traj, base - q / 2, alpha, scale)?);
            }
        }
        if let Some((alpha, scale)) = &recip {
            push(reciprocal(traj, m * q + a - q / 2, alpha, scale)?);
        }
        values.push(y.expect("rho >= 1"));
    }
    if values.len() < 2 {
        return Err(EnvelopeError::TooShort { modulus });
    }
    Ok(Envelope {
        phase,
        modulus,
        rho,
        first_m,
        values,
    })
}

fn reciprocal(
    traj: &Trajectory,
    n: isize,
    alpha: &Ratio,
    scale: &Ratio,
) -> Result<Ratio, EnvelopeError> {
    let x = traj.at(n);
    if x <= &Ratio::default() {
        return Err(EnvelopeError::ZeroInReciprocal { n });
    }
    Ok(alpha / (x * scale))
}

fn div_ceil(a: isize, b: isize) -> isize {
    -((-a).div_euclid(b))
}

/// Envelopes for every phase.
pub fn all_phases(
    traj: &Trajectory,
    modulus: usize,
    variant: EnvelopeVariant<'_>,
) -> Result<Vec<Envelope>, EnvelopeError> {
    (0..modulus)
        .map(|a| envelope(traj, a, modulus, variant.clone()))
        .collect()
}
