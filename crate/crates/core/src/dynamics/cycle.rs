use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::simulate::Trajectory;
use crate::ratio::Ratio;
use crate::scalar::Scalar;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Default test window: `4 k p`.
pub fn default_window(k: usize, p: usize) -> usize {
    4 * k.max(1) * p.max(1)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycleError {
    #[error("trajectory of length {len} is too short for window {window} and period {period}")]
    WindowTooLarge {
        len: usize,
        window: usize,
        period: usize,
    },
    #[error("period must be positive")]
    ZeroPeriod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub tested_period: usize,
    /// `max |x_{n+p} - x_n|` over the final window.
    pub residual: f64,
    pub converged: bool,
    pub prime_period: Option<usize>,
    /// Window averages of each residue class mod `p`, indexed by `n mod p`.
    pub limit_cycle: Option<Vec<f64>>,
}

/// Tests the tail of `traj` for convergence to a `p`-periodic pattern.
///
/// Differences are formed exactly and only then converted to `f64`, so the
/// residual of an exactly periodic orbit is exactly zero.
pub fn detect_cycle<T: Scalar>(
    traj: &Trajectory<T>,
    p: usize,
    tolerance: f64,
    window: usize,
) -> Result<PeriodReport, CycleError> {
    if p == 0 {
        return Err(CycleError::ZeroPeriod);
    }
    let len = traj.values.len();
    if window == 0 || len < window + p {
        return Err(CycleError::WindowTooLarge {
            len,
            window,
            period: p,
        });
    }
    let xs = &traj.values;
    let start = len - window - p;
    let residual = (start..len - p)
        .map(|n| xs[n + p].distance(&xs[n]))
        .fold(0.0_f64, f64::max);
    let converged = residual < tolerance;
    if !converged {
        return Ok(PeriodReport {
            tested_period: p,
            residual,
            converged,
            prime_period: None,
            limit_cycle: None,
        });
    }

    let means = class_means(xs, start, p);
    let prime = divisors(p)
        .into_iter()
        .find(|&d| (0..p).all(|r| means[r].distance(&means[(r + d) % p]) < tolerance))
        .expect("p divides itself");
    Ok(PeriodReport {
        tested_period: p,
        residual,
        converged,
        prime_period: Some(prime),
        limit_cycle: Some(means.iter().map(Scalar::to_f64).collect()),
    })
}

/// Exact mean of `xs[start..]` over each residue class mod `p`.
fn class_means<T: Scalar>(xs: &[T], start: usize, p: usize) -> Vec<T> {
    (0..p)
        .map(|r| {
            let first = start + (r + p - start % p) % p;
            let members: Vec<&T> = xs[first..].iter().step_by(p).collect();
            let sum = members[1..]
                .iter()
                .fold(members[0].clone(), |acc, x| acc.plus(x));
            sum.scale(&Ratio::new(1.into(), (members.len() as i64).into()))
        })
        .collect()
}

/// Positive divisors in increasing order.
pub fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Exact evidence that a finite sequence repeats with period `p` and with no
/// smaller period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCertificate {
    pub period: usize,
    /// Number of terms examined.
    pub length: usize,
    /// `seq[n + p] == seq[n]` for every examined `n`.
    pub periodic: bool,
    /// Each proper divisor `d` with an index `n` where `seq[n + d] != seq[n]`.
    pub refuted_divisors: Vec<(usize, usize)>,
    pub prime_period: Option<usize>,
}

impl CycleCertificate {
    pub fn is_prime(&self) -> bool {
        self.prime_period == Some(self.period)
    }
}

pub fn certify_prime_period<T: PartialEq>(seq: &[T], p: usize) -> CycleCertificate {
    let periodic = p > 0 && seq.len() > p && (0..seq.len() - p).all(|n| seq[n + p] == seq[n]);
    let mut refuted = Vec::new();
    let mut prime = None;
    if periodic {
        for d in divisors(p).into_iter().filter(|&d| d < p) {
            match (0..p).find(|&n| seq[n + d] != seq[n]) {
                Some(n) => refuted.push((d, n)),
                None => {
                    prime.get_or_insert(d);
                }
            }
        }
        prime.get_or_insert(p);
    }
    CycleCertificate {
        period: p,
        length: seq.len(),
        periodic,
        refuted_divisors: refuted,
        prime_period: prime,
    }
}
