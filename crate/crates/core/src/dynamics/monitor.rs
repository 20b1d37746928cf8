use num_traits::Signed;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::envelope::{all_phases, EnvelopeVariant};
use super::simulate::{Arithmetic, Trajectory};
use crate::equation::{index_profile, Equation};
use crate::ratio::{self, Ratio};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Monitor {
    /// Checks `x_n >= min(x_{n-1}, ..., x_{n-k}, c)` at every step, then that
    /// the orbit stays above `min(initial values, c)`.
    FloorBound {
        #[serde(with = "ratio::serde_str")]
        c: Ratio,
    },
    /// The dual of [`Monitor::FloorBound`].
    CeilingBound {
        #[serde(with = "ratio::serde_str")]
        c: Ratio,
    },
    /// Every phase of the single-gcd envelope is nonincreasing.
    EnvelopeT1,
    /// Every phase of the doubled-gcd envelope with reciprocal terms is
    /// nonincreasing.
    EnvelopeT2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum MonitorError {
    /// The per-step premise failed, so the conclusion was not tested.
    #[error("premise fails at step {n}")]
    HypothesisFailedAtStep { n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum MonitorResult {
    Held,
    /// Conclusion violated at step `n` although the premise held.
    Violated {
        n: usize,
    },
    HypothesisFailed {
        n: usize,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorOutcome {
    pub monitor: Monitor,
    pub result: MonitorResult,
}

impl MonitorOutcome {
    pub fn held(&self) -> bool {
        self.result == MonitorResult::Held
    }
}

/// `Ok(true)` when the bound holds along the whole orbit, `Ok(false)` on a
/// violated conclusion, `Err` when the premise itself fails first.
pub fn clamp_monitor(traj: &Trajectory, c: &Ratio, kind: BoundKind) -> Result<bool, MonitorError> {
    let k = traj.k();
    let pick = |a: &Ratio, b: &Ratio| -> Ratio {
        match kind {
            BoundKind::Lower => ratio::min_ref(a, b).clone(),
            BoundKind::Upper => ratio::max_ref(a, b).clone(),
        }
    };
    let fits = |x: &Ratio, bound: &Ratio| match kind {
        BoundKind::Lower => x >= bound,
        BoundKind::Upper => x <= bound,
    };
    let bound = traj.ics.iter().fold(c.clone(), |acc, x| pick(&acc, x));
    let mut conclusion = true;
    for n in 0..traj.len() {
        let window = (1..=k).map(|lag| traj.at(n as isize - lag as isize));
        let premise = window.fold(c.clone(), |acc, x| pick(&acc, x));
        let x = &traj.values[n];
        if !fits(x, &premise) {
            return Err(MonitorError::HypothesisFailedAtStep { n });
        }
        if conclusion && !fits(x, &bound) {
            conclusion = false;
        }
    }
    Ok(conclusion)
}

/// Finite-horizon estimates of `limsup` and `liminf`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(with = "ratio::serde_str")]
    pub sup: Ratio,
    #[serde(with = "ratio::serde_str")]
    pub inf: Ratio,
    pub tail_start: usize,
    /// First step with `x_n > threshold`.
    pub exceeded: Option<usize>,
}

pub fn bound_report(
    traj: &Trajectory,
    tail_start: usize,
    threshold: Option<&Ratio>,
) -> BoundReport {
    let tail = &traj.values[tail_start.min(traj.len().saturating_sub(1))..];
    let sup = tail.iter().max().cloned().unwrap_or_default();
    let inf = tail.iter().min().cloned().unwrap_or_default();
    let exceeded = threshold.and_then(|t| traj.values.iter().position(|x| x > t));
    BoundReport {
        sup,
        inf,
        tail_start,
        exceeded,
    }
}

/// `max(initial values, alpha / (A - sum beta))` when `A > sum beta`: no orbit
/// ever exceeds it.
pub fn a_priori_bound(eq: &Equation, ics: &[Ratio]) -> Option<Ratio> {
    let gap = eq.den_const() - eq.num_sum();
    if !gap.is_positive() {
        return None;
    }
    let m = eq.num_const() / gap;
    Some(ics.iter().fold(m, |acc, x| ratio::max_ref(&acc, x).clone()))
}

/// Relative slack for comparisons that mix stored values with quantities
/// recomputed from them. Zero in exact arithmetic.
pub fn rounding_slack(traj: &Trajectory) -> f64 {
    match (traj.mode, traj.switched_to_float_at) {
        (Arithmetic::Float { precision_bits }, _) => 2f64.powi(-(precision_bits as i32 - 4)),
        (Arithmetic::Exact, Some(_)) => {
            2f64.powi(-(super::simulate::DEFAULT_PRECISION_BITS as i32 - 4))
        }
        (Arithmetic::Exact, None) => 0.0,
    }
}

pub fn run_monitor(traj: &Trajectory, monitor: &Monitor) -> MonitorOutcome {
    let result = match monitor {
        Monitor::FloorBound { c } | Monitor::CeilingBound { c } => {
            let kind = if matches!(monitor, Monitor::FloorBound { .. }) {
                BoundKind::Lower
            } else {
                BoundKind::Upper
            };
            match clamp_monitor(traj, c, kind) {
                Ok(true) => MonitorResult::Held,
                Ok(false) => MonitorResult::Violated {
                    n: first_bound_violation(traj, c, kind),
                },
                Err(MonitorError::HypothesisFailedAtStep { n }) => {
                    MonitorResult::HypothesisFailed { n }
                }
            }
        }
        Monitor::EnvelopeT1 | Monitor::EnvelopeT2 => envelope_result(traj, monitor),
    };
    MonitorOutcome {
        monitor: monitor.clone(),
        result,
    }
}

fn first_bound_violation(traj: &Trajectory, c: &Ratio, kind: BoundKind) -> usize {
    let mut bound = c.clone();
    for x in &traj.ics {
        bound = match kind {
            BoundKind::Lower => ratio::min_ref(&bound, x).clone(),
            BoundKind::Upper => ratio::max_ref(&bound, x).clone(),
        };
    }
    traj.values
        .iter()
        .position(|x| match kind {
            BoundKind::Lower => x < &bound,
            BoundKind::Upper => x > &bound,
        })
        .unwrap_or(0)
}

fn envelope_result(traj: &Trajectory, monitor: &Monitor) -> MonitorResult {
    let profile = index_profile(&traj.eq);
    let (modulus, variant, slack) = match monitor {
        // Rounding is monotone, so the single-gcd envelope needs no slack.
        Monitor::EnvelopeT1 => (profile.g_beta, EnvelopeVariant::T1, 0.0),
        _ => (
            2 * profile.g_union,
            EnvelopeVariant::T2 { eq: &traj.eq },
            rounding_slack(traj),
        ),
    };
    if modulus == 0 {
        return MonitorResult::Inconclusive {
            reason: "no numerator lags".into(),
        };
    }
    match all_phases(traj, modulus, variant) {
        Err(e) => MonitorResult::Inconclusive {
            reason: e.to_string(),
        },
        Ok(envs) => envs
            .iter()
            .find_map(|e| {
                e.first_increase(slack).map(|i| MonitorResult::Violated {
                    n: ((e.first_m + i as isize + 1) * e.modulus as isize + e.phase as isize).max(0)
                        as usize,
                })
            })
            .unwrap_or(MonitorResult::Held),
    }
}
