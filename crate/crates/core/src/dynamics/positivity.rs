//! Residue classes of a zero-constant odd-lag orbit that start from
//! nonnegative data. A positive term at `n` forces positivity at `n + i` for
//! every numerator lag `i`, so each class mod `gcd(I_beta)` is either
//! identically zero or positive from some index on.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::simulate::{simulate, SimulationConfig};
use crate::classifier::OddLagShape;
use crate::ics::InitialConditions;
use crate::number_theory::{frobenius_number, reduced_generators};
use crate::ratio::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PositivityError {
    #[error("class analysis needs alpha = 0")]
    NonzeroConstant,
    #[error("class analysis needs rational, nonnegative initial values of length {k}")]
    BadInitialValues { k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum ClassStatus {
    IdenticallyZero,
    /// Positive at every index `>= step` in this class.
    EventuallyPositiveAt {
        step: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub modulus: usize,
    pub frobenius: i64,
    pub classes: BTreeMap<usize, ClassStatus>,
    /// Steps simulated for the cross-check.
    pub checked_steps: usize,
    /// The simulated orbit agrees with every class status.
    pub confirmed: bool,
}

pub fn positivity_classes(
    shape: &OddLagShape,
    ics: &InitialConditions,
    horizon: usize,
) -> Result<PositivityReport, PositivityError> {
    if !shape.num_const.is_zero() {
        return Err(PositivityError::NonzeroConstant);
    }
    let eq = shape.to_equation();
    let k = eq.k();
    let values = match ics.as_rational() {
        Some(v) if v.len() == k && !v.iter().any(Signed::is_negative) => v,
        _ => return Err(PositivityError::BadInitialValues { k }),
    };
    let g = shape.gcd_numerator_lags();
    let lags: BTreeSet<usize> = eq.num_coeffs().keys().copied().collect();
    let frobenius = frobenius_number(&reduced_generators(&lags)).expect("reduced lags are coprime");
    // Every multiple m > N_f of g is a sum of numerator lags.
    let reach = g as i64 * (frobenius + 1);

    // A positive initial value x_n reaches the computed part of the orbit only
    // through a single lag l with n + l >= 0; other initial slots are fixed
    // data and do not relay positivity.
    let mut earliest: BTreeMap<usize, i64> = BTreeMap::new();
    for (i, x) in values.iter().enumerate() {
        if x.is_positive() {
            let n = -(i as i64 + 1);
            let class = n.rem_euclid(g as i64) as usize;
            let first_hop = lags
                .iter()
                .map(|&l| n + l as i64)
                .filter(|&m| m >= 0)
                .min()
                .expect("k is a lag");
            let e = earliest.entry(class).or_insert(i64::MAX);
            *e = (*e).min(first_hop + reach);
        }
    }
    let classes: BTreeMap<usize, ClassStatus> = (0..g)
        .map(|a| {
            let status = match earliest.get(&a) {
                None => ClassStatus::IdenticallyZero,
                // `a` is the first computed index of the class.
                Some(&n) if n <= a as i64 => ClassStatus::EventuallyPositiveAt { step: 0 },
                Some(&n) => ClassStatus::EventuallyPositiveAt { step: n as usize },
            };
            (a, status)
        })
        .collect();

    let latest = earliest.values().copied().max().unwrap_or(0).max(0) as usize;
    let checked_steps = horizon
        .max((frobenius.max(0) as usize) * g + k)
        .max(latest + k)
        .max(1);
    let confirmed = match simulate(&eq, ics, &SimulationConfig::exact(checked_steps)) {
        Ok(t) => t
            .values
            .iter()
            .enumerate()
            .all(|(n, x)| match classes[&(n % g)] {
                ClassStatus::IdenticallyZero => x.is_zero(),
                ClassStatus::EventuallyPositiveAt { step } => n < step || x > &Ratio::zero(),
            }),
        Err(e) => {
            log::warn!("positivity cross-check failed: {e}");
            false
        }
    };

    Ok(PositivityReport {
        modulus: g,
        frobenius,
        classes,
        checked_steps,
        confirmed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::ratio;

    fn rats(v: &[&str]) -> InitialConditions {
        InitialConditions::Rational(v.iter().map(|s| ratio(s)).collect())
    }

    #[test]
    fn case_iv_construction() {
        let shape = OddLagShape::literal(3, &[(6, "2")], "0", "3/2");
        let r = positivity_classes(&shape, &rats(&["0", "0", "3/2", "0", "0", "3/2"]), 60).unwrap();
        assert_eq!(r.modulus, 3);
        assert_eq!(r.classes[&0], ClassStatus::EventuallyPositiveAt { step: 0 });
        assert_eq!(r.classes[&1], ClassStatus::IdenticallyZero);
        assert_eq!(r.classes[&2], ClassStatus::IdenticallyZero);
        assert!(r.confirmed);
    }

    #[test]
    fn positive_data_is_positive_at_once() {
        let shape = OddLagShape::literal(3, &[(6, "2")], "0", "3/2");
        let r = positivity_classes(&shape, &rats(&["1", "2", "3", "4", "5", "6"]), 30).unwrap();
        assert!(r
            .classes
            .values()
            .all(|s| *s == ClassStatus::EventuallyPositiveAt { step: 0 }));
        assert!(r.confirmed);
    }

    #[test]
    fn single_seed_waits_for_the_frobenius_bound() {
        // lags {4, 6, 9}: gcd 1, Frobenius number of {4, 6, 9} is 11
        let shape = OddLagShape::literal(9, &[(4, "1"), (6, "1")], "0", "1");
        let mut ics = vec!["0"; 9];
        ics[0] = "1";
        let r = positivity_classes(&shape, &rats(&ics), 0).unwrap();
        assert_eq!(r.frobenius, 11);
        // first hop x_3, then 3 + 12
        assert_eq!(
            r.classes[&0],
            ClassStatus::EventuallyPositiveAt { step: 15 }
        );
        assert!(r.checked_steps >= 15 + 9);
        assert!(r.confirmed);
    }

    #[test]
    fn rejects_positive_constant() {
        let shape = OddLagShape::literal(3, &[(6, "2")], "1", "3/2");
        assert_eq!(
            positivity_classes(&shape, &rats(&["1", "1", "1", "1", "1", "1"]), 10),
            Err(PositivityError::NonzeroConstant)
        );
    }
}
