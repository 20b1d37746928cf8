//! The linear-fractional recurrence
//!
//! ```text
//! x_n = (alpha + sum_i beta_i x_{n-i}) / (A + sum_j B_j x_{n-j})
//! ```
//!
//! with nonnegative rational parameters, one step of it, its lag profile and
//! its equilibria.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::number_theory::gcd_set;
use crate::ratio::{self, Ratio};
use crate::scalar::Scalar;
use crate::surd::QuadSurd;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquationError {
    #[error("lag 0 is not a delay")]
    ZeroLag,
    #[error("{what} must be nonnegative, got {value}")]
    Negative { what: String, value: String },
    #[error("denominator is identically zero (A = 0 and no denominator lags)")]
    VanishingDenominator,
    #[error("declared order {declared} does not match the largest lag {actual}")]
    OrderMismatch { declared: usize, actual: usize },
    #[error("equation has no lags")]
    NoLags,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("denominator vanishes for history {history:?} (newest first)")]
    ZeroDenominator { history: Vec<String> },
    #[error("history has {got} values, order is {k}")]
    ShortHistory { got: usize, k: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquilibriumError {
    #[error("every nonnegative value is an equilibrium (alpha = 0, A = sum beta, no B terms)")]
    Degenerate,
}

/// Exact coefficient bundle. Only strictly positive coefficients are stored;
/// the order `k` is the largest lag present.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    #[serde(with = "ratio::serde_str")]
    num_const: Ratio,
    #[serde(with = "ratio::serde_str")]
    den_const: Ratio,
    #[serde(with = "ratio::serde_str::map")]
    num_coeffs: BTreeMap<usize, Ratio>,
    #[serde(with = "ratio::serde_str::map")]
    den_coeffs: BTreeMap<usize, Ratio>,
}

fn check_nonnegative(what: &str, r: &Ratio) -> Result<(), EquationError> {
    if r.is_negative() {
        return Err(EquationError::Negative {
            what: what.to_string(),
            value: r.to_string(),
        });
    }
    Ok(())
}

fn positive_part(
    what: &str,
    coeffs: BTreeMap<usize, Ratio>,
) -> Result<BTreeMap<usize, Ratio>, EquationError> {
    let mut kept = BTreeMap::new();
    for (lag, c) in coeffs {
        if lag == 0 {
            return Err(EquationError::ZeroLag);
        }
        check_nonnegative(&format!("{what}_{lag}"), &c)?;
        if c.is_zero() {
            log::warn!("dropping zero coefficient {what}_{lag}");
            continue;
        }
        kept.insert(lag, c);
    }
    Ok(kept)
}

impl Equation {
    /// `num_const` is alpha, `den_const` is A, `num_coeffs` maps lag i to
    /// beta_i and `den_coeffs` maps lag j to B_j.
    pub fn new(
        num_const: Ratio,
        den_const: Ratio,
        num_coeffs: BTreeMap<usize, Ratio>,
        den_coeffs: BTreeMap<usize, Ratio>,
    ) -> Result<Self, EquationError> {
        check_nonnegative("alpha", &num_const)?;
        check_nonnegative("A", &den_const)?;
        let num_coeffs = positive_part("beta", num_coeffs)?;
        let den_coeffs = positive_part("B", den_coeffs)?;
        if den_const.is_zero() && den_coeffs.is_empty() {
            return Err(EquationError::VanishingDenominator);
        }
        if num_coeffs.is_empty() && den_coeffs.is_empty() {
            return Err(EquationError::NoLags);
        }
        Ok(Self {
            num_const,
            den_const,
            num_coeffs,
            den_coeffs,
        })
    }

    /// Convenience constructor from rational literals; panics on bad input.
    pub fn literal(alpha: &str, a: &str, beta: &[(usize, &str)], b: &[(usize, &str)]) -> Self {
        let map = |v: &[(usize, &str)]| v.iter().map(|&(l, s)| (l, ratio::ratio(s))).collect();
        Self::new(ratio::ratio(alpha), ratio::ratio(a), map(beta), map(b))
            .unwrap_or_else(|e| panic!("invalid literal equation: {e}"))
    }

    /// Order: the largest lag present.
    pub fn k(&self) -> usize {
        let nb = self.num_coeffs.keys().next_back().copied().unwrap_or(0);
        let db = self.den_coeffs.keys().next_back().copied().unwrap_or(0);
        nb.max(db)
    }

    pub fn num_const(&self) -> &Ratio {
        &self.num_const
    }

    pub fn den_const(&self) -> &Ratio {
        &self.den_const
    }

    pub fn num_coeffs(&self) -> &BTreeMap<usize, Ratio> {
        &self.num_coeffs
    }

    pub fn den_coeffs(&self) -> &BTreeMap<usize, Ratio> {
        &self.den_coeffs
    }

    pub fn num_sum(&self) -> Ratio {
        self.num_coeffs.values().sum()
    }

    pub fn den_sum(&self) -> Ratio {
        self.den_coeffs.values().sum()
    }

    pub fn with_num_const(&self, alpha: Ratio) -> Result<Self, EquationError> {
        Self::new(
            alpha,
            self.den_const.clone(),
            self.num_coeffs.clone(),
            self.den_coeffs.clone(),
        )
    }

    pub fn with_den_const(&self, a: Ratio) -> Result<Self, EquationError> {
        Self::new(
            self.num_const.clone(),
            a,
            self.num_coeffs.clone(),
            self.den_coeffs.clone(),
        )
    }

    /// Multiplies every parameter by `c > 0`; the recurrence is unchanged.
    pub fn scaled(&self, c: &Ratio) -> Self {
        assert!(c.is_positive(), "scale factor must be positive");
        let scale = |m: &BTreeMap<usize, Ratio>| m.iter().map(|(&l, v)| (l, v * c)).collect();
        Self {
            num_const: &self.num_const * c,
            den_const: &self.den_const * c,
            num_coeffs: scale(&self.num_coeffs),
            den_coeffs: scale(&self.den_coeffs),
        }
    }
}

/// Lag sets and sums used by every hypothesis check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexProfile {
    pub i_beta: BTreeSet<usize>,
    pub i_b: BTreeSet<usize>,
    /// gcd of `i_beta`, 0 when empty.
    pub g_beta: usize,
    /// gcd of `i_beta ∪ i_b`, 0 when both are empty.
    pub g_union: usize,
    #[serde(with = "ratio::serde_str")]
    pub sum_beta: Ratio,
    #[serde(with = "ratio::serde_str")]
    pub sum_b: Ratio,
}

pub fn index_profile(eq: &Equation) -> IndexProfile {
    let i_beta: BTreeSet<usize> = eq.num_coeffs.keys().copied().collect();
    let i_b: BTreeSet<usize> = eq.den_coeffs.keys().copied().collect();
    let g_beta = gcd_set(i_beta.iter().map(|&l| l as u64)) as usize;
    let g_union = gcd_set(i_beta.union(&i_b).map(|&l| l as u64)) as usize;
    IndexProfile {
        i_beta,
        i_b,
        g_beta,
        g_union,
        sum_beta: eq.num_sum(),
        sum_b: eq.den_sum(),
    }
}

/// One application of the recurrence. `history[0]` is `x_{n-1}`.
pub fn step<T: Scalar>(eq: &Equation, history: &[T]) -> Result<T, StepError> {
    let k = eq.k();
    if history.len() < k {
        return Err(StepError::ShortHistory {
            got: history.len(),
            k,
        });
    }
    step_by_lag(eq, |lag| &history[lag - 1])
}

/// [`step`] with the history supplied as `lag -> x_{n-lag}` for lags `1..=k`.
pub fn step_by_lag<'a, T, F>(eq: &Equation, x: F) -> Result<T, StepError>
where
    T: Scalar + 'a,
    F: Fn(usize) -> &'a T,
{
    let probe = x(eq.k().max(1));
    let weighted = |base: &Ratio, coeffs: &BTreeMap<usize, Ratio>| {
        coeffs.iter().fold(probe.lift(base), |acc, (&lag, c)| {
            acc.plus(&x(lag).scale(c))
        })
    };
    let num = weighted(&eq.num_const, &eq.num_coeffs);
    let den = weighted(&eq.den_const, &eq.den_coeffs);
    if den.sign() != Ordering::Greater {
        return Err(StepError::ZeroDenominator {
            history: (1..=eq.k()).map(|lag| x(lag).to_string()).collect(),
        });
    }
    Ok(num.divide(&den).expect("positive denominator"))
}

/// Nonnegative fixed points: solutions of
/// `sum_B x^2 + (A - sum_beta) x - alpha = 0` with a positive denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquilibriumSet {
    #[serde(with = "ratio::serde_str::vec")]
    pub rational_roots: Vec<Ratio>,
    /// The positive root `p + q sqrt(d)` when it is irrational.
    pub quadratic_root: Option<QuadSurd>,
}

impl EquilibriumSet {
    pub fn is_empty(&self) -> bool {
        self.rational_roots.is_empty() && self.quadratic_root.is_none()
    }

    /// Every equilibrium lifted into one field.
    pub fn all(&self) -> Vec<QuadSurd> {
        let mut v: Vec<QuadSurd> = self
            .rational_roots
            .iter()
            .cloned()
            .map(QuadSurd::from)
            .collect();
        v.extend(self.quadratic_root.clone());
        v
    }
}

pub fn equilibria(eq: &Equation) -> Result<EquilibriumSet, EquilibriumError> {
    let alpha = &eq.num_const;
    let a = &eq.den_const;
    let sb = eq.den_sum();
    let lin = a - eq.num_sum();
    let admissible = |x: &Ratio| !x.is_negative() && (a + &sb * x).is_positive();

    if sb.is_zero() {
        if lin.is_zero() {
            return if alpha.is_zero() {
                Err(EquilibriumError::Degenerate)
            } else {
                Ok(EquilibriumSet {
                    rational_roots: vec![],
                    quadratic_root: None,
                })
            };
        }
        let root = alpha / &lin;
        return Ok(EquilibriumSet {
            rational_roots: admissible(&root).then_some(root).into_iter().collect(),
            quadratic_root: None,
        });
    }

    if alpha.is_zero() {
        // x (sum_B x + A - sum_beta) = 0
        let mut roots: Vec<Ratio> = [Ratio::zero(), -&lin / &sb]
            .into_iter()
            .filter(|x| admissible(x))
            .collect();
        roots.dedup();
        return Ok(EquilibriumSet {
            rational_roots: roots,
            quadratic_root: None,
        });
    }

    // alpha > 0: the roots have product -alpha / sum_B < 0, so exactly one is positive.
    let disc = &lin * &lin + ratio::int(4) * &sb * alpha;
    let two_sb = ratio::int(2) * &sb;
    match ratio::exact_sqrt(&disc) {
        Some(root) => Ok(EquilibriumSet {
            rational_roots: vec![(root - &lin) / &two_sb],
            quadratic_root: None,
        }),
        None => Ok(EquilibriumSet {
            rational_roots: vec![],
            quadratic_root: Some(QuadSurd::new(
                -&lin / &two_sb,
                Ratio::one() / &two_sb,
                &disc,
            )),
        }),
    }
}

/// `(min(a/c, b/d), max(a/c, b/d))`, which bracket the mediant `(a+b)/(c+d)`.
pub fn mediant_bounds(a: &Ratio, b: &Ratio, c: &Ratio, d: &Ratio) -> (Ratio, Ratio) {
    assert!(
        !a.is_negative() && !b.is_negative() && c.is_positive() && d.is_positive(),
        "mediant bounds need a, b >= 0 and c, d > 0"
    );
    let p = a / c;
    let q = b / d;
    if p <= q {
        (p, q)
    } else {
        (q, p)
    }
}

pub fn mediant(a: &Ratio, b: &Ratio, c: &Ratio, d: &Ratio) -> Ratio {
    (a + b) / (c + d)
}
