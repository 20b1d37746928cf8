//! Changes of variables carrying the odd-lag family into the T2 normal form,
//! and the explicit initial values that realize periodic and unbounded
//! solutions.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::{check_t1, check_t2, t4_case, OddLagShape, T4Case};
use crate::equation::{index_profile, Equation};
use crate::ics::InitialConditions;
use crate::ratio::{self, Ratio};
use crate::scalar::Scalar;
use crate::surd::QuadSurd;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("reduction not applicable: {0}")]
    NotApplicable(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("the shift root {0} is irrational; the reduced coefficients are not rational")]
    IrrationalRoot(String),
    #[error("lifted value {value} at position {index} is negative")]
    NegativeLift { index: usize, value: String },
}

/// `w = (x + shift) / scale`, inverted by `x = scale * w - shift`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableChange {
    #[serde(with = "ratio::serde_str")]
    pub shift: Ratio,
    #[serde(with = "ratio::serde_str")]
    pub scale: Ratio,
}

impl VariableChange {
    pub fn new(shift: Ratio, scale: Ratio) -> Self {
        assert!(scale.is_positive(), "scale must be positive");
        Self { shift, scale }
    }

    pub fn identity() -> Self {
        Self::new(Ratio::zero(), Ratio::one())
    }

    pub fn forward<T: Scalar>(&self, x: &T) -> T {
        x.plus(&x.lift(&self.shift))
            .scale(&(Ratio::one() / &self.scale))
    }

    pub fn inverse<T: Scalar>(&self, w: &T) -> T {
        w.scale(&self.scale).minus(&w.lift(&self.shift))
    }
}

/// Pointwise `x = scale * w - shift`, refusing values outside the
/// nonnegative cone.
pub fn lift_cycle<T: Scalar>(
    change: &VariableChange,
    cycle: &[T],
) -> Result<Vec<T>, ReductionError> {
    cycle
        .iter()
        .enumerate()
        .map(|(index, w)| {
            let x = change.inverse(w);
            if x.sign().is_lt() {
                Err(ReductionError::NegativeLift {
                    index,
                    value: x.to_string(),
                })
            } else {
                Ok(x)
            }
        })
        .collect()
}

/// The `w = x - 1` image of the shape, valid whenever its constant term
/// `sum + alpha - A` is nonnegative.
pub fn shift_equation(shape: &OddLagShape) -> Result<(Equation, VariableChange), ReductionError> {
    let alpha = &shape.even_sum + &shape.num_const - &shape.den_const;
    if alpha.is_negative() {
        return Err(ReductionError::NotApplicable(format!(
            "shifted constant sum + alpha - A = {alpha} is negative"
        )));
    }
    let eq = Equation::new(
        alpha,
        &shape.den_const + Ratio::one(),
        shape.even_coeffs.clone(),
        BTreeMap::from([(shape.odd_lag, Ratio::one())]),
    )
    .map_err(|e| ReductionError::NotApplicable(e.to_string()))?;
    Ok((eq, VariableChange::new(-Ratio::one(), Ratio::one())))
}

/// `w = x - 1`, for `alpha >= A` where every iterate stays at or above 1.
pub fn shift_reduce(shape: &OddLagShape) -> Result<(Equation, VariableChange), ReductionError> {
    if shape.num_const < shape.den_const {
        return Err(ReductionError::NotApplicable(format!(
            "shift reduction needs alpha >= A, got alpha = {}, A = {}",
            shape.num_const, shape.den_const
        )));
    }
    shift_equation(shape)
}

/// `h(t) = t^2 + (sum + 1 - A) t - alpha`.
pub fn h_at(shape: &OddLagShape, t: &Ratio) -> Ratio {
    t * t + (&shape.even_sum + Ratio::one() - &shape.den_const) * t - &shape.num_const
}

fn require_small_alpha(shape: &OddLagShape) -> Result<(), ReductionError> {
    if shape.num_const.is_positive() && shape.num_const < shape.den_const {
        Ok(())
    } else {
        Err(ReductionError::NotApplicable(format!(
            "needs 0 < alpha < A, got alpha = {}, A = {}",
            shape.num_const, shape.den_const
        )))
    }
}

/// The positive root of `h`, which lies in `(0, A)`.
pub fn positive_root_h(shape: &OddLagShape) -> Result<QuadSurd, ReductionError> {
    require_small_alpha(shape)?;
    let b = &shape.even_sum + Ratio::one() - &shape.den_const;
    let disc = &b * &b + ratio::int(4) * &shape.num_const;
    Ok(QuadSurd::new(
        -b / ratio::int(2),
        ratio::ratio("1/2"),
        &disc,
    ))
}

/// `w = (x + r) / (1 + r)`, which removes the constant term. Only rational
/// `r` yields a rational equation.
pub fn surd_reduce(shape: &OddLagShape) -> Result<(Equation, VariableChange), ReductionError> {
    let root = positive_root_h(shape)?;
    let r = root
        .as_rational()
        .cloned()
        .ok_or_else(|| ReductionError::IrrationalRoot(root.to_string()))?;
    let lifted = Ratio::one() + &r;
    let mut num = shape.even_coeffs.clone();
    num.insert(shape.odd_lag, lifted.clone());
    let eq = Equation::new(
        Ratio::zero(),
        &shape.den_const - &r,
        num,
        BTreeMap::from([(shape.odd_lag, lifted.clone())]),
    )
    .map_err(|e| ReductionError::NotApplicable(e.to_string()))?;
    Ok((eq, VariableChange::new(r, lifted)))
}

/// The split `delta = (A - sum + 1) / 2` behind the lower bound
/// `x_n >= min(..., 1 - delta)` for the `alpha = 0` form with `A < sum + 1`.
pub fn lower_bound_split(shape: &OddLagShape) -> Ratio {
    (&shape.den_const - &shape.even_sum + Ratio::one()) / ratio::int(2)
}

/// Value on residue class `m mod modulus` of the initial index `-m`.
fn by_class<T: Clone>(k: usize, value: impl Fn(usize) -> T) -> Vec<T> {
    (1..=k).map(value).collect()
}

fn zero_pattern(eq: &Equation) -> InitialConditions {
    let g = index_profile(eq).g_beta;
    InitialConditions::Rational(by_class(eq.k(), |m| {
        if m % g == 0 {
            Ratio::one()
        } else {
            Ratio::zero()
        }
    }))
}

fn require(holds: bool, what: impl FnOnce() -> String) -> Result<(), ReductionError> {
    if holds {
        Ok(())
    } else {
        Err(ReductionError::HypothesisViolated(what()))
    }
}

/// 1 on the class `0 mod gcd(I_beta)`, 0 elsewhere, at `A = sum beta`:
/// a solution of prime period `gcd(I_beta)`.
pub fn periodic_ic_t1(eq: &Equation) -> Result<InitialConditions, ReductionError> {
    let report = check_t1(eq);
    require(report.holds, || "T1 hypotheses fail".into())?;
    require(eq.den_const() == &eq.num_sum(), || {
        format!(
            "needs A = sum beta, got A = {}, sum = {}",
            eq.den_const(),
            eq.num_sum()
        )
    })?;
    Ok(zero_pattern(eq))
}

/// The same pattern for `A < sum beta`; the nonzero class then follows the
/// linear recursion `x_n = sum beta_i x_{n-i} / A` and grows without bound.
pub fn unbounded_ic_t1(eq: &Equation) -> Result<InitialConditions, ReductionError> {
    require(check_t1(eq).holds, || "T1 hypotheses fail".into())?;
    require(eq.den_const() < &eq.num_sum(), || {
        format!(
            "needs A < sum beta, got A = {}, sum = {}",
            eq.den_const(),
            eq.num_sum()
        )
    })?;
    Ok(zero_pattern(eq))
}

/// Three-level pattern with `x = sqrt(alpha / sum B)`, `g = gcd(I_beta ∪ I_B)`:
/// `x/2` on class 0 mod 2g, `2 alpha / (x sum B)` on class g, `x` elsewhere.
/// Prime period `2g`; values are surds when `alpha / sum B` is not a square.
pub fn periodic_ic_t2(eq: &Equation) -> Result<InitialConditions, ReductionError> {
    require(check_t2(eq).holds, || "T2 hypotheses fail".into())?;
    require(eq.den_const() == &eq.num_sum(), || {
        format!(
            "needs A = sum beta, got A = {}, sum = {}",
            eq.den_const(),
            eq.num_sum()
        )
    })?;
    let p = index_profile(eq);
    let g = p.g_union;
    let xbar = QuadSurd::sqrt(&(eq.num_const() / &p.sum_b));
    let low = xbar.scale(&ratio::ratio("1/2"));
    let high = QuadSurd::from(ratio::int(2) * eq.num_const())
        .checked_div(&xbar.scale(&p.sum_b))
        .expect("alpha > 0 makes the equilibrium positive");
    Ok(InitialConditions::from_surds(by_class(
        eq.k(),
        |m| match m % (2 * g) {
            0 => low.clone(),
            r if r == g => high.clone(),
            _ => xbar.clone(),
        },
    )))
}

/// `v = sum + 1 - A` on class 0 mod `gcd(I_beta)` (odd lag included), 0
/// elsewhere, in T4 case iv. Prime period `gcd(I_beta)`.
pub fn periodic_ic_t4_case_iv(shape: &OddLagShape) -> Result<InitialConditions, ReductionError> {
    require(t4_case(shape) == T4Case::IV, || {
        format!(
            "needs alpha = 0, A > 0, A <= sum < A + 1; got alpha = {}, A = {}, sum = {}",
            shape.num_const, shape.den_const, shape.even_sum
        )
    })?;
    let g = shape.gcd_numerator_lags();
    let v = &shape.even_sum + Ratio::one() - &shape.den_const;
    let k = shape.to_equation().k();
    Ok(InitialConditions::Rational(by_class(k, |m| {
        if m % g == 0 {
            v.clone()
        } else {
            Ratio::zero()
        }
    })))
}

/// A prime-period `2 gcd(I_beta)` cycle of the odd-lag family at
/// `A + 1 = sum`, built as the T2 cycle of the shifted equation lifted by
/// `x = w + 1`. The shifted constant is `1 + alpha > 0`, so this works for
/// every alpha, not only `alpha >= A`.
pub fn boundary_cycle_t3(
    shape: &OddLagShape,
) -> Result<(InitialConditions, Equation, VariableChange), ReductionError> {
    require(
        shape.regime() == crate::classifier::Regime::Boundary,
        || {
            format!(
                "needs A + 1 = sum, got A = {}, sum = {}",
                shape.den_const, shape.even_sum
            )
        },
    )?;
    let (reduced, change) = shift_equation(shape)?;
    let w = periodic_ic_t2(&reduced)?;
    let x = match &w {
        InitialConditions::Rational(v) => InitialConditions::Rational(lift_cycle(&change, v)?),
        InitialConditions::Surd(v) => InitialConditions::Surd(lift_cycle(&change, v)?),
    };
    Ok((x, reduced, change))
}
