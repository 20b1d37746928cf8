//! Rounded-mode step on dyadic histories using integer arithmetic only.
//!
//! With every stored value of the form `m / 2^e`, both sums of the recurrence
//! are integers over `Q * 2^E`, where `Q` is the common denominator of the
//! coefficients. The quotient is rounded once, so no gcd is ever taken.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};

use crate::equation::{step_by_lag, Equation, StepError};
use crate::ratio::{dyadic_exponent, round_quotient, round_to_bits, Ratio};

struct Affine {
    denom: BigInt,
    constant: BigInt,
    terms: Vec<(usize, BigInt)>,
}

impl Affine {
    fn new(constant: &Ratio, coeffs: &BTreeMap<usize, Ratio>) -> Self {
        let denom = coeffs
            .values()
            .fold(constant.denom().clone(), |acc, c| acc.lcm(c.denom()));
        let lift = |r: &Ratio| r.numer() * (&denom / r.denom());
        Self {
            constant: lift(constant),
            terms: coeffs.iter().map(|(&lag, c)| (lag, lift(c))).collect(),
            denom,
        }
    }

    /// `value * denom * 2^e`.
    fn eval<'a>(&self, x: &impl Fn(usize) -> &'a Ratio, e: u64) -> BigInt {
        self.terms
            .iter()
            .fold(&self.constant << e, |acc, (lag, c)| {
                let v = x(*lag);
                let shift = e - dyadic_exponent(v).expect("checked dyadic");
                acc + ((c * v.numer()) << shift)
            })
    }
}

pub(crate) struct RoundedStep<'e> {
    eq: &'e Equation,
    num: Affine,
    den: Affine,
    bits: u32,
}

impl<'e> RoundedStep<'e> {
    pub(crate) fn new(eq: &'e Equation, bits: u32) -> Self {
        Self {
            eq,
            num: Affine::new(eq.num_const(), eq.num_coeffs()),
            den: Affine::new(eq.den_const(), eq.den_coeffs()),
            bits,
        }
    }

    pub(crate) fn apply<'a>(&self, x: impl Fn(usize) -> &'a Ratio) -> Result<Ratio, StepError> {
        let lags = self
            .num
            .terms
            .iter()
            .chain(&self.den.terms)
            .map(|(lag, _)| *lag);
        let mut e = 0;
        for lag in lags {
            match dyadic_exponent(x(lag)) {
                Some(d) => e = e.max(d),
                None => return step_by_lag(self.eq, x).map(|v| round_to_bits(&v, self.bits)),
            }
        }
        let n = self.num.eval(&x, e);
        let d = self.den.eval(&x, e);
        if !d.is_positive() {
            return step_by_lag(self.eq, x);
        }
        let (n, d) = if self.num.denom.is_one() && self.den.denom.is_one() {
            (n, d)
        } else {
            (n * &self.den.denom, d * &self.num.denom)
        };
        Ok(round_quotient(&n, &d, self.bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::ratio;

    #[test]
    fn agrees_with_exact_step_then_rounding() {
        let eq = Equation::literal("1", "1/2", &[(2, "3/4"), (4, "3/4"), (7, "1")], &[(7, "1")]);
        let hist: Vec<Ratio> = ["1/3", "2", "5/7", "1", "3/2", "4", "1/9"]
            .iter()
            .map(|s| round_to_bits(&ratio(s), 64))
            .collect();
        let fast = RoundedStep::new(&eq, 64)
            .apply(|lag| &hist[lag - 1])
            .unwrap();
        let slow = round_to_bits(&crate::equation::step(&eq, &hist).unwrap(), 64);
        assert_eq!(fast, slow);
    }

    #[test]
    fn zero_denominator_is_reported() {
        let eq = Equation::literal("1", "0", &[], &[(1, "1")]);
        let hist = vec![Ratio::from_integer(0.into())];
        assert!(RoundedStep::new(&eq, 64)
            .apply(|lag| &hist[lag - 1])
            .is_err());
    }
}
