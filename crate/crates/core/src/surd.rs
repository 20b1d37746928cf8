//! Exact arithmetic in a real quadratic field `Q(sqrt(d))`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::ratio::{exact_sqrt, parse_ratio, round_to_bits, sqrt_floor, to_f64, Ratio};

/// `rational + coeff * sqrt(radicand)`.
///
/// Canonical form: when `coeff` is zero the radicand is stored as zero, so
/// structural equality is numeric equality within one field. A nonzero
/// radicand is a positive integer that is not a perfect square.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadSurd {
    rational: Ratio,
    coeff: Ratio,
    radicand: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseSurdError {
    #[error("malformed quadratic surd `{0}`")]
    Malformed(String),
}

impl QuadSurd {
    pub fn from_ratio(r: Ratio) -> Self {
        Self {
            rational: r,
            coeff: Ratio::zero(),
            radicand: BigInt::zero(),
        }
    }

    /// Builds `rational + coeff * sqrt(radicand)` and normalizes it.
    pub fn new(rational: Ratio, coeff: Ratio, radicand: &Ratio) -> Self {
        let root = Self::sqrt(radicand);
        Self::from_ratio(rational).add(&root.scale(&coeff))
    }

    /// Principal square root of a nonnegative rational.
    pub fn sqrt(r: &Ratio) -> Self {
        assert!(!r.is_negative(), "square root of a negative rational");
        if let Some(q) = exact_sqrt(r) {
            return Self::from_ratio(q);
        }
        // sqrt(n/m) = sqrt(n m) / m, then pull small square factors out of n m.
        let mut radicand = r.numer() * r.denom();
        let mut outside = BigInt::one();
        let mut p = 2u32;
        while p < 1000 {
            let p2 = BigInt::from(p * p);
            while (&radicand % &p2).is_zero() {
                radicand /= &p2;
                outside *= p;
            }
            p += if p == 2 { 1 } else { 2 };
        }
        Self {
            rational: Ratio::zero(),
            coeff: Ratio::new(outside, r.denom().clone()),
            radicand,
        }
    }

    pub fn rational_part(&self) -> &Ratio {
        &self.rational
    }

    pub fn surd_coeff(&self) -> &Ratio {
        &self.coeff
    }

    /// Zero for rational values.
    pub fn radicand(&self) -> &BigInt {
        &self.radicand
    }

    pub fn is_rational(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Ratio> {
        self.is_rational().then_some(&self.rational)
    }

    fn field(&self, other: &Self) -> BigInt {
        match (self.radicand.is_zero(), other.radicand.is_zero()) {
            (true, _) => other.radicand.clone(),
            (_, true) => self.radicand.clone(),
            _ => {
                assert_eq!(
                    self.radicand, other.radicand,
                    "arithmetic across distinct quadratic fields"
                );
                self.radicand.clone()
            }
        }
    }

    fn normalized(rational: Ratio, coeff: Ratio, radicand: BigInt) -> Self {
        if coeff.is_zero() {
            Self::from_ratio(rational)
        } else {
            Self {
                rational,
                coeff,
                radicand,
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let d = self.field(other);
        Self::normalized(
            &self.rational + &other.rational,
            &self.coeff + &other.coeff,
            d,
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let d = self.field(other);
        Self::normalized(
            &self.rational - &other.rational,
            &self.coeff - &other.coeff,
            d,
        )
    }

    pub fn neg(&self) -> Self {
        Self::normalized(-&self.rational, -&self.coeff, self.radicand.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.field(other);
        let dr = Ratio::from_integer(d.clone());
        let rational = &self.rational * &other.rational + &self.coeff * &other.coeff * dr;
        let coeff = &self.rational * &other.coeff + &self.coeff * &other.rational;
        Self::normalized(rational, coeff, d)
    }

    pub fn scale(&self, r: &Ratio) -> Self {
        Self::normalized(&self.rational * r, &self.coeff * r, self.radicand.clone())
    }

    pub fn add_ratio(&self, r: &Ratio) -> Self {
        Self::normalized(
            &self.rational + r,
            self.coeff.clone(),
            self.radicand.clone(),
        )
    }

    /// Field norm `a^2 - b^2 d`; zero only for the zero element.
    pub fn norm(&self) -> Ratio {
        let d = Ratio::from_integer(self.radicand.clone());
        &self.rational * &self.rational - &self.coeff * &self.coeff * d
    }

    pub fn conjugate(&self) -> Self {
        Self::normalized(self.rational.clone(), -&self.coeff, self.radicand.clone())
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        let norm = other.norm();
        if norm.is_zero() {
            return None;
        }
        let inv = other.conjugate().scale(&(Ratio::one() / norm));
        Some(self.mul(&inv))
    }

    /// Exact sign.
    pub fn signum(&self) -> Ordering {
        let a = self.rational.cmp(&Ratio::zero());
        let b = self.coeff.cmp(&Ratio::zero());
        match (a, b) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            // Opposite signs: compare a^2 against b^2 d.
            (x, _) => {
                let d = Ratio::from_integer(self.radicand.clone());
                let a2 = &self.rational * &self.rational;
                let b2d = &self.coeff * &self.coeff * d;
                match a2.cmp(&b2d) {
                    Ordering::Greater => x,
                    Ordering::Less => x.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    /// Dyadic approximation with roughly `bits` significant bits.
    pub fn approximate(&self, bits: u32) -> Ratio {
        if self.is_rational() {
            return self.rational.clone();
        }
        let guard = bits + 16 + self.coeff.numer().bits() as u32;
        let root = sqrt_floor(&Ratio::from_integer(self.radicand.clone()), guard);
        round_to_bits(&(&self.rational + &self.coeff * root), bits)
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.approximate(64))
    }
}

impl PartialOrd for QuadSurd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.sub(other).signum())
    }
}

impl From<Ratio> for QuadSurd {
    fn from(r: Ratio) -> Self {
        Self::from_ratio(r)
    }
}

impl fmt::Display for QuadSurd {
    /// `a`, or `a+b*sqrt(d)` with `a` and `b` in `p/q` form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.rational)
        } else if self.coeff.is_negative() {
            write!(
                f,
                "{}-{}*sqrt({})",
                self.rational, -&self.coeff, self.radicand
            )
        } else {
            write!(
                f,
                "{}+{}*sqrt({})",
                self.rational, self.coeff, self.radicand
            )
        }
    }
}

impl FromStr for QuadSurd {
    type Err = ParseSurdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ParseSurdError::Malformed(s.to_string());
        let s = s.trim();
        let Some(body) = s.strip_suffix(')') else {
            return parse_ratio(s).map(Self::from_ratio).map_err(|_| bad());
        };
        let (head, radicand) = body.rsplit_once("*sqrt(").ok_or_else(bad)?;
        // The sign joining the two parts is the last '+' or '-' that is not leading.
        let split = head
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .last()
            .map(|(i, _)| i)
            .ok_or_else(bad)?;
        let rational = parse_ratio(&head[..split]).map_err(|_| bad())?;
        let mut coeff = parse_ratio(&head[split + 1..]).map_err(|_| bad())?;
        if &head[split..split + 1] == "-" {
            coeff = -coeff;
        }
        let radicand = parse_ratio(radicand).map_err(|_| bad())?;
        if radicand.is_negative() {
            return Err(bad());
        }
        Ok(Self::new(rational, coeff, &radicand))
    }
}

impl Serialize for QuadSurd {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for QuadSurd {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, ratio};
    use proptest::prelude::*;

    fn golden() -> QuadSurd {
        // (sqrt(5) - 1) / 2
        QuadSurd::new(ratio("-1/2"), ratio("1/2"), &int(5))
    }

    #[test]
    fn sqrt_of_square_is_rational() {
        assert_eq!(
            QuadSurd::sqrt(&ratio("4/9")),
            QuadSurd::from_ratio(ratio("2/3"))
        );
        let s = QuadSurd::sqrt(&ratio("8/3"));
        // sqrt(8/3) = sqrt(24)/3 = (2/3) sqrt(6)
        assert_eq!(s.radicand(), &BigInt::from(6));
        assert_eq!(s.surd_coeff(), &ratio("2/3"));
        assert_eq!(s.mul(&s), QuadSurd::from_ratio(ratio("8/3")));
    }

    #[test]
    fn golden_ratio_conjugate_is_fixed_point() {
        // x = (1 + x) / (2 + x)  <=>  x^2 + x - 1 = 0
        let x = golden();
        let lhs = x
            .add_ratio(&int(1))
            .checked_div(&x.add_ratio(&int(2)))
            .unwrap();
        assert_eq!(lhs, x);
        assert!((x.to_f64() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_sign_of_near_cancellation() {
        // 1 - sqrt(2) < 0 and 3/2 - sqrt(2) > 0
        let r2 = QuadSurd::sqrt(&int(2));
        assert_eq!(
            QuadSurd::from_ratio(int(1)).sub(&r2).signum(),
            Ordering::Less
        );
        assert_eq!(
            QuadSurd::from_ratio(ratio("3/2")).sub(&r2).signum(),
            Ordering::Greater
        );
        assert_eq!(r2.sub(&r2).signum(), Ordering::Equal);
    }

    #[test]
    fn division_by_zero_is_none() {
        let zero = QuadSurd::from_ratio(int(0));
        assert!(golden().checked_div(&zero).is_none());
    }

    #[test]
    fn display_parse_round_trip() {
        for s in [
            golden(),
            golden().neg(),
            QuadSurd::from_ratio(ratio("7/3")),
            QuadSurd::sqrt(&int(12)),
        ] {
            let text = s.to_string();
            assert_eq!(text.parse::<QuadSurd>().unwrap(), s, "{text}");
        }
    }

    proptest! {
        #[test]
        fn field_axioms_hold(a in -50i64..50, b in -50i64..50, c in -50i64..50, e in -50i64..50, d in prop::sample::select(vec![2i64, 3, 5, 7, 10])) {
            let x = QuadSurd::new(int(a), int(b), &int(d));
            let y = QuadSurd::new(int(c), int(e), &int(d));
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            if let Some(q) = x.checked_div(&y) {
                prop_assert_eq!(q.mul(&y), x.clone());
            } else {
                prop_assert!(c == 0 && e == 0);
            }
            let approx = x.to_f64() - (a as f64 + b as f64 * (d as f64).sqrt());
            prop_assert!(approx.abs() < 1e-9);
            let sign_f = a as f64 + b as f64 * (d as f64).sqrt();
            if sign_f.abs() > 1e-9 {
                prop_assert_eq!(x.signum(), sign_f.partial_cmp(&0.0).unwrap());
            }
        }
    }
}
