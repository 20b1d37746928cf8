//! Exact rational values and the few conversions the rest of the crate needs.
//!
//! [`Ratio`] is `num_rational::BigRational`: always reduced, positive
//! denominator, exact `+ - * /`. Division goes through [`checked_div`] wherever
//! the divisor is data-dependent.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{CheckedDiv, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Ratio = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRatioError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    InvalidInteger(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses `"p/q"` or `"n"`. Surrounding whitespace is ignored.
pub fn parse_ratio(s: &str) -> Result<Ratio, ParseRatioError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRatioError::Empty);
    }
    let int = |t: &str| -> Result<BigInt, ParseRatioError> {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| ParseRatioError::InvalidInteger(t.trim().to_string()))
    };
    match s.split_once('/') {
        None => Ok(Ratio::from_integer(int(s)?)),
        Some((n, d)) => {
            let d = int(d)?;
            if d.is_zero() {
                return Err(ParseRatioError::ZeroDenominator(s.to_string()));
            }
            Ok(Ratio::new(int(n)?, d))
        }
    }
}

/// Renders `"p/q"`, or `"n"` for integers. Inverse of [`parse_ratio`].
pub fn format_ratio(r: &Ratio) -> String {
    r.to_string()
}

/// Shorthand for literals in tests and examples. Panics on malformed input.
pub fn ratio(s: &str) -> Ratio {
    parse_ratio(s).unwrap_or_else(|e| panic!("bad rational literal {s:?}: {e}"))
}

pub fn int(n: i64) -> Ratio {
    Ratio::from_integer(BigInt::from(n))
}

pub fn checked_div(a: &Ratio, b: &Ratio) -> Option<Ratio> {
    a.checked_div(b)
}

pub fn to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or(if r.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// Exact conversion of a finite float; `None` for NaN or infinities.
pub fn from_f64(x: f64) -> Option<Ratio> {
    Ratio::from_float(x)
}

/// Largest bit length among numerator and denominator.
pub fn bit_size(r: &Ratio) -> u64 {
    r.numer().bits().max(r.denom().bits())
}

/// Rounds to the nearest value of the form `m * 2^e` with `m` carrying
/// `bits` significant bits (ties away from zero).
pub fn round_to_bits(x: &Ratio, bits: u32) -> Ratio {
    round_quotient(x.numer(), x.denom(), bits)
}

/// [`round_to_bits`] of `n / d` for `d > 0`, without reducing the fraction
/// first.
pub fn round_quotient(n: &BigInt, d: &BigInt, bits: u32) -> Ratio {
    if n.is_zero() {
        return Ratio::zero();
    }
    let n_mag = n.magnitude();
    let d_mag = d.magnitude();
    let mut shift = n_mag.bits() as i64 - d_mag.bits() as i64 - bits as i64;
    let scale = |shift: i64| {
        if shift >= 0 {
            (n_mag.clone(), d_mag << (shift as u64))
        } else {
            (n_mag << ((-shift) as u64), d_mag.clone())
        }
    };
    // Normalize so that 2^(bits-1) <= num / den < 2^bits whatever the representation.
    let (mut num, mut den) = scale(shift);
    if num >= (&den << bits) {
        shift += 1;
        (num, den) = scale(shift);
    }
    // round(num / den) = floor((2 num + den) / (2 den))
    let q: BigUint = ((num << 1u32) + &den) / (den << 1u32);
    // q * 2^shift in lowest terms, built without a gcd
    let (numer, denom) = if shift >= 0 {
        (q << (shift as u64), BigUint::one())
    } else {
        let tz = q.trailing_zeros().unwrap_or(0).min((-shift) as u64);
        (q >> tz, BigUint::one() << ((-shift) as u64 - tz))
    };
    let sign = if n.is_negative() {
        Sign::Minus
    } else {
        Sign::Plus
    };
    Ratio::new_raw(
        BigInt::from_biguint(sign, numer),
        BigInt::from_biguint(Sign::Plus, denom),
    )
}

/// `e` when `r = m / 2^e` in lowest terms.
pub fn dyadic_exponent(r: &Ratio) -> Option<u64> {
    let d = r.denom().magnitude();
    let tz = d.trailing_zeros().unwrap_or(0);
    (d.bits() == tz + 1).then_some(tz)
}

/// Exact square root when `r` is the square of a rational.
pub fn exact_sqrt(r: &Ratio) -> Option<Ratio> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let sn = n.sqrt();
    let sd = d.sqrt();
    (&sn * &sn == *n && &sd * &sd == *d).then(|| {
        Ratio::new(
            BigInt::from_biguint(Sign::Plus, sn),
            BigInt::from_biguint(Sign::Plus, sd),
        )
    })
}

/// `floor(sqrt(r) * 2^frac_bits) / 2^frac_bits`; absolute error below `2^-frac_bits`.
pub fn sqrt_floor(r: &Ratio, frac_bits: u32) -> Ratio {
    assert!(!r.is_negative(), "square root of a negative rational");
    // sqrt(n/d) = sqrt(n d) / d, scaled by 2^frac_bits before the integer root.
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let scaled: BigUint = (n * d) << (2 * frac_bits as u64);
    let root = scaled.sqrt();
    Ratio::new(
        BigInt::from_biguint(Sign::Plus, root),
        BigInt::from_biguint(Sign::Plus, d << (frac_bits as u64)),
    )
}

pub fn abs_diff(a: &Ratio, b: &Ratio) -> Ratio {
    (a - b).abs()
}

pub fn max_ref<'a>(a: &'a Ratio, b: &'a Ratio) -> &'a Ratio {
    if a.cmp(b) == Ordering::Less {
        b
    } else {
        a
    }
}

pub fn min_ref<'a>(a: &'a Ratio, b: &'a Ratio) -> &'a Ratio {
    if a.cmp(b) == Ordering::Greater {
        b
    } else {
        a
    }
}

/// Serde adapters rendering rationals as `"p/q"` strings.
pub mod serde_str {
    use super::{format_ratio, parse_ratio, Ratio};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_ratio(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio, D::Error> {
        let s = String::deserialize(d)?;
        parse_ratio(&s).map_err(D::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(r: &Option<Ratio>, s: S) -> Result<S::Ok, S::Error> {
            match r {
                Some(r) => s.serialize_some(&format_ratio(r)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Ratio>, D::Error> {
            Option::<String>::deserialize(d)?
                .map(|s| parse_ratio(&s).map_err(D::Error::custom))
                .transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(v: &[Ratio], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for r in v {
                seq.serialize_element(&format_ratio(r))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Ratio>, D::Error> {
            Vec::<String>::deserialize(d)?
                .iter()
                .map(|s| parse_ratio(s).map_err(D::Error::custom))
                .collect()
        }
    }

    pub mod map {
        use super::*;
        use serde::ser::SerializeMap;
        use std::collections::BTreeMap;

        pub fn serialize<S: Serializer>(
            m: &BTreeMap<usize, Ratio>,
            s: S,
        ) -> Result<S::Ok, S::Error> {
            let mut map = s.serialize_map(Some(m.len()))?;
            for (lag, r) in m {
                map.serialize_entry(&lag.to_string(), &format_ratio(r))?;
            }
            map.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<BTreeMap<usize, Ratio>, D::Error> {
            BTreeMap::<String, String>::deserialize(d)?
                .into_iter()
                .map(|(k, v)| {
                    let lag = k.parse::<usize>().map_err(D::Error::custom)?;
                    let r = parse_ratio(&v).map_err(D::Error::custom)?;
                    Ok((lag, r))
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_both_literal_forms() {
        assert_eq!(parse_ratio("3/6").unwrap(), ratio("1/2"));
        assert_eq!(parse_ratio(" 7 ").unwrap(), int(7));
        assert_eq!(parse_ratio("-4/-8").unwrap(), ratio("1/2"));
        assert_eq!(format_ratio(&ratio("6/4")), "3/2");
        assert_eq!(format_ratio(&int(5)), "5");
    }

    #[test]
    fn rejects_zero_denominator_and_garbage() {
        assert!(matches!(
            parse_ratio("1/0"),
            Err(ParseRatioError::ZeroDenominator(_))
        ));
        assert!(matches!(parse_ratio(""), Err(ParseRatioError::Empty)));
        assert!(matches!(
            parse_ratio("1.5"),
            Err(ParseRatioError::InvalidInteger(_))
        ));
        assert!(checked_div(&int(1), &int(0)).is_none());
    }

    #[test]
    fn exact_sqrt_detects_squares() {
        assert_eq!(exact_sqrt(&ratio("9/4")), Some(ratio("3/2")));
        assert_eq!(exact_sqrt(&ratio("5")), None);
        assert_eq!(exact_sqrt(&ratio("-1")), None);
    }

    #[test]
    fn sqrt_floor_brackets_root() {
        let r = sqrt_floor(&int(2), 100);
        let eps = Ratio::new(BigInt::one(), BigInt::one() << 100u32);
        assert!(&r * &r <= int(2));
        let hi = &r + &eps;
        assert!(&hi * &hi > int(2));
    }

    #[test]
    fn rounding_keeps_requested_precision() {
        let third = ratio("1/3");
        let r = round_to_bits(&third, 128);
        let err = abs_diff(&r, &third) / &third;
        assert!(err < Ratio::new(BigInt::one(), BigInt::one() << 127u32));
        assert_eq!(round_to_bits(&ratio("3/4"), 64), ratio("3/4"));
        assert_eq!(round_to_bits(&ratio("-5/2"), 64), ratio("-5/2"));
    }

    proptest! {
        #[test]
        fn literal_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = Ratio::new(BigInt::from(n), BigInt::from(d));
            prop_assert_eq!(parse_ratio(&format_ratio(&r)).unwrap(), r);
        }

        #[test]
        fn rounding_is_monotone(a in 1i64..1_000_000, b in 1i64..1_000_000, c in 1i64..1_000_000, d in 1i64..1_000_000) {
            let x = Ratio::new(BigInt::from(a), BigInt::from(b));
            let y = Ratio::new(BigInt::from(c), BigInt::from(d));
            if x <= y {
                prop_assert!(round_to_bits(&x, 64) <= round_to_bits(&y, 64));
            }
        }
    }
}
