//! Initial values `x_{-1}, ..., x_{-k}`, stored newest first.

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::ratio::{parse_ratio, Ratio};
use crate::surd::QuadSurd;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitialConditions {
    Rational(Vec<Ratio>),
    /// At least one value is irrational; all share one quadratic field.
    Surd(Vec<QuadSurd>),
}

impl InitialConditions {
    /// Collapses to the rational variant when every value is rational.
    pub fn from_surds(values: Vec<QuadSurd>) -> Self {
        if values.iter().all(QuadSurd::is_rational) {
            Self::Rational(
                values
                    .into_iter()
                    .map(|v| v.as_rational().cloned().expect("rational"))
                    .collect(),
            )
        } else {
            Self::Surd(values)
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Rational(v) => v.len(),
            Self::Surd(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_rational(&self) -> Option<&[Ratio]> {
        match self {
            Self::Rational(v) => Some(v),
            Self::Surd(_) => None,
        }
    }

    /// Every value in the quadratic field (rationals embed trivially).
    pub fn to_surds(&self) -> Vec<QuadSurd> {
        match self {
            Self::Rational(v) => v.iter().cloned().map(QuadSurd::from).collect(),
            Self::Surd(v) => v.clone(),
        }
    }

    /// Rational values, with surds rounded to `bits` significant bits.
    pub fn approximate(&self, bits: u32) -> Vec<Ratio> {
        match self {
            Self::Rational(v) => v.clone(),
            Self::Surd(v) => v.iter().map(|s| s.approximate(bits)).collect(),
        }
    }

    pub fn has_negative(&self) -> bool {
        match self {
            Self::Rational(v) => v.iter().any(Signed::is_negative),
            Self::Surd(v) => v.iter().any(QuadSurd::is_negative),
        }
    }

    pub fn to_strings(&self) -> Vec<String> {
        match self {
            Self::Rational(v) => v.iter().map(ToString::to_string).collect(),
            Self::Surd(v) => v.iter().map(ToString::to_string).collect(),
        }
    }

    pub fn parse_list(items: &[String]) -> Result<Self, String> {
        if items.iter().all(|s| parse_ratio(s).is_ok()) {
            return Ok(Self::Rational(
                items
                    .iter()
                    .map(|s| parse_ratio(s).expect("checked"))
                    .collect(),
            ));
        }
        items
            .iter()
            .map(|s| s.parse::<QuadSurd>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_surds)
    }
}

impl fmt::Display for InitialConditions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl Serialize for InitialConditions {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for InitialConditions {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(d)?;
        Self::parse_list(&items).map_err(serde::de::Error::custom)
    }
}
