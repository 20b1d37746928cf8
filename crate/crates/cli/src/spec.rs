//! Equation documents in TOML, rationals written as strings.
//!
//! ```toml
//! k = 4
//! alpha = "0"
//! A = "2"
//! constructor = "t1-periodic"
//!
//! [beta]
//! 2 = "1"
//! 4 = "1"
//!
//! [B]
//! 1 = "1"
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use trichotomy::{parse_ratio, Equation, InitialConditions, Ratio};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Constructor {
    T1Periodic,
    T2Periodic,
    T4ivPeriodic,
    T1Unbounded,
}

impl Constructor {
    pub fn name(self) -> &'static str {
        match self {
            Constructor::T1Periodic => "t1-periodic",
            Constructor::T2Periodic => "t2-periodic",
            Constructor::T4ivPeriodic => "t4iv-periodic",
            Constructor::T1Unbounded => "t1-unbounded",
        }
    }
}

impl fmt::Display for Constructor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Constructor {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Self::T1Periodic,
            Self::T2Periodic,
            Self::T4ivPeriodic,
            Self::T1Unbounded,
        ]
        .into_iter()
        .find(|c| c.name() == s)
        .ok_or_else(|| CliError::Parse(format!("unknown constructor {s:?}")))
    }
}

/// The document as written. `validate` turns it into an equation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquationSpec {
    pub k: usize,
    pub alpha: String,
    #[serde(rename = "A")]
    pub a: String,
    #[serde(default)]
    pub beta: BTreeMap<String, String>,
    #[serde(rename = "B", default)]
    pub b: BTreeMap<String, String>,
    /// `x_{-1}, ..., x_{-k}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_conditions: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constructor: Option<Constructor>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedSpec {
    pub equation: Equation,
    pub initial_conditions: Option<InitialConditions>,
    pub constructor: Option<Constructor>,
}

fn rational(field: &str, s: &str) -> Result<Ratio, CliError> {
    parse_ratio(s).map_err(|e| CliError::Parse(format!("{field}: {e}")))
}

fn coefficients(
    field: &str,
    map: &BTreeMap<String, String>,
) -> Result<BTreeMap<usize, Ratio>, CliError> {
    map.iter()
        .map(|(lag, c)| {
            let l: usize = lag.trim().parse().map_err(|_| {
                CliError::Parse(format!("{field}: lag {lag:?} is not a positive integer"))
            })?;
            if l == 0 {
                return Err(CliError::Parse(format!("{field}: lags start at 1")));
            }
            Ok((l, rational(&format!("{field}[{l}]"), c)?))
        })
        .collect()
}

impl EquationSpec {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec fields are TOML-representable")
    }

    /// Canonical document for an equation: lowest-terms coefficients, lags in
    /// increasing order, zero coefficients omitted.
    pub fn from_equation(
        eq: &Equation,
        initial_conditions: Option<&InitialConditions>,
        constructor: Option<Constructor>,
    ) -> Self {
        let strings = |m: &BTreeMap<usize, Ratio>| {
            m.iter()
                .map(|(l, c)| (l.to_string(), c.to_string()))
                .collect()
        };
        Self {
            k: eq.k(),
            alpha: eq.num_const().to_string(),
            a: eq.den_const().to_string(),
            beta: strings(eq.num_coeffs()),
            b: strings(eq.den_coeffs()),
            initial_conditions: initial_conditions.map(InitialConditions::to_strings),
            constructor,
        }
    }

    pub fn validate(&self) -> Result<ValidatedSpec, CliError> {
        let equation = Equation::new(
            rational("alpha", &self.alpha)?,
            rational("A", &self.a)?,
            coefficients("beta", &self.beta)?,
            coefficients("B", &self.b)?,
        )
        .map_err(|e| CliError::Parse(e.to_string()))?;
        if equation.k() != self.k {
            return Err(CliError::Parse(format!(
                "k = {} but the largest lag with a nonzero coefficient is {}",
                self.k,
                equation.k()
            )));
        }
        let initial_conditions = match &self.initial_conditions {
            Some(items) => Some(parse_ics(items, self.k)?),
            None => None,
        };
        Ok(ValidatedSpec {
            equation,
            initial_conditions,
            constructor: self.constructor,
        })
    }
}

/// Parses `x_{-1}, ..., x_{-k}` and checks length and sign.
pub fn parse_ics(items: &[String], k: usize) -> Result<InitialConditions, CliError> {
    let ics = InitialConditions::parse_list(items)
        .map_err(|e| CliError::Parse(format!("initial_conditions: {e}")))?;
    if ics.len() != k {
        return Err(CliError::Parse(format!(
            "initial_conditions: expected {k} values, got {}",
            ics.len()
        )));
    }
    if ics.has_negative() {
        return Err(CliError::Parse(
            "initial_conditions: values must be nonnegative".into(),
        ));
    }
    Ok(ics)
}

/// Splits a comma-separated `--ics` argument.
pub fn split_list(arg: &str) -> Vec<String> {
    arg.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}
