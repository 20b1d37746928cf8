//! Decides which of the four trichotomy families an equation belongs to and
//! what that family predicts.
//!
//! * T1: `alpha = 0`, `sum beta > 0`, `A > 0`, no denominator lag divisible
//!   by `gcd(I_beta)`. Compares `A` with `sum beta`; boundary period `gcd(I_beta)`.
//! * T2: `alpha > 0`, `sum B > 0`, with `g = gcd(I_beta ∪ I_B)`: every
//!   numerator lag divisible by `2g` and every denominator lag `j` with
//!   `2g | j + g`. Compares `A` with `sum beta`; boundary period `2g`.
//! * T3: the odd-lag shape `(alpha + sum beta_{2i} x_{n-2i} + x_{n-l}) / (A + x_{n-l})`
//!   with `l` odd and positive initial values. Compares `A + 1` with the sum
//!   of the even coefficients; boundary period `2 gcd(I_beta)`, where `I_beta`
//!   contains `l`.
//! * T4: the same shape with nonnegative initial values, six cases.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::equation::{index_profile, Equation, IndexProfile};
use crate::number_theory::gcd_set;
use crate::ratio::{self, Ratio};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    T1,
    T2,
    T3,
    T4,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub satisfied: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub family: Family,
    pub holds: bool,
    pub conditions: Vec<Condition>,
}

impl HypothesisReport {
    fn new(family: Family, conditions: Vec<Condition>) -> Self {
        Self {
            family,
            holds: conditions.iter().all(|c| c.satisfied),
            conditions,
        }
    }

    /// The first failing condition, if any.
    pub fn first_failure(&self) -> Option<&Condition> {
        self.conditions.iter().find(|c| !c.satisfied)
    }
}

fn cond(name: &str, satisfied: bool, detail: impl Into<String>) -> Condition {
    Condition {
        name: name.to_string(),
        satisfied,
        detail: detail.into(),
    }
}

/// The odd-lag family, normalized so that the odd lag carries coefficient 1
/// in both numerator and denominator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OddLagShape {
    pub odd_lag: usize,
    #[serde(with = "ratio::serde_str::map")]
    pub even_coeffs: BTreeMap<usize, Ratio>,
    #[serde(with = "ratio::serde_str")]
    pub num_const: Ratio,
    #[serde(with = "ratio::serde_str")]
    pub den_const: Ratio,
    #[serde(with = "ratio::serde_str")]
    pub even_sum: Ratio,
}

impl OddLagShape {
    pub fn new(
        odd_lag: usize,
        even_coeffs: BTreeMap<usize, Ratio>,
        num_const: Ratio,
        den_const: Ratio,
    ) -> Self {
        assert!(odd_lag % 2 == 1, "the shared lag must be odd");
        assert!(
            even_coeffs
                .iter()
                .all(|(&l, c)| l > 0 && l % 2 == 0 && c.is_positive()),
            "numerator lags other than the odd lag must be even with positive coefficients"
        );
        let even_sum = even_coeffs.values().sum();
        Self {
            odd_lag,
            even_coeffs,
            num_const,
            den_const,
            even_sum,
        }
    }

    pub fn literal(odd_lag: usize, even: &[(usize, &str)], alpha: &str, a: &str) -> Self {
        Self::new(
            odd_lag,
            even.iter().map(|&(l, s)| (l, ratio::ratio(s))).collect(),
            ratio::ratio(alpha),
            ratio::ratio(a),
        )
    }

    pub fn to_equation(&self) -> Equation {
        let mut num = self.even_coeffs.clone();
        num.insert(self.odd_lag, Ratio::one());
        Equation::new(
            self.num_const.clone(),
            self.den_const.clone(),
            num,
            BTreeMap::from([(self.odd_lag, Ratio::one())]),
        )
        .expect("shape parameters are valid")
    }

    /// gcd of the numerator lags, the odd lag included.
    pub fn gcd_numerator_lags(&self) -> usize {
        gcd_set(
            self.even_coeffs
                .keys()
                .chain(std::iter::once(&self.odd_lag))
                .map(|&l| l as u64),
        ) as usize
    }

    /// Sign of `(A + 1) - sum beta_{2i}`.
    pub fn regime(&self) -> Regime {
        Regime::from_margin(&(&self.den_const + Ratio::one() - &self.even_sum))
    }
}

/// Position relative to the trichotomy boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Inside the equilibrium-convergence region.
    Subcritical,
    Boundary,
    /// Beyond the boundary: unbounded solutions exist.
    Supercritical,
}

impl Regime {
    fn from_margin(margin: &Ratio) -> Self {
        if margin.is_positive() {
            Regime::Subcritical
        } else if margin.is_zero() {
            Regime::Boundary
        } else {
            Regime::Supercritical
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Verdict {
    EquilibriumConvergence {
        globally_asymptotically_stable: bool,
    },
    /// `period` is the predicted period, not a detected one.
    PeriodicConvergence {
        period: usize,
    },
    UnboundedExists,
    OutOfScope {
        reason: String,
    },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::EquilibriumConvergence {
                globally_asymptotically_stable: true,
            } => {
                write!(f, "EquilibriumConvergence, globally asymptotically stable")
            }
            Verdict::EquilibriumConvergence { .. } => write!(f, "EquilibriumConvergence"),
            Verdict::PeriodicConvergence { period } => {
                write!(f, "PeriodicConvergence period {period}")
            }
            Verdict::UnboundedExists => write!(f, "UnboundedExists"),
            Verdict::OutOfScope { reason } => write!(f, "OutOfScope ({reason})"),
        }
    }
}

impl Verdict {
    pub fn predicted_period(&self) -> Option<usize> {
        match self {
            Verdict::PeriodicConvergence { period } => Some(*period),
            Verdict::EquilibriumConvergence { .. } => Some(1),
            _ => None,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Verdict::EquilibriumConvergence { .. } => "EquilibriumConvergence",
            Verdict::PeriodicConvergence { .. } => "PeriodicConvergence",
            Verdict::UnboundedExists => "UnboundedExists",
            Verdict::OutOfScope { .. } => "OutOfScope",
        }
    }
}

/// The six cases of the fourth family for nonnegative initial values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum T4Case {
    /// `A > sum`.
    I,
    /// `sum - 1 < A <= sum`, `alpha > 0`.
    II,
    /// `sum - 1 < A <= sum`, `A = 0`.
    III,
    /// `sum - 1 < A <= sum`, `alpha = 0`, `A > 0`.
    IV,
    /// `A + 1 = sum`.
    V,
    /// `A + 1 < sum`.
    VI,
}

pub fn t4_case(shape: &OddLagShape) -> T4Case {
    let a = &shape.den_const;
    let s = &shape.even_sum;
    if a > s {
        return T4Case::I;
    }
    match shape.regime() {
        Regime::Boundary => T4Case::V,
        Regime::Supercritical => T4Case::VI,
        Regime::Subcritical => {
            if shape.num_const.is_positive() {
                T4Case::II
            } else if a.is_zero() {
                T4Case::III
            } else {
                T4Case::IV
            }
        }
    }
}

pub fn t4_verdict(shape: &OddLagShape) -> Verdict {
    let g = shape.gcd_numerator_lags();
    match t4_case(shape) {
        T4Case::I | T4Case::II | T4Case::III => Verdict::EquilibriumConvergence {
            globally_asymptotically_stable: false,
        },
        T4Case::IV => Verdict::PeriodicConvergence { period: g },
        T4Case::V => Verdict::PeriodicConvergence { period: 2 * g },
        T4Case::VI => Verdict::UnboundedExists,
    }
}

pub fn check_t1(eq: &Equation) -> HypothesisReport {
    let p = index_profile(eq);
    let divisible: Vec<usize> = if p.g_beta == 0 {
        vec![]
    } else {
        p.i_b
            .iter()
            .copied()
            .filter(|j| j % p.g_beta == 0)
            .collect()
    };
    HypothesisReport::new(
        Family::T1,
        vec![
            cond(
                "alpha = 0",
                eq.num_const().is_zero(),
                format!("alpha = {}", eq.num_const()),
            ),
            cond(
                "sum beta > 0",
                p.sum_beta.is_positive(),
                format!("sum beta = {}", p.sum_beta),
            ),
            cond(
                "A > 0",
                eq.den_const().is_positive(),
                format!("A = {}", eq.den_const()),
            ),
            cond(
                "no j in I_B divisible by gcd(I_beta)",
                p.g_beta > 0 && divisible.is_empty(),
                match divisible.first() {
                    Some(j) => format!("gcd(I_beta) = {} divides j={j}", p.g_beta),
                    None if p.g_beta == 0 => "I_beta is empty".to_string(),
                    None => format!("gcd(I_beta) = {} divides no j in {:?}", p.g_beta, p.i_b),
                },
            ),
        ],
    )
}

pub fn check_t2(eq: &Equation) -> HypothesisReport {
    let p = index_profile(eq);
    let g = p.g_union;
    let bad_i: Vec<usize> = p
        .i_beta
        .iter()
        .copied()
        .filter(|i| g == 0 || i % (2 * g) != 0)
        .collect();
    let bad_j: Vec<usize> = p
        .i_b
        .iter()
        .copied()
        .filter(|j| g == 0 || (j + g) % (2 * g) != 0)
        .collect();
    HypothesisReport::new(
        Family::T2,
        vec![
            cond(
                "alpha > 0",
                eq.num_const().is_positive(),
                format!("alpha = {}", eq.num_const()),
            ),
            cond(
                "sum B > 0",
                p.sum_b.is_positive(),
                format!("sum B = {}", p.sum_b),
            ),
            cond(
                "2g divides every i in I_beta",
                bad_i.is_empty(),
                format!("g = gcd(I_beta ∪ I_B) = {g}; failing lags {bad_i:?}"),
            ),
            cond(
                "2g divides j + g for every j in I_B",
                bad_j.is_empty(),
                format!("g = {g}; failing lags {bad_j:?}"),
            ),
        ],
    )
}

/// Matches the odd-lag family after dividing through by the shared
/// coefficient `B_l`.
pub fn recognize_t3(eq: &Equation) -> Option<OddLagShape> {
    shape_conditions(eq).0
}

fn shape_conditions(eq: &Equation) -> (Option<OddLagShape>, Vec<Condition>) {
    let den = eq.den_coeffs();
    let single = den.len() == 1;
    let mut conditions = vec![cond(
        "I_B is a single lag l",
        single,
        format!("I_B = {:?}", den.keys().collect::<Vec<_>>()),
    )];
    if !single {
        return (None, conditions);
    }
    let (&ell, b_ell) = den.iter().next().expect("one entry");
    let odd = ell % 2 == 1;
    let matched = eq.num_coeffs().get(&ell) == Some(b_ell);
    let others_even = eq.num_coeffs().keys().all(|&i| i == ell || i % 2 == 0);
    conditions.push(cond("l odd", odd, format!("l = {ell}")));
    conditions.push(cond(
        "beta_l = B_l",
        matched,
        format!(
            "beta_{ell} = {}, B_{ell} = {b_ell}",
            eq.num_coeffs()
                .get(&ell)
                .map_or("0".to_string(), ToString::to_string)
        ),
    ));
    conditions.push(cond(
        "remaining numerator lags even",
        others_even,
        format!("I_beta = {:?}", eq.num_coeffs().keys().collect::<Vec<_>>()),
    ));
    if !(odd && matched && others_even) {
        return (None, conditions);
    }
    let even = eq
        .num_coeffs()
        .iter()
        .filter(|(&i, _)| i != ell)
        .map(|(&i, c)| (i, c / b_ell))
        .collect();
    let shape = OddLagShape::new(ell, even, eq.num_const() / b_ell, eq.den_const() / b_ell);
    (Some(shape), conditions)
}

pub fn check_t3(eq: &Equation) -> HypothesisReport {
    let (_, mut conditions) = shape_conditions(eq);
    conditions.push(cond(
        "positive initial conditions",
        true,
        "assumed for every admissible run",
    ));
    HypothesisReport::new(Family::T3, conditions)
}

pub fn check_t4(eq: &Equation) -> HypothesisReport {
    let (shape, mut conditions) = shape_conditions(eq);
    let detail = match &shape {
        Some(s) => format!("case {:?}", t4_case(s)),
        None => "shape not matched".to_string(),
    };
    conditions.push(cond("nonnegative initial conditions", true, detail));
    HypothesisReport::new(Family::T4, conditions)
}

/// Outcome under nonnegative initial values for the odd-lag family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonnegativeOutcome {
    pub case: T4Case,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub reports: Vec<HypothesisReport>,
    pub profile: IndexProfile,
    /// The first applicable family in the order T1, T2, T3.
    pub family: Option<Family>,
    pub regime: Option<Regime>,
    pub verdict: Verdict,
    pub shape: Option<OddLagShape>,
    pub nonnegative_ics: Option<NonnegativeOutcome>,
}

impl Classification {
    /// The period the governing family assigns at its boundary, whatever
    /// side of it this equation lies on.
    pub fn boundary_period(&self) -> Option<usize> {
        match self.family? {
            Family::T1 => Some(self.profile.g_beta),
            Family::T2 => Some(2 * self.profile.g_union),
            Family::T3 | Family::T4 => self.shape.as_ref().map(|s| 2 * s.gcd_numerator_lags()),
        }
    }
}

pub fn classify(eq: &Equation) -> Classification {
    let profile = index_profile(eq);
    let reports = vec![check_t1(eq), check_t2(eq), check_t3(eq), check_t4(eq)];
    let shape = recognize_t3(eq);
    let nonnegative_ics = shape.as_ref().map(|s| NonnegativeOutcome {
        case: t4_case(s),
        verdict: t4_verdict(s),
    });
    let margin = eq.den_const() - &profile.sum_beta;

    let (family, regime, verdict) = if reports[0].holds {
        let r = Regime::from_margin(&margin);
        (
            Some(Family::T1),
            Some(r),
            trichotomy(r, profile.g_beta, true),
        )
    } else if reports[1].holds {
        let r = Regime::from_margin(&margin);
        (
            Some(Family::T2),
            Some(r),
            trichotomy(r, 2 * profile.g_union, true),
        )
    } else if let Some(s) = &shape {
        let r = s.regime();
        (
            Some(Family::T3),
            Some(r),
            trichotomy(r, 2 * s.gcd_numerator_lags(), false),
        )
    } else {
        let reason = reports
            .iter()
            .filter_map(|r| {
                r.first_failure()
                    .map(|c| format!("{} fails: {}", r.family, c.detail))
            })
            .collect::<Vec<_>>()
            .join("; ");
        (None, None, Verdict::OutOfScope { reason })
    };

    Classification {
        reports,
        profile,
        family,
        regime,
        verdict,
        shape,
        nonnegative_ics,
    }
}

fn trichotomy(regime: Regime, period: usize, unique: bool) -> Verdict {
    match regime {
        Regime::Subcritical => Verdict::EquilibriumConvergence {
            globally_asymptotically_stable: unique,
        },
        Regime::Boundary => Verdict::PeriodicConvergence { period },
        Regime::Supercritical => Verdict::UnboundedExists,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn t1_hypotheses() {
        assert!(
            check_t1(&Equation::literal(
                "0",
                "1",
                &[(2, "1"), (4, "1")],
                &[(1, "1"), (3, "1")]
            ))
            .holds
        );
        let r = check_t1(&Equation::literal(
            "0",
            "1",
            &[(2, "1"), (4, "1")],
            &[(2, "1")],
        ));
        assert!(!r.holds);
        assert!(r.first_failure().unwrap().detail.contains("divides j=2"));
        let r = check_t1(&Equation::literal("0", "1", &[], &[(1, "1")]));
        assert_eq!(r.first_failure().unwrap().name, "sum beta > 0");
    }

    #[test]
    fn t2_hypotheses() {
        assert!(check_t2(&Equation::literal("1", "1", &[(2, "1")], &[(1, "1")])).holds);
        assert!(
            check_t2(&Equation::literal(
                "1",
                "1",
                &[(2, "1"), (4, "1")],
                &[(1, "1"), (3, "1")]
            ))
            .holds
        );
        assert!(!check_t2(&Equation::literal("1", "1", &[(1, "1")], &[(1, "1")])).holds);
    }

    #[test]
    fn recognizes_odd_lag_family() {
        let eq = Equation::literal("1", "1/2", &[(2, "3/4"), (4, "3/4"), (7, "1")], &[(7, "1")]);
        let s = recognize_t3(&eq).unwrap();
        assert_eq!(s.odd_lag, 7);
        assert_eq!(
            s.even_coeffs,
            BTreeMap::from([(2, ratio("3/4")), (4, ratio("3/4"))])
        );

        let eq = Equation::literal("0", "1", &[(6, "2"), (3, "1")], &[(3, "1")]);
        let s = recognize_t3(&eq).unwrap();
        assert_eq!(
            (s.odd_lag, s.even_coeffs.clone()),
            (3, BTreeMap::from([(6, int(2))]))
        );
        assert_eq!(s.to_equation(), eq);

        assert!(recognize_t3(&Equation::literal("0", "1", &[(2, "1")], &[(2, "1")])).is_none());
    }

    #[test]
    fn recognition_normalizes_shared_coefficient() {
        let eq = Equation::literal("3", "2", &[(2, "4"), (1, "2")], &[(1, "2")]);
        let s = recognize_t3(&eq).unwrap();
        assert_eq!(s.num_const, ratio("3/2"));
        assert_eq!(s.den_const, int(1));
        assert_eq!(s.even_coeffs, BTreeMap::from([(2, int(2))]));
    }

    #[test]
    fn classify_examples() {
        let c = classify(&Equation::literal(
            "0",
            "3",
            &[(2, "1"), (4, "1")],
            &[(1, "1")],
        ));
        assert_eq!(c.family, Some(Family::T1));
        assert_eq!(
            c.verdict,
            Verdict::EquilibriumConvergence {
                globally_asymptotically_stable: true
            }
        );

        let c = classify(&Equation::literal("1", "1", &[(2, "1")], &[(1, "1")]));
        assert_eq!(c.family, Some(Family::T2));
        assert_eq!(c.verdict, Verdict::PeriodicConvergence { period: 2 });

        let c = classify(&Equation::literal(
            "3",
            "1",
            &[(6, "2"), (3, "1")],
            &[(3, "1")],
        ));
        assert_eq!(c.family, Some(Family::T3));
        assert_eq!(c.verdict, Verdict::PeriodicConvergence { period: 6 });
        assert_eq!(c.reports.len(), 4);
    }

    #[test]
    fn out_of_scope_reports_reasons() {
        let c = classify(&Equation::literal("0", "1", &[(2, "1")], &[(2, "1")]));
        assert_eq!(c.family, None);
        match c.verdict {
            Verdict::OutOfScope { reason } => assert!(
                reason.contains("T1 fails: gcd(I_beta) = 2 divides j=2"),
                "{reason}"
            ),
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn riccati_degenerate_case_converges() {
        let c = classify(&Equation::literal("1", "1", &[(3, "1")], &[(3, "1")]));
        assert_eq!(c.family, Some(Family::T3));
        assert_eq!(
            c.verdict,
            Verdict::EquilibriumConvergence {
                globally_asymptotically_stable: false
            }
        );
    }

    #[test]
    fn t4_cases() {
        let case =
            |even: &[(usize, &str)], alpha, a| t4_case(&OddLagShape::literal(3, even, alpha, a));
        assert_eq!(case(&[(6, "2")], "0", "3"), T4Case::I);
        assert_eq!(case(&[(6, "2")], "1", "3/2"), T4Case::II);
        assert_eq!(case(&[(6, "1/2")], "0", "0"), T4Case::III);
        assert_eq!(case(&[(6, "2")], "0", "3/2"), T4Case::IV);
        assert_eq!(case(&[(6, "2")], "0", "1"), T4Case::V);
        assert_eq!(case(&[(6, "2")], "0", "1/2"), T4Case::VI);
        let s = OddLagShape::literal(3, &[(6, "2")], "0", "3/2");
        assert_eq!(t4_verdict(&s), Verdict::PeriodicConvergence { period: 3 });
    }

    fn shape() -> impl Strategy<Value = OddLagShape> {
        (
            (0usize..8).prop_map(|i| 2 * i + 1),
            prop::collection::btree_map(
                (1usize..=7).prop_map(|i| 2 * i),
                (1i64..20, 1i64..6),
                1..4,
            ),
            (0i64..20, 1i64..6),
            (0i64..20, 1i64..6),
        )
            .prop_map(|(ell, even, (an, ad), (bn, bd))| {
                let even = even
                    .into_iter()
                    .map(|(l, (n, d))| (l, Ratio::new(n.into(), d.into())))
                    .collect();
                OddLagShape::new(
                    ell,
                    even,
                    Ratio::new(an.into(), ad.into()),
                    Ratio::new(bn.into(), bd.into()),
                )
            })
    }

    proptest! {
        #[test]
        fn t2_implies_parity_structure(
            beta in prop::collection::btree_set(1usize..=12, 0..4),
            b in prop::collection::btree_set(1usize..=12, 1..4),
        ) {
            let eq = Equation::new(
                int(1), int(1),
                beta.iter().map(|&l| (l, int(1))).collect(),
                b.iter().map(|&l| (l, int(1))).collect(),
            ).unwrap();
            if check_t2(&eq).holds {
                let g = index_profile(&eq).g_union;
                for i in &beta {
                    prop_assert_eq!((i / g) % 2, 0);
                }
                for j in &b {
                    prop_assert_eq!((j / g) % 2, 1);
                }
            }
        }

        #[test]
        fn recognition_is_scale_invariant(s in shape(), n in 1i64..9, d in 1i64..9) {
            let eq = s.to_equation();
            let c = Ratio::new(n.into(), d.into());
            prop_assert_eq!(recognize_t3(&eq.scaled(&c)), Some(s));
        }

        #[test]
        fn periods_are_never_zero(s in shape()) {
            let c = classify(&s.to_equation());
            prop_assert_eq!(c.family, Some(Family::T3));
            if let Verdict::PeriodicConvergence { period } = c.verdict {
                prop_assert!(period > 0);
            }
        }
    }
}
