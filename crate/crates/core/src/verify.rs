//! End-to-end evidence for a classification: exact cycle certificates for
//! constructed initial values, seeded random runs for convergence, and
//! witness searches beyond the boundary.

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{classify, Classification, Family, Regime, T4Case, Verdict};
use crate::dynamics::{
    a_priori_bound, bound_report, certify_prime_period, default_window, default_witness_grid,
    detect_cycle, positivity_classes, simulate, simulate_in_field, unbounded_witness_search,
    BoundReport, CycleCertificate, IcSampler, Monitor, PeriodReport, PositivityReport,
    SimulationConfig, Witness, DEFAULT_STEPS, DEFAULT_TOLERANCE,
};
use crate::equation::{equilibria, Equation};
use crate::ics::InitialConditions;
use crate::ratio::{self, Ratio};
use crate::reductions::{
    boundary_cycle_t3, periodic_ic_t1, periodic_ic_t2, periodic_ic_t4_case_iv, shift_equation,
    unbounded_ic_t1, ReductionError,
};
use crate::surd::QuadSurd;

pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_RANDOM_ICS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub steps: usize,
    /// Horizon for random runs not yet converged after `steps`.
    pub max_steps: usize,
    pub precision_bits: u32,
    pub tolerance: f64,
    /// `None` means `4 k p`.
    pub window: Option<usize>,
    pub seed: u64,
    pub random_ics: usize,
    #[serde(with = "ratio::serde_str")]
    pub threshold: Ratio,
    /// Full periods checked exactly after the initial values.
    pub certified_periods: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            steps: DEFAULT_STEPS,
            max_steps: 4 * DEFAULT_STEPS,
            precision_bits: 128,
            tolerance: DEFAULT_TOLERANCE,
            window: None,
            seed: DEFAULT_SEED,
            random_ics: DEFAULT_RANDOM_ICS,
            threshold: ratio::int(1_000_000),
            certified_periods: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// One seeded random trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomRun {
    pub ics: InitialConditions,
    /// Horizon actually simulated.
    pub steps: usize,
    pub period: Option<PeriodReport>,
    /// Distance from the last iterate to the nearest equilibrium.
    pub equilibrium_distance: Option<f64>,
    pub monitors_held: bool,
    /// Whether the orbit stays below `max(ICs, alpha / (A - sum beta))`,
    /// when `A > sum beta`.
    pub a_priori_held: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonnegativeEvidence {
    pub case: T4Case,
    pub constructed_ics: Option<InitialConditions>,
    pub certificate: Option<CycleCertificate>,
    pub positivity: Option<PositivityReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub classification: Classification,
    pub options: VerifyOptions,
    pub constructed_ics: Option<InitialConditions>,
    pub certificate: Option<CycleCertificate>,
    pub random_runs: Vec<RandomRun>,
    /// Tail bounds of the first random run.
    pub bounds: Option<BoundReport>,
    pub witness: Option<Witness>,
    pub nonnegative: Option<NonnegativeEvidence>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

pub fn verify(eq: &Equation, opts: &VerifyOptions) -> VerificationReport {
    let classification = classify(eq);
    let mut report = VerificationReport {
        classification: classification.clone(),
        options: opts.clone(),
        constructed_ics: None,
        certificate: None,
        random_runs: Vec::new(),
        bounds: None,
        witness: None,
        nonnegative: None,
        checks: Vec::new(),
        passed: false,
    };
    let (Some(family), Some(regime)) = (classification.family, classification.regime) else {
        return report;
    };
    match (regime, &classification.verdict) {
        (Regime::Boundary, Verdict::PeriodicConvergence { period }) => {
            boundary_checks(eq, family, &classification, *period, opts, &mut report)
        }
        (Regime::Subcritical, _) => random_checks(eq, family, 1, opts, &mut report),
        _ => unbounded_checks(eq, &classification, opts, &mut report),
    }
    if let Some(outcome) = &classification.nonnegative_ics {
        if outcome.case == T4Case::IV {
            case_iv_checks(&classification, opts, &mut report);
        }
    }
    report.passed = !report.checks.is_empty() && report.checks.iter().all(|c| c.passed);
    report
}

/// Initial values realizing the boundary cycle for the applicable family.
pub fn construct_boundary_cycle(
    eq: &Equation,
    classification: &Classification,
) -> Result<InitialConditions, ReductionError> {
    match classification.family {
        Some(Family::T1) => periodic_ic_t1(eq),
        Some(Family::T2) => periodic_ic_t2(eq),
        Some(Family::T3) => {
            let shape = classification.shape.as_ref().expect("T3 carries its shape");
            boundary_cycle_t3(shape).map(|(ics, _, _)| ics)
        }
        _ => Err(ReductionError::NotApplicable(
            "no boundary family applies".into(),
        )),
    }
}

/// Simulates `ics` in the quadratic field and certifies the chronological
/// sequence (initial values followed by `periods * p` iterates).
pub fn certify_orbit(
    eq: &Equation,
    ics: &InitialConditions,
    p: usize,
    periods: usize,
) -> Result<CycleCertificate, String> {
    let values = ics.to_surds();
    let traj =
        simulate_in_field::<QuadSurd>(eq, &values, periods * p).map_err(|e| e.to_string())?;
    let seq: Vec<QuadSurd> = traj.chronological().cloned().collect();
    Ok(certify_prime_period(&seq, p))
}

fn boundary_checks(
    eq: &Equation,
    family: Family,
    classification: &Classification,
    p: usize,
    opts: &VerifyOptions,
    report: &mut VerificationReport,
) {
    match construct_boundary_cycle(eq, classification) {
        Ok(ics) => {
            let check = match certify_orbit(eq, &ics, p, opts.certified_periods) {
                Ok(cert) => {
                    let ok = cert.is_prime();
                    let detail = format!(
                        "ICs {ics}: periodic={} prime period {:?}, refuted divisors {:?}",
                        cert.periodic,
                        cert.prime_period,
                        cert.refuted_divisors
                            .iter()
                            .map(|d| d.0)
                            .collect::<Vec<_>>()
                    );
                    report.certificate = Some(cert);
                    Check::new("exact prime period", ok, detail)
                }
                Err(e) => Check::new("exact prime period", false, e),
            };
            report.checks.push(check);
            report.constructed_ics = Some(ics);
        }
        Err(e) => report
            .checks
            .push(Check::new("exact prime period", false, e.to_string())),
    }
    random_checks(eq, family, p, opts, report);
}

fn random_checks(
    eq: &Equation,
    family: Family,
    p: usize,
    opts: &VerifyOptions,
    report: &mut VerificationReport,
) {
    let k = eq.k();
    let window = opts.window.unwrap_or_else(|| default_window(k, p));
    let boundary = report.classification.regime == Some(Regime::Boundary);
    let monitors = match (boundary, family) {
        (true, Family::T1) => vec![Monitor::EnvelopeT1],
        (true, Family::T2) => vec![Monitor::EnvelopeT2],
        _ => vec![],
    };
    let targets: Vec<Ratio> = if p == 1 {
        equilibria(eq)
            .map(|set| {
                set.all()
                    .iter()
                    .map(|x| x.approximate(opts.precision_bits))
                    .collect()
            })
            .unwrap_or_default()
    } else {
        Vec::new()
    };
    let samples = IcSampler::new(opts.seed).samples(k, opts.random_ics);
    let run = |ics: &InitialConditions, steps: usize| {
        let cfg =
            SimulationConfig::float(steps, opts.precision_bits).with_monitors(monitors.clone());
        simulate(eq, ics, &cfg).map(|t| {
            let period = detect_cycle(&t, p, opts.tolerance, window).ok();
            (t, period)
        })
    };
    // Runs still short of the tolerance get one longer horizon.
    let run_extended = |ics: &InitialConditions| {
        let first = run(ics, opts.steps)?;
        if opts.max_steps > opts.steps && !first.1.as_ref().is_some_and(|r| r.converged) {
            run(ics, opts.max_steps)
        } else {
            Ok(first)
        }
    };

    let runs: Vec<(RandomRun, Option<BoundReport>)> = samples
        .into_par_iter()
        .map(|ics| match run_extended(&ics) {
            Err(e) => (
                RandomRun {
                    ics,
                    steps: 0,
                    period: None,
                    equilibrium_distance: None,
                    monitors_held: false,
                    a_priori_held: None,
                    error: Some(e.to_string()),
                },
                None,
            ),
            Ok((t, period)) => {
                let last = t.values.last().expect("steps > 0");
                let equilibrium_distance = targets
                    .iter()
                    .map(|x| ratio::to_f64(&ratio::abs_diff(x, last)))
                    .min_by(f64::total_cmp);
                let monitors_held = t.monitors.iter().all(|m| m.held());
                // The bound is not a stored value, so allow one rounding step.
                let a_priori_held = a_priori_bound(eq, &t.ics).map(|m| {
                    let m = &m
                        + &m * ratio::from_f64(2f64.powi(4 - opts.precision_bits as i32))
                            .unwrap_or_default();
                    t.values.iter().all(|x| x <= &m)
                });
                let bounds = bound_report(&t, t.len() / 2, Some(&opts.threshold));
                let steps = t.len();
                let run = RandomRun {
                    ics,
                    steps,
                    period,
                    equilibrium_distance,
                    monitors_held,
                    a_priori_held,
                    error: None,
                };
                (run, Some(bounds))
            }
        })
        .collect();

    let converged = runs
        .iter()
        .filter(|(r, _)| r.period.as_ref().is_some_and(|p| p.converged))
        .count();
    let worst = runs
        .iter()
        .filter_map(|(r, _)| r.period.as_ref().map(|p| p.residual))
        .fold(0.0_f64, f64::max);
    let n = runs.len();
    let extended = runs.iter().filter(|(r, _)| r.steps > opts.steps).count();
    report.checks.push(Check::new(
        "random convergence",
        converged == n,
        format!(
            "{converged}/{n} runs within {} of period {p} ({extended} needed {} steps), worst residual {worst:.3e}{}",
            opts.tolerance,
            opts.max_steps,
            if converged == n { "" } else { "; inconclusive at horizon" }
        ),
    ));

    if p == 1 {
        let near = runs
            .iter()
            .filter(|(r, _)| r.equilibrium_distance.is_some_and(|d| d < opts.tolerance))
            .count();
        report.checks.push(Check::new(
            "limit is an equilibrium",
            near == n && !targets.is_empty(),
            format!(
                "{near}/{n} runs end within {} of an equilibrium",
                opts.tolerance
            ),
        ));
        let bounded: Vec<bool> = runs.iter().filter_map(|(r, _)| r.a_priori_held).collect();
        if !bounded.is_empty() {
            let held = bounded.iter().filter(|&&b| b).count();
            report.checks.push(Check::new(
                "a priori bound",
                held == bounded.len(),
                format!(
                    "{held}/{} orbits stay below max(ICs, alpha/(A - sum beta))",
                    bounded.len()
                ),
            ));
        }
    }
    if !monitors.is_empty() {
        let held = runs.iter().filter(|(r, _)| r.monitors_held).count();
        report.checks.push(Check::new(
            "envelope nonincreasing",
            held == n,
            format!("{held}/{n} runs with every phase nonincreasing"),
        ));
    }
    report.bounds = runs.first().and_then(|(_, b)| b.clone());
    report.random_runs = runs.into_iter().map(|(r, _)| r).collect();
}

/// Where an unbounded witness search looked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnboundedEvidence {
    /// `constructed`, `grid` or `shifted grid`.
    pub source: String,
    pub constructed_ics: Option<InitialConditions>,
    pub witness: Option<Witness>,
}

/// Searches for an orbit exceeding `threshold` within `steps`: the constructed
/// initial values for the first family, otherwise the default grid, and for
/// the odd-lag family the grid of the shifted equation mapped back.
pub fn unbounded_evidence(
    eq: &Equation,
    classification: &Classification,
    threshold: &Ratio,
    steps: usize,
) -> Result<UnboundedEvidence, ReductionError> {
    let (grid, source, constructed_ics) = match classification.family {
        Some(Family::T1) => {
            let ics = unbounded_ic_t1(eq)?;
            (vec![ics.clone()], "constructed", Some(ics))
        }
        _ => (default_witness_grid(eq.k()), "grid", None),
    };
    let mut evidence = UnboundedEvidence {
        source: source.into(),
        witness: unbounded_witness_search(eq, &grid, threshold, steps),
        constructed_ics,
    };
    if evidence.witness.is_none() && classification.family == Some(Family::T3) {
        // Values >= 1 of the shifted equation lift to values >= 1 here.
        if let Some((reduced, change)) = classification
            .shape
            .as_ref()
            .and_then(|s| shift_equation(s).ok())
        {
            let lifted: Vec<InitialConditions> = default_witness_grid(reduced.k())
                .iter()
                .filter_map(|w| {
                    w.as_rational()
                        .map(|v| v.iter().map(|x| change.inverse(x)).collect())
                })
                .map(InitialConditions::Rational)
                .collect();
            evidence.witness = unbounded_witness_search(eq, &lifted, threshold, steps);
            evidence.source = "shifted grid".into();
        }
    }
    Ok(evidence)
}

fn unbounded_checks(
    eq: &Equation,
    classification: &Classification,
    opts: &VerifyOptions,
    report: &mut VerificationReport,
) {
    let evidence = match unbounded_evidence(eq, classification, &opts.threshold, opts.steps) {
        Ok(e) => e,
        Err(e) => {
            report
                .checks
                .push(Check::new("unbounded witness", false, e.to_string()));
            return;
        }
    };
    let detail = match &evidence.witness {
        Some(w) => format!(
            "{} ICs {} exceed {} at step {}",
            evidence.source, w.ics, opts.threshold, w.step
        ),
        None => format!(
            "no {} orbit exceeded {} within {} steps; inconclusive at horizon",
            evidence.source, opts.threshold, opts.steps
        ),
    };
    report.checks.push(Check::new(
        "unbounded witness",
        evidence.witness.is_some(),
        detail,
    ));
    report.constructed_ics = evidence.constructed_ics;
    report.witness = evidence.witness;
}

fn case_iv_checks(
    classification: &Classification,
    opts: &VerifyOptions,
    report: &mut VerificationReport,
) {
    let shape = classification
        .shape
        .as_ref()
        .expect("case IV comes from a shape");
    let g = shape.gcd_numerator_lags();
    let eq = shape.to_equation();
    let mut evidence = NonnegativeEvidence {
        case: T4Case::IV,
        constructed_ics: None,
        certificate: None,
        positivity: None,
    };
    match periodic_ic_t4_case_iv(shape) {
        Ok(ics) => {
            match certify_orbit(&eq, &ics, g, opts.certified_periods) {
                Ok(cert) => {
                    report.checks.push(Check::new(
                        "nonnegative cycle",
                        cert.is_prime(),
                        format!(
                            "ICs {ics}: prime period {:?}, expected {g}",
                            cert.prime_period
                        ),
                    ));
                    evidence.certificate = Some(cert);
                }
                Err(e) => report
                    .checks
                    .push(Check::new("nonnegative cycle", false, e)),
            }
            match positivity_classes(shape, &ics, opts.steps.min(1000)) {
                Ok(pos) => {
                    let zero_elsewhere = pos.classes.iter().all(|(&a, s)| {
                        (a == 0) != matches!(s, crate::dynamics::ClassStatus::IdenticallyZero)
                    });
                    report.checks.push(Check::new(
                        "positivity classes",
                        pos.confirmed && zero_elsewhere,
                        format!(
                            "modulus {}, Frobenius {}, confirmed over {} steps",
                            pos.modulus, pos.frobenius, pos.checked_steps
                        ),
                    ));
                    evidence.positivity = Some(pos);
                }
                Err(e) => {
                    report
                        .checks
                        .push(Check::new("positivity classes", false, e.to_string()))
                }
            }
            evidence.constructed_ics = Some(ics);
        }
        Err(e) => report
            .checks
            .push(Check::new("nonnegative cycle", false, e.to_string())),
    }
    debug_assert!(!shape.den_const.is_zero());
    report.nonnegative = Some(evidence);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> VerifyOptions {
        VerifyOptions {
            random_ics: 6,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn t1_boundary_passes() {
        let eq = Equation::literal("0", "2", &[(2, "1"), (4, "1")], &[(1, "1")]);
        let r = verify(&eq, &quick());
        assert!(r.passed, "{:#?}", r.checks);
        assert!(r.certificate.unwrap().is_prime());
    }

    #[test]
    fn t2_boundary_cycle() {
        let eq = Equation::literal("1", "1", &[(2, "1")], &[(1, "1")]);
        let r = verify(&eq, &quick());
        assert!(r.passed, "{:#?}", r.checks);
        assert_eq!(r.constructed_ics.unwrap().to_strings(), vec!["2", "1/2"]);
    }

    #[test]
    fn t3_period_six() {
        let eq = Equation::literal("3", "1", &[(6, "2"), (3, "1")], &[(3, "1")]);
        let r = verify(&eq, &quick());
        assert_eq!(
            r.classification.verdict,
            Verdict::PeriodicConvergence { period: 6 }
        );
        assert!(r.checks[0].passed, "{:?}", r.checks[0]);
    }

    #[test]
    fn out_of_scope_has_no_checks() {
        let eq = Equation::literal("0", "1", &[(2, "1")], &[(2, "1")]);
        let r = verify(&eq, &quick());
        assert!(!r.passed && r.checks.is_empty());
    }

    #[test]
    fn supercritical_t1_uses_construction() {
        let eq = Equation::literal("0", "1", &[(2, "1"), (4, "1")], &[(1, "1")]);
        let r = verify(&eq, &quick());
        assert!(r.passed, "{:#?}", r.checks);
        assert_eq!(
            r.witness.unwrap().ics.to_strings(),
            vec!["0", "1", "0", "1"]
        );
    }
}
