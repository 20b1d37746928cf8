use std::io::Write;

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use trichotomy::classifier::{recognize_t3, T4Case};
use trichotomy::dynamics::{
    bound_report, default_window, detect_cycle, simulate, unbounded_witness_search, write_csv,
    Arithmetic, IcSampler, Monitor, SimulationConfig, SimulationError, Trajectory,
};
use trichotomy::reductions::{
    periodic_ic_t1, periodic_ic_t2, periodic_ic_t4_case_iv, unbounded_ic_t1,
};
use trichotomy::verify::{
    certify_orbit, construct_boundary_cycle, unbounded_evidence, verify, Check, VerifyOptions,
};
use trichotomy::{
    classify, Classification, Equation, Family, InitialConditions, Ratio, Regime, Verdict,
};

use crate::error::{CliError, ExitStatus};
use crate::report::{PeriodSummary, RunReport};
use crate::spec::{parse_ics, Constructor, EquationSpec, ValidatedSpec};

/// Iteration settings shared by `simulate`, `verify` and `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub steps: usize,
    pub mode: ModeArg,
    pub precision_bits: u32,
    pub tolerance: f64,
    pub window: Option<usize>,
    pub seed: u64,
    pub threshold: Ratio,
    /// Comma-separated override for the spec's initial values.
    pub ics: Option<Vec<String>>,
    pub constructor: Option<Constructor>,
}

impl Default for RunOptions {
    fn default() -> Self {
        let v = VerifyOptions::default();
        Self {
            steps: v.steps,
            mode: ModeArg::Exact,
            precision_bits: v.precision_bits,
            tolerance: v.tolerance,
            window: None,
            seed: v.seed,
            threshold: v.threshold,
            ics: None,
            constructor: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeArg {
    Exact,
    Float,
}

impl RunOptions {
    fn arithmetic(&self) -> Arithmetic {
        match self.mode {
            ModeArg::Exact => Arithmetic::Exact,
            ModeArg::Float => Arithmetic::Float {
                precision_bits: self.precision_bits,
            },
        }
    }

    fn sim_config(&self, steps: usize) -> SimulationConfig {
        SimulationConfig {
            steps,
            mode: self.arithmetic(),
            ..SimulationConfig::default()
        }
    }
}

pub fn construct_ics(
    eq: &Equation,
    constructor: Constructor,
) -> Result<InitialConditions, CliError> {
    let shape = || {
        recognize_t3(eq)
            .ok_or_else(|| CliError::Numeric("t4iv-periodic needs the odd-lag shape".into()))
    };
    match constructor {
        Constructor::T1Periodic => periodic_ic_t1(eq),
        Constructor::T2Periodic => periodic_ic_t2(eq),
        Constructor::T4ivPeriodic => periodic_ic_t4_case_iv(&shape()?),
        Constructor::T1Unbounded => unbounded_ic_t1(eq),
    }
    .map_err(|e| CliError::Numeric(format!("{constructor}: {e}")))
}

/// Initial values in order of precedence: `--ics`, `--constructor`, the
/// spec's list, the spec's constructor.
fn chosen_ics(
    spec: &ValidatedSpec,
    opts: &RunOptions,
) -> Result<Option<InitialConditions>, CliError> {
    let k = spec.equation.k();
    if let Some(items) = &opts.ics {
        return parse_ics(items, k).map(Some);
    }
    if let Some(c) = opts.constructor {
        return construct_ics(&spec.equation, c).map(Some);
    }
    if let Some(ics) = &spec.initial_conditions {
        return Ok(Some(ics.clone()));
    }
    spec.constructor
        .map(|c| construct_ics(&spec.equation, c))
        .transpose()
}

fn simulation_error(e: SimulationError) -> CliError {
    match e {
        SimulationError::ZeroDenominator { step, source } => {
            CliError::Numeric(format!("zero denominator at step {step}: {source}"))
        }
        SimulationError::IrrationalInExactMode => {
            CliError::Numeric("irrational initial values need --mode float".into())
        }
        other => CliError::Numeric(other.to_string()),
    }
}

fn period_summary(traj: &Trajectory, p: usize, opts: &RunOptions) -> Option<PeriodSummary> {
    let window = opts.window.unwrap_or_else(|| default_window(traj.k(), p));
    detect_cycle(traj, p, opts.tolerance, window)
        .ok()
        .map(|r| PeriodSummary::from(&r))
}

/// Envelope monitors for the families whose envelope is known to be monotone.
fn envelope_monitors(c: &Classification) -> Vec<Monitor> {
    match (c.family, c.regime) {
        (Some(Family::T1), Some(Regime::Boundary | Regime::Subcritical)) => {
            vec![Monitor::EnvelopeT1]
        }
        (Some(Family::T2), Some(Regime::Boundary)) => vec![Monitor::EnvelopeT2],
        _ => Vec::new(),
    }
}

pub fn cmd_classify(spec: &EquationSpec) -> Result<RunReport, CliError> {
    let v = spec.validate()?;
    Ok(RunReport::new(
        "classify",
        spec.clone(),
        &classify(&v.equation),
    ))
}

/// Writes the trajectory as CSV to `out`.
pub fn cmd_simulate(
    spec: &EquationSpec,
    opts: &RunOptions,
    out: &mut dyn Write,
) -> Result<RunReport, CliError> {
    let v = spec.validate()?;
    let c = classify(&v.equation);
    let mut report = RunReport::new("simulate", spec.clone(), &c);
    report.exit_status = ExitStatus::Success;
    let ics = chosen_ics(&v, opts)?.ok_or_else(|| {
        CliError::Parse(
            "no initial values: give initial_conditions, a constructor, or --ics".into(),
        )
    })?;
    if opts.ics.is_none() && v.initial_conditions.is_none() {
        report.constructed_ics = Some(ics.clone());
    }
    let cfg = opts
        .sim_config(opts.steps)
        .with_monitors(envelope_monitors(&c));
    let traj = simulate(&v.equation, &ics, &cfg).map_err(simulation_error)?;
    write_csv(&traj, &mut *out)?;
    if let Some(p) = c.verdict.predicted_period() {
        report.period = period_summary(&traj, p, opts);
    }
    report.bounds = Some(bound_report(&traj, traj.len() / 2, Some(&opts.threshold)));
    report.monitors = traj.monitors.clone();
    if let Some(s) = traj.switched_to_float_at {
        report.checks.push(Check {
            name: "exact arithmetic".into(),
            passed: true,
            detail: format!(
                "bit budget exceeded at step {s}; continued at {} bits",
                cfg.fallback_precision
            ),
        });
    }
    Ok(report)
}

/// Builds initial values and certifies them exactly over `periods` periods.
pub fn cmd_construct(
    spec: &EquationSpec,
    opts: &RunOptions,
    periods: usize,
) -> Result<RunReport, CliError> {
    let v = spec.validate()?;
    let eq = &v.equation;
    let c = classify(eq);
    let mut report = RunReport::new("construct", spec.clone(), &c);
    let profile = &c.profile;
    let chosen = opts.constructor.or(v.constructor);
    let built = match chosen {
        Some(k) => construct_ics(eq, k).map(|ics| {
            let period = match k {
                Constructor::T1Periodic => Some(profile.g_beta),
                Constructor::T2Periodic => Some(2 * profile.g_union),
                Constructor::T4ivPeriodic => c.shape.as_ref().map(|s| s.gcd_numerator_lags()),
                Constructor::T1Unbounded => None,
            };
            (ics, period)
        }),
        None => match (&c.verdict, &c.nonnegative_ics) {
            (Verdict::PeriodicConvergence { period }, _) => construct_boundary_cycle(eq, &c)
                .map(|ics| (ics, Some(*period)))
                .map_err(|e| CliError::Numeric(e.to_string())),
            (_, Some(n)) if n.case == T4Case::IV => construct_ics(eq, Constructor::T4ivPeriodic)
                .map(|ics| (ics, c.shape.as_ref().map(|s| s.gcd_numerator_lags()))),
            (Verdict::UnboundedExists, _) if c.family == Some(Family::T1) => {
                construct_ics(eq, Constructor::T1Unbounded).map(|ics| (ics, None))
            }
            _ => {
                report.exit_status = ExitStatus::OutOfScope;
                report.checks.push(Check {
                    name: "construction".into(),
                    passed: false,
                    detail: "no constructor applies to this equation".into(),
                });
                return Ok(report);
            }
        },
    };
    let (ics, period) = match built {
        Ok(b) => b,
        Err(e) => {
            report.exit_status = ExitStatus::OutOfScope;
            report.checks.push(Check {
                name: "construction".into(),
                passed: false,
                detail: e.to_string(),
            });
            return Ok(report);
        }
    };
    report.constructed_ics = Some(ics.clone());
    let check = match period {
        Some(p) => {
            let cert = certify_orbit(eq, &ics, p, periods).map_err(CliError::Numeric)?;
            let check = Check {
                name: "exact prime period".into(),
                passed: cert.is_prime(),
                detail: format!(
                    "{periods} periods of {p} reproduced exactly: {}; prime period {:?}",
                    cert.periodic, cert.prime_period
                ),
            };
            report.certificate = Some(cert);
            check
        }
        None => {
            let w = unbounded_witness_search(
                eq,
                std::slice::from_ref(&ics),
                &opts.threshold,
                opts.steps,
            );
            Check {
                name: "unbounded witness".into(),
                passed: w.is_some(),
                detail: match w {
                    Some(w) => format!("exceeds {} at step {}", opts.threshold, w.step),
                    None => format!("stays below {} for {} steps", opts.threshold, opts.steps),
                },
            }
        }
    };
    report.exit_status = if check.passed {
        ExitStatus::Success
    } else {
        ExitStatus::Mismatch
    };
    report.checks.push(check);
    Ok(report)
}

pub fn cmd_verify(
    spec: &EquationSpec,
    opts: &RunOptions,
    verify_opts: &VerifyOptions,
) -> Result<RunReport, CliError> {
    let v = spec.validate()?;
    let r = verify(&v.equation, verify_opts);
    let mut report = RunReport::new("verify", spec.clone(), &r.classification);
    report.seed = Some(verify_opts.seed);
    if r.classification.family.is_none() {
        return Ok(report);
    }
    report.constructed_ics = r.constructed_ics.clone();
    report.certificate = r.certificate.clone();
    report.bounds = r.bounds.clone();
    report.checks = r.checks.clone();
    report.period = r
        .random_runs
        .iter()
        .find_map(|run| run.period.as_ref())
        .map(PeriodSummary::from);

    if let (Some(ics), Some(p)) = (
        chosen_ics(&v, opts)?,
        r.classification.verdict.predicted_period(),
    ) {
        let float = RunOptions {
            mode: ModeArg::Float,
            ..opts.clone()
        };
        let traj = simulate(&v.equation, &ics, &float.sim_config(verify_opts.max_steps))
            .map_err(simulation_error)?;
        let summary = period_summary(&traj, p, opts);
        let converged = summary.as_ref().is_some_and(|s| s.converged);
        report.checks.push(Check {
            name: "given initial values".into(),
            passed: converged,
            detail: format!(
                "{ics} tested for period {p} after {} steps",
                verify_opts.max_steps
            ),
        });
        report.period = summary;
    }
    report.exit_status = if !report.checks.is_empty() && report.checks.iter().all(|c| c.passed) {
        ExitStatus::Success
    } else {
        ExitStatus::Mismatch
    };
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum SweepParam {
    #[serde(rename = "A")]
    #[value(name = "A", alias = "a")]
    A,
    #[serde(rename = "alpha")]
    Alpha,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub param: SweepParam,
    pub from: Ratio,
    pub to: Ratio,
    pub count: usize,
}

impl SweepGrid {
    /// `count` equally spaced exact values from `from` to `to` inclusive.
    pub fn points(&self) -> Result<Vec<Ratio>, CliError> {
        match self.count {
            0 => Err(CliError::Parse("--count must be at least 1".into())),
            1 if self.from != self.to => Err(CliError::Parse(
                "a single-point sweep needs --from equal to --to".into(),
            )),
            1 => Ok(vec![self.from.clone()]),
            n => {
                let step = (&self.to - &self.from) / Ratio::from_integer((n as i64 - 1).into());
                Ok((0..n)
                    .map(|i| &self.from + &step * Ratio::from_integer((i as i64).into()))
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub param: String,
    pub value: String,
    pub verdict: String,
    pub predicted_period: Option<usize>,
    pub detected_prime_period: Option<usize>,
    pub residual: Option<f64>,
    pub witness: bool,
    /// The simulated evidence matches the verdict.
    pub consistent: bool,
}

fn sweep_point(
    base: &Equation,
    param: SweepParam,
    index: usize,
    value: &Ratio,
    ics: &InitialConditions,
    opts: &RunOptions,
) -> Result<SweepRow, CliError> {
    let eq = match param {
        SweepParam::A => base.with_den_const(value.clone()),
        SweepParam::Alpha => base.with_num_const(value.clone()),
    }
    .map_err(|e| CliError::Parse(format!("{param:?} = {value}: {e}")))?;
    let c = classify(&eq);
    let predicted = c.verdict.predicted_period();
    let float = RunOptions {
        mode: ModeArg::Float,
        ..opts.clone()
    };
    let traj = simulate(&eq, ics, &float.sim_config(opts.steps)).map_err(simulation_error)?;
    let summary = predicted.and_then(|p| period_summary(&traj, p, opts));
    let exceeded = bound_report(&traj, 0, Some(&opts.threshold))
        .exceeded
        .is_some();
    let witness = exceeded
        || (c.verdict == Verdict::UnboundedExists
            && unbounded_evidence(&eq, &c, &opts.threshold, opts.steps)
                .is_ok_and(|e| e.witness.is_some()));
    let converged = summary.as_ref().is_some_and(|s| s.converged);
    let consistent = match &c.verdict {
        Verdict::UnboundedExists => witness,
        Verdict::OutOfScope { .. } => true,
        _ => converged && !exceeded,
    };
    Ok(SweepRow {
        index,
        param: match param {
            SweepParam::A => "A".into(),
            SweepParam::Alpha => "alpha".into(),
        },
        value: value.to_string(),
        verdict: c.verdict.kind_name().into(),
        predicted_period: match c.verdict {
            Verdict::PeriodicConvergence { period } => Some(period),
            _ => predicted,
        },
        detected_prime_period: summary.as_ref().and_then(|s| s.prime_period),
        residual: summary.and_then(|s| s.residual),
        witness,
        consistent,
    })
}

/// One row per grid point, computed in parallel and returned in grid order.
pub fn cmd_sweep(
    spec: &EquationSpec,
    grid: &SweepGrid,
    opts: &RunOptions,
) -> Result<Vec<SweepRow>, CliError> {
    let v = spec.validate()?;
    let points = grid.points()?;
    let ics = match chosen_ics(&v, opts)? {
        Some(ics) => ics,
        None => IcSampler::new(opts.seed).sample(v.equation.k()),
    };
    points
        .par_iter()
        .enumerate()
        .map(|(i, value)| sweep_point(&v.equation, grid.param, i, value, &ics, opts))
        .collect()
}

pub fn write_sweep_csv(rows: &[SweepRow], out: &mut dyn Write) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)
            .map_err(|e| CliError::Numeric(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// `Ok` when `value` is a nonnegative rational literal.
pub fn parse_nonnegative(field: &str, s: &str) -> Result<Ratio, CliError> {
    let r = trichotomy::parse_ratio(s).map_err(|e| CliError::Parse(format!("{field}: {e}")))?;
    if r.is_negative() {
        return Err(CliError::Parse(format!("{field}: must be nonnegative")));
    }
    Ok(r)
}
