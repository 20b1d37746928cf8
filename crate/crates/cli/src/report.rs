use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use trichotomy::classifier::{HypothesisReport, NonnegativeOutcome};
use trichotomy::dynamics::{BoundReport, CycleCertificate, MonitorOutcome, PeriodReport};
use trichotomy::verify::Check;
use trichotomy::{Classification, Family, InitialConditions, Regime, Verdict};

use crate::error::ExitStatus;
use crate::spec::EquationSpec;

/// `PeriodReport` with a residual that survives JSON: `None` when the
/// residual is not finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodSummary {
    pub tested_period: usize,
    pub residual: Option<f64>,
    pub converged: bool,
    pub prime_period: Option<usize>,
    pub limit_cycle: Option<Vec<f64>>,
}

impl From<&PeriodReport> for PeriodSummary {
    fn from(r: &PeriodReport) -> Self {
        Self {
            tested_period: r.tested_period,
            residual: r.residual.is_finite().then_some(r.residual),
            converged: r.converged,
            prime_period: r.prime_period,
            limit_cycle: r
                .limit_cycle
                .clone()
                .filter(|v| v.iter().all(|x| x.is_finite())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub spec: EquationSpec,
    pub hypotheses: Vec<HypothesisReport>,
    pub family: Option<Family>,
    pub regime: Option<Regime>,
    pub verdict: Verdict,
    pub nonnegative_ics: Option<NonnegativeOutcome>,
    pub constructed_ics: Option<InitialConditions>,
    pub certificate: Option<CycleCertificate>,
    pub period: Option<PeriodSummary>,
    pub bounds: Option<BoundReport>,
    pub monitors: Vec<MonitorOutcome>,
    pub checks: Vec<Check>,
    pub seed: Option<u64>,
    pub exit_status: ExitStatus,
}

impl RunReport {
    pub fn new(command: &str, spec: EquationSpec, c: &Classification) -> Self {
        Self {
            command: command.into(),
            spec,
            hypotheses: c.reports.clone(),
            family: c.family,
            regime: c.regime,
            verdict: c.verdict.clone(),
            nonnegative_ics: c.nonnegative_ics.clone(),
            constructed_ics: None,
            certificate: None,
            period: None,
            bounds: None,
            monitors: Vec::new(),
            checks: Vec::new(),
            seed: None,
            exit_status: if c.family.is_some() {
                ExitStatus::Success
            } else {
                ExitStatus::OutOfScope
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is JSON-representable")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Human-readable summary.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for h in &self.hypotheses {
            match h.first_failure() {
                None => writeln!(s, "{} holds", h.family),
                Some(c) => writeln!(s, "{} fails: {}", h.family, c.detail),
            }
            .unwrap();
        }
        match (self.family, self.regime) {
            (Some(t), Some(r)) => writeln!(s, "{t} governs ({r:?}); {}", self.verdict),
            _ => writeln!(s, "{}", self.verdict),
        }
        .unwrap();
        if let Some(n) = &self.nonnegative_ics {
            writeln!(
                s,
                "nonnegative initial values: case {:?}; {}",
                n.case, n.verdict
            )
            .unwrap();
        }
        if let Some(ics) = &self.constructed_ics {
            writeln!(s, "constructed initial values (x_-1, ..., x_-k): {ics}").unwrap();
        }
        if let Some(c) = &self.certificate {
            writeln!(
                s,
                "certificate: period {} over {} terms, periodic={}, prime period {:?}, refuted divisors {:?}",
                c.period, c.length, c.periodic, c.prime_period, c.refuted_divisors
            )
            .unwrap();
        }
        if let Some(p) = &self.period {
            let residual = p.residual.map_or("inf".to_string(), |r| format!("{r:.3e}"));
            writeln!(
                s,
                "period test p={}: residual {residual}, converged={}, prime period {:?}",
                p.tested_period, p.converged, p.prime_period
            )
            .unwrap();
        }
        if let Some(b) = &self.bounds {
            writeln!(
                s,
                "tail from step {}: inf {:.6e}, sup {:.6e}",
                b.tail_start,
                trichotomy::ratio::to_f64(&b.inf),
                trichotomy::ratio::to_f64(&b.sup)
            )
            .unwrap();
            if let Some(n) = b.exceeded {
                writeln!(s, "threshold exceeded at step {n}").unwrap();
            }
        }
        for m in &self.monitors {
            writeln!(s, "monitor {:?}: {:?}", m.monitor, m.result).unwrap();
        }
        for c in &self.checks {
            writeln!(
                s,
                "[{}] {}: {}",
                if c.passed { "ok" } else { "FAIL" },
                c.name,
                c.detail
            )
            .unwrap();
        }
        if let Some(seed) = self.seed {
            writeln!(s, "seed {seed:#x}").unwrap();
        }
        writeln!(
            s,
            "exit status: {:?} ({})",
            self.exit_status,
            self.exit_status.code()
        )
        .unwrap();
        s
    }
}
