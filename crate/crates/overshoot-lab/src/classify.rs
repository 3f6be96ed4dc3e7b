//! Recurrence/transience classification of stable-like processes by the
//! sum of the two stability indices.

use serde::{Deserialize, Serialize};

use crate::chain::{self, ChainConfig, LimitBehavior, LimitEvidence};
use crate::error::Result;
use crate::law::StabilityIndex;

const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    Transient,
    HarrisRecurrent,
    PointRecurrent,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Label::Transient => "Transient",
            Label::HarrisRecurrent => "HarrisRecurrent",
            Label::PointRecurrent => "PointRecurrent",
        };
        f.write_str(s)
    }
}

/// A classification with its provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub label: Label,
    /// Which result produced the label.
    pub source: String,
    /// True iff `alpha + beta = 2` within tolerance.
    pub boundary: bool,
}

/// Classify the two-sided stable-like process with index `alpha` below and
/// `beta` above the barrier.
///
/// `alpha + beta < 2` is transient; `alpha + beta = 2` is Harris recurrent
/// (boundary case, not upgraded to point recurrence); `alpha + beta > 2`
/// is left-limit recurrent and, by quasi-left-continuity, point recurrent.
pub fn classify_stable_like(alpha: StabilityIndex, beta: StabilityIndex) -> Classification {
    let s = alpha.get() + beta.get();
    if (s - 2.0).abs() <= BOUNDARY_TOL {
        Classification {
            label: Label::HarrisRecurrent,
            source: "index sum = 2: locally recurrent, hence Harris recurrent for lambda-irreducible T-models".into(),
            boundary: true,
        }
    } else if s < 2.0 {
        Classification {
            label: Label::Transient,
            source: "index sum < 2: overshoot chain diverges, locally transient".into(),
            boundary: false,
        }
    } else {
        Classification {
            label: Label::PointRecurrent,
            source: "index sum > 2: left limit recurrent; upgraded to point recurrence by quasi-left-continuity".into(),
            boundary: false,
        }
    }
}

/// Classify the symmetric alpha-stable process (the `alpha = beta` case).
pub fn classify_stable(alpha: StabilityIndex) -> Classification {
    classify_stable_like(alpha, alpha)
}

/// Joint analytic/Monte Carlo classification report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McReport {
    pub analytic: Classification,
    pub empirical: LimitBehavior,
    pub evidence: LimitEvidence,
    /// True iff the empirical label is consistent with the analytic one.
    pub agree: bool,
}

/// Cross-validate the analytic classification against the chain simulator.
pub fn mc_classify(cfg: &ChainConfig) -> Result<McReport> {
    let analytic = classify_stable_like(cfg.alpha, cfg.beta);
    let estimate = chain::estimate_limit_behavior(cfg)?;
    let agree = matches!(
        (analytic.label, estimate.behavior),
        (Label::Transient, LimitBehavior::DivergesToInfinity)
            | (Label::PointRecurrent, LimitBehavior::ConvergesToBarrier)
            | (Label::HarrisRecurrent, LimitBehavior::Oscillates)
    );
    Ok(McReport { analytic, empirical: estimate.behavior, evidence: estimate.evidence, agree })
}

/// `mc_classify` with deterministic escalation: on an inconclusive sign
/// test the path count is doubled (same master seed, streams extend by
/// path index) up to `max_escalations` times.
pub fn mc_classify_robust(cfg: &ChainConfig, max_escalations: u32) -> Result<McReport> {
    let mut cfg = *cfg;
    let mut attempts = 0;
    loop {
        match mc_classify(&cfg) {
            Err(crate::error::Error::Inconclusive { .. }) if attempts < max_escalations => {
                attempts += 1;
                cfg.n_paths *= 2;
            }
            other => return other,
        }
    }
}
