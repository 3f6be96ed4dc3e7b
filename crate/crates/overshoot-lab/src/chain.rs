//! The overshoot Markov chain `Y_n` of the two-sided stable-like model.
//!
//! One step from `y > 0` is a downwards overshoot `V ~ v_b(y,.)` across the
//! barrier followed by an upwards overshoot `Y' ~ u_a(V,.)` back above it.
//! In distribution `Y_n = Y_1 * prod_{i<n} (-U_i V_i)` with unit overshoots
//! `U_i ~ u_a(-1,.)`, `V_i ~ v_b(1,.)`, so `log Y_n` is a random walk whose
//! step mean is the log-drift.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::law::{self, StabilityIndex};
use crate::moments;
use crate::rng::{self, Stream};

/// Configuration of a chain experiment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChainConfig {
    /// Index of the law below the barrier (upwards overshoots).
    pub alpha: StabilityIndex,
    /// Index of the law above the barrier (downwards overshoots).
    pub beta: StabilityIndex,
    /// Initial state, strictly above the barrier at 0.
    pub y0: f64,
    pub n_steps: usize,
    pub n_paths: usize,
    pub master_seed: u64,
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.y0 > 0.0) {
            return Err(Error::domain(format!("y0 must be > 0, got {}", self.y0)));
        }
        if self.n_steps == 0 || self.n_paths == 0 {
            return Err(Error::domain("n_steps and n_paths must be positive"));
        }
        Ok(())
    }
}

/// A realized trajectory `Y_0, ..., Y_n` with its logs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChainTrajectory {
    pub values: Vec<f64>,
    pub log_values: Vec<f64>,
}

impl ChainTrajectory {
    fn from_values(values: Vec<f64>) -> Self {
        let log_values = values.iter().map(|v| v.ln()).collect();
        ChainTrajectory { values, log_values }
    }
}

/// Simulate the chain by alternating down- and up-overshoot draws.
pub fn simulate_chain(cfg: &ChainConfig, rng: &mut Stream) -> Result<ChainTrajectory> {
    cfg.validate()?;
    let mut values = Vec::with_capacity(cfg.n_steps + 1);
    let mut y = cfg.y0;
    values.push(y);
    for _ in 0..cfg.n_steps {
        let v = law::sample_down(cfg.beta, y, rng)?;
        debug_assert!(v < 0.0);
        y = law::sample_up(cfg.alpha, v, rng)?;
        debug_assert!(y > 0.0);
        values.push(y);
    }
    Ok(ChainTrajectory::from_values(values))
}

/// Simulate the chain through the product representation
/// `Y_n = Y_1 * prod (-U_i V_i)`.
pub fn simulate_product_form(cfg: &ChainConfig, rng: &mut Stream) -> Result<ChainTrajectory> {
    cfg.validate()?;
    let mut values = Vec::with_capacity(cfg.n_steps + 1);
    values.push(cfg.y0);
    // Y_1: down from y0, then up from the landing point, scaled to the unit case.
    let v = law::sample_down(cfg.beta, cfg.y0, rng)?;
    let mut y = -v * law::sample_unit_up(cfg.alpha, rng);
    values.push(y);
    for _ in 1..cfg.n_steps {
        y *= product_factor(cfg.alpha, cfg.beta, rng);
        values.push(y);
    }
    Ok(ChainTrajectory::from_values(values))
}

/// One i.i.d. factor `-UV > 0` (down-shoot magnitude times up-shoot).
pub fn product_factor(alpha: StabilityIndex, beta: StabilityIndex, rng: &mut Stream) -> f64 {
    let v = law::sample_unit_up(beta, rng); // |V| for V ~ v_b(1,.)
    let u = law::sample_unit_up(alpha, rng);
    v * u
}

/// Empirical limit classification of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LimitBehavior {
    DivergesToInfinity,
    ConvergesToBarrier,
    Oscillates,
}

impl std::fmt::Display for LimitBehavior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            LimitBehavior::DivergesToInfinity => "DivergesToInfinity",
            LimitBehavior::ConvergesToBarrier => "ConvergesToBarrier",
            LimitBehavior::Oscillates => "Oscillates",
        };
        f.write_str(s)
    }
}

/// Evidence behind a limit classification.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LimitEvidence {
    /// Monte Carlo mean of the log step `log(-UV)`.
    pub step_mean: f64,
    pub std_err: f64,
    /// Closed-form log-drift for comparison.
    pub analytic_drift: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub behavior: LimitBehavior,
    pub evidence: LimitEvidence,
}

/// Sign test on the Monte Carlo mean of the log steps.
///
/// `mean > 3 SE` reads as divergence to infinity, `mean < -3 SE` as
/// convergence to the barrier, `|mean| <= 2 SE` as oscillation; the grey
/// zone in between is reported as inconclusive.
pub fn estimate_limit_behavior(cfg: &ChainConfig) -> Result<LimitEstimate> {
    cfg.validate()?;
    if cfg.n_paths < 100 {
        return Err(Error::domain("estimate_limit_behavior requires n_paths >= 100"));
    }
    // Per-path partial sums, reduced in path order: deterministic for any
    // worker count.
    let partials: Vec<(f64, f64)> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(cfg.master_seed, i as u64);
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..cfg.n_steps {
                let step = product_factor(cfg.alpha, cfg.beta, &mut rng).ln();
                sum += step;
                sumsq += step * step;
            }
            (sum, sumsq)
        })
        .collect();
    let n = (cfg.n_paths * cfg.n_steps) as f64;
    let (sum, sumsq) = partials.iter().fold((0.0, 0.0), |(s, q), (ps, pq)| (s + ps, q + pq));
    let mean = sum / n;
    let var = (sumsq - n * mean * mean) / (n - 1.0);
    let se = (var / n).sqrt();

    let evidence = LimitEvidence {
        step_mean: mean,
        std_err: se,
        analytic_drift: moments::log_drift(cfg.alpha, cfg.beta),
        n_samples: cfg.n_paths * cfg.n_steps,
    };
    let behavior = if mean > 3.0 * se {
        LimitBehavior::DivergesToInfinity
    } else if mean < -3.0 * se {
        LimitBehavior::ConvergesToBarrier
    } else if mean.abs() <= 2.0 * se {
        LimitBehavior::Oscillates
    } else {
        return Err(Error::Inconclusive { mean_abs: mean.abs(), std_err: se });
    };
    Ok(LimitEstimate { behavior, evidence })
}

/// A computable certificate for a drift condition of the overshoot chain:
/// a test exponent `q`, a radius (`R` or `R'`) and a sup-probability bound
/// strictly below 1.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Witness {
    pub q: f64,
    pub radius: f64,
    pub bound: f64,
}

/// Witness for the transient side: `q = (a ^ b)/4`,
/// `R = (2 E((-UV)^q))^(1/q)`, bound `max(1/2, tail above R from -1)`.
pub fn transience_witness(alpha: StabilityIndex, beta: StabilityIndex) -> Result<Witness> {
    let q = alpha.get().min(beta.get()) / 4.0;
    let e = moments::product_moment(alpha, beta, q)
        .finite()
        .expect("q is interior to the product moment window");
    let radius = (2.0 * e).powf(1.0 / q);
    let tail = 1.0 - law::up_cdf(alpha, -1.0, radius)?;
    let bound = 0.5f64.max(tail);
    debug_assert!(bound < 1.0);
    Ok(Witness { q, radius, bound })
}

/// Witness for the recurrent side: `q = -(1 - (a v b)/2)/2`,
/// `R' = (2 E((-UV)^q))^(1/q)`, bound `1/2`.
pub fn recurrence_witness(alpha: StabilityIndex, beta: StabilityIndex) -> Result<Witness> {
    let q = -(1.0 - alpha.get().max(beta.get()) / 2.0) / 2.0;
    let e = moments::product_moment(alpha, beta, q)
        .finite()
        .expect("q is interior to the product moment window");
    let radius = (2.0 * e).powf(1.0 / q);
    Ok(Witness { q, radius, bound: 0.5 })
}
