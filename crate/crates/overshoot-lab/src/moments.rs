//! Closed-form moments of the overshoot laws and an independent
//! quadrature oracle.
//!
//! For `U ~ u_a(-1,.)` the `r`-th moment is the sin ratio
//! `sin(a pi/2) / sin((a-2r) pi/2)` on the open window
//! `a/2 - 1 < r < a/2` and infinite otherwise; the product `-UV` obeys the
//! analogous two-factor formula on `((a v b)/2 - 1, (a ^ b)/2)`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::law::StabilityIndex;
use crate::specfun::Accuracy;

/// A moment that is either a finite positive real or analytically infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MomentValue {
    Finite(f64),
    Infinite,
}

impl MomentValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            MomentValue::Finite(v) => Some(v),
            MomentValue::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, MomentValue::Finite(_))
    }
}

impl std::fmt::Display for MomentValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MomentValue::Finite(v) => write!(f, "{v}"),
            MomentValue::Infinite => write!(f, "inf"),
        }
    }
}

/// A moment request; `beta` is absent for single-overshoot moments.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MomentQuery {
    pub alpha: StabilityIndex,
    pub beta: Option<StabilityIndex>,
    pub r: f64,
}

#[inline]
fn in_up_window(alpha: f64, r: f64) -> bool {
    // Window edges count as infinite.
    r > alpha / 2.0 - 1.0 && r < alpha / 2.0
}

/// `E(U^r)` for `U ~ u_a(-1,.)`.
pub fn up_moment(alpha: StabilityIndex, r: f64) -> MomentValue {
    let a = alpha.get();
    if !in_up_window(a, r) {
        return MomentValue::Infinite;
    }
    MomentValue::Finite((a * PI / 2.0).sin() / ((a - 2.0 * r) * PI / 2.0).sin())
}

/// `E((-VU)^r)` for independent `U ~ u_a(-1,.)`, `V ~ v_b(1,.)`.
pub fn product_moment(alpha: StabilityIndex, beta: StabilityIndex, r: f64) -> MomentValue {
    let (a, b) = (alpha.get(), beta.get());
    let lo = a.max(b) / 2.0 - 1.0;
    let hi = a.min(b) / 2.0;
    if !(r > lo && r < hi) {
        return MomentValue::Infinite;
    }
    let num = (a * PI / 2.0).sin() * (b * PI / 2.0).sin();
    let den = ((a - 2.0 * r) * PI / 2.0).sin() * ((b - 2.0 * r) * PI / 2.0).sin();
    MomentValue::Finite(num / den)
}

/// The exponent `r* = (a + b)/4 - 1/2`, strictly inside the product window.
pub fn critical_exponent(alpha: StabilityIndex, beta: StabilityIndex) -> f64 {
    (alpha.get() + beta.get()) / 4.0 - 0.5
}

/// `E((-VU)^{r*}) = 1 - (1 + cos((a+b) pi/2)) / (1 + cos((a-b) pi/2))`.
///
/// Equals 1 exactly when `a + b = 2` and is strictly below 1 otherwise.
pub fn critical_moment(alpha: StabilityIndex, beta: StabilityIndex) -> f64 {
    let (a, b) = (alpha.get(), beta.get());
    1.0 - (1.0 + ((a + b) * PI / 2.0).cos()) / (1.0 + ((a - b) * PI / 2.0).cos())
}

/// The log-drift `Lambda = E log(-UV) = pi (cot(a pi/2) + cot(b pi/2))`.
///
/// Its sign matches the sign of `2 - a - b`: positive drift sends the
/// overshoot chain to infinity (transient regime).
pub fn log_drift(alpha: StabilityIndex, beta: StabilityIndex) -> f64 {
    let (a, b) = (alpha.get(), beta.get());
    let cot = |t: f64| t.cos() / t.sin();
    PI * (cot(a * PI / 2.0) + cot(b * PI / 2.0))
}

/// Moment by adaptive tanh-sinh quadrature in the Beta variable
/// `z = y/(1+y)`; the independent oracle for the closed forms above.
///
/// Divergence is detected analytically from the moment window, never from
/// numeric blow-up.
pub fn quadrature_moment(
    alpha: StabilityIndex,
    beta: Option<StabilityIndex>,
    r: f64,
    acc: &Accuracy,
) -> Result<MomentValue> {
    acc.validate()?;
    let a = alpha.get();
    let finite = match beta {
        None => in_up_window(a, r),
        Some(b) => {
            let b = b.get();
            r > a.max(b) / 2.0 - 1.0 && r < a.min(b) / 2.0
        }
    };
    if !finite {
        return Ok(MomentValue::Infinite);
    }
    let mut value = up_quadrature(a, r, acc)?;
    if let Some(b) = beta {
        // -UV has independent factors: the product law integral factorizes.
        value *= up_quadrature(b.get(), r, acc)?;
    }
    Ok(MomentValue::Finite(value))
}

// int_0^inf y^r u_a(-1,y) dy under z = y/(1+y):
//   sin(a pi/2)/pi * int_0^1 z^(r - a/2) (1-z)^(a/2 - r - 1) dz
fn up_quadrature(a: f64, r: f64, acc: &Accuracy) -> Result<f64> {
    let p = r - a / 2.0;
    let q = a / 2.0 - r - 1.0;
    let integral = tanh_sinh_unit(|ln_z, ln_omz| p * ln_z + q * ln_omz, acc)?;
    Ok((a * PI / 2.0).sin() / PI * integral)
}

// ln(1 + e^x) without overflow.
fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// Tanh-sinh quadrature over `(0,1)` of a positive integrand given in log
/// form: `ln_f(ln z, ln(1-z))` must return the integrand's natural log.
///
/// Both logs are computed without cancellation and each node is formed as
/// `exp(ln_f + ln weight)`, so endpoint singularities like `z^(-0.98)` are
/// integrated to full accuracy: the singular factor and the doubly
/// exponentially small weight never meet an intermediate overflow.
pub fn tanh_sinh_unit(ln_f: impl Fn(f64, f64) -> f64, acc: &Accuracy) -> Result<f64> {
    // Endpoint exponents down to -0.985 leave node contributions decaying
    // only like e^{-0.03 u} with u = (pi/2) sinh t, so the window must
    // reach sinh t ~ 1000 before truncation error drops below tolerance.
    const T_MAX: f64 = 8.5;
    const MAX_LEVEL: u32 = 12;

    // ln cosh x, stable for large |x|
    let ln_cosh = |x: f64| x.abs() + (-2.0 * x.abs()).exp().ln_1p() - 2f64.ln();
    let eval = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        // z = 1/(1 + e^{-2u}), 1-z = 1/(1 + e^{2u})
        let ln_z = -softplus(-2.0 * u);
        let ln_omz = -softplus(2.0 * u);
        // w = (pi/4) cosh t / cosh^2 u
        let ln_w = (0.25 * PI).ln() + ln_cosh(t) - 2.0 * ln_cosh(u);
        let v = (ln_f(ln_z, ln_omz) + ln_w).exp();
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    let mut h = 1.0f64;
    let mut sum = eval(0.0);
    let mut j = 1;
    while (j as f64) * h <= T_MAX {
        let t = j as f64 * h;
        sum += eval(t) + eval(-t);
        j += 1;
    }
    let mut estimate = sum * h;

    for _level in 1..=MAX_LEVEL {
        h *= 0.5;
        // Only the new odd-index nodes at this level.
        let mut new_sum = 0.0;
        let mut j = 1;
        while (j as f64) * h <= T_MAX {
            let t = j as f64 * h;
            new_sum += eval(t) + eval(-t);
            j += 2;
        }
        sum += new_sum;
        let refined = sum * h;
        let err = (refined - estimate).abs();
        estimate = refined;
        if err <= acc.abs_tol.max(acc.rel_tol * estimate.abs()) {
            return Ok(estimate);
        }
    }
    Err(Error::Convergence { context: "tanh-sinh quadrature", iterations: 1 << MAX_LEVEL })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(v: f64) -> StabilityIndex {
        StabilityIndex::new(v).unwrap()
    }

    #[test]
    fn up_moment_values() {
        assert_eq!(up_moment(idx(1.0), 0.0), MomentValue::Finite(1.0));
        let m = up_moment(idx(1.0), 0.25).finite().unwrap();
        assert!((m - 2f64.sqrt()).abs() < 1e-14);
        assert_eq!(up_moment(idx(0.5), 0.3), MomentValue::Infinite);
        // window edges count as infinite
        assert_eq!(up_moment(idx(1.0), 0.5), MomentValue::Infinite);
        assert_eq!(up_moment(idx(1.0), -0.5), MomentValue::Infinite);
    }

    #[test]
    fn product_moment_values() {
        assert_eq!(product_moment(idx(1.0), idx(1.0), 0.0), MomentValue::Finite(1.0));
        let m = product_moment(idx(1.0), idx(1.0), 0.25).finite().unwrap();
        assert!((m - 2.0).abs() < 1e-13);
        assert_eq!(product_moment(idx(1.5), idx(1.0), 0.6), MomentValue::Infinite);
        // factorization where both factors are finite
        let (a, b, r) = (idx(1.3), idx(0.9), 0.1);
        let p = product_moment(a, b, r).finite().unwrap();
        let f = up_moment(a, r).finite().unwrap() * up_moment(b, r).finite().unwrap();
        assert!((p - f).abs() < 1e-14);
    }

    #[test]
    fn critical_exponent_values() {
        assert_eq!(critical_exponent(idx(1.0), idx(1.0)), 0.0);
        assert!((critical_exponent(idx(0.5), idx(0.9)) + 0.15).abs() < 1e-15);
        assert!((critical_exponent(idx(1.5), idx(1.0)) - 0.125).abs() < 1e-15);
    }

    #[test]
    fn critical_moment_values() {
        assert!((critical_moment(idx(1.0), idx(1.0)) - 1.0).abs() < 1e-15);
        assert!((critical_moment(idx(0.5), idx(0.5)) - 0.5).abs() < 1e-15);
        let want = 1.0 - (1.0 - 2f64.sqrt() / 2.0) / (1.0 + 2f64.sqrt() / 2.0);
        let got = critical_moment(idx(1.5), idx(1.0));
        assert!((got - want).abs() < 1e-14);
        assert!((got - 0.8284271).abs() < 1e-7);
        // symmetry
        assert_eq!(critical_moment(idx(1.5), idx(1.0)), critical_moment(idx(1.0), idx(1.5)));
        // equals the closed-form product moment at r*
        let (a, b) = (idx(1.5), idx(1.0));
        let pm = product_moment(a, b, critical_exponent(a, b)).finite().unwrap();
        assert!((pm - got).abs() < 1e-13);
    }

    #[test]
    fn log_drift_values() {
        assert!(log_drift(idx(1.0), idx(1.0)).abs() < 1e-15);
        assert!((log_drift(idx(0.5), idx(0.5)) - 2.0 * PI).abs() < 1e-13);
        assert!((log_drift(idx(1.5), idx(1.5)) + 2.0 * PI).abs() < 1e-13);
        // sign matches 2 - a - b
        for (a, b) in [(0.3, 1.2), (1.7, 0.2), (1.9, 1.8), (1.4, 0.6)] {
            let l = log_drift(idx(a), idx(b));
            let s = 2.0 - a - b;
            if s.abs() < 1e-12 {
                assert!(l.abs() < 1e-12);
            } else {
                assert_eq!(l.signum(), s.signum(), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn log_drift_matches_finite_difference() {
        for (a, b) in [(0.5, 0.5), (1.2, 0.8), (1.5, 1.5), (0.9, 1.3)] {
            let (alpha, beta) = (idx(a), idx(b));
            let h = 1e-5;
            let f = |r: f64| product_moment(alpha, beta, r).finite().unwrap().ln();
            let fd = (f(h) - f(-h)) / (2.0 * h);
            let l = log_drift(alpha, beta);
            assert!((l - fd).abs() < 1e-6, "a={a} b={b}: {l} vs {fd}");
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let acc = Accuracy::default();
        // zeroth moment is the normalization
        let m = quadrature_moment(idx(1.0), None, 0.0, &acc).unwrap().finite().unwrap();
        assert!((m - 1.0).abs() < 1e-8);
        // E(U^0.25) at alpha = 1
        let m = quadrature_moment(idx(1.0), None, 0.25, &acc).unwrap().finite().unwrap();
        assert!((m - 2f64.sqrt()).abs() < 1e-7);
        // product at the critical exponent of (0.5, 0.5)
        let m = quadrature_moment(idx(0.5), Some(idx(0.5)), -0.25, &acc).unwrap().finite().unwrap();
        assert!((m - 0.5).abs() < 1e-7);
        // analytic divergence detection
        assert_eq!(quadrature_moment(idx(0.5), None, 0.3, &acc).unwrap(), MomentValue::Infinite);
        assert_eq!(
            quadrature_moment(idx(1.5), Some(idx(1.0)), 0.6, &acc).unwrap(),
            MomentValue::Infinite
        );
    }

    #[test]
    fn log_product_moment_is_convex() {
        // second central differences of r -> log E((-UV)^r), step 1e-3
        for (a, b) in [(0.7, 1.1), (1.6, 1.8), (0.3, 0.4)] {
            let (alpha, beta) = (idx(a), idx(b));
            let lo = a.max(b) / 2.0 - 1.0;
            let hi = a.min(b) / 2.0;
            let h = 1e-3;
            for k in 1..20 {
                let r = lo + (hi - lo) * k as f64 / 20.0;
                if r - h <= lo || r + h >= hi {
                    continue;
                }
                let f = |r: f64| product_moment(alpha, beta, r).finite().unwrap().ln();
                let d2 = f(r + h) - 2.0 * f(r) + f(r - h);
                assert!(d2 >= -1e-12, "a={a} b={b} r={r}: {d2}");
            }
        }
    }
}
