//! The two deterministic counterexample chains showing that the side
//! conditions of the overshoot recurrence/transience theorem cannot be
//! dropped.
//!
//! Variant One is locally recurrent yet its overshoot chain diverges to
//! infinity (the transience-side condition fails); variant Two is locally
//! recurrent but not left-limit recurrent (the recurrence-side condition
//! fails). States are exact rationals so orbit checks carry no tolerance.

use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Stream;

/// Exact chain state.
pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    One,
    Two,
}

/// One step of the deterministic transition kernel.
///
/// Variant One maps `x -> 1/x` for `|x| > 1`, `x -> -(1+|x|)/x` for
/// `0 < |x| <= 1` and `0 -> 1`; variant Two flips the signs of both images.
pub fn step(variant: Variant, x: Rational) -> Rational {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if x == zero {
        return one;
    }
    let abs = if x < zero { -x } else { x };
    match variant {
        Variant::One => {
            if abs > one {
                one / x
            } else {
                -(one + abs) / x
            }
        }
        Variant::Two => {
            if abs > one {
                -(one / x)
            } else {
                (one + abs) / x
            }
        }
    }
}

/// The full orbit `x0, step(x0), ...` of length `n + 1`.
pub fn orbit(variant: Variant, x0: Rational, n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n + 1);
    let mut x = x0;
    out.push(x);
    for _ in 0..n {
        x = step(variant, x);
        out.push(x);
    }
    out
}

/// Closed-form `n`-th overshoot of the barrier 0.
///
/// Variant One needs `x0` in `(0,1]` and gives `Y_n = 1/x0 + 2n`; variant
/// Two needs `x0 > 1` and gives `Y_n = 1/(x0 + 2n - 1)`.
pub fn overshoot_orbit(variant: Variant, x0: Rational, n: usize) -> Result<Rational> {
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    let two_n = Rational::from_integer(2 * n as i64);
    match variant {
        Variant::One => {
            if !(x0 > zero && x0 <= one) {
                return Err(Error::domain("variant One requires x0 in (0, 1]"));
            }
            Ok(one / x0 + two_n)
        }
        Variant::Two => {
            if !(x0 > one) {
                return Err(Error::domain("variant Two requires x0 > 1"));
            }
            Ok(one / (x0 + two_n - one))
        }
    }
}

/// Up-crossings of 0 extracted from the iterated orbit: the first positive
/// value after each excursion below 0. Index 1 is the first up-crossing.
pub fn extract_overshoots(variant: Variant, x0: Rational, count: usize) -> Vec<Rational> {
    let zero = Rational::from_integer(0);
    let mut out = Vec::with_capacity(count);
    let mut x = x0;
    let mut below = false;
    while out.len() < count {
        x = step(variant, x);
        if x < zero {
            below = true;
        } else if below {
            out.push(x);
            below = false;
        }
    }
    out
}

/// A piecewise-constant cadlag path: `(event time, state after the event)`,
/// beginning with `(0, x0)`.
pub type SubordinatedPath = Vec<(f64, Rational)>;

/// Subordinate the chain by a Poisson process of the given rate.
///
/// Event times are exponential-gap arrivals; the path holds the chain
/// value between events. Subordination reorders nothing: the visited-state
/// sequence is the deterministic orbit whatever the event times are.
pub fn subordinate(
    variant: Variant,
    x0: Rational,
    rate: f64,
    horizon: f64,
    rng: &mut Stream,
) -> Result<SubordinatedPath> {
    if !(rate > 0.0) || !(horizon > 0.0) {
        return Err(Error::domain("subordinate requires rate > 0 and horizon > 0"));
    }
    let mut path = vec![(0.0, x0)];
    let mut t = 0.0;
    let mut x = x0;
    loop {
        let u: f64 = rng.random();
        let gap = -(1.0 - u).ln() / rate;
        t += gap;
        if t > horizon {
            return Ok(path);
        }
        x = step(variant, x);
        path.push((t, x));
    }
}
