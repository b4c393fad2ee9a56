//! Closed-form asymptotic analysis of the urn proportion.
//!
//! Any almost-sure limit of the amber proportion must be a root of the
//! quadratic `omega(x) = delta*x^2 - (delta - abar - bbar)*x - bbar`, where
//! `abar`, `bbar` are the replacement-law means. The sign pattern of the means
//! together with the discriminant `(delta - abar - bbar)^2 + 4*delta*bbar`
//! decides between convergence, absorption and bistability. All regime
//! inequalities are evaluated in exact rational arithmetic; only the root
//! values themselves are floating point.

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::urn::UrnScheme;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RootError {
    #[error("the discriminant is negative; omega has no real roots")]
    NegativeDiscriminant,
    #[error("delta is zero; omega is linear (limit bbar/(abar+bbar))")]
    ZeroDelta,
}

/// Asymptotic regime of the proportion process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    /// `abar < 0 <= bbar`: exhaustion is certain.
    SubmartingaleAbsorb,
    /// `abar = 0 <= bbar`: survivors converge to 1.
    SubmartingaleToOne,
    /// `abar, bbar > 0`: survivors converge to the upper root.
    ConvergeUpper,
    /// `abar, bbar < 0`: survivors converge to the lower root.
    ConvergeLower,
    /// `bbar < 0 <= abar` with no root in `[0,1]`: exhaustion is certain.
    SupermartingaleAbsorb,
    /// `bbar = 0 < abar` with no interior root: survivors converge to 0.
    SupermartingaleToZero,
    /// `bbar <= 0 <= abar` with real roots: survivors converge to one of the
    /// two roots, the upper being much more likely.
    Bistable,
    /// `delta = 0`, not both means zero: deterministic limit
    /// `bbar/(abar+bbar)` (balanced scheme).
    BalancedDeterministic,
    /// `delta = 0`, `abar = bbar = 0`: classical balanced model whose limit
    /// is random with a Beta distribution (reported as a label only).
    BalancedPolyaEggenberger,
}

/// Classification result with the theoretical limit points.
#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub delta: i64,
    pub a_mean: Rational64,
    pub b_mean: Rational64,
    pub regime: Regime,
    /// Ascending roots of omega in `[0,1]` that the proportion can converge
    /// to; empty for absorb-only regimes and for the random Beta limit.
    pub limit_points: Vec<f64>,
    pub discriminant: f64,
    /// The limit is a nondegenerate random variable (Beta case).
    pub random_limit: bool,
    /// Colors were swapped at construction; amber here is the user's blue.
    pub colors_swapped: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RegimeReportJson<'a> {
    delta: i64,
    a_mean: String,
    b_mean: String,
    regime: &'a Regime,
    limit_points: &'a [f64],
    discriminant: f64,
    random_limit: bool,
    colors_swapped: bool,
}

impl RegimeReport {
    pub fn to_json(&self) -> String {
        let view = RegimeReportJson {
            delta: self.delta,
            a_mean: format!("{}/{}", self.a_mean.numer(), self.a_mean.denom()),
            b_mean: format!("{}/{}", self.b_mean.numer(), self.b_mean.denom()),
            regime: &self.regime,
            limit_points: &self.limit_points,
            discriminant: self.discriminant,
            random_limit: self.random_limit,
            colors_swapped: self.colors_swapped,
        };
        serde_json::to_string_pretty(&view).expect("report serializes")
    }
}

/// The limit polynomial `delta*x^2 - (delta - abar - bbar)*x - bbar`.
pub fn omega(x: f64, delta: i64, a_mean: Rational64, b_mean: Rational64) -> f64 {
    let d = delta as f64;
    let a = rational_to_f64(a_mean);
    let b = rational_to_f64(b_mean);
    d * x * x - (d - a - b) * x - b
}

/// Exact discriminant `(delta - abar - bbar)^2 + 4*delta*bbar`.
pub fn discriminant(delta: i64, a_mean: Rational64, b_mean: Rational64) -> Rational64 {
    let d = Rational64::from_integer(delta);
    let q = d - a_mean - b_mean;
    q * q + Rational64::from_integer(4) * d * b_mean
}

fn rational_to_f64(r: Rational64) -> f64 {
    r.to_f64().expect("rational fits in f64")
}

/// Both roots of omega as `(lower, upper)`, via the numerically stable form:
/// the larger-magnitude root from the quadratic formula, the other from the
/// root product `-bbar/delta`.
fn roots(delta: i64, a_mean: Rational64, b_mean: Rational64) -> Result<(f64, f64), RootError> {
    if delta == 0 {
        return Err(RootError::ZeroDelta);
    }
    let disc = discriminant(delta, a_mean, b_mean);
    if disc < Rational64::zero() {
        return Err(RootError::NegativeDiscriminant);
    }
    let d = delta as f64;
    let q = d - rational_to_f64(a_mean) - rational_to_f64(b_mean);
    let sqrt_disc = rational_to_f64(disc).sqrt();
    let product = -rational_to_f64(b_mean) / d;
    let big = if q >= 0.0 {
        (q + sqrt_disc) / (2.0 * d)
    } else {
        (q - sqrt_disc) / (2.0 * d)
    };
    let other = if big == 0.0 { 0.0 } else { product / big };
    Ok((big.min(other), big.max(other)))
}

/// The stable equilibrium `p_star = (q + sqrt(disc)) / (2*delta)`.
pub fn upper_root(delta: i64, a_mean: Rational64, b_mean: Rational64) -> Result<f64, RootError> {
    roots(delta, a_mean, b_mean).map(|(_, hi)| hi)
}

/// The unstable equilibrium `p_lower = (q - sqrt(disc)) / (2*delta)`.
pub fn lower_root(delta: i64, a_mean: Rational64, b_mean: Rational64) -> Result<f64, RootError> {
    roots(delta, a_mean, b_mean).map(|(lo, _)| lo)
}

/// Expected one-step change of the proportion at `(p, t)`, up to the positive
/// factor `(1 + A/t)(1 + B/t)`:
///
/// `h(p,t) = -p^2*delta/t + p*[delta - abar*(1+B/t) - bbar*(1+A/t)]/t
///           + bbar*(1+A/t)/t`.
pub fn drift(p: f64, t: f64, scheme: &UrnScheme) -> f64 {
    let a_total = scheme.amber_addition() as f64;
    let b_total = scheme.blue_addition() as f64;
    let delta = scheme.delta() as f64;
    let abar = rational_to_f64(scheme.amber_law().mean());
    let bbar = rational_to_f64(scheme.blue_law().mean());
    -p * p * delta / t
        + p * (delta - abar * (1.0 + b_total / t) - bbar * (1.0 + a_total / t)) / t
        + bbar * (1.0 + a_total / t) / t
}

/// Classifies a scheme into its asymptotic regime. All inequalities are
/// decided on exact rationals.
pub fn classify(scheme: &UrnScheme) -> RegimeReport {
    let delta = scheme.delta();
    let a_mean = scheme.amber_law().mean();
    let b_mean = scheme.blue_law().mean();
    let zero = Rational64::zero();
    let disc = discriminant(delta, a_mean, b_mean);

    let (regime, limit_points, random_limit) = if delta == 0 {
        if a_mean.is_zero() && b_mean.is_zero() {
            (Regime::BalancedPolyaEggenberger, vec![], true)
        } else {
            let sum = a_mean + b_mean;
            // With abar + bbar = 0 the linear omega is constant and nonzero,
            // so no limit is possible; otherwise keep the root only when it
            // lies in [0,1].
            let limits = if sum.is_zero() {
                vec![]
            } else {
                let limit = b_mean / sum;
                if limit >= zero && limit <= Rational64::from_integer(1) {
                    vec![rational_to_f64(limit)]
                } else {
                    vec![]
                }
            };
            (Regime::BalancedDeterministic, limits, false)
        }
    } else if a_mean <= zero && b_mean >= zero {
        if a_mean < zero {
            (Regime::SubmartingaleAbsorb, vec![], false)
        } else {
            (Regime::SubmartingaleToOne, vec![1.0], false)
        }
    } else if a_mean > zero && b_mean > zero {
        let p = upper_root(delta, a_mean, b_mean).expect("disc > 0 when both means positive");
        (Regime::ConvergeUpper, vec![p], false)
    } else if a_mean < zero && b_mean < zero {
        let p = lower_root(delta, a_mean, b_mean).expect("disc > 0 when both means negative");
        (Regime::ConvergeLower, vec![p], false)
    } else {
        // bbar <= 0 <= abar, not both zero.
        let sum_magnitude = (a_mean + b_mean).abs();
        let delta_rat = Rational64::from_integer(delta);
        let no_root = sum_magnitude > delta_rat || disc < zero;
        if no_root {
            if b_mean < zero {
                (Regime::SupermartingaleAbsorb, vec![], false)
            } else {
                (Regime::SupermartingaleToZero, vec![0.0], false)
            }
        } else {
            let (lo, hi) = roots(delta, a_mean, b_mean).expect("disc >= 0 in bistable branch");
            let limits = if disc.is_zero() { vec![lo] } else { vec![lo, hi] };
            (Regime::Bistable, limits, false)
        }
    };

    RegimeReport {
        delta,
        a_mean,
        b_mean,
        regime,
        limit_points,
        discriminant: rational_to_f64(disc),
        random_limit,
        colors_swapped: scheme.colors_swapped(),
    }
}
