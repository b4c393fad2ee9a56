//! The urn state machine: single-step dynamics, exhaustion detection and
//! seeded trajectory simulation.
//!
//! At stage `k` an amber draw adds `A - a_k` amber and `a_k` blue balls, a
//! blue draw adds `b_k` amber and `B - b_k` blue balls. The exhaustion time
//! `tau` is the first stage at which the amber count leaves `[0, total]`.
//!
//! Trajectories are reproducible: the generator is ChaCha8 seeded with the
//! trajectory's 64-bit seed, one uniform is consumed for the color and one
//! for the matching replacement law per step. (The reference procedure draws
//! both laws each step; only the matching one is ever used, and independence
//! makes the two variants distributionally identical.)

use std::fmt;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::distributions::IntegerDistribution;

/// Additions per extraction and support values are capped so that all counts
/// stay far below `i64::MAX` even after 10^7 steps.
pub const MAX_ADDITION: i64 = 1_000;
pub const MAX_SUPPORT_MAGNITUDE: i64 = 1_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("{0} must be a positive integer, got {1}")]
    NonPositiveAddition(&'static str, i64),
    #[error("{0} = {1} exceeds the overflow guard of {MAX_ADDITION}")]
    AdditionTooLarge(&'static str, i64),
    #[error("{0} support value {1} exceeds magnitude {MAX_SUPPORT_MAGNITUDE}")]
    SupportOutOfRange(&'static str, i64),
    #[error("initial ball count {0} must be nonnegative")]
    NegativeInitialCount(i64),
    #[error("the urn must start with at least one ball")]
    EmptyUrn,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("draw value {draw} is not in the support of the {color} law")]
    DrawOutsideSupport { color: Color, draw: i64 },
}

/// Ball color. When a scheme is constructed with `A < B` the colors are
/// swapped internally so that `delta = A - B >= 0`; `Amber` then refers to
/// the color with the larger addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Color {
    Amber,
    Blue,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Amber => Color::Blue,
            Color::Blue => Color::Amber,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Color::Amber => write!(f, "amber"),
            Color::Blue => write!(f, "blue"),
        }
    }
}

/// Which color ran out at the exhaustion time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TauKind {
    AmberExhausted,
    BlueExhausted,
}

impl fmt::Display for TauKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauKind::AmberExhausted => write!(f, "AmberExhausted"),
            TauKind::BlueExhausted => write!(f, "BlueExhausted"),
        }
    }
}

/// Full model parameters, normalized so that `amber_addition >= blue_addition`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrnScheme {
    amber_addition: i64,
    blue_addition: i64,
    amber_law: IntegerDistribution,
    blue_law: IntegerDistribution,
    alpha0: i64,
    beta0: i64,
    colors_swapped: bool,
}

impl UrnScheme {
    /// Builds a scheme from the additions `A`, `B`, the laws of `a_k` and
    /// `b_k`, and the initial composition. If `A < B` the colors are swapped
    /// (laws and initial counts included) and the swap is recorded.
    pub fn new(
        a: i64,
        b: i64,
        a_law: IntegerDistribution,
        b_law: IntegerDistribution,
        alpha0: i64,
        beta0: i64,
    ) -> Result<Self, SchemeError> {
        if a < 1 {
            return Err(SchemeError::NonPositiveAddition("A", a));
        }
        if b < 1 {
            return Err(SchemeError::NonPositiveAddition("B", b));
        }
        if a > MAX_ADDITION {
            return Err(SchemeError::AdditionTooLarge("A", a));
        }
        if b > MAX_ADDITION {
            return Err(SchemeError::AdditionTooLarge("B", b));
        }
        for (name, law) in [("a", &a_law), ("b", &b_law)] {
            if let Some(&v) = law
                .values()
                .iter()
                .find(|v| v.abs() > MAX_SUPPORT_MAGNITUDE)
            {
                return Err(SchemeError::SupportOutOfRange(name, v));
            }
        }
        if alpha0 < 0 {
            return Err(SchemeError::NegativeInitialCount(alpha0));
        }
        if beta0 < 0 {
            return Err(SchemeError::NegativeInitialCount(beta0));
        }
        if alpha0 + beta0 < 1 {
            return Err(SchemeError::EmptyUrn);
        }
        if a >= b {
            Ok(Self {
                amber_addition: a,
                blue_addition: b,
                amber_law: a_law,
                blue_law: b_law,
                alpha0,
                beta0,
                colors_swapped: false,
            })
        } else {
            Ok(Self {
                amber_addition: b,
                blue_addition: a,
                amber_law: b_law,
                blue_law: a_law,
                alpha0: beta0,
                beta0: alpha0,
                colors_swapped: true,
            })
        }
    }

    /// Total balls added on an amber draw (`A`).
    pub fn amber_addition(&self) -> i64 {
        self.amber_addition
    }

    /// Total balls added on a blue draw (`B`).
    pub fn blue_addition(&self) -> i64 {
        self.blue_addition
    }

    /// `delta = A - B`, nonnegative after normalization.
    pub fn delta(&self) -> i64 {
        self.amber_addition - self.blue_addition
    }

    pub fn amber_law(&self) -> &IntegerDistribution {
        &self.amber_law
    }

    pub fn blue_law(&self) -> &IntegerDistribution {
        &self.blue_law
    }

    pub fn alpha0(&self) -> i64 {
        self.alpha0
    }

    pub fn beta0(&self) -> i64 {
        self.beta0
    }

    pub fn t0(&self) -> i64 {
        self.alpha0 + self.beta0
    }

    /// True when the constructor swapped colors to normalize `delta >= 0`.
    pub fn colors_swapped(&self) -> bool {
        self.colors_swapped
    }

    /// True when no replacement can remove balls, so exhaustion is impossible.
    pub fn is_safe(&self) -> bool {
        self.amber_law.min_value() >= 0
            && self.amber_law.max_value() <= self.amber_addition
            && self.blue_law.min_value() >= 0
            && self.blue_law.max_value() <= self.blue_addition
    }

    pub fn initial_state(&self) -> UrnState {
        UrnState {
            step: 0,
            total: self.t0(),
            amber: self.alpha0,
            amber_draws: 0,
        }
    }
}

/// Urn composition after `step` extractions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UrnState {
    /// Number of extractions performed so far.
    pub step: u64,
    /// Total balls in the urn.
    pub total: i64,
    /// Amber balls in the urn.
    pub amber: i64,
    /// Cumulative number of amber draws.
    pub amber_draws: u64,
}

impl UrnState {
    pub fn blue(&self) -> i64 {
        self.total - self.amber
    }

    /// Proportion of amber balls.
    pub fn proportion(&self) -> f64 {
        self.amber as f64 / self.total as f64
    }
}

/// Result of applying one replacement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    Continued(UrnState),
    Absorbed { tau: u64, kind: TauKind },
}

/// Applies one extraction-and-replacement. `draw` is the sampled value of the
/// law matching `color` (`a_k` for amber, `b_k` for blue) and must belong to
/// that law's support.
pub fn step(
    scheme: &UrnScheme,
    state: &UrnState,
    color: Color,
    draw: i64,
) -> Result<StepOutcome, StepError> {
    let law = match color {
        Color::Amber => scheme.amber_law(),
        Color::Blue => scheme.blue_law(),
    };
    if !law.contains(draw) {
        return Err(StepError::DrawOutsideSupport { color, draw });
    }
    let (total, amber, amber_draws) = match color {
        Color::Amber => (
            state.total + scheme.amber_addition(),
            state.amber + scheme.amber_addition() - draw,
            state.amber_draws + 1,
        ),
        Color::Blue => (
            state.total + scheme.blue_addition(),
            state.amber + draw,
            state.amber_draws,
        ),
    };
    let tau = state.step + 1;
    if amber < 0 {
        return Ok(StepOutcome::Absorbed {
            tau,
            kind: TauKind::AmberExhausted,
        });
    }
    if amber > total {
        return Ok(StepOutcome::Absorbed {
            tau,
            kind: TauKind::BlueExhausted,
        });
    }
    Ok(StepOutcome::Continued(UrnState {
        step: tau,
        total,
        amber,
        amber_draws,
    }))
}

/// Draws the color of the next extracted ball: amber with probability
/// `amber / total`, via a single uniform (`u < p`).
pub fn draw_color<R: Rng + ?Sized>(state: &UrnState, rng: &mut R) -> Color {
    if rng.gen::<f64>() < state.proportion() {
        Color::Amber
    } else {
        Color::Blue
    }
}

/// A recorded run of the urn process.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    seed: u64,
    p_sequence: Vec<f64>,
    colors: Vec<Color>,
    tau: Option<u64>,
    tau_kind: Option<TauKind>,
    final_state: UrnState,
}

impl Trajectory {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Amber proportions `p_0, p_1, ...`; when absorbed, the last entry is
    /// the out-of-range proportion at `tau`.
    pub fn p_sequence(&self) -> &[f64] {
        &self.p_sequence
    }

    /// Colors drawn at steps `1..`, so `colors()[k-1]` is `Y_k`.
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn tau(&self) -> Option<u64> {
        self.tau
    }

    pub fn tau_kind(&self) -> Option<TauKind> {
        self.tau_kind
    }

    pub fn survived(&self) -> bool {
        self.tau.is_none()
    }

    /// Number of extractions performed (equals `tau` when absorbed).
    pub fn steps(&self) -> u64 {
        self.colors.len() as u64
    }

    pub fn final_proportion(&self) -> f64 {
        *self.p_sequence.last().expect("p_sequence is never empty")
    }

    /// Last valid state (the absorbing transition is not applied).
    pub fn final_state(&self) -> &UrnState {
        &self.final_state
    }

    /// Cumulative amber-draw counts `X_1, X_2, ...` aligned with `colors()`.
    pub fn amber_draw_counts(&self) -> Vec<u64> {
        let mut acc = 0u64;
        self.colors
            .iter()
            .map(|&c| {
                if c == Color::Amber {
                    acc += 1;
                }
                acc
            })
            .collect()
    }

    /// Writes the trajectory as CSV: header `n,p,color`, one row per step
    /// (row 0 has no color), and a trailing comment line with `tau`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "n,p,color")?;
        writeln!(out, "0,{},", self.p_sequence[0])?;
        for (i, p) in self.p_sequence.iter().enumerate().skip(1) {
            writeln!(out, "{},{},{}", i, p, self.colors[i - 1])?;
        }
        match (self.tau, self.tau_kind) {
            (Some(tau), Some(kind)) => writeln!(out, "# tau={tau} kind={kind}"),
            _ => writeln!(out, "# tau=none kind=none"),
        }
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to Vec");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }
}

/// Runs the urn for up to `max_steps` extractions or until absorption.
/// Deterministic in `(scheme, max_steps, seed)`.
pub fn simulate_trajectory(scheme: &UrnScheme, max_steps: u64, seed: u64) -> Trajectory {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = scheme.initial_state();
    let mut p_sequence = Vec::with_capacity(max_steps as usize + 1);
    let mut colors = Vec::with_capacity(max_steps as usize);
    p_sequence.push(state.proportion());
    let mut tau = None;
    let mut tau_kind = None;

    while state.step < max_steps {
        let color = draw_color(&state, &mut rng);
        let law = match color {
            Color::Amber => scheme.amber_law(),
            Color::Blue => scheme.blue_law(),
        };
        let draw = law.sample(&mut rng);
        colors.push(color);
        match step(scheme, &state, color, draw).expect("sampled draw is in support") {
            StepOutcome::Continued(next) => {
                debug_assert_eq!(
                    next.total,
                    scheme.t0()
                        + next.step as i64 * scheme.blue_addition()
                        + scheme.delta() * next.amber_draws as i64,
                    "total-ball identity violated"
                );
                debug_assert!(next.amber >= 0 && next.amber <= next.total);
                p_sequence.push(next.proportion());
                state = next;
            }
            StepOutcome::Absorbed { tau: at, kind } => {
                // Record the out-of-range proportion at tau, then stop.
                let (total, amber) = match color {
                    Color::Amber => (
                        state.total + scheme.amber_addition(),
                        state.amber + scheme.amber_addition() - draw,
                    ),
                    Color::Blue => (state.total + scheme.blue_addition(), state.amber + draw),
                };
                p_sequence.push(amber as f64 / total as f64);
                tau = Some(at);
                tau_kind = Some(kind);
                break;
            }
        }
    }

    Trajectory {
        seed,
        p_sequence,
        colors,
        tau,
        tau_kind,
        final_state: state,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::IntegerDistribution;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn figure1_scheme() -> UrnScheme {
        UrnScheme::new(
            7,
            2,
            IntegerDistribution::new(vec![-5, -2, 4, 7], vec![1, 2, 2, 1]).unwrap(),
            IntegerDistribution::new(vec![-5, 0, 4], vec![2, 3, 1]).unwrap(),
            30,
            30,
        )
        .unwrap()
    }

    fn state(step: u64, total: i64, amber: i64, amber_draws: u64) -> UrnState {
        UrnState {
            step,
            total,
            amber,
            amber_draws,
        }
    }

    #[test]
    fn amber_step_updates_counts() {
        let scheme = figure1_scheme();
        let out = step(&scheme, &state(0, 60, 30, 0), Color::Amber, 4).unwrap();
        assert_eq!(
            out,
            StepOutcome::Continued(state(1, 67, 33, 1)),
        );
    }

    #[test]
    fn blue_step_updates_counts() {
        let scheme = figure1_scheme();
        let out = step(&scheme, &state(0, 60, 30, 0), Color::Blue, -5).unwrap();
        assert_eq!(out, StepOutcome::Continued(state(1, 62, 25, 0)));
    }

    #[test]
    fn blue_step_can_exhaust_amber() {
        let scheme = figure1_scheme();
        let out = step(&scheme, &state(0, 60, 1, 0), Color::Blue, -5).unwrap();
        assert_eq!(
            out,
            StepOutcome::Absorbed {
                tau: 1,
                kind: TauKind::AmberExhausted
            }
        );
    }

    #[test]
    fn draw_outside_support_is_rejected() {
        let scheme = figure1_scheme();
        let err = step(&scheme, &state(0, 60, 30, 0), Color::Amber, 3).unwrap_err();
        assert_eq!(
            err,
            StepError::DrawOutsideSupport {
                color: Color::Amber,
                draw: 3
            }
        );
    }

    #[test]
    fn boundary_proportions_are_not_absorbing() {
        // p = 0 and p = 1 are legal states; only strict violations absorb.
        let scheme = UrnScheme::new(
            3,
            2,
            IntegerDistribution::degenerate(0),
            IntegerDistribution::degenerate(0),
            0,
            10,
        )
        .unwrap();
        let out = step(&scheme, &state(0, 10, 0, 0), Color::Blue, 0).unwrap();
        assert_eq!(out, StepOutcome::Continued(state(1, 12, 0, 0)));
    }

    #[test]
    fn all_blue_urn_always_draws_blue() {
        let s = state(0, 10, 0, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(draw_color(&s, &mut rng), Color::Blue);
        }
    }

    #[test]
    fn all_amber_urn_always_draws_amber() {
        let s = state(0, 10, 10, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(draw_color(&s, &mut rng), Color::Amber);
        }
    }

    #[test]
    fn color_frequency_matches_proportion() {
        let s = state(0, 60, 30, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(0xC01);
        let n = 1_000_000;
        let amber = (0..n)
            .filter(|_| draw_color(&s, &mut rng) == Color::Amber)
            .count();
        let freq = amber as f64 / n as f64;
        let se = (0.5 * 0.5 / n as f64).sqrt();
        assert!((freq - 0.5).abs() <= 4.0 * se, "freq {freq}");
    }

    #[test]
    fn safe_scheme_never_absorbs() {
        let scheme = UrnScheme::new(
            7,
            2,
            IntegerDistribution::degenerate(0),
            IntegerDistribution::degenerate(0),
            5,
            5,
        )
        .unwrap();
        for seed in 0..20 {
            let t = simulate_trajectory(&scheme, 500, seed);
            assert!(t.survived());
            assert!(t.p_sequence().iter().all(|&p| (0.0..=1.0).contains(&p)));
        }
    }

    #[test]
    fn figure1_shows_both_survival_and_amber_exhaustion() {
        let scheme = figure1_scheme();
        let mut survived = 0;
        let mut amber_exhausted = 0;
        for seed in 0..200 {
            let t = simulate_trajectory(&scheme, 5000, seed);
            match t.tau_kind() {
                None => survived += 1,
                Some(TauKind::AmberExhausted) => amber_exhausted += 1,
                Some(TauKind::BlueExhausted) => {}
            }
        }
        assert!(survived > 0, "no trajectory survived");
        assert!(amber_exhausted > 0, "no trajectory lost its amber balls");
    }

    #[test]
    fn simulation_is_deterministic() {
        let scheme = figure1_scheme();
        let a = simulate_trajectory(&scheme, 2000, 99);
        let b = simulate_trajectory(&scheme, 2000, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn absorbed_trajectory_ends_with_out_of_range_p() {
        let scheme = figure1_scheme();
        let absorbed = (0..500)
            .map(|seed| simulate_trajectory(&scheme, 5000, seed))
            .find(|t| !t.survived())
            .expect("some trajectory absorbs");
        let tau = absorbed.tau().unwrap();
        assert_eq!(absorbed.p_sequence().len() as u64, tau + 1);
        let last = absorbed.final_proportion();
        assert!(!(0.0..=1.0).contains(&last));
        // All earlier proportions are valid.
        assert!(absorbed.p_sequence()[..tau as usize]
            .iter()
            .all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn constructor_swaps_colors_when_b_exceeds_a() {
        let a_law = IntegerDistribution::degenerate(1);
        let b_law = IntegerDistribution::degenerate(-1);
        let scheme = UrnScheme::new(2, 7, a_law.clone(), b_law.clone(), 10, 20).unwrap();
        assert!(scheme.colors_swapped());
        assert_eq!(scheme.amber_addition(), 7);
        assert_eq!(scheme.blue_addition(), 2);
        assert_eq!(scheme.amber_law(), &b_law);
        assert_eq!(scheme.blue_law(), &a_law);
        assert_eq!(scheme.alpha0(), 20);
        assert_eq!(scheme.beta0(), 10);
        assert!(scheme.delta() >= 0);
    }

    #[test]
    fn constructor_rejects_invalid_parameters() {
        let law = IntegerDistribution::degenerate(0);
        assert!(matches!(
            UrnScheme::new(0, 2, law.clone(), law.clone(), 1, 1),
            Err(SchemeError::NonPositiveAddition("A", 0))
        ));
        assert!(matches!(
            UrnScheme::new(2, 2, law.clone(), law.clone(), 0, 0),
            Err(SchemeError::EmptyUrn)
        ));
        assert!(matches!(
            UrnScheme::new(2, 2, law.clone(), law.clone(), -1, 5),
            Err(SchemeError::NegativeInitialCount(-1))
        ));
        assert!(matches!(
            UrnScheme::new(5000, 2, law.clone(), law.clone(), 1, 1),
            Err(SchemeError::AdditionTooLarge("A", 5000))
        ));
        let wild = IntegerDistribution::degenerate(100_000);
        assert!(matches!(
            UrnScheme::new(2, 2, wild, law, 1, 1),
            Err(SchemeError::SupportOutOfRange("a", 100_000))
        ));
    }

    #[test]
    fn csv_export_format() {
        let scheme = figure1_scheme();
        let t = simulate_trajectory(&scheme, 5, 3);
        let csv = t.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,p,color");
        assert_eq!(lines[1], "0,0.5,");
        assert!(lines.last().unwrap().starts_with("# tau="));
        // One row per recorded proportion plus header and trailer.
        assert_eq!(lines.len(), t.p_sequence().len() + 2);
    }
}
