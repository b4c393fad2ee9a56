//! Batch experiments: many seeded trajectories, absorption statistics,
//! empirical limit assignment and the law-of-large-numbers diagnostic
//! (`X_n/n` should track `p_n` on surviving trajectories).
//!
//! Trajectories are embarrassingly parallel; trajectory `i` uses the derived
//! seed `seed ^ i`, so batches are reproducible regardless of scheduling.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::asymptotics::classify;
use crate::urn::{simulate_trajectory, Color, TauKind, Trajectory, UrnScheme};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiagnosticError {
    #[error("trajectory was absorbed after {steps} steps, need at least {tail} surviving steps")]
    AbsorbedTooEarly { steps: u64, tail: u64 },
}

/// One absorption-time histogram bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TauBin {
    pub tau: u64,
    pub kind: TauKind,
    pub count: u64,
}

/// Nearest theoretical limit point for one surviving trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitAssignment {
    pub limit: f64,
    pub distance: f64,
}

/// Fraction of survivors assigned to one limit point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitFraction {
    pub limit: f64,
    pub fraction: f64,
}

/// Aggregated results of a batch run.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BatchStats {
    pub n_trajectories: u64,
    pub max_steps: u64,
    pub base_seed: u64,
    pub survived_count: u64,
    /// Absorption times with the exhausted color, ascending in `tau`.
    pub tau_histogram: Vec<TauBin>,
    /// Terminal proportion of each survivor, in trajectory order.
    pub final_p: Vec<f64>,
    /// Nearest theoretical limit per survivor; empty when the regime has no
    /// limit points.
    pub limit_assignment: Vec<LimitAssignment>,
    /// `|X_n/n - p_n|` at the final step of each survivor.
    pub lemma1_gap: Vec<f64>,
    pub fraction_to_limit: Vec<LimitFraction>,
}

impl BatchStats {
    pub fn survival_fraction(&self) -> f64 {
        self.survived_count as f64 / self.n_trajectories as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize")
    }
}

struct TrajectorySummary {
    tau: Option<(u64, TauKind)>,
    final_p: f64,
    lemma1_gap: f64,
}

fn summarize(trajectory: &Trajectory) -> TrajectorySummary {
    let final_p = if trajectory.survived() {
        trajectory.final_proportion()
    } else {
        f64::NAN
    };
    let gap = if trajectory.survived() && trajectory.steps() > 0 {
        let n = trajectory.steps();
        let x = trajectory.final_state().amber_draws;
        (x as f64 / n as f64 - trajectory.final_proportion()).abs()
    } else {
        f64::NAN
    };
    TrajectorySummary {
        tau: trajectory.tau().zip(trajectory.tau_kind()),
        final_p,
        lemma1_gap: gap,
    }
}

/// Runs `n_trajectories` independent simulations of up to `max_steps`
/// extractions and aggregates the statistics. Deterministic in
/// `(scheme, n_trajectories, max_steps, seed)`.
pub fn run_batch(
    scheme: &UrnScheme,
    n_trajectories: u64,
    max_steps: u64,
    seed: u64,
) -> BatchStats {
    let summaries: Vec<TrajectorySummary> = (0..n_trajectories)
        .into_par_iter()
        .map(|i| summarize(&simulate_trajectory(scheme, max_steps, seed ^ i)))
        .collect();

    let limit_points = classify(scheme).limit_points;

    let mut survived_count = 0u64;
    let mut tau_counts: std::collections::BTreeMap<(u64, u8), u64> = Default::default();
    let mut final_p = Vec::new();
    let mut limit_assignment = Vec::new();
    let mut lemma1_gap = Vec::new();
    let mut per_limit = vec![0u64; limit_points.len()];

    for s in &summaries {
        match s.tau {
            None => {
                survived_count += 1;
                final_p.push(s.final_p);
                lemma1_gap.push(s.lemma1_gap);
                if !limit_points.is_empty() {
                    let (idx, limit, dist) = limit_points
                        .iter()
                        .enumerate()
                        .map(|(i, &l)| (i, l, (s.final_p - l).abs()))
                        .min_by(|a, b| a.2.total_cmp(&b.2))
                        .expect("nonempty limit points");
                    per_limit[idx] += 1;
                    limit_assignment.push(LimitAssignment {
                        limit,
                        distance: dist,
                    });
                }
            }
            Some((tau, kind)) => {
                let key = (tau, matches!(kind, TauKind::BlueExhausted) as u8);
                *tau_counts.entry(key).or_insert(0) += 1;
            }
        }
    }

    let tau_histogram = tau_counts
        .into_iter()
        .map(|((tau, blue), count)| TauBin {
            tau,
            kind: if blue == 1 {
                TauKind::BlueExhausted
            } else {
                TauKind::AmberExhausted
            },
            count,
        })
        .collect();

    let fraction_to_limit = limit_points
        .iter()
        .zip(&per_limit)
        .map(|(&limit, &count)| LimitFraction {
            limit,
            fraction: if survived_count > 0 {
                count as f64 / survived_count as f64
            } else {
                0.0
            },
        })
        .collect();

    BatchStats {
        n_trajectories,
        max_steps,
        base_seed: seed,
        survived_count,
        tau_histogram,
        final_p,
        limit_assignment,
        lemma1_gap,
        fraction_to_limit,
    }
}

/// Maximum of `|X_n/n - p_n|` over the last `tail` steps of a surviving
/// trajectory.
pub fn lemma1_check(trajectory: &Trajectory, tail: u64) -> Result<f64, DiagnosticError> {
    let steps = trajectory.steps();
    if !trajectory.survived() || steps < tail || tail == 0 {
        return Err(DiagnosticError::AbsorbedTooEarly { steps, tail });
    }
    let p = trajectory.p_sequence();
    let mut x = 0u64;
    let mut max_gap: f64 = 0.0;
    let first_checked = steps - tail + 1;
    for (k, &color) in trajectory.colors().iter().enumerate() {
        let n = k as u64 + 1;
        if color == Color::Amber {
            x += 1;
        }
        if n >= first_checked {
            let gap = (x as f64 / n as f64 - p[n as usize]).abs();
            max_gap = max_gap.max(gap);
        }
    }
    Ok(max_gap)
}
