//! Exact survival probabilities by backward dynamic programming.
//!
//! `q_n(t, alpha)` is the probability that the process performs more than `M`
//! extractions given `t` total and `alpha` amber balls after `n` steps. It
//! satisfies
//!
//! ```text
//! q_n(t,a) = (a/t) * sum_{x in R} r(x) q_{n+1}(t+A, a+A-x)
//!          + (1 - a/t) * sum_{y in S} s(y) q_{n+1}(t+B, a+y)
//! ```
//!
//! with `q_M = 1` on `0 <= alpha <= t` and any child outside `[0, total]`
//! contributing 0. The recursion is solved backwards with two rolling layers;
//! layer `n` holds `t` in `[t1 + n*B, t2 + n*A]`, which contains every child
//! of layer `n-1`.

use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::distributions::IntegerDistribution;
use crate::urn::UrnScheme;

/// Default cap on one DP layer (8-byte cells).
pub const DEFAULT_LAYER_BUDGET_BYTES: usize = 4 << 30;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SurvivalError {
    #[error("invalid t range [{0}, {1}]: need 1 <= t1 <= t2")]
    InvalidRange(i64, i64),
    #[error("largest DP layer needs {needed} bytes, over the budget of {budget}")]
    LayerBudgetExceeded { needed: usize, budget: usize },
    #[error("p0 = {p0} with t0 = {t0} gives a non-integer amber count")]
    NonIntegerAlpha { t0: i64, p0: String },
    #[error("alpha0 = {alpha0} is outside [0, {t0}]")]
    AlphaOutOfRange { alpha0: i64, t0: i64 },
}

/// `q_0(t, alpha)` over a rectangle of initial compositions.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalGrid {
    horizon: u64,
    t_min: i64,
    t_max: i64,
    /// `rows[t - t_min][alpha]` for `alpha` in `0..=t`.
    rows: Vec<Vec<f64>>,
}

impl SurvivalGrid {
    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn t_range(&self) -> (i64, i64) {
        (self.t_min, self.t_max)
    }

    /// Survival probability for an initial composition, or `None` outside
    /// the solved rectangle.
    pub fn q0(&self, t: i64, alpha: i64) -> Option<f64> {
        if t < self.t_min || t > self.t_max || alpha < 0 || alpha > t {
            return None;
        }
        Some(self.rows[(t - self.t_min) as usize][alpha as usize])
    }

    /// All `(t, alpha, q0)` entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (i64, i64, f64)> + '_ {
        self.rows.iter().enumerate().flat_map(move |(i, row)| {
            let t = self.t_min + i as i64;
            row.iter()
                .enumerate()
                .map(move |(alpha, &q)| (t, alpha as i64, q))
        })
    }
}

/// Support values paired with f64 probabilities that sum to exactly 1.0, so
/// that convex combinations of all-ones layers stay exactly 1.0.
fn normalized_outcomes(law: &IntegerDistribution) -> Vec<(i64, f64)> {
    let mut out: Vec<(i64, f64)> = law
        .outcomes()
        .map(|(v, p)| (v, p.to_f64().expect("probability fits in f64")))
        .collect();
    let partial: f64 = out[..out.len() - 1].iter().map(|&(_, p)| p).sum();
    out.last_mut().expect("nonempty support").1 = 1.0 - partial;
    out
}

fn layer_cells(t_min: i64, t_max: i64) -> usize {
    // sum of (t + 1) for t in [t_min, t_max]
    let n = (t_max - t_min + 1) as i128;
    let s = (t_min + t_max + 2) as i128;
    (n * s / 2) as usize
}

/// Solves the backward recursion with the default memory budget.
pub fn solve(scheme: &UrnScheme, horizon: u64, t_range: (i64, i64)) -> Result<SurvivalGrid, SurvivalError> {
    solve_with_budget(scheme, horizon, t_range, DEFAULT_LAYER_BUDGET_BYTES)
}

/// Solves the backward recursion, failing early if the largest layer would
/// exceed `layer_budget_bytes`.
pub fn solve_with_budget(
    scheme: &UrnScheme,
    horizon: u64,
    t_range: (i64, i64),
    layer_budget_bytes: usize,
) -> Result<SurvivalGrid, SurvivalError> {
    let (t1, t2) = t_range;
    if t1 < 1 || t1 > t2 {
        return Err(SurvivalError::InvalidRange(t1, t2));
    }
    let a_total = scheme.amber_addition();
    let b_total = scheme.blue_addition();
    let m = horizon as i64;
    let top_cells = layer_cells(t1 + m * b_total, t2 + m * a_total);
    let needed = top_cells * std::mem::size_of::<f64>();
    if needed > layer_budget_bytes {
        return Err(SurvivalError::LayerBudgetExceeded {
            needed,
            budget: layer_budget_bytes,
        });
    }

    let amber_outcomes = normalized_outcomes(scheme.amber_law());
    let blue_outcomes = normalized_outcomes(scheme.blue_law());

    // Layer at n = horizon: all ones.
    let mut prev_t_min = t1 + m * b_total;
    let mut prev: Vec<Vec<f64>> = (prev_t_min..=t2 + m * a_total)
        .map(|t| vec![1.0; t as usize + 1])
        .collect();

    for n in (0..m).rev() {
        let t_min = t1 + n * b_total;
        let t_max = t2 + n * a_total;
        let next: Vec<Vec<f64>> = (t_min..=t_max)
            .into_par_iter()
            .map(|t| {
                compute_row(
                    t,
                    a_total,
                    b_total,
                    &amber_outcomes,
                    &blue_outcomes,
                    &prev,
                    prev_t_min,
                )
            })
            .collect();
        prev = next;
        prev_t_min = t_min;
    }

    // Keep only the requested rectangle.
    let rows = prev
        .into_iter()
        .take((t2 - t1 + 1) as usize)
        .collect::<Vec<_>>();
    Ok(SurvivalGrid {
        horizon,
        t_min: t1,
        t_max: t2,
        rows,
    })
}

/// One layer row: `q_n(t, alpha)` for `alpha` in `0..=t`, from layer `n+1`.
fn compute_row(
    t: i64,
    a_total: i64,
    b_total: i64,
    amber_outcomes: &[(i64, f64)],
    blue_outcomes: &[(i64, f64)],
    prev: &[Vec<f64>],
    prev_t_min: i64,
) -> Vec<f64> {
    let len = t as usize + 1;
    let mut amber_part = vec![0.0f64; len];
    let mut blue_part = vec![0.0f64; len];

    let amber_child = &prev[(t + a_total - prev_t_min) as usize];
    for &(a, prob) in amber_outcomes {
        // child alpha = alpha + a_total - a, valid while 0 <= child <= t + a_total
        let lo = (a - a_total).max(0);
        let hi = (t + a).min(t);
        if lo > hi {
            continue;
        }
        let src = &amber_child[(lo + a_total - a) as usize..=(hi + a_total - a) as usize];
        for (dst, &s) in amber_part[lo as usize..=hi as usize].iter_mut().zip(src) {
            *dst += prob * s;
        }
    }

    let blue_child = &prev[(t + b_total - prev_t_min) as usize];
    for &(b, prob) in blue_outcomes {
        // child alpha = alpha + b, valid while 0 <= child <= t + b_total
        let lo = (-b).max(0);
        let hi = (t + b_total - b).min(t);
        if lo > hi {
            continue;
        }
        let src = &blue_child[(lo + b) as usize..=(hi + b) as usize];
        for (dst, &s) in blue_part[lo as usize..=hi as usize].iter_mut().zip(src) {
            *dst += prob * s;
        }
    }

    let tf = t as f64;
    (0..len)
        .map(|alpha| {
            let p = alpha as f64 / tf;
            p * amber_part[alpha] + (1.0 - p) * blue_part[alpha]
        })
        .collect()
}

/// One cell of a formatted survival table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub t0: i64,
    pub alpha0: i64,
    /// Exact initial proportion as `(numerator, denominator)`.
    pub p0: (i64, i64),
    pub q0: f64,
}

/// Survival probabilities over the cross product of initial totals and
/// initial proportions, in row-major order (rows `t0`, columns `p0`).
pub fn survival_table(
    scheme: &UrnScheme,
    horizon: u64,
    t0_list: &[i64],
    p0_list: &[(i64, i64)],
) -> Result<Vec<TableCell>, SurvivalError> {
    let t_min = *t0_list.iter().min().ok_or(SurvivalError::InvalidRange(0, 0))?;
    let t_max = *t0_list.iter().max().unwrap();
    // Validate the whole grid before paying for the solve.
    let mut cells = Vec::with_capacity(t0_list.len() * p0_list.len());
    for &t0 in t0_list {
        for &(num, den) in p0_list {
            if den <= 0 || (t0 * num) % den != 0 {
                return Err(SurvivalError::NonIntegerAlpha {
                    t0,
                    p0: format!("{num}/{den}"),
                });
            }
            let alpha0 = t0 * num / den;
            if alpha0 < 0 || alpha0 > t0 {
                return Err(SurvivalError::AlphaOutOfRange { alpha0, t0 });
            }
            cells.push((t0, alpha0, (num, den)));
        }
    }
    let grid = solve(scheme, horizon, (t_min, t_max))?;
    Ok(cells
        .into_iter()
        .map(|(t0, alpha0, p0)| TableCell {
            t0,
            alpha0,
            p0,
            q0: grid.q0(t0, alpha0).expect("cell inside solved rectangle"),
        })
        .collect())
}

/// CSV rendering with header `t0,alpha0,p0,q0`.
pub fn table_to_csv(cells: &[TableCell]) -> String {
    let mut out = String::from("t0,alpha0,p0,q0\n");
    for cell in cells {
        out.push_str(&format!(
            "{},{},{}/{},{}\n",
            cell.t0, cell.alpha0, cell.p0.0, cell.p0.1, cell.q0
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::IntegerDistribution;

    fn figure1(alpha0: i64, beta0: i64) -> UrnScheme {
        UrnScheme::new(
            7,
            2,
            IntegerDistribution::new(vec![-5, -2, 4, 7], vec![1, 2, 2, 1]).unwrap(),
            IntegerDistribution::new(vec![-5, 0, 4], vec![2, 3, 1]).unwrap(),
            alpha0,
            beta0,
        )
        .unwrap()
    }

    fn safe_scheme() -> UrnScheme {
        UrnScheme::new(
            3,
            1,
            IntegerDistribution::new(vec![0, 1], vec![1, 1]).unwrap(),
            IntegerDistribution::new(vec![0, 1], vec![1, 1]).unwrap(),
            4,
            4,
        )
        .unwrap()
    }

    // Exhaustive expectation over every (color, replacement)^M path; kept
    // recursive and memoization-free so it stays independent of the layered
    // solver.
    pub(crate) fn enumerate_survival(scheme: &UrnScheme, total: i64, alpha: i64, steps: u64) -> f64 {
        if alpha < 0 || alpha > total {
            return 0.0;
        }
        if steps == 0 {
            return 1.0;
        }
        let p = alpha as f64 / total as f64;
        let mut acc = 0.0;
        for (a, prob) in scheme.amber_law().outcomes() {
            acc += p
                * prob.to_f64().unwrap()
                * enumerate_survival(
                    scheme,
                    total + scheme.amber_addition(),
                    alpha + scheme.amber_addition() - a,
                    steps - 1,
                );
        }
        for (b, prob) in scheme.blue_law().outcomes() {
            acc += (1.0 - p)
                * prob.to_f64().unwrap()
                * enumerate_survival(scheme, total + scheme.blue_addition(), alpha + b, steps - 1);
        }
        acc
    }

    #[test]
    fn zero_horizon_is_all_ones() {
        let grid = solve(&figure1(3, 3), 0, (1, 10)).unwrap();
        for (_, _, q) in grid.entries() {
            assert_eq!(q, 1.0);
        }
    }

    #[test]
    fn safe_scheme_is_exactly_one_everywhere() {
        let grid = solve(&safe_scheme(), 60, (1, 20)).unwrap();
        for (t, alpha, q) in grid.entries() {
            assert_eq!(q, 1.0, "q0({t},{alpha})");
        }
    }

    #[test]
    fn one_step_value_matches_hand_enumeration() {
        // t=6, alpha=2: amber draw (prob 1/3) survives for a in {-2,4,7}
        // (a=-5 pushes the amber count to 14 > 13), weight 5/6; blue draw
        // (prob 2/3) survives for b in {0,4}, weight 4/6. q = 13/18.
        let grid = solve(&figure1(2, 4), 1, (6, 6)).unwrap();
        let q = grid.q0(6, 2).unwrap();
        assert!((q - 13.0 / 18.0).abs() < 1e-15, "q = {q}");
        let oracle = enumerate_survival(&figure1(2, 4), 6, 2, 1);
        assert!((q - oracle).abs() < 1e-15);
    }

    #[test]
    fn solver_matches_exhaustive_enumeration() {
        let fixtures: Vec<(UrnScheme, u64)> = vec![
            (figure1(2, 4), 6),
            (figure1(5, 5), 5),
            (safe_scheme(), 6),
            // Two-point supports keep the path tree small at M = 12.
            (
                UrnScheme::new(
                    3,
                    2,
                    IntegerDistribution::new(vec![-1, 4], vec![1, 1]).unwrap(),
                    IntegerDistribution::new(vec![-2, 1], vec![1, 2]).unwrap(),
                    6,
                    6,
                )
                .unwrap(),
                12,
            ),
        ];
        for (scheme, m) in fixtures {
            let t0 = scheme.t0();
            let grid = solve(&scheme, m, (t0, t0)).unwrap();
            for alpha in 0..=t0 {
                let dp = grid.q0(t0, alpha).unwrap();
                let oracle = enumerate_survival(&scheme, t0, alpha, m);
                assert!(
                    (dp - oracle).abs() <= 1e-12,
                    "M={m} t={t0} alpha={alpha}: dp={dp} oracle={oracle}"
                );
            }
        }
    }

    #[test]
    fn probabilities_stay_in_unit_interval() {
        let grid = solve(&figure1(3, 3), 40, (2, 30)).unwrap();
        for (t, alpha, q) in grid.entries() {
            assert!((0.0..=1.0).contains(&q), "q0({t},{alpha}) = {q}");
        }
    }

    #[test]
    fn survival_is_nonincreasing_in_horizon() {
        let scheme = figure1(3, 3);
        let mut last: Option<SurvivalGrid> = None;
        for m in [0u64, 5, 20, 60] {
            let grid = solve(&scheme, m, (2, 20)).unwrap();
            if let Some(prev) = &last {
                for ((t, alpha, q_new), (_, _, q_old)) in grid.entries().zip(prev.entries()) {
                    assert!(
                        q_new <= q_old + 1e-15,
                        "q increased with horizon at ({t},{alpha})"
                    );
                }
            }
            last = Some(grid);
        }
    }

    #[test]
    fn rejects_bad_ranges_and_budget() {
        let scheme = figure1(3, 3);
        assert_eq!(
            solve(&scheme, 1, (0, 5)),
            Err(SurvivalError::InvalidRange(0, 5))
        );
        assert_eq!(
            solve(&scheme, 1, (9, 5)),
            Err(SurvivalError::InvalidRange(9, 5))
        );
        assert!(matches!(
            solve_with_budget(&scheme, 800, (6, 48), 1024),
            Err(SurvivalError::LayerBudgetExceeded { .. })
        ));
    }

    #[test]
    fn table_extracts_grid_cells() {
        let scheme = figure1(3, 3);
        let cells = survival_table(&scheme, 5, &[6, 12], &[(1, 3), (1, 2)]).unwrap();
        assert_eq!(cells.len(), 4);
        let grid = solve(&scheme, 5, (6, 12)).unwrap();
        assert_eq!(cells[0].t0, 6);
        assert_eq!(cells[0].alpha0, 2);
        assert_eq!(cells[0].q0, grid.q0(6, 2).unwrap());
        assert_eq!(cells[3].t0, 12);
        assert_eq!(cells[3].alpha0, 6);
        let csv = table_to_csv(&cells);
        assert!(csv.starts_with("t0,alpha0,p0,q0\n"));
        assert!(csv.contains("6,2,1/3,"));
    }

    #[test]
    fn table_rejects_non_integer_alpha() {
        let scheme = figure1(3, 3);
        let err = survival_table(&scheme, 5, &[7], &[(1, 3)]).unwrap_err();
        assert!(matches!(err, SurvivalError::NonIntegerAlpha { t0: 7, .. }));
    }
}
