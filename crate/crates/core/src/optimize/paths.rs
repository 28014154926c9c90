//! Optimization paths and near-optimized paths between optimized cut sets.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutset::{CutPath, CutRow, EdgeError, MultiCut, RowChoice, StepCase};

/// The choice that keeps a row optimized: `ν` for adjoined S values,
/// landing at `1 + |μ|` (value `μ`) for adjoined T values, never a matching zero.
pub fn optimized_choice(row: &CutRow, mu: i64, nu: i64) -> RowChoice {
    match row.case() {
        StepCase::Both => RowChoice::None,
        StepCase::TStarOnly => RowChoice::Positive { value: nu },
        StepCase::TOnly => RowChoice::Negative { landing: 1 - mu },
        StepCase::Neither => RowChoice::Both {
            value: nu,
            landing: 1 - mu,
        },
    }
}

fn optimized_choices(mc: &MultiCut) -> Vec<RowChoice> {
    mc.rows
        .iter()
        .map(|r| optimized_choice(r, mc.mu, mc.nu))
        .collect()
}

/// One step that adjoins only `μ` and `ν`.
pub fn optimized_successor(mc: &MultiCut) -> Result<MultiCut, EdgeError> {
    mc.apply(&optimized_choices(mc))
}

/// `M` optimized steps; the last cut set is optimized and keeps the T and T*
/// sets of the first.
pub fn optimize_cutset(mc: &MultiCut) -> Result<CutPath, EdgeError> {
    let m = mc.big_m();
    let mut cuts = vec![mc.clone()];
    for _ in 0..m {
        let next = optimized_successor(cuts.last().expect("non-empty"))?;
        cuts.push(next);
    }
    Ok(CutPath::new(cuts))
}

/// Endpoint of [`optimize_cutset`].
pub fn optimized(mc: &MultiCut) -> Result<MultiCut, EdgeError> {
    Ok(optimize_cutset(mc)?.cuts.pop().expect("non-empty"))
}

/// Replays the edge `c0 → c1` from the optimized cut set of `c0`: the same
/// adjoined values land in the same places, so T and T* follow `c1`.
pub fn lift_successor(
    optimized: &MultiCut,
    c0: &MultiCut,
    c1: &MultiCut,
) -> Result<MultiCut, EdgeError> {
    let choices = c0.choices_to(c1)?;
    optimized.apply(&choices)
}

/// Non-optimized values to adjoin on the way between two optimized cut sets.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjoinPlan {
    /// Rows taking a matching zero in the first block.
    pub zero_rows: BTreeSet<usize>,
    /// `(k, rows)` with `0 < k < ν`, `k` strictly decreasing.
    pub positives: Vec<(i64, BTreeSet<usize>)>,
    /// `(k', rows)` adjoining `-k'` with `0 < k' < |μ|`, `k'` strictly increasing.
    pub negatives: Vec<(i64, BTreeSet<usize>)>,
}

impl AdjoinPlan {
    /// Number of blocks `N = N₀ + N₊ + N₋`.
    pub fn blocks(&self) -> usize {
        usize::from(!self.zero_rows.is_empty()) + self.positives.len() + self.negatives.len()
    }

    /// Reads the non-optimized values of an edge.
    pub fn from_edge(c0: &MultiCut, c1: &MultiCut) -> Result<Self, EdgeError> {
        let choices = c0.choices_to(c1)?;
        let (mu, nu) = (c0.mu, c0.nu);
        let mut plan = AdjoinPlan::default();
        let mut pos: BTreeMap<i64, BTreeSet<usize>> = BTreeMap::new();
        let mut neg: BTreeMap<i64, BTreeSet<usize>> = BTreeMap::new();
        for (r, c) in choices.iter().enumerate() {
            let (v, l) = match *c {
                RowChoice::MatchingZero => {
                    plan.zero_rows.insert(r);
                    continue;
                }
                RowChoice::Positive { value } => (Some(value), None),
                RowChoice::Negative { landing } => (None, Some(landing)),
                RowChoice::Both { value, landing } => (Some(value), Some(landing)),
                RowChoice::None => continue,
            };
            if let Some(v) = v.filter(|&v| v < nu) {
                pos.entry(v).or_default().insert(r);
            }
            if let Some(l) = l.filter(|&l| 1 - l > mu) {
                neg.entry(l - 1).or_default().insert(r);
            }
        }
        plan.positives = pos.into_iter().rev().collect();
        plan.negatives = neg.into_iter().collect();
        Ok(plan)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NearPathError {
    #[error("start is not optimized")]
    NotOptimized,
    #[error("plan values are out of order")]
    Order,
    #[error("value {0} is not strictly between the bounds")]
    OutOfRange(i64),
    #[error("row {0} does not exist")]
    NoSuchRow(usize),
    #[error("block adjoins no rows")]
    EmptyBlock,
    #[error("row {row} cannot take the planned value at step {step}")]
    CaseMismatch { step: usize, row: usize },
    #[error("value {value} was excluded in row {row} one round before step {step} but is not adjoined there")]
    Forced { step: usize, row: usize, value: i64 },
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: EdgeError,
    },
}

#[derive(Debug, Clone, Copy)]
enum Adjoin {
    Zero,
    Positive(i64),
    Negative(i64),
}

/// Path of `N·M + 1` steps from an optimized cut set that adjoins the plan's
/// values block by block (zeros, then positives, then negatives) and is
/// optimized everywhere else.
pub fn near_path(start: &MultiCut, plan: &AdjoinPlan) -> Result<CutPath, NearPathError> {
    if !start.is_optimized() {
        return Err(NearPathError::NotOptimized);
    }
    let (mu, nu) = (start.mu, start.nu);
    let rows = start.rows.len();
    if plan.positives.windows(2).any(|w| w[0].0 <= w[1].0)
        || plan.negatives.windows(2).any(|w| w[0].0 >= w[1].0)
    {
        return Err(NearPathError::Order);
    }
    for &(k, _) in &plan.positives {
        if k <= 0 || k >= nu {
            return Err(NearPathError::OutOfRange(k));
        }
    }
    for &(k, _) in &plan.negatives {
        if k <= 0 || -k <= mu {
            return Err(NearPathError::OutOfRange(-k));
        }
    }
    let mut blocks: Vec<(Adjoin, &BTreeSet<usize>)> = Vec::new();
    if !plan.zero_rows.is_empty() {
        blocks.push((Adjoin::Zero, &plan.zero_rows));
    }
    blocks.extend(
        plan.positives
            .iter()
            .map(|(k, r)| (Adjoin::Positive(*k), r)),
    );
    blocks.extend(
        plan.negatives
            .iter()
            .map(|(k, r)| (Adjoin::Negative(*k), r)),
    );
    for (_, set) in &blocks {
        if set.is_empty() {
            return Err(NearPathError::EmptyBlock);
        }
        if let Some(&r) = set.iter().find(|&&r| r >= rows) {
            return Err(NearPathError::NoSuchRow(r));
        }
    }
    let m = start.big_m() as usize;
    let total = blocks.len() * m + 1;
    let mut cuts = vec![start.clone()];
    for step in 1..=total {
        let cur = cuts.last().expect("non-empty");
        let mut choices = optimized_choices(cur);
        let block = (step - 1) % m == 0 && (step - 1) / m < blocks.len();
        if block {
            let (adjoin, set) = blocks[(step - 1) / m];
            for &r in set {
                let row = &cur.rows[r];
                choices[r] = match (adjoin, row.case()) {
                    (Adjoin::Zero, StepCase::Neither) => RowChoice::MatchingZero,
                    (Adjoin::Positive(k), StepCase::TStarOnly) => RowChoice::Positive { value: k },
                    (Adjoin::Positive(k), StepCase::Neither) => RowChoice::Both {
                        value: k,
                        landing: 1 - mu,
                    },
                    (Adjoin::Negative(k), StepCase::TOnly) => {
                        RowChoice::Negative { landing: 1 + k }
                    }
                    (Adjoin::Negative(k), StepCase::Neither) => RowChoice::Both {
                        value: nu,
                        landing: 1 + k,
                    },
                    _ => return Err(NearPathError::CaseMismatch { step, row: r }),
                };
            }
            let (value, index) = match adjoin {
                Adjoin::Zero => (0, step),
                Adjoin::Positive(k) => (k, step),
                Adjoin::Negative(k) => (-k, step + k as usize),
            };
            if index > m {
                let earlier = index - m;
                for r in (0..rows).filter(|r| !set.contains(r)) {
                    if excluded_at(&cuts, r, earlier).contains(&value) {
                        return Err(NearPathError::Forced {
                            step,
                            row: r,
                            value,
                        });
                    }
                }
            }
        }
        let next = cur
            .apply(&choices)
            .map_err(|source| NearPathError::Step { step, source })?;
        cuts.push(next);
    }
    Ok(CutPath::new(cuts))
}

/// Values excluded at absolute index `x ≥ 1` of row `r`, as far as the path
/// so far determines them.
fn excluded_at(cuts: &[MultiCut], r: usize, x: usize) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    if let Some(c) = cuts.get(x) {
        let row = &c.rows[r];
        out.extend(row.exclusions().positive.get(&0).into_iter().flatten());
        if row.zero_excluded_here() {
            out.insert(0);
        }
    }
    if let Some(c) = cuts.get(x - 1) {
        out.extend(
            c.rows[r]
                .exclusions()
                .negative
                .get(&1)
                .into_iter()
                .flatten(),
        );
    }
    out
}
