//! Instances whose period reaches the period constant.
//!
//! The columns of an optimized matrix are arranged in cycles under the row
//! shift: one constant pivot column plus one cycle per part of a partition of
//! `M - 1` with the largest lcm. A closed path then needs a column permutation
//! between the first and the cycled matrix; it is built from swaps with the
//! pivot, each realized by one block of non-optimized values.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::binary::{binary_rep, from_binary, BinaryRep};
use super::bounds::{k_effective, k_paper};
use super::paths::{near_path, optimized_successor, AdjoinPlan};
use crate::cutset::{sequence_from_path, CutPath, MultiCut, PathError};
use crate::instance::{simple_instance, InstanceError, PeriodCertificate, ProblemInstance};
use crate::util::lcm;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("bounds must satisfy mu < 0 < nu")]
    Degenerate,
    #[error("no balanced column layout for the partition {0:?}")]
    Layout(Vec<u64>),
    #[error("no closed path found with at most {0} steps")]
    NotFound(usize),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionMethod {
    /// `ν` repeated `|μ|` times then `μ` repeated `ν` times, period `M`.
    Simple,
    ColumnCycles,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Construction {
    pub mu: i64,
    pub nu: i64,
    pub k_paper: u64,
    pub k_effective: u64,
    pub method: ConstructionMethod,
    /// Cycle lengths of the non-pivot columns.
    pub partition: Vec<u64>,
    /// Rows of the first matrix, empty for the simple method.
    pub matrix: Vec<String>,
    /// Number of pivot swaps in the path.
    pub swaps: usize,
    pub instance: ProblemInstance,
    pub certificate: PeriodCertificate,
    /// `period / p`.
    pub period_factor: u64,
    #[serde(skip)]
    pub path: Option<CutPath>,
}

/// Largest steps-per-swap budget tried before giving up.
const MAX_PATH_FACTOR: usize = 4;

pub fn construct_extremal(mu: i64, nu: i64) -> Result<Construction, ConstructError> {
    if mu >= 0 || nu <= 0 {
        return Err(ConstructError::Degenerate);
    }
    let (kp, ke) = (k_paper(mu, nu), k_effective(mu, nu));
    let m = (mu.abs() + nu) as u64;
    if ke == m {
        let (instance, certificate) = simple_instance(mu, nu)?;
        let factor = (certificate.period / instance.p()) as u64;
        return Ok(Construction {
            mu,
            nu,
            k_paper: kp,
            k_effective: ke,
            method: ConstructionMethod::Simple,
            partition: vec![m],
            matrix: Vec::new(),
            swaps: 0,
            instance,
            certificate,
            period_factor: factor,
            path: None,
        });
    }
    let parts = best_partition(m - 1, mu.unsigned_abs().min(nu as u64));
    let b0 = cycle_matrix(mu, nu, &parts).ok_or_else(|| ConstructError::Layout(parts.clone()))?;
    let (path, swaps) = closed_path(&b0)?;
    let realized = sequence_from_path(&path)?;
    let factor = (realized.certificate.period / realized.instance.p()) as u64;
    Ok(Construction {
        mu,
        nu,
        k_paper: kp,
        k_effective: ke,
        method: ConstructionMethod::ColumnCycles,
        partition: parts,
        matrix: b0.to_string().lines().map(String::from).collect(),
        swaps,
        instance: realized.instance,
        certificate: realized.certificate,
        period_factor: factor,
        path: Some(path),
    })
}

/// A partition of `n` into at most `parts` parts with the largest lcm,
/// non-increasing.
pub fn best_partition(n: u64, parts: u64) -> Vec<u64> {
    fn go(rest: u64, max: u64, parts: u64, cur: &mut Vec<u64>, best: &mut (u64, Vec<u64>)) {
        if rest == 0 {
            let l = cur.iter().fold(1, |a, &b| lcm(a, b));
            if l > best.0 {
                *best = (l, cur.clone());
            }
            return;
        }
        if parts == 0 || rest > parts * max {
            return;
        }
        for part in (1..=max.min(rest)).rev() {
            cur.push(part);
            go(rest - part, part, parts - 1, cur, best);
            cur.pop();
        }
    }
    let mut best = (0, Vec::new());
    go(n, n, parts, &mut Vec::new(), &mut best);
    best.1
}

/// Matrix with a constant pivot column first, then one column cycle per part
/// with pattern `⊕^a ⊖^(q-a)`, and `lcm` rows.
pub fn cycle_matrix(mu: i64, nu: i64, parts: &[u64]) -> Option<BinaryRep> {
    let target = mu.unsigned_abs();
    let lo = |q: u64| u64::from(q > 1);
    let hi = |q: u64| if q > 1 { q - 1 } else { 1 };
    let (min, max): (u64, u64) = parts
        .iter()
        .fold((0, 0), |(a, b), &q| (a + lo(q), b + hi(q)));
    let pivot = [true, false]
        .into_iter()
        .find(|&c| (min..=max).contains(&(target - u64::from(c))))?;
    let mut extra = target - u64::from(pivot) - min;
    let pluses: Vec<u64> = parts
        .iter()
        .map(|&q| {
            let add = extra.min(hi(q) - lo(q));
            extra -= add;
            lo(q) + add
        })
        .collect();
    let rows = parts.iter().fold(1, |a, &q| lcm(a, q)) as usize;
    let rows = (0..rows)
        .map(|r| {
            let mut row = vec![pivot];
            for (&q, &a) in parts.iter().zip(&pluses) {
                let q = q as usize;
                for k in 0..q {
                    row.push(((r + q - k % q) % q) < a as usize);
                }
            }
            row
        })
        .collect();
    let b = BinaryRep { mu, nu, rows };
    b.check().ok()?;
    Some(b)
}

/// Swaps with the column holding `pivot` content that turn `from` into `to`.
fn pivot_swaps(from: &[Vec<bool>], to: &[Vec<bool>], pivot: &[bool]) -> Vec<(usize, usize)> {
    let mut cur = from.to_vec();
    let mut out = Vec::new();
    loop {
        let at = (0..cur.len())
            .filter(|&i| cur[i] == pivot)
            .find(|&i| cur[i] != to[i])
            .or_else(|| (0..cur.len()).find(|&i| cur[i] == pivot));
        let Some(at) = at else { return out };
        let next = if cur[at] != to[at] {
            (0..cur.len()).find(|&j| cur[j] == to[at] && cur[j] != to[j])
        } else {
            (0..cur.len()).find(|&j| cur[j] != to[j])
        };
        let Some(j) = next else { return out };
        cur.swap(at, j);
        out.push((at, j));
        if out.len() > 4 * cur.len() {
            return out;
        }
    }
}

fn frame(mc: &MultiCut, step: usize) -> BinaryRep {
    binary_rep(mc).unrotated_by(step)
}

/// One swap of frame columns `a` and `b`, starting at `step` from `start`.
fn realize_swap(start: &MultiCut, step: usize, a: usize, b: usize) -> Option<Vec<MultiCut>> {
    let m = start.big_m() as usize;
    let want = frame(start, step).swap_columns(a, b);
    let (mu, nu) = (start.mu, start.nu);
    let mut lead = vec![start.clone()];
    for t in 0..m {
        let x = lead.last().expect("non-empty").clone();
        let rows: BTreeSet<usize> = want.differing_rows(a, b).into_iter().collect();
        let mut plans = Vec::new();
        plans.push(AdjoinPlan {
            zero_rows: rows.clone(),
            ..Default::default()
        });
        for k in 1..nu {
            plans.push(AdjoinPlan {
                positives: vec![(k, rows.clone())],
                ..Default::default()
            });
        }
        for k in 1..mu.abs() {
            plans.push(AdjoinPlan {
                negatives: vec![(k, rows.clone())],
                ..Default::default()
            });
        }
        for plan in plans {
            if let Ok(p) = near_path(&x, &plan) {
                let end = p.cuts.last().expect("non-empty");
                if frame(end, step + t + p.len()) == want {
                    let mut out = lead.clone();
                    out.extend(p.cuts.into_iter().skip(1));
                    return Some(out);
                }
            }
        }
        lead.push(optimized_successor(&x).ok()?);
    }
    None
}

fn closed_path(b0: &BinaryRep) -> Result<(CutPath, usize), ConstructError> {
    let start = from_binary(b0).map_err(|_| ConstructError::Layout(Vec::new()))?;
    let goal = start.cycled();
    let goal_b = binary_rep(&goal);
    let m = b0.big_m();
    let pivot = b0.column(0);
    let limit = MAX_PATH_FACTOR * m * m + m;
    for total in 1..=limit {
        let target = goal_b.unrotated_by(total);
        let swaps = pivot_swaps(&b0.columns(), &target.columns(), &pivot);
        if swaps.len() * 2 * m > total {
            continue;
        }
        let Some(cuts) = build(&start, &swaps, total) else {
            continue;
        };
        // The first return to the cycled start closes a minimal path.
        let Some(end) = (1..cuts.len()).find(|&j| cuts[j] == goal) else {
            continue;
        };
        let mut cuts = cuts;
        cuts.truncate(end + 1);
        let path = CutPath::new(cuts);
        if path.validate().is_err() {
            continue;
        }
        return Ok((path, swaps.len()));
    }
    Err(ConstructError::NotFound(limit))
}

fn build(start: &MultiCut, swaps: &[(usize, usize)], total: usize) -> Option<Vec<MultiCut>> {
    let mut cuts = vec![start.clone()];
    for &(a, b) in swaps {
        let from = cuts.pop().expect("non-empty");
        let step = cuts.len();
        let part = realize_swap(&from, step, a, b)?;
        cuts.extend(part);
    }
    if cuts.len() > total + 1 {
        return None;
    }
    while cuts.len() < total + 1 {
        let next = optimized_successor(cuts.last().expect("non-empty")).ok()?;
        cuts.push(next);
    }
    Some(cuts)
}
