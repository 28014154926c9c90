//! Paths of cut sets and the two converters to and from certified sequences.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CutRow, EdgeError, MultiCut, MultiViolation, RowChoice};
use crate::detect::{cut_at, detect, DetectError, DetectMethod};
use crate::instance::{
    generate, verify_certificate, DiffSetSequence, InstanceError, PeriodCertificate,
    ProblemInstance, Seed,
};
use crate::util::lcm;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("empty path")]
    Empty,
    #[error("cut set {index} is invalid: {violation}")]
    Invalid {
        index: usize,
        violation: MultiViolation,
    },
    #[error("step {index} is not an edge: {source}")]
    NotAnEdge {
        index: usize,
        #[source]
        source: EdgeError,
    },
    #[error("last cut set is not the cycled first one")]
    NotClosed,
    #[error("cut set {index} already equals the cycled first one")]
    NotMinimal { index: usize },
    #[error("certificate does not verify")]
    Unverified,
    #[error("a resolved value {value} at index {index} is excluded there")]
    SelfExcluded { index: usize, value: i64 },
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Detect(#[from] DetectError),
}

/// Consecutive cut sets joined by direct-successor edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CutPath {
    pub cuts: Vec<MultiCut>,
}

impl CutPath {
    pub fn new(cuts: Vec<MultiCut>) -> Self {
        Self { cuts }
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.cuts.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.cuts.len() <= 1
    }

    /// Checks every vertex and edge, returning the choices per step.
    pub fn validate(&self) -> Result<Vec<Vec<RowChoice>>, PathError> {
        if self.cuts.is_empty() {
            return Err(PathError::Empty);
        }
        for (index, c) in self.cuts.iter().enumerate() {
            c.validate()
                .map_err(|violation| PathError::Invalid { index, violation })?;
        }
        self.cuts
            .windows(2)
            .enumerate()
            .map(|(index, w)| {
                w[0].choices_to(&w[1])
                    .map_err(|source| PathError::NotAnEdge { index, source })
            })
            .collect()
    }

    pub fn is_closed(&self) -> bool {
        match (self.cuts.first(), self.cuts.last()) {
            (Some(a), Some(b)) => self.cuts.len() > 1 && a.cycled() == *b,
            _ => false,
        }
    }

    /// Difference values resolved by each step: `values[r][j]` is the value
    /// that row `r` fixes at index `j + 1`.
    pub fn step_values(&self) -> Result<Vec<Vec<i64>>, PathError> {
        let choices = self.validate()?;
        let rows = self.cuts[0].rows.len();
        let mut out = vec![Vec::with_capacity(choices.len()); rows];
        for (j, step) in choices.iter().enumerate() {
            for (r, c) in step.iter().enumerate() {
                out[r].push(self.cuts[j].rows[r].resolved_value(c));
            }
        }
        Ok(out)
    }

    /// Row-by-index grid: S entries of the first cut set at indices `≤ 0`,
    /// resolved step values at `1..=J`, T entries of the last cut set beyond.
    /// Spans at least `1 - ν ..= J + |μ|`.
    pub fn matrix(&self) -> Result<PathMatrix, PathError> {
        let values = self.step_values()?;
        let first = &self.cuts[0];
        let last = self.cuts.last().expect("non-empty");
        let j = self.len() as i64;
        let lo = first
            .rows
            .iter()
            .flat_map(|r| r.s().map(|(o, _)| o))
            .fold(1 - first.nu, i64::min)
            .min(0);
        let hi = j + last
            .rows
            .iter()
            .flat_map(|r| r.t().map(|(o, _)| o))
            .fold(last.mu.abs(), i64::max);
        let cells = first
            .rows
            .iter()
            .zip(&last.rows)
            .zip(&values)
            .map(|((a, b), v)| {
                (lo..=hi)
                    .map(|i| {
                        if i <= 0 {
                            a.d(i).filter(|_| i <= 0)
                        } else if i <= j {
                            Some(v[(i - 1) as usize])
                        } else {
                            b.d(i - j)
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(PathMatrix {
            first_index: lo,
            steps: j,
            cells,
        })
    }
}

/// Printable grid of a path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathMatrix {
    pub first_index: i64,
    pub steps: i64,
    pub cells: Vec<Vec<Option<i64>>>,
}

impl std::fmt::Display for PathMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for row in &self.cells {
            let mut cells = Vec::with_capacity(row.len() + 2);
            for (k, c) in row.iter().enumerate() {
                let i = self.first_index + k as i64;
                if i == 1 || i == self.steps + 1 {
                    cells.push("|".to_string());
                }
                cells.push(match c {
                    Some(d) if *d > 0 => format!("{:>3}", format!("+{d}")),
                    Some(d) => format!("{d:>3}"),
                    None => "  ·".to_string(),
                });
            }
            writeln!(f, "{}", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Rows needed to close a path for a sequence of period `period` over
/// obstructions of period `p`.
pub fn path_rows(p: usize, period: usize) -> usize {
    (lcm(p as u64, period as u64) / p as u64) as usize
}

/// The closed path `C_0, …, C_p` read off a certified sequence.
///
/// Row `r` of `C_j` is the cut after `x' + j + r·p` where `x'` is a multiple
/// of `R·p` past the preperiod and the settling window.
pub fn path_from_sequence(
    instance: &ProblemInstance,
    cert: &PeriodCertificate,
) -> Result<CutPath, PathError> {
    if !verify_certificate(instance, cert)?.valid {
        return Err(PathError::Unverified);
    }
    let p = instance.p();
    let rows = path_rows(p, cert.period);
    let b = instance.bounds();
    let (mu, nu) = if b.is_degenerate() {
        (-1, 1)
    } else {
        (b.mu, b.nu)
    };
    let block = rows * p;
    let floor = cert.preperiod.max(instance.settled_start()) + b.big_m.max(0) as usize + 1;
    let x0 = floor.div_ceil(block) * block;
    let values = generate(instance, x0 + block + p + b.big_m.max(0) as usize + 2)?;
    let mut cuts = Vec::with_capacity(p + 1);
    for j in 0..=p {
        let rows = (0..rows)
            .map(|r| cut_at(&values, x0 + j + r * p).map(|c| CutRow::from_cut(&c)))
            .collect::<Result<Vec<_>, _>>()?;
        cuts.push(MultiCut::new(mu, nu, rows));
    }
    let path = CutPath::new(cuts);
    path.validate()?;
    Ok(path)
}

/// Result of turning a closed path back into a sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceFromPath {
    pub instance: ProblemInstance,
    pub certificate: PeriodCertificate,
    /// `d` over one full block of `R·p` indices, starting at the path origin.
    pub block: Vec<i64>,
}

/// Builds an instance realizing a closed path.
///
/// The block of difference values is read off the path; the obstruction sets
/// are the exclusions of all cuts in a residue class; the seed consists of the
/// values the periodic part never takes, in increasing order.
pub fn sequence_from_path(path: &CutPath) -> Result<SequenceFromPath, PathError> {
    path.validate()?;
    if !path.is_closed() {
        return Err(PathError::NotClosed);
    }
    let target = path.cuts[0].cycled();
    let p = path.len();
    if let Some(index) = (1..p).find(|&j| path.cuts[j] == target) {
        return Err(PathError::NotMinimal { index });
    }
    let rows = path.cuts[0].rows.len();
    let block_len = rows * p;
    // Cut after c for c in one block.
    let cut = |c: usize| -> &CutRow {
        let c = c % block_len;
        &path.cuts[c % p].rows[c / p]
    };
    let d_at = |x: usize| -> i64 {
        let here = cut(x);
        if let Some(d) = here.d(0) {
            d
        } else {
            cut(x + block_len - 1).d(1).unwrap_or(0)
        }
    };
    let block: Vec<i64> = (0..block_len).map(d_at).collect();
    let min_d = block.iter().copied().min().unwrap_or(0);
    let max_d = block.iter().copied().max().unwrap_or(0);
    let pre = (min_d.unsigned_abs() as i64).max(max_d).max(0) as usize;

    let mut diff_sets = vec![BTreeSet::new(); p];
    for x in 0..block_len {
        let mut ex = cut(x).exclusions().positive.remove(&0).unwrap_or_default();
        if let Some(neg) = cut(x + block_len - 1).exclusions().negative.get(&1) {
            ex.extend(neg);
        }
        if cut(x).zero_excluded_here() {
            ex.insert(0);
        }
        diff_sets[x % p].extend(ex);
    }
    for x in 0..block_len {
        if diff_sets[x % p].contains(&block[x]) {
            return Err(PathError::SelfExcluded {
                index: x,
                value: block[x],
            });
        }
    }

    // Values taken from `pre` on, over enough blocks to cover everything below
    // the largest missing value.
    let horizon = pre + block_len + (max_d - min_d).max(0) as usize + 1;
    let taken: BTreeSet<i64> = (pre..pre + 2 * horizon)
        .map(|x| x as i64 + block[x % block_len])
        .collect();
    let seed: Vec<i64> = (0..(pre + horizon) as i64)
        .filter(|v| !taken.contains(v))
        .collect();
    debug_assert_eq!(seed.len(), pre);

    let instance = ProblemInstance {
        ys: DiffSetSequence {
            p,
            diff_sets,
            periodic_start: 0,
        },
        seed: Seed(seed),
    };
    let certificate = detect(&instance, DetectMethod::Cuts, None)?;
    Ok(SequenceFromPath {
        instance,
        certificate,
        block,
    })
}
