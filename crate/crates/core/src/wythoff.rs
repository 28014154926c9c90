//! Wythoff's game, one row at a time.
//!
//! Row `y` is a Nim sequence whose obstructions are the column and diagonal
//! predecessors from rows below it. Once those rows are certified the
//! obstructions are additively periodic, so each row becomes an ordinary
//! [`ProblemInstance`].

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::detect::{detect, DetectError, DetectMethod};
use crate::instance::{
    generate, mex, verify_certificate, DiffSetSequence, InstanceError, PeriodCertificate,
    ProblemInstance,
};
use crate::util::lcm;

#[derive(Debug, Error)]
pub enum WythoffError {
    #[error("row {row} needs certified rows 0..{row}, only {available} given")]
    MissingRow { row: usize, available: usize },
    #[error("row {row}: {source}")]
    Detect {
        row: usize,
        completed: Vec<WythoffRowResult>,
        #[source]
        source: DetectError,
    },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// How lower-row periods combine into the obstruction period.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeriodCombine {
    #[default]
    Lcm,
    Product,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WythoffRowResult {
    pub row_y: usize,
    pub certificate: PeriodCertificate,
    pub instance: ProblemInstance,
    /// `G_y(0..preperiod)`, for evaluation below the periodic part.
    pub prefix: Vec<i64>,
}

impl WythoffRowResult {
    /// `G_y(x)` through the certificate.
    pub fn value(&self, x: usize) -> i64 {
        let c = &self.certificate;
        if x >= c.preperiod {
            x as i64 + c.diff_period[(x - c.preperiod) % c.period]
        } else {
            self.prefix[x]
        }
    }
}

/// `G_y(x)` for `y < rows`, `x < cols` by direct recursion.
pub fn grundy_table(rows: usize, cols: usize) -> Vec<Vec<i64>> {
    let mut t: Vec<Vec<i64>> = Vec::with_capacity(rows);
    for y in 0..rows {
        let mut row: Vec<i64> = Vec::with_capacity(cols);
        for x in 0..cols {
            let mut opts: Vec<i64> = row.clone();
            opts.extend((0..y).map(|yy| t[yy][x]));
            opts.extend((1..=x.min(y)).map(|k| t[y - k][x - k]));
            row.push(mex(&opts));
        }
        t.push(row);
    }
    t
}

pub fn row_instance(y: usize, lower: &[WythoffRowResult]) -> Result<ProblemInstance, WythoffError> {
    row_instance_with(y, lower, PeriodCombine::Lcm)
}

pub fn row_instance_with(
    y: usize,
    lower: &[WythoffRowResult],
    combine: PeriodCombine,
) -> Result<ProblemInstance, WythoffError> {
    if lower.len() < y {
        return Err(WythoffError::MissingRow {
            row: y,
            available: lower.len(),
        });
    }
    let lower = &lower[..y];
    let p = lower.iter().fold(1u64, |acc, r| match combine {
        PeriodCombine::Lcm => lcm(acc, r.certificate.period as u64),
        PeriodCombine::Product => acc * r.certificate.period as u64,
    }) as usize;
    let start = lower
        .iter()
        .map(|r| r.certificate.preperiod)
        .max()
        .unwrap_or(0)
        + y;
    let mut diff_sets = vec![BTreeSet::new(); p];
    for x in start..start + p {
        let xi = x as i64;
        let set = &mut diff_sets[x % p];
        for r in lower {
            set.insert(r.value(x) - xi);
        }
        for k in 1..=y {
            set.insert(lower[y - k].value(x - k) - xi);
        }
    }
    let seed = if start == 0 {
        Vec::new()
    } else {
        grundy_table(y + 1, start).pop().unwrap_or_default()
    };
    Ok(ProblemInstance {
        ys: DiffSetSequence {
            p,
            diff_sets,
            periodic_start: start,
        },
        seed: crate::instance::Seed(seed),
    })
}

/// Certifies rows `0..=max_row` in order.
pub fn analyze_rows(
    max_row: usize,
    budget: Option<usize>,
) -> Result<Vec<WythoffRowResult>, WythoffError> {
    let mut out: Vec<WythoffRowResult> = Vec::with_capacity(max_row + 1);
    for y in 0..=max_row {
        let instance = row_instance(y, &out)?;
        let certificate = match detect(&instance, DetectMethod::Cuts, budget) {
            Ok(c) => c,
            Err(source) => {
                return Err(WythoffError::Detect {
                    row: y,
                    completed: out,
                    source,
                })
            }
        };
        debug_assert!(verify_certificate(&instance, &certificate)?.valid);
        let prefix = generate(&instance, certificate.preperiod)?;
        out.push(WythoffRowResult {
            row_y: y,
            certificate,
            instance,
            prefix,
        });
    }
    Ok(out)
}

/// `y,preperiod,period,diff_period` lines with a header.
pub fn period_table_csv(rows: &[WythoffRowResult]) -> String {
    let mut s = String::from("y,preperiod,period,diff_period\n");
    for r in rows {
        let c = &r.certificate;
        s.push_str(&format!(
            "{},{},{},\"{}\"\n",
            r.row_y,
            c.preperiod,
            c.period,
            join(&c.diff_period, ";")
        ));
    }
    s
}

pub fn matrix_csv(table: &[Vec<i64>]) -> String {
    table.iter().map(|row| join(row, ",") + "\n").collect()
}

fn join(v: &[i64], sep: &str) -> String {
    v.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}
