//! Binary matrices of optimized cut sets.
//!
//! Column `m` stands for offset `m - ν + 1`. The first `ν` columns hold `⊕`
//! when an S entry lands at `m + 1`, the last `|μ|` hold `⊕` when the offset is
//! not in T. Only T and T* are read, so any valid cut set has a matrix; for an
//! optimized one the matrix determines it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cutset::{CutRow, MultiCut};
use crate::util::lcm;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinaryRep {
    pub mu: i64,
    pub nu: i64,
    /// `true` is `⊕`.
    pub rows: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BinaryError {
    #[error("row {row} has {len} columns, expected {expected}")]
    Width {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("row {0}: pluses on the left and minuses on the right do not balance")]
    Unbalanced(usize),
    #[error("bad character {0:?}")]
    Char(char),
    #[error("bounds must satisfy mu < 0 < nu")]
    Bounds,
}

pub fn binary_row(row: &CutRow, mu: i64, nu: i64) -> Vec<bool> {
    let t = row.t_set();
    let ts = row.t_star();
    let m = mu.abs() + nu;
    (0..m)
        .map(|c| {
            if c < nu {
                ts.contains(&(c + 1))
            } else {
                !t.contains(&(c - nu + 1))
            }
        })
        .collect()
}

pub fn binary_rep(mc: &MultiCut) -> BinaryRep {
    BinaryRep {
        mu: mc.mu,
        nu: mc.nu,
        rows: mc
            .rows
            .iter()
            .map(|r| binary_row(r, mc.mu, mc.nu))
            .collect(),
    }
}

/// The optimized cut set with the given matrix.
pub fn from_binary(b: &BinaryRep) -> Result<MultiCut, BinaryError> {
    b.check()?;
    let rows = b
        .rows
        .iter()
        .map(|row| {
            let mut e = BTreeMap::new();
            for (c, &plus) in row.iter().enumerate() {
                let c = c as i64;
                let offset = c - b.nu + 1;
                if c < b.nu && plus {
                    e.insert(offset, b.nu);
                } else if c >= b.nu && !plus {
                    e.insert(offset, b.mu);
                }
            }
            CutRow::from_entries(e)
        })
        .collect();
    Ok(MultiCut::new(b.mu, b.nu, rows))
}

/// Minimal `L ≥ 1` with `v[i] == v[(i + L) % n]` for all `i`.
fn rotation_period(v: &[bool]) -> usize {
    let n = v.len();
    (1..=n)
        .find(|&l| n.is_multiple_of(l) && (0..n).all(|i| v[i] == v[(i + l) % n]))
        .unwrap_or(n.max(1))
}

/// Orbits of the columns under moving every entry one row down.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleDecomposition {
    /// The row shift maps the column multiset to itself.
    pub closed: bool,
    /// Cycle length of each column, zero when not closed.
    pub column_lengths: Vec<usize>,
    /// One entry per cycle, sorted.
    pub cycles: Vec<usize>,
    /// lcm of the cycle lengths.
    pub order: u64,
    /// The order equals the number of rows.
    pub matches_rows: bool,
}

impl BinaryRep {
    pub fn big_m(&self) -> usize {
        (self.mu.abs() + self.nu) as usize
    }

    pub fn width(&self) -> usize {
        self.big_m()
    }

    pub fn check(&self) -> Result<(), BinaryError> {
        if self.mu >= 0 || self.nu <= 0 {
            return Err(BinaryError::Bounds);
        }
        let w = self.width();
        let nu = self.nu as usize;
        for (row, r) in self.rows.iter().enumerate() {
            if r.len() != w {
                return Err(BinaryError::Width {
                    row,
                    len: r.len(),
                    expected: w,
                });
            }
            let left = r[..nu].iter().filter(|&&b| b).count();
            let right = r[nu..].iter().filter(|&&b| !b).count();
            if left != right {
                return Err(BinaryError::Unbalanced(row));
            }
        }
        Ok(())
    }

    /// Matrix of the optimized successor: every row rotated one to the left.
    pub fn rotated(&self) -> BinaryRep {
        self.rotated_by(1)
    }

    pub fn rotated_by(&self, k: usize) -> BinaryRep {
        let w = self.width();
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if w > 0 {
                    r.rotate_left(k % w);
                }
                r
            })
            .collect();
        BinaryRep { rows, ..*self }
    }

    /// Rows rotated right, undoing `k` optimized steps.
    pub fn unrotated_by(&self, k: usize) -> BinaryRep {
        let w = self.width().max(1);
        self.rotated_by(w - k % w)
    }

    pub fn column(&self, m: usize) -> Vec<bool> {
        self.rows.iter().map(|r| r[m]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<bool>> {
        (0..self.width()).map(|m| self.column(m)).collect()
    }

    pub fn swap_columns(&self, m1: usize, m2: usize) -> BinaryRep {
        let mut out = self.clone();
        for r in &mut out.rows {
            r.swap(m1, m2);
        }
        out
    }

    /// Rows in which columns `m1` and `m2` differ.
    pub fn differing_rows(&self, m1: usize, m2: usize) -> Vec<usize> {
        (0..self.rows.len())
            .filter(|&r| self.rows[r][m1] != self.rows[r][m2])
            .collect()
    }

    /// A column swap is reversible unless the two columns disagree in both
    /// directions (`⊕⊖` in one row and `⊖⊕` in another).
    pub fn swap_reversible(&self, m1: usize, m2: usize) -> bool {
        let pm = self.rows.iter().any(|r| r[m1] && !r[m2]);
        let mp = self.rows.iter().any(|r| !r[m1] && r[m2]);
        !(pm && mp)
    }

    /// Moves row `r - 1` to row `r`, which is the matrix of the cycled cut set
    /// read backwards.
    pub fn row_shifted(&self) -> BinaryRep {
        let mut rows = self.rows.clone();
        if !rows.is_empty() {
            rows.rotate_right(1);
        }
        BinaryRep { rows, ..*self }
    }

    /// Matrix of [`MultiCut::cycled`].
    pub fn cycled(&self) -> BinaryRep {
        let mut rows = self.rows.clone();
        if !rows.is_empty() {
            rows.rotate_left(1);
        }
        BinaryRep { rows, ..*self }
    }

    pub fn column_cycles(&self) -> CycleDecomposition {
        let cols = self.columns();
        let shift = |c: &Vec<bool>| -> Vec<bool> {
            let mut c = c.clone();
            if !c.is_empty() {
                c.rotate_right(1);
            }
            c
        };
        let mut before = cols.clone();
        let mut after: Vec<Vec<bool>> = cols.iter().map(shift).collect();
        before.sort();
        after.sort();
        if before != after {
            return CycleDecomposition {
                closed: false,
                column_lengths: vec![0; cols.len()],
                cycles: Vec::new(),
                order: 0,
                matches_rows: false,
            };
        }
        let column_lengths: Vec<usize> = cols.iter().map(|c| rotation_period(c)).collect();
        let mut cycles = Vec::new();
        let mut seen = vec![false; cols.len()];
        for i in 0..cols.len() {
            if seen[i] {
                continue;
            }
            // One cycle: follow the shift through unused columns.
            let mut c = cols[i].clone();
            for _ in 0..column_lengths[i] {
                let j = (0..cols.len())
                    .find(|&j| !seen[j] && cols[j] == c)
                    .expect("closed under the shift");
                seen[j] = true;
                c = shift(&c);
            }
            cycles.push(column_lengths[i]);
        }
        cycles.sort_unstable();
        let order = cycles.iter().fold(1u64, |a, &l| lcm(a, l as u64));
        CycleDecomposition {
            closed: true,
            matches_rows: order == self.rows.len() as u64,
            column_lengths,
            cycles,
            order,
        }
    }

    /// Parses `+`/`-` (or `⊕`/`⊖`) rows, one per line; blank lines are skipped.
    pub fn parse(mu: i64, nu: i64, text: &str) -> Result<BinaryRep, BinaryError> {
        let rows = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.chars()
                    .filter(|c| !c.is_whitespace() && *c != '|')
                    .map(|c| match c {
                        '+' | '⊕' => Ok(true),
                        '-' | '⊖' => Ok(false),
                        _ => Err(BinaryError::Char(c)),
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let b = BinaryRep { mu, nu, rows };
        b.check()?;
        Ok(b)
    }
}

impl fmt::Display for BinaryRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            let s: String = r.iter().map(|&b| if b { '+' } else { '-' }).collect();
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for BinaryRep {
    type Err = BinaryError;

    /// Balanced matrices with `ν` equal to the plus count of each row.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let first = s
            .lines()
            .map(str::trim)
            .find(|l| !l.is_empty())
            .unwrap_or("");
        let width = first
            .chars()
            .filter(|c| matches!(c, '+' | '-' | '⊕' | '⊖'))
            .count() as i64;
        let plus = first.chars().filter(|c| matches!(c, '+' | '⊕')).count() as i64;
        // Each row has exactly |μ| pluses.
        BinaryRep::parse(-plus, width - plus, s)
    }
}
