//! Cut sets detached from any concrete sequence.
//!
//! A [`CutRow`] is stored normalized to the cut after offset 0: keys `≤ 0`
//! form S, keys `≥ 1` form T, and the map value is the difference value at
//! that offset. Equivalence of cut sets is then plain structural equality.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::detect::Cut;

mod convert;

pub use convert::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum RowViolation {
    #[error("a) S offset {offset} does not land after the cut")]
    SideS { offset: i64 },
    #[error("b) T offset {offset} does not land before the cut")]
    SideT { offset: i64 },
    #[error("c) #S = {s} but #T = {t}")]
    Count { s: usize, t: usize },
    #[error("d) two entries land on {target}")]
    Collision { target: i64 },
    #[error("value {value} at offset {offset} is outside the bounds")]
    Bounds { offset: i64, value: i64 },
}

/// Exclusions witnessed by a single row, keyed by offset.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowExclusions {
    pub positive: BTreeMap<i64, BTreeSet<i64>>,
    pub negative: BTreeMap<i64, BTreeSet<i64>>,
    pub zero_after: bool,
    pub zero_before: bool,
}

impl RowExclusions {
    pub fn at(&self, offset: i64) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for m in [&self.positive, &self.negative] {
            if let Some(s) = m.get(&offset) {
                out.extend(s);
            }
        }
        out
    }

    pub fn excludes(&self, offset: i64, value: i64) -> bool {
        [&self.positive, &self.negative]
            .iter()
            .any(|m| m.get(&offset).is_some_and(|s| s.contains(&value)))
    }
}

/// Which successor rule applies, by membership of offset 1 in T and T*.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepCase {
    /// In both T and T*.
    Both,
    /// In T* only.
    TStarOnly,
    /// In T only.
    TOnly,
    /// In neither: a possible zero after the cut.
    Neither,
}

/// One row's part of a direct-successor step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RowChoice {
    None,
    Positive {
        value: i64,
    },
    Negative {
        landing: i64,
    },
    /// Adjoins on both sides; the value 0 is excluded at the new index.
    Both {
        value: i64,
        landing: i64,
    },
    MatchingZero,
}

impl RowChoice {
    pub fn excludes_zero(&self) -> bool {
        matches!(self, RowChoice::Both { .. })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CutRow {
    entries: BTreeMap<i64, i64>,
}

impl CutRow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(s: &[(i64, i64)], t: &[(i64, i64)]) -> Self {
        Self {
            entries: s.iter().chain(t).copied().collect(),
        }
    }

    pub fn from_entries(entries: BTreeMap<i64, i64>) -> Self {
        Self { entries }
    }

    pub fn from_cut(cut: &Cut) -> Self {
        Self::from_pairs(&cut.s_entries, &cut.t_entries)
    }

    pub fn entries(&self) -> &BTreeMap<i64, i64> {
        &self.entries
    }

    pub fn d(&self, offset: i64) -> Option<i64> {
        self.entries.get(&offset).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn s(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.entries.range(..=0).map(|(&o, &d)| (o, d))
    }

    pub fn t(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        self.entries.range(1..).map(|(&o, &d)| (o, d))
    }

    pub fn s_set(&self) -> BTreeSet<i64> {
        self.s().map(|(o, _)| o).collect()
    }

    pub fn t_set(&self) -> BTreeSet<i64> {
        self.t().map(|(o, _)| o).collect()
    }

    /// Landing offsets of S.
    pub fn t_star(&self) -> BTreeSet<i64> {
        self.s().map(|(o, d)| o + d).collect()
    }

    /// Landing offsets of T.
    pub fn s_star(&self) -> BTreeSet<i64> {
        self.t().map(|(o, d)| o + d).collect()
    }

    /// `(T, T*)`: rows of one cut set must differ here.
    pub fn key(&self) -> (BTreeSet<i64>, BTreeSet<i64>) {
        (self.t_set(), self.t_star())
    }

    /// The same row seen from the cut after `k`.
    pub fn shifted(&self, k: i64) -> CutRow {
        Self {
            entries: self.entries.iter().map(|(&o, &d)| (o - k, d)).collect(),
        }
    }

    pub fn is_optimized(&self, mu: i64, nu: i64) -> bool {
        self.entries.values().all(|&d| d == mu || d == nu)
    }

    pub fn validate(&self, mu: i64, nu: i64) -> Result<(), RowViolation> {
        let mut targets = BTreeSet::new();
        let (mut s, mut t) = (0, 0);
        for (&o, &d) in &self.entries {
            if d < mu || d > nu {
                return Err(RowViolation::Bounds {
                    offset: o,
                    value: d,
                });
            }
            if o <= 0 {
                s += 1;
                if o + d < 1 {
                    return Err(RowViolation::SideS { offset: o });
                }
            } else {
                t += 1;
                if o + d > 0 {
                    return Err(RowViolation::SideT { offset: o });
                }
            }
            if !targets.insert(o + d) {
                return Err(RowViolation::Collision { target: o + d });
            }
        }
        if s != t {
            return Err(RowViolation::Count { s, t });
        }
        Ok(())
    }

    pub fn exclusions(&self) -> RowExclusions {
        let mut ex = RowExclusions::default();
        let t_star = self.t_star();
        let s: Vec<(i64, i64)> = self.s().collect();
        for (i, &(a, da)) in s.iter().enumerate() {
            let ta = a + da;
            let set = ex.positive.entry(a).or_default();
            for &(b, db) in &s[i + 1..] {
                if b + db < ta {
                    set.insert(b + db - a);
                }
            }
            for y in 1..ta {
                if !t_star.contains(&y) {
                    set.insert(y - a);
                }
            }
        }
        for (b, db) in self.t() {
            let tb = b + db;
            for y in 1..b {
                let excluded = match self.d(y) {
                    None => true,
                    Some(dy) => y + dy > tb,
                };
                if excluded {
                    ex.negative.entry(y).or_default().insert(tb - y);
                }
            }
        }
        ex.positive.retain(|_, v| !v.is_empty());
        ex.zero_after = !self.entries.contains_key(&1) && !t_star.contains(&1);
        ex.zero_before = !self.entries.contains_key(&0) && !self.s_star().contains(&0);
        ex
    }

    /// Whether 0 is excluded at offset 0, i.e. the step into this cut adjoined both sides.
    pub fn zero_excluded_here(&self) -> bool {
        self.entries.contains_key(&0) && self.s_star().contains(&0)
    }

    pub fn case(&self) -> StepCase {
        let in_t = self.entries.contains_key(&1);
        let in_t_star = self.s().any(|(o, d)| o + d == 1);
        match (in_t, in_t_star) {
            (true, true) => StepCase::Both,
            (false, true) => StepCase::TStarOnly,
            (true, false) => StepCase::TOnly,
            (false, false) => StepCase::Neither,
        }
    }

    /// The difference value resolved at offset 1 by `choice`.
    pub fn resolved_value(&self, choice: &RowChoice) -> i64 {
        match *choice {
            RowChoice::Positive { value } | RowChoice::Both { value, .. } => value,
            RowChoice::MatchingZero => 0,
            RowChoice::None | RowChoice::Negative { .. } => self.d(1).unwrap_or(0),
        }
    }

    fn step_base(&self) -> BTreeMap<i64, i64> {
        self.entries
            .iter()
            .filter(|&(&o, &d)| o != 1 && !(o <= 0 && o + d == 1))
            .map(|(&o, &d)| (o, d))
            .collect()
    }

    fn positive_ok(&self, value: i64, nu: i64) -> bool {
        value >= 1 && value <= nu && !self.t_star().contains(&(1 + value))
    }

    fn landing_ok(&self, landing: i64, mu: i64) -> bool {
        landing >= 2 && 1 - landing >= mu && !self.entries.contains_key(&landing)
    }

    /// Applies one successor rule; `None` if the choice is illegal here.
    pub fn apply(&self, choice: &RowChoice, mu: i64, nu: i64) -> Option<CutRow> {
        let mut next = self.step_base();
        match (self.case(), *choice) {
            (StepCase::Both, RowChoice::None) => {}
            (StepCase::TStarOnly, RowChoice::Positive { value }) if self.positive_ok(value, nu) => {
                next.insert(1, value);
            }
            (StepCase::TOnly, RowChoice::Negative { landing }) if self.landing_ok(landing, mu) => {
                next.insert(landing, 1 - landing);
            }
            (StepCase::Neither, RowChoice::Both { value, landing })
                if self.positive_ok(value, nu) && self.landing_ok(landing, mu) =>
            {
                next.insert(1, value);
                next.insert(landing, 1 - landing);
            }
            (StepCase::Neither, RowChoice::MatchingZero) => {}
            _ => return None,
        }
        Some(CutRow { entries: next }.shifted(1))
    }

    /// Every legal choice for the next step.
    pub fn choices(&self, mu: i64, nu: i64) -> Vec<RowChoice> {
        let values = || (1..=nu).filter(|&v| self.positive_ok(v, nu));
        let landings = || (2..=1 - mu).filter(|&l| self.landing_ok(l, mu));
        match self.case() {
            StepCase::Both => vec![RowChoice::None],
            StepCase::TStarOnly => values()
                .map(|value| RowChoice::Positive { value })
                .collect(),
            StepCase::TOnly => landings()
                .map(|landing| RowChoice::Negative { landing })
                .collect(),
            StepCase::Neither => {
                let mut out: Vec<RowChoice> = values()
                    .flat_map(|value| {
                        landings().map(move |landing| RowChoice::Both { value, landing })
                    })
                    .collect();
                out.push(RowChoice::MatchingZero);
                out
            }
        }
    }

    pub fn successors(&self, mu: i64, nu: i64) -> Vec<(RowChoice, CutRow)> {
        self.choices(mu, nu)
            .into_iter()
            .filter_map(|c| self.apply(&c, mu, nu).map(|r| (c, r)))
            .collect()
    }

    /// Recovers the choice that turns `self` into `next`, if any.
    pub fn choice_to(&self, next: &CutRow, mu: i64, nu: i64) -> Option<RowChoice> {
        let back = next.shifted(-1);
        let base = self.step_base();
        if base.iter().any(|(o, d)| back.entries.get(o) != Some(d)) {
            return None;
        }
        let mut positive = None;
        let mut landing = None;
        for (&o, &d) in &back.entries {
            if base.contains_key(&o) {
                continue;
            }
            if o == 1 && d > 0 && positive.is_none() {
                positive = Some(d);
            } else if o >= 2 && o + d == 1 && landing.is_none() {
                landing = Some(o);
            } else {
                return None;
            }
        }
        let choice = match (self.case(), positive, landing) {
            (StepCase::Both, None, None) => RowChoice::None,
            (StepCase::TStarOnly, Some(value), None) => RowChoice::Positive { value },
            (StepCase::TOnly, None, Some(landing)) => RowChoice::Negative { landing },
            (StepCase::Neither, Some(value), Some(landing)) => RowChoice::Both { value, landing },
            (StepCase::Neither, None, None) => RowChoice::MatchingZero,
            _ => return None,
        };
        (self.apply(&choice, mu, nu).as_ref() == Some(next)).then_some(choice)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum MultiViolation {
    #[error("row {row}: {violation}")]
    Row { row: usize, violation: RowViolation },
    #[error("a) rows {first} and {second} share T and T*")]
    Equivalent { first: usize, second: usize },
    #[error("b) value {value} at offset {offset} of row {row} is excluded by row {by}")]
    Excluded {
        row: usize,
        by: usize,
        offset: i64,
        value: i64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum EdgeError {
    #[error("row counts differ")]
    RowCount,
    #[error("row {row} has no matching successor rule")]
    NoRule { row: usize },
    #[error("a zero is excluded in one row and matched in another")]
    ZeroConflict,
    #[error("successor is not a valid cut set: {0}")]
    Invalid(MultiViolation),
}

/// A cut set with several rows, the vertex type of the cut-set digraph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiCut {
    pub mu: i64,
    pub nu: i64,
    pub rows: Vec<CutRow>,
}

impl MultiCut {
    pub fn new(mu: i64, nu: i64, rows: Vec<CutRow>) -> Self {
        Self { mu, nu, rows }
    }

    pub fn big_m(&self) -> i64 {
        self.mu.abs() + self.nu
    }

    pub fn is_optimized(&self) -> bool {
        self.rows.iter().all(|r| r.is_optimized(self.mu, self.nu))
    }

    pub fn validate(&self) -> Result<(), MultiViolation> {
        for (row, r) in self.rows.iter().enumerate() {
            r.validate(self.mu, self.nu)
                .map_err(|violation| MultiViolation::Row { row, violation })?;
        }
        let mut keys: BTreeMap<_, usize> = BTreeMap::new();
        for (i, r) in self.rows.iter().enumerate() {
            if let Some(&first) = keys.get(&r.key()) {
                return Err(MultiViolation::Equivalent { first, second: i });
            }
            keys.insert(r.key(), i);
        }
        for (by, r) in self.rows.iter().enumerate() {
            let ex = r.exclusions();
            for (row, other) in self.rows.iter().enumerate() {
                for (&offset, &value) in other.entries() {
                    if ex.excludes(offset, value) {
                        return Err(MultiViolation::Excluded {
                            row,
                            by,
                            offset,
                            value,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Row `r` of the result is row `r + 1` of the input.
    pub fn cycled(&self) -> MultiCut {
        let mut rows = self.rows.clone();
        if !rows.is_empty() {
            rows.rotate_left(1);
        }
        Self { rows, ..*self }
    }

    pub fn apply(&self, choices: &[RowChoice]) -> Result<MultiCut, EdgeError> {
        if choices.len() != self.rows.len() {
            return Err(EdgeError::RowCount);
        }
        if choices.iter().any(RowChoice::excludes_zero)
            && choices.contains(&RowChoice::MatchingZero)
        {
            return Err(EdgeError::ZeroConflict);
        }
        let rows = self
            .rows
            .iter()
            .zip(choices)
            .enumerate()
            .map(|(row, (r, c))| {
                r.apply(c, self.mu, self.nu)
                    .ok_or(EdgeError::NoRule { row })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let next = Self { rows, ..*self };
        next.validate().map_err(EdgeError::Invalid)?;
        Ok(next)
    }

    /// The per-row choices of the edge `self → next`.
    pub fn choices_to(&self, next: &MultiCut) -> Result<Vec<RowChoice>, EdgeError> {
        if next.rows.len() != self.rows.len() {
            return Err(EdgeError::RowCount);
        }
        let choices = self
            .rows
            .iter()
            .zip(&next.rows)
            .enumerate()
            .map(|(row, (a, b))| {
                a.choice_to(b, self.mu, self.nu)
                    .ok_or(EdgeError::NoRule { row })
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.apply(&choices)?;
        Ok(choices)
    }

    pub fn is_edge(&self, next: &MultiCut) -> bool {
        self.choices_to(next).is_ok()
    }

    /// All direct successors with their per-row choices.
    pub fn successors(&self) -> Vec<(Vec<RowChoice>, MultiCut)> {
        let per_row: Vec<Vec<RowChoice>> = self
            .rows
            .iter()
            .map(|r| r.choices(self.mu, self.nu))
            .collect();
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(self.rows.len());
        self.product(&per_row, &mut current, false, false, &mut out);
        out
    }

    fn product(
        &self,
        per_row: &[Vec<RowChoice>],
        current: &mut Vec<RowChoice>,
        excl: bool,
        matched: bool,
        out: &mut Vec<(Vec<RowChoice>, MultiCut)>,
    ) {
        let i = current.len();
        if i == per_row.len() {
            if let Ok(mc) = self.apply(current) {
                out.push((current.clone(), mc));
            }
            return;
        }
        for c in &per_row[i] {
            let e = excl || c.excludes_zero();
            let m = matched || *c == RowChoice::MatchingZero;
            if e && m {
                continue;
            }
            current.push(*c);
            self.product(per_row, current, e, m, out);
            current.pop();
        }
    }
}

#[derive(Serialize, Deserialize)]
struct RowJson {
    s: Vec<(i64, i64)>,
    t: Vec<(i64, i64)>,
}

impl Serialize for CutRow {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        RowJson {
            s: self.s().collect(),
            t: self.t().collect(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for CutRow {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = RowJson::deserialize(de)?;
        if let Some(&(o, _)) = j.s.iter().find(|(o, _)| *o > 0) {
            return Err(serde::de::Error::custom(format!(
                "S offset {o} is positive"
            )));
        }
        if let Some(&(o, _)) = j.t.iter().find(|(o, _)| *o < 1) {
            return Err(serde::de::Error::custom(format!("T offset {o} is below 1")));
        }
        Ok(CutRow::from_pairs(&j.s, &j.t))
    }
}

#[derive(Serialize, Deserialize)]
struct MultiJson {
    mu: i64,
    nu: i64,
    rows: Vec<CutRow>,
}

impl Serialize for MultiCut {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        MultiJson {
            mu: self.mu,
            nu: self.nu,
            rows: self.rows.clone(),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for MultiCut {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let j = MultiJson::deserialize(de)?;
        Ok(MultiCut::new(j.mu, j.nu, j.rows))
    }
}

impl fmt::Display for CutRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |v: Vec<(i64, i64)>| {
            v.iter()
                .map(|(o, d)| format!("{o}:{d:+}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(
            f,
            "S[{}] T[{}]",
            part(self.s().collect()),
            part(self.t().collect())
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The three-row example in G̃(3, -2, 3).
    pub(crate) fn example() -> MultiCut {
        MultiCut::new(
            -2,
            3,
            vec![
                CutRow::from_pairs(&[(-2, 3)], &[(1, -1)]),
                CutRow::from_pairs(&[(0, 2)], &[(1, -2)]),
                CutRow::new(),
            ],
        )
    }

    #[test]
    fn row_validation() {
        assert!(CutRow::new().validate(-1, 1).is_ok());
        let r = CutRow::from_pairs(&[(0, 3)], &[(1, -1)]);
        assert!(r.validate(-2, 3).is_ok());
        let r = CutRow::from_pairs(&[(0, 1)], &[(1, 0)]);
        assert_eq!(r.validate(-2, 3), Err(RowViolation::SideT { offset: 1 }));
        let r = CutRow::from_pairs(&[(0, 1)], &[]);
        assert_eq!(r.validate(-2, 3), Err(RowViolation::Count { s: 1, t: 0 }));
        let r = CutRow::from_pairs(&[(0, 2), (-1, 3)], &[(1, -1), (2, -2)]);
        assert_eq!(
            r.validate(-2, 3),
            Err(RowViolation::Collision { target: 2 })
        );
        let r = CutRow::from_pairs(&[(0, 4)], &[(1, -1)]);
        assert!(matches!(
            r.validate(-2, 3),
            Err(RowViolation::Bounds { .. })
        ));
    }

    #[test]
    fn exclusions_of_small_rows() {
        let e = CutRow::new().exclusions();
        assert!(e.positive.is_empty() && e.negative.is_empty());
        assert!(e.zero_after && e.zero_before);
        // Landing at 3 with T* = {3}: offsets 1 and 2 are taken after the cut.
        let e = CutRow::from_pairs(&[(0, 3)], &[(1, -1)]).exclusions();
        assert_eq!(e.positive[&0], BTreeSet::from([1, 2]));
        assert!(e.negative.is_empty());
        assert!(!e.zero_after && !e.zero_before);
    }

    #[test]
    fn empty_row_successors() {
        let s = CutRow::new().successors(-1, 1);
        assert_eq!(s.len(), 2);
        assert!(s.contains(&(RowChoice::MatchingZero, CutRow::new())));
        assert!(s.contains(&(
            RowChoice::Both {
                value: 1,
                landing: 2
            },
            CutRow::from_pairs(&[(0, 1)], &[(1, -1)])
        )));
    }

    #[test]
    fn rule_one_is_forced() {
        let r = CutRow::from_pairs(&[(0, 1)], &[(1, -1)]);
        assert_eq!(r.case(), StepCase::Both);
        let s = r.successors(-1, 1);
        assert_eq!(s, vec![(RowChoice::None, CutRow::new())]);
    }

    #[test]
    fn example_edge() {
        let a = example();
        assert!(a.validate().is_ok());
        let b = MultiCut::new(
            -2,
            3,
            vec![
                CutRow::new(),
                CutRow::from_pairs(&[(-1, 2)], &[(1, -1)]),
                CutRow::from_pairs(&[(0, 2)], &[(1, -1)]),
            ],
        );
        assert!(a.is_edge(&b));
        assert!(a.successors().iter().any(|(_, m)| *m == b));
    }

    #[test]
    fn identical_rows_rejected() {
        let r = CutRow::from_pairs(&[(0, 1)], &[(1, -1)]);
        let mc = MultiCut::new(-1, 1, vec![r.clone(), r]);
        assert!(matches!(
            mc.validate(),
            Err(MultiViolation::Equivalent {
                first: 0,
                second: 1
            })
        ));
    }

    #[test]
    fn cycled_order() {
        let mc = example();
        let c = mc.cycled();
        assert_eq!(c.rows[0], mc.rows[1]);
        assert_eq!(c.cycled().cycled(), mc);
    }

    #[test]
    fn json_shape() {
        let mc = MultiCut::new(-1, 1, vec![CutRow::from_pairs(&[(0, 1)], &[(1, -1)])]);
        let v = serde_json::to_value(&mc).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"mu": -1, "nu": 1, "rows": [{"s": [[0, 1]], "t": [[1, -1]]}]})
        );
        let back: MultiCut = serde_json::from_value(v).unwrap();
        assert_eq!(back, mc);
        assert!(serde_json::from_str::<CutRow>(r#"{"s":[[1,2]],"t":[]}"#).is_err());
    }

    #[test]
    fn choice_roundtrip_on_successors() {
        let mc = example();
        for (choices, next) in mc.successors() {
            assert_eq!(mc.choices_to(&next).unwrap(), choices);
        }
    }
}
