//! Period detection.
//!
//! Two signatures drive the scan: the window state (which offsets in
//! `[μ, ν)` around `x` are already taken) and the cut after `x`. A repeated
//! signature in the same residue class yields a candidate shift, which is
//! confirmed with the residue/tower test before [`minimize`] reduces it.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::{
    degenerate_certificate, shift_conditions, verify_certificate, DifferenceBounds, Generator,
    InstanceError, PeriodCertificate, ProblemInstance,
};
use crate::optimize::BoundReport;
use crate::util::binomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DetectError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error("prefix of length {len} does not determine the cut after {x}")]
    InsufficientData { x: usize, len: usize },
    #[error(
        "budget of {budget} terms exhausted at position {position} after {states} distinct states"
    )]
    Budget {
        budget: usize,
        position: usize,
        states: usize,
    },
    #[error("shift {q} from {start} does not hold at {index}")]
    InconsistentWitness {
        q: usize,
        start: usize,
        index: usize,
    },
    #[error("detected certificate failed verification: {0:?}")]
    Unverified(crate::instance::VerifyFailure),
}

impl DetectError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            DetectError::Budget { .. } | DetectError::Instance(InstanceError::Budget(_))
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetectMethod {
    #[default]
    Cuts,
    Window,
}

impl std::str::FromStr for DetectMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cuts" => Ok(DetectMethod::Cuts),
            "window" => Ok(DetectMethod::Window),
            other => Err(format!(
                "unknown method {other:?} (expected cuts or window)"
            )),
        }
    }
}

/// The cut after `position`: S entries at offsets `≤ 0`, T entries at offsets `≥ 1`,
/// each paired with its d-value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cut {
    pub position: usize,
    pub s_entries: Vec<(i64, i64)>,
    pub t_entries: Vec<(i64, i64)>,
}

impl Cut {
    pub fn is_empty(&self) -> bool {
        self.s_entries.is_empty() && self.t_entries.is_empty()
    }

    /// `T*`: offsets hit by S entries.
    pub fn t_star(&self) -> BTreeSet<i64> {
        self.s_entries.iter().map(|&(o, d)| o + d).collect()
    }

    /// `S*`: offsets hit by T entries.
    pub fn s_star(&self) -> BTreeSet<i64> {
        self.t_entries.iter().map(|&(o, d)| o + d).collect()
    }

    fn signature(&self, residue: usize) -> Vec<i64> {
        let mut sig = Vec::with_capacity(2 + 2 * (self.s_entries.len() + self.t_entries.len()));
        sig.push(residue as i64);
        sig.push(self.s_entries.len() as i64);
        for &(o, d) in self.s_entries.iter().chain(&self.t_entries) {
            sig.push(o);
            sig.push(d);
        }
        sig
    }
}

/// Exact cut after `x` from a prefix.
///
/// Fails unless the prefix contains every value `≤ x`.
pub fn cut_at(g_prefix: &[i64], x: usize) -> Result<Cut, DetectError> {
    let len = g_prefix.len();
    if x >= len {
        return Err(DetectError::InsufficientData { x, len });
    }
    let xi = x as i64;
    let s_entries: Vec<(i64, i64)> = (0..=x)
        .filter(|&i| g_prefix[i] > xi)
        .map(|i| (i as i64 - xi, g_prefix[i] - i as i64))
        .collect();
    let mut t_entries = Vec::with_capacity(s_entries.len());
    let mut i = x + 1;
    while t_entries.len() < s_entries.len() {
        if i >= len {
            return Err(DetectError::InsufficientData { x, len });
        }
        if g_prefix[i] <= xi {
            t_entries.push((i as i64 - xi, g_prefix[i] - i as i64));
        }
        i += 1;
    }
    Ok(Cut {
        position: x,
        s_entries,
        t_entries,
    })
}

/// Options for [`detect_with`].
#[derive(Debug, Clone, Default)]
pub struct DetectOptions {
    pub method: DetectMethod,
    /// Maximum number of generated terms; `None` uses [`default_budget`].
    pub budget: Option<usize>,
    pub trace: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub certificate: PeriodCertificate,
    /// Shift found by the signature repeat.
    pub witness_shift: usize,
    /// Earlier position of the repeat.
    pub witness_start: usize,
    /// One `(position, signature hash)` per scanned position when tracing.
    pub trace: Vec<(usize, u64)>,
}

/// First position the scan looks at.
pub fn scan_start(instance: &ProblemInstance) -> usize {
    instance.settled_start()
}

/// Default term budget: scan start plus four rounds of the binomial state bound,
/// with room for the window of a late-settling transient.
pub fn default_budget(instance: &ProblemInstance) -> usize {
    let b = instance.bounds();
    let p = instance.p() as u128;
    let m = b.big_m.max(1) as u128;
    let states = binomial(m as u64, b.min_side().max(0) as u64) * p;
    let extra = 4 * states + m * m * p + 64;
    scan_start(instance).saturating_add(extra.min(usize::MAX as u128 / 2) as usize)
}

/// Detects the additive period with default options.
pub fn detect(
    instance: &ProblemInstance,
    method: DetectMethod,
    budget: Option<usize>,
) -> Result<PeriodCertificate, DetectError> {
    detect_with(
        instance,
        &DetectOptions {
            method,
            budget,
            trace: false,
        },
    )
    .map(|d| d.certificate)
}

pub fn detect_with(
    instance: &ProblemInstance,
    opts: &DetectOptions,
) -> Result<Detection, DetectError> {
    let budget = opts.budget.unwrap_or_else(|| default_budget(instance));
    if let Some(cert) = degenerate_certificate(instance, budget)? {
        return Ok(Detection {
            certificate: cert,
            witness_shift: 1,
            witness_start: 0,
            trace: Vec::new(),
        });
    }
    let bounds = instance.bounds();
    let p = instance.p();
    let mut gen = Generator::new(instance)?;
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    let mut trace = Vec::new();
    let mut tracker = CutTracker::default();
    let start = scan_start(instance);
    let mut x = start;
    loop {
        let sig = match opts.method {
            DetectMethod::Window => {
                if x >= budget {
                    return Err(budget_error(budget, x, seen.len()));
                }
                gen.extend_to(x)?;
                window_signature(gen.values(), x, x % p, &bounds)
            }
            DetectMethod::Cuts => {
                let cut = tracker.cut_after(&mut gen, x, budget)?;
                cut.signature(x % p)
            }
        };
        if opts.trace {
            let mut h = DefaultHasher::new();
            sig.hash(&mut h);
            trace.push((x, h.finish()));
        }
        if let Some(&prev) = seen.get(&sig) {
            let q = x - prev;
            gen.extend_to(x + 1)?;
            if shift_conditions(gen.values(), prev, q).is_none() {
                let certificate = minimize(instance, q, prev)?;
                return Ok(Detection {
                    certificate,
                    witness_shift: q,
                    witness_start: prev,
                    trace,
                });
            }
        }
        seen.insert(sig, x);
        x += 1;
    }
}

fn budget_error(budget: usize, position: usize, states: usize) -> DetectError {
    DetectError::Budget {
        budget,
        position,
        states,
    }
}

/// `{G(x') - x : x - M ≤ x' < x} ∩ [μ, ν)` as a bit mask, prefixed by the residue.
fn window_signature(values: &[i64], x: usize, residue: usize, b: &DifferenceBounds) -> Vec<i64> {
    let m = b.big_m.max(0) as usize;
    let words = m.div_ceil(63).max(1);
    let mut sig = vec![0i64; words + 1];
    sig[0] = residue as i64;
    let xi = x as i64;
    for &g in &values[x.saturating_sub(m)..x] {
        let rel = g - xi;
        if rel >= b.mu && rel < b.nu {
            let bit = (rel - b.mu) as usize;
            sig[1 + bit / 63] |= 1 << (bit % 63);
        }
    }
    sig
}

/// Incremental cut computation: S lives in a window of width `max d`, T is
/// found by scanning forward until it balances S.
#[derive(Debug, Default)]
struct CutTracker {
    max_d: i64,
    scanned: usize,
}

impl CutTracker {
    fn cut_after(
        &mut self,
        gen: &mut Generator<'_>,
        x: usize,
        budget: usize,
    ) -> Result<Cut, DetectError> {
        let need_len = |gen: &mut Generator<'_>, n: usize| -> Result<(), DetectError> {
            if n > budget {
                return Err(budget_error(budget, x, 0));
            }
            gen.extend_to(n)?;
            Ok(())
        };
        need_len(gen, x + 1)?;
        while self.scanned <= x {
            let i = self.scanned;
            self.max_d = self.max_d.max(gen.values()[i] - i as i64);
            self.scanned += 1;
        }
        let xi = x as i64;
        let lo = (xi - self.max_d + 1).max(0) as usize;
        let s_entries: Vec<(i64, i64)> = (lo..=x)
            .filter(|&i| gen.values()[i] > xi)
            .map(|i| (i as i64 - xi, gen.values()[i] - i as i64))
            .collect();
        let mut t_entries = Vec::with_capacity(s_entries.len());
        let mut i = x + 1;
        while t_entries.len() < s_entries.len() {
            need_len(gen, i + 1)?;
            let g = gen.values()[i];
            if g <= xi {
                t_entries.push((i as i64 - xi, g - i as i64));
            }
            i += 1;
        }
        Ok(Cut {
            position: x,
            s_entries,
            t_entries,
        })
    }
}

/// Reduces a confirmed shift `q` from `x0` to the minimal period and preperiod.
pub fn minimize(
    instance: &ProblemInstance,
    q: usize,
    x0: usize,
) -> Result<PeriodCertificate, DetectError> {
    if q == 0 {
        return Err(DetectError::InconsistentWitness {
            q,
            start: x0,
            index: x0,
        });
    }
    let m = instance.bounds().big_m.max(0) as usize;
    let check_end = x0 + q + m;
    let mut gen = Generator::new(instance)?;
    gen.extend_to(check_end + q + 1)?;
    let g = gen.values();
    let qi = q as i64;
    for y in x0..=check_end {
        if g[y + q] != g[y] + qi {
            return Err(DetectError::InconsistentWitness {
                q,
                start: x0,
                index: y,
            });
        }
    }
    let d = |i: usize| g[i] - i as i64;
    let period = (1..=q)
        .filter(|k| q.is_multiple_of(*k))
        .find(|&k| (x0..x0 + q - k).all(|i| d(i) == d(i + k)))
        .unwrap_or(q);
    let mut pre = x0;
    while pre > 0 && d(pre - 1) == d(pre - 1 + period) {
        pre -= 1;
    }
    let diff_period = (pre..pre + period).map(d).collect();
    let cert = PeriodCertificate {
        preperiod: pre,
        period,
        diff_period,
    };
    let v = verify_certificate(instance, &cert)?;
    match v.failure {
        None => Ok(cert),
        Some(f) => Err(DetectError::Unverified(f)),
    }
}

/// Exclusions witnessed by inversions `(x, y)`, `x < y`, `G(x) > G(y)`, `x ≥ from`:
/// the value `G(y) - x` is recorded at residue `x mod p`.
///
/// Inversions reaching past the end of the prefix are not seen.
pub fn exclusions_from_inversions(
    g_prefix: &[i64],
    p: usize,
    from: usize,
) -> BTreeMap<usize, BTreeSet<i64>> {
    let mut out: BTreeMap<usize, BTreeSet<i64>> = BTreeMap::new();
    let n = g_prefix.len();
    let max_v = g_prefix.iter().copied().max().unwrap_or(-1);
    if max_v < 0 || p == 0 {
        return out;
    }
    let mut fenwick = Fenwick::new(max_v as usize + 1);
    for (x, &gx) in g_prefix.iter().enumerate() {
        if x >= from {
            let smaller_before = fenwick.prefix(gx as usize);
            let mut remaining = gx - smaller_before as i64;
            let mut y = x + 1;
            while remaining > 0 && y < n {
                if g_prefix[y] < gx {
                    out.entry(x % p).or_default().insert(g_prefix[y] - x as i64);
                    remaining -= 1;
                }
                y += 1;
            }
        }
        fenwick.add(gx as usize);
    }
    out
}

/// Counts of inserted values, queried by strict prefix.
struct Fenwick {
    tree: Vec<u32>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, v: usize) {
        let mut i = v + 1;
        while i < self.tree.len() {
            self.tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }

    /// Number of inserted values `< v`.
    fn prefix(&self, v: usize) -> u32 {
        let mut i = v;
        let mut s = 0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

/// Bound report with `K̂ = 0`.
pub fn bound_report(bounds: &DifferenceBounds, p: usize) -> BoundReport {
    BoundReport::new(bounds, p, 0)
}
