//! Problem instances and the greedy mex engine.
//!
//! Values are signed 64-bit throughout. A [`ProblemInstance`] pairs a periodic
//! sequence of difference sets `d(Y_x) = Y_x - x` with a seed; generation is
//! incremental so detectors can grow a prefix on demand.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::util::lcm;

/// Largest index the engine will generate.
pub const MAX_INDEX: u64 = 1 << 62;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("period must be at least 1 (got {0})")]
    InvalidPeriod(usize),
    #[error("expected {expected} difference sets for period {expected}, found {found}")]
    DiffSetCount { expected: usize, found: usize },
    #[error("seed value {value} at index {index} is negative")]
    NegativeSeed { index: usize, value: i64 },
    #[error("seed value {value} repeats at indices {first} and {second}")]
    DuplicateSeed {
        value: i64,
        first: usize,
        second: usize,
    },
    #[error("index {0} exceeds the supported range")]
    Overflow(u64),
    #[error("mu must be negative and nu positive (got mu={mu}, nu={nu})")]
    Domain { mu: i64, nu: i64 },
    #[error("stabilization not reached within {0} terms")]
    Budget(usize),
}

/// Periodic difference sets: `diff_sets[j]` is `Y_x - x` for every `x ≡ j (mod p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiffSetSequence {
    pub p: usize,
    pub diff_sets: Vec<BTreeSet<i64>>,
    #[serde(default)]
    pub periodic_start: usize,
}

impl DiffSetSequence {
    pub fn new(diff_sets: Vec<BTreeSet<i64>>) -> Self {
        Self {
            p: diff_sets.len(),
            diff_sets,
            periodic_start: 0,
        }
    }

    pub fn from_slices(sets: &[&[i64]]) -> Self {
        Self::new(sets.iter().map(|s| s.iter().copied().collect()).collect())
    }

    /// The difference set that applies at absolute index `x`.
    pub fn at(&self, x: usize) -> &BTreeSet<i64> {
        &self.diff_sets[x % self.p]
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Seed(pub Vec<i64>);

impl Seed {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_value(&self) -> Option<i64> {
        self.0.iter().copied().max()
    }
}

/// A complete input: difference sets plus seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    #[serde(flatten)]
    pub ys: DiffSetSequence,
    #[serde(default)]
    pub seed: Seed,
}

impl ProblemInstance {
    pub fn new(ys: DiffSetSequence, seed: Vec<i64>) -> Self {
        Self {
            ys,
            seed: Seed(seed),
        }
    }

    pub fn p(&self) -> usize {
        self.ys.p
    }

    pub fn bounds(&self) -> DifferenceBounds {
        difference_bounds(&self.ys)
    }

    /// Length of the seed after padding up to `periodic_start`.
    ///
    /// Indices in `[L, periodic_start)` are generated with the periodic law and
    /// treated as seed territory.
    pub fn effective_seed_len(&self) -> usize {
        self.seed.len().max(self.ys.periodic_start)
    }

    /// The seed folded with the padded gap, as concrete values.
    pub fn effective_seed(&self) -> Result<Vec<i64>, InstanceError> {
        let n = self.effective_seed_len();
        generate(self, n)
    }

    /// `K̂ = max(0, max seed value - L)` over the effective seed.
    pub fn seed_excess(&self) -> Result<i64, InstanceError> {
        let seed = self.effective_seed()?;
        let len = seed.len() as i64;
        Ok(seed.iter().map(|&g| g - len).max().unwrap_or(0).max(0))
    }

    /// First index from which cut and window states are meaningful:
    /// past the seed, past every seed value, plus one window of width `M`.
    pub fn settled_start(&self) -> usize {
        let seed_top = self.seed.max_value().map(|v| (v + 1) as usize).unwrap_or(0);
        let base = self.effective_seed_len().max(seed_top);
        base + self.bounds().big_m as usize
    }
}

/// Difference bounds `μ = min d(Y) - 1`, `ν = max d(Y) + 1`, `M = |μ| + ν`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceBounds {
    pub mu: i64,
    pub nu: i64,
    pub big_m: i64,
    /// True when every difference set is empty.
    #[serde(default)]
    pub all_empty: bool,
}

impl DifferenceBounds {
    pub fn new(mu: i64, nu: i64) -> Self {
        Self {
            mu,
            nu,
            big_m: mu.abs() + nu,
            all_empty: false,
        }
    }

    /// Bounds that force period 1 (`ν ≤ 0`, `μ ≥ 0`, or no obstructions at all).
    pub fn is_degenerate(&self) -> bool {
        self.nu <= 0 || self.mu >= 0 || self.all_empty
    }

    /// `min(|μ|, ν)`, the largest possible cut cardinality.
    pub fn min_side(&self) -> i64 {
        self.mu.abs().min(self.nu)
    }
}

/// Additive period certificate: `G(x + period) = G(x) + period` for `x ≥ preperiod`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeriodCertificate {
    pub preperiod: usize,
    pub period: usize,
    pub diff_period: Vec<i64>,
}

/// Smallest natural number not in `values`; negative members are ignored.
pub fn mex(values: &[i64]) -> i64 {
    let set: BTreeSet<i64> = values.iter().copied().filter(|&v| v >= 0).collect();
    let mut m = 0;
    for v in set {
        if v != m {
            break;
        }
        m += 1;
    }
    m
}

pub fn difference_bounds(ys: &DiffSetSequence) -> DifferenceBounds {
    let min = ys.diff_sets.iter().filter_map(|s| s.first()).min();
    let max = ys.diff_sets.iter().filter_map(|s| s.last()).max();
    match (min, max) {
        (Some(&lo), Some(&hi)) => DifferenceBounds::new(lo - 1, hi + 1),
        _ => DifferenceBounds {
            all_empty: true,
            ..DifferenceBounds::new(-1, 1)
        },
    }
}

pub fn validate_instance(instance: &ProblemInstance) -> Result<(), InstanceError> {
    let ys = &instance.ys;
    if ys.p == 0 {
        return Err(InstanceError::InvalidPeriod(0));
    }
    if ys.diff_sets.len() != ys.p {
        return Err(InstanceError::DiffSetCount {
            expected: ys.p,
            found: ys.diff_sets.len(),
        });
    }
    let mut seen = std::collections::HashMap::new();
    for (index, &value) in instance.seed.0.iter().enumerate() {
        if value < 0 {
            return Err(InstanceError::NegativeSeed { index, value });
        }
        if let Some(&first) = seen.get(&value) {
            return Err(InstanceError::DuplicateSeed {
                value,
                first,
                second: index,
            });
        }
        seen.insert(value, index);
    }
    Ok(())
}

/// Incremental generator for `G`.
///
/// Keeps an occupancy bitmap of used values and the smallest unused value, so
/// each step costs `O(1 + |Y_x|)` once the difference function is bounded.
#[derive(Debug, Clone)]
pub struct Generator<'a> {
    instance: &'a ProblemInstance,
    values: Vec<i64>,
    used: Vec<bool>,
    frontier: i64,
}

impl<'a> Generator<'a> {
    pub fn new(instance: &'a ProblemInstance) -> Result<Self, InstanceError> {
        validate_instance(instance)?;
        Ok(Self {
            instance,
            values: Vec::new(),
            used: Vec::new(),
            frontier: 0,
        })
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn is_used(&self, v: i64) -> bool {
        self.used.get(v as usize).copied().unwrap_or(false)
    }

    fn mark(&mut self, v: i64) {
        let idx = v as usize;
        if idx >= self.used.len() {
            self.used.resize((idx + 1).max(self.used.len() * 2), false);
        }
        self.used[idx] = true;
        while self.is_used(self.frontier) {
            self.frontier += 1;
        }
    }

    /// Extends the prefix to at least `n` terms.
    pub fn extend_to(&mut self, n: usize) -> Result<&[i64], InstanceError> {
        if n as u64 > MAX_INDEX {
            return Err(InstanceError::Overflow(n as u64));
        }
        let seed = &self.instance.seed.0;
        while self.values.len() < n {
            let x = self.values.len();
            let g = if x < seed.len() {
                seed[x]
            } else {
                let diffs = self.instance.ys.at(x);
                let xi = x as i64;
                let mut v = self.frontier;
                while self.is_used(v) || diffs.contains(&(v - xi)) {
                    v += 1;
                }
                v
            };
            self.values.push(g);
            self.mark(g);
        }
        Ok(&self.values)
    }

    pub fn get(&mut self, x: usize) -> Result<i64, InstanceError> {
        self.extend_to(x + 1)?;
        Ok(self.values[x])
    }
}

/// `G(0), …, G(up_to - 1)`.
pub fn generate(instance: &ProblemInstance, up_to: usize) -> Result<Vec<i64>, InstanceError> {
    let mut gen = Generator::new(instance)?;
    gen.extend_to(up_to)?;
    Ok(gen.values)
}

/// Period-1 certificate for degenerate bounds, `None` otherwise.
///
/// Scans for the first index past the seed where the prefix is exactly
/// `{0, …, x-1}`; from there `G(x) = x`.
pub fn degenerate_certificate(
    instance: &ProblemInstance,
    budget: usize,
) -> Result<Option<PeriodCertificate>, InstanceError> {
    if !instance.bounds().is_degenerate() {
        return Ok(None);
    }
    let mut gen = Generator::new(instance)?;
    let start = instance.effective_seed_len();
    let mut max_seen = -1i64;
    let mut x = 0usize;
    loop {
        if x >= budget {
            return Err(InstanceError::Budget(budget));
        }
        let g = gen.get(x)?;
        max_seen = max_seen.max(g);
        x += 1;
        if x >= start && max_seen == x as i64 - 1 {
            break;
        }
    }
    let values = gen.values();
    let mut pre = x;
    while pre > 0 && values[pre - 1] == pre as i64 - 1 {
        pre -= 1;
    }
    Ok(Some(PeriodCertificate {
        preperiod: pre,
        period: 1,
        diff_period: vec![0],
    }))
}

/// Why a certificate was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerifyFailure {
    ZeroPeriod,
    DiffPeriodLength {
        expected: usize,
        found: usize,
    },
    /// `d` at `index` differs from the certificate's diff period.
    DiffMismatch {
        index: usize,
    },
    /// Two values in the residue window collide mod the checked shift.
    ResidueCollision {
        first: usize,
        second: usize,
    },
    /// The values below the start differ from the union of downward towers.
    TowerMismatch,
    /// A seed value breaks the shift law before the mex recursion takes over.
    SeedRegion {
        index: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub valid: bool,
    pub failure: Option<VerifyFailure>,
    /// The shift that was checked with the residue and tower conditions.
    pub checked_shift: usize,
}

impl Verification {
    fn ok(shift: usize) -> Self {
        Self {
            valid: true,
            failure: None,
            checked_shift: shift,
        }
    }

    fn fail(shift: usize, failure: VerifyFailure) -> Self {
        Self {
            valid: false,
            failure: Some(failure),
            checked_shift: shift,
        }
    }
}

/// Residue and tower conditions for the shift `q` at `x`.
///
/// `values` must extend to at least `x + q`. When both hold (and `q` is a
/// multiple of the instance period, `x + q ≥ L`), `G(y + q) = G(y) + q` for all
/// `y ≥ x`.
pub(crate) fn shift_conditions(values: &[i64], x: usize, q: usize) -> Option<VerifyFailure> {
    let qi = q as i64;
    let mut owner: Vec<Option<usize>> = vec![None; q];
    for k in 0..q {
        let r = values[x + k].rem_euclid(qi) as usize;
        if let Some(first) = owner[r] {
            return Some(VerifyFailure::ResidueCollision {
                first: x + first,
                second: x + k,
            });
        }
        owner[r] = Some(k);
    }
    let mut below: Vec<i64> = values[..x].to_vec();
    below.sort_unstable();
    let mut towers = Vec::new();
    for k in 0..q {
        let mut v = values[x + k] - qi;
        while v >= 0 {
            towers.push(v);
            v -= qi;
        }
    }
    towers.sort_unstable();
    if below != towers {
        return Some(VerifyFailure::TowerMismatch);
    }
    None
}

/// Checks a certificate against the instance.
///
/// The shift checked is `lcm(period, p)` so the obstruction law lines up; the
/// claimed diff period must also match the generated values over one full
/// shift window.
pub fn verify_certificate(
    instance: &ProblemInstance,
    cert: &PeriodCertificate,
) -> Result<Verification, InstanceError> {
    if cert.period == 0 {
        return Ok(Verification::fail(0, VerifyFailure::ZeroPeriod));
    }
    if cert.diff_period.len() != cert.period {
        return Ok(Verification::fail(
            cert.period,
            VerifyFailure::DiffPeriodLength {
                expected: cert.period,
                found: cert.diff_period.len(),
            },
        ));
    }
    let q = lcm(cert.period as u64, instance.p() as u64) as usize;
    let seed_len = instance.seed.len();
    let start = cert.preperiod;
    let needed = start + 2 * q + instance.bounds().big_m.max(0) as usize + seed_len + 1;
    let values = generate(instance, needed)?;
    for i in 0..q {
        let x = start + i;
        let d = values[x] - x as i64;
        if d != cert.diff_period[i % cert.period] {
            return Ok(Verification::fail(
                q,
                VerifyFailure::DiffMismatch { index: x },
            ));
        }
    }
    let qi = q as i64;
    let mut y = start;
    while y + q < seed_len {
        if values[y + q] != values[y] + qi {
            return Ok(Verification::fail(
                q,
                VerifyFailure::SeedRegion { index: y },
            ));
        }
        y += 1;
    }
    match shift_conditions(&values, start, q) {
        Some(f) => Ok(Verification::fail(q, f)),
        None => Ok(Verification::ok(q)),
    }
}

/// The instance with difference set `{μ+1, …, ν-1}`, `p = 1` and empty seed,
/// together with its expected certificate.
pub fn simple_instance(
    mu: i64,
    nu: i64,
) -> Result<(ProblemInstance, PeriodCertificate), InstanceError> {
    if mu >= 0 || nu <= 0 {
        return Err(InstanceError::Domain { mu, nu });
    }
    let set: BTreeSet<i64> = (mu + 1..nu).collect();
    let instance = ProblemInstance::new(DiffSetSequence::new(vec![set]), Vec::new());
    let mut diff_period = vec![nu; mu.unsigned_abs() as usize];
    diff_period.extend(std::iter::repeat_n(mu, nu as usize));
    let cert = PeriodCertificate {
        preperiod: 0,
        period: diff_period.len(),
        diff_period,
    };
    Ok((instance, cert))
}

/// Shape of random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub max_p: usize,
    pub min_diff: i64,
    pub max_diff: i64,
    pub max_seed_len: usize,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self {
            max_p: 4,
            min_diff: -3,
            max_diff: 3,
            max_seed_len: 3,
        }
    }
}

/// A random instance: each difference set is a random subset of
/// `[min_diff, max_diff]`, the seed has distinct values below `2·len + 4`.
pub fn random_instance<R: rand::Rng + ?Sized>(rng: &mut R, spec: &RandomSpec) -> ProblemInstance {
    use rand::seq::SliceRandom;
    let p = rng.gen_range(1..=spec.max_p.max(1));
    let diff_sets = (0..p)
        .map(|_| {
            (spec.min_diff..=spec.max_diff)
                .filter(|_| rng.gen_bool(0.5))
                .collect()
        })
        .collect();
    let len = rng.gen_range(0..=spec.max_seed_len);
    let mut pool: Vec<i64> = (0..2 * len as i64 + 4).collect();
    pool.shuffle(rng);
    pool.truncate(len);
    ProblemInstance::new(DiffSetSequence::new(diff_sets), pool)
}
