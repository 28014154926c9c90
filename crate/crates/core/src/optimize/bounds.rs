//! Period and preperiod constants.

use serde::{Deserialize, Serialize};

use crate::instance::DifferenceBounds;
use crate::util::{binomial, lcm};

fn degenerate(mu: i64, nu: i64) -> bool {
    mu >= 0 || nu <= 0
}

/// Largest lcm of a partition of `M - 1` into at most `min(|μ|, ν)` parts.
pub fn k_paper(mu: i64, nu: i64) -> u64 {
    if degenerate(mu, nu) {
        return 1;
    }
    let total = (mu.abs() + nu - 1) as u64;
    let parts = mu.abs().min(nu) as u64;
    max_partition_lcm(total, parts)
}

/// `max(M, k_paper)`: the pure column rotation already realizes period `M`.
pub fn k_effective(mu: i64, nu: i64) -> u64 {
    if degenerate(mu, nu) {
        return 1;
    }
    k_paper(mu, nu).max((mu.abs() + nu) as u64)
}

/// Max lcm over partitions of `n` into at most `parts` parts.
///
/// Depth-first over non-increasing parts, pruned with the unrestricted
/// maximum (Landau's function) of the remainder.
pub fn max_partition_lcm(n: u64, parts: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let landau = landau_table(n);
    let mut best = 1u64;
    partition_dfs(n, n, parts, 1, &landau, &mut best);
    best
}

fn partition_dfs(rest: u64, max_part: u64, parts: u64, cur: u64, landau: &[u64], best: &mut u64) {
    if rest == 0 {
        *best = (*best).max(cur);
        return;
    }
    if parts == 0 || rest > parts * max_part {
        return;
    }
    if cur.saturating_mul(landau[rest as usize]) <= *best {
        return;
    }
    for part in (1..=max_part.min(rest)).rev() {
        partition_dfs(rest - part, part, parts - 1, lcm(cur, part), landau, best);
    }
}

/// `g(k)` for `k ≤ n`: the largest order of a permutation of `k` elements.
pub fn landau_table(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut best = vec![1u64; n + 1];
    for q in primes_up_to(n as u64) {
        let q = q as usize;
        for s in (0..=n).rev() {
            let mut pk = q;
            while pk <= s {
                best[s] = best[s].max(best[s - pk].saturating_mul(pk as u64));
                pk = match pk.checked_mul(q) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
    }
    for s in 1..=n {
        best[s] = best[s].max(best[s - 1]);
    }
    best
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

const LI_TOL: f64 = 1e-6;

/// `Li(x) = ∫₂ˣ dt / ln t`, zero for `x ≤ 2`.
pub fn li(x: f64) -> f64 {
    if x <= 2.0 {
        return 0.0;
    }
    let f = |t: f64| 1.0 / t.ln();
    // Split on a geometric grid so each piece is smooth enough for Simpson.
    let mut total = 0.0;
    let mut a = 2.0f64;
    while a < x {
        let b = (a * 2.0).min(x);
        total += adaptive_simpson(&f, a, b, LI_TOL * (b - a) / (x - 2.0), 50);
        a = b;
    }
    total
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let c = 0.5 * (a + b);
    let (fa, fb, fc) = (f(a), f(b), f(c));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_step(f, a, b, fa, fb, fc, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let c = 0.5 * (a + b);
    let (l, r) = (0.5 * (a + c), 0.5 * (c + b));
    let (fl, fr) = (f(l), f(r));
    let left = (c - a) / 6.0 * (fa + 4.0 * fl + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fr + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, c, fa, fc, fl, left, tol / 2.0, depth - 1)
        + simpson_step(f, c, b, fc, fb, fr, right, tol / 2.0, depth - 1)
}

/// Inverse of [`li`] on `[2, ∞)` by bisection.
pub fn li_inverse(y: f64) -> f64 {
    if y <= 0.0 {
        return 2.0;
    }
    let mut hi = 4.0;
    while li(hi) < y {
        hi *= 2.0;
    }
    let mut lo = 2.0;
    for _ in 0..200 {
        if hi - lo <= LI_TOL {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if li(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `exp(√(Li⁻¹(M - 1)))`, the growth rate of the period constant. Needs `M ≥ 3`.
pub fn k_asymptotic(big_m: u64) -> Option<f64> {
    if big_m < 3 {
        return None;
    }
    Some(li_inverse((big_m - 1) as f64).sqrt().exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreperiodBound {
    /// `⌊(M-1)/2⌋·⌈(M-1)/2⌉·p + K̂`.
    pub exact: u128,
    /// `(M/2)²·p + K̂`.
    pub paper_form: f64,
    /// Bound on preperiod excess plus period: `k_paper·p + K̂`.
    pub combined: u128,
    /// The combined bound is only claimed for `M ≥ 11`.
    pub combined_valid: bool,
}

pub fn preperiod_bound(mu: i64, nu: i64, p: u64, k_hat: u64) -> PreperiodBound {
    let m = (mu.abs() + nu.max(0)) as u128;
    let lo = m.saturating_sub(1) / 2;
    let hi = m.saturating_sub(1).div_ceil(2);
    let p128 = p as u128;
    PreperiodBound {
        exact: lo * hi * p128 + k_hat as u128,
        paper_form: (m as f64 / 2.0).powi(2) * p as f64 + k_hat as f64,
        combined: k_paper(mu, nu) as u128 * p128 + k_hat as u128,
        combined_valid: m >= 11,
    }
}

/// All period and preperiod constants for one set of bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mu: i64,
    pub nu: i64,
    pub big_m: i64,
    pub p: usize,
    pub k_hat: u64,
    pub degenerate: bool,
    /// `2^M·p`, saturating.
    pub window_bound: u128,
    /// `C(M, min(|μ|, ν))·p`.
    pub binomial_bound: u128,
    pub k_paper: u64,
    pub k_effective: u64,
    pub asymptotic_estimate: Option<f64>,
    pub preperiod_bound_exact: u128,
    pub preperiod_bound_paper: f64,
    pub combined_bound: u128,
    pub combined_bound_valid: bool,
}

impl BoundReport {
    pub fn new(bounds: &DifferenceBounds, p: usize, k_hat: u64) -> Self {
        let (mu, nu, m) = (bounds.mu, bounds.nu, bounds.big_m);
        let p128 = p as u128;
        if bounds.is_degenerate() {
            return Self {
                mu,
                nu,
                big_m: m,
                p,
                k_hat,
                degenerate: true,
                window_bound: 1,
                binomial_bound: 1,
                k_paper: 1,
                k_effective: 1,
                asymptotic_estimate: None,
                preperiod_bound_exact: k_hat as u128,
                preperiod_bound_paper: k_hat as f64,
                combined_bound: 1 + k_hat as u128,
                combined_bound_valid: false,
            };
        }
        let pre = preperiod_bound(mu, nu, p as u64, k_hat);
        let window = 1u128
            .checked_shl(m as u32)
            .and_then(|w| w.checked_mul(p128))
            .unwrap_or(u128::MAX);
        Self {
            mu,
            nu,
            big_m: m,
            p,
            k_hat,
            degenerate: false,
            window_bound: window,
            binomial_bound: binomial(m as u64, bounds.min_side() as u64).saturating_mul(p128),
            k_paper: k_paper(mu, nu),
            k_effective: k_effective(mu, nu),
            asymptotic_estimate: k_asymptotic(m as u64),
            preperiod_bound_exact: pre.exact,
            preperiod_bound_paper: pre.paper_form,
            combined_bound: pre.combined,
            combined_bound_valid: pre.combined_valid,
        }
    }
}
