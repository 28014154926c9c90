//! Weak components of the cut-set digraph around the optimized vertices.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::binary::{from_binary, BinaryRep};
use crate::cutset::MultiCut;

/// Largest number of optimized start vertices accepted.
pub const MAX_OPTIMIZED: u64 = 10_000_000;
/// Largest number of vertices visited in total.
pub const MAX_VISITED: usize = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("bounds must satisfy mu < 0 < nu")]
    Degenerate,
    #[error("{0} optimized vertices exceed the limit")]
    TooMany(u64),
    #[error("visited more than {0} vertices")]
    Budget(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DigraphSummary {
    pub rows: usize,
    pub mu: i64,
    pub nu: i64,
    /// Balanced rows available to each optimized vertex.
    pub alphabet_size: usize,
    pub optimized_vertices: u64,
    pub visited_vertices: usize,
    pub edges: usize,
    /// Components holding at least one optimized vertex.
    pub components: usize,
    /// Optimized members per component mapped to the number of components.
    pub component_size_histogram: BTreeMap<usize, usize>,
    /// Components holding some optimized vertex together with its cycled form.
    pub cycled_closed_count: usize,
}

/// Balanced rows of width `M` with `|μ|` pluses, in lexicographic order.
pub fn alphabet(mu: i64, nu: i64) -> Vec<Vec<bool>> {
    let m = (mu.abs() + nu) as usize;
    let k = mu.unsigned_abs() as usize;
    (0u64..1 << m)
        .filter(|b| b.count_ones() as usize == k)
        .map(|b| (0..m).map(|i| b >> (m - 1 - i) & 1 == 1).collect())
        .collect()
}

fn falling(n: usize, r: usize) -> Option<u64> {
    (0..r).try_fold(1u64, |acc, i| acc.checked_mul((n - i) as u64))
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn add(&mut self) -> usize {
        self.0.push(self.0.len());
        self.0.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Explores everything reachable from the optimized cut sets with `rows`
/// rows and joins the endpoints of every edge.
pub fn explore_digraph(rows: usize, mu: i64, nu: i64) -> Result<DigraphSummary, ExploreError> {
    if mu >= 0 || nu <= 0 {
        return Err(ExploreError::Degenerate);
    }
    let alpha = alphabet(mu, nu);
    let count = if rows > alpha.len() {
        0
    } else {
        falling(alpha.len(), rows).unwrap_or(u64::MAX)
    };
    if count > MAX_OPTIMIZED {
        return Err(ExploreError::TooMany(count));
    }
    let mut ids: HashMap<MultiCut, usize> = HashMap::new();
    let mut verts: Vec<MultiCut> = Vec::new();
    let mut dsu = Dsu(Vec::new());
    let mut queue = VecDeque::new();
    let mut optimized = Vec::new();
    if count > 0 {
        let mut pick = Vec::with_capacity(rows);
        let mut used = vec![false; alpha.len()];
        tuples(&alpha, rows, &mut pick, &mut used, &mut |chosen| {
            let b = BinaryRep {
                mu,
                nu,
                rows: chosen.to_vec(),
            };
            let mc = from_binary(&b).expect("balanced rows");
            let id = dsu.add();
            ids.insert(mc.clone(), id);
            verts.push(mc);
            optimized.push(id);
            queue.push_back(id);
        });
    }
    let mut edges = 0;
    while let Some(id) = queue.pop_front() {
        let succ = verts[id].successors();
        for (_, next) in succ {
            edges += 1;
            let nid = match ids.get(&next) {
                Some(&n) => n,
                None => {
                    if verts.len() >= MAX_VISITED {
                        return Err(ExploreError::Budget(MAX_VISITED));
                    }
                    let n = dsu.add();
                    ids.insert(next.clone(), n);
                    verts.push(next);
                    queue.push_back(n);
                    n
                }
            };
            dsu.union(id, nid);
        }
    }
    let mut members: BTreeMap<usize, usize> = BTreeMap::new();
    for &o in &optimized {
        *members.entry(dsu.find(o)).or_default() += 1;
    }
    let mut histogram = BTreeMap::new();
    for &n in members.values() {
        *histogram.entry(n).or_default() += 1;
    }
    let mut closed = std::collections::BTreeSet::new();
    for &o in &optimized {
        if let Some(&c) = ids.get(&verts[o].cycled()) {
            let root = dsu.find(o);
            if dsu.find(c) == root {
                closed.insert(root);
            }
        }
    }
    Ok(DigraphSummary {
        rows,
        mu,
        nu,
        alphabet_size: alpha.len(),
        optimized_vertices: count,
        visited_vertices: verts.len(),
        edges,
        components: members.len(),
        component_size_histogram: histogram,
        cycled_closed_count: closed.len(),
    })
}

fn tuples(
    alpha: &[Vec<bool>],
    rows: usize,
    pick: &mut Vec<Vec<bool>>,
    used: &mut [bool],
    f: &mut impl FnMut(&[Vec<bool>]),
) {
    if pick.len() == rows {
        f(pick);
        return;
    }
    for i in 0..alpha.len() {
        if !used[i] {
            used[i] = true;
            pick.push(alpha[i].clone());
            tuples(alpha, rows, pick, used, f);
            pick.pop();
            used[i] = false;
        }
    }
}
