use rayon::prelude::*;

use super::dual::DualSolutionSet;
use super::torus::{orbit_distance, PNorm, TorusVector};
use crate::error::{Error, Result};
use crate::groups::GroupElement;

/// Largest point set handled by the exact searches.
pub const MAX_POINTS: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    /// Largest subset with pairwise distance `> ε`.
    Separated,
    /// Smallest subset within `ε` of every point.
    Spanning,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ExtremalCount {
    pub mode: CountMode,
    /// Exact optimum.
    pub count: usize,
    /// Value found by the greedy heuristic (a lower bound for separated
    /// counts, an upper bound for spanning counts).
    pub greedy: usize,
    pub points: usize,
}

/// Fixed-width bitset over `0..n`.
#[derive(Clone, Debug, PartialEq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }
    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }
    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }
    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }
    fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + b)
            })
        })
    }
}

/// Maximum clique by branch and bound with greedy-colouring bounds.
struct CliqueSearch<'a> {
    adj: &'a [Bits],
    best: usize,
}

impl CliqueSearch<'_> {
    /// Greedy colouring of `cand`; returns vertices with their colour
    /// numbers, sorted by colour.
    fn colour(&self, cand: &Bits) -> Vec<(usize, usize)> {
        let mut order = Vec::new();
        let mut uncoloured = cand.clone();
        let mut colour = 0;
        while !uncoloured.is_empty() {
            colour += 1;
            let mut avail = uncoloured.clone();
            loop {
                let next = avail.ones().next();
                let Some(v) = next else { break };
                avail.clear(v);
                avail = avail.and_not(&self.adj[v]);
                uncoloured.clear(v);
                order.push((v, colour));
            }
        }
        order
    }

    fn expand(&mut self, size: usize, mut cand: Bits) {
        let order = self.colour(&cand);
        for &(v, c) in order.iter().rev() {
            if size + c <= self.best {
                return;
            }
            let next = cand.and(&self.adj[v]);
            if next.is_empty() {
                self.best = self.best.max(size + 1);
            } else {
                self.expand(size + 1, next);
            }
            cand.clear(v);
        }
    }
}

fn greedy_clique(adj: &[Bits]) -> usize {
    let n = adj.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].count()));
    let mut clique: Vec<usize> = Vec::new();
    for v in order {
        if clique.iter().all(|&u| adj[u].get(v)) {
            clique.push(v);
        }
    }
    clique.len()
}

/// Minimum dominating set (closed neighbourhoods) by branch and bound.
struct CoverSearch<'a> {
    cover: &'a [Bits],
    best: usize,
    max_cover: usize,
}

impl CoverSearch<'_> {
    fn search(&mut self, chosen: usize, uncovered: Bits) {
        let left = uncovered.count();
        if left == 0 {
            self.best = self.best.min(chosen);
            return;
        }
        if chosen + left.div_ceil(self.max_cover) >= self.best {
            return;
        }
        // Branch on the uncovered point with the fewest coverers.
        let target = uncovered
            .ones()
            .min_by_key(|&u| self.cover[u].count())
            .expect("nonempty");
        let mut options: Vec<usize> = self.cover[target].ones().collect();
        options.sort_by_key(|&v| std::cmp::Reverse(self.cover[v].and(&uncovered).count()));
        for v in options {
            self.search(chosen + 1, uncovered.and_not(&self.cover[v]));
        }
    }
}

fn greedy_cover(cover: &[Bits]) -> usize {
    let n = cover.len();
    let mut uncovered = Bits::new(n);
    (0..n).for_each(|i| uncovered.set(i));
    let mut used = 0;
    while !uncovered.is_empty() {
        let v = (0..n)
            .max_by_key(|&v| (cover[v].and(&uncovered).count(), std::cmp::Reverse(v)))
            .expect("nonempty");
        uncovered = uncovered.and_not(&cover[v]);
        used += 1;
    }
    used
}

/// Exact separated or spanning count of an explicit point set.
pub fn extremal_count_points(
    points: &[TorusVector],
    subset: &[GroupElement],
    p: PNorm,
    epsilon: f64,
    mode: CountMode,
) -> Result<ExtremalCount> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Domain("empty point set".into()));
    }
    if n > MAX_POINTS {
        return Err(Error::TooLarge(format!("{n} points exceed {MAX_POINTS}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("ε = {epsilon} must be positive")));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| orbit_distance(&points[i], &points[j], subset, p))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let mut graph = vec![Bits::new(n); n];
    for i in 0..n {
        for j in 0..n {
            let far = rows[i][j] > epsilon;
            let link = match mode {
                CountMode::Separated => far && i != j,
                CountMode::Spanning => !far,
            };
            if link {
                graph[i].set(j);
            }
        }
    }
    let (count, greedy) = match mode {
        CountMode::Separated => {
            let greedy = greedy_clique(&graph);
            let mut all = Bits::new(n);
            (0..n).for_each(|i| all.set(i));
            let mut s = CliqueSearch {
                adj: &graph,
                best: greedy,
            };
            s.expand(0, all);
            (s.best, greedy)
        }
        CountMode::Spanning => {
            let greedy = greedy_cover(&graph);
            let mut all = Bits::new(n);
            (0..n).for_each(|i| all.set(i));
            let mut s = CoverSearch {
                cover: &graph,
                best: greedy,
                max_cover: graph.iter().map(Bits::count).max().unwrap_or(1),
            };
            s.search(0, all);
            (s.best, greedy)
        }
    };
    Ok(ExtremalCount {
        mode,
        count,
        greedy,
        points: n,
    })
}

/// Exact separated or spanning count of `X_f` under `d_{ϑ,F,p}`.
pub fn extremal_count(
    set: &DualSolutionSet,
    subset: &[GroupElement],
    p: PNorm,
    epsilon: f64,
    mode: CountMode,
) -> Result<ExtremalCount> {
    let points = set.enumerate(MAX_POINTS)?;
    extremal_count_points(&points, subset, p, epsilon, mode)
}
