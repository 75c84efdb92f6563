//! Minimum balanced bisection: exact enumeration for tiny graphs, seeded
//! multi-restart swap descent for the rest.

use itertools::Itertools;
use rand::seq::SliceRandom;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sim::stream_rng;

/// Exact mode enumerates balanced bipartitions up to this many vertices.
pub const BISECTION_EXACT_CAP: usize = 20;
/// Default number of descent restarts in heuristic mode.
pub const DEFAULT_RESTARTS: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BisectionExactness {
    Exact,
    Heuristic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BisectionMode {
    Exact,
    Heuristic { restarts: u64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct BisectionReport {
    /// Edges across the best balanced bipartition found.
    pub value: u64,
    pub exactness: BisectionExactness,
    /// side[v] = true for one part; parts differ in size by at most 1.
    pub partition: Vec<bool>,
}

/// Cut size of a bipartition.
pub fn cut_size(g: &Graph, side: &[bool]) -> u64 {
    g.edges()
        .iter()
        .filter(|&&(i, j)| side[i] != side[j])
        .count() as u64
}

fn is_balanced(side: &[bool]) -> bool {
    let ones = side.iter().filter(|&&s| s).count();
    let zeros = side.len() - ones;
    ones.abs_diff(zeros) <= 1
}

/// Uniformly random balanced bipartition.
pub fn random_balanced_partition<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<bool> {
    let mut verts: Vec<usize> = (0..n).collect();
    verts.shuffle(rng);
    let mut side = vec![false; n];
    for &v in verts.iter().take(n / 2) {
        side[v] = true;
    }
    side
}

/// Minimum bisection: exact enumeration or seeded multi-restart local search.
pub fn min_bisection(g: &Graph, mode: BisectionMode, seed: u64) -> Result<BisectionReport> {
    match mode {
        BisectionMode::Exact => min_bisection_exact(g),
        BisectionMode::Heuristic { restarts } => Ok(min_bisection_heuristic(g, restarts, seed)),
    }
}

fn min_bisection_exact(g: &Graph) -> Result<BisectionReport> {
    let n = g.n();
    if n > BISECTION_EXACT_CAP {
        return Err(Error::CapExceeded {
            what: "exact min bisection",
            cap: BISECTION_EXACT_CAP,
            got: n,
        });
    }
    let half = n / 2;
    let mut best: Option<(u64, Vec<bool>)> = None;
    let mut side = vec![false; n];
    // even n: fix vertex 0 into the true side to halve the enumeration;
    // odd n: the smaller side identifies the partition uniquely
    let (fixed, choose_from, choose) = if n % 2 == 0 && n > 0 {
        (vec![0usize], (1..n).collect::<Vec<_>>(), half - 1)
    } else {
        (vec![], (0..n).collect::<Vec<_>>(), half)
    };
    for combo in choose_from.into_iter().combinations(choose) {
        side.iter_mut().for_each(|s| *s = false);
        for &v in &fixed {
            side[v] = true;
        }
        for v in combo {
            side[v] = true;
        }
        let cut = cut_size(g, &side);
        if best.as_ref().is_none_or(|(b, _)| cut < *b) {
            best = Some((cut, side.clone()));
        }
    }
    let (value, partition) = best.unwrap_or((0, side));
    Ok(BisectionReport {
        value,
        exactness: BisectionExactness::Exact,
        partition,
    })
}

/// Seeded multi-restart Kernighan-Lin: passes of locked pair swaps, keeping
/// the best prefix of each pass, repeated until no pass improves the cut.
pub fn min_bisection_heuristic(g: &Graph, restarts: u64, seed: u64) -> BisectionReport {
    let n = g.n();
    let mut best: Option<(u64, Vec<bool>)> = None;
    let mut scratch = KlScratch::new(n);
    for restart in 0..restarts.max(1) {
        let mut rng = stream_rng(seed, restart);
        let mut side = random_balanced_partition(n, &mut rng);
        let mut cut = cut_size(g, &side) as i64;
        loop {
            let improvement = kl_pass(g, &mut side, &mut scratch);
            if improvement <= 0 {
                break;
            }
            cut -= improvement;
        }
        debug_assert_eq!(cut, cut_size(g, &side) as i64);
        debug_assert!(is_balanced(&side));
        let cut = cut as u64;
        if best.as_ref().is_none_or(|(b, _)| cut < *b) {
            best = Some((cut, side));
        }
    }
    let (value, partition) = best.expect("at least one restart");
    BisectionReport {
        value,
        exactness: BisectionExactness::Heuristic,
        partition,
    }
}

struct KlScratch {
    d: Vec<i64>,
    locked: Vec<bool>,
    swaps: Vec<(usize, usize)>,
}

impl KlScratch {
    fn new(n: usize) -> Self {
        KlScratch {
            d: vec![0; n],
            locked: vec![false; n],
            swaps: Vec::with_capacity(n / 2),
        }
    }
}

/// One Kernighan-Lin pass: repeatedly swap-and-lock the best pair (its gain
/// may be negative), then roll back to the prefix with the best cumulative
/// gain. Returns that gain; `side` holds the improved partition.
fn kl_pass(g: &Graph, side: &mut [bool], scratch: &mut KlScratch) -> i64 {
    let n = side.len();
    let KlScratch { d, locked, swaps } = scratch;
    for v in 0..n {
        locked[v] = false;
        d[v] = g
            .neighbors(v)
            .iter()
            .map(|&w| if side[w as usize] != side[v] { 1 } else { -1 })
            .sum();
    }
    swaps.clear();
    let mut cumulative = 0i64;
    let mut best_cumulative = 0i64;
    let mut best_prefix = 0usize;
    for _ in 0..n / 2 {
        let Some((u, v, gain)) = best_unlocked_swap(g, side, d, locked) else {
            break;
        };
        side[u] = !side[u];
        side[v] = !side[v];
        locked[u] = true;
        locked[v] = true;
        for (moved, now) in [(u, side[u]), (v, side[v])] {
            for &w in g.neighbors(moved) {
                let w = w as usize;
                if w == u || w == v {
                    continue;
                }
                // `moved` left side !now: neighbors there gain an external
                // edge, neighbors on `now` lose one
                if side[w] == now {
                    d[w] -= 2;
                } else {
                    d[w] += 2;
                }
            }
        }
        swaps.push((u, v));
        cumulative += gain;
        if cumulative > best_cumulative {
            best_cumulative = cumulative;
            best_prefix = swaps.len();
        }
    }
    // roll back everything past the best prefix
    for &(u, v) in swaps[best_prefix..].iter().rev() {
        side[u] = !side[u];
        side[v] = !side[v];
    }
    best_cumulative
}

/// Best swap between unlocked vertices (any sign). Sides sorted by d
/// descending make gain <= d[u] + d[v] an early-break bound: the first
/// evaluated pair already sits within 2 of the max bound, so scans are short.
fn best_unlocked_swap(
    g: &Graph,
    side: &[bool],
    d: &[i64],
    locked: &[bool],
) -> Option<(usize, usize, i64)> {
    let mut a: Vec<usize> = (0..side.len()).filter(|&v| side[v] && !locked[v]).collect();
    let mut b: Vec<usize> = (0..side.len())
        .filter(|&v| !side[v] && !locked[v])
        .collect();
    if a.is_empty() || b.is_empty() {
        return None;
    }
    a.sort_unstable_by(|&x, &y| d[y].cmp(&d[x]));
    b.sort_unstable_by(|&x, &y| d[y].cmp(&d[x]));
    let mut best: Option<(usize, usize, i64)> = None;
    for &u in &a {
        if let Some((_, _, gain)) = best {
            if d[u] + d[b[0]] <= gain {
                break;
            }
        }
        for &v in &b {
            if let Some((_, _, gain)) = best {
                if d[u] + d[v] <= gain {
                    break;
                }
            }
            let gain = d[u] + d[v] - 2 * i64::from(g.has_edge(u, v));
            if best.is_none_or(|(_, _, b)| gain > b) {
                best = Some((u, v, gain));
            }
        }
    }
    best
}
