//! Cycle enumeration by pruned DFS, and the maximum edge-disjoint packing.
//!
//! A k-cycle is a set of k vertices carrying a cyclic adjacency structure,
//! counted once: the DFS roots each cycle at its minimum vertex and fixes
//! the direction by requiring the second vertex to precede the last.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sim::stream_rng;

/// Hard cap on enumerable cycle length.
pub const CYCLE_LENGTH_CAP: usize = 12;
/// Enumeration errors out beyond this many cycles rather than truncating.
pub const CYCLE_BUDGET: usize = 1_000_000;
/// Packing stays exact (branch and bound) up to this many cycles.
pub const EXACT_PACKING_BUDGET: usize = 64;
/// Overlap-pair counting refuses beyond this much pairwise work.
const PAIR_WORK_BUDGET: u64 = 200_000_000;
/// Branch-and-bound node budget before falling back to greedy.
const BNB_NODE_BUDGET: u64 = 20_000_000;

fn check_k(k: usize) -> Result<()> {
    if !(3..=CYCLE_LENGTH_CAP).contains(&k) {
        return Err(Error::InvalidSpec(format!(
            "cycle length must be in 3..={CYCLE_LENGTH_CAP}, got {k}"
        )));
    }
    Ok(())
}

/// DFS over simple paths rooted at each vertex s, restricted to vertices
/// greater than s. `visit` receives each cycle (as its vertex path) with
/// length in `k_min..=k_max` exactly once; returning false stops the search.
fn walk_cycles<F>(g: &Graph, k_min: usize, k_max: usize, budget: usize, visit: &mut F) -> Result<()>
where
    F: FnMut(&[u32]) -> bool,
{
    check_k(k_min)?;
    check_k(k_max)?;
    let n = g.n();
    let mut in_path = vec![false; n];
    let mut path: Vec<u32> = Vec::with_capacity(k_max);
    let mut found = 0usize;
    // iteration stack of neighbor cursors, one per path level
    let mut cursors: Vec<usize> = Vec::with_capacity(k_max);
    for s in 0..n {
        if g.degree(s) < 2 {
            continue;
        }
        path.clear();
        cursors.clear();
        path.push(s as u32);
        in_path[s] = true;
        cursors.push(0);
        while let Some(cursor) = cursors.last_mut() {
            let v = *path.last().unwrap() as usize;
            let neighbors = g.neighbors(v);
            if *cursor < neighbors.len() {
                let w = neighbors[*cursor];
                *cursor += 1;
                if (w as usize) <= s || in_path[w as usize] {
                    continue;
                }
                path.push(w);
                in_path[w as usize] = true;
                let len = path.len();
                if len >= 3 && len >= k_min && g.has_edge(w as usize, s) && path[1] < w {
                    found += 1;
                    if found > budget {
                        return Err(Error::EnumerationBudget { budget });
                    }
                    if !visit(&path) {
                        return Ok(());
                    }
                }
                if len < k_max {
                    cursors.push(0);
                } else {
                    in_path[w as usize] = false;
                    path.pop();
                }
            } else {
                in_path[v] = false;
                path.pop();
                cursors.pop();
            }
        }
        in_path[s] = false;
    }
    Ok(())
}

/// Number of k-cycles in g.
pub fn count_k_cycles(g: &Graph, k: usize) -> Result<u64> {
    let mut count = 0u64;
    walk_cycles(g, k, k, CYCLE_BUDGET, &mut |path| {
        if path.len() == k {
            count += 1;
        }
        true
    })?;
    Ok(count)
}

/// Cycle counts for every length in `k_min..=k_max` from a single DFS.
pub fn count_cycles_in_range(g: &Graph, k_min: usize, k_max: usize) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; k_max + 1];
    walk_cycles(g, k_min, k_max, CYCLE_BUDGET, &mut |path| {
        counts[path.len()] += 1;
        true
    })?;
    Ok(counts)
}

/// All k-cycles as vertex paths (rooted and oriented canonically).
pub fn enumerate_k_cycles(g: &Graph, k: usize) -> Result<Vec<Vec<u32>>> {
    let mut cycles = Vec::new();
    walk_cycles(g, k, k, CYCLE_BUDGET, &mut |path| {
        if path.len() == k {
            cycles.push(path.to_vec());
        }
        true
    })?;
    Ok(cycles)
}

/// Unordered pairs of distinct k-cycles sharing at least one vertex.
pub fn count_overlapping_pairs(g: &Graph, k: usize) -> Result<u64> {
    let cycles = enumerate_k_cycles(g, k)?;
    let len = cycles.len() as u64;
    if len * len.saturating_sub(1) / 2 * k as u64 > PAIR_WORK_BUDGET {
        return Err(Error::EnumerationBudget {
            budget: PAIR_WORK_BUDGET as usize,
        });
    }
    let sorted: Vec<Vec<u32>> = cycles
        .into_iter()
        .map(|mut c| {
            c.sort_unstable();
            c
        })
        .collect();
    let mut pairs = 0u64;
    for i in 0..sorted.len() {
        for j in (i + 1)..sorted.len() {
            if sorted_intersects(&sorted[i], &sorted[j]) {
                pairs += 1;
            }
        }
    }
    Ok(pairs)
}

fn sorted_intersects(a: &[u32], b: &[u32]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    GreedyLowerBound,
}

#[derive(Debug, Clone, Copy)]
pub struct PackingResult {
    pub size: u64,
    pub exactness: Exactness,
}

/// Maximum number of pairwise edge-disjoint k-cycles.
///
/// Exact (branch and bound over the conflict graph) when at most
/// [`EXACT_PACKING_BUDGET`] cycles exist; otherwise a greedy lower bound in
/// seeded shuffled order, flagged as such. Only the exact mode is 1-Lipschitz
/// under single-edge toggles.
pub fn max_disjoint_packing(g: &Graph, k: usize, seed: u64) -> Result<PackingResult> {
    let cycles = enumerate_k_cycles(g, k)?;
    if cycles.is_empty() {
        return Ok(PackingResult {
            size: 0,
            exactness: Exactness::Exact,
        });
    }
    let mut edge_ids: HashMap<(u32, u32), u32> = HashMap::with_capacity(g.edge_count());
    for (id, (i, j)) in g.edges().into_iter().enumerate() {
        edge_ids.insert((i as u32, j as u32), id as u32);
    }
    let cycle_edges: Vec<Vec<u32>> = cycles
        .iter()
        .map(|path| {
            let mut ids: Vec<u32> = (0..path.len())
                .map(|t| {
                    let a = path[t];
                    let b = path[(t + 1) % path.len()];
                    edge_ids[&(a.min(b), a.max(b))]
                })
                .collect();
            ids.sort_unstable();
            ids
        })
        .collect();

    if cycle_edges.len() <= EXACT_PACKING_BUDGET {
        if let Some(size) = exact_packing(&cycle_edges) {
            return Ok(PackingResult {
                size,
                exactness: Exactness::Exact,
            });
        }
    }
    Ok(PackingResult {
        size: greedy_packing(&cycle_edges, seed),
        exactness: Exactness::GreedyLowerBound,
    })
}

/// Max independent set in the edge-conflict graph, as u64 bitmask BnB.
/// Returns None if the node budget runs out.
fn exact_packing(cycle_edges: &[Vec<u32>]) -> Option<u64> {
    let n = cycle_edges.len();
    debug_assert!(n <= 64);
    let mut conflict = vec![0u64; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if sorted_intersects(&cycle_edges[i], &cycle_edges[j]) {
                conflict[i] |= 1 << j;
                conflict[j] |= 1 << i;
            }
        }
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut best = 0u32;
    let mut nodes = 0u64;
    if bnb(all, 0, &mut best, &conflict, &mut nodes) {
        Some(best as u64)
    } else {
        None
    }
}

fn bnb(mut cand: u64, mut size: u32, best: &mut u32, conflict: &[u64], nodes: &mut u64) -> bool {
    *nodes += 1;
    if *nodes > BNB_NODE_BUDGET {
        return false;
    }
    // take conflict-free candidates outright
    loop {
        let mut took = false;
        let mut rest = cand;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if conflict[v] & cand == 0 {
                cand &= !(1 << v);
                size += 1;
                took = true;
            }
        }
        if !took {
            break;
        }
    }
    if size > *best {
        *best = size;
    }
    if cand == 0 || size + cand.count_ones() <= *best {
        return true;
    }
    // branch on the most conflicted candidate
    let mut v = 0;
    let mut max_deg = 0;
    let mut rest = cand;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let deg = (conflict[u] & cand).count_ones();
        if deg >= max_deg {
            max_deg = deg;
            v = u;
        }
    }
    let bit = 1u64 << v;
    if !bnb(cand & !conflict[v] & !bit, size + 1, best, conflict, nodes) {
        return false;
    }
    bnb(cand & !bit, size, best, conflict, nodes)
}

fn greedy_packing(cycle_edges: &[Vec<u32>], seed: u64) -> u64 {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..cycle_edges.len()).collect();
    order.shuffle(&mut stream_rng(seed, 0x9d5));
    let mut used: std::collections::HashSet<u32> = std::collections::HashSet::new();
    let mut size = 0u64;
    for i in order {
        if cycle_edges[i].iter().all(|e| !used.contains(e)) {
            used.extend(cycle_edges[i].iter().copied());
            size += 1;
        }
    }
    size
}
