//! Witness statistics: k-cycle counts, maximum edge-disjoint cycle packings,
//! overlapping-cycle pair counts, minimum bisections, and their closed-form
//! expectations under the two models.

mod bisection;
mod cycles;

pub use bisection::{
    cut_size, min_bisection, min_bisection_heuristic, random_balanced_partition,
    BisectionExactness, BisectionMode, BisectionReport, BISECTION_EXACT_CAP, DEFAULT_RESTARTS,
};
pub use cycles::{
    count_cycles_in_range, count_k_cycles, count_overlapping_pairs, enumerate_k_cycles,
    max_disjoint_packing, Exactness, PackingResult, CYCLE_BUDGET, CYCLE_LENGTH_CAP,
    EXACT_PACKING_BUDGET,
};

use serde::Serialize;

use crate::error::Result;
use crate::graph::Graph;

/// Per-k cycle statistics for one graph.
#[derive(Debug, Clone, Serialize)]
pub struct CycleReport {
    pub k: usize,
    /// Number of k-cycles (each counted once, automorphisms quotiented out).
    pub x_k: u64,
    /// Maximum edge-disjoint k-cycle packing size.
    pub y_k: u64,
    pub y_k_exactness: Exactness,
    /// Unordered pairs of distinct k-cycles sharing at least one vertex.
    pub z_k: u64,
}

/// Computes x_k, y_k, z_k for one graph.
pub fn cycle_report(g: &Graph, k: usize, seed: u64) -> Result<CycleReport> {
    let x_k = count_k_cycles(g, k)?;
    let packing = max_disjoint_packing(g, k, seed)?;
    let z_k = count_overlapping_pairs(g, k)?;
    Ok(CycleReport {
        k,
        x_k,
        y_k: packing.size,
        y_k_exactness: packing.exactness,
        z_k,
    })
}

/// E[X_k] under the uniform model, exact in n:
/// n(n-1)...(n-k+1)/(2k) * (c/n)^k.
pub fn expected_cycles_uniform(n: usize, k: usize, c: f64) -> f64 {
    let nf = n as f64;
    let mut prod = 1.0;
    for i in 0..k {
        prod *= (nf - i as f64) * c / nf;
    }
    prod / (2.0 * k as f64)
}

/// Asymptotic E[X_k] under the planted model: (c^k + delta^k)/(2k).
///
/// For the disassortative flavor pass a negative delta; odd k then gives
/// (c^k - |delta|^k)/(2k), matching its transfer-matrix eigenvalues.
pub fn expected_cycles_planted_limit(k: usize, c: f64, delta: f64) -> f64 {
    (c.powi(k as i32) + delta.powi(k as i32)) / (2.0 * k as f64)
}

/// Finite-n E[X_k] under the planted model (unclamped regime):
/// (n)_k / n^k * (c^k + delta^k)/(2k).
pub fn expected_cycles_planted_exact(n: usize, k: usize, c: f64, delta: f64) -> f64 {
    let nf = n as f64;
    let mut falling = 1.0;
    for i in 0..k {
        falling *= (nf - i as f64) / nf;
    }
    falling * expected_cycles_planted_limit(k, c, delta)
}
