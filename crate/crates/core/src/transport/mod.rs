//! Exact Monge-Kantorovich optimal transport between the two models on tiny
//! class spaces, a naive large-n coupling baseline, and Monte Carlo weak
//! duality lower bounds via the cycle-packing witness.
//!
//! The primal plan and the dual witness come from two independent solvers
//! (transportation simplex vs successive shortest paths); strong duality
//! checks one against the other.

mod flow;
mod simplex;

use rayon::prelude::*;
use serde::Serialize;

use crate::canon::DistanceMatrix;
use crate::error::{Error, Result};
use crate::models::{sample_model, GraphDistribution, ModelSpec};
use crate::sim::{derive_seed, KahanSum, MonteCarloEstimate, RunningStats};
use crate::stats::{max_disjoint_packing, Exactness};

/// Marginal feasibility tolerance for returned plans.
pub const MARGINAL_TOL: f64 = 1e-9;
/// Strong-duality gap tolerance.
pub const DUALITY_GAP_TOL: f64 = 1e-6;
/// Lipschitz feasibility tolerance for returned witnesses.
pub const LIPSCHITZ_TOL: f64 = 1e-9;

/// A transportation plan between two class distributions.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingPlan {
    /// Row-major plan, rows indexed by P classes, columns by Q classes.
    pub mu: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    /// sum mu(i,j) d(i,j).
    pub cost: f64,
}

impl CouplingPlan {
    /// Checks row/column sums against the marginals and entry nonnegativity.
    pub fn validate(&self, p: &[f64], q: &[f64]) -> Result<()> {
        for (i, &target) in p.iter().enumerate() {
            let row: f64 = self.mu[i * self.cols..(i + 1) * self.cols].iter().sum();
            if (row - target).abs() > MARGINAL_TOL {
                return Err(Error::InfeasibleMarginals(format!(
                    "row {i} sums to {row}, marginal is {target}"
                )));
            }
        }
        for (j, &target) in q.iter().enumerate() {
            let col: f64 = (0..self.rows).map(|i| self.mu[i * self.cols + j]).sum();
            if (col - target).abs() > MARGINAL_TOL {
                return Err(Error::InfeasibleMarginals(format!(
                    "column {j} sums to {col}, marginal is {target}"
                )));
            }
        }
        if let Some(&bad) = self.mu.iter().find(|&&x| x < -1e-12) {
            return Err(Error::InfeasibleMarginals(format!("negative entry {bad}")));
        }
        Ok(())
    }
}

/// A 1-Lipschitz function over classes and its mean gap.
#[derive(Debug, Clone, Serialize)]
pub struct DualWitness {
    pub f: Vec<f64>,
    /// |E_P f - E_Q f|.
    pub objective: f64,
}

impl DualWitness {
    /// Checks |f_i - f_j| <= d(i,j) on every class pair.
    pub fn validate(&self, d: &DistanceMatrix) -> Result<()> {
        for i in 0..self.f.len() {
            for j in 0..self.f.len() {
                if (self.f[i] - self.f[j]).abs() > d.get(i, j) as f64 + LIPSCHITZ_TOL {
                    return Err(Error::Solver(format!(
                        "witness violates Lipschitz constraint at ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_instance(p: &GraphDistribution, q: &GraphDistribution, d: &DistanceMatrix) -> Result<()> {
    if p.len() != d.len() || q.len() != d.len() {
        return Err(Error::InfeasibleMarginals(format!(
            "distributions over {} and {} classes, distance matrix over {}",
            p.len(),
            q.len(),
            d.len()
        )));
    }
    for (name, dist) in [("p", p), ("q", q)] {
        let sum: f64 = dist.probs().iter().sum();
        if (sum - 1.0).abs() > MARGINAL_TOL {
            return Err(Error::InfeasibleMarginals(format!(
                "{name} sums to {sum}"
            )));
        }
    }
    Ok(())
}

/// Exact optimal coupling between two class distributions under the edit
/// distance, via the transportation simplex.
pub fn solve_primal(
    p: &GraphDistribution,
    q: &GraphDistribution,
    d: &DistanceMatrix,
) -> Result<CouplingPlan> {
    check_instance(p, q, d)?;
    // drop zero-mass classes (clamped instances produce them), solve the
    // reduced problem, reinflate
    let rows: Vec<usize> = (0..p.len()).filter(|&i| p.probs()[i] > 0.0).collect();
    let cols: Vec<usize> = (0..q.len()).filter(|&j| q.probs()[j] > 0.0).collect();
    let supply: Vec<f64> = rows.iter().map(|&i| p.probs()[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| q.probs()[j]).collect();
    let cost: Vec<f64> = rows
        .iter()
        .flat_map(|&i| cols.iter().map(move |&j| d.get(i, j) as f64))
        .collect();
    let reduced = simplex::Transportation::solve(&supply, &demand, &cost)?;
    let k = p.len();
    let mut mu = vec![0.0; k * k];
    for (ri, &i) in rows.iter().enumerate() {
        for (cj, &j) in cols.iter().enumerate() {
            mu[i * k + j] = reduced[ri * cols.len() + cj].max(0.0);
        }
    }
    let mut cost_total = KahanSum::default();
    for i in 0..k {
        for j in 0..k {
            cost_total.add(mu[i * k + j] * d.get(i, j) as f64);
        }
    }
    let plan = CouplingPlan {
        mu,
        rows: k,
        cols: k,
        cost: cost_total.value(),
    };
    plan.validate(p.probs(), q.probs())?;
    Ok(plan)
}

/// Optimal 1-Lipschitz witness via successive-shortest-path potentials on
/// the transshipment formulation of the same instance.
pub fn solve_dual(
    p: &GraphDistribution,
    q: &GraphDistribution,
    d: &DistanceMatrix,
) -> Result<DualWitness> {
    check_instance(p, q, d)?;
    let balance: Vec<f64> = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(a, b)| a - b)
        .collect();
    let metric = |i: usize, j: usize| d.get(i, j) as f64;
    let pi = flow::optimal_potentials(&balance, &metric);
    let offset = pi[0];
    let f: Vec<f64> = pi.into_iter().map(|x| x - offset).collect();
    let mut gap = KahanSum::default();
    for (r, fi) in balance.iter().zip(&f) {
        gap.add(r * fi);
    }
    let witness = DualWitness {
        f,
        objective: gap.value().abs(),
    };
    witness.validate(d)?;
    Ok(witness)
}

/// delta^k / (2k): the asymptotic dual gap of the Y_k witness.
pub fn lb_formula(k: usize, delta: f64) -> f64 {
    delta.powi(k as i32) / (2.0 * k as f64)
}

/// Outcome of the naive per-pair maximal coupling baseline.
#[derive(Debug, Clone, Serialize)]
pub struct BaselineCost {
    pub hamming: MonteCarloEstimate,
}

/// Couples the two models by sharing spins and maximally coupling each
/// pair's Bernoulli variables; reports the mean Hamming distance, an upper
/// bound on the coupled edit distance (no isomorphism minimization).
pub fn baseline_coupling_cost(
    spec_p: &ModelSpec,
    spec_q: &ModelSpec,
    samples: u64,
    seed: u64,
) -> Result<BaselineCost> {
    spec_p.validate()?;
    spec_q.validate()?;
    if spec_p.n != spec_q.n {
        return Err(Error::SizeMismatch {
            left: spec_p.n,
            right: spec_q.n,
        });
    }
    let n = spec_p.n as u64;
    let total_pairs = n * (n - 1) / 2;
    let (p_same, p_diff) = spec_p.pair_probabilities();
    let (q_same, q_diff) = spec_q.pair_probabilities();
    let mismatch_same = (p_same - q_same).abs();
    let mismatch_diff = (p_diff - q_diff).abs();
    let chunks: Vec<RunningStats> = (0..samples)
        .collect::<Vec<u64>>()
        .par_chunks(1024)
        .map(|chunk| {
            let mut stats = RunningStats::new();
            for &idx in chunk {
                let mut rng = crate::sim::stream_rng(seed, idx);
                let plus = (0..n).filter(|_| rand::Rng::random::<bool>(&mut rng)).count() as u64;
                let minus = n - plus;
                let same_pairs = plus * plus.saturating_sub(1) / 2
                    + minus * minus.saturating_sub(1) / 2;
                let diff_pairs = total_pairs - same_pairs;
                let hamming = sample_binomial(&mut rng, same_pairs, mismatch_same)
                    + sample_binomial(&mut rng, diff_pairs, mismatch_diff);
                stats.push(hamming as f64);
            }
            stats
        })
        .collect();
    let mut stats = RunningStats::new();
    for chunk in &chunks {
        stats.merge(chunk);
    }
    Ok(BaselineCost {
        hamming: MonteCarloEstimate::from_stats(&stats),
    })
}

fn sample_binomial<R: rand::Rng>(rng: &mut R, trials: u64, p: f64) -> u64 {
    if p <= 0.0 || trials == 0 {
        return 0;
    }
    if p >= 1.0 {
        return trials;
    }
    rand_distr::Distribution::sample(
        &rand_distr::Binomial::new(trials, p).expect("validated binomial parameters"),
        rng,
    )
}

/// Monte Carlo estimate of |E_P Y_k - E_Q Y_k| with per-model means.
#[derive(Debug, Clone, Serialize)]
pub struct LbGapEstimate {
    pub gap: MonteCarloEstimate,
    pub mean_p: f64,
    pub mean_q: f64,
    /// gap - 2 SE, clamped at zero: a certified-at-confidence lower bound
    /// on the optimal coupling cost by weak duality.
    pub certified_lb: f64,
    /// False if any packing fell back to the greedy bound.
    pub all_exact: bool,
}

/// Estimates the weak-duality gap of the Y_k witness between two models.
pub fn lb_cycle_gap(
    spec_p: &ModelSpec,
    spec_q: &ModelSpec,
    k: usize,
    samples: u64,
    seed: u64,
) -> Result<LbGapEstimate> {
    spec_p.validate()?;
    spec_q.validate()?;
    if spec_p.n != spec_q.n {
        return Err(Error::SizeMismatch {
            left: spec_p.n,
            right: spec_q.n,
        });
    }
    if samples < 100 {
        return Err(Error::InvalidSpec(format!(
            "lb_cycle_gap needs at least 100 samples, got {samples}"
        )));
    }
    let results: Vec<Result<(RunningStats, RunningStats, bool)>> = (0..samples)
        .collect::<Vec<u64>>()
        .par_chunks(64)
        .map(|chunk| {
            let mut sp = RunningStats::new();
            let mut sq = RunningStats::new();
            let mut exact = true;
            for &idx in chunk {
                for (spec, stats, stream) in
                    [(spec_p, &mut sp, 2 * idx), (spec_q, &mut sq, 2 * idx + 1)]
                {
                    let g = sample_model(spec, derive_seed(seed, stream)).graph;
                    let packing = max_disjoint_packing(&g, k, derive_seed(seed, !stream))?;
                    exact &= packing.exactness == Exactness::Exact;
                    stats.push(packing.size as f64);
                }
            }
            Ok((sp, sq, exact))
        })
        .collect();
    let mut sp = RunningStats::new();
    let mut sq = RunningStats::new();
    let mut all_exact = true;
    for r in results {
        let (a, b, exact) = r?;
        sp.merge(&a);
        sq.merge(&b);
        all_exact &= exact;
    }
    let gap_value = (sp.mean() - sq.mean()).abs();
    let se = (sp.se_mean().powi(2) + sq.se_mean().powi(2)).sqrt();
    Ok(LbGapEstimate {
        gap: MonteCarloEstimate {
            estimate: gap_value,
            se,
            samples,
        },
        mean_p: sp.mean(),
        mean_q: sq.mean(),
        certified_lb: (gap_value - 2.0 * se).max(0.0),
        all_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::{distance_matrix, ClassEnumeration};
    use crate::models::{exact_distribution, Flavor};

    fn instance(
        n: usize,
        c: f64,
        delta: f64,
        flavor: Flavor,
    ) -> (GraphDistribution, GraphDistribution, DistanceMatrix) {
        let e = ClassEnumeration::enumerate(n).unwrap();
        let d = distance_matrix(&e).unwrap();
        let p = exact_distribution(&ModelSpec::new(n, c, delta, flavor).unwrap(), &e, false)
            .unwrap();
        let q = exact_distribution(&ModelSpec::uniform(n, c).unwrap(), &e, false).unwrap();
        (p, q, d)
    }

    #[test]
    fn identical_marginals_cost_zero() {
        let (_, q, d) = instance(3, 1.0, 0.0, Flavor::PlantedAssortative);
        let plan = solve_primal(&q, &q, &d).unwrap();
        assert!(plan.cost.abs() < 1e-12);
        let witness = solve_dual(&q, &q, &d).unwrap();
        assert!(witness.objective.abs() < 1e-12);
    }

    #[test]
    fn delta_zero_cost_zero() {
        for n in 2..=5 {
            let (p, q, d) = instance(n, 2.0, 0.0, Flavor::PlantedAssortative);
            let plan = solve_primal(&p, &q, &d).unwrap();
            assert!(plan.cost.abs() < 1e-9, "n = {n}: cost {}", plan.cost);
        }
    }

    #[test]
    fn n2_unclamped_cost_zero_for_all_delta() {
        for delta in [0.0, 0.5, 1.0] {
            let (p, q, d) = instance(2, 1.0, delta, Flavor::PlantedAssortative);
            let plan = solve_primal(&p, &q, &d).unwrap();
            assert!(plan.cost.abs() < 1e-9, "delta = {delta}");
        }
    }

    #[test]
    fn n2_clamped_instance_has_known_positive_cost() {
        // clamp((c+delta)/n) breaks the marginal identity: cost is exactly
        // |1 - 1/2| at (n, c, delta) = (2, 2, 2)
        let (p, q, d) = instance(2, 2.0, 2.0, Flavor::PlantedAssortative);
        let plan = solve_primal(&p, &q, &d).unwrap();
        assert!((plan.cost - 0.5).abs() < 1e-9, "cost {}", plan.cost);
        let witness = solve_dual(&p, &q, &d).unwrap();
        assert!((witness.objective - 0.5).abs() < 1e-9);
    }

    #[test]
    fn matches_lp_oracle_values() {
        // frozen from an independent scipy.linprog (HiGHS) pipeline
        let cases = [
            (3, 2.0, 1.0, Flavor::PlantedAssortative, 0.148148148148),
            (3, 2.0, 2.0, Flavor::PlantedAssortative, 0.574074074074),
            (3, 2.0, 2.0, Flavor::PlantedDisassortative, 0.518518518519),
            (4, 1.0, 1.0, Flavor::PlantedAssortative, 0.159667968750),
            (4, 1.0, 1.0, Flavor::PlantedDisassortative, 0.181152343750),
            (4, 0.5, 0.25, Flavor::PlantedAssortative, 0.003179073334),
            (5, 1.0, 0.5, Flavor::PlantedAssortative, 0.021023011000),
            (5, 2.0, 2.0, Flavor::PlantedDisassortative, 1.244004352000),
        ];
        for (n, c, delta, flavor, expect) in cases {
            let (p, q, d) = instance(n, c, delta, flavor);
            let plan = solve_primal(&p, &q, &d).unwrap();
            assert!(
                (plan.cost - expect).abs() < 1e-9,
                "n={n} c={c} delta={delta} {flavor}: {} vs {expect}",
                plan.cost
            );
            let witness = solve_dual(&p, &q, &d).unwrap();
            assert!(
                (witness.objective - plan.cost).abs() < DUALITY_GAP_TOL,
                "duality gap at n={n} c={c} delta={delta} {flavor}"
            );
        }
    }

    #[test]
    fn plan_marginals_and_witness_lipschitz_validated() {
        let (p, q, d) = instance(5, 2.0, 1.0, Flavor::PlantedAssortative);
        let plan = solve_primal(&p, &q, &d).unwrap();
        plan.validate(p.probs(), q.probs()).unwrap();
        let witness = solve_dual(&p, &q, &d).unwrap();
        witness.validate(&d).unwrap();
        // weak duality holds between the two certificates
        assert!(witness.objective <= plan.cost + DUALITY_GAP_TOL);
    }

    #[test]
    fn lb_formula_values() {
        assert!((lb_formula(3, 1.0) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(lb_formula(4, 0.0), 0.0);
        assert!((lb_formula(5, 2.0) - 3.2).abs() < 1e-15);
    }

    #[test]
    fn baseline_zero_at_delta_zero() {
        let p = ModelSpec::new(100, 2.0, 0.0, Flavor::PlantedAssortative).unwrap();
        let q = ModelSpec::uniform(100, 2.0).unwrap();
        let est = baseline_coupling_cost(&p, &q, 200, 1).unwrap();
        assert_eq!(est.hamming.estimate, 0.0);
    }

    #[test]
    fn baseline_matches_closed_form() {
        // every pair mismatches with probability delta/n, so the mean
        // Hamming cost is C(n,2) delta / n = (n-1) delta / 2
        let (n, c, delta) = (1000, 2.0, 1.0);
        let p = ModelSpec::new(n, c, delta, Flavor::PlantedAssortative).unwrap();
        let q = ModelSpec::uniform(n, c).unwrap();
        let est = baseline_coupling_cost(&p, &q, 4000, 7).unwrap();
        let expect = (n as f64 - 1.0) * delta / 2.0;
        assert!(
            (est.hamming.estimate - expect).abs() <= 3.0 * est.hamming.se,
            "{} vs {expect} (se {})",
            est.hamming.estimate,
            est.hamming.se
        );
    }

    #[test]
    fn baseline_matches_exhaustive_n4() {
        // n = 4, c = 2, delta = 2: no clamping (a = n), expected Hamming
        // = C(4,2) * delta/n = 3; the spin-exhaustive value equals the
        // closed form because every pair type mismatches at delta/n
        let (n, c, delta) = (4, 2.0, 2.0);
        let p = ModelSpec::new(n, c, delta, Flavor::PlantedAssortative).unwrap();
        let q = ModelSpec::uniform(n, c).unwrap();
        let est = baseline_coupling_cost(&p, &q, 20_000, 3).unwrap();
        assert!(
            (est.hamming.estimate - 3.0).abs() <= 3.0 * est.hamming.se,
            "{} vs 3.0",
            est.hamming.estimate
        );
    }

    #[test]
    fn lb_gap_consistent_with_zero_at_delta_zero() {
        let p = ModelSpec::new(300, 2.0, 0.0, Flavor::PlantedAssortative).unwrap();
        let q = ModelSpec::uniform(300, 2.0).unwrap();
        let est = lb_cycle_gap(&p, &q, 3, 400, 11).unwrap();
        assert!(est.all_exact);
        assert!(
            est.gap.estimate <= 3.0 * est.gap.se,
            "gap {} se {}",
            est.gap.estimate,
            est.gap.se
        );
    }

    #[test]
    fn lb_gap_rejects_tiny_sample_counts() {
        let p = ModelSpec::new(50, 2.0, 1.0, Flavor::PlantedAssortative).unwrap();
        let q = ModelSpec::uniform(50, 2.0).unwrap();
        assert!(lb_cycle_gap(&p, &q, 3, 50, 0).is_err());
    }
}
