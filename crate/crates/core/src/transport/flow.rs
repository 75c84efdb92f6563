//! Successive shortest paths with node potentials, for the dual witness.
//!
//! The dual of min-cost transshipment with metric arc costs d_ij and node
//! balances r = p - q is exactly the Kantorovich problem: maximize r.f over
//! f with f_i - f_j <= d_ij. At termination every residual arc has
//! nonnegative reduced cost, which makes the potential vector itself a
//! feasible (and by complementary slackness optimal) witness. Costs are
//! integers, Dijkstra distances stay integers, so the witness is exact.

/// Supplies below this are treated as settled.
const SUPPLY_TOL: f64 = 1e-12;

/// Runs min-cost transshipment over the complete metric graph and returns
/// the optimal node potentials.
pub fn optimal_potentials(balance: &[f64], dist: &dyn Fn(usize, usize) -> f64) -> Vec<f64> {
    let k = balance.len();
    let mut excess = balance.to_vec();
    let mut flow = vec![0.0f64; k * k]; // forward flow i -> j
    let mut pi = vec![0.0f64; k];
    let mut dijkstra_dist = vec![f64::INFINITY; k];
    let mut parent = vec![usize::MAX; k];
    let mut done = vec![false; k];
    loop {
        let Some(source) = (0..k).find(|&i| excess[i] > SUPPLY_TOL) else {
            break;
        };
        // dense Dijkstra over reduced costs rc(u,v) = c(u,v) + pi[u] - pi[v]
        for v in 0..k {
            dijkstra_dist[v] = f64::INFINITY;
            parent[v] = usize::MAX;
            done[v] = false;
        }
        dijkstra_dist[source] = 0.0;
        for _ in 0..k {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..k {
                if !done[v] && dijkstra_dist[v] < best {
                    best = dijkstra_dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            for v in 0..k {
                if v == u {
                    continue;
                }
                // forward arc u -> v always exists; a backward arc exists
                // when flow v -> u is positive, at cost -d(v, u)
                let forward = dist(u, v) + pi[u] - pi[v];
                let arc_cost = if flow[v * k + u] > 0.0 {
                    forward.min(-dist(v, u) + pi[u] - pi[v])
                } else {
                    forward
                };
                let cand = dijkstra_dist[u] + arc_cost;
                if cand < dijkstra_dist[v] - 1e-15 {
                    dijkstra_dist[v] = cand;
                    parent[v] = u;
                }
            }
        }
        let sink = (0..k)
            .filter(|&i| excess[i] < -SUPPLY_TOL && dijkstra_dist[i].is_finite())
            .min_by(|&a, &b| dijkstra_dist[a].total_cmp(&dijkstra_dist[b]))
            .expect("complete metric graph always reaches a deficit node");
        for v in 0..k {
            if dijkstra_dist[v].is_finite() {
                pi[v] += dijkstra_dist[v].min(dijkstra_dist[sink]);
            }
        }
        let amount = excess[source].min(-excess[sink]);
        let mut v = sink;
        while v != source {
            let u = parent[v];
            // cancel opposing flow before adding forward flow
            let cancel = amount.min(flow[v * k + u]);
            flow[v * k + u] -= cancel;
            flow[u * k + v] += amount - cancel;
            v = u;
        }
        excess[source] -= amount;
        excess[sink] += amount;
    }
    pi
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_gap() {
        // move 0.5 across distance 3: potentials must spread by 3
        let balance = [0.5, -0.5];
        let d = |i: usize, j: usize| if i == j { 0.0 } else { 3.0 };
        let pi = optimal_potentials(&balance, &d);
        let objective = balance[0] * pi[0] + balance[1] * pi[1];
        assert!((objective.abs() - 1.5).abs() < 1e-12, "pi = {pi:?}");
    }

    #[test]
    fn balanced_instance_needs_no_flow() {
        let balance = [0.0, 0.0, 0.0];
        let d = |i: usize, j: usize| if i == j { 0.0 } else { 1.0 };
        let pi = optimal_potentials(&balance, &d);
        assert!(pi.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn line_metric_three_points() {
        // points 0,1,2 on a line, distance |i-j|; move 1.0 from 0 to 2
        let balance = [1.0, 0.0, -1.0];
        let d = |i: usize, j: usize| (i as f64 - j as f64).abs();
        let pi = optimal_potentials(&balance, &d);
        let objective: f64 = balance.iter().zip(&pi).map(|(r, f)| r * f).sum();
        assert!((objective.abs() - 2.0).abs() < 1e-12);
        // Lipschitz feasibility
        for i in 0..3 {
            for j in 0..3 {
                assert!((pi[i] - pi[j]).abs() <= d(i, j) + 1e-12);
            }
        }
    }
}
