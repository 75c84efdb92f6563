//! Transportation simplex (MODI) for the primal optimal transport plan.
//!
//! Costs are integer edit distances held in f64, so potentials and reduced
//! costs stay exact; flows are float probability masses. The basis is the
//! spanning tree of basic cells over the bipartite row/column node set.

use crate::error::{Error, Result};

/// Reduced costs above this are treated as nonnegative (they are exact
/// integers here, so the threshold only guards degenerate float dust).
const REDUCED_COST_TOL: f64 = 1e-9;

pub struct Transportation {
    rows: usize,
    cols: usize,
    cost: Vec<f64>,
    flow: Vec<f64>,
    basic: Vec<bool>,
    /// basis adjacency: nodes 0..rows are rows, rows..rows+cols are columns
    adj: Vec<Vec<u32>>,
}

impl Transportation {
    /// Solves min sum x_ij c_ij with row sums `supply` and column sums
    /// `demand` (assumed balanced). Returns the optimal flow matrix.
    pub fn solve(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<Vec<f64>> {
        let (rows, cols) = (supply.len(), demand.len());
        debug_assert_eq!(cost.len(), rows * cols);
        let mut t = Transportation {
            rows,
            cols,
            cost: cost.to_vec(),
            flow: vec![0.0; rows * cols],
            basic: vec![false; rows * cols],
            adj: vec![Vec::new(); rows + cols],
        };
        t.northwest_corner(supply, demand);
        t.iterate()?;
        Ok(t.flow)
    }

    fn add_basic(&mut self, i: usize, j: usize) {
        self.basic[i * self.cols + j] = true;
        self.adj[i].push((self.rows + j) as u32);
        self.adj[self.rows + j].push(i as u32);
    }

    fn drop_basic(&mut self, i: usize, j: usize) {
        self.basic[i * self.cols + j] = false;
        let col_node = (self.rows + j) as u32;
        self.adj[i].retain(|&x| x != col_node);
        self.adj[self.rows + j].retain(|&x| x != i as u32);
    }

    /// Initial basic feasible solution with exactly rows + cols - 1 basic
    /// cells (zero allocations included on ties).
    fn northwest_corner(&mut self, supply: &[f64], demand: &[f64]) {
        let (mut i, mut j) = (0usize, 0usize);
        let mut rp = supply[0];
        let mut cq = demand[0];
        loop {
            let take = rp.min(cq).max(0.0);
            self.flow[i * self.cols + j] = take;
            self.add_basic(i, j);
            rp -= take;
            cq -= take;
            if i == self.rows - 1 && j == self.cols - 1 {
                break;
            }
            if j == self.cols - 1 || (i < self.rows - 1 && rp <= cq) {
                i += 1;
                rp = supply[i];
            } else {
                j += 1;
                cq = demand[j];
            }
        }
    }

    /// Row/column potentials from u_i + v_j = c_ij over the basis tree.
    fn potentials(&self) -> (Vec<f64>, Vec<f64>) {
        let mut u = vec![f64::NAN; self.rows];
        let mut v = vec![f64::NAN; self.cols];
        let mut stack = vec![0u32];
        u[0] = 0.0;
        while let Some(node) = stack.pop() {
            for &next in &self.adj[node as usize] {
                let (r, c) = if (node as usize) < self.rows {
                    (node as usize, next as usize - self.rows)
                } else {
                    (next as usize, node as usize - self.rows)
                };
                let cost = self.cost[r * self.cols + c];
                if (node as usize) < self.rows {
                    if v[c].is_nan() {
                        v[c] = cost - u[r];
                        stack.push(next);
                    }
                } else if u[r].is_nan() {
                    u[r] = cost - v[c];
                    stack.push(next);
                }
            }
        }
        (u, v)
    }

    /// Unique basis-tree path from row node `from` to column node `to`.
    fn tree_path(&self, from: u32, to: u32) -> Vec<u32> {
        let total = self.rows + self.cols;
        let mut parent = vec![u32::MAX; total];
        parent[from as usize] = from;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(node) = queue.pop_front() {
            if node == to {
                break;
            }
            for &next in &self.adj[node as usize] {
                if parent[next as usize] == u32::MAX {
                    parent[next as usize] = node;
                    queue.push_back(next);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur as usize];
            path.push(cur);
        }
        path.reverse();
        path
    }

    fn iterate(&mut self) -> Result<()> {
        let max_pivots = 200 * (self.rows + self.cols) * (self.rows + self.cols);
        for _ in 0..max_pivots {
            let (u, v) = self.potentials();
            // entering cell: most negative reduced cost
            let mut enter = None;
            let mut best = -REDUCED_COST_TOL;
            for i in 0..self.rows {
                for j in 0..self.cols {
                    if !self.basic[i * self.cols + j] {
                        let reduced = self.cost[i * self.cols + j] - u[i] - v[j];
                        if reduced < best {
                            best = reduced;
                            enter = Some((i, j));
                        }
                    }
                }
            }
            let Some((ei, ej)) = enter else {
                return Ok(());
            };
            // the cycle alternates +/- starting with + on the entering cell;
            // tree path runs column-node -> ... -> row-node
            let path = self.tree_path((self.rows + ej) as u32, ei as u32);
            let mut minus_cells = Vec::new();
            let mut plus_cells = vec![(ei, ej)];
            for (step, pair) in path.windows(2).enumerate() {
                let (a, b) = (pair[0] as usize, pair[1] as usize);
                let (r, c) = if a < self.rows {
                    (a, b - self.rows)
                } else {
                    (b, a - self.rows)
                };
                if step % 2 == 0 {
                    minus_cells.push((r, c));
                } else {
                    plus_cells.push((r, c));
                }
            }
            let (theta, leave) = minus_cells
                .iter()
                .map(|&(r, c)| (self.flow[r * self.cols + c], (r, c)))
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .expect("cycle has at least one minus cell");
            for &(r, c) in &plus_cells {
                self.flow[r * self.cols + c] += theta;
            }
            for &(r, c) in &minus_cells {
                self.flow[r * self.cols + c] -= theta;
            }
            self.flow[leave.0 * self.cols + leave.1] = 0.0;
            self.drop_basic(leave.0, leave.1);
            self.add_basic(ei, ej);
        }
        Err(Error::Solver(
            "transportation simplex exceeded its pivot budget".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn total_cost(flow: &[f64], cost: &[f64]) -> f64 {
        flow.iter().zip(cost).map(|(f, c)| f * c).sum()
    }

    #[test]
    fn identity_instance_costs_zero() {
        let p = [0.3, 0.7];
        let cost = [0.0, 1.0, 1.0, 0.0];
        let flow = Transportation::solve(&p, &p, &cost).unwrap();
        assert!(total_cost(&flow, &cost) < 1e-12);
    }

    #[test]
    fn textbook_three_by_three() {
        // balanced instance with a known optimum of 0.8:
        // mass 0.5 at 0 -> demand 0.4 at 0 (cost 0) + 0.1 to 1 (cost 1)
        let p = [0.5, 0.3, 0.2];
        let q = [0.4, 0.4, 0.2];
        let cost = [0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0];
        let flow = Transportation::solve(&p, &q, &cost).unwrap();
        assert!((total_cost(&flow, &cost) - 0.1).abs() < 1e-12);
        for (i, &pi) in p.iter().enumerate() {
            let row: f64 = flow[i * 3..(i + 1) * 3].iter().sum();
            assert!((row - pi).abs() < 1e-12);
        }
        for (j, &qj) in q.iter().enumerate() {
            let col: f64 = (0..3).map(|i| flow[i * 3 + j]).sum();
            assert!((col - qj).abs() < 1e-12);
        }
    }

    #[test]
    fn moves_mass_across_a_chain() {
        // all mass at the left end must reach the right end, cost = chain length
        let p = [1.0, 0.0, 0.0];
        let q = [0.0, 0.0, 1.0];
        let cost = [0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0];
        let flow = Transportation::solve(&p, &q, &cost).unwrap();
        assert!((total_cost(&flow, &cost) - 2.0).abs() < 1e-12);
    }
}
