//! Simple undirected labeled graphs with set-semantics edges.
//!
//! Two representations back the same type: sorted adjacency lists (good up to
//! n ~ 10^6 for the Monte Carlo paths) and an upper-triangle bitmask for
//! n <= 11 used by the exact isomorphism machinery.

use crate::error::{Error, Result};

/// Largest n whose edge set fits the u64 upper-triangle mask.
pub const MASK_VERTEX_CAP: usize = 11;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    m: usize,
}

impl Graph {
    /// Empty graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Builds a graph from an edge iterator. Endpoints may come in either
    /// order; self-loops and out-of-range endpoints are rejected, duplicates
    /// collapse to one edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (i, j) in edges {
            g.check_pair(i, j)?;
            g.set_edge(i, j, true);
        }
        Ok(g)
    }

    /// Complete graph on `n` vertices.
    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                g.set_edge(i, j, true);
            }
        }
        g
    }

    /// Cycle 0-1-...-(n-1)-0.
    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            g.set_edge(i, (i + 1) % n, true);
        }
        g
    }

    /// Path 0-1-...-(n-1).
    pub fn path(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n.saturating_sub(1) {
            g.set_edge(i, i + 1, true);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i == j || i >= self.n || j >= self.n {
            return false;
        }
        self.adj[i].binary_search(&(j as u32)).is_ok()
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j || i >= self.n || j >= self.n {
            return Err(Error::InvalidVertex { i, j, n: self.n });
        }
        Ok(())
    }

    /// In-place edge assignment, keeping adjacency lists sorted.
    pub(crate) fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        let (a, b) = (i as u32, j as u32);
        match (self.adj[i].binary_search(&b), present) {
            (Err(pos), true) => {
                self.adj[i].insert(pos, b);
                let pos = self.adj[j].binary_search(&a).unwrap_err();
                self.adj[j].insert(pos, a);
                self.m += 1;
            }
            (Ok(pos), false) => {
                self.adj[i].remove(pos);
                let pos = self.adj[j].binary_search(&a).unwrap();
                self.adj[j].remove(pos);
                self.m -= 1;
            }
            _ => {}
        }
    }

    /// Returns a copy with edge (i, j) flipped.
    pub fn toggle_edge(&self, i: usize, j: usize) -> Result<Graph> {
        self.check_pair(i, j)?;
        let mut g = self.clone();
        g.set_edge(i, j, !self.has_edge(i, j));
        Ok(g)
    }

    /// Returns a copy with edge (i, j) removed (no-op if absent).
    pub fn remove_edge(&self, i: usize, j: usize) -> Result<Graph> {
        self.check_pair(i, j)?;
        let mut g = self.clone();
        g.set_edge(i, j, false);
        Ok(g)
    }

    /// Edges in ascending (i, j) order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m);
        for i in 0..self.n {
            for &j in &self.adj[i] {
                if (j as usize) > i {
                    out.push((i, j as usize));
                }
            }
        }
        out
    }

    /// Relabels vertices: vertex v becomes perm[v].
    pub fn apply_permutation(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::empty(self.n);
        for (i, j) in self.edges() {
            let (a, b) = (perm[i], perm[j]);
            g.set_edge(a.min(b), a.max(b), true);
        }
        g
    }

    /// Rank of pair (i, j), i < j, in lexicographic pair order.
    pub fn pair_rank(n: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < n);
        i * (2 * n - i - 1) / 2 + (j - i - 1)
    }

    /// Upper-triangle bitmask; bit `pair_rank(n, i, j)` set iff edge present.
    pub fn edge_mask(&self) -> Result<u64> {
        if self.n > MASK_VERTEX_CAP {
            return Err(Error::CapExceeded {
                what: "edge bitmask",
                cap: MASK_VERTEX_CAP,
                got: self.n,
            });
        }
        let mut mask = 0u64;
        for (i, j) in self.edges() {
            mask |= 1 << Self::pair_rank(self.n, i, j);
        }
        Ok(mask)
    }

    /// Inverse of [`Graph::edge_mask`].
    pub fn from_mask(n: usize, mask: u64) -> Graph {
        assert!(n <= MASK_VERTEX_CAP);
        let mut g = Graph::empty(n);
        for i in 0..n {
            for j in (i + 1)..n {
                if mask >> Self::pair_rank(n, i, j) & 1 == 1 {
                    g.set_edge(i, j, true);
                }
            }
        }
        g
    }
}

/// Parses the edge-list text format: first line `n m`, then `m` lines `i j`.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header line: {header:?}")))?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Parse(format!("bad header line: {header:?}")))?;
    let mut g = Graph::empty(n);
    let mut count = 0;
    for line in lines {
        let mut it = line.split_whitespace();
        let i: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
        let j: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
        g.check_pair(i, j)?;
        g.set_edge(i, j, true);
        count += 1;
    }
    if count != m || g.edge_count() != m {
        return Err(Error::Parse(format!(
            "header declares {m} edges, found {count} lines ({} distinct)",
            g.edge_count()
        )));
    }
    Ok(g)
}

/// Writes the edge-list text format (ascending pair order, LF endings).
pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (i, j) in g.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}
