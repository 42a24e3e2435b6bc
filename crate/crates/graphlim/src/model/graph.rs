//! Simple graphs on `[n]`, stored as a dense symmetric adjacency relation.

use crate::error::{Error, Result};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    adj: Vec<bool>,
}

impl SimpleGraph {
    pub fn empty(n: usize) -> Self {
        SimpleGraph { n, adj: vec![false; n * n] }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    g.adj[u * n + v] = true;
                }
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for u in 0..n {
            g.set_edge(u, (u + 1) % n, true);
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = SimpleGraph::empty(n);
        for u in 0..n.saturating_sub(1) {
            g.set_edge(u, u + 1, true);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = SimpleGraph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::invalid(format!("loop at vertex {u}")));
            }
            g.set_edge(u, v, true);
        }
        Ok(g)
    }

    /// Erdős–Rényi draw `G(n,p)`.
    pub fn gnp(n: usize, p: f64, rng: &mut impl Rng) -> Self {
        let mut g = SimpleGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen::<f64>() < p {
                    g.set_edge(u, v, true);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.n + v]
    }

    pub fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        assert_ne!(u, v, "no loops");
        self.adj[u * self.n + v] = present;
        self.adj[v * self.n + u] = present;
    }

    pub fn edge_count(&self) -> usize {
        let mut c = 0;
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    c += 1;
                }
            }
        }
        c
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn degree(&self, u: usize) -> usize {
        (0..self.n).filter(|&v| self.has_edge(u, v)).count()
    }

    pub fn complement(&self) -> SimpleGraph {
        let mut g = SimpleGraph::empty(self.n);
        for u in 0..self.n {
            for v in 0..self.n {
                if u != v {
                    g.adj[u * self.n + v] = !self.adj[u * self.n + v];
                }
            }
        }
        g
    }

    /// Induced subgraph on `vertices` (kept in the given order).
    pub fn induced(&self, vertices: &[usize]) -> SimpleGraph {
        let q = vertices.len();
        let mut g = SimpleGraph::empty(q);
        for a in 0..q {
            for b in a + 1..q {
                if self.has_edge(vertices[a], vertices[b]) {
                    g.set_edge(a, b, true);
                }
            }
        }
        g
    }

    /// Relabeled copy: vertex `i` of the result is vertex `perm[i]` of `self`.
    pub fn relabel(&self, perm: &[usize]) -> SimpleGraph {
        self.induced(perm)
    }

    /// Pack the upper triangle into a bit key (usable for n <= 11).
    pub fn bit_key(&self) -> u64 {
        assert!(self.n <= 11, "bit key supports n <= 11");
        let mut key = 0u64;
        let mut bit = 0;
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.has_edge(u, v) {
                    key |= 1 << bit;
                }
                bit += 1;
            }
        }
        key
    }

    /// Graph on `q` labeled vertices from an upper-triangle bit key.
    pub fn from_bit_key(q: usize, key: u64) -> SimpleGraph {
        let mut g = SimpleGraph::empty(q);
        let mut bit = 0;
        for u in 0..q {
            for v in u + 1..q {
                if key >> bit & 1 == 1 {
                    g.set_edge(u, v, true);
                }
                bit += 1;
            }
        }
        g
    }
}

/// `t`-fold equitable blow-up: each vertex becomes `t` copies, copies of `u`
/// and `v` adjacent iff `uv` was an edge (copies of one vertex stay
/// non-adjacent).
pub fn blow_up(g: &SimpleGraph, t: usize) -> SimpleGraph {
    assert!(t >= 1);
    let n = g.n();
    let mut out = SimpleGraph::empty(n * t);
    for u in 0..n {
        for v in 0..n {
            if u != v && g.has_edge(u, v) {
                for a in 0..t {
                    for b in 0..t {
                        out.adj[(u * t + a) * n * t + (v * t + b)] = true;
                    }
                }
            }
        }
    }
    out
}
