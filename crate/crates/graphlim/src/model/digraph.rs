//! Complete edge-colored directed graphs, (k,m)-colorings and their shadows,
//! and node-coloring data.
//!
//! A colored digraph assigns exactly one of `k` colors (indexed `0..k`) to
//! every ordered pair of distinct vertices; the diagonal carries the
//! undefined-color sentinel. Colors `0..m` are the *visible* range of a
//! (k,m)-coloring: the shadow keeps an edge `uv` exactly when one of
//! `colors(u,v)`, `colors(v,u)` is visible.

use crate::error::{Error, Result};
use crate::model::graph::SimpleGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredDigraph {
    n: usize,
    k: usize,
    /// Row-major `n x n`; diagonal entries hold `k` as the sentinel.
    colors: Vec<usize>,
}

impl ColoredDigraph {
    /// All ordered pairs colored `c`.
    pub fn uniform(n: usize, k: usize, c: usize) -> Self {
        assert!(c < k);
        let mut colors = vec![c; n * n];
        for i in 0..n {
            colors[i * n + i] = k;
        }
        ColoredDigraph { n, k, colors }
    }

    pub fn from_colors(n: usize, k: usize, colors: Vec<usize>) -> Result<Self> {
        if colors.len() != n * n {
            return Err(Error::Dimension(format!("expected {} colors", n * n)));
        }
        for i in 0..n {
            for j in 0..n {
                let c = colors[i * n + j];
                if i == j {
                    if c != k {
                        return Err(Error::invalid(format!(
                            "diagonal entry ({i},{i}) must carry the sentinel"
                        )));
                    }
                } else if c >= k {
                    return Err(Error::invalid(format!("color {c} out of range at ({i},{j})")));
                }
            }
        }
        Ok(ColoredDigraph { n, k, colors })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Color of the ordered pair `(i,j)`; `None` on the diagonal.
    pub fn color(&self, i: usize, j: usize) -> Option<usize> {
        if i == j {
            None
        } else {
            Some(self.colors[i * self.n + j])
        }
    }

    pub fn set_color(&mut self, i: usize, j: usize, c: usize) {
        assert_ne!(i, j, "diagonal carries the undefined color");
        assert!(c < self.k);
        self.colors[i * self.n + j] = c;
    }

    /// Induced colored subgraph on `vertices`, kept in the given order.
    pub fn induced(&self, vertices: &[usize]) -> ColoredDigraph {
        let q = vertices.len();
        let mut out = ColoredDigraph::uniform(q, self.k, 0);
        for a in 0..q {
            for b in 0..q {
                if a != b {
                    out.set_color(a, b, self.color(vertices[a], vertices[b]).unwrap());
                }
            }
        }
        out
    }

    /// Relabeled copy: pair `(i,j)` of the result carries the color of
    /// `(perm[i], perm[j])`.
    pub fn relabel(&self, perm: &[usize]) -> ColoredDigraph {
        self.induced(perm)
    }

    /// Density of ordered pairs colored `c`, normalized by `n^2`.
    pub fn color_density(&self, c: usize) -> f64 {
        let mut count = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && self.colors[i * self.n + j] == c {
                    count += 1;
                }
            }
        }
        count as f64 / (self.n * self.n) as f64
    }

    /// Density of ordered pairs with `colors(i,j)=a` and `colors(j,i)=b`.
    pub fn pair_density(&self, a: usize, b: usize) -> f64 {
        let mut count = 0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j
                    && self.colors[i * self.n + j] == a
                    && self.colors[j * self.n + i] == b
                {
                    count += 1;
                }
            }
        }
        count as f64 / (self.n * self.n) as f64
    }
}

/// Is `(a,b)` a visible color pair of a (k,m)-coloring (at least one
/// component below `m`)?
pub fn is_visible_pair(a: usize, b: usize, m: usize) -> bool {
    a < m || b < m
}

/// The shadow: erase pairs whose two directions are both colored `>= m`,
/// forget orientation and color.
pub fn shadow(g: &ColoredDigraph, m: usize) -> SimpleGraph {
    let n = g.n();
    let mut out = SimpleGraph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            let a = g.color(u, v).unwrap();
            let b = g.color(v, u).unwrap();
            if is_visible_pair(a, b, m) {
                out.set_edge(u, v, true);
            }
        }
    }
    out
}

/// A (k,m)-coloring: a colored digraph together with the shadow it encodes.
#[derive(Debug, Clone)]
pub struct KMColoring {
    base: ColoredDigraph,
    m: usize,
    shadow: SimpleGraph,
}

impl KMColoring {
    pub fn new(base: ColoredDigraph, m: usize) -> Result<Self> {
        if m > base.k() {
            return Err(Error::invalid(format!("m={m} exceeds k={}", base.k())));
        }
        let shadow = shadow(&base, m);
        Ok(KMColoring { base, m, shadow })
    }

    /// Like `new`, but additionally checks the shadow equals `expected`.
    pub fn with_shadow(base: ColoredDigraph, m: usize, expected: &SimpleGraph) -> Result<Self> {
        let c = KMColoring::new(base, m)?;
        if &c.shadow != expected {
            return Err(Error::invalid("coloring does not shade to the given graph"));
        }
        Ok(c)
    }

    pub fn base(&self) -> &ColoredDigraph {
        &self.base
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.base.k()
    }

    pub fn shadow(&self) -> &SimpleGraph {
        &self.shadow
    }
}

/// Assignment of `[n]` into `k` (possibly empty) parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodePartition {
    classes: Vec<usize>,
    k: usize,
}

impl NodePartition {
    pub fn new(classes: Vec<usize>, k: usize) -> Result<Self> {
        if classes.iter().any(|&c| c >= k) {
            return Err(Error::invalid("node class out of range"));
        }
        Ok(NodePartition { classes, k })
    }

    pub fn n(&self) -> usize {
        self.classes.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn class(&self, v: usize) -> usize {
        self.classes[v]
    }

    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn part(&self, c: usize) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.classes[v] == c).collect()
    }
}

/// A pair of partitions of `[k]^2` into `m` (possibly empty) parts: the
/// first routes ordered pairs of node classes to edge parts, the second to
/// non-edge parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DPair {
    k: usize,
    m: usize,
    /// Row-major `[k]^2 -> [m]`.
    edge_part: Vec<usize>,
    nonedge_part: Vec<usize>,
}

impl DPair {
    pub fn new(k: usize, m: usize, edge_part: Vec<usize>, nonedge_part: Vec<usize>) -> Result<Self> {
        if edge_part.len() != k * k || nonedge_part.len() != k * k {
            return Err(Error::Dimension(format!("each map must cover all {} pairs", k * k)));
        }
        if edge_part.iter().chain(nonedge_part.iter()).any(|&p| p >= m) {
            return Err(Error::invalid("part index out of range"));
        }
        Ok(DPair { k, m, edge_part, nonedge_part })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn edge_part_of(&self, a: usize, b: usize) -> usize {
        self.edge_part[a * self.k + b]
    }

    pub fn nonedge_part_of(&self, a: usize, b: usize) -> usize {
        self.nonedge_part[a * self.k + b]
    }

    /// Max-cut wiring for k=2: edge part 0 collects the cross pairs
    /// (0,1),(1,0), part 1 the rest; the non-edge partition mirrors it.
    pub fn maxcut() -> DPair {
        DPair::new(2, 2, vec![1, 0, 0, 1], vec![1, 0, 0, 1]).unwrap()
    }

    /// k=m parts, edge part 0 = cross pairs, part 1 = monochromatic pairs:
    /// part 0 of the coloring collects the edges kept by a k-coloring.
    pub fn colorable(k: usize) -> DPair {
        let mut edge = vec![0usize; k * k];
        for a in 0..k {
            edge[a * k + a] = 1;
        }
        DPair::new(k, 2, edge.clone(), edge).unwrap()
    }
}

/// A node-(k,m)-coloring instance: graph, node partition, and class-pair
/// routing (rank 2; higher-rank instances are handled through the layered
/// array form in the energies module).
#[derive(Debug, Clone)]
pub struct NodeKMColoring {
    pub graph: SimpleGraph,
    pub t: NodePartition,
    pub d: DPair,
}

impl NodeKMColoring {
    pub fn new(graph: SimpleGraph, t: NodePartition, d: DPair) -> Result<Self> {
        if t.n() != graph.n() {
            return Err(Error::Dimension("node partition size must match the graph".into()));
        }
        if t.k() != d.k() {
            return Err(Error::Dimension("node partition and pair routing disagree on k".into()));
        }
        Ok(NodeKMColoring { graph, t, d })
    }

    pub fn r(&self) -> usize {
        2
    }

    /// The induced edge-2m-colored digraph: ordered pair `(u,v)` gets color
    /// `edge_part` if `uv` is an edge and `m + nonedge_part` otherwise.
    pub fn as_colored_digraph(&self) -> ColoredDigraph {
        let n = self.graph.n();
        let m = self.d.m();
        let mut out = ColoredDigraph::uniform(n, 2 * m, 0);
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let (a, b) = (self.t.class(u), self.t.class(v));
                let c = if self.graph.has_edge(u.min(v), u.max(v)) {
                    self.d.edge_part_of(a, b)
                } else {
                    m + self.d.nonedge_part_of(a, b)
                };
                out.set_color(u, v, c);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shadow_of_all_visible_is_complete() {
        let g = ColoredDigraph::uniform(4, 3, 0);
        assert_eq!(shadow(&g, 1), SimpleGraph::complete(4));
    }

    #[test]
    fn shadow_of_all_invisible_is_empty() {
        let g = ColoredDigraph::uniform(4, 3, 2);
        assert_eq!(shadow(&g, 2), SimpleGraph::empty(4));
    }

    #[test]
    fn one_visible_direction_suffices() {
        let mut g = ColoredDigraph::uniform(2, 2, 1);
        g.set_color(0, 1, 0);
        let s = shadow(&g, 1);
        assert!(s.has_edge(0, 1));
    }

    #[test]
    fn km_coloring_shadow_round_trip() {
        let mut g = ColoredDigraph::uniform(3, 2, 1);
        g.set_color(0, 1, 0);
        g.set_color(1, 0, 0);
        let c = KMColoring::new(g, 1).unwrap();
        assert_eq!(c.shadow().edge_count(), 1);
        assert!(c.shadow().has_edge(0, 1));
    }
}
