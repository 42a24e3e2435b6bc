//! Step kernels and step graphons.
//!
//! A step kernel is a bounded function on `[0,1]^2` that is constant on the
//! rectangles of a measured partition; the block values are a `t x t`
//! matrix. A step graphon is the symmetric `[0,1]`-valued special case.

use crate::error::{Error, Result};
use crate::model::graph::SimpleGraph;
use crate::model::partition::IntervalPartition;

#[derive(Debug, Clone, PartialEq)]
pub struct StepKernel {
    partition: IntervalPartition,
    values: Vec<Vec<f64>>,
    bound: f64,
}

impl StepKernel {
    pub fn new(partition: IntervalPartition, values: Vec<Vec<f64>>) -> Result<Self> {
        let t = partition.len();
        if values.len() != t || values.iter().any(|row| row.len() != t) {
            return Err(Error::Dimension(format!(
                "value matrix must be {t}x{t} to match the partition"
            )));
        }
        if values.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("kernel values must be finite"));
        }
        let bound = values
            .iter()
            .flatten()
            .fold(0.0f64, |acc, &v| acc.max(v.abs()));
        Ok(StepKernel { partition, values, bound })
    }

    /// Constant kernel `c` on the given partition.
    pub fn constant(partition: IntervalPartition, c: f64) -> Self {
        let t = partition.len();
        StepKernel::new(partition, vec![vec![c; t]; t]).unwrap()
    }

    pub fn partition(&self) -> &IntervalPartition {
        &self.partition
    }

    pub fn t(&self) -> usize {
        self.partition.len()
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    /// Sup norm over the blocks.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let t = self.t();
        (0..t).all(|i| (0..t).all(|j| (self.values[i][j] - self.values[j][i]).abs() <= tol))
    }

    /// Measure-weighted L1 norm.
    pub fn l1_norm(&self) -> f64 {
        let m = self.partition.measures();
        let mut acc = 0.0;
        for i in 0..self.t() {
            for j in 0..self.t() {
                acc += self.values[i][j].abs() * m[i] * m[j];
            }
        }
        acc
    }

    /// Measure-weighted L2 norm.
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        let m = self.partition.measures();
        let mut acc = 0.0;
        for i in 0..self.t() {
            for j in 0..self.t() {
                acc += self.values[i][j] * self.values[i][j] * m[i] * m[j];
            }
        }
        acc
    }

    /// Integral over the whole square.
    pub fn integral(&self) -> f64 {
        let m = self.partition.measures();
        let mut acc = 0.0;
        for i in 0..self.t() {
            for j in 0..self.t() {
                acc += self.values[i][j] * m[i] * m[j];
            }
        }
        acc
    }

    /// Blockwise difference; partitions must agree.
    pub fn sub(&self, other: &StepKernel) -> Result<StepKernel> {
        if self.partition != other.partition {
            return Err(Error::IncompatiblePartitions(
                "kernel difference needs identical partitions".into(),
            ));
        }
        let t = self.t();
        let values = (0..t)
            .map(|i| (0..t).map(|j| self.values[i][j] - other.values[i][j]).collect())
            .collect();
        StepKernel::new(self.partition.clone(), values)
    }

    /// Relabeled copy: block `(i,j)` of the result is block
    /// `(perm[i], perm[j])` of `self`. Classes must have equal measures for
    /// this to be measure preserving; callers enforce that.
    pub fn permuted(&self, perm: &[usize]) -> StepKernel {
        let t = self.t();
        let values = (0..t)
            .map(|i| (0..t).map(|j| self.values[perm[i]][perm[j]]).collect())
            .collect();
        StepKernel { partition: self.partition.clone(), values, bound: self.bound }
    }

    /// Value at a point of the square, via the interval realization.
    pub fn value_at(&self, x: f64, y: f64) -> f64 {
        let cum = self.partition.cumulative();
        let i = locate(&cum, x);
        let j = locate(&cum, y);
        self.values[i][j]
    }
}

fn locate(cum: &[f64], x: f64) -> usize {
    let mut lo = 0;
    let mut hi = cum.len() - 1;
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if cum[mid] <= x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Symmetric `[0,1]`-valued step kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct StepGraphon {
    kernel: StepKernel,
}

impl StepGraphon {
    pub fn new(kernel: StepKernel) -> Result<Self> {
        if !kernel.is_symmetric(1e-9) {
            return Err(Error::invalid("graphon values must be symmetric"));
        }
        if kernel.values().iter().flatten().any(|&v| !(0.0..=1.0 + 1e-12).contains(&v)) {
            return Err(Error::invalid("graphon values must lie in [0,1]"));
        }
        Ok(StepGraphon { kernel })
    }

    pub fn from_values(partition: IntervalPartition, values: Vec<Vec<f64>>) -> Result<Self> {
        StepGraphon::new(StepKernel::new(partition, values)?)
    }

    pub fn constant(c: f64) -> Result<Self> {
        StepGraphon::new(StepKernel::constant(IntervalPartition::trivial(), c))
    }

    pub fn kernel(&self) -> &StepKernel {
        &self.kernel
    }

    pub fn into_kernel(self) -> StepKernel {
        self.kernel
    }

    pub fn partition(&self) -> &IntervalPartition {
        self.kernel.partition()
    }

    pub fn t(&self) -> usize {
        self.kernel.t()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.kernel.value(i, j)
    }
}

/// The step graphon `W_G` of a simple graph: canonical `n`-partition, block
/// `(i,j)` equal to 1 exactly when `ij` is an edge.
pub fn graphon_of_graph(g: &SimpleGraph) -> StepGraphon {
    let n = g.n();
    assert!(n >= 1);
    let partition = IntervalPartition::canonical(n);
    let values = (0..n)
        .map(|i| (0..n).map(|j| if g.has_edge(i.min(j), i.max(j)) && i != j { 1.0 } else { 0.0 }).collect())
        .collect();
    StepGraphon::from_values(partition, values).expect("adjacency blocks form a graphon")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::graph::blow_up;

    #[test]
    fn graphon_of_k3() {
        let w = graphon_of_graph(&SimpleGraph::complete(3));
        assert_eq!(w.t(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.0 } else { 1.0 };
                assert_eq!(w.value(i, j), expect);
            }
        }
        assert_eq!(w.partition().alignment_n(), Some(3));
    }

    #[test]
    fn graphon_of_empty_graph() {
        let w = graphon_of_graph(&SimpleGraph::empty(2));
        assert_eq!(w.t(), 2);
        assert!(w.kernel().values().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn blow_up_preserves_blocks_after_merging() {
        // the blown-up graphon equals the original as a step function once
        // copies of a vertex are merged back into one class
        let g = SimpleGraph::cycle(5);
        let t = 3;
        let b = blow_up(&g, t);
        let wg = graphon_of_graph(&g);
        let wb = graphon_of_graph(&b);
        for u in 0..5 {
            for v in 0..5 {
                if u == v {
                    continue;
                }
                for a in 0..t {
                    for c in 0..t {
                        assert_eq!(wb.value(u * t + a, v * t + c), wg.value(u, v));
                    }
                }
            }
        }
    }

    #[test]
    fn l1_l2_on_two_blocks() {
        let p = IntervalPartition::new(vec![0.5, 0.5]).unwrap();
        let w = StepKernel::new(p, vec![vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert!((w.l1_norm() - 1.0).abs() < 1e-12);
        assert!((w.l2_norm() - 1.0).abs() < 1e-12);
        assert!((w.integral() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn constant_norms() {
        let w = StepKernel::constant(IntervalPartition::trivial(), -0.3);
        assert!((w.l1_norm() - 0.3).abs() < 1e-12);
        assert!((w.l2_norm() - 0.3).abs() < 1e-12);
    }
}
