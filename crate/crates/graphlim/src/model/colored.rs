//! k-colored directed graphons: a `k x k` tuple of non-negative step kernels
//! over one partition, summing pointwise to 1, with the directional symmetry
//! `W^{(a,b)}(x,y) = W^{(b,a)}(y,x)`.

use crate::error::{Error, Result};
use crate::model::digraph::ColoredDigraph;
use crate::model::kernel::StepKernel;
use crate::model::partition::IntervalPartition;

pub const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ColoredDigraphon {
    k: usize,
    partition: IntervalPartition,
    /// Component `(a,b)` is `blocks[a*k + b]`, a `t x t` block-value matrix.
    blocks: Vec<Vec<Vec<f64>>>,
}

impl ColoredDigraphon {
    pub fn new(
        k: usize,
        partition: IntervalPartition,
        blocks: Vec<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("need at least one color"));
        }
        let t = partition.len();
        if blocks.len() != k * k {
            return Err(Error::Dimension(format!(
                "expected {} component matrices, got {}",
                k * k,
                blocks.len()
            )));
        }
        for m in &blocks {
            if m.len() != t || m.iter().any(|row| row.len() != t) {
                return Err(Error::Dimension(format!("components must be {t}x{t}")));
            }
        }
        let w = ColoredDigraphon { k, partition, blocks };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.partition.len();
        for a in 0..self.k {
            for b in 0..self.k {
                for i in 0..t {
                    for j in 0..t {
                        let v = self.block(a, b)[i][j];
                        if !(v >= -SIMPLEX_TOL) || !v.is_finite() {
                            return Err(Error::invalid(format!(
                                "component ({a},{b}) cell ({i},{j}) = {v} is negative"
                            )));
                        }
                        let mirror = self.block(b, a)[j][i];
                        if (v - mirror).abs() > SIMPLEX_TOL {
                            return Err(Error::invalid(format!(
                                "directional symmetry broken at ({a},{b})[{i}][{j}]"
                            )));
                        }
                    }
                }
            }
        }
        for i in 0..t {
            for j in 0..t {
                let sum: f64 = (0..self.k * self.k).map(|c| self.blocks[c][i][j]).sum();
                if (sum - 1.0).abs() > SIMPLEX_TOL {
                    return Err(Error::invalid(format!(
                        "component values at cell ({i},{j}) sum to {sum}, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn t(&self) -> usize {
        self.partition.len()
    }

    pub fn partition(&self) -> &IntervalPartition {
        &self.partition
    }

    pub fn block(&self, a: usize, b: usize) -> &Vec<Vec<f64>> {
        &self.blocks[a * self.k + b]
    }

    pub fn blocks(&self) -> &[Vec<Vec<f64>>] {
        &self.blocks
    }

    /// Component `(a,b)` as a standalone step kernel.
    pub fn component_kernel(&self, a: usize, b: usize) -> StepKernel {
        StepKernel::new(self.partition.clone(), self.block(a, b).clone())
            .expect("component dimensions validated at construction")
    }

    /// Pointwise sum of the components indexed by `pairs`, as a kernel.
    pub fn component_sum(&self, pairs: &[(usize, usize)]) -> StepKernel {
        let t = self.t();
        let mut values = vec![vec![0.0; t]; t];
        for &(a, b) in pairs {
            let m = self.block(a, b);
            for i in 0..t {
                for j in 0..t {
                    values[i][j] += m[i][j];
                }
            }
        }
        StepKernel::new(self.partition.clone(), values).unwrap()
    }

    /// Sum of component L2 norms squared (the energy used by the
    /// regularity iterations).
    pub fn energy(&self) -> f64 {
        (0..self.k * self.k)
            .map(|c| {
                let m = self.partition.measures();
                let mut acc = 0.0;
                for i in 0..self.t() {
                    for j in 0..self.t() {
                        acc += self.blocks[c][i][j] * self.blocks[c][i][j] * m[i] * m[j];
                    }
                }
                acc
            })
            .sum()
    }
}

/// The step digraphon `W_G` of a colored digraph: canonical `n`-partition;
/// off-diagonal cell `(i,j)` puts full mass on the component
/// `(colors(i,j), colors(j,i))`. Diagonal cells carry the undefined color, a
/// set of total measure `1/n`; their mass is spread uniformly over all `k^2`
/// components so the simplex and symmetry constraints hold exactly
/// [decision D-1].
pub fn digraphon_of_colored(g: &ColoredDigraph) -> ColoredDigraphon {
    let n = g.n();
    let k = g.k();
    let partition = IntervalPartition::canonical(n);
    let mut blocks = vec![vec![vec![0.0; n]; n]; k * k];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                for c in 0..k * k {
                    blocks[c][i][i] = 1.0 / (k * k) as f64;
                }
            } else {
                let a = g.color(i, j).unwrap();
                let b = g.color(j, i).unwrap();
                blocks[a * k + b][i][j] = 1.0;
            }
        }
    }
    ColoredDigraphon::new(k, partition, blocks).expect("colored digraph induces a valid digraphon")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::digraph::ColoredDigraph;

    #[test]
    fn digraphon_of_two_vertices() {
        // colors(0,1)=0, colors(1,0)=1 with k=2
        let mut g = ColoredDigraph::uniform(2, 2, 1);
        g.set_color(0, 1, 0);
        g.set_color(1, 0, 1);
        let w = digraphon_of_colored(&g);
        assert_eq!(w.block(0, 1)[0][1], 1.0);
        assert_eq!(w.block(1, 0)[1][0], 1.0);
        assert_eq!(w.block(0, 0)[0][1], 0.0);
        w.validate().unwrap();
    }

    #[test]
    fn monochromatic_digraph_mass() {
        let g = ColoredDigraph::uniform(3, 2, 0);
        let w = digraphon_of_colored(&g);
        // off-diagonal mass entirely in component (0,0)
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(w.block(0, 0)[i][j], 1.0);
                    assert_eq!(w.block(1, 1)[i][j], 0.0);
                }
            }
        }
    }

    #[test]
    fn diagonal_measure_is_one_over_n() {
        let g = ColoredDigraph::uniform(5, 3, 2);
        let w = digraphon_of_colored(&g);
        let m = w.partition().measures();
        let diag: f64 = (0..5).map(|i| m[i] * m[i]).sum();
        assert!((diag - 1.0 / 5.0).abs() < 1e-12);
    }
}
