//! (k,m)-colorings of graphs: exhaustive enumeration, the fractional
//! coloring-transfer construction, randomized rounding back to graph
//! colorings, and node-coloring extraction.

use crate::error::{Error, Result};
use crate::model::{
    is_visible_pair, ColoredDigraph, ColoredDigraphon, DPair, IntervalPartition, KMColoring,
    NodePartition, SimpleGraph, StepGraphon, StepKernel,
};
use crate::rng::stream_rng;
use rand::Rng;

pub use crate::model::shadow;

/// Visible color pairs of a (k,m)-coloring, in row-major order
/// [decision D-17].
pub fn visible_pairs(k: usize, m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if is_visible_pair(a, b, m) {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn invisible_pairs(k: usize, m: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if !is_visible_pair(a, b, m) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Number of (k,m)-colorings of `g`:
/// `(k^2 - (k-m)^2)^{|E|} * ((k-m)^2)^{C(n,2)-|E|}`.
pub fn km_coloring_count(g: &SimpleGraph, k: usize, m: usize) -> f64 {
    let e = g.edge_count() as f64;
    let non_e = (g.n() * (g.n() - 1) / 2) as f64 - e;
    let edge_opts = (k * k - (k - m) * (k - m)) as f64;
    let non_opts = ((k - m) * (k - m)) as f64;
    edge_opts.powf(e) * non_opts.powf(non_e)
}

/// Duplicate-free stream of all (k,m)-colorings of `g`, pairs in row-major
/// pair order and colors in row-major `(a,b)` order [decision D-17]. Every
/// emitted coloring shades back to `g`.
pub struct KMColoringEnumerator {
    g: SimpleGraph,
    k: usize,
    m: usize,
    pairs: Vec<(usize, usize)>,
    options: Vec<Vec<(usize, usize)>>,
    state: Vec<usize>,
    done: bool,
}

impl KMColoringEnumerator {
    pub fn new(g: &SimpleGraph, k: usize, m: usize) -> Result<Self> {
        if m > k {
            return Err(Error::invalid(format!("m={m} exceeds k={k}")));
        }
        let count = km_coloring_count(g, k, m);
        if count > 1e7 {
            return Err(Error::CostGuard {
                what: format!("{count:.3e} colorings requested"),
                decision: "D-17",
            });
        }
        let visible = visible_pairs(k, m);
        let invisible = invisible_pairs(k, m);
        let mut pairs = Vec::new();
        let mut options = Vec::new();
        for u in 0..g.n() {
            for v in u + 1..g.n() {
                pairs.push((u, v));
                options.push(if g.has_edge(u, v) { visible.clone() } else { invisible.clone() });
            }
        }
        let done = options.iter().any(|o| o.is_empty()) && !pairs.is_empty();
        let state = vec![0; pairs.len()];
        Ok(KMColoringEnumerator { g: g.clone(), k, m, pairs, options, state, done })
    }

    fn current(&self) -> KMColoring {
        let mut base = ColoredDigraph::uniform(self.g.n(), self.k, 0);
        for (idx, &(u, v)) in self.pairs.iter().enumerate() {
            let (a, b) = self.options[idx][self.state[idx]];
            base.set_color(u, v, a);
            base.set_color(v, u, b);
        }
        KMColoring::with_shadow(base, self.m, &self.g).expect("enumerated colorings shade to g")
    }
}

impl Iterator for KMColoringEnumerator {
    type Item = KMColoring;

    fn next(&mut self) -> Option<KMColoring> {
        if self.done {
            return None;
        }
        let item = self.current();
        // odometer
        let mut pos = 0;
        loop {
            if pos == self.state.len() {
                self.done = true;
                break;
            }
            self.state[pos] += 1;
            if self.state[pos] < self.options[pos].len() {
                break;
            }
            self.state[pos] = 0;
            pos += 1;
        }
        Some(item)
    }
}

pub fn enumerate_km_colorings(
    g: &SimpleGraph,
    k: usize,
    m: usize,
) -> Result<KMColoringEnumerator> {
    KMColoringEnumerator::new(g, k, m)
}

fn assert_p_constant(w: &StepKernel, grouping: &[usize], what: &str) -> Result<()> {
    let t = w.t();
    for i in 0..t {
        for j in 0..t {
            for a in 0..t {
                for b in 0..t {
                    if grouping[i] == grouping[a] && grouping[j] == grouping[b] {
                        let d = (w.value(i, j) - w.value(a, b)).abs();
                        if d > 1e-9 {
                            return Err(Error::invalid(format!(
                                "{what} must be constant on the coarse blocks (cells differ by {d})"
                            )));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Transfer a fractional coloring across graphons: given a coarse-block
/// step graphon `U` with a (k,m)-coloring `UU` (both constant on the blocks
/// of `p`) and a graphon `V` on the same atoms, build the coloring `VV` of
/// `V` with components `V * U^{(a,b)} / U` on visible pairs and
/// `(1-V) * U^{(a,b)} / (1-U)` on invisible ones; where `U` is 0 (or 1) the
/// mass is spread evenly over the visible (invisible) pairs [decision D-15].
/// Visible components of the output sum to `V` exactly, and each component
/// moves from its counterpart by at most the localized norm of `U - V`.
pub fn transfer_coloring(
    u: &StepGraphon,
    uu: &ColoredDigraphon,
    m: usize,
    v: &StepGraphon,
    p: &IntervalPartition,
) -> Result<ColoredDigraphon> {
    let k = uu.k();
    if m > k {
        return Err(Error::invalid(format!("m={m} exceeds k={k}")));
    }
    if u.partition() != uu.partition() || u.partition() != v.partition() {
        return Err(Error::IncompatiblePartitions(
            "transfer needs U, UU, V on the same atom partition".into(),
        ));
    }
    let grouping = u.partition().grouping_onto(p)?;
    let t = u.t();
    assert_p_constant(u.kernel(), &grouping, "U")?;
    for a in 0..k {
        for b in 0..k {
            assert_p_constant(&uu.component_kernel(a, b), &grouping, "UU component")?;
        }
    }
    // UU must actually color U: visible components sum to U
    let visible = visible_pairs(k, m);
    let invisible = invisible_pairs(k, m);
    let visible_sum = uu.component_sum(&visible);
    for i in 0..t {
        for j in 0..t {
            if (visible_sum.value(i, j) - u.value(i, j)).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "UU is not a (k,m)-coloring of U at cell ({i},{j})"
                )));
            }
        }
    }
    let eps_div = 1e-12;
    let mut blocks = vec![vec![vec![0.0; t]; t]; k * k];
    for i in 0..t {
        for j in 0..t {
            let uv = u.value(i, j);
            let vv = v.value(i, j);
            for &(a, b) in &visible {
                blocks[a * k + b][i][j] = if uv > eps_div {
                    vv * uu.block(a, b)[i][j] / uv
                } else {
                    vv / visible.len() as f64
                };
            }
            for &(a, b) in &invisible {
                blocks[a * k + b][i][j] = if 1.0 - uv > eps_div {
                    (1.0 - vv) * uu.block(a, b)[i][j] / (1.0 - uv)
                } else {
                    (1.0 - vv) / invisible.len() as f64
                };
            }
        }
    }
    ColoredDigraphon::new(k, u.partition().clone(), blocks)
}

/// Round a fractional coloring of `W_G` to a concrete (k,m)-coloring of `G`:
/// each unordered pair draws its ordered color pair independently from the
/// cell distribution. The shadow is `G` by construction.
pub fn round_to_graph_coloring(
    vv: &ColoredDigraphon,
    g: &SimpleGraph,
    m: usize,
    seed: u64,
) -> Result<KMColoring> {
    let n = g.n();
    let k = vv.k();
    if vv.t() != n || vv.partition().alignment_n() != Some(n) {
        return Err(Error::IncompatiblePartitions(
            "rounding needs a digraphon on the canonical n-partition".into(),
        ));
    }
    // shadow consistency: visible mass 1 on edge cells, 0 on non-edge cells
    let visible = visible_pairs(k, m);
    let vis_sum = vv.component_sum(&visible);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let want = if g.has_edge(i.min(j), i.max(j)) { 1.0 } else { 0.0 };
            if (vis_sum.value(i, j) - want).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "digraphon is not shadow-consistent with the graph at ({i},{j})"
                )));
            }
        }
    }
    let mut rng = stream_rng(seed, &[0x726f_756e]);
    let mut base = ColoredDigraph::uniform(n, k, 0);
    for i in 0..n {
        for j in i + 1..n {
            let r: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = (k - 1, k - 1);
            'scan: for a in 0..k {
                for b in 0..k {
                    acc += vv.block(a, b)[i][j];
                    if r < acc {
                        chosen = (a, b);
                        break 'scan;
                    }
                }
            }
            base.set_color(i, j, chosen.0);
            base.set_color(j, i, chosen.1);
        }
    }
    KMColoring::with_shadow(base, m, g)
}

/// Node-coloring extraction: `2m` simple graphs, the edge parts
/// `G_i = G[C_i]` and the non-edge parts `H_i = G^c[C_i']`, with
/// `C_i = union of T_a x T_b over (a,b) in D_i` read symmetrically
/// [decision D-16].
pub fn node_coloring(
    g: &SimpleGraph,
    t: &NodePartition,
    d: &DPair,
) -> Result<(Vec<SimpleGraph>, Vec<SimpleGraph>)> {
    if t.n() != g.n() {
        return Err(Error::Dimension("partition must cover the vertex set".into()));
    }
    if t.k() != d.k() {
        return Err(Error::Dimension("partition and routing disagree on k".into()));
    }
    let m = d.m();
    let mut edge_parts = vec![SimpleGraph::empty(g.n()); m];
    let mut nonedge_parts = vec![SimpleGraph::empty(g.n()); m];
    for u in 0..g.n() {
        for v in u + 1..g.n() {
            let (a, b) = (t.class(u), t.class(v));
            if g.has_edge(u, v) {
                edge_parts[d.edge_part_of(a, b)].set_edge(u, v, true);
                edge_parts[d.edge_part_of(b, a)].set_edge(u, v, true);
            } else {
                nonedge_parts[d.nonedge_part_of(a, b)].set_edge(u, v, true);
                nonedge_parts[d.nonedge_part_of(b, a)].set_edge(u, v, true);
            }
        }
    }
    Ok((edge_parts, nonedge_parts))
}

/// Random valid transfer instance: a coarse partition of `t` atoms, a
/// block-constant graphon `U` with a (k,m)-coloring `UU`, and a free graphon
/// `V` on the atoms. With `extreme` set, some coarse cells of `U` are forced
/// to 0 or 1 to exercise the fallback branches.
pub fn random_transfer_instance(
    t: usize,
    coarse: usize,
    k: usize,
    m: usize,
    extreme: bool,
    seed: u64,
) -> (StepGraphon, ColoredDigraphon, StepGraphon, IntervalPartition) {
    let mut rng = stream_rng(seed, &[0x7472_696e]);
    // contiguous coarse classes so the interval realization refines them
    let mut labels: Vec<usize> = (0..t).map(|i| i * coarse / t).collect();
    // random measures
    let raw: Vec<f64> = (0..t).map(|_| rng.gen::<f64>() + 0.2).collect();
    let total: f64 = raw.iter().sum();
    let partition = IntervalPartition::new(raw.iter().map(|r| r / total).collect()).unwrap();
    crate::model::normalize_labels(&mut labels);
    let n_coarse = labels.iter().max().unwrap() + 1;
    let visible = visible_pairs(k, m);
    let invisible = invisible_pairs(k, m);

    // per coarse cell: U value and a simplex over the color pairs
    let mut u_block = vec![vec![0.0; n_coarse]; n_coarse];
    let mut mass_block = vec![vec![vec![0.0; k * k]; n_coarse]; n_coarse];
    for ci in 0..n_coarse {
        for cj in ci..n_coarse {
            let mut uv: f64 = rng.gen();
            if extreme {
                let roll: f64 = rng.gen();
                if roll < 0.15 {
                    uv = 0.0;
                } else if roll < 0.3 {
                    uv = 1.0;
                }
            }
            if invisible.is_empty() {
                // m = k: every pair is visible, so only U = 1 is colorable
                uv = 1.0;
            }
            // unordered color-pair weights keep the directional symmetry
            let mut masses = vec![0.0f64; k * k];
            let mut vis_w = 0.0;
            let mut invis_w = 0.0;
            let mut weights = vec![vec![0.0f64; k]; k];
            for a in 0..k {
                for b in a..k {
                    let w: f64 = rng.gen::<f64>() + 0.05;
                    weights[a][b] = w;
                    weights[b][a] = w;
                    if is_visible_pair(a, b, m) {
                        vis_w += w;
                    } else {
                        invis_w += w;
                    }
                }
            }
            for &(a, b) in &visible {
                let w = weights[a][b] / if a == b { 1.0 } else { 2.0 };
                masses[a * k + b] = uv * w / vis_w;
            }
            if !invisible.is_empty() && invis_w > 0.0 {
                for &(a, b) in &invisible {
                    let w = weights[a][b] / if a == b { 1.0 } else { 2.0 };
                    masses[a * k + b] = (1.0 - uv) * w / invis_w;
                }
            }
            u_block[ci][cj] = uv;
            u_block[cj][ci] = uv;
            for a in 0..k {
                for b in 0..k {
                    mass_block[ci][cj][a * k + b] = masses[a * k + b];
                    mass_block[cj][ci][b * k + a] = masses[a * k + b];
                }
            }
        }
    }
    // paint onto atoms
    let u_values: Vec<Vec<f64>> = (0..t)
        .map(|i| (0..t).map(|j| u_block[labels[i]][labels[j]]).collect())
        .collect();
    let blocks: Vec<Vec<Vec<f64>>> = (0..k * k)
        .map(|c| {
            (0..t)
                .map(|i| (0..t).map(|j| mass_block[labels[i]][labels[j]][c]).collect())
                .collect()
        })
        .collect();
    let u = StepGraphon::from_values(partition.clone(), u_values).unwrap();
    let uu = ColoredDigraphon::new(k, partition.clone(), blocks).unwrap();
    // V: arbitrary symmetric graphon on the atoms (V = 1 when m = k, the
    // only graphon a (k,k)-coloring can transfer to)
    let mut v_values = vec![vec![0.0; t]; t];
    for i in 0..t {
        for j in i..t {
            let x: f64 = if invisible.is_empty() { 1.0 } else { rng.gen() };
            v_values[i][j] = x;
            v_values[j][i] = x;
        }
    }
    let v = StepGraphon::from_values(partition.clone(), v_values).unwrap();
    let coarse_partition = partition.group_by(&labels, n_coarse);
    (u, uu, v, coarse_partition)
}
