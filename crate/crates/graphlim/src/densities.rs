//! Induced subgraph densities, W-random sampling, and the sampling
//! experiments built on them.
//!
//! Densities follow the induced convention throughout: a map must preserve
//! adjacency and non-adjacency (and every ordered color), maps are injective,
//! and counts are normalized by `n^q` [decision D-13].

use crate::error::{Error, Result};
use crate::model::{ColoredDigraph, ColoredDigraphon, SimpleGraph, StepGraphon};
use crate::norms::{delta_hat, OracleMode};
use crate::rng::stream_rng;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

/// Cost guard for the class-assignment sums.
const ASSIGNMENT_BUDGET: f64 = 1e7;

/// Induced density of `F` in `G`: injective maps preserving adjacency and
/// non-adjacency, divided by `n^{|V(F)|}`.
pub fn induced_density_graph(f: &SimpleGraph, g: &SimpleGraph) -> Result<f64> {
    let q = f.n();
    let n = g.n();
    if q > n {
        return Err(Error::Dimension(format!("|V(F)|={q} exceeds |V(G)|={n}")));
    }
    if q > 8 {
        return Err(Error::CostGuard {
            what: format!("induced-map enumeration for |V(F)|={q} > 8"),
            decision: "D-13",
        });
    }
    let mut count = 0u64;
    let mut image = vec![usize::MAX; q];
    let mut used = vec![false; n];
    fn rec(
        f: &SimpleGraph,
        g: &SimpleGraph,
        image: &mut [usize],
        used: &mut [bool],
        pos: usize,
        count: &mut u64,
    ) {
        let q = f.n();
        if pos == q {
            *count += 1;
            return;
        }
        'cand: for v in 0..g.n() {
            if used[v] {
                continue;
            }
            for prev in 0..pos {
                if f.has_edge(prev.min(pos), prev.max(pos))
                    != g.has_edge(image[prev].min(v), image[prev].max(v))
                {
                    continue 'cand;
                }
            }
            image[pos] = v;
            used[v] = true;
            rec(f, g, image, used, pos + 1, count);
            used[v] = false;
        }
    }
    rec(f, g, &mut image, &mut used, 0, &mut count);
    Ok(count as f64 / (n as f64).powi(q as i32))
}

/// Density of `F` in a step graphon: the exact sum over class assignments
/// `z` of `prod lambda(P_{z_i}) * prod_{ij in E} W(z_i,z_j) *
/// prod_{ij not in E} (1 - W(z_i,z_j))`.
pub fn density_step_graphon(f: &SimpleGraph, w: &StepGraphon) -> Result<f64> {
    let q = f.n();
    let t = w.t();
    if (t as f64).powi(q as i32) > ASSIGNMENT_BUDGET {
        return Err(Error::CostGuard {
            what: format!("class-assignment sum t^q = {t}^{q}"),
            decision: "D-13",
        });
    }
    let measures = w.partition().measures();
    let mut total = 0.0;
    let mut z = vec![0usize; q];
    loop {
        let mut term = 1.0;
        for i in 0..q {
            term *= measures[z[i]];
        }
        if term > 0.0 {
            'pairs: for i in 0..q {
                for j in i + 1..q {
                    let v = w.value(z[i], z[j]);
                    term *= if f.has_edge(i, j) { v } else { 1.0 - v };
                    if term == 0.0 {
                        break 'pairs;
                    }
                }
            }
            total += term;
        }
        // odometer over [t]^q
        let mut pos = 0;
        loop {
            if pos == q {
                return Ok(total);
            }
            z[pos] += 1;
            if z[pos] < t {
                break;
            }
            z[pos] = 0;
            pos += 1;
        }
    }
}

/// Density of a colored digraph in a colored digraphon: per unordered pair
/// the factor is the component `(F(i,j), F(j,i))` evaluated at the classes.
pub fn density_colored(f: &ColoredDigraph, w: &ColoredDigraphon) -> Result<f64> {
    let q = f.n();
    let t = w.t();
    if (t as f64).powi(q as i32) > ASSIGNMENT_BUDGET {
        return Err(Error::CostGuard {
            what: format!("class-assignment sum t^q = {t}^{q}"),
            decision: "D-13",
        });
    }
    let measures = w.partition().measures();
    let mut total = 0.0;
    let mut z = vec![0usize; q];
    loop {
        let mut term = 1.0;
        for i in 0..q {
            term *= measures[z[i]];
        }
        if term > 0.0 {
            'pairs: for i in 0..q {
                for j in i + 1..q {
                    let a = f.color(i, j).unwrap();
                    let b = f.color(j, i).unwrap();
                    term *= w.block(a, b)[z[i]][z[j]];
                    if term == 0.0 {
                        break 'pairs;
                    }
                }
            }
            total += term;
        }
        let mut pos = 0;
        loop {
            if pos == q {
                return Ok(total);
            }
            z[pos] += 1;
            if z[pos] < t {
                break;
            }
            z[pos] = 0;
            pos += 1;
        }
    }
}

/// Latent coordinates of one sampling draw.
#[derive(Debug, Clone)]
pub enum SampleCoordinates {
    /// Uniform points of `[0,1]` (graphon sampling).
    Latent(Vec<f64>),
    /// Chosen vertex subset, ascending (graph sampling).
    Subset(Vec<usize>),
}

#[derive(Debug, Clone)]
pub enum SampleResult {
    Simple(SimpleGraph),
    Colored(ColoredDigraph),
}

/// One Monte-Carlo draw, reproducible from `(source, seed)`.
#[derive(Debug, Clone)]
pub struct SampleDraw {
    pub seed: u64,
    pub q: usize,
    pub coordinates: SampleCoordinates,
    pub result: SampleResult,
}

impl SampleDraw {
    pub fn simple(&self) -> Option<&SimpleGraph> {
        match &self.result {
            SampleResult::Simple(g) => Some(g),
            SampleResult::Colored(_) => None,
        }
    }

    pub fn colored(&self) -> Option<&ColoredDigraph> {
        match &self.result {
            SampleResult::Colored(g) => Some(g),
            SampleResult::Simple(_) => None,
        }
    }
}

fn uniform_subset(n: usize, q: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut chosen: Vec<usize> = all.into_iter().take(q).collect();
    chosen.sort_unstable();
    chosen
}

/// Uniform `q`-subset sample of a simple graph, relabeled order-preservingly.
pub fn sample_graph(g: &SimpleGraph, q: usize, seed: u64) -> Result<SampleDraw> {
    if q > g.n() {
        return Err(Error::Dimension(format!("q={q} exceeds n={}", g.n())));
    }
    let mut rng = stream_rng(seed, &[0x7367]);
    let chosen = uniform_subset(g.n(), q, &mut rng);
    let result = g.induced(&chosen);
    Ok(SampleDraw {
        seed,
        q,
        coordinates: SampleCoordinates::Subset(chosen),
        result: SampleResult::Simple(result),
    })
}

/// Uniform `q`-subset sample of a colored digraph.
pub fn sample_colored_graph(g: &ColoredDigraph, q: usize, seed: u64) -> Result<SampleDraw> {
    if q > g.n() {
        return Err(Error::Dimension(format!("q={q} exceeds n={}", g.n())));
    }
    let mut rng = stream_rng(seed, &[0x7363]);
    let chosen = uniform_subset(g.n(), q, &mut rng);
    let result = g.induced(&chosen);
    Ok(SampleDraw {
        seed,
        q,
        coordinates: SampleCoordinates::Subset(chosen),
        result: SampleResult::Colored(result),
    })
}

/// W-random graph: latent uniforms `X_i`, an edge where the pair uniform
/// falls below `W(X_i, X_j)` [decision D-12].
pub fn sample_graphon(w: &StepGraphon, q: usize, seed: u64) -> SampleDraw {
    let mut rng = stream_rng(seed, &[0x7377]);
    let xs: Vec<f64> = (0..q).map(|_| rng.gen::<f64>()).collect();
    let classes: Vec<usize> = xs.iter().map(|&x| w.partition().class_at(x)).collect();
    let mut g = SimpleGraph::empty(q);
    for i in 0..q {
        for j in i + 1..q {
            let y: f64 = rng.gen();
            if y < w.value(classes[i], classes[j]) {
                g.set_edge(i, j, true);
            }
        }
    }
    SampleDraw {
        seed,
        q,
        coordinates: SampleCoordinates::Latent(xs),
        result: SampleResult::Simple(g),
    }
}

/// W-random colored digraph: one draw from the `[k]^2` simplex per unordered
/// pair, so the two directions are deliberately dependent [decision D-14].
pub fn sample_colored_graphon(w: &ColoredDigraphon, q: usize, seed: u64) -> SampleDraw {
    let k = w.k();
    let mut rng = stream_rng(seed, &[0x7378]);
    let xs: Vec<f64> = (0..q).map(|_| rng.gen::<f64>()).collect();
    let classes: Vec<usize> = xs.iter().map(|&x| w.partition().class_at(x)).collect();
    let mut g = ColoredDigraph::uniform(q, k, 0);
    for i in 0..q {
        for j in i + 1..q {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = (k - 1, k - 1);
            'scan: for a in 0..k {
                for b in 0..k {
                    acc += w.block(a, b)[classes[i]][classes[j]];
                    if u < acc {
                        chosen = (a, b);
                        break 'scan;
                    }
                }
            }
            g.set_color(i, j, chosen.0);
            g.set_color(j, i, chosen.1);
        }
    }
    SampleDraw {
        seed,
        q,
        coordinates: SampleCoordinates::Latent(xs),
        result: SampleResult::Colored(g),
    }
}

/// Both sides of the density-deviation bound
/// `|t(F,W) - t(F,U)| <= C(q,2) * distance` with the permutation-overlay
/// distance standing in for the optimal one (it never undershoots it).
#[derive(Debug, Clone)]
pub struct CountingLemmaReport {
    pub lhs: f64,
    pub distance: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn counting_lemma_check(
    f: &SimpleGraph,
    u: &StepGraphon,
    w: &StepGraphon,
) -> Result<CountingLemmaReport> {
    let q = f.n() as f64;
    let lhs = (density_step_graphon(f, w)? - density_step_graphon(f, u)?).abs();
    let (dist, _) = delta_hat(u.kernel(), w.kernel(), OracleMode::Exact, 0)?;
    let rhs = q * (q - 1.0) / 2.0 * dist;
    Ok(CountingLemmaReport { lhs, distance: dist, rhs, holds: lhs <= rhs + 1e-9 })
}

/// Source of a sampling experiment.
#[derive(Debug, Clone)]
pub enum SampleSource {
    Graph(SimpleGraph),
    Graphon(StepGraphon),
}

impl SampleSource {
    pub fn draw(&self, q: usize, seed: u64) -> Result<SimpleGraph> {
        match self {
            SampleSource::Graph(g) => Ok(sample_graph(g, q, seed)?.simple().unwrap().clone()),
            SampleSource::Graphon(w) => Ok(sample_graphon(w, q, seed).simple().unwrap().clone()),
        }
    }
}

/// One row of a concentration experiment: the empirical exceedance rate of
/// `|f(source) - f(sample)|` over `eps` at sample size `q`.
#[derive(Debug, Clone)]
pub struct ConcentrationRow {
    pub q: usize,
    pub eps: f64,
    pub failure_rate: f64,
    pub mean_abs_dev: f64,
}

/// Monte-Carlo estimate of the sampling deviation of a parameter. Trials
/// run in parallel on derived seeds and aggregate deterministically.
pub fn concentration_experiment(
    source: &SampleSource,
    evaluate: &(dyn Fn(&SimpleGraph) -> Result<f64> + Sync),
    base_value: f64,
    q_grid: &[usize],
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<ConcentrationRow>> {
    let mut rows = Vec::with_capacity(q_grid.len());
    for (qi, &q) in q_grid.iter().enumerate() {
        let devs: Result<Vec<f64>> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let s = seed ^ ((qi as u64) << 40) ^ (trial as u64);
                let sample = source.draw(q, s)?;
                Ok((evaluate(&sample)? - base_value).abs())
            })
            .collect();
        let devs = devs?;
        let failures = devs.iter().filter(|&&d| d > eps).count();
        rows.push(ConcentrationRow {
            q,
            eps,
            failure_rate: failures as f64 / trials as f64,
            mean_abs_dev: devs.iter().sum::<f64>() / trials as f64,
        });
    }
    Ok(rows)
}

/// All labeled simple graphs on `q` vertices.
pub fn all_graphs(q: usize) -> Vec<SimpleGraph> {
    let bits = q * (q - 1) / 2;
    (0..1u64 << bits).map(|key| SimpleGraph::from_bit_key(q, key)).collect()
}

/// All complete k-colored digraphs on `q` labeled vertices.
pub fn all_colored_digraphs(q: usize, k: usize) -> Vec<ColoredDigraph> {
    let pairs: Vec<(usize, usize)> = (0..q)
        .flat_map(|i| (0..q).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let total = (k as u64).pow(pairs.len() as u32);
    let mut out = Vec::with_capacity(total as usize);
    for code in 0..total {
        let mut g = ColoredDigraph::uniform(q, k, 0);
        let mut c = code;
        for &(i, j) in &pairs {
            g.set_color(i, j, (c % k as u64) as usize);
            c /= k as u64;
        }
        out.push(g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{digraphon_of_colored, graphon_of_graph, IntervalPartition};

    #[test]
    fn single_vertex_density_is_one() {
        let f = SimpleGraph::empty(1);
        let g = SimpleGraph::cycle(5);
        assert!((induced_density_graph(&f, &g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k2_in_k3() {
        let f = SimpleGraph::complete(2);
        let g = SimpleGraph::complete(3);
        assert!((induced_density_graph(&f, &g).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn k3_in_k3() {
        let f = SimpleGraph::complete(3);
        let g = SimpleGraph::complete(3);
        assert!((induced_density_graph(&f, &g).unwrap() - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn constant_graphon_densities() {
        let w = StepGraphon::constant(0.3).unwrap();
        let k3 = SimpleGraph::complete(3);
        assert!((density_step_graphon(&k3, &w).unwrap() - 0.3f64.powi(3)).abs() < 1e-12);
        let p3 = SimpleGraph::path(3);
        assert!(
            (density_step_graphon(&p3, &w).unwrap() - 0.3 * 0.3 * 0.7).abs() < 1e-12
        );
    }

    #[test]
    fn k2_density_in_c4_graphon() {
        let w = graphon_of_graph(&SimpleGraph::cycle(4));
        let k2 = SimpleGraph::complete(2);
        assert!((density_step_graphon(&k2, &w).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_color_digraphon_density_is_one() {
        let g = ColoredDigraph::uniform(4, 1, 0);
        let w = digraphon_of_colored(&g);
        for f in all_colored_digraphs(3, 1) {
            assert!((density_colored(&f, &w).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_vertex_colored_density_reads_blocks() {
        // constant blocks c_ab on the trivial partition
        let c = [[0.1, 0.2], [0.3, 0.4]];
        let p = IntervalPartition::trivial();
        let blocks = vec![
            vec![vec![c[0][0]]],
            vec![vec![c[0][1]]],
            vec![vec![c[1][0]]],
            vec![vec![c[1][1]]],
        ];
        // directional symmetry: blocks[a][b][i][j] = blocks[b][a][j][i]
        // holds on a 1x1 partition only if c is symmetric; symmetrize
        let blocks = {
            let mut b = blocks;
            b[1] = vec![vec![0.25]];
            b[2] = vec![vec![0.25]];
            b
        };
        let w = ColoredDigraphon::new(2, p, b_fix(blocks)).unwrap();
        let mut f = ColoredDigraph::uniform(2, 2, 0);
        f.set_color(0, 1, 0);
        f.set_color(1, 0, 1);
        let expect = w.block(0, 1)[0][0];
        assert!((density_colored(&f, &w).unwrap() - expect).abs() < 1e-12);
    }

    fn b_fix(mut blocks: Vec<Vec<Vec<f64>>>) -> Vec<Vec<Vec<f64>>> {
        // rescale so the cell sums to 1
        let total: f64 = blocks.iter().map(|m| m[0][0]).sum();
        for m in blocks.iter_mut() {
            m[0][0] /= total;
        }
        blocks
    }

    #[test]
    fn density_family_normalizes_on_graphons() {
        let w = graphon_of_graph(&SimpleGraph::cycle(5));
        for q in 1..=4 {
            let total: f64 = all_graphs(q)
                .iter()
                .map(|f| density_step_graphon(f, &w).unwrap())
                .sum();
            assert!((total - 1.0).abs() < 1e-9, "q={q}: {total}");
        }
    }

    #[test]
    fn colored_density_family_normalizes() {
        let mut g = ColoredDigraph::uniform(4, 2, 0);
        g.set_color(0, 1, 1);
        g.set_color(2, 3, 1);
        let w = digraphon_of_colored(&g);
        let total: f64 = all_colored_digraphs(3, 2)
            .iter()
            .map(|f| density_colored(f, &w).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn graph_vs_graphon_density_consistency() {
        let mut rng = crate::rng::stream_rng(3, &[1]);
        for n in 3..=6usize {
            let g = SimpleGraph::gnp(n, 0.5, &mut rng);
            let w = graphon_of_graph(&g);
            let k2 = SimpleGraph::complete(2);
            // exact equality for K2: diagonal blocks vanish
            let a = induced_density_graph(&k2, &g).unwrap();
            let b = density_step_graphon(&k2, &w).unwrap();
            assert!((a - b).abs() < 1e-12);
            for q in 3..=4usize.min(n) {
                for f in all_graphs(q) {
                    let inj = induced_density_graph(&f, &g).unwrap();
                    let int = density_step_graphon(&f, &w).unwrap();
                    assert!(int >= inj - 1e-12);
                    assert!(int - inj <= (q * q) as f64 / (2.0 * n as f64) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn sample_graph_full_size_is_identity() {
        let g = SimpleGraph::cycle(7);
        let d = sample_graph(&g, 7, 9).unwrap();
        assert_eq!(d.simple().unwrap(), &g);
    }

    #[test]
    fn sample_of_complete_graph_is_complete() {
        let g = SimpleGraph::complete(9);
        let d = sample_graph(&g, 4, 1).unwrap();
        assert_eq!(d.simple().unwrap(), &SimpleGraph::complete(4));
    }

    #[test]
    fn extreme_graphons_sample_deterministically() {
        let zero = StepGraphon::constant(0.0).unwrap();
        let one = StepGraphon::constant(1.0).unwrap();
        for seed in 0..20 {
            assert_eq!(sample_graphon(&zero, 5, seed).simple().unwrap().edge_count(), 0);
            assert_eq!(sample_graphon(&one, 5, seed).simple().unwrap().edge_count(), 10);
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let w = graphon_of_graph(&SimpleGraph::cycle(6));
        let a = sample_graphon(&w, 8, 42);
        let b = sample_graphon(&w, 8, 42);
        assert_eq!(a.simple().unwrap(), b.simple().unwrap());
    }

    #[test]
    fn edge_probability_matches_density_at_q2() {
        // empirical edge probability of q=2 samples vs t(K2, W), 3-sigma band
        let w = StepGraphon::constant(0.5).unwrap();
        let trials = 20_000;
        let mut edges = 0;
        for trial in 0..trials {
            if sample_graphon(&w, 2, trial).simple().unwrap().edge_count() == 1 {
                edges += 1;
            }
        }
        let p_hat = edges as f64 / trials as f64;
        let sigma = (0.5 * 0.5 / trials as f64).sqrt();
        assert!((p_hat - 0.5).abs() < 3.0 * sigma, "p_hat = {p_hat}");
    }

    #[test]
    fn colored_sampling_pair_distribution() {
        // a digraphon with asymmetric off-diagonal mass: the joint pair draw
        // must reproduce the component masses, not their product
        let p = IntervalPartition::trivial();
        let blocks = vec![
            vec![vec![0.4]],
            vec![vec![0.3]],
            vec![vec![0.3]],
            vec![vec![0.0]],
        ];
        let w = ColoredDigraphon::new(2, p, blocks).unwrap();
        let trials = 30_000;
        let mut counts = [0usize; 4];
        for trial in 0..trials {
            let d = sample_colored_graphon(&w, 2, trial);
            let g = d.colored().unwrap();
            let a = g.color(0, 1).unwrap();
            let b = g.color(1, 0).unwrap();
            counts[a * 2 + b] += 1;
        }
        let expect: [f64; 4] = [0.4, 0.3, 0.3, 0.0];
        for c in 0..4 {
            let p_hat = counts[c] as f64 / trials as f64;
            let sigma = (expect[c].max(0.01) * (1.0 - expect[c]) / trials as f64).sqrt();
            assert!((p_hat - expect[c]).abs() < 4.0 * sigma, "component {c}: {p_hat}");
        }
        // never a (1,1) pair: that component has mass zero
        assert_eq!(counts[3], 0);
    }

    #[test]
    fn colored_density_matches_sampling_frequency() {
        // t(F, W) is the probability that a 3-vertex sample equals F
        let mut g = ColoredDigraph::uniform(5, 2, 0);
        g.set_color(0, 1, 1);
        g.set_color(1, 0, 1);
        g.set_color(2, 3, 1);
        let w = digraphon_of_colored(&g);
        let mut f = ColoredDigraph::uniform(3, 2, 0);
        f.set_color(0, 1, 1);
        f.set_color(1, 0, 1);
        let expect = density_colored(&f, &w).unwrap();
        let trials = 100_000;
        let mut hits = 0;
        for trial in 0..trials {
            if sample_colored_graphon(&w, 3, trial).colored().unwrap() == &f {
                hits += 1;
            }
        }
        let p_hat = hits as f64 / trials as f64;
        let sigma = (expect * (1.0 - expect) / trials as f64).sqrt();
        assert!((p_hat - expect).abs() < 3.0 * sigma, "{p_hat} vs {expect}");
    }

    #[test]
    fn graph_sample_edge_density_concentrates() {
        // draws from a fixed dense instance track its edge density
        let mut rng = crate::rng::stream_rng(55, &[0]);
        let g = SimpleGraph::gnp(24, 0.5, &mut rng);
        let base = induced_density_graph(&SimpleGraph::complete(2), &g).unwrap();
        let trials = 10_000;
        let q = 12;
        let mut acc = 0.0;
        for trial in 0..trials {
            let s = sample_graph(&g, q, trial).unwrap();
            let sg = s.simple().unwrap();
            acc += 2.0 * sg.edge_count() as f64 / (q * q) as f64;
        }
        let mean = acc / trials as f64;
        // hypergeometric spread of the edge density at q=12 is ~0.1/sqrt(T)
        assert!((mean - base).abs() < 0.01, "{mean} vs {base}");
    }

    #[test]
    fn counting_lemma_trivial_cases() {
        let u = StepGraphon::constant(0.3).unwrap();
        let w = StepGraphon::constant(0.7).unwrap();
        let k2 = SimpleGraph::complete(2);
        let r = counting_lemma_check(&k2, &u, &w).unwrap();
        assert!(r.holds);
        assert!((r.lhs - 0.4).abs() < 1e-12);
        assert!((r.rhs - 0.4).abs() < 1e-12); // equality at K2 for constants
        let same = counting_lemma_check(&k2, &u, &u).unwrap();
        assert!(same.lhs.abs() < 1e-12);
    }

    #[test]
    fn concentration_of_constant_parameter_is_zero() {
        let src = SampleSource::Graph(SimpleGraph::cycle(10));
        let rows = concentration_experiment(
            &src,
            &|_g| Ok(0.25),
            0.25,
            &[2, 5, 8],
            0.05,
            50,
            7,
        )
        .unwrap();
        for row in rows {
            assert_eq!(row.failure_rate, 0.0);
            assert_eq!(row.mean_abs_dev, 0.0);
        }
    }

    #[test]
    fn concentration_failure_rate_decreases_in_q() {
        // edge density of samples from the constant-1/2 graphon
        let src = SampleSource::Graphon(StepGraphon::constant(0.5).unwrap());
        let eval = |g: &SimpleGraph| -> Result<f64> {
            let n = g.n() as f64;
            Ok(2.0 * g.edge_count() as f64 / (n * n))
        };
        let rows =
            concentration_experiment(&src, &eval, 0.5, &[4, 16, 64], 0.1, 300, 11).unwrap();
        // allow statistical noise but demand a clear downward trend
        assert!(rows[2].failure_rate <= rows[0].failure_rate + 0.02);
        assert!(rows[2].mean_abs_dev < rows[0].mean_abs_dev);
    }
}
