//! Ground state energies of weighted arrays and layered r-array tuples.
//!
//! The 2-D form is `E_T = (1/n^2) sum_{u,v} J[T(u)][T(v)] A(u,v)` over node
//! partitions `T` into `s` parts (empty parts allowed [decision D-20]); the
//! layered form sums `[k]^r`-indexed r-arrays against the partition classes.
//! Exact maximization walks the assignment tree with incremental class
//! accumulators; the local search is single-node-move hill climbing over
//! seeded restarts, reported as a lower bound.

use crate::error::{Error, Result};
use crate::model::{NodePartition, SimpleGraph, StepKernel};
use crate::rng::stream_rng;
use rand::Rng;
use rayon::prelude::*;

/// Dense square matrix of weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix { n, data: vec![0.0; n * n] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("matrix must be square".into()));
        }
        Ok(SquareMatrix { n, data: rows.into_iter().flatten().collect() })
    }

    pub fn from_graph(g: &SimpleGraph) -> Self {
        let n = g.n();
        let mut m = SquareMatrix::zeros(n);
        for u in 0..n {
            for v in 0..n {
                if u != v && g.has_edge(u.min(v), u.max(v)) {
                    m.data[u * n + v] = 1.0;
                }
            }
        }
        m
    }

    /// Adjacency of the complement (zero diagonal).
    pub fn from_graph_complement(g: &SimpleGraph) -> Self {
        let n = g.n();
        let mut m = SquareMatrix::zeros(n);
        for u in 0..n {
            for v in 0..n {
                if u != v && !g.has_edge(u.min(v), u.max(v)) {
                    m.data[u * n + v] = 1.0;
                }
            }
        }
        m
    }

    pub fn random_sign_symmetric(n: usize, rng: &mut impl Rng) -> Self {
        let mut m = SquareMatrix::zeros(n);
        for u in 0..n {
            for v in u..n {
                let x = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                m.data[u * n + v] = x;
                m.data[v * n + u] = x;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn value(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    pub fn principal_submatrix(&self, idx: &[usize]) -> SquareMatrix {
        let q = idx.len();
        let mut m = SquareMatrix::zeros(q);
        for a in 0..q {
            for b in 0..q {
                m.data[a * q + b] = self.value(idx[a], idx[b]);
            }
        }
        m
    }
}

/// Coupling matrix of the 2-D energy form.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    s: usize,
    data: Vec<f64>,
}

impl CouplingMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let s = rows.len();
        if rows.iter().any(|r| r.len() != s) {
            return Err(Error::Dimension("coupling matrix must be square".into()));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("coupling entries must be finite"));
        }
        Ok(CouplingMatrix { s, data: rows.into_iter().flatten().collect() })
    }

    /// Off-diagonal ones: the max-cut form.
    pub fn maxcut() -> Self {
        CouplingMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    pub fn identity(s: usize) -> Self {
        let mut rows = vec![vec![0.0; s]; s];
        for i in 0..s {
            rows[i][i] = 1.0;
        }
        CouplingMatrix::from_rows(rows).unwrap()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn value(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.s + b]
    }

    /// Invariant under swapping the two labels (only meaningful for s=2).
    fn swap_invariant(&self) -> bool {
        self.s == 2
            && (self.value(0, 0) - self.value(1, 1)).abs() < 1e-15
            && (self.value(0, 1) - self.value(1, 0)).abs() < 1e-15
    }
}

/// `(1/n^2) sum_{u,v} J[T(u)][T(v)] A(u,v)`, diagonal included.
pub fn energy_of_partition(a: &SquareMatrix, j: &CouplingMatrix, t: &NodePartition) -> f64 {
    let n = a.n();
    assert_eq!(t.n(), n, "partition size must match the array");
    let mut acc = 0.0;
    for u in 0..n {
        for v in 0..n {
            acc += j.value(t.class(u), t.class(v)) * a.value(u, v);
        }
    }
    acc / (n * n) as f64
}

/// Sum of several 2-D energy forms at one partition.
pub fn energy_of_partition_terms(
    terms: &[(SquareMatrix, CouplingMatrix)],
    t: &NodePartition,
) -> f64 {
    terms.iter().map(|(a, j)| energy_of_partition(a, j, t)).sum()
}

const EXACT_ASSIGNMENT_BUDGET: f64 = 1.3e7;

/// Exhaustive ground state energy of a sum of 2-D forms over partitions of
/// `[n]` into `s` parts. The assignment tree is walked with per-class
/// accumulators so each node costs `O(n)`; the lexicographically smallest
/// maximizer is returned. When every coupling is label-swap invariant the
/// first vertex is pinned to part 0.
pub fn gse_exact_terms(
    terms: &[(SquareMatrix, CouplingMatrix)],
    s: usize,
) -> Result<(f64, NodePartition)> {
    let n = terms[0].0.n();
    for (a, j) in terms {
        if a.n() != n || j.s() != s {
            return Err(Error::Dimension("terms must share n and s".into()));
        }
    }
    let pin_first = s == 2 && terms.iter().all(|(_, j)| j.swap_invariant());
    let effective = (s as f64).powi(n as i32 - if pin_first { 1 } else { 0 });
    if effective > EXACT_ASSIGNMENT_BUDGET {
        return Err(Error::CostGuard {
            what: format!("gse enumeration of {s}^{n} assignments"),
            decision: "D-22",
        });
    }
    let nt = terms.len();
    // in_acc[term][v][c] = sum over assigned u in class c of A(u,v)
    // out_acc[term][v][c] = sum over assigned u in class c of A(v,u)
    let mut in_acc = vec![vec![0.0f64; n * s]; nt];
    let mut out_acc = vec![vec![0.0f64; n * s]; nt];
    let mut classes = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    let mut best_classes = vec![0usize; n];
    let norm = 1.0 / (n * n) as f64;

    struct Ctx<'a> {
        terms: &'a [(SquareMatrix, CouplingMatrix)],
        s: usize,
        n: usize,
        norm: f64,
        pin_first: bool,
    }
    fn rec(
        ctx: &Ctx,
        pos: usize,
        energy: f64,
        classes: &mut Vec<usize>,
        in_acc: &mut Vec<Vec<f64>>,
        out_acc: &mut Vec<Vec<f64>>,
        best: &mut f64,
        best_classes: &mut Vec<usize>,
    ) {
        if pos == ctx.n {
            if energy > *best + 1e-15 {
                *best = energy;
                best_classes.copy_from_slice(classes);
            }
            return;
        }
        let top = if pos == 0 && ctx.pin_first { 1 } else { ctx.s };
        for c in 0..top {
            let mut delta = 0.0;
            for (ti, (a, j)) in ctx.terms.iter().enumerate() {
                let mut d = j.value(c, c) * a.value(pos, pos);
                for cp in 0..ctx.s {
                    d += j.value(cp, c) * in_acc[ti][pos * ctx.s + cp]
                        + j.value(c, cp) * out_acc[ti][pos * ctx.s + cp];
                }
                delta += d;
            }
            delta *= ctx.norm;
            classes[pos] = c;
            for (ti, (a, _)) in ctx.terms.iter().enumerate() {
                for w in 0..ctx.n {
                    in_acc[ti][w * ctx.s + c] += a.value(pos, w);
                    out_acc[ti][w * ctx.s + c] += a.value(w, pos);
                }
            }
            rec(ctx, pos + 1, energy + delta, classes, in_acc, out_acc, best, best_classes);
            for (ti, (a, _)) in ctx.terms.iter().enumerate() {
                for w in 0..ctx.n {
                    in_acc[ti][w * ctx.s + c] -= a.value(pos, w);
                    out_acc[ti][w * ctx.s + c] -= a.value(w, pos);
                }
            }
        }
    }
    let ctx = Ctx { terms, s, n, norm, pin_first };
    rec(
        &ctx,
        0,
        0.0,
        &mut classes,
        &mut in_acc,
        &mut out_acc,
        &mut best,
        &mut best_classes,
    );
    Ok((best, NodePartition::new(best_classes, s)?))
}

pub fn gse_exact(a: &SquareMatrix, j: &CouplingMatrix, s: usize) -> Result<(f64, NodePartition)> {
    gse_exact_terms(&[(a.clone(), j.clone())], s)
}

/// Single-node-move hill climbing from seeded random starts; the best local
/// optimum over all restarts is returned. A lower bound on the exact value,
/// monotone in the number of restarts for a fixed seed.
pub fn gse_local_terms(
    terms: &[(SquareMatrix, CouplingMatrix)],
    s: usize,
    restarts: usize,
    seed: u64,
) -> Result<(f64, NodePartition)> {
    assert!(restarts >= 1);
    let n = terms[0].0.n();
    for (a, j) in terms {
        if a.n() != n || j.s() != s {
            return Err(Error::Dimension("terms must share n and s".into()));
        }
    }
    let results: Vec<(f64, Vec<usize>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, &[0x6773_656c, r as u64]);
            let mut classes: Vec<usize> = if r == 0 {
                (0..n).map(|v| v % s).collect()
            } else {
                (0..n).map(|_| rng.gen_range(0..s)).collect()
            };
            let value = hill_climb(terms, s, &mut classes);
            (value, classes)
        })
        .collect();
    let (mut best, mut best_classes) = (f64::NEG_INFINITY, vec![0usize; n]);
    for (v, c) in results {
        if v > best + 1e-15 {
            best = v;
            best_classes = c;
        }
    }
    Ok((best, NodePartition::new(best_classes, s)?))
}

pub fn gse_local(
    a: &SquareMatrix,
    j: &CouplingMatrix,
    s: usize,
    restarts: usize,
    seed: u64,
) -> Result<(f64, NodePartition)> {
    gse_local_terms(&[(a.clone(), j.clone())], s, restarts, seed)
}

fn hill_climb(terms: &[(SquareMatrix, CouplingMatrix)], s: usize, classes: &mut [usize]) -> f64 {
    let n = classes.len();
    let nt = terms.len();
    let norm = 1.0 / (n * n) as f64;
    // accumulators over all vertices but the probe one; maintained per move
    let mut in_acc = vec![vec![0.0f64; n * s]; nt];
    let mut out_acc = vec![vec![0.0f64; n * s]; nt];
    for (ti, (a, _)) in terms.iter().enumerate() {
        for u in 0..n {
            for w in 0..n {
                if u != w {
                    in_acc[ti][w * s + classes[u]] += a.value(u, w);
                    out_acc[ti][w * s + classes[u]] += a.value(w, u);
                }
            }
        }
    }
    let contribution = |in_acc: &Vec<Vec<f64>>, out_acc: &Vec<Vec<f64>>, v: usize, c: usize| {
        let mut d = 0.0;
        for (ti, (a, j)) in terms.iter().enumerate() {
            let mut x = j.value(c, c) * a.value(v, v);
            for cp in 0..s {
                x += j.value(cp, c) * in_acc[ti][v * s + cp]
                    + j.value(c, cp) * out_acc[ti][v * s + cp];
            }
            d += x;
        }
        d
    };
    let mut guard = 0;
    loop {
        let mut moved = false;
        for v in 0..n {
            let cur = classes[v];
            let base = contribution(&in_acc, &out_acc, v, cur);
            let mut best_c = cur;
            let mut best_gain = 0.0;
            for c in 0..s {
                if c == cur {
                    continue;
                }
                let gain = contribution(&in_acc, &out_acc, v, c) - base;
                if gain > best_gain + 1e-12 {
                    best_gain = gain;
                    best_c = c;
                }
            }
            if best_c != cur {
                for (ti, (a, _)) in terms.iter().enumerate() {
                    for w in 0..n {
                        if w != v {
                            in_acc[ti][w * s + cur] -= a.value(v, w);
                            out_acc[ti][w * s + cur] -= a.value(w, v);
                            in_acc[ti][w * s + best_c] += a.value(v, w);
                            out_acc[ti][w * s + best_c] += a.value(w, v);
                        }
                    }
                }
                classes[v] = best_c;
                moved = true;
            }
        }
        guard += 1;
        if !moved || guard > 16 * n {
            break;
        }
    }
    let t = NodePartition::new(classes.to_vec(), s).unwrap();
    let _ = norm;
    energy_of_partition_terms(terms, &t)
}

/// Fractional partition: non-negative mass of part `l` inside class `i`,
/// columns summing to the class measures.
#[derive(Debug, Clone)]
pub struct FractionalPartition {
    /// `mass[l][i]`.
    pub mass: Vec<Vec<f64>>,
    pub class_measures: Vec<f64>,
}

impl FractionalPartition {
    pub fn validate(&self) -> Result<()> {
        let t = self.class_measures.len();
        for row in &self.mass {
            if row.len() != t {
                return Err(Error::Dimension("mass rows must match class count".into()));
            }
            if row.iter().any(|&m| m < -1e-12) {
                return Err(Error::invalid("mass must be non-negative"));
            }
        }
        for i in 0..t {
            let col: f64 = self.mass.iter().map(|row| row[i]).sum();
            if (col - self.class_measures[i]).abs() > 1e-9 {
                return Err(Error::invalid(format!(
                    "column {i} sums to {col}, expected {}",
                    self.class_measures[i]
                )));
            }
        }
        Ok(())
    }
}

/// Objective `sum_{l,l'} J[l][l'] sum_{i,j} mass[l][i] u_ij mass[l'][j]`.
fn fractional_value(u: &StepKernel, j: &CouplingMatrix, mass: &[Vec<f64>]) -> f64 {
    let s = j.s();
    let t = u.t();
    let mut acc = 0.0;
    for l in 0..s {
        for lp in 0..s {
            let jv = j.value(l, lp);
            if jv == 0.0 {
                continue;
            }
            let mut inner = 0.0;
            for i in 0..t {
                if mass[l][i] == 0.0 {
                    continue;
                }
                for jj in 0..t {
                    inner += mass[l][i] * u.value(i, jj) * mass[lp][jj];
                }
            }
            acc += jv * inner;
        }
    }
    acc
}

/// Lower bound on the fractional ground state energy
/// `sup_f sum J[l][l'] int f_l f_{l'} U` of a step kernel. For step input
/// the objective depends on `f` only through the per-class masses, so the
/// search space is the product of scaled simplices; coordinate ascent
/// optimizes one class column at a time over vertex and two-part-support
/// candidates (exact for s = 2), from seeded multi-starts [decision D-18].
pub fn fractional_energy(
    u: &StepKernel,
    j: &CouplingMatrix,
    restarts: usize,
    seed: u64,
) -> (f64, FractionalPartition) {
    assert!(restarts >= 1);
    let s = j.s();
    let t = u.t();
    let measures = u.partition().measures().to_vec();
    let mut best_val = f64::NEG_INFINITY;
    let mut best_mass: Vec<Vec<f64>> = vec![vec![0.0; t]; s];
    for r in 0..restarts {
        let mut rng = stream_rng(seed, &[0x6672_6163, r as u64]);
        let mut mass: Vec<Vec<f64>> = vec![vec![0.0; t]; s];
        for i in 0..t {
            if r == 0 {
                mass[i % s][i] = measures[i];
            } else {
                let mut weights: Vec<f64> = (0..s).map(|_| rng.gen::<f64>() + 1e-9).collect();
                let tot: f64 = weights.iter().sum();
                weights.iter_mut().for_each(|w| *w /= tot);
                for l in 0..s {
                    mass[l][i] = measures[i] * weights[l];
                }
            }
        }
        let mut value = fractional_value(u, j, &mass);
        loop {
            let mut improved = false;
            for i in 0..t {
                if measures[i] == 0.0 {
                    continue;
                }
                // linear coefficients of column i (excluding its self term)
                let mut lin = vec![0.0f64; s];
                for l in 0..s {
                    for lp in 0..s {
                        for jj in 0..t {
                            if jj == i {
                                continue;
                            }
                            lin[l] += j.value(l, lp) * u.value(i, jj) * mass[lp][jj]
                                + j.value(lp, l) * u.value(jj, i) * mass[lp][jj];
                        }
                    }
                }
                let uii = u.value(i, i);
                let lam = measures[i];
                // candidates: single-part columns and two-part interior optima
                let mut cand: Vec<Vec<f64>> = Vec::new();
                for l in 0..s {
                    let mut col = vec![0.0; s];
                    col[l] = lam;
                    cand.push(col);
                }
                for l in 0..s {
                    for lp in l + 1..s {
                        // f(a) = lin_l a + lin_lp (lam-a) + uii * quad(a)
                        let qa = j.value(l, l) * uii;
                        let qb = (j.value(l, lp) + j.value(lp, l)) * uii;
                        let qc = j.value(lp, lp) * uii;
                        // quad(a) = qa a^2 + qb a(lam-a) + qc (lam-a)^2
                        let c2 = qa - qb + qc;
                        let c1 = lin[l] - lin[lp] + qb * lam - 2.0 * qc * lam;
                        if c2.abs() > 1e-15 {
                            let a_star = -c1 / (2.0 * c2);
                            if a_star > 0.0 && a_star < lam {
                                let mut col = vec![0.0; s];
                                col[l] = a_star;
                                col[lp] = lam - a_star;
                                cand.push(col);
                            }
                        }
                    }
                }
                let current: Vec<f64> = (0..s).map(|l| mass[l][i]).collect();
                let mut best_col = current.clone();
                let mut best_here = value;
                for col in cand {
                    for l in 0..s {
                        mass[l][i] = col[l];
                    }
                    let v = fractional_value(u, j, &mass);
                    if v > best_here + 1e-12 {
                        best_here = v;
                        best_col = col;
                    }
                }
                for l in 0..s {
                    mass[l][i] = best_col[l];
                }
                if best_here > value + 1e-12 {
                    value = best_here;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        if value > best_val {
            best_val = value;
            best_mass = mass;
        }
    }
    (best_val, FractionalPartition { mass: best_mass, class_measures: measures })
}

/// Layered tuple of real r-arrays, indexed by `z` in `[k]^r` (row-major).
#[derive(Debug, Clone)]
pub struct RArrayTuple {
    r: usize,
    k: usize,
    n: usize,
    arrays: Vec<Vec<f64>>,
}

impl RArrayTuple {
    pub fn new(r: usize, k: usize, n: usize, arrays: Vec<Vec<f64>>) -> Result<Self> {
        if !(r == 2 || r == 3) {
            return Err(Error::invalid("rank must be 2 or 3 [decision D-3]"));
        }
        let cells = n.pow(r as u32);
        if arrays.len() != k.pow(r as u32) {
            return Err(Error::Dimension(format!(
                "expected {} arrays, got {}",
                k.pow(r as u32),
                arrays.len()
            )));
        }
        if arrays.iter().any(|a| a.len() != cells) {
            return Err(Error::Dimension(format!("arrays must have {cells} cells")));
        }
        Ok(RArrayTuple { r, k, n, arrays })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sup_norm(&self) -> f64 {
        self.arrays
            .iter()
            .flat_map(|a| a.iter())
            .fold(0.0f64, |acc, &v| acc.max(v.abs()))
    }

    pub fn array(&self, z: &[usize]) -> &[f64] {
        let mut idx = 0;
        for &zi in z {
            idx = idx * self.k + zi;
        }
        &self.arrays[idx]
    }

    /// Principal subtuple on the index set `idx` (each array restricted).
    pub fn principal(&self, idx: &[usize]) -> RArrayTuple {
        let q = idx.len();
        let cells = q.pow(self.r as u32);
        let arrays = self
            .arrays
            .iter()
            .map(|a| {
                let mut out = vec![0.0; cells];
                if self.r == 2 {
                    for x in 0..q {
                        for y in 0..q {
                            out[x * q + y] = a[idx[x] * self.n + idx[y]];
                        }
                    }
                } else {
                    for x in 0..q {
                        for y in 0..q {
                            for z in 0..q {
                                out[(x * q + y) * q + z] =
                                    a[(idx[x] * self.n + idx[y]) * self.n + idx[z]];
                            }
                        }
                    }
                }
                out
            })
            .collect();
        RArrayTuple { r: self.r, k: self.k, n: q, arrays }
    }
}

/// Layered energy `E_T(G) = sum_z (1/n^r) sum_tuple G^z(tuple) prod 1[T(i_j)=z_j]`.
pub fn layered_energy(g: &RArrayTuple, t: &NodePartition) -> f64 {
    assert_eq!(t.n(), g.n());
    let n = g.n();
    let k = g.k();
    let mut acc = 0.0;
    if g.r == 2 {
        for u in 0..n {
            for v in 0..n {
                let z = t.class(u) * k + t.class(v);
                acc += g.arrays[z][u * n + v];
            }
        }
        acc / (n * n) as f64
    } else {
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    let z = (t.class(u) * k + t.class(v)) * k + t.class(w);
                    acc += g.arrays[z][(u * n + v) * n + w];
                }
            }
        }
        acc / (n * n * n) as f64
    }
}

/// Exhaustive layered ground state energy over partitions into `k` parts.
pub fn layered_gse_exact(g: &RArrayTuple) -> Result<(f64, NodePartition)> {
    let n = g.n();
    let k = g.k();
    if (k as f64).powi(n as i32) > 2e6 {
        return Err(Error::CostGuard {
            what: format!("layered enumeration of {k}^{n} assignments"),
            decision: "D-22",
        });
    }
    let mut classes = vec![0usize; n];
    let mut best = f64::NEG_INFINITY;
    let mut best_classes = classes.clone();
    loop {
        let t = NodePartition::new(classes.clone(), k)?;
        let v = layered_energy(g, &t);
        if v > best + 1e-15 {
            best = v;
            best_classes = classes.clone();
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok((best, NodePartition::new(best_classes, k)?));
            }
            classes[pos] += 1;
            if classes[pos] < k {
                break;
            }
            classes[pos] = 0;
            pos += 1;
        }
    }
}

/// Hill-climbing lower bound for the layered energy.
pub fn layered_gse_local(
    g: &RArrayTuple,
    restarts: usize,
    seed: u64,
) -> Result<(f64, NodePartition)> {
    let n = g.n();
    let k = g.k();
    let results: Vec<(f64, Vec<usize>)> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, &[0x6c61_7965, r as u64]);
            let mut classes: Vec<usize> = if r == 0 {
                (0..n).map(|v| v % k).collect()
            } else {
                (0..n).map(|_| rng.gen_range(0..k)).collect()
            };
            let mut value = layered_energy(g, &NodePartition::new(classes.clone(), k).unwrap());
            loop {
                let mut moved = false;
                for v in 0..n {
                    let cur = classes[v];
                    let mut best_c = cur;
                    let mut best_v = value;
                    for c in 0..k {
                        if c == cur {
                            continue;
                        }
                        classes[v] = c;
                        let cand =
                            layered_energy(g, &NodePartition::new(classes.clone(), k).unwrap());
                        if cand > best_v + 1e-12 {
                            best_v = cand;
                            best_c = c;
                        }
                    }
                    classes[v] = best_c;
                    if best_c != cur {
                        value = best_v;
                        moved = true;
                    }
                }
                if !moved {
                    break;
                }
            }
            (value, classes)
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut best_classes = vec![0usize; n];
    for (v, c) in results {
        if v > best + 1e-15 {
            best = v;
            best_classes = c;
        }
    }
    Ok((best, NodePartition::new(best_classes, k)?))
}

/// One trial of the sampling experiment.
#[derive(Debug, Clone)]
pub struct GseTrial {
    pub trial: usize,
    pub sample_value: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct GseSamplingReport {
    pub baseline: f64,
    pub threshold: f64,
    pub exceedance_rate: f64,
    pub trials: Vec<GseTrial>,
}

/// Sample principal `q x q` subarrays (uniform index subsets, without
/// replacement [decision D-19]), maximize on each sample, and report the
/// empirical rate of `|sample energy - baseline| > rho * sup|A|`.
pub fn gse_sampling_experiment(
    a: &SquareMatrix,
    j: &CouplingMatrix,
    s: usize,
    q: usize,
    trials: usize,
    rho: f64,
    baseline: f64,
    restarts: usize,
    seed: u64,
) -> Result<GseSamplingReport> {
    let n = a.n();
    if q > n {
        return Err(Error::Dimension(format!("q={q} exceeds n={n}")));
    }
    let threshold = rho * a.sup_norm();
    let rows: Result<Vec<GseTrial>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, &[0x6773_6578, trial as u64]);
            let mut all: Vec<usize> = (0..n).collect();
            use rand::seq::SliceRandom;
            all.shuffle(&mut rng);
            let mut idx: Vec<usize> = all.into_iter().take(q).collect();
            idx.sort_unstable();
            let sub = a.principal_submatrix(&idx);
            let budget = (s as f64).powi(q as i32 - 1);
            let value = if budget <= EXACT_ASSIGNMENT_BUDGET / 8.0 {
                gse_exact(&sub, j, s)?.0
            } else {
                gse_local(&sub, j, s, restarts, seed ^ (trial as u64) << 17)?.0
            };
            Ok(GseTrial {
                trial,
                sample_value: value,
                deviation: (value - baseline).abs(),
            })
        })
        .collect();
    let rows = rows?;
    let exceed = rows.iter().filter(|t| t.deviation > threshold).count();
    Ok(GseSamplingReport {
        baseline,
        threshold,
        exceedance_rate: exceed as f64 / trials as f64,
        trials: rows,
    })
}

/// Layered analogue of [`gse_sampling_experiment`]: principal q-subtuples
/// with `1/q^r` weighting, maximized exactly when the assignment space
/// allows and by hill climbing otherwise.
pub fn layered_gse_sampling_experiment(
    g: &RArrayTuple,
    q: usize,
    trials: usize,
    rho: f64,
    baseline: f64,
    restarts: usize,
    seed: u64,
) -> Result<GseSamplingReport> {
    let n = g.n();
    if q > n {
        return Err(Error::Dimension(format!("q={q} exceeds n={n}")));
    }
    let threshold = rho * g.sup_norm();
    let rows: Result<Vec<GseTrial>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(seed, &[0x6c67_7365, trial as u64]);
            let mut all: Vec<usize> = (0..n).collect();
            use rand::seq::SliceRandom;
            all.shuffle(&mut rng);
            let mut idx: Vec<usize> = all.into_iter().take(q).collect();
            idx.sort_unstable();
            let sub = g.principal(&idx);
            let value = if (g.k() as f64).powi(q as i32) <= 2e6 {
                layered_gse_exact(&sub)?.0
            } else {
                layered_gse_local(&sub, restarts, seed ^ (trial as u64) << 21)?.0
            };
            Ok(GseTrial { trial, sample_value: value, deviation: (value - baseline).abs() })
        })
        .collect();
    let rows = rows?;
    let exceed = rows.iter().filter(|t| t.deviation > threshold).count();
    Ok(GseSamplingReport {
        baseline,
        threshold,
        exceedance_rate: exceed as f64 / trials as f64,
        trials: rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IntervalPartition;

    fn two_vertex_cut() -> (SquareMatrix, CouplingMatrix) {
        (
            SquareMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
            CouplingMatrix::maxcut(),
        )
    }

    #[test]
    fn mean_energy_with_single_part() {
        let a = SquareMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let j = CouplingMatrix::from_rows(vec![vec![1.0]]).unwrap();
        let t = NodePartition::new(vec![0, 0], 1).unwrap();
        assert!((energy_of_partition(&a, &j, &t) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn two_vertex_cut_energy() {
        let (a, j) = two_vertex_cut();
        let t = NodePartition::new(vec![0, 1], 2).unwrap();
        assert!((energy_of_partition(&a, &j, &t) - 0.5).abs() < 1e-12);
        let (v, best) = gse_exact(&a, &j, 2).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!((energy_of_partition(&a, &j, &best) - v).abs() < 1e-12);
    }

    #[test]
    fn partition_invariance_for_constant_arrays() {
        let a = SquareMatrix::from_rows(vec![vec![0.7; 3]; 3]).unwrap();
        let j = CouplingMatrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let t1 = NodePartition::new(vec![0, 0, 1], 2).unwrap();
        let t2 = NodePartition::new(vec![1, 0, 1], 2).unwrap();
        let e1 = energy_of_partition(&a, &j, &t1);
        let e2 = energy_of_partition(&a, &j, &t2);
        assert!((e1 - e2).abs() < 1e-12);
    }

    #[test]
    fn empty_graph_identity_coupling() {
        let a = SquareMatrix::from_graph(&SimpleGraph::empty(4));
        let j = CouplingMatrix::identity(2);
        let (v, _) = gse_exact(&a, &j, 2).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn c5_maxcut_density() {
        let a = SquareMatrix::from_graph(&SimpleGraph::cycle(5));
        let (v, t) = gse_exact(&a, &CouplingMatrix::maxcut(), 2).unwrap();
        assert!((v - 8.0 / 25.0).abs() < 1e-12);
        // 4 cut edges: recompute from the partition
        let cut: usize = SimpleGraph::cycle(5)
            .edges()
            .iter()
            .filter(|&&(u, w)| t.class(u) != t.class(w))
            .count();
        assert_eq!(cut, 4);
    }

    /// Independent brute-force max-cut oracle on subsets.
    fn maxcut_brute(g: &SimpleGraph) -> usize {
        let n = g.n();
        let mut best = 0;
        for mask in 0u32..1 << n {
            let mut cut = 0;
            for (u, v) in g.edges() {
                if (mask >> u & 1) != (mask >> v & 1) {
                    cut += 1;
                }
            }
            best = best.max(cut);
        }
        best
    }

    #[test]
    fn gse_equals_maxcut_on_random_graphs() {
        for seed in 0..10u64 {
            let mut rng = stream_rng(17, &[seed]);
            let n = 8;
            let g = SimpleGraph::gnp(n, 0.5, &mut rng);
            let a = SquareMatrix::from_graph(&g);
            let (v, _) = gse_exact(&a, &CouplingMatrix::maxcut(), 2).unwrap();
            let brute = maxcut_brute(&g);
            assert!((v - 2.0 * brute as f64 / (n * n) as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn local_search_is_a_lower_bound_and_often_exact() {
        let mut hits = 0;
        let total = 40;
        for seed in 0..total {
            let mut rng = stream_rng(19, &[seed]);
            let n = 10;
            let a = SquareMatrix::random_sign_symmetric(n, &mut rng);
            let j = CouplingMatrix::maxcut();
            let (exact, _) = gse_exact(&a, &j, 2).unwrap();
            let (local, _) = gse_local(&a, &j, 2, 32, seed).unwrap();
            assert!(local <= exact + 1e-12);
            if (local - exact).abs() < 1e-9 {
                hits += 1;
            }
        }
        assert!(hits * 10 >= total * 9, "local search hit only {hits}/{total}");
    }

    #[test]
    fn local_restart_monotone() {
        let mut rng = stream_rng(23, &[0]);
        let a = SquareMatrix::random_sign_symmetric(12, &mut rng);
        let j = CouplingMatrix::maxcut();
        let mut last = f64::NEG_INFINITY;
        for restarts in [1, 4, 16] {
            let (v, _) = gse_local(&a, &j, 2, restarts, 5).unwrap();
            assert!(v >= last - 1e-12);
            last = v;
        }
    }

    #[test]
    fn fractional_single_part_is_integral() {
        let p = IntervalPartition::new(vec![0.5, 0.5]).unwrap();
        let u = StepKernel::new(p, vec![vec![0.2, 0.6], vec![0.6, 0.1]]).unwrap();
        let j = CouplingMatrix::from_rows(vec![vec![1.0]]).unwrap();
        let (v, f) = fractional_energy(&u, &j, 1, 0);
        assert!((v - u.integral()).abs() < 1e-12);
        f.validate().unwrap();
    }

    #[test]
    fn fractional_dominates_integral_cut() {
        let (a, j) = two_vertex_cut();
        let _ = a;
        let u = crate::model::graphon_of_graph(&SimpleGraph::complete(2));
        let (v, f) = fractional_energy(u.kernel(), &j, 8, 0);
        f.validate().unwrap();
        assert!(v >= 0.5 - 1e-9);
    }

    #[test]
    fn fractional_constant_kernel_vs_grid_oracle() {
        let c = 0.8;
        let u = StepKernel::constant(IntervalPartition::new(vec![0.5, 0.5]).unwrap(), c);
        let j = CouplingMatrix::from_rows(vec![vec![1.0, -0.5], vec![-0.5, 0.2]]).unwrap();
        let (v, _) = fractional_energy(&u, &j, 16, 0);
        // grid oracle at resolution 1/100 over the simplex
        let mut grid_best = f64::NEG_INFINITY;
        for i in 0..=100 {
            let p0 = i as f64 / 100.0;
            let p1 = 1.0 - p0;
            let val = c
                * (j.value(0, 0) * p0 * p0
                    + j.value(0, 1) * p0 * p1
                    + j.value(1, 0) * p1 * p0
                    + j.value(1, 1) * p1 * p1);
            grid_best = grid_best.max(val);
        }
        assert!(v >= grid_best - 1e-4, "{v} vs grid {grid_best}");
        assert!(v <= grid_best + 1e-2);
    }

    #[test]
    fn layered_r2_matches_j_form() {
        let mut rng = stream_rng(29, &[0]);
        for _ in 0..10 {
            let n = 6;
            let k = 2;
            let a = SquareMatrix::random_sign_symmetric(n, &mut rng);
            let j = CouplingMatrix::from_rows(vec![
                vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
            ])
            .unwrap();
            let arrays: Vec<Vec<f64>> = (0..k * k)
                .map(|z| {
                    let (za, zb) = (z / k, z % k);
                    (0..n * n)
                        .map(|cell| j.value(za, zb) * a.value(cell / n, cell % n))
                        .collect()
                })
                .collect();
            let g = RArrayTuple::new(2, k, n, arrays).unwrap();
            let classes: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
            let t = NodePartition::new(classes, k).unwrap();
            let e1 = layered_energy(&g, &t);
            let e2 = energy_of_partition(&a, &j, &t);
            assert!((e1 - e2).abs() < 1e-12);
        }
    }

    #[test]
    fn layered_rank3_energy() {
        // all-ones 3-arrays on one class: energy is the full mean
        let n = 4;
        let g = RArrayTuple::new(3, 1, n, vec![vec![1.0; n * n * n]]).unwrap();
        let t = NodePartition::new(vec![0; n], 1).unwrap();
        assert!((layered_energy(&g, &t) - 1.0).abs() < 1e-12);
        let (v, _) = layered_gse_exact(&g).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn layered_local_lower_bounds_exact() {
        let mut rng = stream_rng(31, &[0]);
        for trial in 0..5u64 {
            let n = 7;
            let k = 2;
            let arrays: Vec<Vec<f64>> = (0..k * k)
                .map(|_| (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let g = RArrayTuple::new(2, k, n, arrays).unwrap();
            let (exact, _) = layered_gse_exact(&g).unwrap();
            let (local, _) = layered_gse_local(&g, 16, trial).unwrap();
            assert!(local <= exact + 1e-12);
        }
    }

    #[test]
    fn sampling_constant_array_has_zero_deviation() {
        let a = SquareMatrix::from_rows(vec![vec![1.0; 6]; 6]).unwrap();
        let j = CouplingMatrix::maxcut();
        let (base, _) = gse_exact(&a, &j, 2).unwrap();
        let report = gse_sampling_experiment(&a, &j, 2, 4, 20, 0.01, base, 8, 3).unwrap();
        assert_eq!(report.exceedance_rate, 0.0);
        for t in &report.trials {
            assert!(t.deviation < 1e-12);
        }
    }

    #[test]
    fn layered_sampling_rank3() {
        let mut rng = stream_rng(41, &[0]);
        let n = 14;
        let k = 2;
        // symmetric 0/1 3-arrays split by a hidden bipartition
        let hidden: Vec<usize> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let mut arrays = vec![vec![0.0; n * n * n]; k * k * k];
        for u in 0..n {
            for v in 0..n {
                for w in 0..n {
                    if u == v || v == w || u == w {
                        continue;
                    }
                    let z = (hidden[u] * k + hidden[v]) * k + hidden[w];
                    arrays[z][(u * n + v) * n + w] = 1.0;
                }
            }
        }
        let g = RArrayTuple::new(3, k, n, arrays).unwrap();
        let (base, _) = layered_gse_local(&g, 16, 0).unwrap();
        let report = layered_gse_sampling_experiment(&g, 8, 30, 0.3, base, 8, 5).unwrap();
        // generous band: rank-3 subtuples of a dense pattern stay close
        assert!(report.exceedance_rate <= 0.5, "rate {}", report.exceedance_rate);
    }

    #[test]
    fn sampling_exceedance_decreases_in_q() {
        let mut rng = stream_rng(37, &[0]);
        let a = SquareMatrix::random_sign_symmetric(32, &mut rng);
        let j = CouplingMatrix::maxcut();
        let (base, _) = gse_local(&a, &j, 2, 64, 0).unwrap();
        let small = gse_sampling_experiment(&a, &j, 2, 8, 60, 0.1, base, 16, 1).unwrap();
        let large = gse_sampling_experiment(&a, &j, 2, 24, 60, 0.1, base, 16, 2).unwrap();
        assert!(large.exceedance_rate <= small.exceedance_rate + 0.15);
    }
}
