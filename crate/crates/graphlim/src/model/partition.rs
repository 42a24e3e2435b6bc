//! Measured partitions of the unit interval.
//!
//! A partition is stored as the vector of its class measures. When the
//! partition is refined by the canonical `n`-partition (every class a union
//! of cells of width `1/n`) the field `alignment_n` records `n`; aligned
//! partitions are constructed from cell counts so the measures are exact
//! integer multiples of `1/n` [decision D-2].
//!
//! Coarser partitions of a fixed step object are handled as *labelings* of
//! its classes (`labels[i]` = coarse class of fine class `i`); the helpers at
//! the bottom convert between the two views.

use crate::error::{Error, Result};

pub const MEASURE_SUM_TOL: f64 = 1e-12;
pub const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalPartition {
    class_measures: Vec<f64>,
    alignment_n: Option<usize>,
}

impl IntervalPartition {
    /// Partition with the given class measures (must sum to 1).
    pub fn new(class_measures: Vec<f64>) -> Result<Self> {
        let p = IntervalPartition { class_measures, alignment_n: None };
        p.validate()?;
        Ok(p)
    }

    /// Aligned partition: class `i` is a union of `cell_counts[i]` cells of
    /// the canonical `n`-partition.
    pub fn aligned(n: usize, cell_counts: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("alignment n must be positive"));
        }
        let total: usize = cell_counts.iter().sum();
        if total != n {
            return Err(Error::invalid(format!(
                "cell counts sum to {total}, expected {n}"
            )));
        }
        let measures = cell_counts.iter().map(|&c| c as f64 / n as f64).collect();
        Ok(IntervalPartition { class_measures: measures, alignment_n: Some(n) })
    }

    /// The canonical `n`-partition: `n` classes of measure `1/n`.
    pub fn canonical(n: usize) -> Self {
        IntervalPartition {
            class_measures: vec![1.0 / n as f64; n],
            alignment_n: Some(n),
        }
    }

    /// The one-class partition of `[0,1]`.
    pub fn trivial() -> Self {
        IntervalPartition { class_measures: vec![1.0], alignment_n: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.class_measures.is_empty() {
            return Err(Error::invalid("partition needs at least one class"));
        }
        if self.class_measures.iter().any(|&m| m < 0.0 || !m.is_finite()) {
            return Err(Error::invalid("class measures must be non-negative"));
        }
        let sum: f64 = self.class_measures.iter().sum();
        if (sum - 1.0).abs() > MEASURE_SUM_TOL {
            return Err(Error::invalid(format!("class measures sum to {sum}, expected 1")));
        }
        if let Some(n) = self.alignment_n {
            for (i, &m) in self.class_measures.iter().enumerate() {
                let scaled = m * n as f64;
                if (scaled - scaled.round()).abs() > ALIGN_TOL {
                    return Err(Error::invalid(format!(
                        "class {i} measure {m} is not a multiple of 1/{n}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.class_measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_measures.is_empty()
    }

    pub fn measures(&self) -> &[f64] {
        &self.class_measures
    }

    pub fn measure(&self, i: usize) -> f64 {
        self.class_measures[i]
    }

    pub fn alignment_n(&self) -> Option<usize> {
        self.alignment_n
    }

    /// Cumulative break points `0 = c_0 < c_1 < ... < c_t = 1` of the
    /// interval realization (class `i` occupies `[c_i, c_{i+1})`).
    pub fn cumulative(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len() + 1);
        let mut acc = 0.0;
        out.push(0.0);
        for &m in &self.class_measures {
            acc += m;
            out.push(acc);
        }
        *out.last_mut().unwrap() = 1.0;
        out
    }

    /// For an aligned partition, the number of canonical cells per class.
    pub fn cell_counts(&self) -> Option<Vec<usize>> {
        let n = self.alignment_n?;
        Some(
            self.class_measures
                .iter()
                .map(|&m| (m * n as f64).round() as usize)
                .collect(),
        )
    }

    /// Cell -> class map of the interval realization of an aligned partition.
    pub fn cell_labels(&self) -> Option<Vec<usize>> {
        let counts = self.cell_counts()?;
        let mut out = Vec::with_capacity(self.alignment_n.unwrap());
        for (class, &c) in counts.iter().enumerate() {
            out.extend(std::iter::repeat(class).take(c));
        }
        Some(out)
    }

    /// Class containing the point `x` of the interval realization.
    pub fn class_at(&self, x: f64) -> usize {
        let mut acc = 0.0;
        for (i, &m) in self.class_measures.iter().enumerate() {
            acc += m;
            if x < acc {
                return i;
            }
        }
        self.class_measures.len() - 1
    }

    pub fn is_equitable(&self, tol: f64) -> bool {
        let target = 1.0 / self.len() as f64;
        self.class_measures.iter().all(|&m| (m - target).abs() <= tol)
    }

    /// Map from the classes of `self` onto the classes of the coarser
    /// partition `coarse`, provided the interval realization of `self`
    /// refines it. Returns `labels[i]` = index of the coarse class that
    /// contains fine class `i`.
    pub fn grouping_onto(&self, coarse: &IntervalPartition) -> Result<Vec<usize>> {
        let fine_cum = self.cumulative();
        let coarse_cum = coarse.cumulative();
        let mut labels = Vec::with_capacity(self.len());
        let mut j = 0;
        for i in 0..self.len() {
            while j + 1 < coarse.len() && fine_cum[i] >= coarse_cum[j + 1] - ALIGN_TOL {
                j += 1;
            }
            if fine_cum[i + 1] > coarse_cum[j + 1] + ALIGN_TOL {
                return Err(Error::IncompatiblePartitions(format!(
                    "fine class {i} straddles the boundary of coarse class {j}"
                )));
            }
            labels.push(j);
        }
        Ok(labels)
    }

    /// Coarsen by a labeling of the classes: class `c` of the result has
    /// measure `sum of measures with labels[i] == c`.
    pub fn group_by(&self, labels: &[usize], n_classes: usize) -> IntervalPartition {
        debug_assert_eq!(labels.len(), self.len());
        let mut measures = vec![0.0; n_classes];
        for (i, &l) in labels.iter().enumerate() {
            measures[l] += self.class_measures[i];
        }
        IntervalPartition { class_measures: measures, alignment_n: self.alignment_n }
    }
}

/// Relabel `labels` to `0..count` in order of first occurrence; returns the
/// class count.
pub fn normalize_labels(labels: &mut [usize]) -> usize {
    let mut map: Vec<Option<usize>> = vec![None; labels.len()];
    let mut next = 0;
    for l in labels.iter_mut() {
        let slot = &mut map[*l];
        match slot {
            Some(c) => *l = *c,
            None => {
                *slot = Some(next);
                *l = next;
                next += 1;
            }
        }
    }
    next
}

/// Split every class of `labels` by membership in the witness sets `s`, `t`
/// and by the classes of `q` (any of which may be empty slices to skip).
/// This is the refinement step used by the regularity loops: the result
/// refines `labels`, `q`, and `{s, t}` simultaneously.
pub fn refine_labels(
    labels: &[usize],
    q: Option<&[usize]>,
    s: Option<&[bool]>,
    t: Option<&[bool]>,
) -> (Vec<usize>, usize) {
    use std::collections::HashMap;
    let n = labels.len();
    let mut keys: Vec<(usize, usize, bool, bool)> = Vec::with_capacity(n);
    for i in 0..n {
        keys.push((
            labels[i],
            q.map_or(0, |q| q[i]),
            s.is_some_and(|s| s[i]),
            t.is_some_and(|t| t[i]),
        ));
    }
    let mut seen: HashMap<(usize, usize, bool, bool), usize> = HashMap::new();
    let mut out = Vec::with_capacity(n);
    for key in keys {
        let next = seen.len();
        let class = *seen.entry(key).or_insert(next);
        out.push(class);
    }
    let count = seen.len();
    (out, count)
}

/// Result of [`common_refinement`]: the refined partition together with the
/// class-inclusion maps into the two inputs.
#[derive(Debug, Clone)]
pub struct CommonRefinement {
    pub partition: IntervalPartition,
    /// For each output class, the class of the first input containing it.
    pub into_first: Vec<usize>,
    /// For each output class, the class of the second input containing it.
    pub into_second: Vec<usize>,
    /// For aligned inputs, the cell labeling of the output classes.
    pub cell_labels: Option<Vec<usize>>,
}

/// A pair of aligned sets used to split a refinement further (each set is a
/// union of canonical cells, given by membership flags of length `n`).
#[derive(Debug, Clone)]
pub struct SplitPair {
    pub s: Vec<bool>,
    pub t: Vec<bool>,
}

/// Coarsest common refinement of `p`, `q`, and the splits.
///
/// Aligned inputs (same `n`) are realized as cell labelings and grouped by
/// the tuple of memberships; the class count is at most
/// `t_p * t_q * 4^{splits}`. Unaligned inputs are merged by their cumulative
/// break points and admit no splits.
pub fn common_refinement(
    p: &IntervalPartition,
    q: &IntervalPartition,
    splits: &[SplitPair],
) -> Result<CommonRefinement> {
    match (p.alignment_n(), q.alignment_n()) {
        (Some(n), Some(m)) if n == m => {
            let pl = p.cell_labels().unwrap();
            let ql = q.cell_labels().unwrap();
            for (si, split) in splits.iter().enumerate() {
                if split.s.len() != n || split.t.len() != n {
                    return Err(Error::Dimension(format!(
                        "split {si} has sets over {}/{} cells, expected {n}",
                        split.s.len(),
                        split.t.len()
                    )));
                }
            }
            let mut labels = pl.clone();
            let (mut labels2, _) = refine_labels(&labels, Some(&ql), None, None);
            for split in splits {
                let (next, _) = refine_labels(&labels2, None, Some(&split.s), Some(&split.t));
                labels2 = next;
            }
            let count = normalize_labels(&mut labels2);
            labels = labels2;
            let mut counts = vec![0usize; count];
            let mut into_first = vec![0usize; count];
            let mut into_second = vec![0usize; count];
            for cell in 0..n {
                let c = labels[cell];
                counts[c] += 1;
                into_first[c] = pl[cell];
                into_second[c] = ql[cell];
            }
            let partition = IntervalPartition::aligned(n, &counts)?;
            Ok(CommonRefinement { partition, into_first, into_second, cell_labels: Some(labels) })
        }
        (None, None) => {
            if !splits.is_empty() {
                return Err(Error::IncompatiblePartitions(
                    "splits require aligned partitions".into(),
                ));
            }
            let pc = p.cumulative();
            let qc = q.cumulative();
            let mut breaks: Vec<f64> = pc.iter().chain(qc.iter()).copied().collect();
            breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            breaks.dedup_by(|a, b| (*a - *b).abs() <= ALIGN_TOL);
            let mut measures = Vec::new();
            let mut into_first = Vec::new();
            let mut into_second = Vec::new();
            for w in breaks.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                let mid = 0.5 * (lo + hi);
                measures.push(hi - lo);
                into_first.push(locate(&pc, mid));
                into_second.push(locate(&qc, mid));
            }
            let total: f64 = measures.iter().sum();
            if let Some(last) = measures.last_mut() {
                *last += 1.0 - total;
            }
            let partition = IntervalPartition::new(measures)?;
            Ok(CommonRefinement { partition, into_first, into_second, cell_labels: None })
        }
        _ => Err(Error::IncompatiblePartitions(
            "partitions must share the same alignment".into(),
        )),
    }
}

fn locate(cum: &[f64], x: f64) -> usize {
    match cum.iter().position(|&c| c > x) {
        Some(idx) => idx.saturating_sub(1),
        None => cum.len().saturating_sub(2),
    }
}
