//! File formats and text emission.
//!
//! Graph files: first line `n m`, then `m` lines `u v` with 0-indexed
//! endpoints. Kernel/graphon files: `measures: [...]` and `values: [[...]]`
//! lines, plus optional `alignment: n`; colored digraphon files add `k: K`
//! and one `block (a,b): [[...]]` line per component (0-indexed colors).
//! Colored digraph files: `n k` header then `n^2 - n` lines `i j c`.
//!
//! Floats are printed with 12 significant digits, `.` decimal, no locale
//! [decision D-25].

use crate::error::{Error, Result};
use crate::model::{
    ColoredDigraph, ColoredDigraphon, IntervalPartition, SimpleGraph, StepGraphon, StepKernel,
};
use std::path::Path;

/// Round to 12 significant digits and print the shortest representation.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    let scale = 10f64.powi(11 - exp);
    let rounded = (x * scale).round() / scale;
    format!("{rounded}")
}

pub fn write_csv_line(fields: &[String]) -> String {
    fields.join(",")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line: line + 1, msg: msg.into() }
}

pub fn parse_graph(text: &str) -> Result<SimpleGraph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty graph file"))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(ln, "expected vertex count"))?;
    let m: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(ln, "expected edge count"))?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {m} edge lines")))?;
        let mut it = line.split_whitespace();
        let u: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(ln, "expected edge endpoint"))?;
        let v: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(ln, "expected edge endpoint"))?;
        edges.push((u, v));
    }
    SimpleGraph::from_edges(n, &edges)
}

pub fn format_graph(g: &SimpleGraph) -> String {
    let edges = g.edges();
    let mut out = format!("{} {}\n", g.n(), edges.len());
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

pub fn read_graph(path: &Path) -> Result<SimpleGraph> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn parse_colored_digraph(text: &str) -> Result<ColoredDigraph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines.next().ok_or_else(|| parse_err(0, "empty file"))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(ln, "expected vertex count"))?;
    let k: usize = it
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| parse_err(ln, "expected color count"))?;
    let mut g = ColoredDigraph::uniform(n, k, 0);
    let mut seen = vec![false; n * n];
    for _ in 0..n * n - n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {} pair lines", n * n - n)))?;
        let mut it = line.split_whitespace();
        let mut next = |what: &str| -> Result<usize> {
            it.next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| parse_err(ln, format!("expected {what}")))
        };
        let i = next("source vertex")?;
        let j = next("target vertex")?;
        let c = next("color")?;
        if i == j || i >= n || j >= n {
            return Err(parse_err(ln, format!("bad pair ({i},{j})")));
        }
        if c >= k {
            return Err(parse_err(ln, format!("color {c} out of range")));
        }
        if seen[i * n + j] {
            return Err(parse_err(ln, format!("duplicate pair ({i},{j})")));
        }
        seen[i * n + j] = true;
        g.set_color(i, j, c);
    }
    Ok(g)
}

pub fn format_colored_digraph(g: &ColoredDigraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.k());
    for i in 0..g.n() {
        for j in 0..g.n() {
            if i != j {
                out.push_str(&format!("{i} {j} {}\n", g.color(i, j).unwrap()));
            }
        }
    }
    out
}

/// Contents of a kernel-format file.
#[derive(Debug, Clone)]
pub enum GkFile {
    Kernel(StepKernel),
    Colored(ColoredDigraphon),
}

impl GkFile {
    pub fn kernel(self) -> Result<StepKernel> {
        match self {
            GkFile::Kernel(k) => Ok(k),
            GkFile::Colored(_) => Err(Error::invalid("expected a plain kernel file")),
        }
    }

    pub fn graphon(self) -> Result<StepGraphon> {
        StepGraphon::new(self.kernel()?)
    }

    pub fn colored(self) -> Result<ColoredDigraphon> {
        match self {
            GkFile::Colored(c) => Ok(c),
            GkFile::Kernel(_) => Err(Error::invalid("expected a colored digraphon file")),
        }
    }
}

pub fn parse_gk(text: &str) -> Result<GkFile> {
    let mut measures: Option<Vec<f64>> = None;
    let mut alignment: Option<usize> = None;
    let mut values: Option<Vec<Vec<f64>>> = None;
    let mut k: Option<usize> = None;
    let mut blocks: Vec<(usize, usize, Vec<Vec<f64>>, usize)> = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "expected 'key: value'"))?;
        let key = key.trim();
        let rest = rest.trim();
        match key {
            "measures" => {
                measures = Some(
                    serde_json::from_str(rest)
                        .map_err(|e| parse_err(ln, format!("bad measures array: {e}")))?,
                )
            }
            "alignment" => {
                alignment = Some(
                    rest.parse()
                        .map_err(|_| parse_err(ln, "alignment must be a positive integer"))?,
                )
            }
            "values" => {
                values = Some(
                    serde_json::from_str(rest)
                        .map_err(|e| parse_err(ln, format!("bad values matrix: {e}")))?,
                )
            }
            "k" => {
                k = Some(rest.parse().map_err(|_| parse_err(ln, "k must be a positive integer"))?)
            }
            _ if key.starts_with("block") => {
                let spec = key.trim_start_matches("block").trim();
                let spec = spec
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| parse_err(ln, "block key must look like 'block (a,b)'"))?;
                let (a, b) = spec
                    .split_once(',')
                    .ok_or_else(|| parse_err(ln, "block key must look like 'block (a,b)'"))?;
                let a: usize =
                    a.trim().parse().map_err(|_| parse_err(ln, "bad block row color"))?;
                let b: usize =
                    b.trim().parse().map_err(|_| parse_err(ln, "bad block column color"))?;
                let m: Vec<Vec<f64>> = serde_json::from_str(rest)
                    .map_err(|e| parse_err(ln, format!("bad block matrix: {e}")))?;
                blocks.push((a, b, m, ln));
            }
            _ => return Err(parse_err(ln, format!("unknown key '{key}'"))),
        }
    }
    let measures = measures.ok_or_else(|| parse_err(0, "missing 'measures' line"))?;
    let partition = match alignment {
        Some(n) => {
            let counts: Result<Vec<usize>> = measures
                .iter()
                .enumerate()
                .map(|(i, &m)| {
                    let c = m * n as f64;
                    if (c - c.round()).abs() > 1e-9 {
                        Err(Error::invalid(format!("measure {i} is not a multiple of 1/{n}")))
                    } else {
                        Ok(c.round() as usize)
                    }
                })
                .collect();
            IntervalPartition::aligned(n, &counts?)?
        }
        None => IntervalPartition::new(measures)?,
    };
    match k {
        None => {
            let values = values.ok_or_else(|| parse_err(0, "missing 'values' line"))?;
            Ok(GkFile::Kernel(StepKernel::new(partition, values)?))
        }
        Some(k) => {
            let t = partition.len();
            let mut all = vec![vec![vec![0.0; t]; t]; k * k];
            let mut seen = vec![false; k * k];
            for (a, b, m, ln) in blocks {
                if a >= k || b >= k {
                    return Err(parse_err(ln, format!("block ({a},{b}) out of range for k={k}")));
                }
                if seen[a * k + b] {
                    return Err(parse_err(ln, format!("duplicate block ({a},{b})")));
                }
                seen[a * k + b] = true;
                all[a * k + b] = m;
            }
            if let Some(missing) = seen.iter().position(|&s| !s) {
                return Err(Error::invalid(format!(
                    "missing block ({},{})",
                    missing / k,
                    missing % k
                )));
            }
            Ok(GkFile::Colored(ColoredDigraphon::new(k, partition, all)?))
        }
    }
}

pub fn read_gk(path: &Path) -> Result<GkFile> {
    parse_gk(&std::fs::read_to_string(path)?)
}

fn fmt_vec(v: &[f64]) -> String {
    let inner: Vec<String> = v.iter().map(|&x| fmt_sig(x)).collect();
    format!("[{}]", inner.join(", "))
}

fn fmt_matrix(m: &[Vec<f64>]) -> String {
    let rows: Vec<String> = m.iter().map(|r| fmt_vec(r)).collect();
    format!("[{}]", rows.join(", "))
}

pub fn format_kernel(w: &StepKernel) -> String {
    let mut out = String::new();
    out.push_str(&format!("measures: {}\n", fmt_vec(w.partition().measures())));
    if let Some(n) = w.partition().alignment_n() {
        out.push_str(&format!("alignment: {n}\n"));
    }
    out.push_str(&format!("values: {}\n", fmt_matrix(w.values())));
    out
}

pub fn format_colored_digraphon(w: &ColoredDigraphon) -> String {
    let mut out = String::new();
    out.push_str(&format!("k: {}\n", w.k()));
    out.push_str(&format!("measures: {}\n", fmt_vec(w.partition().measures())));
    if let Some(n) = w.partition().alignment_n() {
        out.push_str(&format!("alignment: {n}\n"));
    }
    for a in 0..w.k() {
        for b in 0..w.k() {
            out.push_str(&format!("block ({a},{b}): {}\n", fmt_matrix(w.block(a, b))));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_sig_basics() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.5), "0.5");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(-2.0), "-2");
        assert_eq!(fmt_sig(1e-13), "0.0000000000001");
    }

    #[test]
    fn graph_round_trip() {
        let g = SimpleGraph::from_edges(5, &[(0, 1), (2, 4), (1, 3)]).unwrap();
        let text = format_graph(&g);
        assert_eq!(parse_graph(&text).unwrap(), g);
        assert!(text.starts_with("5 3\n"));
    }

    #[test]
    fn graph_parse_errors_carry_line_numbers() {
        let err = parse_graph("3 2\n0 1\n").unwrap_err();
        assert!(format!("{err}").contains("expected 2 edge lines"), "{err}");
        let err = parse_graph("3 1\n0 x\n").unwrap_err();
        assert!(format!("{err}").contains("line 2"), "{err}");
    }

    #[test]
    fn kernel_round_trip() {
        let w = crate::model::graphon_of_graph(&SimpleGraph::cycle(4));
        let text = format_kernel(w.kernel());
        let back = parse_gk(&text).unwrap().graphon().unwrap();
        assert_eq!(back.kernel().values(), w.kernel().values());
        assert_eq!(back.partition().alignment_n(), Some(4));
    }

    #[test]
    fn colored_digraphon_round_trip() {
        let mut g = ColoredDigraph::uniform(3, 2, 1);
        g.set_color(0, 1, 0);
        g.set_color(1, 0, 0);
        let w = crate::model::digraphon_of_colored(&g);
        let text = format_colored_digraphon(&w);
        let back = parse_gk(&text).unwrap().colored().unwrap();
        assert_eq!(back.k(), 2);
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(back.block(a, b), w.block(a, b));
            }
        }
    }

    #[test]
    fn colored_digraph_round_trip() {
        let mut g = ColoredDigraph::uniform(3, 3, 2);
        g.set_color(0, 2, 1);
        g.set_color(2, 1, 0);
        let text = format_colored_digraph(&g);
        assert_eq!(parse_colored_digraph(&text).unwrap(), g);
    }

    #[test]
    fn gk_rejects_malformed_input() {
        assert!(parse_gk("values: [[1]]").is_err()); // no measures
        assert!(parse_gk("measures: [1.0]\nvalues: [[1], [2]]").is_err()); // shape
        let err = parse_gk("measures: [0.5, 0.5]\nvalues: [[0,1],[1,oops]]").unwrap_err();
        assert!(format!("{err}").contains("line 2"));
    }
}
