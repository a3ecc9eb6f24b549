//! Partition quality: edge cut, per-part cut, balance, diameter estimation,
//! and performance ratios across partitioners.
//!
//! Conventions: a cut edge counts once toward the global edge cut and once
//! toward each endpoint's part in the per-part cut. `|E(π_i)|` counts edges
//! with both endpoints in part `i`.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GlobalGraph, LocalGraph};
use crate::partition::{Config, PartitionState};
use crate::seed::{self, Stream};
use crate::Part;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Per-part tallies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartTally {
    pub vertices: Vec<usize>,
    pub internal_edges: Vec<usize>,
    pub cut_edges: Vec<usize>,
    pub edge_cut: usize,
}

impl PartTally {
    pub fn compute(g: &GlobalGraph, parts: &[Part], num_parts: usize) -> Result<Self> {
        check_parts(g, parts, num_parts)?;
        let mut t = PartTally {
            vertices: vec![0; num_parts],
            internal_edges: vec![0; num_parts],
            cut_edges: vec![0; num_parts],
            edge_cut: 0,
        };
        for &p in parts {
            t.vertices[p as usize] += 1;
        }
        for (u, v) in g.edges() {
            let (pu, pv) = (parts[u] as usize, parts[v] as usize);
            if pu == pv {
                t.internal_edges[pu] += 1;
            } else {
                t.edge_cut += 1;
                t.cut_edges[pu] += 1;
                t.cut_edges[pv] += 1;
            }
        }
        Ok(t)
    }

    /// Same tallies computed from per-task views: owned vertices on their
    /// owner, each edge on the lower-indexed owner of its endpoints.
    pub fn from_local(graphs: &[LocalGraph], state: &PartitionState) -> Result<Self> {
        let p = state.num_parts();
        let mut t = PartTally {
            vertices: vec![0; p],
            internal_edges: vec![0; p],
            cut_edges: vec![0; p],
            edge_cut: 0,
        };
        for (lg, parts) in graphs.iter().zip(state.tasks()) {
            for a in 0..lg.num_owned() {
                let pa = parts[a] as usize;
                if pa >= p {
                    return Err(Error::input(format!(
                        "vertex {} is unassigned",
                        lg.to_global(a)
                    )));
                }
                t.vertices[pa] += 1;
                for &b in lg.neighbors(a) {
                    let counted = if lg.is_owned(b) { a < b } else { lg.task() < lg.owner_of(b) };
                    if !counted {
                        continue;
                    }
                    let pb = parts[b] as usize;
                    if pa == pb {
                        t.internal_edges[pa] += 1;
                    } else {
                        t.edge_cut += 1;
                        t.cut_edges[pa] += 1;
                        t.cut_edges[pb] += 1;
                    }
                }
            }
        }
        Ok(t)
    }

    /// `(max count, lowest part attaining it)`.
    pub fn max_cut(&self) -> (usize, usize) {
        argmax(&self.cut_edges)
    }
}

fn argmax(xs: &[usize]) -> (usize, usize) {
    let mut best = (0, 0);
    for (i, &x) in xs.iter().enumerate() {
        if x > best.0 {
            best = (x, i);
        }
    }
    best
}

fn check_parts(g: &GlobalGraph, parts: &[Part], num_parts: usize) -> Result<()> {
    if parts.len() != g.num_vertices() {
        return Err(Error::input(format!(
            "partition has {} entries, graph has {} vertices",
            parts.len(),
            g.num_vertices()
        )));
    }
    if num_parts == 0 {
        return Err(Error::config("part count must be at least 1"));
    }
    if let Some(v) = parts.iter().position(|&p| p as usize >= num_parts) {
        return Err(Error::input(format!("vertex {v} has part {} >= {num_parts}", parts[v])));
    }
    Ok(())
}

/// Smallest part count covering every label.
pub fn infer_num_parts(parts: &[Part]) -> usize {
    parts.iter().map(|&p| p as usize + 1).max().unwrap_or(1)
}

/// Number of edges whose endpoints lie in different parts.
pub fn edge_cut(g: &GlobalGraph, parts: &[Part]) -> Result<usize> {
    Ok(PartTally::compute(g, parts, infer_num_parts(parts))?.edge_cut)
}

/// Largest per-part cut and the lowest part index attaining it.
pub fn max_part_cut(g: &GlobalGraph, parts: &[Part]) -> Result<(usize, usize)> {
    Ok(PartTally::compute(g, parts, infer_num_parts(parts))?.max_cut())
}

/// `(max_i |V(π_i)| / (n/p), max_i |E(π_i)| / (m/p))`. With no edges the
/// edge imbalance is reported as 1.0.
pub fn imbalance(g: &GlobalGraph, parts: &[Part], num_parts: usize) -> Result<(f64, f64)> {
    let t = PartTally::compute(g, parts, num_parts)?;
    Ok(imbalance_of(&t, g.num_vertices(), g.num_edges()))
}

fn imbalance_of(t: &PartTally, n: usize, m: usize) -> (f64, f64) {
    let p = t.vertices.len() as f64;
    let vmax = t.vertices.iter().copied().max().unwrap_or(0) as f64;
    let emax = t.internal_edges.iter().copied().max().unwrap_or(0) as f64;
    let vi = if n == 0 { 1.0 } else { vmax * p / n as f64 };
    let ei = if m == 0 { 1.0 } else { emax * p / m as f64 };
    (vi, ei)
}

/// Metadata attached to a report.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub graph: String,
    pub method: String,
    pub num_tasks: Option<usize>,
    pub seed: Option<u64>,
    pub config: Option<Config>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub schema_version: u32,
    pub num_vertices: usize,
    pub num_edges: usize,
    pub num_parts: usize,
    pub edge_cut: usize,
    pub cut_ratio: f64,
    pub max_part_cut: usize,
    pub max_cut_part: usize,
    /// `max_part_cut / (edge_cut / p)`; 0 when nothing is cut.
    pub scaled_max_cut: f64,
    /// `max_part_cut / (m / p)`.
    pub scaled_max_cut_alt: f64,
    pub vertex_imbalance: f64,
    pub edge_imbalance: f64,
    pub parts: PartTally,
    pub metadata: RunMetadata,
}

impl QualityReport {
    pub fn compute(g: &GlobalGraph, parts: &[Part], num_parts: usize) -> Result<Self> {
        let t = PartTally::compute(g, parts, num_parts)?;
        Ok(Self::from_tally(t, g.num_vertices(), g.num_edges()))
    }

    pub fn from_tally(t: PartTally, n: usize, m: usize) -> Self {
        let p = t.vertices.len();
        let (max_part_cut, max_cut_part) = t.max_cut();
        let (vertex_imbalance, edge_imbalance) = imbalance_of(&t, n, m);
        let cut_ratio = if m == 0 { 0.0 } else { t.edge_cut as f64 / m as f64 };
        let scaled_max_cut = if t.edge_cut == 0 {
            0.0
        } else {
            max_part_cut as f64 / (t.edge_cut as f64 / p as f64)
        };
        let scaled_max_cut_alt = if m == 0 {
            0.0
        } else {
            max_part_cut as f64 / (m as f64 / p as f64)
        };
        QualityReport {
            schema_version: REPORT_SCHEMA_VERSION,
            num_vertices: n,
            num_edges: m,
            num_parts: p,
            edge_cut: t.edge_cut,
            cut_ratio,
            max_part_cut,
            max_cut_part,
            scaled_max_cut,
            scaled_max_cut_alt,
            vertex_imbalance,
            edge_imbalance,
            parts: t,
            metadata: RunMetadata::default(),
        }
    }

    pub fn with_metadata(mut self, metadata: RunMetadata) -> Self {
        self.metadata = metadata;
        self
    }
}

/// Vertices of the largest connected component (ties to the one holding
/// the smallest vertex ID), in BFS discovery order.
pub fn largest_component(g: &GlobalGraph) -> Vec<usize> {
    let n = g.num_vertices();
    let mut seen = vec![false; n];
    let mut best: Vec<usize> = Vec::new();
    let mut queue = VecDeque::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut comp = vec![s];
        seen[s] = true;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &u in g.neighbors(v) {
                if !seen[u] {
                    seen[u] = true;
                    comp.push(u);
                    queue.push_back(u);
                }
            }
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    best
}

/// BFS levels from `source`: `(eccentricity, vertices in the last level)`.
fn bfs_last_level(g: &GlobalGraph, source: usize, dist: &mut [u32]) -> (usize, Vec<usize>) {
    dist.fill(u32::MAX);
    dist[source] = 0;
    let mut frontier = vec![source];
    let mut next = Vec::new();
    let mut depth = 0;
    loop {
        for &v in &frontier {
            for &u in g.neighbors(v) {
                if dist[u] == u32::MAX {
                    dist[u] = depth as u32 + 1;
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            return (depth, frontier);
        }
        depth += 1;
        std::mem::swap(&mut frontier, &mut next);
        next.clear();
    }
}

/// Lower bound on the diameter of the largest component from iterated BFS
/// sweeps, each starting at a random vertex of the previous sweep's
/// farthest level.
pub fn approx_diameter(g: &GlobalGraph, iterations: usize, seed: u64) -> Result<usize> {
    if g.num_vertices() == 0 {
        return Err(Error::input("diameter of an empty graph"));
    }
    let comp = largest_component(g);
    let mut rng = seed::rng(seed, Stream::Diameter, &[]);
    let mut source = comp[rng.gen_range(0..comp.len())];
    let mut dist = vec![u32::MAX; g.num_vertices()];
    let mut best = 0;
    for _ in 0..iterations.max(1) {
        let (ecc, last) = bfs_last_level(g, source, &mut dist);
        best = best.max(ecc);
        source = last[rng.gen_range(0..last.len())];
    }
    Ok(best)
}

/// Per-method scores on a set of graphs. `cells[row][method]` is `None`
/// when a method produced no result for that graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub methods: Vec<String>,
    pub graphs: Vec<String>,
    pub cells: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceRatios {
    pub methods: Vec<String>,
    pub ratios: Vec<f64>,
    /// Rows each method was scored on.
    pub rows_used: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Geometric mean over graphs of `score / best score on that graph`, per
/// method. Lower is better and 1.0 means best everywhere. Missing cells are
/// skipped with a warning. A zero best score gives ratio 1 for other zero
/// scores and infinity otherwise.
pub fn performance_ratio(table: &ResultTable) -> Result<PerformanceRatios> {
    let k = table.methods.len();
    if k == 0 {
        return Err(Error::input("performance ratio needs at least one method"));
    }
    if table.cells.len() != table.graphs.len() {
        return Err(Error::input("one row of cells per graph required"));
    }
    let mut log_sum = vec![0f64; k];
    let mut used = vec![0usize; k];
    let mut warnings = Vec::new();
    for (row, name) in table.cells.iter().zip(&table.graphs) {
        if row.len() != k {
            return Err(Error::input(format!("row {name} has {} cells for {k} methods", row.len())));
        }
        let best = row.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            warnings.push(format!("graph {name}: no results, row skipped"));
            continue;
        }
        for (j, cell) in row.iter().enumerate() {
            match cell {
                None => warnings.push(format!(
                    "graph {name}: no result for {}, excluded",
                    table.methods[j]
                )),
                Some(x) => {
                    let r = if best == 0.0 {
                        if *x == 0.0 {
                            1.0
                        } else {
                            f64::INFINITY
                        }
                    } else {
                        x / best
                    };
                    log_sum[j] += r.ln();
                    used[j] += 1;
                }
            }
        }
    }
    let ratios = log_sum
        .iter()
        .zip(&used)
        .map(|(&s, &c)| if c == 0 { f64::NAN } else { (s / c as f64).exp() })
        .collect();
    Ok(PerformanceRatios { methods: table.methods.clone(), ratios, rows_used: used, warnings })
}

/// Writes one CSV row per `(graph, method)` report.
pub fn write_reports_csv<W: std::io::Write>(
    out: W,
    rows: &[(String, String, &QualityReport)],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "graph",
        "method",
        "num_parts",
        "edge_cut",
        "cut_ratio",
        "max_part_cut",
        "scaled_max_cut",
        "scaled_max_cut_alt",
        "vertex_imbalance",
        "edge_imbalance",
    ])?;
    for (graph, method, r) in rows {
        w.write_record([
            graph.clone(),
            method.clone(),
            r.num_parts.to_string(),
            r.edge_cut.to_string(),
            r.cut_ratio.to_string(),
            r.max_part_cut.to_string(),
            r.scaled_max_cut.to_string(),
            r.scaled_max_cut_alt.to_string(),
            r.vertex_imbalance.to_string(),
            r.edge_imbalance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_csr;

    fn path(n: usize) -> GlobalGraph {
        let e: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        build_csr(&e, n).unwrap()
    }

    #[test]
    fn single_part_has_no_cut() {
        let g = path(6);
        assert_eq!(edge_cut(&g, &[0; 6]).unwrap(), 0);
        assert_eq!(max_part_cut(&g, &[0; 6]).unwrap(), (0, 0));
    }

    #[test]
    fn path_split_in_half() {
        let g = path(4);
        let parts = [0, 0, 1, 1];
        assert_eq!(edge_cut(&g, &parts).unwrap(), 1);
        assert_eq!(max_part_cut(&g, &parts).unwrap(), (1, 0));
        let r = QualityReport::compute(&g, &parts, 2).unwrap();
        assert!((r.cut_ratio - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.scaled_max_cut, 2.0);
        assert!((r.scaled_max_cut_alt - 1.0 / 1.5).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch_is_error() {
        let g = path(4);
        assert!(matches!(edge_cut(&g, &[0, 0, 1]), Err(Error::Input(_))));
        assert!(QualityReport::compute(&g, &[0, 0, 1, 3], 2).is_err());
    }

    #[test]
    fn imbalance_cases() {
        let g = path(8);
        let (vi, _) = imbalance(&g, &[0, 0, 1, 1, 2, 2, 3, 3], 4).unwrap();
        assert_eq!(vi, 1.0);
        let (vi, ei) = imbalance(&g, &[0; 8], 2).unwrap();
        assert_eq!(vi, 2.0);
        assert_eq!(ei, 2.0);
        // empty parts are allowed
        let (vi, _) = imbalance(&g, &[0; 8], 3).unwrap();
        assert_eq!(vi, 3.0);
    }

    #[test]
    fn zero_cut_scaled_is_zero() {
        let g = path(4);
        let r = QualityReport::compute(&g, &[0; 4], 1).unwrap();
        assert_eq!(r.scaled_max_cut, 0.0);
        assert_eq!(r.edge_cut, 0);
    }

    #[test]
    fn diameter_of_path_and_cycle() {
        assert_eq!(approx_diameter(&path(5), 10, 3).unwrap(), 4);
        let cyc: Vec<_> = (0..8).map(|v| (v, (v + 1) % 8)).collect();
        let g = build_csr(&cyc, 8).unwrap();
        assert_eq!(approx_diameter(&g, 10, 3).unwrap(), 4);
    }

    #[test]
    fn diameter_uses_largest_component() {
        // path of 6 plus a separate triangle
        let mut e: Vec<_> = (1..6).map(|v| (v - 1, v)).collect();
        e.extend([(6, 7), (7, 8), (8, 6)]);
        let g = build_csr(&e, 9).unwrap();
        assert_eq!(largest_component(&g).len(), 6);
        assert_eq!(approx_diameter(&g, 10, 1).unwrap(), 5);
        let empty = build_csr(&[], 0).unwrap();
        assert!(approx_diameter(&empty, 10, 1).is_err());
    }

    #[test]
    fn ratio_single_method() {
        let t = ResultTable {
            methods: vec!["a".into()],
            graphs: vec!["g1".into(), "g2".into()],
            cells: vec![vec![Some(5.0)], vec![Some(7.0)]],
        };
        assert_eq!(performance_ratio(&t).unwrap().ratios, vec![1.0]);
    }

    #[test]
    fn ratio_two_methods() {
        let t = ResultTable {
            methods: vec!["a".into(), "b".into()],
            graphs: vec!["g".into()],
            cells: vec![vec![Some(10.0), Some(20.0)]],
        };
        assert_eq!(performance_ratio(&t).unwrap().ratios, vec![1.0, 2.0]);
    }

    #[test]
    fn ratio_missing_cell_warns() {
        let t = ResultTable {
            methods: vec!["a".into(), "b".into()],
            graphs: vec!["g1".into(), "g2".into()],
            cells: vec![vec![Some(10.0), None], vec![Some(4.0), Some(2.0)]],
        };
        let r = performance_ratio(&t).unwrap();
        assert_eq!(r.rows_used, vec![2, 1]);
        assert_eq!(r.ratios[1], 1.0);
        assert!((r.ratios[0] - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = path(4);
        let r = QualityReport::compute(&g, &[0, 0, 1, 1], 2).unwrap();
        let mut buf = Vec::new();
        write_reports_csv(&mut buf, &[("path".into(), "vblock".into(), &r)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("path,vblock,2,1,"));
    }
}
