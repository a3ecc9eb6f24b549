//! Text formats: SNAP-style edge lists and one-label-per-line partition
//! files.
//!
//! Edge list: one `u v` pair per line, whitespace separated, extra columns
//! ignored, blank lines and `#` comments skipped. A comment of the form
//! `# vertices N` declares the vertex count so isolated trailing vertices
//! survive a round trip; the generator writes it.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::Part;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeListFile {
    pub pairs: Vec<(u64, u64)>,
    /// 1-based source line of each pair.
    pub lines: Vec<usize>,
    pub declared_vertices: Option<usize>,
}

pub fn read_edge_list<R: BufRead>(reader: R) -> Result<EdgeListFile> {
    let mut out = EdgeListFile::default();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let mut toks = comment.split_whitespace();
            if toks.next().map(|t| t.trim_end_matches(':')) == Some("vertices") {
                if let Some(n) = toks.next().and_then(|t| t.parse().ok()) {
                    out.declared_vertices = Some(n);
                }
            }
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let mut id = || -> Result<u64> {
            let tok = toks
                .next()
                .ok_or_else(|| Error::input(format!("line {lineno}: expected two vertex IDs")))?;
            tok.parse()
                .map_err(|_| Error::input(format!("line {lineno}: bad vertex ID {tok:?}")))
        };
        let (u, v) = (id()?, id()?);
        out.pairs.push((u, v));
        out.lines.push(lineno);
    }
    Ok(out)
}

/// Edge list over dense IDs `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseEdges {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    /// Original ID of each dense vertex, present only when IDs were
    /// renumbered.
    pub original_ids: Option<Vec<u64>>,
}

/// Maps file IDs onto `0..n`.
///
/// With a vertex count (given explicitly or declared in the file) IDs are
/// used as-is and must lie in `[0, n)`. Without one, the distinct IDs are
/// renumbered in ascending order.
pub fn densify(file: &EdgeListFile, num_vertices: Option<usize>) -> Result<DenseEdges> {
    if let Some(n) = num_vertices.or(file.declared_vertices) {
        let mut edges = Vec::with_capacity(file.pairs.len());
        for (&(u, v), &line) in file.pairs.iter().zip(&file.lines) {
            if u >= n as u64 || v >= n as u64 {
                return Err(Error::input(format!(
                    "line {line}: edge ({u}, {v}) has a vertex outside [0, {n})"
                )));
            }
            edges.push((u as usize, v as usize));
        }
        return Ok(DenseEdges { n, edges, original_ids: None });
    }
    let mut ids: Vec<u64> = file.pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let identity = ids.iter().enumerate().all(|(i, &x)| i as u64 == x);
    let lookup = |x: u64| ids.binary_search(&x).expect("id collected above");
    let edges = file.pairs.iter().map(|&(u, v)| (lookup(u), lookup(v))).collect();
    Ok(DenseEdges { n: ids.len(), edges, original_ids: (!identity).then_some(ids) })
}

pub fn write_edge_list<W: Write>(mut w: W, n: usize, edges: &[(usize, usize)]) -> Result<()> {
    writeln!(w, "# vertices {n} edges {}", edges.len())?;
    for &(u, v) in edges {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Line `i` holds the part of vertex `i`.
pub fn write_partition<W: Write>(mut w: W, parts: &[Part]) -> Result<()> {
    for p in parts {
        writeln!(w, "{p}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_partition<R: BufRead>(reader: R) -> Result<Vec<Part>> {
    let mut parts = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        parts.push(
            t.parse()
                .map_err(|_| Error::input(format!("line {}: bad part label {t:?}", i + 1)))?,
        );
    }
    Ok(parts)
}

/// Writes `dense original` pairs for a renumbered graph.
pub fn write_id_map<W: Write>(mut w: W, original_ids: &[u64]) -> Result<()> {
    for (dense, orig) in original_ids.iter().enumerate() {
        writeln!(w, "{dense} {orig}")?;
    }
    w.flush()?;
    Ok(())
}
