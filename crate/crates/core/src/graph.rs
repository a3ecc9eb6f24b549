//! Whole-graph CSR storage, vertex-to-task distributions, and the per-task
//! local graphs (owned vertices plus one-hop ghosts) the partitioner runs on.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Stream};

/// Undirected multigraph in compressed sparse row form.
///
/// Every undirected edge `{u, v}` is stored twice, once in each endpoint's
/// neighbor list. Self-loops are never stored. Parallel edges are kept
/// unless the graph was built with deduplication.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalGraph {
    offsets: Vec<usize>,
    adjacency: Vec<usize>,
}

impl GlobalGraph {
    /// Builds a graph directly from CSR arrays, checking the structural
    /// invariants (monotone offsets, in-range and symmetric adjacency).
    pub fn from_csr(offsets: Vec<usize>, adjacency: Vec<usize>) -> Result<Self> {
        if offsets.is_empty() || offsets[0] != 0 {
            return Err(Error::input("offsets must start at 0"));
        }
        if offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::input("offsets must be nondecreasing"));
        }
        let n = offsets.len() - 1;
        if offsets[n] != adjacency.len() || adjacency.len() % 2 != 0 {
            return Err(Error::input("offsets[n] must equal the (even) adjacency length"));
        }
        let g = GlobalGraph { offsets, adjacency };
        for v in 0..n {
            for &u in g.neighbors(v) {
                if u >= n {
                    return Err(Error::input(format!("neighbor {u} of {v} out of range")));
                }
                if u == v {
                    return Err(Error::input(format!("self-loop at {v}")));
                }
            }
        }
        let mut sorted = g.clone();
        for v in 0..n {
            let (s, e) = (sorted.offsets[v], sorted.offsets[v + 1]);
            sorted.adjacency[s..e].sort_unstable();
        }
        for v in 0..n {
            for u in sorted.neighbors(v).iter().copied() {
                if sorted.multiplicity(v, u) != sorted.multiplicity(u, v) {
                    return Err(Error::input(format!("adjacency not symmetric at ({v}, {u})")));
                }
            }
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges (each stored twice).
    pub fn num_edges(&self) -> usize {
        self.adjacency.len() / 2
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn adjacency(&self) -> &[usize] {
        &self.adjacency
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.num_vertices()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn avg_degree(&self) -> f64 {
        if self.num_vertices() == 0 {
            0.0
        } else {
            self.adjacency.len() as f64 / self.num_vertices() as f64
        }
    }

    /// Iterates every undirected edge once as `(u, v)` with `u < v`.
    /// Parallel edges are yielded once per copy.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    // Requires sorted neighbor lists.
    fn multiplicity(&self, v: usize, u: usize) -> usize {
        let nbrs = self.neighbors(v);
        let lo = nbrs.partition_point(|&x| x < u);
        let hi = nbrs.partition_point(|&x| x <= u);
        hi - lo
    }
}

/// Builds a symmetric CSR graph from an undirected edge list.
///
/// Self-loops are dropped and parallel edges are retained. Each neighbor
/// list comes out sorted ascending.
pub fn build_csr(edges: &[(usize, usize)], n: usize) -> Result<GlobalGraph> {
    build_csr_with(edges, n, false)
}

/// As [`build_csr`], optionally collapsing parallel edges into one.
pub fn build_csr_with(edges: &[(usize, usize)], n: usize, dedup: bool) -> Result<GlobalGraph> {
    let mut degree = vec![0usize; n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        if u >= n || v >= n {
            return Err(Error::input(format!(
                "edge #{i} ({u}, {v}) has a vertex outside [0, {n})"
            )));
        }
        if u != v {
            degree[u] += 1;
            degree[v] += 1;
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    offsets.push(0);
    let mut acc = 0;
    for d in &degree {
        acc += d;
        offsets.push(acc);
    }
    let mut cursor = offsets[..n].to_vec();
    let mut adjacency = vec![0usize; acc];
    for &(u, v) in edges {
        if u == v {
            continue;
        }
        adjacency[cursor[u]] = v;
        cursor[u] += 1;
        adjacency[cursor[v]] = u;
        cursor[v] += 1;
    }
    for v in 0..n {
        adjacency[offsets[v]..offsets[v + 1]].sort_unstable();
    }
    if dedup {
        let mut new_offsets = Vec::with_capacity(n + 1);
        new_offsets.push(0);
        let mut new_adj = Vec::with_capacity(adjacency.len());
        for v in 0..n {
            let list = &adjacency[offsets[v]..offsets[v + 1]];
            let start = new_adj.len();
            for &u in list {
                if new_adj.len() == start || *new_adj.last().unwrap() != u {
                    new_adj.push(u);
                }
            }
            new_offsets.push(new_adj.len());
        }
        return Ok(GlobalGraph { offsets: new_offsets, adjacency: new_adj });
    }
    Ok(GlobalGraph { offsets, adjacency })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistributionKind {
    Block,
    Random,
}

/// Assignment of vertices to tasks. `owner` is a pure O(1) function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Distribution {
    kind: DistributionKind,
    num_tasks: usize,
    num_vertices: usize,
    seed: u64,
}

impl Distribution {
    /// Contiguous ID ranges; task `t` owns `[t*n/T, (t+1)*n/T)`.
    pub fn block(num_vertices: usize, num_tasks: usize) -> Result<Self> {
        Self::new(DistributionKind::Block, num_vertices, num_tasks, 0)
    }

    /// Hash of `(v, seed)` modulo `T`.
    pub fn random(num_vertices: usize, num_tasks: usize, seed: u64) -> Result<Self> {
        Self::new(DistributionKind::Random, num_vertices, num_tasks, seed)
    }

    pub fn new(
        kind: DistributionKind,
        num_vertices: usize,
        num_tasks: usize,
        seed: u64,
    ) -> Result<Self> {
        if num_tasks == 0 {
            return Err(Error::config("task count must be at least 1"));
        }
        if num_tasks > num_vertices {
            return Err(Error::config(format!(
                "{num_tasks} tasks for {num_vertices} vertices: a task would own nothing"
            )));
        }
        let seed = seed::derive(seed, Stream::Distribution, &[]);
        Ok(Distribution { kind, num_tasks, num_vertices, seed })
    }

    pub fn kind(&self) -> DistributionKind {
        self.kind
    }

    pub fn num_tasks(&self) -> usize {
        self.num_tasks
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    #[inline]
    pub fn owner(&self, v: usize) -> usize {
        match self.kind {
            DistributionKind::Block => {
                ((v as u128 * self.num_tasks as u128) / self.num_vertices as u128) as usize
            }
            DistributionKind::Random => {
                (seed::mix64(v as u64 ^ self.seed) % self.num_tasks as u64) as usize
            }
        }
    }
}

/// One task's view of the graph.
///
/// Local IDs `[0, num_owned)` are owned vertices in ascending global-ID
/// order; `[num_owned, num_local)` are ghosts, also ascending by global ID.
/// The local CSR covers owned vertices only and its entries are local IDs.
#[derive(Debug, Clone)]
pub struct LocalGraph {
    task: usize,
    dist: Distribution,
    global_vertices: usize,
    global_edges: usize,
    offsets: Vec<usize>,
    adjacency: Vec<usize>,
    local_to_global: Vec<usize>,
    global_to_local: HashMap<usize, usize>,
    num_owned: usize,
    ghost_owner: Vec<usize>,
    // Global degree of every local slot; ghosts need it for degree-weighted counts.
    degrees: Vec<usize>,
}

impl LocalGraph {
    pub fn task(&self) -> usize {
        self.task
    }

    pub fn distribution(&self) -> &Distribution {
        &self.dist
    }

    pub fn num_tasks(&self) -> usize {
        self.dist.num_tasks()
    }

    pub fn global_vertices(&self) -> usize {
        self.global_vertices
    }

    pub fn global_edges(&self) -> usize {
        self.global_edges
    }

    pub fn num_owned(&self) -> usize {
        self.num_owned
    }

    pub fn num_ghosts(&self) -> usize {
        self.local_to_global.len() - self.num_owned
    }

    /// Owned plus ghost slots.
    pub fn num_local(&self) -> usize {
        self.local_to_global.len()
    }

    pub fn owned(&self) -> &[usize] {
        &self.local_to_global[..self.num_owned]
    }

    pub fn ghosts(&self) -> &[usize] {
        &self.local_to_global[self.num_owned..]
    }

    pub fn local_to_global(&self) -> &[usize] {
        &self.local_to_global
    }

    #[inline]
    pub fn to_global(&self, local: usize) -> usize {
        self.local_to_global[local]
    }

    #[inline]
    pub fn to_local(&self, global: usize) -> Option<usize> {
        self.global_to_local.get(&global).copied()
    }

    #[inline]
    pub fn is_owned(&self, local: usize) -> bool {
        local < self.num_owned
    }

    /// Neighbors (local IDs) of an owned vertex.
    #[inline]
    pub fn neighbors(&self, owned: usize) -> &[usize] {
        &self.adjacency[self.offsets[owned]..self.offsets[owned + 1]]
    }

    /// Global degree of any local slot, owned or ghost.
    #[inline]
    pub fn degree(&self, local: usize) -> usize {
        self.degrees[local]
    }

    /// Task that owns a local slot.
    #[inline]
    pub fn owner_of(&self, local: usize) -> usize {
        if local < self.num_owned {
            self.task
        } else {
            self.ghost_owner[local - self.num_owned]
        }
    }

    pub fn ghost_owners(&self) -> &[usize] {
        &self.ghost_owner
    }

    /// Number of local adjacency entries (twice the intra-task edges plus
    /// once per cross-task edge).
    pub fn num_local_arcs(&self) -> usize {
        self.adjacency.len()
    }
}

/// Splits a graph into one [`LocalGraph`] per task.
pub fn distribute(g: &GlobalGraph, dist: &Distribution) -> Result<Vec<LocalGraph>> {
    let n = g.num_vertices();
    if dist.num_vertices() != n {
        return Err(Error::config(format!(
            "distribution built for {} vertices, graph has {n}",
            dist.num_vertices()
        )));
    }
    let t_count = dist.num_tasks();
    let mut owned: Vec<Vec<usize>> = vec![Vec::new(); t_count];
    for v in 0..n {
        owned[dist.owner(v)].push(v);
    }
    let locals = owned
        .into_iter()
        .enumerate()
        .map(|(task, owned)| build_local(g, dist, task, owned))
        .collect();
    Ok(locals)
}

fn build_local(g: &GlobalGraph, dist: &Distribution, task: usize, owned: Vec<usize>) -> LocalGraph {
    let num_owned = owned.len();
    let mut global_to_local: HashMap<usize, usize> = owned
        .iter()
        .enumerate()
        .map(|(l, &v)| (v, l))
        .collect();
    let mut ghosts: Vec<usize> = owned
        .iter()
        .flat_map(|&v| g.neighbors(v).iter().copied())
        .filter(|&u| dist.owner(u) != task)
        .collect();
    ghosts.sort_unstable();
    ghosts.dedup();
    for (i, &u) in ghosts.iter().enumerate() {
        global_to_local.insert(u, num_owned + i);
    }
    let ghost_owner = ghosts.iter().map(|&u| dist.owner(u)).collect();
    let mut local_to_global = owned;
    local_to_global.extend_from_slice(&ghosts);
    let degrees = local_to_global.iter().map(|&v| g.degree(v)).collect();

    let mut offsets = Vec::with_capacity(num_owned + 1);
    offsets.push(0);
    let mut adjacency = Vec::new();
    for &v in &local_to_global[..num_owned] {
        adjacency.extend(g.neighbors(v).iter().map(|u| global_to_local[u]));
        offsets.push(adjacency.len());
    }
    LocalGraph {
        task,
        dist: *dist,
        global_vertices: g.num_vertices(),
        global_edges: g.num_edges(),
        offsets,
        adjacency,
        local_to_global,
        global_to_local,
        num_owned,
        ghost_owner,
        degrees,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> GlobalGraph {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        build_csr(&edges, n).unwrap()
    }

    fn grid_edges(side: usize) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for r in 0..side {
            for c in 0..side {
                let v = r * side + c;
                if c + 1 < side {
                    e.push((v, v + 1));
                }
                if r + 1 < side {
                    e.push((v, v + side));
                }
            }
        }
        e
    }

    #[test]
    fn path_csr_by_hand() {
        let g = build_csr(&[(0, 1), (1, 2)], 3).unwrap();
        assert_eq!(g.offsets(), &[0, 1, 3, 4]);
        assert_eq!(g.adjacency(), &[1, 0, 2, 1]);
        assert_eq!(g.num_edges(), 2);
    }

    #[test]
    fn self_loop_dropped() {
        let g = build_csr(&[(0, 0)], 1).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert!(g.adjacency().is_empty());
    }

    #[test]
    fn grid_edge_count() {
        // 2 * side * (side - 1) edges in a side x side grid
        let side = 32;
        let g = build_csr(&grid_edges(side), side * side).unwrap();
        assert_eq!(g.num_vertices(), 1024);
        assert_eq!(g.num_edges(), 2 * side * (side - 1));
        assert_eq!(g.num_edges(), 1984);
    }

    #[test]
    fn out_of_range_names_pair() {
        let err = build_csr(&[(0, 1), (1, 7)], 3).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("#1"), "{msg}");
        assert!(msg.contains("(1, 7)"), "{msg}");
    }

    #[test]
    fn duplicates_kept_or_collapsed() {
        let edges = [(0, 1), (1, 0), (0, 1), (1, 2)];
        let multi = build_csr(&edges, 3).unwrap();
        assert_eq!(multi.num_edges(), 4);
        assert_eq!(multi.degree(0), 3);
        let simple = build_csr_with(&edges, 3, true).unwrap();
        assert_eq!(simple.num_edges(), 2);
        assert_eq!(simple.degree(1), 2);
    }

    #[test]
    fn from_csr_rejects_asymmetry() {
        assert!(GlobalGraph::from_csr(vec![0, 1, 1], vec![1, 0][..1].to_vec()).is_err());
        assert!(GlobalGraph::from_csr(vec![0, 1, 2, 2], vec![1, 2]).is_err());
        assert!(GlobalGraph::from_csr(vec![0, 1, 2], vec![1, 0]).is_ok());
    }

    #[test]
    fn block_sizes_differ_by_at_most_one() {
        for n in 1..40 {
            for t in 1..=n.min(9) {
                let d = Distribution::block(n, t).unwrap();
                let mut sizes = vec![0; t];
                let mut last = 0;
                for v in 0..n {
                    let o = d.owner(v);
                    assert!(o >= last, "block ranges must be contiguous");
                    last = o;
                    sizes[o] += 1;
                }
                let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
                assert!(hi - lo <= 1, "n={n} t={t} sizes={sizes:?}");
            }
        }
    }

    #[test]
    fn too_many_tasks_rejected() {
        assert!(matches!(Distribution::block(3, 4), Err(Error::Config(_))));
        assert!(matches!(Distribution::block(3, 0), Err(Error::Config(_))));
    }

    #[test]
    fn single_task_has_no_ghosts() {
        let g = path(10);
        let locals = distribute(&g, &Distribution::block(10, 1).unwrap()).unwrap();
        assert_eq!(locals.len(), 1);
        assert_eq!(locals[0].num_ghosts(), 0);
        assert_eq!(locals[0].num_owned(), 10);
    }

    #[test]
    fn path_block_two_tasks() {
        let g = path(4);
        let locals = distribute(&g, &Distribution::block(4, 2).unwrap()).unwrap();
        assert_eq!(locals[0].owned(), &[0, 1]);
        assert_eq!(locals[0].ghosts(), &[2]);
        assert_eq!(locals[1].owned(), &[2, 3]);
        assert_eq!(locals[1].ghosts(), &[1]);
        assert_eq!(locals[0].owner_of(2), 1);
        assert_eq!(locals[1].degree(locals[1].to_local(1).unwrap()), 2);
    }

    #[test]
    fn random_hash_is_deterministic() {
        let g = build_csr(&grid_edges(8), 64).unwrap();
        let d = Distribution::random(64, 4, 42).unwrap();
        let a = distribute(&g, &d).unwrap();
        let b = distribute(&g, &Distribution::random(64, 4, 42).unwrap()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.owned(), y.owned());
            assert_eq!(x.ghosts(), y.ghosts());
        }
    }
}
