//! Label-propagation partitioner with vertex and edge balance constraints
//! and cut / max-per-part-cut objectives.
//!
//! The run is: initialization, then `outer` rounds of vertex balancing and
//! vertex refinement, then (with the iteration counter reset) `outer`
//! rounds of edge balancing and edge refinement. Every iteration of every
//! phase is one superstep on the [`Runtime`]: each task decides moves for
//! its owned vertices using its possibly-stale ghost labels, the moves are
//! exchanged, per-part deltas are all-reduced and folded into the global
//! sizes.

mod init;
mod ledger;
mod phases;

use serde::{Deserialize, Serialize};

pub use ledger::{balance_weight, compute_mult, local_size_deltas, local_sizes, PartLedger};

use crate::bsp::{apply_updates, Runtime, UpdateQueue};
use crate::error::{Error, Result};
use crate::graph::{distribute, Distribution, DistributionKind, GlobalGraph, LocalGraph};
use crate::{Part, UNASSIGNED};

/// How labels are seeded before balancing starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitMode {
    /// Random roots grown by label propagation over unlabeled vertices.
    BfsLp,
    /// Independent uniform part per vertex.
    Random,
    /// Contiguous global-ID ranges.
    Block,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Config {
    pub num_parts: usize,
    pub num_tasks: usize,
    /// Allowed fractional overage of vertices per part.
    pub vertex_ratio: f64,
    /// Allowed fractional overage of internal edges per part.
    pub edge_ratio: f64,
    /// Multiplier value (per task) at the last iteration of a stage.
    pub mult_end: f64,
    /// Multiplier value (per task) at the first iteration of a stage.
    pub mult_start: f64,
    pub outer_iters: usize,
    pub balance_iters: usize,
    pub refine_iters: usize,
    pub seed: u64,
    pub distribution: DistributionKind,
    pub init: InitMode,
    /// Run tasks one at a time on the calling thread.
    pub sequential: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            num_parts: 2,
            num_tasks: 1,
            vertex_ratio: 0.10,
            edge_ratio: 0.10,
            mult_end: 1.0,
            mult_start: 0.25,
            outer_iters: 3,
            balance_iters: 5,
            refine_iters: 10,
            seed: 0,
            distribution: DistributionKind::Random,
            init: InitMode::BfsLp,
            sequential: false,
        }
    }
}

impl Config {
    pub fn new(num_parts: usize, num_tasks: usize) -> Self {
        Config { num_parts, num_tasks, ..Default::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_parts == 0 {
            return Err(Error::config("part count must be at least 1"));
        }
        if self.num_parts > Part::MAX as usize - 1 {
            return Err(Error::config("part count too large"));
        }
        if self.num_tasks == 0 {
            return Err(Error::config("task count must be at least 1"));
        }
        if !(self.mult_start > 0.0 && self.mult_start <= self.mult_end && self.mult_end.is_finite())
        {
            return Err(Error::config(format!(
                "multiplier endpoints must satisfy 0 < start ({}) <= end ({})",
                self.mult_start, self.mult_end
            )));
        }
        if self.outer_iters == 0 || self.balance_iters == 0 || self.refine_iters == 0 {
            return Err(Error::config("iteration counts must be at least 1"));
        }
        for (name, r) in [("vertex", self.vertex_ratio), ("edge", self.edge_ratio)] {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::config(format!("{name} imbalance ratio must be >= 0, got {r}")));
            }
        }
        Ok(())
    }

    /// Iterations in one stage (vertex or edge): `outer * (bal + ref)`.
    pub fn total_iters(&self) -> usize {
        self.outer_iters * (self.balance_iters + self.refine_iters)
    }

    pub fn target_vertices(&self, n: usize) -> f64 {
        (1.0 + self.vertex_ratio) * n as f64 / self.num_parts as f64
    }

    pub fn target_edges(&self, m: usize) -> f64 {
        (1.0 + self.edge_ratio) * m as f64 / self.num_parts as f64
    }
}

/// Part labels for every local slot (owned, then ghosts) of every task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionState {
    num_parts: usize,
    parts: Vec<Vec<Part>>,
}

impl PartitionState {
    /// All slots unassigned.
    pub fn unassigned(graphs: &[LocalGraph], num_parts: usize) -> Self {
        PartitionState {
            num_parts,
            parts: graphs.iter().map(|lg| vec![UNASSIGNED; lg.num_local()]).collect(),
        }
    }

    /// Scatters a global assignment into every task's owned and ghost slots.
    pub fn from_global(graphs: &[LocalGraph], global: &[Part], num_parts: usize) -> Result<Self> {
        let n = graphs.first().map_or(0, |lg| lg.global_vertices());
        if global.len() != n {
            return Err(Error::input(format!(
                "assignment has {} entries, graph has {n} vertices",
                global.len()
            )));
        }
        if let Some(v) = global.iter().position(|&p| p as usize >= num_parts) {
            return Err(Error::input(format!("vertex {v} has part {} >= {num_parts}", global[v])));
        }
        let parts = graphs
            .iter()
            .map(|lg| lg.local_to_global().iter().map(|&v| global[v]).collect())
            .collect();
        Ok(PartitionState { num_parts, parts })
    }

    pub fn num_parts(&self) -> usize {
        self.num_parts
    }

    pub fn task_parts(&self, task: usize) -> &[Part] {
        &self.parts[task]
    }

    pub fn tasks(&self) -> &[Vec<Part>] {
        &self.parts
    }

    /// Collects owned labels into the global array indexed by vertex.
    pub fn gather(&self, graphs: &[LocalGraph]) -> Vec<Part> {
        let n = graphs.first().map_or(0, |lg| lg.global_vertices());
        let mut out = vec![UNASSIGNED; n];
        for (lg, parts) in graphs.iter().zip(&self.parts) {
            for (l, &v) in lg.owned().iter().enumerate() {
                out[v] = parts[l];
            }
        }
        out
    }

    /// Every ghost slot equals the owner's label.
    pub fn ghosts_coherent(&self, graphs: &[LocalGraph]) -> bool {
        self.first_incoherent_ghost(graphs).is_none()
    }

    /// `(task, ghost global id, ghost label, owner label)` for the first
    /// stale ghost, if any.
    pub fn first_incoherent_ghost(
        &self,
        graphs: &[LocalGraph],
    ) -> Option<(usize, usize, Part, Part)> {
        for (t, lg) in graphs.iter().enumerate() {
            for l in lg.num_owned()..lg.num_local() {
                let v = lg.to_global(l);
                let owner = lg.owner_of(l);
                let ol = graphs[owner].to_local(v).expect("owner holds vertex");
                let (mine, theirs) = (self.parts[t][l], self.parts[owner][ol]);
                if mine != theirs {
                    return Some((t, v, mine, theirs));
                }
            }
        }
        None
    }
}

/// Which phase a superstep belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Init,
    VertBalance,
    VertRefine,
    EdgeBalance,
    EdgeRefine,
}

/// One accepted move, with the scores it was decided on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoveRecord {
    pub vertex: usize,
    pub from: Part,
    pub to: Part,
    pub score_from: f64,
    pub score_to: f64,
}

/// What an [`Observer`] sees at the end of each superstep.
pub struct SuperstepView<'a> {
    pub phase: Phase,
    /// Iteration index within the phase call.
    pub iteration: usize,
    pub iter_tot: usize,
    pub mult: f64,
    pub graphs: &'a [LocalGraph],
    pub state: &'a PartitionState,
    /// Each task's ledger copy; `None` during initialization.
    pub ledgers: Option<&'a [PartLedger]>,
    /// Moves accepted this superstep, per task, in decision order.
    pub moves: &'a [Vec<MoveRecord>],
}

pub trait Observer {
    fn superstep(&mut self, view: &SuperstepView<'_>);
}

/// Step-by-step driver. [`xtrapulp`] runs the standard schedule; the phase
/// methods are public so individual phases can be exercised in isolation.
pub struct Engine<'a> {
    graphs: &'a [LocalGraph],
    config: Config,
    runtime: Runtime,
    state: PartitionState,
    ledgers: Vec<PartLedger>,
    iter_tot: usize,
    observer: Option<&'a mut dyn Observer>,
    // Edge-stage schedule for the edge/cut weight mix.
    edge_bal_iter: usize,
    edge_frozen: bool,
    r_edge: f64,
    r_cut: f64,
}

impl<'a> Engine<'a> {
    pub fn new(graphs: &'a [LocalGraph], config: Config) -> Result<Self> {
        config.validate()?;
        if graphs.len() != config.num_tasks {
            return Err(Error::config(format!(
                "{} local graphs for {} tasks",
                graphs.len(),
                config.num_tasks
            )));
        }
        let runtime = Runtime::new(config.num_tasks)?.sequential(config.sequential);
        let n = graphs[0].global_vertices();
        let m = graphs[0].global_edges();
        let ledger = PartLedger::new(
            config.num_parts,
            config.target_vertices(n),
            config.target_edges(m),
        );
        Ok(Engine {
            graphs,
            state: PartitionState::unassigned(graphs, config.num_parts),
            ledgers: vec![ledger; config.num_tasks],
            iter_tot: 0,
            observer: None,
            edge_bal_iter: 0,
            edge_frozen: false,
            r_edge: config.mult_start,
            r_cut: config.mult_start,
            runtime,
            config,
        })
    }

    pub fn with_runtime(mut self, runtime: Runtime) -> Result<Self> {
        if runtime.num_tasks() != self.config.num_tasks {
            return Err(Error::config("runtime task count differs from config"));
        }
        self.runtime = runtime;
        Ok(self)
    }

    pub fn with_observer(mut self, observer: &'a mut dyn Observer) -> Self {
        self.observer = Some(observer);
        self
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn runtime(&self) -> &Runtime {
        &self.runtime
    }

    pub fn state(&self) -> &PartitionState {
        &self.state
    }

    pub fn into_state(self) -> PartitionState {
        self.state
    }

    /// Task 0's ledger copy (all copies share identical sizes).
    pub fn ledger(&self) -> &PartLedger {
        &self.ledgers[0]
    }

    pub fn ledgers(&self) -> &[PartLedger] {
        &self.ledgers
    }

    pub fn iter_tot(&self) -> usize {
        self.iter_tot
    }

    pub fn reset_iter_tot(&mut self) {
        self.iter_tot = 0;
    }

    /// Replaces the current labels with a global assignment (owned and
    /// ghost slots alike) and recounts the ledger.
    pub fn set_assignment(&mut self, global: &[Part]) -> Result<()> {
        self.state = PartitionState::from_global(self.graphs, global, self.config.num_parts)?;
        self.recount_sizes()
    }

    pub fn mult(&self) -> Result<f64> {
        compute_mult(
            self.iter_tot.min(self.config.total_iters()),
            self.config.total_iters(),
            self.config.num_tasks,
            self.config.mult_end,
            self.config.mult_start,
        )
    }

    /// Recomputes global sizes from the labels (local counts + all-reduce).
    pub fn recount_sizes(&mut self) -> Result<()> {
        let p = self.config.num_parts;
        let locals: Vec<[Vec<i64>; 3]> = self
            .graphs
            .iter()
            .zip(self.state.tasks())
            .map(|(lg, parts)| local_sizes(lg, parts, p))
            .collect();
        let (sv, se, sc) = self.reduce_triplets(locals)?;
        for l in &mut self.ledgers {
            l.set_sizes(sv.clone(), se.clone(), sc.clone());
        }
        Ok(())
    }

    fn reduce_triplets(
        &self,
        locals: Vec<[Vec<i64>; 3]>,
    ) -> Result<(Vec<i64>, Vec<i64>, Vec<i64>)> {
        let mut v = Vec::with_capacity(locals.len());
        let mut e = Vec::with_capacity(locals.len());
        let mut c = Vec::with_capacity(locals.len());
        for [a, b, d] in locals {
            v.push(a);
            e.push(b);
            c.push(d);
        }
        Ok((
            self.runtime.allreduce_sum(&v)?,
            self.runtime.allreduce_sum(&e)?,
            self.runtime.allreduce_sum(&c)?,
        ))
    }

    /// Exchanges each task's queue and writes the received labels into
    /// ghost slots.
    fn exchange_and_apply(&mut self, queues: &[UpdateQueue], label: &str) -> Result<()> {
        let received = self.runtime.exchange_updates(self.graphs, queues, label)?;
        for ((lg, parts), recv) in self.graphs.iter().zip(&mut self.state.parts).zip(&received) {
            apply_updates(lg, parts, recv)?;
        }
        Ok(())
    }

    fn notify(&mut self, phase: Phase, iteration: usize, mult: f64, moves: &[Vec<MoveRecord>]) {
        if let Some(obs) = self.observer.as_deref_mut() {
            let ledgers = (phase != Phase::Init).then_some(self.ledgers.as_slice());
            obs.superstep(&SuperstepView {
                phase,
                iteration,
                iter_tot: self.iter_tot,
                mult,
                graphs: self.graphs,
                state: &self.state,
                ledgers,
                moves,
            });
        }
    }

    fn recording(&self) -> bool {
        self.observer.is_some()
    }

    /// Runs initialization, then the vertex stage, then the edge stage.
    pub fn run(mut self) -> Result<PartitionState> {
        self.init_parts()?;
        self.iter_tot = 0;
        let (bal, refi) = (self.config.balance_iters, self.config.refine_iters);
        for _ in 0..self.config.outer_iters {
            self.vert_balance(bal)?;
            self.vert_refine(refi)?;
        }
        self.iter_tot = 0;
        for _ in 0..self.config.outer_iters {
            self.edge_balance(bal)?;
            self.edge_refine(refi)?;
        }
        Ok(self.state)
    }
}

/// Partitions already-distributed local graphs with the standard schedule.
pub fn xtrapulp(graphs: &[LocalGraph], config: &Config) -> Result<PartitionState> {
    Engine::new(graphs, config.clone())?.run()
}

/// Distributes `g` according to `config`, partitions it, and returns the
/// global assignment indexed by vertex.
pub fn partition_graph(g: &GlobalGraph, config: &Config) -> Result<Vec<Part>> {
    config.validate()?;
    let dist = Distribution::new(
        config.distribution,
        g.num_vertices(),
        config.num_tasks,
        config.seed,
    )?;
    let graphs = distribute(g, &dist)?;
    let state = xtrapulp(&graphs, config)?;
    Ok(state.gather(&graphs))
}
