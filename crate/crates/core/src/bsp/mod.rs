//! Simulated bulk-synchronous runtime.
//!
//! `T` logical tasks live in one process. Each task owns private state and
//! a [`LocalGraph`]; tasks only observe each other's state through the
//! collectives defined here (update exchange, all-reduce, broadcast). A
//! superstep runs every task's local step to completion before any
//! collective, so running the tasks on a thread pool or strictly one after
//! another yields identical results.

mod exchange;

use std::io::Write;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::Serialize;

pub use exchange::{apply_updates, ExchangeBuffers, UpdateQueue};

use crate::error::{Error, Result};
use crate::graph::LocalGraph;

pub struct Runtime {
    num_tasks: usize,
    sequential: bool,
    superstep: AtomicUsize,
    pairs_sent: AtomicUsize,
    pairs_received: AtomicUsize,
    trace: Option<Mutex<Box<dyn Write + Send>>>,
}

#[derive(Serialize)]
struct TraceLine<'a> {
    superstep: usize,
    label: &'a str,
    sent: Vec<usize>,
    received: Vec<usize>,
}

impl std::fmt::Debug for Runtime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Runtime")
            .field("num_tasks", &self.num_tasks)
            .field("sequential", &self.sequential)
            .field("superstep", &self.superstep)
            .finish_non_exhaustive()
    }
}

impl Runtime {
    pub fn new(num_tasks: usize) -> Result<Self> {
        if num_tasks == 0 {
            return Err(Error::config("task count must be at least 1"));
        }
        Ok(Runtime {
            num_tasks,
            sequential: false,
            superstep: AtomicUsize::new(0),
            pairs_sent: AtomicUsize::new(0),
            pairs_received: AtomicUsize::new(0),
            trace: None,
        })
    }

    /// Runs tasks one after another on the calling thread.
    pub fn sequential(mut self, sequential: bool) -> Self {
        self.sequential = sequential;
        self
    }

    /// Dumps per-exchange message counts as JSON lines.
    pub fn with_trace(mut self, sink: Box<dyn Write + Send>) -> Self {
        self.trace = Some(Mutex::new(sink));
        self
    }

    pub fn num_tasks(&self) -> usize {
        self.num_tasks
    }

    pub fn is_sequential(&self) -> bool {
        self.sequential
    }

    /// Supersteps completed so far.
    pub fn supersteps(&self) -> usize {
        self.superstep.load(Ordering::Relaxed)
    }

    /// Total `(vertex, part)` pairs sent and received over the runtime's life.
    pub fn traffic(&self) -> (usize, usize) {
        (
            self.pairs_sent.load(Ordering::Relaxed),
            self.pairs_received.load(Ordering::Relaxed),
        )
    }

    fn check_len(&self, len: usize, what: &str) -> Result<()> {
        if len != self.num_tasks {
            return Err(Error::protocol(format!(
                "{what}: got {len} entries for {} tasks",
                self.num_tasks
            )));
        }
        Ok(())
    }

    /// Runs `step` once per task, then acts as a barrier. If any task fails
    /// the superstep is aborted and the lowest-indexed failure is reported.
    pub fn run_superstep<S, R, F>(&self, states: &mut [S], step: F) -> Result<Vec<R>>
    where
        S: Send,
        R: Send,
        F: Fn(usize, &mut S) -> Result<R> + Sync,
    {
        self.check_len(states.len(), "run_superstep")?;
        let results: Vec<Result<R>> = if self.sequential {
            states.iter_mut().enumerate().map(|(t, s)| step(t, s)).collect()
        } else {
            states.par_iter_mut().enumerate().map(|(t, s)| step(t, s)).collect()
        };
        let superstep = self.superstep.fetch_add(1, Ordering::Relaxed);
        results
            .into_iter()
            .enumerate()
            .map(|(task, r)| {
                r.map_err(|e| Error::TaskFailed { superstep, task, source: Box::new(e) })
            })
            .collect()
    }

    fn map_tasks<T, R, F>(&self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(usize, &T) -> R + Sync,
    {
        if self.sequential {
            items.iter().enumerate().map(|(t, x)| f(t, x)).collect()
        } else {
            items.par_iter().enumerate().map(|(t, x)| f(t, x)).collect()
        }
    }

    /// Delivers every queued `(v, part)` to each task holding a ghost of `v`.
    ///
    /// `queues[t]` must only contain vertices owned by task `t`. The result
    /// holds, per task, the pairs addressed to it in sender-task order.
    pub fn exchange_updates(
        &self,
        graphs: &[LocalGraph],
        queues: &[UpdateQueue],
        label: &str,
    ) -> Result<Vec<UpdateQueue>> {
        self.check_len(graphs.len(), "exchange_updates graphs")?;
        self.check_len(queues.len(), "exchange_updates queues")?;
        let packed: Vec<Result<ExchangeBuffers>> =
            self.map_tasks(graphs, |t, lg| ExchangeBuffers::pack(lg, &queues[t]));
        let mut buffers = packed.into_iter().collect::<Result<Vec<_>>>()?;

        let nprocs = self.num_tasks;
        // all-to-all of counts
        for r in 0..nprocs {
            let counts: Vec<usize> = (0..nprocs).map(|s| buffers[s].send_counts[r]).collect();
            let mut acc = 0;
            let offsets = counts
                .iter()
                .map(|c| {
                    let o = acc;
                    acc += c;
                    o
                })
                .collect();
            buffers[r].recv_counts = counts;
            buffers[r].recv_offsets = offsets;
        }
        // all-to-all-v of payloads
        let received: Vec<UpdateQueue> = (0..nprocs)
            .map(|r| {
                let total: usize = buffers[r].recv_counts.iter().sum();
                let mut q = Vec::with_capacity(total);
                for sender in &buffers {
                    q.extend_from_slice(sender.outgoing(r));
                }
                debug_assert_eq!(q.len(), total);
                q.into_iter().collect()
            })
            .collect();

        let sent: Vec<usize> = buffers.iter().map(|b| b.total_sent()).collect();
        let recv: Vec<usize> = received.iter().map(|q| q.len()).collect();
        self.pairs_sent.fetch_add(sent.iter().sum(), Ordering::Relaxed);
        self.pairs_received.fetch_add(recv.iter().sum(), Ordering::Relaxed);
        if let Some(trace) = &self.trace {
            let line = TraceLine { superstep: self.supersteps(), label, sent, received: recv };
            let mut sink = trace.lock().expect("trace sink poisoned");
            serde_json::to_writer(&mut *sink, &line)?;
            writeln!(sink)?;
        }
        Ok(received)
    }

    /// Element-wise sum of one vector per task. Summation runs in task order.
    pub fn allreduce_sum<T>(&self, per_task: &[Vec<T>]) -> Result<Vec<T>>
    where
        T: Copy + Default + std::ops::AddAssign,
    {
        self.check_len(per_task.len(), "allreduce_sum")?;
        let len = per_task[0].len();
        if let Some((t, v)) = per_task.iter().enumerate().find(|(_, v)| v.len() != len) {
            return Err(Error::protocol(format!(
                "allreduce_sum: task {t} contributed {} elements, task 0 contributed {len}",
                v.len()
            )));
        }
        let mut out = vec![T::default(); len];
        for v in per_task {
            for (o, &x) in out.iter_mut().zip(v) {
                *o += x;
            }
        }
        Ok(out)
    }

    /// Sum of one scalar per task.
    pub fn allreduce_scalar(&self, per_task: &[usize]) -> Result<usize> {
        self.check_len(per_task.len(), "allreduce_scalar")?;
        Ok(per_task.iter().sum())
    }

    /// Copies the root's value to every task.
    pub fn broadcast<T: Clone>(&self, root_value: &T) -> Vec<T> {
        vec![root_value.clone(); self.num_tasks]
    }
}
