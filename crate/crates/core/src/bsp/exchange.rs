use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::LocalGraph;
use crate::Part;

/// `(global vertex, new part)` pairs produced by one task in one superstep.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct UpdateQueue {
    items: Vec<(usize, Part)>,
}

impl UpdateQueue {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, vertex: usize, part: Part) {
        self.items.push((vertex, part));
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Part)> + '_ {
        self.items.iter().copied()
    }

    pub fn as_slice(&self) -> &[(usize, Part)] {
        &self.items
    }

    /// Concatenates per-worker sub-queues in worker-index order.
    pub fn merge(subqueues: impl IntoIterator<Item = UpdateQueue>) -> UpdateQueue {
        let mut items = Vec::new();
        for q in subqueues {
            items.extend(q.items);
        }
        UpdateQueue { items }
    }
}

impl FromIterator<(usize, Part)> for UpdateQueue {
    fn from_iter<I: IntoIterator<Item = (usize, Part)>>(iter: I) -> Self {
        UpdateQueue { items: iter.into_iter().collect() }
    }
}

/// Send/receive bookkeeping for one task's side of an all-to-all-v exchange.
///
/// Counts and offsets are measured in `(vertex, part)` pairs.
#[derive(Debug, Clone, Default)]
pub struct ExchangeBuffers {
    pub send_counts: Vec<usize>,
    pub send_offsets: Vec<usize>,
    pub send_buffer: Vec<(usize, Part)>,
    pub recv_counts: Vec<usize>,
    pub recv_offsets: Vec<usize>,
    to_send: Vec<bool>,
    touched: Vec<usize>,
}

impl ExchangeBuffers {
    /// Packs `queue` for every task that holds a ghost copy of a queued
    /// vertex. Each `(v, part)` goes to each neighboring task exactly once.
    pub fn pack(lg: &LocalGraph, queue: &UpdateQueue) -> Result<Self> {
        let nprocs = lg.num_tasks();
        let me = lg.task();
        let mut buf = ExchangeBuffers {
            send_counts: vec![0; nprocs],
            send_offsets: vec![0; nprocs],
            recv_counts: vec![0; nprocs],
            recv_offsets: vec![0; nprocs],
            to_send: vec![false; nprocs],
            ..Default::default()
        };

        let mut locals = Vec::with_capacity(queue.len());
        for (v, part) in queue.iter() {
            match lg.to_local(v) {
                Some(l) if lg.is_owned(l) => locals.push(l),
                _ => {
                    return Err(Error::protocol(format!(
                        "task {me} queued vertex {v} (part {part}) which it does not own"
                    )))
                }
            }
        }

        for &l in &locals {
            buf.for_each_target(lg, l, |buf, task| buf.send_counts[task] += 1);
        }
        let mut acc = 0;
        for t in 0..nprocs {
            buf.send_offsets[t] = acc;
            acc += buf.send_counts[t];
        }
        buf.send_buffer = vec![(0, 0); acc];
        let mut tmp_offsets = buf.send_offsets.clone();
        for (&l, (v, part)) in locals.iter().zip(queue.iter()) {
            buf.for_each_target(lg, l, |buf, task| {
                buf.send_buffer[tmp_offsets[task]] = (v, part);
                tmp_offsets[task] += 1;
            });
        }
        Ok(buf)
    }

    // Calls `f` once per distinct remote task adjacent to owned vertex `l`.
    fn for_each_target(&mut self, lg: &LocalGraph, l: usize, mut f: impl FnMut(&mut Self, usize)) {
        let me = lg.task();
        for &u in lg.neighbors(l) {
            let task = lg.owner_of(u);
            if task != me && !self.to_send[task] {
                self.to_send[task] = true;
                self.touched.push(task);
                f(self, task);
            }
        }
        for t in self.touched.drain(..) {
            self.to_send[t] = false;
        }
    }

    pub fn total_sent(&self) -> usize {
        self.send_buffer.len()
    }

    /// Slice of the send buffer addressed to `task`.
    pub fn outgoing(&self, task: usize) -> &[(usize, Part)] {
        let s = self.send_offsets[task];
        &self.send_buffer[s..s + self.send_counts[task]]
    }
}

/// Writes received updates into the ghost slots of `parts`.
///
/// Returns the number of pairs applied. A pair naming a vertex that is not
/// a ghost on this task is a protocol violation.
pub fn apply_updates(lg: &LocalGraph, parts: &mut [Part], recv: &UpdateQueue) -> Result<usize> {
    for (v, part) in recv.iter() {
        match lg.to_local(v) {
            Some(l) if !lg.is_owned(l) => parts[l] = part,
            _ => {
                return Err(Error::protocol(format!(
                    "task {} received update for vertex {v} which is not one of its ghosts",
                    lg.task()
                )))
            }
        }
    }
    Ok(recv.len())
}
