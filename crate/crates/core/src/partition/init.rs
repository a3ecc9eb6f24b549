use rand::seq::index;
use rand::Rng;

use super::{Engine, InitMode, PartitionState, Phase};
use crate::bsp::UpdateQueue;
use crate::error::{Error, Result};
use crate::seed::{self, Stream};
use crate::{Part, UNASSIGNED};

impl Engine<'_> {
    /// Seeds every vertex with a part according to the configured mode.
    pub fn init_parts(&mut self) -> Result<()> {
        let n = self.graphs[0].global_vertices();
        let p = self.config.num_parts;
        if p > n {
            return Err(Error::config(format!("{p} parts requested for {n} vertices")));
        }
        match self.config.init {
            InitMode::BfsLp => {
                // The master task draws the roots; everyone gets a copy.
                let mut rng = seed::rng(self.config.seed, Stream::InitRoots, &[]);
                let roots = index::sample(&mut rng, n, p).into_vec();
                let roots = self.runtime.broadcast(&roots).swap_remove(0);
                self.init_from_roots(&roots)
            }
            InitMode::Random => {
                let seed = self.config.seed;
                self.init_pointwise(|v| {
                    (seed::derive(seed, Stream::InitRandom, &[v as u64]) % p as u64) as Part
                })
            }
            InitMode::Block => {
                self.init_pointwise(|v| ((v as u128 * p as u128) / n as u128) as Part)
            }
        }
    }

    /// Label-propagation growth from the given roots: root `i` gets part
    /// `i`, then each superstep every unlabeled vertex with labeled
    /// neighbors picks one of their distinct parts uniformly at random.
    /// Vertices never reached get a uniform random part at the end.
    pub fn init_from_roots(&mut self, roots: &[usize]) -> Result<()> {
        let n = self.graphs[0].global_vertices();
        let p = self.config.num_parts;
        if roots.len() != p {
            return Err(Error::config(format!("{} roots for {p} parts", roots.len())));
        }
        if let Some(&r) = roots.iter().find(|&&r| r >= n) {
            return Err(Error::config(format!("root {r} out of range")));
        }
        self.state = PartitionState::unassigned(self.graphs, p);
        for (lg, parts) in self.graphs.iter().zip(&mut self.state.parts) {
            for (i, &r) in roots.iter().enumerate() {
                if let Some(l) = lg.to_local(r) {
                    parts[l] = i as Part;
                }
            }
        }

        let graphs = self.graphs;
        let seed = self.config.seed;
        let mut step = 0u64;
        loop {
            let queues = self.runtime.run_superstep(&mut self.state.parts, |t, parts| {
                let lg = &graphs[t];
                let mut rng = seed::rng(seed, Stream::InitPropagate, &[t as u64, step]);
                let mut seen = vec![false; p];
                let mut touched: Vec<Part> = Vec::new();
                let mut decided = Vec::new();
                for v in 0..lg.num_owned() {
                    if parts[v] != UNASSIGNED {
                        continue;
                    }
                    for &u in lg.neighbors(v) {
                        let pu = parts[u];
                        if pu != UNASSIGNED && !seen[pu as usize] {
                            seen[pu as usize] = true;
                            touched.push(pu);
                        }
                    }
                    if !touched.is_empty() {
                        let w = touched[rng.gen_range(0..touched.len())];
                        decided.push((v, w));
                    }
                    for &pu in &touched {
                        seen[pu as usize] = false;
                    }
                    touched.clear();
                }
                let mut q = UpdateQueue::new();
                for (v, w) in decided {
                    parts[v] = w;
                    q.push(lg.to_global(v), w);
                }
                Ok(q)
            })?;
            let counts: Vec<usize> = queues.iter().map(|q| q.len()).collect();
            let updates = self.runtime.allreduce_scalar(&counts)?;
            self.exchange_and_apply(&queues, "init")?;
            self.notify(Phase::Init, step as usize, 0.0, &vec![Vec::new(); graphs.len()]);
            step += 1;
            if updates == 0 {
                break;
            }
        }

        // Fallback for vertices in components without a root.
        let queues = self.runtime.run_superstep(&mut self.state.parts, |t, parts| {
            let lg = &graphs[t];
            let mut rng = seed::rng(seed, Stream::InitFallback, &[t as u64]);
            let mut q = UpdateQueue::new();
            for v in 0..lg.num_owned() {
                if parts[v] == UNASSIGNED {
                    let w = rng.gen_range(0..p) as Part;
                    parts[v] = w;
                    q.push(lg.to_global(v), w);
                }
            }
            Ok(q)
        })?;
        self.exchange_and_apply(&queues, "init-fallback")?;
        self.notify(Phase::Init, step as usize, 0.0, &vec![Vec::new(); graphs.len()]);
        self.recount_sizes()
    }

    // Assigns every slot from a pure function of the global ID, so ghosts
    // are coherent without communication.
    fn init_pointwise(&mut self, f: impl Fn(usize) -> Part) -> Result<()> {
        let p = self.config.num_parts;
        self.state = PartitionState::unassigned(self.graphs, p);
        for (lg, parts) in self.graphs.iter().zip(&mut self.state.parts) {
            for (slot, &v) in parts.iter_mut().zip(lg.local_to_global()) {
                *slot = f(v);
            }
        }
        self.notify(Phase::Init, 0, 0.0, &vec![Vec::new(); self.graphs.len()]);
        self.recount_sizes()
    }
}
