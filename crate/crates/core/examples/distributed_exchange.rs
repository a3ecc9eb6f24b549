//! Splits a graph across logical tasks, moves some labels and pushes the
//! changes to the ghost copies with one all-to-all exchange.
//!
//! cargo run --release --example distributed_exchange -- [tasks]

use xtrapulp::bsp::{apply_updates, Runtime, UpdateQueue};
use xtrapulp::gen::GenSpec;
use xtrapulp::graph::{build_csr, distribute, Distribution};
use xtrapulp::partition::PartitionState;
use xtrapulp::Part;

fn main() -> xtrapulp::Result<()> {
    let t: usize = std::env::args().nth(1).map_or(4, |s| s.parse().expect("tasks"));
    let spec = GenSpec::rmat(12, 8, 3);
    let g = build_csr(&spec.generate()?, spec.n)?;

    for dist in [Distribution::block(spec.n, t)?, Distribution::random(spec.n, t, 3)?] {
        let graphs = distribute(&g, &dist)?;
        println!("{:?} distribution over {t} tasks", dist.kind());
        for lg in &graphs {
            println!(
                "  task {}: {} owned, {} ghosts, {} local arcs",
                lg.task(),
                lg.num_owned(),
                lg.num_ghosts(),
                lg.num_local_arcs()
            );
        }

        // every vertex starts in part 0; even vertices switch to part 1
        let start = vec![0 as Part; spec.n];
        let state = PartitionState::from_global(&graphs, &start, 2)?;
        let mut tasks = state.tasks().to_vec();
        let queues: Vec<UpdateQueue> = graphs
            .iter()
            .zip(tasks.iter_mut())
            .map(|(lg, parts)| {
                let mut q = UpdateQueue::new();
                for (l, &v) in lg.owned().iter().enumerate() {
                    if v % 2 == 0 {
                        parts[l] = 1;
                        q.push(v, 1);
                    }
                }
                q
            })
            .collect();
        let rt = Runtime::new(t)?;
        let received = rt.exchange_updates(&graphs, &queues, "demo")?;
        let mut applied = 0;
        for ((lg, parts), recv) in graphs.iter().zip(tasks.iter_mut()).zip(&received) {
            applied += apply_updates(lg, parts, recv)?;
        }
        let after = PartitionState::from_global(&graphs, &gather_owned(&graphs, &tasks), 2)?;
        let (sent, recv) = rt.traffic();
        println!(
            "  exchange: {sent} pairs sent, {recv} received, {applied} ghost slots updated, coherent: {}",
            after.tasks() == tasks.as_slice()
        );
    }
    Ok(())
}

fn gather_owned(graphs: &[xtrapulp::graph::LocalGraph], tasks: &[Vec<Part>]) -> Vec<Part> {
    let mut out = vec![0; graphs[0].global_vertices()];
    for (lg, parts) in graphs.iter().zip(tasks) {
        for (l, &v) in lg.owned().iter().enumerate() {
            out[v] = parts[l];
        }
    }
    out
}
