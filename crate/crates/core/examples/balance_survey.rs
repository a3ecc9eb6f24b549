//! Partitions the standard small instances at several part counts and
//! prints balance and cut against the random baseline.
//!
//! cargo run --release --example balance_survey -- [seeds] [tasks]

use xtrapulp::baselines::random_partition;
use xtrapulp::gen::{gen_er, GenSpec};
use xtrapulp::graph::{build_csr, GlobalGraph};
use xtrapulp::metrics::QualityReport;
use xtrapulp::partition::{partition_graph, Config};

fn grid(side: usize) -> Vec<(usize, usize)> {
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

fn main() -> xtrapulp::Result<()> {
    let mut args = std::env::args().skip(1);
    let seeds: u64 = args.next().map_or(3, |s| s.parse().expect("seed count"));
    let tasks: usize = args.next().map_or(1, |s| s.parse().expect("task count"));
    let graphs: Vec<(&str, GlobalGraph)> = vec![
        ("rmat14", build_csr(&GenSpec::rmat(14, 16, 1).generate()?, 1 << 14)?),
        ("er14", build_csr(&gen_er(1 << 14, 16, 1)?, 1 << 14)?),
        ("grid64", build_csr(&grid(64), 64 * 64)?),
    ];
    println!("graph    p  seed  vert_imb  edge_imb  cut_ratio  random_cut");
    for (name, g) in &graphs {
        for p in [4, 8, 16] {
            for seed in 0..seeds {
                let config = Config::new(p, tasks).with_seed(seed);
                let parts = partition_graph(g, &config)?;
                let r = QualityReport::compute(g, &parts, p)?;
                let rand = QualityReport::compute(g, &random_partition(g.num_vertices(), p, seed)?, p)?;
                println!(
                    "{name:8} {p:2} {seed:5} {:9.4} {:9.4} {:10.4} {:11.4}",
                    r.vertex_imbalance, r.edge_imbalance, r.cut_ratio, rand.cut_ratio
                );
            }
        }
    }
    Ok(())
}
