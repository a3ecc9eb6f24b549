//! Partitions an R-MAT graph and prints the quality report.
//!
//! cargo run --release --example partition_rmat -- [scale] [parts] [tasks] [seed]

use std::time::Instant;

use xtrapulp::gen::GenSpec;
use xtrapulp::graph::build_csr;
use xtrapulp::metrics::QualityReport;
use xtrapulp::partition::{partition_graph, Config};

fn main() -> xtrapulp::Result<()> {
    let mut args = std::env::args().skip(1);
    let scale: u32 = args.next().map_or(14, |s| s.parse().expect("scale"));
    let p: usize = args.next().map_or(16, |s| s.parse().expect("parts"));
    let t: usize = args.next().map_or(8, |s| s.parse().expect("tasks"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));

    let spec = GenSpec::rmat(scale, 16, seed);
    let g = build_csr(&spec.generate()?, spec.n)?;
    let config = Config::new(p, t).with_seed(seed);
    let start = Instant::now();
    let parts = partition_graph(&g, &config)?;
    let elapsed = start.elapsed();
    let r = QualityReport::compute(&g, &parts, p)?;

    println!("rmat scale {scale}: n={} m={}", r.num_vertices, r.num_edges);
    println!("{p} parts on {t} tasks in {:.2}s", elapsed.as_secs_f64());
    println!("edge cut      {} ({:.4} of edges)", r.edge_cut, r.cut_ratio);
    println!("max part cut  {} (part {}), scaled {:.3}", r.max_part_cut, r.max_cut_part, r.scaled_max_cut);
    println!("imbalance     vertices {:.3}, edges {:.3}", r.vertex_imbalance, r.edge_imbalance);
    println!("part vertices {:?}", r.parts.vertices);
    Ok(())
}
