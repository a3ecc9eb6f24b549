//! Sweeps the multiplier endpoints (X, Y) on one R-MAT graph and prints the
//! mean edge cut and imbalance for each pair.
//!
//! cargo run --release --example multiplier_sweep -- [scale] [parts] [tasks] [seeds]

use xtrapulp::gen::GenSpec;
use xtrapulp::graph::build_csr;
use xtrapulp::metrics::QualityReport;
use xtrapulp::partition::{partition_graph, Config};

fn main() -> xtrapulp::Result<()> {
    let mut args = std::env::args().skip(1);
    let scale: u32 = args.next().map_or(12, |s| s.parse().expect("scale"));
    let p: usize = args.next().map_or(8, |s| s.parse().expect("parts"));
    let t: usize = args.next().map_or(8, |s| s.parse().expect("tasks"));
    let seeds: u64 = args.next().map_or(5, |s| s.parse().expect("seeds"));

    let spec = GenSpec::rmat(scale, 16, 9);
    let g = build_csr(&spec.generate()?, spec.n)?;
    let values = [0.1, 0.25, 0.5, 1.0, 2.0];
    println!("{:>5} {:>5} {:>10} {:>8} {:>8}", "X", "Y", "cut", "v imb", "e imb");
    for &x in &values {
        for &y in values.iter().filter(|&&y| y <= x) {
            let (mut cut, mut vi, mut ei) = (0.0, 0.0, 0.0);
            for seed in 0..seeds {
                let mut config = Config::new(p, t).with_seed(seed);
                config.mult_end = x;
                config.mult_start = y;
                let r = QualityReport::compute(&g, &partition_graph(&g, &config)?, p)?;
                cut += r.edge_cut as f64;
                vi += r.vertex_imbalance;
                ei += r.edge_imbalance;
            }
            let k = seeds as f64;
            println!("{x:>5} {y:>5} {:>10.0} {:>8.3} {:>8.3}", cut / k, vi / k, ei / k);
        }
    }
    Ok(())
}
