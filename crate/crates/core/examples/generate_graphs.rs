//! Generates the three synthetic families and prints their basic shape.
//!
//! cargo run --release --example generate_graphs -- [scale] [d_avg] [seed]

use xtrapulp::gen::GenSpec;
use xtrapulp::graph::build_csr;
use xtrapulp::metrics::{approx_diameter, largest_component};

fn main() -> xtrapulp::Result<()> {
    let mut args = std::env::args().skip(1);
    let scale: u32 = args.next().map_or(14, |s| s.parse().expect("scale"));
    let d: usize = args.next().map_or(16, |s| s.parse().expect("d_avg"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let n = 1usize << scale;

    println!("{:<7} {:>9} {:>10} {:>8} {:>8} {:>9} {:>9}", "graph", "n", "m", "avg deg", "max deg", "largest cc", "diameter");
    for spec in [GenSpec::rmat(scale, d, seed), GenSpec::er(n, d, seed), GenSpec::randhd(n, d, seed)] {
        let pairs = spec.generate()?;
        let g = build_csr(&pairs, n)?;
        let cc = largest_component(&g).len();
        let diam = approx_diameter(&g, 10, seed)?;
        println!(
            "{:<7} {:>9} {:>10} {:>8.2} {:>8} {:>9} {:>9}",
            format!("{:?}", spec.kind).to_lowercase(),
            g.num_vertices(),
            g.num_edges(),
            g.avg_degree(),
            g.max_degree(),
            cc,
            diam
        );
    }
    Ok(())
}
