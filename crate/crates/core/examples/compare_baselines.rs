//! Scores the partitioner against the random, vertex-block and edge-block
//! baselines on a few graphs and prints geometric-mean performance ratios.
//!
//! cargo run --release --example compare_baselines -- [parts] [tasks]

use xtrapulp::baselines::{edge_block_partition, random_partition, vertex_block_partition};
use xtrapulp::gen::GenSpec;
use xtrapulp::graph::{build_csr, GlobalGraph};
use xtrapulp::metrics::{performance_ratio, QualityReport, ResultTable};
use xtrapulp::partition::{partition_graph, Config};
use xtrapulp::Part;

fn main() -> xtrapulp::Result<()> {
    let mut args = std::env::args().skip(1);
    let p: usize = args.next().map_or(8, |s| s.parse().expect("parts"));
    let t: usize = args.next().map_or(4, |s| s.parse().expect("tasks"));

    let graphs: Vec<(&str, GlobalGraph)> = [
        ("rmat13", GenSpec::rmat(13, 16, 1)),
        ("er13", GenSpec::er(1 << 13, 16, 1)),
        ("randhd13", GenSpec::randhd(1 << 13, 16, 1)),
    ]
    .into_iter()
    .map(|(name, spec)| Ok((name, build_csr(&spec.generate()?, spec.n)?)))
    .collect::<xtrapulp::Result<_>>()?;

    let methods = ["xtrapulp", "random", "vblock", "eblock"];
    let mut cut_cells = Vec::new();
    let mut max_cells = Vec::new();
    println!("{:<9} {:<9} {:>9} {:>9} {:>7} {:>7}", "graph", "method", "cut", "max cut", "v imb", "e imb");
    for (name, g) in &graphs {
        let n = g.num_vertices();
        let runs: Vec<Vec<Part>> = vec![
            partition_graph(g, &Config::new(p, t).with_seed(1))?,
            random_partition(n, p, 1)?,
            vertex_block_partition(n, p)?,
            edge_block_partition(g, p)?,
        ];
        let (mut cuts, mut maxes) = (Vec::new(), Vec::new());
        for (m, parts) in methods.iter().zip(&runs) {
            let r = QualityReport::compute(g, parts, p)?;
            println!(
                "{:<9} {:<9} {:>9} {:>9} {:>7.3} {:>7.3}",
                name, m, r.edge_cut, r.max_part_cut, r.vertex_imbalance, r.edge_imbalance
            );
            cuts.push(Some(r.edge_cut as f64));
            maxes.push(Some(r.max_part_cut as f64));
        }
        cut_cells.push(cuts);
        max_cells.push(maxes);
    }

    let table = |cells| ResultTable {
        methods: methods.iter().map(|s| s.to_string()).collect(),
        graphs: graphs.iter().map(|(n, _)| n.to_string()).collect(),
        cells,
    };
    let cut = performance_ratio(&table(cut_cells))?;
    let max = performance_ratio(&table(max_cells))?;
    println!("\nperformance ratio (1.0 = best on every graph)");
    for (i, m) in methods.iter().enumerate() {
        println!("  {m:<9} edge cut {:.3}  max part cut {:.3}", cut.ratios[i], max.ratios[i]);
    }
    Ok(())
}
