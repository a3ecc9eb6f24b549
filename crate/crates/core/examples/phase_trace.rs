//! Prints part sizes and move counts after every superstep of one run.
//!
//! cargo run --release --example phase_trace -- [rmat|er|grid|cliques] [parts] [tasks] [seed]

use xtrapulp::gen::{gen_er, GenSpec};
use xtrapulp::graph::{build_csr, distribute, Distribution};
use xtrapulp::partition::{Config, Engine, Observer, SuperstepView};

struct Printer;

impl Observer for Printer {
    fn superstep(&mut self, view: &SuperstepView<'_>) {
        let moves: usize = view.moves.iter().map(Vec::len).sum();
        match view.ledgers {
            Some(ls) => {
                let l = &ls[0];
                let avg_v = l.target_v / 1.1;
                let avg_e = l.target_e / 1.1;
                let max_v = l.size_v.iter().max().copied().unwrap_or(0) as f64;
                let max_e = l.size_e.iter().max().copied().unwrap_or(0) as f64;
                let cut: i64 = l.size_c.iter().sum::<i64>() / 2;
                println!(
                    "{:?} it={} tot={} mult={:.3} moves={} vimb={:.3} eimb={:.3} cut={}",
                    view.phase,
                    view.iteration,
                    view.iter_tot,
                    view.mult,
                    moves,
                    max_v / avg_v,
                    max_e / avg_e,
                    cut
                );
                println!("  part sizes {:?}", l.size_v);
                if l.size_v.iter().sum::<i64>() <= 64 {
                    println!("  labels {:?}", view.state.gather(view.graphs));
                }
            }
            None => println!("{:?} it={}", view.phase, view.iteration),
        }
    }
}

fn main() -> xtrapulp::Result<()> {
    let mut args = std::env::args().skip(1);
    let kind = args.next().unwrap_or_else(|| "rmat".into());
    let p: usize = args.next().map_or(8, |s| s.parse().expect("parts"));
    let t: usize = args.next().map_or(1, |s| s.parse().expect("tasks"));
    let seed: u64 = args.next().map_or(0, |s| s.parse().expect("seed"));
    let n = if kind == "cliques" { 16 } else { 1 << 14 };
    let edges = match kind.as_str() {
        "cliques" => {
            let mut e = Vec::new();
            for base in [0, 8] {
                for a in 0..8 {
                    for b in a + 1..8 {
                        e.push((base + a, base + b));
                    }
                }
            }
            e.push((7, 8));
            e
        }
        "er" => gen_er(n, 16, 1)?,
        "grid" => {
            let mut e = Vec::new();
            for v in 0..n {
                if v % 128 + 1 < 128 {
                    e.push((v, v + 1));
                }
                if v + 128 < n {
                    e.push((v, v + 128));
                }
            }
            e
        }
        _ => GenSpec::rmat(14, 16, 1).generate()?,
    };
    let g = build_csr(&edges, n)?;
    let config = Config::new(p, t).with_seed(seed);
    let dist = Distribution::new(config.distribution, n, t, seed)?;
    let graphs = distribute(&g, &dist)?;
    let mut printer = Printer;
    Engine::new(&graphs, config)?.with_observer(&mut printer).run()?;
    Ok(())
}
