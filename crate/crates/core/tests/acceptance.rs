// Acceptance suite. Runs every criterion in order, prints one PASS/FAIL
// line each and exits non-zero if any failed.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xtrapulp::baselines::random_partition;
use xtrapulp::gen::{self, GenSpec};
use xtrapulp::graph::{build_csr, distribute, Distribution, GlobalGraph, LocalGraph};
use xtrapulp::metrics::{self, approx_diameter, PartTally, QualityReport};
use xtrapulp::partition::{compute_mult, partition_graph, Config, Engine, Observer, SuperstepView};
use xtrapulp::{io, Part};

/// Task count for the quality criteria: an 8-core desk machine.
const QUALITY_TASKS: usize = 8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn grid(side: usize) -> GlobalGraph {
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
    build_csr(&e, side * side).unwrap()
}

fn two_cliques(k: usize) -> GlobalGraph {
    let mut e = Vec::new();
    for base in [0, k] {
        for a in 0..k {
            for b in a + 1..k {
                e.push((base + a, base + b));
            }
        }
    }
    e.push((k - 1, k));
    build_csr(&e, 2 * k).unwrap()
}

fn generated(spec: &GenSpec) -> GlobalGraph {
    build_csr(&spec.generate().unwrap(), spec.n).unwrap()
}

// A random small graph of one of the three generator families.
fn random_graph(rng: &mut ChaCha8Rng, max_scale: u32, max_edges: usize) -> (String, GlobalGraph) {
    let scale = rng.gen_range(6..=max_scale);
    let n = 1usize << scale;
    let mut d = rng.gen_range(2..=16usize);
    let spec = match rng.gen_range(0..3) {
        0 => {
            d = d.min(2 * max_edges / n).max(1);
            GenSpec::rmat(scale, d, rng.gen())
        }
        1 => {
            d = d.min(2 * max_edges / n).max(1);
            GenSpec::er(n, d, rng.gen())
        }
        _ => {
            d = d.min(max_edges / n).max(1);
            GenSpec::randhd(n, d, rng.gen())
        }
    };
    (format!("{:?}(n={n},d={d})", spec.kind), generated(&spec))
}

fn split(g: &GlobalGraph, config: &Config) -> Vec<LocalGraph> {
    let dist = Distribution::new(config.distribution, g.num_vertices(), config.num_tasks, config.seed)
        .unwrap();
    distribute(g, &dist).unwrap()
}

// 1. Ghost coherence after every superstep.
fn ghost_coherence() -> Outcome {
    struct Check {
        steps: usize,
        failure: Option<String>,
    }
    impl Observer for Check {
        fn superstep(&mut self, view: &SuperstepView<'_>) {
            self.steps += 1;
            if self.failure.is_none() {
                if let Some((t, v, mine, theirs)) = view.state.first_incoherent_ghost(view.graphs) {
                    self.failure = Some(format!(
                        "{:?} iter {}: task {t} sees vertex {v} in {mine}, owner has {theirs}",
                        view.phase, view.iteration
                    ));
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut steps = 0;
    for i in 0..50 {
        let (name, g) = random_graph(&mut rng, 12, 1 << 15);
        let p = rng.gen_range(2..=16);
        for t in [1, 2, 4, 8] {
            let config = Config::new(p, t).with_seed(i);
            let graphs = split(&g, &config);
            let mut check = Check { steps: 0, failure: None };
            Engine::new(&graphs, config).unwrap().with_observer(&mut check).run().unwrap();
            if let Some(f) = check.failure {
                return outcome(false, format!("{name} p={p} T={t}: {f}"));
            }
            steps += check.steps;
        }
    }
    outcome(true, format!("200 runs, {steps} supersteps checked"))
}

// 2. Replicated part sizes equal a recount from the gathered assignment.
fn ledger_honesty() -> Outcome {
    struct Check {
        steps: usize,
        failure: Option<String>,
    }
    impl Observer for Check {
        fn superstep(&mut self, view: &SuperstepView<'_>) {
            let Some(ledgers) = view.ledgers else { return };
            self.steps += 1;
            if self.failure.is_some() {
                return;
            }
            let parts = view.state.gather(view.graphs);
            let tally = recount(view.graphs, &parts, view.state.num_parts());
            for (t, l) in ledgers.iter().enumerate() {
                let to_i64 = |xs: &[usize]| xs.iter().map(|&x| x as i64).collect::<Vec<_>>();
                if l.size_v != to_i64(&tally.0)
                    || l.size_e != to_i64(&tally.1)
                    || l.size_c != to_i64(&tally.2)
                {
                    self.failure = Some(format!(
                        "{:?} iter {} task {t}: ledger {:?}/{:?}/{:?} recount {:?}",
                        view.phase, view.iteration, l.size_v, l.size_e, l.size_c, tally
                    ));
                    return;
                }
            }
        }
    }
    // Brute force over owned adjacency, each undirected edge seen twice.
    fn recount(
        graphs: &[LocalGraph],
        parts: &[Part],
        p: usize,
    ) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let (mut sv, mut se2, mut sc) = (vec![0; p], vec![0; p], vec![0; p]);
        for lg in graphs {
            for l in 0..lg.num_owned() {
                let v = lg.to_global(l);
                let pv = parts[v] as usize;
                sv[pv] += 1;
                for &u in lg.neighbors(l) {
                    let pu = parts[lg.to_global(u)] as usize;
                    if pu == pv {
                        se2[pv] += 1;
                    } else {
                        sc[pv] += 1;
                    }
                }
            }
        }
        (sv, se2.into_iter().map(|x| x / 2).collect(), sc)
    }
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut steps = 0;
    for i in 0..20 {
        let (name, g) = random_graph(&mut rng, 11, 10_000);
        assert!(g.num_edges() <= 10_000);
        let p = rng.gen_range(2..=12);
        let t = [1, 2, 4, 8][i % 4];
        let config = Config::new(p, t).with_seed(i as u64);
        let graphs = split(&g, &config);
        let mut check = Check { steps: 0, failure: None };
        Engine::new(&graphs, config).unwrap().with_observer(&mut check).run().unwrap();
        if let Some(f) = check.failure {
            return outcome(false, format!("{name} p={p} T={t}: {f}"));
        }
        steps += check.steps;
    }
    outcome(true, format!("20 runs, {steps} superstep boundaries checked"))
}

struct QualityRow {
    graph: &'static str,
    p: usize,
    seed: u64,
    vimb: f64,
    eimb: f64,
    cut: f64,
    random_cut: f64,
}

fn quality_runs() -> Vec<QualityRow> {
    let graphs: [(&'static str, GlobalGraph); 3] = [
        ("rmat14", generated(&GenSpec::rmat(14, 16, 1))),
        ("er14", generated(&GenSpec::er(1 << 14, 16, 1))),
        ("grid64", grid(64)),
    ];
    let mut rows = Vec::new();
    for (name, g) in &graphs {
        for p in [4, 8, 16] {
            for seed in 0..10 {
                let config = Config::new(p, QUALITY_TASKS).with_seed(seed);
                let parts = partition_graph(g, &config).unwrap();
                let r = QualityReport::compute(g, &parts, p).unwrap();
                let rand = random_partition(g.num_vertices(), p, seed).unwrap();
                let rr = QualityReport::compute(g, &rand, p).unwrap();
                rows.push(QualityRow {
                    graph: name,
                    p,
                    seed,
                    vimb: r.vertex_imbalance,
                    eimb: r.edge_imbalance,
                    cut: r.cut_ratio,
                    random_cut: rr.cut_ratio,
                });
            }
        }
    }
    rows
}

// 3. Balance constraints met in most runs and nearly met in all.
fn constraint_satisfaction(rows: &[QualityRow]) -> Outcome {
    let worst = |r: &QualityRow| r.vimb.max(r.eimb);
    let tight = rows.iter().filter(|r| worst(r) <= 1.10).count();
    let loose = rows.iter().filter(|r| worst(r) <= 1.15).count();
    let mut per_graph = String::new();
    for name in ["rmat14", "er14", "grid64"] {
        let sel: Vec<&QualityRow> = rows.iter().filter(|r| r.graph == name).collect();
        let ok = sel.iter().filter(|r| worst(r) <= 1.10).count();
        let max = sel.iter().map(|r| worst(r)).fold(0.0, f64::max);
        per_graph.push_str(&format!(" {name}: {ok}/{} max {max:.3};", sel.len()));
    }
    let pass = tight * 10 >= rows.len() * 8 && loose == rows.len();
    outcome(
        pass,
        format!("<=1.10 in {tight}/{n}, <=1.15 in {loose}/{n};{per_graph}", n = rows.len()),
    )
}

// 4. Cut well below the random baseline, which itself follows (p-1)/p.
fn beats_random(rows: &[QualityRow]) -> Outcome {
    let beat = rows.iter().filter(|r| r.cut <= 0.6 * r.random_cut).count();
    let law = rows
        .iter()
        .filter(|r| (r.random_cut - (r.p - 1) as f64 / r.p as f64).abs() <= 0.02)
        .count();
    let mut per_graph = String::new();
    for name in ["rmat14", "er14", "grid64"] {
        let sel: Vec<&QualityRow> = rows.iter().filter(|r| r.graph == name).collect();
        let ok = sel.iter().filter(|r| r.cut <= 0.6 * r.random_cut).count();
        let worst = sel.iter().map(|r| r.cut / r.random_cut).fold(0.0, f64::max);
        per_graph.push_str(&format!(" {name}: {ok}/{} worst ratio {worst:.3};", sel.len()));
    }
    let pass = beat == rows.len() && law == rows.len();
    outcome(
        pass,
        format!(
            "cut <= 0.6 x random in {beat}/{n}, random within 0.02 of (p-1)/p in {law}/{n};{per_graph}",
            n = rows.len()
        ),
    )
}

// 5. Two cliques joined by a bridge split exactly on the bridge.
fn separable_toys() -> Outcome {
    let mut bad = Vec::new();
    let mut runs = 0;
    for k in [4, 8] {
        let g = two_cliques(k);
        for t in [1, 2, 4, 8] {
            for seed in 0..10 {
                runs += 1;
                let parts = partition_graph(&g, &Config::new(2, t).with_seed(seed)).unwrap();
                let cut = metrics::edge_cut(&g, &parts).unwrap();
                let (vi, _) = metrics::imbalance(&g, &parts, 2).unwrap();
                if cut != 1 || vi != 1.0 {
                    bad.push(format!("k={k} T={t} seed={seed} cut={cut} vimb={vi}"));
                }
            }
        }
    }
    if bad.is_empty() {
        outcome(true, format!("{runs}/{runs} runs cut 1 with equal halves"))
    } else {
        outcome(false, format!("{} of {runs} failed: {}", bad.len(), bad.join("; ")))
    }
}

// 6. Multiplier endpoints and monotonicity.
fn multiplier_endpoints() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for case in 0..100 {
        let nprocs = rng.gen_range(1..=4096usize);
        let total = rng.gen_range(1..=300usize);
        let y: f64 = rng.gen_range(0.01..4.0);
        let x: f64 = if case % 2 == 0 { y + rng.gen_range(0.0..4.0) } else { rng.gen_range(0.01..4.0) };
        let first = compute_mult(0, total, nprocs, x, y).unwrap();
        let last = compute_mult(total, total, nprocs, x, y).unwrap();
        if first != nprocs as f64 * y || last != nprocs as f64 * x {
            return outcome(
                false,
                format!("nprocs={nprocs} X={x} Y={y}: got {first} .. {last}"),
            );
        }
        if x >= y {
            let mut prev = first;
            for it in 1..=total {
                let m = compute_mult(it, total, nprocs, x, y).unwrap();
                if m < prev {
                    return outcome(false, format!("decrease at {it}/{total}: {prev} -> {m}"));
                }
                prev = m;
            }
        }
    }
    outcome(true, "100 tuples exact at both ends, monotone where X >= Y")
}

// 7. Sequential runs are byte-identical.
fn determinism() -> Outcome {
    let graphs: Vec<(&str, GlobalGraph)> = vec![
        ("rmat12", generated(&GenSpec::rmat(12, 16, 3))),
        ("er12", generated(&GenSpec::er(1 << 12, 16, 3))),
        ("randhd12", generated(&GenSpec::randhd(1 << 12, 8, 3))),
        ("grid32", grid(32)),
        ("cliques8", two_cliques(8)),
    ];
    for (name, g) in &graphs {
        for t in [1, 4] {
            let mut config = Config::new(4.min(g.num_vertices()), t).with_seed(17);
            config.sequential = true;
            let mut files = Vec::new();
            for _ in 0..3 {
                let parts = partition_graph(g, &config).unwrap();
                let mut buf = Vec::new();
                io::write_partition(&mut buf, &parts).unwrap();
                files.push(buf);
            }
            if files[0] != files[1] || files[1] != files[2] {
                return outcome(false, format!("{name} T={t}: outputs differ"));
            }
        }
    }
    outcome(true, "5 graphs x T in {1,4}, 3 runs each identical")
}

// 8. Metrics against brute force over the raw pair list.
fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    for case in 0..100 {
        let n = rng.gen_range(2..=3000usize);
        let m_raw = rng.gen_range(1..=10_000usize);
        let pairs: Vec<(usize, usize)> =
            (0..m_raw).map(|_| (rng.gen_range(0..n), rng.gen_range(0..n))).collect();
        let g = build_csr(&pairs, n).unwrap();
        let p = rng.gen_range(1..=16usize).min(n);
        let mut parts: Vec<Part> = (0..n).map(|_| rng.gen_range(0..p) as Part).collect();
        // make sure the highest label is present so the inferred count is p
        parts[0] = (p - 1) as Part;

        let (mut cut, mut per_cut, mut inner, mut sizes) = (0, vec![0usize; p], vec![0usize; p], vec![0usize; p]);
        let mut m = 0;
        for &(u, v) in &pairs {
            if u == v {
                continue;
            }
            m += 1;
            let (a, b) = (parts[u] as usize, parts[v] as usize);
            if a != b {
                cut += 1;
                per_cut[a] += 1;
                per_cut[b] += 1;
            } else {
                inner[a] += 1;
            }
        }
        for &x in &parts {
            sizes[x as usize] += 1;
        }
        let mut best = (0, 0);
        for (i, &c) in per_cut.iter().enumerate() {
            if c > best.0 {
                best = (c, i);
            }
        }
        let vi = *sizes.iter().max().unwrap() as f64 * p as f64 / n as f64;
        let ei = if m == 0 { 1.0 } else { *inner.iter().max().unwrap() as f64 * p as f64 / m as f64 };

        let got_cut = metrics::edge_cut(&g, &parts).unwrap();
        let got_max = metrics::max_part_cut(&g, &parts).unwrap();
        let got_imb = metrics::imbalance(&g, &parts, p).unwrap();
        let tally = PartTally::compute(&g, &parts, p).unwrap();
        if got_cut != cut || got_max != best || got_imb != (vi, ei) || tally.cut_edges != per_cut {
            return outcome(
                false,
                format!(
                    "case {case}: cut {got_cut} vs {cut}, max {got_max:?} vs {best:?}, imbalance {got_imb:?} vs {:?}",
                    (vi, ei)
                ),
            );
        }
    }
    outcome(true, "100 instances agree exactly")
}

// 9. Direction of the (X, Y) trade-off.
fn multiplier_trends() -> Outcome {
    let g = generated(&GenSpec::rmat(12, 16, 9));
    let run = |x: f64, y: f64| -> (f64, f64) {
        let (mut cut, mut imb) = (0.0, 0.0);
        for seed in 0..5 {
            let mut config = Config::new(8, QUALITY_TASKS).with_seed(seed);
            config.mult_end = x;
            config.mult_start = y;
            let parts = partition_graph(&g, &config).unwrap();
            let r = QualityReport::compute(&g, &parts, 8).unwrap();
            cut += r.edge_cut as f64 / 5.0;
            imb += r.vertex_imbalance.max(r.edge_imbalance) / 5.0;
        }
        (cut, imb)
    };
    let (cut_low, _) = run(0.5, 0.25);
    let (cut_high, imb_high) = run(2.0, 2.0);
    let (_, imb_low) = run(0.25, 0.1);
    let pass = cut_low <= cut_high && imb_high <= imb_low;
    outcome(
        pass,
        format!(
            "cut (0.5,0.25) {cut_low:.0} vs (2,2) {cut_high:.0}; imbalance (2,2) {imb_high:.3} vs (0.25,0.1) {imb_low:.3}"
        ),
    )
}

// 10. Generator counts, locality and diameter contrast.
fn generator_laws() -> Outcome {
    if gen::GenSpec::rmat(10, 16, 0).generate().unwrap().len() != 8192 {
        return outcome(false, "rmat scale 10 d 16 did not emit 8192 pairs");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1010);
    for _ in 0..30 {
        let scale = rng.gen_range(2..=13u32);
        let n = 1usize << scale;
        let d = rng.gen_range(1..=24usize);
        let seed = rng.gen();
        let specs = [
            (GenSpec::rmat(scale, d, seed), n * d / 2),
            (GenSpec::er(n, d, seed), n * d / 2),
            (GenSpec::randhd(n.max(2 * d + 1), d, seed), n.max(2 * d + 1) * d),
        ];
        for (spec, expected) in specs {
            let e = spec.generate().unwrap();
            if e.len() != expected {
                return outcome(false, format!("{spec:?}: {} pairs, expected {expected}", e.len()));
            }
            if e.iter().any(|&(u, v)| u >= spec.n || v >= spec.n) {
                return outcome(false, format!("{spec:?}: id out of range"));
            }
            if spec.kind == gen::GenKind::Randhd {
                if let Some(&(u, v)) = e.iter().find(|&&(u, v)| u.abs_diff(v) >= spec.d_avg) {
                    return outcome(false, format!("{spec:?}: pair ({u},{v}) not local"));
                }
            }
        }
    }
    let hd = approx_diameter(&generated(&GenSpec::randhd(1 << 14, 16, 5)), 10, 5).unwrap();
    let er = approx_diameter(&generated(&GenSpec::er(1 << 14, 16, 5)), 10, 5).unwrap();
    outcome(hd >= 10 * er, format!("counts and locality exact; diameter randhd {hd} vs er {er}"))
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(usize, bool)> = Vec::new();
    let mut run = |id: usize, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        let dt = t.elapsed();
        println!(
            "criterion {id:>2} {} {name} ({:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            dt.as_secs_f64(),
            o.detail
        );
        results.push((id, o.pass));
    };

    run(1, "ghost coherence", &mut ghost_coherence);
    run(2, "ledger honesty", &mut ledger_honesty);
    let t = Instant::now();
    let rows = quality_runs();
    let quality_time = t.elapsed();
    println!(
        "  ({} partition runs at T={QUALITY_TASKS} for criteria 3 and 4 took {:.1}s)",
        rows.len(),
        quality_time.as_secs_f64()
    );
    for r in &rows {
        println!(
            "    {:<7} p={:<2} seed={} vimb={:.3} eimb={:.3} cut={:.3} random={:.3}",
            r.graph, r.p, r.seed, r.vimb, r.eimb, r.cut, r.random_cut
        );
    }
    run(3, "constraint satisfaction", &mut || constraint_satisfaction(&rows));
    run(4, "beats random baseline", &mut || beats_random(&rows));
    run(5, "separable toys", &mut separable_toys);
    run(6, "multiplier endpoints", &mut multiplier_endpoints);
    run(7, "determinism", &mut determinism);
    run(8, "metric oracles", &mut metric_oracles);
    run(9, "multiplier trends", &mut multiplier_trends);
    run(10, "generator laws", &mut generator_laws);

    let total = start.elapsed();
    let pass = total < Duration::from_secs(15 * 60);
    println!(
        "criterion 11 {} full-suite runtime: {:.1}s (limit 900s)",
        if pass { "PASS" } else { "FAIL" },
        total.as_secs_f64()
    );

    let failed: Vec<usize> = results
        .iter()
        .filter(|r| !r.1)
        .map(|r| r.0)
        .chain((!pass).then_some(11))
        .collect();
    if failed.is_empty() {
        println!("acceptance: all 11 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
