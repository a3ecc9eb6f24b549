//! Reference partitioners: random, contiguous vertex blocks, and contiguous
//! blocks of roughly equal incident-edge mass.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::GlobalGraph;
use crate::seed::{self, Stream};
use crate::Part;

fn check(n: usize, p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::config("part count must be at least 1"));
    }
    if p > n {
        return Err(Error::config(format!("{p} parts for {n} vertices")));
    }
    Ok(())
}

/// Independent uniform part per vertex. If a part comes out empty, vertices
/// `0..p` are reassigned to parts `0..p` so every part is populated.
pub fn random_partition(n: usize, p: usize, seed: u64) -> Result<Vec<Part>> {
    check(n, p)?;
    let mut rng = seed::rng(seed, Stream::RandomBaseline, &[]);
    let mut parts: Vec<Part> = (0..n).map(|_| rng.gen_range(0..p) as Part).collect();
    let mut seen = vec![false; p];
    for &x in &parts {
        seen[x as usize] = true;
    }
    if seen.iter().any(|s| !s) {
        for (v, slot) in parts.iter_mut().take(p).enumerate() {
            *slot = v as Part;
        }
    }
    Ok(parts)
}

/// `part(v) = floor(v * p / n)`: contiguous ranges whose sizes differ by at
/// most one.
pub fn vertex_block_partition(n: usize, p: usize) -> Result<Vec<Part>> {
    check(n, p)?;
    Ok((0..n).map(|v| ((v as u128 * p as u128) / n as u128) as Part).collect())
}

/// Contiguous ranges by cumulative degree: vertex `v` goes to
/// `floor(D(v) * p / 2m)` where `D(v)` is the degree mass of the vertices
/// before it, then boundaries are adjusted so no part is skipped or left
/// empty. On a regular graph this is exactly the vertex-block partition.
pub fn edge_block_partition(g: &GlobalGraph, p: usize) -> Result<Vec<Part>> {
    let n = g.num_vertices();
    check(n, p)?;
    let mass = 2 * g.num_edges() as u128;
    if mass == 0 {
        return vertex_block_partition(n, p);
    }
    let mut parts = Vec::with_capacity(n);
    let mut before = 0u128;
    let mut prev: i64 = -1;
    for v in 0..n {
        // trailing isolated vertices see the full mass
        let raw = ((before * p as u128 / mass) as i64).min(p as i64 - 1);
        // leave at least one vertex for every later part
        let lo = prev.max(p as i64 - (n - v) as i64);
        let hi = prev + 1;
        let part = raw.clamp(lo, hi);
        parts.push(part as Part);
        prev = part;
        before += g.degree(v) as u128;
    }
    Ok(parts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_csr;
    use crate::metrics::imbalance;

    fn sizes(parts: &[Part], p: usize) -> Vec<usize> {
        let mut s = vec![0; p];
        for &x in parts {
            s[x as usize] += 1;
        }
        s
    }

    #[test]
    fn random_single_part() {
        assert_eq!(random_partition(10, 1, 3).unwrap(), vec![0; 10]);
    }

    #[test]
    fn random_is_seeded() {
        assert_eq!(random_partition(100, 4, 3).unwrap(), random_partition(100, 4, 3).unwrap());
        assert_ne!(random_partition(100, 4, 3).unwrap(), random_partition(100, 4, 4).unwrap());
    }

    #[test]
    fn random_rejects_bad_counts() {
        assert!(random_partition(10, 0, 1).is_err());
        assert!(random_partition(3, 4, 1).is_err());
    }

    #[test]
    fn random_small_n_has_no_empty_part() {
        for seed in 0..200 {
            let parts = random_partition(5, 5, seed).unwrap();
            assert!(sizes(&parts, 5).iter().all(|&s| s > 0), "seed {seed}: {parts:?}");
        }
    }

    // Each part size is Binomial(n, 1/p); 4 standard deviations is
    // sqrt(n (1/p)(1 - 1/p)) * 4 = 4 * sqrt(65536 / 16 * 15 / 16) = 247.9.
    #[test]
    fn random_part_sizes_within_four_sigma() {
        let (n, p) = (1 << 16, 16);
        let expected = n as f64 / p as f64;
        let sigma = (n as f64 * (1.0 / p as f64) * (1.0 - 1.0 / p as f64)).sqrt();
        assert!((sigma * 4.0 - 247.87).abs() < 0.01);
        let parts = random_partition(n, p, 99).unwrap();
        for s in sizes(&parts, p) {
            assert!((s as f64 - expected).abs() <= 4.0 * sigma, "size {s}");
        }
    }

    #[test]
    fn vertex_block_examples() {
        assert_eq!(vertex_block_partition(4, 2).unwrap(), vec![0, 0, 1, 1]);
        assert_eq!(sizes(&vertex_block_partition(5, 2).unwrap(), 2), vec![3, 2]);
        for n in 1..60 {
            for p in 1..=n.min(12) {
                let parts = vertex_block_partition(n, p).unwrap();
                let s = sizes(&parts, p);
                let (lo, hi) = (*s.iter().min().unwrap(), *s.iter().max().unwrap());
                assert!(hi - lo <= 1 && lo > 0);
                let g = build_csr(&[], n).unwrap();
                let (vi, _) = imbalance(&g, &parts, p).unwrap();
                assert!(vi <= 1.0 + p as f64 / n as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn edge_block_on_regular_graph_is_vertex_block() {
        for n in [6usize, 10, 17] {
            let cyc: Vec<_> = (0..n).map(|v| (v, (v + 1) % n)).collect();
            let g = build_csr(&cyc, n).unwrap();
            for p in 1..=4 {
                assert_eq!(
                    edge_block_partition(&g, p).unwrap(),
                    vertex_block_partition(n, p).unwrap()
                );
            }
        }
    }

    #[test]
    fn edge_block_isolates_star_hub() {
        let g = build_csr(&[(0, 1), (0, 2), (0, 3), (0, 4)], 5).unwrap();
        assert_eq!(edge_block_partition(&g, 2).unwrap(), vec![0, 1, 1, 1, 1]);
    }

    #[test]
    fn edge_block_never_empty() {
        // one huge hub at the front swallows several targets
        let mut e: Vec<_> = (1..40).map(|v| (0, v)).collect();
        e.extend((1..39).map(|v| (v, v + 1)));
        let g = build_csr(&e, 40).unwrap();
        for p in 1..=10 {
            let parts = edge_block_partition(&g, p).unwrap();
            assert!(parts.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
            assert!(sizes(&parts, p).iter().all(|&s| s > 0), "p={p}");
        }
    }

    #[test]
    fn edge_block_trailing_isolated_vertices() {
        let g = build_csr(&[(0, 1), (1, 2)], 8).unwrap();
        for p in 1..=8 {
            let parts = edge_block_partition(&g, p).unwrap();
            assert!(parts.iter().all(|&x| (x as usize) < p), "p={p} {parts:?}");
            assert_eq!(*parts.last().unwrap() as usize, p - 1);
        }
    }
}
