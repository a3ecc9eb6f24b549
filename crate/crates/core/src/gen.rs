//! Synthetic graph generators: R-MAT, Erdős–Rényi and a high-diameter
//! random graph whose edges only join ID-nearby vertices.
//!
//! Output is a raw pair list; self-pairs and duplicates pass through and
//! are handled by [`build_csr`](crate::graph::build_csr). Edges are drawn in
//! fixed-size blocks, each from its own derived seed, so parallel and
//! sequential generation produce the same list.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Stream};

const EDGE_BLOCK: usize = 1 << 14;
const VERTEX_BLOCK: usize = 1 << 10;

/// Graph500 R-MAT quadrant probabilities.
pub const RMAT_DEFAULT: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenKind {
    Rmat,
    Er,
    Randhd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub d_avg: usize,
    /// R-MAT quadrant probabilities `(a, b, c, d)`; ignored by other kinds.
    pub probs: [f64; 4],
    pub seed: u64,
}

impl GenSpec {
    pub fn rmat(scale: u32, d_avg: usize, seed: u64) -> Self {
        GenSpec { kind: GenKind::Rmat, n: 1usize << scale, d_avg, probs: RMAT_DEFAULT, seed }
    }

    pub fn er(n: usize, d_avg: usize, seed: u64) -> Self {
        GenSpec { kind: GenKind::Er, n, d_avg, probs: RMAT_DEFAULT, seed }
    }

    pub fn randhd(n: usize, d_avg: usize, seed: u64) -> Self {
        GenSpec { kind: GenKind::Randhd, n, d_avg, probs: RMAT_DEFAULT, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::config(format!("need at least 2 vertices, got {}", self.n)));
        }
        if self.d_avg < 1 {
            return Err(Error::config("average degree must be at least 1"));
        }
        match self.kind {
            GenKind::Rmat => {
                if !self.n.is_power_of_two() {
                    return Err(Error::config(format!(
                        "R-MAT vertex count must be a power of two, got {}",
                        self.n
                    )));
                }
                if self.probs.iter().any(|&p| !(0.0..=1.0).contains(&p))
                    || (self.probs.iter().sum::<f64>() - 1.0).abs() > 1e-9
                {
                    return Err(Error::config(format!(
                        "R-MAT probabilities {:?} must be in [0, 1] and sum to 1",
                        self.probs
                    )));
                }
            }
            GenKind::Er => {}
            GenKind::Randhd => {
                if self.n <= 2 * self.d_avg {
                    return Err(Error::config(format!(
                        "randhd needs n > 2 * d_avg ({} <= {})",
                        self.n,
                        2 * self.d_avg
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of pairs the generator emits.
    pub fn num_pairs(&self) -> usize {
        match self.kind {
            GenKind::Rmat | GenKind::Er => self.n * self.d_avg / 2,
            GenKind::Randhd => self.n * self.d_avg,
        }
    }

    pub fn generate(&self) -> Result<Vec<(usize, usize)>> {
        self.generate_with(true)
    }

    /// As [`generate`](Self::generate); `parallel = false` forces a single
    /// thread. Both produce identical output.
    pub fn generate_with(&self, parallel: bool) -> Result<Vec<(usize, usize)>> {
        self.validate()?;
        Ok(match self.kind {
            GenKind::Rmat => {
                let scale = self.n.trailing_zeros();
                let [a, b, c, _] = self.probs;
                edge_blocks(self.num_pairs(), self.seed, 0, parallel, |rng| {
                    rmat_pair(rng, scale, a, b, c)
                })
            }
            GenKind::Er => {
                let n = self.n;
                edge_blocks(self.num_pairs(), self.seed, 1, parallel, |rng| {
                    let u = rng.gen_range(0..n);
                    let mut v = rng.gen_range(0..n - 1);
                    if v >= u {
                        v += 1;
                    }
                    (u, v)
                })
            }
            GenKind::Randhd => randhd(self.n, self.d_avg, self.seed, parallel),
        })
    }
}

pub fn gen_rmat(spec: &GenSpec) -> Result<Vec<(usize, usize)>> {
    if spec.kind != GenKind::Rmat {
        return Err(Error::config("gen_rmat called with a non-rmat spec"));
    }
    spec.generate()
}

pub fn gen_er(n: usize, d_avg: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    GenSpec::er(n, d_avg, seed).generate()
}

pub fn gen_randhd(n: usize, d_avg: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    GenSpec::randhd(n, d_avg, seed).generate()
}

fn rmat_pair(rng: &mut impl Rng, scale: u32, a: f64, b: f64, c: f64) -> (usize, usize) {
    let (mut u, mut v) = (0usize, 0usize);
    for _ in 0..scale {
        let r: f64 = rng.gen();
        let (bu, bv) = if r < a {
            (0, 0)
        } else if r < a + b {
            (0, 1)
        } else if r < a + b + c {
            (1, 0)
        } else {
            (1, 1)
        };
        u = (u << 1) | bu;
        v = (v << 1) | bv;
    }
    (u, v)
}

fn edge_blocks<F>(total: usize, seed: u64, tag: u64, parallel: bool, draw: F) -> Vec<(usize, usize)>
where
    F: Fn(&mut rand_chacha::ChaCha8Rng) -> (usize, usize) + Sync,
{
    let blocks = total.div_ceil(EDGE_BLOCK);
    let block = |b: usize| {
        let mut rng = seed::rng(seed, Stream::Generator, &[tag, b as u64]);
        let len = EDGE_BLOCK.min(total - b * EDGE_BLOCK);
        (0..len).map(|_| draw(&mut rng)).collect::<Vec<_>>()
    };
    if parallel {
        (0..blocks).into_par_iter().flat_map_iter(block).collect()
    } else {
        (0..blocks).flat_map(block).collect()
    }
}

// For vertex k, d_avg partners uniform on the open interval
// (k - d_avg, k + d_avg), clamped to [0, n).
fn randhd(n: usize, d_avg: usize, seed: u64, parallel: bool) -> Vec<(usize, usize)> {
    let blocks = n.div_ceil(VERTEX_BLOCK);
    let block = |b: usize| {
        let mut rng = seed::rng(seed, Stream::Generator, &[2, b as u64]);
        let end = n.min((b + 1) * VERTEX_BLOCK);
        let mut out = Vec::with_capacity((end - b * VERTEX_BLOCK) * d_avg);
        for k in b * VERTEX_BLOCK..end {
            let lo = k.saturating_sub(d_avg - 1);
            let hi = (k + d_avg - 1).min(n - 1);
            for _ in 0..d_avg {
                out.push((k, rng.gen_range(lo..=hi)));
            }
        }
        out
    };
    if parallel {
        (0..blocks).into_par_iter().flat_map_iter(block).collect()
    } else {
        (0..blocks).flat_map(block).collect()
    }
}
