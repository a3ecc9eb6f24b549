//! Global part sizes, per-iteration deltas, and the balance weights derived
//! from them. Every task holds its own copy: the sizes are replicated (kept
//! identical through all-reduce), the deltas and weights are task-local.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::LocalGraph;
use crate::Part;

/// Damping factor applied to a task's local deltas when estimating global
/// part growth. Linear in `iter_tot`, from `nprocs * start` at iteration 0
/// to `nprocs * end` at `total_iters`.
pub fn compute_mult(
    iter_tot: usize,
    total_iters: usize,
    nprocs: usize,
    end: f64,
    start: f64,
) -> Result<f64> {
    if total_iters == 0 {
        return Err(Error::config("total iteration count must be positive"));
    }
    if nprocs == 0 {
        return Err(Error::config("task count must be at least 1"));
    }
    if iter_tot > total_iters {
        return Err(Error::config(format!(
            "iteration {iter_tot} beyond the total of {total_iters}"
        )));
    }
    let nprocs = nprocs as f64;
    // The endpoint is returned directly: start + (end - start) can round
    // away from `end`.
    if iter_tot == total_iters {
        return Ok(nprocs * end);
    }
    let frac = iter_tot as f64 / total_iters as f64;
    Ok(nprocs * ((end - start) * frac + start))
}

/// `max(target / estimate - 1, 0)`, with the estimate floored at one unit so
/// an empty part gets a large finite weight instead of a division by zero.
#[inline]
pub fn balance_weight(target: f64, estimate: f64) -> f64 {
    (target / estimate.max(1.0) - 1.0).max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartLedger {
    /// Global vertices per part.
    pub size_v: Vec<i64>,
    /// Global edges with both endpoints in the part.
    pub size_e: Vec<i64>,
    /// Global cut edges incident to the part (a cut edge counts for both sides).
    pub size_c: Vec<i64>,
    /// This task's changes during the current iteration.
    pub delta_v: Vec<i64>,
    pub delta_e: Vec<i64>,
    pub delta_c: Vec<i64>,
    pub weight_v: Vec<f64>,
    pub weight_e: Vec<f64>,
    pub weight_c: Vec<f64>,
    pub max_v: f64,
    pub max_e: f64,
    pub max_c: f64,
    /// Target maximum vertices per part, `(1 + ratio) * n / p`.
    pub target_v: f64,
    /// Target maximum edges per part, `(1 + ratio) * m / p`.
    pub target_e: f64,
}

impl PartLedger {
    pub fn new(num_parts: usize, target_v: f64, target_e: f64) -> Self {
        PartLedger {
            size_v: vec![0; num_parts],
            size_e: vec![0; num_parts],
            size_c: vec![0; num_parts],
            delta_v: vec![0; num_parts],
            delta_e: vec![0; num_parts],
            delta_c: vec![0; num_parts],
            weight_v: vec![0.0; num_parts],
            weight_e: vec![0.0; num_parts],
            weight_c: vec![0.0; num_parts],
            max_v: target_v,
            max_e: target_e,
            max_c: 0.0,
            target_v,
            target_e,
        }
    }

    pub fn num_parts(&self) -> usize {
        self.size_v.len()
    }

    #[inline]
    pub fn est_v(&self, i: usize, mult: f64) -> f64 {
        self.size_v[i] as f64 + mult * self.delta_v[i] as f64
    }

    #[inline]
    pub fn est_e(&self, i: usize, mult: f64) -> f64 {
        self.size_e[i] as f64 + mult * self.delta_e[i] as f64
    }

    #[inline]
    pub fn est_c(&self, i: usize, mult: f64) -> f64 {
        self.size_c[i] as f64 + mult * self.delta_c[i] as f64
    }

    /// `Max_v`, `Max_e`, `Max_c` from the current global sizes.
    pub fn refresh_maxima(&mut self) {
        let max = |s: &[i64]| s.iter().copied().max().unwrap_or(0) as f64;
        self.max_v = max(&self.size_v).max(self.target_v);
        self.max_e = max(&self.size_e).max(self.target_e);
        self.max_c = max(&self.size_c);
    }

    pub fn update_weight_v(&mut self, i: usize, mult: f64) {
        self.weight_v[i] = balance_weight(self.target_v, self.est_v(i, mult));
    }

    pub fn update_weight_e(&mut self, i: usize, mult: f64) {
        self.weight_e[i] = balance_weight(self.target_e, self.est_e(i, mult));
    }

    pub fn update_weight_c(&mut self, i: usize, mult: f64) {
        self.weight_c[i] = balance_weight(self.max_c, self.est_c(i, mult));
    }

    pub fn reset_deltas(&mut self) {
        self.delta_v.fill(0);
        self.delta_e.fill(0);
        self.delta_c.fill(0);
    }

    /// Folds all-reduced deltas into the sizes and clears the local deltas.
    pub fn apply_global_deltas(&mut self, dv: &[i64], de: &[i64], dc: &[i64]) {
        for (s, d) in self.size_v.iter_mut().zip(dv) {
            *s += d;
        }
        for (s, d) in self.size_e.iter_mut().zip(de) {
            *s += d;
        }
        for (s, d) in self.size_c.iter_mut().zip(dc) {
            *s += d;
        }
        self.reset_deltas();
    }

    pub fn set_sizes(&mut self, sv: Vec<i64>, se: Vec<i64>, sc: Vec<i64>) {
        self.size_v = sv;
        self.size_e = se;
        self.size_c = sc;
        self.reset_deltas();
    }
}

/// Per-part `(vertices, internal edges, cut incidences)` over one task's
/// share of the graph. Summed over all tasks this gives the global sizes:
/// owned vertices count on their owner, and each edge is counted by the
/// lower-indexed of its endpoint owners.
pub fn local_sizes(lg: &LocalGraph, parts: &[Part], num_parts: usize) -> [Vec<i64>; 3] {
    let mut sv = vec![0i64; num_parts];
    let mut se = vec![0i64; num_parts];
    let mut sc = vec![0i64; num_parts];
    for a in 0..lg.num_owned() {
        sv[parts[a] as usize] += 1;
        for &b in lg.neighbors(a) {
            if counts_edge(lg, a, b) {
                add_edge(&mut se, &mut sc, parts[a], parts[b], 1);
            }
        }
    }
    [sv, se, sc]
}

/// Exact change in local sizes between two assignments of the same local
/// slots. Used at the end of every superstep to replace the in-loop
/// estimates, which cannot see concurrent moves on other tasks.
pub fn local_size_deltas(
    lg: &LocalGraph,
    before: &[Part],
    after: &[Part],
    num_parts: usize,
) -> [Vec<i64>; 3] {
    let mut dv = vec![0i64; num_parts];
    let mut de = vec![0i64; num_parts];
    let mut dc = vec![0i64; num_parts];
    for a in 0..lg.num_owned() {
        let (pa0, pa1) = (before[a], after[a]);
        if pa0 != pa1 {
            dv[pa0 as usize] -= 1;
            dv[pa1 as usize] += 1;
        }
        for &b in lg.neighbors(a) {
            let (pb0, pb1) = (before[b], after[b]);
            if (pa0 == pa1 && pb0 == pb1) || !counts_edge(lg, a, b) {
                continue;
            }
            add_edge(&mut de, &mut dc, pa0, pb0, -1);
            add_edge(&mut de, &mut dc, pa1, pb1, 1);
        }
    }
    [dv, de, dc]
}

#[inline]
fn counts_edge(lg: &LocalGraph, a: usize, b: usize) -> bool {
    if lg.is_owned(b) {
        a < b
    } else {
        lg.task() < lg.owner_of(b)
    }
}

#[inline]
fn add_edge(se: &mut [i64], sc: &mut [i64], pa: Part, pb: Part, sign: i64) {
    if pa == pb {
        se[pa as usize] += sign;
    } else {
        sc[pa as usize] += sign;
        sc[pb as usize] += sign;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mult_endpoints_and_midpoint() {
        assert_eq!(compute_mult(0, 45, 4, 1.0, 0.25).unwrap(), 1.0);
        assert_eq!(compute_mult(45, 45, 4, 1.0, 0.25).unwrap(), 4.0);
        assert_eq!(compute_mult(10, 20, 8, 1.0, 0.25).unwrap(), 5.0);
    }

    #[test]
    fn mult_rejects_zero_total() {
        assert!(matches!(compute_mult(0, 0, 1, 1.0, 0.25), Err(Error::Config(_))));
        assert!(compute_mult(46, 45, 1, 1.0, 0.25).is_err());
    }

    #[test]
    fn weight_clamps_at_zero() {
        assert_eq!(balance_weight(3.3, 6.0), 0.0);
        assert_eq!(balance_weight(3.3, 3.3), 0.0);
        assert!((balance_weight(4.0, 2.0) - 1.0).abs() < 1e-12);
        // empty part: estimate floored at 1
        assert!((balance_weight(3.3, 0.0) - 2.3).abs() < 1e-12);
    }

    #[test]
    fn overweight_part_gets_zero_weight() {
        let mut l = PartLedger::new(2, 3.3, 10.0);
        l.size_v = vec![3, 3];
        l.delta_v = vec![1, -1];
        l.update_weight_v(0, 1.0);
        l.update_weight_v(1, 1.0);
        assert_eq!(l.weight_v[0], 0.0);
        assert!(l.weight_v[1] > 0.0);
    }
}
