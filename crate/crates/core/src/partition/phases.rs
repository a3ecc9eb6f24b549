use super::{local_size_deltas, Engine, MoveRecord, PartLedger, Phase};
use crate::bsp::UpdateQueue;
use crate::error::Result;
use crate::graph::LocalGraph;
use crate::Part;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    VertBalance,
    VertRefine,
    EdgeBalance,
    EdgeRefine,
}

#[derive(Debug, Clone, Copy)]
struct Params {
    rule: Rule,
    mult: f64,
    r_edge: f64,
    r_cut: f64,
    record: bool,
}

impl Engine<'_> {
    /// Degree-weighted label propagation scaled by per-part vertex weights;
    /// parts whose estimated size would pass `Max_v` are excluded.
    pub fn vert_balance(&mut self, iters: usize) -> Result<()> {
        self.recount_sizes()?;
        for it in 0..iters {
            self.iterate(Rule::VertBalance, Phase::VertBalance, it)?;
        }
        Ok(())
    }

    /// Plain plurality moves that never push a destination past `Max_v`.
    pub fn vert_refine(&mut self, iters: usize) -> Result<()> {
        self.recount_sizes()?;
        for it in 0..iters {
            self.iterate(Rule::VertRefine, Phase::VertRefine, it)?;
        }
        Ok(())
    }

    /// Degree-weighted propagation scaled by a mix of edge and cut weights,
    /// subject to the vertex size guard.
    pub fn edge_balance(&mut self, iters: usize) -> Result<()> {
        self.recount_sizes()?;
        for it in 0..iters {
            self.advance_edge_schedule();
            self.iterate(Rule::EdgeBalance, Phase::EdgeBalance, it)?;
        }
        Ok(())
    }

    /// Plurality moves guarded on vertices, internal edges and cut edges.
    pub fn edge_refine(&mut self, iters: usize) -> Result<()> {
        self.recount_sizes()?;
        for it in 0..iters {
            self.iterate(Rule::EdgeRefine, Phase::EdgeRefine, it)?;
        }
        Ok(())
    }

    /// Current `(edge weight coefficient, cut weight coefficient)`.
    pub fn edge_schedule(&self) -> (f64, f64) {
        (self.r_edge, self.r_cut)
    }

    // The edge coefficient ramps from start to end over all edge-balance
    // iterations while the cut coefficient stays at start. Once the edge
    // constraint holds the edge coefficient freezes and the cut
    // coefficient ramps instead, with the same step.
    fn advance_edge_schedule(&mut self) {
        let (start, end) = (self.config.mult_start, self.config.mult_end);
        let total = (self.config.outer_iters * self.config.balance_iters) as f64;
        let step = (end - start) / total;
        let l = &self.ledgers[0];
        let max_e = l.size_e.iter().copied().max().unwrap_or(0) as f64;
        if max_e <= l.target_e {
            self.edge_frozen = true;
        }
        if self.edge_frozen {
            self.r_cut = (self.r_cut + step).min(end);
        } else {
            self.r_edge = start + step * self.edge_bal_iter as f64;
            self.r_cut = start;
        }
        self.edge_bal_iter += 1;
    }

    fn iterate(&mut self, rule: Rule, phase: Phase, iteration: usize) -> Result<()> {
        let mult = self.mult()?;
        for l in &mut self.ledgers {
            l.refresh_maxima();
            l.reset_deltas();
            for i in 0..l.num_parts() {
                match rule {
                    Rule::VertBalance => l.update_weight_v(i, mult),
                    Rule::EdgeBalance => {
                        l.update_weight_e(i, mult);
                        l.update_weight_c(i, mult);
                    }
                    Rule::VertRefine | Rule::EdgeRefine => {}
                }
            }
        }
        let params = Params {
            rule,
            mult,
            r_edge: self.r_edge,
            r_cut: self.r_cut,
            record: self.recording(),
        };

        let before = self.state.parts.clone();
        let graphs = self.graphs;
        let mut items: Vec<(&mut Vec<Part>, &mut PartLedger)> =
            self.state.parts.iter_mut().zip(self.ledgers.iter_mut()).collect();
        let snapshot = &before;
        let outs = self.runtime.run_superstep(&mut items, |t, (parts, ledger)| {
            Ok(sweep(&graphs[t], parts, &snapshot[t], ledger, params))
        })?;
        drop(items);
        let (queues, moves): (Vec<UpdateQueue>, Vec<Vec<MoveRecord>>) = outs.into_iter().unzip();

        self.exchange_and_apply(&queues, phase_label(phase))?;

        // Replace the in-loop estimates with exact deltas now that ghosts
        // reflect every task's moves.
        let p = self.config.num_parts;
        let deltas: Vec<[Vec<i64>; 3]> = graphs
            .iter()
            .zip(&before)
            .zip(&self.state.parts)
            .map(|((lg, b), a)| local_size_deltas(lg, b, a, p))
            .collect();
        let (dv, de, dc) = self.reduce_triplets(deltas)?;
        for l in &mut self.ledgers {
            l.apply_global_deltas(&dv, &de, &dc);
        }
        self.iter_tot += 1;
        self.notify(phase, iteration, mult, &moves);
        Ok(())
    }
}

fn phase_label(phase: Phase) -> &'static str {
    match phase {
        Phase::Init => "init",
        Phase::VertBalance => "vert-balance",
        Phase::VertRefine => "vert-refine",
        Phase::EdgeBalance => "edge-balance",
        Phase::EdgeRefine => "edge-refine",
    }
}

// One task's pass over its owned vertices. Neighbour labels are read from
// `seen`, the labels at the start of the superstep, so decisions within a
// task do not cascade along paths. Size deltas and weights, on the other
// hand, are updated after every move.
fn sweep(
    lg: &LocalGraph,
    parts: &mut [Part],
    seen: &[Part],
    led: &mut PartLedger,
    prm: Params,
) -> (UpdateQueue, Vec<MoveRecord>) {
    let p = led.num_parts();
    let mult = prm.mult;
    let mut raw = vec![0u32; p];
    let mut weighted = vec![0f64; p];
    let mut touched: Vec<usize> = Vec::new();
    let mut queue = UpdateQueue::new();
    let mut moves = Vec::new();

    for v in 0..lg.num_owned() {
        for &u in lg.neighbors(v) {
            let pu = seen[u] as usize;
            if raw[pu] == 0 {
                touched.push(pu);
            }
            raw[pu] += 1;
            weighted[pu] += lg.degree(u) as f64;
        }
        let x = parts[v] as usize;
        let deg = lg.degree(v) as f64;

        let fits_v = |led: &PartLedger, i: usize| led.est_v(i, mult) + 1.0 <= led.max_v;
        let score = |led: &PartLedger, i: usize| -> f64 {
            match prm.rule {
                Rule::VertBalance => {
                    if fits_v(led, i) {
                        weighted[i] * led.weight_v[i]
                    } else {
                        0.0
                    }
                }
                Rule::EdgeBalance => {
                    if fits_v(led, i) {
                        weighted[i] * (prm.r_edge * led.weight_e[i] + prm.r_cut * led.weight_c[i])
                    } else {
                        0.0
                    }
                }
                Rule::VertRefine => {
                    if i == x || fits_v(led, i) {
                        raw[i] as f64
                    } else {
                        0.0
                    }
                }
                Rule::EdgeRefine => {
                    let fits = i == x
                        || (fits_v(led, i)
                            && led.est_e(i, mult) + deg <= led.max_e
                            && led.est_c(i, mult) + deg <= led.max_c);
                    if fits {
                        raw[i] as f64
                    } else {
                        0.0
                    }
                }
            }
        };

        // Keep the current part on ties; otherwise lowest index wins.
        let score_x = score(led, x);
        let (mut best, mut best_score) = (x, score_x);
        for &i in &touched {
            if i == x {
                continue;
            }
            let s = score(led, i);
            if s > best_score || (s == best_score && best != x && i < best) {
                best = i;
                best_score = s;
            }
        }

        if best != x {
            let (nx, nw) = (raw[x] as i64, raw[best] as i64);
            let d = deg as i64;
            led.delta_v[x] -= 1;
            led.delta_v[best] += 1;
            led.delta_e[x] -= nx;
            led.delta_e[best] += nw;
            led.delta_c[x] += 2 * nx - d;
            led.delta_c[best] += d - 2 * nw;
            match prm.rule {
                Rule::VertBalance => {
                    led.update_weight_v(x, mult);
                    led.update_weight_v(best, mult);
                }
                Rule::EdgeBalance => {
                    for i in [x, best] {
                        led.update_weight_e(i, mult);
                        led.update_weight_c(i, mult);
                    }
                }
                Rule::VertRefine | Rule::EdgeRefine => {}
            }
            parts[v] = best as Part;
            queue.push(lg.to_global(v), best as Part);
            if prm.record {
                moves.push(MoveRecord {
                    vertex: lg.to_global(v),
                    from: x as Part,
                    to: best as Part,
                    score_from: score_x,
                    score_to: best_score,
                });
            }
        }

        for &i in &touched {
            raw[i] = 0;
            weighted[i] = 0.0;
        }
        touched.clear();
    }
    (queue, moves)
}
