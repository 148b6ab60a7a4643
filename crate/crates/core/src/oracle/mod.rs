//! Brute-force reference answers based on clock regions.
//!
//! Everything here enumerates regions explicitly and is only meant for small
//! constants. Each entry point refuses inputs whose region count exceeds
//! [`REGION_LIMIT`] instead of approximating.

mod region;

use std::collections::{HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

pub use region::Region;

use crate::dbm::Zone;
use crate::model::{Tba, Transition};
use crate::zone_graph::post_zone;
use crate::{Error, Result};

pub const REGION_LIMIT: f64 = 1e6;

/// The largest constant in the guards of `seq`.
pub fn max_constant(seq: &[Transition]) -> i64 {
    seq.iter().flat_map(|t| t.guard.atoms.iter().map(|a| a.constant)).max().unwrap_or(0)
}

fn guard_rail(clocks: usize, max: i64, states: usize) -> Result<()> {
    let bound = Region::count_bound(clocks, max) * states as f64;
    if bound > REGION_LIMIT {
        return Err(Error::GuardRail(format!(
            "{clocks} clocks with maximum constant {max} over {states} states may need {bound:.0} regions"
        )));
    }
    Ok(())
}

/// Regions reached from `r` by one delay followed by `t`.
fn fire(r: &Region, t: &Transition) -> Vec<Region> {
    let mut out: Vec<Region> =
        r.time_successors().into_iter().filter(|s| s.satisfies(&t.guard)).map(|s| s.reset(&t.resets)).collect();
    out.sort();
    out.dedup();
    out
}

/// The region graph of a transition sequence, with positions along it.
pub struct SequenceOracle {
    seq: Vec<Transition>,
    clocks: usize,
    max: i64,
    /// Nodes `(region, position)` known to start an infinite run.
    good: HashMap<(Region, usize), bool>,
}

impl SequenceOracle {
    /// `max` must be at least the largest guard constant of `seq`.
    pub fn new(seq: &[Transition], clocks: usize, max: i64) -> Result<SequenceOracle> {
        assert!(!seq.is_empty());
        assert!(max >= max_constant(seq));
        guard_rail(clocks, max, seq.len())?;
        Ok(SequenceOracle { seq: seq.to_vec(), clocks, max, good: HashMap::new() })
    }

    pub fn max_constant(&self) -> i64 {
        self.max
    }

    /// Whether an infinite repetition of the sequence starts in `r` at
    /// position 0.
    pub fn good(&mut self, r: &Region) -> bool {
        let key = (r.clone(), 0);
        if let Some(&g) = self.good.get(&key) {
            return g;
        }
        self.settle(vec![key.clone()]);
        self.good[&key]
    }

    /// Decides every node reachable from `roots`: explores them, then peels
    /// off nodes without successors until only nodes on or leading to
    /// cycles remain.
    fn settle(&mut self, roots: Vec<(Region, usize)>) {
        let mut succ: HashMap<(Region, usize), Vec<(Region, usize)>> = HashMap::new();
        let mut stack = roots;
        while let Some(node) = stack.pop() {
            if succ.contains_key(&node) || self.good.contains_key(&node) {
                continue;
            }
            let (r, p) = &node;
            let next: Vec<(Region, usize)> =
                fire(r, &self.seq[*p]).into_iter().map(|s| (s, (p + 1) % self.seq.len())).collect();
            stack.extend(next.iter().cloned());
            succ.insert(node, next);
        }
        // Successors already settled by an earlier call count as alive
        // exactly when they are good.
        let mut live_succs: HashMap<&(Region, usize), usize> = HashMap::new();
        let mut preds: HashMap<&(Region, usize), Vec<&(Region, usize)>> = HashMap::new();
        for (n, next) in &succ {
            let mut count = 0;
            for s in next {
                if succ.contains_key(s) {
                    count += 1;
                    preds.entry(s).or_default().push(n);
                } else if self.good[s] {
                    count += 1;
                }
            }
            live_succs.insert(n, count);
        }
        let mut dead: Vec<&(Region, usize)> = live_succs.iter().filter(|(_, &c)| c == 0).map(|(n, _)| *n).collect();
        let mut removed: HashSet<&(Region, usize)> = dead.iter().copied().collect();
        while let Some(d) = dead.pop() {
            for &p in preds.get(d).map(Vec::as_slice).unwrap_or(&[]) {
                let c = live_succs.get_mut(p).unwrap();
                *c -= 1;
                if *c == 0 && removed.insert(p) {
                    dead.push(p);
                }
            }
        }
        let verdicts: Vec<((Region, usize), bool)> =
            succ.keys().map(|n| (n.clone(), !removed.contains(n))).collect();
        self.good.extend(verdicts);
    }

    /// Whether the sequence is ω-iterable from `v` (clock `i + 1` is `v[i]`).
    pub fn iterable_from(&mut self, v: &[f64]) -> bool {
        assert_eq!(v.len(), self.clocks);
        let r = Region::of(v, self.max);
        self.good(&r)
    }

    /// Whether some valuation of `z` starts an infinite repetition.
    pub fn iterable_from_zone(&mut self, z: &Zone) -> bool {
        Region::enumerate(self.clocks, self.max)
            .into_iter()
            .any(|r| !r.to_zone().intersection(z).is_empty() && self.good(&r))
    }

    /// Whether some valuation starts an infinite repetition.
    pub fn omega_iterable(&mut self) -> bool {
        Region::enumerate(self.clocks, self.max).into_iter().any(|r| self.good(&r))
    }
}

/// Region-graph verdict on ω-iterability of `seq` over clocks `1..=clocks`.
pub fn oracle_omega_iterable(seq: &[Transition], clocks: usize) -> Result<bool> {
    Ok(SequenceOracle::new(seq, clocks, max_constant(seq))?.omega_iterable())
}

/// Region-graph verdict on ω-iterability of `seq` from the valuation `v`.
pub fn oracle_iterable_from(seq: &[Transition], v: &[f64]) -> Result<bool> {
    Ok(SequenceOracle::new(seq, v.len(), max_constant(seq))?.iterable_from(v))
}

/// Independent route: `seq` is ω-iterable iff it can be executed as many
/// times in a row as there are regions. Iterates the exact zone post of the
/// sequence from the set of all valuations; the zones form a decreasing
/// chain, so a repetition settles the answer early.
pub fn zone_iteration_omega_iterable(seq: &[Transition], clocks: usize) -> Result<bool> {
    let max = max_constant(seq);
    guard_rail(clocks, max, 1)?;
    let rounds = Region::enumerate(clocks, max).len();
    let mut z = Zone::universe(clocks);
    for _ in 0..rounds {
        let mut next = z.clone();
        for t in seq {
            match post_zone(&next, t, None) {
                Some(n) => next = n,
                None => return Ok(false),
            }
        }
        if next == z {
            return Ok(true);
        }
        z = next;
    }
    Ok(true)
}

/// Region-graph Büchi emptiness: whether `a` has a run with infinitely many
/// transitions through accepting states. Only the reachable part of the
/// region graph is built, and the build stops past [`REGION_LIMIT`] nodes.
pub fn oracle_buchi_nonempty(a: &Tba) -> Result<bool> {
    let n = a.num_clocks();
    let max = a.max_constant();

    let mut graph: DiGraph<(usize, Region), ()> = DiGraph::new();
    let mut index: HashMap<(usize, Region), NodeIndex> = HashMap::new();
    let start = (a.initial, Region::zero(n, max));
    index.insert(start.clone(), graph.add_node(start.clone()));
    let mut stack = vec![start];
    while let Some(node) = stack.pop() {
        let from = index[&node];
        for &k in a.outgoing(node.0) {
            let t = &a.transitions[k];
            for r in fire(&node.1, t) {
                let target = (t.dst, r);
                let to = match index.get(&target) {
                    Some(&i) => i,
                    None => {
                        let i = graph.add_node(target.clone());
                        index.insert(target.clone(), i);
                        stack.push(target);
                        i
                    }
                };
                graph.update_edge(from, to, ());
            }
        }
        if graph.node_count() as f64 > REGION_LIMIT {
            return Err(Error::GuardRail(format!("more than {REGION_LIMIT:.0} region nodes")));
        }
    }

    Ok(tarjan_scc(&graph).into_iter().any(|scc| {
        let cyclic = scc.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        cyclic && scc.iter().any(|&i| a.is_accepting(graph[i].0))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, Cmp};

    fn t(atoms: Vec<(usize, Cmp, i64)>, resets: Vec<usize>) -> Transition {
        Transition::new(0, 0)
            .guard(atoms.into_iter().map(|(c, o, k)| Atom::new(c, o, k)).collect())
            .reset(resets)
    }

    #[test]
    fn upper_guard_with_reset_iterates() {
        let seq = [t(vec![(1, Cmp::Le, 5)], vec![1])];
        assert!(oracle_omega_iterable(&seq, 1).unwrap());
        assert!(zone_iteration_omega_iterable(&seq, 1).unwrap());
        assert!(oracle_iterable_from(&seq, &[5.0]).unwrap());
        assert!(!oracle_iterable_from(&seq, &[5.5]).unwrap());
    }

    #[test]
    fn forced_delay_against_bounded_clock() {
        let seq = [t(vec![(1, Cmp::Ge, 1), (2, Cmp::Le, 2)], vec![1])];
        assert!(!oracle_omega_iterable(&seq, 2).unwrap());
        assert!(!zone_iteration_omega_iterable(&seq, 2).unwrap());
    }

    #[test]
    fn exact_unit_loop() {
        let seq = [t(vec![(1, Cmp::Eq, 1)], vec![1])];
        assert!(oracle_iterable_from(&seq, &[0.5]).unwrap());
        assert!(oracle_iterable_from(&seq, &[1.0]).unwrap());
        assert!(!oracle_iterable_from(&seq, &[1.5]).unwrap());
    }

    #[test]
    fn guard_rail_refuses_large_constants() {
        let seq = [t(vec![(1, Cmp::Le, 808), (2, Cmp::Le, 808), (3, Cmp::Le, 808)], vec![1])];
        assert!(matches!(oracle_omega_iterable(&seq, 3), Err(Error::GuardRail(_))));
    }

    #[test]
    fn buchi_self_loop() {
        let names = vec!["x".to_string()];
        let a = Tba::new(names.clone(), vec!["q".into()], vec![true], 0, vec![t(vec![(1, Cmp::Eq, 1)], vec![1])]);
        assert!(oracle_buchi_nonempty(&a).unwrap());
        let b = Tba::new(names, vec!["q".into()], vec![false], 0, vec![t(vec![(1, Cmp::Eq, 1)], vec![1])]);
        assert!(!oracle_buchi_nonempty(&b).unwrap());
    }
}
