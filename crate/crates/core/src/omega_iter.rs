//! Deciding whether a transition sequence can be iterated forever, and from
//! which valuations.
//!
//! A cheap syntactic pass settles many sequences outright. The remaining ones
//! are decided by repeatedly squaring the transformation graph of the
//! sequence until the relation becomes empty, stabilizes, or exceeds the
//! quadratic bound in the number of active clocks.

use std::collections::BTreeSet;
use std::fmt;

use crate::dbm::Zone;
use crate::model::{Atom, ClockId, Cmp, Guard, Transition};
use crate::transform_graph::TransGraph;

/// Syntactic conditions under which a sequence is never iterable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Obstacle {
    /// An unreset clock has an upper and a lower guard that cannot both hold.
    ConflictingBounds { clock: ClockId },
    /// A reset clock needs a positive delay while an unreset clock is
    /// bounded from above.
    ForcedDelayAgainstUpperBound { reset: ClockId, bounded: ClockId },
    /// A reset clock needs some delay while an unreset clock is pinned to a
    /// single value.
    ForcedDelayAgainstPinnedClock { reset: ClockId, pinned: ClockId },
}

impl Obstacle {
    /// 1-based index of the condition, in the order of the variants.
    pub fn condition(self) -> u8 {
        match self {
            Obstacle::ConflictingBounds { .. } => 1,
            Obstacle::ForcedDelayAgainstUpperBound { .. } => 2,
            Obstacle::ForcedDelayAgainstPinnedClock { .. } => 3,
        }
    }
}

impl Obstacle {
    /// The explanation with clock `i` named `names[i - 1]`.
    pub fn describe(&self, names: &[String]) -> String {
        let name = |c: usize| names.get(c.wrapping_sub(1)).cloned().unwrap_or_else(|| format!("#{c}"));
        match *self {
            Obstacle::ConflictingBounds { clock } => {
                format!("condition 1: unreset clock {} has conflicting bounds", name(clock))
            }
            Obstacle::ForcedDelayAgainstUpperBound { reset, bounded } => format!(
                "condition 2: reset clock {} forces a positive delay while unreset clock {} is bounded above",
                name(reset),
                name(bounded)
            ),
            Obstacle::ForcedDelayAgainstPinnedClock { reset, pinned } => format!(
                "condition 3: reset clock {} forces a delay while unreset clock {} is pinned",
                name(reset),
                name(pinned)
            ),
        }
    }
}

impl fmt::Display for Obstacle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe(&[]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreVerdict {
    NotIterable(Obstacle),
    /// No obstacle and no reset clock with a positive lower guard.
    Iterable,
    /// The sequence with every guard on an unreset clock removed; it is
    /// iterable iff the original one is.
    Reduced(Vec<Transition>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IterResult {
    NotIterable,
    /// All valuations from which the sequence is ω-iterable; never empty.
    Iterable(Zone),
}

impl IterResult {
    pub fn is_iterable(&self) -> bool {
        matches!(self, IterResult::Iterable(_))
    }

    pub fn zone(&self) -> Option<&Zone> {
        match self {
            IterResult::Iterable(z) => Some(z),
            IterResult::NotIterable => None,
        }
    }
}

/// How the squaring loop ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopEnd {
    /// Not run: the syntactic pass already refuted the sequence.
    Skipped,
    /// The relation of some power became empty.
    EmptyRelation,
    /// Two consecutive powers agree on both projections.
    Stable,
    /// The bound was reached without stabilizing.
    BoundExceeded,
}

/// Full trace of a decision, with work counters.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub pre: PreVerdict,
    pub result: IterResult,
    pub end: LoopEnd,
    /// Proper clocks taking part in the squaring loop.
    pub active_clocks: usize,
    /// Compositions spent building the graph of the tested sequence.
    pub sequence_compositions: usize,
    /// Squarings performed by the loop.
    pub squarings: usize,
    /// Extra compositions that map the zone of a reduced sequence back to
    /// the original one.
    pub expansion_compositions: usize,
}

impl Analysis {
    /// Compositions of the decision procedure proper.
    pub fn compositions(&self) -> usize {
        self.sequence_compositions + self.squarings
    }

    pub fn total_compositions(&self) -> usize {
        self.compositions() + self.expansion_compositions
    }
}

fn guard_clocks(seq: &[Transition]) -> BTreeSet<ClockId> {
    seq.iter().flat_map(|t| t.guard.clocks()).collect()
}

fn reset_clocks(seq: &[Transition]) -> BTreeSet<ClockId> {
    seq.iter().flat_map(|t| t.resets.iter().copied()).collect()
}

fn atoms(seq: &[Transition]) -> impl Iterator<Item = &Atom> {
    seq.iter().flat_map(|t| t.guard.atoms.iter())
}

/// Upper guards `x ≼ d` as `(d, strict)`, lower guards `x ≽ c` likewise.
fn bounds_of(seq: &[Transition], clock: ClockId) -> (Vec<(i64, bool)>, Vec<(i64, bool)>) {
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for a in atoms(seq).filter(|a| a.clock == clock) {
        match a.cmp {
            Cmp::Lt => upper.push((a.constant, true)),
            Cmp::Le => upper.push((a.constant, false)),
            Cmp::Eq => {
                upper.push((a.constant, false));
                lower.push((a.constant, false));
            }
            Cmp::Ge => lower.push((a.constant, false)),
            Cmp::Gt => lower.push((a.constant, true)),
        }
    }
    (upper, lower)
}

/// The syntactic pass.
pub fn preprocess(seq: &[Transition]) -> PreVerdict {
    assert!(!seq.is_empty(), "a sequence needs at least one transition");
    let guarded = guard_clocks(seq);
    let reset = reset_clocks(seq);
    let unreset: Vec<ClockId> = guarded.iter().copied().filter(|c| !reset.contains(c)).collect();

    for &y in &unreset {
        let (upper, lower) = bounds_of(seq, y);
        for &(d, ds) in &upper {
            for &(c, cs) in &lower {
                if d < c || (d == c && (ds || cs)) {
                    return PreVerdict::NotIterable(Obstacle::ConflictingBounds { clock: y });
                }
            }
        }
    }

    let forcing: Vec<ClockId> = reset
        .iter()
        .copied()
        .filter(|&x| bounds_of(seq, x).1.iter().any(|&(c, _)| c > 0))
        .collect();
    for &x in &forcing {
        if let Some(&y) = unreset.iter().find(|&&y| !bounds_of(seq, y).0.is_empty()) {
            return PreVerdict::NotIterable(Obstacle::ForcedDelayAgainstUpperBound { reset: x, bounded: y });
        }
    }

    for &x in &reset {
        let strict_zero = atoms(seq).any(|a| a.clock == x && a.cmp == Cmp::Gt && a.constant == 0);
        if !strict_zero {
            continue;
        }
        for &y in &unreset {
            let (upper, lower) = bounds_of(seq, y);
            let pinned = upper.iter().any(|&(d, ds)| !ds && lower.iter().any(|&(c, cs)| !cs && c == d));
            if pinned {
                return PreVerdict::NotIterable(Obstacle::ForcedDelayAgainstPinnedClock { reset: x, pinned: y });
            }
        }
    }

    if forcing.is_empty() {
        return PreVerdict::Iterable;
    }
    let reduced = seq
        .iter()
        .map(|t| {
            let mut t = t.clone();
            t.guard = Guard::new(t.guard.atoms.iter().copied().filter(|a| reset.contains(&a.clock)).collect());
            t
        })
        .collect();
    PreVerdict::Reduced(reduced)
}

/// Renames the clocks of `seq` onto `1..=k` following `order`.
fn compact(seq: &[Transition], order: &[ClockId]) -> Vec<Transition> {
    let pos = |c: ClockId| order.iter().position(|&o| o == c).expect("clock not in the active set") + 1;
    seq.iter()
        .map(|t| {
            let mut t = t.clone();
            for a in &mut t.guard.atoms {
                a.clock = pos(a.clock);
            }
            t.resets = t.resets.iter().map(|&c| pos(c)).collect();
            t
        })
        .collect()
}

/// Embeds a zone over the clocks `order` into a zone over `1..=clocks`.
fn embed(z: &Zone, order: &[ClockId], clocks: usize) -> Zone {
    if z.is_empty() {
        return Zone::empty(clocks + 1);
    }
    let mut out = Zone::universe(clocks);
    let id = |i: usize| if i == 0 { 0 } else { order[i - 1] };
    for i in 0..z.dim() {
        for j in 0..z.dim() {
            if i != j {
                out.tighten_raw(id(i), id(j), z.get(i, j));
            }
        }
    }
    out.canonicalize()
}

struct Squared {
    graph: TransGraph,
    end: LoopEnd,
    squarings: usize,
}

/// Squares `g` while `2^k` is below `n^2`; see [`LoopEnd`].
fn square(g: TransGraph, n: usize) -> Squared {
    if g.is_empty() {
        return Squared { graph: g, end: LoopEnd::EmptyRelation, squarings: 0 };
    }
    let bound = (n * n) as u64;
    let mut power = g;
    let mut squarings = 0;
    let mut k: u32 = 0;
    loop {
        let next = power.compose(&power);
        squarings += 1;
        if next.is_empty() {
            return Squared { graph: next, end: LoopEnd::EmptyRelation, squarings };
        }
        if next.bump_eq(&power) {
            return Squared { graph: power, end: LoopEnd::Stable, squarings };
        }
        if (1u64 << k) >= bound {
            return Squared { graph: next, end: LoopEnd::BoundExceeded, squarings };
        }
        power = next;
        k += 1;
    }
}

/// Runs the test on `seq` over clocks `1..=clocks`.
pub fn analyze(seq: &[Transition], clocks: usize) -> Analysis {
    let pre = preprocess(seq);
    let mut out = Analysis {
        pre: pre.clone(),
        result: IterResult::NotIterable,
        end: LoopEnd::Skipped,
        active_clocks: 0,
        sequence_compositions: 0,
        squarings: 0,
        expansion_compositions: 0,
    };
    let tested: &[Transition] = match &pre {
        PreVerdict::NotIterable(_) => return out,
        PreVerdict::Iterable => seq,
        PreVerdict::Reduced(r) => r,
    };

    let active: Vec<ClockId> = guard_clocks(tested).union(&reset_clocks(tested)).copied().collect();
    let n = active.len();
    out.active_clocks = n;
    let (g, built) = TransGraph::of_sequence_counted(&compact(tested, &active), n);
    out.sequence_compositions = built;
    let sq = square(g, n);
    out.squarings = sq.squarings;
    out.end = sq.end;
    if sq.end != LoopEnd::Stable {
        return out;
    }
    let w_small = sq.graph.left();

    let w = match &pre {
        PreVerdict::Reduced(_) => {
            // Valuations that reach the reduced sequence's zone through one
            // pass of the original sequence. Clocks dropped by the reduction
            // only carry lower guards, which later passes keep satisfying.
            let all: Vec<ClockId> = guard_clocks(seq).union(&reset_clocks(seq)).copied().collect();
            let (full, built) = TransGraph::of_sequence_counted(&compact(seq, &all), all.len());
            let lifted = embed(&w_small, &positions(&active, &all), all.len());
            out.expansion_compositions = built + 1;
            let w = full.restrict_right(&lifted).left();
            embed(&w, &all, clocks)
        }
        _ => embed(&w_small, &active, clocks),
    };
    if !w.is_empty() {
        out.result = IterResult::Iterable(w);
    }
    out
}

/// Positions (1-based) of the clocks of `sub` inside `all`.
fn positions(sub: &[ClockId], all: &[ClockId]) -> Vec<ClockId> {
    sub.iter().map(|c| all.iter().position(|a| a == c).unwrap() + 1).collect()
}

/// The zone of valuations from which `seq` can be iterated forever.
pub fn omega_iterable(seq: &[Transition], clocks: usize) -> IterResult {
    analyze(seq, clocks).result
}

/// Whether `seq` can be iterated forever from some valuation of `z`.
pub fn iterable_from(seq: &[Transition], z: &Zone) -> bool {
    match omega_iterable(seq, z.clocks()) {
        IterResult::Iterable(w) => !w.intersection(z).is_empty(),
        IterResult::NotIterable => false,
    }
}
