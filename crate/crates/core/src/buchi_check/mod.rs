//! Depth-first Büchi emptiness search over the abstract zone graph.
//!
//! Both variants keep the current search path (cyan) and the fully explored
//! nodes (blue). A cycle is reported when an accepting successor covers a
//! cyan node of the same state, and the accelerated variant additionally
//! asks whether the transitions between the two can be iterated forever.
//! The search assumes that every cycle of the automaton is either entirely
//! accepting or entirely non-accepting.

mod bench;

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use bench::{aggregate, run_bench, run_bench_tba, to_csv, Aggregate, BenchRecord, Summary, CSV_HEADER};

use crate::dbm::{LuBounds, Zone};
use crate::model::{StateId, Tba, Transition};
use crate::omega_iter::{omega_iterable, IterResult};
use crate::zone_graph::{initial_node, post_zone, successors, Node};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Dfss,
    Idfss,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Dfss => "dfss",
            Mode::Idfss => "idfss",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Mode, String> {
        match s {
            "dfss" => Ok(Mode::Dfss),
            "idfss" => Ok(Mode::Idfss),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

/// What the accelerated search asks of a cyclic transition path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IterableCheck {
    /// Iterable from some valuation of the reached zone.
    FromZone,
    /// Iterable from some valuation at all. Faster and unsound in general.
    SequenceOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub seed: u64,
    pub mode: Mode,
    pub iterable_check: IterableCheck,
    /// Replay every iterability witness symbolically before trusting it.
    pub audit: bool,
}

impl SearchConfig {
    pub fn new(mode: Mode, seed: u64) -> SearchConfig {
        SearchConfig { seed, mode, iterable_check: IterableCheck::FromZone, audit: true }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    CycleFound,
    Empty,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::CycleFound => "CycleFound",
            Verdict::Empty => "Empty",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SearchStats {
    /// Nodes expanded by the search.
    pub visited_nodes: u64,
    /// Successors dropped because a blue node of the same state covers them.
    pub subsumption_skips: u64,
    pub iterability_checks: u64,
    pub result: Verdict,
}

/// How a cycle was detected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// The successor's zone covers the zone of a cyan node of its state.
    Inclusion { state: StateId },
    /// The transition path between a cyan node and its accepting successor
    /// is iterable from the successor's zone.
    Iterable { state: StateId, path: Vec<usize>, zone: Zone },
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub stats: SearchStats,
    pub witness: Option<Witness>,
}

struct Frame {
    node: Node,
    /// Transition that led here, `None` for the root.
    via: Option<usize>,
    succs: Vec<(usize, Node)>,
    next: usize,
}

/// Successors of `nd` in the order fixed by `seed`.
fn ordered_successors(nd: &Node, a: &Tba, lu: &LuBounds, seed: u64) -> Vec<(usize, Node)> {
    let mut succs = successors(nd, a, lu);
    if succs.len() > 1 {
        let mut h = DefaultHasher::new();
        seed.hash(&mut h);
        nd.hash(&mut h);
        let mut rng = ChaCha8Rng::seed_from_u64(h.finish());
        succs.shuffle(&mut rng);
    }
    succs
}

/// Executes `path` from `start` `rounds` times without abstraction and
/// reports whether the zone stayed non-empty.
pub fn replay(a: &Tba, path: &[usize], start: &Zone, rounds: usize) -> bool {
    let mut z = start.clone();
    if z.is_empty() {
        return false;
    }
    for _ in 0..rounds {
        for &k in path {
            match post_zone(&z, &a.transitions[k], None) {
                Some(next) => z = next,
                None => return false,
            }
        }
    }
    true
}

/// Runs the search on `a`.
pub fn check(a: &Tba, cfg: &SearchConfig) -> SearchOutcome {
    let lu = a.lu_bounds();
    let mut stats =
        SearchStats { visited_nodes: 0, subsumption_skips: 0, iterability_checks: 0, result: Verdict::Empty };
    let mut stack: Vec<Frame> = Vec::new();
    // Stack depths of the cyan nodes per state, increasing.
    let mut cyan: HashMap<StateId, Vec<usize>> = HashMap::new();
    let mut blue: HashMap<StateId, Vec<Zone>> = HashMap::new();

    let root = initial_node(a, &lu);
    stats.visited_nodes += 1;
    cyan.entry(root.q).or_default().push(0);
    let succs = ordered_successors(&root, a, &lu, cfg.seed);
    stack.push(Frame { node: root, via: None, succs, next: 0 });

    while let Some(top) = stack.last_mut() {
        if top.next == top.succs.len() {
            let done = stack.pop().unwrap();
            cyan.get_mut(&done.node.q).unwrap().pop();
            let zones = blue.entry(done.node.q).or_default();
            zones.retain(|z| !done.node.zone.includes(z));
            zones.push(done.node.zone);
            continue;
        }
        let (k, succ) = top.succs[top.next].clone();
        top.next += 1;
        let q = succ.q;
        let on_path = cyan.get(&q).map(Vec::as_slice).unwrap_or(&[]);

        if !a.is_accepting(q) {
            if on_path.iter().any(|&d| stack[d].node.zone == succ.zone) {
                continue;
            }
        } else if !on_path.is_empty() {
            if on_path.iter().any(|&d| succ.zone.includes(&stack[d].node.zone)) {
                stats.result = Verdict::CycleFound;
                return SearchOutcome { stats, witness: Some(Witness::Inclusion { state: q }) };
            }
            if cfg.mode == Mode::Idfss {
                let deepest = *on_path.last().unwrap();
                let mut path: Vec<usize> = stack[deepest + 1..].iter().map(|f| f.via.unwrap()).collect();
                path.push(k);
                stats.iterability_checks += 1;
                if let Some(zone) = iterability_witness(a, &path, &succ.zone, cfg) {
                    stats.result = Verdict::CycleFound;
                    return SearchOutcome { stats, witness: Some(Witness::Iterable { state: q, path, zone }) };
                }
            }
        }

        if blue.get(&q).is_some_and(|zs| zs.iter().any(|z| z.includes(&succ.zone))) {
            stats.subsumption_skips += 1;
            continue;
        }

        stats.visited_nodes += 1;
        cyan.entry(q).or_default().push(stack.len());
        let succs = ordered_successors(&succ, a, &lu, cfg.seed);
        stack.push(Frame { node: succ, via: Some(k), succs, next: 0 });
    }

    SearchOutcome { stats, witness: None }
}

/// The zone of valuations of `reached` from which `path` iterates, if the
/// configured check accepts the path.
fn iterability_witness(a: &Tba, path: &[usize], reached: &Zone, cfg: &SearchConfig) -> Option<Zone> {
    let seq: Vec<Transition> = path.iter().map(|&k| a.transitions[k].clone()).collect();
    let w = match omega_iterable(&seq, a.num_clocks()) {
        IterResult::Iterable(w) => w,
        IterResult::NotIterable => return None,
    };
    let start = match cfg.iterable_check {
        IterableCheck::FromZone => {
            let s = w.intersection(reached);
            if s.is_empty() {
                return None;
            }
            s
        }
        IterableCheck::SequenceOnly => w,
    };
    if cfg.audit {
        let n = a.num_clocks();
        assert!(
            replay(a, path, &start, n * n + 1),
            "iterability witness failed its symbolic replay"
        );
    }
    Some(start)
}
