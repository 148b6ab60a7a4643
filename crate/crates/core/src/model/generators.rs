//! Benchmark networks and the property automata checked against them.

use std::fmt;
use std::str::FromStr;

use super::{Atom, Automaton, ClockId, Cmp, Network, State, Transition};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Csma,
    Fischer,
    Fddi,
    TrainGate,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Csma, Family::Fischer, Family::Fddi, Family::TrainGate];

    pub fn name(self) -> &'static str {
        match self {
            Family::Csma => "csma",
            Family::Fischer => "fischer",
            Family::Fddi => "fddi",
            Family::TrainGate => "traingate",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family, Error> {
        match s.to_ascii_lowercase().as_str() {
            "csma" | "csmacd" | "csma/cd" => Ok(Family::Csma),
            "fischer" => Ok(Family::Fischer),
            "fddi" => Ok(Family::Fddi),
            "traingate" | "train-gate" | "train_gate" => Ok(Family::TrainGate),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

/// Timing constants and variant switches shared by the generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    /// CSMA/CD message transmission time.
    pub l: i64,
    /// CSMA/CD bus propagation delay.
    pub s: i64,
    /// CSMA/CD: add the `busy_i` loop on RETRY.
    pub fixed: bool,
    /// CSMA/CD: require `y >= 1` on every transition leaving BUSY and reset
    /// `y` on the busy loop.
    pub nonzeno: bool,
    /// Fischer timing constant.
    pub k: i64,
    /// FDDI synchronous allocation.
    pub sa: i64,
}

impl Default for Params {
    fn default() -> Params {
        Params { l: 808, s: 26, fixed: false, nonzeno: false, k: 2, sa: 20 }
    }
}

impl Params {
    /// The repaired CSMA/CD variant used in the benchmarks.
    pub fn corrected() -> Params {
        Params { fixed: true, nonzeno: true, ..Params::default() }
    }
}

/// Generates the benchmark network of a family with `n` components.
pub fn gen_model(family: Family, n: usize, p: &Params) -> Network {
    match family {
        Family::Csma => gen_csma(n, p.l, p.s, p.fixed, p.nonzeno),
        Family::Fischer => gen_fischer(n, p.k),
        Family::Fddi => gen_fddi(n, p.sa),
        Family::TrainGate => gen_train_gate(n),
    }
}

fn le(c: ClockId, k: i64) -> Atom {
    Atom::new(c, Cmp::Le, k)
}
fn lt(c: ClockId, k: i64) -> Atom {
    Atom::new(c, Cmp::Lt, k)
}
fn ge(c: ClockId, k: i64) -> Atom {
    Atom::new(c, Cmp::Ge, k)
}
fn gt(c: ClockId, k: i64) -> Atom {
    Atom::new(c, Cmp::Gt, k)
}
fn eq(c: ClockId, k: i64) -> Atom {
    Atom::new(c, Cmp::Eq, k)
}

/// CSMA/CD with `n` stations and a bus.
///
/// Clocks are `x_1..x_n` for the stations and `y` for the bus. The bus
/// signals a collision with `cd`, which is fused with every station's `cd_i`.
pub fn gen_csma(n: usize, l: i64, s: i64, fixed: bool, nonzeno: bool) -> Network {
    assert!(n >= 1 && l > 0 && s > 0);
    let mut clocks: Vec<String> = (1..=n).map(|i| format!("x_{i}")).collect();
    clocks.push("y".into());
    let y = n + 1;
    let mut net = Network::new(clocks);

    for i in 1..=n {
        let x = i;
        let mut st = Automaton::new(format!("station_{i}"));
        let wait = st.add_state(State::new("WAIT"));
        let start = st.add_state(State::new("START").invariant(vec![le(x, l)]));
        let retry = st.add_state(State::new("RETRY").invariant(vec![lt(x, 2 * s)]));
        let (begin, end, busy, cd) =
            (format!("begin_{i}"), format!("end_{i}"), format!("busy_{i}"), format!("cd_{i}"));
        st.add_transition(Transition::new(wait, wait).reset(vec![x]).label(&cd));
        st.add_transition(Transition::new(wait, start).reset(vec![x]).label(&begin));
        st.add_transition(Transition::new(wait, retry).reset(vec![x]).label(&busy));
        st.add_transition(Transition::new(wait, retry).reset(vec![x]).label(&cd));
        st.add_transition(Transition::new(retry, retry).reset(vec![x]).label(&cd));
        if fixed {
            st.add_transition(Transition::new(retry, retry).reset(vec![x]).label(&busy));
        }
        st.add_transition(Transition::new(retry, start).reset(vec![x]).label(&begin));
        st.add_transition(Transition::new(start, retry).guard(vec![lt(x, s)]).reset(vec![x]).label(&cd));
        st.add_transition(Transition::new(start, wait).guard(vec![eq(x, l)]).reset(vec![x]).label(&end));
        net.automata.push(st);
    }

    let mut bus = Automaton::new("bus");
    let idle = bus.add_state(State::new("IDLE"));
    let busy = bus.add_state(State::new("BUSY"));
    let coll = bus.add_state(State::new("COLLISION").invariant(vec![lt(y, s)]));
    let from_busy = |mut atoms: Vec<Atom>| {
        if nonzeno {
            atoms.push(ge(y, 1));
        }
        atoms
    };
    for i in 1..=n {
        bus.add_transition(Transition::new(idle, busy).reset(vec![y]).label(format!("begin_{i}")));
    }
    for i in 1..=n {
        // Without a reset of y the busy loop could fire forever at one instant.
        let resets = if nonzeno { vec![y] } else { vec![] };
        bus.add_transition(
            Transition::new(busy, busy).guard(from_busy(vec![ge(y, s)])).reset(resets).label(format!("busy_{i}")),
        );
    }
    for i in 1..=n {
        bus.add_transition(Transition::new(busy, idle).guard(from_busy(vec![])).reset(vec![y]).label(format!("end_{i}")));
    }
    for i in 1..=n {
        bus.add_transition(
            Transition::new(busy, coll).guard(from_busy(vec![lt(y, s)])).reset(vec![y]).label(format!("begin_{i}")),
        );
    }
    bus.add_transition(Transition::new(coll, idle).guard(vec![lt(y, s)]).reset(vec![y]).label("cd"));
    net.automata.push(bus);

    let mut cd = vec!["cd".to_string()];
    cd.extend((1..=n).map(|i| format!("cd_{i}")));
    net.syncs.push(cd);
    net
}

/// Fischer's mutual exclusion protocol with `n` processes and a shared
/// identifier automaton `id` whose state is the current owner (0 = free).
///
/// Both ways into `req` (from `A` and the retry from `wait`) carry `req_i`.
pub fn gen_fischer(n: usize, k: i64) -> Network {
    assert!(n >= 1 && k > 0);
    let mut net = Network::new((1..=n).map(|i| format!("x_{i}")).collect());
    for i in 1..=n {
        let x = i;
        let mut p = Automaton::new(format!("proc_{i}"));
        let a = p.add_state(State::new("A"));
        let req = p.add_state(State::new("req").invariant(vec![le(x, k)]));
        let wait = p.add_state(State::new("wait"));
        let cs = p.add_state(State::new("cs"));
        p.add_transition(Transition::new(a, req).reset(vec![x]).label(format!("req_{i}")));
        p.add_transition(Transition::new(req, wait).guard(vec![le(x, k)]).reset(vec![x]).label(format!("set_{i}")));
        p.add_transition(Transition::new(wait, req).reset(vec![x]).label(format!("req_{i}")));
        p.add_transition(Transition::new(wait, cs).guard(vec![gt(x, k)]).label(format!("enter_{i}")));
        p.add_transition(Transition::new(cs, a).label(format!("exit_{i}")));
        net.automata.push(p);
    }
    let mut id = Automaton::new("id");
    for v in 0..=n {
        id.add_state(State::new(format!("id{v}")));
    }
    for i in 1..=n {
        id.add_transition(Transition::new(0, 0).label(format!("req_{i}")));
        id.add_transition(Transition::new(i, i).label(format!("enter_{i}")));
        for v in 0..=n {
            id.add_transition(Transition::new(v, i).label(format!("set_{i}")));
        }
        for v in 0..=n {
            id.add_transition(Transition::new(v, 0).label(format!("exit_{i}")));
        }
    }
    net.automata.push(id);
    net
}

/// Train gate controller with `n` trains. The gate keeps a FIFO queue of
/// waiting trains; its state is the queue contents together with a mode.
pub fn gen_train_gate(n: usize) -> Network {
    assert!(n >= 1);
    let mut net = Network::new((1..=n).map(|i| format!("x_{i}")).collect());
    for i in 1..=n {
        let x = i;
        let mut t = Automaton::new(format!("train_{i}"));
        let safe = t.add_state(State::new("Safe"));
        let appr = t.add_state(State::new("Appr").invariant(vec![le(x, 20)]));
        let stop = t.add_state(State::new("Stop"));
        let start = t.add_state(State::new("Start").invariant(vec![le(x, 15)]));
        let cross = t.add_state(State::new("Cross").invariant(vec![le(x, 5)]));
        t.add_transition(Transition::new(safe, appr).reset(vec![x]).label(format!("appr_{i}")));
        t.add_transition(Transition::new(appr, stop).guard(vec![le(x, 10)]).label(format!("stop_{i}")));
        t.add_transition(Transition::new(appr, cross).guard(vec![ge(x, 10)]).reset(vec![x]));
        t.add_transition(Transition::new(stop, start).reset(vec![x]).label(format!("go_{i}")));
        t.add_transition(Transition::new(start, cross).guard(vec![ge(x, 7)]).reset(vec![x]));
        t.add_transition(Transition::new(cross, safe).guard(vec![ge(x, 3)]).label(format!("leave_{i}")));
        net.automata.push(t);
    }

    // Gate states: every queue of distinct trains, in three modes. The
    // pending mode stops the train that just joined a non-empty queue.
    #[derive(Clone, Copy, PartialEq)]
    enum Mode {
        Free,
        Occ,
        Pending,
    }
    let mut queues: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier = vec![vec![]];
    while let Some(q) = frontier.pop() {
        for i in 1..=n {
            if !q.contains(&i) {
                let mut nq: Vec<usize> = q.clone();
                nq.push(i);
                queues.push(nq.clone());
                frontier.push(nq);
            }
        }
    }
    queues.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let name = |m: Mode, q: &[usize]| {
        let tag = match m {
            Mode::Free => "Free",
            Mode::Occ => "Occ",
            Mode::Pending => "Pend",
        };
        let ids: Vec<String> = q.iter().map(|i| i.to_string()).collect();
        format!("{tag}_{}", if ids.is_empty() { "e".to_string() } else { ids.join("_") })
    };
    let mut gate = Automaton::new("gate");
    let mut ids = std::collections::HashMap::new();
    for m in [Mode::Free, Mode::Occ, Mode::Pending] {
        for q in &queues {
            if m == Mode::Pending && q.len() < 2 {
                continue;
            }
            if m == Mode::Occ && q.is_empty() {
                continue;
            }
            let s = gate.add_state(State::new(name(m, q)));
            ids.insert(name(m, q), s);
        }
    }
    let id = |m: Mode, q: &[usize]| ids[&name(m, q)];
    for q in &queues {
        if q.is_empty() {
            for i in 1..=n {
                gate.add_transition(Transition::new(id(Mode::Free, q), id(Mode::Occ, &[i])).label(format!("appr_{i}")));
            }
            continue;
        }
        gate.add_transition(Transition::new(id(Mode::Free, q), id(Mode::Occ, q)).label(format!("go_{}", q[0])));
        for i in 1..=n {
            if !q.contains(&i) {
                let mut nq = q.clone();
                nq.push(i);
                gate.add_transition(Transition::new(id(Mode::Occ, q), id(Mode::Pending, &nq)).label(format!("appr_{i}")));
            }
        }
        if q.len() >= 2 {
            let tail = *q.last().unwrap();
            gate.add_transition(Transition::new(id(Mode::Pending, q), id(Mode::Occ, q)).label(format!("stop_{tail}")));
        }
        gate.add_transition(Transition::new(id(Mode::Occ, q), id(Mode::Free, &q[1..])).label(format!("leave_{}", q[0])));
    }
    net.automata.push(gate);
    net
}

/// FDDI token ring with `n` stations and synchronous allocation `sa`.
///
/// Each station alternates between two phases that use the token rotation
/// timers `a_i` and `b_i` in turn; `t_i` measures synchronous transmission.
/// The ring hands the token over with clock `z` and no propagation delay.
pub fn gen_fddi(n: usize, sa: i64) -> Network {
    assert!(n >= 1 && sa > 0);
    let ttrt = fddi_ttrt(n, sa);
    let mut clocks = Vec::new();
    for i in 1..=n {
        clocks.push(format!("t_{i}"));
        clocks.push(format!("a_{i}"));
        clocks.push(format!("b_{i}"));
    }
    clocks.push("z".into());
    let z = 3 * n + 1;
    let mut net = Network::new(clocks);
    for i in 1..=n {
        let (t, a, b) = (3 * i - 2, 3 * i - 1, 3 * i);
        let mut st = Automaton::new(format!("station_{i}"));
        let idle_a = st.add_state(State::new("idleA"));
        let sync_a = st.add_state(State::new("syncA").invariant(vec![le(t, sa)]));
        let async_a = st.add_state(State::new("asyncA").invariant(vec![le(b, ttrt)]));
        let idle_b = st.add_state(State::new("idleB"));
        let sync_b = st.add_state(State::new("syncB").invariant(vec![le(t, sa)]));
        let async_b = st.add_state(State::new("asyncB").invariant(vec![le(a, ttrt)]));
        let (tt, sy, asy, rt) =
            (format!("tt_{i}"), format!("sync_{i}"), format!("async_{i}"), format!("rt_{i}"));
        // Phase A restarts timer a and consults b, phase B the converse.
        for (idle, sync, asyn, next, own, other) in
            [(idle_a, sync_a, async_a, idle_b, a, b), (idle_b, sync_b, async_b, idle_a, b, a)]
        {
            st.add_transition(Transition::new(idle, sync).reset(vec![t, own]).label(&tt));
            st.add_transition(Transition::new(sync, next).guard(vec![eq(t, sa), ge(other, ttrt)]).label(&sy));
            st.add_transition(Transition::new(sync, asyn).guard(vec![eq(t, sa), lt(other, ttrt)]).label(&asy));
            st.add_transition(Transition::new(asyn, next).guard(vec![le(other, ttrt)]).label(&rt));
        }
        net.automata.push(st);
    }
    let mut ring = Automaton::new("ring");
    let mut to = Vec::new();
    let mut at = Vec::new();
    for i in 1..=n {
        to.push(ring.add_state(State::new(format!("to_{i}")).invariant(vec![le(z, 0)])));
        at.push(ring.add_state(State::new(format!("at_{i}"))));
    }
    for i in 0..n {
        let next = to[(i + 1) % n];
        ring.add_transition(Transition::new(to[i], at[i]).guard(vec![eq(z, 0)]).label(format!("tt_{}", i + 1)));
        ring.add_transition(Transition::new(at[i], next).reset(vec![z]).label(format!("sync_{}", i + 1)));
        ring.add_transition(Transition::new(at[i], next).reset(vec![z]).label(format!("rt_{}", i + 1)));
    }
    net.automata.push(ring);
    net
}

/// Target token rotation time of the FDDI benchmark.
pub fn fddi_ttrt(n: usize, sa: i64) -> i64 {
    5 * sa * n as i64 / 2
}

/// The property automaton checked on a family, as a single-automaton network
/// with its own clocks.
pub fn gen_property(family: Family, n: usize, p: &Params) -> Network {
    match family {
        Family::Csma => csma_property(p.l, p.s),
        Family::Fischer => fischer_property(p.k * n as i64),
        Family::Fddi => fddi_property(n, 150 * p.sa * n as i64),
        Family::TrainGate => train_gate_property(n as i64),
    }
}

fn csma_property(l: i64, s: i64) -> Network {
    let mut net = Network::new(vec!["t1".into(), "t2".into()]);
    let (t1, t2) = (1, 2);
    let mut a = Automaton::new("property");
    let q0 = a.add_state(State::new("q0").accepting().invariant(vec![le(t1, 5 * s)]));
    let q1 = a.add_state(State::new("q1"));
    a.add_transition(Transition::new(q0, q0).guard(vec![lt(t1, 5 * s)]).reset(vec![t1]).label("begin_1"));
    a.add_transition(Transition::new(q0, q0).guard(vec![lt(t2, 2 * l)]).reset(vec![t2]).label("end_1"));
    a.add_transition(Transition::new(q0, q1).guard(vec![ge(t2, 2 * l)]).label("end_1"));
    net.automata.push(a);
    net
}

fn fischer_property(t: i64) -> Network {
    let mut net = Network::new(vec!["o1".into(), "o2".into()]);
    let (o1, o2) = (1, 2);
    let mut a = Automaton::new("property");
    let q0 = a.add_state(State::new("q0").accepting().invariant(vec![le(o1, 15 * t)]));
    let q1 = a.add_state(State::new("q1"));
    a.add_transition(
        Transition::new(q0, q0).guard(vec![ge(o2, 10 * t), lt(o2, 15 * t)]).reset(vec![o2]).label("enter_1"),
    );
    a.add_transition(Transition::new(q0, q0).guard(vec![le(o1, t)]).reset(vec![o1]).label("req_1"));
    a.add_transition(Transition::new(q0, q1).guard(vec![ge(o2, 15 * t)]).label("enter_1"));
    net.automata.push(a);
    net
}

fn fddi_property(n: usize, u: i64) -> Network {
    let mut net = Network::new(vec!["o1".into()]);
    let o1 = 1;
    let mut a = Automaton::new("property");
    let qs: Vec<usize> = (0..n)
        .map(|k| a.add_state(State::new(format!("q{k}")).accepting().invariant(vec![le(o1, u)])))
        .collect();
    let sink = a.add_state(State::new(format!("q{n}")));
    for i in 2..=n {
        a.add_transition(Transition::new(qs[0], qs[0]).label(format!("async_{i}")));
        a.add_transition(Transition::new(qs[0], qs[0]).label(format!("sync_{i}")));
    }
    for i in 1..=n {
        let from = qs[i - 1];
        let mut t = Transition::new(from, qs[i % n]).label(format!("async_{i}"));
        if i == n {
            t = t.reset(vec![o1]);
        }
        a.add_transition(t);
        if i >= 2 {
            a.add_transition(Transition::new(from, qs[0]).label(format!("sync_{i}")));
        }
    }
    a.add_transition(Transition::new(qs[n - 1], sink).guard(vec![ge(o1, u)]));
    net.automata.push(a);
    net
}

fn train_gate_property(n: i64) -> Network {
    let mut net = Network::new(vec!["o1".into(), "o2".into()]);
    let (o1, o2) = (1, 2);
    let mut a = Automaton::new("property");
    let q0 = a.add_state(State::new("q0").accepting().invariant(vec![le(o2, 30 * n)]));
    let q1 = a.add_state(State::new("q1").accepting());
    let q2 = a.add_state(State::new("q2").accepting().invariant(vec![le(o1, 300 * n)]));
    let q3 = a.add_state(State::new("q3"));
    a.add_transition(Transition::new(q0, q1).guard(vec![le(o2, 30 * n)]).reset(vec![o2]).label("appr_1"));
    a.add_transition(Transition::new(q1, q0).label("leave_1"));
    a.add_transition(Transition::new(q1, q2).guard(vec![ge(o1, 300 * n)]).reset(vec![o1]).label("stop_1"));
    a.add_transition(Transition::new(q1, q3).guard(vec![lt(o1, 300 * n)]).label("stop_1"));
    a.add_transition(Transition::new(q2, q0).label("leave_1"));
    net.automata.push(a);
    net
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csma_station_and_bus_shapes() {
        let net = gen_csma(1, 808, 26, false, false);
        assert_eq!(net.automata.len(), 2);
        assert_eq!(net.automata[0].states.len(), 3);
        assert_eq!(net.automata[1].states.len(), 3);
        assert_eq!(net.syncs, vec![vec!["cd".to_string(), "cd_1".to_string()]]);
    }

    #[test]
    fn fixed_csma_adds_one_busy_loop_per_station() {
        let plain = gen_csma(3, 808, 26, false, false);
        let fixed = gen_csma(3, 808, 26, true, false);
        for (a, b) in plain.automata.iter().zip(&fixed.automata).take(3) {
            assert_eq!(b.transitions.len(), a.transitions.len() + 1);
            let extra: Vec<_> = b.transitions.iter().filter(|t| !a.transitions.contains(t)).collect();
            assert_eq!(extra.len(), 1);
            let retry = b.state_id("RETRY").unwrap();
            assert_eq!((extra[0].src, extra[0].dst), (retry, retry));
            assert!(extra[0].label.as_deref().unwrap().starts_with("busy_"));
            assert_eq!(extra[0].resets.len(), 1);
        }
    }

    #[test]
    fn nonzeno_guards_every_busy_exit() {
        let net = gen_csma(2, 808, 26, true, true);
        let bus = net.automaton("bus").unwrap();
        let busy = bus.state_id("BUSY").unwrap();
        let y = net.clock("y").unwrap();
        for t in bus.transitions.iter().filter(|t| t.src == busy) {
            assert!(t.guard.atoms.contains(&Atom::new(y, Cmp::Ge, 1)));
            if t.dst == busy {
                assert_eq!(t.resets, vec![y]);
            }
        }
    }

    #[test]
    fn properties_have_the_expected_shapes() {
        let p = Params::default();
        let csma = gen_property(Family::Csma, 4, &p);
        let a = &csma.automata[0];
        assert_eq!(a.states.len(), 2);
        assert!(a.states[0].accepting);
        assert_eq!(a.states[0].invariant.atoms, vec![Atom::new(1, Cmp::Le, 130)]);

        let fischer = gen_property(Family::Fischer, 3, &p);
        let a = &fischer.automata[0];
        assert_eq!(a.states.len(), 2);
        let loops: Vec<&str> =
            a.transitions.iter().filter(|t| t.src == 0 && t.dst == 0).filter_map(|t| t.label.as_deref()).collect();
        assert_eq!(loops, vec!["enter_1", "req_1"]);

        let fddi = gen_property(Family::Fddi, 3, &p);
        assert_eq!(fddi.automata[0].states.len(), 4);
    }

    #[test]
    fn every_family_validates_and_flattens() {
        let p = Params::corrected();
        for f in Family::ALL {
            let net = gen_model(f, 2, &p);
            net.validate().unwrap();
            let prop = gen_property(f, 2, &p);
            let tba = super::super::product(&net, &prop).unwrap();
            assert!(tba.num_states() > 1, "{f}");
        }
    }
}
