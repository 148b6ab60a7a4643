use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{Atom, Automaton, Guard, Network, StateId, Tba, Transition};
use crate::Error;

/// Product of a network with a property automaton that observes its labels.
///
/// `property` must hold exactly one automaton; its clocks are appended after
/// the network clocks. Product states accept iff the property component does.
/// Only the discretely reachable part is built.
pub fn product(net: &Network, property: &Network) -> Result<Tba, Error> {
    if property.automata.len() != 1 {
        return Err(Error::Model(format!(
            "a property must contain exactly one automaton, found {}",
            property.automata.len()
        )));
    }
    if !property.syncs.is_empty() {
        return Err(Error::Model("a property cannot declare sync sets".into()));
    }
    for c in &property.clocks {
        if net.clock(c).is_some() {
            return Err(Error::Model(format!("property clock `{c}` clashes with a model clock")));
        }
    }
    let alphabet = net.alphabet();
    let prop = &property.automata[0];
    for l in prop.alphabet() {
        if !alphabet.contains(l) {
            return Err(Error::Model(format!("property observes label `{l}` that the model never uses")));
        }
    }

    let shift = net.clocks.len();
    let mut prop = prop.clone();
    let shift_guard = |g: &mut Guard| {
        for a in &mut g.atoms {
            a.clock += shift;
        }
    };
    for s in &mut prop.states {
        shift_guard(&mut s.invariant);
    }
    for t in &mut prop.transitions {
        shift_guard(&mut t.guard);
        for r in &mut t.resets {
            *r += shift;
        }
    }

    let mut clocks = net.clocks.clone();
    clocks.extend(property.clocks.iter().cloned());
    let mut components: Vec<&Automaton> = net.automata.iter().collect();
    components.push(&prop);
    let last = components.len() - 1;
    build(clocks, &components, &net.syncs, |tuple| components[last].states[tuple[last]].accepting)
}

pub(super) fn flatten(net: &Network) -> Result<Tba, Error> {
    net.validate()?;
    let components: Vec<&Automaton> = net.automata.iter().collect();
    let judges: Vec<usize> = (0..components.len())
        .filter(|&k| components[k].states.iter().any(|s| s.accepting))
        .collect();
    build(net.clocks.clone(), &components, &net.syncs, |tuple| {
        !judges.is_empty() && judges.iter().all(|&k| components[k].states[tuple[k]].accepting)
    })
}

/// Joint actions: each sync set, plus every remaining label on its own.
fn joint_actions(components: &[&Automaton], syncs: &[Vec<String>]) -> Vec<(String, BTreeSet<String>)> {
    let mut grouped: BTreeSet<&str> = BTreeSet::new();
    let mut actions = Vec::new();
    for s in syncs {
        let set: BTreeSet<String> = s.iter().cloned().collect();
        grouped.extend(s.iter().map(String::as_str));
        actions.push((s[0].clone(), set));
    }
    let mut singles: BTreeSet<&str> = BTreeSet::new();
    for a in components {
        singles.extend(a.alphabet().into_iter().filter(|l| !grouped.contains(l)));
    }
    for l in singles {
        actions.push((l.to_string(), BTreeSet::from([l.to_string()])));
    }
    actions
}

fn build(
    clocks: Vec<String>,
    components: &[&Automaton],
    syncs: &[Vec<String>],
    accepting: impl Fn(&[StateId]) -> bool,
) -> Result<Tba, Error> {
    if components.iter().any(|a| a.states.is_empty()) {
        return Err(Error::Model("every automaton needs at least one state".into()));
    }
    let actions = joint_actions(components, syncs);
    let participants: Vec<Vec<usize>> = actions
        .iter()
        .map(|(_, set)| {
            (0..components.len())
                .filter(|&k| components[k].alphabet().iter().any(|l| set.contains(*l)))
                .collect()
        })
        .collect();

    // Outgoing transitions per component and state, by label.
    let mut by_state: Vec<Vec<BTreeMap<Option<&str>, Vec<&Transition>>>> = components
        .iter()
        .map(|a| vec![BTreeMap::new(); a.states.len()])
        .collect();
    for (k, a) in components.iter().enumerate() {
        for t in &a.transitions {
            by_state[k][t.src].entry(t.label.as_deref()).or_default().push(t);
        }
    }

    let initial: Vec<StateId> = vec![0; components.len()];
    let mut index: HashMap<Vec<StateId>, usize> = HashMap::new();
    let mut tuples: Vec<Vec<StateId>> = Vec::new();
    let mut queue = VecDeque::new();
    index.insert(initial.clone(), 0);
    tuples.push(initial.clone());
    queue.push_back(0usize);
    let mut transitions = Vec::new();

    while let Some(s) = queue.pop_front() {
        let tuple = tuples[s].clone();
        let invariant = components
            .iter()
            .zip(&tuple)
            .fold(Guard::tt(), |g, (a, &q)| g.and(&a.states[q].invariant));
        let mut moves: Vec<(Vec<StateId>, Guard, Vec<usize>, Option<String>)> = Vec::new();

        for k in 0..components.len() {
            if let Some(ts) = by_state[k][tuple[k]].get(&None) {
                for t in ts {
                    let mut next = tuple.clone();
                    next[k] = t.dst;
                    moves.push((next, t.guard.clone(), t.resets.clone(), None));
                }
            }
        }

        for ((name, set), parts) in actions.iter().zip(&participants) {
            // Choices of each participant, cartesian product over them.
            let mut choices: Vec<Vec<&Transition>> = Vec::with_capacity(parts.len());
            for &k in parts {
                let opts: Vec<&Transition> = by_state[k][tuple[k]]
                    .iter()
                    .filter(|(l, _)| l.is_some_and(|l| set.contains(l)))
                    .flat_map(|(_, ts)| ts.iter().copied())
                    .collect();
                if opts.is_empty() {
                    break;
                }
                choices.push(opts);
            }
            if choices.len() != parts.len() || parts.is_empty() {
                continue;
            }
            let mut pick = vec![0usize; parts.len()];
            loop {
                let mut next = tuple.clone();
                let mut guard = Guard::tt();
                let mut resets = Vec::new();
                for (slot, &k) in parts.iter().enumerate() {
                    let t = choices[slot][pick[slot]];
                    next[k] = t.dst;
                    guard = guard.and(&t.guard);
                    resets.extend(t.resets.iter().copied());
                }
                moves.push((next, guard, resets, Some(name.clone())));
                // Advance the odometer.
                let mut d = 0;
                while d < pick.len() {
                    pick[d] += 1;
                    if pick[d] < choices[d].len() {
                        break;
                    }
                    pick[d] = 0;
                    d += 1;
                }
                if d == pick.len() {
                    break;
                }
            }
        }

        for (next, guard, mut resets, label) in moves {
            let dst = match index.get(&next) {
                Some(&d) => d,
                None => {
                    let d = tuples.len();
                    index.insert(next.clone(), d);
                    tuples.push(next);
                    queue.push_back(d);
                    d
                }
            };
            resets.sort_unstable();
            resets.dedup();
            transitions.push(Transition {
                src: s,
                dst,
                guard: dedup_atoms(invariant.and(&guard)),
                resets,
                label,
            });
        }
    }

    let names = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> =
                t.iter().zip(components).map(|(&q, a)| a.states[q].name.as_str()).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let acc = tuples.iter().map(|t| accepting(t)).collect();
    Ok(Tba::new(clocks, names, acc, 0, transitions))
}

fn dedup_atoms(g: Guard) -> Guard {
    let mut seen: BTreeSet<Atom> = BTreeSet::new();
    Guard::new(g.atoms.into_iter().filter(|a| seen.insert(*a)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Cmp, State};

    fn two_state(name: &str, label: &str, clock: usize) -> Automaton {
        let mut a = Automaton::new(name);
        a.add_state(State::new("a"));
        a.add_state(State::new("b"));
        a.add_transition(Transition::new(0, 1).label(label).reset(vec![clock]));
        a.add_transition(Transition::new(1, 0).guard(vec![Atom::new(clock, Cmp::Ge, 1)]));
        a
    }

    #[test]
    fn handshake_moves_both_components() {
        let mut net = Network::new(vec!["x".into(), "y".into()]);
        net.automata.push(two_state("p", "go", 1));
        net.automata.push(two_state("q", "go", 2));
        let tba = net.flatten().unwrap();
        let from_init: Vec<&Transition> = tba.outgoing(0).iter().map(|&k| &tba.transitions[k]).collect();
        assert_eq!(from_init.len(), 1);
        assert_eq!(from_init[0].label.as_deref(), Some("go"));
        assert_eq!(from_init[0].resets, vec![1, 2]);
        assert_eq!(tba.state_names[from_init[0].dst], "(b,b)");
        // (b,b) has two interleaved tau moves back.
        assert_eq!(tba.outgoing(from_init[0].dst).len(), 2);
        assert_eq!(tba.num_states(), 4);
    }

    #[test]
    fn trivial_property_accepts_everything() {
        let mut net = Network::new(vec!["x".into()]);
        net.automata.push(two_state("p", "go", 1));
        let mut prop = Network::new(vec![]);
        let mut obs = Automaton::new("prop");
        obs.add_state(State::new("q0").accepting());
        prop.automata.push(obs);
        let tba = product(&net, &prop).unwrap();
        assert_eq!(tba.num_states(), 2);
        assert_eq!(tba.transitions.len(), 2);
        assert!(tba.accepting.iter().all(|&a| a));
    }

    #[test]
    fn property_with_unknown_label_is_rejected() {
        let mut net = Network::new(vec!["x".into()]);
        net.automata.push(two_state("p", "go", 1));
        let mut prop = Network::new(vec![]);
        let mut obs = Automaton::new("prop");
        obs.add_state(State::new("q0").accepting());
        obs.add_transition(Transition::new(0, 0).label("stop"));
        prop.automata.push(obs);
        assert!(matches!(product(&net, &prop), Err(Error::Model(_))));
    }

    #[test]
    fn invariants_become_guards_of_every_outgoing_move() {
        let mut net = Network::new(vec!["x".into(), "y".into()]);
        let mut p = two_state("p", "a", 1);
        p.states[0].invariant = Guard::new(vec![Atom::new(1, Cmp::Le, 4)]);
        net.automata.push(p);
        let mut q = Automaton::new("q");
        q.add_state(State::new("s"));
        q.add_transition(Transition::new(0, 0));
        net.automata.push(q);
        let tba = net.flatten().unwrap();
        for &k in tba.outgoing(0) {
            assert!(tba.transitions[k].guard.atoms.contains(&Atom::new(1, Cmp::Le, 4)));
        }
    }
}
