//! Timed Büchi automata, networks of them, and their synchronized product.

mod format;
pub mod generators;
mod product;

use std::collections::BTreeSet;
use std::fmt;

use crate::dbm::{Bound, ClockBound, LuBounds};

pub use format::{parse_model, print_model};
pub use product::product;

/// Index of a proper clock. The reference clock `x0` has index 0 and never
/// appears in a model.
pub type ClockId = usize;

/// Index of a state inside its automaton.
pub type StateId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "==",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Cmp::Lt | Cmp::Le | Cmp::Eq)
    }

    pub fn is_lower(self) -> bool {
        matches!(self, Cmp::Gt | Cmp::Ge | Cmp::Eq)
    }
}

/// Atomic constraint `clock cmp constant`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub clock: ClockId,
    pub cmp: Cmp,
    pub constant: i64,
}

impl Atom {
    pub fn new(clock: ClockId, cmp: Cmp, constant: i64) -> Atom {
        assert!(clock != 0, "guards cannot mention the reference clock");
        assert!(constant >= 0, "guard constants are natural numbers");
        Atom { clock, cmp, constant }
    }

    pub fn holds(&self, value: f64) -> bool {
        let c = self.constant as f64;
        match self.cmp {
            Cmp::Lt => value < c,
            Cmp::Le => value <= c,
            Cmp::Eq => value == c,
            Cmp::Ge => value >= c,
            Cmp::Gt => value > c,
        }
    }
}

/// A conjunction of atomic constraints. The empty conjunction is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Guard {
    pub atoms: Vec<Atom>,
}

impl Guard {
    pub fn new(atoms: Vec<Atom>) -> Guard {
        Guard { atoms }
    }

    pub fn tt() -> Guard {
        Guard::default()
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn and(&self, other: &Guard) -> Guard {
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().copied());
        Guard { atoms }
    }

    /// Lowers the guard to zone constraints; `==` becomes two bounds.
    pub fn clock_bounds(&self) -> Vec<ClockBound> {
        let mut out = Vec::with_capacity(self.atoms.len() + 1);
        for a in &self.atoms {
            let c = a.constant;
            match a.cmp {
                Cmp::Lt => out.push(ClockBound::Upper { clock: a.clock, bound: Bound::strict(c) }),
                Cmp::Le => out.push(ClockBound::Upper { clock: a.clock, bound: Bound::weak(c) }),
                Cmp::Eq => {
                    out.push(ClockBound::Upper { clock: a.clock, bound: Bound::weak(c) });
                    out.push(ClockBound::Lower { clock: a.clock, bound: Bound::weak(-c) });
                }
                Cmp::Ge => out.push(ClockBound::Lower { clock: a.clock, bound: Bound::weak(-c) }),
                Cmp::Gt => out.push(ClockBound::Lower { clock: a.clock, bound: Bound::strict(-c) }),
            }
        }
        out
    }

    /// Evaluates the guard on a valuation indexed by clock id (`v[0]` unused).
    pub fn holds(&self, v: &[f64]) -> bool {
        self.atoms.iter().all(|a| a.holds(v[a.clock]))
    }

    /// Clocks mentioned by the guard.
    pub fn clocks(&self) -> BTreeSet<ClockId> {
        self.atoms.iter().map(|a| a.clock).collect()
    }

    pub fn display<'a>(&'a self, clocks: &'a [String]) -> GuardDisplay<'a> {
        GuardDisplay { guard: self, clocks }
    }
}

pub struct GuardDisplay<'a> {
    guard: &'a Guard,
    clocks: &'a [String],
}

impl fmt::Display for GuardDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.guard.is_true() {
            return write!(f, "true");
        }
        for (k, a) in self.guard.atoms.iter().enumerate() {
            if k > 0 {
                write!(f, " && ")?;
            }
            write!(f, "{} {} {}", self.clocks[a.clock - 1], a.cmp.symbol(), a.constant)?;
        }
        Ok(())
    }
}

/// A guarded, resetting edge `(src, g, R, dst)` with an action label.
/// `label == None` is an internal (tau) move.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub src: StateId,
    pub dst: StateId,
    pub guard: Guard,
    pub resets: Vec<ClockId>,
    pub label: Option<String>,
}

impl Transition {
    pub fn new(src: StateId, dst: StateId) -> Transition {
        Transition { src, dst, guard: Guard::tt(), resets: Vec::new(), label: None }
    }

    pub fn guard(mut self, atoms: Vec<Atom>) -> Transition {
        self.guard = Guard::new(atoms);
        self
    }

    pub fn reset(mut self, clocks: Vec<ClockId>) -> Transition {
        self.resets = clocks;
        self
    }

    pub fn label(mut self, label: impl Into<String>) -> Transition {
        self.label = Some(label.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub accepting: bool,
    /// Folded into the guards of all outgoing moves when a product is built.
    pub invariant: Guard,
}

impl State {
    pub fn new(name: impl Into<String>) -> State {
        State { name: name.into(), accepting: false, invariant: Guard::tt() }
    }

    pub fn accepting(mut self) -> State {
        self.accepting = true;
        self
    }

    pub fn invariant(mut self, atoms: Vec<Atom>) -> State {
        self.invariant = Guard::new(atoms);
        self
    }
}

/// One component of a network. The first state is the initial one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    pub name: String,
    pub states: Vec<State>,
    pub transitions: Vec<Transition>,
}

impl Automaton {
    pub fn new(name: impl Into<String>) -> Automaton {
        Automaton { name: name.into(), states: Vec::new(), transitions: Vec::new() }
    }

    pub fn add_state(&mut self, state: State) -> StateId {
        self.states.push(state);
        self.states.len() - 1
    }

    pub fn add_transition(&mut self, t: Transition) {
        self.transitions.push(t);
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s.name == name)
    }

    /// Non-tau labels used by this automaton.
    pub fn alphabet(&self) -> BTreeSet<&str> {
        self.transitions.iter().filter_map(|t| t.label.as_deref()).collect()
    }
}

/// A network of automata sharing a global clock set.
///
/// Components move together on joint actions: a label that is not listed in a
/// sync set is a joint action by itself, and a sync set fuses all its labels
/// into a single joint action. Every component whose alphabet meets the joint
/// action takes exactly one matching transition; tau moves interleave.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Network {
    pub clocks: Vec<String>,
    pub automata: Vec<Automaton>,
    pub syncs: Vec<Vec<String>>,
}

impl Network {
    pub fn new(clocks: Vec<String>) -> Network {
        Network { clocks, automata: Vec::new(), syncs: Vec::new() }
    }

    /// Id of the clock named `name`.
    pub fn clock(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c == name).map(|i| i + 1)
    }

    pub fn automaton(&self, name: &str) -> Option<&Automaton> {
        self.automata.iter().find(|a| a.name == name)
    }

    /// Union of the component alphabets.
    pub fn alphabet(&self) -> BTreeSet<&str> {
        self.automata.iter().flat_map(|a| a.alphabet()).collect()
    }

    /// Checks structural well-formedness. Parsing and the generators only
    /// produce valid networks; this guards hand-built ones.
    pub fn validate(&self) -> Result<(), crate::Error> {
        let n = self.clocks.len();
        let mut seen = BTreeSet::new();
        for c in &self.clocks {
            if !seen.insert(c) {
                return Err(crate::Error::Model(format!("clock `{c}` declared twice")));
            }
        }
        for a in &self.automata {
            if a.states.is_empty() {
                return Err(crate::Error::Model(format!("automaton `{}` has no states", a.name)));
            }
            let check_guard = |g: &Guard| -> Result<(), crate::Error> {
                for atom in &g.atoms {
                    if atom.clock == 0 || atom.clock > n {
                        return Err(crate::Error::Model(format!(
                            "automaton `{}` uses an undeclared clock",
                            a.name
                        )));
                    }
                }
                Ok(())
            };
            for s in &a.states {
                check_guard(&s.invariant)?;
            }
            for t in &a.transitions {
                if t.src >= a.states.len() || t.dst >= a.states.len() {
                    return Err(crate::Error::Model(format!(
                        "automaton `{}` has a transition to an unknown state",
                        a.name
                    )));
                }
                check_guard(&t.guard)?;
                if t.resets.iter().any(|&x| x == 0 || x > n) {
                    return Err(crate::Error::Model(format!(
                        "automaton `{}` resets an undeclared clock",
                        a.name
                    )));
                }
            }
        }
        let mut in_sync = BTreeSet::new();
        for s in &self.syncs {
            for l in s {
                if !in_sync.insert(l.as_str()) {
                    return Err(crate::Error::Model(format!("label `{l}` is in two sync sets")));
                }
            }
        }
        Ok(())
    }

    /// Flattens the network into a single automaton using the components' own
    /// accepting states: a product state accepts when every component that
    /// declares accepting states is in one of them.
    pub fn flatten(&self) -> Result<Tba, crate::Error> {
        product::flatten(self)
    }

    /// Divides every constant by `k`, rounding up, with a minimum of 1.
    /// Zero constants stay zero.
    pub fn scaled(&self, k: i64) -> Network {
        assert!(k >= 1);
        let mut out = self.clone();
        let scale = |g: &mut Guard| {
            for a in &mut g.atoms {
                a.constant = scale_constant(a.constant, k);
            }
        };
        for a in &mut out.automata {
            for s in &mut a.states {
                scale(&mut s.invariant);
            }
            for t in &mut a.transitions {
                scale(&mut t.guard);
            }
        }
        out
    }
}

/// `ceil(c / k)`, at least 1 for positive `c`.
pub fn scale_constant(c: i64, k: i64) -> i64 {
    if c == 0 {
        0
    } else {
        ((c + k - 1) / k).max(1)
    }
}

/// A flat timed Büchi automaton `(Q, q0, X, T, Acc)`.
///
/// State invariants have already been folded into transition guards, so the
/// zone semantics only needs guards and resets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tba {
    pub clocks: Vec<String>,
    pub state_names: Vec<String>,
    pub accepting: Vec<bool>,
    pub initial: StateId,
    pub transitions: Vec<Transition>,
    /// Outgoing transition indices per state, in transition order.
    outgoing: Vec<Vec<usize>>,
}

impl Tba {
    pub fn new(
        clocks: Vec<String>,
        state_names: Vec<String>,
        accepting: Vec<bool>,
        initial: StateId,
        transitions: Vec<Transition>,
    ) -> Tba {
        assert_eq!(state_names.len(), accepting.len());
        assert!(initial < state_names.len());
        let mut outgoing = vec![Vec::new(); state_names.len()];
        for (k, t) in transitions.iter().enumerate() {
            assert!(t.src < state_names.len() && t.dst < state_names.len());
            outgoing[t.src].push(k);
        }
        Tba { clocks, state_names, accepting, initial, transitions, outgoing }
    }

    pub fn num_clocks(&self) -> usize {
        self.clocks.len()
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn outgoing(&self, q: StateId) -> &[usize] {
        &self.outgoing[q]
    }

    /// Clock names prefixed by the reference clock, indexed by clock id.
    pub fn clock_names_with_reference(&self) -> Vec<String> {
        std::iter::once("0".to_string()).chain(self.clocks.iter().cloned()).collect()
    }

    /// Maximal lower and upper guard constants per clock.
    pub fn lu_bounds(&self) -> LuBounds {
        compute_lu_bounds(self.num_clocks(), self.transitions.iter().map(|t| &t.guard))
    }

    /// Largest constant appearing in any guard, 0 if there is none.
    pub fn max_constant(&self) -> i64 {
        self.transitions
            .iter()
            .flat_map(|t| t.guard.atoms.iter().map(|a| a.constant))
            .max()
            .unwrap_or(0)
    }
}

/// Per-clock maximum of lower-bound (`>`, `>=`, `==`) and upper-bound
/// (`<`, `<=`, `==`) constants over the given guards.
pub fn compute_lu_bounds<'a>(clocks: usize, guards: impl IntoIterator<Item = &'a Guard>) -> LuBounds {
    let mut lu = LuBounds::new(clocks);
    for g in guards {
        for a in &g.atoms {
            if a.cmp.is_lower() {
                lu.raise_lower(a.clock, a.constant);
            }
            if a.cmp.is_upper() {
                lu.raise_upper(a.clock, a.constant);
            }
        }
    }
    lu
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_of_single_lower_guard() {
        let g = Guard::new(vec![Atom::new(1, Cmp::Ge, 5)]);
        let lu = compute_lu_bounds(1, [&g]);
        assert_eq!(lu.lower(1), Some(5));
        assert_eq!(lu.upper(1), None);
    }

    #[test]
    fn lu_without_guards_is_minus_infinity() {
        let lu = compute_lu_bounds(3, std::iter::empty());
        for c in 1..=3 {
            assert_eq!(lu.lower(c), None);
            assert_eq!(lu.upper(c), None);
        }
    }

    #[test]
    fn equality_counts_for_both_polarities() {
        let g = Guard::new(vec![Atom::new(1, Cmp::Eq, 7), Atom::new(2, Cmp::Lt, 3)]);
        let lu = compute_lu_bounds(2, [&g]);
        assert_eq!((lu.lower(1), lu.upper(1)), (Some(7), Some(7)));
        assert_eq!((lu.lower(2), lu.upper(2)), (None, Some(3)));
    }

    #[test]
    fn scaling_rounds_up() {
        assert_eq!(scale_constant(808, 26), 32);
        assert_eq!(scale_constant(26, 26), 1);
        assert_eq!(scale_constant(1, 26), 1);
        assert_eq!(scale_constant(0, 26), 0);
    }
}
