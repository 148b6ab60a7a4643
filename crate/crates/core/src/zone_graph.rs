//! The abstract zone graph: nodes `(q, Z)` with `Z = Extra+_LU(Z)`.

use crate::dbm::{LuBounds, Zone};
use crate::model::{StateId, Tba, Transition};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Node {
    pub q: StateId,
    pub zone: Zone,
}

/// Initial node `(q0, a(Z0))`.
pub fn initial_node(a: &Tba, lu: &LuBounds) -> Node {
    let zone = Zone::initial(a.num_clocks()).extrapolate_lu_plus(lu);
    Node { q: a.initial, zone }
}

/// Successor zone `a(reset_R(up(Z) ∩ g))` before the abstraction when `lu` is
/// `None`, otherwise abstracted. `None` when the transition is disabled.
pub fn post_zone(zone: &Zone, t: &Transition, lu: Option<&LuBounds>) -> Option<Zone> {
    let mut z = zone.up();
    z.intersect_guard_in_place(&t.guard.clock_bounds());
    if z.is_empty() {
        return None;
    }
    z.reset_in_place(&t.resets);
    if let Some(lu) = lu {
        z.extrapolate_lu_plus_in_place(lu);
    }
    Some(z)
}

/// The node reached from `nd` through `t`.
pub fn post(nd: &Node, t: &Transition, lu: &LuBounds) -> Option<Node> {
    debug_assert_eq!(t.src, nd.q);
    post_zone(&nd.zone, t, Some(lu)).map(|zone| Node { q: t.dst, zone })
}

/// All enabled successors of `nd` with the index of the transition taken, in
/// transition order.
pub fn successors(nd: &Node, a: &Tba, lu: &LuBounds) -> Vec<(usize, Node)> {
    a.outgoing(nd.q)
        .iter()
        .filter_map(|&k| post(nd, &a.transitions[k], lu).map(|n| (k, n)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dbm::Bound;
    use crate::model::{Atom, Cmp};

    fn one_state(clocks: usize, t: Transition) -> Tba {
        let names = (1..=clocks).map(|i| format!("x{i}")).collect();
        Tba::new(names, vec!["q".into()], vec![true], 0, vec![t])
    }

    #[test]
    fn initial_zone_has_equal_clocks() {
        let a = one_state(2, Transition::new(0, 0));
        let n = initial_node(&a, &LuBounds::uniform(2, 5));
        assert_eq!(n.zone.get(1, 2), Bound::LE_ZERO);
        assert_eq!(n.zone.get(2, 1), Bound::LE_ZERO);
        assert_eq!(n.zone.get(0, 1), Bound::LE_ZERO);
        assert!(n.zone.get(1, 0).is_infinite());
    }

    #[test]
    fn no_clocks_gives_a_trivial_zone() {
        let a = one_state(0, Transition::new(0, 0));
        let n = initial_node(&a, &LuBounds::new(0));
        assert_eq!(n.zone.dim(), 1);
        assert_eq!(successors(&n, &a, &LuBounds::new(0)).len(), 1);
    }

    #[test]
    fn guard_then_reset() {
        let t = Transition::new(0, 0).guard(vec![Atom::new(1, Cmp::Le, 2)]).reset(vec![2]);
        let z = post_zone(&Zone::initial(2), &t, None).unwrap();
        let expect = Zone::universe(2)
            .with(2, 0, Bound::LE_ZERO)
            .with(1, 0, Bound::weak(2))
            .with(1, 2, Bound::weak(2))
            .canonicalize();
        assert_eq!(z, expect);
    }

    #[test]
    fn unsatisfiable_guard_disables() {
        let t = Transition::new(0, 0).guard(vec![Atom::new(1, Cmp::Lt, 0)]);
        assert!(post_zone(&Zone::initial(1), &t, None).is_none());
    }
}
