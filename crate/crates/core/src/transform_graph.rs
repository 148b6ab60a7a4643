//! Transformation graphs: weighted constraint graphs relating the clock values
//! before and after a sequence of transitions.
//!
//! Vertices are pairs `(column, clock)` where clock 0 is the reference clock
//! `x0`. Values are *loose*: `x0` may be non-zero and elapsed time shows up as
//! a decrease of `x0`. An edge `u -> w` of weight `d` is the constraint
//! `w - u <= d`.
//!
//! A [`TransGraph`] is always kept in short form: the shortest-path closure
//! restricted to the leftmost and rightmost columns. Variable `(0, i)` has
//! index `i` and `(1, i)` has index `n + 1 + i`.

use std::fmt;

use crate::dbm::{close_matrix, Bound, ClockBound, Zone};
use crate::model::Transition;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TransGraph {
    clocks: usize,
    m: Vec<Bound>,
    empty: bool,
}

/// A square bound matrix over `cols * (n + 1)` vertices, used as scratch.
struct Columns {
    width: usize,
    dim: usize,
    m: Vec<Bound>,
}

impl Columns {
    fn new(cols: usize, clocks: usize) -> Columns {
        let width = clocks + 1;
        let dim = cols * width;
        let mut m = vec![Bound::INFINITY; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Bound::LE_ZERO;
        }
        let mut c = Columns { width, dim, m };
        for col in 0..cols {
            for x in 1..width {
                c.edge((col, x), (col, 0), Bound::LE_ZERO);
            }
        }
        c
    }

    fn idx(&self, (col, x): (usize, usize)) -> usize {
        col * self.width + x
    }

    /// Adds the edge `u -> w`, i.e. `w - u <= b`.
    fn edge(&mut self, u: (usize, usize), w: (usize, usize), b: Bound) {
        let (u, w) = (self.idx(u), self.idx(w));
        let k = w * self.dim + u;
        if b < self.m[k] {
            self.m[k] = b;
        }
    }

    fn both(&mut self, u: (usize, usize), w: (usize, usize)) {
        self.edge(u, w, Bound::LE_ZERO);
        self.edge(w, u, Bound::LE_ZERO);
    }

    /// Copies a short graph into columns `left` and `right`.
    fn place(&mut self, g: &TransGraph, left: usize, right: usize) {
        let w = self.width;
        let d = 2 * w;
        for a in 0..d {
            for b in 0..d {
                let pa = if a < w { (left, a) } else { (right, a - w) };
                let pb = if b < w { (left, b) } else { (right, b - w) };
                let (ia, ib) = (self.idx(pa), self.idx(pb));
                let k = ia * self.dim + ib;
                let v = g.m[a * d + b];
                if v < self.m[k] {
                    self.m[k] = v;
                }
            }
        }
    }

    /// Closes the matrix and keeps only columns `left` and `right`.
    fn shorten(mut self, left: usize, right: usize) -> TransGraph {
        let clocks = self.width - 1;
        if !close_matrix(&mut self.m, self.dim) {
            return TransGraph::empty(clocks);
        }
        let w = self.width;
        let d = 2 * w;
        let pick = |a: usize| if a < w { left * w + a } else { right * w + a - w };
        let mut m = vec![Bound::INFINITY; d * d];
        for a in 0..d {
            for b in 0..d {
                m[a * d + b] = self.m[pick(a) * self.dim + pick(b)];
            }
        }
        TransGraph { clocks, m, empty: false }
    }
}

/// Adds the three-column graph of `t` at columns `c, c+1, c+2`.
fn add_transition_edges(g: &mut Columns, c: usize, t: &Transition, clocks: usize) {
    // Time elapse: x0 decreases, clocks keep their loose values.
    g.edge((c, 0), (c + 1, 0), Bound::LE_ZERO);
    for x in 1..=clocks {
        g.both((c, x), (c + 1, x));
    }
    for cb in t.guard.clock_bounds() {
        match cb {
            ClockBound::Upper { clock, bound } => g.edge((c + 1, 0), (c + 1, clock), bound),
            ClockBound::Lower { clock, bound } => g.edge((c + 1, clock), (c + 1, 0), bound),
        }
    }
    // Resets: a reset clock takes the value of x0, the others are unchanged.
    g.both((c + 1, 0), (c + 2, 0));
    for x in 1..=clocks {
        if t.resets.contains(&x) {
            g.edge((c + 1, x), (c + 2, x), Bound::LE_ZERO);
            g.both((c + 2, 0), (c + 2, x));
        } else {
            g.both((c + 1, x), (c + 2, x));
        }
    }
}

impl TransGraph {
    /// The absorbing empty relation.
    pub fn empty(clocks: usize) -> TransGraph {
        let d = 2 * (clocks + 1);
        TransGraph { clocks, m: vec![Bound::LT_ZERO; d * d], empty: true }
    }

    /// The identity relation: no time elapses and no clock changes.
    pub fn identity(clocks: usize) -> TransGraph {
        let mut g = Columns::new(2, clocks);
        for x in 0..=clocks {
            g.both((0, x), (1, x));
        }
        g.shorten(0, 1)
    }

    /// `G_t`: a delay followed by the guard and the resets of `t`, over
    /// clocks `1..=clocks`.
    pub fn of_transition(t: &Transition, clocks: usize) -> TransGraph {
        let mut g = Columns::new(3, clocks);
        add_transition_edges(&mut g, 0, t, clocks);
        g.shorten(0, 2)
    }

    /// `|G1 ⊙ G2|`, computed over a single scratch matrix in which the right
    /// column of `self` and the left column of `other` are one column.
    pub fn compose(&self, other: &TransGraph) -> TransGraph {
        assert_eq!(self.clocks, other.clocks, "clock count mismatch");
        if self.empty || other.empty {
            return TransGraph::empty(self.clocks);
        }
        let mut g = Columns::new(3, self.clocks);
        g.place(self, 0, 1);
        g.place(other, 1, 2);
        g.shorten(0, 2)
    }

    /// Left fold of [`TransGraph::compose`] over the transitions of `seq`.
    /// Returns the graph and the number of compositions performed.
    pub fn of_sequence_counted(seq: &[Transition], clocks: usize) -> (TransGraph, usize) {
        assert!(!seq.is_empty(), "a sequence needs at least one transition");
        let mut g = TransGraph::of_transition(&seq[0], clocks);
        let mut count = 0;
        for t in &seq[1..] {
            g = g.compose(&TransGraph::of_transition(t, clocks));
            count += 1;
        }
        (g, count)
    }

    pub fn of_sequence(seq: &[Transition], clocks: usize) -> TransGraph {
        TransGraph::of_sequence_counted(seq, clocks).0
    }

    /// Reference construction: the whole multi-column graph of `seq`, with
    /// zero-weight links between consecutive junction columns, closed once
    /// and then shortened.
    pub fn of_sequence_unshortened(seq: &[Transition], clocks: usize) -> TransGraph {
        assert!(!seq.is_empty());
        let k = seq.len();
        let mut g = Columns::new(3 * k, clocks);
        for (i, t) in seq.iter().enumerate() {
            add_transition_edges(&mut g, 3 * i, t, clocks);
            if i > 0 {
                for x in 0..=clocks {
                    g.both((3 * i - 1, x), (3 * i, x));
                }
            }
        }
        g.shorten(0, 3 * k - 1)
    }

    pub fn clocks(&self) -> usize {
        self.clocks
    }

    /// Whether the relation is empty, i.e. the graph has a negative cycle.
    pub fn is_empty(&self) -> bool {
        self.empty
    }

    /// Constraint `w - u <= b` between variables in short-form indexing.
    pub fn get(&self, w: usize, u: usize) -> Bound {
        let d = 2 * (self.clocks + 1);
        self.m[w * d + u]
    }

    fn project(&self, col: usize) -> Zone {
        let w = self.clocks + 1;
        if self.empty {
            return Zone::empty(w);
        }
        let d = 2 * w;
        let off = col * w;
        let mut m = Vec::with_capacity(w * w);
        for i in 0..w {
            for j in 0..w {
                m.push(self.m[(off + i) * d + off + j]);
            }
        }
        Zone::from_matrix(w, m).canonicalize()
    }

    /// The valuations from which the relation can be taken.
    pub fn left(&self) -> Zone {
        self.project(0)
    }

    /// The valuations reachable through the relation, normalized so that
    /// the right `x0` is the reference.
    pub fn right(&self) -> Zone {
        self.project(1)
    }

    /// `≏`: equal left and equal right projections.
    pub fn bump_eq(&self, other: &TransGraph) -> bool {
        self.left() == other.left() && self.right() == other.right()
    }

    /// Intersects the right column with `z` (over the same clocks).
    pub fn restrict_right(&self, z: &Zone) -> TransGraph {
        assert_eq!(z.dim(), self.clocks + 1);
        if self.empty || z.is_empty() {
            return TransGraph::empty(self.clocks);
        }
        let mut g = Columns::new(2, self.clocks);
        g.place(self, 0, 1);
        let z = z.canonicalize();
        for i in 0..=self.clocks {
            for j in 0..=self.clocks {
                // z[i][j] bounds x_i - x_j, an edge (1,j) -> (1,i).
                g.edge((1, j), (1, i), z.get(i, j));
            }
        }
        g.shorten(0, 1)
    }

    /// Whether a pair of loose valuations (left, right) satisfies every
    /// constraint of the graph.
    pub fn admits(&self, left: &[f64], right: &[f64]) -> bool {
        let w = self.clocks + 1;
        assert!(left.len() == w && right.len() == w);
        if self.empty {
            return false;
        }
        let val = |a: usize| if a < w { left[a] } else { right[a - w] };
        let d = 2 * w;
        (0..d).all(|a| (0..d).all(|b| a == b || self.m[a * d + b].admits(val(a) - val(b))))
    }

    /// The graph as a list of finite edges, one per line.
    pub fn edge_list(&self) -> String {
        if self.empty {
            return "empty\n".to_string();
        }
        let w = self.clocks + 1;
        let d = 2 * w;
        let name = |a: usize| {
            let (col, x) = if a < w { (0, a) } else { (1, a - w) };
            format!("({col},x{x})")
        };
        let mut out = String::new();
        for u in 0..d {
            for v in 0..d {
                let b = self.m[v * d + u];
                if u != v && !b.is_infinite() {
                    out.push_str(&format!("{} -> {} {}\n", name(u), name(v), b));
                }
            }
        }
        out
    }
}

impl fmt::Debug for TransGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TransGraph(clocks={})\n{}", self.clocks, self.edge_list())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Atom, Cmp};

    fn t(atoms: Vec<Atom>, resets: Vec<usize>) -> Transition {
        Transition::new(0, 0).guard(atoms).reset(resets)
    }

    #[test]
    fn guard_and_reset_example() {
        // guard x2 < 5, reset {x1}, over x0, x1, x2.
        let g = TransGraph::of_transition(&t(vec![Atom::new(2, Cmp::Lt, 5)], vec![1]), 2);
        assert!(!g.is_empty());
        // The right reset clock equals the right reference clock.
        assert_eq!(g.get(4, 3), Bound::LE_ZERO);
        assert_eq!(g.get(3, 4), Bound::LE_ZERO);
        // x2 on the right is below x0 on the right plus 5.
        assert_eq!(g.get(5, 3), Bound::strict(5));
        // x2 is unchanged.
        assert_eq!(g.get(5, 2), Bound::LE_ZERO);
        assert_eq!(g.get(2, 5), Bound::LE_ZERO);
        // A delay of 1.5 with x2 kept at its loose value 1.
        assert!(g.admits(&[-1.5, 5.0, 1.0], &[-3.0, -3.0, 1.0]));
        // x2 is not reset, so it cannot move to 3.5.
        assert!(!g.admits(&[-1.5, 5.0, 1.0], &[-3.0, -3.0, 3.5]));
        // The guard x2 < 5 rejects a delay of 4.
        assert!(!g.admits(&[0.0, 0.0, 1.0], &[-4.0, -4.0, 1.0]));
    }

    #[test]
    fn guardless_transition_is_a_pure_delay() {
        let g = TransGraph::of_transition(&t(vec![], vec![]), 2);
        assert_eq!(g.left(), Zone::universe(2));
        // The right column equals the left column up to a non-negative delay.
        for x in 1..=2 {
            assert_eq!(g.get(3 + x, x), Bound::LE_ZERO);
            assert_eq!(g.get(x, 3 + x), Bound::LE_ZERO);
        }
        assert_eq!(g.get(3, 0), Bound::LE_ZERO);
        assert!(g.get(0, 3).is_infinite());
    }

    #[test]
    fn identity_is_neutral() {
        let g = TransGraph::of_transition(&t(vec![Atom::new(1, Cmp::Le, 2)], vec![2]), 2);
        let id = TransGraph::identity(2);
        assert_eq!(id.compose(&g), g);
        assert_eq!(g.compose(&id), g);
    }

    #[test]
    fn left_projection_accounts_for_the_delay() {
        let lower = TransGraph::of_transition(&t(vec![Atom::new(1, Cmp::Ge, 3)], vec![]), 1);
        assert_eq!(lower.left(), Zone::universe(1));
        let upper = TransGraph::of_transition(&t(vec![Atom::new(1, Cmp::Le, 2)], vec![]), 1);
        assert_eq!(upper.left(), Zone::universe(1).with(1, 0, Bound::weak(2)).canonicalize());
    }

    #[test]
    fn unsatisfiable_guard_gives_the_empty_graph() {
        let g = TransGraph::of_transition(&t(vec![Atom::new(1, Cmp::Ge, 3), Atom::new(1, Cmp::Lt, 3)], vec![]), 1);
        assert!(g.is_empty());
        let h = TransGraph::of_transition(&t(vec![], vec![]), 1);
        assert!(h.compose(&g).is_empty());
        assert!(g.compose(&h).is_empty());
        assert!(g.left().is_empty());
    }

    #[test]
    fn second_pass_of_a_unit_loop_waits() {
        let b = t(vec![Atom::new(1, Cmp::Ge, 1)], vec![1]);
        let g = TransGraph::of_sequence(&[b.clone(), b], 1);
        // The first pass may fire at once, the second waits a full unit:
        // right x0 - left x0 <= -1.
        assert_eq!(g.get(2, 0), Bound::weak(-1));
    }

    #[test]
    fn bump_eq_ignores_cross_bounds() {
        let g = TransGraph::of_transition(&t(vec![Atom::new(1, Cmp::Ge, 1)], vec![1]), 1);
        let mut h = g.clone();
        // Relax a cross-column entry that closure of the projections never sees.
        let d = 4;
        h.m[2 * d] = Bound::INFINITY;
        assert_ne!(g, h);
        assert!(g.bump_eq(&h));
        let other = TransGraph::of_transition(&t(vec![Atom::new(1, Cmp::Le, 1)], vec![1]), 1);
        assert!(!g.bump_eq(&other));
    }

    #[test]
    fn edge_list_lists_finite_edges() {
        let g = TransGraph::of_transition(&t(vec![], vec![1]), 1);
        let dump = g.edge_list();
        assert!(dump.contains("(1,x0) -> (1,x1) <=0"), "{dump}");
        assert!(dump.contains("(1,x1) -> (1,x0) <=0"), "{dump}");
    }
}
