//! Difference bound matrices over a fixed set of clocks.
//!
//! A zone of dimension `d` constrains the clocks `x_0 .. x_{d-1}`, where `x_0`
//! is the reference clock that is always zero. Entry `(i, j)` bounds the
//! difference `x_i - x_j`.

use std::fmt;

/// Comparison attached to a bound. `Strict` sorts below `Weak`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rel {
    Strict,
    Weak,
}

/// A bound `(rel, value)` on a clock difference, or `+inf`.
///
/// Field order gives the derived ordering: by value first, then strict before
/// weak. Infinity is stored as `(Weak, i64::MAX)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound {
    value: i64,
    rel: Rel,
}

const INF_VALUE: i64 = i64::MAX;

impl Bound {
    pub const INFINITY: Bound = Bound { value: INF_VALUE, rel: Rel::Weak };
    pub const LE_ZERO: Bound = Bound { value: 0, rel: Rel::Weak };
    pub const LT_ZERO: Bound = Bound { value: 0, rel: Rel::Strict };

    pub fn new(rel: Rel, value: i64) -> Bound {
        debug_assert!(value.abs() < (1 << 60), "bound constant out of range");
        Bound { value, rel }
    }

    pub fn weak(value: i64) -> Bound {
        Bound::new(Rel::Weak, value)
    }

    pub fn strict(value: i64) -> Bound {
        Bound::new(Rel::Strict, value)
    }

    pub fn is_infinite(self) -> bool {
        self.value == INF_VALUE
    }

    /// Finite constant, or `None` for `+inf`.
    pub fn value(self) -> Option<i64> {
        (!self.is_infinite()).then_some(self.value)
    }

    pub fn rel(self) -> Rel {
        self.rel
    }

    pub fn is_strict(self) -> bool {
        self.rel == Rel::Strict
    }

    /// Sum of two bounds: values add, infinity absorbs, strict wins.
    #[inline]
    pub fn add(self, other: Bound) -> Bound {
        if self.is_infinite() || other.is_infinite() {
            return Bound::INFINITY;
        }
        let rel = if self.rel == Rel::Strict || other.rel == Rel::Strict {
            Rel::Strict
        } else {
            Rel::Weak
        };
        Bound { value: self.value + other.value, rel }
    }

    /// The bound describing the complement of `x - y ≼ c` as a bound on `y - x`:
    /// `(≤, c)` becomes `(<, -c)` and `(<, c)` becomes `(≤, -c)`.
    pub fn complement(self) -> Bound {
        debug_assert!(!self.is_infinite());
        match self.rel {
            Rel::Weak => Bound::strict(-self.value),
            Rel::Strict => Bound::weak(-self.value),
        }
    }

    /// Whether `d` satisfies `d ≼ c` for this bound `(≼, c)`.
    pub fn admits(self, d: f64) -> bool {
        match self.value() {
            None => true,
            Some(c) => match self.rel {
                Rel::Weak => d <= c as f64,
                Rel::Strict => d < c as f64,
            },
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.value(), self.rel) {
            (None, _) => write!(f, "<inf"),
            (Some(c), Rel::Weak) => write!(f, "<={c}"),
            (Some(c), Rel::Strict) => write!(f, "<{c}"),
        }
    }
}

/// Per-clock maximal lower (`L`) and upper (`U`) guard constants.
///
/// Index 0 is the reference clock and is always `Some(0)`. `None` stands for
/// `-inf`, i.e. the clock never appears in a guard of that polarity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LuBounds {
    lower: Vec<Option<i64>>,
    upper: Vec<Option<i64>>,
}

impl LuBounds {
    /// Bounds for `clocks` proper clocks (reference clock excluded), all `-inf`.
    pub fn new(clocks: usize) -> LuBounds {
        let mut lower = vec![None; clocks + 1];
        let mut upper = vec![None; clocks + 1];
        lower[0] = Some(0);
        upper[0] = Some(0);
        LuBounds { lower, upper }
    }

    /// Uses `m` as both the lower and the upper constant of every clock.
    pub fn uniform(clocks: usize, m: i64) -> LuBounds {
        let mut lu = LuBounds::new(clocks);
        for c in 1..=clocks {
            lu.raise_lower(c, m);
            lu.raise_upper(c, m);
        }
        lu
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self, clock: usize) -> Option<i64> {
        self.lower[clock]
    }

    pub fn upper(&self, clock: usize) -> Option<i64> {
        self.upper[clock]
    }

    pub fn raise_lower(&mut self, clock: usize, c: i64) {
        assert!(clock != 0, "the reference clock has no guards");
        self.lower[clock] = Some(self.lower[clock].map_or(c, |l| l.max(c)));
    }

    pub fn raise_upper(&mut self, clock: usize, c: i64) {
        assert!(clock != 0, "the reference clock has no guards");
        self.upper[clock] = Some(self.upper[clock].map_or(c, |u| u.max(c)));
    }
}

/// A zone, stored as a square matrix of bounds.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Zone {
    dim: usize,
    m: Vec<Bound>,
    canonical: bool,
    empty: bool,
}

impl Zone {
    /// The unconstrained set of non-negative valuations over `clocks` clocks.
    pub fn universe(clocks: usize) -> Zone {
        let dim = clocks + 1;
        let mut m = vec![Bound::INFINITY; dim * dim];
        for j in 0..dim {
            m[j] = Bound::LE_ZERO;
        }
        for i in 0..dim {
            m[i * dim + i] = Bound::LE_ZERO;
        }
        Zone { dim, m, canonical: true, empty: false }
    }

    /// The single valuation where every clock is zero.
    pub fn zero(clocks: usize) -> Zone {
        let dim = clocks + 1;
        Zone { dim, m: vec![Bound::LE_ZERO; dim * dim], canonical: true, empty: false }
    }

    /// The zone `{0 + d | d >= 0}`: all clocks equal and non-negative.
    pub fn initial(clocks: usize) -> Zone {
        let mut z = Zone::zero(clocks);
        z.up_in_place();
        z
    }

    /// A matrix with every off-diagonal entry `+inf`, not yet closed.
    ///
    /// Unlike [`Zone::universe`] this does not bound clocks below by zero, which
    /// makes it a convenient blank sheet for building matrices by hand.
    pub fn unconstrained(dim: usize) -> Zone {
        assert!(dim >= 1);
        let mut m = vec![Bound::INFINITY; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = Bound::LE_ZERO;
        }
        Zone { dim, m, canonical: false, empty: false }
    }

    /// The normalized empty zone of dimension `dim`.
    pub fn empty(dim: usize) -> Zone {
        Zone { dim, m: vec![Bound::LT_ZERO; dim * dim], canonical: true, empty: true }
    }

    /// Builds a zone from a row-major matrix. The result is not closed.
    pub fn from_matrix(dim: usize, m: Vec<Bound>) -> Zone {
        assert_eq!(m.len(), dim * dim, "matrix must be dim x dim");
        Zone { dim, m, canonical: false, empty: false }
    }

    /// Tightens entry `(i, j)` without re-closing. Chainable builder helper.
    pub fn with(mut self, i: usize, j: usize, b: Bound) -> Zone {
        self.tighten_raw(i, j, b);
        self
    }

    /// Tightens entry `(i, j)` to `min(m[i][j], b)`, leaving the matrix unclosed.
    pub fn tighten_raw(&mut self, i: usize, j: usize, b: Bound) {
        if self.empty {
            return;
        }
        let k = i * self.dim + j;
        if b < self.m[k] {
            self.m[k] = b;
            self.canonical = false;
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of proper clocks.
    pub fn clocks(&self) -> usize {
        self.dim - 1
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Bound {
        self.m[i * self.dim + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, b: Bound) {
        self.m[i * self.dim + j] = b;
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Row-major view of the matrix.
    pub fn entries(&self) -> &[Bound] {
        &self.m
    }

    /// Shortest-path closure. Marks the zone empty on a negative cycle.
    pub fn canonicalize(&self) -> Zone {
        let mut z = self.clone();
        z.canonicalize_in_place();
        z
    }

    pub fn canonicalize_in_place(&mut self) {
        if self.canonical {
            return;
        }
        if !close_matrix(&mut self.m, self.dim) {
            *self = Zone::empty(self.dim);
            return;
        }
        self.canonical = true;
    }

    /// Whether no valuation satisfies the zone.
    pub fn is_empty(&self) -> bool {
        if self.empty {
            return true;
        }
        if self.canonical {
            return false;
        }
        self.canonicalize().empty
    }

    /// `self ⊇ other`. Both zones are closed first if needed.
    pub fn includes(&self, other: &Zone) -> bool {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let a = self.closed();
        let b = other.closed();
        if b.empty {
            return true;
        }
        if a.empty {
            return false;
        }
        b.m.iter().zip(a.m.iter()).all(|(x, y)| x <= y)
    }

    fn closed(&self) -> std::borrow::Cow<'_, Zone> {
        if self.canonical {
            std::borrow::Cow::Borrowed(self)
        } else {
            std::borrow::Cow::Owned(self.canonicalize())
        }
    }

    /// Future closure: lets an arbitrary amount of time elapse.
    pub fn up(&self) -> Zone {
        let mut z = self.clone();
        z.up_in_place();
        z
    }

    pub fn up_in_place(&mut self) {
        self.canonicalize_in_place();
        if self.empty {
            return;
        }
        for i in 1..self.dim {
            self.set(i, 0, Bound::INFINITY);
        }
    }

    /// Intersects with the constraint `x_i - x_j ≼ b`, keeping the zone closed.
    pub fn constrain(&mut self, i: usize, j: usize, b: Bound) {
        self.canonicalize_in_place();
        if self.empty || b >= self.get(i, j) {
            return;
        }
        if self.get(j, i).add(b) < Bound::LE_ZERO {
            *self = Zone::empty(self.dim);
            return;
        }
        self.set(i, j, b);
        let dim = self.dim;
        for p in 0..dim {
            let pi = self.get(p, i);
            if pi.is_infinite() {
                continue;
            }
            let via = pi.add(b);
            for q in 0..dim {
                let cand = via.add(self.get(j, q));
                if cand < self.get(p, q) {
                    self.set(p, q, cand);
                }
            }
        }
    }

    /// Intersects with a conjunction of atomic clock constraints.
    pub fn intersect_guard(&self, guard: &[ClockBound]) -> Zone {
        let mut z = self.clone();
        z.intersect_guard_in_place(guard);
        z
    }

    pub fn intersect_guard_in_place(&mut self, guard: &[ClockBound]) {
        for cb in guard {
            match *cb {
                ClockBound::Upper { clock, bound } => self.constrain(clock, 0, bound),
                ClockBound::Lower { clock, bound } => self.constrain(0, clock, bound),
            }
            if self.empty {
                return;
            }
        }
    }

    /// Sets the given clocks to zero.
    pub fn reset(&self, clocks: &[usize]) -> Zone {
        let mut z = self.clone();
        z.reset_in_place(clocks);
        z
    }

    pub fn reset_in_place(&mut self, clocks: &[usize]) {
        self.canonicalize_in_place();
        if self.empty {
            return;
        }
        for &x in clocks {
            assert!(x != 0 && x < self.dim, "cannot reset clock {x}");
            for j in 0..self.dim {
                let row = self.get(0, j);
                let col = self.get(j, 0);
                self.set(x, j, row);
                self.set(j, x, col);
            }
            self.set(x, x, Bound::LE_ZERO);
        }
    }

    /// The Extra+_LU extrapolation followed by closure.
    pub fn extrapolate_lu_plus(&self, lu: &LuBounds) -> Zone {
        let mut z = self.clone();
        z.extrapolate_lu_plus_in_place(lu);
        z
    }

    pub fn extrapolate_lu_plus_in_place(&mut self, lu: &LuBounds) {
        assert_eq!(lu.dim(), self.dim, "LU bounds do not match the zone dimension");
        self.canonicalize_in_place();
        if self.empty {
            return;
        }
        let dim = self.dim;
        // `-c > k` with `k = -inf` always holds.
        let exceeds = |c: i64, k: Option<i64>| k.is_none_or(|k| c > k);
        let old = self.m.clone();
        let get_old = |i: usize, j: usize| old[i * dim + j];
        let lower_of = |i: usize| -get_old(0, i).value().expect("lower bounds are finite");
        let mut changed = false;
        for i in 0..dim {
            for j in 0..dim {
                if i == j {
                    continue;
                }
                let c = get_old(i, j);
                let next = if i != 0
                    && (c.value().is_some_and(|v| exceeds(v, lu.lower(i)))
                        || exceeds(lower_of(i), lu.lower(i)))
                {
                    Bound::INFINITY
                } else if j != 0 && exceeds(lower_of(j), lu.upper(j)) {
                    if i != 0 {
                        Bound::INFINITY
                    } else {
                        // x_j is above every upper constant: keep only `x_j > U(x_j)`.
                        // With no upper guard at all, only non-negativity remains.
                        match lu.upper(j) {
                            Some(u) => Bound::strict(-u),
                            None => Bound::LE_ZERO,
                        }
                    }
                } else {
                    c
                };
                if next != c {
                    changed = true;
                }
                self.m[i * dim + j] = next;
            }
        }
        if changed {
            self.canonical = false;
            self.canonicalize_in_place();
        }
    }

    /// Whether the (non-negative) valuation `v` lies in the zone. `v[0]` must be 0.
    pub fn contains(&self, v: &[f64]) -> bool {
        assert_eq!(v.len(), self.dim);
        if self.empty {
            return false;
        }
        for i in 0..self.dim {
            for j in 0..self.dim {
                if i != j && !self.get(i, j).admits(v[i] - v[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Intersection of two zones of equal dimension.
    pub fn intersection(&self, other: &Zone) -> Zone {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if self.empty || other.empty {
            return Zone::empty(self.dim);
        }
        let m = self.m.iter().zip(other.m.iter()).map(|(a, b)| *a.min(b)).collect();
        let mut z = Zone::from_matrix(self.dim, m);
        z.canonicalize_in_place();
        z
    }

    /// Renders the closed zone as a conjunction over the given clock names
    /// (`names[0]` is ignored). Redundant `x >= 0` facts are omitted.
    pub fn to_constraints(&self, names: &[String]) -> String {
        let z = self.closed();
        if z.empty {
            return "false".to_string();
        }
        let mut parts = Vec::new();
        for i in 1..z.dim {
            let lo = z.get(0, i);
            if lo != Bound::LE_ZERO {
                let op = if lo.is_strict() { ">" } else { ">=" };
                parts.push(format!("{} {} {}", names[i], op, -lo.value().unwrap()));
            }
            let hi = z.get(i, 0);
            if let Some(c) = hi.value() {
                let op = if hi.is_strict() { "<" } else { "<=" };
                parts.push(format!("{} {} {}", names[i], op, c));
            }
        }
        for i in 1..z.dim {
            for j in 1..z.dim {
                if i == j {
                    continue;
                }
                let b = z.get(i, j);
                if let Some(c) = b.value() {
                    let op = if b.is_strict() { "<" } else { "<=" };
                    parts.push(format!("{} - {} {} {}", names[i], names[j], op, c));
                }
            }
        }
        if parts.is_empty() {
            "true".to_string()
        } else {
            parts.join(" && ")
        }
    }
}

impl fmt::Debug for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "Zone(empty, dim={})", self.dim);
        }
        writeln!(f, "Zone(dim={}, canonical={})", self.dim, self.canonical)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// An atomic clock bound as it enters a zone: `x <| c` or `x |> c`.
///
/// Guards are lowered to these once, so zone code never sees `=`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClockBound {
    /// `x - x0 ≼ bound`.
    Upper { clock: usize, bound: Bound },
    /// `x0 - x ≼ bound`, i.e. the bound value is the negated constant.
    Lower { clock: usize, bound: Bound },
}

/// Floyd-Warshall closure of a row-major `dim x dim` matrix.
/// Returns `false` if a negative cycle exists.
pub(crate) fn close_matrix(m: &mut [Bound], dim: usize) -> bool {
    for k in 0..dim {
        for i in 0..dim {
            let ik = m[i * dim + k];
            if ik.is_infinite() {
                continue;
            }
            for j in 0..dim {
                let cand = ik.add(m[k * dim + j]);
                if cand < m[i * dim + j] {
                    m[i * dim + j] = cand;
                }
            }
        }
        if m[k * dim + k] < Bound::LE_ZERO {
            return false;
        }
    }
    (0..dim).all(|i| m[i * dim + i] >= Bound::LE_ZERO)
}
