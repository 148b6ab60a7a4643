//! Alur–Dill clock regions.

use crate::dbm::{Bound, Zone};
use crate::model::{Atom, Cmp, Guard};

/// A region for clocks `1..=n` and maximum constant `M`.
///
/// `ints[i]` is the integer part of clock `i + 1`, or `M + 1` when the clock
/// is above `M`. For clocks at most `M`, `class[i]` is 0 when the fractional
/// part is zero and otherwise the rank (from 1) of its fractional part among
/// the distinct nonzero ones. Clocks above `M` always have class 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Region {
    max: i64,
    ints: Vec<i64>,
    class: Vec<u8>,
}

impl Region {
    /// The region of the valuation `v` (clock `i + 1` has value `v[i]`).
    pub fn of(v: &[f64], max: i64) -> Region {
        assert!(v.iter().all(|&x| x >= 0.0), "valuations are non-negative");
        let mut ints = Vec::with_capacity(v.len());
        let mut fracs = Vec::with_capacity(v.len());
        for &x in v {
            if x > max as f64 {
                ints.push(max + 1);
                fracs.push(0.0);
            } else {
                let i = x.floor();
                ints.push(i as i64);
                fracs.push(x - i);
            }
        }
        let mut distinct: Vec<f64> = fracs.iter().copied().filter(|&f| f > 0.0).collect();
        distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
        distinct.dedup();
        let class = fracs
            .iter()
            .map(|&f| if f > 0.0 { (distinct.iter().position(|&d| d == f).unwrap() + 1) as u8 } else { 0 })
            .collect();
        Region { max, ints, class }
    }

    pub fn zero(clocks: usize, max: i64) -> Region {
        Region { max, ints: vec![0; clocks], class: vec![0; clocks] }
    }

    pub fn clocks(&self) -> usize {
        self.ints.len()
    }

    pub fn max_constant(&self) -> i64 {
        self.max
    }

    fn above(&self, i: usize) -> bool {
        self.ints[i] > self.max
    }

    fn classes(&self) -> u8 {
        self.class.iter().copied().max().unwrap_or(0)
    }

    /// Renumbers the nonzero classes densely from 1.
    fn normalize(mut self) -> Region {
        let mut used: Vec<u8> = self.class.iter().copied().filter(|&c| c > 0).collect();
        used.sort_unstable();
        used.dedup();
        for c in &mut self.class {
            if *c > 0 {
                *c = used.iter().position(|u| u == c).unwrap() as u8 + 1;
            }
        }
        self
    }

    /// The next region reached by letting time pass, or `None` when every
    /// clock is already above the maximum constant.
    pub fn time_successor(&self) -> Option<Region> {
        let n = self.clocks();
        if (0..n).all(|i| self.above(i)) {
            return None;
        }
        let mut r = self.clone();
        let has_integral = (0..n).any(|i| !self.above(i) && self.class[i] == 0);
        if has_integral {
            for i in 0..n {
                if self.above(i) {
                    continue;
                }
                if self.class[i] == 0 {
                    if self.ints[i] == self.max {
                        r.ints[i] = self.max + 1;
                    } else {
                        r.class[i] = 1;
                    }
                } else {
                    r.class[i] = self.class[i] + 1;
                }
            }
        } else {
            let top = self.classes();
            for i in 0..n {
                if !self.above(i) && self.class[i] == top {
                    r.ints[i] += 1;
                    r.class[i] = 0;
                }
            }
        }
        Some(r.normalize())
    }

    /// The region itself followed by all its time successors.
    pub fn time_successors(&self) -> Vec<Region> {
        let mut out = vec![self.clone()];
        while let Some(next) = out.last().unwrap().time_successor() {
            out.push(next);
        }
        out
    }

    pub fn reset(&self, clocks: &[usize]) -> Region {
        let mut r = self.clone();
        for &c in clocks {
            r.ints[c - 1] = 0;
            r.class[c - 1] = 0;
        }
        r.normalize()
    }

    pub fn satisfies_atom(&self, a: &Atom) -> bool {
        assert!(a.constant <= self.max, "guard constant above the region bound");
        let i = a.clock - 1;
        if self.above(i) {
            return matches!(a.cmp, Cmp::Gt | Cmp::Ge);
        }
        let (int, frac) = (self.ints[i], self.class[i] > 0);
        let c = a.constant;
        match a.cmp {
            Cmp::Lt => int < c,
            Cmp::Le => int < c || (int == c && !frac),
            Cmp::Eq => int == c && !frac,
            Cmp::Ge => int >= c,
            Cmp::Gt => int > c || (int == c && frac),
        }
    }

    pub fn satisfies(&self, g: &Guard) -> bool {
        g.atoms.iter().all(|a| self.satisfies_atom(a))
    }

    /// A valuation inside the region.
    pub fn representative(&self) -> Vec<f64> {
        // A power of two keeps the fractions exact.
        let k = f64::from((u32::from(self.classes()) + 1).next_power_of_two());
        (0..self.clocks())
            .map(|i| {
                if self.above(i) {
                    (self.max + 1) as f64
                } else {
                    self.ints[i] as f64 + f64::from(self.class[i]) / k
                }
            })
            .collect()
    }

    /// The region as a zone over clocks `1..=n`.
    pub fn to_zone(&self) -> Zone {
        let n = self.clocks();
        let mut z = Zone::universe(n);
        for i in 0..n {
            let x = i + 1;
            if self.above(i) {
                z.tighten_raw(0, x, Bound::strict(-self.max));
            } else if self.class[i] == 0 {
                z.tighten_raw(x, 0, Bound::weak(self.ints[i]));
                z.tighten_raw(0, x, Bound::weak(-self.ints[i]));
            } else {
                z.tighten_raw(x, 0, Bound::strict(self.ints[i] + 1));
                z.tighten_raw(0, x, Bound::strict(-self.ints[i]));
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i == j || self.above(i) || self.above(j) || self.class[i] == 0 || self.class[j] == 0 {
                    continue;
                }
                let d = self.ints[i] - self.ints[j];
                if self.class[i] == self.class[j] {
                    z.tighten_raw(i + 1, j + 1, Bound::weak(d));
                } else if self.class[i] < self.class[j] {
                    z.tighten_raw(i + 1, j + 1, Bound::strict(d));
                }
            }
        }
        z.canonicalize()
    }

    /// Every region over `clocks` clocks with maximum constant `max`.
    pub fn enumerate(clocks: usize, max: i64) -> Vec<Region> {
        let mut out = Vec::new();
        let mut ints = vec![0; clocks];
        loop {
            let bounded: Vec<usize> = (0..clocks).filter(|&i| ints[i] <= max).collect();
            let mut class = vec![0u8; clocks];
            let b = bounded.len();
            let mut choice = vec![0u8; b];
            loop {
                let mut used: Vec<u8> = choice.iter().copied().filter(|&c| c > 0).collect();
                used.sort_unstable();
                used.dedup();
                let fractional_at_max = bounded.iter().zip(&choice).any(|(&i, &c)| c > 0 && ints[i] == max);
                if !fractional_at_max && used.iter().enumerate().all(|(k, &c)| c as usize == k + 1) {
                    for (k, &i) in bounded.iter().enumerate() {
                        class[i] = choice[k];
                    }
                    out.push(Region { max, ints: ints.clone(), class: class.clone() });
                }
                if !advance(&mut choice, b as u8) {
                    break;
                }
            }
            if !advance_ints(&mut ints, max + 1) {
                break;
            }
        }
        out
    }

    /// Upper bound `n! * 2^n * (2M + 2)^n` on the number of regions.
    pub fn count_bound(clocks: usize, max: i64) -> f64 {
        let fact: f64 = (1..=clocks).map(|k| k as f64).product();
        fact * 2f64.powi(clocks as i32) * ((2 * max + 2) as f64).powi(clocks as i32)
    }
}

/// Odometer over `0..=top` per digit.
fn advance(digits: &mut [u8], top: u8) -> bool {
    for d in digits.iter_mut() {
        if *d < top {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

fn advance_ints(digits: &mut [i64], top: i64) -> bool {
    for d in digits.iter_mut() {
        if *d < top {
            *d += 1;
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let r = Region::of(&[1.5, 2.5], 3);
        assert_eq!(r.ints, vec![1, 2]);
        assert_eq!(r.class, vec![1, 1]);
        let r = Region::of(&[0.0, 0.0], 3);
        assert_eq!(r, Region::zero(2, 3));
        let r = Region::of(&[7.25, 0.5], 3);
        assert_eq!(r.ints, vec![4, 0]);
        assert_eq!(r.class, vec![0, 1]);
    }

    #[test]
    fn one_clock_count() {
        for m in 0..5 {
            assert_eq!(Region::enumerate(1, m).len() as i64, 2 * m + 2);
        }
    }

    #[test]
    fn counts_stay_below_the_bound() {
        for n in 0..=3 {
            for m in 0..=3 {
                let all = Region::enumerate(n, m);
                assert!(all.len() as f64 <= Region::count_bound(n, m));
                let mut sorted = all.clone();
                sorted.sort();
                sorted.dedup();
                assert_eq!(sorted.len(), all.len());
            }
        }
    }

    #[test]
    fn representatives_round_trip() {
        for r in Region::enumerate(3, 2) {
            let v = r.representative();
            assert_eq!(Region::of(&v, 2), r);
            let mut p = vec![0.0];
            p.extend(&v);
            assert!(r.to_zone().contains(&p));
        }
    }

    #[test]
    fn time_successors_follow_the_diagonal() {
        let r = Region::of(&[0.0, 0.5], 1);
        let seq = r.time_successors();
        let reps: Vec<Region> = [[0.0, 0.5], [0.25, 0.5], [0.5, 1.0], [0.75, 1.25], [1.0, 1.5], [1.5, 2.0]]
            .iter()
            .map(|v| Region::of(v, 1))
            .collect();
        assert_eq!(seq, reps);
    }

    #[test]
    fn guard_satisfaction() {
        let r = Region::of(&[1.5], 2);
        assert!(r.satisfies_atom(&Atom::new(1, Cmp::Gt, 1)));
        assert!(r.satisfies_atom(&Atom::new(1, Cmp::Lt, 2)));
        assert!(!r.satisfies_atom(&Atom::new(1, Cmp::Le, 1)));
        let top = Region::of(&[9.0], 2);
        assert!(top.satisfies_atom(&Atom::new(1, Cmp::Ge, 2)));
        assert!(!top.satisfies_atom(&Atom::new(1, Cmp::Eq, 2)));
    }
}
