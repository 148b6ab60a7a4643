//! Helpers shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use tacheck::dbm::{Bound, Zone};
use tacheck::model::{Atom, Cmp, Transition};
use tacheck::zone_graph::post_zone;

pub const CMPS: [Cmp; 5] = [Cmp::Lt, Cmp::Le, Cmp::Eq, Cmp::Ge, Cmp::Gt];

/// A random transition over clocks `1..=clocks` with constants up to `max`.
pub fn random_transition(rng: &mut impl Rng, clocks: usize, max: i64) -> Transition {
    let mut atoms = Vec::new();
    let mut resets = Vec::new();
    for c in 1..=clocks {
        if rng.gen_bool(0.45) {
            atoms.push(Atom::new(c, CMPS[rng.gen_range(0..5)], rng.gen_range(0..=max)));
        }
        if rng.gen_bool(0.15) {
            atoms.push(Atom::new(c, CMPS[rng.gen_range(0..5)], rng.gen_range(0..=max)));
        }
        if rng.gen_bool(0.4) {
            resets.push(c);
        }
    }
    Transition::new(0, 0).guard(atoms).reset(resets)
}

/// A random sequence of one to `max_len` transitions.
pub fn random_sequence(rng: &mut impl Rng, clocks: usize, max: i64, max_len: usize) -> Vec<Transition> {
    let len = rng.gen_range(1..=max_len);
    (0..len).map(|_| random_transition(rng, clocks, max)).collect()
}

/// All valuations with coordinates in `{0, 0.5, ..., top}`.
pub fn half_grid(clocks: usize, top: i64) -> Vec<Vec<f64>> {
    let steps = (2 * top + 1) as usize;
    let mut out = vec![Vec::new()];
    for _ in 0..clocks {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..steps).map(move |k| {
                    let mut w = v.clone();
                    w.push(k as f64 / 2.0);
                    w
                })
            })
            .collect();
    }
    out
}

/// `v` with the reference clock prepended, as zones expect.
pub fn with_reference(v: &[f64]) -> Vec<f64> {
    std::iter::once(0.0).chain(v.iter().copied()).collect()
}

/// Whether some run of `seq` from `v` lasting exactly `delay` ends in
/// `target`, for half-integer inputs. Computed on point zones with doubled
/// constants and an extra clock that measures the elapsed time.
pub fn reaches(seq: &[Transition], v: &[f64], delay: f64, target: &[f64]) -> bool {
    let n = v.len();
    let twice = |x: f64| {
        assert_eq!((2.0 * x).fract(), 0.0, "half-integer values only");
        (2.0 * x) as i64
    };
    let mut z = Zone::universe(n + 1);
    for (i, &x) in v.iter().chain([0.0].iter()).enumerate() {
        z.tighten_raw(i + 1, 0, Bound::weak(twice(x)));
        z.tighten_raw(0, i + 1, Bound::weak(-twice(x)));
    }
    let mut z = z.canonicalize();
    for t in seq {
        let mut t2 = t.clone();
        for a in &mut t2.guard.atoms {
            a.constant *= 2;
        }
        match post_zone(&z, &t2, None) {
            Some(next) => z = next,
            None => return false,
        }
    }
    let mut p = vec![0.0];
    p.extend(target.iter().map(|&x| 2.0 * x));
    p.push(2.0 * delay);
    z.contains(&p)
}

/// The loose valuations of a run from `v` to `target` lasting `delay`.
pub fn loose_pair(v: &[f64], delay: f64, target: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let left = with_reference(v);
    let right = std::iter::once(-delay).chain(target.iter().map(|&x| x - delay)).collect();
    (left, right)
}

/// Fires `seq` from `v` with random half-integer delays. Returns the total
/// delay and the final valuation when every guard held.
pub fn simulate(rng: &mut impl Rng, seq: &[Transition], v: &[f64]) -> Option<(f64, Vec<f64>)> {
    let mut cur = with_reference(v);
    let mut total = 0.0;
    for t in seq {
        let d = rng.gen_range(0..=6) as f64 / 2.0;
        total += d;
        cur[1..].iter_mut().for_each(|x| *x += d);
        if !t.guard.holds(&cur) {
            return None;
        }
        for &c in &t.resets {
            cur[c] = 0.0;
        }
    }
    Some((total, cur.split_off(1)))
}
