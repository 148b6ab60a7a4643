//! Algebraic laws of zones and transformation graphs.

mod common;

use proptest::prelude::*;
use tacheck::dbm::{Bound, LuBounds, Zone};
use tacheck::model::{Atom, Transition};
use tacheck::transform_graph::TransGraph;
use tacheck::zone_graph::post_zone;

use common::{with_reference, CMPS};

const CLOCKS: usize = 3;
const MAX: i64 = 3;

fn transition(clocks: usize) -> impl Strategy<Value = Transition> {
    (
        prop::collection::vec((1..=clocks, 0..CMPS.len(), 0..=MAX), 0..=3),
        prop::collection::vec(any::<bool>(), clocks),
    )
        .prop_map(|(atoms, resets)| {
            Transition::new(0, 0)
                .guard(atoms.into_iter().map(|(c, k, v)| Atom::new(c, CMPS[k], v)).collect())
                .reset(resets.iter().enumerate().filter(|(_, &r)| r).map(|(i, _)| i + 1).collect())
        })
}

fn sequence(clocks: usize, len: usize) -> impl Strategy<Value = Vec<Transition>> {
    prop::collection::vec(transition(clocks), 1..=len)
}

/// A zone cut out by a few random difference constraints.
fn zone(clocks: usize) -> impl Strategy<Value = Zone> {
    prop::collection::vec((0..=clocks, 0..=clocks, -MAX..=MAX, any::<bool>()), 0..6).prop_map(move |cs| {
        let mut z = Zone::universe(clocks);
        for (i, j, v, strict) in cs {
            if i != j {
                z.tighten_raw(i, j, if strict { Bound::strict(v) } else { Bound::weak(v) });
            }
        }
        z.canonicalize()
    })
}

fn lu(clocks: usize) -> impl Strategy<Value = LuBounds> {
    prop::collection::vec((prop::option::of(0..=MAX), prop::option::of(0..=MAX)), clocks).prop_map(move |bs| {
        let mut lu = LuBounds::new(clocks);
        for (i, (l, u)) in bs.into_iter().enumerate() {
            if let Some(l) = l {
                lu.raise_lower(i + 1, l);
            }
            if let Some(u) = u {
                lu.raise_upper(i + 1, u);
            }
        }
        lu
    })
}

fn grid_point(clocks: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0..=2 * (MAX + 1)).prop_map(|k| k as f64 / 2.0), clocks)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn composition_is_associative(a in transition(CLOCKS), b in transition(CLOCKS), c in transition(CLOCKS)) {
        let (ga, gb, gc) = (
            TransGraph::of_transition(&a, CLOCKS),
            TransGraph::of_transition(&b, CLOCKS),
            TransGraph::of_transition(&c, CLOCKS),
        );
        prop_assert_eq!(ga.compose(&gb).compose(&gc), ga.compose(&gb.compose(&gc)));
    }

    #[test]
    fn shortening_commutes_with_composition(seq in sequence(CLOCKS, 4)) {
        prop_assert_eq!(TransGraph::of_sequence(&seq, CLOCKS), TransGraph::of_sequence_unshortened(&seq, CLOCKS));
    }

    #[test]
    fn identity_is_neutral(a in transition(CLOCKS)) {
        let g = TransGraph::of_transition(&a, CLOCKS);
        let id = TransGraph::identity(CLOCKS);
        prop_assert_eq!(id.compose(&g), g.clone());
        prop_assert_eq!(g.compose(&id), g);
    }

    #[test]
    fn left_projection_shrinks_along_a_sequence(seq in sequence(CLOCKS, 3), t in transition(CLOCKS)) {
        let g = TransGraph::of_sequence(&seq, CLOCKS);
        let longer = g.compose(&TransGraph::of_transition(&t, CLOCKS));
        prop_assert!(g.left().includes(&longer.left()));
    }

    #[test]
    fn right_projection_is_the_exact_post(seq in sequence(CLOCKS, 3)) {
        let g = TransGraph::of_sequence(&seq, CLOCKS);
        let mut z = Some(Zone::universe(CLOCKS));
        for t in &seq {
            z = z.and_then(|z| post_zone(&z, t, None));
        }
        match z {
            Some(z) => prop_assert_eq!(g.right(), z),
            None => prop_assert!(g.is_empty()),
        }
    }

    #[test]
    fn closure_is_idempotent(z in zone(CLOCKS)) {
        prop_assert!(z.is_canonical());
        prop_assert_eq!(z.canonicalize(), z);
    }

    #[test]
    fn up_and_reset_grow_or_move(z in zone(CLOCKS), v in grid_point(CLOCKS)) {
        let p = with_reference(&v);
        prop_assert!(z.up().includes(&z));
        if z.contains(&p) {
            let mut r = p.clone();
            r[1] = 0.0;
            prop_assert!(z.reset(&[1]).contains(&r));
        }
    }

    #[test]
    fn extrapolation_is_a_larger_fixpoint(z in zone(CLOCKS), lu in lu(CLOCKS)) {
        let e = z.extrapolate_lu_plus(&lu);
        prop_assert!(e.includes(&z));
        prop_assert_eq!(e.extrapolate_lu_plus(&lu), e);
    }

    #[test]
    fn intersection_is_pointwise(a in zone(CLOCKS), b in zone(CLOCKS), v in grid_point(CLOCKS)) {
        let p = with_reference(&v);
        let i = a.intersection(&b);
        prop_assert_eq!(i.contains(&p), a.contains(&p) && b.contains(&p));
        prop_assert!(a.includes(&i) && b.includes(&i));
        prop_assert_eq!(i.is_empty(), b.intersection(&a).is_empty());
    }
}

/// A pair of loose valuations satisfies the graph of a sequence exactly when
/// a run of the sequence connects them.
#[test]
fn graphs_reflect_runs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let (mut positive, mut negative) = (0, 0);
    while positive + negative < 2000 {
        let clocks = rng.gen_range(1..=CLOCKS);
        let seq = common::random_sequence(&mut rng, clocks, MAX, 3);
        let g = TransGraph::of_sequence(&seq, clocks);
        let v: Vec<f64> = (0..clocks).map(|_| rng.gen_range(0..=8) as f64 / 2.0).collect();
        let (delay, target) = match common::simulate(&mut rng, &seq, &v) {
            Some(run) if rng.gen_bool(0.5) => run,
            _ => (
                rng.gen_range(0..=16) as f64 / 2.0,
                (0..clocks).map(|_| rng.gen_range(0..=16) as f64 / 2.0).collect(),
            ),
        };
        let expected = common::reaches(&seq, &v, delay, &target);
        let (l, r) = common::loose_pair(&v, delay, &target);
        assert_eq!(g.admits(&l, &r), expected, "{seq:?} from {v:?} for {delay} to {target:?}");
        if expected {
            positive += 1;
        } else {
            negative += 1;
        }
    }
    assert!(positive > 300, "too few runs sampled: {positive}");
}
