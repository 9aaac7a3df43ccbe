//! Chords ending on the dumbbell's bridge.

use std::sync::Arc;

use ktg_core::coeff::qi;
use ktg_core::diagram::{enumerate_diagrams, ChordDiagram};
use ktg_core::relations::{reduce, LocalBases};
use ktg_core::skeleton::*;
use ktg_core::LinComb;

fn bridge(s: &Skeleton) -> EdgeId {
    s.edge_ids().find(|&e| is_bridge(s, e)).unwrap()
}

fn on_bridge(s: &Skeleton, n: usize) -> Vec<ChordDiagram> {
    let b = bridge(s);
    enumerate_diagrams(s, n).into_iter().filter(|d| d.count_on(b) > 0).collect()
}

/// Whether each loop carries an endpoint of a chord leaving that loop.
fn both_loops_open(s: &Skeleton, d: &ChordDiagram) -> bool {
    let b = bridge(s);
    s.edge_ids().filter(|&e| e != b).all(|e| {
        let on = d.on_edge(e);
        on.iter().any(|c| on.iter().filter(|x| *x == c).count() == 1)
    })
}

#[test]
fn degree_one_bridge_chords_vanish() {
    let bases = LocalBases::new();
    let s = dumbbell();
    let arc = Arc::new(s.clone());
    for d in on_bridge(&s, 1) {
        assert!(reduce(&bases, &LinComb::from_diagram(arc.clone(), d)).unwrap().is_zero());
    }
}

#[test]
fn degree_two_survivors_span_one_class() {
    let bases = LocalBases::new();
    let s = dumbbell();
    let arc = Arc::new(s.clone());
    let mut class: Option<LinComb> = None;
    let mut survivors = 0;
    for d in on_bridge(&s, 2) {
        let v = reduce(&bases, &LinComb::from_diagram(arc.clone(), d.clone())).unwrap();
        if v.is_zero() {
            continue;
        }
        assert!(both_loops_open(&s, &d), "{d:?}");
        survivors += 1;
        match &class {
            None => class = Some(v),
            Some(z) => {
                let (lead, c) = z.terms().next().unwrap();
                let k = v.coeff(lead).cloned().unwrap_or_default() / c.clone();
                assert_eq!(v, z.scale(&k), "{d:?}");
                assert!(k == qi(1) || k == qi(-1) || k == qi(2) || k == qi(-2));
            }
        }
    }
    assert_eq!(survivors, 6);
}
