//! Induced operations are well defined on the quotients: applying them
//! before or after reduction gives the same normal form.

use std::collections::BTreeSet;
use std::sync::Arc;

use ktg_core::diagram::enumerate_diagrams;
use ktg_core::graph_ops;
use ktg_core::relations::{reduce, LocalBases};
use ktg_core::skeleton::*;
use ktg_core::{LinComb, Result};

const MAX_DEGREE: usize = 2;

fn diagrams(s: &Skeleton) -> Vec<LinComb> {
    let arc = Arc::new(s.clone());
    (0..=MAX_DEGREE)
        .flat_map(|n| enumerate_diagrams(s, n))
        .map(|d| LinComb::from_diagram(arc.clone(), d))
        .collect()
}

fn check_unary(bases: &LocalBases, s: &Skeleton, op: impl Fn(&LinComb) -> Result<LinComb>) -> usize {
    let mut n = 0;
    for v in diagrams(s) {
        let direct = reduce(bases, &op(&v).unwrap()).unwrap();
        let via = reduce(bases, &op(&reduce(bases, &v).unwrap()).unwrap()).unwrap();
        assert_eq!(direct, via, "{v:?}");
        n += 1;
    }
    n
}

fn check_binary(
    bases: &LocalBases,
    s1: &Skeleton,
    s2: &Skeleton,
    op: impl Fn(&LinComb, &LinComb) -> Result<LinComb>,
) {
    for a in diagrams(s1) {
        for b in diagrams(s2) {
            let total: usize = a.degrees().into_iter().chain(b.degrees()).sum();
            if total > MAX_DEGREE {
                continue;
            }
            let direct = reduce(bases, &op(&a, &b).unwrap()).unwrap();
            let ra = reduce(bases, &a).unwrap();
            let rb = reduce(bases, &b).unwrap();
            let via = reduce(bases, &op(&ra, &rb).unwrap()).unwrap();
            assert_eq!(direct, via);
        }
    }
}

fn skeletons() -> Vec<Skeleton> {
    vec![circle(), theta(), dumbbell(), tetrahedron()]
}

#[test]
fn switch_descends() {
    let bases = LocalBases::new();
    for s in skeletons() {
        for e in s.edge_ids() {
            check_unary(&bases, &s, |v| graph_ops::switch(v, e));
        }
    }
}

#[test]
fn delete_descends() {
    let bases = LocalBases::new();
    let mut ops = 0;
    for s in skeletons() {
        for e in s.edge_ids() {
            if delete_edge(&s, e).is_ok() {
                check_unary(&bases, &s, |v| graph_ops::delete(v, e));
                ops += 1;
            }
        }
    }
    assert_eq!(ops, 6);
}

#[test]
fn unzip_descends() {
    let bases = LocalBases::new();
    let mut ops = 0;
    for s in skeletons() {
        for e in s.edge_ids() {
            if unzip_edge(&s, e).is_ok() {
                check_unary(&bases, &s, |v| graph_ops::unzip(v, e));
                ops += 1;
            }
        }
    }
    assert_eq!(ops, 2);
}

#[test]
fn dotted_unzip_descends() {
    let bases = LocalBases::new();
    check_unary(&bases, &dotted_theta_middle(), |v| graph_ops::dotted_unzip(v, EdgeId(0)));
}

#[test]
fn connect_descends() {
    let bases = LocalBases::new();
    let cases = [
        (circle(), EdgeId(0), circle(), EdgeId(0)),
        (theta(), EdgeId(1), circle(), EdgeId(0)),
        (dumbbell(), EdgeId(1), circle(), EdgeId(0)),
        (theta(), EdgeId(0), theta(), EdgeId(2)),
        (tetrahedron(), EdgeId(5), circle(), EdgeId(0)),
    ];
    for (s1, e, s2, f) in cases {
        check_binary(&bases, &s1, &s2, |a, b| graph_ops::connect(a, e, b, f));
    }
}

#[test]
fn tree_connect_descends() {
    let bases = LocalBases::new();
    let t = theta();
    let y = |v| Tree::Vertices { vertices: BTreeSet::from([VertexId(v)]), edges: BTreeSet::new() };
    let pairs = [
        (EdgeEnd::tail(EdgeId(0)), EdgeEnd::head(EdgeId(0))),
        (EdgeEnd::head(EdgeId(1)), EdgeEnd::tail(EdgeId(1))),
        (EdgeEnd::head(EdgeId(2)), EdgeEnd::tail(EdgeId(2))),
    ];
    check_binary(&bases, &t, &t, |a, b| graph_ops::tree_connect(a, &y(0), b, &y(1), &pairs, (None, None)));
    let h = edge_tree(&t, EdgeId(0)).unwrap();
    let (t1, t2) = (EdgeId(1), EdgeId(2));
    let hpairs = [
        (EdgeEnd::head(t1), EdgeEnd::tail(t2)),
        (EdgeEnd::head(t2), EdgeEnd::tail(t1)),
        (EdgeEnd::tail(t1), EdgeEnd::head(t2)),
        (EdgeEnd::tail(t2), EdgeEnd::head(t1)),
    ];
    check_binary(&bases, &t, &t, |a, b| graph_ops::tree_connect(a, &h, b, &h, &hpairs, (None, None)));
    check_binary(&bases, &t, &t, |a, b| {
        graph_ops::tree_connect(a, &h, b, &h, &hpairs, (Some(VertexId(1)), Some(VertexId(0))))
    });
    let c = circle();
    let seg = [(EdgeEnd::head(EdgeId(1)), EdgeEnd::tail(EdgeId(0))), (EdgeEnd::tail(EdgeId(1)), EdgeEnd::head(EdgeId(0)))];
    check_binary(&bases, &t, &c, |a, b| {
        graph_ops::tree_connect(a, &Tree::Segment(EdgeId(1)), b, &Tree::Segment(EdgeId(0)), &seg, (None, None))
    });
}

#[test]
fn tree_clearing_is_root_independent() {
    let bases = LocalBases::new();
    let t = theta();
    let h = edge_tree(&t, EdgeId(0)).unwrap();
    let Tree::Vertices { vertices, edges } = &h else { unreachable!() };
    for v in diagrams(&t) {
        let a = graph_ops::clear_tree(&v, vertices, edges, VertexId(0)).unwrap();
        let b = graph_ops::clear_tree(&v, vertices, edges, VertexId(1)).unwrap();
        assert!(a.terms().all(|(d, _)| d.count_on(EdgeId(0)) == 0));
        assert_eq!(reduce(&bases, &a).unwrap(), reduce(&bases, &b).unwrap());
        assert_eq!(reduce(&bases, &a).unwrap(), reduce(&bases, &v).unwrap());
    }
}
