//! Strand operations agree with the pullbacks of the free group maps that
//! realize them, and pullback is a contravariant functor.


use ktg_core::associator::maps;
use ktg_core::diagram::enumerate_diagrams;
use ktg_core::relations::{reduce, LocalBases};
use ktg_core::strand_algebra::*;
use ktg_core::LinComb;
use proptest::prelude::*;

fn diagrams(n: usize) -> Vec<LinComb> {
    let s = strand_skeleton(n);
    (0..=2).flat_map(|d| enumerate_diagrams(&s, d)).map(|d| LinComb::from_diagram(s.clone(), d)).collect()
}

fn perms(n: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    let mut v: Vec<usize> = (1..=n).collect();
    permute_from(&mut v, 0, &mut out);
    out
}

fn permute_from(v: &mut Vec<usize>, k: usize, out: &mut Vec<Perm>) {
    if k == v.len() {
        out.push(Perm::new(v.clone()).unwrap());
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute_from(v, k + 1, out);
        v.swap(k, i);
    }
}

#[test]
fn operations_are_pullbacks() {
    for n in 1..=4 {
        for v in diagrams(n) {
            for i in 0..=n + 1 {
                assert_eq!(delta_raw(&v, i).unwrap(), pullback(&FreeGroupMap::doubling(n, i).unwrap(), &v).unwrap());
            }
            for i in 1..=n {
                assert_eq!(delete_raw(&v, i).unwrap(), pullback(&FreeGroupMap::deletion(n, i).unwrap(), &v).unwrap());
            }
            for p in perms(n) {
                assert_eq!(permute_raw(&v, &p).unwrap(), pullback(&FreeGroupMap::permutation(&p), &v).unwrap());
            }
            assert_eq!(switch_all_raw(&v).unwrap(), pullback(&FreeGroupMap::all_inverted(n), &v).unwrap());
        }
    }
}

#[test]
fn beta5_has_order_three() {
    let b = LocalBases::new();
    let beta = maps::beta5().unwrap();
    for v in diagrams(3) {
        let mut w = v.clone();
        for _ in 0..3 {
            w = pullback(&beta, &w).unwrap();
        }
        assert_eq!(reduce(&b, &w).unwrap(), reduce(&b, &v).unwrap());
    }
    assert_eq!(beta.compose(&beta).unwrap().compose(&beta).unwrap(), FreeGroupMap::identity(3));
}

fn word(rank: usize) -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec((1..=rank as i32, any::<bool>()).prop_map(|(g, inv)| if inv { -g } else { g }), 0..3)
}

fn map(source: usize, target: usize) -> impl Strategy<Value = FreeGroupMap> {
    prop::collection::vec(word(target), source).prop_map(move |ws| {
        let ws: Vec<&[i32]> = ws.iter().map(Vec::as_slice).collect();
        FreeGroupMap::from_signed(target, &ws).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn pullback_is_contravariant(
        (outer, inner) in (1usize..=3, 1usize..=3, 1usize..=3)
            .prop_flat_map(|(l, m, n)| (map(m, n), map(l, m)))
    ) {
        let b = LocalBases::new();
        let composite = outer.compose(&inner).unwrap();
        for v in diagrams(outer.target_rank()) {
            let direct = reduce(&b, &pullback(&composite, &v).unwrap()).unwrap();
            let staged = pullback(&inner, &pullback(&outer, &v).unwrap()).unwrap();
            prop_assert_eq!(direct, reduce(&b, &staged).unwrap());
        }
    }
}

#[test]
fn pullback_descends() {
    let b = LocalBases::new();
    let beta = maps::beta3().unwrap();
    for v in diagrams(beta.target_rank()) {
        let direct = reduce(&b, &pullback(&beta, &v).unwrap()).unwrap();
        let via = reduce(&b, &pullback(&beta, &reduce(&b, &v).unwrap()).unwrap()).unwrap();
        assert_eq!(direct, via);
    }
}
