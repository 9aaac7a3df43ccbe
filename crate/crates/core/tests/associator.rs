use ktg_core::associator::*;
use ktg_core::coeff::{q, qi};
use ktg_core::strand_algebra::word;
use ktg_core::{LocalBases, Series};

fn solve(conditions: Conditions) -> SolutionFamily {
    solve_degree2(Superscript::Images, conditions, &LocalBases::new()).unwrap()
}

#[test]
fn pentagon_and_hexagons_alone_leave_four_dimensions() {
    let fam = solve(Conditions::MAJOR);
    assert_eq!(fam.degree_one.as_ref().unwrap().dim(), 1);
    assert_eq!(fam.degree_two.as_ref().unwrap().dim(), 4);
}

#[test]
fn full_conditions_give_the_constraint_plane() {
    let fam = solve(Conditions::ASSOCIATOR);
    let d1 = fam.degree_one.as_ref().unwrap();
    assert_eq!(d1.dim(), 0);
    assert!(d1.point.is_zero());
    assert_eq!(fam.degree_two.as_ref().unwrap().dim(), 2);
    let shown = fam.displayed.as_ref().unwrap();
    assert_eq!(shown.constraint, Some(([qi(0), qi(1), qi(1)], q(-1, 24))));
    assert_eq!(shown.point, [qi(0), q(1, 24), q(-1, 12)]);
}

#[test]
fn unitarity_is_implied() {
    let mut c = Conditions::ASSOCIATOR;
    c.unitary = false;
    assert_eq!(solve(c).degree_two.unwrap().dim(), 2);
}

#[test]
fn reference_associator_is_a_member() {
    let b = LocalBases::new();
    let phi = reference_phi(2, &b).unwrap();
    assert!(pentagon_residual(&phi, &b).unwrap().is_zero());
    let (h1, h2) = hexagon_residuals(&phi, &standard_r(2, &b).unwrap(), Superscript::Images, &b).unwrap();
    assert!(h1.is_zero() && h2.is_zero());
    let checks = check_properties(&phi, &b).unwrap();
    let holds: Vec<bool> = checks.iter().map(|c| c.holds).collect();
    assert_eq!(holds, [true, true, true, true, false]);
}

#[test]
fn property_loci_on_the_family() {
    let b = LocalBases::new();
    let loci = family_properties(&solve(Conditions::ASSOCIATOR), &b).unwrap();
    assert_eq!(loci[0].1, Locus::Everywhere);
    assert_eq!(loci[1].1, Locus::Everywhere);
    assert!(matches!(&loci[2].1, Locus::Subfamily { directions, .. } if directions.len() == 1));
    assert!(matches!(&loci[3].1, Locus::Subfamily { directions, .. } if directions.is_empty()));
    assert_eq!(loci[4].1, Locus::Nowhere);
}

#[test]
fn r21_equals_r() {
    let b = LocalBases::new();
    let r = standard_r(4, &b).unwrap();
    assert_eq!(r21(&r, &b).unwrap(), r);
}

#[test]
fn unital_idempotents_are_one() {
    let b = LocalBases::new();
    let one = Series::one(1, 4);
    let rep = idempotent_is_one(&one, &b).unwrap();
    assert!(rep.hypothesis_holds && rep.is_one);
    assert!(rep.forced.iter().all(|v| v.is_zero()));
    let t = word(1, &[(1, 1)]).unwrap();
    let s = Series::exp(&t, 4, &b).unwrap();
    let rep = idempotent_is_one(&s, &b).unwrap();
    assert_eq!(rep.first_failure, Some(1));
    assert!(!rep.is_one);
}

#[test]
fn certificate_holds_on_every_route() {
    let b = LocalBases::new();
    let fam = solve(Conditions::ASSOCIATOR);
    let std = nonexistence_certificate(&fam, Route::STANDARD, &b).unwrap();
    assert!(std.matches_display);
    assert!(std.pass());
    let routes = Route::all();
    assert!(routes.len() >= 2);
    for r in routes {
        assert!(nonexistence_certificate(&fam, r, &b).unwrap().pass(), "{r:?}");
    }
}
