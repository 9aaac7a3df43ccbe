//! Associator equations in the strand algebras, an exact solver for their
//! low-degree part, symmetry checks, and the degree-2 obstruction to a
//! homomorphic expansion of knotted trivalent graphs.
//!
//! Conventions: products are stacked bottom to top (`a·b` puts `b` on top),
//! `Δ_0`/`Δ_{n+1}` add an empty strand on the left/right, and a permutation
//! superscript is applied through [`Superscript`].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use alloc::sync::Arc;

use crate::coeff::{q, qi, Coeff, Param, Poly, Rational};
use crate::diagram::{ChordDiagram, LinComb};
use crate::error::{Error, Result};
use crate::graph_ops::{self, SweepSpec};
use crate::linalg::{solve_affine, Affine, Row};
use crate::relations::{reduce, Bases};
use crate::skeleton::{is_bridge, switch_edge, tetrahedron, tetrahedron_tree, unzip_edge, Edge, EdgeId, Skeleton};
use crate::strand_algebra::{strand_skeleton, word, Perm, Series};

/// How a superscript such as `Φ^{231}` acts. `Images` sends strand `k` to
/// position `σ(k)`; `Positions` puts strand `σ(k)` at position `k`. The two
/// agree on involutions such as `21`, `213` and `321`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Superscript {
    Images,
    Positions,
}

impl Superscript {
    pub const ALL: [Superscript; 2] = [Superscript::Images, Superscript::Positions];

    pub fn name(self) -> &'static str {
        match self {
            Superscript::Images => "images",
            Superscript::Positions => "positions",
        }
    }

    fn perm(self, sigma: &str) -> Perm {
        let p = Perm::parse(sigma).expect("valid permutation literal");
        match self {
            Superscript::Images => p,
            Superscript::Positions => p.inverse(),
        }
    }
}

fn sup<C: Coeff, B: Bases + ?Sized>(x: &Series<C>, sigma: &str, conv: Superscript, bases: &B) -> Result<Series<C>> {
    x.permute(&conv.perm(sigma), bases)
}

fn require_strands<C: Coeff>(x: &Series<C>, n: usize) -> Result<()> {
    if x.strands() != n {
        return Err(Error::StrandMismatch { expected: n, found: x.strands() });
    }
    Ok(())
}

/// `Δ_4(Φ)·Δ_2(Φ)·Δ_0(Φ) − Δ_1(Φ)·Δ_3(Φ)` in `A(↑_4)`.
pub fn pentagon_residual<C: Coeff, B: Bases + ?Sized>(phi: &Series<C>, bases: &B) -> Result<Series<C>> {
    require_strands(phi, 3)?;
    let d = |i| phi.delta(i, bases);
    let lhs = Series::product(&[&d(4)?, &d(2)?, &d(0)?], bases)?;
    let rhs = d(1)?.mul(&d(3)?, bases)?;
    lhs.sub(&rhs)
}

/// Residual of `Φ·Δ_2(R)·Φ^{231} = Δ_3(R)·Φ^{213}·Δ_0(R)^{213}`.
fn hexagon<C: Coeff, B: Bases + ?Sized>(phi: &Series<C>, r: &Series<C>, conv: Superscript, bases: &B) -> Result<Series<C>> {
    let lhs = Series::product(&[phi, &r.delta(2, bases)?, &sup(phi, "231", conv, bases)?], bases)?;
    let rhs = Series::product(
        &[&r.delta(3, bases)?, &sup(phi, "213", conv, bases)?, &sup(&r.delta(0, bases)?, "213", conv, bases)?],
        bases,
    )?;
    lhs.sub(&rhs)
}

/// Both hexagon residuals; the second uses `(R^{21})^{-1}` in place of `R`.
pub fn hexagon_residuals<C: Coeff, B: Bases + ?Sized>(
    phi: &Series<C>,
    r: &Series<C>,
    conv: Superscript,
    bases: &B,
) -> Result<(Series<C>, Series<C>)> {
    require_strands(phi, 3)?;
    require_strands(r, 2)?;
    let rbar = r21(r, bases)?.inverse(bases)?;
    Ok((hexagon(phi, r, conv, bases)?, hexagon(phi, &rbar, conv, bases)?))
}

/// `R^{21}`: the two strands exchanged.
pub fn r21<C: Coeff, B: Bases + ?Sized>(r: &Series<C>, bases: &B) -> Result<Series<C>> {
    r.permute(&Perm::parse("21").expect("literal"), bases)
}

/// `exp(t_12/2)` through degree `max_degree`.
pub fn standard_r<B: Bases + ?Sized>(max_degree: usize, bases: &B) -> Result<Series> {
    Series::exp(&word(2, &[(1, 2)])?.scale(&q(1, 2)), max_degree, bases)
}

/// `[t_12, t_23]`.
pub fn commutator_12_23() -> Result<LinComb> {
    word(3, &[(1, 2), (2, 3)])?.sub(&word(3, &[(2, 3), (1, 2)])?)
}

/// `1 − [t_12, t_23]/24` through degree `max_degree`.
pub fn reference_phi<B: Bases + ?Sized>(max_degree: usize, bases: &B) -> Result<Series> {
    let one = LinComb::one(strand_skeleton(3));
    Series::from_lincomb(&one.add(&commutator_12_23()?.scale(&q(-1, 24)))?, max_degree, bases)
}

/// The three combinations spanning the displayed degree-2 family:
/// `t11 t23 − t33 t12`, `t13 t12 − t13 t23`, `t12 t23 − t23 t12`.
pub fn displayed_directions() -> Result<[LinComb; 3]> {
    let w = |p: &[(usize, usize)]| word(3, p);
    Ok([
        w(&[(1, 1), (2, 3)])?.sub(&w(&[(3, 3), (1, 2)])?)?,
        w(&[(1, 3), (1, 2)])?.sub(&w(&[(1, 3), (2, 3)])?)?,
        commutator_12_23()?,
    ])
}

/// A formal combination `Σ p_k b_k` of the quotient basis in degree `n`,
/// with parameters numbered from `first`.
fn generic_part<B: Bases + ?Sized>(strands: usize, n: usize, first: u32, bases: &B) -> Result<(LinComb<Poly>, usize)> {
    let skel = strand_skeleton(strands);
    let basis = bases.basis(&skel, n)?;
    let mut v = LinComb::zero(skel);
    for (k, d) in basis.basis_diagrams().enumerate() {
        v.add_term(d.clone(), Poly::var(Param(first + k as u32)));
    }
    Ok((v, basis.dim()))
}

/// Linear equations (one per basis coordinate) saying that the degree-`n`
/// part of `x` vanishes. Coefficients must be affine in `Param(0..count)`;
/// the constant sits in column `count`.
fn linear_rows<B: Bases + ?Sized>(x: &Series<Poly>, n: usize, count: usize, bases: &B) -> Result<Vec<Row>> {
    lincomb_rows(x.part(n), n, count, bases)
}

fn lincomb_rows<B: Bases + ?Sized>(v: &LinComb<Poly>, n: usize, count: usize, bases: &B) -> Result<Vec<Row>> {
    let basis = bases.basis(v.skeleton(), n)?;
    let mut rows = Vec::new();
    for c in basis.coordinates(v)? {
        if c.total_degree() > 1 {
            return Err(Error::InvalidMap("equation is not affine in the parameters".into()));
        }
        let mut row: Row = (0..count)
            .map(|k| (k, c.linear_coeff(Param(k as u32))))
            .filter(|(_, x)| !num_traits::Zero::is_zero(x))
            .collect();
        let k = c.constant_term();
        if !num_traits::Zero::is_zero(&k) {
            row.push((count, k));
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    Ok(rows)
}

fn to_poly(x: &Series) -> Series<Poly> {
    x.map_coeffs(|c| Poly::constant(c.clone()))
}

fn combination(basis: &[LinComb], coords: &[Rational]) -> Result<LinComb> {
    let mut out = LinComb::zero(basis[0].skeleton_arc().clone());
    for (b, c) in basis.iter().zip(coords) {
        out.add_assign(&b.scale(c))?;
    }
    Ok(out)
}

/// An affine space of homogeneous elements: `point + span(directions)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineFamily {
    pub point: LinComb,
    pub directions: Vec<LinComb>,
}

impl AffineFamily {
    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    /// `point + Σ s_k directions_k` with `s_k = Param(k)`.
    pub fn generic(&self) -> LinComb<Poly> {
        let mut out = self.point.map_coeffs(|c| Poly::constant(c.clone()));
        for (k, d) in self.directions.iter().enumerate() {
            let p = Poly::var(Param(k as u32));
            out.add_assign(&d.map_coeffs(|c| p.scale(c))).expect("same skeleton");
        }
        out
    }
}

fn family_from<B: Bases + ?Sized>(strands: usize, n: usize, rows: &[Row], bases: &B) -> Result<Option<AffineFamily>> {
    let skel = strand_skeleton(strands);
    let basis: Vec<LinComb> =
        bases.basis(&skel, n)?.basis_diagrams().map(|d| LinComb::from_diagram(skel.clone(), d.clone())).collect();
    let dim = basis.len();
    Ok(match solve_affine(dim, rows) {
        Affine::Inconsistent => None,
        Affine::Solutions { particular, directions } => {
            if dim == 0 {
                let zero = LinComb::zero(skel);
                return Ok(Some(AffineFamily { point: zero, directions: Vec::new() }));
            }
            Some(AffineFamily {
                point: combination(&basis, &particular)?,
                directions: directions.iter().map(|d| combination(&basis, d)).collect::<Result<_>>()?,
            })
        }
    })
}

/// Expresses the family in the displayed `(α, β, γ)` coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisplayedCoordinates {
    pub point: [Rational; 3],
    pub directions: Vec<[Rational; 3]>,
    /// `(n, c)` with `n·(α, β, γ) = c` cutting the family out of the
    /// span, `n` scaled so its first nonzero entry is 1.
    pub constraint: Option<([Rational; 3], Rational)>,
}

/// Result of solving the associator equations through degree 2 with
/// `R = exp(t_12/2)`.
#[derive(Clone, Debug)]
pub struct SolutionFamily {
    pub convention: Superscript,
    pub conditions: Conditions,
    /// Solutions `Φ_1` of the degree-1 equations, or `None` if there are none.
    pub degree_one: Option<AffineFamily>,
    /// Solutions `Φ_2` of the degree-2 equations given `Φ_1 = 0`.
    pub degree_two: Option<AffineFamily>,
    pub equations: usize,
    pub unknowns: usize,
    pub displayed: Option<DisplayedCoordinates>,
}

impl SolutionFamily {
    /// `1 + Φ_2` for the member with family coordinates `s`.
    pub fn member<B: Bases + ?Sized>(&self, s: &[Rational], bases: &B) -> Result<Series> {
        let fam = self.degree_two.as_ref().ok_or(Error::NotInvertible)?;
        let mut v = fam.point.clone();
        for (d, c) in fam.directions.iter().zip(s) {
            v.add_assign(&d.scale(c))?;
        }
        v.add_assign(&LinComb::one(strand_skeleton(3)))?;
        Series::from_lincomb(&v, 2, bases)
    }

    /// `1 + Φ_2` with the family parameters kept formal.
    pub fn generic_member<B: Bases + ?Sized>(&self, bases: &B) -> Result<Series<Poly>> {
        let fam = self.degree_two.as_ref().ok_or(Error::NotInvertible)?;
        let mut v = fam.generic();
        v.add_assign(&LinComb::one(strand_skeleton(3)))?;
        Series::from_lincomb(&v, 2, bases)
    }
}

/// Which equations the solver imposes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Conditions {
    pub pentagon: bool,
    pub hexagons: bool,
    /// `d_i(Φ) = 1` for `i = 1, 2, 3`.
    pub non_degenerate: bool,
    /// `Φ^{321} = Φ^{-1}`.
    pub unitary: bool,
}

impl Conditions {
    /// The full definition of an associator.
    pub const ASSOCIATOR: Conditions = Conditions { pentagon: true, hexagons: true, non_degenerate: true, unitary: true };
    /// Only the pentagon and hexagon equations.
    pub const MAJOR: Conditions = Conditions { pentagon: true, hexagons: true, non_degenerate: false, unitary: false };
}

impl Default for Conditions {
    fn default() -> Self {
        Conditions::ASSOCIATOR
    }
}

/// Rows of the selected equations at degree `n` for `Φ` given as a series
/// with parameters `Param(0..count)`.
fn associator_rows<B: Bases + ?Sized>(
    phi: &Series<Poly>,
    r: &Series<Poly>,
    n: usize,
    count: usize,
    conv: Superscript,
    conditions: Conditions,
    bases: &B,
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    if conditions.pentagon {
        rows.extend(linear_rows(&pentagon_residual(phi, bases)?, n, count, bases)?);
    }
    if conditions.hexagons {
        let (h1, h2) = hexagon_residuals(phi, r, conv, bases)?;
        rows.extend(linear_rows(&h1, n, count, bases)?);
        rows.extend(linear_rows(&h2, n, count, bases)?);
    }
    if conditions.non_degenerate {
        for i in 1..=3 {
            let one = Series::one(2, phi.max_degree());
            rows.extend(linear_rows(&phi.delete(i, bases)?.sub(&one)?, n, count, bases)?);
        }
    }
    if conditions.unitary {
        let mirror = phi.permute(&Perm::parse("321").expect("literal"), bases)?;
        let prod = mirror.mul(phi, bases)?;
        rows.extend(linear_rows(&prod.sub(&Series::one(3, phi.max_degree()))?, n, count, bases)?);
    }
    Ok(rows)
}

/// Solves the degree-1 and degree-2 equations exactly, with
/// `R = exp(t_12/2)`. The degree-2 family is computed in the gauge
/// `Φ_1 = 0`, which must solve the degree-1 equations.
pub fn solve_degree2<B: Bases + ?Sized>(conv: Superscript, conditions: Conditions, bases: &B) -> Result<SolutionFamily> {
    let one = LinComb::<Poly>::one(strand_skeleton(3));

    let r1 = to_poly(&standard_r(1, bases)?);
    let (g1, k1) = generic_part(3, 1, 0, bases)?;
    let phi1 = Series::from_lincomb(&one.add(&g1)?, 1, bases)?;
    let rows1 = associator_rows(&phi1, &r1, 1, k1, conv, conditions, bases)?;
    let degree_one = family_from(3, 1, &rows1, bases)?;
    let gauge_ok = rows1.iter().all(|r| r.iter().all(|(c, _)| *c < k1));

    let r2 = to_poly(&standard_r(2, bases)?);
    let (g2, k2) = generic_part(3, 2, 0, bases)?;
    let phi2 = Series::from_lincomb(&one.add(&g2)?, 2, bases)?;
    let rows2 = associator_rows(&phi2, &r2, 2, k2, conv, conditions, bases)?;
    let degree_two = if gauge_ok { family_from(3, 2, &rows2, bases)? } else { None };
    let displayed = match &degree_two {
        Some(f) => displayed_coordinates(f, bases)?,
        None => None,
    };
    Ok(SolutionFamily {
        convention: conv,
        conditions,
        degree_one,
        degree_two,
        equations: rows2.len(),
        unknowns: k2,
        displayed,
    })
}

/// Coordinates of `v` in `span(vs)` if it lies there (unique when the
/// `vs` are independent).
fn express<B: Bases + ?Sized>(v: &LinComb, vs: &[LinComb], bases: &B) -> Result<Option<Vec<Rational>>> {
    let basis = bases.basis(v.skeleton(), 2)?;
    let target = basis.coordinates(v)?;
    let cols: Vec<Vec<Rational>> = vs.iter().map(|x| basis.coordinates(x)).collect::<Result<_>>()?;
    let k = vs.len();
    let rows: Vec<Row> = (0..target.len())
        .map(|i| {
            let mut row: Row =
                (0..k).map(|j| (j, cols[j][i].clone())).filter(|(_, x)| !num_traits::Zero::is_zero(x)).collect();
            if !num_traits::Zero::is_zero(&target[i]) {
                row.push((k, -target[i].clone()));
            }
            row
        })
        .filter(|r| !r.is_empty())
        .collect();
    Ok(match solve_affine(k, &rows) {
        Affine::Inconsistent => None,
        Affine::Solutions { particular, directions } if directions.is_empty() => Some(particular),
        Affine::Solutions { .. } => None,
    })
}

fn triple(v: Vec<Rational>) -> [Rational; 3] {
    let [a, b, c]: [Rational; 3] = v.try_into().expect("three coordinates");
    [a, b, c]
}

fn displayed_coordinates<B: Bases + ?Sized>(f: &AffineFamily, bases: &B) -> Result<Option<DisplayedCoordinates>> {
    let dirs = displayed_directions()?;
    let Some(point) = express(&f.point, &dirs, bases)? else { return Ok(None) };
    let mut directions = Vec::new();
    for d in &f.directions {
        let Some(c) = express(d, &dirs, bases)? else { return Ok(None) };
        directions.push(triple(c));
    }
    let point = triple(point);
    // normal to the direction span inside the three-dimensional span
    let rows: Vec<Row> = directions
        .iter()
        .map(|d| (0..3).map(|j| (j, d[j].clone())).filter(|(_, x)| !num_traits::Zero::is_zero(x)).collect())
        .filter(|r: &Row| !r.is_empty())
        .collect();
    let constraint = match solve_affine(3, &rows) {
        Affine::Solutions { directions: normals, .. } if normals.len() == 1 => {
            let n = &normals[0];
            let lead = n.iter().find(|x| !num_traits::Zero::is_zero(*x)).expect("nonzero normal").clone();
            let n: Vec<Rational> = n.iter().map(|x| x / &lead).collect();
            let c = (0..3).fold(qi(0), |acc, j| acc + &n[j] * &point[j]);
            Some((triple(n), c))
        }
        _ => None,
    };
    Ok(Some(DisplayedCoordinates { point, directions, constraint }))
}

/// Human-readable `n·(α, β, γ) = c`.
pub fn format_constraint(n: &[Rational; 3], c: &Rational) -> String {
    let mut s = String::new();
    for (x, name) in n.iter().zip(["α", "β", "γ"]) {
        if num_traits::Zero::is_zero(x) {
            continue;
        }
        let sign = if s.is_empty() { "" } else { "+" };
        if *x == qi(1) {
            s += &format!("{sign}{name}");
        } else {
            s += &format!("{sign}({}){name}", crate::coeff::fmt_rational(x));
        }
    }
    format!("{s} = {}", crate::coeff::fmt_rational(c))
}

/// The free group maps behind the symmetry properties.
pub mod maps {
    use crate::error::Result;
    use crate::strand_algebra::FreeGroupMap;

    /// `(x_2, x_3)`: deletion of the first strand.
    pub fn beta1() -> Result<FreeGroupMap> {
        FreeGroupMap::parse(3, &["x2", "x3"])
    }

    /// `(x_3, x_2, x_1)`: the mirror image.
    pub fn beta2() -> Result<FreeGroupMap> {
        FreeGroupMap::parse(3, &["x3", "x2", "x1"])
    }

    /// `(x_2 x_1^{-1}, x_3 x_1^{-1})`.
    pub fn beta3() -> Result<FreeGroupMap> {
        FreeGroupMap::parse(3, &["x2 x1'", "x3 x1'"])
    }

    /// `(x_1^{-1}, x_2^{-1}, x_3^{-1})`: upside down.
    pub fn beta4() -> Result<FreeGroupMap> {
        FreeGroupMap::parse(3, &["x1'", "x2'", "x3'"])
    }

    /// `(x_3^{-1}, x_3^{-1} x_1, x_2^{-1} x_1)`: rotation of the tetrahedron.
    pub fn beta5() -> Result<FreeGroupMap> {
        FreeGroupMap::parse(3, &["x3'", "x3' x1", "x2' x1"])
    }
}

/// The five symmetry properties of an associator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    NonDegenerate,
    MirrorInverse,
    Horizontal,
    Even,
    Rotational,
}

impl Property {
    pub const ALL: [Property; 5] =
        [Property::NonDegenerate, Property::MirrorInverse, Property::Horizontal, Property::Even, Property::Rotational];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Property::NonDegenerate => "non-degenerate: d_i(Φ) = 1",
            Property::MirrorInverse => "mirror: β2*(Φ) = Φ^-1",
            Property::Horizontal => "horizontal: β3*(Φ) = 1",
            Property::Even => "even: β4*(Φ) = Φ^-1",
            Property::Rotational => "rotational: β5*(Φ) = Φ",
        }
    }

    /// Residuals whose vanishing is the property.
    pub fn residuals<C: Coeff, B: Bases + ?Sized>(self, phi: &Series<C>, bases: &B) -> Result<Vec<Series<C>>> {
        require_strands(phi, 3)?;
        let d = phi.max_degree();
        Ok(match self {
            Property::NonDegenerate => {
                let mut out = Vec::new();
                for i in 1..=3 {
                    let beta = crate::strand_algebra::FreeGroupMap::deletion(3, i)?;
                    out.push(phi.pullback(&beta, bases)?.sub(&Series::one(2, d))?);
                }
                out
            }
            Property::MirrorInverse => alloc::vec![phi.pullback(&maps::beta2()?, bases)?.sub(&phi.inverse(bases)?)?],
            Property::Horizontal => alloc::vec![phi.pullback(&maps::beta3()?, bases)?.sub(&Series::one(2, d))?],
            Property::Even => alloc::vec![phi.pullback(&maps::beta4()?, bases)?.sub(&phi.inverse(bases)?)?],
            Property::Rotational => alloc::vec![phi.pullback(&maps::beta5()?, bases)?.sub(phi)?],
        })
    }
}

/// Outcome of one property check.
#[derive(Clone, Debug)]
pub struct PropertyCheck<C = Rational> {
    pub property: Property,
    pub holds: bool,
    pub residuals: Vec<Series<C>>,
}

/// Evaluates properties (1)–(5) exactly through the truncation degree.
pub fn check_properties<B: Bases + ?Sized>(phi: &Series, bases: &B) -> Result<Vec<PropertyCheck>> {
    Property::ALL
        .iter()
        .map(|&p| {
            let residuals = p.residuals(phi, bases)?;
            let holds = residuals.iter().all(Series::is_zero);
            Ok(PropertyCheck { property: p, holds, residuals })
        })
        .collect()
}

/// Where on a parametrized family a property holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Locus {
    Everywhere,
    Nowhere,
    /// `point + span(directions)` in the family parameters.
    Subfamily { point: Vec<Rational>, directions: Vec<Vec<Rational>> },
}

/// Properties (1)–(5) on the degree-2 family: for each, the parameter
/// values where it holds through degree 2.
pub fn family_properties<B: Bases + ?Sized>(family: &SolutionFamily, bases: &B) -> Result<Vec<(Property, Locus)>> {
    let phi = family.generic_member(bases)?;
    let k = family.degree_two.as_ref().map_or(0, AffineFamily::dim);
    let mut out = Vec::new();
    for p in Property::ALL {
        let mut rows = Vec::new();
        for r in p.residuals(&phi, bases)? {
            for n in 0..=r.max_degree() {
                rows.extend(linear_rows(&r, n, k, bases)?);
            }
        }
        let locus = if rows.is_empty() {
            Locus::Everywhere
        } else {
            match solve_affine(k, &rows) {
                Affine::Inconsistent => Locus::Nowhere,
                Affine::Solutions { particular, directions } => Locus::Subfamily { point: particular, directions },
            }
        };
        out.push((p, locus));
    }
    Ok(out)
}

/// Degree-by-degree consequence of `s·s = s` for a unital `s`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdempotentReport {
    /// Whether the concrete input satisfies `s·s = s`.
    pub hypothesis_holds: bool,
    /// Lowest degree where `s·s − s` is nonzero.
    pub first_failure: Option<usize>,
    /// For each positive degree, the value of `s_n` forced by `s·s = s`
    /// once the lower parts are known (always 0).
    pub forced: Vec<LinComb>,
    /// Whether the input equals 1.
    pub is_one: bool,
}

/// Runs the inductive argument that a unital idempotent is 1: at each
/// degree `n` the coefficient of `(s·s − s)_n` is `s_n` plus products of
/// lower parts, so solving for a formal `s_n` forces it given the lower
/// parts. Also checks the hypothesis on the concrete `s`.
pub fn idempotent_is_one<B: Bases + ?Sized>(s: &Series, bases: &B) -> Result<IdempotentReport> {
    let n = s.strands();
    let max = s.max_degree();
    let empty = crate::diagram::ChordDiagram::empty();
    if s.part(0).coeff(&empty) != Some(&qi(1)) || s.part(0).len() != 1 {
        return Err(Error::InvalidMap("idempotent check needs degree-0 part 1".into()));
    }
    let sq = s.mul(s, bases)?.sub(s)?;
    let first_failure = (0..=max).find(|&d| !sq.part(d).is_zero());

    let skel = strand_skeleton(n);
    let mut known = LinComb::<Poly>::one(skel.clone());
    let mut forced = Vec::new();
    for d in 1..=max {
        let (g, k) = generic_part(n, d, 0, bases)?;
        let x = Series::from_lincomb(&known.add(&g)?, d, bases)?;
        let rows = linear_rows(&x.mul(&x, bases)?.sub(&x)?, d, k, bases)?;
        let fam = family_from(n, d, &rows, bases)?.ok_or(Error::NotInvertible)?;
        if fam.dim() != 0 {
            return Err(Error::InvalidMap(format!("degree {d} part not determined by idempotence")));
        }
        known.add_assign(&fam.point.map_coeffs(|c| Poly::constant(c.clone())))?;
        forced.push(fam.point);
    }
    let is_one = (1..=max).all(|d| s.part(d).is_zero());
    Ok(IdempotentReport { hypothesis_holds: first_failure.is_none(), first_failure, forced, is_one })
}

/// A way to turn the tetrahedron into a dumbbell: optionally switch one
/// edge, then unzip another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Route {
    pub switch: Option<EdgeId>,
    pub unzip: EdgeId,
}

impl Route {
    /// Switch edge 1 (the first strand), then unzip edge 5.
    pub const STANDARD: Route = Route { switch: Some(EdgeId(1)), unzip: EdgeId(5) };

    fn apply<C: Coeff>(&self, v: &LinComb<C>) -> Result<LinComb<C>> {
        let v = match self.switch {
            Some(e) => graph_ops::switch(v, e)?,
            None => v.clone(),
        };
        graph_ops::unzip(&v, self.unzip)
    }

    /// All routes with at most one switch whose unzip is defined.
    pub fn all() -> Vec<Route> {
        let tet = tetrahedron();
        let mut out = Vec::new();
        for sw in core::iter::once(None).chain(tet.edge_ids().map(Some)) {
            let s = match sw {
                Some(e) => switch_edge(&tet, e).expect("tetrahedron edge"),
                None => tet.clone(),
            };
            for e in tet.edge_ids() {
                if unzip_edge(&s, e).is_ok() {
                    out.push(Route { switch: sw, unzip: e });
                }
            }
        }
        out
    }
}

/// Two trivalent vertices joined by a bridge, each carrying a loop.
pub fn is_dumbbell_shaped(s: &Skeleton) -> bool {
    let loops = s.edges().filter(|(_, e)| matches!(e, Edge::Segment { tail, head } if tail == head)).count();
    s.trivalent_count() == 2 && s.num_vertices() == 2 && s.num_edges() == 3 && loops == 2
}

/// Sweep of a dumbbell-shaped skeleton: the bridge is the tree, the loops
/// in id order are the strands, read along their orientation.
pub fn dumbbell_sweep(s: &Skeleton) -> Result<SweepSpec> {
    let bridge = s
        .edge_ids()
        .find(|&e| is_bridge(s, e))
        .ok_or_else(|| Error::Precondition("skeleton has no bridge".into()))?;
    let strands = s.edge_ids().filter(|&e| e != bridge).map(|e| (e, true)).collect();
    Ok(SweepSpec { tree: [bridge].into(), strands, root: None })
}

/// Two chords between the strands of `A(↑_2)` met in opposite orders:
/// `t_12^2` with the second strand read downwards.
pub fn t12_opposed() -> Result<LinComb> {
    let s = strand_skeleton(2);
    let d = ChordDiagram::from_sequences(&s, [(EdgeId(1), alloc::vec![0, 1]), (EdgeId(2), alloc::vec![1, 0])])?;
    Ok(LinComb::from_diagram(s, d))
}

/// Outcome of pushing the degree-2 family through a route.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub route: Route,
    pub skeleton: Skeleton,
    pub sweep: SweepSpec,
    /// Images of the three displayed directions in `A(↑_2)`.
    pub images: [LinComb; 3],
    /// Image of the family: `point + span(directions)`.
    pub family: AffineFamily,
    /// `u(γ) − t_12 t_11`.
    pub x: LinComb,
    /// Whether `u(α) = t_12 t_11 + t_11 t_22`, `u(β) = t_12^2 + t_12 t_11` with
    /// `t_12^2` read as [`t12_opposed`], and `x` is a single diagram up to sign.
    pub matches_display: bool,
    /// Whether some member of the family maps to 0.
    pub meets_zero: bool,
}

impl Certificate {
    /// The obstruction holds: the dumbbell value would have to vanish in
    /// degree 2, and no member of the family achieves that.
    pub fn pass(&self) -> bool {
        !self.meets_zero
    }
}

/// Places the degree-2 family on the tetrahedron, applies the route, and
/// decides whether any member reaches 0 in `A(dumbbell)_2 ≅ A(↑_2)_2`.
pub fn nonexistence_certificate<B: Bases + ?Sized>(family: &SolutionFamily, route: Route, bases: &B) -> Result<Certificate> {
    let fam = family
        .degree_two
        .as_ref()
        .ok_or_else(|| Error::Precondition("the degree-2 equations have no solution".into()))?;
    let tet = Arc::new(tetrahedron());
    let tree = SweepSpec::new(&tet, tetrahedron_tree());
    let push = |v: &LinComb| -> Result<(LinComb, Skeleton, SweepSpec)> {
        let on_tet = graph_ops::include(v, tet.clone(), &tree)?;
        let out = route.apply(&on_tet)?;
        let s = out.skeleton().clone();
        if !is_dumbbell_shaped(&s) {
            return Err(Error::Precondition("route does not produce a dumbbell".into()));
        }
        let spec = dumbbell_sweep(&s)?;
        let swept = reduce(bases, &graph_ops::sweep(&out, &spec)?)?;
        Ok((swept, s, spec))
    };
    let dirs = displayed_directions()?;
    let (ua, skeleton, sweep) = push(&dirs[0])?;
    let images = [ua, push(&dirs[1])?.0, push(&dirs[2])?.0];
    let point = push(&fam.point)?.0;
    let directions = fam.directions.iter().map(|d| Ok(push(d)?.0)).collect::<Result<Vec<_>>>()?;
    let family_image = AffineFamily { point, directions };

    let w = |p: &[(usize, usize)]| -> Result<LinComb> { reduce(bases, &word(2, p)?) };
    let t12t11 = w(&[(1, 2), (1, 1)])?;
    let x = images[2].sub(&t12t11)?;
    let single = x.len() == 1 && x.terms().all(|(_, c)| *c == qi(1) || *c == qi(-1));
    let matches_display = images[0] == t12t11.add(&w(&[(1, 1), (2, 2)])?)?
        && images[1] == reduce(bases, &t12_opposed()?)?.add(&t12t11)?
        && single;

    let k = family_image.dim();
    let rows = lincomb_rows(&family_image.generic(), 2, k, bases)?;
    let meets_zero = !matches!(solve_affine(k, &rows), Affine::Inconsistent);
    Ok(Certificate { route, skeleton, sweep, images, family: family_image, x, matches_display, meets_zero })
}
