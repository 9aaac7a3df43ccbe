//! Four-term and vertex-invariance relations, and quotient bases.
//!
//! Conventions. In a four-term relation a moving endpoint `M` of chord `m`
//! visits the four slots next to the endpoints `F1, F2` of another chord `f`
//! (`F1` before `F2` in edge-id, then position, order):
//!
//! ```text
//!   +[M before F1] - [M after F1] + [M before F2] - [M after F2] = 0
//! ```
//!
//! where before/after refer to the edge orientation. On strands this is
//! `[t_ij + t_ik, t_jk] = 0`. The pattern is invariant under reversing an
//! edge together with the sign `(-1)^k`.
//!
//! A vertex-invariance relation at a vertex `w` takes one endpoint and
//! places it at the slot nearest `w` on each edge-end `j` at `w`, with sign
//! `-1` for outgoing and `+1` for incoming ends, and sums.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::RefCell;

use num_traits::{One, Zero};

use crate::coeff::{Coeff, Rational};
use crate::diagram::{enumerate_diagrams, ChordDiagram, LinComb};
use crate::error::{Error, Result};
use crate::linalg::{self, Row, Rref};
use crate::skeleton::{EdgeEnd, EdgeId, End, Skeleton, Vertex};

type Terms = Vec<(ChordDiagram, Rational)>;

/// Scales so the coefficient of the least diagram is 1; `None` if zero.
fn normalized(mut map: BTreeMap<ChordDiagram, Rational>) -> Option<Terms> {
    map.retain(|_, c| !Zero::is_zero(c));
    let lead = map.values().next()?.clone();
    Some(map.into_iter().map(|(d, c)| (d, c / &lead)).collect())
}

fn insert_at(seqs: &BTreeMap<EdgeId, Vec<u16>>, e: EdgeId, pos: usize, label: u16) -> BTreeMap<EdgeId, Vec<u16>> {
    let mut out = seqs.clone();
    out.entry(e).or_default().insert(pos, label);
    out
}

fn remove_at(seqs: &BTreeMap<EdgeId, Vec<u16>>, e: EdgeId, pos: usize) -> BTreeMap<EdgeId, Vec<u16>> {
    let mut out = seqs.clone();
    out.get_mut(&e).expect("edge carries the endpoint").remove(pos);
    out
}

fn positions_of(seqs: &BTreeMap<EdgeId, Vec<u16>>, label: u16) -> Vec<(EdgeId, usize)> {
    let mut out = Vec::new();
    for (&e, seq) in seqs {
        for (i, &c) in seq.iter().enumerate() {
            if c == label {
                out.push((e, i));
            }
        }
    }
    out
}

fn collect(s: &Skeleton, terms: impl IntoIterator<Item = (BTreeMap<EdgeId, Vec<u16>>, i64)>) -> BTreeMap<ChordDiagram, Rational> {
    let mut map: BTreeMap<ChordDiagram, Rational> = BTreeMap::new();
    for (seqs, sign) in terms {
        *map.entry(ChordDiagram::canonical(s, seqs)).or_insert_with(<Rational as Zero>::zero) += Rational::from_integer(sign.into());
    }
    map
}

fn four_t_terms(s: &Skeleton, n: usize) -> BTreeSet<Terms> {
    let mut out = BTreeSet::new();
    if n < 2 {
        return out;
    }
    for d in enumerate_diagrams(s, n) {
        let seqs = d.sequences();
        for m in 0..n as u16 {
            for (me, mp) in positions_of(&seqs, m) {
                let rest = remove_at(&seqs, me, mp);
                for f in (0..n as u16).filter(|&f| f != m) {
                    let fs = positions_of(&rest, f);
                    let (f1, f2) = (fs[0], fs[1]);
                    let terms = [
                        (insert_at(&rest, f1.0, f1.1, m), 1),
                        (insert_at(&rest, f1.0, f1.1 + 1, m), -1),
                        (insert_at(&rest, f2.0, f2.1, m), 1),
                        (insert_at(&rest, f2.0, f2.1 + 1, m), -1),
                    ];
                    if let Some(t) = normalized(collect(s, terms)) {
                        out.insert(t);
                    }
                }
            }
        }
    }
    out
}

/// Index of the slot nearest the vertex on the given edge-end, when the edge
/// carries `len` endpoints and one more is inserted.
fn nearest_insert(end: EdgeEnd, len: usize) -> usize {
    match end.end {
        End::Tail => 0,
        End::Head => len,
    }
}

fn vi_terms(s: &Skeleton, n: usize) -> BTreeSet<Terms> {
    let mut out = BTreeSet::new();
    if n < 1 {
        return out;
    }
    for d in enumerate_diagrams(s, n) {
        let seqs = d.sequences();
        for (_, v) in s.vertices() {
            if matches!(v, Vertex::Boundary(_)) {
                continue;
            }
            for &end in v.ends() {
                let Some(seq) = seqs.get(&end.edge) else { continue };
                let pos = match end.end {
                    End::Tail => 0,
                    End::Head => seq.len() - 1,
                };
                let label = seq[pos];
                let rest = remove_at(&seqs, end.edge, pos);
                let terms = v.ends().iter().map(|&j| {
                    let len = rest.get(&j.edge).map_or(0, Vec::len);
                    let sign = if j.is_outgoing() { -1 } else { 1 };
                    (insert_at(&rest, j.edge, nearest_insert(j, len), label), sign)
                });
                if let Some(t) = normalized(collect(s, terms)) {
                    out.insert(t);
                }
            }
        }
    }
    out
}

fn to_lincombs(s: &Skeleton, set: BTreeSet<Terms>) -> Vec<LinComb> {
    let arc = Arc::new(s.clone());
    set.into_iter()
        .map(|t| {
            let mut l = LinComb::zero(arc.clone());
            for (d, c) in t {
                l.add_term(d, c);
            }
            l
        })
        .collect()
}

/// All four-term relations of degree `n`, deduplicated up to scaling.
pub fn four_t_relations(s: &Skeleton, n: usize) -> Vec<LinComb> {
    to_lincombs(s, four_t_terms(s, n))
}

/// All vertex-invariance relations of degree `n`, deduplicated up to scaling.
pub fn vi_relations(s: &Skeleton, n: usize) -> Vec<LinComb> {
    to_lincombs(s, vi_terms(s, n))
}

fn relation_rows(s: &Skeleton, n: usize, index: &BTreeMap<ChordDiagram, usize>) -> Vec<Row> {
    let mut set = four_t_terms(s, n);
    set.extend(vi_terms(s, n));
    set.into_iter()
        .map(|t| {
            let mut row: Row = t.into_iter().map(|(d, c)| (index[&d], c)).collect();
            row.sort_by_key(|(c, _)| *c);
            row
        })
        .collect()
}

/// The space `A(s)` in degree `n`: enumerated diagrams, the basis of
/// non-pivot diagrams, and the reduction of every pivot diagram.
#[derive(Clone, Debug, PartialEq)]
pub struct QuotientBasis {
    skeleton: Arc<Skeleton>,
    degree: usize,
    diagrams: Vec<ChordDiagram>,
    index: BTreeMap<ChordDiagram, usize>,
    basis: Vec<usize>,
    reductions: BTreeMap<usize, Row>,
    relation_count: usize,
}

impl QuotientBasis {
    pub fn compute(s: &Skeleton, n: usize) -> QuotientBasis {
        let diagrams = enumerate_diagrams(s, n);
        let index: BTreeMap<ChordDiagram, usize> = diagrams.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let rows = relation_rows(s, n, &index);
        let mut rref = Rref::new();
        for r in &rows {
            rref.insert(r);
        }
        let reductions = rref
            .rows()
            .iter()
            .map(|(&p, row)| (p, row.iter().filter(|(c, _)| *c != p).map(|(c, x)| (*c, -x)).collect()))
            .collect();
        Self::assemble(Arc::new(s.clone()), n, diagrams, reductions, rows.len())
    }

    fn assemble(
        skeleton: Arc<Skeleton>,
        degree: usize,
        diagrams: Vec<ChordDiagram>,
        reductions: BTreeMap<usize, Row>,
        relation_count: usize,
    ) -> QuotientBasis {
        let index = diagrams.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let basis = (0..diagrams.len()).filter(|i| !reductions.contains_key(i)).collect();
        QuotientBasis { skeleton, degree, diagrams, index, basis, reductions, relation_count }
    }

    /// Rebuilds a basis from stored parts (e.g. a cache), checking that the
    /// diagram list is the enumeration for `(s, n)` and that reductions only
    /// use basis columns.
    pub fn from_parts(
        s: &Skeleton,
        n: usize,
        reductions: BTreeMap<ChordDiagram, Vec<(ChordDiagram, Rational)>>,
        relation_count: usize,
    ) -> Result<QuotientBasis> {
        let diagrams = enumerate_diagrams(s, n);
        let index: BTreeMap<ChordDiagram, usize> = diagrams.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
        let look = |d: &ChordDiagram| {
            index.get(d).copied().ok_or_else(|| Error::MalformedDiagram("diagram not in the enumerated cell".into()))
        };
        let mut table = BTreeMap::new();
        for (d, combo) in &reductions {
            let p = look(d)?;
            let mut row: Row = Vec::new();
            for (b, c) in combo {
                let col = look(b)?;
                if reductions.contains_key(b) {
                    return Err(Error::MalformedDiagram("reduction uses a non-basis diagram".into()));
                }
                row.push((col, c.clone()));
            }
            row.sort_by_key(|(c, _)| *c);
            table.insert(p, row);
        }
        Ok(Self::assemble(Arc::new(s.clone()), n, diagrams, table, relation_count))
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn skeleton_arc(&self) -> &Arc<Skeleton> {
        &self.skeleton
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn diagram_count(&self) -> usize {
        self.diagrams.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relation_count
    }

    pub fn diagrams(&self) -> &[ChordDiagram] {
        &self.diagrams
    }

    pub fn basis_diagrams(&self) -> impl Iterator<Item = &ChordDiagram> {
        self.basis.iter().map(|&i| &self.diagrams[i])
    }

    /// Reductions of the non-basis diagrams, for serialization.
    pub fn reduction_table(&self) -> impl Iterator<Item = (&ChordDiagram, Vec<(&ChordDiagram, &Rational)>)> {
        self.reductions
            .iter()
            .map(|(&p, row)| (&self.diagrams[p], row.iter().map(|(c, x)| (&self.diagrams[*c], x)).collect()))
    }

    /// The normal form of one diagram of this cell.
    pub fn reduce_diagram(&self, d: &ChordDiagram) -> Result<Vec<(&ChordDiagram, Rational)>> {
        let &i = self.index.get(d).ok_or(Error::DegreeMismatch(self.degree, d.degree()))?;
        Ok(match self.reductions.get(&i) {
            Some(row) => row.iter().map(|(c, x)| (&self.diagrams[*c], x.clone())).collect(),
            None => alloc::vec![(&self.diagrams[i], <Rational as One>::one())],
        })
    }

    pub fn reduce<C: Coeff>(&self, v: &LinComb<C>) -> Result<LinComb<C>> {
        if v.skeleton() != self.skeleton.as_ref() {
            return Err(Error::SkeletonMismatch("reducing in the quotient of another skeleton".into()));
        }
        let mut out = LinComb::zero(v.skeleton_arc().clone());
        for (d, c) in v.terms() {
            for (b, k) in self.reduce_diagram(d)? {
                out.add_term(b.clone(), c.scale(&k));
            }
        }
        Ok(out)
    }

    /// Coordinates of `v` in the basis, in basis order.
    pub fn coordinates<C: Coeff>(&self, v: &LinComb<C>) -> Result<Vec<C>> {
        let r = self.reduce(v)?;
        Ok(self.basis_diagrams().map(|b| r.coeff(b).cloned().unwrap_or_else(C::zero)).collect())
    }
}

/// Dimension of `A(s)` in degree `n` computed independently of the echelon
/// form: a random projection of the same relation matrix, ranked mod p.
pub fn randomized_dim(s: &Skeleton, n: usize, seed: u64) -> usize {
    let diagrams = enumerate_diagrams(s, n);
    let index: BTreeMap<ChordDiagram, usize> = diagrams.iter().cloned().enumerate().map(|(i, d)| (d, i)).collect();
    let rows = relation_rows(s, n, &index);
    diagrams.len() - linalg::randomized_rank(&rows, diagrams.len(), seed)
}

/// A source of quotient bases, usually caching them.
pub trait Bases {
    fn basis(&self, s: &Skeleton, n: usize) -> Result<Arc<QuotientBasis>>;
}

/// Single-threaded in-memory cache.
#[derive(Default)]
pub struct LocalBases {
    cache: RefCell<BTreeMap<(Skeleton, usize), Arc<QuotientBasis>>>,
}

impl LocalBases {
    pub fn new() -> Self {
        LocalBases::default()
    }
}

impl Bases for LocalBases {
    fn basis(&self, s: &Skeleton, n: usize) -> Result<Arc<QuotientBasis>> {
        if let Some(b) = self.cache.borrow().get(&(s.clone(), n)) {
            return Ok(b.clone());
        }
        let b = Arc::new(QuotientBasis::compute(s, n));
        self.cache.borrow_mut().insert((s.clone(), n), b.clone());
        Ok(b)
    }
}

/// Normal form of an arbitrary (possibly inhomogeneous) combination.
pub fn reduce<C: Coeff, B: Bases + ?Sized>(bases: &B, v: &LinComb<C>) -> Result<LinComb<C>> {
    let mut out = LinComb::zero(v.skeleton_arc().clone());
    for n in v.degrees() {
        let b = bases.basis(v.skeleton(), n)?;
        out.add_assign(&b.reduce(&v.degree_part(n))?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::*;

    #[test]
    fn small_dimensions() {
        assert_eq!(QuotientBasis::compute(&strands(1), 1).dim(), 1);
        assert_eq!(QuotientBasis::compute(&circle(), 0).dim(), 1);
        assert_eq!(QuotientBasis::compute(&strands(2), 1).dim(), 3);
    }

    #[test]
    fn relations_reduce_to_zero() {
        let s = theta();
        let q = QuotientBasis::compute(&s, 2);
        for r in four_t_relations(&s, 2).iter().chain(&vi_relations(&s, 2)) {
            assert!(q.reduce(r).unwrap().is_zero());
            assert!(r.len() <= 4);
        }
        for b in q.basis_diagrams() {
            let v = LinComb::from_diagram(q.skeleton_arc().clone(), b.clone());
            assert_eq!(q.reduce(&v).unwrap(), v);
        }
    }

    #[test]
    fn no_relations_on_bare_circle_in_degree_one() {
        assert!(vi_relations(&circle(), 1).is_empty());
        assert!(four_t_relations(&circle(), 1).is_empty());
    }

    #[test]
    fn oracle_agrees_on_theta() {
        for n in 0..=2 {
            assert_eq!(QuotientBasis::compute(&theta(), n).dim(), randomized_dim(&theta(), n, 1));
        }
    }
}
