//! Chord diagrams and their formal linear combinations.
//!
//! A diagram stores, for every edge carrying chord endpoints, the sequence
//! of chord labels met when walking the edge from tail to head. Labels are
//! canonical: chords are numbered by first appearance, scanning edges in id
//! order. Sequences on circles have no basepoint, so the canonical form is
//! the least one over all rotations.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::coeff::{Coeff, Rational};
use crate::error::{Error, Result};
use crate::skeleton::{EdgeId, Skeleton};

/// A chord endpoint position: the edge and its index along the edge.
pub type Slot = (EdgeId, usize);

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChordDiagram {
    edges: Vec<(EdgeId, Vec<u16>)>,
}

fn relabel(seqs: &[(EdgeId, Vec<u16>)]) -> Vec<(EdgeId, Vec<u16>)> {
    let mut map: BTreeMap<u16, u16> = BTreeMap::new();
    seqs.iter()
        .map(|(e, seq)| {
            let out = seq
                .iter()
                .map(|c| {
                    let next = map.len() as u16;
                    *map.entry(*c).or_insert(next)
                })
                .collect();
            (*e, out)
        })
        .collect()
}

impl ChordDiagram {
    pub fn empty() -> Self {
        ChordDiagram::default()
    }

    pub fn degree(&self) -> usize {
        self.edges.iter().map(|(_, s)| s.len()).sum::<usize>() / 2
    }

    /// Edges carrying endpoints, in id order, with their label sequences.
    pub fn edges(&self) -> &[(EdgeId, Vec<u16>)] {
        &self.edges
    }

    pub fn on_edge(&self, e: EdgeId) -> &[u16] {
        match self.edges.binary_search_by_key(&e, |(x, _)| *x) {
            Ok(i) => &self.edges[i].1,
            Err(_) => &[],
        }
    }

    pub fn count_on(&self, e: EdgeId) -> usize {
        self.on_edge(e).len()
    }

    /// Builds a canonical diagram from arbitrary label sequences; every
    /// label must occur exactly twice and every edge must exist.
    pub fn from_sequences(s: &Skeleton, seqs: impl IntoIterator<Item = (EdgeId, Vec<u16>)>) -> Result<Self> {
        let mut map: BTreeMap<EdgeId, Vec<u16>> = BTreeMap::new();
        for (e, seq) in seqs {
            if !s.has_edge(e) {
                return Err(Error::UnknownEdge(e));
            }
            map.entry(e).or_default().extend(seq);
        }
        let mut counts: BTreeMap<u16, usize> = BTreeMap::new();
        for seq in map.values() {
            for &c in seq {
                *counts.entry(c).or_insert(0) += 1;
            }
        }
        if let Some((c, k)) = counts.iter().find(|(_, &k)| k != 2) {
            return Err(Error::MalformedDiagram(format!("chord {c} has {k} endpoints")));
        }
        Ok(Self::canonical(s, map))
    }

    /// Canonicalizes sequences that are known to form a valid matching.
    pub(crate) fn canonical(s: &Skeleton, map: BTreeMap<EdgeId, Vec<u16>>) -> Self {
        let seqs: Vec<(EdgeId, Vec<u16>)> = map.into_iter().filter(|(_, v)| !v.is_empty()).collect();
        let circles: Vec<usize> = seqs
            .iter()
            .enumerate()
            .filter(|(_, (e, v))| s.is_circle(*e) && v.len() > 1)
            .map(|(i, _)| i)
            .collect();
        if circles.is_empty() {
            return ChordDiagram { edges: relabel(&seqs) };
        }
        let mut best: Option<Vec<(EdgeId, Vec<u16>)>> = None;
        let mut rot = alloc::vec![0usize; circles.len()];
        loop {
            let mut cand = seqs.clone();
            for (k, &i) in circles.iter().enumerate() {
                cand[i].1.rotate_left(rot[k]);
            }
            let cand = relabel(&cand);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
            // odometer over rotations
            let mut k = 0;
            loop {
                if k == circles.len() {
                    return ChordDiagram { edges: best.expect("at least one candidate") };
                }
                rot[k] += 1;
                if rot[k] < seqs[circles[k]].1.len() {
                    break;
                }
                rot[k] = 0;
                k += 1;
            }
        }
    }

    /// Builds a diagram from chords given by endpoint slots. On each edge the
    /// used positions must be exactly `0..k`.
    pub fn from_chords(s: &Skeleton, chords: &[(Slot, Slot)]) -> Result<Self> {
        let mut per_edge: BTreeMap<EdgeId, BTreeMap<usize, u16>> = BTreeMap::new();
        for (i, &(a, b)) in chords.iter().enumerate() {
            for (e, pos) in [a, b] {
                if !s.has_edge(e) {
                    return Err(Error::UnknownEdge(e));
                }
                if per_edge.entry(e).or_default().insert(pos, i as u16).is_some() {
                    return Err(Error::MalformedDiagram(format!("slot {e}:{pos} used twice")));
                }
            }
        }
        let mut seqs = BTreeMap::new();
        for (e, slots) in per_edge {
            if slots.keys().copied().ne(0..slots.len()) {
                return Err(Error::MalformedDiagram(format!("positions on edge {e} are not 0..{}", slots.len())));
            }
            seqs.insert(e, slots.into_values().collect());
        }
        Ok(Self::canonical(s, seqs))
    }

    /// The chords as pairs of slots, ordered by label.
    pub fn chords(&self) -> Vec<(Slot, Slot)> {
        let mut ends: BTreeMap<u16, Vec<Slot>> = BTreeMap::new();
        for (e, seq) in &self.edges {
            for (pos, &c) in seq.iter().enumerate() {
                ends.entry(c).or_default().push((*e, pos));
            }
        }
        ends.into_values().map(|v| (v[0], v[1])).collect()
    }

    pub(crate) fn sequences(&self) -> BTreeMap<EdgeId, Vec<u16>> {
        self.edges.iter().cloned().collect()
    }
}

/// Perfect matchings of `0..len`, as label sequences numbered by first
/// appearance.
pub(crate) fn matchings(len: usize) -> Vec<Vec<u16>> {
    fn go(seq: &mut Vec<Option<u16>>, next: u16, out: &mut Vec<Vec<u16>>) {
        let Some(i) = seq.iter().position(Option::is_none) else {
            out.push(seq.iter().map(|c| c.expect("filled")).collect());
            return;
        };
        seq[i] = Some(next);
        for j in i + 1..seq.len() {
            if seq[j].is_none() {
                seq[j] = Some(next);
                go(seq, next + 1, out);
                seq[j] = None;
            }
        }
        seq[i] = None;
    }
    let mut out = Vec::new();
    if len % 2 == 0 {
        go(&mut alloc::vec![None; len], 0, &mut out);
    }
    out
}

/// Compositions of `total` into `parts` nonnegative parts.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { alloc::vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All canonical diagrams of degree `n` on `s`, each once, sorted.
pub fn enumerate_diagrams(s: &Skeleton, n: usize) -> Vec<ChordDiagram> {
    let edges: Vec<EdgeId> = s.edge_ids().collect();
    let ms = matchings(2 * n);
    let mut out = BTreeSet::new();
    for comp in compositions(2 * n, edges.len()) {
        for m in &ms {
            let mut seqs = BTreeMap::new();
            let mut at = 0;
            for (&e, &k) in edges.iter().zip(&comp) {
                seqs.insert(e, m[at..at + k].to_vec());
                at += k;
            }
            out.insert(ChordDiagram::canonical(s, seqs));
        }
    }
    out.into_iter().collect()
}

pub(crate) fn same_skeleton(a: &Arc<Skeleton>, b: &Arc<Skeleton>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A finite formal sum of diagrams on one skeleton. Zero coefficients are
/// never stored.
#[derive(Clone, Debug)]
pub struct LinComb<C = Rational> {
    skeleton: Arc<Skeleton>,
    terms: BTreeMap<ChordDiagram, C>,
}

impl<C: Coeff> PartialEq for LinComb<C> {
    fn eq(&self, other: &Self) -> bool {
        same_skeleton(&self.skeleton, &other.skeleton) && self.terms == other.terms
    }
}

impl<C: Coeff> LinComb<C> {
    pub fn zero(skeleton: Arc<Skeleton>) -> Self {
        LinComb { skeleton, terms: BTreeMap::new() }
    }

    pub fn single(skeleton: Arc<Skeleton>, d: ChordDiagram, c: C) -> Self {
        let mut out = Self::zero(skeleton);
        out.add_term(d, c);
        out
    }

    /// The empty diagram with coefficient one.
    pub fn one(skeleton: Arc<Skeleton>) -> Self {
        Self::single(skeleton, ChordDiagram::empty(), C::one())
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn skeleton_arc(&self) -> &Arc<Skeleton> {
        &self.skeleton
    }

    pub fn add_term(&mut self, d: ChordDiagram, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&d) {
            Some(x) => {
                x.add_assign(&c);
                if x.is_zero() {
                    self.terms.remove(&d);
                }
            }
            None => {
                self.terms.insert(d, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if same_skeleton(&self.skeleton, &other.skeleton) {
            Ok(())
        } else {
            Err(Error::SkeletonMismatch("linear combination on a different skeleton".into()))
        }
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.check(other)?;
        for (d, c) in &other.terms {
            self.add_term(d.clone(), c.clone());
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, k: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(k)).pruned()
    }

    pub fn scale_coeff(&self, k: &C) -> Self {
        self.map_coeffs(|c| c.mul(k)).pruned()
    }

    fn pruned(mut self) -> Self {
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LinComb<D> {
        LinComb {
            skeleton: self.skeleton.clone(),
            terms: self.terms.iter().map(|(d, c)| (d.clone(), f(c))).filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ChordDiagram, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (ChordDiagram, C)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, d: &ChordDiagram) -> Option<&C> {
        self.terms.get(d)
    }

    pub fn support(&self) -> Vec<&ChordDiagram> {
        self.terms.keys().collect()
    }

    pub fn degree_part(&self, n: usize) -> Self {
        LinComb {
            skeleton: self.skeleton.clone(),
            terms: self.terms.iter().filter(|(d, _)| d.degree() == n).map(|(d, c)| (d.clone(), c.clone())).collect(),
        }
    }

    pub fn degrees(&self) -> BTreeSet<usize> {
        self.terms.keys().map(ChordDiagram::degree).collect()
    }

    /// Same terms on an equal skeleton value (e.g. an isomorphic copy with
    /// identical ids).
    pub fn with_skeleton(&self, skeleton: Arc<Skeleton>) -> Self {
        LinComb { skeleton, terms: self.terms.clone() }
    }
}

impl LinComb<Rational> {
    pub fn from_diagram(skeleton: Arc<Skeleton>, d: ChordDiagram) -> Self {
        Self::single(skeleton, d, <Rational as Coeff>::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q;
    use crate::skeleton::*;

    #[test]
    fn two_strands_degree_one() {
        let s = strands(2);
        let ds = enumerate_diagrams(&s, 1);
        assert_eq!(ds.len(), 3);
        assert_eq!(enumerate_diagrams(&strands(1), 2).len(), 3);
        assert_eq!(enumerate_diagrams(&theta(), 0), alloc::vec![ChordDiagram::empty()]);
    }

    #[test]
    fn chord_order_does_not_matter() {
        let s = strands(2);
        let (a, b) = ((EdgeId(1), 0), (EdgeId(1), 1));
        let (c, d) = ((EdgeId(2), 0), (EdgeId(2), 1));
        let x = ChordDiagram::from_chords(&s, &[(a, c), (b, d)]).unwrap();
        let y = ChordDiagram::from_chords(&s, &[(d, b), (c, a)]).unwrap();
        assert_eq!(x, y);
        let z = ChordDiagram::from_sequences(&s, x.sequences()).unwrap();
        assert_eq!(x, z);
    }

    #[test]
    fn circle_rotations_identify() {
        let c = circle();
        let x = ChordDiagram::from_sequences(&c, [(EdgeId(0), alloc::vec![0, 1, 1, 0])]).unwrap();
        let y = ChordDiagram::from_sequences(&c, [(EdgeId(0), alloc::vec![0, 0, 1, 1])]).unwrap();
        assert_eq!(x, y);
        // degree 2 on a circle: crossed and parallel
        assert_eq!(enumerate_diagrams(&c, 2).len(), 2);
    }

    #[test]
    fn malformed_matching_is_rejected() {
        let s = strands(1);
        assert!(ChordDiagram::from_sequences(&s, [(EdgeId(1), alloc::vec![0, 1, 0])]).is_err());
        assert!(ChordDiagram::from_sequences(&s, [(EdgeId(9), alloc::vec![0, 0])]).is_err());
        assert!(ChordDiagram::from_chords(&s, &[((EdgeId(1), 0), (EdgeId(1), 2))]).is_err());
    }

    #[test]
    fn lincomb_arithmetic() {
        let s = Arc::new(strands(2));
        let d = enumerate_diagrams(&s, 1)[0].clone();
        let x = LinComb::from_diagram(s.clone(), d.clone());
        assert!(x.add(&x.scale(&q(-1, 1))).unwrap().is_zero());
        let h = x.scale(&q(1, 2));
        assert_eq!(h.add(&h).unwrap(), x);
        let mixed = x.add(&LinComb::one(s.clone())).unwrap();
        assert_eq!(mixed.degree_part(1), x);
        let other = LinComb::<Rational>::one(Arc::new(strands(3)));
        assert!(x.add(&other).is_err());
    }
}
