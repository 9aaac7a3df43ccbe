//! The strand algebras `A(↑n)`.
//!
//! Strand `i` of `strands(n)` is edge `i`, oriented upward, so a label
//! sequence lists endpoints from bottom to top. The product `a·b` stacks `b`
//! on top of `a`.
//!
//! Raw maps act on linear combinations without reducing; [`Series`] keeps
//! every part in normal form.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::coeff::{Coeff, Rational};
use crate::diagram::{ChordDiagram, LinComb};
use crate::error::{Error, Result};
use crate::relations::{reduce, Bases};
use crate::skeleton::{strands, EdgeId, Skeleton};

pub fn strand_skeleton(n: usize) -> Arc<Skeleton> {
    Arc::new(strands(n))
}

/// Number of strands of a strand skeleton.
pub fn strand_count(s: &Skeleton) -> Result<usize> {
    s.strand_edges()
        .map(|e| e.len())
        .ok_or_else(|| Error::SkeletonMismatch("not a strand skeleton".into()))
}

fn check_strands<C: Coeff>(v: &LinComb<C>, n: usize) -> Result<()> {
    let found = strand_count(v.skeleton())?;
    if found != n {
        return Err(Error::StrandMismatch { expected: n, found });
    }
    Ok(())
}

/// The product of chords `t_{i1 j1} t_{i2 j2} ...` (first factor lowest)
/// on `n` strands. A self-chord `t_ii` has adjacent endpoints.
pub fn chords(n: usize, pairs: &[(usize, usize)]) -> Result<ChordDiagram> {
    let s = strands(n);
    let mut seqs: BTreeMap<EdgeId, Vec<u16>> = BTreeMap::new();
    for (k, &(i, j)) in pairs.iter().enumerate() {
        for x in [i, j] {
            if x == 0 || x > n {
                return Err(Error::IndexOutOfRange { index: x, max: n });
            }
            seqs.entry(EdgeId(x as u32)).or_default().push(k as u16);
        }
    }
    ChordDiagram::from_sequences(&s, seqs)
}

/// `t_{i1 j1} t_{i2 j2} ...` as a rational combination.
pub fn word(n: usize, pairs: &[(usize, usize)]) -> Result<LinComb> {
    Ok(LinComb::from_diagram(strand_skeleton(n), chords(n, pairs)?))
}

fn stack_diagrams(s: &Skeleton, a: &ChordDiagram, b: &ChordDiagram) -> ChordDiagram {
    let shift = a.degree() as u16;
    let mut seqs = a.sequences();
    for (e, seq) in b.edges() {
        seqs.entry(*e).or_default().extend(seq.iter().map(|c| c + shift));
    }
    ChordDiagram::canonical(s, seqs)
}

/// Stacking product, `b` on top of `a`.
pub fn stack<C: Coeff>(a: &LinComb<C>, b: &LinComb<C>) -> Result<LinComb<C>> {
    if a.skeleton() != b.skeleton() {
        return Err(Error::SkeletonMismatch("stacking diagrams on different strand counts".into()));
    }
    strand_count(a.skeleton())?;
    let mut out = LinComb::zero(a.skeleton_arc().clone());
    for (da, ca) in a.terms() {
        for (db, cb) in b.terms() {
            out.add_term(stack_diagrams(a.skeleton(), da, db), ca.mul(cb));
        }
    }
    Ok(out)
}

/// A letter `x_j^{±1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    fn inv(self) -> Letter {
        Letter { generator: self.generator, inverse: !self.inverse }
    }
}

/// A homomorphism `F_m -> F_n`, given by the image words of `x_1..x_m`.
/// Letters of a word are read bottom to top along the source strand.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FreeGroupMap {
    target_rank: usize,
    words: Vec<Vec<Letter>>,
}

fn free_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for &l in w {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

impl FreeGroupMap {
    pub fn new(target_rank: usize, words: Vec<Vec<Letter>>) -> Result<Self> {
        for w in &words {
            for l in w {
                if l.generator == 0 || l.generator > target_rank {
                    return Err(Error::InvalidMap(format!("letter x{} outside F_{target_rank}", l.generator)));
                }
            }
        }
        Ok(FreeGroupMap { target_rank, words })
    }

    /// Builds a map from signed generator indices: `-3` is `x_3^{-1}`.
    pub fn from_signed(target_rank: usize, words: &[&[i32]]) -> Result<Self> {
        let words = words
            .iter()
            .map(|w| {
                w.iter()
                    .map(|&x| Letter { generator: x.unsigned_abs() as usize, inverse: x < 0 })
                    .collect()
            })
            .collect();
        Self::new(target_rank, words)
    }

    /// Parses one word per entry, letters like `x3` or `x3'` (inverse),
    /// optionally separated by spaces; `1` or an empty string is the
    /// identity word.
    pub fn parse(target_rank: usize, lines: &[&str]) -> Result<Self> {
        let mut words = Vec::new();
        for line in lines {
            let mut w = Vec::new();
            let mut rest = line.trim();
            if rest == "1" {
                rest = "";
            }
            while !rest.is_empty() {
                rest = rest.trim_start();
                let body = rest
                    .strip_prefix('x')
                    .ok_or_else(|| Error::InvalidMap(format!("expected a letter x<k> in {line:?}")))?;
                let digits = body.find(|c: char| !c.is_ascii_digit()).unwrap_or(body.len());
                let generator: usize = body[..digits]
                    .parse()
                    .map_err(|_| Error::InvalidMap(format!("bad generator index in {line:?}")))?;
                rest = &body[digits..];
                let inverse = rest.starts_with('\'');
                if inverse {
                    rest = &rest[1..];
                }
                w.push(Letter { generator, inverse });
                rest = rest.trim_start();
            }
            words.push(w);
        }
        Self::new(target_rank, words)
    }

    pub fn identity(n: usize) -> Self {
        let words = (1..=n).map(|i| alloc::vec![Letter { generator: i, inverse: false }]).collect();
        FreeGroupMap { target_rank: n, words }
    }

    pub fn source_rank(&self) -> usize {
        self.words.len()
    }

    pub fn target_rank(&self) -> usize {
        self.target_rank
    }

    pub fn words(&self) -> &[Vec<Letter>] {
        &self.words
    }

    /// `self ∘ inner`: first `inner: F_l -> F_m`, then `self: F_m -> F_n`.
    pub fn compose(&self, inner: &FreeGroupMap) -> Result<FreeGroupMap> {
        if inner.target_rank != self.source_rank() {
            return Err(Error::InvalidMap("ranks of composed maps do not match".into()));
        }
        let words = inner
            .words
            .iter()
            .map(|w| {
                let mut out = Vec::new();
                for l in w {
                    let image = &self.words[l.generator - 1];
                    if l.inverse {
                        out.extend(image.iter().rev().map(|x| x.inv()));
                    } else {
                        out.extend(image.iter().copied());
                    }
                }
                free_reduce(&out)
            })
            .collect();
        Ok(FreeGroupMap { target_rank: self.target_rank, words })
    }

    /// Same map with every word freely reduced.
    pub fn reduced(&self) -> FreeGroupMap {
        FreeGroupMap { target_rank: self.target_rank, words: self.words.iter().map(|w| free_reduce(w)).collect() }
    }

    /// The map realizing `Δ_i` on `A(↑n)` (`i = 0..=n+1`).
    pub fn doubling(n: usize, i: usize) -> Result<Self> {
        if i > n + 1 {
            return Err(Error::IndexOutOfRange { index: i, max: n + 1 });
        }
        let x = |k: usize| alloc::vec![Letter { generator: k, inverse: false }];
        let mut words: Vec<Vec<Letter>> = (1..=n).map(x).collect();
        match i {
            0 => words.insert(0, Vec::new()),
            _ if i == n + 1 => words.push(Vec::new()),
            _ => words.insert(i, x(i)),
        }
        Ok(FreeGroupMap { target_rank: n, words })
    }

    /// The map realizing `d_i` on `A(↑n)`.
    pub fn deletion(n: usize, i: usize) -> Result<Self> {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, max: n });
        }
        let words = (1..=n)
            .filter(|&k| k != i)
            .map(|k| alloc::vec![Letter { generator: k, inverse: false }])
            .collect();
        Ok(FreeGroupMap { target_rank: n, words })
    }

    /// The map realizing `permute(σ)`: strand `k` of the result carries what
    /// was on strand `σ⁻¹(k)`.
    pub fn permutation(sigma: &Perm) -> Self {
        let inv = sigma.inverse();
        let words = (1..=sigma.len())
            .map(|k| alloc::vec![Letter { generator: inv.apply(k), inverse: false }])
            .collect();
        FreeGroupMap { target_rank: sigma.len(), words }
    }

    /// `(x_1^{-1}, ..., x_n^{-1})`.
    pub fn all_inverted(n: usize) -> Self {
        let words = (1..=n).map(|k| alloc::vec![Letter { generator: k, inverse: true }]).collect();
        FreeGroupMap { target_rank: n, words }
    }
}

impl fmt::Display for FreeGroupMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.words.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            if w.is_empty() {
                write!(f, "1")?;
            }
            for (j, l) in w.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "x{}{}", l.generator, if l.inverse { "'" } else { "" })?;
            }
        }
        Ok(())
    }
}

/// A permutation of `1..=n` in one-line notation: `σ(i)` is entry `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Perm(Vec<usize>);

impl Perm {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = alloc::vec![false; n + 1];
        for &x in &images {
            if x == 0 || x > n || seen[x] {
                return Err(Error::InvalidMap(format!("{images:?} is not a permutation")));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    /// Parses a digit string such as `"231"`.
    pub fn parse(s: &str) -> Result<Self> {
        let images = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(|| Error::InvalidMap(format!("bad permutation {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i - 1]
    }

    pub fn inverse(&self) -> Perm {
        let mut out = alloc::vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            out[x - 1] = i + 1;
        }
        Perm(out)
    }
}

fn map_strands<C: Coeff>(
    v: &LinComb<C>,
    target: Arc<Skeleton>,
    f: impl Fn(&BTreeMap<EdgeId, Vec<u16>>) -> Option<(BTreeMap<EdgeId, Vec<u16>>, bool)>,
) -> LinComb<C> {
    let mut out = LinComb::zero(target.clone());
    for (d, c) in v.terms() {
        if let Some((seqs, negate)) = f(&d.sequences()) {
            let c = if negate { c.neg() } else { c.clone() };
            out.add_term(ChordDiagram::canonical(&target, seqs), c);
        }
    }
    out
}

/// `d_i`: diagrams with an endpoint on strand `i` vanish, the others lose
/// the strand.
pub fn delete_raw<C: Coeff>(v: &LinComb<C>, i: usize) -> Result<LinComb<C>> {
    let n = strand_count(v.skeleton())?;
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, max: n });
    }
    Ok(map_strands(v, strand_skeleton(n - 1), |seqs| {
        if seqs.contains_key(&EdgeId(i as u32)) {
            return None;
        }
        let out = seqs
            .iter()
            .map(|(e, s)| (if e.0 as usize > i { EdgeId(e.0 - 1) } else { *e }, s.clone()))
            .collect();
        Some((out, false))
    }))
}

/// Places strand `k` of the input at position `σ(k)`.
pub fn permute_raw<C: Coeff>(v: &LinComb<C>, sigma: &Perm) -> Result<LinComb<C>> {
    check_strands(v, sigma.len())?;
    Ok(map_strands(v, v.skeleton_arc().clone(), |seqs| {
        Some((seqs.iter().map(|(e, s)| (EdgeId(sigma.apply(e.0 as usize) as u32), s.clone())).collect(), false))
    }))
}

/// Reverses every strand; the sign `(-1)^{2·degree}` is always `+1`.
pub fn switch_all_raw<C: Coeff>(v: &LinComb<C>) -> Result<LinComb<C>> {
    strand_count(v.skeleton())?;
    Ok(map_strands(v, v.skeleton_arc().clone(), |seqs| {
        Some((seqs.iter().map(|(e, s)| (*e, s.iter().rev().copied().collect())).collect(), false))
    }))
}

/// `Δ_i` for `i = 0..=n+1`: `Δ_0`, `Δ_{n+1}` add an empty strand on the
/// left or right; otherwise strand `i` is doubled and each endpoint on it
/// goes to either copy.
pub fn delta_raw<C: Coeff>(v: &LinComb<C>, i: usize) -> Result<LinComb<C>> {
    let n = strand_count(v.skeleton())?;
    if i > n + 1 {
        return Err(Error::IndexOutOfRange { index: i, max: n + 1 });
    }
    let target = strand_skeleton(n + 1);
    let mut out = LinComb::zero(target.clone());
    let shift = |e: EdgeId| if i == 0 || (e.0 as usize) > i { EdgeId(e.0 + 1) } else { e };
    for (d, c) in v.terms() {
        let seqs = d.sequences();
        let base: BTreeMap<EdgeId, Vec<u16>> =
            seqs.iter().filter(|(e, _)| i == 0 || e.0 as usize != i).map(|(e, s)| (shift(*e), s.clone())).collect();
        let doubled: &[u16] = if i == 0 || i == n + 1 { &[] } else { seqs.get(&EdgeId(i as u32)).map_or(&[], |s| s) };
        for mask in 0u32..(1 << doubled.len()) {
            let mut m = base.clone();
            let (mut lo, mut hi) = (Vec::new(), Vec::new());
            for (k, &x) in doubled.iter().enumerate() {
                if mask >> k & 1 == 0 {
                    lo.push(x)
                } else {
                    hi.push(x)
                }
            }
            m.insert(EdgeId(i as u32), lo);
            m.insert(EdgeId(i as u32 + 1), hi);
            out.add_term(ChordDiagram::canonical(&target, m), c.clone());
        }
    }
    Ok(out)
}

/// `β^*`: lifts endpoints on target strand `j` independently to every
/// interval labelled `x_j^{±1}`, keeping (or, for inverse letters,
/// reversing) their order and contributing a sign `-1` per endpoint in an
/// inverse interval.
pub fn pullback<C: Coeff>(beta: &FreeGroupMap, v: &LinComb<C>) -> Result<LinComb<C>> {
    check_strands(v, beta.target_rank())?;
    let m = beta.source_rank();
    let target = strand_skeleton(m);
    // intervals covering each target strand: (source strand, index, inverse)
    let mut covers: BTreeMap<usize, Vec<(usize, usize, bool)>> = BTreeMap::new();
    for (k, w) in beta.words().iter().enumerate() {
        for (t, l) in w.iter().enumerate() {
            covers.entry(l.generator).or_default().push((k + 1, t, l.inverse));
        }
    }
    let mut out = LinComb::zero(target.clone());
    for (d, c) in v.terms() {
        let endpoints: Vec<(usize, u16)> =
            d.edges().iter().flat_map(|(e, s)| s.iter().map(move |&x| (e.0 as usize, x))).collect();
        let choices: Vec<&[(usize, usize, bool)]> =
            endpoints.iter().map(|(j, _)| covers.get(j).map_or(&[][..], |v| v.as_slice())).collect();
        if choices.iter().any(|c| c.is_empty()) {
            continue;
        }
        let mut pick = alloc::vec![0usize; endpoints.len()];
        'lifts: loop {
            // gather interval contents in endpoint order (bottom to top)
            let mut intervals: BTreeMap<(usize, usize), (bool, Vec<u16>)> = BTreeMap::new();
            let mut negate = false;
            for (p, &(_, label)) in endpoints.iter().enumerate() {
                let (k, t, inv) = choices[p][pick[p]];
                intervals.entry((k, t)).or_insert((inv, Vec::new())).1.push(label);
                negate ^= inv;
            }
            let mut seqs: BTreeMap<EdgeId, Vec<u16>> = BTreeMap::new();
            for ((k, _), (inv, mut labels)) in intervals {
                if inv {
                    labels.reverse();
                }
                seqs.entry(EdgeId(k as u32)).or_default().extend(labels);
            }
            let coeff = if negate { c.neg() } else { c.clone() };
            out.add_term(ChordDiagram::canonical(&target, seqs), coeff);
            let mut p = 0;
            loop {
                if p == pick.len() {
                    break 'lifts;
                }
                pick[p] += 1;
                if pick[p] < choices[p].len() {
                    break;
                }
                pick[p] = 0;
                p += 1;
            }
        }
    }
    Ok(out)
}

/// A truncated graded element of `A(↑n)`; part `d` is homogeneous of degree
/// `d` and kept in normal form.
#[derive(Clone, Debug)]
pub struct Series<C = Rational> {
    n: usize,
    parts: Vec<LinComb<C>>,
}

impl<C: Coeff> PartialEq for Series<C> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.parts == other.parts
    }
}

impl<C: Coeff> Series<C> {
    pub fn zero(n: usize, max_degree: usize) -> Self {
        let s = strand_skeleton(n);
        Series { n, parts: (0..=max_degree).map(|_| LinComb::zero(s.clone())).collect() }
    }

    pub fn one(n: usize, max_degree: usize) -> Self {
        let mut out = Self::zero(n, max_degree);
        out.parts[0] = LinComb::one(out.parts[0].skeleton_arc().clone());
        out
    }

    /// Splits a combination on `strands(n)` into reduced homogeneous parts.
    pub fn from_lincomb<B: Bases + ?Sized>(v: &LinComb<C>, max_degree: usize, bases: &B) -> Result<Self> {
        let n = strand_count(v.skeleton())?;
        let v = v.with_skeleton(strand_skeleton(n));
        let mut out = Self::zero(n, max_degree);
        for d in v.degrees() {
            if d <= max_degree {
                out.parts[d] = reduce(bases, &v.degree_part(d))?;
            }
        }
        Ok(out)
    }

    pub fn strands(&self) -> usize {
        self.n
    }

    pub fn max_degree(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn part(&self, d: usize) -> &LinComb<C> {
        &self.parts[d]
    }

    pub fn parts(&self) -> &[LinComb<C>] {
        &self.parts
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(LinComb::is_zero)
    }

    /// Everything as one inhomogeneous combination.
    pub fn to_lincomb(&self) -> LinComb<C> {
        let mut out = LinComb::zero(self.parts[0].skeleton_arc().clone());
        for p in &self.parts {
            out.add_assign(p).expect("same skeleton");
        }
        out
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::StrandMismatch { expected: self.n, found: other.n });
        }
        if self.max_degree() != other.max_degree() {
            return Err(Error::DegreeMismatch(self.max_degree(), other.max_degree()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let parts = self.parts.iter().zip(&other.parts).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(Series { n: self.n, parts })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Series { n: self.n, parts: self.parts.iter().map(LinComb::neg).collect() }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        Series { n: self.n, parts: self.parts.iter().map(|p| p.scale(k)).collect() }
    }

    pub fn truncated(&self, max_degree: usize) -> Self {
        let mut out = Self::zero(self.n, max_degree);
        for (d, p) in self.parts.iter().enumerate().take(max_degree + 1) {
            out.parts[d] = p.clone();
        }
        out
    }

    pub fn mul<B: Bases + ?Sized>(&self, other: &Self, bases: &B) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n, self.max_degree());
        for d in 0..=self.max_degree() {
            let mut acc = LinComb::zero(out.parts[d].skeleton_arc().clone());
            for i in 0..=d {
                if self.parts[i].is_zero() || other.parts[d - i].is_zero() {
                    continue;
                }
                acc.add_assign(&stack(&self.parts[i], &other.parts[d - i])?)?;
            }
            out.parts[d] = reduce(bases, &acc)?;
        }
        Ok(out)
    }

    /// Product of several series, left to right.
    pub fn product<B: Bases + ?Sized>(factors: &[&Self], bases: &B) -> Result<Self> {
        let (first, rest) = factors.split_first().ok_or_else(|| Error::InvalidMap("empty product".into()))?;
        let mut acc = (*first).clone();
        for f in rest {
            acc = acc.mul(f, bases)?;
        }
        Ok(acc)
    }

    fn unit_inverse(&self) -> Result<Rational> {
        let c = self.parts[0].coeff(&ChordDiagram::empty()).cloned().unwrap_or_else(C::zero);
        let q = c.as_rational().ok_or(Error::NotInvertible)?;
        if num_traits::Zero::is_zero(&q) {
            return Err(Error::NotInvertible);
        }
        Ok(num_traits::Inv::inv(q))
    }

    pub fn inverse<B: Bases + ?Sized>(&self, bases: &B) -> Result<Self> {
        let k = self.unit_inverse()?;
        // a = a0 (1 + x), a^{-1} = a0^{-1} Σ (-x)^j
        let mut x = self.scale(&k);
        x.parts[0] = LinComb::zero(x.parts[0].skeleton_arc().clone());
        let minus_x = x.neg();
        let mut term = Self::one(self.n, self.max_degree());
        let mut sum = term.clone();
        for _ in 0..self.max_degree() {
            term = term.mul(&minus_x, bases)?;
            sum = sum.add(&term)?;
        }
        Ok(sum.scale(&k))
    }

    /// `exp(c)` for a combination with no degree-0 part.
    pub fn exp<B: Bases + ?Sized>(c: &LinComb<C>, max_degree: usize, bases: &B) -> Result<Self> {
        let x = Self::from_lincomb(c, max_degree, bases)?;
        if !x.parts[0].is_zero() {
            return Err(Error::InvalidMap("exp needs a combination without degree-0 part".into()));
        }
        let mut term = Self::one(x.n, max_degree);
        let mut sum = term.clone();
        for j in 1..=max_degree {
            term = term.mul(&x, bases)?.scale(&Rational::new(1.into(), (j as i64).into()));
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }

    fn map_raw<B: Bases + ?Sized>(&self, bases: &B, f: impl Fn(&LinComb<C>) -> Result<LinComb<C>>) -> Result<Self> {
        let mut parts = Vec::new();
        let mut n = None;
        for p in &self.parts {
            let image = f(p)?;
            n = Some(strand_count(image.skeleton())?);
            parts.push(reduce(bases, &image)?);
        }
        Ok(Series { n: n.expect("degree 0 part"), parts })
    }

    pub fn delta<B: Bases + ?Sized>(&self, i: usize, bases: &B) -> Result<Self> {
        self.map_raw(bases, |p| delta_raw(p, i))
    }

    pub fn delete<B: Bases + ?Sized>(&self, i: usize, bases: &B) -> Result<Self> {
        self.map_raw(bases, |p| delete_raw(p, i))
    }

    pub fn permute<B: Bases + ?Sized>(&self, sigma: &Perm, bases: &B) -> Result<Self> {
        self.map_raw(bases, |p| permute_raw(p, sigma))
    }

    pub fn switch_all<B: Bases + ?Sized>(&self, bases: &B) -> Result<Self> {
        self.map_raw(bases, switch_all_raw)
    }

    pub fn pullback<B: Bases + ?Sized>(&self, beta: &FreeGroupMap, bases: &B) -> Result<Self> {
        self.map_raw(bases, |p| pullback(beta, p))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Series<D> {
        Series { n: self.n, parts: self.parts.iter().map(|p| p.map_coeffs(&f)).collect() }
    }
}

impl<C: Coeff + fmt::Display> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.parts {
            for (d, c) in p.terms() {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({c}){}", diagram_label(d))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Compact label of a diagram: label sequences per edge, e.g. `[1:0,1 2:1,0]`.
pub fn diagram_label(d: &ChordDiagram) -> String {
    let parts: Vec<String> = d
        .edges()
        .iter()
        .map(|(e, seq)| {
            let labels: Vec<String> = seq.iter().map(|c| format!("{c}")).collect();
            format!("{e}:{}", labels.join(","))
        })
        .collect();
    format!("[{}]", parts.join(" "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::q;
    use crate::relations::LocalBases;

    #[test]
    fn stacking_t12_twice() {
        let t = word(2, &[(1, 2)]).unwrap();
        let tt = stack(&t, &t).unwrap();
        assert_eq!(tt, word(2, &[(1, 2), (1, 2)]).unwrap());
        assert_eq!(stack(&LinComb::one(strand_skeleton(2)), &t).unwrap(), t);
    }

    #[test]
    fn delta_examples() {
        let t12 = word(2, &[(1, 2)]).unwrap();
        let got = delta_raw(&t12, 2).unwrap();
        let want = word(3, &[(1, 2)]).unwrap().add(&word(3, &[(1, 3)]).unwrap()).unwrap();
        assert_eq!(got, want);
        let one = LinComb::<Rational>::one(strand_skeleton(2));
        assert_eq!(delta_raw(&one, 0).unwrap(), LinComb::one(strand_skeleton(3)));
        assert!(delete_raw(&t12, 1).unwrap().is_zero());
        assert!(delete_raw(&t12, 2).unwrap().is_zero());
    }

    #[test]
    fn doubling_a_self_chord_by_pullback() {
        let t11 = word(1, &[(1, 1)]).unwrap();
        let beta = FreeGroupMap::parse(1, &["x1", "x1"]).unwrap();
        let got = pullback(&beta, &t11).unwrap();
        // t11 + t22 + 2 t12 (the two mixed lifts coincide as diagrams)
        let want = word(2, &[(1, 1)])
            .unwrap()
            .add(&word(2, &[(2, 2)]).unwrap())
            .unwrap()
            .add(&word(2, &[(1, 2)]).unwrap().scale(&q(2, 1)))
            .unwrap();
        assert_eq!(got, want);
        assert_eq!(got, delta_raw(&t11, 1).unwrap());
    }

    #[test]
    fn uncovered_strand_kills() {
        let t = word(3, &[(1, 2)]).unwrap();
        let beta = FreeGroupMap::parse(3, &["x2", "x3"]).unwrap();
        assert!(pullback(&beta, &t).unwrap().is_zero());
    }

    #[test]
    fn beta5_cubed_is_identity() {
        let b5 = FreeGroupMap::parse(3, &["x3'", "x3' x1", "x2' x1"]).unwrap();
        let cube = b5.compose(&b5).unwrap().compose(&b5).unwrap();
        assert_eq!(cube, FreeGroupMap::identity(3));
    }

    #[test]
    fn parse_and_display_round_trip() {
        let b = FreeGroupMap::parse(3, &["x2x1'", "1", "x3"]).unwrap();
        let text = alloc::format!("{b}");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(FreeGroupMap::parse(3, &lines).unwrap(), b);
        assert!(FreeGroupMap::parse(2, &["x3"]).is_err());
    }

    #[test]
    fn exp_and_inverse() {
        let bases = LocalBases::new();
        let half = word(2, &[(1, 2)]).unwrap().scale(&q(1, 2));
        let r = Series::exp(&half, 3, &bases).unwrap();
        let want = word(2, &[(1, 2), (1, 2)]).unwrap().scale(&q(1, 8));
        assert_eq!(r.part(2), &crate::relations::reduce(&bases, &want).unwrap());
        let inv = r.inverse(&bases).unwrap();
        let minus = Series::exp(&half.neg(), 3, &bases).unwrap();
        assert_eq!(inv, minus);
        assert_eq!(r.mul(&inv, &bases).unwrap(), Series::one(2, 3));
        let one = Series::<Rational>::one(3, 2);
        assert_eq!(one.inverse(&bases).unwrap(), one);
    }
}
