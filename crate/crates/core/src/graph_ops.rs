//! Operations induced on `A(Γ)` by the skeleton operations, and the
//! sweeping isomorphism onto strand algebras.
//!
//! Raw functions act diagram by diagram on linear combinations without
//! reducing; [`GradedElement`] wraps them and keeps parts in normal form.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::coeff::{Coeff, Rational};
use crate::diagram::{ChordDiagram, LinComb};
use crate::error::{precondition, Error, Result};
use crate::relations::{reduce, Bases};
use crate::skeleton::{self, Edge, EdgeEnd, EdgeId, End, Leaf, Piece, Rebuilt, Side, Skeleton, Tree, Vertex, VertexId};
use crate::strand_algebra::{strand_count, strand_skeleton, Series};

type Seqs = BTreeMap<EdgeId, Vec<u16>>;

fn sign<C: Coeff>(c: &C, negative: bool) -> C {
    if negative {
        c.neg()
    } else {
        c.clone()
    }
}

/// Lays out slots on the edges of a rebuilt skeleton.
fn transport(target: &Skeleton, seqs: &Seqs, rebuilt: &Rebuilt, daughters: &BTreeMap<(EdgeId, Side), Vec<u16>>) -> ChordDiagram {
    let mut out = Seqs::new();
    for (&e, pieces) in &rebuilt.transport.paths {
        let mut seq = Vec::new();
        for p in pieces {
            match p {
                Piece::Whole(x) => seq.extend(seqs.get(x).into_iter().flatten()),
                Piece::Daughter(x, side) => seq.extend(daughters.get(&(*x, *side)).into_iter().flatten()),
                Piece::Empty => {}
            }
        }
        out.insert(e, seq);
    }
    ChordDiagram::canonical(target, out)
}

/// Reverses edge `e`: slot order on `e` flips and the sign is `(-1)^k`.
pub fn switch<C: Coeff>(v: &LinComb<C>, e: EdgeId) -> Result<LinComb<C>> {
    let target = Arc::new(skeleton::switch_edge(v.skeleton(), e)?);
    let mut out = LinComb::zero(target.clone());
    for (d, c) in v.terms() {
        let mut seqs = d.sequences();
        let k = seqs.get(&e).map_or(0, Vec::len);
        if let Some(s) = seqs.get_mut(&e) {
            s.reverse();
        }
        out.add_term(ChordDiagram::canonical(&target, seqs), sign(c, k % 2 == 1));
    }
    Ok(out)
}

/// Deletes edge `e`: diagrams with an endpoint on `e` vanish.
pub fn delete<C: Coeff>(v: &LinComb<C>, e: EdgeId) -> Result<LinComb<C>> {
    let rebuilt = skeleton::delete_edge(v.skeleton(), e)?;
    let target = Arc::new(rebuilt.skeleton.clone());
    let mut out = LinComb::zero(target.clone());
    for (d, c) in v.terms() {
        if d.count_on(e) == 0 {
            out.add_term(transport(&target, &d.sequences(), &rebuilt, &BTreeMap::new()), c.clone());
        }
    }
    Ok(out)
}

fn unzip_along<C: Coeff>(v: &LinComb<C>, path: &[EdgeId], rebuilt: Rebuilt) -> LinComb<C> {
    let target = Arc::new(rebuilt.skeleton.clone());
    let mut out = LinComb::zero(target.clone());
    for (d, c) in v.terms() {
        let seqs = d.sequences();
        let k: usize = path.iter().map(|e| d.count_on(*e)).sum();
        for mask in 0u64..(1 << k) {
            let mut daughters: BTreeMap<(EdgeId, Side), Vec<u16>> = BTreeMap::new();
            let mut bit = 0;
            for &e in path {
                for &x in d.on_edge(e) {
                    let side = if mask >> bit & 1 == 0 { Side::Left } else { Side::Right };
                    daughters.entry((e, side)).or_default().push(x);
                    bit += 1;
                }
            }
            out.add_term(transport(&target, &seqs, &rebuilt, &daughters), c.clone());
        }
    }
    out
}

/// Unzips `e`: each endpoint on `e` goes to either daughter, `2^k` terms.
pub fn unzip<C: Coeff>(v: &LinComb<C>, e: EdgeId) -> Result<LinComb<C>> {
    let rebuilt = skeleton::unzip_edge(v.skeleton(), e)?;
    Ok(unzip_along(v, &[e], rebuilt))
}

/// Dotted unzip of the dotted edge through `e`.
pub fn dotted_unzip<C: Coeff>(v: &LinComb<C>, e: EdgeId) -> Result<LinComb<C>> {
    let rebuilt = skeleton::dotted_unzip(v.skeleton(), e)?;
    let path: Vec<EdgeId> = v.skeleton().bivalent_path(e)?.into_iter().map(|(x, _)| x).collect();
    Ok(unzip_along(v, &path, rebuilt))
}

/// Removes an adjacent dot and anti-dot; slots are unchanged.
pub fn cancel<C: Coeff>(v: &LinComb<C>, d: VertexId, a: VertexId) -> Result<LinComb<C>> {
    let rebuilt = skeleton::cancel(v.skeleton(), d, a)?;
    let target = Arc::new(rebuilt.skeleton.clone());
    let mut out = LinComb::zero(target.clone());
    for (x, c) in v.terms() {
        out.add_term(transport(&target, &x.sequences(), &rebuilt, &BTreeMap::new()), c.clone());
    }
    Ok(out)
}

/// Juxtaposes two diagrams on the disjoint union, second one shifted.
fn union_seqs(a: &ChordDiagram, b: &ChordDiagram, edge_offset: u32) -> Seqs {
    let mut seqs = a.sequences();
    let shift = a.degree() as u16;
    for (e, s) in b.edges() {
        seqs.insert(EdgeId(e.0 + edge_offset), s.iter().map(|x| x + shift).collect());
    }
    seqs
}

fn binary<C: Coeff>(v1: &LinComb<C>, v2: &LinComb<C>, rebuilt: &Rebuilt) -> LinComb<C> {
    let target = Arc::new(rebuilt.skeleton.clone());
    let mut out = LinComb::zero(target.clone());
    for (a, ca) in v1.terms() {
        for (b, cb) in v2.terms() {
            let seqs = union_seqs(a, b, rebuilt.offsets.1);
            out.add_term(transport(&target, &seqs, rebuilt, &BTreeMap::new()), ca.mul(cb));
        }
    }
    out
}

/// Connected sum: diagrams are juxtaposed, chords unchanged.
pub fn connect<C: Coeff>(v1: &LinComb<C>, e: EdgeId, v2: &LinComb<C>, f: EdgeId) -> Result<LinComb<C>> {
    let rebuilt = skeleton::connected_sum(v1.skeleton(), e, v2.skeleton(), f)?;
    Ok(binary(v1, v2, &rebuilt))
}

/// Root and edge order for clearing a tree of chord endpoints.
fn tree_schedule(s: &Skeleton, vertices: &BTreeSet<VertexId>, edges: &BTreeSet<EdgeId>, root: VertexId) -> Result<Vec<(EdgeId, VertexId)>> {
    if !vertices.contains(&root) {
        return Err(Error::Tree(format!("root {root} is not a tree vertex")));
    }
    let mut depth: BTreeMap<VertexId, usize> = BTreeMap::new();
    depth.insert(root, 0);
    let mut queue = VecDeque::from([root]);
    let mut order = Vec::new();
    while let Some(v) = queue.pop_front() {
        for &e in edges {
            let (a, b) = s.endpoints(e)?.ok_or_else(|| Error::Tree(format!("edge {e} is a circle")))?;
            let far = if a == v { b } else if b == v { a } else { continue };
            if depth.contains_key(&far) {
                continue;
            }
            depth.insert(far, depth[&v] + 1);
            order.push((depth[&v], e, far));
            queue.push_back(far);
        }
    }
    if depth.len() != vertices.len() || order.len() != edges.len() {
        return Err(Error::Tree("edges do not form a tree on the given vertices".into()));
    }
    order.sort();
    Ok(order.into_iter().map(|(_, e, far)| (e, far)).collect())
}

/// Pushes all endpoints off `g` across its end vertex `w` by vertex
/// invariance: `D_g = -Σ_{j≠g} (ε_j/ε_g) D_j`.
fn push_off(s: &Skeleton, g: EdgeId, w: VertexId, seqs: Seqs) -> Result<Vec<(Seqs, bool)>> {
    let vert = s.vertex(w).ok_or(Error::UnknownVertex(w))?;
    if matches!(vert, Vertex::Boundary(_)) {
        return Err(precondition("cannot push endpoints across a boundary vertex"));
    }
    let gend = *vert
        .ends()
        .iter()
        .find(|x| x.edge == g)
        .ok_or_else(|| precondition(format!("edge {g} does not end at {w}")))?;
    let eps = |x: EdgeEnd| if x.is_outgoing() { -1i32 } else { 1 };
    let mut done = Vec::new();
    let mut work = alloc::vec![(seqs, false)];
    while let Some((seqs, neg)) = work.pop() {
        let on_g = seqs.get(&g).map_or(0, Vec::len);
        if on_g == 0 {
            done.push((seqs, neg));
            continue;
        }
        let pos = if gend.end == End::Tail { 0 } else { on_g - 1 };
        let mut rest = seqs.clone();
        let label = rest.get_mut(&g).expect("nonempty").remove(pos);
        for &j in vert.ends().iter().filter(|&&j| j != gend) {
            let mut m = rest.clone();
            let seq = m.entry(j.edge).or_default();
            let at = if j.end == End::Tail { 0 } else { seq.len() };
            seq.insert(at, label);
            let factor = -eps(j) * eps(gend);
            work.push((m, neg ^ (factor < 0)));
        }
    }
    Ok(done)
}

/// Clears the given tree edges of chord endpoints, pushing them away from
/// `root` one edge at a time, shallowest edges first.
pub fn clear_tree<C: Coeff>(v: &LinComb<C>, vertices: &BTreeSet<VertexId>, edges: &BTreeSet<EdgeId>, root: VertexId) -> Result<LinComb<C>> {
    let s = v.skeleton();
    let schedule = tree_schedule(s, vertices, edges, root)?;
    let mut cur: BTreeMap<ChordDiagram, C> = v.terms().map(|(d, c)| (d.clone(), c.clone())).collect();
    for (g, far) in schedule {
        let mut next = LinComb::zero(v.skeleton_arc().clone());
        for (d, c) in &cur {
            if d.count_on(g) == 0 {
                next.add_term(d.clone(), c.clone());
                continue;
            }
            for (seqs, neg) in push_off(s, g, far, d.sequences())? {
                next.add_term(ChordDiagram::canonical(s, seqs), sign(c, neg));
            }
        }
        cur = next.into_terms().collect();
    }
    let mut out = LinComb::zero(v.skeleton_arc().clone());
    for (d, c) in cur {
        out.add_term(d, c);
    }
    Ok(out)
}

fn tree_parts(s: &Skeleton, t: &Tree) -> Option<(BTreeSet<VertexId>, BTreeSet<EdgeId>)> {
    match t {
        Tree::Vertices { vertices, edges } => {
            let _ = s;
            Some((vertices.clone(), edges.clone()))
        }
        Tree::Segment(_) => None,
    }
}

/// Tree connected sum. Endpoints on internal tree edges are first pushed
/// off by vertex invariance, away from the given roots (default: the
/// smallest tree vertex).
pub fn tree_connect<C: Coeff>(
    v1: &LinComb<C>,
    t1: &Tree,
    v2: &LinComb<C>,
    t2: &Tree,
    pairs: &[(Leaf, Leaf)],
    roots: (Option<VertexId>, Option<VertexId>),
) -> Result<LinComb<C>> {
    let rebuilt = skeleton::tree_connected_sum(v1.skeleton(), t1, v2.skeleton(), t2, pairs)?;
    let clear = |v: &LinComb<C>, t: &Tree, root: Option<VertexId>| -> Result<LinComb<C>> {
        match tree_parts(v.skeleton(), t) {
            Some((vs, es)) => {
                let root = root.unwrap_or(*vs.iter().next().expect("validated tree"));
                clear_tree(v, &vs, &es, root)
            }
            None => Ok(v.clone()),
        }
    };
    let a = clear(v1, t1, roots.0)?;
    let b = clear(v2, t2, roots.1)?;
    Ok(binary(&a, &b, &rebuilt))
}

/// A spanning tree whose complement is a list of strands: strand `k` is
/// the `k`-th non-tree edge, read along (`true`) or against its
/// orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSpec {
    pub tree: BTreeSet<EdgeId>,
    pub strands: Vec<(EdgeId, bool)>,
    pub root: Option<VertexId>,
}

impl SweepSpec {
    /// Tree edges plus all other edges as forward strands in id order.
    pub fn new(s: &Skeleton, tree: impl IntoIterator<Item = EdgeId>) -> SweepSpec {
        let tree: BTreeSet<EdgeId> = tree.into_iter().collect();
        let strands = s.edge_ids().filter(|e| !tree.contains(e)).map(|e| (e, true)).collect();
        SweepSpec { tree, strands, root: None }
    }

    pub fn with_root(mut self, root: VertexId) -> Self {
        self.root = Some(root);
        self
    }

    fn validate(&self, s: &Skeleton) -> Result<()> {
        if s.circles().next().is_some() {
            return Err(precondition("sweeping needs a skeleton without free circles"));
        }
        if s.vertices().any(|(_, v)| matches!(v, Vertex::Boundary(_))) {
            return Err(precondition("sweeping needs a skeleton without boundary vertices"));
        }
        if s.components().len() != 1 {
            return Err(precondition("sweeping needs a connected skeleton"));
        }
        let listed: BTreeSet<EdgeId> = self.strands.iter().map(|(e, _)| *e).collect();
        let rest: BTreeSet<EdgeId> = s.edge_ids().filter(|e| !self.tree.contains(e)).collect();
        if listed != rest || listed.len() != self.strands.len() {
            return Err(precondition("strands must list every non-tree edge once"));
        }
        Ok(())
    }
}

/// Sweeps the tree free of chords and reads the strands off.
pub fn sweep<C: Coeff>(v: &LinComb<C>, spec: &SweepSpec) -> Result<LinComb<C>> {
    let s = v.skeleton();
    spec.validate(s)?;
    let vertices: BTreeSet<VertexId> = s.vertices().map(|(k, _)| k).collect();
    let root = spec.root.unwrap_or(*vertices.iter().next().expect("connected skeleton has a vertex"));
    let cleared = clear_tree(v, &vertices, &spec.tree, root)?;
    let target = strand_skeleton(spec.strands.len());
    let mut out = LinComb::zero(target.clone());
    for (d, c) in cleared.terms() {
        let mut seqs = Seqs::new();
        let mut neg = false;
        for (k, &(e, forward)) in spec.strands.iter().enumerate() {
            let mut seq = d.on_edge(e).to_vec();
            if !forward {
                seq.reverse();
                neg ^= seq.len() % 2 == 1;
            }
            seqs.insert(EdgeId(k as u32 + 1), seq);
        }
        out.add_term(ChordDiagram::canonical(&target, seqs), sign(c, neg));
    }
    Ok(out)
}

/// Inverse of [`sweep`]: places strand diagrams on the non-tree edges.
pub fn include<C: Coeff>(v: &LinComb<C>, target: Arc<Skeleton>, spec: &SweepSpec) -> Result<LinComb<C>> {
    spec.validate(&target)?;
    let n = strand_count(v.skeleton())?;
    if n != spec.strands.len() {
        return Err(Error::StrandMismatch { expected: spec.strands.len(), found: n });
    }
    let mut out = LinComb::zero(target.clone());
    for (d, c) in v.terms() {
        let mut seqs = Seqs::new();
        let mut neg = false;
        for (k, &(e, forward)) in spec.strands.iter().enumerate() {
            let mut seq = d.on_edge(EdgeId(k as u32 + 1)).to_vec();
            if !forward {
                seq.reverse();
                neg ^= seq.len() % 2 == 1;
            }
            seqs.insert(e, seq);
        }
        out.add_term(ChordDiagram::canonical(&target, seqs), sign(c, neg));
    }
    Ok(out)
}

/// Truncated element of `A(Γ)` with every homogeneous part reduced.
#[derive(Clone, Debug)]
pub struct GradedElement<C = Rational> {
    skeleton: Arc<Skeleton>,
    parts: Vec<LinComb<C>>,
}

impl<C: Coeff> PartialEq for GradedElement<C> {
    fn eq(&self, other: &Self) -> bool {
        self.skeleton == other.skeleton && self.parts == other.parts
    }
}

impl<C: Coeff> GradedElement<C> {
    pub fn from_lincomb<B: Bases + ?Sized>(v: &LinComb<C>, max_degree: usize, bases: &B) -> Result<Self> {
        let skeleton = v.skeleton_arc().clone();
        let mut parts = Vec::new();
        for d in 0..=max_degree {
            parts.push(reduce(bases, &v.degree_part(d))?);
        }
        Ok(GradedElement { skeleton, parts })
    }

    pub fn skeleton(&self) -> &Skeleton {
        &self.skeleton
    }

    pub fn max_degree(&self) -> usize {
        self.parts.len() - 1
    }

    pub fn part(&self, d: usize) -> &LinComb<C> {
        &self.parts[d]
    }

    pub fn to_lincomb(&self) -> LinComb<C> {
        let mut out = LinComb::zero(self.skeleton.clone());
        for p in &self.parts {
            out.add_assign(p).expect("same skeleton");
        }
        out
    }

    fn map<B: Bases + ?Sized>(&self, bases: &B, f: impl Fn(&LinComb<C>) -> Result<LinComb<C>>) -> Result<Self> {
        let mut parts = Vec::new();
        for p in &self.parts {
            parts.push(reduce(bases, &f(p)?)?);
        }
        let skeleton = parts[0].skeleton_arc().clone();
        Ok(GradedElement { skeleton, parts })
    }

    pub fn switch<B: Bases + ?Sized>(&self, e: EdgeId, bases: &B) -> Result<Self> {
        self.map(bases, |p| switch(p, e))
    }

    pub fn delete<B: Bases + ?Sized>(&self, e: EdgeId, bases: &B) -> Result<Self> {
        self.map(bases, |p| delete(p, e))
    }

    pub fn unzip<B: Bases + ?Sized>(&self, e: EdgeId, bases: &B) -> Result<Self> {
        self.map(bases, |p| unzip(p, e))
    }

    pub fn dotted_unzip<B: Bases + ?Sized>(&self, e: EdgeId, bases: &B) -> Result<Self> {
        self.map(bases, |p| dotted_unzip(p, e))
    }

    pub fn cancel<B: Bases + ?Sized>(&self, d: VertexId, a: VertexId, bases: &B) -> Result<Self> {
        self.map(bases, |p| cancel(p, d, a))
    }

    /// Graded product of the two binary images, truncated.
    fn binary_op<B: Bases + ?Sized>(
        &self,
        other: &Self,
        bases: &B,
        f: impl Fn(&LinComb<C>, &LinComb<C>) -> Result<LinComb<C>>,
    ) -> Result<Self> {
        let max = self.max_degree().min(other.max_degree());
        let mut acc: Option<LinComb<C>> = None;
        for i in 0..=max {
            for j in 0..=max - i {
                let r = f(&self.parts[i], &other.parts[j])?;
                match &mut acc {
                    Some(a) => a.add_assign(&r)?,
                    None => acc = Some(r),
                }
            }
        }
        let total = acc.expect("degree 0 always present");
        GradedElement::from_lincomb(&total, max, bases)
    }

    pub fn connect<B: Bases + ?Sized>(&self, e: EdgeId, other: &Self, f: EdgeId, bases: &B) -> Result<Self> {
        self.binary_op(other, bases, |a, b| connect(a, e, b, f))
    }

    pub fn tree_connect<B: Bases + ?Sized>(
        &self,
        t1: &Tree,
        other: &Self,
        t2: &Tree,
        pairs: &[(Leaf, Leaf)],
        bases: &B,
    ) -> Result<Self> {
        self.binary_op(other, bases, |a, b| tree_connect(a, t1, b, t2, pairs, (None, None)))
    }

    pub fn sweep<B: Bases + ?Sized>(&self, spec: &SweepSpec, bases: &B) -> Result<Series<C>> {
        Series::from_lincomb(&sweep(&self.to_lincomb(), spec)?, self.max_degree(), bases)
    }
}

/// Whether `e` is an edge whose both ends meet the given vertex set.
pub fn is_internal(s: &Skeleton, e: EdgeId, vertices: &BTreeSet<VertexId>) -> bool {
    matches!(s.edge(e), Some(Edge::Segment { tail, head }) if vertices.contains(tail) && vertices.contains(head))
}
