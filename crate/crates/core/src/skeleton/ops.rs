//! Skeleton-level operations.
//!
//! Operations that remove vertices fuse the surviving edge pieces into new
//! edges. Each such operation returns a [`Transport`] recording, for every
//! edge of the result, the ordered pieces of the input it is made of, so
//! that chord endpoints can be carried along.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use super::{malformed, BivalentKind, Edge, EdgeEnd, EdgeId, End, Skeleton, Vertex, VertexId};
use crate::error::{precondition, Error, Result};

/// The two daughters of an unzipped edge. Looking along the edge, `Left`
/// attaches to the end following the edge counterclockwise at its tail
/// vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Left,
    Right,
}

/// A piece of an input edge as it appears inside an output edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Piece {
    /// All chord slots of the input edge, in order.
    Whole(EdgeId),
    /// One daughter of an unzipped input edge; which slots land on it is
    /// decided by the chord-level operation.
    Daughter(EdgeId, Side),
    /// A freshly created stretch carrying no slots.
    Empty,
}

/// For each edge of an output skeleton, the input pieces it is made of,
/// in orientation order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Transport {
    pub paths: BTreeMap<EdgeId, Vec<Piece>>,
}

impl Transport {
    fn identity(s: &Skeleton) -> Transport {
        Transport {
            paths: s.edge_ids().map(|e| (e, alloc::vec![Piece::Whole(e)])).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rebuilt {
    pub skeleton: Skeleton,
    pub transport: Transport,
    /// `(vertex, edge)` id offsets applied to the second operand of a
    /// binary operation; `(0, 0)` for unary ones.
    pub offsets: (u32, u32),
}

/// A distinguished tree for tree connected sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    /// Vertices (trivalent, dots or anti-dots) joined by internal edges.
    Vertices { vertices: BTreeSet<VertexId>, edges: BTreeSet<EdgeId> },
    /// A short segment in the interior of an edge (the trivial tree).
    Segment(EdgeId),
}

/// Leaves of a tree are named by edge-ends of the skeleton. For a vertex
/// tree, a leaf is the end of a non-tree edge at a tree vertex. For
/// `Segment(e)`, `(e, Head)` is the cut end of the part of `e` before the
/// segment and `(e, Tail)` the cut end of the part after it.
pub type Leaf = EdgeEnd;

pub fn switch_edge(s: &Skeleton, e: EdgeId) -> Result<Skeleton> {
    match *s.require_edge(e)? {
        Edge::Circle => Ok(s.clone()),
        Edge::Segment { tail, head } => {
            let mut vertices = s.vertices.clone();
            for v in [tail, head] {
                let vert = s.vertices[&v];
                vertices.insert(
                    v,
                    vert.map_ends(|end| if end.edge == e { end.opposite() } else { end }),
                );
            }
            let mut edges = s.edges.clone();
            edges.insert(e, Edge::Segment { tail: head, head: tail });
            Skeleton::from_raw(vertices, edges)
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Attach {
    Vertex,
    Junction(u32),
    Closed,
}

#[derive(Clone, Debug)]
struct PieceSpec {
    piece: Piece,
    keep: Option<EdgeId>,
    tail: Attach,
    head: Attach,
}

/// Vertex ends inside the builder refer to pieces: `EdgeEnd.edge.0` is a
/// piece index.
struct Builder {
    pieces: Vec<Option<PieceSpec>>,
    index: BTreeMap<EdgeId, usize>,
    vertices: BTreeMap<VertexId, Vertex>,
    next_junction: u32,
    next_vertex: u32,
    next_edge: u32,
}

impl Builder {
    fn new(s: &Skeleton) -> Builder {
        let mut pieces = Vec::new();
        let mut index = BTreeMap::new();
        for (&e, edge) in &s.edges {
            index.insert(e, pieces.len());
            let attach = match edge {
                Edge::Circle => Attach::Closed,
                Edge::Segment { .. } => Attach::Vertex,
            };
            pieces.push(Some(PieceSpec { piece: Piece::Whole(e), keep: Some(e), tail: attach, head: attach }));
        }
        let vertices = s
            .vertices
            .iter()
            .map(|(&k, &v)| {
                (k, v.map_ends(|end| EdgeEnd { edge: EdgeId(index[&end.edge] as u32), end: end.end }))
            })
            .collect();
        Builder {
            pieces,
            index,
            vertices,
            next_junction: 0,
            next_vertex: s.next_vertex_id().0,
            next_edge: s.next_edge_id().0,
        }
    }

    fn piece_end(&self, end: EdgeEnd) -> EdgeEnd {
        EdgeEnd { edge: EdgeId(self.index[&end.edge] as u32), end: end.end }
    }

    fn set_attach(&mut self, pend: EdgeEnd, a: Attach) {
        let spec = self.pieces[pend.edge.0 as usize].as_mut().expect("live piece");
        match pend.end {
            End::Tail => spec.tail = a,
            End::Head => spec.head = a,
        }
    }

    fn junction(&mut self) -> Attach {
        self.next_junction += 1;
        Attach::Junction(self.next_junction - 1)
    }

    /// Joins the given input edge-ends at one junction.
    fn fuse(&mut self, a: EdgeEnd, b: EdgeEnd) {
        let j = self.junction();
        self.set_attach(self.piece_end(a), j);
        self.set_attach(self.piece_end(b), j);
    }

    fn remove_edge(&mut self, e: EdgeId) {
        self.pieces[self.index[&e]] = None;
    }

    fn add_piece(&mut self, piece: Piece, tail: Attach, head: Attach) -> usize {
        self.pieces.push(Some(PieceSpec { piece, keep: None, tail, head }));
        self.pieces.len() - 1
    }

    fn fresh_vertex(&mut self) -> VertexId {
        self.next_vertex += 1;
        VertexId(self.next_vertex - 1)
    }

    fn finish(self) -> Result<Rebuilt> {
        let n = self.pieces.len();
        let mut into: BTreeMap<u32, usize> = BTreeMap::new();
        let mut out_of: BTreeMap<u32, usize> = BTreeMap::new();
        for (i, p) in self.pieces.iter().enumerate() {
            let Some(p) = p else { continue };
            if let Attach::Junction(j) = p.head {
                if into.insert(j, i).is_some() {
                    return Err(precondition("edge orientations do not match at a fused vertex"));
                }
            }
            if let Attach::Junction(j) = p.tail {
                if out_of.insert(j, i).is_some() {
                    return Err(precondition("edge orientations do not match at a fused vertex"));
                }
            }
        }
        if into.keys().ne(out_of.keys()) {
            return Err(precondition("edge orientations do not match at a fused vertex"));
        }
        let spec = |i: usize| self.pieces[i].as_ref().expect("live piece");
        let mut chains: Vec<(Vec<usize>, bool)> = Vec::new();
        let mut visited = alloc::vec![false; n];
        for i in 0..n {
            let Some(p) = &self.pieces[i] else { continue };
            match p.tail {
                Attach::Vertex => {
                    let mut chain = alloc::vec![i];
                    visited[i] = true;
                    let mut cur = i;
                    while let Attach::Junction(j) = spec(cur).head {
                        cur = out_of[&j];
                        if visited[cur] {
                            return Err(malformed("inconsistent fusion".into()));
                        }
                        visited[cur] = true;
                        chain.push(cur);
                    }
                    if matches!(spec(cur).head, Attach::Closed) {
                        return Err(malformed("inconsistent fusion".into()));
                    }
                    chains.push((chain, false));
                }
                Attach::Closed => {
                    visited[i] = true;
                    chains.push((alloc::vec![i], true));
                }
                Attach::Junction(_) => {}
            }
        }
        for i in 0..n {
            if visited[i] || self.pieces[i].is_none() {
                continue;
            }
            let mut chain = Vec::new();
            let mut cur = i;
            loop {
                if visited[cur] {
                    break;
                }
                visited[cur] = true;
                chain.push(cur);
                match spec(cur).head {
                    Attach::Junction(j) => cur = out_of[&j],
                    _ => return Err(malformed("inconsistent fusion".into())),
                }
            }
            if cur != i {
                return Err(malformed("inconsistent fusion".into()));
            }
            chains.push((chain, true));
        }
        let mut next_edge = self.next_edge;
        let mut chain_of = alloc::vec![EdgeId(u32::MAX); n];
        let mut transport = Transport::default();
        let mut circles = Vec::new();
        // kept ids first so fresh ids never collide
        let mut order: Vec<usize> = (0..chains.len()).collect();
        order.sort_by_key(|&c| chains[c].0.iter().filter_map(|&i| spec(i).keep).min().is_none());
        for c in order {
            let (chain, closed) = &chains[c];
            let id = match chain.iter().filter_map(|&i| spec(i).keep).min() {
                Some(id) => id,
                None => {
                    next_edge += 1;
                    EdgeId(next_edge - 1)
                }
            };
            for &i in chain {
                chain_of[i] = id;
            }
            transport.paths.insert(id, chain.iter().map(|&i| spec(i).piece).collect());
            if *closed {
                circles.push(id);
            }
        }
        let vertices: Vec<(VertexId, Vertex)> = self
            .vertices
            .iter()
            .map(|(&k, &v)| {
                (k, v.map_ends(|pe| EdgeEnd { edge: chain_of[pe.edge.0 as usize], end: pe.end }))
            })
            .collect();
        let skeleton = Skeleton::new(vertices, circles)?;
        Ok(Rebuilt { skeleton, transport, offsets: (0, 0) })
    }
}

pub(super) fn trivalent_ends(s: &Skeleton, v: VertexId) -> Result<[EdgeEnd; 3]> {
    match s.require_vertex(v)? {
        Vertex::Trivalent(ends) => Ok(*ends),
        _ => Err(precondition(format!("vertex {v} is not trivalent"))),
    }
}

/// The ends at a trivalent vertex rotated to start with `first`:
/// `[first, next, prev]` in counterclockwise order.
pub(super) fn rotated_from(ends: [EdgeEnd; 3], first: EdgeEnd) -> [EdgeEnd; 3] {
    let k = ends.iter().position(|&x| x == first).expect("end at vertex");
    let mut r = ends;
    r.rotate_left(k);
    r
}

/// Deletes edge `e` together with its two trivalent endpoints, fusing the
/// remaining edge pairs at each endpoint.
pub fn delete_edge(s: &Skeleton, e: EdgeId) -> Result<Rebuilt> {
    let (p, q) = s.endpoints(e)?.ok_or_else(|| precondition("cannot delete a circle"))?;
    if p == q {
        return Err(precondition(format!("edge {e} is a loop")));
    }
    let mut b = Builder::new(s);
    for (v, end) in [(p, EdgeEnd::tail(e)), (q, EdgeEnd::head(e))] {
        let [_, x, y] = rotated_from(trivalent_ends(s, v)?, end);
        if x.end == y.end {
            return Err(precondition(format!(
                "orientations of the edges at vertex {v} do not match"
            )));
        }
        b.vertices.remove(&v);
        b.fuse(x, y);
    }
    b.remove_edge(e);
    b.finish()
}

/// The oriented path `[e1, .., ek]` between two trivalent vertices through
/// bivalent vertices, with the interior vertices.
fn unzip_path(s: &Skeleton, path: &[EdgeId]) -> Result<Rebuilt> {
    let first = path[0];
    let last = *path.last().expect("nonempty path");
    let (p, _) = s.endpoints(first)?.ok_or_else(|| precondition("cannot unzip a circle"))?;
    let (_, q) = s.endpoints(last)?.ok_or_else(|| precondition("cannot unzip a circle"))?;
    if p == q {
        return Err(precondition("cannot unzip a loop"));
    }
    let [_, pn, pp] = rotated_from(trivalent_ends(s, p)?, EdgeEnd::tail(first));
    let [_, qn, qp] = rotated_from(trivalent_ends(s, q)?, EdgeEnd::head(last));
    if pn.end != End::Head || pp.end != End::Head {
        return Err(precondition(format!("edges at vertex {p} must both be incoming")));
    }
    if qn.end != End::Tail || qp.end != End::Tail {
        return Err(precondition(format!("edges at vertex {q} must both be outgoing")));
    }
    let mut interior = Vec::new();
    for w in path.windows(2) {
        let (_, v) = s.endpoints(w[0])?.expect("segment");
        let (v2, _) = s.endpoints(w[1])?.ok_or_else(|| precondition("broken path"))?;
        if v != v2 {
            return Err(precondition("path is not consistently oriented"));
        }
        let kind = s
            .require_vertex(v)?
            .bivalent_kind()
            .ok_or_else(|| precondition("path passes a trivalent vertex"))?;
        interior.push((v, kind));
    }
    let mut b = Builder::new(s);
    b.vertices.remove(&p);
    b.vertices.remove(&q);
    for &(v, _) in &interior {
        b.vertices.remove(&v);
    }
    for &e in path {
        b.remove_edge(e);
    }
    for (side, start, finish) in [(Side::Left, pn, qp), (Side::Right, pp, qn)] {
        let j0 = b.junction();
        let j1 = b.junction();
        b.set_attach(b.piece_end(start), j0);
        b.set_attach(b.piece_end(finish), j1);
        let mut prev: Option<usize> = None;
        for (i, &e) in path.iter().enumerate() {
            let tail = if i == 0 { j0 } else { Attach::Vertex };
            let head = if i + 1 == path.len() { j1 } else { Attach::Vertex };
            let idx = b.add_piece(Piece::Daughter(e, side), tail, head);
            if let Some(pi) = prev {
                let v = b.fresh_vertex();
                let kind = interior[i - 1].1;
                let ends = [
                    EdgeEnd { edge: EdgeId(pi as u32), end: End::Head },
                    EdgeEnd { edge: EdgeId(idx as u32), end: End::Tail },
                ];
                b.vertices.insert(v, Vertex::bivalent(kind, ends));
            }
            prev = Some(idx);
        }
    }
    b.finish()
}

/// Unzips the edge `e`, which must join two distinct trivalent vertices,
/// with both other edges incoming at its tail and outgoing at its head.
pub fn unzip_edge(s: &Skeleton, e: EdgeId) -> Result<Rebuilt> {
    unzip_path(s, &[e])
}

/// Unzips the dotted edge through `e`: the path between two trivalent
/// vertices through exactly one dot. Each daughter keeps one dot.
pub fn dotted_unzip(s: &Skeleton, e: EdgeId) -> Result<Rebuilt> {
    let path = s.bivalent_path(e)?;
    if path.iter().any(|&(_, fwd)| !fwd) {
        return Err(precondition("dotted edge is not consistently oriented"));
    }
    let edges: Vec<EdgeId> = path.iter().map(|&(x, _)| x).collect();
    let mut dots = 0;
    for w in edges.windows(2) {
        let (_, v) = s.endpoints(w[0])?.expect("segment");
        match s.require_vertex(v)?.bivalent_kind() {
            Some(BivalentKind::Dot) => dots += 1,
            _ => return Err(precondition("dotted edge carries an anti-dot")),
        }
    }
    if dots != 1 {
        return Err(precondition(format!("dotted unzip needs exactly one dot, found {dots}")));
    }
    unzip_path(s, &edges)
}

/// Deletes an adjacent dot `d` and anti-dot `a`, fusing the three edges.
pub fn cancel(s: &Skeleton, d: VertexId, a: VertexId) -> Result<Rebuilt> {
    let (Vertex::Dot(dends), Vertex::Antidot(aends)) = (*s.require_vertex(d)?, *s.require_vertex(a)?) else {
        return Err(precondition("cancel needs a dot and an anti-dot"));
    };
    let link = dends
        .iter()
        .find(|x| aends.contains(&x.opposite()))
        .copied()
        .ok_or_else(|| precondition(format!("dot {d} and anti-dot {a} are not adjacent")))?;
    let mut b = Builder::new(s);
    b.vertices.remove(&d);
    b.vertices.remove(&a);
    b.fuse(dends[0], dends[1]);
    b.fuse(aends[0], aends[1]);
    let _ = link;
    b.finish()
}

/// Cancels adjacent dot/anti-dot pairs with agreeing orientations until
/// none is left.
pub fn cancel_all(s: &Skeleton) -> Result<Skeleton> {
    let mut cur = s.clone();
    'outer: loop {
        let dots: Vec<VertexId> = cur
            .vertices()
            .filter(|(_, v)| matches!(v, Vertex::Dot(_)))
            .map(|(k, _)| k)
            .collect();
        for d in dots {
            let ends = cur.vertex(d).expect("dot").ends().to_vec();
            for end in ends {
                let Some(a) = cur.vertex_at(end.opposite()) else { continue };
                if matches!(cur.vertex(a), Some(Vertex::Antidot(_))) {
                    if let Ok(r) = cancel(&cur, d, a) {
                        cur = r.skeleton;
                        continue 'outer;
                    }
                }
            }
        }
        return Ok(cur);
    }
}

/// Connected sum along `e ⊂ s1` and `f ⊂ s2`: a new edge from a new vertex
/// on `e` to a new vertex on `f`, attached on the right of both. The new
/// vertices sit at the head end of `e` and `f` (all chord slots stay on the
/// tail parts, which keep the original ids).
pub fn connected_sum(s1: &Skeleton, e: EdgeId, s2: &Skeleton, f: EdgeId) -> Result<Rebuilt> {
    s1.require_edge(e)?;
    s2.require_edge(f)?;
    let (u, offsets) = s1.disjoint_union(s2);
    let f = EdgeId(f.0 + offsets.1);
    let mut vertices = u.vertices.clone();
    let mut edges = u.edges.clone();
    let mut transport = Transport::identity(&u);
    let mut next_e = u.next_edge_id().0;
    let mut next_v = u.next_vertex_id().0;
    let bridge = EdgeId(next_e + 2);
    let mut attach = |x: EdgeId, bridge_end: EdgeEnd, vertices: &mut BTreeMap<VertexId, Vertex>, edges: &mut BTreeMap<EdgeId, Edge>| {
        let w = VertexId(next_v);
        next_v += 1;
        match u.edges[&x] {
            Edge::Circle => {
                edges.insert(x, Edge::Segment { tail: w, head: w });
                vertices.insert(w, Vertex::Trivalent([bridge_end, EdgeEnd::tail(x), EdgeEnd::head(x)]));
            }
            Edge::Segment { tail, head } => {
                let rest = EdgeId(next_e);
                next_e += 1;
                edges.insert(x, Edge::Segment { tail, head: w });
                edges.insert(rest, Edge::Segment { tail: w, head });
                let hv = vertices[&head];
                vertices.insert(head, hv.map_ends(|end| if end == EdgeEnd::head(x) { EdgeEnd::head(rest) } else { end }));
                vertices.insert(w, Vertex::Trivalent([bridge_end, EdgeEnd::tail(rest), EdgeEnd::head(x)]));
                transport.paths.insert(rest, alloc::vec![Piece::Empty]);
            }
        }
        w
    };
    let a = attach(e, EdgeEnd::tail(bridge), &mut vertices, &mut edges);
    let b = attach(f, EdgeEnd::head(bridge), &mut vertices, &mut edges);
    edges.insert(bridge, Edge::Segment { tail: a, head: b });
    transport.paths.insert(bridge, alloc::vec![Piece::Empty]);
    let skeleton = Skeleton::from_raw(vertices, edges)?;
    Ok(Rebuilt { skeleton, transport, offsets })
}

impl Tree {
    pub fn validate(&self, s: &Skeleton) -> Result<()> {
        match self {
            Tree::Segment(e) => {
                s.require_edge(*e)?;
                Ok(())
            }
            Tree::Vertices { vertices, edges } => {
                if vertices.is_empty() {
                    return Err(Error::Tree("empty tree".into()));
                }
                for &v in vertices {
                    if matches!(s.require_vertex(v)?, Vertex::Boundary(_)) {
                        return Err(Error::Tree(format!("vertex {v} is a boundary vertex")));
                    }
                }
                for &e in edges {
                    match s.endpoints(e)? {
                        Some((a, b)) if vertices.contains(&a) && vertices.contains(&b) => {}
                        _ => return Err(Error::Tree(format!("edge {e} does not join tree vertices"))),
                    }
                }
                if edges.len() + 1 != vertices.len() {
                    return Err(Error::Tree("not a tree: edge count must be vertex count - 1".into()));
                }
                // connectivity through internal edges
                let mut seen = BTreeSet::new();
                let mut stack = alloc::vec![*vertices.iter().next().expect("nonempty")];
                while let Some(v) = stack.pop() {
                    if !seen.insert(v) {
                        continue;
                    }
                    for &e in edges {
                        let (a, b) = s.endpoints(e)?.expect("segment");
                        if a == v && !seen.contains(&b) {
                            stack.push(b);
                        }
                        if b == v && !seen.contains(&a) {
                            stack.push(a);
                        }
                    }
                }
                if seen.len() != vertices.len() {
                    return Err(Error::Tree("tree is not connected".into()));
                }
                Ok(())
            }
        }
    }

    pub fn leaves(&self, s: &Skeleton) -> Result<Vec<Leaf>> {
        self.validate(s)?;
        Ok(match self {
            Tree::Segment(e) => alloc::vec![EdgeEnd::head(*e), EdgeEnd::tail(*e)],
            Tree::Vertices { vertices, edges } => {
                let mut out = Vec::new();
                for v in vertices {
                    for &end in s.vertex(*v).expect("vertex").ends() {
                        if !edges.contains(&end.edge) {
                            out.push(end);
                        }
                    }
                }
                out.sort();
                out
            }
        })
    }

    fn shifted(&self, voff: u32, eoff: u32) -> Tree {
        match self {
            Tree::Segment(e) => Tree::Segment(EdgeId(e.0 + eoff)),
            Tree::Vertices { vertices, edges } => Tree::Vertices {
                vertices: vertices.iter().map(|v| VertexId(v.0 + voff)).collect(),
                edges: edges.iter().map(|e| EdgeId(e.0 + eoff)).collect(),
            },
        }
    }
}

/// Checks that the leaf pairing is induced by an isomorphism of the two
/// trees that exchanges dots and anti-dots.
fn check_tree_match(s1: &Skeleton, t1: &Tree, s2: &Skeleton, t2: &Tree, pairs: &[(Leaf, Leaf)]) -> Result<()> {
    let l1: BTreeSet<Leaf> = t1.leaves(s1)?.into_iter().collect();
    let l2: BTreeSet<Leaf> = t2.leaves(s2)?.into_iter().collect();
    let p1: BTreeSet<Leaf> = pairs.iter().map(|p| p.0).collect();
    let p2: BTreeSet<Leaf> = pairs.iter().map(|p| p.1).collect();
    if p1 != l1 || p2 != l2 || pairs.len() != l1.len() {
        return Err(Error::Tree("leaf pairing must be a bijection between the leaves".into()));
    }
    match (t1, t2) {
        (Tree::Segment(_), Tree::Segment(_)) => Ok(()),
        (Tree::Vertices { vertices: v1, edges: e1 }, Tree::Vertices { vertices: v2, edges: e2 }) => {
            let v1: Vec<VertexId> = v1.iter().copied().collect();
            let v2: Vec<VertexId> = v2.iter().copied().collect();
            if v1.len() != v2.len() {
                return Err(Error::Tree("trees have different sizes".into()));
            }
            let adj = |s: &Skeleton, es: &BTreeSet<EdgeId>| -> Vec<(VertexId, VertexId)> {
                es.iter()
                    .map(|&e| {
                        let (a, b) = s.endpoints(e).expect("edge").expect("segment");
                        (a.min(b), a.max(b))
                    })
                    .collect()
            };
            let a1 = adj(s1, e1);
            let mut a2 = adj(s2, e2);
            a2.sort();
            let mut perm: Vec<usize> = (0..v2.len()).collect();
            loop {
                let phi: BTreeMap<VertexId, VertexId> = v1.iter().copied().zip(perm.iter().map(|&i| v2[i])).collect();
                let kinds_ok = v1.iter().all(|v| {
                    let k1 = s1.vertex(*v).expect("vertex");
                    let k2 = s2.vertex(phi[v]).expect("vertex");
                    match (k1.bivalent_kind(), k2.bivalent_kind()) {
                        (None, None) => k1.is_trivalent() && k2.is_trivalent(),
                        (Some(a), Some(b)) => a.dual() == b,
                        _ => false,
                    }
                });
                let mut mapped: Vec<(VertexId, VertexId)> = a1
                    .iter()
                    .map(|(a, b)| {
                        let (x, y) = (phi[a], phi[b]);
                        (x.min(y), x.max(y))
                    })
                    .collect();
                mapped.sort();
                let leaves_ok = pairs.iter().all(|(x, y)| {
                    let vx = s1.vertex_at(*x).expect("leaf vertex");
                    let vy = s2.vertex_at(*y).expect("leaf vertex");
                    phi[&vx] == vy
                });
                if kinds_ok && mapped == a2 && leaves_ok {
                    return Ok(());
                }
                if !next_permutation(&mut perm) {
                    return Err(Error::Tree(
                        "leaf pairing is not induced by a tree isomorphism matching dots to anti-dots".into(),
                    ));
                }
            }
        }
        _ => Err(Error::Tree("a segment can only be matched with a segment".into())),
    }
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Tree connected sum: deletes `t1 ⊂ s1` and `t2 ⊂ s2` and joins each
/// paired leaf end through a new dot. Leaves of `t2` are named in `s2`'s
/// ids. Edge orientations are inherited from the leaves.
pub fn tree_connected_sum(s1: &Skeleton, t1: &Tree, s2: &Skeleton, t2: &Tree, pairs: &[(Leaf, Leaf)]) -> Result<Rebuilt> {
    check_tree_match(s1, t1, s2, t2, pairs)?;
    let (u, offsets) = s1.disjoint_union(s2);
    let t2 = t2.shifted(offsets.0, offsets.1);
    let shift = |l: Leaf| EdgeEnd { edge: EdgeId(l.edge.0 + offsets.1), end: l.end };
    let pairs: Vec<(Leaf, Leaf)> = pairs.iter().map(|&(a, b)| (a, shift(b))).collect();

    let mut vertices = u.vertices.clone();
    let mut circles: Vec<EdgeId> = u.circles().collect();
    let mut transport = Transport::identity(&u);
    let mut next_e = u.next_edge_id().0;
    let mut next_v = u.next_vertex_id().0;
    // resolved half-edge for each leaf
    let mut resolved: BTreeMap<Leaf, EdgeEnd> = BTreeMap::new();
    for t in [t1, &t2] {
        match t {
            Tree::Vertices { vertices: tv, edges: te } => {
                for v in tv {
                    vertices.remove(v);
                }
                for e in te {
                    transport.paths.remove(e);
                }
                for l in t.leaves(&u)? {
                    resolved.insert(l, l);
                }
            }
            Tree::Segment(e) => {
                if u.is_circle(*e) {
                    circles.retain(|c| c != e);
                    resolved.insert(EdgeEnd::head(*e), EdgeEnd::head(*e));
                    resolved.insert(EdgeEnd::tail(*e), EdgeEnd::tail(*e));
                } else {
                    let rest = EdgeId(next_e);
                    next_e += 1;
                    let (_, head) = u.endpoints(*e)?.expect("segment");
                    let hv = vertices[&head];
                    vertices.insert(head, hv.map_ends(|end| if end == EdgeEnd::head(*e) { EdgeEnd::head(rest) } else { end }));
                    resolved.insert(EdgeEnd::head(*e), EdgeEnd::head(*e));
                    resolved.insert(EdgeEnd::tail(*e), EdgeEnd::tail(rest));
                    transport.paths.insert(rest, alloc::vec![Piece::Empty]);
                }
            }
        }
    }
    for (a, b) in &pairs {
        let v = VertexId(next_v);
        next_v += 1;
        vertices.insert(v, Vertex::Dot([resolved[a], resolved[b]]).normalized());
    }
    let skeleton = Skeleton::new(vertices, circles)?;
    // drop transport entries of removed edges
    transport.paths.retain(|e, _| skeleton.has_edge(*e));
    Ok(Rebuilt { skeleton, transport, offsets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::skeleton::*;

    #[test]
    fn switch_is_an_involution() {
        let t = tetrahedron();
        for e in t.edge_ids() {
            let once = switch_edge(&t, e).unwrap();
            assert_ne!(once, t);
            assert_eq!(switch_edge(&once, e).unwrap(), t);
        }
        assert_eq!(switch_edge(&circle(), EdgeId(0)).unwrap(), circle());
        assert!(switch_edge(&circle(), EdgeId(7)).is_err());
    }

    #[test]
    fn switching_a_theta_edge_keeps_cyclic_positions() {
        let t = theta();
        let s = switch_edge(&t, EdgeId(1)).unwrap();
        let Some(Vertex::Trivalent(ends)) = s.vertex(VertexId(0)) else { panic!() };
        assert!(ends.contains(&EdgeEnd::tail(EdgeId(1))));
        assert_eq!(s.endpoints(EdgeId(1)).unwrap(), Some((VertexId(0), VertexId(1))));
    }

    #[test]
    fn delete_theta_edge_gives_circle() {
        let r = delete_edge(&theta(), EdgeId(1)).unwrap();
        assert_eq!(r.skeleton.num_vertices(), 0);
        assert_eq!(r.skeleton.circles().count(), 1);
        let path = &r.transport.paths[&EdgeId(0)];
        assert_eq!(path.len(), 2);
    }

    #[test]
    fn delete_rejects_orientation_mismatch() {
        // at vertex 0 of the theta both other edges of edge 0 are incoming
        assert!(matches!(delete_edge(&theta(), EdgeId(0)), Err(Error::Precondition(_))));
    }

    #[test]
    fn delete_tetrahedron_edge_gives_theta() {
        let t = tetrahedron();
        let mut found = 0;
        for e in t.edge_ids() {
            if let Ok(r) = delete_edge(&t, e) {
                found += 1;
                r.skeleton.validate().unwrap();
                assert_eq!(r.skeleton.trivalent_count(), 2);
                assert_eq!(r.skeleton.num_edges(), 3);
                assert!((0..3).all(|_| true));
                // a theta: two vertices joined by three edges
                for (_, edge) in r.skeleton.edges() {
                    let Edge::Segment { tail, head } = edge else { panic!() };
                    assert_ne!(tail, head);
                }
            }
        }
        assert!(found > 0);
    }

    #[test]
    fn unzip_planar_theta_gives_two_circles() {
        let r = unzip_edge(&theta(), EdgeId(0)).unwrap();
        assert_eq!(r.skeleton.num_vertices(), 0);
        assert_eq!(r.skeleton.circles().count(), 2);
    }

    #[test]
    fn unzip_rejects_bad_orientation() {
        assert!(unzip_edge(&theta(), EdgeId(1)).is_err());
    }

    #[test]
    fn unzip_tetrahedron_outer_edge_gives_dumbbell() {
        let r = unzip_edge(&tetrahedron(), EdgeId(6)).unwrap();
        // the second loop comes out clockwise
        assert!(!is_isomorphic(&r.skeleton, &dumbbell()));
        let d = switch_edge(&dumbbell(), EdgeId(2)).unwrap();
        assert!(is_isomorphic(&r.skeleton, &d));
        assert!(is_bridge(&r.skeleton, EdgeId(2)));
    }

    #[test]
    fn connected_sum_counts() {
        let r = connected_sum(&circle(), EdgeId(0), &circle(), EdgeId(0)).unwrap();
        assert!(is_isomorphic(&r.skeleton, &dumbbell()));
        let r = connected_sum(&theta(), EdgeId(1), &circle(), EdgeId(0)).unwrap();
        assert_eq!(r.skeleton.num_edges(), 6);
        assert_eq!(r.skeleton.trivalent_count(), 2 + 0 + 2);
        let r = connected_sum(&tetrahedron(), EdgeId(1), &theta(), EdgeId(0)).unwrap();
        assert_eq!(r.skeleton.trivalent_count(), 4 + 2 + 2);
    }

    #[test]
    fn dotted_unzip_of_dotted_theta_middle() {
        let s = dotted_theta_middle();
        let r = dotted_unzip(&s, EdgeId(0)).unwrap();
        // two circles, each carrying the dot of its daughter
        assert_eq!(r.skeleton.trivalent_count(), 0);
        assert_eq!(r.skeleton.count_bivalent(BivalentKind::Dot), 2);
        assert_eq!(r.skeleton.components().len(), 2);
        assert!(unzip_edge(&s, EdgeId(0)).is_err());
    }

    #[test]
    fn cancel_removes_pair() {
        let s = circle_with_antidots(1);
        let (s, d, _) = s.subdivide(EdgeId(0), BivalentKind::Dot).unwrap();
        let a = VertexId(0);
        let r = cancel(&s, d, a).unwrap();
        assert_eq!(r.skeleton, circle());
        assert!(cancel(&s, a, d).is_err());
    }

    #[test]
    fn tree_leaf_mismatch_is_rejected() {
        let t = theta();
        let y = Tree::Vertices { vertices: [VertexId(0)].into_iter().collect(), edges: BTreeSet::new() };
        let leaves = y.leaves(&t).unwrap();
        let bad: Vec<(Leaf, Leaf)> = leaves.iter().map(|&l| (l, l)).take(2).collect();
        assert!(tree_connected_sum(&t, &y, &t, &y, &bad).is_err());
        let cyc = Tree::Vertices {
            vertices: [VertexId(0), VertexId(1)].into_iter().collect(),
            edges: [EdgeId(0), EdgeId(1)].into_iter().collect(),
        };
        assert!(cyc.validate(&t).is_err());
    }
}
