//! Combinatorial skeletons of (dotted) knotted trivalent graphs.
//!
//! A skeleton is stored as vertex records that list the edge-ends meeting
//! there, plus an edge table. An edge-end is an `(edge, Tail | Head)` pair,
//! so every half-edge is named by the edge it belongs to and which end it
//! is. Trivalent vertices keep their three ends in counterclockwise cyclic
//! order, normalized to the rotation that starts with the smallest end.

mod composite;
mod constants;
mod iso;
pub mod ops;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

pub use composite::{
    delete_via_tree, dotted_edge_connected_sum, dotted_unzip_via_tree, edge_connected_sum, edge_connected_sum_via_tree,
    edge_tree, is_isomorphic_up_to_switches, kill_dot, kill_dots, unzip_via_tree, y_sum_via_dotted_unzip,
};
pub use iso::{find_isomorphism, is_bridge, is_isomorphic, Isomorphism};
pub use ops::{
    cancel, cancel_all, connected_sum, delete_edge, dotted_unzip, switch_edge, tree_connected_sum, unzip_edge, Leaf,
    Piece, Rebuilt, Side, Transport, Tree,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum End {
    Tail,
    Head,
}

impl End {
    pub fn opposite(self) -> End {
        match self {
            End::Tail => End::Head,
            End::Head => End::Tail,
        }
    }
}

/// One end of an edge, i.e. a half-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeEnd {
    pub edge: EdgeId,
    pub end: End,
}

impl EdgeEnd {
    pub fn tail(edge: EdgeId) -> Self {
        EdgeEnd { edge, end: End::Tail }
    }

    pub fn head(edge: EdgeId) -> Self {
        EdgeEnd { edge, end: End::Head }
    }

    /// Whether the edge leaves the vertex this end is attached to.
    pub fn is_outgoing(self) -> bool {
        self.end == End::Tail
    }

    pub fn opposite(self) -> Self {
        EdgeEnd { edge: self.edge, end: self.end.opposite() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BivalentKind {
    Dot,
    Antidot,
}

impl BivalentKind {
    pub fn dual(self) -> Self {
        match self {
            BivalentKind::Dot => BivalentKind::Antidot,
            BivalentKind::Antidot => BivalentKind::Dot,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    /// Three ends in counterclockwise cyclic order.
    Trivalent([EdgeEnd; 3]),
    Dot([EdgeEnd; 2]),
    Antidot([EdgeEnd; 2]),
    /// Univalent vertex, used only for the ends of strands.
    Boundary(EdgeEnd),
}

impl Vertex {
    pub fn ends(&self) -> &[EdgeEnd] {
        match self {
            Vertex::Trivalent(e) => e,
            Vertex::Dot(e) | Vertex::Antidot(e) => e,
            Vertex::Boundary(e) => core::slice::from_ref(e),
        }
    }

    pub fn bivalent(kind: BivalentKind, ends: [EdgeEnd; 2]) -> Vertex {
        match kind {
            BivalentKind::Dot => Vertex::Dot(ends),
            BivalentKind::Antidot => Vertex::Antidot(ends),
        }
    }

    pub fn bivalent_kind(&self) -> Option<BivalentKind> {
        match self {
            Vertex::Dot(_) => Some(BivalentKind::Dot),
            Vertex::Antidot(_) => Some(BivalentKind::Antidot),
            _ => None,
        }
    }

    pub fn is_trivalent(&self) -> bool {
        matches!(self, Vertex::Trivalent(_))
    }

    /// Same vertex with its ends in normal order: trivalent rotated to start
    /// at the smallest end, bivalent sorted.
    fn normalized(self) -> Vertex {
        match self {
            Vertex::Trivalent(mut e) => {
                let k = (0..3).min_by_key(|&i| e[i]).unwrap_or(0);
                e.rotate_left(k);
                Vertex::Trivalent(e)
            }
            Vertex::Dot(mut e) => {
                e.sort();
                Vertex::Dot(e)
            }
            Vertex::Antidot(mut e) => {
                e.sort();
                Vertex::Antidot(e)
            }
            b => b,
        }
    }

    fn map_ends(self, mut f: impl FnMut(EdgeEnd) -> EdgeEnd) -> Vertex {
        match self {
            Vertex::Trivalent([a, b, c]) => Vertex::Trivalent([f(a), f(b), f(c)]),
            Vertex::Dot([a, b]) => Vertex::Dot([f(a), f(b)]),
            Vertex::Antidot([a, b]) => Vertex::Antidot([f(a), f(b)]),
            Vertex::Boundary(a) => Vertex::Boundary(f(a)),
        }
        .normalized()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Edge {
    Segment { tail: VertexId, head: VertexId },
    /// A closed component with no vertices.
    Circle,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Skeleton {
    vertices: BTreeMap<VertexId, Vertex>,
    edges: BTreeMap<EdgeId, Edge>,
}

impl Skeleton {
    /// Builds a skeleton from vertex records and circle ids, deriving the
    /// edge table and checking that every half-edge occurs exactly once.
    pub fn new(
        vertices: impl IntoIterator<Item = (VertexId, Vertex)>,
        circles: impl IntoIterator<Item = EdgeId>,
    ) -> Result<Skeleton> {
        let mut vmap = BTreeMap::new();
        for (id, v) in vertices {
            if vmap.insert(id, v.normalized()).is_some() {
                return Err(malformed(format!("duplicate vertex {id}")));
            }
        }
        let mut owners: BTreeMap<EdgeEnd, VertexId> = BTreeMap::new();
        for (&id, v) in &vmap {
            for &end in v.ends() {
                if owners.insert(end, id).is_some() {
                    return Err(malformed(format!(
                        "half-edge {}:{:?} attached twice",
                        end.edge, end.end
                    )));
                }
            }
        }
        let mut edges = BTreeMap::new();
        let ids: BTreeSet<EdgeId> = owners.keys().map(|e| e.edge).collect();
        for e in ids {
            let tail = owners.get(&EdgeEnd::tail(e));
            let head = owners.get(&EdgeEnd::head(e));
            match (tail, head) {
                (Some(&tail), Some(&head)) => {
                    edges.insert(e, Edge::Segment { tail, head });
                }
                _ => return Err(malformed(format!("edge {e} has a dangling end"))),
            }
        }
        for c in circles {
            if edges.insert(c, Edge::Circle).is_some() {
                return Err(malformed(format!("circle {c} reuses an edge id")));
            }
        }
        let s = Skeleton { vertices: vmap, edges };
        s.validate()?;
        Ok(s)
    }

    /// Re-checks the half-edge invariants.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for (&id, v) in &self.vertices {
            if *v != v.normalized() {
                return Err(malformed(format!("vertex {id} not normalized")));
            }
            for &end in v.ends() {
                if !seen.insert(end) {
                    return Err(malformed(format!("half-edge of edge {} repeated", end.edge)));
                }
                match self.edges.get(&end.edge) {
                    Some(Edge::Segment { tail, head }) => {
                        let owner = if end.end == End::Tail { tail } else { head };
                        if *owner != id {
                            return Err(malformed(format!(
                                "edge {} disagrees with vertex {id}",
                                end.edge
                            )));
                        }
                    }
                    _ => return Err(malformed(format!("vertex {id} references edge {}", end.edge))),
                }
            }
        }
        for (&e, edge) in &self.edges {
            if let Edge::Segment { .. } = edge {
                if !seen.contains(&EdgeEnd::tail(e)) || !seen.contains(&EdgeEnd::head(e)) {
                    return Err(malformed(format!("edge {e} has a dangling end")));
                }
            }
        }
        Ok(())
    }

    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vertex)> {
        self.vertices.iter().map(|(&k, v)| (k, v))
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().map(|(&k, e)| (k, e))
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges.keys().copied()
    }

    pub fn vertex(&self, v: VertexId) -> Option<&Vertex> {
        self.vertices.get(&v)
    }

    pub fn edge(&self, e: EdgeId) -> Option<&Edge> {
        self.edges.get(&e)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edges.contains_key(&e)
    }

    pub fn is_circle(&self, e: EdgeId) -> bool {
        matches!(self.edges.get(&e), Some(Edge::Circle))
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn circles(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges
            .iter()
            .filter(|(_, e)| matches!(e, Edge::Circle))
            .map(|(&k, _)| k)
    }

    pub fn trivalent_count(&self) -> usize {
        self.vertices.values().filter(|v| v.is_trivalent()).count()
    }

    pub fn count_bivalent(&self, kind: BivalentKind) -> usize {
        self.vertices
            .values()
            .filter(|v| v.bivalent_kind() == Some(kind))
            .count()
    }

    /// The vertex a given edge-end is attached to.
    pub fn vertex_at(&self, end: EdgeEnd) -> Option<VertexId> {
        match self.edges.get(&end.edge)? {
            Edge::Segment { tail, head } => Some(if end.end == End::Tail { *tail } else { *head }),
            Edge::Circle => None,
        }
    }

    pub fn endpoints(&self, e: EdgeId) -> Result<Option<(VertexId, VertexId)>> {
        match self.edges.get(&e) {
            Some(Edge::Segment { tail, head }) => Ok(Some((*tail, *head))),
            Some(Edge::Circle) => Ok(None),
            None => Err(Error::UnknownEdge(e)),
        }
    }

    pub(crate) fn require_edge(&self, e: EdgeId) -> Result<&Edge> {
        self.edges.get(&e).ok_or(Error::UnknownEdge(e))
    }

    pub(crate) fn require_vertex(&self, v: VertexId) -> Result<&Vertex> {
        self.vertices.get(&v).ok_or(Error::UnknownVertex(v))
    }

    pub fn next_edge_id(&self) -> EdgeId {
        EdgeId(self.edges.keys().next_back().map_or(0, |e| e.0 + 1))
    }

    pub fn next_vertex_id(&self) -> VertexId {
        VertexId(self.vertices.keys().next_back().map_or(0, |v| v.0 + 1))
    }

    /// For a skeleton made only of strands (boundary-to-boundary edges),
    /// the strand edges in order; strand `i` (1-based) is the `i`-th entry.
    pub fn strand_edges(&self) -> Option<Vec<EdgeId>> {
        let mut out = Vec::new();
        for (&e, edge) in &self.edges {
            match edge {
                Edge::Segment { tail, head } => {
                    let ok = matches!(self.vertices.get(tail), Some(Vertex::Boundary(_)))
                        && matches!(self.vertices.get(head), Some(Vertex::Boundary(_)));
                    if !ok {
                        return None;
                    }
                    out.push(e);
                }
                Edge::Circle => return None,
            }
        }
        Some(out)
    }

    /// Copy with vertex and edge ids shifted by the given offsets.
    pub fn relabeled(&self, vertex_offset: u32, edge_offset: u32) -> Skeleton {
        let shift = |end: EdgeEnd| EdgeEnd { edge: EdgeId(end.edge.0 + edge_offset), end: end.end };
        Skeleton {
            vertices: self
                .vertices
                .iter()
                .map(|(&k, &v)| (VertexId(k.0 + vertex_offset), v.map_ends(shift)))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(&k, &e)| {
                    let e = match e {
                        Edge::Segment { tail, head } => Edge::Segment {
                            tail: VertexId(tail.0 + vertex_offset),
                            head: VertexId(head.0 + vertex_offset),
                        },
                        Edge::Circle => Edge::Circle,
                    };
                    (EdgeId(k.0 + edge_offset), e)
                })
                .collect(),
        }
    }

    /// Disjoint union; `other` is shifted past this skeleton's ids. Returns
    /// the union and the `(vertex, edge)` offsets applied to `other`.
    pub fn disjoint_union(&self, other: &Skeleton) -> (Skeleton, (u32, u32)) {
        let voff = self.next_vertex_id().0;
        let eoff = self.next_edge_id().0;
        let shifted = other.relabeled(voff, eoff);
        let mut out = self.clone();
        out.vertices.extend(shifted.vertices);
        out.edges.extend(shifted.edges);
        (out, (voff, eoff))
    }

    /// Splits edge `e` by a new bivalent vertex. The original id keeps the
    /// tail part; the head part gets a fresh id. A circle becomes a loop at
    /// the new vertex.
    pub fn subdivide(&self, e: EdgeId, kind: BivalentKind) -> Result<(Skeleton, VertexId, EdgeId)> {
        let mut out = self.clone();
        let v = self.next_vertex_id();
        match *self.require_edge(e)? {
            Edge::Circle => {
                out.edges.insert(e, Edge::Segment { tail: v, head: v });
                out.vertices
                    .insert(v, Vertex::bivalent(kind, [EdgeEnd::head(e), EdgeEnd::tail(e)]).normalized());
                Ok((out, v, e))
            }
            Edge::Segment { tail, head } => {
                let f = self.next_edge_id();
                out.edges.insert(e, Edge::Segment { tail, head: v });
                out.edges.insert(f, Edge::Segment { tail: v, head });
                out.vertices
                    .insert(v, Vertex::bivalent(kind, [EdgeEnd::head(e), EdgeEnd::tail(f)]).normalized());
                let hv = out.vertices[&head];
                let mut first = true;
                let moved = hv.map_ends(|end| {
                    if first && end == EdgeEnd::head(e) {
                        first = false;
                        EdgeEnd::head(f)
                    } else {
                        end
                    }
                });
                out.vertices.insert(head, moved);
                out.validate()?;
                Ok((out, v, f))
            }
        }
    }

    /// Connected components as sets of vertex ids (circles excluded).
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.vertices.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = alloc::vec![start];
            while let Some(v) = stack.pop() {
                if !comp.insert(v) {
                    continue;
                }
                seen.insert(v);
                for end in self.vertices[&v].ends() {
                    if let Some(w) = self.vertex_at(end.opposite()) {
                        if !comp.contains(&w) {
                            stack.push(w);
                        }
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    /// Maximal dot-free segments are the edges themselves; this returns the
    /// maximal path through bivalent (dot/antidot) vertices containing `e`,
    /// as a list of edges ordered along the orientation of `e`, plus the
    /// orientation of each piece relative to the path (`true` = same).
    pub fn bivalent_path(&self, e: EdgeId) -> Result<Vec<(EdgeId, bool)>> {
        self.require_edge(e)?;
        if self.is_circle(e) {
            return Ok(alloc::vec![(e, true)]);
        }
        // walk forward from the head of e
        let mut path = alloc::vec![(e, true)];
        let mut cur = EdgeEnd::head(e);
        loop {
            let Some(v) = self.vertex_at(cur) else { break };
            let vert = &self.vertices[&v];
            if vert.bivalent_kind().is_none() {
                break;
            }
            let other = *vert.ends().iter().find(|&&x| x != cur).unwrap_or(&cur);
            if other.edge == e {
                // closed cycle through bivalent vertices
                return Ok(path);
            }
            let forward = other.end == End::Tail;
            path.push((other.edge, forward));
            cur = other.opposite();
        }
        // walk backward from the tail of e
        let mut cur = EdgeEnd::tail(e);
        loop {
            let Some(v) = self.vertex_at(cur) else { break };
            let vert = &self.vertices[&v];
            if vert.bivalent_kind().is_none() {
                break;
            }
            let other = *vert.ends().iter().find(|&&x| x != cur).unwrap_or(&cur);
            if other.edge == e || path.iter().any(|(x, _)| *x == other.edge) {
                break;
            }
            let forward = other.end == End::Head;
            path.insert(0, (other.edge, forward));
            cur = other.opposite();
        }
        Ok(path)
    }

    pub(crate) fn from_raw(vertices: BTreeMap<VertexId, Vertex>, edges: BTreeMap<EdgeId, Edge>) -> Result<Skeleton> {
        let vertices = vertices.into_iter().map(|(k, v)| (k, v.normalized())).collect();
        let s = Skeleton { vertices, edges };
        s.validate()?;
        Ok(s)
    }
}

pub(crate) fn malformed(msg: alloc::string::String) -> Error {
    Error::MalformedSkeleton(msg)
}

pub use constants::*;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theta_is_well_formed() {
        let t = theta();
        assert_eq!(t.num_edges(), 3);
        assert_eq!(t.trivalent_count(), 2);
        t.validate().unwrap();
    }

    #[test]
    fn rejects_dangling_half_edge() {
        let v = Vertex::Boundary(EdgeEnd::tail(EdgeId(0)));
        assert!(Skeleton::new([(VertexId(0), v)], []).is_err());
    }

    #[test]
    fn rejects_double_attachment() {
        let a = Vertex::Boundary(EdgeEnd::tail(EdgeId(0)));
        assert!(Skeleton::new([(VertexId(0), a), (VertexId(1), a)], []).is_err());
    }

    #[test]
    fn cyclic_order_is_a_rotation_class() {
        let ends = [EdgeEnd::tail(EdgeId(2)), EdgeEnd::head(EdgeId(0)), EdgeEnd::tail(EdgeId(1))];
        let a = Vertex::Trivalent(ends).normalized();
        let mut r = ends;
        r.rotate_left(1);
        assert_eq!(a, Vertex::Trivalent(r).normalized());
        let mut rev = ends;
        rev.swap(0, 1);
        assert_ne!(a, Vertex::Trivalent(rev).normalized());
    }

    #[test]
    fn strands_are_strands() {
        let s = strands(3);
        assert_eq!(s.strand_edges().unwrap().len(), 3);
        assert!(theta().strand_edges().is_none());
    }

    #[test]
    fn subdivide_keeps_invariants() {
        let (s, v, f) = theta().subdivide(EdgeId(1), BivalentKind::Antidot).unwrap();
        s.validate().unwrap();
        assert_eq!(s.count_bivalent(BivalentKind::Antidot), 1);
        assert!(matches!(s.vertex(v), Some(Vertex::Antidot(_))));
        assert!(s.has_edge(f));
        let (c, _, _) = circle().subdivide(EdgeId(0), BivalentKind::Dot).unwrap();
        assert_eq!(c.num_edges(), 1);
        c.validate().unwrap();
    }

    #[test]
    fn bivalent_path_walks_through_dots() {
        let s = circle_with_antidots(3);
        let p = s.bivalent_path(EdgeId(0)).unwrap();
        assert_eq!(p.len(), 3);
        let d = dotted_theta_middle();
        let mid = d.bivalent_path(EdgeId(0)).unwrap();
        assert_eq!(mid.len(), 2);
    }
}
