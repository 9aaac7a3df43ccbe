//! Operations assembled from tree connected sums with small fixed
//! skeletons, followed by dot elimination.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::constants::{circle_with_antidots, dumbbell_crossed, theta, theta_crossed};
use super::ops::{
    cancel_all, connected_sum, rotated_from, switch_edge, tree_connected_sum, trivalent_ends, unzip_edge, Leaf, Piece,
    Rebuilt, Tree,
};
use super::{BivalentKind, EdgeEnd, EdgeId, End, Skeleton, Vertex, VertexId};
use crate::error::{precondition, Result};

/// Removes dot `d`: splices a circle with three anti-dots into an edge at
/// `d` by a tree connected sum, then cancels all adjacent pairs.
pub fn kill_dot(s: &Skeleton, d: VertexId) -> Result<Skeleton> {
    let Vertex::Dot(ends) = *s.require_vertex(d)? else {
        return Err(precondition("kill_dot needs a dot"));
    };
    let g = ends[0].edge;
    let c = circle_with_antidots(3);
    let pairs = [(EdgeEnd::head(g), EdgeEnd::tail(EdgeId(0))), (EdgeEnd::tail(g), EdgeEnd::head(EdgeId(0)))];
    let r = tree_connected_sum(s, &Tree::Segment(g), &c, &Tree::Segment(EdgeId(0)), &pairs)?;
    cancel_all(&r.skeleton)
}

/// Removes every dot with [`kill_dot`].
pub fn kill_dots(s: &Skeleton) -> Result<Skeleton> {
    let mut cur = s.clone();
    loop {
        let dot = cur.vertices().find(|(_, v)| v.bivalent_kind() == Some(BivalentKind::Dot)).map(|(k, _)| k);
        let Some(d) = dot else { return Ok(cur) };
        let next = kill_dot(&cur, d)?;
        if next.count_bivalent(BivalentKind::Dot) >= cur.count_bivalent(BivalentKind::Dot) {
            return Err(precondition("dot could not be cancelled"));
        }
        cur = next;
    }
}

/// Edge connected sum: cuts `e` and `f` and reconnects so that the first
/// part of each runs into the second part of the other.
///
/// Computed as a connected sum followed by unzipping the new bridge, with
/// the orientation switches the unzip needs undone afterwards.
pub fn edge_connected_sum(s1: &Skeleton, e: EdgeId, s2: &Skeleton, f: EdgeId) -> Result<Skeleton> {
    if s1.is_circle(e) || s2.is_circle(f) {
        return Err(precondition("edge connected sum along a circle"));
    }
    let cs = connected_sum(s1, e, s2, f)?;
    let s = &cs.skeleton;
    let bridge = EdgeId(s.next_edge_id().0 - 1);
    let (a, b) = s.endpoints(bridge)?.expect("bridge is a segment");
    let at = |v: VertexId, end: End| -> EdgeId {
        s.vertex(v).expect("vertex").ends().iter().find(|x| x.edge != bridge && x.end == end).expect("end").edge
    };
    let rest_e = at(a, End::Tail);
    let part_f = at(b, End::Head);
    let switched = switch_edge(&switch_edge(s, rest_e)?, part_f)?;
    let u = unzip_edge(&switched, bridge)?;
    let back = u
        .transport
        .paths
        .iter()
        .find(|(_, ps)| ps.contains(&Piece::Whole(rest_e)))
        .map(|(k, _)| *k)
        .expect("reversed chain survives");
    switch_edge(&u.skeleton, back)
}

/// The connected sum along the trivial trees `Segment(e)` and
/// `Segment(f)`, which leaves two dots.
pub fn dotted_edge_connected_sum(s1: &Skeleton, e: EdgeId, s2: &Skeleton, f: EdgeId) -> Result<Rebuilt> {
    let pairs = [(EdgeEnd::head(e), EdgeEnd::tail(f)), (EdgeEnd::tail(e), EdgeEnd::head(f))];
    tree_connected_sum(s1, &Tree::Segment(e), s2, &Tree::Segment(f), &pairs)
}

/// The tree made of `e` and its two end vertices.
pub fn edge_tree(s: &Skeleton, e: EdgeId) -> Result<Tree> {
    let path: Vec<EdgeId> = s.bivalent_path(e)?.into_iter().map(|(x, _)| x).collect();
    let mut vertices = BTreeSet::new();
    for &x in &path {
        let (p, q) = s.endpoints(x)?.ok_or_else(|| precondition("circle has no end vertices"))?;
        vertices.insert(p);
        vertices.insert(q);
    }
    Ok(Tree::Vertices { vertices, edges: path.into_iter().collect() })
}

/// Leaf pairs realizing the unzip of the path `first..last` of `s` as a
/// tree connected sum with the middle path `t0..t1` of `t`: the tail
/// vertex of the path meets the head vertex of the middle path, and each
/// outer strand of `t` carries one daughter.
fn unzip_pairs(s: &Skeleton, first: EdgeId, last: EdgeId, t: &Skeleton, t1: EdgeId) -> Result<Vec<(Leaf, Leaf)>> {
    let (p, _) = s.endpoints(first)?.ok_or_else(|| precondition("cannot unzip a circle"))?;
    let (_, q) = s.endpoints(last)?.ok_or_else(|| precondition("cannot unzip a circle"))?;
    let [_, pn, pp] = rotated_from(trivalent_ends(s, p)?, EdgeEnd::tail(first));
    let [_, qn, qp] = rotated_from(trivalent_ends(s, q)?, EdgeEnd::head(last));
    let (_, b) = t.endpoints(t1)?.expect("segment");
    let [_, bn, bp] = rotated_from(trivalent_ends(t, b)?, EdgeEnd::head(t1));
    let far = |x: EdgeEnd| -> Result<EdgeEnd> {
        let path = t.bivalent_path(x.edge)?;
        Ok(EdgeEnd::head(path.last().expect("nonempty path").0))
    };
    Ok(alloc::vec![(pn, bn), (pp, bp), (qp, far(bn)?), (qn, far(bp)?)])
}

fn path_ends(s: &Skeleton, e: EdgeId) -> Result<(EdgeId, EdgeId)> {
    let path = s.bivalent_path(e)?;
    Ok((path[0].0, path.last().expect("nonempty path").0))
}

/// Unzip of `e` as a tree connected sum with a theta along the tree made of
/// `e` and its ends, followed by removing the four new dots.
pub fn unzip_via_tree(s: &Skeleton, e: EdgeId) -> Result<Skeleton> {
    let t = theta();
    let pairs = unzip_pairs(s, e, e, &t, EdgeId(0))?;
    let r = tree_connected_sum(s, &edge_tree(s, e)?, &t, &edge_tree(&t, EdgeId(0))?, &pairs)?;
    kill_dots(&r.skeleton)
}

/// Dotted unzip of the dotted edge through `e` as a tree connected sum with
/// a theta carrying an anti-dot on each edge, followed by cancellations.
pub fn dotted_unzip_via_tree(s: &Skeleton, e: EdgeId) -> Result<Skeleton> {
    let t = theta_crossed();
    let (first, last) = path_ends(s, e)?;
    let (_, t1) = path_ends(&t, EdgeId(0))?;
    let pairs = unzip_pairs(s, first, last, &t, t1)?;
    let r = tree_connected_sum(s, &edge_tree(s, e)?, &t, &edge_tree(&t, EdgeId(0))?, &pairs)?;
    cancel_all(&r.skeleton)
}

/// Deletion of `e` as a tree connected sum with a dumbbell carrying two
/// anti-dots on each loop, along `e` and the bridge, followed by
/// cancellations.
pub fn delete_via_tree(s: &Skeleton, e: EdgeId) -> Result<Skeleton> {
    let db = dumbbell_crossed();
    let bridge = EdgeId(1);
    let (p, q) = s.endpoints(e)?.ok_or_else(|| precondition("cannot delete a circle"))?;
    let (a, b) = db.endpoints(bridge)?.expect("bridge");
    let mut pairs = Vec::new();
    for (v, w) in [(p, a), (q, b)] {
        let outer = |sk: &Skeleton, v: VertexId, skip: EdgeId, end: End| -> Result<EdgeEnd> {
            trivalent_ends(sk, v)?
                .into_iter()
                .find(|x| x.edge != skip && x.end == end)
                .ok_or_else(|| precondition("edge ends do not alternate at its end vertices"))
        };
        pairs.push((outer(s, v, e, End::Head)?, outer(&db, w, bridge, End::Tail)?));
        pairs.push((outer(s, v, e, End::Tail)?, outer(&db, w, bridge, End::Head)?));
    }
    let r = tree_connected_sum(s, &edge_tree(s, e)?, &db, &edge_tree(&db, bridge)?, &pairs)?;
    cancel_all(&r.skeleton)
}

/// Edge connected sum as the dotted edge connected sum with its two dots
/// removed.
pub fn edge_connected_sum_via_tree(s1: &Skeleton, e: EdgeId, s2: &Skeleton, f: EdgeId) -> Result<Skeleton> {
    kill_dots(&dotted_edge_connected_sum(s1, e, s2, f)?.skeleton)
}

fn switched(s: &Skeleton, edges: &[EdgeId], mask: u32) -> Result<Skeleton> {
    let mut t = s.clone();
    for (i, &e) in edges.iter().enumerate() {
        if mask >> i & 1 == 1 {
            t = switch_edge(&t, e)?;
        }
    }
    Ok(t)
}

/// Isomorphism after reversing some set of edges of `s`.
pub fn is_isomorphic_up_to_switches(s: &Skeleton, t: &Skeleton) -> bool {
    let edges: Vec<EdgeId> = s.edge_ids().collect();
    (0..1u32 << edges.len()).any(|m| switched(s, &edges, m).is_ok_and(|x| super::is_isomorphic(&x, t)))
}

/// The tree connected sum along the one-vertex trees at `tail(e)` and
/// `head(f)`, built from a dotted edge connected sum along `e`, `f` and a
/// dotted unzip of the fused edge joining the two tree vertices. Every
/// choice of orientation switches near that edge which makes the unzip
/// legal is tried; all results are returned.
pub fn y_sum_via_dotted_unzip(s1: &Skeleton, e: EdgeId, s2: &Skeleton, f: EdgeId) -> Result<Vec<Skeleton>> {
    let v1 = s1.vertex_at(EdgeEnd::tail(e)).ok_or_else(|| precondition("e has no tail vertex"))?;
    let v2 = s2.vertex_at(EdgeEnd::head(f)).ok_or_else(|| precondition("f has no head vertex"))?;
    let r = dotted_edge_connected_sum(s1, e, s2, f)?;
    let v2 = VertexId(v2.0 + r.offsets.0);
    let s = r.skeleton;
    let touches = |g: EdgeId| -> Result<Option<[VertexId; 2]>> { Ok(s.endpoints(g)?.map(|(a, b)| [a, b])) };
    let mut path = None;
    for g in s.edge_ids() {
        let p = s.bivalent_path(g)?;
        if p.len() != 2 {
            continue;
        }
        let ends: Vec<VertexId> = [p[0].0, p[1].0].iter().filter_map(|&x| touches(x).ok().flatten()).flatten().collect();
        if ends.contains(&v1) && ends.contains(&v2) {
            path = Some(g);
            break;
        }
    }
    let path = path.ok_or_else(|| precondition("no fused edge joins the tree vertices"))?;
    let mut local = Vec::new();
    for g in s.edge_ids() {
        if touches(g)?.is_some_and(|ends| ends.contains(&v1) || ends.contains(&v2)) {
            local.push(g);
        }
    }
    let mut out = Vec::new();
    for m in 0..1u32 << local.len() {
        if let Ok(u) = super::ops::dotted_unzip(&switched(&s, &local, m)?, path) {
            out.push(u.skeleton);
        }
    }
    Ok(out)
}
