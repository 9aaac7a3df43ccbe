//! Isomorphisms of skeletons and bridge detection.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use super::{EdgeEnd, EdgeId, Skeleton, Vertex, VertexId};

/// An orientation-preserving isomorphism respecting cyclic orders and
/// vertex kinds.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Isomorphism {
    pub vertices: BTreeMap<VertexId, VertexId>,
    pub edges: BTreeMap<EdgeId, EdgeId>,
}

#[derive(Clone, Default)]
struct State {
    vmap: BTreeMap<VertexId, VertexId>,
    emap: BTreeMap<EdgeId, EdgeId>,
    vused: BTreeSet<VertexId>,
    eused: BTreeSet<EdgeId>,
}

fn alignments(v: &Vertex, w: &Vertex) -> Vec<Vec<(EdgeEnd, EdgeEnd)>> {
    let (a, b) = (v.ends(), w.ends());
    let same_kind = core::mem::discriminant(v) == core::mem::discriminant(w);
    if !same_kind || a.len() != b.len() {
        return Vec::new();
    }
    let shifts: Vec<usize> = match v {
        Vertex::Trivalent(_) => (0..3).collect(),
        Vertex::Dot(_) | Vertex::Antidot(_) => (0..2).collect(),
        Vertex::Boundary(_) => alloc::vec![0],
    };
    // both rotation and swap of a pair are the same shift
    shifts
        .into_iter()
        .map(|r| (0..a.len()).map(|i| (a[i], b[(i + r) % b.len()])).collect())
        .collect()
}

fn try_align(st: &State, pairs: &[(EdgeEnd, EdgeEnd)]) -> Option<State> {
    let mut st = st.clone();
    for &(x, y) in pairs {
        if x.end != y.end {
            return None;
        }
        match st.emap.get(&x.edge) {
            Some(&f) if f != y.edge => return None,
            Some(_) => {}
            None => {
                if !st.eused.insert(y.edge) {
                    return None;
                }
                st.emap.insert(x.edge, y.edge);
            }
        }
    }
    Some(st)
}

fn search(s: &Skeleton, t: &Skeleton, st: State) -> Option<State> {
    if st.vmap.len() == s.vertices.len() {
        return Some(st);
    }
    // prefer a vertex whose image is forced by an already mapped edge
    let mut forced = None;
    for (&v, vert) in &s.vertices {
        if st.vmap.contains_key(&v) {
            continue;
        }
        for &end in vert.ends() {
            if let Some(&f) = st.emap.get(&end.edge) {
                forced = Some((v, t.vertex_at(EdgeEnd { edge: f, end: end.end })?));
                break;
            }
        }
        if forced.is_some() {
            break;
        }
    }
    let (v, candidates): (VertexId, Vec<VertexId>) = match forced {
        Some((v, w)) => (v, alloc::vec![w]),
        None => {
            let v = *s.vertices.keys().find(|v| !st.vmap.contains_key(v))?;
            (v, t.vertices.keys().copied().filter(|w| !st.vused.contains(w)).collect())
        }
    };
    let vert = &s.vertices[&v];
    for w in candidates {
        if st.vused.contains(&w) {
            continue;
        }
        for pairs in alignments(vert, &t.vertices[&w]) {
            if let Some(mut next) = try_align(&st, &pairs) {
                next.vmap.insert(v, w);
                next.vused.insert(w);
                if let Some(done) = search(s, t, next) {
                    return Some(done);
                }
            }
        }
    }
    None
}

/// Finds an isomorphism `s -> t` if one exists.
pub fn find_isomorphism(s: &Skeleton, t: &Skeleton) -> Option<Isomorphism> {
    if s.vertices.len() != t.vertices.len() || s.edges.len() != t.edges.len() {
        return None;
    }
    let st = search(s, t, State::default())?;
    let mut edges = st.emap;
    let c1: Vec<EdgeId> = s.circles().collect();
    let c2: Vec<EdgeId> = t.circles().collect();
    if c1.len() != c2.len() {
        return None;
    }
    edges.extend(c1.into_iter().zip(c2));
    Some(Isomorphism { vertices: st.vmap, edges })
}

pub fn is_isomorphic(s: &Skeleton, t: &Skeleton) -> bool {
    find_isomorphism(s, t).is_some()
}

/// Whether removing edge `e` disconnects its endpoints.
pub fn is_bridge(s: &Skeleton, e: EdgeId) -> bool {
    let Ok(Some((a, b))) = s.endpoints(e) else { return false };
    if a == b {
        return false;
    }
    let mut seen = BTreeSet::new();
    let mut stack = alloc::vec![a];
    while let Some(v) = stack.pop() {
        if v == b {
            return false;
        }
        if !seen.insert(v) {
            continue;
        }
        for end in s.vertices[&v].ends() {
            if end.edge == e {
                continue;
            }
            if let Some(w) = s.vertex_at(end.opposite()) {
                stack.push(w);
            }
        }
    }
    true
}
