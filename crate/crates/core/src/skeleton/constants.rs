//! Named skeletons.
//!
//! Cyclic orders follow planar pictures: counterclockwise in the plane.

use alloc::string::String;
use alloc::vec::Vec;

use super::{BivalentKind, EdgeEnd, EdgeId, Skeleton, Vertex, VertexId};

fn t(e: u32) -> EdgeEnd {
    EdgeEnd::tail(EdgeId(e))
}

fn h(e: u32) -> EdgeEnd {
    EdgeEnd::head(EdgeId(e))
}

fn tri(v: u32, ends: [EdgeEnd; 3]) -> (VertexId, Vertex) {
    (VertexId(v), Vertex::Trivalent(ends))
}

/// A single oriented circle, edge 0.
pub fn circle() -> Skeleton {
    Skeleton::new([], [EdgeId(0)]).expect("circle")
}

/// Planar theta: vertices 0 (left) and 1 (right); edge 0 is the middle edge
/// oriented left to right, edges 1 (top) and 2 (bottom) run right to left.
pub fn theta() -> Skeleton {
    Skeleton::new([tri(0, [t(0), h(1), h(2)]), tri(1, [h(0), t(2), t(1)])], []).expect("theta")
}

/// Connected sum of two circles: loop 0 at vertex 0, bridge 1 from vertex 0
/// to vertex 1, loop 2 at vertex 1.
pub fn dumbbell() -> Skeleton {
    Skeleton::new([tri(0, [t(1), t(0), h(0)]), tri(1, [h(1), t(2), h(2)])], []).expect("dumbbell")
}

/// Planar tetrahedron drawn as three upward strands (edges 1, 2, 3) closed
/// by a tree: edge 4 from vertex 1 to vertex 0 joins strands 1 and 2 at the
/// bottom, edge 5 from vertex 2 to vertex 3 joins strands 2 and 3 at the top
/// with strand 1, and edge 6 runs around the outside from vertex 3 back to
/// vertex 1.
///
/// Vertices: 0 = bottom of strands 1,2; 1 = bottom of strand 3; 2 = top of
/// strands 2,3; 3 = top of strand 1.
pub fn tetrahedron() -> Skeleton {
    Skeleton::new(
        [
            tri(0, [h(4), t(2), t(1)]),
            tri(1, [h(6), t(3), t(4)]),
            tri(2, [h(2), h(3), t(5)]),
            tri(3, [h(1), h(5), t(6)]),
        ],
        [],
    )
    .expect("tetrahedron")
}

/// The spanning tree of [`tetrahedron`] whose complement is the three strands.
pub fn tetrahedron_tree() -> [EdgeId; 3] {
    [EdgeId(4), EdgeId(5), EdgeId(6)]
}

/// `n` upward strands; strand `i` is edge `i` from vertex `2i-2` to `2i-1`.
pub fn strands(n: usize) -> Skeleton {
    let mut vs = Vec::new();
    for i in 1..=n as u32 {
        vs.push((VertexId(2 * i - 2), Vertex::Boundary(t(i))));
        vs.push((VertexId(2 * i - 1), Vertex::Boundary(h(i))));
    }
    Skeleton::new(vs, []).expect("strands")
}

/// Circle carrying `k` bivalent vertices of the given kind; edge `i` runs
/// from vertex `i` to vertex `i+1 mod k`.
pub fn circle_with(kind: BivalentKind, k: usize) -> Skeleton {
    if k == 0 {
        return circle();
    }
    let k = k as u32;
    let vs = (0..k).map(|i| {
        let prev = (i + k - 1) % k;
        (VertexId(i), Vertex::bivalent(kind, [h(prev), t(i)]))
    });
    Skeleton::new(vs, []).expect("circle with bivalent vertices")
}

pub fn circle_with_antidots(k: usize) -> Skeleton {
    circle_with(BivalentKind::Antidot, k)
}

fn with_one_on_each(mut s: Skeleton, kind: BivalentKind, edges: &[u32]) -> Skeleton {
    for &e in edges {
        s = s.subdivide(EdgeId(e), kind).expect("subdivide").0;
    }
    s
}

/// Theta with one anti-dot on each of its three edges.
pub fn theta_crossed() -> Skeleton {
    with_one_on_each(theta(), BivalentKind::Antidot, &[0, 1, 2])
}

/// Theta with one dot on each edge.
pub fn theta_dotted() -> Skeleton {
    with_one_on_each(theta(), BivalentKind::Dot, &[0, 1, 2])
}

/// Theta with a single dot on the middle edge (edges 0 and 3 form the
/// dotted middle path).
pub fn dotted_theta_middle() -> Skeleton {
    with_one_on_each(theta(), BivalentKind::Dot, &[0])
}

/// Dumbbell with two anti-dots on each loop.
pub fn dumbbell_crossed() -> Skeleton {
    let s = with_one_on_each(dumbbell(), BivalentKind::Antidot, &[0, 2]);
    // second anti-dot on each loop, on the tail parts
    with_one_on_each(s, BivalentKind::Antidot, &[0, 2])
}

/// Skeletons of the four generators of dotted KTGs: the tetrahedron (twice,
/// since the twisted one differs only in framing), the circle with three
/// anti-dots, and the circle with one anti-dot.
pub fn generator_skeletons() -> [Skeleton; 4] {
    [tetrahedron(), tetrahedron(), circle_with_antidots(3), circle_with_antidots(1)]
}

/// Looks up a built-in skeleton by name: `circle`, `theta`, `dumbbell`,
/// `tetrahedron`, `strands(n)`, `theta-crossed`, `theta-dotted`,
/// `dumbbell-crossed`, `circle-antidots(k)`, `circle-dots(k)`.
pub fn named(name: &str) -> Option<Skeleton> {
    let name = name.trim();
    let arg = |prefix: &str| -> Option<usize> {
        let rest = name.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
        rest.trim().parse().ok()
    };
    match name {
        "circle" => Some(circle()),
        "theta" => Some(theta()),
        "dumbbell" => Some(dumbbell()),
        "tetrahedron" => Some(tetrahedron()),
        "theta-crossed" => Some(theta_crossed()),
        "theta-dotted" => Some(theta_dotted()),
        "dumbbell-crossed" => Some(dumbbell_crossed()),
        _ => {
            if let Some(n) = arg("strands") {
                Some(strands(n))
            } else if let Some(k) = arg("circle-antidots") {
                Some(circle_with(BivalentKind::Antidot, k))
            } else {
                arg("circle-dots").map(|k| circle_with(BivalentKind::Dot, k))
            }
        }
    }
}

pub fn named_list() -> Vec<String> {
    ["circle", "theta", "dumbbell", "tetrahedron", "strands(n)", "theta-crossed", "theta-dotted", "dumbbell-crossed", "circle-antidots(k)", "circle-dots(k)"]
        .iter()
        .map(|s| String::from(*s))
        .collect()
}
