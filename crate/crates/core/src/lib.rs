//! Associated-graded calculus of (dotted) knotted trivalent graphs.
//!
//! Everything here is combinatorial and exact: skeletons are half-edge
//! graphs, chord diagrams are pairings of slots along their edges, and the
//! spaces `A(Γ)` are computed as quotients by the four-term and vertex
//! invariance relations over arbitrary-precision rationals.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, caching and the
//! command line live in the `ktg` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod associator;
pub mod coeff;
pub mod diagram;
pub mod error;
pub mod graph_ops;
mod linalg;
pub mod relations;
pub mod skeleton;
pub mod strand_algebra;

pub use coeff::{Coeff, Param, Poly, Rational};
pub use diagram::{ChordDiagram, LinComb};
pub use error::{Error, Result};
pub use graph_ops::GradedElement;
pub use relations::{Bases, LocalBases, QuotientBasis};
pub use skeleton::{Edge, EdgeEnd, EdgeId, End, Skeleton, Vertex, VertexId};
pub use strand_algebra::{FreeGroupMap, Series};

/// Version tag of the relation generators and quotient conventions.
///
/// Bump whenever the 4T/VI encoding, the canonical form, or the pivot rule
/// changes; cached bases carry it and are discarded on mismatch.
pub const RELATIONS_VERSION: &str = "ktg-relations-1";
