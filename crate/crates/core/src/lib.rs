//! Exact computation with twisted Exel-Pardo tuples, their Cohn algebras and
//! quotients, twisted Katsura algebras, and the K-theory of the latter.

pub mod algebra;
pub mod error;
pub mod ep;
pub mod graph;
pub mod io;
pub mod group;
pub mod katsura;
pub mod ktheory;
pub mod scalar;
pub mod semigroup;

pub use error::{Error, Result};
pub use ep::EpTuple;
pub use graph::{EdgeId, Graph, Path, VertexId};
pub use group::{GroupElem, GroupModel};
pub use scalar::{Field, Scalar};
