//! Varieties cut out by large subspaces of quadratic forms over finite
//! fields, and the arcs, tracks and MDS/AMDS codes they give.

pub mod classify;
pub mod constructions;
pub mod error;
pub mod fitting;
pub mod gf;
pub mod projgeom;
pub mod quadforms;
pub mod search;
pub mod symmetry;
pub mod variety;

pub use error::{Error, Result};
