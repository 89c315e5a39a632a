//! Vertex enumeration and convex maximization over shaped partition polytopes, in exact
//! rational arithmetic.

pub mod cli;
pub mod crosscheck;
pub mod error;
pub mod generic;
pub mod hull;
pub mod linalg;
pub mod partition;
pub mod problem;
pub mod random;
pub mod reference;
pub mod solver;
pub mod vertices;

pub use error::{Error, Result};
