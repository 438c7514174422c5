//! Outer automorphisms of free groups acting on the free splitting complex:
//! path calculus on marked graphs, free factor systems, lamination
//! approximations, marked graph pairs, the W projection, and a classifier.

pub mod auto;
pub mod classify;
pub mod dynamics;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod graph;
pub mod lamination;
pub mod splitting;
pub mod text;
pub mod whitehead;
pub mod wproj;
pub mod word;

pub use error::{Error, Result};
