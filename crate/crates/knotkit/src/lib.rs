//! knotkit — combinatorial knot diagram toolkit.
//!
//! Everything works on planar diagrams given as PD codes. The main pipeline
//! takes an arbitrary knot diagram, makes it alternating (same underlying
//! shadow), reduces it to a prime, nugatory-free, twist-collapsed core
//! diagram, augments every twist region with an encircling loop, and emits
//! Dehn-surgery instructions that recover the original knot (or its
//! alternating companion) from the augmented link. Crossing-number and
//! volume bounds for the augmented link are computed and checked along the
//! way.

pub mod augment;
pub mod bounds;
pub mod census;
pub mod diagram;
pub mod gen;
pub mod moves;
pub mod pipeline;
pub mod reduce;
pub mod seifert;

pub use diagram::{Crossing, Diagram, Edge, PdError};
