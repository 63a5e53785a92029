//! Constant mean curvature cylinders from the Bessel equation, built with
//! the loop-group (DPW) method.
//!
//! The pipeline runs from a holomorphic potential on the punctured plane
//! ([`potential`]) through the holomorphic frame ([`flow`]) and its
//! Iwasawa splitting ([`iwasawa`]) to a mesh from the Sym formula
//! ([`surface`]). Loops in the spectral parameter live on a uniform grid of
//! the unit circle ([`loop_core`]). [`bessel`] integrates the scalar Bessel
//! equation as an independent check of the matrix flow.

pub mod exec;
pub mod loop_core;
pub mod ode;
pub mod potential;
pub mod bessel;
pub mod flow;
pub mod iwasawa;
pub mod surface;
