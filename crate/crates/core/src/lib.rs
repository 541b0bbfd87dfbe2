//! Weakly inscribed polyhedra: decides whether a 3-connected planar graph is
//! the 1-skeleton of a polyhedron inscribed to a sphere but not contained in
//! it, synthesizes witness weight functions, and extracts and verifies the
//! dihedral-angle and metric data of explicit polyhedra with vertices on the
//! two-sheeted hyperboloid.

pub mod enumerate;
pub mod ext_complex;
pub mod graph;
pub mod horocycle;
pub mod io;
pub mod report;
pub mod hull;
pub mod lp;
pub mod metric;
pub mod minkowski;
pub mod numeric;
pub mod polyhedron;

pub use minkowski::{Sheet, Vec4};
