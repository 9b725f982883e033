//! Construction of exactly solvable quantum potentials in D dimensions from
//! orthogonal-polynomial differential equations, together with an
//! independent Numerov shooting solver that verifies every constructed
//! spectrum and wavefunction numerically.

pub mod catalog;
pub mod expr;
pub mod polys;
pub mod solver;
pub mod transform;
