pub mod algebra;
pub mod arith;
pub mod catalog;
pub mod cohomology;
pub mod harness;
pub mod linalg;
pub mod symmetry;
