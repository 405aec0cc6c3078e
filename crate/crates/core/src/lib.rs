pub mod analysis;
pub mod assembly;
pub mod experiment;
pub mod mesh;
pub mod problems;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod sparse;
pub mod wg_space;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
