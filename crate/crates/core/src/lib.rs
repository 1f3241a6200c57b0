//! Exact computations with finite dg categories, twisted tensor products of
//! interval categories, and the complexes built from them.

pub mod baroracle;
pub mod cli;
pub mod combination;
pub mod complex;
pub mod dgcat;
pub mod fixtures;
pub mod linalg;
pub mod operad;
pub mod scalar;
pub mod twist;
