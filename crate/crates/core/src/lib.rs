pub mod bench;
mod bigmul;
pub mod curvature;
pub mod error;
pub mod exact;
pub mod field;
pub mod format;
pub mod geom;
pub mod holonomic;
pub mod matrix;
pub mod naive;
mod ntt;
pub mod poly;
pub mod recurrence;
pub mod special;
#[cfg(test)]
mod testutil;
