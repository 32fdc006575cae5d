//! Exact tools for paths in the Nöbeling curve N³₁ and dyadic cube-pair covers.

pub mod certify;
pub mod geom;
pub mod qsqrt2;
pub mod claims;
pub mod cover;
pub mod grid;
pub mod blocks;
pub mod approx;
pub mod finiteness;
pub mod sample;
