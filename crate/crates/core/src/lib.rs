//! Classification and certified geometry of differences of S-Cantor sets.

pub mod classifier;
pub mod cli;
pub mod digits;
pub mod geometry;
pub mod render;
pub mod verifier;
