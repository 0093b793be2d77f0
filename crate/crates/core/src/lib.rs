//! Smooth cut-off functions on complex projective space `P^k`, built by
//! averaging the indicator of a fattened compact set over automorphisms
//! drawn from a scaled smooth measure on `PGL(k+1, C)`.
//!
//! The modules build on each other in order: [`geometry`] (points, charts,
//! Fubini–Study distance), [`lie`] (exponential coordinates near the
//! identity), [`measure`] (the mollifier on `sl(k+1, C)`), [`regularize`]
//! (frozen Monte-Carlo convolution and finite differences) and [`cutoff`]
//! (the construction of `χ_δ` and its checks).

pub mod cli;
pub mod cutoff;
pub mod error;
pub mod geometry;
pub mod lie;
pub mod measure;
pub mod regularize;

pub use error::{Error, Result};
