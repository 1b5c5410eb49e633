//! Enumerates the IFS variants of self-similar fractal templates and counts,
//! for each, how many cell weights can be chosen freely while the word-space
//! mass condition holds.

pub mod equations;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod markov;
pub mod orbits;
pub mod runner;
pub mod simplify;
pub mod solve;
pub mod template;
pub mod wordspace;

pub use error::{Error, Result};
