//! Growth rates of random Fibonacci sequences.
//!
//! The linear sequence `F(n+2) = F(n+1) ± F(n)` and the non-linear one
//! `F(n+2) = |F(n+1) ± F(n)|`, with `+` drawn with probability `p`, grow like
//! `exp(gamma n)` almost surely. After removing `RLL` patterns from the sign
//! word, the surviving letters form a Markov chain with a single parameter
//! `alpha`, and `gamma = ∫ log x dnu_alpha(x)` for an explicit measure on the
//! Stern-Brocot tree. This crate builds that measure, integrates against it
//! with certified error bounds, and checks the surrounding identities by exact
//! enumeration and by simulation.

pub mod cfrac;
pub mod error;
pub mod lyapunov;
pub mod measure;
pub mod montecarlo;
pub mod params;
pub mod words;

pub use error::{Error, Result};
pub use params::ModelCase;
