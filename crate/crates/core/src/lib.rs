//! Signed measures, powers of measures, Markov kernels and parametrized
//! measure models on finite sample spaces, with the information loss of
//! statistics between them.

mod error;
pub mod infoloss;
pub mod markov;
pub mod measures;
pub mod models;

pub use error::{Error, Result};
