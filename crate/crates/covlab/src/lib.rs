//! Coverage laboratory: exact formulas, certified geometry, and reproducible
//! Monte Carlo for Boolean coverage models — continuum Poisson grains,
//! lattice orthant germs, Markov-modulated sites on the integers, and
//! interval processes on the line.

pub mod continuum;
pub mod discretization;
pub mod distributions;
pub mod error;
pub mod experiment;
pub mod intervals;
pub mod geometry;
pub mod harness;
pub mod lattice;
pub mod markov;
pub mod rng;
pub mod stats;
pub mod verdict;

pub use error::{CovlabError, Result};
