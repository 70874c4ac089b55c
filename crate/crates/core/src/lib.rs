//! A seeded laboratory for testing whether zodiac signs predict personality
//! labels.
//!
//! The pipeline is: [`lexicon`] (100 trait descriptors and the overlapping
//! sign-to-trait table) → [`synthpop`] (population with a tunable signal
//! mixture) → [`features`] (one-hot encoding and fold-safe standardization)
//! → [`models`] (logistic regression, random forest, MLP, all from scratch)
//! → [`eval`] (cross-validation, held-out accuracy, confusion matrices,
//! baselines and the shuffled-label permutation control).
//!
//! Every stochastic step draws from [`rng::Pcg32`] streams derived from the
//! configured seeds, so results are reproducible byte for byte.

pub mod chart;
pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod features;
pub mod fmt;
pub mod lexicon;
pub mod models;
pub mod rng;
pub mod synthpop;

pub use error::{Error, Result};
