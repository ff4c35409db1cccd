//! Energy-detection spectrum sensing over Fisher–Snedecor F composite fading.
//!
//! Closed-form and series evaluation of false-alarm and detection
//! probabilities (single user, OR/AND cooperative sensing, square-law
//! selection diversity, noise-power uncertainty), ROC curves, the area under
//! the ROC curve, Shannon/cross/relative entropies of the SNR law, and a
//! Monte Carlo simulator that reproduces the detector physics.

pub mod auc;
pub mod detection;
pub mod entropy;
pub mod error;
pub mod fading;
pub mod montecarlo;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
