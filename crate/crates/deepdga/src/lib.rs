//! Adversarially-tuned domain generation and detection.
//!
//! The crate has four pillars:
//!
//! - classic DGA family generators and hand-crafted-feature extraction
//!   ([`dga`], [`features`]) feeding a from-scratch random forest ([`forest`]);
//! - a character-level domain autoencoder built on a minimal differentiable
//!   kernel ([`neural`], [`autoencoder`]);
//! - the autoencoder repurposed as a GAN with box-constrained generators and
//!   history-regularized rounds ([`gan`]);
//! - metrics and the experiment harness that evaluates detectability,
//!   adversarial degradation, and detector hardening ([`metrics`],
//!   [`experiments`]).

pub mod autoencoder;
pub mod corpus;
pub mod dga;
pub mod experiments;
pub mod features;
pub mod gan;
pub mod forest;
pub mod metrics;
pub mod weights;
pub mod neural;
pub mod error;
pub mod rng;

pub use error::{Error, Result};
