//! Privacy accounting with alpha differential privacy (ADP).
//!
//! ADP bounds the alpha divergence
//! `D̃_α(P‖Q) = (∫ p^α q^{1-α} - 1) / (α(α-1))`, `α > 1`, between the
//! output distributions of a mechanism on neighbouring datasets. This crate
//! provides:
//!
//! - [`divergence`]: alpha, Rényi, KL and max divergence oracles over finite
//!   distributions, plus quadrature for Gaussian and Laplace densities;
//! - [`mechanisms`]: closed-form per-query costs for randomized response,
//!   Laplace and Gaussian noise, with RDP, zCDP and (ε, δ) baselines;
//! - [`accounting`]: guarantee types, composition, conversion to (ε, δ)-DP,
//!   group privacy and a replayable composition ledger;
//! - [`optimizer`]: grid searches for the α minimising cumulative cost or
//!   the σ meeting a budget;
//! - [`sweep`]: the tables behind the framework comparison curves.

pub mod accounting;
pub mod divergence;
pub mod error;
pub mod mechanisms;
pub mod optimizer;
pub mod quadrature;
pub mod sweep;

pub use accounting::{
    AdpGuarantee, ApproxDpGuarantee, CompositionLedger, ConversionForm, Framework, RdpGuarantee,
    ZcdpGuarantee,
};
pub use divergence::{Channel, DensityFamily, DensitySpec, DiscreteDistribution};
pub use error::{Error, ErrorKind, Result};
pub use mechanisms::MechanismSpec;
pub use optimizer::{AlphaSearchConfig, OptimizationResult};
pub use sweep::{AlphaSelection, OptimizerCurve, SweepTable};
