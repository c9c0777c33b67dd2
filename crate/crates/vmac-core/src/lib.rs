//! Achievable rates, quantization-noise optimization, and constant-gap
//! certificates for the uplink cloud radio access network with a finite sum
//! backhaul.
//!
//! Base stations quantize their received uplink signals (Wyner-Ziv or
//! single-user compression) and forward them to a central processor, which
//! decodes the quantization codewords and then the user messages as a
//! virtual multiple-access channel. This crate provides:
//!
//! - [`linalg`]: dense complex Hermitian primitives (Cholesky log-det,
//!   inverses, rank-one accumulation);
//! - [`rate`]: rate and backhaul-usage formulas for both compression
//!   schemes, successive-decoding corner points, and the cut-set bound;
//! - [`wz`]: alternating convex optimization of quantization noise levels
//!   for Wyner-Ziv compression plus the proportional high-SQNR bisection;
//! - [`su`]: the backhaul-rate reformulation for single-user compression,
//!   its projected-gradient solver, and multi-tier allocation;
//! - [`gap`]: constant-gap certificates against the cut-set bound;
//! - [`synth`]: deterministic random instance generators for sweeps.

pub mod gap;
pub mod linalg;
pub mod rate;
pub mod solver;
pub mod su;
pub mod synth;
pub mod wz;

pub use linalg::{HermitianMatrix, LinalgError, C64};
pub use rate::{ChannelState, ModelError, QuantizationProfile, RateReport};
