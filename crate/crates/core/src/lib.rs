//! Planning models for 2.4/5 GHz wireless availability engineering.
//!
//! - [`rf`]: free-space loss, Friis link budget, power-utilization coefficient
//! - [`lens`]: accelerating metal-plate lens index, profile and link effect
//! - [`fresnel`]: Fresnel-zone geometry and annular-screen field enhancement
//! - [`polar`]: polarization mismatch, tilt and 2×2 MIMO capacity
//! - [`spectrum`]: sensor frames, sweep aggregation, channel planning, simulation
//! - [`growth`]: doubling-period fit for access-point counts

// `!(x > 0.0)` checks are kept so NaN inputs are rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod fresnel;
pub mod growth;
pub mod lens;
pub mod polar;
pub mod rf;
pub mod spectrum;
