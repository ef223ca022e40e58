//! Steady-state modeling, main-circuit design and quasi-static simulation of
//! LCC-HVDC corridors with hybrid LCC + full-bridge MMC series taps.
//!
//! - [`converter`]: closed-form LCC and FBMMC relations
//! - [`eflcc`]: operating point of the hybrid tap, fixed-α and LPC modes
//! - [`corridor`]: corridor voltage balance, clean-energy and distance limits
//! - [`design`]: transformer ratios, capacities, losses, topology comparison
//! - [`sim`]: scheduled quasi-static runs with LPC detection delay
//! - [`cli`]: configuration parsing and the `hvdc-taplab` commands

// negated comparisons deliberately reject NaN inputs
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod converter;
pub mod corridor;
pub mod design;
pub mod eflcc;
pub mod error;
pub mod exec;
pub mod sim;
pub mod units;

pub use error::{Error, Result};
pub use exec::Execution;
