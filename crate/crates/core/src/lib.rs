//! Limit-order-book reconstruction from order flow, cancellation position
//! profiles, and fits of their parametric laws.

pub mod distfit;
pub mod json;
pub mod lobengine;
pub mod orderflow;
pub mod profiles;
pub mod synth;
pub mod cli;
