//! Feedforward neural-network classifier for the Cleveland heart-disease table.
//!
//! The pipeline is: [`data`] loads, imputes and min-max scales the 13 attributes and
//! encodes the four classes as 2-bit targets; [`network`] holds the logistic
//! feedforward model with hand-derived back-propagation and per-neuron parallel
//! evaluation; [`trainer`] runs backpropagation with momentum and an adaptive
//! learning rate; [`eval`] measures classification efficiency and runs the
//! single-layer vs multi-layer split grid; [`cli`] is the command-line front end.

pub mod cli;
pub mod data;
pub mod error;
pub mod eval;
pub mod network;
pub mod trainer;

pub use error::{Error, Result};
