//! Growing random graphs with nonlinear preferential attachment.
//!
//! The crate covers four jobs:
//!
//! * [`solver`] computes stationary vertex and edge degree distributions of
//!   an NPA model from its recurrences, and mixes distributions of
//!   multi-component graphs;
//! * [`growth`] grows NPA graphs, Barabasi-Albert trees, autocorrelated
//!   Erdos-Renyi graphs and their compositions by simulation, and measures
//!   degree distributions on the result;
//! * [`empirical`] reads SNAP-style edge lists into calibration targets;
//! * [`calibrate`] fits single and composite models to a target vertex and
//!   edge degree distribution.

pub mod calibrate;
pub mod empirical;
pub mod growth;
pub mod io;
pub mod model;
pub mod solver;

pub use model::*;
