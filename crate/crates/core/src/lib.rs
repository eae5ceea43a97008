//! Gauge functions for given electromagnetic potentials, built along
//! integration routes, with the nonlocal terms and multiplicities that make
//! different routes agree, plus Aharonov-Bohm phase estimates.

pub mod numerics;
pub mod fields;
pub mod gauge_solver;
pub mod analysis;
pub mod semiclassical;
pub mod cli;
