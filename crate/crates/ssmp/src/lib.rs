//! Simulation and numerical verification of self-similar Markov processes
//! through their Markov additive representations.
//!
//! The crate provides:
//!
//! - domain types for discretized trajectories of the additive pair
//!   (ordinate, modulator) and of the process in Cartesian coordinates
//!   ([`path`]);
//! - reproducible parallel random streams and increment samplers,
//!   including isotropic stable increments ([`rng`]);
//! - the space-time transform linking the two representations, in both
//!   directions ([`lamperti`]);
//! - simulators for Brownian and Markov-modulated additive models with
//!   minimum/excursion extraction and identity checkers ([`map_fluct`]);
//! - the isotropic stable process: closed-form point-of-closest-reach law,
//!   conditioning h-functions and importance-weighted conditioned
//!   ensembles ([`stable`]);
//! - the planar cone example: taboo semigroup series, ground state, change
//!   of measure and the explicit ladder density ([`cone`]);
//! - the pre-minimum/post-minimum path construction and its equality-in-law
//!   verification ([`williams`]);
//! - distributional test machinery ([`stats`]) and experiment bundles with
//!   pinned tolerances ([`experiments`]).

pub mod cone;
pub mod error;
pub mod experiments;
pub mod lamperti;
pub mod map_fluct;
pub mod path;
pub mod quad;
pub mod rng;
pub mod stable;
pub mod stats;
pub mod williams;

pub use error::{Error, Result};
