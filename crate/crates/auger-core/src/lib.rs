//! Four-level Auger photoemission model.
//!
//! A pump drives population from the ground level 0 to the short-lived level 3,
//! which relaxes into the metastable level 2. Pairs of level-2 electrons undergo
//! Auger collisions: one partner drops to level 1 (and quickly returns to the
//! ground level), the other is promoted above the vacuum barrier and leaves the
//! four-level system as an emitted electron. The photocurrent is the emitted
//! flux times a tunnelling transmission coefficient.
//!
//! The crate provides:
//!
//! * [`model`] — parameter and state types, validation, the instantaneous
//!   current, and a Fowler–Nordheim transmission helper;
//! * [`kinetics`] — a stiff (Rosenbrock) integrator for the five-population
//!   rate equations, with conservation guarantees;
//! * [`steady`] — closed-form steady-state populations and currents, regime
//!   classification, and numeric cross-validation against the kinetics;
//! * [`decay`] — closed-form radiative vs Auger decay of the metastable level;
//! * [`coherence`] — the collective electron spectral density, both analytic
//!   and by seeded Monte Carlo over ionization times;
//! * [`kv`], [`table`], [`numeric`] — flat key-value configs, delimited text
//!   tables, and small numerical utilities shared by the above.

pub mod coherence;
pub mod decay;
pub mod kinetics;
pub mod kv;
pub mod model;
pub mod numeric;
mod rosenbrock;
pub mod steady;
pub mod table;

pub use kinetics::{SolverOptions, Trajectory};
pub use model::{FowlerNordheimParams, LevelEnergies, PopulationState, SystemParams};
pub use steady::{Regime, SteadyStateSolution};
