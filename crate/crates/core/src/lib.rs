//! Quantum discord and the entropy cost of erasing correlations with local
//! channels.
//!
//! States are [`qmath::DensityOperator`]s over labelled subsystems. Local
//! processes are [`channels::UnitaryDilation`]s run by
//! [`channels::run_process`]; [`ledger::build_ledger`] turns the outcome
//! into before/after entropies and discord, and the `check_*` functions in
//! [`ledger`] evaluate the inequalities relating them. [`ensembles`] sweeps
//! all checks over seeded random states and channels.
//!
//! Entropies are in bits throughout.

pub mod channels;
pub mod correlations;
pub mod ensembles;
pub mod error;
pub mod io;
pub mod ledger;
pub mod qmath;
pub mod scenario;

pub use error::{Error, Result};
