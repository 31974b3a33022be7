//! Exact arithmetic for Hecke operators on GSp₄ and the associated
//! Bost–Connes–Marcolli style quantum statistical mechanics.

pub mod characters;
pub mod cli;
pub mod cosets;
pub mod error;
pub mod hecke;
pub mod matrix;
pub mod normal_forms;
pub mod number;
pub mod oracle;
pub mod symplectic;
pub mod thermo;

pub use error::{Error, Result};
pub use matrix::{IntMat, MatQ};
pub use normal_forms::{DivisorType, StratumLabel};
pub use number::Rational;
pub use symplectic::Similitude;
