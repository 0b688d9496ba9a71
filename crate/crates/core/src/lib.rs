//! Free-fermion solver for the long-range extended XY chain with
//! long-range Dzyaloshinskii-Moriya coupling.

pub mod cli;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod gaussian;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod spincorr;

pub use error::{Error, Result};
pub use model::ModelParams;
