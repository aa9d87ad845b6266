pub mod error;
pub mod linalg;
pub mod models;
pub mod spectra;
pub mod metrology;
pub mod dynamics;

pub use error::{Error, Result};
pub mod experiments;
pub mod cli;
