pub mod binomsums;
pub mod checks;
pub mod cli;
pub mod error;
pub mod modarith;
pub mod report;
pub mod scanner;
pub mod sequences;

pub use error::{Error, Result};
