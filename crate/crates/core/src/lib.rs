pub mod basefield;
pub mod characters;
pub mod diffring;
pub mod error;
pub mod groups;
pub mod hasse;
pub mod kernel;
pub mod parse;
pub mod report;
pub mod spec;
pub mod verify;

pub use error::{Error, Result};
