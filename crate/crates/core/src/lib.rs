pub mod characters;
pub mod cli;
pub mod error;
pub mod lvalue;
pub mod modarith;
pub mod moments;
pub mod postnikov;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
