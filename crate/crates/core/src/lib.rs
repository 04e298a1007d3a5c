pub mod analysis;
pub mod cli;
pub mod code;
pub mod construction;
pub mod error;
pub mod format;
pub mod gray;
pub mod grid;
pub mod linalg;
pub mod ring;

pub use error::{Error, Result};
