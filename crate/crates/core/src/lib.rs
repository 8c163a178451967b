pub mod catalog;
pub mod complex;
pub mod covering;
pub mod error;
pub mod game;
pub mod hodge;
pub mod io;
pub mod nash;
pub mod nerve;
pub mod pipeline;

pub use error::{Error, Result};
