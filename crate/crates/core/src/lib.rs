pub mod circuit;
pub mod error;
pub mod homotopy;
pub mod interval;
pub mod moore;
pub mod refine;
pub mod taylor;
pub mod tracker;

pub use error::{Error, Result};
