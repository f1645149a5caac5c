pub mod beltrami;
pub mod constants;
pub mod construction;
pub mod disk;
pub mod error;
pub mod graph;
pub mod koebe;
pub mod numeric;

pub use error::{Error, Result};
