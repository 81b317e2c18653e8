pub mod codes;
pub mod error;
pub mod gtg;
pub mod scc;
pub mod siso;
pub mod trellis;

pub use error::{Error, Result};
