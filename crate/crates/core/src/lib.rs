pub mod cli;
pub mod cone;
pub mod config;
pub mod dd;
pub mod events;
pub mod error;
pub mod group;
pub mod io;
pub mod linalg;
pub mod lorentz;
pub mod nnls;
pub mod order;
pub mod relation;
pub mod sampling;

pub use error::{Error, Result};
