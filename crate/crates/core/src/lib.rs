pub mod error;
pub mod factory;
pub mod kernel;
pub mod mpc;
pub mod protocols;
pub mod qhe;
pub mod security;
pub mod seed;

pub use error::{Error, Result};
