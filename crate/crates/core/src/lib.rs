pub mod analysis;
pub mod entanglement;
pub mod error;
pub mod numerics;
pub mod rg_flow;
pub mod spin_space;
pub mod xy_model;

pub use error::{Error, Result};
