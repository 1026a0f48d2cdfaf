pub mod error;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod energy;
pub mod expm;
pub mod simulate;
pub mod properties;
pub mod cli;

#[cfg(test)]
mod proptests;
