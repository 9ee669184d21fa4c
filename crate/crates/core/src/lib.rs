pub mod config;
pub mod density;
pub mod dispersion;
pub mod error;
pub mod heatmap;
pub mod kernel;
pub mod linalg;
pub mod oracle;
pub mod output;
pub mod paraxial;
pub mod quadrature;
pub mod source;
pub mod units;

pub use error::{Error, Result};
