pub mod boundary_maps;
pub mod cli;
pub mod discrete_check;
pub mod error;
pub mod ode;
pub mod positive_type;
pub mod resolvents;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
