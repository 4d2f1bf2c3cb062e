//! Sheaf-theoretic contextuality for measurement scenarios: possibilistic
//! extendability of support sections and the Čech cohomology obstruction.

pub mod analysis;
pub mod cli;
pub mod cohomology;
pub mod corpus;
pub mod document;
pub mod error;
pub mod extendability;
pub mod linalg;
pub mod model;
pub mod report;
pub mod scenario;

pub use error::{Error, Result};
