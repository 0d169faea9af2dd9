//! Computational laboratory for greedy-type approximation in spaces with an
//! unconditional basis: exact set and functional enumeration, constant
//! estimation over finite families, and property checks with witnesses.

pub mod cli;
pub mod constants;
pub mod error;
pub mod family;
pub mod greedy;
pub mod lambda;
pub mod report;
pub mod search;
pub mod sigma;
pub mod space;
pub mod theorems;
pub mod transport;
pub mod witness;

pub use error::{LabError, Result};
pub use family::SearchFamily;
pub use lambda::Lambda;
pub use space::{IndexSet, Norm, SpaceSpec, Vector};
