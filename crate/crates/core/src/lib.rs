//! Vector-space interference alignment for the K-user constant MIMO
//! interference channel: closed-form feasibility tests, explicit three-user
//! constructions, a Newton solver for general K, verification, and exact
//! solution counts by Schubert calculus on products of Grassmannians.

pub mod channel;
pub mod cli;
pub mod construct3;
pub mod error;
pub mod feasibility;
pub mod io;
pub mod linalg;
pub mod numsolve;
pub mod schubert;
pub mod spec;
pub mod strategy;
pub mod verify;

pub use channel::{generate_channels, ChannelSet};
pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use spec::{ProblemSpec, UserDims};
pub use strategy::Strategy;
