//! Numerical toolkit for canonical coordinate/momentum pairs on six model
//! spaces: the real line, the half-line, the finite interval, the two-sided
//! and one-sided lattices, and a finite basis. On top of the pairs sit
//! generalized measurement families with validation and dilation, coherent
//! state frames, a continuously monitored weak measurement, and a suite of
//! finite-interval regression computations.

pub mod coherent;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod measure;
pub mod pairs;
pub mod paradox;
pub mod schema;
pub mod weak;

pub use error::{Error, Result};
pub use hilbert::{DomainSpec, LinearOperator, StateVector};
