//! Exact and Monte-Carlo checks for unitary designs built from random diagonal
//! unitaries.
//!
//! The moment operator of an ensemble is `E[U^{⊗t} ⊗ U*^{⊗t}]`. Every module
//! uses the index layout in [`linalg::TensorLayout`].

pub mod budget;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod moment;
pub mod mub;
pub mod permcheck;
pub mod rdc;
pub mod report;
pub mod rng;
pub mod structured;
pub mod suite;

pub use budget::Budget;
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, TensorLayout, C64};
pub use rng::RandomSource;
