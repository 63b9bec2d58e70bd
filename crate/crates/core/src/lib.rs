//! Rigidity analysis for crystallographic bar-joint frameworks.

pub mod algebra;
pub mod apflex;
pub mod error;
pub mod framework;
pub mod gallery;
pub mod linalg;
pub mod phase;
pub mod rum;
pub mod symbol;

pub use error::{Error, Result};
