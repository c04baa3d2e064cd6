//! Computational tools for Coxeter groups.

pub mod autcompat;
pub mod cli;
pub mod diagram;
pub mod error;
pub mod evenconj;
pub mod finite;
pub mod parabolic;
pub mod quotients;
pub mod words;

pub use diagram::{CoxeterMatrix, DiagramClassification, Entry, IndexSet};
pub use error::{EngineError, ParseError};
pub use words::{CoxeterGroup, Element, Word};
