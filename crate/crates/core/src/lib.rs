//! Witness constructions and finite-horizon verification for proximal and
//! syndetically proximal pairs in symbolic and interval dynamics.

pub mod error;
pub mod exec;
pub mod interval;
pub mod natsets;
pub mod recipe;
pub mod relations;
pub mod rotation;
pub mod subshifts;
pub mod substitution;
pub mod witnesses;
pub mod words;

pub use error::{Error, Result};
pub use exec::Exec;
pub use recipe::StreamRecipe;
pub use words::{Alphabet, StreamDistance, Sym, SymbolStream, Word};
