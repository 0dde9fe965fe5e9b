//! Exact computation of the strongest algebraic invariants of linear hybrid
//! automata without guards.

pub mod discretise;
pub mod error;
pub mod exactnum;
pub mod flowclosure;
pub mod hybrid;
pub mod intlat;
pub mod matalg;
pub mod oracle;
pub mod polyideal;
pub mod semigroup;

pub use error::{Error, Result};
