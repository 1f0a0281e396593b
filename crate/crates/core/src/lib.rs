//! Identification minors, tuple invariants and permutation patterns for
//! finite functions of several arguments.

pub mod constructions;
pub mod domain;
pub mod error;
pub mod functions;
pub mod patterns;
pub mod strings;

pub use domain::{Domain, Invariant};
pub use error::{Error, Result};
pub use functions::{Classes, ClassLabel, FiniteFunction};
pub use patterns::{PermGroup, Permutation};
pub use strings::{CsValue, Multiset, Pair, Symbol, Tuple};
