//! Batch-code laboratory.
//!
//! Exact tools for primitive multiset batch codes over prime fields:
//!
//! - [`field`] and [`matrix`]: arithmetic and Gauss-Jordan elimination in GF(p).
//! - [`code`]: systematic linear codes, dual codes, and the conversion between
//!   linear recovery functions and dual codewords.
//! - [`constructions`]: baseline code families.
//! - [`batch`]: exact k-batch verification with an independent brute-force oracle.
//! - [`tensor`]: the dual-tensor redundancy argument executed on concrete codes,
//!   producing certificates that can be rechecked from scratch.
//! - [`bounds`]: known redundancy exponent curves and their plot.
//! - [`cli`]: the `batchlab` command-line front end.

pub mod batch;
pub mod bounds;
pub mod cli;
pub mod code;
pub mod config;
pub mod constructions;
pub mod error;
pub mod field;
pub mod matrix;
pub mod tensor;

pub use code::{DualCodeword, LinearCode, RecoverySet};
pub use config::Config;
pub use error::{Error, Result};
pub use field::{Field, FieldElement};
pub use matrix::{Matrix, Rref};
