#![allow(clippy::needless_range_loop)]

pub mod constructions;
pub mod discrimination;
pub mod error;
pub mod linalg;
pub mod random;
pub mod separability;
pub mod states;
pub mod tensor_rank;
pub mod tol;

pub use error::{Error, Result};
