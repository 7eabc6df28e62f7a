//! Connected text recognition with layered HMMs and token passing.

pub mod error;
pub mod eval;
pub mod hmm;
pub mod ld;
pub mod od;
pub mod pipeline;
pub mod smoothing;
pub mod token;

pub use error::{Error, Result};
