//! Input representations, encrypted conversions and comparators for one-hot
//! maps, evaluated on a CKKS-style SIMD simulator with exact cost accounting.

pub mod bench;
pub mod comparators;
pub mod conversions;
pub mod error;
pub mod measure;
pub mod packing;
pub mod rational;
pub mod representations;
pub mod simd;

pub use error::{HeError, Result};
