//! Exact construction of the equidistributed sequence attached to the shift
//! orbit of a fixed point of a binary morphism.

pub mod error;
pub mod extend;
pub mod intervals;
pub mod language;
pub mod normalize;
pub mod oracle;
pub mod pipeline;
pub mod qfield;
pub mod report;
pub mod sequence;
pub mod words;

pub use error::{Error, ErrorClass, Result};
