//! Minimal dense-tensor reverse-mode automatic differentiation.
//!
//! A [`Tape`] records forward operations on 64-bit [`Tensor`] values and
//! replays them in reverse for gradients. The module also carries the
//! [`AdamState`] optimizer, the inverse-square-root [`LrSchedule`], named
//! [`Parameters`] with bit-exact checkpointing, and nothing model-specific:
//! the seq2seq architecture lives one layer up.
//!
//! Graph construction and backward are single-threaded per training step;
//! parameter snapshots are plain value copies and safe to send between
//! threads.

mod checkpoint;
mod optim;
mod params;
mod tape;
mod tensor;

pub use checkpoint::{load_parameters, save_parameters, CheckpointError};
pub use optim::{AdamConfig, AdamState, LrSchedule};
pub use params::{GradMap, Parameters};
pub use tape::{Gradients, Tape, Var};
pub use tensor::Tensor;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiffError {
    #[error("shape mismatch in {op}: {details}")]
    ShapeMismatch { op: &'static str, details: String },
    #[error("numerical overflow in {0}")]
    NumericalOverflow(&'static str),
    #[error("loss must be a scalar, got {rows}x{cols}")]
    NonScalarLoss { rows: usize, cols: usize },
    #[error("backward already ran on this graph")]
    GraphReuse,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
