//! Compositional task-oriented semantic parsing at desk scale.
//!
//! The crate provides:
//!
//! * [`tree`] — the serialized intent/slot parse-tree format: parsing,
//!   serialization, canonicalization, and statistics.
//! * [`corpus`] — corpus ingestion, SPIS low-resource sampling, vocabulary
//!   construction, and target-sequence encoding.
//! * [`diffcore`] — a minimal dense-tensor reverse-mode autodiff engine with
//!   Adam and the inverse-sqrt learning-rate schedule.
//! * [`model`] — the copy-pointer seq2seq architecture (recurrent and
//!   attention encoders/decoders) with greedy and beam decoding.
//! * [`train`] — supervised, joint, Reptile, and first-order MAML training
//!   regimes with early stopping.
//! * [`eval`] — exact-match evaluation on canonical parses and
//!   accuracy-vs-SPIS curve experiments.
//! * [`synthetic`] — seeded toy-grammar generators for desk-scale benchmarks.
//!
//! With the default `parallel` feature, per-example evaluation and multi-seed
//! sweeps run on rayon; disabling the feature yields a fully sequential build
//! with identical results.

pub mod corpus;
pub mod diffcore;
pub mod eval;
pub mod model;
pub mod seeding;
pub mod synthetic;
pub mod train;
pub mod tree;

mod parallel;

pub use parallel::{par_map, seq_map};
