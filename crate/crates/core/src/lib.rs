//! Primitives for simulating a federated patent-retrieval environment and
//! merging the result lists it produces.
//!
//! The crate is `no_std` and only needs an allocator. Everything that touches
//! files, threads or the command line lives in the `fedmerge` companion crate.
//!
//! Pipeline, bottom-up:
//!
//! * [`corpus`]: documents, category-code partitioning, query construction.
//! * [`engine`]: immutable BM25 inverted indexes and [`engine::RankedList`].
//! * [`sampling`]: query-based sampling and the centralized sample index.
//! * [`selection`]: CORI collection statistics and source selection.
//! * [`merging`]: CORI, SSL, multiple-model and global-model merging.
//! * [`mlmodels`]: the regressors used by the learned merging strategies.
//! * [`eval`]: AP, recall and PRES at a cutoff.
//! * [`federation`] and [`synth`]: remote score distortions and a seeded
//!   synthetic patent corpus for desk-scale experiments.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
pub mod engine;
pub mod eval;
pub mod federation;
pub mod merging;
pub mod mlmodels;
pub mod sampling;
pub mod seed;
pub mod selection;
pub mod synth;
pub mod text;

pub use corpus::{CollectionSet, Document, TextFields, Topic};
pub use engine::{Entry, Index, RankedList};
pub use merging::{MergedEntry, MergedRun};
pub use mlmodels::{MergeModel, ModelKind, ModelParams};
